use std::io;

use serde::Serialize;

use crate::gtds::{Gtds, NodeId};
use crate::units::{Energy, Minutes, SlotRange};

/// One forward-pass record. Columns follow the routing-table layout:
/// node, ancestor, arrival time, ancestor leave SoC, arrival SoC, departure
/// SoC, charge time, departure time. The origin row has no arrival fields and
/// destination rows have no departure SoC or charge time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoutingTableRow {
    pub node: NodeId,
    pub anc: Option<NodeId>,
    pub t_a: Option<Minutes>,
    pub soc_anc: Option<Energy>,
    pub soc_a: Option<Energy>,
    pub soc_d: Option<Energy>,
    pub t_ch: Option<Minutes>,
    pub t_d: Minutes,
    #[serde(skip)]
    pub slots: Option<SlotRange>,
    #[serde(skip)]
    pub wait: Minutes,
}

/// Rows in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoutingTable {
    pub rows: Vec<RoutingTableRow>,
}

impl RoutingTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows_at(&self, node: NodeId) -> impl Iterator<Item = &RoutingTableRow> {
        self.rows.iter().filter(move |r| r.node == node)
    }

    /// `V,anc,t_a,soc_anc,soc_a,soc_d,t_ch,t_d` with node names and kWh; empty
    /// fields where a column does not apply.
    pub fn write_csv<W: io::Write>(&self, gtds: &Gtds, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["V", "anc", "t_a", "soc_anc", "soc_a", "soc_d", "t_ch", "t_d"])?;
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                gtds.name(r.node).to_owned(),
                opt(r.anc.map(|a| gtds.name(a).to_owned())),
                opt(r.t_a.map(|t| t.to_string())),
                opt(r.soc_anc.map(|e| e.to_string())),
                opt(r.soc_a.map(|e| e.to_string())),
                opt(r.soc_d.map(|e| e.to_string())),
                opt(r.t_ch.map(|t| t.to_string())),
                r.t_d.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
