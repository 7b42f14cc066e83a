//! Reverse reconstruction of every charging path arriving by a bound.
//!
//! Each open item carries the latest time its node may be left. A row
//! matches when it leaves the node with the required SoC no later than that;
//! the ancestor's deadline is then the latest arrival at the node that still
//! allows the same charge to finish in time, minus the edge time. Every item
//! pushed has at least one completion back to the origin, so nothing is
//! explored in vain.

use std::collections::VecDeque;

use super::charging::latest_arrival;
use super::path::{simulate_path, ChargingPath};
use super::table::RoutingTable;
use super::{RoutingRequest, SearchConfig, SearchError};
use crate::gtds::{Gtds, NodeId};
use crate::ledger::Trt;
use crate::units::{Energy, Minutes};

#[derive(Clone, Debug, Default)]
pub struct BackwardOutcome {
    pub paths: Vec<ChargingPath>,
    /// Set when the path cap stopped the enumeration.
    pub overflow: bool,
}

struct Item {
    node: NodeId,
    soc: Option<Energy>,
    latest: Minutes,
    /// Stops from this node to the destination.
    tail: Vec<(NodeId, Option<Energy>)>,
}

/// Expansion budget per requested path, guarding against tables with an
/// astronomically large number of matching chains.
const ITEMS_PER_PATH: usize = 4096;

pub fn backward_pass(
    gtds: &Gtds,
    trt: &Trt,
    req: &RoutingRequest,
    table: &RoutingTable,
    bound: Minutes,
    cfg: &SearchConfig,
) -> Result<BackwardOutcome, SearchError> {
    let mut out = BackwardOutcome::default();
    if table.is_empty() {
        return Ok(out);
    }
    let mut queue =
        VecDeque::from([Item { node: req.destination, soc: None, latest: bound, tail: vec![(req.destination, None)] }]);
    let mut budget = cfg.max_paths.saturating_mul(ITEMS_PER_PATH);
    while let Some(item) = queue.pop_front() {
        if budget == 0 {
            out.overflow = true;
            break;
        }
        budget -= 1;
        let at_dest = item.node == req.destination;
        for row in table.rows_at(item.node) {
            let (Some(m), Some(soc_anc), Some(soc_a)) = (row.anc, row.soc_anc, row.soc_a) else {
                continue;
            };
            if row.t_d > item.latest || (!at_dest && row.soc_d != item.soc) {
                continue;
            }
            let la = if at_dest {
                item.latest
            } else {
                let target = row.soc_d.expect("station rows carry a departure SoC");
                match latest_arrival(trt, item.node, soc_a, target, item.latest, req.vehicle_rate_kw, cfg.overhead)? {
                    Some(la) => la,
                    None => continue,
                }
            };
            let w = gtds.edge(m, item.node).expect("rows follow graph edges").w;
            let latest_m = la - w;
            let mut tail = Vec::with_capacity(item.tail.len() + 1);
            tail.push((m, Some(soc_anc)));
            tail.extend_from_slice(&item.tail);
            if m == req.origin {
                if req.depart > latest_m {
                    continue;
                }
                if out.paths.len() == cfg.max_paths {
                    out.overflow = true;
                    return Ok(out);
                }
                let path = simulate_path(gtds, trt, req, &tail, cfg.overhead)?;
                debug_assert!(path.arrival() <= bound);
                out.paths.push(path);
            } else {
                queue.push_back(Item { node: m, soc: Some(soc_anc), latest: latest_m, tail });
            }
        }
    }
    Ok(out)
}
