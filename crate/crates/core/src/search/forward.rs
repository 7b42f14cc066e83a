//! Best-first label setting over `(node, leave SoC)` pairs.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use super::charging::earliest_departure;
use super::table::{RoutingTable, RoutingTableRow};
use super::{RoutingRequest, SearchConfig, SearchError};
use crate::gtds::{Gtds, NodeId};
use crate::ledger::Trt;
use crate::units::{Energy, Minutes};

/// Hook that lets a caller abandon a search early. The search stops once
/// no open label is alive and no recorded row was marked relevant.
pub trait Refiner {
    /// Whether leaving `node` at time `t` can still matter to the caller.
    fn alive(&self, node: NodeId, t: Minutes) -> bool;
    /// Whether a recorded row matters to the caller.
    fn relevant(&self, row: &RoutingTableRow) -> bool;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForwardStatus {
    Complete,
    Unreachable,
    RefinedAway,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub pops: u64,
    /// Calls to the charging-window scan.
    pub relaxations: u64,
}

#[derive(Clone, Debug)]
pub struct ForwardOutcome {
    pub table: RoutingTable,
    /// Earliest destination arrival (absolute minutes).
    pub best: Option<Minutes>,
    /// Pruning bound in force at the end: `best + epsilon`.
    pub bound: Option<Minutes>,
    pub status: ForwardStatus,
    pub stats: SearchStats,
}

type Label = (NodeId, Energy);

struct Open<'r> {
    heap: BinaryHeap<Reverse<(Minutes, NodeId, Energy)>>,
    best: HashMap<Label, Minutes>,
    live: usize,
    refiner: Option<&'r dyn Refiner>,
}

impl Open<'_> {
    fn is_alive(&self, (n, _): Label, t: Minutes) -> bool {
        self.refiner.is_none_or(|r| r.alive(n, t))
    }

    /// Insert or improve; returns whether the label changed.
    fn offer(&mut self, label: Label, t: Minutes) -> bool {
        match self.best.get(&label).copied() {
            Some(old) if old <= t => return false,
            Some(old) if self.is_alive(label, old) => self.live -= 1,
            _ => {}
        }
        if self.is_alive(label, t) {
            self.live += 1;
        }
        self.best.insert(label, t);
        self.heap.push(Reverse((t, label.0, label.1)));
        true
    }

    fn pop(&mut self) -> Option<(Minutes, Label)> {
        while let Some(Reverse((t, n, s))) = self.heap.pop() {
            if self.best.get(&(n, s)) == Some(&t) {
                self.best.remove(&(n, s));
                if self.is_alive((n, s), t) {
                    self.live -= 1;
                }
                return Some((t, (n, s)));
            }
        }
        None
    }

    fn peek_time(&mut self) -> Option<Minutes> {
        while let Some(Reverse((t, n, s))) = self.heap.peek().copied() {
            if self.best.get(&(n, s)) == Some(&t) {
                return Some(t);
            }
            self.heap.pop();
        }
        None
    }
}

/// Run the forward pass. `levels` are the absolute leave-SoC buckets.
pub fn forward_pass(
    gtds: &Gtds,
    trt: &Trt,
    req: &RoutingRequest,
    levels: &[Energy],
    cfg: &SearchConfig,
    refiner: Option<&dyn Refiner>,
) -> Result<ForwardOutcome, SearchError> {
    req.validate(gtds)?;
    let mut out = ForwardOutcome {
        table: RoutingTable::default(),
        best: None,
        bound: None,
        status: ForwardStatus::Unreachable,
        stats: SearchStats::default(),
    };
    if req.origin == req.destination {
        out.best = Some(req.depart);
        out.bound = Some(req.depart + cfg.epsilon);
        out.status = ForwardStatus::Complete;
        return Ok(out);
    }
    let rows = &mut out.table.rows;
    rows.push(RoutingTableRow {
        node: req.origin,
        anc: None,
        t_a: None,
        soc_anc: None,
        soc_a: None,
        soc_d: Some(req.soc),
        t_ch: None,
        t_d: req.depart,
        slots: None,
        wait: 0,
    });
    let mut tainted = false;
    let record = |rows: &mut Vec<RoutingTableRow>, tainted: &mut bool, row: RoutingTableRow| {
        if let Some(r) = refiner {
            *tainted |= r.relevant(&row);
        }
        rows.push(row);
    };
    let mut open = Open { heap: BinaryHeap::new(), best: HashMap::new(), live: 0, refiner };
    let mut closed: HashSet<Label> = HashSet::new();
    let mut bound = Minutes::MAX;
    open.offer((req.origin, req.soc), req.depart);

    loop {
        if refiner.is_some() && !tainted && open.live == 0 && open.peek_time().is_some() {
            out.status = ForwardStatus::RefinedAway;
            return Ok(out);
        }
        match open.peek_time() {
            Some(t) if t <= bound => {}
            _ => break,
        }
        let Some((t_m, (m, s_m))) = open.pop() else { break };
        out.stats.pops += 1;
        closed.insert((m, s_m));
        for e in gtds.out_edges(m) {
            let n = e.to;
            if n == req.origin || (!gtds.is_station(n) && n != req.destination) {
                continue;
            }
            let soc_a = s_m - e.cost();
            if soc_a < Energy::ZERO {
                continue;
            }
            let t_a = t_m + e.w;
            if n == req.destination {
                if t_a > bound {
                    continue;
                }
                let row = RoutingTableRow {
                    node: n,
                    anc: Some(m),
                    t_a: Some(t_a),
                    soc_anc: Some(s_m),
                    soc_a: Some(soc_a),
                    soc_d: None,
                    t_ch: None,
                    t_d: t_a,
                    slots: None,
                    wait: 0,
                };
                record(rows, &mut tainted, row);
                if out.best.is_none_or(|b| t_a < b) {
                    out.best = Some(t_a);
                    bound = t_a.saturating_add(cfg.epsilon);
                }
                continue;
            }
            for &b in levels.iter().filter(|&&b| b >= soc_a) {
                out.stats.relaxations += 1;
                let Some(w) = earliest_departure(trt, n, t_a, soc_a, b, req.vehicle_rate_kw, cfg.overhead)? else {
                    continue;
                };
                if w.depart > bound {
                    continue;
                }
                let row = RoutingTableRow {
                    node: n,
                    anc: Some(m),
                    t_a: Some(t_a),
                    soc_anc: Some(s_m),
                    soc_a: Some(soc_a),
                    soc_d: Some(b),
                    t_ch: Some(w.charge_time),
                    t_d: w.depart,
                    slots: w.slots,
                    wait: w.wait,
                };
                record(rows, &mut tainted, row);
                if !closed.contains(&(n, b)) {
                    open.offer((n, b), w.depart);
                }
            }
        }
    }
    if out.best.is_some() {
        out.status = ForwardStatus::Complete;
        out.bound = Some(bound);
    }
    Ok(out)
}
