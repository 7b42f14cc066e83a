use std::io;

use serde::{Deserialize, Serialize};

use crate::ledger::RequestId;
use crate::units::Minutes;

/// One planned request. Times are zero for infeasible requests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub request_id: RequestId,
    pub mode: String,
    pub total_min: Minutes,
    pub drive_min: Minutes,
    pub charge_min: Minutes,
    pub wait_min: Minutes,
    pub query_ms: f64,
    pub feasible: bool,
}

/// Per-request rows of a run plus run-level counters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub mode: String,
    pub rows: Vec<MetricRow>,
    /// Future requests whose evaluation was cut short by pruning.
    pub refined_away: usize,
    /// Plans where the predictor failed.
    pub fallbacks: usize,
    /// Plans whose path enumeration hit the cap.
    pub overflows: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub requests: usize,
    pub feasible: usize,
    pub total_min: i64,
    pub drive_min: i64,
    pub charge_min: i64,
    pub wait_min: i64,
    pub query_ms: f64,
}

impl Summary {
    pub fn avg(&self, sum: i64) -> f64 {
        if self.feasible == 0 {
            0.0
        } else {
            sum as f64 / self.feasible as f64
        }
    }

    pub fn avg_query_ms(&self) -> f64 {
        if self.requests == 0 {
            0.0
        } else {
            self.query_ms / self.requests as f64
        }
    }
}

impl RunMetrics {
    pub fn new(mode: &str) -> Self {
        RunMetrics { mode: mode.to_owned(), ..Default::default() }
    }

    /// Sums over feasible requests; query time over all of them.
    pub fn summary(&self) -> Summary {
        let mut s = Summary { requests: self.rows.len(), ..Default::default() };
        for r in &self.rows {
            s.query_ms += r.query_ms;
            if r.feasible {
                s.feasible += 1;
                s.total_min += r.total_min;
                s.drive_min += r.drive_min;
                s.charge_min += r.charge_min;
                s.wait_min += r.wait_min;
            }
        }
        s
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "request_id",
            "mode",
            "total_min",
            "drive_min",
            "charge_min",
            "wait_min",
            "query_ms",
            "feasible",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.request_id.to_string(),
                r.mode.clone(),
                r.total_min.to_string(),
                r.drive_min.to_string(),
                r.charge_min.to_string(),
                r.wait_min.to_string(),
                format!("{:.3}", r.query_ms),
                r.feasible.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
