//! JSON instance/request files and their conversion to engine types.
//!
//! Instance: `{"stations":[{"id","x","y","rate_kwh"}], "landmarks":[{"id","x","y"}],
//! "edges":[{"from","to","w_min","u_kwh"}]?, "params":{..}?, "reservations":[{"station","slots":[first,last]}]?}`.
//! When `edges` is present it replaces geometric construction.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gtds::{EdgeSpec, GraphError, GraphParams, Gtds, LandmarkSpec, Metric, NodeId, Point, StationSpec};
use crate::ledger::{LedgerError, RequestId, Trt};
use crate::search::RoutingRequest;
use crate::units::{Energy, Minutes, SlotRange};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationRecord {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub rate_kwh: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandmarkRecord {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub from: String,
    pub to: String,
    pub w_min: Minutes,
    pub u_kwh: f64,
}

/// Pre-existing reservation of an inclusive slot range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReservationRecord {
    pub station: String,
    pub slots: [i64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder: Option<RequestId>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub stations: Vec<StationRecord>,
    #[serde(default)]
    pub landmarks: Vec<LandmarkRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<EdgeRecord>>,
    #[serde(default)]
    pub params: GraphParams,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reservations: Vec<ReservationRecord>,
}

/// A loaded instance: graph plus initial reservations.
#[derive(Clone, Debug)]
pub struct Instance {
    pub gtds: Gtds,
    pub reservations: Vec<(NodeId, SlotRange, RequestId)>,
    /// Distance metric of the coordinates, used when sampling trips.
    pub metric: Metric,
}

impl InstanceFile {
    pub fn build(&self) -> Result<Instance, IoError> {
        let stations: Vec<StationSpec> = self
            .stations
            .iter()
            .map(|s| StationSpec { name: s.id.clone(), pos: Point::new(s.x, s.y), rate_kw: s.rate_kwh })
            .collect();
        let landmarks: Vec<LandmarkSpec> =
            self.landmarks.iter().map(|l| LandmarkSpec { name: l.id.clone(), pos: Point::new(l.x, l.y) }).collect();
        let gtds = match &self.edges {
            Some(edges) => {
                let specs: Vec<EdgeSpec> = edges
                    .iter()
                    .map(|e| EdgeSpec {
                        from: e.from.clone(),
                        to: e.to.clone(),
                        w: e.w_min,
                        u: Energy::from_kwh(e.u_kwh),
                    })
                    .collect();
                Gtds::from_edges(&stations, &landmarks, &specs, None)?
            }
            None => Gtds::from_geometry(&stations, &landmarks, &self.params)?,
        };
        let reservations = self
            .reservations
            .iter()
            .map(|r| {
                let id = gtds.id_of(&r.station)?;
                Ok((id, SlotRange::inclusive(r.slots[0], r.slots[1]), r.holder.unwrap_or(RequestId::MAX)))
            })
            .collect::<Result<Vec<_>, GraphError>>()?;
        Ok(Instance { gtds, reservations, metric: self.params.metric })
    }
}

impl Instance {
    /// A fresh table with the instance's reservations applied.
    pub fn trt(&self, slot_minutes: Minutes, window_len: i64) -> Result<Trt, LedgerError> {
        let mut trt = Trt::new(&self.gtds, slot_minutes, window_len)?;
        for &(station, range, holder) in &self.reservations {
            trt.reserve(holder, station, range)?;
        }
        Ok(trt)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RequestRecord {
    pub id: RequestId,
    pub origin: String,
    pub destination: String,
    pub depart_min: Minutes,
    pub soc_kwh: f64,
    pub battery_kwh: f64,
    pub vehicle_rate_kwh: f64,
}

impl RequestRecord {
    pub fn to_request(&self, gtds: &Gtds) -> Result<RoutingRequest, GraphError> {
        Ok(RoutingRequest {
            id: self.id,
            origin: gtds.id_of(&self.origin)?,
            destination: gtds.id_of(&self.destination)?,
            depart: self.depart_min,
            soc: Energy::from_kwh(self.soc_kwh),
            battery: Energy::from_kwh(self.battery_kwh),
            vehicle_rate_kw: self.vehicle_rate_kwh,
        })
    }

    pub fn from_request(req: &RoutingRequest, gtds: &Gtds) -> RequestRecord {
        RequestRecord {
            id: req.id,
            origin: gtds.name(req.origin).to_owned(),
            destination: gtds.name(req.destination).to_owned(),
            depart_min: req.depart,
            soc_kwh: req.soc.kwh(),
            battery_kwh: req.battery.kwh(),
            vehicle_rate_kwh: req.vehicle_rate_kw,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StreamFile {
    pub requests: Vec<RequestRecord>,
}

impl StreamFile {
    pub fn to_requests(&self, gtds: &Gtds) -> Result<Vec<RoutingRequest>, GraphError> {
        self.requests.iter().map(|r| r.to_request(gtds)).collect()
    }

    pub fn from_requests(reqs: &[RoutingRequest], gtds: &Gtds) -> StreamFile {
        StreamFile { requests: reqs.iter().map(|r| RequestRecord::from_request(r, gtds)).collect() }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| IoError::Read { path: shown.clone(), source })?;
    serde_json::from_str(&text).map_err(|source| IoError::Json { path: shown, source })
}

pub fn load_instance(path: &Path) -> Result<Instance, IoError> {
    read_json::<InstanceFile>(path)?.build()
}
