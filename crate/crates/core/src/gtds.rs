//! Charging-station-only routing graph with landmark vertices.
//!
//! Stations carry a self-loop whose per-slot gain is time dependent; that
//! gain lives in the reservation ledger, the graph only keeps the station
//! rate. Node ids are dense: stations first, then landmarks, each group in
//! input order.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{Energy, Minutes};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("graph needs at least one charging station")]
    NoStations,
    #[error("graph has no landmarks to snap to")]
    NoLandmarks,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("duplicate node name `{0}`")]
    DuplicateName(String),
    #[error("nodes `{0}` and `{1}` share a position")]
    DuplicatePosition(String, String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("invalid edge {from} -> {to}: {reason}")]
    InvalidEdge { from: String, to: String, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Station,
    Landmark,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// How positions are turned into kilometres.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Planar coordinates already in km.
    #[default]
    Euclidean,
    /// `x` is longitude, `y` latitude, both in degrees.
    Haversine,
}

impl Metric {
    pub fn distance_km(self, a: Point, b: Point) -> f64 {
        match self {
            Metric::Euclidean => ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt(),
            Metric::Haversine => {
                const EARTH_RADIUS_KM: f64 = 6371.0;
                let (lat1, lat2) = (a.y.to_radians(), b.y.to_radians());
                let dlat = lat2 - lat1;
                let dlon = (b.x - a.x).to_radians();
                let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
                2.0 * EARTH_RADIUS_KM * h.sqrt().asin()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StationSpec {
    pub name: String,
    pub pos: Point,
    /// Station charging rate in kW (energy-units per hour).
    pub rate_kw: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LandmarkSpec {
    pub name: String,
    pub pos: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSpec {
    pub from: String,
    pub to: String,
    pub w: Minutes,
    pub u: Energy,
}

/// Parameters for geometric construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphParams {
    /// Edges whose traversal energy exceeds this are not created.
    pub max_range_kwh: f64,
    pub speed_kmh: f64,
    pub consumption_kwh_per_km: f64,
    pub metric: Metric,
    /// Create landmark-to-landmark edges (direct trips without any stop).
    pub landmark_links: bool,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams {
            max_range_kwh: 175.0 * 0.28,
            speed_kmh: 100.0,
            consumption_kwh_per_km: 0.28,
            metric: Metric::Euclidean,
            landmark_links: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    pub id: NodeId,
    pub name: String,
    pub kind: NodeKind,
    pub pos: Point,
    /// Self-loop charging rate, stations only.
    pub rate_kw: Option<f64>,
}

impl Node {
    pub fn is_station(&self) -> bool {
        self.kind == NodeKind::Station
    }
}

#[derive(Clone, Copy, Debug)]
struct RawEdge {
    other: NodeId,
    w: Minutes,
    u: Energy,
}

/// An edge as seen through the current energy scaling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeRef {
    pub from: NodeId,
    pub to: NodeId,
    pub w: Minutes,
    /// Energy delta, always negative.
    pub u: Energy,
}

impl EdgeRef {
    /// Charge consumed by traversing the edge.
    pub fn cost(&self) -> Energy {
        -self.u
    }
}

#[derive(Debug)]
struct GraphData {
    nodes: Vec<Node>,
    out: Vec<Vec<RawEdge>>,
    incoming: Vec<Vec<RawEdge>>,
    by_name: HashMap<String, NodeId>,
    max_range: Energy,
    edge_count: usize,
}

/// Immutable routing graph. Cloning is cheap; [`Gtds::scale_energy`]
/// returns a view sharing the same storage.
#[derive(Clone, Debug)]
pub struct Gtds {
    data: Arc<GraphData>,
    energy_ratio: f64,
}

fn check_positive(name: &str, value: f64) -> Result<(), GraphError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(GraphError::InvalidParameter(format!("{name} must be positive, got {value}")))
    }
}

fn build_nodes(
    stations: &[StationSpec],
    landmarks: &[LandmarkSpec],
) -> Result<(Vec<Node>, HashMap<String, NodeId>), GraphError> {
    if stations.is_empty() {
        return Err(GraphError::NoStations);
    }
    let mut nodes = Vec::with_capacity(stations.len() + landmarks.len());
    let mut by_name = HashMap::new();
    let all = stations
        .iter()
        .map(|s| (s.name.clone(), s.pos, NodeKind::Station, Some(s.rate_kw)))
        .chain(landmarks.iter().map(|l| (l.name.clone(), l.pos, NodeKind::Landmark, None)));
    for (name, pos, kind, rate_kw) in all {
        if let Some(rate) = rate_kw {
            check_positive(&format!("rate of station `{name}`"), rate)?;
        }
        let id = NodeId(nodes.len() as u32);
        if by_name.insert(name.clone(), id).is_some() {
            return Err(GraphError::DuplicateName(name));
        }
        nodes.push(Node { id, name, kind, pos, rate_kw });
    }
    Ok((nodes, by_name))
}

impl Gtds {
    /// Build the graph from positions: an edge joins every ordered pair whose
    /// traversal energy fits in `max_range_kwh`.
    pub fn from_geometry(
        stations: &[StationSpec],
        landmarks: &[LandmarkSpec],
        params: &GraphParams,
    ) -> Result<Gtds, GraphError> {
        check_positive("max_range_kwh", params.max_range_kwh)?;
        check_positive("speed_kmh", params.speed_kmh)?;
        check_positive("consumption_kwh_per_km", params.consumption_kwh_per_km)?;
        let (nodes, by_name) = build_nodes(stations, landmarks)?;
        let max_range = Energy::from_kwh(params.max_range_kwh);

        let n = nodes.len();
        let mut out = vec![Vec::new(); n];
        for a in &nodes {
            for b in &nodes {
                if a.id == b.id {
                    continue;
                }
                if a.kind == NodeKind::Landmark && b.kind == NodeKind::Landmark && !params.landmark_links {
                    continue;
                }
                let d = params.metric.distance_km(a.pos, b.pos);
                if d <= 0.0 {
                    return Err(GraphError::DuplicatePosition(a.name.clone(), b.name.clone()));
                }
                let cost = d * params.consumption_kwh_per_km;
                if cost > params.max_range_kwh {
                    continue;
                }
                let w = ((60.0 * d / params.speed_kmh).round() as Minutes).max(1);
                let u = (-Energy::from_kwh(cost)).min(Energy(-1));
                out[a.id.index()].push(RawEdge { other: b.id, w, u });
            }
        }
        Ok(Self::assemble(nodes, by_name, out, max_range))
    }

    /// Build the graph from an explicit edge list; geometry is ignored for
    /// edges but still used for snapping requests to landmarks.
    pub fn from_edges(
        stations: &[StationSpec],
        landmarks: &[LandmarkSpec],
        edges: &[EdgeSpec],
        max_range: Option<Energy>,
    ) -> Result<Gtds, GraphError> {
        let (nodes, by_name) = build_nodes(stations, landmarks)?;
        let lookup = |name: &str| by_name.get(name).copied().ok_or_else(|| GraphError::UnknownNode(name.to_owned()));
        let max_range = match max_range {
            Some(r) if r.is_positive() => r,
            Some(r) => return Err(GraphError::InvalidParameter(format!("max range must be positive, got {r:?}"))),
            None => edges.iter().map(|e| e.u.abs()).max().unwrap_or(Energy::ZERO),
        };
        let mut out = vec![Vec::<RawEdge>::new(); nodes.len()];
        for e in edges {
            let (from, to) = (lookup(&e.from)?, lookup(&e.to)?);
            let bad = |reason: &str| GraphError::InvalidEdge {
                from: e.from.clone(),
                to: e.to.clone(),
                reason: reason.to_owned(),
            };
            if from == to {
                return Err(bad("self edges are modelled by the station rate"));
            }
            if e.w <= 0 {
                return Err(bad("travel time must be positive"));
            }
            if e.u >= Energy::ZERO {
                return Err(bad("energy delta must be negative"));
            }
            if e.u.abs() > max_range {
                return Err(bad("energy exceeds the maximum range"));
            }
            if out[from.index()].iter().any(|r| r.other == to) {
                return Err(bad("duplicate edge"));
            }
            out[from.index()].push(RawEdge { other: to, w: e.w, u: e.u });
        }
        Ok(Self::assemble(nodes, by_name, out, max_range))
    }

    fn assemble(
        nodes: Vec<Node>,
        by_name: HashMap<String, NodeId>,
        mut out: Vec<Vec<RawEdge>>,
        max_range: Energy,
    ) -> Gtds {
        let mut incoming = vec![Vec::new(); nodes.len()];
        let mut edge_count = 0;
        for (from, list) in out.iter_mut().enumerate() {
            list.sort_by_key(|e| e.other);
            for e in list.iter() {
                incoming[e.other.index()].push(RawEdge { other: NodeId(from as u32), w: e.w, u: e.u });
                edge_count += 1;
            }
        }
        for list in &mut incoming {
            list.sort_by_key(|e| e.other);
        }
        Gtds { data: Arc::new(GraphData { nodes, out, incoming, by_name, max_range, edge_count }), energy_ratio: 1.0 }
    }

    /// A view whose edge energies are multiplied by `ratio` (e.g. the
    /// consumption ratio of a less efficient vehicle). Views compose.
    pub fn scale_energy(&self, ratio: f64) -> Result<Gtds, GraphError> {
        check_positive("energy ratio", ratio)?;
        Ok(Gtds { data: Arc::clone(&self.data), energy_ratio: self.energy_ratio * ratio })
    }

    pub fn energy_ratio(&self) -> f64 {
        self.energy_ratio
    }

    fn scaled(&self, u: Energy) -> Energy {
        if self.energy_ratio == 1.0 {
            u
        } else {
            u.scale(self.energy_ratio)
        }
    }

    pub fn node_count(&self) -> usize {
        self.data.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.data.edge_count
    }

    pub fn max_range(&self) -> Energy {
        self.data.max_range
    }

    pub fn nodes(&self) -> &[Node] {
        &self.data.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.data.nodes[id.index()]
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.data.nodes[id.index()].name
    }

    pub fn id_of(&self, name: &str) -> Result<NodeId, GraphError> {
        self.data.by_name.get(name).copied().ok_or_else(|| GraphError::UnknownNode(name.to_owned()))
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.index() < self.data.nodes.len()
    }

    pub fn is_station(&self, id: NodeId) -> bool {
        self.node(id).is_station()
    }

    pub fn stations(&self) -> impl Iterator<Item = &Node> {
        self.data.nodes.iter().filter(|n| n.kind == NodeKind::Station)
    }

    pub fn landmarks(&self) -> impl Iterator<Item = &Node> {
        self.data.nodes.iter().filter(|n| n.kind == NodeKind::Landmark)
    }

    pub fn station_rate(&self, id: NodeId) -> Option<f64> {
        self.data.nodes.get(id.index()).and_then(|n| n.rate_kw)
    }

    /// Outgoing edges ordered by target id.
    pub fn out_edges(&self, from: NodeId) -> impl Iterator<Item = EdgeRef> + '_ {
        self.data.out[from.index()].iter().map(move |e| EdgeRef { from, to: e.other, w: e.w, u: self.scaled(e.u) })
    }

    /// Incoming edges ordered by source id.
    pub fn in_edges(&self, to: NodeId) -> impl Iterator<Item = EdgeRef> + '_ {
        self.data.incoming[to.index()].iter().map(move |e| EdgeRef { from: e.other, to, w: e.w, u: self.scaled(e.u) })
    }

    pub fn edge(&self, from: NodeId, to: NodeId) -> Option<EdgeRef> {
        let list = &self.data.out[from.index()];
        list.binary_search_by_key(&to, |e| e.other).ok().map(|i| EdgeRef {
            from,
            to,
            w: list[i].w,
            u: self.scaled(list[i].u),
        })
    }

    /// Nearest landmark to `pos` under `metric`; ties go to the lowest id.
    pub fn nearest_landmark(&self, pos: Point, metric: Metric) -> Result<NodeId, GraphError> {
        let mut best: Option<(f64, NodeId)> = None;
        for l in self.landmarks() {
            let d = metric.distance_km(pos, l.pos);
            match best {
                Some((bd, _)) if bd <= d => {}
                _ => best = Some((d, l.id)),
            }
        }
        best.map(|(_, id)| id).ok_or(GraphError::NoLandmarks)
    }

    /// Replace a trip's true endpoints with their nearest landmarks.
    pub fn snap_request(&self, origin: Point, dest: Point, metric: Metric) -> Result<(NodeId, NodeId), GraphError> {
        Ok((self.nearest_landmark(origin, metric)?, self.nearest_landmark(dest, metric)?))
    }
}
