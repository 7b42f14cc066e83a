//! Synthetic instances: stations and landmarks on two offset grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::gtds::GraphParams;
use crate::io::{InstanceFile, LandmarkRecord, StationRecord};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    /// Region size in km.
    pub width_km: f64,
    pub height_km: f64,
    pub station_spacing_km: f64,
    pub landmark_spacing_km: f64,
    /// Station rates are drawn uniformly from this list.
    pub station_rates_kw: Vec<f64>,
    /// Positions are displaced by up to this much in each axis.
    pub jitter_km: f64,
    pub seed: u64,
    pub params: GraphParams,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            width_km: 600.0,
            height_km: 300.0,
            station_spacing_km: 50.0,
            landmark_spacing_km: 100.0,
            station_rates_kw: vec![50.0, 75.0, 100.0, 150.0],
            jitter_km: 5.0,
            seed: 0,
            params: GraphParams::default(),
        }
    }
}

fn axis(len: f64, spacing: f64, offset: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut v = offset;
    while v <= len + 1e-9 {
        out.push(v);
        v += spacing;
    }
    out
}

pub fn grid_instance(spec: &GridSpec) -> Result<InstanceFile, SimError> {
    if !(spec.station_spacing_km > 0.0 && spec.landmark_spacing_km > 0.0) || spec.station_rates_kw.is_empty() {
        return Err(SimError::InvalidConfig("grid needs positive spacings and at least one rate".into()));
    }
    if !(spec.jitter_km >= 0.0 && spec.jitter_km * 2.0 < spec.station_spacing_km.min(spec.landmark_spacing_km) / 2.0) {
        return Err(SimError::InvalidConfig("jitter must stay below a quarter of the smaller spacing".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let jitter = |rng: &mut ChaCha8Rng| {
        if spec.jitter_km > 0.0 {
            rng.random_range(-spec.jitter_km..spec.jitter_km)
        } else {
            0.0
        }
    };

    let mut stations = Vec::new();
    for y in axis(spec.height_km, spec.station_spacing_km, 0.0) {
        for x in axis(spec.width_km, spec.station_spacing_km, 0.0) {
            let rate = spec.station_rates_kw[rng.random_range(0..spec.station_rates_kw.len())];
            let (dx, dy) = (jitter(&mut rng), jitter(&mut rng));
            stations.push(StationRecord { id: format!("c{}", stations.len()), x: x + dx, y: y + dy, rate_kwh: rate });
        }
    }
    // landmarks sit between station rows so no two nodes coincide
    let half = spec.station_spacing_km / 2.0;
    let mut landmarks = Vec::new();
    for y in axis(spec.height_km, spec.landmark_spacing_km, half.min(spec.height_km)) {
        for x in axis(spec.width_km, spec.landmark_spacing_km, half.min(spec.width_km)) {
            let (dx, dy) = (jitter(&mut rng), jitter(&mut rng));
            landmarks.push(LandmarkRecord { id: format!("l{}", landmarks.len()), x: x + dx, y: y + dy });
        }
    }
    Ok(InstanceFile { stations, landmarks, edges: None, params: spec.params.clone(), reservations: Vec::new() })
}
