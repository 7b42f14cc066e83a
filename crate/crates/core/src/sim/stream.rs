//! Request stream generation: Poisson departures, sampled trips and vehicles.

use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::gtds::{Gtds, Metric, NodeId, Point};
use crate::planner::Resampler;
use crate::search::RoutingRequest;
use crate::units::{Energy, Minutes};

/// A stretch of constant arrival rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub rate_per_min: f64,
    pub duration_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TripModel {
    /// Destination is a landmark about `km` away from a uniform origin.
    FixedDistance { km: f64 },
    /// Uniform over ordered pairs of distinct landmarks.
    Uniform,
    /// `weights[o][d]` over landmarks in id order.
    Matrix { weights: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VehicleModel {
    pub battery_kwh: f64,
    /// Vehicle charging rates, drawn uniformly.
    pub rates_kw: Vec<f64>,
    /// Initial SoC is uniform in `[soc_min, soc_max]` times the battery.
    pub soc_min: f64,
    pub soc_max: f64,
}

impl Default for VehicleModel {
    fn default() -> Self {
        VehicleModel { battery_kwh: 49.0, rates_kw: vec![50.0, 60.0, 75.0, 80.0, 100.0], soc_min: 0.5, soc_max: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamConfig {
    pub regimes: Vec<Regime>,
    pub trip: TripModel,
    #[serde(default)]
    pub vehicle: VehicleModel,
    pub seed: u64,
    #[serde(default)]
    pub max_requests: Option<usize>,
    #[serde(default)]
    pub start_min: Minutes,
}

impl StreamConfig {
    /// 4000 trips of about 400 km at two departures per minute.
    pub fn sds(seed: u64) -> Self {
        StreamConfig {
            regimes: vec![Regime { rate_per_min: 2.0, duration_min: 2500.0 }],
            trip: TripModel::FixedDistance { km: 400.0 },
            vehicle: VehicleModel::default(),
            seed,
            max_requests: Some(4000),
            start_min: 0,
        }
    }

    /// Quiet, rush and busy phases: 2/min for 400 min, 70/min for 30 min,
    /// 40/min for 25 min.
    pub fn poisson(seed: u64) -> Self {
        StreamConfig {
            regimes: vec![
                Regime { rate_per_min: 2.0, duration_min: 400.0 },
                Regime { rate_per_min: 70.0, duration_min: 30.0 },
                Regime { rate_per_min: 40.0, duration_min: 25.0 },
            ],
            trip: TripModel::Uniform,
            vehicle: VehicleModel::default(),
            seed,
            max_requests: None,
            start_min: 0,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for r in &self.regimes {
            if !(r.rate_per_min.is_finite() && r.rate_per_min > 0.0) || r.duration_min.is_nan() || r.duration_min < 0.0
            {
                return Err(SimError::InvalidConfig(format!("bad regime {r:?}")));
            }
        }
        let v = &self.vehicle;
        if v.battery_kwh <= 0.0 || v.rates_kw.is_empty() || v.rates_kw.iter().any(|&r| r <= 0.0) {
            return Err(SimError::InvalidConfig("vehicle model needs a positive battery and rates".into()));
        }
        if !(0.0..=1.0).contains(&v.soc_min) || !(v.soc_min..=1.0).contains(&v.soc_max) {
            return Err(SimError::InvalidConfig("SoC fractions must satisfy 0 <= min <= max <= 1".into()));
        }
        Ok(())
    }
}

/// Draws trips and vehicles. Cheap to clone.
#[derive(Clone, Debug)]
pub struct TripSampler {
    landmarks: Arc<Vec<(NodeId, Point)>>,
    metric: Metric,
    trip: TripModel,
    vehicle: VehicleModel,
}

impl TripSampler {
    pub fn new(gtds: &Gtds, metric: Metric, trip: TripModel, vehicle: VehicleModel) -> Result<Self, SimError> {
        let landmarks: Vec<(NodeId, Point)> = gtds.landmarks().map(|l| (l.id, l.pos)).collect();
        if landmarks.len() < 2 {
            return Err(SimError::InvalidConfig("at least two landmarks are needed".into()));
        }
        if let TripModel::Matrix { weights } = &trip {
            let n = landmarks.len();
            if weights.len() != n || weights.iter().any(|row| row.len() != n) {
                return Err(SimError::InvalidConfig(format!("trip matrix must be {n}x{n}")));
            }
            if weights.iter().flatten().any(|w| w.is_nan() || *w < 0.0) || weights.iter().flatten().all(|w| *w == 0.0) {
                return Err(SimError::InvalidConfig("trip matrix needs non-negative weights, not all zero".into()));
            }
        }
        Ok(TripSampler { landmarks: Arc::new(landmarks), metric, trip, vehicle })
    }

    fn pair(&self, rng: &mut ChaCha8Rng) -> (NodeId, NodeId) {
        let n = self.landmarks.len();
        match &self.trip {
            TripModel::Uniform => {
                let o = rng.random_range(0..n);
                let d = (o + rng.random_range(1..n)) % n;
                (self.landmarks[o].0, self.landmarks[d].0)
            }
            TripModel::FixedDistance { km } => {
                let o = rng.random_range(0..n);
                let from = self.landmarks[o].1;
                let dev: Vec<f64> =
                    self.landmarks.iter().map(|&(_, p)| (self.metric.distance_km(from, p) - km).abs()).collect();
                let best = (0..n).filter(|&i| i != o).map(|i| dev[i]).fold(f64::INFINITY, f64::min);
                let near: Vec<usize> = (0..n).filter(|&i| i != o && dev[i] <= best + 0.1 * km).collect();
                let d = near[rng.random_range(0..near.len())];
                (self.landmarks[o].0, self.landmarks[d].0)
            }
            TripModel::Matrix { weights } => {
                let flat: Vec<f64> = weights.iter().flatten().copied().collect();
                let idx = WeightedIndex::new(&flat).expect("validated weights").sample(rng);
                (self.landmarks[idx / n].0, self.landmarks[idx % n].0)
            }
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng, id: u64, depart: Minutes) -> RoutingRequest {
        let (origin, destination) = self.pair(rng);
        let v = &self.vehicle;
        let battery = Energy::from_kwh(v.battery_kwh);
        let frac = if v.soc_max > v.soc_min { rng.random_range(v.soc_min..=v.soc_max) } else { v.soc_min };
        RoutingRequest {
            id,
            origin,
            destination,
            depart,
            soc: Energy::from_kwh(v.battery_kwh * frac).min(battery),
            battery,
            vehicle_rate_kw: v.rates_kw[rng.random_range(0..v.rates_kw.len())],
        }
    }

    /// A resampler for perturbed prediction drawing from this distribution.
    pub fn resampler(&self) -> Resampler {
        let me = self.clone();
        Box::new(move |rng, r| me.sample(rng, r.id, r.depart))
    }
}

/// Requests sorted by departure, ids numbered from zero.
pub fn generate_stream(gtds: &Gtds, metric: Metric, config: &StreamConfig) -> Result<Vec<RoutingRequest>, SimError> {
    config.validate()?;
    let sampler = TripSampler::new(gtds, metric, config.trip.clone(), config.vehicle.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let cap = config.max_requests.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    let mut start = config.start_min as f64;
    for regime in &config.regimes {
        let end = start + regime.duration_min;
        let gap = Exp::new(regime.rate_per_min).expect("validated rate");
        let mut t = start;
        loop {
            t += gap.sample(&mut rng);
            if t >= end || out.len() >= cap {
                break;
            }
            let id = out.len() as u64;
            out.push(sampler.sample(&mut rng, id, t.floor() as Minutes));
        }
        start = end;
    }
    Ok(out)
}
