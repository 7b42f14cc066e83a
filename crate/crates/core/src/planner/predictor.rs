use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ledger::RequestId;
use crate::search::RoutingRequest;

#[derive(Debug, Error, PartialEq)]
pub enum PredictorError {
    #[error("request {0} is not part of the known stream")]
    UnknownRequest(RequestId),
    #[error("accuracy must lie in [0, 100], got {0}")]
    InvalidAccuracy(u32),
}

/// Source of the lookahead set: the requests expected after `current`.
pub trait Predictor: Send {
    fn next_requests(&mut self, current: &RoutingRequest, n: usize) -> Result<Vec<RoutingRequest>, PredictorError>;
}

/// Reads the true upcoming stream.
#[derive(Clone, Debug)]
pub struct OraclePredictor {
    stream: Vec<RoutingRequest>,
}

impl OraclePredictor {
    /// `stream` must be in planning order.
    pub fn new(stream: Vec<RoutingRequest>) -> Self {
        OraclePredictor { stream }
    }
}

impl Predictor for OraclePredictor {
    fn next_requests(&mut self, current: &RoutingRequest, n: usize) -> Result<Vec<RoutingRequest>, PredictorError> {
        let pos =
            self.stream.iter().position(|r| r.id == current.id).ok_or(PredictorError::UnknownRequest(current.id))?;
        Ok(self.stream[pos + 1..].iter().take(n).cloned().collect())
    }
}

/// Draws a replacement for a request; the departure time is kept by the caller.
pub type Resampler = Box<dyn FnMut(&mut ChaCha8Rng, &RoutingRequest) -> RoutingRequest + Send>;

/// The true lookahead with `ceil((100 - accuracy) * len / 100)` uniformly
/// chosen entries replaced by freshly sampled requests.
pub struct PerturbedPredictor {
    inner: OraclePredictor,
    accuracy: u32,
    rng: ChaCha8Rng,
    resample: Resampler,
}

impl PerturbedPredictor {
    pub fn new(
        stream: Vec<RoutingRequest>,
        accuracy: u32,
        seed: u64,
        resample: Resampler,
    ) -> Result<Self, PredictorError> {
        if accuracy > 100 {
            return Err(PredictorError::InvalidAccuracy(accuracy));
        }
        Ok(PerturbedPredictor {
            inner: OraclePredictor::new(stream),
            accuracy,
            rng: ChaCha8Rng::seed_from_u64(seed),
            resample,
        })
    }
}

impl Predictor for PerturbedPredictor {
    fn next_requests(&mut self, current: &RoutingRequest, n: usize) -> Result<Vec<RoutingRequest>, PredictorError> {
        let mut out = self.inner.next_requests(current, n)?;
        let replace = ((100 - self.accuracy) as usize * out.len()).div_ceil(100);
        if replace == 0 {
            return Ok(out);
        }
        let mut picked = sample(&mut self.rng, out.len(), replace).into_vec();
        picked.sort_unstable();
        for i in picked {
            let mut fresh = (self.resample)(&mut self.rng, &out[i]);
            fresh.depart = out[i].depart;
            fresh.id = out[i].id;
            out[i] = fresh;
        }
        Ok(out)
    }
}
