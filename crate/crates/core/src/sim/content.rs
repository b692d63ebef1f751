//! Stochastic cache-content growth model driven by a hit-rate ramp.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimError;

pub const DEFAULT_ACCESS_RATE: u64 = 7000;
pub const DEFAULT_FILE_SIZE: u64 = 200_000_000;
pub const DEFAULT_RAMP_STEPS: u32 = 30;
pub const PARAM_LIMIT: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContentModelParams {
    /// Read operations per step.
    pub access_rate: u64,
    pub file_size: u64,
    pub h0: f64,
    pub h_cap: f64,
    /// Per-step hit-rate increment; `None` ramps from `h0` to `h_cap` over
    /// [`DEFAULT_RAMP_STEPS`] steps.
    pub delta: Option<f64>,
    pub size_params: Vec<f64>,
    pub rate_params: Vec<f64>,
    pub seed: u64,
    pub steps: u32,
    pub capacity: u64,
    /// Treat negative increments as zero.
    pub clamp_negative: bool,
}

impl Default for ContentModelParams {
    fn default() -> Self {
        ContentModelParams {
            access_rate: DEFAULT_ACCESS_RATE,
            file_size: DEFAULT_FILE_SIZE,
            h0: 0.1,
            h_cap: 0.6,
            delta: None,
            size_params: vec![1.0, 1.1, 1.2, 1.3, 1.4],
            rate_params: vec![1.0, 1.1, 1.2, 1.3, 1.4],
            seed: 0,
            steps: 60,
            capacity: 40_000_000_000_000,
            clamp_negative: false,
        }
    }
}

impl ContentModelParams {
    pub fn delta(&self) -> f64 {
        self.delta
            .unwrap_or((self.h_cap - self.h0) / DEFAULT_RAMP_STEPS as f64)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidParams(m.to_string()));
        if self.capacity == 0 {
            return Err(SimError::ZeroCapacity);
        }
        if !(0.0..=1.0).contains(&self.h0) || !(self.h0..=1.0).contains(&self.h_cap) {
            return bad("need 0 <= h0 <= h_cap <= 1");
        }
        if !(self.delta() >= 0.0) {
            return bad("delta must be non-negative");
        }
        for (name, v) in [("size_params", &self.size_params), ("rate_params", &self.rate_params)] {
            if v.is_empty() {
                return bad(&format!("{name} is empty"));
            }
            if v.iter().any(|x| !(-PARAM_LIMIT..=PARAM_LIMIT).contains(x)) {
                return bad(&format!("{name} values must lie in [-2, 2]"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContentStep {
    /// 1-based.
    pub step: u32,
    pub size_param: f64,
    pub rate_param: f64,
    /// Hit rate used for this step's increment.
    pub hit_rate: f64,
    pub increment: i64,
    pub cache_bytes: u64,
    pub evicted_bytes_cumulative: u64,
}

/// Per step: draw `s` and `r` uniformly from their sets, add
/// `(access_rate * r) * (1 - h) * (file_size * s)` rounded to whole bytes,
/// then raise `h` by `delta` while it is below `h_cap`. Content is held in
/// `[0, capacity]`; overflow accumulates as evicted bytes.
pub fn content_model(params: &ContentModelParams) -> Result<Vec<ContentStep>, SimError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let delta = params.delta();
    let capacity = params.capacity as i128;
    let mut h = params.h0;
    let mut cache: i128 = 0;
    let mut evicted: i128 = 0;
    let mut out = Vec::with_capacity(params.steps as usize);
    for step in 1..=params.steps {
        let s = *params.size_params.choose(&mut rng).expect("validated non-empty");
        let r = *params.rate_params.choose(&mut rng).expect("validated non-empty");
        let val = (params.access_rate as f64 * r) * (1.0 - h) * (params.file_size as f64 * s);
        let mut inc = val.round() as i64;
        if params.clamp_negative {
            inc = inc.max(0);
        }
        let used_h = h;
        if h < params.h_cap {
            h = (h + delta).min(params.h_cap);
        }
        cache = (cache + inc as i128).max(0);
        if cache > capacity {
            evicted += cache - capacity;
            cache = capacity;
        }
        out.push(ContentStep {
            step,
            size_param: s,
            rate_param: r,
            hit_rate: used_h,
            increment: inc,
            cache_bytes: cache as u64,
            evicted_bytes_cumulative: evicted as u64,
        });
    }
    Ok(out)
}

/// First step at which the content reaches capacity.
pub fn fill_step(series: &[ContentStep], capacity: u64) -> Option<u32> {
    series
        .iter()
        .find(|s| s.cache_bytes >= capacity)
        .map(|s| s.step)
}
