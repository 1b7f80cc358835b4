//! Arrival processes and the deterministic RNG layout.
//!
//! Every flow draws from its own ChaCha8 stream: the generator is seeded with
//! the run seed and the stream index is the flow's canonical index, so adding
//! or removing one flow never perturbs another flow's arrivals. Repetition
//! indices in multi-run experiments are expanded into fresh base seeds with
//! [`run_seed`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-slot packet arrival law for one flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArrivalSpec {
    /// Independent Poisson draws each slot.
    Poisson { rate: f64 },
    /// A single Poisson-sized batch injected in slot 0, nothing afterwards.
    Batch { mean: f64 },
    /// Each slot, with probability `file_prob`, a Poisson-sized burst of mean
    /// `mean_file_size` arrives; otherwise nothing.
    Bursty { file_prob: f64, mean_file_size: f64 },
}

impl ArrivalSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArrival(msg));
        match *self {
            ArrivalSpec::Poisson { rate } => {
                if !rate.is_finite() || rate < 0.0 {
                    return bad(format!("poisson rate must be finite and >= 0, got {rate}"));
                }
            }
            ArrivalSpec::Batch { mean } => {
                if !mean.is_finite() || mean < 0.0 {
                    return bad(format!("batch mean must be finite and >= 0, got {mean}"));
                }
            }
            ArrivalSpec::Bursty {
                file_prob,
                mean_file_size,
            } => {
                if !file_prob.is_finite() || !(0.0..=1.0).contains(&file_prob) {
                    return bad(format!("file_prob must lie in [0, 1], got {file_prob}"));
                }
                if !mean_file_size.is_finite() || mean_file_size < 0.0 {
                    return bad(format!(
                        "mean_file_size must be finite and >= 0, got {mean_file_size}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Long-run packets per slot. Batch arrivals contribute 0 since the
    /// one-time injection vanishes in the time average.
    pub fn mean_rate(&self) -> f64 {
        match *self {
            ArrivalSpec::Poisson { rate } => rate,
            ArrivalSpec::Batch { .. } => 0.0,
            ArrivalSpec::Bursty {
                file_prob,
                mean_file_size,
            } => file_prob * mean_file_size,
        }
    }

    /// Scales intensity by `rho`: the Poisson rate, the batch mean, or the
    /// burst size (the burst probability stays fixed).
    pub fn scaled(&self, rho: f64) -> Result<ArrivalSpec> {
        if !rho.is_finite() || rho < 0.0 {
            return Err(Error::InvalidArrival(format!(
                "scale factor must be finite and >= 0, got {rho}"
            )));
        }
        let scaled = match *self {
            ArrivalSpec::Poisson { rate } => ArrivalSpec::Poisson { rate: rate * rho },
            ArrivalSpec::Batch { mean } => ArrivalSpec::Batch { mean: mean * rho },
            ArrivalSpec::Bursty {
                file_prob,
                mean_file_size,
            } => ArrivalSpec::Bursty {
                file_prob,
                mean_file_size: mean_file_size * rho,
            },
        };
        scaled.validate()?;
        Ok(scaled)
    }
}

/// Base seed plus stream index identifying one flow's private RNG.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Derives the base seed for repetition `index` of a multi-run experiment
/// from the experiment seed (splitmix64 of `base + index + 1`, so run seeds
/// are decorrelated and `run_seed(s, i)` never equals `s` in practice).
pub fn run_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add((index + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn poisson_draw(mean: f64, rng: &mut ChaCha8Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("validated mean is positive and finite");
    dist.sample(rng) as u64
}

/// One flow's arrival sampler. Holds the validated spec and the distribution
/// it draws from so per-slot sampling does no re-validation.
#[derive(Debug, Clone)]
pub struct ArrivalProcess {
    spec: ArrivalSpec,
    per_slot: Option<Poisson<f64>>,
    rng: ChaCha8Rng,
}

impl ArrivalProcess {
    pub fn new(spec: ArrivalSpec, stream: RngStream) -> Result<Self> {
        spec.validate()?;
        let per_slot = match spec {
            ArrivalSpec::Poisson { rate } if rate > 0.0 => {
                Some(Poisson::new(rate).expect("rate validated"))
            }
            _ => None,
        };
        Ok(Self {
            spec,
            per_slot,
            rng: stream.rng(),
        })
    }

    pub fn spec(&self) -> &ArrivalSpec {
        &self.spec
    }

    /// Packets arriving in `slot`.
    pub fn sample(&mut self, slot: u64) -> u64 {
        match self.spec {
            ArrivalSpec::Poisson { .. } => match &self.per_slot {
                Some(dist) => dist.sample(&mut self.rng) as u64,
                None => 0,
            },
            ArrivalSpec::Batch { mean } => {
                if slot == 0 {
                    poisson_draw(mean, &mut self.rng)
                } else {
                    0
                }
            }
            ArrivalSpec::Bursty {
                file_prob,
                mean_file_size,
            } => {
                // Draw the gate uniform every slot so the slot count a flow
                // has consumed, not the burst history, fixes the RNG phase.
                let gate = self.rng.random::<f64>();
                if gate < file_prob {
                    poisson_draw(mean_file_size, &mut self.rng)
                } else {
                    0
                }
            }
        }
    }
}

/// Empirical packets-per-slot over `horizon` slots, using stream 0 of `seed`.
/// Useful for sanity-checking a spec's configured intensity.
pub fn empirical_rate(spec: &ArrivalSpec, horizon: u64, seed: u64) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    let mut process = ArrivalProcess::new(spec.clone(), RngStream { seed, stream: 0 })?;
    let total: u64 = (0..horizon).map(|t| process.sample(t)).sum();
    Ok(total as f64 / horizon as f64)
}
