//! Workload descriptions and instance generation.

use std::fmt;
use std::path::PathBuf;

use rand::Rng;
use rand_distr::{Distribution, Zipf};

use crate::adversary::{sample_omega_with, OmegaParams};
use crate::error::{Error, Result};
use crate::rng::{child_seed, rng_from_seed};
use crate::trace::{noisy_predictions, perfect_predictions, read_trace, NoiseModel, PageId, Trace};

/// One source of request traces.
#[derive(Debug, Clone, PartialEq)]
pub enum Workload {
    File(PathBuf),
    Omega {
        t: usize,
        n: usize,
        random_part_len: Option<usize>,
    },
    Uniform {
        universe: u64,
        length: usize,
    },
    Zipf {
        universe: u64,
        length: usize,
        exponent: f64,
    },
}

impl Workload {
    pub fn validate(&self, k: usize) -> Result<()> {
        match *self {
            Workload::File(_) => Ok(()),
            Workload::Omega {
                t,
                n,
                random_part_len,
            } => OmegaParams {
                k,
                t,
                n,
                random_part_len,
            }
            .validate(),
            Workload::Uniform { universe, length }
            | Workload::Zipf {
                universe, length, ..
            } if universe == 0 || length == 0 => Err(Error::Parameter(format!(
                "universe ({universe}) and length ({length}) must be positive"
            ))),
            Workload::Zipf { exponent, .. } if !(exponent >= 0.0 && exponent.is_finite()) => Err(
                Error::Parameter(format!("zipf exponent {exponent} must be >= 0")),
            ),
            _ => Ok(()),
        }
    }

    /// Whether the generated trace depends on the seed.
    pub fn is_random(&self) -> bool {
        !matches!(self, Workload::File(_))
    }

    pub fn is_omega(&self) -> bool {
        matches!(self, Workload::Omega { .. })
    }

    /// Stable identifier used in CSV rows and file names.
    pub fn id(&self, k: usize) -> String {
        match self {
            Workload::File(path) => format!(
                "file-{}",
                path.file_stem()
                    .map(|s| s.to_string_lossy())
                    .unwrap_or_default()
            ),
            Workload::Omega {
                t,
                n,
                random_part_len,
            } => {
                let mut id = format!("omega-k{k}-t{t}-n{n}");
                if let Some(len) = random_part_len {
                    id.push_str(&format!("-m{len}"));
                }
                id
            }
            Workload::Uniform { universe, length } => format!("uniform-u{universe}-len{length}"),
            Workload::Zipf {
                universe,
                length,
                exponent,
            } => {
                format!("zipf-u{universe}-len{length}-s{exponent}")
            }
        }
    }

    /// Builds the trace for one seed, carrying the workload's own predictions
    /// (prescribed ones for omega, the file column if present, perfect otherwise).
    pub fn instance(&self, k: usize, seed: u64) -> Result<Trace> {
        let wseed = child_seed(seed, b'W');
        match *self {
            Workload::File(ref path) => {
                let trace = read_trace(path)?;
                if trace.predictions().is_some() {
                    Ok(trace)
                } else {
                    Ok(Trace::perfect(trace.requests().to_vec()))
                }
            }
            Workload::Omega {
                t,
                n,
                random_part_len,
            } => Ok(sample_omega_with(
                OmegaParams {
                    k,
                    t,
                    n,
                    random_part_len,
                },
                wseed,
            )?
            .trace),
            Workload::Uniform { universe, length } => {
                Ok(Trace::perfect(uniform_requests(universe, length, wseed)))
            }
            Workload::Zipf {
                universe,
                length,
                exponent,
            } => Ok(Trace::perfect(zipf_requests(
                universe, length, exponent, wseed,
            )?)),
        }
    }
}

impl fmt::Display for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Workload::File(path) => write!(f, "file({})", path.display()),
            Workload::Omega { t, n, .. } => write!(f, "omega(t={t}, n={n})"),
            Workload::Uniform { universe, length } => write!(f, "uniform({universe}, {length})"),
            Workload::Zipf {
                universe,
                length,
                exponent,
            } => {
                write!(f, "zipf({universe}, {length}, {exponent})")
            }
        }
    }
}

/// Prediction source applied on top of a workload instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Noise {
    /// Keep the predictions that come with the instance.
    Keep,
    Perfect,
    Model(NoiseModel),
}

impl Noise {
    pub fn label(&self) -> String {
        match self {
            Noise::Keep => "none".into(),
            Noise::Perfect => "perfect".into(),
            Noise::Model(m) => m.to_string(),
        }
    }

    pub fn apply(&self, trace: Trace, seed: u64) -> Result<Trace> {
        match *self {
            Noise::Keep => Ok(trace),
            Noise::Perfect => {
                let preds = perfect_predictions(trace.requests());
                trace.set_predictions(preds)
            }
            Noise::Model(model) => {
                let preds = noisy_predictions(trace.requests(), model, child_seed(seed, b'N'))?;
                trace.set_predictions(preds)
            }
        }
    }
}

impl std::str::FromStr for Noise {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(Noise::Keep),
            "perfect" => Ok(Noise::Perfect),
            other => Ok(Noise::Model(other.parse()?)),
        }
    }
}

/// `length` iid uniform draws from pages `1..=universe`.
pub fn uniform_requests(universe: u64, length: usize, seed: u64) -> Vec<PageId> {
    let mut rng = rng_from_seed(seed);
    (0..length)
        .map(|_| PageId(rng.random_range(1..=universe)))
        .collect()
}

/// `length` iid draws from a Zipf law over pages `1..=universe`; page 1 is the most popular.
pub fn zipf_requests(
    universe: u64,
    length: usize,
    exponent: f64,
    seed: u64,
) -> Result<Vec<PageId>> {
    let zipf = Zipf::new(universe as f64, exponent).map_err(|e| Error::Parameter(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    Ok((0..length)
        .map(|_| PageId(zipf.sample(&mut rng) as u64))
        .collect())
}
