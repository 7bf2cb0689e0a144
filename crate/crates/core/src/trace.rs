//! Request traces, next-arrival predictions, phases and the ℓ1 prediction error.
//!
//! Times are 1-indexed request positions. A page that never reappears after
//! position `i` has true next arrival `n + 1`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Geometric, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Identifier of a distinct page. Ordered; the order is used for every tie-break.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PageId(pub u64);

impl fmt::Display for PageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for PageId {
    fn from(v: u64) -> Self {
        PageId(v)
    }
}

/// Converts a slice of raw ids into pages. Handy in tests and generators.
pub fn pages(ids: &[u64]) -> Vec<PageId> {
    ids.iter().copied().map(PageId).collect()
}

/// True next arrival `y_i` for every position, as 1-indexed times.
///
/// Entry `i - 1` holds `min { j > i : z_j = z_i }`, or `n + 1` when the page
/// is never requested again. Single backward pass.
pub fn compute_true_next(requests: &[PageId]) -> Vec<usize> {
    let n = requests.len();
    let mut next = vec![0; n];
    let mut seen: HashMap<PageId, usize> = HashMap::with_capacity(n.min(1 << 16));
    for i in (0..n).rev() {
        let time = i + 1;
        next[i] = seen.insert(requests[i], time).unwrap_or(n + 1);
    }
    next
}

/// The prediction sequence with zero error.
pub fn perfect_predictions(requests: &[PageId]) -> Vec<i64> {
    compute_true_next(requests)
        .into_iter()
        .map(|y| y as i64)
        .collect()
}

/// A request sequence together with its (optional) next-arrival predictions.
///
/// Pages are additionally interned into dense slots `0..universe_len()`
/// assigned in increasing [`PageId`] order, so comparing slots is the same as
/// comparing page ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    requests: Vec<PageId>,
    predictions: Option<Vec<i64>>,
    true_next: Vec<usize>,
    universe: Vec<PageId>,
    slots: Vec<usize>,
}

impl Trace {
    /// A trace without predictions.
    pub fn new(requests: Vec<PageId>) -> Self {
        let true_next = compute_true_next(&requests);
        let universe: Vec<PageId> = requests
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<PageId, usize> =
            universe.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let slots = requests.iter().map(|p| index[p]).collect();
        Trace {
            requests,
            predictions: None,
            true_next,
            universe,
            slots,
        }
    }

    pub fn with_predictions(requests: Vec<PageId>, predictions: Vec<i64>) -> Result<Self> {
        Trace::new(requests).set_predictions(predictions)
    }

    /// Trace carrying perfect predictions.
    pub fn perfect(requests: Vec<PageId>) -> Self {
        let trace = Trace::new(requests);
        let preds = trace.true_next.iter().map(|&y| y as i64).collect();
        Trace {
            predictions: Some(preds),
            ..trace
        }
    }

    /// Replaces the predictions, keeping requests.
    pub fn set_predictions(mut self, predictions: Vec<i64>) -> Result<Self> {
        if predictions.len() != self.requests.len() {
            return Err(Error::LengthMismatch {
                left: self.requests.len(),
                right: predictions.len(),
            });
        }
        self.predictions = Some(predictions);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn requests(&self) -> &[PageId] {
        &self.requests
    }

    pub fn predictions(&self) -> Option<&[i64]> {
        self.predictions.as_deref()
    }

    pub fn true_next(&self) -> &[usize] {
        &self.true_next
    }

    /// Distinct pages in increasing order; slot `s` is `universe()[s]`.
    pub fn universe(&self) -> &[PageId] {
        &self.universe
    }

    pub fn universe_len(&self) -> usize {
        self.universe.len()
    }

    /// Dense slot of each request.
    pub fn slots(&self) -> &[usize] {
        &self.slots
    }
}

/// Greedy partition of `1..=n` into phases of at most `k` distinct pages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseDecomposition {
    /// Inclusive `(start, end)` times.
    pub boundaries: Vec<(usize, usize)>,
    pub distinct_per_phase: Vec<BTreeSet<PageId>>,
}

impl PhaseDecomposition {
    pub fn len(&self) -> usize {
        self.boundaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundaries.is_empty()
    }

    /// Zero-based phase index of each 1-indexed time, as a vector indexed by `time - 1`.
    pub fn phase_of_each(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (r, &(s, e)) in self.boundaries.iter().enumerate() {
            out.extend(std::iter::repeat_n(r, e + 1 - s));
        }
        out
    }
}

/// Splits the requests into phases: each phase extends as long as possible
/// without containing `k + 1` distinct pages.
pub fn compute_phases(requests: &[PageId], k: usize) -> PhaseDecomposition {
    assert!(k >= 1, "cache size must be positive");
    let mut boundaries = Vec::new();
    let mut distinct_per_phase = Vec::new();
    let mut current: BTreeSet<PageId> = BTreeSet::new();
    let mut start = 1;
    for (i, &page) in requests.iter().enumerate() {
        let time = i + 1;
        if !current.contains(&page) && current.len() == k {
            boundaries.push((start, time - 1));
            distinct_per_phase.push(std::mem::take(&mut current));
            start = time;
        }
        current.insert(page);
    }
    if !requests.is_empty() {
        boundaries.push((start, requests.len()));
        distinct_per_phase.push(current);
    }
    PhaseDecomposition {
        boundaries,
        distinct_per_phase,
    }
}

/// Total and per-phase ℓ1 prediction error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorReport {
    pub eta: u64,
    pub per_phase_eta: Vec<u64>,
}

/// `η = Σ |h_i − y_i|`; each term is attributed to the phase containing `i`.
pub fn l1_error(trace: &Trace, phases: &PhaseDecomposition) -> Result<ErrorReport> {
    let preds = trace
        .predictions()
        .ok_or_else(|| Error::MissingPredictions("l1_error".into()))?;
    let mut per_phase_eta = vec![0u64; phases.len()];
    for (r, &(s, e)) in phases.boundaries.iter().enumerate() {
        per_phase_eta[r] = preds[s - 1..e]
            .iter()
            .zip(&trace.true_next[s - 1..e])
            .map(|(&h, &y)| h.abs_diff(y as i64))
            .sum();
    }
    Ok(ErrorReport {
        eta: per_phase_eta.iter().sum(),
        per_phase_eta,
    })
}

/// Synthetic prediction noise added on top of the true next arrivals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    /// `h_i = y_i + U{-w..=w}`.
    AdditiveUniform { width: i64 },
    /// `h_i = y_i ± G`, `G ~ Geometric(p)` on `{0, 1, ..}`, fair random sign.
    AdditiveGeometric { p: f64 },
    /// `h_i = y_i + round(sigma · z)`, `z` standard normal.
    Scaled { sigma: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::AdditiveUniform { width } if width < 0 => {
                Err(Error::Parameter(format!("uniform noise width {width} < 0")))
            }
            NoiseModel::AdditiveGeometric { p } if !(p > 0.0 && p <= 1.0) => Err(Error::Parameter(
                format!("geometric noise p = {p} outside (0, 1]"),
            )),
            NoiseModel::Scaled { sigma } if !(sigma >= 0.0 && sigma.is_finite()) => Err(
                Error::Parameter(format!("scaled noise sigma = {sigma} < 0")),
            ),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::AdditiveUniform { width } => write!(f, "uniform:{width}"),
            NoiseModel::AdditiveGeometric { p } => write!(f, "geometric:{p}"),
            NoiseModel::Scaled { sigma } => write!(f, "scaled:{sigma}"),
        }
    }
}

impl std::str::FromStr for NoiseModel {
    type Err = Error;

    /// Parses `uniform:W`, `geometric:P` or `scaled:SIGMA`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("noise `{s}`: expected KIND:VALUE")))?;
        let bad = |_| Error::Parameter(format!("noise `{s}`: bad value `{arg}`"));
        let model = match kind.trim() {
            "uniform" => NoiseModel::AdditiveUniform {
                width: arg
                    .trim()
                    .parse()
                    .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            },
            "geometric" => NoiseModel::AdditiveGeometric {
                p: arg
                    .trim()
                    .parse()
                    .map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
            },
            "scaled" => NoiseModel::Scaled {
                sigma: arg
                    .trim()
                    .parse()
                    .map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
            },
            other => return Err(Error::Parameter(format!("unknown noise model `{other}`"))),
        };
        model.validate()?;
        Ok(model)
    }
}

/// Perfect predictions perturbed by `noise`, deterministic in `seed`.
///
/// The result is not clamped: predictions may land at or before the current time.
pub fn noisy_predictions(requests: &[PageId], noise: NoiseModel, seed: u64) -> Result<Vec<i64>> {
    noise.validate()?;
    let mut rng = rng_from_seed(seed);
    let truth = perfect_predictions(requests);
    let out = match noise {
        NoiseModel::AdditiveUniform { width } => truth
            .into_iter()
            .map(|y| y + rng.random_range(-width..=width))
            .collect(),
        NoiseModel::AdditiveGeometric { p } => {
            let geom = Geometric::new(p).map_err(|e| Error::Parameter(e.to_string()))?;
            truth
                .into_iter()
                .map(|y| {
                    let g = geom.sample(&mut rng).min(i64::MAX as u64 / 4) as i64;
                    if rng.random_bool(0.5) {
                        y + g
                    } else {
                        y - g
                    }
                })
                .collect()
        }
        NoiseModel::Scaled { sigma } => truth
            .into_iter()
            .map(|y| {
                let z: f64 = StandardNormal.sample(&mut rng);
                y + (sigma * z).round() as i64
            })
            .collect(),
    };
    Ok(out)
}

/// Parses the line-oriented trace format: one request per line, an optional
/// second whitespace-separated column with the integer prediction, `#` comments.
///
/// Either every request line carries a prediction or none does.
pub fn parse_trace(reader: impl BufRead, path: &Path) -> Result<Trace> {
    let mut requests = Vec::new();
    let mut predictions = Vec::new();
    let mut with_pred: Option<bool> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno,
            message,
        };
        let mut cols = trimmed.split_whitespace();
        let page_tok = cols.next().unwrap_or_default();
        let page: u64 = page_tok
            .parse()
            .map_err(|_| err(format!("page `{page_tok}` is not a non-negative integer")))?;
        let pred = cols.next();
        if cols.next().is_some() {
            return Err(err("more than two columns".into()));
        }
        match (with_pred, pred.is_some()) {
            (None, has) => with_pred = Some(has),
            (Some(a), b) if a != b => {
                return Err(err("prediction column present on some lines only".into()))
            }
            _ => {}
        }
        if let Some(tok) = pred {
            predictions.push(
                tok.parse::<i64>()
                    .map_err(|_| err(format!("prediction `{tok}` is not an integer")))?,
            );
        }
        requests.push(PageId(page));
    }
    if with_pred == Some(true) {
        Trace::with_predictions(requests, predictions)
    } else {
        Ok(Trace::new(requests))
    }
}

pub fn read_trace(path: &Path) -> Result<Trace> {
    let file = std::fs::File::open(path)?;
    parse_trace(std::io::BufReader::new(file), path)
}

/// Writes the trace format; two columns when predictions are present.
pub fn write_trace(mut out: impl Write, trace: &Trace) -> Result<()> {
    match trace.predictions() {
        Some(preds) => {
            for (p, h) in trace.requests().iter().zip(preds) {
                writeln!(out, "{p} {h}")?;
            }
        }
        None => {
            for p in trace.requests() {
                writeln!(out, "{p}")?;
            }
        }
    }
    Ok(())
}
