//! Stand-alone checks of two combinatorial/probabilistic facts used by the
//! analysis: inversions versus ℓ1 distance to an increasing sequence, and the
//! occupation times of a truncated coupon-collector walk.

use rand::Rng;

use crate::adversary::default_random_part_len;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// A strictly increasing reference `m_seq` and an arbitrary `a_seq`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InversionInstance {
    pub m_seq: Vec<i64>,
    pub a_seq: Vec<i64>,
}

impl InversionInstance {
    pub fn new(m_seq: Vec<i64>, a_seq: Vec<i64>) -> Result<Self> {
        if m_seq.len() != a_seq.len() {
            return Err(Error::LengthMismatch {
                left: m_seq.len(),
                right: a_seq.len(),
            });
        }
        if m_seq.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter(
                "reference sequence must be strictly increasing".into(),
            ));
        }
        Ok(InversionInstance { m_seq, a_seq })
    }
}

/// Pairs `i < j` with `a_i >= a_j`. Ties count.
///
/// Merge sort: while merging, a right element is emitted before any left
/// element that is `>=` it, so equal values are counted as inversions.
pub fn inversions(a_seq: &[i64]) -> u64 {
    let mut buf = a_seq.to_vec();
    let mut scratch = vec![0; buf.len()];
    sort_count(&mut buf, &mut scratch)
}

fn sort_count(v: &mut [i64], scratch: &mut [i64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = {
        let (left, right) = v.split_at_mut(mid);
        let (sl, sr) = scratch.split_at_mut(mid);
        sort_count(left, sl) + sort_count(right, sr)
    };
    let (mut i, mut j, mut o) = (0, mid, 0);
    while i < mid && j < n {
        if v[i] < v[j] {
            scratch[o] = v[i];
            i += 1;
        } else {
            // v[i..mid] are all >= v[j]
            count += (mid - i) as u64;
            scratch[o] = v[j];
            j += 1;
        }
        o += 1;
    }
    scratch[o..o + mid - i].copy_from_slice(&v[i..mid]);
    o += mid - i;
    scratch[o..o + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&scratch[..n]);
    count
}

/// `Σ |a_i − m_i|`.
pub fn l1_cost(a_seq: &[i64], m_seq: &[i64]) -> Result<u64> {
    if a_seq.len() != m_seq.len() {
        return Err(Error::LengthMismatch {
            left: a_seq.len(),
            right: m_seq.len(),
        });
    }
    Ok(a_seq.iter().zip(m_seq).map(|(a, m)| a.abs_diff(*m)).sum())
}

/// `inv(A) <= 2 · cost(A)`, checked on the raw sequence (no thresholding).
pub fn check_inversion_lemma(inst: &InversionInstance) -> bool {
    let cost = l1_cost(&inst.a_seq, &inst.m_seq).expect("instance lengths agree");
    u128::from(inversions(&inst.a_seq)) <= 2 * u128::from(cost)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundedGeomReport {
    pub k: usize,
    pub l: usize,
    pub trials: usize,
    pub draws: usize,
    /// Empirical mean of `T_j`, `0 <= j < l`.
    pub empirical_means: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// `k / (l − j) − 1 / k`.
    pub floors: Vec<f64>,
    /// Indices `j` with `mean + 3·stderr < floor`.
    pub violations: Vec<usize>,
}

/// Monte Carlo estimate of `E[T_j]`, where `T_j` counts the steps among
/// `ceil(3 k ln k)` uniform draws from `[k]` at which exactly `j` distinct
/// values of `[l]` have been seen. A step is counted with the state before
/// its draw, so step 0 always has `j = 0`.
pub fn check_bounded_geom(
    k: usize,
    l: usize,
    trials: usize,
    seed: u64,
) -> Result<BoundedGeomReport> {
    if l < 2 || l > k {
        return Err(Error::Parameter(format!(
            "need 2 <= l <= k, got l={l} k={k}"
        )));
    }
    if trials < 1000 {
        return Err(Error::Parameter(format!(
            "need at least 1000 trials, got {trials}"
        )));
    }
    let draws = default_random_part_len(k);
    let mut rng = rng_from_seed(seed);
    let mut sum = vec![0f64; l];
    let mut sum_sq = vec![0f64; l];
    let mut counts = vec![0u64; l];
    let mut seen = vec![false; l];
    for _ in 0..trials {
        counts.iter_mut().for_each(|c| *c = 0);
        seen.iter_mut().for_each(|s| *s = false);
        let mut distinct = 0;
        for _ in 0..draws {
            if distinct < l {
                counts[distinct] += 1;
            }
            let x = rng.random_range(0..k);
            if x < l && !seen[x] {
                seen[x] = true;
                distinct += 1;
            }
        }
        for j in 0..l {
            let c = counts[j] as f64;
            sum[j] += c;
            sum_sq[j] += c * c;
        }
    }
    let n = trials as f64;
    let mut empirical_means = Vec::with_capacity(l);
    let mut std_errors = Vec::with_capacity(l);
    let mut floors = Vec::with_capacity(l);
    let mut violations = Vec::new();
    for j in 0..l {
        let mean = sum[j] / n;
        let var = ((sum_sq[j] - n * mean * mean) / (n - 1.0)).max(0.0);
        let se = (var / n).sqrt();
        let floor = k as f64 / (l - j) as f64 - 1.0 / k as f64;
        if mean + 3.0 * se < floor {
            violations.push(j);
        }
        empirical_means.push(mean);
        std_errors.push(se);
        floors.push(floor);
    }
    Ok(BoundedGeomReport {
        k,
        l,
        trials,
        draws,
        empirical_means,
        std_errors,
        floors,
        violations,
    })
}
