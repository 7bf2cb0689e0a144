//! Property suites run by `paging-lab verify`.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::adversary::sample_omega;
use crate::error::Result;
use crate::lemma_lab::{check_bounded_geom, check_inversion_lemma, InversionInstance};
use crate::opt::{belady_cost, brute_force_opt, count_clean};
use crate::policies::{
    simulate_indexed, verify_lemma_injection, verify_lemma_totalerror, PolicyKind, PolicySpec,
    TraceIndex,
};
use crate::rng::{child_seed, rng_from_seed, SimRng};
use crate::trace::{l1_error, NoiseModel, PageId, Trace};

use super::workload::{uniform_requests, zipf_requests, Noise};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub suite: String,
    pub cases: u64,
    pub violations: u64,
    /// First counterexample, if any.
    pub example: Option<String>,
}

impl SuiteResult {
    fn new(suite: &str) -> Self {
        SuiteResult {
            suite: suite.into(),
            cases: 0,
            violations: 0,
            example: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.violations += 1;
            if self.example.is_none() {
                self.example = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub const VERIFY_HEADER: &str = "suite,cases,violations,pass";

pub fn write_verify(results: &[SuiteResult], mut out: impl Write) -> Result<()> {
    writeln!(out, "{VERIFY_HEADER}")?;
    for r in results {
        writeln!(
            out,
            "{},{},{},{}",
            r.suite,
            r.cases,
            r.violations,
            r.passed()
        )?;
    }
    Ok(())
}

/// Case counts for [`run_all`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifySizes {
    pub belady_random: usize,
    pub sandwich: usize,
    pub inversion_fuzz: usize,
    pub geom_trials: usize,
    pub lemma_runs: usize,
}

impl Default for VerifySizes {
    fn default() -> Self {
        VerifySizes {
            belady_random: 10_000,
            sandwich: 10_000,
            inversion_fuzz: 100_000,
            geom_trials: 10_000,
            lemma_runs: 10_000,
        }
    }
}

pub fn run_all(sizes: VerifySizes, seed: u64) -> Result<Vec<SuiteResult>> {
    Ok(vec![
        belady_suite(sizes.belady_random, child_seed(seed, 1)),
        sandwich_suite(sizes.sandwich, child_seed(seed, 2)),
        inversion_suite(sizes.inversion_fuzz, child_seed(seed, 3)),
        bounded_geom_suite(sizes.geom_trials, child_seed(seed, 4))?,
        lemma_suite(sizes.lemma_runs, child_seed(seed, 5))?,
    ])
}

fn ids_to_string(ids: &[PageId]) -> String {
    ids.iter()
        .map(|p| p.0.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Every sequence over `{1..=alphabet}` of length `n`, in lexicographic order.
fn all_sequences(n: usize, alphabet: u64, mut f: impl FnMut(&[u64])) {
    let mut seq = vec![1u64; n];
    loop {
        f(&seq);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if seq[i] < alphabet {
                seq[i] += 1;
                break;
            }
            seq[i] = 1;
        }
    }
}

/// Sequences of length `n` over at most `alphabet` pages in which each new
/// page is the next unused label; every sequence is a relabeling of one of them.
fn canonical_sequences(n: usize, alphabet: u64, f: &mut impl FnMut(&[u64])) {
    fn go(seq: &mut Vec<u64>, n: usize, used: u64, alphabet: u64, f: &mut impl FnMut(&[u64])) {
        if seq.len() == n {
            f(seq);
            return;
        }
        for p in 1..=(used + 1).min(alphabet) {
            seq.push(p);
            go(seq, n, used.max(p), alphabet, f);
            seq.pop();
        }
    }
    go(&mut Vec::with_capacity(n), n, 0, alphabet, f)
}

/// Belady against the exhaustive optimum: every sequence over four pages up
/// to length 7, every sequence up to relabeling for lengths 8 to 10, each with
/// `k` in 1..=3, then `random` instances up to 12 requests, 6 pages, `k <= 4`.
pub fn belady_suite(random: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("belady_vs_exhaustive");
    let check = |ids: &[u64], k: usize, res: &mut SuiteResult| {
        let trace = Trace::new(ids.iter().map(|&p| PageId(p)).collect());
        let fast = belady_cost(&trace, k);
        let exact = brute_force_opt(&trace, k).expect("instance within exhaustive limits");
        res.record(fast == exact, || {
            format!(
                "k={k} trace=[{}] belady={fast} exact={exact}",
                ids_to_string(trace.requests())
            )
        });
    };
    for n in 1..=10 {
        let mut visit = |ids: &[u64]| {
            for k in 1..=3 {
                check(ids, k, &mut res);
            }
        };
        if n <= 7 {
            all_sequences(n, 4, visit);
        } else {
            canonical_sequences(n, 4, &mut visit);
        }
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..random {
        let n = rng.random_range(1..=12);
        let pages = rng.random_range(1..=6u64);
        let k = rng.random_range(1..=4);
        // sparse labels so that slot order differs from first-use order
        let labels: Vec<u64> = (0..pages).map(|_| rng.random_range(1..1000)).collect();
        let ids: Vec<u64> = (0..n)
            .map(|_| labels[rng.random_range(0..labels.len())])
            .collect();
        check(&ids, k, &mut res);
    }
    res
}

fn random_trace(rng: &mut SimRng, k: usize, max_len: usize) -> Vec<PageId> {
    let universe = rng.random_range(k as u64 + 1..=4 * k as u64);
    let length = rng.random_range(1..=max_len);
    let seed = rng.random();
    if rng.random_bool(0.5) {
        uniform_requests(universe, length, seed)
    } else {
        let exponent = rng.random_range(0.3..1.5);
        zipf_requests(universe, length, exponent, seed).expect("valid zipf parameters")
    }
}

/// `L / 2 <= opt <= L` on `cases` uniform and zipf traces, `k` in {2, 8, 32}.
pub fn sandwich_suite(cases: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("clean_sandwich");
    let mut rng = rng_from_seed(seed);
    for i in 0..cases {
        let k = [2, 8, 32][i % 3];
        let trace = Trace::new(random_trace(&mut rng, k, 40 * k));
        let opt = belady_cost(&trace, k);
        let l = count_clean(&trace, k);
        res.record(l <= 2 * opt && opt <= l, || {
            format!("k={k} len={} opt={opt} L={l}", trace.len())
        });
    }
    res
}

/// Inversions at most twice the ℓ1 distance to `1..=n`: exhaustive over
/// `A` in `{0..6}^n` for `n <= 5`, then `fuzz` random instances with `n <= 200`.
pub fn inversion_suite(fuzz: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("inversion_lemma");
    for n in 1..=5 {
        let m: Vec<i64> = (1..=n as i64).collect();
        all_sequences(n, 7, |a| {
            let a: Vec<i64> = a.iter().map(|&x| x as i64 - 1).collect();
            let inst = InversionInstance::new(m.clone(), a).expect("valid instance");
            res.record(check_inversion_lemma(&inst), || {
                format!("A={:?}", inst.a_seq)
            });
        });
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..fuzz {
        let n = rng.random_range(1..=200);
        let mut m = Vec::with_capacity(n);
        let mut x = rng.random_range(-50..50i64);
        for _ in 0..n {
            x += rng.random_range(1..=5);
            m.push(x);
        }
        let a: Vec<i64> = match rng.random_range(0..3) {
            0 => (0..n)
                .map(|_| rng.random_range(m[0] - 10..=m[n - 1] + 10))
                .collect(),
            1 => {
                let mut a = m.clone();
                a.shuffle(&mut rng);
                a
            }
            _ => {
                // a few local swaps plus jitter
                let mut a = m.clone();
                for _ in 0..rng.random_range(0..=n) {
                    let i = rng.random_range(0..n);
                    let j = (i + rng.random_range(0..4)).min(n - 1);
                    a.swap(i, j);
                }
                a.iter().map(|v| v + rng.random_range(-2..=2)).collect()
            }
        };
        let inst = InversionInstance::new(m, a).expect("valid instance");
        res.record(check_inversion_lemma(&inst), || {
            format!("n={n} A={:?}", inst.a_seq)
        });
    }
    res
}

/// Zero 3-sigma violations on `k` in {8, 32, 128}, `l` in {2, k/2, k}.
pub fn bounded_geom_suite(trials: usize, seed: u64) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("bounded_geometric");
    for (i, k) in [8usize, 32, 128].into_iter().enumerate() {
        for (j, l) in [2, k / 2, k].into_iter().enumerate() {
            let rep =
                check_bounded_geom(k, l, trials, child_seed(seed ^ (3 * i + j) as u64, b'G'))?;
            res.cases += l as u64;
            res.violations += rep.violations.len() as u64;
            if let (Some(&v), None) = (rep.violations.first(), &res.example) {
                res.example = Some(format!(
                    "k={k} l={l} j={v} mean={:.4} se={:.4} floor={:.4}",
                    rep.empirical_means[v], rep.std_errors[v], rep.floors[v]
                ));
            }
        }
    }
    Ok(res)
}

/// One fuzzed LNONMARKER input: uniform, zipf or omega requests with mixed
/// prediction noise.
pub fn fuzz_lemma_case(rng: &mut SimRng) -> Result<(Trace, usize)> {
    let k = rng.random_range(1..=12);
    let noise = match rng.random_range(0..5) {
        0 => Noise::Perfect,
        1 => Noise::Model(NoiseModel::AdditiveUniform {
            width: rng.random_range(0..=200),
        }),
        2 => Noise::Model(NoiseModel::AdditiveGeometric {
            p: rng.random_range(0.001..1.0),
        }),
        3 => Noise::Model(NoiseModel::Scaled {
            sigma: rng.random_range(0.0..500.0),
        }),
        _ => Noise::Keep,
    };
    let seed: u64 = rng.random();
    if rng.random_range(0..3) == 0 && k >= 2 {
        let t = rng.random_range(1..=k);
        let n = rng.random_range(2..=5);
        let inst = sample_omega(k, t, n, seed)?;
        return Ok((noise.apply(inst.trace, seed)?, k));
    }
    let trace = Trace::perfect(random_trace(rng, k, 400));
    Ok((noise.apply(trace, seed)?, k))
}

/// Both chain lemmas on `runs` fuzzed LNONMARKER executions.
pub fn lemma_suite(runs: usize, seed: u64) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("lnonmarker_lemmas");
    let mut rng = rng_from_seed(seed);
    for _ in 0..runs {
        let (trace, k) = fuzz_lemma_case(&mut rng)?;
        let idx = TraceIndex::new(&trace, k);
        let policy_seed = rng.random();
        let report = simulate_indexed(&PolicySpec::new(PolicyKind::LNonMarker, policy_seed), &idx)?;
        let err = l1_error(&trace, idx.phases())?;
        let ok =
            verify_lemma_totalerror(&report, &err, k) && verify_lemma_injection(&report, &err, k);
        res.record(ok, || {
            format!(
                "k={k} len={} seed={policy_seed} eta={} sum_n_star={} C={} L={}",
                trace.len(),
                err.eta,
                report.sum_n_star,
                report.chain_count_c,
                report.clean_count_l
            )
        });
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerators_count() {
        let mut c = 0;
        all_sequences(3, 4, |_| c += 1);
        assert_eq!(c, 64);
        // Stirling numbers S(6, j), j <= 3: 1 + 31 + 90
        let mut c = 0;
        canonical_sequences(6, 3, &mut |_| c += 1);
        assert_eq!(c, 122);
    }

    #[test]
    fn small_suites_pass() {
        let sizes = VerifySizes {
            belady_random: 200,
            sandwich: 60,
            inversion_fuzz: 300,
            geom_trials: 1000,
            lemma_runs: 100,
        };
        for r in run_all(sizes, 7).unwrap() {
            assert!(r.passed(), "{r:?}");
            assert!(r.cases > 0);
        }
    }
}
