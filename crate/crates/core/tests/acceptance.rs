//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion, non-zero exit on any failure.

use std::process::Command;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use paging_lab::bench::run::{calibrate_scaled_noise, with_jobs};
use paging_lab::bench::verify::{
    belady_suite, bounded_geom_suite, inversion_suite, lemma_suite, sandwich_suite, SuiteResult,
};
use paging_lab::bench::{lower_bound_experiment, ExperimentConfig, Noise, RunOptions, Workload};
use paging_lab::opt::belady_cost;
use paging_lab::policies::{simulate, PolicyKind, PolicySpec};
use paging_lab::trace::NoiseModel;

struct Outcome {
    pass: bool,
    detail: String,
}

fn suite(r: SuiteResult, limit: Duration, elapsed: Duration) -> Outcome {
    Outcome {
        pass: r.passed() && elapsed < limit,
        detail: format!(
            "{} cases, {} violations{}",
            r.cases,
            r.violations,
            r.example
                .map(|e| format!(" (first: {e})"))
                .unwrap_or_default()
        ),
    }
}

/// Mean of `misses / opt` over seeds `0..seeds`, with the mean realized eta/opt.
fn mean_ratio(w: &Workload, k: usize, noise: Noise, kind: &PolicyKind, seeds: u64) -> (f64, f64) {
    let runs: Vec<(f64, f64)> = (0..seeds)
        .into_par_iter()
        .map(|s| {
            let trace = noise.apply(w.instance(k, s).unwrap(), s).unwrap();
            let idx = paging_lab::policies::TraceIndex::new(&trace, k);
            let summary = paging_lab::bench::run::summarize(&idx).unwrap();
            let rep =
                paging_lab::policies::simulate_indexed(&PolicySpec::new(kind.clone(), s), &idx)
                    .unwrap();
            (
                rep.misses as f64 / summary.opt_cost as f64,
                summary.eta_over_opt(),
            )
        })
        .collect();
    let n = runs.len() as f64;
    (
        runs.iter().map(|r| r.0).sum::<f64>() / n,
        runs.iter().map(|r| r.1).sum::<f64>() / n,
    )
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let r = belady_suite(10_000, 101);
    suite(r, Duration::from_secs(60), start.elapsed())
}

fn ac2() -> Outcome {
    let start = Instant::now();
    let r = sandwich_suite(10_000, 102);
    suite(r, Duration::from_secs(60), start.elapsed())
}

fn ac3() -> Outcome {
    let start = Instant::now();
    let r = inversion_suite(100_000, 103);
    suite(r, Duration::from_secs(60), start.elapsed())
}

fn ac4() -> Outcome {
    let k = 32;
    let mut workloads: Vec<Workload> = [1, 4, 16]
        .into_iter()
        .map(|t| Workload::Omega {
            t,
            n: 50,
            random_part_len: None,
        })
        .collect();
    workloads.push(Workload::Zipf {
        universe: 100,
        length: 5_000,
        exponent: 0.8,
    });
    workloads.push(Workload::Zipf {
        universe: 1_000,
        length: 20_000,
        exponent: 1.0,
    });

    let mut pass = true;
    let mut parts = Vec::new();
    for w in &workloads {
        // blind-follow matches the optimum on every instance
        let exact = (0..100u64).into_par_iter().all(|s| {
            let trace = Noise::Perfect.apply(w.instance(k, s).unwrap(), s).unwrap();
            let rep = simulate(&PolicySpec::new(PolicyKind::BlindFollow, s), &trace, k).unwrap();
            rep.misses == belady_cost(&trace, k)
        });
        let (lm, _) = mean_ratio(w, k, Noise::Perfect, &PolicyKind::LMarker, 100);
        let (ln, _) = mean_ratio(w, k, Noise::Perfect, &PolicyKind::LNonMarker, 100);
        pass &= exact && lm <= 4.25 && ln <= 4.25;
        parts.push(format!(
            "{}: blind=opt {exact}, lmarker {lm:.3}, lnonmarker {ln:.3}",
            w.id(k)
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn ac5() -> Outcome {
    let k = 32;
    let w = Workload::Omega {
        t: 1,
        n: 50,
        random_part_len: None,
    };
    let comb = PolicyKind::combiner(PolicyKind::LNonMarker, PolicyKind::RandomMarker);
    let mut pass = true;
    let mut parts = Vec::new();
    let heavy = Noise::Model(NoiseModel::Scaled { sigma: 1e5 });
    for (label, noise) in [("prescribed", Noise::Keep), ("scaled:1e5", heavy)] {
        let (c, q) = mean_ratio(&w, k, noise, &comb, 100);
        let (rm, _) = mean_ratio(&w, k, noise, &PolicyKind::RandomMarker, 100);
        pass &= q >= 10.0 * k as f64 && c <= 1.1 * rm;
        parts.push(format!(
            "{label}: eta/opt {q:.0}, combiner {c:.3} vs random_marker {rm:.3}"
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn ac6() -> Outcome {
    let k = 256;
    let target = k as f64 / (k as f64).ln();
    let workloads = [
        Workload::Zipf {
            universe: 300,
            length: 30_000,
            exponent: 0.6,
        },
        Workload::Omega {
            t: 1,
            n: 50,
            random_part_len: None,
        },
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for w in &workloads {
        let sigma = calibrate_scaled_noise(w, k, target, &[1000, 1001, 1002, 1003]).unwrap();
        let noise = Noise::Model(NoiseModel::Scaled { sigma });
        let (ln, q) = mean_ratio(w, k, noise, &PolicyKind::LNonMarker, 100);
        let (rm, _) = mean_ratio(w, k, noise, &PolicyKind::RandomMarker, 100);
        let tuned = q > 0.5 * target && q < 2.0 * target;
        pass &= tuned && ln <= 0.8 * rm;
        parts.push(format!(
            "{}: sigma {sigma:.3}, eta/opt {q:.1} (target {target:.1}), lnonmarker {ln:.3} vs random_marker {rm:.3}",
            w.id(k)
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn ac7() -> Outcome {
    let start = Instant::now();
    let r = lemma_suite(10_000, 107).unwrap();
    suite(r, Duration::from_secs(600), start.elapsed())
}

fn ac8() -> Outcome {
    let (k, n) = (64, 50);
    let cfg: ExperimentConfig = format!(
        "workload = omega\nk = {k}\nn = {n}\nt = 1\nt = 4\nt = 16\n\
         policy = random_marker\npolicy = lmarker\npolicy = lnonmarker\npolicy = lru\n\
         policy = blind_follow\nseeds = 0..200\n"
    )
    .parse()
    .unwrap();
    let start = Instant::now();
    let rows = lower_bound_experiment(
        &cfg,
        RunOptions {
            jobs: Some(1),
            timing: false,
        },
    )
    .unwrap();
    let elapsed = start.elapsed();

    let floors_ok = rows.iter().all(|r| r.pass);
    let lnk = (k as f64).ln();
    let mut eta = Vec::new();
    for t in [1usize, 4, 16] {
        let r = rows.iter().find(|r| r.t == t).unwrap();
        eta.push((t, r.mean_eta_over_opt));
    }
    let cap_ok = eta
        .iter()
        .all(|&(t, q)| q <= 8.0 * (k * k) as f64 * lnk / t as f64);
    let decreasing = eta.windows(2).all(|w| w[1].1 < w[0].1);
    let worst = rows
        .iter()
        .map(|r| (r.mean_misses / r.floor.max(1e-9), r))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap()
        .1;
    Outcome {
        pass: floors_ok && cap_ok && decreasing && elapsed < Duration::from_secs(600),
        detail: format!(
            "{} (t, policy) rows, all above floor {floors_ok} (tightest: t={} {} mean {:.1} floor {:.1}); \
             eta/opt by t {:?}; {:.1}s",
            rows.len(),
            worst.t,
            worst.policy,
            worst.mean_misses,
            worst.floor,
            eta.iter().map(|&(t, q)| format!("{t}:{q:.0}")).collect::<Vec<_>>(),
            elapsed.as_secs_f64()
        ),
    }
}

fn ac9() -> Outcome {
    let start = Instant::now();
    let r = bounded_geom_suite(10_000, 109).unwrap();
    suite(r, Duration::from_secs(300), start.elapsed())
}

fn ac10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(
        &cfg,
        "workload = zipf\nk = 8\nuniverse = 40\nlength = 2000\nexponent = 0.9\n\
         policy = lru\npolicy = random_marker\npolicy = lnonmarker\n\
         policy = combiner:lnonmarker+random_marker\nnoise = scaled:20\nseeds = 0..24\n",
    )
    .unwrap();
    let omega = dir.path().join("omega.cfg");
    std::fs::write(
        &omega,
        "workload = omega\nk = 8\nt = 1\nt = 3\nn = 6\npolicy = lmarker\npolicy = random_marker\nseeds = 0..12\n",
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_paging-lab");
    let run = |config: &std::path::Path, jobs: &str, tag: &str| {
        let out = dir.path().join(format!("{tag}-{jobs}.csv"));
        let status = Command::new(bin)
            .args(["simulate", "--config"])
            .arg(config)
            .args(["--jobs", jobs, "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let mut pass = true;
    let mut sizes = Vec::new();
    for (config, tag) in [(&cfg, "zipf"), (&omega, "omega")] {
        let base = run(config, "1", tag);
        for jobs in ["2", "4", "7"] {
            pass &= run(config, jobs, tag) == base;
        }
        pass &= run(config, "1", &format!("{tag}-again")) == base;
        sizes.push(format!("{tag}: {} bytes", base.len()));
    }
    Outcome {
        pass,
        detail: format!(
            "jobs 1/2/4/7 and a rerun byte-identical: {}",
            sizes.join(", ")
        ),
    }
}

fn main() {
    type Criterion = (&'static str, &'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("AC1", "Belady equals exhaustive optimum", ac1),
        ("AC2", "L/2 <= opt <= L", ac2),
        ("AC3", "inversions <= 2 cost", ac3),
        ("AC4", "perfect-prediction consistency", ac4),
        ("AC5", "combiner robustness under heavy noise", ac5),
        ("AC6", "lnonmarker improvement at eta/opt = k/ln k", ac6),
        ("AC7", "chain lemmas on fuzzed lnonmarker runs", ac7),
        ("AC8", "omega lower bound", ac8),
        ("AC9", "bounded-geometric occupation times", ac9),
        ("AC10", "CSV determinism across --jobs", ac10),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f.eq_ignore_ascii_case(id)) {
            continue;
        }
        let start = Instant::now();
        let out = with_jobs(None, check).unwrap();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {id} {name}: {} [{:.1}s]",
            out.detail,
            start.elapsed().as_secs_f64()
        );
        if !out.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
