use std::path::Path;
use std::process::{Command, Output};

fn paging_lab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paging-lab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn generate_then_simulate_the_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("gen.cfg"),
        "workload = omega\nk = 4\nt = 2\nn = 3\npolicy = lru\nseed = 3\n",
    )
    .unwrap();
    let listed = ok(&paging_lab(
        &["generate", "--config", "gen.cfg", "--out", "traces"],
        dir.path(),
    ));
    assert_eq!(listed.trim(), "traces/omega-k4-t2-n3-s3.trace");
    let meta = std::fs::read_to_string(dir.path().join("traces/omega-k4-t2-n3-s3.meta")).unwrap();
    assert!(meta.contains("k=4") && meta.contains("t=2"));

    std::fs::write(
        dir.path().join("sim.cfg"),
        "workload = file\ntrace = traces/omega-k4-t2-n3-s3.trace\nk = 4\n\
         policy = blind_follow\npolicy = lmarker\nseeds = 0..3\n",
    )
    .unwrap();
    let csv = ok(&paging_lab(
        &["simulate", "--config", "sim.cfg"],
        dir.path(),
    ));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], paging_lab::bench::run::RESULT_HEADER);
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("file-omega-k4-t2-n3-s3,blind_follow,0,4,"));
    assert!(lines.iter().skip(1).all(|l| l.ends_with(',')));

    let timed = ok(&paging_lab(
        &["simulate", "--config", "sim.cfg", "--timing"],
        dir.path(),
    ));
    assert!(timed.lines().skip(1).all(|l| !l.ends_with(',')));
}

#[test]
fn seed_base_shifts_seeds() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("a.cfg"),
        "workload = uniform\nk = 3\nuniverse = 6\nlength = 50\npolicy = random_marker\nseeds = 0..2\n",
    )
    .unwrap();
    let csv = ok(&paging_lab(
        &["simulate", "--config", "a.cfg", "--seed-base", "10"],
        dir.path(),
    ));
    let seeds: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap())
        .collect();
    assert_eq!(seeds, ["10", "11"]);
}

#[test]
fn sweep_with_plot_and_lowerbound() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("s.cfg"),
        "workload = zipf\nk = 4\nuniverse = 12\nlength = 300\nexponent = 0.7\n\
         policy = lmarker\npolicy = random_marker\nnoise = perfect\nnoise = scaled:50\nseeds = 0..3\n",
    )
    .unwrap();
    let out = ok(&paging_lab(
        &[
            "sweep", "--config", "s.cfg", "--out", "s.csv", "--plot", "s.dat", "--jobs", "2",
        ],
        dir.path(),
    ));
    assert!(out.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 3);
    let first = csv.lines().nth(1).unwrap();
    assert!(first.starts_with("zipf-u12-len300-s0.7,perfect,lmarker,0,4,"));
    assert!(first.ends_with(",4.000000,36.000000"));
    let plot = std::fs::read_to_string(dir.path().join("s.dat")).unwrap();
    assert_eq!(plot.lines().filter(|l| l.starts_with('#')).count(), 2);

    std::fs::write(
        dir.path().join("lb.cfg"),
        "workload = omega\nk = 8\nt = 2\nt = 8\nn = 4\npolicy = random_marker\npolicy = lru\nseeds = 0..20\n",
    )
    .unwrap();
    let csv = ok(&paging_lab(
        &["lowerbound", "--config", "lb.cfg"],
        dir.path(),
    ));
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn verify_quick() {
    let dir = tempfile::tempdir().unwrap();
    let csv = ok(&paging_lab(&["verify", "--quick"], dir.path()));
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn config_errors_are_reported_with_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.cfg"),
        "workload = omega\nk = 4\nn = 3\nt = 9\npolicy = lru\n",
    )
    .unwrap();
    let out = paging_lab(&["simulate", "--config", "bad.cfg"], dir.path());
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("config line 4, field `t`"), "{err}");

    std::fs::write(
        dir.path().join("noisy.cfg"),
        "workload = omega\nk = 4\nn = 3\nt = 1\npolicy = lru\nnoise = perfect\n",
    )
    .unwrap();
    let out = paging_lab(&["simulate", "--config", "noisy.cfg"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("field `noise`"));

    let out = paging_lab(&["simulate", "--config", "missing.cfg"], dir.path());
    assert!(!out.status.success());
}
