//! End-to-end checks of the binary: exit codes, reproducible outputs, and
//! the schedule-file round trip.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chebjac"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn field(text: &str, key: &str) -> String {
    let prefix = format!("{key} = ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` line in:\n{text}"))
        .to_string()
}

#[test]
fn verify_suites_pass() {
    let out = run(&["verify", "all"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("checks = "), "missing tally:\n{text}");
    assert!(text.contains("failed = 0"), "failures reported:\n{text}");
    assert!(!text.contains(": fail"), "failing check:\n{text}");
}

#[test]
fn unknown_suite_and_unknown_key_are_usage_errors() {
    let out = run(&["verify", "vibes"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "problem = poisson2d-exp\nfrobnicate = 1\n").unwrap();
    let out = run(&["predict", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("frobnicate"), "stderr: {}", stderr(&out));

    let out = run(&["predict", "--set", "stencil=twelve-point"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn predict_reports_the_minimal_cycle_size() {
    let args = [
        "predict",
        "--set",
        "problem=laplace2d-neumann",
        "--set",
        "n=256",
        "--set",
        "sigma=1e-6",
    ];
    let out = run(&args);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(field(&text, "cycle_size"), "1672");
    let bound: f64 = field(&text, "bound").parse().unwrap();
    assert!(bound <= 1e-6, "bound {bound} exceeds the sigma target");
    let rate: f64 = field(&text, "per_iteration_rate").parse().unwrap();
    assert!(rate > 0.0 && rate < 1.0);

    let mut rounded = args.to_vec();
    rounded.push("--round-up-pow2");
    let out = run(&rounded);
    assert!(out.status.success());
    assert_eq!(field(&stdout(&out), "cycle_size"), "2048");
}

fn bench_config(out_dir: &Path) -> String {
    format!(
        "problem = poisson2d-exp\n\
         n = 16\n\
         methods = jacobi, sor:1.7, cjm\n\
         sigma = 1e-8\n\
         tol = 1e-8\n\
         out_dir = {}\n",
        out_dir.display()
    )
}

#[test]
fn bench_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
    for round in 0..2 {
        let out_dir = dir.path().join(format!("round{round}"));
        let cfg = dir.path().join(format!("bench{round}.cfg"));
        fs::write(&cfg, bench_config(&out_dir)).unwrap();
        let out = run(&["bench", "--config", cfg.to_str().unwrap()]);
        assert!(out.status.success(), "stderr: {}", stderr(&out));
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out_dir)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        outputs.push(files);
    }
    let names: Vec<&String> = outputs[0].iter().map(|(n, _)| n).collect();
    assert!(names.contains(&&"jacobi.csv".to_string()), "files: {names:?}");
    assert!(names.contains(&&"sor-1.7.csv".to_string()));
    assert!(names.contains(&&"cjm.csv".to_string()));
    assert!(names.contains(&&"summary.csv".to_string()));
    assert_eq!(outputs[0], outputs[1], "reruns differ");
}

#[test]
fn summary_iteration_counts_match_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = dir.path().join("bench.cfg");
    fs::write(&cfg, bench_config(&out_dir)).unwrap();
    let out = run(&["bench", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    let mut rows = 0;
    for line in summary.lines().skip(1) {
        let mut cells = line.split(',');
        let label = cells.next().unwrap();
        let iterations: usize = cells.next().unwrap().parse().unwrap();
        let csv = fs::read_to_string(out_dir.join(format!("{label}.csv"))).unwrap();
        assert_eq!(
            csv.lines().count() - 1,
            iterations,
            "row count vs iterations for {label}"
        );
        assert_eq!(csv.lines().next(), Some("iteration,residual"));
        rows += 1;
    }
    assert_eq!(rows, 3);
    // The scheduled method must beat plain Jacobi; the speedup column
    // records the ratio.
    let cjm_row = summary
        .lines()
        .find(|l| l.starts_with("cjm,"))
        .expect("cjm row");
    let speedup: f64 = cjm_row.split(',').nth(4).unwrap().parse().unwrap();
    assert!(speedup > 1.0, "speedup {speedup}");
}

#[test]
fn solving_from_an_exported_schedule_reproduces_the_direct_run() {
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("sched.txt");
    let direct = dir.path().join("direct");
    let via_file = dir.path().join("via-file");
    let base = [
        "--set",
        "problem=poisson2d-exp",
        "--set",
        "n=16",
        "--set",
        "sigma=1e-8",
        "--set",
        "tol=1e-8",
    ];

    let mut weights_args: Vec<String> = vec!["weights".into()];
    weights_args.extend(base.iter().map(|s| s.to_string()));
    weights_args.push("--set".into());
    weights_args.push(format!("schedule_out={}", sched.display()));
    let out = Command::new(env!("CARGO_BIN_EXE_chebjac"))
        .args(&weights_args)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(sched.exists());

    let solve_with = |extra: Vec<String>| {
        let mut v: Vec<String> = vec!["solve".into()];
        v.extend(base.iter().map(|s| s.to_string()));
        v.push("--set".into());
        v.push("method=cjm".into());
        v.extend(extra);
        let out = Command::new(env!("CARGO_BIN_EXE_chebjac"))
            .args(&v)
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", stderr(&out));
    };
    solve_with(vec!["--set".into(), format!("out_dir={}", direct.display())]);
    solve_with(vec![
        "--set".into(),
        format!("out_dir={}", via_file.display()),
        "--set".into(),
        format!("schedule_in={}", sched.display()),
        // A decoy target: the schedule file's cycle size must win.
        "--set".into(),
        "sigma=1e-2".into(),
    ]);
    let a = fs::read(direct.join("cjm.csv")).unwrap();
    let b = fs::read(via_file.join("cjm.csv")).unwrap();
    assert_eq!(a, b, "schedule file changed the run");
}

#[test]
fn seeded_singular_solves_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for round in 0..2 {
        let out_dir = dir.path().join(format!("r{round}"));
        let v: Vec<String> = vec![
            "solve".into(),
            "--set".into(),
            "problem=laplace2d-neumann".into(),
            "--set".into(),
            "n=32".into(),
            "--set".into(),
            "sigma=1e-6".into(),
            "--set".into(),
            "tol=1e-6".into(),
            "--set".into(),
            format!("out_dir={}", out_dir.display()),
        ];
        let out = Command::new(env!("CARGO_BIN_EXE_chebjac"))
            .args(&v)
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", stderr(&out));
        csvs.push(fs::read(out_dir.join("cjm.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn bogus_spectral_override_diverges_with_exit_code_1() {
    let dir = tempfile::tempdir().unwrap();
    let v: Vec<String> = vec![
        "solve".into(),
        "--set".into(),
        "problem=poisson2d-exp".into(),
        "--set".into(),
        "n=16".into(),
        "--set".into(),
        "kappa_min=0.5".into(),
        "--set".into(),
        "kappa_max=0.6".into(),
        "--set".into(),
        format!("out_dir={}", dir.path().display()),
    ];
    let out = Command::new(env!("CARGO_BIN_EXE_chebjac"))
        .args(&v)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("diverged"), "stderr: {}", stderr(&out));
}
