use std::path::Path;
use std::process::Command;

use ro_arena_bench::table::{parse_csv, report_files};
use ro_arena_bench::{enumerate::enumerate, gen, run, BenchError, ExperimentConfig};

fn cfg(alg: &str, instance: &str, trials: u64, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        alg: Some(alg.into()),
        instance: Some(instance.into()),
        trials: Some(trials),
        seed: Some(seed),
        ..Default::default()
    }
}

fn rows_of(bytes: &[u8]) -> Vec<ro_arena_bench::table::Row> {
    parse_csv("mem", std::str::from_utf8(bytes).unwrap()).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ro-arena"))
}

#[test]
fn generators_are_deterministic() {
    assert_eq!(
        gen("uniform-values:n=100", 7).unwrap(),
        gen("uniform-values:n=100", 7).unwrap()
    );
    assert_ne!(
        gen("uniform-values:n=100", 7).unwrap(),
        gen("uniform-values:n=100", 8).unwrap()
    );
}

#[test]
fn halves_generator_counts() {
    let text = gen("halves:n=1000,eps=0.01", 0).unwrap();
    let sizes: Vec<f64> = text.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(sizes.len(), 1000);
    assert_eq!(
        sizes.iter().filter(|&&s| (s - 0.49).abs() < 1e-12).count(),
        500
    );
    assert_eq!(
        sizes.iter().filter(|&&s| (s - 0.51).abs() < 1e-12).count(),
        500
    );
}

#[test]
fn cycle_generator_has_2n_vertices() {
    let text = gen("cycle:n=50", 0).unwrap();
    assert_eq!(text.lines().next().unwrap(), "p 100 100");
}

#[test]
fn unknown_generator_is_a_usage_error() {
    assert!(matches!(gen("nope:n=3", 0), Err(BenchError::Usage(_))));
    assert!(matches!(gen("halves:n=10", 0), Err(BenchError::Usage(_))));
}

#[test]
fn single_trial_summary_echoes_the_row() {
    let (bytes, summary) = run(&cfg("bp-best", "halves:n=100,eps=0.01", 1, 3)).unwrap();
    let rows = rows_of(&bytes);
    assert_eq!(rows.len(), 1);
    let line = summary.lines().find(|l| l.starts_with("ratio")).unwrap();
    assert!(line.contains(&format!("{:.6}", rows[0].ratio)), "{line}");
}

#[test]
fn same_config_gives_identical_bytes() {
    for (alg, inst, order) in [
        ("graph-randthresh", "gnm-graph:v=10,m=30", "ro"),
        ("facloc:f=0.3,requests=20", "euclid-metric:n=8", "ro"),
        ("steiner-iid:requests=10", "euclid-metric:n=6", "iid"),
        ("prophet-sample", "prophet-uniform:n=10", "adv:maxlast"),
    ] {
        let mut c = cfg(alg, inst, 40, 11);
        c.order = Some(order.into());
        c.instances = Some(5);
        let (a, _) = run(&c).unwrap();
        c.jobs = Some(1);
        let (b, _) = run(&c).unwrap();
        c.jobs = Some(3);
        let (d, _) = run(&c).unwrap();
        assert_eq!(a, b, "{alg}");
        assert_eq!(a, d, "{alg}");
        assert_eq!(rows_of(&a).len(), 40);
    }
}

#[test]
fn thirty_seven_percent_success_rate() {
    let mut c = cfg("secretary-37", "uniform-values:n=1000", 200_000, 1);
    c.order = Some("ro".into());
    let (bytes, _) = run(&c).unwrap();
    let rows = rows_of(&bytes);
    let hits = rows
        .iter()
        .filter(|r| {
            r.counters
                .iter()
                .any(|(n, v)| n == "success" && *v == Some(1))
        })
        .count();
    let rate = hits as f64 / rows.len() as f64;
    assert!((rate - 0.368).abs() <= 0.01, "rate {rate}");
}

#[test]
fn enumerate_examples() {
    let dir = tempfile::tempdir().unwrap();
    let three = dir.path().join("three.txt");
    std::fs::write(&three, "2\n9\n4\n").unwrap();
    let r = enumerate("waitpick:m=1", three.to_str().unwrap(), 0, false).unwrap();
    assert_eq!(r.expectation.success_probability, 0.5);
    assert_eq!(r.expectation.orders, 6);

    let four = dir.path().join("four.txt");
    std::fs::write(&four, "0.4\n0.1\n0.3\n0.2\n").unwrap();
    let r = enumerate("waitpick:m=1", four.to_str().unwrap(), 0, true).unwrap();
    assert_eq!(r.sweep.unwrap().1, 1);

    let err = enumerate("secretary-50", "uniform-values:n=11", 0, false).unwrap_err();
    assert!(matches!(
        err,
        BenchError::Core(ro_arena::Error::SizeLimit { .. })
    ));
    assert_eq!(err.exit_code(), 3);
    assert!(enumerate("graph-vperm", "gnm-graph:v=3,m=4", 0, false).is_err());
}

fn write_run(dir: &Path, name: &str, c: &ExperimentConfig) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut c = c.clone();
    c.out = Some(path.clone());
    run(&c).unwrap();
    path
}

#[test]
fn report_pools_trials() {
    let dir = tempfile::tempdir().unwrap();
    let one = write_run(
        dir.path(),
        "one.csv",
        &cfg("bp-next", "uniform-sizes:n=30", 1, 1),
    );
    let table = report_files(&[&one]).unwrap();
    let row = &rows_of(&std::fs::read(&one).unwrap())[0];
    assert_eq!(table.len(), 1);
    assert_eq!(table[0].mean_ratio, row.ratio);
    assert_eq!(table[0].trials, 1);

    let a = write_run(
        dir.path(),
        "a.csv",
        &cfg("bp-first", "uniform-sizes:n=30", 3, 1),
    );
    let b = write_run(
        dir.path(),
        "b.csv",
        &cfg("bp-first", "uniform-sizes:n=30", 9, 2),
    );
    let ra = rows_of(&std::fs::read(&a).unwrap());
    let rb = rows_of(&std::fs::read(&b).unwrap());
    let pooled = report_files(&[&a, &b]).unwrap();
    let want =
        (ra.iter().map(|r| r.ratio).sum::<f64>() + rb.iter().map(|r| r.ratio).sum::<f64>()) / 12.0;
    assert_eq!(pooled[0].trials, 12);
    assert!((pooled[0].mean_ratio - want).abs() < 1e-12);
}

#[test]
fn report_shows_adaptive_regret_falling_with_k() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = [10, 100, 1000]
        .iter()
        .map(|k| {
            write_run(
                dir.path(),
                &format!("k{k}.csv"),
                &cfg(
                    &format!("ksec-adapt:k={k}"),
                    "uniform-values:n=20000",
                    100,
                    4,
                ),
            )
        })
        .collect();
    let table = report_files(&paths).unwrap();
    assert_eq!(table.len(), 3);
    let gaps: Vec<f64> = table.iter().map(|r| r.gap).collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}

#[test]
fn report_rejects_a_wrong_schema() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    std::fs::write(
        &p,
        "# ro-arena csv v1\ntrial,seed,algo,instance,n,alg_objective,oracle_objective,ratio\n",
    )
    .unwrap();
    let err = report_files(&[&p]).unwrap_err().to_string();
    assert!(
        err.contains("'algorithm'") && err.contains("'algo'"),
        "{err}"
    );
    std::fs::write(&p, "trial,seed\n").unwrap();
    assert!(report_files(&[&p])
        .unwrap_err()
        .to_string()
        .contains("ro-arena csv v1"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.json");
    std::fs::write(
        &conf,
        r#"{"alg": "bp-best", "instance": "uniform-sizes:n=20", "trials": 5, "seed": 3}"#,
    )
    .unwrap();
    let out = dir.path().join("o.csv");
    let status = bin()
        .args([
            "run",
            "--config",
            conf.to_str().unwrap(),
            "--trials",
            "2",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    assert_eq!(rows_of(&std::fs::read(&out).unwrap()).len(), 2);
    assert!(String::from_utf8_lossy(&status.stdout).contains("trials     2"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code().unwrap();
    assert_eq!(code(&["gen", "--instance", "cycle:n=3"]), 0);
    assert_eq!(
        code(&["run", "--alg", "nope", "--instance", "cycle:n=3"]),
        2
    );
    assert_eq!(
        code(&[
            "run",
            "--alg",
            "match-sap",
            "--instance",
            "cycle:n=3",
            "--order",
            "sideways"
        ]),
        2
    );
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(
        code(&[
            "run",
            "--alg",
            "match-sap",
            "--instance",
            "uniform-values:n=3"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "run",
            "--alg",
            "prophet-sample:inner=secretary-37",
            "--instance",
            "prophet-uniform:n=3"
        ]),
        3
    );
    assert_eq!(
        code(&[
            "run",
            "--alg",
            "secretary-50",
            "--instance",
            "does/not/exist.txt"
        ]),
        3
    );
    assert_eq!(
        code(&[
            "enumerate",
            "--alg",
            "secretary-50",
            "--instance",
            "uniform-values:n=11"
        ]),
        3
    );
    assert_eq!(
        BenchError::Core(ro_arena::Error::Solver {
            iterations: 9,
            reason: "cap".into()
        })
        .exit_code(),
        4
    );
}

#[test]
fn failed_run_leaves_no_csv() {
    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("p.txt");
    std::fs::write(&dist, "0.5\n0.5\n").unwrap();
    let out = dir.path().join("o.csv");
    let mut c = cfg("facloc", "euclid-metric:n=5", 3, 0);
    c.dist = Some(dist);
    c.out = Some(out.clone());
    assert!(run(&c).is_err());
    assert!(!out.exists());
    assert!(std::fs::read_dir(dir.path()).unwrap().all(|e| !e
        .unwrap()
        .path()
        .to_string_lossy()
        .ends_with(".partial")));
}

#[test]
fn files_and_generators_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    std::fs::write(
        &path,
        gen("gnm-graph:v=8,m=20", ro_arena::arrival::trial_seed(5, 0)).unwrap(),
    )
    .unwrap();
    let (from_file, _) = run(&cfg("graph-vperm", path.to_str().unwrap(), 10, 5)).unwrap();
    let mut c = cfg("graph-vperm", "gnm-graph:v=8,m=20", 10, 5);
    c.instances = Some(1);
    let (from_gen, _) = run(&c).unwrap();
    let a = rows_of(&from_file);
    let b = rows_of(&from_gen);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(
            (x.alg_objective, x.oracle_objective, x.seed),
            (y.alg_objective, y.oracle_objective, y.seed)
        );
    }
}
