use std::process::{Command, Output};

fn mcgs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcgs")).args(args).env_remove("MCGS_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn gate_lines(qasm: &str) -> Vec<&str> {
    qasm.lines().filter(|l| !l.starts_with("OPENQASM") && !l.starts_with("include") && !l.starts_with("qubit")).collect()
}

#[test]
fn synth_two_controls_is_one_toffoli() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.qasm");
    let o = mcgs(&["synth", "--n", "2", "--method", "linear", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(gate_lines(&text), ["ccx q[0], q[1], q[2];"]);
    assert!(stdout(&o).contains("abstract_depth=1"));
}

#[test]
fn synth_auto_above_cutover_is_recursive() {
    let auto = mcgs(&["synth", "--n", "52", "--method", "auto"]);
    let opt = mcgs(&["synth", "--n", "52", "--method", "optimized"]);
    assert!(auto.status.success());
    let metrics = |o: &Output| stdout(o).lines().last().unwrap().split_once(' ').unwrap().1.split_once(' ').unwrap().1.to_string();
    assert_eq!(metrics(&auto), metrics(&opt));
    assert_eq!(gate_lines(&stdout(&auto)).len(), gate_lines(&stdout(&opt)).len());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["synth", "--n", "0"][..],
        &["synth", "--n", "4", "--method", "quantum"],
        &["synth", "--n", "40", "--base-threshold", "2"],
        &["analyze", "exponent", "--terms", "4:2,"],
        &["verify", "--n", "3", "--mode", "psychic"],
        &["verify", "su2", "--n", "11", "--theta", "0.1"],
        &["bench", "--range", "10:5:2"],
        &["frobnicate"],
    ] {
        assert_eq!(mcgs(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verify_exhaustive_and_sampled() {
    let o = mcgs(&["verify", "--n", "8", "--method", "optimized", "--mode", "exhaustive"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("PASS mode=exhaustive checked=1024"), "{}", stdout(&o));
    let o = mcgs(&["verify", "--n", "60", "--method", "original", "--samples", "200"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("mode=sampled"));
}

#[test]
fn seed_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_mcgs"))
        .args(["verify", "--n", "20", "--samples", "10"])
        .env("MCGS_SEED", "0x2a")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("seed=0x2a"), "{}", stdout(&o));
}

#[test]
fn verify_rotations() {
    let o = mcgs(&["verify", "su2", "--n", "6", "--theta", "0.9"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = mcgs(&["verify", "u2", "--n", "5", "--theta", "-0.7", "--phi", "0.2", "--gamma", "0.4", "--epsilon", "1e-3"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("steps="));
}

#[test]
fn analyze_outputs() {
    assert_eq!(stdout(&mcgs(&["analyze", "exponent", "--terms", "4:2,12:4,60:8"])).trim(), "2.799442");
    assert_eq!(stdout(&mcgs(&["analyze", "exponent", "--terms", "8:2"])).trim(), "3.000000");
    let o = mcgs(&["analyze", "crossover", "--a", "optimized", "--b", "linear", "--metric", "lowered_depth", "--max", "60"]);
    assert!(o.status.success());
    assert!(stdout(&o).trim().parse::<usize>().is_ok(), "{}", stdout(&o));
    let o = mcgs(&["analyze", "predict", "--n", "100", "--base-threshold", "16"]);
    assert!(stdout(&o).trim().parse::<usize>().unwrap() > 0);
}

#[test]
fn bench_rows_are_sorted_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let svg = dir.path().join(format!("{name}.svg"));
        let o = mcgs(&["bench", "--n", "128,64,256", "--csv", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
        assert!(o.status.success());
        assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<polyline").count(), 3);
        std::fs::read_to_string(csv).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "n,method,abstract_depth,lowered_depth,cx_count,total_gates,ancillas,seed,wall_ms");
    assert_eq!(lines.len(), 10);
    let cells = |l: &str| l.split(',').map(str::to_string).collect::<Vec<_>>();
    let keys: Vec<(usize, String)> = lines[1..].iter().map(|l| (cells(l)[0].parse().unwrap(), cells(l)[1].clone())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    for n in ["64", "128", "256"] {
        let depth = |m: &str| -> usize {
            let row = lines.iter().map(|l| cells(l)).find(|c| c[0] == n && c[1] == m).unwrap();
            row[3].parse().unwrap()
        };
        assert!(depth("optimized") < depth("original"), "n={n}");
    }
}

#[test]
fn bench_crossover_rows_keep_the_schema() {
    let o = mcgs(&["bench", "--range", "20:80:1.5", "--crossovers"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| l.contains("crossover:")).collect();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert_eq!(r.split(',').count(), 9);
    }
}
