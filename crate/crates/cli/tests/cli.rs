//! End-to-end subcommand behavior through the compiled binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gdpe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gdpe"))
}

fn run(args: &[&str]) -> Output {
    gdpe().args(args).output().expect("binary runs")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gdpe-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn ebh_worked_example_to_stdout() {
    let dir = tmp_dir("ebh");
    let input = dir.join("four.csv");
    write(&input, "evalue\n10\n9\n1\n0.1\n");
    let out = run(&["ebh", "--alpha", "0.5", "--in", input.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("k_star,2\n"), "{text}");
    assert!(text.contains("rejected,0\n"));
    assert!(text.contains("rejected,1\n"));
}

#[test]
fn ebh_retains_file_indices() {
    let dir = tmp_dir("ebh-idx");
    let input = dir.join("labeled.csv");
    write(&input, "index,evalue\nsnpA,10\nsnpB,9\nsnpC,1\nsnpD,0.1\n");
    let out = run(&["ebh", "--alpha", "0.5", "--in", input.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("rejected,snpA"));
    assert!(text.contains("rejected,snpB"));
}

#[test]
fn privatize_then_ebh_pipeline() {
    let dir = tmp_dir("pipeline");
    let input = dir.join("in.csv");
    let mid = dir.join("private.csv");
    let fin = dir.join("report.csv");
    write(&input, "evalue\n50\n0.5\n1.5\n0\n");
    let out = run(&[
        "privatize",
        "--mu",
        "1.0",
        "--delta",
        "0.1",
        "--seed",
        "7",
        "--in",
        input.to_str().unwrap(),
        "--out",
        mid.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let mid_text = read(&mid);
    assert!(mid_text.starts_with("index,evalue\n"));
    // zero stays zero under the multiplicative mechanism
    assert!(mid_text.lines().any(|l| l == "3,0"));
    assert!(mid.with_file_name("private.csv.manifest").exists());

    let out = run(&[
        "ebh",
        "--alpha",
        "0.2",
        "--in",
        mid.to_str().unwrap(),
        "--out",
        fin.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(read(&fin).starts_with("k_star,"));
}

#[test]
fn peel_fixed_and_adaptive_outputs() {
    let dir = tmp_dir("peel");
    let input = dir.join("es.csv");
    let mut text = String::from("evalue\n");
    for i in 0..40 {
        text.push_str(&format!("{}\n", if i < 4 { 100.0 } else { 0.5 }));
    }
    write(&input, &text);

    let fixed_out = dir.join("fixed.csv");
    let out = run(&[
        "peel",
        "--mode",
        "fixed",
        "--s",
        "8",
        "--mu",
        "1.0",
        "--delta",
        "0.01",
        "--seed",
        "3",
        "--in",
        input.to_str().unwrap(),
        "--out",
        fixed_out.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = read(&fixed_out);
    let nonzero = body.lines().skip(1).filter(|l| !l.ends_with(",0")).count();
    assert_eq!(nonzero, 8, "{body}");

    let adaptive_out = dir.join("adaptive.csv");
    let out = run(&[
        "peel",
        "--mode",
        "adaptive",
        "--s-min",
        "4",
        "--mu",
        "1.0",
        "--mu0",
        "0.1",
        "--delta",
        "0.01",
        "--alpha",
        "0.1",
        "--seed",
        "3",
        "--in",
        input.to_str().unwrap(),
        "--out",
        adaptive_out.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let manifest = read(&adaptive_out.with_file_name("adaptive.csv.manifest"));
    assert!(manifest.contains("arg.chosen_s,"), "{manifest}");
    assert!(manifest.contains("arg.margin.4,"), "{manifest}");
}

#[test]
fn peel_mode_flag_validation() {
    let dir = tmp_dir("peel-val");
    let input = dir.join("es.csv");
    write(&input, "evalue\n1\n2\n");
    let out = run(&[
        "peel",
        "--mode",
        "fixed",
        "--mu",
        "1.0",
        "--delta",
        "0.01",
        "--seed",
        "3",
        "--in",
        input.to_str().unwrap(),
        "--out",
        dir.join("x.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("--s"), "{err}");
}

#[test]
fn simulate_single_small_run() {
    let dir = tmp_dir("sim");
    let out_path = dir.join("rows.csv");
    let out = run(&[
        "simulate",
        "--experiment",
        "single",
        "--trials",
        "200",
        "--log10-delta-grid",
        "-2,-1",
        "--seed",
        "11",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = read(&out_path);
    assert!(body.starts_with("method,sweep_param,sweep_value,metric,value,se,trials,seed\n"));
    assert_eq!(body.lines().count(), 1 + 12, "{body}");
    assert!(body.contains("calibrated_private,log10_delta,-2,power,"));
}

#[test]
fn simulate_multi_small_run_with_sweep() {
    let dir = tmp_dir("sim-multi");
    let out_path = dir.join("rows.csv");
    let out = run(&[
        "simulate",
        "--experiment",
        "multi-corr",
        "--m",
        "120",
        "--m1",
        "4",
        "--s",
        "12",
        "--s-min",
        "4",
        "--trials",
        "8",
        "--sweep",
        "eta",
        "--sweep-grid",
        "3,5",
        "--seed",
        "13",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let body = read(&out_path);
    // 2 grid points x 4 methods x {fdr, ap}
    assert_eq!(body.lines().count(), 1 + 16, "{body}");
    let manifest = read(&out_path.with_file_name("rows.csv.manifest"));
    assert!(manifest.contains("arg.rho,0.3"), "{manifest}");
}

#[test]
fn explicit_flags_override_paper_scale() {
    let dir = tmp_dir("sim-scale");
    let out_path = dir.join("rows.csv");
    let out = run(&[
        "simulate",
        "--experiment",
        "multi-indep",
        "--paper-scale",
        "--m",
        "100",
        "--m1",
        "3",
        "--s",
        "10",
        "--s-min",
        "4",
        "--trials",
        "3",
        "--seed",
        "19",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest = read(&out_path.with_file_name("rows.csv.manifest"));
    assert!(manifest.contains("arg.m,100"), "{manifest}");
    assert!(manifest.contains("arg.trials,3"), "{manifest}");
}

#[test]
fn audit_selection_csv_shape() {
    let dir = tmp_dir("audit");
    let out_path = dir.join("audit.csv");
    let out = run(&[
        "audit-selection",
        "--noise",
        "gumbel",
        "--n-grid",
        "10,100",
        "--gamma",
        "0.49",
        "--mu",
        "0.7071067811865476",
        "--trials",
        "2000",
        "--seed",
        "17",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = read(&out_path);
    assert!(body.starts_with("noise,n,p_error,se,g_mu_at_p,violation\n"));
    assert_eq!(body.lines().count(), 3);
    assert!(body.contains("gumbel,10,"));
}

#[test]
fn gwas_pipeline_and_validation() {
    let dir = tmp_dir("gwas");
    let input = dir.join("sumstats.tsv");
    let mut text = String::from("snp_id\tz\n");
    for i in 0..200 {
        let z = if i % 40 == 0 { 6.5 } else { 0.1 };
        text.push_str(&format!("rs{i}\t{z}\n"));
    }
    write(&input, &text);
    let out_path = dir.join("disc.csv");
    let out = run(&[
        "gwas",
        "--in",
        input.to_str().unwrap(),
        "--alpha-grid",
        "0.01,0.05",
        "--mu",
        "0.25",
        "--delta",
        "0.005",
        "--s",
        "20",
        "--s-min",
        "5",
        "--seed",
        "23",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let body = read(&out_path);
    assert_eq!(body.lines().count(), 1 + 8, "{body}");
    assert!(body.contains("nonprivate_ebh,alpha,0.01,discoveries,"));

    // duplicate snp id fails validation before any computation
    let bad = dir.join("dup.tsv");
    write(&bad, "snp_id\tz\nrs1\t1.0\nrs1\t2.0\n");
    let out = run(&[
        "gwas",
        "--in",
        bad.to_str().unwrap(),
        "--alpha-grid",
        "0.05",
        "--mu",
        "0.25",
        "--delta",
        "0.005",
        "--s",
        "1",
        "--seed",
        "23",
        "--out",
        dir.join("never.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.join("never.csv").exists());
}

#[test]
fn validation_rejects_before_compute() {
    let dir = tmp_dir("precheck");
    let input = dir.join("neg.csv");
    write(&input, "evalue\n1\n-3\n");
    let out_path = dir.join("out.csv");
    let out = run(&[
        "privatize",
        "--mu",
        "1.0",
        "--delta",
        "0.1",
        "--seed",
        "7",
        "--in",
        input.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("row 3"), "{err}");
    assert!(!out_path.exists());
}

#[test]
fn io_errors_exit_two() {
    let out = run(&[
        "privatize",
        "--mu",
        "1.0",
        "--delta",
        "0.1",
        "--seed",
        "7",
        "--in",
        "/nonexistent/in.csv",
        "--out",
        "/nonexistent/out.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_prints_usage_to_stderr() {
    let out = run(&[
        "calibrate",
        "--alpha",
        "0.05",
        "--mu",
        "0.25",
        "--bogus",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.to_lowercase().contains("usage"), "{err}");
}

#[test]
fn calibrate_prints_expected_keys_in_order() {
    let out = run(&[
        "calibrate",
        "--alpha",
        "0.05",
        "--mu",
        "0.25",
        "--delta",
        "0.005",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let keys: Vec<&str> = text.lines().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(
        keys,
        vec![
            "z_star",
            "c_star",
            "branch",
            "g_max",
            "x_opt",
            "shift_neg_prob"
        ]
    );
    assert!(text.contains("branch,markov_like"));
}

#[test]
fn output_floats_round_trip() {
    let dir = tmp_dir("roundtrip");
    let input = dir.join("in.csv");
    write(&input, "evalue\n3.141592653589793\n2.718281828459045\n");
    let out_path = dir.join("out.csv");
    let out = run(&[
        "privatize",
        "--mu",
        "0.8",
        "--delta",
        "0.3",
        "--seed",
        "99",
        "--in",
        input.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for line in read(&out_path).lines().skip(1) {
        let v = line.split(',').nth(1).unwrap();
        let parsed: f64 = v.parse().unwrap();
        assert_eq!(parsed.to_string(), v, "float did not round-trip: {v}");
    }
}
