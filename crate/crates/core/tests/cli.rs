//! The `strix` binary: outputs, determinism and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use strix::report::{Report, Rows, Status};
use strix::tfhe::{ParamSet, TfheParams};

fn strix(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_strix"));
    cmd.args(args).env_remove(strix::cli::OUT_DIR_ENV);
    if let Some(d) = out_dir {
        cmd.env(strix::cli::OUT_DIR_ENV, d);
    }
    cmd.output().expect("binary runs")
}

fn report(out: &Output) -> Report {
    Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

#[test]
fn microbench_set_one_row() {
    let out = strix(&["microbench", "--param-set", "I"], None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.status, Status::Pass);
    let Rows::Microbench(rows) = r.rows else {
        panic!("wrong rows")
    };
    assert_eq!(rows.len(), 1);
    assert!((rows[0].pbs_throughput_per_s / 74_696.0 - 1.0).abs() <= 0.10);
}

#[test]
fn sweep_set_default_pairs() {
    let out = strix(&["sweep", "--param-set", "IV"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    let Rows::Sweep(rows) = r.rows else {
        panic!("wrong rows")
    };
    assert_eq!(rows.len(), 5);
    assert_eq!(r.checks.len(), 6);
    assert!(r.checks.iter().all(|c| c.passed));
}

#[test]
fn selftest_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = strix(
            &["selftest", "--seed", "42", "--trials", "4", "--out", path.to_str().unwrap()],
            None,
        );
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    let r = Report::from_json(std::str::from_utf8(&a).unwrap()).unwrap();
    assert_eq!(r.seed, Some(42));
}

#[test]
fn default_output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = strix(&["nn", "--format", "csv"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("nn.csv")).unwrap();
    assert!(text.starts_with("model,pbs_count,levels,time_s\nNN-20,2588,20,"));
}

#[test]
fn trace_as_csv() {
    let out = strix(&["microbench", "--param-set", "I", "--trace", "--format", "csv"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("iteration,unit,start_cycle,busy_cycles"));
    assert!(lines.next().unwrap().starts_with("0,rotator,"));
}

#[test]
fn folding_and_bandwidth_flags_change_the_model() {
    let base = report(&strix(&["microbench", "--param-set", "I"], None));
    let off = report(&strix(&["microbench", "--param-set", "I", "--folding", "off"], None));
    let (Rows::Microbench(a), Rows::Microbench(b)) = (base.rows, off.rows) else {
        panic!("wrong rows")
    };
    assert!((a[0].pbs_throughput_per_s / b[0].pbs_throughput_per_s - 2.0).abs() < 0.01);
    // reference checks only apply to the default configuration
    assert!(off.checks.is_empty());
    let slow = report(&strix(&["microbench", "--param-set", "IV", "--bandwidth-cap", "50"], None));
    let Rows::Microbench(s) = slow.rows else { panic!("wrong rows") };
    assert!(s[0].pbs_throughput_per_s < 1000.0);
}

#[test]
fn configuration_errors_exit_two_with_record() {
    let out = strix(&["microbench", "--param-set", "VII"], None);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r.status, Status::Error);
    assert_eq!(r.error.unwrap().kind, "invalid_parameter");

    let dir = tempfile::tempdir().unwrap();
    let arch = dir.path().join("arch.json");
    std::fs::write(&arch, r#"{"TvLP": 8, "local_spm_bytes": 1024}"#).unwrap();
    let out = strix(&["microbench", "--arch-config", arch.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out).error.unwrap().kind, "unsatisfiable");

    assert_eq!(strix(&["bogus"], None).status.code(), Some(2));
    assert_eq!(strix(&["sweep", "--bandwidth-cap", "0"], None).status.code(), Some(2));
}

#[test]
fn tolerance_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("noisy.json");
    let noisy = TfheParams {
        name: Some("noisy".into()),
        lwe_noise_std: 0.2,
        ..ParamSet::I.params()
    };
    std::fs::write(&params, noisy.to_json()).unwrap();
    let out = strix(
        &["gates", "--param-set", params.to_str().unwrap(), "--trials", "3", "--seed", "1"],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out).status, Status::Fail);
}
