use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alpha-selfaction"))
        .args(args)
        .env_remove("ALPHA_SELFACTION_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SUBCOMMANDS: [&str; 9] = [
    "series",
    "check-coefficients",
    "products",
    "densities",
    "moments",
    "beta",
    "alpha",
    "refine",
    "fig1",
];

#[test]
fn check_coefficients_matches_everything() {
    let o = run(&["check-coefficients", "--order", "2", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for label in ["F0", "G1", "F1", "G2", "g0", "f1", "g1"] {
        assert!(text.contains(&format!("iterate  {label}")), "{label}");
    }
    assert!(!text.contains("mismatch"));
    assert!(text.ends_with("all matched\n"));
}

#[test]
fn alpha_root_near_printed_value() {
    let o = run(&["alpha", "--mode", "eq64", "--bracket", "0.005", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    let alpha: f64 = row[1].parse().unwrap();
    assert!((alpha - 0.007292).abs() < 1e-5, "{alpha}");
}

#[test]
fn fig1_writes_requested_rows() {
    let dir = std::env::temp_dir().join(format!("alpha-selfaction-fig1-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fig1.csv");
    let o = run(&["fig1", "--alpha", "0.0072976", "--samples", "512", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("s,F,G,f,g,Gg,Ff"));
    assert_eq!(lines.count(), 512);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn every_subcommand_emits_json() {
    for cmd in SUBCOMMANDS {
        let o = run(&[cmd, "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{cmd}: {e}"));
        assert!(!v.is_null(), "{cmd}");
    }
}

#[test]
fn output_is_identical_across_thread_counts() {
    for args in [&["refine"][..], &["fig1", "--samples", "64"], &["densities"], &["verify", "--format", "text"]] {
        let one = run(&[args, &["--threads", "1"]].concat());
        let four = run(&[args, &["--threads", "4"]].concat());
        let again = run(&[args, &["--threads", "4"]].concat());
        assert_eq!(one.stdout, four.stdout, "{args:?}");
        assert_eq!(four.stdout, again.stdout, "{args:?}");
    }
}

#[test]
fn threads_fall_back_to_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_alpha-selfaction"))
        .args(["beta"])
        .env("ALPHA_SELFACTION_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_alpha-selfaction"))
        .args(["beta"])
        .env("ALPHA_SELFACTION_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_reports_each_check_in_order() {
    let o = run(&["verify", "--format", "text"]);
    let text = stdout(&o);
    let ids: Vec<usize> = text
        .lines()
        .filter(|l| l.starts_with('['))
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ids, (1..=9).collect::<Vec<_>>());
    let all_pass = text.lines().filter(|l| l.starts_with('[')).all(|l| l.starts_with("[PASS]"));
    assert_eq!(o.status.code(), Some(if all_pass { 0 } else { 1 }));
}

#[test]
fn usage_errors_exit_two_and_name_the_flag() {
    for args in [
        &["alpha", "--mode", "bogus"][..],
        &["alpha", "--bracket", "0.01", "0.005"],
        &["series", "--order", "two"],
        &["series", "--mode", "closed"],
        &["fig1", "--format", "xml"],
        &["nonsense"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains("error"), "{args:?}: {err}");
    }
    let err = String::from_utf8_lossy(&run(&["series", "--order", "two"]).stderr).to_string();
    assert!(err.contains("--order"), "{err}");
}

#[test]
fn csv_numbers_carry_twelve_significant_digits() {
    let out = stdout(&run(&["beta"]));
    let row = out.lines().nth(1).unwrap();
    for cell in row.split(',') {
        let mantissa = cell.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.replace('.', "").len(), 12, "{cell}");
    }
}

#[test]
fn mode_selects_a_single_beta() {
    let out = stdout(&run(&["beta", "--mode", "asymptotic", "--alpha", "0.004"]));
    let v: f64 = out.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(v, 2e-6);
}
