use std::process::{Command, Output};

use dartline::exactmath::{parse_rat, Rat};
use num_traits::{One, ToPrimitive};

fn dartline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dartline"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = dartline(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Tab-separated data rows, skipping the comment and header lines.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(2)
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

#[test]
fn length_two_players() {
    let r = rows(&stdout(&["length", "--players", "2", "--max-throws", "3"]));
    let got: Vec<(&str, &str)> = r.iter().map(|v| (v[0].as_str(), v[1].as_str())).collect();
    assert_eq!(
        got,
        [("1", "0/1"), ("2", "1/2"), ("3", "1/3"), ("tail", "1/6")]
    );
}

#[test]
fn length_trivial_cases() {
    let r = rows(&stdout(&["length", "--players", "1"]));
    assert_eq!(r[0][..2], ["0", "1/1"]);
    assert_eq!(r[1][..2], ["tail", "0/1"]);
    let r = rows(&stdout(&[
        "length",
        "--players",
        "3",
        "--max-throws",
        "2",
        "--x",
        "0",
    ]));
    assert_eq!(r[0][..2], ["2", "1/1"]);
    assert_eq!(r.len(), 2);
}

#[test]
fn length_rows_round_trip_and_sum_to_one() {
    let r = rows(&stdout(&[
        "length",
        "--players",
        "4",
        "--max-throws",
        "12",
        "--x",
        "2/3",
    ]));
    let total: Rat = r.iter().map(|v| parse_rat(&v[1]).unwrap()).sum();
    assert_eq!(total, Rat::one());
}

#[test]
fn malformed_rational_is_a_usage_error() {
    for bad in ["1/0", "abc", "3/2", "-1/4"] {
        let out = dartline(&["length", "--players", "2", "--x", bad]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
    }
    assert_eq!(dartline(&["expected"]).status.code(), Some(2));
    assert_eq!(
        dartline(&["length", "--players", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn expected_lengths() {
    let s = stdout(&["expected", "--players", "4"]);
    assert!(s.contains("47/24 · e ≈ 5.323"), "{s}");
    let s = stdout(&["expected", "--players", "1"]);
    assert!(s.contains("= 0 ≈ 0.000"), "{s}");
    let s = stdout(&["expected", "--players", "2", "--x", "1/2"]);
    assert!(s.contains("1 · e^{1/2} ≈ 1.6487"), "{s}");
}

#[test]
fn winprob_three_players() {
    let r = rows(&stdout(&["winprob", "--players", "3", "--terms", "50"]));
    let lo: f64 = r[0][1].parse().unwrap();
    let hi: f64 = r[0][2].parse().unwrap();
    // the printed 0.4664928047 is 1.9e-10 below the exact 0.46649280488530...
    assert!(lo <= 0.46649280489 && hi >= 0.46649280488);
    assert!((lo - 0.4664928047).abs() < 1e-9);
}

#[test]
fn winprob_two_players_is_tight() {
    let r = rows(&stdout(&["winprob", "--players", "2", "--terms", "40"]));
    assert_eq!(r.len(), 2);
    for v in &r {
        assert!(v[3].parse::<f64>().unwrap() < 1e-12);
    }
}

#[test]
fn winprob_json_records_cover_one() {
    let s = stdout(&["winprob", "--players", "5", "--terms", "60", "--json"]);
    let recs: Vec<serde_json::Value> = s
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(recs.len(), 5);
    let exact = |v: &serde_json::Value, key: &str| parse_rat(v[key].as_str().unwrap()).unwrap();
    let lo: Rat = recs.iter().map(|r| exact(r, "lo_exact")).sum();
    let hi: Rat = recs.iter().map(|r| exact(r, "hi_exact")).sum();
    assert!(lo < Rat::one() && Rat::one() <= hi);
    for (i, r) in recs.iter().enumerate() {
        assert_eq!(r["k"], i + 1);
        assert_eq!(r["p"], 5);
        assert_eq!(r["x"], "1/1");
        assert!(r["lo"].as_str().unwrap() <= r["hi"].as_str().unwrap());
        assert!(r["width"].as_str().unwrap().parse::<f64>().unwrap() >= 0.0);
    }
}

#[test]
fn winprob_warns_when_uncertified() {
    let out = dartline(&["winprob", "--players", "5", "--terms", "5"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let out = dartline(&["winprob", "--players", "5"]);
    assert!(out.stderr.is_empty());
}

#[test]
fn curve_five_players() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p5.csv");
    stdout(&[
        "curve",
        "--players",
        "5",
        "--samples",
        "100",
        "--out",
        path.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,k,lo,hi"));
    let data: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(data.len(), 505);
    for row in &data[..5] {
        assert_eq!(row[0], "0/1");
        let want = if row[1] == "5" {
            "1.000000000000000"
        } else {
            "0.000000000000000"
        };
        assert_eq!((row[2], row[3]), (want, want));
    }
    let last = &data[500..];
    assert!(last.iter().all(|r| r[0] == "1/1"));
    let lo: Vec<f64> = last.iter().map(|r| r[2].parse().unwrap()).collect();
    let hi: Vec<f64> = last.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(
        (1..5).all(|k| lo[k - 1] > hi[k]),
        "k = 1 highest, strictly ordered"
    );
    assert!((lo[0] - 0.308874519649).abs() < 1e-12);
    assert_eq!(data[5][0], "1/100");
}

#[test]
fn curve_unwritable_path_is_io_error() {
    let out = dartline(&[
        "curve",
        "--players",
        "2",
        "--samples",
        "4",
        "--out",
        "/nonexistent/dir/c.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn simulate_two_players() {
    let r = rows(&stdout(&[
        "simulate",
        "--players",
        "2",
        "--games",
        "1000000",
        "--seed",
        "11",
    ]));
    let freq: f64 = r[0][2].parse().unwrap();
    let se: f64 = r[0][3].parse().unwrap();
    assert!((freq - 0.6321205588).abs() < 4.0 * se, "{freq} ± {se}");
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "simulate",
        "--players",
        "3",
        "--games",
        "20000",
        "--seed",
        "5",
    ];
    let a = dartline(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_dartline"))
        .args(args)
        .env("DARTLINE_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, dartline(&args).stdout);
    let r = rows(&stdout(&["simulate", "--players", "1", "--games", "10"]));
    assert_eq!(r[0][..3], ["1", "10", "1.000000"]);
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_dartline"))
        .args(["expected", "--players", "2"])
        .env("DARTLINE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn count_matches_stirling_total() {
    let r = rows(&stdout(&["count", "-n", "6", "--players", "3"]));
    let total: u64 = r.iter().map(|v| v[1].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 50);
    assert!(r.iter().all(|v| v[1] == v[2]));
    // beyond the enumeration budget only the recurrence is shown
    let r = rows(&stdout(&["count", "-n", "14", "--players", "4"]));
    assert!(r.iter().all(|v| v[2] == "-"));
}

#[test]
fn verify_suites() {
    for suite in ["tables", "gf", "injections", "stirling"] {
        let s = stdout(&["verify", "--suite", suite]);
        assert!(
            s.contains("all checks passed") && !s.contains("FAIL"),
            "{s}"
        );
    }
    assert_eq!(
        dartline(&["verify", "--suite", "bogus"]).status.code(),
        Some(2)
    );
}

#[test]
fn exact_values_round_trip() {
    let s = stdout(&["expected", "--players", "9"]);
    let m = s
        .lines()
        .find_map(|l| l.strip_prefix("multiplier\t"))
        .unwrap();
    assert_eq!(
        parse_rat(m).unwrap(),
        Rat::new(2614099.into(), 645120.into())
    );
    assert!(parse_rat(m).unwrap().to_f64().is_some());
}
