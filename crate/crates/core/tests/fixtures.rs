use std::time::Instant;

use rigscan::oracle::{exact_scan_cdf, exact_scan_cdf_dp, parse_fixtures, Budget, OracleError};
use rigscan::scan::scan_cdf;
use rigscan::{Fallback, Strong};

const FIXTURES: &str = include_str!("fixtures/oracle.tsv");

#[test]
fn oracles_reproduce_fixture_values() {
    let b = Budget::default();
    for f in parse_fixtures(FIXTURES).unwrap() {
        let chain = f.chain().unwrap();
        assert_eq!(exact_scan_cdf_dp(&chain, f.ell, f.t, &b).unwrap(), f.value, "{f}");
        match exact_scan_cdf(&chain, f.ell, f.t, &b) {
            Ok(v) => assert_eq!(v, f.value, "{f}"),
            Err(OracleError::CompositionBudget { .. }) => {}
            Err(e) => panic!("{f}: {e}"),
        }
    }
}

#[test]
fn intervals_contain_fixture_values() {
    for f in parse_fixtures(FIXTURES).unwrap() {
        let chain = f.chain().unwrap();
        let start = Instant::now();
        let strong = scan_cdf::<Strong<f64>>(&chain, f.ell, f.t).unwrap();
        let elapsed = start.elapsed();
        assert!(strong.contains(&f.value), "{f}: {strong}");
        assert!(elapsed.as_secs_f64() < 1.0, "{f}: {elapsed:?}");
        let fallback = scan_cdf::<Fallback<f64>>(&chain, f.ell, f.t).unwrap();
        assert!(fallback.contains(&f.value), "{f}: {fallback}");
    }
}

#[test]
fn fixture_lines_round_trip() {
    let lines: Vec<&str> = FIXTURES.lines().filter(|l| !l.starts_with('#')).collect();
    let parsed = parse_fixtures(FIXTURES).unwrap();
    assert_eq!(lines.len(), parsed.len());
    for (line, f) in lines.iter().zip(&parsed) {
        assert_eq!(*line, f.to_string());
    }
}
