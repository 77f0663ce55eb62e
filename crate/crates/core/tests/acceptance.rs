//! Acceptance checks. Each test prints one PASS/FAIL line and then asserts.

use std::time::{Duration, Instant};

use dwpf_core::harness::{run_suite, CaseRecord, Report, SuiteConfig};

fn seeds(a: u64, b: u64) -> Vec<u64> {
    (a..=b).collect()
}

fn run(suite: &str, seeds: &[u64]) -> (Report, Duration) {
    let start = Instant::now();
    let report = run_suite(suite, seeds, &SuiteConfig::default()).expect("suite runs");
    (report, start.elapsed())
}

fn worst<'a>(cases: impl Iterator<Item = &'a CaseRecord>) -> f64 {
    cases.filter_map(|c| c.max_residual()).fold(0.0, f64::max)
}

fn verdict(name: &str, cases: &[&CaseRecord], elapsed: Duration, budget: Duration) {
    let failures: Vec<_> = cases.iter().filter(|c| !c.pass).collect();
    let in_budget = elapsed <= budget;
    let pass = failures.is_empty() && in_budget && !cases.is_empty();
    println!(
        "[{}] {name}: {} cases, {} failures, max residual {:.3e}, {:.2?} (budget {:?})",
        if pass { "PASS" } else { "FAIL" },
        cases.len(),
        failures.len(),
        worst(cases.iter().copied()),
        elapsed,
        budget,
    );
    for f in failures.iter().take(5) {
        println!(
            "    failed {}: residuals {:?} error {:?}",
            f.case_id, f.residuals, f.error
        );
    }
    assert!(pass, "{name} failed");
}

#[test]
fn five_route_agreement() {
    let (report, elapsed) = run("routes-agree", &seeds(1, 20));
    let cases: Vec<_> = report.cases.iter().filter(|c| c.check == "routes").collect();
    assert_eq!(cases.len(), 80);
    verdict(
        "five-route agreement (N = 1..4, 20 seeds, 1e-10)",
        &cases,
        elapsed,
        Duration::from_secs(30),
    );
}

#[test]
fn restricted_route_agreement() {
    let (report, elapsed) = run("routes-agree", &seeds(1, 20));
    let cases: Vec<_> = report.cases.iter().filter(|c| c.check == "restricted").collect();
    assert_eq!(cases.len(), 160);
    for c in &cases {
        let expected = if c.n >= 7 { 1e-8 } else { 1e-10 };
        assert_eq!(c.tolerance, expected);
        if c.n <= 4 {
            assert!(
                c.comparators.contains_key("brute"),
                "{} lacks the enumeration oracle",
                c.case_id
            );
        }
    }
    verdict(
        "restricted det = product (N = 1..8, oracle for N <= 4, 1e-10 / 1e-8)",
        &cases,
        elapsed,
        Duration::from_secs(10),
    );
}

#[test]
fn korepin_suite() {
    let (report, elapsed) = run("korepin", &seeds(1, 50));
    let cases: Vec<_> = report.cases.iter().collect();
    let symmetry = cases.iter().filter(|c| c.check == "symmetry" && c.n == 4).count();
    assert_eq!(symmetry, 50);
    verdict(
        "corner recursions, row expansion, symmetry, degree, Cauchy factorisation (50 seeds)",
        &cases,
        elapsed,
        Duration::from_secs(20),
    );
}

#[test]
fn homogeneous_and_toda() {
    let (report, elapsed) = run("toda", &seeds(1, 5));
    let cases: Vec<_> = report.cases.iter().collect();
    assert_eq!(cases.iter().filter(|c| c.check == "homogeneous").count(), 25);
    assert_eq!(cases.iter().filter(|c| c.check == "toda").count(), 10);
    verdict(
        "homogeneous closed form (N = 1..5) and 2-Toda (N = 2, 3) at 5 points, 1e-8",
        &cases,
        elapsed,
        Duration::from_secs(5),
    );
}

#[test]
fn bethe_identity_suite() {
    let (report, elapsed) = run("bethe-identities", &seeds(1, 20));
    let cases: Vec<_> = report.cases.iter().collect();
    verdict(
        "twisted closed forms, operator recursions, Bethe recursion, partition of unity (20 seeds)",
        &cases,
        elapsed,
        Duration::from_secs(60),
    );
}

#[test]
fn configuration_counts() {
    let (report, elapsed) = run("counting", &[0]);
    let counts: Vec<_> = report
        .cases
        .iter()
        .filter(|c| c.check == "count")
        .map(|c| c.value.expect("count value")[0] as u64)
        .collect();
    assert_eq!(counts, vec![1, 2, 7, 42, 429]);
    let cases: Vec<_> = report.cases.iter().collect();
    verdict(
        "configuration counts 1, 2, 7, 42, 429",
        &cases,
        elapsed,
        Duration::from_secs(5),
    );
}

#[test]
fn reports_are_reproducible() {
    let suites = ["routes-agree", "korepin", "bethe-identities", "toda", "counting"];
    let mut mismatches = Vec::new();
    let start = Instant::now();
    for suite in suites {
        let outputs: Vec<String> = [Some(1), Some(1), Some(4), None]
            .into_iter()
            .map(|threads| {
                let config = SuiteConfig {
                    threads,
                    ..SuiteConfig::default()
                };
                run_suite(suite, &seeds(1, 6), &config)
                    .expect("suite runs")
                    .without_timings()
                    .to_json_lines()
            })
            .collect();
        if outputs.iter().any(|o| o != &outputs[0]) {
            mismatches.push(suite);
        }
    }
    let pass = mismatches.is_empty();
    println!(
        "[{}] reproducible reports (two runs at 1 thread, 4 threads, default pool; timings excluded): {} suites, {:.2?}{}",
        if pass { "PASS" } else { "FAIL" },
        suites.len(),
        start.elapsed(),
        if pass { String::new() } else { format!(", mismatched: {mismatches:?}") },
    );
    assert!(pass);
}
