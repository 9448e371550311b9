//! Smoke tests for every verification suite: small budgets, zero
//! failures, zero unknowns, reproducible reports, and a sensitivity check
//! through the mutation hooks.

use fcw_core::verify::{run_suite, suite_ids, SuiteParams};

fn params(m: i64, r: u32) -> SuiteParams {
    SuiteParams { m, r, jobs: 1, corrupt: false }
}

#[test]
fn every_suite_passes_at_smoke_scale() {
    for &id in suite_ids() {
        let p = params(1, 2);
        let report = run_suite(id, &p, 24, 7).unwrap_or_else(|e| panic!("{id}: {e}"));
        assert_eq!(report.fail, 0, "{id}: {:#?}", report.counterexamples);
        assert_eq!(report.unknown, 0, "{id}: {:#?}", report.counterexamples);
        assert_eq!(report.pass, report.samples);
        assert!(report.ok());
    }
}

#[test]
fn reports_are_reproducible_across_thread_counts() {
    for &id in ["lemma43", "lemma51", "remark48"].iter() {
        let serial = run_suite(id, &params(0, 2), 30, 42).unwrap();
        let parallel = run_suite(id, &SuiteParams { m: 0, r: 2, jobs: 4, corrupt: false }, 30, 42)
            .unwrap();
        assert_eq!(
            serial.without_timing(),
            parallel.without_timing(),
            "{id} must not depend on the thread count"
        );
        let again = run_suite(id, &params(0, 2), 30, 42).unwrap();
        assert_eq!(
            serial.without_timing().to_json(),
            again.without_timing().to_json(),
            "{id} must be byte-reproducible"
        );
    }
}

#[test]
fn different_seeds_draw_different_samples() {
    let a = run_suite("lemma43", &params(0, 1), 40, 1).unwrap();
    let b = run_suite("lemma43", &params(0, 1), 40, 2).unwrap();
    // both pass, but they are genuinely different runs
    assert!(a.ok() && b.ok());
    assert_eq!(a.samples, b.samples);
}

#[test]
fn corrupted_constructions_make_suites_fail() {
    // dropping all but the first part from the intersection
    let mut p = params(0, 2);
    p.corrupt = true;
    let report = run_suite("lemma43", &p, 40, 11).unwrap();
    assert!(report.fail > 0, "the corrupted intersection must be caught");
    assert!(!report.counterexamples.is_empty());

    // misdeclaring the trapped stream by one index
    let mut p = params(1, 2);
    p.corrupt = true;
    let report = run_suite("lemma51", &p, 60, 11).unwrap();
    assert!(report.fail > 0, "the shifted tail stream must be caught");

    let mut p = params(1, 2);
    p.corrupt = true;
    let report = run_suite("example54", &p, 40, 11).unwrap();
    assert!(report.fail > 0, "the shifted two-sided stream must be caught");
}

#[test]
fn unknown_suites_are_rejected() {
    assert!(run_suite("lemma99", &params(0, 1), 1, 1).is_err());
}
