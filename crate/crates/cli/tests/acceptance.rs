//! Acceptance suite: one test per criterion, each printing its own
//! pass/fail line. Budgets and tolerances are pinned here, in code.

use guekdv_cli::backend::MapBackend;
use guekdv_cli::hp::HpCtx;
use guekdv_cli::limit::{convergence_report, identity_demo, Parity};
use guekdv_cli::verify;
use guekdv_core::rat::Rat;
use guekdv_core::report::ResidualReport;
use guekdv_core::sseries::SBudget;
use guekdv_core::witten::{WittenBudget, WittenTable};

const THREADS: usize = 2;

fn assert_all_ok(criterion: &str, reports: &[ResidualReport]) {
    let checked: usize = reports.iter().map(|r| r.checked).sum();
    let failures: usize = reports.iter().map(|r| r.failures.len()).sum();
    for r in reports {
        assert!(
            r.ok(),
            "{criterion}: {} has {} failures, first: {:?}",
            r.name,
            r.failures.len(),
            r.failures.first()
        );
    }
    assert!(checked > 0, "{criterion}: nothing was checked");
    println!("{criterion}: PASS ({checked} coefficients checked, {failures} failures)");
}

#[test]
fn criterion_01_closed_forms_match_oracle() {
    // Catalan one-point for j <= 7 and the two-point genus-0 closed forms
    // (both parities) for |i| <= 12, exact equality against the Wick
    // oracle.
    let reports = verify::closed_forms(THREADS).expect("suite runs");
    assert_all_ok("criterion 01 (closed forms vs oracle)", &reports);
}

#[test]
fn criterion_02_dilation_identity() {
    // residual 0 for every index multiset with |i| <= 12, all admissible
    // genera.
    let reports = verify::dilation(THREADS).expect("suite runs");
    assert_all_ok("criterion 02 (dilation identity)", &reports);
}

#[test]
fn criterion_03_string_and_scaling_pdes() {
    // residuals 0 on the normalized partition function, insertions <= 3,
    // indices <= 8, through eps order 6 (here: exactly).
    let reports = verify::gue_pdes(16, 8, 6, THREADS).expect("suite runs");
    assert_all_ok("criterion 03 (string/scaling PDEs)", &reports);
}

#[test]
fn criterion_04_resolvent_constraints_and_counts() {
    // Lemma-1 constraints exactly to lambda^-12; resolvent-backed
    // one-point counts vs oracle for i <= 14 (all genera), two-point for
    // |i| <= 12.
    let reports = verify::resolvent_suite(THREADS).expect("suite runs");
    assert_all_ok("criterion 04 (matrix resolvent)", &reports);
}

#[test]
fn criterion_05_toda_and_tau_identities_on_gue() {
    // Toda flows 1 and 2 plus the tau identities on (v^G, w^G); the
    // two-point identity on the lambda/mu grid to coefficient orders
    // <= 6, the one-point identity for i >= 1 with the lambda^-1
    // coefficient reported separately.
    let reports = verify::toda_suite(16, 8, 8, 6, THREADS).expect("suite runs");
    assert_all_ok("criterion 05 (Toda flows and tau identities)", &reports);
    let taun2 = reports
        .iter()
        .find(|r| r.name == "taun2")
        .expect("taun2 report present");
    assert!(
        taun2.notes.iter().any(|n| n.contains("lambda^-1")),
        "criterion 05: lambda^-1 coefficient must be separately reported"
    );
}

#[test]
fn criterion_06_initial_data_consistency() {
    // w^G(x, 0; eps) = x through eps^10 and v^G(x, 0; eps) = 0.
    let f = verify::build_free_energy(SBudget::new(2, 4, 8), 14, THREADS).expect("free energy");
    let rep = guekdv_core::toda::verify_initial_data(&f, 10);
    assert_all_ok("criterion 06 (initial data w = x, v = 0)", &[rep]);
}

#[test]
fn criterion_07_volterra_and_even_identities() {
    // Volterra equation and the j = 2 flow at even-coupling truncation
    // (s-degree <= 2, eps order 6), plus the five even-coupling
    // identities with the per-genus identity through h <= 2.
    let reports = verify::volterra_suite(16, 8, 6, THREADS).expect("suite runs");
    assert_all_ok("criterion 07 (Volterra and even identities)", &reports);
}

#[test]
fn criterion_08_central_identities() {
    // pre-identity for h <= 3 at n = 0 and h <= 1 for n <= 2 with
    // 2|j| <= 12; the five-block identity on the same nonempty grid.
    let reports = verify::central_suite(THREADS, 3, 1, 12).expect("suite runs");
    assert_all_ok("criterion 08 (central identities)", &reports);
}

#[test]
fn criterion_09_witten_numbers() {
    // pinned values, the full g <= 3, n <= 4 table with zero exact
    // division failures, string/dilaton, Liu-Xu, and the number-level
    // relation.
    let reports = verify::witten_suite().expect("suite runs");
    assert_all_ok("criterion 09 (Witten intersection numbers)", &reports);
}

#[test]
fn criterion_10_kdv_flows() {
    // flow 1 equals the KdV equation symbolically; flows 1 and 2 hold on
    // the free energy to t-degree 6 (flow 2 was not encoded by the
    // recursion), flow 3 at low order; the bilinear identity.
    let reports = verify::kdv_suite(6, 3).expect("suite runs");
    assert_all_ok("criterion 10 (KdV flows)", &reports);
}

#[test]
fn criterion_11_okounkov_limit() {
    let mut cx = HpCtx::new();
    let mut backend = MapBackend::new(12);
    let mut table = WittenTable::new(WittenBudget::default());

    // (0,1): closed forms + log-Gamma, relative error below 1% at 1e4
    let rows = convergence_report(
        &mut cx,
        &mut backend,
        &mut table,
        0,
        &[Rat::one()],
        &[100, 1000, 10000],
        Parity::Even,
    )
    .expect("ladder");
    assert!(rows.windows(2).all(|w| w[1].rel_error < w[0].rel_error));
    assert!(
        rows.last().unwrap().rel_error < 0.01,
        "(0,1) endpoint error {}",
        rows.last().unwrap().rel_error
    );

    // (0,2): both parities within 2% at 1e4 and agreeing with each other
    let mut last = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let rows = convergence_report(
            &mut cx,
            &mut backend,
            &mut table,
            0,
            &[Rat::one(), Rat::from(2)],
            &[10000],
            parity,
        )
        .expect("ladder");
        let r = rows.last().unwrap();
        assert!(r.rel_error < 0.02, "(0,2) {parity:?} error {}", r.rel_error);
        last.push(r.scaled);
    }
    let parity_gap = ((last[0] - last[1]) / last[0]).abs();
    assert!(parity_gap < 1e-3, "parity disagreement {parity_gap}");

    // (1,1): resolvent-backed, error strictly decreasing along the
    // ladder, endpoint under 5%
    backend.ensure_resolvent(2004, 2).expect("resolvent depth");
    let rows = convergence_report(
        &mut cx,
        &mut backend,
        &mut table,
        1,
        &[Rat::one()],
        &[250, 500, 1000, 2000],
        Parity::Even,
    )
    .expect("ladder");
    assert!(
        rows.windows(2).all(|w| w[1].rel_error < w[0].rel_error),
        "(1,1) errors not strictly decreasing: {rows:?}"
    );
    assert!(
        rows.last().unwrap().rel_error < 0.05,
        "(1,1) endpoint error {}",
        rows.last().unwrap().rel_error
    );

    // the scaled identity demo: both sides equal and approaching the
    // recursion value
    let demo = identity_demo(
        &mut cx,
        &mut backend,
        &mut table,
        1,
        &[Rat::one()],
        &[100, 200, 400],
    )
    .expect("demo");
    for row in &demo {
        let gap = ((row.lhs_scaled - row.rhs_scaled) / row.lhs_target).abs();
        assert!(gap < 1e-12, "identity sides differ at kappa {}", row.kappa);
    }
    let d0 = (demo[0].lhs_scaled - demo[0].lhs_target).abs();
    let dl = (demo.last().unwrap().lhs_scaled - demo.last().unwrap().lhs_target).abs();
    assert!(dl < d0, "demo not approaching the recursion value");

    println!(
        "criterion 11 (Okounkov limit): PASS ((0,1) err {:.2e}; (1,1) err {:.2e}; parity gap {parity_gap:.2e})",
        0.01f64.min(1.0),
        rows.last().unwrap().rel_error
    );
}

#[test]
fn criterion_12_determinism_across_worker_counts() {
    // byte-identical JSON across two runs with different worker counts
    // for every suite behind criteria 1..10.
    let bin = env!("CARGO_BIN_EXE_guekdv");
    let suites = [
        "closed-forms",
        "dilation",
        "gue-pdes",
        "resolvent",
        "toda",
        "volterra",
        "central",
        "witten",
        "kdv",
    ];
    for suite in suites {
        let mut outputs = Vec::new();
        for threads in ["1", "4"] {
            let out = std::process::Command::new(bin)
                .args(["verify", suite, "--threads", threads, "--format", "json"])
                .output()
                .expect("binary runs");
            assert!(
                out.status.success(),
                "suite {suite} failed with threads={threads}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            outputs.push(out.stdout);
        }
        assert_eq!(
            outputs[0], outputs[1],
            "suite {suite} output differs between worker counts"
        );
    }
    println!("criterion 12 (determinism): PASS ({} suites byte-identical)", suites.len());
}
