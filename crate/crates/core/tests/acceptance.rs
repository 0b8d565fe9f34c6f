//! Acceptance suite: every criterion at full scale with its pinned
//! tolerance. One pass/fail line is printed per criterion; criterion 12
//! (CLI reproducibility) lives with the CLI crate's tests.

use stable_gibbs::numerics::rng::DEFAULT_SEED;
use stable_gibbs::validate::{run_criterion, Suite};

fn run(id: usize, title: &str) {
    let results = run_criterion(id, Suite::Full, DEFAULT_SEED).expect("criterion ran");
    let passed = results.iter().all(|r| r.passed);
    println!(
        "[{}] criterion {id:>2}: {title}",
        if passed { "PASS" } else { "FAIL" }
    );
    for r in &results {
        println!(
            "       - {:<62} measured {:>12.5e} vs threshold {:>9.3e} [{}]",
            r.name,
            r.measured,
            r.threshold,
            if r.passed { "ok" } else { "FAIL" }
        );
    }
    assert!(passed, "criterion {id} failed: {results:?}");
}

#[test]
fn criterion_01_stable_law_certification() {
    run(1, "stable-law certification (Laplace transform, Kanter density)");
}

#[test]
fn criterion_02_lamperti_certification() {
    run(2, "Lamperti certification (normalization, ratio-law KS)");
}

#[test]
fn criterion_03_half_conditional_eppf() {
    run(3, "alpha = 1/2 conditional EPPF closed form and total probability");
}

#[test]
fn criterion_04_recursion_certificate() {
    run(4, "recursion certificate against the closed form");
}

#[test]
fn criterion_05_sum_to_one_enumeration() {
    run(5, "EPPF sums to one over all set partitions of [5]");
}

#[test]
fn criterion_06_cross_method_agreement() {
    run(6, "direct MC vs recursion-built cells");
}

#[test]
fn criterion_07_mittag_leffler_dual_route() {
    run(7, "Mittag-Leffler integral vs series routes");
}

#[test]
fn criterion_08_2f1_closed_form() {
    run(8, "Lamperti-conditional weights vs the 2F1(-1) closed form");
}

#[test]
fn criterion_09_excursion_identities() {
    run(9, "excursion identities (tanh formula, p_{n,k} recursion)");
}

#[test]
fn criterion_10_beta_gamma_identities() {
    run(10, "beta-gamma Mellin and distributional identities");
}

#[test]
fn criterion_11_sampler_law() {
    run(11, "sequential sampler frequencies vs EPPF (chi-square)");
}
