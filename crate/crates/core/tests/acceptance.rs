//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Criteria:
//! 1. finite minimax equality on 300 random games (gap <= 1e-8, certified,
//!    under 10 s)
//! 2. weak duality on 10^4 random (problem, procedure, prior) triples
//! 3. pick-smaller truncations at value 0 plus nature/statistician witnesses
//!    reaching 1-2eps and 2eps-1
//! 4. clamp truncations at value 0 plus escaped priors forcing Bayes risk
//!    exactly 1
//! 5. discretization convergence for the location and Bernoulli families
//!    (under 60 s)
//! 6. fictitious-play brackets containing the LP value, width < 0.1 at
//!    2*10^4 iterations
//! 7. transport LP vs the closed-form 1D oracle, metric axioms, and exact
//!    k-homogeneity
//! 8. simplex vs exhaustive vertex enumeration on 200 random programs

use minimax_core::suite::{run_all, Injection};

fn run_criterion(number: usize, name: &str) {
    let report = run_all(Some(name), Injection::None);
    assert_eq!(
        report.checks.len(),
        1,
        "filter {name} selected {} checks",
        report.checks.len()
    );
    let check = &report.checks[0];
    let status = if check.pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {number} [{status}] {name}: {} ({:.2}s)",
        check.details, check.seconds
    );
    assert!(check.pass, "criterion {number} ({name}): {}", check.details);
}

#[test]
fn criterion_1_finite_minimax_equality() {
    run_criterion(1, "finite-minimax-equality");
}

#[test]
fn criterion_2_weak_duality() {
    run_criterion(2, "weak-duality");
}

#[test]
fn criterion_3_minimax_failure_witnesses() {
    run_criterion(3, "minimax-failure-witnesses");
}

#[test]
fn criterion_4_clamp_escaping_priors() {
    run_criterion(4, "clamp-escaping-priors");
}

#[test]
fn criterion_5_discretization_convergence() {
    run_criterion(5, "discretization-convergence");
}

#[test]
fn criterion_6_fictitious_play_bracketing() {
    run_criterion(6, "fictitious-play-bracketing");
}

#[test]
fn criterion_7_wasserstein_oracle() {
    run_criterion(7, "transport-wasserstein-oracle");
}

#[test]
fn criterion_8_lp_vertex_oracle() {
    run_criterion(8, "lp-vertex-oracle");
}

#[test]
fn injected_defect_is_caught() {
    let report = run_all(Some("minimax-failure-witnesses"), Injection::LossPerturbation);
    assert_eq!(report.checks.len(), 1);
    let check = &report.checks[0];
    assert!(!check.pass, "perturbed fixture should fail the suite");
    assert!(
        check.details.contains("n=5"),
        "failure should name the perturbed truncation: {}",
        check.details
    );
}
