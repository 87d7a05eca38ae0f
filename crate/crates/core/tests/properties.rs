//! Property tests for the model and solver invariants.

use minimax_core::game::{minimax_lp, weak_duality_gap};
use minimax_core::matrix::Mat;
use minimax_core::model::{
    bayes_risk, mix_procedures, risk, worst_case_risk, FiniteDecisionProblem, FinitePrior, Label,
    RandomizedProcedure,
};
use minimax_core::transport::{line_metric, w1_1d, wk_discrete, DiscreteMeasure};
use proptest::prelude::*;

fn labels(n: usize) -> Vec<Label> {
    (0..n).map(|i| Label::int(i as i64)).collect()
}

fn normalize(raw: Vec<f64>) -> Vec<f64> {
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

prop_compose! {
    fn stochastic_row(n: usize)(raw in prop::collection::vec(1e-3..1.0f64, n)) -> Vec<f64> {
        normalize(raw)
    }
}

fn problem_strategy() -> impl Strategy<Value = FiniteDecisionProblem> {
    (1usize..=5, 1usize..=5, 1usize..=5).prop_flat_map(|(nt, na, nx)| {
        let loss = prop::collection::vec(prop::collection::vec(-1.0..1.0f64, na), nt);
        let kernel = prop::collection::vec(stochastic_row(nx), nt);
        (loss, kernel).prop_map(move |(loss, kernel)| {
            FiniteDecisionProblem::new(
                labels(nt),
                labels(na),
                labels(nx),
                Mat::from_rows(loss).unwrap(),
                Mat::from_rows(kernel).unwrap(),
            )
            .unwrap()
        })
    })
}

fn procedure_for(problem: &FiniteDecisionProblem) -> impl Strategy<Value = RandomizedProcedure> {
    let (nx, na) = (problem.n_obs(), problem.n_actions());
    prop::collection::vec(stochastic_row(na), nx)
        .prop_map(move |rows| RandomizedProcedure::new(Mat::from_rows(rows).unwrap()).unwrap())
}

fn with_procedures(
    count: usize,
) -> impl Strategy<Value = (FiniteDecisionProblem, Vec<RandomizedProcedure>)> {
    problem_strategy().prop_flat_map(move |p| {
        let deltas = prop::collection::vec(procedure_for(&p), count);
        deltas.prop_map(move |ds| (p.clone(), ds))
    })
}

fn measure_strategy() -> impl Strategy<Value = DiscreteMeasure> {
    (1usize..=6).prop_flat_map(|n| {
        let points = prop::collection::hash_set(-40i64..=40, n..=n);
        (points, stochastic_row(n)).prop_map(|(points, weights)| {
            let support: Vec<f64> = points.into_iter().map(|p| p as f64 / 4.0).collect();
            DiscreteMeasure::new(support, weights).unwrap()
        })
    })
}

proptest! {
    // risk is linear in procedure mixtures
    #[test]
    fn risk_linearity((p, deltas) in with_procedures(3), raw_w in prop::collection::vec(1e-3..1.0f64, 3)) {
        let weights = normalize(raw_w);
        let mixed = mix_procedures(&deltas, &weights).unwrap();
        for t in 0..p.n_theta() {
            let direct = risk(&p, t, &mixed).unwrap();
            let combined: f64 = deltas
                .iter()
                .zip(&weights)
                .map(|(d, w)| w * risk(&p, t, d).unwrap())
                .sum();
            prop_assert!((direct - combined).abs() <= 1e-12, "theta {t}: {direct} vs {combined}");
        }
    }

    // an average never beats the maximum
    #[test]
    fn bayes_risk_below_worst_case((p, deltas) in with_procedures(1), raw_prior in prop::collection::vec(1e-3..1.0f64, 5)) {
        let prior = FinitePrior::new(normalize(raw_prior[..p.n_theta()].to_vec())).unwrap();
        let b = bayes_risk(&p, &prior, &deltas[0]).unwrap();
        let w = worst_case_risk(&p, &deltas[0]).unwrap();
        prop_assert!(b <= w + 1e-12);
        let gap = weak_duality_gap(&p, &deltas[0], &prior).unwrap();
        prop_assert!(gap >= -1e-12);
    }

    // a point-mass prior reproduces the pointwise risk exactly
    #[test]
    fn degenerate_prior_is_exact((p, deltas) in with_procedures(1), at in 0usize..5) {
        let at = at % p.n_theta();
        let prior = FinitePrior::degenerate(p.n_theta(), at).unwrap();
        prop_assert_eq!(
            bayes_risk(&p, &prior, &deltas[0]).unwrap(),
            risk(&p, at, &deltas[0]).unwrap()
        );
    }

    // relabeling parameters with matching row permutations changes nothing
    #[test]
    fn permutation_invariance((p, deltas) in with_procedures(1), seed in 0u64..1000) {
        let n = p.n_theta();
        let mut perm: Vec<usize> = (0..n).collect();
        // Fisher-Yates with a toy LCG keeps the test self-contained
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            perm.swap(i, j);
        }

        let loss = Mat::from_rows(perm.iter().map(|&i| p.loss().row(i).to_vec()).collect()).unwrap();
        let kernel = Mat::from_rows(perm.iter().map(|&i| p.kernel().row(i).to_vec()).collect()).unwrap();
        let theta = perm.iter().map(|&i| p.theta_labels()[i].clone()).collect();
        let permuted = FiniteDecisionProblem::new(
            theta,
            p.action_labels().to_vec(),
            p.obs_labels().to_vec(),
            loss,
            kernel,
        ).unwrap();

        for (new_t, &old_t) in perm.iter().enumerate() {
            prop_assert_eq!(
                risk(&permuted, new_t, &deltas[0]).unwrap(),
                risk(&p, old_t, &deltas[0]).unwrap()
            );
        }
    }

    // games with trivial data and loss(theta,a) = -loss(a,theta) have value 0
    #[test]
    fn skew_symmetric_games_have_value_zero(n in 1usize..=6, upper in prop::collection::vec(-1.0..1.0f64, 15)) {
        let mut loss = Mat::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                loss.set(i, j, upper[k]);
                loss.set(j, i, -upper[k]);
                k += 1;
            }
        }
        let p = FiniteDecisionProblem::no_data(labels(n), labels(n), loss).unwrap();
        let sol = minimax_lp(&p).unwrap();
        prop_assert!(sol.value.abs() <= 1e-9, "value {}", sol.value);
        prop_assert!(sol.duality_gap.abs() <= 1e-8);
    }

    // the transport LP agrees with the closed-form CDF integral on the line
    #[test]
    fn transport_matches_cdf_oracle(mu in measure_strategy(), nu in measure_strategy()) {
        let lp = wk_discrete(&mu, &nu, &line_metric, 1.0).unwrap();
        let oracle = w1_1d(&mu, &nu);
        prop_assert!((lp - oracle).abs() <= 1e-9, "{lp} vs {oracle}");
    }

    // metric axioms of the transport distance
    #[test]
    fn transport_symmetry_and_triangle(
        a in measure_strategy(),
        b in measure_strategy(),
        c in measure_strategy(),
    ) {
        let dab = wk_discrete(&a, &b, &line_metric, 1.0).unwrap();
        let dba = wk_discrete(&b, &a, &line_metric, 1.0).unwrap();
        prop_assert!((dab - dba).abs() <= 1e-9);
        let dbc = wk_discrete(&b, &c, &line_metric, 1.0).unwrap();
        let dac = wk_discrete(&a, &c, &line_metric, 1.0).unwrap();
        prop_assert!(dac <= dab + dbc + 1e-8);
    }

    // mixing with weight 1 on a single procedure is the identity
    #[test]
    fn mix_identity((p, deltas) in with_procedures(1)) {
        let _ = &p;
        let mixed = mix_procedures(&deltas, &[1.0]).unwrap();
        prop_assert_eq!(&mixed, &deltas[0]);
    }
}
