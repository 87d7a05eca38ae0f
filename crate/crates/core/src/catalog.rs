//! Built-in decision problems and witness constructors.
//!
//! The two truncation families (`pick_smaller_game`, `clamp_game`) are
//! skew-symmetric games whose every finite truncation has value zero, while
//! their infinite versions have upper value 1 and countably additive lower
//! value -1. The witness constructors expose that failure directly: given
//! any finitely supported procedure or prior, they produce an opponent
//! response approaching the infinite-game payoff, with the achieved value
//! recomputed through the model's risk arithmetic rather than trusted from
//! the construction.

use num_rational::Rational64;
use thiserror::Error;

use crate::discretize::{Interval, MetricFamily};
use crate::matrix::Mat;
use crate::model::{
    bayes_risk, risk, FiniteDecisionProblem, FinitePrior, Label, ModelError, RandomizedProcedure,
    ROW_SUM_TOL,
};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("internal witness error: {0}")]
    Internal(String),
}

fn sign_loss(theta: Rational64, action: Rational64) -> f64 {
    match theta.cmp(&action) {
        std::cmp::Ordering::Less => 1.0,
        std::cmp::Ordering::Equal => 0.0,
        std::cmp::Ordering::Greater => -1.0,
    }
}

/// Truncation of the pick-the-smaller-point game: parameters and actions are
/// the first `n` points of {1, 1/2, 1/3, ...} as exact rationals, a single
/// trivial observation, and loss +1 / 0 / -1 as theta is below / at / above
/// the chosen action.
pub fn pick_smaller_game(n: usize) -> Result<FiniteDecisionProblem, CatalogError> {
    if n == 0 {
        return Err(CatalogError::Input(
            "truncation size must be at least 1".into(),
        ));
    }
    let points: Vec<Rational64> = (1..=n as i64).map(|i| Rational64::new(1, i)).collect();
    let labels: Vec<Label> = points.iter().map(|&q| Label::Number(q)).collect();
    let mut loss = Mat::zeros(n, n);
    for (i, &t) in points.iter().enumerate() {
        for (j, &a) in points.iter().enumerate() {
            loss.set(i, j, sign_loss(t, a));
        }
    }
    Ok(FiniteDecisionProblem::no_data(
        labels.clone(),
        labels,
        loss,
    )?)
}

fn clamp_loss(theta: i64, action: i64) -> f64 {
    ((theta - action) as f64).clamp(-1.0, 1.0)
}

/// Truncation of the clamped-difference game: parameters and actions are
/// 1..n, trivial observation, loss theta - a clamped to [-1, 1]. Rows are
/// 1-Lipschitz in theta.
pub fn clamp_game(n: usize) -> Result<FiniteDecisionProblem, CatalogError> {
    if n == 0 {
        return Err(CatalogError::Input(
            "truncation size must be at least 1".into(),
        ));
    }
    let labels: Vec<Label> = (1..=n as i64).map(Label::int).collect();
    let mut loss = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            loss.set(i, j, clamp_loss(i as i64 + 1, j as i64 + 1));
        }
    }
    Ok(FiniteDecisionProblem::no_data(
        labels.clone(),
        labels,
        loss,
    )?)
}

/// A binary detection problem: two parameters, two actions, 0-1 loss, and a
/// single observation whose hit probability is 3/4 under the first parameter
/// and 1/4 under the second. Value 1/4 with uniform least favorable prior.
pub fn binary_detection_game() -> Result<FiniteDecisionProblem, CatalogError> {
    let loss = Mat::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]])
        .map_err(CatalogError::Internal)?;
    let kernel = Mat::from_rows(vec![vec![0.25, 0.75], vec![0.75, 0.25]])
        .map_err(CatalogError::Internal)?;
    Ok(FiniteDecisionProblem::new(
        vec![Label::text("theta1"), Label::text("theta2")],
        vec![Label::text("a1"), Label::text("a2")],
        vec![Label::int(0), Label::int(1)],
        loss,
        kernel,
    )?)
}

/// A finitely supported distribution on exact rational points; stands in for
/// both procedures (mass over actions) and priors (mass over parameters) on
/// the truncation games.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMeasure {
    support: Vec<Rational64>,
    weights: Vec<f64>,
}

impl RationalMeasure {
    pub fn new(support: Vec<Rational64>, weights: Vec<f64>) -> Result<Self, CatalogError> {
        if support.is_empty() || support.len() != weights.len() {
            return Err(CatalogError::Input(format!(
                "{} support points with {} weights",
                support.len(),
                weights.len()
            )));
        }
        for i in 0..support.len() {
            for j in (i + 1)..support.len() {
                if support[i] == support[j] {
                    return Err(CatalogError::Input(format!(
                        "duplicate support point {}",
                        support[i]
                    )));
                }
            }
        }
        let mut sum = 0.0;
        for &w in &weights {
            if !w.is_finite() || w < 0.0 {
                return Err(CatalogError::Input(format!("weight {w} is not a probability")));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(CatalogError::Input(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(RationalMeasure { support, weights })
    }

    pub fn point(at: Rational64) -> Result<Self, CatalogError> {
        RationalMeasure::new(vec![at], vec![1.0])
    }

    pub fn uniform(support: Vec<Rational64>) -> Result<Self, CatalogError> {
        let n = support.len();
        if n == 0 {
            return Err(CatalogError::Input("empty support".into()));
        }
        let mut w = vec![1.0 / n as f64; n];
        let partial: f64 = w[..n - 1].iter().sum();
        w[n - 1] = 1.0 - partial;
        RationalMeasure::new(support, w)
    }

    pub fn support(&self) -> &[Rational64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Indices sorted by descending weight; among equal weights the larger
    /// point comes first. A greedy prefix of this order is a smallest set
    /// reaching any mass threshold.
    fn by_mass(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.support.len()).collect();
        idx.sort_by(|&i, &j| {
            self.weights[j]
                .partial_cmp(&self.weights[i])
                .expect("finite weights")
                .then_with(|| self.support[j].cmp(&self.support[i]))
        });
        idx
    }

    /// Smallest-cardinality subset with mass strictly above `threshold`,
    /// returned as indices.
    fn smallest_core(&self, threshold: f64) -> Vec<usize> {
        let mut chosen = Vec::new();
        let mut mass = 0.0;
        for i in self.by_mass() {
            chosen.push(i);
            mass += self.weights[i];
            if mass > threshold {
                break;
            }
        }
        chosen
    }

    fn require_unit_fractions(&self) -> Result<(), CatalogError> {
        for q in &self.support {
            if *q.numer() != 1 || *q.denom() < 1 {
                return Err(CatalogError::Input(format!(
                    "support point {q} is not of the form 1/m"
                )));
            }
        }
        Ok(())
    }

    fn require_positive_integers(&self) -> Result<(), CatalogError> {
        for q in &self.support {
            if !q.is_integer() || *q.numer() < 1 {
                return Err(CatalogError::Input(format!(
                    "support point {q} is not a positive integer"
                )));
            }
        }
        Ok(())
    }
}

/// Witness produced against a procedure (a parameter) or against a prior
/// (a non-randomized rule committing to one action).
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Parameter(Rational64),
    PointProcedure(Rational64),
}

#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub witness: Witness,
    pub achieved_value: f64,
    pub epsilon: f64,
}

fn check_epsilon(epsilon: f64) -> Result<(), CatalogError> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(CatalogError::Input(format!(
            "epsilon must lie strictly between 0 and 1/2, got {epsilon}"
        )));
    }
    Ok(())
}

/// Builds the finite sub-problem on given parameter and action points of the
/// pick-smaller game, used to recompute witness payoffs through the model.
fn sign_subproblem(
    theta: &[Rational64],
    actions: &[Rational64],
) -> Result<FiniteDecisionProblem, CatalogError> {
    let mut loss = Mat::zeros(theta.len(), actions.len());
    for (i, &t) in theta.iter().enumerate() {
        for (j, &a) in actions.iter().enumerate() {
            loss.set(i, j, sign_loss(t, a));
        }
    }
    Ok(FiniteDecisionProblem::no_data(
        theta.iter().map(|&q| Label::Number(q)).collect(),
        actions.iter().map(|&q| Label::Number(q)).collect(),
        loss,
    )?)
}

/// Nature's response to a finitely supported procedure on the unit-fraction
/// points: a parameter strictly below all but delta-mass epsilon of the
/// support, where the incurred loss is +1. The achieved risk exceeds
/// 1 - 2*epsilon, witnessing that the infinite game's upper value is 1.
pub fn nature_witness(
    delta: &RationalMeasure,
    epsilon: f64,
) -> Result<WitnessReport, CatalogError> {
    check_epsilon(epsilon)?;
    delta.require_unit_fractions()?;

    let core = delta.smallest_core(1.0 - epsilon);
    let min_core = core
        .iter()
        .map(|&i| delta.support[i])
        .min()
        .ok_or_else(|| CatalogError::Internal("empty mass core".into()))?;
    // min of the core is 1/m; the next point 1/(m+1) sits strictly below it
    let theta0 = Rational64::new(1, min_core.denom() + 1);

    let problem = sign_subproblem(&[theta0], delta.support())?;
    let procedure = RandomizedProcedure::new(
        Mat::from_rows(vec![delta.weights().to_vec()]).map_err(CatalogError::Internal)?,
    )?;
    let achieved_value = risk(&problem, 0, &procedure)?;

    if achieved_value <= 1.0 - 2.0 * epsilon {
        return Err(CatalogError::Internal(format!(
            "witness at {theta0} achieved {achieved_value}, expected more than {}",
            1.0 - 2.0 * epsilon
        )));
    }
    Ok(WitnessReport {
        witness: Witness::Parameter(theta0),
        achieved_value,
        epsilon,
    })
}

/// The statistician's response to a finitely supported prior on the
/// unit-fraction points: the non-randomized rule at a point strictly below
/// all but prior-mass epsilon of the support, where the incurred loss is -1.
/// The achieved Bayes risk is below 2*epsilon - 1, witnessing that the
/// countably additive lower value is -1.
pub fn statistician_witness(
    prior: &RationalMeasure,
    epsilon: f64,
) -> Result<WitnessReport, CatalogError> {
    check_epsilon(epsilon)?;
    prior.require_unit_fractions()?;

    let core = prior.smallest_core(1.0 - epsilon);
    let min_core = core
        .iter()
        .map(|&i| prior.support[i])
        .min()
        .ok_or_else(|| CatalogError::Internal("empty mass core".into()))?;
    let theta0 = Rational64::new(1, min_core.denom() + 1);

    let problem = sign_subproblem(prior.support(), &[theta0])?;
    let fp = FinitePrior::new(prior.weights().to_vec())?;
    let rule = RandomizedProcedure::point_mass(1, 0, 1)?;
    let achieved_value = bayes_risk(&problem, &fp, &rule)?;

    if achieved_value >= 2.0 * epsilon - 1.0 {
        return Err(CatalogError::Internal(format!(
            "witness rule at {theta0} achieved {achieved_value}, expected less than {}",
            2.0 * epsilon - 1.0
        )));
    }
    Ok(WitnessReport {
        witness: Witness::PointProcedure(theta0),
        achieved_value,
        epsilon,
    })
}

/// One (escaping prior, procedure) evaluation on the clamp game.
#[derive(Debug, Clone)]
pub struct EscapeRow {
    pub k: i64,
    pub procedure_index: usize,
    pub support_max: i64,
    pub bayes_risk: f64,
    /// set when k does not exceed the procedure's support maximum, so the
    /// prior has not escaped the support
    pub flagged: bool,
}

#[derive(Debug, Clone)]
pub struct KInfimum {
    pub k: i64,
    pub inf_bayes_risk: f64,
}

/// Bayes risks of point-mass priors escaping to large parameters on the
/// clamp game. Once k exceeds the support maximum, the loss is identically
/// one on the support, so the Bayes risk of a probability measure there is
/// exactly one.
#[derive(Debug, Clone)]
pub struct EscapingPriorReport {
    pub rows: Vec<EscapeRow>,
    pub infima: Vec<KInfimum>,
}

pub fn escaping_prior_report(
    k_list: &[i64],
    procedures: &[RationalMeasure],
) -> Result<EscapingPriorReport, CatalogError> {
    if k_list.is_empty() || procedures.is_empty() {
        return Err(CatalogError::Input(
            "need at least one escape point and one procedure".into(),
        ));
    }
    for &k in k_list {
        if k < 1 {
            return Err(CatalogError::Input(format!(
                "escape point {k} is not a positive integer"
            )));
        }
    }
    for d in procedures {
        d.require_positive_integers()?;
    }

    let mut rows = Vec::new();
    let mut infima = Vec::new();
    for &k in k_list {
        let mut inf = f64::INFINITY;
        for (pi, d) in procedures.iter().enumerate() {
            let support_max = d
                .support()
                .iter()
                .map(|q| *q.numer())
                .max()
                .expect("nonempty support");
            let losses: Vec<f64> = d
                .support()
                .iter()
                .map(|a| clamp_loss(k, *a.numer()))
                .collect();
            // constant loss on the support integrates to the constant
            let br = if losses.windows(2).all(|w| w[0] == w[1]) {
                losses[0]
            } else {
                losses
                    .iter()
                    .zip(d.weights())
                    .map(|(l, w)| l * w)
                    .sum()
            };
            inf = inf.min(br);
            rows.push(EscapeRow {
                k,
                procedure_index: pi,
                support_max,
                bayes_risk: br,
                flagged: k <= support_max,
            });
        }
        infima.push(KInfimum {
            k,
            inf_bayes_risk: inf,
        });
    }
    Ok(EscapingPriorReport { rows, infima })
}

/// Location family: parameters and actions on a shared interval, loss
/// |theta - a|, no data, Lipschitz constant 1.
pub fn location_family() -> MetricFamily {
    MetricFamily::location(Interval::new(0.0, 1.0).expect("unit interval"))
}

/// One Bernoulli(theta) observation with squared-error loss on the unit
/// interval; the rule d(x) = (x + 1/2)/2 equalizes the risk at 1/16.
pub fn bernoulli_family() -> MetricFamily {
    MetricFamily::bernoulli_squared()
}

/// Clamped-difference loss on a bounded interval, the continuous relative of
/// `clamp_game`.
pub fn clamp_family(lo: f64, hi: f64) -> Result<MetricFamily, CatalogError> {
    let domain = Interval::new(lo, hi)
        .map_err(|e| CatalogError::Input(e.to_string()))?;
    Ok(MetricFamily::clamp(domain))
}

/// Risk of the equalizing rule d(x) = (x + 1/2)/2 for the Bernoulli family
/// at one parameter, straight from the definition.
pub fn bernoulli_equalizer_risk(theta: f64) -> f64 {
    let d0 = 0.25;
    let d1 = 0.75;
    (1.0 - theta) * (theta - d0) * (theta - d0) + theta * (theta - d1) * (theta - d1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::minimax_lp;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn pick_smaller_two_point_matrix() {
        let p = pick_smaller_game(2).unwrap();
        assert_eq!(p.theta_labels(), &[Label::int(1), Label::ratio(1, 2)]);
        assert_eq!(p.loss_at(0, 0), 0.0);
        assert_eq!(p.loss_at(0, 1), -1.0);
        assert_eq!(p.loss_at(1, 0), 1.0);
        assert_eq!(p.loss_at(1, 1), 0.0);
    }

    #[test]
    fn pick_smaller_edge_cases() {
        assert!(pick_smaller_game(0).is_err());
        let p = pick_smaller_game(1).unwrap();
        assert_eq!(p.n_theta(), 1);
        assert_eq!(p.loss_at(0, 0), 0.0);
    }

    #[test]
    fn truncations_have_value_zero() {
        for n in 1..=20 {
            let p = pick_smaller_game(n).unwrap();
            let sol = minimax_lp(&p).unwrap();
            assert!(sol.value.abs() <= 1e-9, "n={n} value {}", sol.value);
            let c = clamp_game(n).unwrap();
            let sol = minimax_lp(&c).unwrap();
            assert!(sol.value.abs() <= 1e-9, "clamp n={n} value {}", sol.value);
        }
    }

    #[test]
    fn clamp_three_point_matrix() {
        let p = clamp_game(3).unwrap();
        let expected = [[0.0, -1.0, -1.0], [1.0, 0.0, -1.0], [1.0, 1.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p.loss_at(i, j), expected[i][j]);
            }
        }
        // rows are 1-Lipschitz in theta
        for j in 0..3 {
            for i in 0..2 {
                assert!((p.loss_at(i + 1, j) - p.loss_at(i, j)).abs() <= 1.0);
            }
        }
    }

    #[test]
    fn nature_witness_point_mass() {
        let delta = RationalMeasure::point(q(1, 3)).unwrap();
        let report = nature_witness(&delta, 0.1).unwrap();
        assert_eq!(report.witness, Witness::Parameter(q(1, 4)));
        assert_eq!(report.achieved_value, 1.0);
        assert!(report.achieved_value > 0.8);
    }

    #[test]
    fn nature_witness_uniform_pair() {
        let delta = RationalMeasure::uniform(vec![q(1, 1), q(1, 2)]).unwrap();
        let report = nature_witness(&delta, 0.1).unwrap();
        assert_eq!(report.witness, Witness::Parameter(q(1, 3)));
        assert_eq!(report.achieved_value, 1.0);
    }

    #[test]
    fn nature_witness_heavy_head() {
        let delta =
            RationalMeasure::new(vec![q(1, 1), q(1, 1000)], vec![0.95, 0.05]).unwrap();
        let report = nature_witness(&delta, 0.1).unwrap();
        assert_eq!(report.witness, Witness::Parameter(q(1, 2)));
        assert!((report.achieved_value - 0.9).abs() < 1e-15);
    }

    #[test]
    fn statistician_witness_uniform_triple() {
        let prior =
            RationalMeasure::uniform(vec![q(1, 1), q(1, 2), q(1, 3)]).unwrap();
        let report = statistician_witness(&prior, 0.1).unwrap();
        assert_eq!(report.witness, Witness::PointProcedure(q(1, 4)));
        assert_eq!(report.achieved_value, -1.0);
        assert!(report.achieved_value < -0.8);
    }

    #[test]
    fn statistician_witness_point_mass() {
        let prior = RationalMeasure::point(q(1, 2)).unwrap();
        let report = statistician_witness(&prior, 0.2).unwrap();
        assert_eq!(report.achieved_value, -1.0);
    }

    #[test]
    fn statistician_witness_split_prior() {
        let eps = 0.1;
        let prior = RationalMeasure::new(
            vec![q(1, 1), q(1, 1_000_000)],
            vec![1.0 - eps / 2.0, eps / 2.0],
        )
        .unwrap();
        let report = statistician_witness(&prior, eps).unwrap();
        assert_eq!(report.witness, Witness::PointProcedure(q(1, 2)));
        // mass above the rule loses 1, the stray tail below gains at most 1
        assert!(report.achieved_value <= -(1.0 - eps) + eps);
    }

    #[test]
    fn witness_epsilon_range_enforced() {
        let delta = RationalMeasure::point(q(1, 3)).unwrap();
        assert!(nature_witness(&delta, 0.0).is_err());
        assert!(nature_witness(&delta, 0.5).is_err());
        assert!(statistician_witness(&delta, 0.7).is_err());
    }

    #[test]
    fn witness_rejects_non_unit_fractions() {
        let delta = RationalMeasure::point(q(2, 3)).unwrap();
        assert!(matches!(
            nature_witness(&delta, 0.1),
            Err(CatalogError::Input(_))
        ));
    }

    #[test]
    fn escaping_point_masses() {
        let d5 = RationalMeasure::point(q(5, 1)).unwrap();
        let report = escaping_prior_report(&[7, 6], &[d5]).unwrap();
        assert_eq!(report.rows.len(), 2);
        for row in &report.rows {
            assert_eq!(row.bayes_risk, 1.0);
            assert!(!row.flagged);
        }
    }

    #[test]
    fn escaping_uniform_ten() {
        let support: Vec<Rational64> = (1..=10).map(|i| q(i, 1)).collect();
        let d = RationalMeasure::uniform(support).unwrap();
        let report = escaping_prior_report(&[12], &[d]).unwrap();
        assert_eq!(report.rows[0].bayes_risk, 1.0);
        assert_eq!(report.infima[0].inf_bayes_risk, 1.0);
    }

    #[test]
    fn escaping_flags_short_k() {
        let d = RationalMeasure::point(q(5, 1)).unwrap();
        let report = escaping_prior_report(&[4], &[d]).unwrap();
        assert!(report.rows[0].flagged);
        assert!(report.rows[0].bayes_risk < 1.0);
    }

    #[test]
    fn family_values() {
        let loc = location_family();
        assert!((loc.loss(0.3, 0.7) - 0.4).abs() < 1e-15);
        let bern = bernoulli_family();
        assert_eq!(bern.kernel_row(0.25), vec![0.75, 0.25]);
        for theta in [0.0, 0.3, 1.0] {
            let r = bernoulli_equalizer_risk(theta);
            assert!((r - 1.0 / 16.0).abs() < 1e-15, "risk({theta}) = {r}");
        }
    }
}
