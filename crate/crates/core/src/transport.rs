//! k-Wasserstein distances between finitely supported measures.
//!
//! Two independent routes: a closed-form CDF integral for measures on the
//! line (the trustworthy oracle), and a transport LP in flow form for
//! arbitrary ground metrics. The Lipschitz-dual distance with constant k
//! equals k times the transport cost with the ground metric as unit cost.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{solve_lp, LinearProgram, LpError, LpStatus, Relation};
use crate::matrix::Mat;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("invalid measure: {0}")]
    Measure(String),
    #[error("invalid distance oracle: {0}")]
    Distance(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("internal transport error: {0}")]
    Internal(String),
}

/// Weight sum tolerance, matching the model's probability rows.
pub const MASS_TOL: f64 = 1e-12;

/// A finitely supported probability measure on the real line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    support: Vec<f64>,
    weights: Vec<f64>,
}

/// On-disk form: {"support": [...], "weights": [...]}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub support: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(support: Vec<f64>, weights: Vec<f64>) -> Result<Self, TransportError> {
        if support.is_empty() {
            return Err(TransportError::Measure("empty support".into()));
        }
        if support.len() != weights.len() {
            return Err(TransportError::Measure(format!(
                "{} support points but {} weights",
                support.len(),
                weights.len()
            )));
        }
        if support.iter().any(|x| !x.is_finite()) {
            return Err(TransportError::Measure("non-finite support point".into()));
        }
        for i in 0..support.len() {
            for j in (i + 1)..support.len() {
                if support[i] == support[j] {
                    return Err(TransportError::Measure(format!(
                        "support points {i} and {j} are duplicates ({})",
                        support[i]
                    )));
                }
            }
        }
        let mut sum = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(TransportError::Measure(format!(
                    "weight {i} = {w} is not a probability"
                )));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(TransportError::Measure(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(DiscreteMeasure { support, weights })
    }

    pub fn point(x: f64) -> Result<Self, TransportError> {
        DiscreteMeasure::new(vec![x], vec![1.0])
    }

    pub fn from_spec(spec: MeasureSpec) -> Result<Self, TransportError> {
        DiscreteMeasure::new(spec.support, spec.weights)
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// 1-Wasserstein distance on the line: the integral of |F_mu - F_nu| over
/// the merged breakpoint grid, which is the closed-form optimal transport
/// cost in one dimension.
pub fn w1_1d(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let mut points: Vec<f64> = mu
        .support
        .iter()
        .chain(nu.support.iter())
        .copied()
        .collect();
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite support"));
    points.dedup();

    let mass_at = |m: &DiscreteMeasure, t: f64| -> f64 {
        m.support
            .iter()
            .zip(&m.weights)
            .filter(|(&x, _)| x == t)
            .map(|(_, &w)| w)
            .sum()
    };

    let mut total = 0.0;
    let mut f_mu = 0.0;
    let mut f_nu = 0.0;
    for win in points.windows(2) {
        f_mu += mass_at(mu, win[0]);
        f_nu += mass_at(nu, win[0]);
        total += (f_mu - f_nu).abs() * (win[1] - win[0]);
    }
    total
}

/// Full transport solution: cost, coupling, and dual potentials.
#[derive(Debug, Clone)]
pub struct TransportSolution {
    pub cost: f64,
    /// |mu| x |nu| coupling with row sums mu and column sums nu
    pub plan: Mat,
    pub mu_potentials: Vec<f64>,
    pub nu_potentials: Vec<f64>,
}

fn check_metric(
    points: &[f64],
    distance: &dyn Fn(f64, f64) -> f64,
) -> Result<(), TransportError> {
    for (i, &x) in points.iter().enumerate() {
        let dxx = distance(x, x);
        if dxx.abs() > 1e-12 {
            return Err(TransportError::Distance(format!(
                "distance({x},{x}) = {dxx}, expected 0"
            )));
        }
        for &y in &points[i + 1..] {
            let dxy = distance(x, y);
            let dyx = distance(y, x);
            if !dxy.is_finite() || dxy < 0.0 {
                return Err(TransportError::Distance(format!(
                    "distance({x},{y}) = {dxy} is not a metric value"
                )));
            }
            if (dxy - dyx).abs() > 1e-9 {
                return Err(TransportError::Distance(format!(
                    "asymmetric: distance({x},{y}) = {dxy} but distance({y},{x}) = {dyx}"
                )));
            }
        }
    }
    // triangle inequality on a capped deterministic sample of triples
    let n = points.len();
    let mut checked = 0usize;
    'outer: for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                if checked >= 2000 {
                    break 'outer;
                }
                checked += 1;
                let lhs = distance(points[i], points[l]);
                let rhs = distance(points[i], points[j]) + distance(points[j], points[l]);
                if lhs > rhs + 1e-9 {
                    return Err(TransportError::Distance(format!(
                        "triangle violation: d({},{}) = {} > {}",
                        points[i], points[l], lhs, rhs
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Optimal transport between two discrete measures under a ground-cost
/// oracle, solved as the flow LP on the joint support.
pub fn ot_plan(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    distance: &dyn Fn(f64, f64) -> f64,
) -> Result<TransportSolution, TransportError> {
    let joint: Vec<f64> = mu
        .support
        .iter()
        .chain(nu.support.iter())
        .copied()
        .collect();
    check_metric(&joint, distance)?;

    let n = mu.len();
    let m = nu.len();
    let n_vars = n * m;

    let mut objective = vec![0.0; n_vars];
    for i in 0..n {
        for j in 0..m {
            objective[i * m + j] = distance(mu.support[i], nu.support[j]);
        }
    }

    let mut rows = Vec::with_capacity(n + m);
    let mut rhs = Vec::with_capacity(n + m);
    for i in 0..n {
        let mut row = vec![0.0; n_vars];
        for j in 0..m {
            row[i * m + j] = 1.0;
        }
        rows.push(row);
        rhs.push(mu.weights[i]);
    }
    for j in 0..m {
        let mut row = vec![0.0; n_vars];
        for i in 0..n {
            row[i * m + j] = 1.0;
        }
        rows.push(row);
        rhs.push(nu.weights[j]);
    }
    let relations = vec![Relation::Eq; n + m];

    let lp = LinearProgram::new(
        objective,
        Mat::from_rows(rows).map_err(TransportError::Internal)?,
        relations,
        rhs,
    );
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(TransportError::Internal(format!(
            "transport LP reported {:?}; balanced problems are always feasible",
            sol.status
        )));
    }

    let mut plan = Mat::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            plan.set(i, j, sol.primal[i * m + j].max(0.0));
        }
    }
    Ok(TransportSolution {
        cost: sol.objective_value,
        plan,
        mu_potentials: sol.dual[..n].to_vec(),
        nu_potentials: sol.dual[n..].to_vec(),
    })
}

/// k-Wasserstein distance: the supremum over k-Lipschitz test functions of
/// the difference of integrals, computed as k times the unit transport cost.
pub fn wk_discrete(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    distance: &dyn Fn(f64, f64) -> f64,
    k: f64,
) -> Result<f64, TransportError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(TransportError::Input(format!(
            "Lipschitz constant must be positive and finite, got {k}"
        )));
    }
    Ok(k * ot_plan(mu, nu, distance)?.cost)
}

/// The line metric, the ground cost used for measures on the reals.
pub fn line_metric(x: f64, y: f64) -> f64 {
    (x - y).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(support: Vec<f64>, weights: Vec<f64>) -> DiscreteMeasure {
        DiscreteMeasure::new(support, weights).unwrap()
    }

    #[test]
    fn w1_unit_translation() {
        let a = DiscreteMeasure::point(0.0).unwrap();
        let b = DiscreteMeasure::point(1.0).unwrap();
        assert_eq!(w1_1d(&a, &b), 1.0);
    }

    #[test]
    fn w1_half_split() {
        let a = m(vec![0.0, 1.0], vec![0.5, 0.5]);
        let b = DiscreteMeasure::point(0.0).unwrap();
        assert_eq!(w1_1d(&a, &b), 0.5);
    }

    #[test]
    fn w1_identity() {
        let a = m(vec![-1.0, 2.5, 3.0], vec![0.25, 0.25, 0.5]);
        assert_eq!(w1_1d(&a, &a), 0.0);
    }

    #[test]
    fn wk_two_point_masses() {
        let a = DiscreteMeasure::point(-1.5).unwrap();
        let b = DiscreteMeasure::point(2.0).unwrap();
        let d = wk_discrete(&a, &b, &line_metric, 1.0).unwrap();
        assert!((d - 3.5).abs() < 1e-12);
        let d3 = wk_discrete(&a, &b, &line_metric, 3.0).unwrap();
        assert!((d3 - 3.0 * d).abs() < 1e-12);
    }

    #[test]
    fn wk_agrees_with_1d_oracle() {
        let a = m(vec![0.0, 1.0, 3.0], vec![0.2, 0.3, 0.5]);
        let b = m(vec![-1.0, 2.0], vec![0.6, 0.4]);
        let lp = wk_discrete(&a, &b, &line_metric, 1.0).unwrap();
        let oracle = w1_1d(&a, &b);
        assert!((lp - oracle).abs() < 1e-9, "lp {lp} oracle {oracle}");
    }

    #[test]
    fn plan_marginals_match() {
        let a = m(vec![0.0, 1.0], vec![0.4, 0.6]);
        let b = m(vec![0.5, 2.0, 3.0], vec![0.3, 0.3, 0.4]);
        let sol = ot_plan(&a, &b, &line_metric).unwrap();
        for i in 0..2 {
            let s: f64 = (0..3).map(|j| sol.plan.at(i, j)).sum();
            assert!((s - a.weights()[i]).abs() < 1e-9);
        }
        for j in 0..3 {
            let s: f64 = (0..2).map(|i| sol.plan.at(i, j)).sum();
            assert!((s - b.weights()[j]).abs() < 1e-9);
        }
        // dual feasibility of the potentials on every pair
        for i in 0..2 {
            for j in 0..3 {
                let slack = line_metric(a.support()[i], b.support()[j])
                    - sol.mu_potentials[i]
                    - sol.nu_potentials[j];
                assert!(slack > -1e-9, "pair ({i},{j}) slack {slack}");
            }
        }
    }

    #[test]
    fn asymmetric_oracle_rejected() {
        let a = DiscreteMeasure::point(0.0).unwrap();
        let b = DiscreteMeasure::point(1.0).unwrap();
        let skew = |x: f64, y: f64| if x < y { y - x } else { 2.0 * (x - y) };
        assert!(matches!(
            wk_discrete(&a, &b, &skew, 1.0),
            Err(TransportError::Distance(_))
        ));
    }

    #[test]
    fn bad_measures_rejected() {
        assert!(DiscreteMeasure::new(vec![0.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![0.0, 1.0], vec![0.7, 0.7]).is_err());
        assert!(DiscreteMeasure::new(vec![], vec![]).is_err());
        assert!(DiscreteMeasure::new(vec![0.0], vec![-1.0]).is_err());
    }

    #[test]
    fn zero_iff_identical_as_weighted_support() {
        let a = m(vec![0.0, 1.0], vec![0.5, 0.5]);
        let b = m(vec![1.0, 0.0], vec![0.5, 0.5]);
        let d = wk_discrete(&a, &b, &line_metric, 1.0).unwrap();
        assert!(d.abs() < 1e-12);
        let c = m(vec![0.0, 1.0], vec![0.6, 0.4]);
        let d = wk_discrete(&a, &c, &line_metric, 1.0).unwrap();
        assert!(d > 0.05);
    }
}
