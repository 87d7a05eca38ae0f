//! Finite statistical decision problems: parameter/action/observation sets,
//! loss matrices, sampling kernels, randomized procedures, priors, and exact
//! risk arithmetic.
//!
//! All types validate their invariants at construction and are immutable
//! afterwards, so every operation here is a pure function.

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::matrix::Mat;

/// Tolerance for probability rows and prior weights summing to one.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// A parameter, action, or observation label: an exact rational when the
/// space is numeric (so comparisons like "strictly below" are decided
/// exactly), a string otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Number(Rational64),
    Text(String),
}

impl Label {
    pub fn int(n: i64) -> Self {
        Label::Number(Rational64::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Label::Number(Rational64::new(num, den))
    }

    pub fn text(s: impl Into<String>) -> Self {
        Label::Text(s.into())
    }

    pub fn as_rational(&self) -> Option<Rational64> {
        match self {
            Label::Number(q) => Some(*q),
            Label::Text(_) => None,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.as_rational().and_then(|q| q.to_f64())
    }

    /// Closest rational to an f64, for labelling net points.
    pub fn from_f64_approx(x: f64) -> Self {
        match Rational64::approximate_float(x) {
            Some(q) => Label::Number(q),
            None => Label::Text(format!("{x}")),
        }
    }

    /// Parses "3", "-1/2", or free text.
    pub fn parse(s: &str) -> Self {
        if let Some((num, den)) = s.split_once('/') {
            if let (Ok(n), Ok(d)) = (num.trim().parse::<i64>(), den.trim().parse::<i64>()) {
                if d != 0 {
                    return Label::Number(Rational64::new(n, d));
                }
            }
        }
        if let Ok(n) = s.trim().parse::<i64>() {
            return Label::int(n);
        }
        Label::Text(s.to_string())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Number(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Label::Number(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Label::Text(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid problem:\n{0}")]
    Invalid(ValidationReport),
    #[error("invalid input: {0}")]
    Input(String),
}

/// One violated invariant, naming the offending row or cell.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub what: String,
}

/// Outcome of validating a candidate problem; empty iff the input is valid.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, what: impl Into<String>) {
        self.violations.push(Violation { what: what.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "- {}", v.what)?;
        }
        Ok(())
    }
}

/// Row-major matrix in a problem document: either nested rows or a flat
/// array reshaped against the label counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl MatrixSpec {
    fn to_mat(&self, rows: usize, cols: usize, what: &str) -> Result<Mat, ModelError> {
        let mat = match self {
            MatrixSpec::Rows(r) => Mat::from_rows(r.clone()),
            MatrixSpec::Flat(data) => Mat::from_flat(rows, cols, data.clone()),
        }
        .map_err(|e| ModelError::Dimension(format!("{what}: {e}")))?;
        Ok(mat)
    }
}

/// Unvalidated problem data; also the on-disk JSON document. `kernel` may be
/// omitted for no-data problems with a single observation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub theta: Vec<serde_json::Value>,
    pub actions: Vec<serde_json::Value>,
    pub observations: Vec<serde_json::Value>,
    pub loss: MatrixSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<MatrixSpec>,
}

fn label_from_json(v: &serde_json::Value) -> Result<Label, String> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Label::int(i))
            } else if let Some(x) = n.as_f64() {
                Ok(Label::from_f64_approx(x))
            } else {
                Err(format!("label {n} is not representable"))
            }
        }
        serde_json::Value::String(s) => Ok(Label::parse(s)),
        other => Err(format!("label {other} must be a number or string")),
    }
}

fn label_to_json(l: &Label) -> serde_json::Value {
    match l {
        Label::Number(q) if q.is_integer() => serde_json::Value::from(*q.numer()),
        other => serde_json::Value::String(other.to_string()),
    }
}

/// A finite statistical decision problem: parameter set, action set,
/// observation set, loss matrix, and sampling kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDecisionProblem {
    theta_labels: Vec<Label>,
    action_labels: Vec<Label>,
    obs_labels: Vec<Label>,
    /// |Theta| x |A|
    loss: Mat,
    /// |Theta| x |X|, each row a probability vector
    kernel: Mat,
}

fn check_labels(report: &mut ValidationReport, name: &str, labels: &[Label]) {
    if labels.is_empty() {
        report.push(format!("{name} label list is empty"));
    }
    for i in 0..labels.len() {
        for j in (i + 1)..labels.len() {
            if labels[i] == labels[j] {
                report.push(format!(
                    "{name} labels {i} and {j} are duplicates ({})",
                    labels[i]
                ));
            }
        }
    }
}

impl FiniteDecisionProblem {
    /// Validates and builds; rejects rather than repairs (a kernel row that
    /// fails to sum to one is a modeling bug, not something to renormalize).
    pub fn new(
        theta_labels: Vec<Label>,
        action_labels: Vec<Label>,
        obs_labels: Vec<Label>,
        loss: Mat,
        kernel: Mat,
    ) -> Result<Self, ModelError> {
        let report = Self::validate_parts(&theta_labels, &action_labels, &obs_labels, &loss, &kernel);
        if report.is_empty() {
            Ok(FiniteDecisionProblem {
                theta_labels,
                action_labels,
                obs_labels,
                loss,
                kernel,
            })
        } else {
            Err(ModelError::Invalid(report))
        }
    }

    /// Convenience constructor for no-data problems (a single observation
    /// that occurs with probability one under every parameter).
    pub fn no_data(
        theta_labels: Vec<Label>,
        action_labels: Vec<Label>,
        loss: Mat,
    ) -> Result<Self, ModelError> {
        let n = theta_labels.len();
        let kernel = Mat::from_flat(n, 1, vec![1.0; n]).map_err(ModelError::Dimension)?;
        Self::new(theta_labels, action_labels, vec![Label::int(0)], loss, kernel)
    }

    /// Lists every violated invariant of the candidate parts; the report is
    /// empty iff `new` would accept them.
    pub fn validate_parts(
        theta_labels: &[Label],
        action_labels: &[Label],
        obs_labels: &[Label],
        loss: &Mat,
        kernel: &Mat,
    ) -> ValidationReport {
        let mut report = ValidationReport::default();
        check_labels(&mut report, "theta", theta_labels);
        check_labels(&mut report, "action", action_labels);
        check_labels(&mut report, "observation", obs_labels);

        if loss.nrows() != theta_labels.len() || loss.ncols() != action_labels.len() {
            report.push(format!(
                "loss matrix is {}x{}, expected {}x{}",
                loss.nrows(),
                loss.ncols(),
                theta_labels.len(),
                action_labels.len()
            ));
        }
        if kernel.nrows() != theta_labels.len() || kernel.ncols() != obs_labels.len() {
            report.push(format!(
                "kernel matrix is {}x{}, expected {}x{}",
                kernel.nrows(),
                kernel.ncols(),
                theta_labels.len(),
                obs_labels.len()
            ));
        }

        for r in 0..loss.nrows() {
            for c in 0..loss.ncols() {
                if !loss.at(r, c).is_finite() {
                    report.push(format!("loss entry ({r},{c}) is not finite"));
                }
            }
        }
        for r in 0..kernel.nrows() {
            let mut sum = 0.0;
            let mut bad = false;
            for c in 0..kernel.ncols() {
                let p = kernel.at(r, c);
                if !p.is_finite() || p < 0.0 {
                    report.push(format!("kernel entry ({r},{c}) = {p} is not a probability"));
                    bad = true;
                }
                sum += p;
            }
            if !bad && (sum - 1.0).abs() > ROW_SUM_TOL {
                report.push(format!("kernel row {r} sums to {sum}, expected 1"));
            }
        }
        report
    }

    pub fn from_spec(spec: &ProblemSpec) -> Result<Self, ModelError> {
        let theta = spec
            .theta
            .iter()
            .map(label_from_json)
            .collect::<Result<Vec<_>, _>>()
            .map_err(ModelError::Input)?;
        let actions = spec
            .actions
            .iter()
            .map(label_from_json)
            .collect::<Result<Vec<_>, _>>()
            .map_err(ModelError::Input)?;
        let observations = spec
            .observations
            .iter()
            .map(label_from_json)
            .collect::<Result<Vec<_>, _>>()
            .map_err(ModelError::Input)?;
        let loss = spec.loss.to_mat(theta.len(), actions.len(), "loss")?;
        let kernel = match &spec.kernel {
            Some(k) => k.to_mat(theta.len(), observations.len(), "kernel")?,
            None => {
                if observations.len() != 1 {
                    return Err(ModelError::Input(
                        "kernel may only be omitted when there is exactly one observation".into(),
                    ));
                }
                Mat::from_flat(theta.len(), 1, vec![1.0; theta.len()])
                    .map_err(ModelError::Dimension)?
            }
        };
        Self::new(theta, actions, observations, loss, kernel)
    }

    pub fn to_spec(&self) -> ProblemSpec {
        ProblemSpec {
            theta: self.theta_labels.iter().map(label_to_json).collect(),
            actions: self.action_labels.iter().map(label_to_json).collect(),
            observations: self.obs_labels.iter().map(label_to_json).collect(),
            loss: MatrixSpec::Rows(self.loss.to_nested()),
            kernel: Some(MatrixSpec::Rows(self.kernel.to_nested())),
        }
    }

    pub fn n_theta(&self) -> usize {
        self.theta_labels.len()
    }

    pub fn n_actions(&self) -> usize {
        self.action_labels.len()
    }

    pub fn n_obs(&self) -> usize {
        self.obs_labels.len()
    }

    pub fn theta_labels(&self) -> &[Label] {
        &self.theta_labels
    }

    pub fn action_labels(&self) -> &[Label] {
        &self.action_labels
    }

    pub fn obs_labels(&self) -> &[Label] {
        &self.obs_labels
    }

    pub fn loss(&self) -> &Mat {
        &self.loss
    }

    pub fn kernel(&self) -> &Mat {
        &self.kernel
    }

    pub fn loss_at(&self, theta: usize, action: usize) -> f64 {
        self.loss.at(theta, action)
    }

    pub fn kernel_at(&self, theta: usize, obs: usize) -> f64 {
        self.kernel.at(theta, obs)
    }
}

/// An observation-to-action kernel: row `x` is the probability distribution
/// over actions taken after observing `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomizedProcedure {
    matrix: Mat,
}

impl RandomizedProcedure {
    pub fn new(matrix: Mat) -> Result<Self, ModelError> {
        for r in 0..matrix.nrows() {
            let mut sum = 0.0;
            for c in 0..matrix.ncols() {
                let p = matrix.at(r, c);
                if !p.is_finite() || p < 0.0 {
                    return Err(ModelError::Input(format!(
                        "procedure entry ({r},{c}) = {p} is not a probability"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(ModelError::Input(format!(
                    "procedure row {r} sums to {sum}, expected 1"
                )));
            }
        }
        Ok(RandomizedProcedure { matrix })
    }

    /// The non-randomized procedure that always takes `action`.
    pub fn point_mass(n_obs: usize, action: usize, n_actions: usize) -> Result<Self, ModelError> {
        if action >= n_actions {
            return Err(ModelError::Input(format!(
                "action index {action} out of range {n_actions}"
            )));
        }
        let mut m = Mat::zeros(n_obs, n_actions);
        for x in 0..n_obs {
            m.set(x, action, 1.0);
        }
        Ok(RandomizedProcedure { matrix: m })
    }

    /// The non-randomized procedure mapping observation `x` to `rule[x]`.
    pub fn from_rule(rule: &[usize], n_actions: usize) -> Result<Self, ModelError> {
        let mut m = Mat::zeros(rule.len(), n_actions);
        for (x, &a) in rule.iter().enumerate() {
            if a >= n_actions {
                return Err(ModelError::Input(format!(
                    "action index {a} out of range {n_actions}"
                )));
            }
            m.set(x, a, 1.0);
        }
        Ok(RandomizedProcedure { matrix: m })
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn n_obs(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_actions(&self) -> usize {
        self.matrix.ncols()
    }
}

/// A finitely supported prior: one weight per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePrior {
    weights: Vec<f64>,
}

impl FinitePrior {
    pub fn new(weights: Vec<f64>) -> Result<Self, ModelError> {
        if weights.is_empty() {
            return Err(ModelError::Input("prior has no weights".into()));
        }
        let mut sum = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(ModelError::Input(format!(
                    "prior weight {i} = {w} is not a probability"
                )));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(ModelError::Input(format!(
                "prior weights sum to {sum}, expected 1"
            )));
        }
        Ok(FinitePrior { weights })
    }

    pub fn uniform(n: usize) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::Input("prior has no weights".into()));
        }
        let mut w = vec![1.0 / n as f64; n];
        // Make the sum exactly one.
        let partial: f64 = w[..n - 1].iter().sum();
        w[n - 1] = 1.0 - partial;
        FinitePrior::new(w)
    }

    pub fn degenerate(n: usize, at: usize) -> Result<Self, ModelError> {
        if at >= n {
            return Err(ModelError::Input(format!(
                "support index {at} out of range {n}"
            )));
        }
        let mut w = vec![0.0; n];
        w[at] = 1.0;
        FinitePrior::new(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Indices with strictly positive weight.
    pub fn support(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// The risk function of one procedure, restricted to the finite parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskProfile {
    pub values: Vec<f64>,
}

fn check_procedure_dims(
    problem: &FiniteDecisionProblem,
    delta: &RandomizedProcedure,
) -> Result<(), ModelError> {
    if delta.n_obs() != problem.n_obs() || delta.n_actions() != problem.n_actions() {
        return Err(ModelError::Dimension(format!(
            "procedure is {}x{}, problem expects {}x{}",
            delta.n_obs(),
            delta.n_actions(),
            problem.n_obs(),
            problem.n_actions()
        )));
    }
    Ok(())
}

/// Expected loss of `delta` when the parameter is `theta_index`:
/// sum over observations x of P_theta(x) * sum over actions a of
/// delta(x,a) * loss(theta,a).
pub fn risk(
    problem: &FiniteDecisionProblem,
    theta_index: usize,
    delta: &RandomizedProcedure,
) -> Result<f64, ModelError> {
    check_procedure_dims(problem, delta)?;
    if theta_index >= problem.n_theta() {
        return Err(ModelError::Dimension(format!(
            "theta index {theta_index} out of range {}",
            problem.n_theta()
        )));
    }
    let mut total = 0.0;
    for x in 0..problem.n_obs() {
        let px = problem.kernel_at(theta_index, x);
        if px == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for a in 0..problem.n_actions() {
            inner += delta.matrix().at(x, a) * problem.loss_at(theta_index, a);
        }
        total += px * inner;
    }
    Ok(total)
}

/// Risk at every parameter.
pub fn risk_profile(
    problem: &FiniteDecisionProblem,
    delta: &RandomizedProcedure,
) -> Result<RiskProfile, ModelError> {
    let values = (0..problem.n_theta())
        .map(|t| risk(problem, t, delta))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RiskProfile { values })
}

/// Prior-weighted average of the risk.
pub fn bayes_risk(
    problem: &FiniteDecisionProblem,
    prior: &FinitePrior,
    delta: &RandomizedProcedure,
) -> Result<f64, ModelError> {
    if prior.len() != problem.n_theta() {
        return Err(ModelError::Dimension(format!(
            "prior has {} weights, problem has {} parameters",
            prior.len(),
            problem.n_theta()
        )));
    }
    let mut total = 0.0;
    for (t, &w) in prior.weights().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        total += w * risk(problem, t, delta)?;
    }
    Ok(total)
}

/// Maximum risk over the parameter set.
pub fn worst_case_risk(
    problem: &FiniteDecisionProblem,
    delta: &RandomizedProcedure,
) -> Result<f64, ModelError> {
    let profile = risk_profile(problem, delta)?;
    Ok(profile
        .values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Convex combination of procedures; risk is linear in the mixture.
pub fn mix_procedures(
    deltas: &[RandomizedProcedure],
    weights: &[f64],
) -> Result<RandomizedProcedure, ModelError> {
    if deltas.is_empty() {
        return Err(ModelError::Input("cannot mix an empty procedure list".into()));
    }
    if deltas.len() != weights.len() {
        return Err(ModelError::Input(format!(
            "{} procedures but {} weights",
            deltas.len(),
            weights.len()
        )));
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| !w.is_finite() || w < 0.0) || (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(ModelError::Input(format!(
            "mixture weights must be nonnegative and sum to 1, got sum {sum}"
        )));
    }
    let (rows, cols) = (deltas[0].n_obs(), deltas[0].n_actions());
    for d in deltas {
        if d.n_obs() != rows || d.n_actions() != cols {
            return Err(ModelError::Dimension(
                "procedures in a mixture must share a shape".into(),
            ));
        }
    }
    let mut m = Mat::zeros(rows, cols);
    for (d, &w) in deltas.iter().zip(weights) {
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, m.at(r, c) + w * d.matrix().at(r, c));
            }
        }
    }
    RandomizedProcedure::new(m)
}
