//! Epsilon-net discretization of metric parameter/action spaces with
//! Lipschitz risk, producing finite games whose values bracket the
//! continuous minimax value within k * epsilon.
//!
//! Built-in families only: location, Bernoulli with squared loss, and the
//! clamped-difference loss. Arbitrary user oracles would come with
//! unverifiable Lipschitz declarations, so they stay out of v1.

use serde::Serialize;
use thiserror::Error;

use crate::game::{bayes_floor, minimax_lp, GameError};
use crate::matrix::Mat;
use crate::model::{
    bayes_risk, FiniteDecisionProblem, FinitePrior, Label, ModelError, RandomizedProcedure,
};

#[derive(Debug, Error)]
pub enum DiscretizeError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("oracle returned {value} at theta={theta}, a={action}")]
    Evaluation {
        theta: f64,
        action: f64,
        value: f64,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// A bounded real interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, DiscretizeError> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(DiscretizeError::Input(format!(
                "[{lo}, {hi}] is not a bounded interval"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FamilyKind {
    /// loss |theta - a|, no data
    Location,
    /// one Bernoulli(theta) observation, loss (theta - a)^2
    BernoulliSquared,
    /// loss theta - a clamped to [-1, 1], no data
    Clamp,
}

/// A metric-space decision problem with interval parameter and action
/// spaces, a deterministic loss/kernel oracle, and a declared Lipschitz
/// modulus for the risk in theta (also covering the loss in a).
#[derive(Debug, Clone)]
pub struct MetricFamily {
    kind: FamilyKind,
    theta_interval: Interval,
    action_interval: Interval,
    lipschitz_k: f64,
}

impl MetricFamily {
    pub fn location(domain: Interval) -> Self {
        MetricFamily {
            kind: FamilyKind::Location,
            theta_interval: domain,
            action_interval: domain,
            lipschitz_k: 1.0,
        }
    }

    /// Parameter and action spaces are the unit interval; the risk
    /// derivative in theta is bounded by 3 on the unit square.
    pub fn bernoulli_squared() -> Self {
        let unit = Interval { lo: 0.0, hi: 1.0 };
        MetricFamily {
            kind: FamilyKind::BernoulliSquared,
            theta_interval: unit,
            action_interval: unit,
            lipschitz_k: 3.0,
        }
    }

    pub fn clamp(domain: Interval) -> Self {
        MetricFamily {
            kind: FamilyKind::Clamp,
            theta_interval: domain,
            action_interval: domain,
            lipschitz_k: 1.0,
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn family_id(&self) -> &'static str {
        match self.kind {
            FamilyKind::Location => "location",
            FamilyKind::BernoulliSquared => "bernoulli",
            FamilyKind::Clamp => "clamp",
        }
    }

    pub fn theta_interval(&self) -> Interval {
        self.theta_interval
    }

    pub fn action_interval(&self) -> Interval {
        self.action_interval
    }

    pub fn lipschitz_k(&self) -> f64 {
        self.lipschitz_k
    }

    pub fn loss(&self, theta: f64, action: f64) -> f64 {
        match self.kind {
            FamilyKind::Location => (theta - action).abs(),
            FamilyKind::BernoulliSquared => (theta - action) * (theta - action),
            FamilyKind::Clamp => (theta - action).clamp(-1.0, 1.0),
        }
    }

    pub fn n_obs(&self) -> usize {
        match self.kind {
            FamilyKind::Location | FamilyKind::Clamp => 1,
            FamilyKind::BernoulliSquared => 2,
        }
    }

    pub fn kernel_row(&self, theta: f64) -> Vec<f64> {
        match self.kind {
            FamilyKind::Location | FamilyKind::Clamp => vec![1.0],
            FamilyKind::BernoulliSquared => vec![1.0 - theta, theta],
        }
    }
}

/// Discrete solve at one mesh: the value interval [V, V + k*eps] contains
/// the continuous minimax value.
#[derive(Debug, Clone)]
pub struct ApproximationResult {
    pub mesh: f64,
    pub discrete_value: f64,
    /// least favorable prior of the discrete game, supported on the net
    pub prior: FinitePrior,
    /// the theta net carrying the prior
    pub net: Vec<f64>,
    /// [discrete_value, discrete_value + k * mesh]
    pub value_interval: (f64, f64),
    /// best achievable Bayes risk against the prior in the discrete game,
    /// recomputed independently of the LP objective
    pub prior_maximin: f64,
}

/// Evenly spaced points covering the interval within `mesh`, endpoints
/// included.
pub fn uniform_net(interval: Interval, mesh: f64) -> Result<Vec<f64>, DiscretizeError> {
    if !(mesh > 0.0 && mesh.is_finite()) {
        return Err(DiscretizeError::Input(format!(
            "mesh must be positive, got {mesh}"
        )));
    }
    let len = interval.length();
    if len == 0.0 {
        return Ok(vec![interval.lo]);
    }
    let segments = (len / mesh).ceil() as usize;
    let step = len / segments as f64;
    let mut points: Vec<f64> = (0..segments).map(|i| interval.lo + i as f64 * step).collect();
    points.push(interval.hi);
    Ok(points)
}

/// Replaces both the parameter and action spaces by their nets at the same
/// mesh and evaluates the oracle on the grid.
pub fn discretize(
    family: &MetricFamily,
    mesh: f64,
) -> Result<FiniteDecisionProblem, DiscretizeError> {
    let theta_net = uniform_net(family.theta_interval, mesh)?;
    let action_net = uniform_net(family.action_interval, mesh)?;
    discretize_on_nets(family, &theta_net, &action_net)
}

/// Evaluates the family's oracle on explicit parameter and action nets.
/// Refining only the parameter net can never lower the discrete value;
/// refining a shared net can move it either way, since the statistician
/// gains options too.
pub fn discretize_on_nets(
    family: &MetricFamily,
    theta_net: &[f64],
    action_net: &[f64],
) -> Result<FiniteDecisionProblem, DiscretizeError> {
    if theta_net.is_empty() || action_net.is_empty() {
        return Err(DiscretizeError::Input("empty net".into()));
    }

    let mut loss = Mat::zeros(theta_net.len(), action_net.len());
    for (i, &t) in theta_net.iter().enumerate() {
        for (j, &a) in action_net.iter().enumerate() {
            let v = family.loss(t, a);
            if !v.is_finite() {
                return Err(DiscretizeError::Evaluation {
                    theta: t,
                    action: a,
                    value: v,
                });
            }
            loss.set(i, j, v);
        }
    }

    let n_obs = family.n_obs();
    let mut kernel = Mat::zeros(theta_net.len(), n_obs);
    for (i, &t) in theta_net.iter().enumerate() {
        for (x, p) in family.kernel_row(t).into_iter().enumerate() {
            if !p.is_finite() {
                return Err(DiscretizeError::Evaluation {
                    theta: t,
                    action: x as f64,
                    value: p,
                });
            }
            kernel.set(i, x, p);
        }
    }

    let theta_labels = theta_net.iter().map(|&x| Label::from_f64_approx(x)).collect();
    let action_labels = action_net.iter().map(|&x| Label::from_f64_approx(x)).collect();
    let obs_labels = (0..n_obs).map(|x| Label::int(x as i64)).collect();

    Ok(FiniteDecisionProblem::new(
        theta_labels,
        action_labels,
        obs_labels,
        loss,
        kernel,
    )?)
}

/// Solves the discretized game and wraps the value in its certified
/// interval of width exactly k * mesh.
pub fn approximate_minimax(
    family: &MetricFamily,
    mesh: f64,
) -> Result<ApproximationResult, DiscretizeError> {
    let problem = discretize(family, mesh)?;
    let net = uniform_net(family.theta_interval, mesh)?;
    let solution = minimax_lp(&problem)?;
    let prior_maximin = bayes_floor(&problem, &solution.least_favorable_prior)?;
    let v = solution.value;
    let k = family.lipschitz_k;
    Ok(ApproximationResult {
        mesh,
        discrete_value: v,
        prior: solution.least_favorable_prior,
        net,
        value_interval: (v, v + k * mesh),
        prior_maximin,
    })
}

/// Runs `approximate_minimax` along a strictly decreasing mesh schedule,
/// yielding a sequence of finitely supported priors whose achievable Bayes
/// risks converge to the continuous value at rate k * mesh.
pub fn lf_prior_sequence(
    family: &MetricFamily,
    mesh_schedule: &[f64],
) -> Result<Vec<ApproximationResult>, DiscretizeError> {
    if mesh_schedule.is_empty() {
        return Err(DiscretizeError::Input("empty mesh schedule".into()));
    }
    for &eps in mesh_schedule {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(DiscretizeError::Input(format!(
                "mesh entries must be positive, got {eps}"
            )));
        }
    }
    for w in mesh_schedule.windows(2) {
        if w[1] >= w[0] {
            return Err(DiscretizeError::Input(format!(
                "mesh schedule must be strictly decreasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    mesh_schedule
        .iter()
        .map(|&eps| approximate_minimax(family, eps))
        .collect()
}

/// Bayes risk of `delta` against the discrete least favorable prior, in
/// excess of the discrete value. A procedure whose worst-case risk is within
/// eta of the continuous value has excess at most eta + k * mesh.
pub fn excess_bayes_risk(
    family: &MetricFamily,
    delta: &RandomizedProcedure,
    mesh: f64,
) -> Result<f64, DiscretizeError> {
    let problem = discretize(family, mesh)?;
    if delta.n_obs() != problem.n_obs() || delta.n_actions() != problem.n_actions() {
        return Err(DiscretizeError::Input(format!(
            "procedure is {}x{} but the net at mesh {mesh} gives {}x{}",
            delta.n_obs(),
            delta.n_actions(),
            problem.n_obs(),
            problem.n_actions()
        )));
    }
    let solution = minimax_lp(&problem)?;
    let br = bayes_risk(&problem, &solution.least_favorable_prior, delta)?;
    Ok(br - solution.value)
}
