//! Exact minimax solving of finite statistical games.
//!
//! The behavioral-strategy LP has one variable per (observation, action)
//! pair plus a level variable t: minimize t subject to the risk at every
//! parameter staying at or below t and each observation row of the procedure
//! summing to one. The duals of the risk constraints, normalized, form a
//! least favorable prior, so one solve returns the game value, a minimax
//! procedure, and a prior certifying it.

use serde::Serialize;
use thiserror::Error;

use crate::lp::{solve_lp, LinearProgram, LpError, LpStatus, Relation, VarBound};
use crate::matrix::Mat;
use crate::model::{
    bayes_risk, risk_profile, worst_case_risk, FiniteDecisionProblem, FinitePrior, ModelError,
    RandomizedProcedure,
};

#[derive(Debug, Error)]
pub enum GameError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal solver error: {0}")]
    Internal(String),
}

/// Value, minimax procedure, least favorable prior, and the recomputed
/// duality gap between the procedure's worst-case risk and the prior's
/// achievable Bayes risk.
#[derive(Debug, Clone)]
pub struct GameSolution {
    pub value: f64,
    pub minimax_procedure: RandomizedProcedure,
    pub least_favorable_prior: FinitePrior,
    pub duality_gap: f64,
}

/// A restricted game: nature confined to `theta_subset`, the statistician to
/// convex combinations of `procedure_set`, compared against risk level
/// `level`.
#[derive(Debug, Clone)]
pub struct SeparationQuery {
    pub theta_subset: Vec<usize>,
    pub procedure_set: Vec<RandomizedProcedure>,
    pub level: f64,
}

/// Machine-readable solve report (the CLI's JSON payload).
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub value: f64,
    pub procedure: Vec<Vec<f64>>,
    pub prior: Vec<f64>,
    pub gap: f64,
    pub certified: bool,
}

/// Best achievable Bayes risk against `prior`: the infimum over all
/// procedures, attained by acting pointwise optimally per observation.
pub fn bayes_floor(
    problem: &FiniteDecisionProblem,
    prior: &FinitePrior,
) -> Result<f64, GameError> {
    let w = posterior_weighted_losses(problem, prior)?;
    let mut total = 0.0;
    for x in 0..problem.n_obs() {
        let row = w.row(x);
        total += row.iter().copied().fold(f64::INFINITY, f64::min);
    }
    Ok(total)
}

/// The non-randomized procedure attaining `bayes_floor` (lowest action index
/// on ties).
pub fn bayes_response(
    problem: &FiniteDecisionProblem,
    prior: &FinitePrior,
) -> Result<RandomizedProcedure, GameError> {
    let w = posterior_weighted_losses(problem, prior)?;
    let rule: Vec<usize> = (0..problem.n_obs())
        .map(|x| argmin(w.row(x)))
        .collect();
    Ok(RandomizedProcedure::from_rule(&rule, problem.n_actions())?)
}

/// W(x,a) = sum over theta of prior(theta) * P_theta(x) * loss(theta,a).
fn posterior_weighted_losses(
    problem: &FiniteDecisionProblem,
    prior: &FinitePrior,
) -> Result<Mat, GameError> {
    if prior.len() != problem.n_theta() {
        return Err(GameError::Input(format!(
            "prior has {} weights, problem has {} parameters",
            prior.len(),
            problem.n_theta()
        )));
    }
    let mut w = Mat::zeros(problem.n_obs(), problem.n_actions());
    for (t, &p) in prior.weights().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for x in 0..problem.n_obs() {
            let px = p * problem.kernel_at(t, x);
            if px == 0.0 {
                continue;
            }
            for a in 0..problem.n_actions() {
                w.set(x, a, w.at(x, a) + px * problem.loss_at(t, a));
            }
        }
    }
    Ok(w)
}

fn argmin(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v < row[best] {
            best = i;
        }
    }
    best
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

fn min_loss(problem: &FiniteDecisionProblem) -> f64 {
    let mut m = f64::INFINITY;
    for t in 0..problem.n_theta() {
        for a in 0..problem.n_actions() {
            m = m.min(problem.loss_at(t, a));
        }
    }
    m
}

/// Clamps stray negatives from the solver and rescales to an exact
/// probability vector.
fn normalize_weights(raw: &[f64], what: &str) -> Result<Vec<f64>, GameError> {
    let cleaned: Vec<f64> = raw.iter().map(|&v| v.max(0.0)).collect();
    let sum: f64 = cleaned.iter().sum();
    if !(0.5..=1.5).contains(&sum) {
        return Err(GameError::Internal(format!(
            "{what} weights sum to {sum}, expected about 1"
        )));
    }
    Ok(cleaned.into_iter().map(|v| v / sum).collect())
}

/// Solves the finite game exactly. The minimax equality holds for finite
/// parameter sets, so the returned duality gap is a numerical residual, not
/// a model property.
pub fn minimax_lp(problem: &FiniteDecisionProblem) -> Result<GameSolution, GameError> {
    let n_theta = problem.n_theta();
    let n_obs = problem.n_obs();
    let n_act = problem.n_actions();
    let n_delta = n_obs * n_act;
    let n_vars = n_delta + 1; // level variable t is last
    let t_col = n_delta;

    let mut objective = vec![0.0; n_vars];
    objective[t_col] = 1.0;

    let mut rows = Vec::with_capacity(n_theta + n_obs);
    let mut relations = Vec::with_capacity(n_theta + n_obs);
    let mut rhs = Vec::with_capacity(n_theta + n_obs);

    for t in 0..n_theta {
        let mut row = vec![0.0; n_vars];
        for x in 0..n_obs {
            let px = problem.kernel_at(t, x);
            if px == 0.0 {
                continue;
            }
            for a in 0..n_act {
                row[x * n_act + a] = px * problem.loss_at(t, a);
            }
        }
        row[t_col] = -1.0;
        rows.push(row);
        relations.push(Relation::Le);
        rhs.push(0.0);
    }
    for x in 0..n_obs {
        let mut row = vec![0.0; n_vars];
        for a in 0..n_act {
            row[x * n_act + a] = 1.0;
        }
        rows.push(row);
        relations.push(Relation::Eq);
        rhs.push(1.0);
    }

    let mut lp = LinearProgram::new(
        objective,
        Mat::from_rows(rows).map_err(GameError::Internal)?,
        relations,
        rhs,
    );
    // any worst-case risk is at least the smallest loss entry, so this bound
    // is never active and t stays basic, which pins the dual normalization
    lp.bounds[t_col] = VarBound {
        lower: min_loss(problem) - 1.0,
        upper: None,
    };

    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(GameError::Internal(format!(
            "game LP reported {:?}; every valid problem is feasible and bounded",
            sol.status
        )));
    }

    let mut proc_rows = Vec::with_capacity(n_obs);
    for x in 0..n_obs {
        let raw = &sol.primal[x * n_act..(x + 1) * n_act];
        proc_rows.push(normalize_weights(raw, "procedure row")?);
    }
    let minimax_procedure =
        RandomizedProcedure::new(Mat::from_rows(proc_rows).map_err(GameError::Internal)?)?;

    let prior_raw: Vec<f64> = sol.dual[..n_theta].iter().map(|y| -y).collect();
    let least_favorable_prior = FinitePrior::new(normalize_weights(&prior_raw, "prior")?)?;

    let upper = worst_case_risk(problem, &minimax_procedure)?;
    let lower = bayes_floor(problem, &least_favorable_prior)?;

    Ok(GameSolution {
        value: sol.objective_value,
        minimax_procedure,
        least_favorable_prior,
        duality_gap: upper - lower,
    })
}

/// Result of iterative best-response play: certified bounds on the game
/// value plus the empirical mixed strategies that produced them.
#[derive(Debug, Clone)]
pub struct FictitiousPlay {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub empirical_prior: FinitePrior,
    pub empirical_procedure: RandomizedProcedure,
}

/// Independent iterative bracket for the game value. Nature opens at
/// parameter index 0; thereafter both sides best-respond to the opponent's
/// empirical average, ties broken by lowest index. The bounds are the
/// best-response payoffs against the final averages, so
/// `lower_bound <= value <= upper_bound` holds regardless of convergence.
pub fn fictitious_play(
    problem: &FiniteDecisionProblem,
    iterations: u64,
) -> Result<FictitiousPlay, GameError> {
    if iterations == 0 {
        return Err(GameError::Input("iterations must be at least 1".into()));
    }
    let n_theta = problem.n_theta();
    let n_obs = problem.n_obs();
    let n_act = problem.n_actions();

    let mut cum_w = Mat::zeros(n_obs, n_act); // nature's cumulative payoff table
    let mut cum_risk = vec![0.0; n_theta]; // statistician's cumulative risk profile
    let mut theta_counts = vec![0u64; n_theta];
    let mut action_counts = Mat::zeros(n_obs, n_act);
    let mut rule = vec![0usize; n_obs];

    for it in 0..iterations {
        let theta = if it == 0 { 0 } else { argmax(&cum_risk) };
        theta_counts[theta] += 1;
        for x in 0..n_obs {
            let px = problem.kernel_at(theta, x);
            if px == 0.0 {
                continue;
            }
            for a in 0..n_act {
                cum_w.set(x, a, cum_w.at(x, a) + px * problem.loss_at(theta, a));
            }
        }
        for x in 0..n_obs {
            rule[x] = argmin(cum_w.row(x));
            action_counts.set(x, rule[x], action_counts.at(x, rule[x]) + 1.0);
        }
        for t in 0..n_theta {
            let mut r = 0.0;
            for x in 0..n_obs {
                r += problem.kernel_at(t, x) * problem.loss_at(t, rule[x]);
            }
            cum_risk[t] += r;
        }
    }

    let total = iterations as f64;
    let prior_weights: Vec<f64> = theta_counts.iter().map(|&c| c as f64 / total).collect();
    let empirical_prior = FinitePrior::new(prior_weights)?;
    let mut proc = Mat::zeros(n_obs, n_act);
    for x in 0..n_obs {
        for a in 0..n_act {
            proc.set(x, a, action_counts.at(x, a) / total);
        }
    }
    let empirical_procedure = RandomizedProcedure::new(proc)?;

    let upper_bound = worst_case_risk(problem, &empirical_procedure)?;
    let lower_bound = bayes_floor(problem, &empirical_prior)?;

    Ok(FictitiousPlay {
        lower_bound,
        upper_bound,
        empirical_prior,
        empirical_procedure,
    })
}

/// worst_case_risk(delta) - bayes_risk(prior, delta): nonnegative up to
/// rounding, since a maximum dominates any average.
pub fn weak_duality_gap(
    problem: &FiniteDecisionProblem,
    delta: &RandomizedProcedure,
    prior: &FinitePrior,
) -> Result<f64, GameError> {
    Ok(worst_case_risk(problem, delta)? - bayes_risk(problem, prior, delta)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct SaddleCheck {
    pub name: String,
    pub value: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SaddleReport {
    pub checks: Vec<SaddleCheck>,
    pub pass: bool,
}

/// Checks a claimed solution: (i) the procedure's worst-case risk is at most
/// value + tol; (ii) every non-randomized procedure has Bayes risk at least
/// value - tol against the prior. Linearity of Bayes risk in the procedure
/// makes (ii) over non-randomized rules sufficient, and the pointwise floor
/// computes exactly that infimum.
pub fn certify_saddle(
    problem: &FiniteDecisionProblem,
    solution: &GameSolution,
    tol: f64,
) -> Result<SaddleReport, GameError> {
    let upper = worst_case_risk(problem, &solution.minimax_procedure)?;
    let floor = bayes_floor(problem, &solution.least_favorable_prior)?;
    let checks = vec![
        SaddleCheck {
            name: "procedure_worst_case".into(),
            value: upper - solution.value,
            ok: upper <= solution.value + tol,
        },
        SaddleCheck {
            name: "prior_bayes_floor".into(),
            value: solution.value - floor,
            ok: floor >= solution.value - tol,
        },
    ];
    let pass = checks.iter().all(|c| c.ok);
    Ok(SaddleReport { checks, pass })
}

fn subgame_solve(
    problem: &FiniteDecisionProblem,
    theta_subset: &[usize],
    procedures: &[RandomizedProcedure],
) -> Result<(f64, Vec<f64>), GameError> {
    if theta_subset.is_empty() {
        return Err(GameError::Input("empty parameter subset".into()));
    }
    if procedures.is_empty() {
        return Err(GameError::Input("empty procedure set".into()));
    }
    for &t in theta_subset {
        if t >= problem.n_theta() {
            return Err(GameError::Input(format!(
                "theta index {t} out of range {}",
                problem.n_theta()
            )));
        }
    }

    // risk table for the restricted game
    let profiles: Vec<Vec<f64>> = procedures
        .iter()
        .map(|d| risk_profile(problem, d).map(|p| p.values))
        .collect::<Result<_, _>>()?;

    let k = procedures.len();
    let n_vars = k + 1;
    let t_col = k;
    let mut objective = vec![0.0; n_vars];
    objective[t_col] = 1.0;

    let mut rows = Vec::with_capacity(theta_subset.len() + 1);
    let mut relations = Vec::with_capacity(theta_subset.len() + 1);
    let mut rhs = Vec::with_capacity(theta_subset.len() + 1);
    let mut lowest = f64::INFINITY;
    for &t in theta_subset {
        let mut row = vec![0.0; n_vars];
        for (i, prof) in profiles.iter().enumerate() {
            row[i] = prof[t];
            lowest = lowest.min(prof[t]);
        }
        row[t_col] = -1.0;
        rows.push(row);
        relations.push(Relation::Le);
        rhs.push(0.0);
    }
    let mut sum_row = vec![1.0; n_vars];
    sum_row[t_col] = 0.0;
    rows.push(sum_row);
    relations.push(Relation::Eq);
    rhs.push(1.0);

    let mut lp = LinearProgram::new(
        objective,
        Mat::from_rows(rows).map_err(GameError::Internal)?,
        relations,
        rhs,
    );
    lp.bounds[t_col] = VarBound {
        lower: lowest - 1.0,
        upper: None,
    };

    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(GameError::Internal(format!(
            "subgame LP reported {:?}",
            sol.status
        )));
    }
    let duals: Vec<f64> = sol.dual[..theta_subset.len()].iter().map(|y| -y).collect();
    Ok((sol.objective_value, duals))
}

/// min over convex combinations of the query's procedures of the max risk
/// over the query's parameter subset. The restricted risk set misses the
/// orthant at or below `query.level` iff the returned value exceeds it.
pub fn subgame_value(
    problem: &FiniteDecisionProblem,
    query: &SeparationQuery,
) -> Result<f64, GameError> {
    if !query.level.is_finite() {
        return Err(GameError::Input("level must be finite".into()));
    }
    let (value, _) = subgame_solve(problem, &query.theta_subset, &query.procedure_set)?;
    Ok(value)
}

/// Extracts a finite parameter set certifying that the restricted game value
/// exceeds `level`: the support of the dual optimum over the full parameter
/// set. Errors if the full-game value does not exceed the level.
pub fn finite_certificate_support(
    problem: &FiniteDecisionProblem,
    procedures: &[RandomizedProcedure],
    level: f64,
) -> Result<Vec<usize>, GameError> {
    let all: Vec<usize> = (0..problem.n_theta()).collect();
    let (value, duals) = subgame_solve(problem, &all, procedures)?;
    if value <= level {
        return Err(GameError::Input(format!(
            "full parameter set gives value {value} <= level {level}; no certificate exists"
        )));
    }
    let support: Vec<usize> = duals
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 1e-9)
        .map(|(i, _)| i)
        .collect();
    if support.is_empty() {
        return Err(GameError::Internal(
            "dual optimum of the subgame LP has empty support".into(),
        ));
    }
    Ok(support)
}

/// Solve and certify in one step; `certified` reflects `certify_saddle` at
/// the given tolerance.
pub fn solve_report(
    problem: &FiniteDecisionProblem,
    tol: f64,
) -> Result<(GameSolution, SolveReport), GameError> {
    let solution = minimax_lp(problem)?;
    let report = certify_saddle(problem, &solution, tol)?;
    let solve = SolveReport {
        value: solution.value,
        procedure: solution.minimax_procedure.matrix().to_nested(),
        prior: solution.least_favorable_prior.weights().to_vec(),
        gap: solution.duality_gap,
        certified: report.pass,
    };
    Ok((solution, solve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{binary_detection_game, pick_smaller_game};
    use crate::model::Label;

    #[test]
    fn pick_smaller_value_is_zero() {
        let p = pick_smaller_game(5).unwrap();
        let sol = minimax_lp(&p).unwrap();
        assert!(sol.value.abs() < 1e-9, "value {}", sol.value);
        assert!(sol.duality_gap.abs() < 1e-9);
    }

    #[test]
    fn binary_detection_value_quarter() {
        let p = binary_detection_game().unwrap();
        let sol = minimax_lp(&p).unwrap();
        assert!((sol.value - 0.25).abs() < 1e-9, "value {}", sol.value);

        // independent oracle: enumerate all four non-randomized rules
        let mut best_worst = f64::INFINITY;
        for rule in [[0usize, 0], [0, 1], [1, 0], [1, 1]] {
            let d = RandomizedProcedure::from_rule(&rule, 2).unwrap();
            best_worst = best_worst.min(worst_case_risk(&p, &d).unwrap());
        }
        assert!((best_worst - 0.25).abs() < 1e-12);

        // the uniform prior is least favorable, and so is the returned
        // dual (the optimal face is flat between (1/4,3/4) and (3/4,1/4);
        // Bland picks a deterministic vertex of it)
        let uniform = FinitePrior::uniform(2).unwrap();
        assert!((bayes_floor(&p, &uniform).unwrap() - 0.25).abs() < 1e-12);
        let returned = bayes_floor(&p, &sol.least_favorable_prior).unwrap();
        assert!((returned - 0.25).abs() < 1e-9, "floor {returned}");
    }

    #[test]
    fn zero_loss_game() {
        let p = FiniteDecisionProblem::no_data(
            vec![Label::int(0), Label::int(1)],
            vec![Label::int(0), Label::int(1)],
            Mat::zeros(2, 2),
        )
        .unwrap();
        let sol = minimax_lp(&p).unwrap();
        assert!(sol.value.abs() < 1e-12);
        assert!(sol.duality_gap.abs() < 1e-12);
        let report = certify_saddle(&p, &sol, 1e-8).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn saddle_rejects_skewed_prior() {
        let p = binary_detection_game().unwrap();
        let mut sol = minimax_lp(&p).unwrap();
        sol.least_favorable_prior = FinitePrior::new(vec![0.9, 0.1]).unwrap();
        let report = certify_saddle(&p, &sol, 1e-8).unwrap();
        assert!(!report.pass);
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.ok)
            .map(|c| c.name.as_str())
            .collect();
        assert_eq!(failed, vec!["prior_bayes_floor"]);
        // by hand: the floor against (0.9, 0.1) is 0.075 + 0.025 = 0.1
        let floor = bayes_floor(&p, &sol.least_favorable_prior).unwrap();
        assert!((floor - 0.1).abs() < 1e-12, "floor {floor}");
    }

    #[test]
    fn fictitious_play_brackets_known_values() {
        let p = pick_smaller_game(4).unwrap();
        let fp = fictitious_play(&p, 10_000).unwrap();
        assert!(fp.lower_bound <= 1e-9 && fp.upper_bound >= -1e-9);

        let b = binary_detection_game().unwrap();
        let fp = fictitious_play(&b, 20_000).unwrap();
        assert!(fp.lower_bound <= 0.25 + 1e-9);
        assert!(fp.upper_bound >= 0.25 - 1e-9);
        assert!(
            fp.upper_bound - fp.lower_bound < 0.05,
            "bracket [{}, {}]",
            fp.lower_bound,
            fp.upper_bound
        );
    }

    #[test]
    fn fictitious_play_single_cell() {
        let p = FiniteDecisionProblem::no_data(
            vec![Label::int(0)],
            vec![Label::int(0)],
            Mat::from_rows(vec![vec![0.7]]).unwrap(),
        )
        .unwrap();
        let fp = fictitious_play(&p, 1).unwrap();
        assert_eq!(fp.lower_bound, 0.7);
        assert_eq!(fp.upper_bound, 0.7);
    }

    #[test]
    fn fictitious_play_rejects_zero_iterations() {
        let p = pick_smaller_game(2).unwrap();
        assert!(matches!(
            fictitious_play(&p, 0),
            Err(GameError::Input(_))
        ));
    }

    #[test]
    fn weak_duality_saddle_and_degenerate() {
        let p = binary_detection_game().unwrap();
        let sol = minimax_lp(&p).unwrap();
        let gap = weak_duality_gap(
            &p,
            &sol.minimax_procedure,
            &sol.least_favorable_prior,
        )
        .unwrap();
        assert!((-1e-12..=2e-9).contains(&gap), "gap {gap}");

        // degenerate prior at the argmax parameter closes the gap exactly
        let d = RandomizedProcedure::from_rule(&[0, 0], 2).unwrap();
        let profile = risk_profile(&p, &d).unwrap();
        let worst = argmax(&profile.values);
        let prior = FinitePrior::degenerate(2, worst).unwrap();
        assert_eq!(weak_duality_gap(&p, &d, &prior).unwrap(), 0.0);
    }

    #[test]
    fn subgame_values() {
        let p = binary_detection_game().unwrap();
        let sol = minimax_lp(&p).unwrap();
        let q = SeparationQuery {
            theta_subset: vec![0, 1],
            procedure_set: vec![sol.minimax_procedure.clone()],
            level: 0.2,
        };
        let v = subgame_value(&p, &q).unwrap();
        let w = worst_case_risk(&p, &sol.minimax_procedure).unwrap();
        assert!((v - w).abs() < 1e-9);
        assert!(v > q.level);

        // single parameter, two point-mass procedures: min of the two risks
        let d0 = RandomizedProcedure::point_mass(2, 0, 2).unwrap();
        let d1 = RandomizedProcedure::point_mass(2, 1, 2).unwrap();
        let q = SeparationQuery {
            theta_subset: vec![0],
            procedure_set: vec![d0.clone(), d1.clone()],
            level: 0.0,
        };
        let v = subgame_value(&p, &q).unwrap();
        let r0 = crate::model::risk(&p, 0, &d0).unwrap();
        let r1 = crate::model::risk(&p, 0, &d1).unwrap();
        assert!((v - r0.min(r1)).abs() < 1e-9);

        // full pick-smaller game over its point-mass actions has value zero
        let ps = pick_smaller_game(3).unwrap();
        let all: Vec<RandomizedProcedure> = (0..3)
            .map(|a| RandomizedProcedure::point_mass(1, a, 3).unwrap())
            .collect();
        let q = SeparationQuery {
            theta_subset: vec![0, 1, 2],
            procedure_set: all,
            level: -0.5,
        };
        assert!(subgame_value(&ps, &q).unwrap().abs() < 1e-9);
    }

    #[test]
    fn certificate_support_certifies_level() {
        let p = binary_detection_game().unwrap();
        let sol = minimax_lp(&p).unwrap();
        let procs = vec![sol.minimax_procedure.clone()];
        let support = finite_certificate_support(&p, &procs, 0.2).unwrap();
        assert!(!support.is_empty());
        let q = SeparationQuery {
            theta_subset: support,
            procedure_set: procs.clone(),
            level: 0.2,
        };
        assert!(subgame_value(&p, &q).unwrap() > 0.2);

        // level above the full value is an error
        assert!(matches!(
            finite_certificate_support(&p, &procs, 0.5),
            Err(GameError::Input(_))
        ));

        // one-parameter problem returns that parameter
        let tiny = FiniteDecisionProblem::no_data(
            vec![Label::int(0)],
            vec![Label::int(0)],
            Mat::from_rows(vec![vec![1.0]]).unwrap(),
        )
        .unwrap();
        let d = RandomizedProcedure::point_mass(1, 0, 1).unwrap();
        assert_eq!(
            finite_certificate_support(&tiny, &[d], 0.5).unwrap(),
            vec![0]
        );
    }

    #[test]
    fn doubling_iterations_rarely_widens_brackets() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let total = 100;
        let mut improved = 0;
        for _ in 0..total {
            let p = crate::suite::random_problem(&mut rng, 6);
            let short = fictitious_play(&p, 5_000).unwrap();
            let long = fictitious_play(&p, 10_000).unwrap();
            let w_short = short.upper_bound - short.lower_bound;
            let w_long = long.upper_bound - long.lower_bound;
            if w_long <= w_short + 1e-12 {
                improved += 1;
            }
        }
        // monotone in aggregate, not per instance
        assert!(
            improved * 10 >= total * 9,
            "bracket width shrank on only {improved}/{total} instances"
        );
    }

    #[test]
    fn scale_equivariance() {
        let p = binary_detection_game().unwrap();
        let base = minimax_lp(&p).unwrap();
        for c in [2.0, 0.5, 3.0] {
            let scaled_loss = Mat::from_rows(
                p.loss()
                    .to_nested()
                    .into_iter()
                    .map(|row| row.into_iter().map(|v| c * v).collect())
                    .collect(),
            )
            .unwrap();
            let scaled = FiniteDecisionProblem::new(
                p.theta_labels().to_vec(),
                p.action_labels().to_vec(),
                p.obs_labels().to_vec(),
                scaled_loss,
                p.kernel().clone(),
            )
            .unwrap();
            let sol = minimax_lp(&scaled).unwrap();
            assert!((sol.value - c * base.value).abs() < 1e-9 * c.max(1.0));
            for (a, b) in sol
                .least_favorable_prior
                .weights()
                .iter()
                .zip(base.least_favorable_prior.weights())
            {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
