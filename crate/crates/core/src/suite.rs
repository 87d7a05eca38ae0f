//! The verification suite: every check the crate must pass, runnable from
//! the CLI (`verify`) and from the acceptance test target.
//!
//! Checks are oracle- and property-based: LP solves are compared against
//! vertex enumeration, transport LPs against the closed-form 1D distance,
//! game values against fictitious-play brackets and hand-derived saddle
//! points. Random instances use fixed seeds, so reports are reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

use crate::catalog::{
    bernoulli_equalizer_risk, bernoulli_family, clamp_game, escaping_prior_report,
    location_family, nature_witness, pick_smaller_game, statistician_witness, RationalMeasure,
};
use crate::discretize::{approximate_minimax, uniform_net};
use crate::game::{
    certify_saddle, fictitious_play, minimax_lp, weak_duality_gap,
};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation};
use crate::matrix::Mat;
use crate::model::{FiniteDecisionProblem, FinitePrior, Label, RandomizedProcedure};
use crate::transport::{line_metric, w1_1d, wk_discrete, DiscreteMeasure};
use num_rational::Rational64;

/// Deliberate defect for exercising the failure path of the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Injection {
    None,
    /// adds 1e-3 to one loss entry of the first truncation fixture
    LossPerturbation,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub details: String,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub const CHECK_NAMES: [&str; 8] = [
    "finite-minimax-equality",
    "weak-duality",
    "minimax-failure-witnesses",
    "clamp-escaping-priors",
    "discretization-convergence",
    "fictitious-play-bracketing",
    "transport-wasserstein-oracle",
    "lp-vertex-oracle",
];

type Check = fn(Injection) -> Result<String, String>;

/// Runs every check whose name contains `filter` (all when `None`).
pub fn run_all(filter: Option<&str>, injection: Injection) -> SuiteReport {
    let checks: Vec<(&'static str, Check)> = vec![
        ("finite-minimax-equality", check_finite_minimax_equality),
        ("weak-duality", check_weak_duality),
        ("minimax-failure-witnesses", check_minimax_failure_witnesses),
        ("clamp-escaping-priors", check_clamp_escaping_priors),
        ("discretization-convergence", check_discretization_convergence),
        ("fictitious-play-bracketing", check_fictitious_play_bracketing),
        ("transport-wasserstein-oracle", check_wasserstein_oracle),
        ("lp-vertex-oracle", check_lp_vertex_oracle),
    ];

    let mut outcomes = Vec::new();
    for (name, f) in checks {
        if let Some(pat) = filter {
            if !name.contains(pat) {
                continue;
            }
        }
        let start = Instant::now();
        let result = f(injection);
        let seconds = start.elapsed().as_secs_f64();
        let (pass, details) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        outcomes.push(CheckOutcome {
            name,
            pass,
            details,
            seconds,
        });
    }
    SuiteReport { checks: outcomes }
}

// ---------------------------------------------------------------------------
// random instance generators (fixed seeds; deterministic)
// ---------------------------------------------------------------------------

fn random_stochastic_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(1e-3..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

pub fn random_problem(rng: &mut ChaCha8Rng, max_dim: usize) -> FiniteDecisionProblem {
    let n_theta = rng.gen_range(1..=max_dim);
    let n_act = rng.gen_range(1..=max_dim);
    let n_obs = rng.gen_range(1..=max_dim);
    let loss_rows: Vec<Vec<f64>> = (0..n_theta)
        .map(|_| (0..n_act).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let kernel_rows: Vec<Vec<f64>> = (0..n_theta)
        .map(|_| random_stochastic_row(rng, n_obs))
        .collect();
    FiniteDecisionProblem::new(
        (0..n_theta).map(|i| Label::int(i as i64)).collect(),
        (0..n_act).map(|i| Label::int(i as i64)).collect(),
        (0..n_obs).map(|i| Label::int(i as i64)).collect(),
        Mat::from_rows(loss_rows).expect("rectangular"),
        Mat::from_rows(kernel_rows).expect("rectangular"),
    )
    .expect("generated problem is valid")
}

pub fn random_procedure(
    rng: &mut ChaCha8Rng,
    n_obs: usize,
    n_actions: usize,
) -> RandomizedProcedure {
    let rows: Vec<Vec<f64>> = (0..n_obs)
        .map(|_| random_stochastic_row(rng, n_actions))
        .collect();
    RandomizedProcedure::new(Mat::from_rows(rows).expect("rectangular"))
        .expect("generated procedure is valid")
}

pub fn random_prior(rng: &mut ChaCha8Rng, n: usize) -> FinitePrior {
    FinitePrior::new(random_stochastic_row(rng, n)).expect("generated prior is valid")
}

pub fn random_measure(rng: &mut ChaCha8Rng, max_support: usize) -> DiscreteMeasure {
    let n = rng.gen_range(1..=max_support);
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let p = rng.gen_range(-20i64..=20) as f64 / 4.0;
        if !points.contains(&p) {
            points.push(p);
        }
    }
    DiscreteMeasure::new(points, random_stochastic_row(rng, n))
        .expect("generated measure is valid")
}

/// Feasible, bounded LP with exactly representable data: integer quarters
/// everywhere, a positive objective, and right-hand sides built around an
/// interior point.
pub fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.gen_range(1usize..=8);
    let m = rng.gen_range(1usize..=8);
    let quarters = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| rng.gen_range(lo..=hi) as f64 / 4.0;

    let objective: Vec<f64> = (0..n).map(|_| quarters(rng, 1, 16)).collect();
    let x0: Vec<f64> = (0..n).map(|_| quarters(rng, 0, 16)).collect();
    let max_eq = n.saturating_sub(1).min(2);
    let mut n_eq = 0usize;

    let mut rows = Vec::with_capacity(m);
    let mut relations = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for _ in 0..m {
        let row: Vec<f64> = (0..n).map(|_| quarters(rng, -8, 8)).collect();
        let at_x0: f64 = row.iter().zip(&x0).map(|(a, x)| a * x).sum();
        let margin = quarters(rng, 0, 8);
        let rel = match rng.gen_range(0..5) {
            0 if n_eq < max_eq => {
                n_eq += 1;
                Relation::Eq
            }
            1 | 2 => Relation::Ge,
            _ => Relation::Le,
        };
        let b = match rel {
            Relation::Le => at_x0 + margin,
            Relation::Ge => at_x0 - margin,
            Relation::Eq => at_x0,
        };
        rows.push(row);
        relations.push(rel);
        rhs.push(b);
    }
    LinearProgram::new(
        objective,
        Mat::from_rows(rows).expect("rectangular"),
        relations,
        rhs,
    )
}

/// Plain Gaussian elimination for the oracle, kept separate from the
/// solver's own linear algebra.
fn solve_square(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| {
            m[r][col]
                .abs()
                .partial_cmp(&m[s][col].abs())
                .expect("finite")
        })?;
        if m[piv][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            for j in col..=n {
                let s = m[col][j];
                m[r][j] -= f * s;
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = m[i][n];
        for j in (i + 1)..n {
            acc -= m[i][j] * x[j];
        }
        x[i] = acc / m[i][i];
    }
    Some(x)
}

/// Exhaustive vertex enumeration: the minimum objective over all basic
/// feasible points of the constraint system (rows-as-equalities plus active
/// lower bounds). Valid for feasible programs with a positive objective and
/// nonnegative variables, which the generator guarantees.
pub fn vertex_enumeration_min(lp: &LinearProgram) -> Option<f64> {
    let n = lp.n_vars();
    let m = lp.n_rows();
    // candidate active constraints: every row as an equality, then every
    // lower bound
    let mut normals: Vec<Vec<f64>> = Vec::with_capacity(m + n);
    let mut offsets: Vec<f64> = Vec::with_capacity(m + n);
    for r in 0..m {
        normals.push(lp.constraint_matrix.row(r).to_vec());
        offsets.push(lp.rhs[r]);
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        normals.push(e);
        offsets.push(lp.bounds[j].lower);
    }

    let total = normals.len();
    let mut best: Option<f64> = None;
    let mut subset: Vec<usize> = (0..n).collect();

    loop {
        let a: Vec<Vec<f64>> = subset.iter().map(|&i| normals[i].clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&i| offsets[i]).collect();
        if let Some(x) = solve_square(&a, &b) {
            if feasible(lp, &x, 1e-9) {
                let obj: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
        // next lexicographic subset of size n
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if subset[i] != i + total - n {
                subset[i] += 1;
                for k in (i + 1)..n {
                    subset[k] = subset[k - 1] + 1;
                }
                break;
            }
        }
    }
}

fn feasible(lp: &LinearProgram, x: &[f64], tol: f64) -> bool {
    for r in 0..lp.n_rows() {
        let ax: f64 = lp.constraint_matrix.row(r).iter().zip(x).map(|(a, v)| a * v).sum();
        let ok = match lp.relations[r] {
            Relation::Le => ax <= lp.rhs[r] + tol,
            Relation::Ge => ax >= lp.rhs[r] - tol,
            Relation::Eq => (ax - lp.rhs[r]).abs() <= tol,
        };
        if !ok {
            return false;
        }
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        if x[j] < b.lower - tol {
            return false;
        }
        if let Some(u) = b.upper {
            if x[j] > u + tol {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// checks
// ---------------------------------------------------------------------------

fn check_finite_minimax_equality(_: Injection) -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_gap = 0.0f64;
    for i in 0..300 {
        let p = random_problem(&mut rng, 6);
        let sol = minimax_lp(&p).map_err(|e| format!("instance {i}: {e}"))?;
        if sol.duality_gap.abs() > 1e-8 {
            return Err(format!(
                "instance {i}: duality gap {} exceeds 1e-8",
                sol.duality_gap
            ));
        }
        worst_gap = worst_gap.max(sol.duality_gap.abs());
        let report = certify_saddle(&p, &sol, 1e-8).map_err(|e| format!("instance {i}: {e}"))?;
        if !report.pass {
            return Err(format!("instance {i}: saddle certificate failed"));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 10.0 {
        return Err(format!("runtime {elapsed:.1}s exceeds the 10s budget"));
    }
    Ok(format!(
        "300 random games solved and certified within the 10s budget; worst |gap| {worst_gap:.2e}"
    ))
}

fn check_weak_duality(_: Injection) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = f64::INFINITY;
    for i in 0..10_000 {
        let p = random_problem(&mut rng, 6);
        let delta = random_procedure(&mut rng, p.n_obs(), p.n_actions());
        let prior = random_prior(&mut rng, p.n_theta());
        let gap = weak_duality_gap(&p, &delta, &prior).map_err(|e| format!("triple {i}: {e}"))?;
        worst = worst.min(gap);
        if gap < -1e-12 {
            return Err(format!("triple {i}: gap {gap} below -1e-12"));
        }
    }
    Ok(format!("10000 triples; smallest gap {worst:.2e}"))
}

fn perturbed_pick_smaller(n: usize) -> Result<FiniteDecisionProblem, String> {
    let p = pick_smaller_game(n).map_err(|e| e.to_string())?;
    let mut rows = p.loss().to_nested();
    // lifting the last diagonal entry lets nature force a positive value by
    // sitting on the smallest parameter
    rows[n - 1][n - 1] += 1e-3;
    FiniteDecisionProblem::new(
        p.theta_labels().to_vec(),
        p.action_labels().to_vec(),
        p.obs_labels().to_vec(),
        Mat::from_rows(rows).map_err(|e| e.to_string())?,
        p.kernel().clone(),
    )
    .map_err(|e| e.to_string())
}

fn check_minimax_failure_witnesses(injection: Injection) -> Result<String, String> {
    for n in 1..=20 {
        let p = if n == 5 && injection == Injection::LossPerturbation {
            perturbed_pick_smaller(n)?
        } else {
            pick_smaller_game(n).map_err(|e| e.to_string())?
        };
        let sol = minimax_lp(&p).map_err(|e| e.to_string())?;
        if sol.value.abs() > 1e-9 {
            return Err(format!(
                "truncation n={n}: value {} is not 0 within 1e-9",
                sol.value
            ));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for &eps in &[0.2, 0.05, 0.01] {
        for i in 0..50 {
            let size = rng.gen_range(1..=6);
            let mut denoms = Vec::with_capacity(size);
            while denoms.len() < size {
                let d = rng.gen_range(1..=40i64);
                if !denoms.contains(&d) {
                    denoms.push(d);
                }
            }
            let support: Vec<Rational64> =
                denoms.iter().map(|&d| Rational64::new(1, d)).collect();
            let weights = random_stochastic_row(&mut rng, size);

            let delta = RationalMeasure::new(support.clone(), weights.clone())
                .map_err(|e| e.to_string())?;
            let report = nature_witness(&delta, eps).map_err(|e| e.to_string())?;
            if report.achieved_value <= 1.0 - 2.0 * eps {
                return Err(format!(
                    "eps {eps} delta {i}: nature achieved {}",
                    report.achieved_value
                ));
            }

            let prior = RationalMeasure::new(support, weights).map_err(|e| e.to_string())?;
            let report = statistician_witness(&prior, eps).map_err(|e| e.to_string())?;
            if report.achieved_value >= 2.0 * eps - 1.0 {
                return Err(format!(
                    "eps {eps} prior {i}: statistician achieved {}",
                    report.achieved_value
                ));
            }
        }
    }
    Ok("20 truncations at value 0; witnesses reach 1-2eps / 2eps-1 on 50 measures per eps".into())
}

fn check_clamp_escaping_priors(_: Injection) -> Result<String, String> {
    for n in 1..=20 {
        let p = clamp_game(n).map_err(|e| e.to_string())?;
        let sol = minimax_lp(&p).map_err(|e| e.to_string())?;
        if sol.value.abs() > 1e-9 {
            return Err(format!("clamp n={n}: value {}", sol.value));
        }
    }

    let q = |i: i64| Rational64::from_integer(i);
    let procedures = vec![
        RationalMeasure::point(q(5)).map_err(|e| e.to_string())?,
        RationalMeasure::new(vec![q(1), q(4)], vec![0.5, 0.5]).map_err(|e| e.to_string())?,
        RationalMeasure::new(vec![q(2), q(3), q(7)], vec![0.25, 0.25, 0.5])
            .map_err(|e| e.to_string())?,
        RationalMeasure::uniform((1..=10).map(q).collect()).map_err(|e| e.to_string())?,
    ];
    let report =
        escaping_prior_report(&[6, 9, 12, 30], &procedures).map_err(|e| e.to_string())?;
    for row in &report.rows {
        if row.k > row.support_max + 1 && row.bayes_risk != 1.0 {
            return Err(format!(
                "K={} against procedure {}: Bayes risk {} is not exactly 1",
                row.k, row.procedure_index, row.bayes_risk
            ));
        }
    }
    let last = report.infima.last().expect("nonempty");
    if last.inf_bayes_risk != 1.0 {
        return Err(format!(
            "inf over procedures at K={} is {}, expected exactly 1",
            last.k, last.inf_bayes_risk
        ));
    }
    Ok("20 truncations at value 0; escaped priors force Bayes risk exactly 1".into())
}

fn check_discretization_convergence(_: Injection) -> Result<String, String> {
    let start = Instant::now();

    let loc = location_family();
    for n in 1..=7 {
        let eps = 0.5f64.powi(n);
        let res = approximate_minimax(&loc, eps).map_err(|e| e.to_string())?;
        let (lo, hi) = res.value_interval;
        if !(lo <= 0.5 + 1e-9 && 0.5 <= hi + 1e-9) {
            return Err(format!(
                "location eps=2^-{n}: 0.5 outside [{lo}, {hi}]"
            ));
        }
    }

    let bern = bernoulli_family();
    let res = approximate_minimax(&bern, 0.01).map_err(|e| e.to_string())?;
    let net = uniform_net(bern.theta_interval(), 0.01).map_err(|e| e.to_string())?;
    if net.len() != 101 {
        return Err(format!("expected a 101-point net, got {}", net.len()));
    }
    let dev = (res.discrete_value - 0.0625).abs();
    if dev > 5e-3 {
        return Err(format!(
            "bernoulli 101-point value {} deviates {dev:.2e} from 1/16",
            res.discrete_value
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let theta: f64 = rng.gen();
        worst = worst.max((bernoulli_equalizer_risk(theta) - 0.0625).abs());
    }
    if worst > 1e-12 {
        return Err(format!("equalizer risk varies by {worst:.2e} > 1e-12"));
    }

    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 60.0 {
        return Err(format!("runtime {elapsed:.1}s exceeds the 60s budget"));
    }
    Ok(format!(
        "location intervals trap 0.5 down to 2^-7; bernoulli value within {dev:.1e} of 1/16; equalizer constant to {worst:.1e}; within the 60s budget"
    ))
}

fn check_fictitious_play_bracketing(_: Injection) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut widest = 0.0f64;
    for i in 0..100 {
        let p = random_problem(&mut rng, 6);
        let sol = minimax_lp(&p).map_err(|e| format!("instance {i}: {e}"))?;
        let fp = fictitious_play(&p, 20_000).map_err(|e| format!("instance {i}: {e}"))?;
        if !(fp.lower_bound <= sol.value + 1e-9 && sol.value <= fp.upper_bound + 1e-9) {
            return Err(format!(
                "instance {i}: value {} outside bracket [{}, {}]",
                sol.value, fp.lower_bound, fp.upper_bound
            ));
        }
        let width = fp.upper_bound - fp.lower_bound;
        widest = widest.max(width);
        if width >= 0.1 {
            return Err(format!("instance {i}: bracket width {width}"));
        }
    }
    Ok(format!(
        "100 brackets contain the LP value; widest bracket {widest:.3}"
    ))
}

fn check_wasserstein_oracle(_: Injection) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst_dev = 0.0f64;
    for i in 0..200 {
        let mu = random_measure(&mut rng, 8);
        let nu = random_measure(&mut rng, 8);
        let lp = wk_discrete(&mu, &nu, &line_metric, 1.0).map_err(|e| format!("pair {i}: {e}"))?;
        let oracle = w1_1d(&mu, &nu);
        let dev = (lp - oracle).abs();
        worst_dev = worst_dev.max(dev);
        if dev > 1e-9 {
            return Err(format!("pair {i}: LP {lp} vs 1D oracle {oracle}"));
        }
        let lp2 = wk_discrete(&mu, &nu, &line_metric, 2.0).map_err(|e| format!("pair {i}: {e}"))?;
        if (lp2 - 2.0 * lp).abs() > 1e-12 {
            return Err(format!("pair {i}: k-homogeneity broke: {lp2} vs 2*{lp}"));
        }
    }
    for i in 0..60 {
        let a = random_measure(&mut rng, 6);
        let b = random_measure(&mut rng, 6);
        let c = random_measure(&mut rng, 6);
        let dab = wk_discrete(&a, &b, &line_metric, 1.0).map_err(|e| format!("triple {i}: {e}"))?;
        let dba = wk_discrete(&b, &a, &line_metric, 1.0).map_err(|e| format!("triple {i}: {e}"))?;
        if (dab - dba).abs() > 1e-9 {
            return Err(format!("triple {i}: asymmetry {dab} vs {dba}"));
        }
        let dbc = wk_discrete(&b, &c, &line_metric, 1.0).map_err(|e| format!("triple {i}: {e}"))?;
        let dac = wk_discrete(&a, &c, &line_metric, 1.0).map_err(|e| format!("triple {i}: {e}"))?;
        if dac > dab + dbc + 1e-8 {
            return Err(format!("triple {i}: triangle violation {dac} > {dab} + {dbc}"));
        }
    }
    Ok(format!(
        "200 pairs agree with the 1D oracle (worst {worst_dev:.1e}); metric axioms hold on 60 triples"
    ))
}

fn check_lp_vertex_oracle(_: Injection) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst = 0.0f64;
    let mut solved = 0usize;
    for i in 0..200 {
        let lp = random_lp(&mut rng);
        let sol = solve_lp(&lp).map_err(|e| format!("instance {i}: {e}"))?;
        if sol.status != LpStatus::Optimal {
            return Err(format!(
                "instance {i}: generator promises feasible bounded, solver said {:?}",
                sol.status
            ));
        }
        let oracle = vertex_enumeration_min(&lp)
            .ok_or_else(|| format!("instance {i}: oracle found no feasible vertex"))?;
        let dev = (sol.objective_value - oracle).abs();
        worst = worst.max(dev);
        if dev > 1e-8 {
            return Err(format!(
                "instance {i}: simplex {} vs vertex enumeration {oracle}",
                sol.objective_value
            ));
        }
        let cert = crate::lp::check_certificate(&lp, &sol, 1e-9)
            .map_err(|e| format!("instance {i}: {e}"))?;
        if !cert.pass {
            let failed: Vec<&str> = cert.failures().map(|f| f.name.as_str()).collect();
            return Err(format!(
                "instance {i}: certificate residuals above 1e-9: {failed:?}"
            ));
        }
        solved += 1;
    }
    Ok(format!(
        "{solved} random programs match vertex enumeration with certificates at 1e-9; worst deviation {worst:.1e}"
    ))
}
