//! Self-contained dense linear programming.
//!
//! Two-phase primal simplex on the full tableau with Bland's anti-cycling
//! rule. Problem sizes in this crate are small-to-moderate (at most a few
//! thousand variables coming from grids), so determinism and clean dual
//! extraction matter more than sparse performance.
//!
//! Pivoting conventions, fixed for reproducibility:
//! - entering column: lowest index with reduced cost below -1e-9;
//! - leaving row: minimum ratio, ties broken by lowest basic column index;
//! - variable upper bounds are rewritten as explicit constraint rows;
//! - after termination the basis is refactorized from the original data,
//!   so reported primal/dual vectors do not carry accumulated pivot drift.

use serde::Serialize;
use thiserror::Error;

use crate::matrix::Mat;

/// Tolerance used for optimality/ratio tests and feasibility decisions.
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

/// Per-variable bound: a finite lower bound (zero by default) and an
/// optional finite upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarBound {
    pub lower: f64,
    pub upper: Option<f64>,
}

impl Default for VarBound {
    fn default() -> Self {
        VarBound {
            lower: 0.0,
            upper: None,
        }
    }
}

/// minimize objective . x   subject to   constraint_matrix . x  {<=,=,>=}  rhs,
/// with per-variable bounds.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraint_matrix: Mat,
    pub relations: Vec<Relation>,
    pub rhs: Vec<f64>,
    pub bounds: Vec<VarBound>,
}

impl LinearProgram {
    /// All variables bounded below by zero, no upper bounds.
    pub fn new(
        objective: Vec<f64>,
        constraint_matrix: Mat,
        relations: Vec<Relation>,
        rhs: Vec<f64>,
    ) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraint_matrix,
            relations,
            rhs,
            bounds: vec![VarBound::default(); n],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rhs.len()
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.n_vars();
        let m = self.n_rows();
        if self.constraint_matrix.nrows() != m || self.constraint_matrix.ncols() != n {
            return Err(LpError::Input(format!(
                "constraint matrix is {}x{}, expected {}x{}",
                self.constraint_matrix.nrows(),
                self.constraint_matrix.ncols(),
                m,
                n
            )));
        }
        if self.relations.len() != m {
            return Err(LpError::Input(format!(
                "{} relations for {} rows",
                self.relations.len(),
                m
            )));
        }
        if self.bounds.len() != n {
            return Err(LpError::Input(format!(
                "{} bounds for {} variables",
                self.bounds.len(),
                n
            )));
        }
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.rhs.iter().all(|v| v.is_finite())
            && (0..m).all(|r| self.constraint_matrix.row(r).iter().all(|v| v.is_finite()))
            && self
                .bounds
                .iter()
                .all(|b| b.lower.is_finite() && b.upper.is_none_or(|u| u.is_finite()));
        if !finite {
            return Err(LpError::Input("non-finite entry in program data".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Primal/dual pair returned by `solve_lp`. For `Infeasible` the objective
/// is +inf, for `Unbounded` it is -inf, and both vectors are empty.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub objective_value: f64,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("invalid linear program: {0}")]
    Input(String),
    #[error("simplex iteration limit exceeded ({0} pivots)")]
    IterationLimit(usize),
    #[error("certificate check requires an optimal solution, got {0:?}")]
    NotOptimal(LpStatus),
}

/// One recomputed residual in a certificate check.
#[derive(Debug, Clone, Serialize)]
pub struct CertItem {
    pub name: String,
    pub value: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub items: Vec<CertItem>,
    pub pass: bool,
}

impl CertificateReport {
    pub fn failures(&self) -> impl Iterator<Item = &CertItem> {
        self.items.iter().filter(|i| !i.ok)
    }
}

// ---------------------------------------------------------------------------
// simplex internals
// ---------------------------------------------------------------------------

struct Tableau {
    /// current rows, B^{-1} * A_std
    a: Vec<Vec<f64>>,
    /// current basic values, B^{-1} * b_std
    rhs: Vec<f64>,
    /// reduced costs for the active phase
    z: Vec<f64>,
    basis: Vec<usize>,
    /// rows found redundant after phase 1 keep their artificial and are
    /// never pivoted again
    active: Vec<bool>,
    n_struct: usize,
    n_slack: usize,
}

impl Tableau {
    fn n_cols(&self) -> usize {
        self.n_struct + self.n_slack + self.rhs.len()
    }

    fn art_col(&self, row: usize) -> usize {
        self.n_struct + self.n_slack + row
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.a[row][col];
        let inv = 1.0 / piv;
        for v in self.a[row].iter_mut() {
            *v *= inv;
        }
        self.rhs[row] *= inv;
        self.a[row][col] = 1.0; // exact after normalization

        let pivot_row = self.a[row].clone();
        let pivot_rhs = self.rhs[row];
        for r in 0..self.a.len() {
            if r == row {
                continue;
            }
            let factor = self.a[r][col];
            if factor == 0.0 {
                continue;
            }
            for (v, p) in self.a[r].iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            self.a[r][col] = 0.0;
            self.rhs[r] -= factor * pivot_rhs;
        }
        let zfac = self.z[col];
        if zfac != 0.0 {
            for (v, p) in self.z.iter_mut().zip(&pivot_row) {
                *v -= zfac * p;
            }
            self.z[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Runs Bland-rule simplex on the active phase cost row. `allow` marks
    /// columns eligible to enter. Returns false if an unbounded ray was found.
    fn run(&mut self, allow: &[bool], pivots: &mut usize, cap: usize) -> Result<bool, LpError> {
        loop {
            let entering = (0..self.n_cols())
                .find(|&j| allow[j] && self.z[j] < -FEAS_TOL);
            let Some(col) = entering else {
                return Ok(true);
            };

            let mut best: Option<(f64, usize, usize)> = None; // ratio, basis col, row
            for r in 0..self.a.len() {
                if !self.active[r] {
                    continue;
                }
                let coef = self.a[r][col];
                if coef > FEAS_TOL {
                    let ratio = self.rhs[r].max(0.0) / coef;
                    let key = (ratio, self.basis[r]);
                    let better = match best {
                        None => true,
                        Some((br, bb, _)) => key < (br, bb),
                    };
                    if better {
                        best = Some((ratio, self.basis[r], r));
                    }
                }
            }
            let Some((_, _, row)) = best else {
                return Ok(false);
            };
            self.pivot(row, col);
            *pivots += 1;
            if *pivots > cap {
                return Err(LpError::IterationLimit(*pivots));
            }
        }
    }

    /// Rebuilds reduced costs and the implied objective for a cost vector
    /// over all columns, using the current tableau.
    fn load_costs(&mut self, cost: &[f64]) {
        let ncols = self.n_cols();
        let mut z = cost.to_vec();
        for r in 0..self.a.len() {
            let cb = cost[self.basis[r]];
            if cb == 0.0 {
                continue;
            }
            for j in 0..ncols {
                z[j] -= cb * self.a[r][j];
            }
        }
        // basic columns are exactly zero by definition
        for r in 0..self.a.len() {
            z[self.basis[r]] = 0.0;
        }
        self.z = z;
    }
}

/// Gaussian elimination with partial pivoting; returns None on a singular
/// system. Deterministic: max-|pivot| with lowest row index on ties.
fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let mut piv_row = col;
        let mut piv_val = m[col][col].abs();
        for r in (col + 1)..n {
            let v = m[r][col].abs();
            if v > piv_val {
                piv_val = v;
                piv_row = r;
            }
        }
        if piv_val < 1e-12 {
            return None;
        }
        m.swap(col, piv_row);
        let inv = 1.0 / m[col][col];
        for r in (col + 1)..n {
            let f = m[r][col] * inv;
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

struct StandardForm {
    /// rows over structural+slack columns (artificials are implicit identity)
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    /// sign applied to each row to make rhs nonnegative
    flip: Vec<f64>,
    /// map from original row index to standard row index (upper-bound rows
    /// come after the original ones)
    n_orig_rows: usize,
    n_struct: usize,
    n_slack: usize,
    /// structural costs (same as lp.objective), slacks/artificials cost zero
    cost: Vec<f64>,
    lower: Vec<f64>,
}

fn build_standard(lp: &LinearProgram) -> Result<StandardForm, LpError> {
    let n = lp.n_vars();
    let m = lp.n_rows();
    let lower: Vec<f64> = lp.bounds.iter().map(|b| b.lower).collect();

    // shifted rhs for original rows
    let mut shifted_rhs = Vec::with_capacity(m);
    for r in 0..m {
        let row = lp.constraint_matrix.row(r);
        let shift: f64 = row.iter().zip(&lower).map(|(a, l)| a * l).sum();
        shifted_rhs.push(lp.rhs[r] - shift);
    }

    // upper bounds become explicit rows  x_j' <= u_j - l_j
    let mut ub_rows: Vec<(usize, f64)> = Vec::new();
    for (j, b) in lp.bounds.iter().enumerate() {
        if let Some(u) = b.upper {
            ub_rows.push((j, u - b.lower));
        }
    }

    let total_rows = m + ub_rows.len();
    let relations: Vec<Relation> = lp
        .relations
        .iter()
        .copied()
        .chain(ub_rows.iter().map(|_| Relation::Le))
        .collect();
    let n_slack = relations
        .iter()
        .filter(|r| !matches!(r, Relation::Eq))
        .count();

    let mut rows = vec![vec![0.0; n + n_slack]; total_rows];
    let mut rhs = vec![0.0; total_rows];
    let mut flip = vec![1.0; total_rows];

    for r in 0..m {
        rows[r][..n].copy_from_slice(lp.constraint_matrix.row(r));
        rhs[r] = shifted_rhs[r];
    }
    for (k, &(j, cap)) in ub_rows.iter().enumerate() {
        rows[m + k][j] = 1.0;
        rhs[m + k] = cap;
    }

    let mut slack_idx = n;
    for (r, rel) in relations.iter().enumerate() {
        match rel {
            Relation::Le => {
                rows[r][slack_idx] = 1.0;
                slack_idx += 1;
            }
            Relation::Ge => {
                rows[r][slack_idx] = -1.0;
                slack_idx += 1;
            }
            Relation::Eq => {}
        }
    }

    for r in 0..total_rows {
        if rhs[r] < 0.0 {
            flip[r] = -1.0;
            rhs[r] = -rhs[r];
            for v in rows[r].iter_mut() {
                *v = -*v;
            }
        }
    }

    let mut cost = vec![0.0; n + n_slack];
    cost[..n].copy_from_slice(&lp.objective);

    Ok(StandardForm {
        rows,
        rhs,
        flip,
        n_orig_rows: m,
        n_struct: n,
        n_slack,
        cost,
        lower,
    })
}

/// Solves the program, returning status plus primal and dual certificates.
///
/// Identical inputs produce bitwise-identical outputs: every tie in the
/// pivoting rules is broken by lowest index.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;

    for b in &lp.bounds {
        if let Some(u) = b.upper {
            if u < b.lower {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    primal: vec![],
                    dual: vec![],
                    objective_value: f64::INFINITY,
                });
            }
        }
    }

    let sf = build_standard(lp)?;
    let m_std = sf.rhs.len();
    let n_cols = sf.n_struct + sf.n_slack + m_std;

    // tableau with artificial identity basis
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(m_std);
    for r in 0..m_std {
        let mut row = vec![0.0; n_cols];
        row[..sf.n_struct + sf.n_slack].copy_from_slice(&sf.rows[r]);
        row[sf.n_struct + sf.n_slack + r] = 1.0;
        a.push(row);
    }
    let mut tab = Tableau {
        a,
        rhs: sf.rhs.clone(),
        z: vec![0.0; n_cols],
        basis: (0..m_std).map(|r| sf.n_struct + sf.n_slack + r).collect(),
        active: vec![true; m_std],
        n_struct: sf.n_struct,
        n_slack: sf.n_slack,
    };

    let mut allow = vec![true; n_cols];
    for r in 0..m_std {
        allow[tab.art_col(r)] = false; // artificials never (re-)enter
    }

    let cap = 200 * (m_std + n_cols) + 2000;
    let mut pivots = 0usize;

    // phase 1: minimize the sum of artificial variables
    let mut phase1_cost = vec![0.0; n_cols];
    for r in 0..m_std {
        phase1_cost[tab.art_col(r)] = 1.0;
    }
    tab.load_costs(&phase1_cost);
    tab.run(&allow, &mut pivots, cap)?;
    let phase1_obj: f64 = (0..m_std)
        .filter(|&r| tab.basis[r] >= sf.n_struct + sf.n_slack)
        .map(|r| tab.rhs[r].max(0.0))
        .sum();
    if phase1_obj > FEAS_TOL * (1.0 + sf.rhs.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))) {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            primal: vec![],
            dual: vec![],
            objective_value: f64::INFINITY,
        });
    }

    // drive remaining artificials out of the basis; rows that cannot be
    // pivoted are redundant and go inactive
    for r in 0..m_std {
        if tab.basis[r] < sf.n_struct + sf.n_slack {
            continue;
        }
        let col = (0..sf.n_struct + sf.n_slack).find(|&j| tab.a[r][j].abs() > 1e-7);
        match col {
            Some(j) => {
                tab.pivot(r, j);
                pivots += 1;
            }
            None => tab.active[r] = false,
        }
    }

    // phase 2: original costs
    let mut phase2_cost = vec![0.0; n_cols];
    phase2_cost[..sf.n_struct + sf.n_slack].copy_from_slice(&sf.cost);
    tab.load_costs(&phase2_cost);
    let bounded = tab.run(&allow, &mut pivots, cap)?;
    if !bounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            primal: vec![],
            dual: vec![],
            objective_value: f64::NEG_INFINITY,
        });
    }

    // refactorize the final basis against the original standard-form data
    let basis_cols: Vec<Vec<f64>> = (0..m_std)
        .map(|r| {
            let j = tab.basis[r];
            (0..m_std)
                .map(|i| {
                    if j < sf.n_struct + sf.n_slack {
                        sf.rows[i][j]
                    } else if j - (sf.n_struct + sf.n_slack) == i {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    // column-major -> row-major for the solver
    let bmat: Vec<Vec<f64>> = (0..m_std)
        .map(|i| (0..m_std).map(|k| basis_cols[k][i]).collect())
        .collect();
    let bt: Vec<Vec<f64>> = (0..m_std)
        .map(|i| (0..m_std).map(|k| basis_cols[i][k]).collect())
        .collect();
    let cb: Vec<f64> = tab.basis.iter().map(|&j| phase2_cost[j]).collect();

    let xb = dense_solve(&bmat, &sf.rhs).unwrap_or_else(|| tab.rhs.clone());
    let y_std = dense_solve(&bt, &cb).unwrap_or_else(|| {
        (0..m_std)
            .map(|i| {
                let col = tab.art_col(i);
                (0..m_std).map(|r| cb[r] * tab.a[r][col]).sum()
            })
            .collect()
    });

    let mut primal = sf.lower.clone();
    for r in 0..m_std {
        let j = tab.basis[r];
        if j < sf.n_struct {
            primal[j] += xb[r];
        }
    }
    let objective_value: f64 = lp
        .objective
        .iter()
        .zip(&primal)
        .map(|(c, x)| c * x)
        .sum();

    let dual: Vec<f64> = (0..sf.n_orig_rows)
        .map(|r| sf.flip[r] * y_std[r])
        .collect();

    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal,
        dual,
        objective_value,
    })
}

/// Recomputes primal residuals, dual residuals, and the objective gap for a
/// claimed-optimal solution; passes iff every residual is within `tol`.
pub fn check_certificate(
    lp: &LinearProgram,
    sol: &LpSolution,
    tol: f64,
) -> Result<CertificateReport, LpError> {
    if sol.status != LpStatus::Optimal {
        return Err(LpError::NotOptimal(sol.status));
    }
    lp.validate()?;
    let n = lp.n_vars();
    let m = lp.n_rows();
    if sol.primal.len() != n || sol.dual.len() != m {
        return Err(LpError::Input(format!(
            "solution has {} primal / {} dual entries, expected {} / {}",
            sol.primal.len(),
            sol.dual.len(),
            n,
            m
        )));
    }

    let mut items = Vec::new();
    let mut add = |name: String, value: f64| {
        items.push(CertItem {
            name,
            value,
            ok: value <= tol,
        });
    };

    for r in 0..m {
        let ax: f64 = lp
            .constraint_matrix
            .row(r)
            .iter()
            .zip(&sol.primal)
            .map(|(a, x)| a * x)
            .sum();
        let viol = match lp.relations[r] {
            Relation::Le => ax - lp.rhs[r],
            Relation::Ge => lp.rhs[r] - ax,
            Relation::Eq => (ax - lp.rhs[r]).abs(),
        }
        .max(0.0);
        add(format!("primal_row_{r}"), viol);
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        let mut viol = (b.lower - sol.primal[j]).max(0.0);
        if let Some(u) = b.upper {
            viol = viol.max(sol.primal[j] - u);
        }
        add(format!("primal_bound_{j}"), viol);
    }

    for r in 0..m {
        let viol = match lp.relations[r] {
            Relation::Le => sol.dual[r].max(0.0),
            Relation::Ge => (-sol.dual[r]).max(0.0),
            Relation::Eq => 0.0,
        };
        add(format!("dual_sign_row_{r}"), viol);
    }

    // reduced costs z = c - A^T y; a negative z_j is only allowed when the
    // variable has a finite upper bound to lean on
    let mut dual_obj: f64 = lp.rhs.iter().zip(&sol.dual).map(|(b, y)| b * y).sum();
    for j in 0..n {
        let mut z = lp.objective[j];
        for r in 0..m {
            z -= lp.constraint_matrix.at(r, j) * sol.dual[r];
        }
        match lp.bounds[j].upper {
            None => {
                add(format!("dual_feasibility_var_{j}"), (-z).max(0.0));
                dual_obj += lp.bounds[j].lower * z.max(0.0);
            }
            Some(u) => {
                add(format!("dual_feasibility_var_{j}"), 0.0);
                dual_obj += lp.bounds[j].lower * z.max(0.0) - u * (-z).max(0.0);
            }
        }
    }

    add(
        "objective_gap".to_string(),
        (sol.objective_value - dual_obj).abs(),
    );

    let pass = items.iter().all(|i| i.ok);
    Ok(CertificateReport { items, pass })
}
