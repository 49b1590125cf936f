//! Exact two-phase simplex over the rationals.
//!
//! Problems are stated with free variables:
//!
//! ```text
//! minimize  cᵀx   subject to  A x ≤ b,  E x = e
//! ```
//!
//! Every outcome carries a certificate that [`verify_lp_certificate`] checks by
//! exact arithmetic. Dual multipliers follow the Lagrangian sign convention
//!
//! ```text
//! Aᵀλ + Eᵀν = −c,   λ ≥ 0,   cᵀx = −(bᵀλ + eᵀν)
//! ```
//!
//! Free variables are never split. A free column enters as soon as its reduced
//! cost is nonzero (in whichever direction improves the objective) and, once
//! basic, it is excluded from the ratio test and never leaves. Other entering
//! columns follow Dantzig's rule until a run of degenerate pivots, after which
//! the tableau switches to Bland's rule for good, so the method cannot cycle.

use num_traits::{One, Signed, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::linalg::{dot, is_zero_vec, zeros, QMatrix, QVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpProblem {
    pub objective: QVector,
    pub ineq: QMatrix,
    pub ineq_rhs: QVector,
    pub eq: QMatrix,
    pub eq_rhs: QVector,
}

impl LpProblem {
    pub fn new(
        objective: QVector,
        ineq: QMatrix,
        ineq_rhs: QVector,
        eq: QMatrix,
        eq_rhs: QVector,
    ) -> Result<Self> {
        let n = objective.len();
        if ineq.ncols() != n || eq.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "objective has {n} entries, constraint blocks have {} and {} columns",
                ineq.ncols(),
                eq.ncols()
            )));
        }
        if ineq.nrows() != ineq_rhs.len() || eq.nrows() != eq_rhs.len() {
            return Err(Error::DimensionMismatch(
                "constraint rows do not match right-hand sides".into(),
            ));
        }
        Ok(LpProblem {
            objective,
            ineq,
            ineq_rhs,
            eq,
            eq_rhs,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn is_feasible(&self, x: &[Rational]) -> bool {
        self.ineq
            .rows_iter()
            .zip(&self.ineq_rhs)
            .all(|(a, b)| dot(a, x) <= *b)
            && self
                .eq
                .rows_iter()
                .zip(&self.eq_rhs)
                .all(|(a, e)| dot(a, x) == *e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        x: QVector,
        ineq_duals: QVector,
        eq_duals: QVector,
        value: Rational,
    },
    Unbounded {
        point: QVector,
        ray: QVector,
    },
    Infeasible {
        ineq_farkas: QVector,
        eq_farkas: QVector,
    },
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible { .. })
    }

    /// Any feasible point carried by the outcome.
    pub fn feasible_point(&self) -> Option<&QVector> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            LpOutcome::Unbounded { point, .. } => Some(point),
            LpOutcome::Infeasible { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ColKind {
    Free,
    NonNeg,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    kinds: Vec<ColKind>,
    cost: Vec<Rational>,
    reduced: Vec<Rational>,
    /// Column that held the identity for each row at start; its current
    /// contents are the corresponding column of B⁻¹.
    init_col: Vec<usize>,
    degenerate_run: usize,
    bland: bool,
}

const DEGENERATE_LIMIT: usize = 8;

enum Step {
    Optimal,
    Unbounded { col: usize, increase: bool },
    Pivoted,
}

impl Tableau {
    fn set_cost(&mut self, cost: Vec<Rational>) {
        let mut reduced = cost.clone();
        for (r, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for (d, a) in reduced.iter_mut().zip(row) {
                if !a.is_zero() {
                    *d -= cb * a;
                }
            }
        }
        self.cost = cost;
        self.reduced = reduced;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        if !inv.is_one() {
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let pivot_rhs = self.rhs[r].clone();
        let nz: Vec<usize> = (0..pivot_row.len())
            .filter(|&j| !pivot_row[j].is_zero())
            .collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for &j in &nz {
                row[j] -= &factor * &pivot_row[j];
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        if !self.reduced[c].is_zero() {
            let factor = self.reduced[c].clone();
            for &j in &nz {
                self.reduced[j] -= &factor * &pivot_row[j];
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    fn is_basic(&self, c: usize) -> bool {
        self.basis.contains(&c)
    }

    fn step(&mut self) -> Step {
        let ncols = self.kinds.len();
        let free_entry = (0..ncols).find(|&j| {
            self.kinds[j] == ColKind::Free && !self.reduced[j].is_zero() && !self.is_basic(j)
        });
        let (col, increase) = match free_entry {
            Some(j) => (j, self.reduced[j].is_negative()),
            None => {
                let mut candidates = (0..ncols).filter(|&j| {
                    self.kinds[j] == ColKind::NonNeg
                        && self.reduced[j].is_negative()
                        && !self.is_basic(j)
                });
                let pick = if self.bland {
                    candidates.next()
                } else {
                    candidates.min_by(|&a, &b| self.reduced[a].cmp(&self.reduced[b]))
                };
                match pick {
                    Some(j) => (j, true),
                    None => return Step::Optimal,
                }
            }
        };
        let mut best: Option<(usize, Rational)> = None;
        for r in 0..self.rows.len() {
            if self.kinds[self.basis[r]] == ColKind::Free {
                continue;
            }
            let coef = if increase {
                self.rows[r][col].clone()
            } else {
                -self.rows[r][col].clone()
            };
            if !coef.is_positive() {
                continue;
            }
            let ratio = &self.rhs[r] / &coef;
            let better = match &best {
                None => true,
                Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
            };
            if better {
                best = Some((r, ratio));
            }
        }
        match best {
            None => Step::Unbounded { col, increase },
            Some((r, ratio)) => {
                if ratio.is_zero() && self.kinds[col] != ColKind::Free {
                    self.degenerate_run += 1;
                    self.bland |= self.degenerate_run >= DEGENERATE_LIMIT;
                } else {
                    self.degenerate_run = 0;
                }
                self.pivot(r, col);
                Step::Pivoted
            }
        }
    }

    fn run(&mut self) -> Option<(usize, bool)> {
        loop {
            match self.step() {
                Step::Optimal => return None,
                Step::Unbounded { col, increase } => return Some((col, increase)),
                Step::Pivoted => {}
            }
        }
    }

    /// `y = c_Bᵀ B⁻¹` for the current cost vector, one entry per tableau row.
    fn row_duals(&self) -> Vec<Rational> {
        self.init_col
            .iter()
            .map(|&ic| {
                self.rows
                    .iter()
                    .zip(&self.basis)
                    .filter(|(row, _)| !row[ic].is_zero())
                    .fold(Rational::zero(), |acc, (row, &b)| {
                        acc + &self.cost[b] * &row[ic]
                    })
            })
            .collect()
    }

    fn primal(&self, n: usize) -> QVector {
        let mut x = zeros(n);
        for (r, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs[r].clone();
            }
        }
        x
    }

    fn objective_value(&self) -> Rational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .fold(Rational::zero(), |acc, (&b, v)| acc + &self.cost[b] * v)
    }
}

/// Solves the problem exactly. The only error is a dimension mismatch, which
/// [`LpProblem::new`] already rules out.
pub fn solve_lp(p: &LpProblem) -> Result<LpOutcome> {
    let n = p.num_vars();
    let m = p.ineq.nrows();
    let k = p.eq.nrows();
    if p.ineq.ncols() != n || p.eq.ncols() != n || p.ineq_rhs.len() != m || p.eq_rhs.len() != k {
        return Err(Error::DimensionMismatch("malformed LP".into()));
    }
    let total_rows = m + k;
    let n_art = p.ineq_rhs.iter().filter(|b| b.is_negative()).count() + k;
    let ncols = n + m + n_art;

    let mut kinds = vec![ColKind::Free; n];
    kinds.extend(std::iter::repeat_n(ColKind::NonNeg, m));
    kinds.extend(std::iter::repeat_n(ColKind::Artificial, n_art));

    let mut rows = Vec::with_capacity(total_rows);
    let mut rhs = Vec::with_capacity(total_rows);
    let mut basis = Vec::with_capacity(total_rows);
    let mut init_col = Vec::with_capacity(total_rows);
    let mut flipped = Vec::with_capacity(total_rows);
    let mut next_art = n + m;

    for i in 0..m {
        let mut row = vec![Rational::zero(); ncols];
        row[..n].clone_from_slice(p.ineq.row(i));
        row[n + i] = Rational::one();
        let mut b = p.ineq_rhs[i].clone();
        if b.is_negative() {
            for a in row.iter_mut() {
                *a = -a.clone();
            }
            b = -b;
            row[next_art] = Rational::one();
            basis.push(next_art);
            init_col.push(next_art);
            next_art += 1;
            flipped.push(true);
        } else {
            basis.push(n + i);
            init_col.push(n + i);
            flipped.push(false);
        }
        rows.push(row);
        rhs.push(b);
    }
    for i in 0..k {
        let mut row = vec![Rational::zero(); ncols];
        row[..n].clone_from_slice(p.eq.row(i));
        let mut e = p.eq_rhs[i].clone();
        let flip = e.is_negative();
        if flip {
            for a in row.iter_mut() {
                *a = -a.clone();
            }
            e = -e;
        }
        row[next_art] = Rational::one();
        basis.push(next_art);
        init_col.push(next_art);
        next_art += 1;
        flipped.push(flip);
        rows.push(row);
        rhs.push(e);
    }

    let mut t = Tableau {
        rows,
        rhs,
        basis,
        kinds,
        cost: Vec::new(),
        reduced: Vec::new(),
        init_col,
        degenerate_run: 0,
        bland: false,
    };

    let orient = |y: Vec<Rational>| -> (QVector, QVector) {
        // multipliers of the original (unflipped) rows, negated into λ/ν form
        let mut y: Vec<Rational> = y
            .into_iter()
            .zip(&flipped)
            .map(|(v, &f)| if f { v } else { -v })
            .collect();
        let eq_part = y.split_off(m);
        (y, eq_part)
    };

    if n_art > 0 {
        let phase1_cost = t
            .kinds
            .iter()
            .map(|&kd| {
                if kd == ColKind::Artificial {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        t.set_cost(phase1_cost);
        if t.run().is_some() {
            return Err(Error::Verification(
                "phase one reported an unbounded direction".into(),
            ));
        }
        if t.objective_value().is_positive() {
            let (ineq_farkas, eq_farkas) = orient(t.row_duals());
            return Ok(LpOutcome::Infeasible {
                ineq_farkas,
                eq_farkas,
            });
        }
        // drive zero-level artificials out of the basis where possible
        for r in 0..total_rows {
            if t.kinds[t.basis[r]] != ColKind::Artificial {
                continue;
            }
            if let Some(c) =
                (0..ncols).find(|&j| t.kinds[j] != ColKind::Artificial && !t.rows[r][j].is_zero())
            {
                t.pivot(r, c);
            }
        }
    }

    let mut cost = p.objective.clone();
    cost.resize(ncols, Rational::zero());
    t.set_cost(cost);
    if let Some((col, increase)) = t.run() {
        let mut full = zeros(ncols);
        let dir = if increase {
            Rational::one()
        } else {
            -Rational::one()
        };
        for (r, &b) in t.basis.iter().enumerate() {
            full[b] = -&dir * &t.rows[r][col];
        }
        full[col] = dir;
        full.truncate(n);
        return Ok(LpOutcome::Unbounded {
            point: t.primal(n),
            ray: full,
        });
    }
    let x = t.primal(n);
    let value = dot(&p.objective, &x);
    let (ineq_duals, eq_duals) = orient(t.row_duals());
    Ok(LpOutcome::Optimal {
        x,
        ineq_duals,
        eq_duals,
        value,
    })
}

/// Exact check of every invariant of the outcome against the problem.
pub fn verify_lp_certificate(p: &LpProblem, outcome: &LpOutcome) -> bool {
    let n = p.num_vars();
    let m = p.ineq.nrows();
    let k = p.eq.nrows();
    match outcome {
        LpOutcome::Optimal {
            x,
            ineq_duals,
            eq_duals,
            value,
        } => {
            if x.len() != n || ineq_duals.len() != m || eq_duals.len() != k {
                return false;
            }
            if !p.is_feasible(x) || ineq_duals.iter().any(|l| l.is_negative()) {
                return false;
            }
            let mut stationarity = p.ineq.tr_mul_vec(ineq_duals);
            for (s, v) in stationarity.iter_mut().zip(p.eq.tr_mul_vec(eq_duals)) {
                *s += v;
            }
            let minus_c: QVector = p.objective.iter().map(|c| -c).collect();
            if stationarity != minus_c {
                return false;
            }
            let dual_value = -(dot(&p.ineq_rhs, ineq_duals) + dot(&p.eq_rhs, eq_duals));
            let slack_ok = p
                .ineq
                .rows_iter()
                .zip(&p.ineq_rhs)
                .zip(ineq_duals)
                .all(|((a, b), l)| l.is_zero() || dot(a, x) == *b);
            *value == dot(&p.objective, x) && *value == dual_value && slack_ok
        }
        LpOutcome::Unbounded { point, ray } => {
            point.len() == n
                && ray.len() == n
                && p.is_feasible(point)
                && p.ineq.rows_iter().all(|a| !dot(a, ray).is_positive())
                && is_zero_vec(&p.eq.mul_vec(ray))
                && dot(&p.objective, ray).is_negative()
        }
        LpOutcome::Infeasible {
            ineq_farkas,
            eq_farkas,
        } => {
            if ineq_farkas.len() != m
                || eq_farkas.len() != k
                || ineq_farkas.iter().any(|l| l.is_negative())
            {
                return false;
            }
            let mut combo = p.ineq.tr_mul_vec(ineq_farkas);
            for (s, v) in combo.iter_mut().zip(p.eq.tr_mul_vec(eq_farkas)) {
                *s += v;
            }
            is_zero_vec(&combo)
                && (dot(&p.ineq_rhs, ineq_farkas) + dot(&p.eq_rhs, eq_farkas)).is_negative()
        }
    }
}
