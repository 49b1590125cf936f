//! Fourier–Motzkin projection and the operations built on it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::linalg::{is_zero_vec, QMatrix, QVector};
use crate::lp::{solve_lp, LpOutcome, LpProblem};
use crate::polyhedron::HPolyhedron;

type Row = (QVector, Rational);

/// Scales a row so its coefficients are coprime integers. Equalities also get
/// a positive leading coefficient.
fn normalize(row: Row, is_eq: bool) -> Row {
    let (a, b) = row;
    let mut lcm = BigInt::one();
    let mut gcd = BigInt::zero();
    for v in &a {
        if !v.is_zero() {
            lcm = lcm.lcm(v.denom());
        }
    }
    for v in &a {
        if !v.is_zero() {
            gcd = gcd.gcd(&(v.numer() * (&lcm / v.denom())));
        }
    }
    if gcd.is_zero() {
        return (a, b);
    }
    let mut factor = Rational::new(lcm, gcd);
    if is_eq
        && a.iter()
            .find(|v| !v.is_zero())
            .is_some_and(|v| v.is_negative())
    {
        factor = -factor;
    }
    (a.iter().map(|v| v * &factor).collect(), b * factor)
}

fn untag<H>(rows: Vec<(Row, H)>) -> Vec<Row> {
    rows.into_iter().map(|(r, _)| r).collect()
}

/// Drops trivial rows and keeps the tightest of parallel inequalities.
/// Returns `None` when a row reads `0 ≤ negative`.
fn tidy_tagged<H>(rows: Vec<(Row, H)>) -> Option<Vec<(Row, H)>> {
    let mut out: Vec<(Row, H)> = Vec::new();
    for (row, tag) in rows {
        let (a, b) = normalize(row, false);
        if is_zero_vec(&a) {
            if b.is_negative() {
                return None;
            }
            continue;
        }
        match out.iter_mut().find(|((c, _), _)| *c == a) {
            Some(existing) => {
                if b < existing.0 .1 {
                    *existing = ((a, b), tag);
                }
            }
            None => out.push(((a, b), tag)),
        }
    }
    Some(out)
}

/// Removes inequality rows implied by the remaining ones together with `eqs`,
/// testing rows in order against the rows still kept.
fn prune(dim: usize, rows: Vec<Row>, eqs: &[Row]) -> Vec<Row> {
    untag(prune_tagged(
        dim,
        rows.into_iter().map(|r| (r, ())).collect(),
        eqs,
    ))
}

fn prune_tagged<H>(dim: usize, rows: Vec<(Row, H)>, eqs: &[Row]) -> Vec<(Row, H)> {
    // Columns that are zero everywhere do not affect the LPs.
    let live: Vec<usize> = (0..dim)
        .filter(|&j| {
            rows.iter().any(|((a, _), _)| !a[j].is_zero())
                || eqs.iter().any(|(a, _)| !a[j].is_zero())
        })
        .collect();
    let squeeze = |a: &QVector| -> QVector { live.iter().map(|&j| a[j].clone()).collect() };
    let dim = live.len();
    let mut keep = vec![true; rows.len()];
    for i in 0..rows.len() {
        let mut ineq = QMatrix::zeros(0, dim);
        let mut ineq_rhs = Vec::new();
        for (j, ((a, b), _)) in rows.iter().enumerate() {
            if j != i && keep[j] {
                ineq.push_row(squeeze(a));
                ineq_rhs.push(b.clone());
            }
        }
        let mut eq = QMatrix::zeros(0, dim);
        let mut eq_rhs = Vec::new();
        for (a, e) in eqs {
            eq.push_row(squeeze(a));
            eq_rhs.push(e.clone());
        }
        let ((row, rhs), _) = &rows[i];
        let objective = squeeze(row).iter().map(|v| -v).collect();
        let lp =
            LpProblem::new(objective, ineq, ineq_rhs, eq, eq_rhs).expect("consistent row lengths");
        keep[i] = match solve_lp(&lp).expect("well-formed LP") {
            LpOutcome::Optimal { value, .. } => -value > *rhs,
            LpOutcome::Unbounded { .. } => true,
            LpOutcome::Infeasible { .. } => false,
        };
    }
    rows.into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(r, _)| r)
        .collect()
}

/// Sorted union of two row histories.
fn merge(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Substitutes `x_j` out of `row` using equality `pivot` with nonzero coefficient on `j`.
fn substitute(row: &Row, pivot: &Row, j: usize) -> Row {
    let f = &row.0[j] / &pivot.0[j];
    let a = row
        .0
        .iter()
        .zip(&pivot.0)
        .map(|(r, p)| r - &f * p)
        .collect();
    (a, &row.1 - &f * &pivot.1)
}

impl HPolyhedron {
    /// Projects onto the first `k` coordinates by Fourier–Motzkin elimination,
    /// pruning redundant rows with LPs after every step.
    pub fn project_fm(&self, k: usize) -> Result<HPolyhedron> {
        let n = self.dim();
        if k > n {
            return Err(Error::DimensionMismatch(format!(
                "cannot project dimension {n} onto {k} coordinates"
            )));
        }
        if self.is_empty() {
            return Ok(HPolyhedron::empty(k));
        }
        // Each row carries the original rows it was combined from. After `s`
        // eliminations a row built from more than `s + 1` originals is
        // redundant (Chernikov), so it is dropped before the LP pruning.
        let mut rows: Vec<(Row, Vec<usize>)> = self
            .ineq_rows()
            .into_iter()
            .enumerate()
            .map(|(i, r)| (r, vec![i]))
            .collect();
        let mut eqs: Vec<Row> = self.eq_rows();
        let mut pending: Vec<usize> = (k..n).collect();
        let mut eliminated = 0;

        while !pending.is_empty() {
            let pivot = pending.iter().enumerate().find_map(|(pos, &j)| {
                eqs.iter()
                    .position(|(a, _)| !a[j].is_zero())
                    .map(|e| (pos, j, e))
            });
            if let Some((pos, j, e)) = pivot {
                pending.swap_remove(pos);
                let p = eqs.swap_remove(e);
                eqs = eqs.iter().map(|r| substitute(r, &p, j)).collect();
                rows = rows
                    .into_iter()
                    .map(|(r, h)| (substitute(&r, &p, j), h))
                    .collect();
            } else {
                let cost = |j: usize| {
                    let pos = rows.iter().filter(|((a, _), _)| a[j].is_positive()).count();
                    let neg = rows.iter().filter(|((a, _), _)| a[j].is_negative()).count();
                    pos * neg
                };
                let (pos, &j) = pending
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, &j)| cost(j))
                    .expect("nonempty");
                pending.swap_remove(pos);
                eliminated += 1;
                let (upper, rest): (Vec<_>, Vec<_>) =
                    rows.into_iter().partition(|((a, _), _)| a[j].is_positive());
                let (lower, mut next): (Vec<_>, Vec<_>) =
                    rest.into_iter().partition(|((a, _), _)| a[j].is_negative());
                for ((pa, pb), ph) in &upper {
                    for ((qa, qb), qh) in &lower {
                        let hist = merge(ph, qh);
                        if hist.len() > eliminated + 1 {
                            continue;
                        }
                        let sp = -&qa[j];
                        let sq = &pa[j];
                        let a = pa.iter().zip(qa).map(|(u, v)| u * &sp + v * sq).collect();
                        next.push(((a, pb * &sp + qb * sq), hist));
                    }
                }
                rows = next;
            }
            let mut kept_eqs = Vec::new();
            for e in eqs {
                let (a, b) = normalize(e, true);
                if is_zero_vec(&a) {
                    if !b.is_zero() {
                        return Ok(HPolyhedron::empty(k));
                    }
                } else if !kept_eqs.contains(&(a.clone(), b.clone())) {
                    kept_eqs.push((a, b));
                }
            }
            eqs = kept_eqs;
            rows = match tidy_tagged(rows) {
                Some(r) => prune_tagged(n, r, &eqs),
                None => return Ok(HPolyhedron::empty(k)),
            };
        }
        let rows = untag(rows);
        let cut = |(mut a, b): Row| {
            a.truncate(k);
            (a, b)
        };
        Ok(HPolyhedron::from_row_lists(
            k,
            rows.into_iter().map(cut).collect(),
            eqs.into_iter().map(cut).collect(),
        ))
    }

    /// Drops inequality rows implied by the others. Equalities are kept.
    pub fn remove_redundant(&self) -> HPolyhedron {
        if self.is_empty() {
            return HPolyhedron::empty(self.dim());
        }
        let eqs = self.eq_rows();
        let rows = prune(self.dim(), self.ineq_rows(), &eqs);
        HPolyhedron::from_row_lists(self.dim(), rows, eqs)
    }

    /// `P + Q`, projected from `{(w, u) : u ∈ P, w − u ∈ Q}`.
    pub fn minkowski_sum(&self, other: &HPolyhedron) -> Result<HPolyhedron> {
        let n = self.dim();
        if other.dim() != n {
            return Err(Error::DimensionMismatch(
                "Minkowski sum of different dimensions".into(),
            ));
        }
        let p = self.embed(2 * n, &(n..2 * n).collect::<Vec<_>>());
        let mut diff = QMatrix::zeros(0, 2 * n);
        for i in 0..n {
            let mut row = vec![Rational::zero(); 2 * n];
            row[i] = Rational::one();
            row[n + i] = -Rational::one();
            diff.push_row(row);
        }
        let q = other.preimage(&diff, &vec![Rational::zero(); n])?;
        p.intersect(&q)?.project_fm(n)
    }

    /// `{M x + shift : x ∈ P}`, projected from the graph `{(y, x) : y = M x + shift, x ∈ P}`.
    pub fn affine_image(&self, map: &QMatrix, shift: &[Rational]) -> Result<HPolyhedron> {
        let n = self.dim();
        let p = map.nrows();
        if map.ncols() != n || shift.len() != p {
            return Err(Error::DimensionMismatch(
                "affine image map does not fit the polyhedron".into(),
            ));
        }
        let lifted = self.embed(p + n, &(p..p + n).collect::<Vec<_>>());
        let mut eqs = lifted.eq_rows();
        for i in 0..p {
            let mut row = vec![Rational::zero(); p + n];
            row[i] = Rational::one();
            for j in 0..n {
                row[p + j] = -&map[(i, j)];
            }
            eqs.push((row, shift[i].clone()));
        }
        HPolyhedron::from_row_lists(p + n, lifted.ineq_rows(), eqs).project_fm(p)
    }
}
