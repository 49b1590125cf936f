//! H-polyhedra `{x : A x ≤ b, E x = e}` and their LP-backed geometry.

use num_traits::{One, Signed, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::linalg::{add, dot, is_zero_vec, zeros, QMatrix, QVector};
use crate::lp::{solve_lp, LpOutcome, LpProblem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolyhedron {
    dim: usize,
    ineq: QMatrix,
    ineq_rhs: QVector,
    eq: QMatrix,
    eq_rhs: QVector,
}

/// Result of maximizing a linear functional over a polyhedron.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Support {
    Finite { value: Rational, argmax: QVector },
    Infinite { point: QVector, ray: QVector },
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeInteriorReport {
    pub implicit_equality_rows: Vec<usize>,
    pub affine_dim: usize,
    pub ri_point: QVector,
    /// For each inequality row that is not implicit, a feasible point where
    /// the row holds strictly; `None` for implicit rows.
    pub strict_witnesses: Vec<Option<QVector>>,
}

impl HPolyhedron {
    /// Builds `{x : ineq·x ≤ ineq_rhs, eq·x = eq_rhs}`. All-zero rows that hold
    /// trivially are dropped; an all-zero equality with nonzero right-hand side
    /// becomes the infeasible row `0 ≤ -1`.
    pub fn new(
        dim: usize,
        ineq: QMatrix,
        ineq_rhs: QVector,
        eq: QMatrix,
        eq_rhs: QVector,
    ) -> Result<Self> {
        if ineq.ncols() != dim || eq.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "polyhedron of dimension {dim} given blocks with {} and {} columns",
                ineq.ncols(),
                eq.ncols()
            )));
        }
        if ineq.nrows() != ineq_rhs.len() || eq.nrows() != eq_rhs.len() {
            return Err(Error::DimensionMismatch(
                "constraint rows do not match right-hand sides".into(),
            ));
        }
        let mut rows = Vec::new();
        for (a, b) in ineq.rows_iter().zip(ineq_rhs) {
            rows.push((a.to_vec(), b));
        }
        let mut eqs = Vec::new();
        for (a, e) in eq.rows_iter().zip(eq_rhs) {
            eqs.push((a.to_vec(), e));
        }
        Ok(Self::from_row_lists(dim, rows, eqs))
    }

    pub(crate) fn from_row_lists(
        dim: usize,
        rows: Vec<(QVector, Rational)>,
        eqs: Vec<(QVector, Rational)>,
    ) -> Self {
        let mut ineq = QMatrix::zeros(0, dim);
        let mut ineq_rhs = Vec::new();
        let mut eq = QMatrix::zeros(0, dim);
        let mut eq_rhs = Vec::new();
        let mut infeasible = false;
        for (a, b) in rows {
            if is_zero_vec(&a) {
                infeasible |= b.is_negative();
                continue;
            }
            ineq.push_row(a);
            ineq_rhs.push(b);
        }
        for (a, e) in eqs {
            if is_zero_vec(&a) {
                infeasible |= !e.is_zero();
                continue;
            }
            eq.push_row(a);
            eq_rhs.push(e);
        }
        if infeasible {
            ineq.push_row(zeros(dim));
            ineq_rhs.push(-Rational::one());
        }
        HPolyhedron {
            dim,
            ineq,
            ineq_rhs,
            eq,
            eq_rhs,
        }
    }

    /// Integer literal constructor for tests and examples.
    pub fn from_i64(
        dim: usize,
        ineq: &[&[i64]],
        ineq_rhs: &[i64],
        eq: &[&[i64]],
        eq_rhs: &[i64],
    ) -> Self {
        let mat = |rows: &[&[i64]]| {
            if rows.is_empty() {
                QMatrix::zeros(0, dim)
            } else {
                QMatrix::from_i64(rows)
            }
        };
        let v = |xs: &[i64]| xs.iter().map(|&x| crate::arith::int(x)).collect();
        Self::new(dim, mat(ineq), v(ineq_rhs), mat(eq), v(eq_rhs))
            .expect("inconsistent integer polyhedron literal")
    }

    pub fn universe(dim: usize) -> Self {
        Self::from_row_lists(dim, vec![], vec![])
    }

    /// The canonical empty set `{x : 0 ≤ -1}`.
    pub fn empty(dim: usize) -> Self {
        Self::from_row_lists(dim, vec![(zeros(dim), -Rational::one())], vec![])
    }

    pub fn singleton(point: &[Rational]) -> Self {
        let n = point.len();
        let eqs = (0..n)
            .map(|i| (crate::linalg::unit(n, i), point[i].clone()))
            .collect();
        Self::from_row_lists(n, vec![], eqs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ineq(&self) -> &QMatrix {
        &self.ineq
    }

    pub fn ineq_rhs(&self) -> &[Rational] {
        &self.ineq_rhs
    }

    pub fn eq(&self) -> &QMatrix {
        &self.eq
    }

    pub fn eq_rhs(&self) -> &[Rational] {
        &self.eq_rhs
    }

    pub fn num_ineq(&self) -> usize {
        self.ineq.nrows()
    }

    pub fn num_eq(&self) -> usize {
        self.eq.nrows()
    }

    pub(crate) fn ineq_rows(&self) -> Vec<(QVector, Rational)> {
        self.ineq
            .rows_iter()
            .map(|r| r.to_vec())
            .zip(self.ineq_rhs.iter().cloned())
            .collect()
    }

    pub(crate) fn eq_rows(&self) -> Vec<(QVector, Rational)> {
        self.eq
            .rows_iter()
            .map(|r| r.to_vec())
            .zip(self.eq_rhs.iter().cloned())
            .collect()
    }

    fn check_dim(&self, x: &[Rational]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} for polyhedron of dimension {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Minimizes `objective` over the polyhedron.
    pub fn minimize(&self, objective: &[Rational]) -> LpOutcome {
        let p = LpProblem::new(
            objective.to_vec(),
            self.ineq.clone(),
            self.ineq_rhs.clone(),
            self.eq.clone(),
            self.eq_rhs.clone(),
        )
        .expect("objective length matches polyhedron dimension");
        solve_lp(&p).expect("well-formed LP")
    }

    /// `sup {⟨w, x⟩ : x ∈ P}` with a maximizer or a recession ray.
    pub fn support(&self, w: &[Rational]) -> Support {
        let neg: QVector = w.iter().map(|v| -v).collect();
        match self.minimize(&neg) {
            LpOutcome::Optimal { x, value, .. } => Support::Finite {
                value: -value,
                argmax: x,
            },
            LpOutcome::Unbounded { point, ray } => Support::Infinite { point, ray },
            LpOutcome::Infeasible { .. } => Support::Empty,
        }
    }

    /// Farkas multipliers `(λ, μ)` proving emptiness, or `None` if feasible.
    pub fn emptiness_certificate(&self) -> Option<(QVector, QVector)> {
        match self.minimize(&zeros(self.dim)) {
            LpOutcome::Infeasible {
                ineq_farkas,
                eq_farkas,
            } => Some((ineq_farkas, eq_farkas)),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.emptiness_certificate().is_some()
    }

    pub fn feasible_point(&self) -> Option<QVector> {
        self.minimize(&zeros(self.dim)).feasible_point().cloned()
    }

    pub fn contains_point(&self, x: &[Rational]) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.contains_unchecked(x))
    }

    pub(crate) fn contains_unchecked(&self, x: &[Rational]) -> bool {
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

    /// Inequality rows that hold with equality at `x`.
    pub fn active_rows(&self, x: &[Rational]) -> Vec<usize> {
        self.ineq
            .rows_iter()
            .zip(&self.ineq_rhs)
            .enumerate()
            .filter(|(_, (a, b))| dot(a, x) == **b)
            .map(|(i, _)| i)
            .collect()
    }

    /// `x + T(x; P)`: only the rows active at `x`. Agrees with `P` near `x`.
    pub fn localize(&self, x: &[Rational]) -> HPolyhedron {
        let rows = self
            .active_rows(x)
            .into_iter()
            .map(|i| (self.ineq.row(i).to_vec(), self.ineq_rhs[i].clone()))
            .collect();
        HPolyhedron::from_row_lists(self.dim, rows, self.eq_rows())
    }

    /// Detects implicit equalities with one LP per undecided row and returns a
    /// relative-interior point.
    pub fn implicit_equalities_report(&self) -> Result<RelativeInteriorReport> {
        let m = self.num_ineq();
        let mut witnesses: Vec<Option<QVector>> = vec![None; m];
        let mut implicit = Vec::new();
        if self.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        for i in 0..m {
            if witnesses[i].is_some() {
                continue;
            }
            let row = self.ineq.row(i);
            let witness = match self.minimize(row) {
                LpOutcome::Optimal { x, value, .. } => {
                    if value == self.ineq_rhs[i] {
                        implicit.push(i);
                        continue;
                    }
                    x
                }
                LpOutcome::Unbounded { point, ray } => add(&point, &ray),
                LpOutcome::Infeasible { .. } => return Err(Error::EmptyPolyhedron),
            };
            for j in i..m {
                if witnesses[j].is_none() && dot(self.ineq.row(j), &witness) < self.ineq_rhs[j] {
                    witnesses[j] = Some(witness.clone());
                }
            }
        }
        let mut affine = self.eq.clone();
        for &i in &implicit {
            affine.push_row(self.ineq.row(i).to_vec());
        }
        let affine_dim = self.dim - affine.rank();
        let ri_point = self
            .strict_point(&implicit, None)?
            .ok_or(Error::EmptyPolyhedron)?;
        Ok(RelativeInteriorReport {
            implicit_equality_rows: implicit,
            affine_dim,
            ri_point,
            strict_witnesses: witnesses,
        })
    }

    /// Maximizes `t ≤ 1` subject to `a_i x + t ≤ b_i` on non-implicit rows of
    /// `self`, implicit rows and equalities held exactly, and optionally `x ∈ other`.
    /// Returns the `x` part when the optimum is positive.
    fn strict_point(
        &self,
        implicit: &[usize],
        other: Option<&HPolyhedron>,
    ) -> Result<Option<QVector>> {
        let n = self.dim;
        let lift = |a: &[Rational], t: Rational| {
            let mut row = a.to_vec();
            row.push(t);
            row
        };
        let mut ineq = QMatrix::zeros(0, n + 1);
        let mut ineq_rhs = Vec::new();
        let mut eq = QMatrix::zeros(0, n + 1);
        let mut eq_rhs = Vec::new();
        for (i, (a, b)) in self.ineq.rows_iter().zip(&self.ineq_rhs).enumerate() {
            if implicit.contains(&i) {
                eq.push_row(lift(a, Rational::zero()));
                eq_rhs.push(b.clone());
            } else {
                ineq.push_row(lift(a, Rational::one()));
                ineq_rhs.push(b.clone());
            }
        }
        for (a, e) in self.eq.rows_iter().zip(&self.eq_rhs) {
            eq.push_row(lift(a, Rational::zero()));
            eq_rhs.push(e.clone());
        }
        if let Some(p) = other {
            for (a, b) in p.ineq.rows_iter().zip(&p.ineq_rhs) {
                ineq.push_row(lift(a, Rational::zero()));
                ineq_rhs.push(b.clone());
            }
            for (a, e) in p.eq.rows_iter().zip(&p.eq_rhs) {
                eq.push_row(lift(a, Rational::zero()));
                eq_rhs.push(e.clone());
            }
        }
        let mut cap = zeros(n + 1);
        cap[n] = Rational::one();
        ineq.push_row(cap);
        ineq_rhs.push(Rational::one());
        let mut objective = zeros(n + 1);
        objective[n] = -Rational::one();
        let lp = LpProblem::new(objective, ineq, ineq_rhs, eq, eq_rhs)?;
        match solve_lp(&lp)? {
            LpOutcome::Optimal { mut x, .. } => {
                let t = x.pop().expect("lifted variable");
                Ok(t.is_positive().then_some(x))
            }
            LpOutcome::Infeasible { .. } => Ok(None),
            LpOutcome::Unbounded { .. } => Err(Error::Verification(
                "capped strictness LP is unbounded".into(),
            )),
        }
    }

    pub fn relative_interior_point(&self) -> Result<QVector> {
        Ok(self.implicit_equalities_report()?.ri_point)
    }

    /// `x ∈ ri(P)`; false for every point of an empty polyhedron.
    pub fn contains_point_ri(&self, x: &[Rational]) -> Result<bool> {
        self.check_dim(x)?;
        if !self.contains_unchecked(x) {
            return Ok(false);
        }
        let report = self.implicit_equalities_report()?;
        Ok(self
            .ineq
            .rows_iter()
            .zip(&self.ineq_rhs)
            .enumerate()
            .all(|(i, (a, b))| report.implicit_equality_rows.contains(&i) || dot(a, x) < *b))
    }

    /// A point of `other ∩ ri(self)`, or `None` when that set is empty.
    pub fn relative_interior_meets(&self, other: &HPolyhedron) -> Result<Option<QVector>> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch(
                "relative_interior_meets on different dimensions".into(),
            ));
        }
        let report = match self.implicit_equalities_report() {
            Ok(r) => r,
            Err(Error::EmptyPolyhedron) => return Ok(None),
            Err(e) => return Err(e),
        };
        self.strict_point(&report.implicit_equality_rows, Some(other))
    }

    pub fn intersect(&self, other: &HPolyhedron) -> Result<HPolyhedron> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch(
                "intersect on different dimensions".into(),
            ));
        }
        let mut rows = self.ineq_rows();
        rows.extend(other.ineq_rows());
        let mut eqs = self.eq_rows();
        eqs.extend(other.eq_rows());
        Ok(Self::from_row_lists(self.dim, rows, eqs))
    }

    /// Re-embeds the polyhedron into `total` coordinates, sending coordinate `j`
    /// to `columns[j]`. Unmentioned coordinates are unconstrained.
    pub fn embed(&self, total: usize, columns: &[usize]) -> HPolyhedron {
        assert_eq!(
            columns.len(),
            self.dim,
            "embedding needs one target column per coordinate"
        );
        let spread = |a: &[Rational]| {
            let mut row = zeros(total);
            for (j, v) in a.iter().enumerate() {
                row[columns[j]] += v;
            }
            row
        };
        let rows = self
            .ineq_rows()
            .into_iter()
            .map(|(a, b)| (spread(&a), b))
            .collect();
        let eqs = self
            .eq_rows()
            .into_iter()
            .map(|(a, e)| (spread(&a), e))
            .collect();
        Self::from_row_lists(total, rows, eqs)
    }

    /// `self × other`.
    pub fn product(&self, other: &HPolyhedron) -> HPolyhedron {
        let total = self.dim + other.dim;
        let first: Vec<usize> = (0..self.dim).collect();
        let second: Vec<usize> = (self.dim..total).collect();
        self.embed(total, &first)
            .intersect(&other.embed(total, &second))
            .expect("same total dimension")
    }

    /// `{x : M x + shift ∈ P}`.
    pub fn preimage(&self, map: &QMatrix, shift: &[Rational]) -> Result<HPolyhedron> {
        if map.nrows() != self.dim || shift.len() != self.dim {
            return Err(Error::DimensionMismatch(
                "preimage map rows must equal polyhedron dimension".into(),
            ));
        }
        let n = map.ncols();
        let pull = |a: &[Rational], b: &Rational| (map.tr_mul_vec(a), b - dot(a, shift));
        let rows = self
            .ineq
            .rows_iter()
            .zip(&self.ineq_rhs)
            .map(|(a, b)| pull(a, b))
            .collect();
        let eqs = self
            .eq
            .rows_iter()
            .zip(&self.eq_rhs)
            .map(|(a, e)| pull(a, e))
            .collect();
        Ok(Self::from_row_lists(n, rows, eqs))
    }

    /// `other ⊆ self`, decided by one LP per constraint of `self`.
    pub fn includes(&self, other: &HPolyhedron) -> Result<bool> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch(
                "inclusion test on different dimensions".into(),
            ));
        }
        if other.is_empty() {
            return Ok(true);
        }
        for (a, b) in self.ineq.rows_iter().zip(&self.ineq_rhs) {
            match other.support(a) {
                Support::Finite { value, .. } if value <= *b => {}
                _ => return Ok(false),
            }
        }
        for (a, e) in self.eq.rows_iter().zip(&self.eq_rhs) {
            let neg: QVector = a.iter().map(|v| -v).collect();
            match (other.support(a), other.support(&neg)) {
                (Support::Finite { value: hi, .. }, Support::Finite { value: lo, .. })
                    if hi == *e && -&lo == *e => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }

    /// Point-set equality by mutual inclusion.
    pub fn set_eq(&self, other: &HPolyhedron) -> Result<bool> {
        Ok(self.includes(other)? && other.includes(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};
    use crate::linalg::qvec;

    fn interval(lo: i64, hi: i64) -> HPolyhedron {
        HPolyhedron::from_i64(1, &[&[1], &[-1]], &[hi, -lo], &[], &[])
    }

    #[test]
    fn emptiness() {
        assert!(!HPolyhedron::from_i64(1, &[&[1]], &[1], &[], &[]).is_empty());
        let p = HPolyhedron::from_i64(1, &[&[1], &[-1]], &[-1, 0], &[], &[]);
        assert_eq!(p.emptiness_certificate(), Some((qvec(&[1, 1]), vec![])));
        let simplex_edge =
            HPolyhedron::from_i64(2, &[&[-1, 0], &[0, -1]], &[0, 0], &[&[1, 1]], &[1]);
        assert!(!simplex_edge.is_empty());
        assert!(HPolyhedron::empty(3).is_empty());
    }

    #[test]
    fn degenerate_rows_are_canonicalized() {
        let p = HPolyhedron::from_i64(2, &[&[0, 0], &[1, 0]], &[3, 1], &[&[0, 0]], &[0]);
        assert_eq!(p.num_ineq(), 1);
        assert_eq!(p.num_eq(), 0);
        let q = HPolyhedron::from_i64(2, &[&[0, 0]], &[-2], &[], &[]);
        assert!(q.is_empty());
        let r = HPolyhedron::from_i64(1, &[], &[], &[&[0]], &[5]);
        assert!(r.is_empty());
    }

    #[test]
    fn membership() {
        let box01 = interval(0, 1);
        assert!(box01.contains_point(&[ratio(1, 2)]).unwrap());
        assert!(box01.contains_point(&[int(1)]).unwrap());
        assert!(!box01.contains_point(&[int(2)]).unwrap());
        assert!(box01.contains_point(&[int(1), int(2)]).is_err());
    }

    #[test]
    fn implicit_equalities_of_a_segment() {
        let p = HPolyhedron::from_i64(2, &[&[1, 1], &[-1, -1], &[-1, 0]], &[1, -1, 0], &[], &[]);
        let r = p.implicit_equalities_report().unwrap();
        assert_eq!(r.implicit_equality_rows, vec![0, 1]);
        assert_eq!(r.affine_dim, 1);
        assert!(r.strict_witnesses[0].is_none() && r.strict_witnesses[1].is_none());
        let w = r.strict_witnesses[2].as_ref().unwrap();
        assert!(p.contains_point(w).unwrap() && w[0] > int(0));
        let x = &r.ri_point;
        assert_eq!(&x[0] + &x[1], int(1));
        assert!(x[0] > int(0));
        assert!(p.contains_point_ri(x).unwrap());
    }

    #[test]
    fn implicit_equalities_of_a_half_line_and_a_point() {
        let r = HPolyhedron::from_i64(1, &[&[1]], &[1], &[], &[])
            .implicit_equalities_report()
            .unwrap();
        assert!(r.implicit_equality_rows.is_empty());
        assert_eq!(r.affine_dim, 1);
        assert!(r.ri_point[0] < int(1));

        let r = interval(0, 0).implicit_equalities_report().unwrap();
        assert_eq!(r.implicit_equality_rows, vec![0, 1]);
        assert_eq!(r.affine_dim, 0);
        assert_eq!(r.ri_point, qvec(&[0]));

        assert_eq!(
            HPolyhedron::empty(2).implicit_equalities_report(),
            Err(Error::EmptyPolyhedron)
        );
    }

    #[test]
    fn relative_interior_points() {
        let p = interval(0, 1);
        let x = p.relative_interior_point().unwrap();
        assert!(x[0] > int(0) && x[0] < int(1));
        assert_eq!(
            interval(0, 0).relative_interior_point().unwrap(),
            qvec(&[0])
        );
        assert!(p.contains_point_ri(&[ratio(1, 2)]).unwrap());
        assert!(!p.contains_point_ri(&[int(0)]).unwrap());
        assert!(!p.contains_point_ri(&[int(2)]).unwrap());
    }

    #[test]
    fn relative_interior_meeting() {
        let neg = HPolyhedron::from_i64(1, &[&[1]], &[0], &[], &[]);
        let pos = HPolyhedron::from_i64(1, &[&[-1]], &[0], &[], &[]);
        assert_eq!(pos.relative_interior_meets(&neg).unwrap(), None);
        let w = interval(0, 2)
            .relative_interior_meets(&interval(1, 3))
            .unwrap()
            .unwrap();
        assert!(w[0] >= int(1) && w[0] < int(2));
    }

    #[test]
    fn intersections() {
        let i = interval(0, 2).intersect(&interval(1, 3)).unwrap();
        assert!(i.set_eq(&interval(1, 2)).unwrap());
        let p = interval(0, 2);
        assert!(p
            .intersect(&HPolyhedron::universe(1))
            .unwrap()
            .set_eq(&p)
            .unwrap());
        assert!(interval(0, 1)
            .intersect(&interval(2, 3))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn inclusion_and_equality() {
        assert!(interval(0, 3).includes(&interval(1, 2)).unwrap());
        assert!(!interval(1, 2).includes(&interval(0, 3)).unwrap());
        assert!(interval(1, 2).includes(&HPolyhedron::empty(1)).unwrap());
        let line = HPolyhedron::from_i64(2, &[], &[], &[&[1, -1]], &[0]);
        let same = HPolyhedron::from_i64(2, &[&[1, -1], &[-1, 1]], &[0, 0], &[], &[]);
        assert!(line.set_eq(&same).unwrap());
    }

    #[test]
    fn preimage_and_embedding() {
        // {x ∈ R² : x1 + x2 ∈ [0, 1]}
        let m = QMatrix::from_i64(&[&[1, 1]]);
        let pre = interval(0, 1).preimage(&m, &[int(0)]).unwrap();
        assert!(pre.contains_point(&qvec(&[3, -3])).unwrap());
        assert!(!pre.contains_point(&qvec(&[3, -1])).unwrap());
        let emb = interval(0, 1).embed(3, &[2]);
        assert!(emb.contains_point(&qvec(&[9, -9, 1])).unwrap());
        assert!(!emb.contains_point(&qvec(&[0, 0, 2])).unwrap());
    }
}
