//! Polyhedral functions `f(x) = max_i ⟨c_i, x⟩ + d_i` on a polyhedral domain.

use num_traits::{One, Zero};

use crate::arith::{ExtendedRational, Rational};
use crate::cones::{normal_cone_at, GeneratedCone};
use crate::error::{Error, Result};
use crate::linalg::{dot, zeros, QMatrix, QVector};
use crate::polyhedron::HPolyhedron;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyhedralFunction {
    dim: usize,
    pieces: Vec<(QVector, Rational)>,
    domain: HPolyhedron,
}

impl PolyhedralFunction {
    /// Requires at least one piece and a nonempty domain.
    pub fn new(dim: usize, pieces: Vec<(QVector, Rational)>, domain: HPolyhedron) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::NoPieces);
        }
        if domain.dim() != dim || pieces.iter().any(|(c, _)| c.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "pieces or domain do not live in dimension {dim}"
            )));
        }
        if domain.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        Ok(PolyhedralFunction {
            dim,
            pieces,
            domain,
        })
    }

    /// `δ_Ω`: zero on `Ω`, `+∞` elsewhere.
    pub fn indicator(domain: HPolyhedron) -> Result<Self> {
        let n = domain.dim();
        Self::new(n, vec![(zeros(n), Rational::zero())], domain)
    }

    /// `x ↦ ⟨c, x⟩ + d` on the whole space.
    pub fn affine(c: QVector, d: Rational) -> Self {
        let n = c.len();
        PolyhedralFunction {
            dim: n,
            pieces: vec![(c, d)],
            domain: HPolyhedron::universe(n),
        }
    }

    /// Integer literal constructor: pieces `(c_i, d_i)` on `domain`.
    pub fn from_i64(pieces: &[(&[i64], i64)], domain: HPolyhedron) -> Self {
        let pieces = pieces
            .iter()
            .map(|(c, d)| (crate::linalg::qvec(c), crate::arith::int(*d)))
            .collect();
        Self::new(domain.dim(), pieces, domain).expect("valid integer function literal")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[(QVector, Rational)] {
        &self.pieces
    }

    pub fn domain(&self) -> &HPolyhedron {
        &self.domain
    }

    /// Max-affine value, unchecked domain membership.
    pub(crate) fn max_piece(&self, x: &[Rational]) -> Rational {
        self.pieces
            .iter()
            .map(|(c, d)| dot(c, x) + d)
            .max()
            .expect("at least one piece")
    }

    pub fn eval(&self, x: &[Rational]) -> Result<ExtendedRational> {
        if !self.domain.contains_point(x)? {
            return Ok(ExtendedRational::PosInfinity);
        }
        Ok(ExtendedRational::Finite(self.max_piece(x)))
    }

    /// Finite value at a domain point.
    pub fn value_at(&self, x: &[Rational]) -> Result<Rational> {
        match self.eval(x)? {
            ExtendedRational::Finite(v) => Ok(v),
            _ => Err(Error::PointOutsideDomain),
        }
    }

    /// `{(x, t) : ⟨c_i, x⟩ + d_i ≤ t, x ∈ dom f}` in `R^{n+1}`.
    pub fn epigraph(&self) -> HPolyhedron {
        let n = self.dim;
        let mut rows: Vec<(QVector, Rational)> = self
            .pieces
            .iter()
            .map(|(c, d)| {
                let mut row = c.clone();
                row.push(-Rational::one());
                (row, -d)
            })
            .collect();
        let dom = self.domain.embed(n + 1, &(0..n).collect::<Vec<_>>());
        rows.extend(dom.ineq_rows());
        HPolyhedron::from_row_lists(n + 1, rows, dom.eq_rows())
    }

    /// `f + g` with all pairwise sums of pieces on the common domain.
    pub fn sum(&self, other: &PolyhedralFunction) -> Result<PolyhedralFunction> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch(
                "sum of functions on different spaces".into(),
            ));
        }
        let mut pieces = Vec::with_capacity(self.pieces.len() * other.pieces.len());
        for (c1, d1) in &self.pieces {
            for (c2, d2) in &other.pieces {
                pieces.push((crate::linalg::add(c1, c2), d1 + d2));
            }
        }
        let domain = self.domain.intersect(&other.domain)?;
        if domain.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        Ok(PolyhedralFunction {
            dim: self.dim,
            pieces,
            domain,
        })
    }

    /// `f ∘ A` for `A : R^n → R^m`, pieces `(Aᵀc_i, d_i)` on the preimage of the domain.
    pub fn compose_linear(&self, a: &QMatrix) -> Result<PolyhedralFunction> {
        if a.nrows() != self.dim {
            return Err(Error::DimensionMismatch(
                "matrix rows must equal the function dimension".into(),
            ));
        }
        let n = a.ncols();
        let domain = self.domain.preimage(a, &zeros(self.dim))?;
        if domain.is_empty() {
            return Err(Error::RangeMissesDomain);
        }
        let pieces = self
            .pieces
            .iter()
            .map(|(c, d)| (a.tr_mul_vec(c), d.clone()))
            .collect();
        Ok(PolyhedralFunction {
            dim: n,
            pieces,
            domain,
        })
    }

    /// Indices of pieces attaining the max at `x`.
    pub fn active_pieces(&self, x: &[Rational]) -> Vec<usize> {
        let top = self.max_piece(x);
        (0..self.pieces.len())
            .filter(|&i| dot(&self.pieces[i].0, x) + &self.pieces[i].1 == top)
            .collect()
    }

    /// `∂f(x̄) = {x* : (x*, -1) ∈ N((x̄, f(x̄)); epi f)}`.
    pub fn subdifferential_at(&self, x: &[Rational]) -> Result<HPolyhedron> {
        let fx = self.value_at(x)?;
        let mut point = x.to_vec();
        point.push(fx);
        let cone =
            normal_cone_at(&self.epigraph(), &point)?.expect("graph point lies in the epigraph");
        cone.slice(self.dim, &[-Rational::one()])
    }

    /// `conv{c_i : i active} + N(x̄; dom f)`, computed without the epigraph.
    pub fn subdifferential_by_pieces(&self, x: &[Rational]) -> Result<HPolyhedron> {
        let n = self.dim;
        self.value_at(x)?;
        let active = self.active_pieces(x);
        let normals = normal_cone_at(&self.domain, x)?.expect("x̄ ∈ dom f");
        // (x*, 1) ∈ cone{(c_i, 1)} + cone{(g, 0)} encodes conv + cone.
        let mut generators: Vec<QVector> = active
            .iter()
            .map(|&i| {
                let mut g = self.pieces[i].0.clone();
                g.push(Rational::one());
                g
            })
            .collect();
        for g in normals.generators() {
            let mut g = g.clone();
            g.push(Rational::zero());
            generators.push(g);
        }
        GeneratedCone::new(n + 1, generators)?.slice(n, &[Rational::one()])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdiffSumReport {
    /// `dom f1 ∩ ri(dom f2) ≠ ∅`.
    pub qualification_holds: bool,
    pub rule_holds: bool,
    /// `∂f2(x̄) + ∂f1(x̄) ⊆ ∂(f1 + f2)(x̄)`.
    pub inclusion_holds: bool,
    pub left: HPolyhedron,
    pub right: HPolyhedron,
}

pub fn subdiff_sum_rule_check(
    f1: &PolyhedralFunction,
    f2: &PolyhedralFunction,
    x: &[Rational],
) -> Result<SubdiffSumReport> {
    if !f1.domain.contains_point(x)? || !f2.domain.contains_point(x)? {
        return Err(Error::PointOutsideCommonDomain);
    }
    let left = f1.sum(f2)?.subdifferential_at(x)?;
    let right = f1
        .subdifferential_at(x)?
        .minkowski_sum(&f2.subdifferential_at(x)?)?;
    let inclusion_holds = left.includes(&right)?;
    let rule_holds = inclusion_holds && right.includes(&left)?;
    let qualification_holds = f2.domain.relative_interior_meets(&f1.domain)?.is_some();
    Ok(SubdiffSumReport {
        qualification_holds,
        rule_holds,
        inclusion_holds,
        left,
        right,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdiffChainReport {
    /// The range of `A` meets `ri(dom f)`.
    pub qualification_holds: bool,
    pub rule_holds: bool,
    pub inclusion_holds: bool,
    pub left: HPolyhedron,
    pub right: HPolyhedron,
}

/// Compares `∂(f∘A)(x̄)` with `Aᵀ ∂f(Ax̄)`.
pub fn subdiff_chain_rule(
    f: &PolyhedralFunction,
    a: &QMatrix,
    x: &[Rational],
) -> Result<SubdiffChainReport> {
    if a.ncols() != x.len() || a.nrows() != f.dim {
        return Err(Error::DimensionMismatch(
            "chain rule matrix does not fit".into(),
        ));
    }
    let composed = f.compose_linear(a)?;
    let y = a.mul_vec(x);
    if !f.domain.contains_point(&y)? {
        return Err(Error::CompositionPointOutsideDomain);
    }
    let left = composed.subdifferential_at(x)?;
    let right = f
        .subdifferential_at(&y)?
        .affine_image(&a.transpose(), &zeros(a.ncols()))?;
    let inclusion_holds = left.includes(&right)?;
    let rule_holds = inclusion_holds && right.includes(&left)?;
    let range = HPolyhedron::universe(a.ncols()).affine_image(a, &zeros(f.dim))?;
    let qualification_holds = f.domain.relative_interior_meets(&range)?.is_some();
    Ok(SubdiffChainReport {
        qualification_holds,
        rule_holds,
        inclusion_holds,
        left,
        right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::linalg::qvec;

    pub(crate) fn abs() -> PolyhedralFunction {
        PolyhedralFunction::from_i64(&[(&[1], 0), (&[-1], 0)], HPolyhedron::universe(1))
    }

    fn half_line() -> HPolyhedron {
        HPolyhedron::from_i64(1, &[&[-1]], &[0], &[], &[])
    }

    fn interval(lo: i64, hi: i64) -> HPolyhedron {
        HPolyhedron::from_i64(1, &[&[1], &[-1]], &[hi, -lo], &[], &[])
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            PolyhedralFunction::new(1, vec![], HPolyhedron::universe(1)),
            Err(Error::NoPieces)
        );
        assert_eq!(
            PolyhedralFunction::indicator(HPolyhedron::empty(1)),
            Err(Error::EmptyPolyhedron)
        );
        assert!(
            PolyhedralFunction::new(2, vec![(qvec(&[1]), int(0))], HPolyhedron::universe(2))
                .is_err()
        );
    }

    #[test]
    fn evaluation() {
        assert_eq!(
            abs().eval(&[int(-2)]).unwrap(),
            ExtendedRational::Finite(int(2))
        );
        assert_eq!(abs().eval(&[int(0)]).unwrap(), ExtendedRational::zero());
        let ind = PolyhedralFunction::indicator(half_line()).unwrap();
        assert_eq!(ind.eval(&[int(-1)]).unwrap(), ExtendedRational::PosInfinity);
    }

    #[test]
    fn epigraphs() {
        let e = abs().epigraph();
        assert!(e
            .set_eq(&HPolyhedron::from_i64(
                2,
                &[&[1, -1], &[-1, -1]],
                &[0, 0],
                &[],
                &[]
            ))
            .unwrap());
        let zero = PolyhedralFunction::affine(qvec(&[0]), int(0)).epigraph();
        assert!(zero
            .set_eq(&HPolyhedron::from_i64(2, &[&[0, -1]], &[0], &[], &[]))
            .unwrap());
        let point = PolyhedralFunction::indicator(interval(0, 0))
            .unwrap()
            .epigraph();
        assert!(point
            .set_eq(&HPolyhedron::from_i64(
                2,
                &[&[0, -1]],
                &[0],
                &[&[1, 0]],
                &[0]
            ))
            .unwrap());
    }

    #[test]
    fn subdifferentials() {
        let at0 = abs().subdifferential_at(&[int(0)]).unwrap();
        assert!(at0.set_eq(&interval(-1, 1)).unwrap());
        assert!(abs()
            .subdifferential_at(&[int(2)])
            .unwrap()
            .set_eq(&interval(1, 1))
            .unwrap());
        let ind = PolyhedralFunction::indicator(half_line()).unwrap();
        let cone = ind.subdifferential_at(&[int(0)]).unwrap();
        assert!(cone
            .set_eq(&HPolyhedron::from_i64(1, &[&[1]], &[0], &[], &[]))
            .unwrap());
        assert_eq!(
            ind.subdifferential_at(&[int(-1)]),
            Err(Error::PointOutsideDomain)
        );
        for (f, x) in [(abs(), 0), (abs(), 2), (ind, 0)] {
            let a = f.subdifferential_at(&[int(x)]).unwrap();
            let b = f.subdifferential_by_pieces(&[int(x)]).unwrap();
            assert!(a.set_eq(&b).unwrap());
        }
    }

    #[test]
    fn sum_rule_examples() {
        let ind = PolyhedralFunction::indicator(half_line()).unwrap();
        let r = subdiff_sum_rule_check(&ind, &abs(), &[int(0)]).unwrap();
        assert!(r.qualification_holds && r.rule_holds);
        assert!(r
            .left
            .set_eq(&HPolyhedron::from_i64(1, &[&[1]], &[1], &[], &[]))
            .unwrap());

        let r = subdiff_sum_rule_check(&abs(), &abs(), &[int(0)]).unwrap();
        assert!(r.rule_holds && r.left.set_eq(&interval(-2, 2)).unwrap());

        let zero = PolyhedralFunction::affine(qvec(&[0]), int(0));
        let r = subdiff_sum_rule_check(&abs(), &zero, &[int(5)]).unwrap();
        assert!(r.rule_holds && r.right.set_eq(&interval(1, 1)).unwrap());

        assert_eq!(
            subdiff_sum_rule_check(&ind, &abs(), &[int(-1)]),
            Err(Error::PointOutsideCommonDomain)
        );
    }

    #[test]
    fn chain_rule_examples() {
        let r = subdiff_chain_rule(&abs(), &QMatrix::from_i64(&[&[2]]), &[int(0)]).unwrap();
        assert!(r.rule_holds && r.left.set_eq(&interval(-2, 2)).unwrap());

        let r = subdiff_chain_rule(&abs(), &QMatrix::identity(1), &[int(3)]).unwrap();
        assert!(r.rule_holds && r.left.set_eq(&interval(1, 1)).unwrap());

        let r = subdiff_chain_rule(&abs(), &QMatrix::from_i64(&[&[1, 1]]), &qvec(&[0, 0])).unwrap();
        assert!(r.rule_holds);
        let segment = HPolyhedron::from_i64(2, &[&[1, 0], &[-1, 0]], &[1, 1], &[&[1, -1]], &[0]);
        assert!(r.left.set_eq(&segment).unwrap());

        let ind = PolyhedralFunction::indicator(interval(1, 2)).unwrap();
        assert_eq!(
            subdiff_chain_rule(&ind, &QMatrix::from_i64(&[&[0]]), &[int(0)]),
            Err(Error::RangeMissesDomain)
        );
        assert_eq!(
            subdiff_chain_rule(&ind, &QMatrix::identity(1), &[int(0)]),
            Err(Error::CompositionPointOutsideDomain)
        );
    }
}
