//! Finitely generated cones and normal cones of polyhedra.

use num_traits::{One, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::linalg::{add, dot, is_zero_vec, neg, scale, zeros, QMatrix, QVector};
use crate::lp::{solve_lp, LpOutcome, LpProblem};
use crate::polyhedron::{HPolyhedron, Support};

/// `cone{g_1, …, g_k}`; no generators means `{0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedCone {
    dim: usize,
    generators: Vec<QVector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConeMembership {
    /// `v = Σ λ_i g_i` with `λ ≥ 0`.
    Member { multipliers: QVector },
    /// `⟨w, g_i⟩ ≤ 0` for all `i` and `⟨w, v⟩ > 0`.
    NotMember { separator: QVector },
}

impl ConeMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, ConeMembership::Member { .. })
    }
}

impl GeneratedCone {
    /// Zero generators are discarded.
    pub fn new(dim: usize, generators: Vec<QVector>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "generator of length {} in a cone of dimension {dim}",
                g.len()
            )));
        }
        Ok(GeneratedCone {
            dim,
            generators: generators.into_iter().filter(|g| !is_zero_vec(g)).collect(),
        })
    }

    pub fn zero(dim: usize) -> Self {
        GeneratedCone {
            dim,
            generators: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[QVector] {
        &self.generators
    }

    /// `K1 + K2`, generated by the union of generators.
    pub fn sum(&self, other: &GeneratedCone) -> Result<GeneratedCone> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch(
                "cone sum of different dimensions".into(),
            ));
        }
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        Ok(GeneratedCone {
            dim: self.dim,
            generators,
        })
    }

    /// `Σ λ_i g_i`.
    pub fn combine(&self, multipliers: &[Rational]) -> QVector {
        self.generators
            .iter()
            .zip(multipliers)
            .fold(zeros(self.dim), |acc, (g, l)| add(&acc, &scale(g, l)))
    }

    /// Decides `v ∈ K` by a feasibility LP; the Farkas multipliers of an
    /// infeasible system give the separator.
    pub fn contains(&self, v: &[Rational]) -> Result<ConeMembership> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for cone of dimension {}",
                v.len(),
                self.dim
            )));
        }
        let k = self.generators.len();
        let mut ineq = QMatrix::zeros(0, k);
        for i in 0..k {
            let mut row = zeros(k);
            row[i] = -Rational::one();
            ineq.push_row(row);
        }
        let mut eq = QMatrix::zeros(0, k);
        for j in 0..self.dim {
            eq.push_row(self.generators.iter().map(|g| g[j].clone()).collect());
        }
        let lp = LpProblem::new(zeros(k), ineq, zeros(k), eq, v.to_vec())?;
        match solve_lp(&lp)? {
            LpOutcome::Optimal { x, .. } => Ok(ConeMembership::Member { multipliers: x }),
            LpOutcome::Infeasible { eq_farkas, .. } => Ok(ConeMembership::NotMember {
                separator: neg(&eq_farkas),
            }),
            LpOutcome::Unbounded { .. } => Err(Error::Verification(
                "zero-objective LP reported unbounded".into(),
            )),
        }
    }

    /// Checks a membership answer against the cone without solving anything.
    pub fn verify_membership(&self, v: &[Rational], answer: &ConeMembership) -> bool {
        match answer {
            ConeMembership::Member { multipliers } => {
                multipliers.len() == self.generators.len()
                    && multipliers.iter().all(|l| *l >= Rational::zero())
                    && self.combine(multipliers) == v
            }
            ConeMembership::NotMember { separator } => {
                separator.len() == self.dim
                    && self
                        .generators
                        .iter()
                        .all(|g| dot(separator, g) <= Rational::zero())
                    && dot(separator, v) > Rational::zero()
            }
        }
    }

    /// `self ⊆ other`, checked generator by generator.
    pub fn is_subcone_of(&self, other: &GeneratedCone) -> Result<bool> {
        for g in &self.generators {
            if !other.contains(g)?.is_member() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn cone_equal(&self, other: &GeneratedCone) -> Result<bool> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch(
                "cone equality on different dimensions".into(),
            ));
        }
        Ok(self.is_subcone_of(other)? && other.is_subcone_of(self)?)
    }

    /// H-form of the cone, obtained by projecting out the multipliers.
    pub fn to_polyhedron(&self) -> Result<HPolyhedron> {
        self.slice(self.dim, &[])
    }

    /// `{u ∈ R^k : (u, tail) ∈ K}` in H-form, where `k + tail.len()` is the
    /// cone dimension.
    pub fn slice(&self, k: usize, tail: &[Rational]) -> Result<HPolyhedron> {
        if k + tail.len() != self.dim {
            return Err(Error::DimensionMismatch(
                "cone slice does not match the cone dimension".into(),
            ));
        }
        let m = self.generators.len();
        let mut rows = Vec::new();
        for i in 0..m {
            let mut row = zeros(k + m);
            row[k + i] = -Rational::one();
            rows.push((row, Rational::zero()));
        }
        let mut eqs = Vec::new();
        for j in 0..self.dim {
            let mut row = zeros(k + m);
            if j < k {
                row[j] = Rational::one();
            }
            for (i, g) in self.generators.iter().enumerate() {
                row[k + i] = -&g[j];
            }
            let rhs = if j < k {
                Rational::zero()
            } else {
                -&tail[j - k]
            };
            eqs.push((row, rhs));
        }
        HPolyhedron::from_row_lists(k + m, rows, eqs).project_fm(k)
    }
}

/// `N(x̄; P)` generated by the active inequality rows and both signs of every
/// equality row. `None` when `x̄ ∉ P`.
pub fn normal_cone_at(p: &HPolyhedron, x: &[Rational]) -> Result<Option<GeneratedCone>> {
    if !p.contains_point(x)? {
        return Ok(None);
    }
    let mut generators: Vec<QVector> = p
        .active_rows(x)
        .into_iter()
        .map(|i| p.ineq().row(i).to_vec())
        .collect();
    for row in p.eq().rows_iter() {
        generators.push(row.to_vec());
        generators.push(neg(row));
    }
    GeneratedCone::new(p.dim(), generators).map(Some)
}

/// `⟨g, x - x̄⟩ ≤ 0` on `P`, by maximizing `⟨g, ·⟩` over `P`.
pub fn supports_at(p: &HPolyhedron, x: &[Rational], g: &[Rational]) -> bool {
    match p.support(g) {
        Support::Finite { value, .. } => value == dot(g, x),
        Support::Infinite { .. } => false,
        Support::Empty => true,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalDecomposition {
    pub target: QVector,
    pub part_p: QVector,
    pub part_omega: QVector,
    /// Multipliers on the generators of `N(x̄;P)` followed by those of `N(x̄;Ω)`.
    pub multipliers: QVector,
}

impl NormalDecomposition {
    pub fn verify(&self, normal_p: &GeneratedCone, normal_omega: &GeneratedCone) -> Result<bool> {
        if add(&self.part_p, &self.part_omega) != self.target {
            return Ok(false);
        }
        Ok(normal_p.contains(&self.part_p)?.is_member()
            && normal_omega.contains(&self.part_omega)?.is_member())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionRuleReport {
    pub qualification_holds: bool,
    /// A point of `P ∩ ri(Ω)` when the qualification holds.
    pub qualification_witness: Option<QVector>,
    pub inclusion_holds: bool,
    pub rule_holds: bool,
    pub normal_p: GeneratedCone,
    pub normal_omega: GeneratedCone,
    pub normal_intersection: GeneratedCone,
    /// One entry per generator of `N(x̄; P∩Ω)` lying in `N(x̄;P) + N(x̄;Ω)`.
    pub decompositions: Vec<NormalDecomposition>,
}

/// Compares `N(x̄; P∩Ω)` with `N(x̄;P) + N(x̄;Ω)`. The left cone is built from
/// the redundancy-pruned system of `P∩Ω`, so equality is a genuine check.
pub fn normal_intersection_rule(
    p: &HPolyhedron,
    omega: &HPolyhedron,
    x: &[Rational],
) -> Result<IntersectionRuleReport> {
    if p.dim() != omega.dim() || x.len() != p.dim() {
        return Err(Error::DimensionMismatch(
            "intersection rule inputs differ in dimension".into(),
        ));
    }
    if !p.contains_point(x)? || !omega.contains_point(x)? {
        return Err(Error::PointNotInIntersection);
    }
    let normal_p = normal_cone_at(p, x)?.expect("x̄ ∈ P");
    let normal_omega = normal_cone_at(omega, x)?.expect("x̄ ∈ Ω");
    let both = p.intersect(omega)?.remove_redundant();
    let normal_intersection = normal_cone_at(&both, x)?.expect("x̄ ∈ P∩Ω");
    let sum = normal_p.sum(&normal_omega)?;

    let mut inclusion_holds = true;
    for g in sum.generators() {
        inclusion_holds &= supports_at(&both, x, g) && normal_intersection.contains(g)?.is_member();
    }
    let mut decompositions = Vec::new();
    let mut reverse = true;
    let split = normal_p.generators().len();
    for g in normal_intersection.generators() {
        match sum.contains(g)? {
            ConeMembership::Member { multipliers } => {
                let part_p = normal_p.combine(&multipliers[..split]);
                let part_omega = normal_omega.combine(&multipliers[split..]);
                decompositions.push(NormalDecomposition {
                    target: g.clone(),
                    part_p,
                    part_omega,
                    multipliers,
                });
            }
            ConeMembership::NotMember { .. } => reverse = false,
        }
    }
    let qualification_witness = omega.relative_interior_meets(p)?;
    Ok(IntersectionRuleReport {
        qualification_holds: qualification_witness.is_some(),
        qualification_witness,
        inclusion_holds,
        rule_holds: inclusion_holds && reverse,
        normal_p,
        normal_omega,
        normal_intersection,
        decompositions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};
    use crate::linalg::qvec;

    fn cone(gens: &[&[i64]]) -> GeneratedCone {
        let n = gens.first().map_or(2, |g| g.len());
        GeneratedCone::new(n, gens.iter().map(|g| qvec(g)).collect()).unwrap()
    }

    #[test]
    fn normal_cones_from_active_rows() {
        let orthant = HPolyhedron::from_i64(2, &[&[-1, 0], &[0, -1]], &[0, 0], &[], &[]);
        let k = normal_cone_at(&orthant, &qvec(&[0, 0])).unwrap().unwrap();
        assert_eq!(k.generators(), &[qvec(&[-1, 0]), qvec(&[0, -1])]);
        let inner = normal_cone_at(&orthant, &qvec(&[1, 1])).unwrap().unwrap();
        assert!(inner.generators().is_empty());
        assert_eq!(normal_cone_at(&orthant, &qvec(&[-1, 1])).unwrap(), None);
        let unit = HPolyhedron::from_i64(1, &[&[1], &[-1]], &[1, 0], &[], &[]);
        assert_eq!(
            normal_cone_at(&unit, &[int(1)])
                .unwrap()
                .unwrap()
                .generators(),
            &[qvec(&[1])]
        );
        assert!(normal_cone_at(&unit, &[int(1), int(0)]).is_err());
        for g in k.generators() {
            assert!(supports_at(&orthant, &qvec(&[0, 0]), g));
        }
    }

    #[test]
    fn equality_rows_give_both_signs() {
        let line = HPolyhedron::from_i64(2, &[], &[], &[&[1, -1]], &[0]);
        let k = normal_cone_at(&line, &qvec(&[3, 3])).unwrap().unwrap();
        assert!(k.contains(&qvec(&[-2, 2])).unwrap().is_member());
        assert!(k.contains(&qvec(&[2, -2])).unwrap().is_member());
    }

    #[test]
    fn membership_with_certificates() {
        let k = cone(&[&[1, 0], &[0, 1]]);
        let yes = k.contains(&qvec(&[1, 1])).unwrap();
        assert_eq!(
            yes,
            ConeMembership::Member {
                multipliers: qvec(&[1, 1])
            }
        );
        let no = k.contains(&qvec(&[-1, 0])).unwrap();
        assert!(k.verify_membership(&qvec(&[-1, 0]), &no));
        assert!(!no.is_member());
        let z = GeneratedCone::zero(2);
        assert!(z.contains(&qvec(&[0, 0])).unwrap().is_member());
        let off = z.contains(&qvec(&[0, 3])).unwrap();
        assert!(!off.is_member() && z.verify_membership(&qvec(&[0, 3]), &off));
    }

    #[test]
    fn cone_equality() {
        assert!(cone(&[&[1, 0], &[0, 1], &[1, 1]])
            .cone_equal(&cone(&[&[1, 0], &[0, 1]]))
            .unwrap());
        assert!(!cone(&[&[1, 0]]).cone_equal(&cone(&[&[-1, 0]])).unwrap());
        assert!(GeneratedCone::zero(2)
            .cone_equal(&GeneratedCone::zero(2))
            .unwrap());
    }

    #[test]
    fn cone_in_h_form() {
        let h = cone(&[&[1, 0], &[1, 1]]).to_polyhedron().unwrap();
        assert!(h.contains_point(&qvec(&[3, 1])).unwrap());
        assert!(!h.contains_point(&qvec(&[1, 2])).unwrap());
        assert!(GeneratedCone::zero(2)
            .to_polyhedron()
            .unwrap()
            .set_eq(&HPolyhedron::singleton(&qvec(&[0, 0])))
            .unwrap());
    }

    #[test]
    fn slices() {
        let k = cone(&[&[1, -1], &[-1, -1]]);
        let s = k.slice(1, &[int(-1)]).unwrap();
        let unit = HPolyhedron::from_i64(1, &[&[1], &[-1]], &[1, 1], &[], &[]);
        assert!(s.set_eq(&unit).unwrap());
        assert!(k.slice(1, &[int(1)]).unwrap().is_empty());
        assert!(GeneratedCone::zero(2)
            .slice(1, &[int(0)])
            .unwrap()
            .set_eq(&HPolyhedron::singleton(&[int(0)]))
            .unwrap());
    }

    #[test]
    fn intersection_rule_with_qualification() {
        let p = HPolyhedron::from_i64(2, &[&[1, 0]], &[0], &[], &[]);
        let omega = HPolyhedron::from_i64(2, &[&[0, 1]], &[0], &[], &[]);
        let r = normal_intersection_rule(&p, &omega, &qvec(&[0, 0])).unwrap();
        assert!(r.qualification_holds && r.rule_holds && r.inclusion_holds);
        let sum = r.normal_p.sum(&r.normal_omega).unwrap();
        let ConeMembership::Member { multipliers } = sum.contains(&qvec(&[1, 1])).unwrap() else {
            panic!()
        };
        assert_eq!(r.normal_p.combine(&multipliers[..1]), qvec(&[1, 0]));
        assert_eq!(r.normal_omega.combine(&multipliers[1..]), qvec(&[0, 1]));
        for d in &r.decompositions {
            assert!(d.verify(&r.normal_p, &r.normal_omega).unwrap());
        }
    }

    #[test]
    fn intersection_rule_without_qualification() {
        let p = HPolyhedron::from_i64(1, &[&[1]], &[0], &[], &[]);
        let omega = HPolyhedron::from_i64(1, &[&[-1]], &[0], &[], &[]);
        let r = normal_intersection_rule(&p, &omega, &[int(0)]).unwrap();
        assert!(!r.qualification_holds);
        assert!(r.rule_holds);
        assert!(r
            .normal_intersection
            .cone_equal(&cone(&[&[1], &[-1]]))
            .unwrap());
    }

    #[test]
    fn intersection_rule_at_an_interior_point() {
        let unit = HPolyhedron::from_i64(1, &[&[1], &[-1]], &[1, 0], &[], &[]);
        let r = normal_intersection_rule(&unit, &unit, &[ratio(1, 2)]).unwrap();
        assert!(r.rule_holds && r.qualification_holds);
        assert!(r.normal_intersection.generators().is_empty());
        assert_eq!(
            normal_intersection_rule(&unit, &unit, &[int(2)]),
            Err(Error::PointNotInIntersection)
        );
    }
}
