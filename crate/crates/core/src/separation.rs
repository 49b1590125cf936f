//! Proper separation of two polyhedra with the strict side on `Ω`.

use num_traits::{One, Signed, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::linalg::{add, dot, is_zero_vec, zeros, QMatrix, QVector};
use crate::lp::{solve_lp, LpOutcome, LpProblem};
use crate::polyhedron::{HPolyhedron, Support};

/// Multipliers `(λ ≥ 0, ν)` with `w = Aᵀλ + Eᵀν` and `bᵀλ + eᵀν ≤ bound`,
/// certifying `sup_{x ∈ P} ⟨w, x⟩ ≤ bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multipliers {
    pub ineq: QVector,
    pub eq: QVector,
}

impl Multipliers {
    /// Returns the certified upper bound `bᵀλ + eᵀν` if the multipliers
    /// reproduce `w` on `P`.
    pub fn bound_for(&self, p: &HPolyhedron, w: &[Rational]) -> Option<Rational> {
        if self.ineq.len() != p.num_ineq()
            || self.eq.len() != p.num_eq()
            || self.ineq.iter().any(|l| l.is_negative())
        {
            return None;
        }
        let combo = add(
            &p.ineq().tr_mul_vec(&self.ineq),
            &p.eq().tr_mul_vec(&self.eq),
        );
        (combo == w).then(|| dot(p.ineq_rhs(), &self.ineq) + dot(p.eq_rhs(), &self.eq))
    }
}

/// `sup_P ⟨v,·⟩ ≤ α ≤ inf_Ω ⟨v,·⟩` with `⟨v, ŷ⟩ > α` at some `ŷ ∈ Ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationCertificate {
    pub v: QVector,
    pub alpha: Rational,
    /// Bounds `⟨v,·⟩` above on `P`.
    pub farkas_p: Multipliers,
    /// Bounds `⟨-v,·⟩` above on `Ω`.
    pub farkas_omega: Multipliers,
    pub strict_witness: QVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeparationOutcome {
    Separated(SeparationCertificate),
    /// A point of `P ∩ ri(Ω)`.
    NotSeparable {
        witness: QVector,
    },
}

/// Maximizes the gap `t = ⟨v, y₀⟩ − α` at a relative-interior point `y₀` of `Ω`
/// over `‖v‖∞ ≤ 1` and Farkas-encoded `sup_P ⟨v,·⟩ ≤ α ≤ inf_Ω ⟨v,·⟩`.
pub fn properly_separate(p: &HPolyhedron, omega: &HPolyhedron) -> Result<SeparationOutcome> {
    let n = p.dim();
    if omega.dim() != n {
        return Err(Error::DimensionMismatch(
            "separation of sets in different dimensions".into(),
        ));
    }
    if p.is_empty() {
        return Err(Error::EmptyPolyhedron);
    }
    let y0 = omega.relative_interior_point()?;
    let (mp, kp, mo, ko) = (p.num_ineq(), p.num_eq(), omega.num_ineq(), omega.num_eq());
    // Layout: v | α | λ_P | ν_P | λ_Ω | ν_Ω | t
    let alpha = n;
    let lp_ = n + 1;
    let np_ = lp_ + mp;
    let lo_ = np_ + kp;
    let no_ = lo_ + mo;
    let t = no_ + ko;
    let total = t + 1;
    let one = Rational::one;

    let mut ineq = QMatrix::zeros(0, total);
    let mut ineq_rhs = Vec::new();
    let mut eq = QMatrix::zeros(0, total);
    let mut eq_rhs = Vec::new();
    let push =
        |m: &mut QMatrix, rhs: &mut Vec<Rational>, entries: Vec<(usize, Rational)>, r: Rational| {
            let mut row = zeros(total);
            for (j, v) in entries {
                row[j] += v;
            }
            m.push_row(row);
            rhs.push(r);
        };

    for j in 0..n {
        // v_j = Σ λ_P A_P[·,j] + Σ ν_P E_P[·,j]
        let mut e = vec![(j, one())];
        e.extend((0..mp).map(|i| (lp_ + i, -&p.ineq()[(i, j)])));
        e.extend((0..kp).map(|i| (np_ + i, -&p.eq()[(i, j)])));
        push(&mut eq, &mut eq_rhs, e, Rational::zero());
        // −v_j = Σ λ_Ω A_Ω[·,j] + Σ ν_Ω E_Ω[·,j]
        let mut e = vec![(j, one())];
        e.extend((0..mo).map(|i| (lo_ + i, omega.ineq()[(i, j)].clone())));
        e.extend((0..ko).map(|i| (no_ + i, omega.eq()[(i, j)].clone())));
        push(&mut eq, &mut eq_rhs, e, Rational::zero());
        push(&mut ineq, &mut ineq_rhs, vec![(j, one())], one());
        push(&mut ineq, &mut ineq_rhs, vec![(j, -one())], one());
    }
    // b_Pᵀλ_P + e_Pᵀν_P − α ≤ 0
    let mut e: Vec<(usize, Rational)> = vec![(alpha, -one())];
    e.extend((0..mp).map(|i| (lp_ + i, p.ineq_rhs()[i].clone())));
    e.extend((0..kp).map(|i| (np_ + i, p.eq_rhs()[i].clone())));
    push(&mut ineq, &mut ineq_rhs, e, Rational::zero());
    // b_Ωᵀλ_Ω + e_Ωᵀν_Ω + α ≤ 0
    let mut e: Vec<(usize, Rational)> = vec![(alpha, one())];
    e.extend((0..mo).map(|i| (lo_ + i, omega.ineq_rhs()[i].clone())));
    e.extend((0..ko).map(|i| (no_ + i, omega.eq_rhs()[i].clone())));
    push(&mut ineq, &mut ineq_rhs, e, Rational::zero());
    for i in (lp_..np_).chain(lo_..no_) {
        push(
            &mut ineq,
            &mut ineq_rhs,
            vec![(i, -one())],
            Rational::zero(),
        );
    }
    // t − ⟨v, y₀⟩ + α ≤ 0
    let mut e: Vec<(usize, Rational)> = vec![(t, one()), (alpha, one())];
    e.extend((0..n).map(|j| (j, -&y0[j])));
    push(&mut ineq, &mut ineq_rhs, e, Rational::zero());

    let mut objective = zeros(total);
    objective[t] = -one();
    let lp = LpProblem::new(objective, ineq, ineq_rhs, eq, eq_rhs)?;
    let x = match solve_lp(&lp)? {
        LpOutcome::Optimal { x, .. } => x,
        other => {
            return Err(Error::Verification(format!(
                "separation LP not optimal: {other:?}"
            )))
        }
    };
    if x[t].is_positive() {
        return Ok(SeparationOutcome::Separated(SeparationCertificate {
            v: x[..n].to_vec(),
            alpha: x[alpha].clone(),
            farkas_p: Multipliers {
                ineq: x[lp_..np_].to_vec(),
                eq: x[np_..lo_].to_vec(),
            },
            farkas_omega: Multipliers {
                ineq: x[lo_..no_].to_vec(),
                eq: x[no_..t].to_vec(),
            },
            strict_witness: y0,
        }));
    }
    match omega.relative_interior_meets(p)? {
        Some(witness) => Ok(SeparationOutcome::NotSeparable { witness }),
        None => Err(Error::Verification(
            "no separator although P misses ri(Ω)".into(),
        )),
    }
}

/// Checks the multipliers, re-derives `sup_P` and `inf_Ω` by LP, and checks
/// the strict witness.
pub fn verify_separation_certificate(
    p: &HPolyhedron,
    omega: &HPolyhedron,
    cert: &SeparationCertificate,
) -> bool {
    let n = p.dim();
    if omega.dim() != n
        || cert.v.len() != n
        || cert.strict_witness.len() != n
        || is_zero_vec(&cert.v)
    {
        return false;
    }
    let minus_v: QVector = cert.v.iter().map(|x| -x).collect();
    let multipliers_ok = matches!(cert.farkas_p.bound_for(p, &cert.v), Some(b) if b <= cert.alpha)
        && matches!(cert.farkas_omega.bound_for(omega, &minus_v), Some(b) if b <= -&cert.alpha);
    let sup_p_ok = match p.support(&cert.v) {
        Support::Finite { value, .. } => value <= cert.alpha,
        Support::Empty => true,
        Support::Infinite { .. } => false,
    };
    let inf_omega_ok = match omega.support(&minus_v) {
        Support::Finite { value, .. } => -value >= cert.alpha,
        Support::Empty => true,
        Support::Infinite { .. } => false,
    };
    multipliers_ok
        && sup_p_ok
        && inf_omega_ok
        && omega.contains_unchecked(&cert.strict_witness)
        && dot(&cert.v, &cert.strict_witness) > cert.alpha
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::linalg::qvec;

    fn certificate(p: &HPolyhedron, omega: &HPolyhedron) -> SeparationCertificate {
        match properly_separate(p, omega).unwrap() {
            SeparationOutcome::Separated(c) => c,
            other => panic!("expected a separator, got {other:?}"),
        }
    }

    #[test]
    fn half_planes() {
        let p = HPolyhedron::from_i64(2, &[&[0, 1]], &[0], &[], &[]);
        let omega = HPolyhedron::from_i64(2, &[&[0, -1]], &[0], &[], &[]);
        let c = certificate(&p, &omega);
        assert_eq!(c.v, qvec(&[0, 1]));
        assert_eq!(c.alpha, int(0));
        assert!(c.strict_witness[1] > int(0));
        assert!(verify_separation_certificate(&p, &omega, &c));

        let mut shifted = c.clone();
        shifted.alpha = int(1);
        assert!(!verify_separation_certificate(&p, &omega, &shifted));
        let mut zero = c;
        zero.v = qvec(&[0, 0]);
        assert!(!verify_separation_certificate(&p, &omega, &zero));
    }

    #[test]
    fn whole_space_is_not_separable() {
        let r2 = HPolyhedron::universe(2);
        match properly_separate(&r2, &r2).unwrap() {
            SeparationOutcome::NotSeparable { witness } => assert_eq!(witness.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn disjoint_rays() {
        let p = HPolyhedron::from_i64(1, &[&[1]], &[-1], &[], &[]);
        let omega = HPolyhedron::from_i64(1, &[&[-1]], &[-1], &[], &[]);
        let c = certificate(&p, &omega);
        assert_eq!(c.v, qvec(&[1]));
        assert!(c.alpha >= int(-1) && c.alpha <= int(1));
        assert!(c.strict_witness[0] > c.alpha);
        assert!(verify_separation_certificate(&p, &omega, &c));
    }

    #[test]
    fn touching_a_flat_omega() {
        // Ω is a segment on the x-axis, P touches its endpoint: P ∩ ri(Ω) = ∅.
        let omega = HPolyhedron::from_i64(2, &[&[1, 0], &[-1, 0]], &[1, 0], &[&[0, 1]], &[0]);
        let p = HPolyhedron::from_i64(2, &[&[1, 0]], &[0], &[], &[]);
        let c = certificate(&p, &omega);
        assert!(verify_separation_certificate(&p, &omega, &c));
        // The vertical line x₁ = 1/2 crosses the middle of the segment.
        let q = HPolyhedron::from_i64(2, &[], &[], &[&[2, 0]], &[1]);
        match properly_separate(&q, &omega).unwrap() {
            SeparationOutcome::NotSeparable { witness } => {
                assert!(omega.contains_point_ri(&witness).unwrap())
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_input_is_rejected() {
        let e = HPolyhedron::empty(1);
        assert_eq!(
            properly_separate(&e, &HPolyhedron::universe(1)),
            Err(Error::EmptyPolyhedron)
        );
        assert_eq!(
            properly_separate(&HPolyhedron::universe(1), &e),
            Err(Error::EmptyPolyhedron)
        );
    }
}
