//! Polyhedral set-valued maps given by their graphs, and coderivative calculus.

use num_traits::{One, Zero};

use crate::arith::Rational;
use crate::cones::{normal_cone_at, GeneratedCone};
use crate::error::{Error, Result};
use crate::linalg::{add, neg, zeros, QMatrix, QVector};
use crate::polyhedron::HPolyhedron;

/// `F : R^nx ⇉ R^ny` with `gph F ⊆ R^{nx+ny}`, `x` block first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    nx: usize,
    ny: usize,
    graph: HPolyhedron,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPoint {
    pub x: QVector,
    pub y: QVector,
    pub y1: QVector,
    pub y2: QVector,
}

fn concat(a: &[Rational], b: &[Rational]) -> QVector {
    a.iter().chain(b).cloned().collect()
}

fn range(from: usize, len: usize) -> Vec<usize> {
    (from..from + len).collect()
}

impl PolyMap {
    pub fn new(nx: usize, ny: usize, graph: HPolyhedron) -> Result<Self> {
        if graph.dim() != nx + ny {
            return Err(Error::DimensionMismatch(format!(
                "graph of dimension {} for a map R^{nx} ⇉ R^{ny}",
                graph.dim()
            )));
        }
        if graph.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        Ok(PolyMap { nx, ny, graph })
    }

    /// `x ↦ {A x}`.
    pub fn linear(a: &QMatrix) -> Self {
        let (ny, nx) = (a.nrows(), a.ncols());
        let eqs = (0..ny)
            .map(|i| {
                let mut row: QVector = a.row(i).iter().map(|v| -v).collect();
                row.extend(zeros(ny));
                row[nx + i] = Rational::one();
                (row, Rational::zero())
            })
            .collect();
        PolyMap {
            nx,
            ny,
            graph: HPolyhedron::from_row_lists(nx + ny, vec![], eqs),
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn graph(&self) -> &HPolyhedron {
        &self.graph
    }

    /// `F(x)` as a polyhedron in `R^ny`.
    pub fn value_at(&self, x: &[Rational]) -> Result<HPolyhedron> {
        let mut m = QMatrix::zeros(0, self.ny);
        for _ in 0..self.nx {
            m.push_row(zeros(self.ny));
        }
        for j in 0..self.ny {
            m.push_row(crate::linalg::unit(self.ny, j));
        }
        let shift = concat(x, &zeros(self.ny));
        self.graph.preimage(&m, &shift)
    }

    /// `D*F(x̄,ȳ)(y*) = {x* : (x*, -y*) ∈ N((x̄,ȳ); gph F)}`.
    pub fn coderivative_at(
        &self,
        x: &[Rational],
        y: &[Rational],
        y_star: &[Rational],
    ) -> Result<HPolyhedron> {
        if x.len() != self.nx || y.len() != self.ny || y_star.len() != self.ny {
            return Err(Error::DimensionMismatch(
                "coderivative arguments do not fit the map".into(),
            ));
        }
        let cone = normal_cone_at(&self.graph, &concat(x, y))?.ok_or(Error::PointNotOnGraph)?;
        cone.slice(self.nx, &neg(y_star))
    }

    fn normal_cone(&self, x: &[Rational], y: &[Rational]) -> Result<GeneratedCone> {
        normal_cone_at(&self.graph, &concat(x, y))?.ok_or(Error::PointNotOnGraph)
    }

    /// `(F1 + F2)(x) = F1(x) + F2(x)`, projected from `(x, y, y1, y2)`.
    pub fn map_sum(&self, other: &PolyMap) -> Result<PolyMap> {
        let (nx, ny) = (self.nx, self.ny);
        if other.nx != nx || other.ny != ny {
            return Err(Error::DimensionMismatch(
                "sum of maps with different shapes".into(),
            ));
        }
        let total = nx + 3 * ny;
        let mut cols1 = range(0, nx);
        cols1.extend(range(nx + ny, ny));
        let mut cols2 = range(0, nx);
        cols2.extend(range(nx + 2 * ny, ny));
        let lifted = self
            .graph
            .embed(total, &cols1)
            .intersect(&other.graph.embed(total, &cols2))?;
        let mut eqs = lifted.eq_rows();
        for j in 0..ny {
            let mut row = zeros(total);
            row[nx + j] = Rational::one();
            row[nx + ny + j] = -Rational::one();
            row[nx + 2 * ny + j] = -Rational::one();
            eqs.push((row, Rational::zero()));
        }
        let graph =
            HPolyhedron::from_row_lists(total, lifted.ineq_rows(), eqs).project_fm(nx + ny)?;
        PolyMap::new(nx, ny, graph)
    }

    /// `G ∘ F` with `self = F`, projected from `(x, z, y)`.
    pub fn map_compose(&self, g: &PolyMap) -> Result<PolyMap> {
        if g.nx != self.ny {
            return Err(Error::DimensionMismatch(
                "composition of maps with mismatched middle space".into(),
            ));
        }
        let (nx, ny, nz) = (self.nx, self.ny, g.ny);
        let total = nx + nz + ny;
        let mut cols_f = range(0, nx);
        cols_f.extend(range(nx + nz, ny));
        let mut cols_g = range(nx + nz, ny);
        cols_g.extend(range(nx, nz));
        let lifted = self
            .graph
            .embed(total, &cols_f)
            .intersect(&g.graph.embed(total, &cols_g))?;
        let graph = lifted.project_fm(nx + nz)?;
        PolyMap::new(nx, nz, graph)
    }

    /// The map whose graph is `gph F` cut down to the rows active at `(x, y)`.
    pub fn localize(&self, x: &[Rational], y: &[Rational]) -> PolyMap {
        PolyMap {
            nx: self.nx,
            ny: self.ny,
            graph: self.graph.localize(&concat(x, y)),
        }
    }

    /// Whether `(x, y) ∈ gph F`.
    pub fn contains(&self, x: &[Rational], y: &[Rational]) -> Result<bool> {
        self.graph.contains_point(&concat(x, y))
    }
}

/// Finds `(ȳ1, ȳ2)` with `ȳ1 ∈ F1(x̄)`, `ȳ2 ∈ F2(x̄)`, `ȳ1 + ȳ2 = ȳ`.
pub fn find_split(
    f1: &PolyMap,
    f2: &PolyMap,
    x: &[Rational],
    y: &[Rational],
) -> Result<Option<SplitPoint>> {
    let ny = f1.ny;
    let v1 = f1.value_at(x)?;
    let v2 = f2.value_at(x)?;
    let mut diff = QMatrix::zeros(0, ny);
    for j in 0..ny {
        diff.push_row(crate::linalg::unit(ny, j).iter().map(|v| -v).collect());
    }
    // y2 = y − y1 ∈ F2(x)
    let shifted = v2.preimage(&diff, y)?;
    Ok(v1.intersect(&shifted)?.feasible_point().map(|y1| {
        let y2 = crate::linalg::sub(y, &y1);
        SplitPoint {
            x: x.to_vec(),
            y: y.to_vec(),
            y1,
            y2,
        }
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoderivativeSumReport {
    pub qualification_holds: bool,
    pub rule_holds: bool,
    /// `D*F1 + D*F2 ⊆ D*(F1 + F2)`.
    pub inclusion_holds: bool,
    pub left: HPolyhedron,
    pub right: HPolyhedron,
}

pub fn coderivative_sum_rule_check(
    f1: &PolyMap,
    f2: &PolyMap,
    s: &SplitPoint,
    y_star: &[Rational],
) -> Result<CoderivativeSumReport> {
    let (nx, ny) = (f1.nx, f1.ny);
    if f2.nx != nx
        || f2.ny != ny
        || s.x.len() != nx
        || [&s.y, &s.y1, &s.y2].iter().any(|v| v.len() != ny)
    {
        return Err(Error::DimensionMismatch(
            "split point does not fit the maps".into(),
        ));
    }
    if add(&s.y1, &s.y2) != s.y || !f1.contains(&s.x, &s.y1)? || !f2.contains(&s.x, &s.y2)? {
        return Err(Error::InvalidSplit);
    }
    // Coderivatives only see the graphs near the base points.
    let left = f1
        .localize(&s.x, &s.y1)
        .map_sum(&f2.localize(&s.x, &s.y2))?
        .coderivative_at(&s.x, &s.y, y_star)?;
    let right = f1
        .coderivative_at(&s.x, &s.y1, y_star)?
        .minkowski_sum(&f2.coderivative_at(&s.x, &s.y2, y_star)?)?;
    let inclusion_holds = left.includes(&right)?;
    let rule_holds = inclusion_holds && right.includes(&left)?;
    // (x, y1) ∈ gph F1 and (x, y2) ∈ ri(gph F2), in the lifted (x, y1, y2) space.
    let total = nx + 2 * ny;
    let mut cols1 = range(0, nx);
    cols1.extend(range(nx, ny));
    let mut cols2 = range(0, nx);
    cols2.extend(range(nx + ny, ny));
    let p = f1.graph.embed(total, &cols1);
    let omega = f2.graph.embed(total, &cols2);
    let qualification_holds = omega.relative_interior_meets(&p)?.is_some();
    Ok(CoderivativeSumReport {
        qualification_holds,
        rule_holds,
        inclusion_holds,
        left,
        right,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoderivativeChainReport {
    /// `(x̂,ŷ) ∈ gph F` and `(ŷ,ẑ) ∈ ri(gph G)` for some triple.
    pub qualification_holds_a: bool,
    /// `(x̂,ŷ) ∈ ri(gph F)` and `(ŷ,ẑ) ∈ gph G` for some triple.
    pub qualification_holds_b: bool,
    pub rule_holds: bool,
    /// `D*F ∘ D*G ⊆ D*(G∘F)`.
    pub inclusion_holds: bool,
    pub left: HPolyhedron,
    pub right: HPolyhedron,
}

/// Compares `D*(G∘F)(x̄,z̄)(z*)` with `D*F(x̄,ȳ) ∘ D*G(ȳ,z̄)(z*)`. The right side
/// is one projection of the joint multiplier system over `(x*, y*)`.
pub fn coderivative_chain_rule_check(
    f: &PolyMap,
    g: &PolyMap,
    x: &[Rational],
    y: &[Rational],
    z: &[Rational],
    z_star: &[Rational],
) -> Result<CoderivativeChainReport> {
    let (nx, ny, nz) = (f.nx, f.ny, g.ny);
    if g.nx != ny || x.len() != nx || y.len() != ny || z.len() != nz || z_star.len() != nz {
        return Err(Error::DimensionMismatch(
            "chain rule arguments do not fit the maps".into(),
        ));
    }
    if !f.contains(x, y)? || !g.contains(y, z)? {
        return Err(Error::InvalidIntermediatePoint);
    }
    let left = f
        .localize(x, y)
        .map_compose(&g.localize(y, z))?
        .coderivative_at(x, z, z_star)?;

    let nf = f.normal_cone(x, y)?;
    let ng = g.normal_cone(y, z)?;
    let (kf, kg) = (nf.generators().len(), ng.generators().len());
    // Variables: x* | y* | λ (on N_F) | μ (on N_G)
    let total = nx + ny + kf + kg;
    let mut rows = Vec::new();
    for i in 0..kf + kg {
        let mut row = zeros(total);
        row[nx + ny + i] = -Rational::one();
        rows.push((row, Rational::zero()));
    }
    let mut eqs = Vec::new();
    // (x*, -y*) = Σ λ_i g_i
    for j in 0..nx + ny {
        let mut row = zeros(total);
        row[j] = if j < nx {
            Rational::one()
        } else {
            -Rational::one()
        };
        for (i, gen) in nf.generators().iter().enumerate() {
            row[nx + ny + i] = -&gen[j];
        }
        eqs.push((row, Rational::zero()));
    }
    // (y*, -z*) = Σ μ_i h_i
    for j in 0..ny + nz {
        let mut row = zeros(total);
        if j < ny {
            row[nx + j] = Rational::one();
        }
        for (i, gen) in ng.generators().iter().enumerate() {
            row[nx + ny + kf + i] = -&gen[j];
        }
        let rhs = if j < ny {
            Rational::zero()
        } else {
            z_star[j - ny].clone()
        };
        eqs.push((row, rhs));
    }
    let right = HPolyhedron::from_row_lists(total, rows, eqs).project_fm(nx)?;
    let inclusion_holds = left.includes(&right)?;
    let rule_holds = inclusion_holds && right.includes(&left)?;

    let t = nx + ny + nz;
    let gph_f = f.graph.embed(t, &range(0, nx + ny));
    let gph_g = g.graph.embed(t, &range(nx, ny + nz));
    let qualification_holds_a = gph_g.relative_interior_meets(&gph_f)?.is_some();
    let qualification_holds_b = gph_f.relative_interior_meets(&gph_g)?.is_some();
    Ok(CoderivativeChainReport {
        qualification_holds_a,
        qualification_holds_b,
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

    /// `x ↦ [a x, ∞)`.
    fn upper(a: i64) -> PolyMap {
        PolyMap::new(1, 1, HPolyhedron::from_i64(2, &[&[a, -1]], &[0], &[], &[])).unwrap()
    }

    fn scalar(a: i64) -> PolyMap {
        PolyMap::linear(&QMatrix::from_i64(&[&[a]]))
    }

    fn point(v: i64) -> HPolyhedron {
        HPolyhedron::singleton(&[int(v)])
    }

    #[test]
    fn coderivatives() {
        let f = upper(1);
        let o = [int(0)];
        assert!(f
            .coderivative_at(&o, &o, &[int(1)])
            .unwrap()
            .set_eq(&point(1))
            .unwrap());
        assert!(f.coderivative_at(&o, &o, &[int(-1)]).unwrap().is_empty());
        let everything = PolyMap::new(1, 1, HPolyhedron::universe(2)).unwrap();
        assert!(everything
            .coderivative_at(&o, &[int(4)], &[int(0)])
            .unwrap()
            .set_eq(&point(0))
            .unwrap());
        assert_eq!(
            f.coderivative_at(&o, &[int(-1)], &[int(1)]),
            Err(Error::PointNotOnGraph)
        );
    }

    #[test]
    fn linear_map_coderivative_is_the_adjoint() {
        let a = QMatrix::from_i64(&[&[1, 2], &[0, -1], &[3, 1]]);
        let f = PolyMap::linear(&a);
        let x = qvec(&[1, 1]);
        let y = a.mul_vec(&x);
        let y_star = qvec(&[2, -1, 1]);
        let d = f.coderivative_at(&x, &y, &y_star).unwrap();
        assert!(d
            .set_eq(&HPolyhedron::singleton(&a.tr_mul_vec(&y_star)))
            .unwrap());
    }

    #[test]
    fn sums_of_maps() {
        let id = scalar(1);
        let nonneg =
            PolyMap::new(1, 1, HPolyhedron::from_i64(2, &[&[0, -1]], &[0], &[], &[])).unwrap();
        assert!(id
            .map_sum(&nonneg)
            .unwrap()
            .graph()
            .set_eq(upper(1).graph())
            .unwrap());
        assert!(upper(1)
            .map_sum(&scalar(0))
            .unwrap()
            .graph()
            .set_eq(upper(1).graph())
            .unwrap());
        assert!(upper(1)
            .map_sum(&upper(1))
            .unwrap()
            .graph()
            .set_eq(upper(2).graph())
            .unwrap());
    }

    #[test]
    fn compositions() {
        assert!(scalar(2)
            .map_compose(&upper(1))
            .unwrap()
            .graph()
            .set_eq(upper(2).graph())
            .unwrap());
        assert!(scalar(1)
            .map_compose(&upper(3))
            .unwrap()
            .graph()
            .set_eq(upper(3).graph())
            .unwrap());
        // F(x) = {x} on x ≥ 0 only; G∘F inherits that domain.
        let f = PolyMap::new(
            1,
            1,
            HPolyhedron::from_i64(2, &[&[-1, 0]], &[0], &[&[1, -1]], &[0]),
        )
        .unwrap();
        let gf = f.map_compose(&upper(1)).unwrap();
        assert!(gf.value_at(&[int(-1)]).unwrap().is_empty());
        assert!(!gf.value_at(&[int(1)]).unwrap().is_empty());
    }

    #[test]
    fn sum_rule_examples() {
        let id = scalar(1);
        let nonneg =
            PolyMap::new(1, 1, HPolyhedron::from_i64(2, &[&[0, -1]], &[0], &[], &[])).unwrap();
        let o = qvec(&[0]);
        let s = SplitPoint {
            x: o.clone(),
            y: o.clone(),
            y1: o.clone(),
            y2: o.clone(),
        };
        let r = coderivative_sum_rule_check(&id, &nonneg, &s, &[int(1)]).unwrap();
        assert!(r.rule_holds && r.qualification_holds);
        assert!(r.left.set_eq(&point(1)).unwrap());

        let r = coderivative_sum_rule_check(&upper(1), &scalar(0), &s, &[int(1)]).unwrap();
        assert!(r.rule_holds);

        let r = coderivative_sum_rule_check(&id, &id, &s, &[int(1)]).unwrap();
        assert!(r.rule_holds && r.left.set_eq(&point(2)).unwrap());

        let bad = SplitPoint {
            y1: qvec(&[1]),
            y2: qvec(&[-1]),
            ..s
        };
        assert_eq!(
            coderivative_sum_rule_check(&id, &nonneg, &bad, &[int(1)]),
            Err(Error::InvalidSplit)
        );
    }

    #[test]
    fn split_search() {
        let s = find_split(&scalar(1), &upper(0), &[int(2)], &[int(5)])
            .unwrap()
            .unwrap();
        assert_eq!(s.y1, qvec(&[2]));
        assert_eq!(s.y2, qvec(&[3]));
        assert_eq!(
            find_split(&scalar(1), &upper(0), &[int(2)], &[int(1)]).unwrap(),
            None
        );
    }

    #[test]
    fn chain_rule_examples() {
        let o = [int(0)];
        let r =
            coderivative_chain_rule_check(&scalar(2), &upper(1), &o, &o, &o, &[int(1)]).unwrap();
        assert!(r.rule_holds && r.left.set_eq(&point(2)).unwrap());
        let r =
            coderivative_chain_rule_check(&upper(1), &scalar(1), &o, &o, &o, &[int(1)]).unwrap();
        assert!(r.rule_holds && r.left.set_eq(&point(1)).unwrap());
        let r =
            coderivative_chain_rule_check(&scalar(1), &upper(1), &o, &o, &o, &[int(1)]).unwrap();
        assert!(r.rule_holds && r.qualification_holds_a && r.qualification_holds_b);
        assert!(r.right.set_eq(&point(1)).unwrap());
        assert_eq!(
            coderivative_chain_rule_check(&scalar(1), &upper(1), &o, &[int(1)], &o, &[int(1)]),
            Err(Error::InvalidIntermediatePoint)
        );
    }
}
