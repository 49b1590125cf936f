//! Support functions, conjugates, infimal convolutions and Fenchel duality.
//!
//! LP dual convention: minimizing `cᵀz` subject to `Gz ≤ h`, `Kz = k` gives
//! multipliers with `Gᵀλ + Kᵀν = -c`. Every composite LP below keeps, for each
//! row, the coefficients it has in the argument space of the function it came
//! from, so `Σ multiplier · argument row` recovers the conjugate arguments.

use std::ops::Range;

use num_traits::{One, Zero};

use crate::arith::{ExtendedRational, Rational};
use crate::error::{Error, Result};
use crate::functions::PolyhedralFunction;
use crate::linalg::{add, dot, neg, solve_linear_system, zeros, QMatrix, QVector};
use crate::lp::{solve_lp, LpOutcome, LpProblem};
use crate::polyhedron::{HPolyhedron, Support};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugateValue {
    pub value: ExtendedRational,
    pub maximizer: Option<QVector>,
    pub unbounded_ray: Option<QVector>,
}

struct Row {
    coeffs: QVector,
    rhs: Rational,
    arg: QVector,
}

struct Block {
    ineq: Range<usize>,
    eq: Range<usize>,
}

struct Lifted {
    total: usize,
    ineq: Vec<Row>,
    eq: Vec<Row>,
}

/// `dim × total` matrix picking columns `start..start+dim`.
fn select(dim: usize, total: usize, start: usize) -> QMatrix {
    let mut m = QMatrix::zeros(dim, total);
    for i in 0..dim {
        m[(i, start + i)] = Rational::one();
    }
    m
}

impl Lifted {
    fn new(total: usize) -> Self {
        Lifted {
            total,
            ineq: Vec::new(),
            eq: Vec::new(),
        }
    }

    /// Rows of `arg·z + shift ∈ set`.
    fn push_set(&mut self, set: &HPolyhedron, arg: &QMatrix, shift: &[Rational]) -> Block {
        let start = (self.ineq.len(), self.eq.len());
        for (a, b) in set.ineq_rows() {
            self.ineq.push(Row {
                coeffs: arg.tr_mul_vec(&a),
                rhs: &b - dot(&a, shift),
                arg: a,
            });
        }
        for (a, e) in set.eq_rows() {
            self.eq.push(Row {
                coeffs: arg.tr_mul_vec(&a),
                rhs: &e - dot(&a, shift),
                arg: a,
            });
        }
        Block {
            ineq: start.0..self.ineq.len(),
            eq: start.1..self.eq.len(),
        }
    }

    /// Rows of `f(arg·z + shift) ≤ z_t`.
    fn push_epigraph(
        &mut self,
        f: &PolyhedralFunction,
        arg: &QMatrix,
        shift: &[Rational],
        t: usize,
    ) -> Block {
        let start = (self.ineq.len(), self.eq.len());
        for (c, d) in f.pieces() {
            let mut coeffs = arg.tr_mul_vec(c);
            coeffs[t] -= Rational::one();
            self.ineq.push(Row {
                coeffs,
                rhs: -d - dot(c, shift),
                arg: c.clone(),
            });
        }
        self.push_set(f.domain(), arg, shift);
        Block {
            ineq: start.0..self.ineq.len(),
            eq: start.1..self.eq.len(),
        }
    }

    fn problem(&self, objective: QVector) -> LpProblem {
        let mut ineq = QMatrix::zeros(0, self.total);
        let mut eq = QMatrix::zeros(0, self.total);
        for r in &self.ineq {
            ineq.push_row(r.coeffs.clone());
        }
        for r in &self.eq {
            eq.push_row(r.coeffs.clone());
        }
        LpProblem::new(
            objective,
            ineq,
            self.ineq.iter().map(|r| r.rhs.clone()).collect(),
            eq,
            self.eq.iter().map(|r| r.rhs.clone()).collect(),
        )
        .expect("lifted rows have the declared width")
    }

    fn solve(&self, objective: QVector) -> Result<LpOutcome> {
        solve_lp(&self.problem(objective))
    }

    /// `Σ multiplier · argument row` over a block.
    fn reassemble(
        &self,
        block: &Block,
        ineq_duals: &[Rational],
        eq_duals: &[Rational],
        dim: usize,
    ) -> QVector {
        let mut out = zeros(dim);
        for i in block.ineq.clone() {
            out = add(
                &out,
                &crate::linalg::scale(&self.ineq[i].arg, &ineq_duals[i]),
            );
        }
        for i in block.eq.clone() {
            out = add(&out, &crate::linalg::scale(&self.eq[i].arg, &eq_duals[i]));
        }
        out
    }
}

fn check_len(v: &[Rational], n: usize, what: &str) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{what} has length {}, expected {n}",
            v.len()
        )));
    }
    Ok(())
}

/// `σ_Ω(x*) = sup {⟨x*, x⟩ : x ∈ Ω}`.
pub fn support_eval(omega: &HPolyhedron, x_star: &[Rational]) -> Result<ConjugateValue> {
    check_len(x_star, omega.dim(), "support argument")?;
    match omega.support(x_star) {
        Support::Finite { value, argmax } => Ok(ConjugateValue {
            value: value.into(),
            maximizer: Some(argmax),
            unbounded_ray: None,
        }),
        Support::Infinite { ray, .. } => Ok(ConjugateValue {
            value: ExtendedRational::PosInfinity,
            maximizer: None,
            unbounded_ray: Some(ray),
        }),
        Support::Empty => Err(Error::EmptyPolyhedron),
    }
}

/// `f*(x*) = σ_{epi f}(x*, -1)`.
pub fn conjugate_eval(f: &PolyhedralFunction, x_star: &[Rational]) -> Result<ConjugateValue> {
    let n = f.dim();
    check_len(x_star, n, "conjugate argument")?;
    let mut w = x_star.to_vec();
    w.push(-Rational::one());
    let mut out = support_eval(&f.epigraph(), &w)?;
    out.maximizer = out.maximizer.map(|mut x| {
        x.truncate(n);
        x
    });
    out.unbounded_ray = out.unbounded_ray.map(|mut r| {
        r.truncate(n);
        r
    });
    Ok(out)
}

/// Plain value of `f*(x*)`.
pub fn conjugate_value(f: &PolyhedralFunction, x_star: &[Rational]) -> Result<ExtendedRational> {
    Ok(conjugate_eval(f, x_star)?.value)
}

/// Variables `θ | λ | ν` of the piecewise dual representation of `f*`, and
/// the rows of `Σθ_i c_i + Aᵀλ + Eᵀν` (one per coordinate).
struct PiecewiseDual {
    k: usize,
    m: usize,
    e: usize,
}

impl PiecewiseDual {
    fn of(f: &PolyhedralFunction) -> Self {
        PiecewiseDual {
            k: f.pieces().len(),
            m: f.domain().num_ineq(),
            e: f.domain().num_eq(),
        }
    }

    fn width(&self) -> usize {
        self.k + self.m + self.e
    }

    /// Coefficients of coordinate `j` of `Σθc + Aᵀλ + Eᵀν`.
    fn coordinate(&self, f: &PolyhedralFunction, j: usize) -> QVector {
        let mut row: QVector = f.pieces().iter().map(|(c, _)| c[j].clone()).collect();
        row.extend(f.domain().ineq().column(j));
        row.extend(f.domain().eq().column(j));
        row
    }

    /// Coefficients of `-Σθd + bᵀλ + eᵀν`.
    fn cost(&self, f: &PolyhedralFunction) -> QVector {
        let mut row: QVector = f.pieces().iter().map(|(_, d)| -d).collect();
        row.extend(f.domain().ineq_rhs().iter().cloned());
        row.extend(f.domain().eq_rhs().iter().cloned());
        row
    }
}

/// `f*(x*) = min {-Σθ_i d_i + bᵀλ + eᵀν : x* = Σθ_i c_i + Aᵀλ + Eᵀν, θ ∈ Δ, λ ≥ 0}`,
/// an evaluation route independent of the epigraph.
pub fn conjugate_eval_dual(
    f: &PolyhedralFunction,
    x_star: &[Rational],
) -> Result<ExtendedRational> {
    let n = f.dim();
    check_len(x_star, n, "conjugate argument")?;
    let pd = PiecewiseDual::of(f);
    let w = pd.width();
    let mut ineq = QMatrix::zeros(0, w);
    for i in 0..pd.k + pd.m {
        let mut row = zeros(w);
        row[i] = -Rational::one();
        ineq.push_row(row);
    }
    let mut eq = QMatrix::zeros(0, w);
    let mut eq_rhs = Vec::new();
    for j in 0..n {
        eq.push_row(pd.coordinate(f, j));
        eq_rhs.push(x_star[j].clone());
    }
    let mut simplex = zeros(w);
    for v in simplex.iter_mut().take(pd.k) {
        *v = Rational::one();
    }
    eq.push_row(simplex);
    eq_rhs.push(Rational::one());
    let lp = LpProblem::new(pd.cost(f), ineq, zeros(pd.k + pd.m), eq, eq_rhs)?;
    Ok(match solve_lp(&lp)? {
        LpOutcome::Optimal { value, .. } => value.into(),
        LpOutcome::Infeasible { .. } => ExtendedRational::PosInfinity,
        LpOutcome::Unbounded { .. } => ExtendedRational::NegInfinity,
    })
}

/// `f**(x) = sup_{x*} ⟨x*, x⟩ - f*(x*)`, with `f*` in piecewise dual form.
pub fn biconjugate_eval(f: &PolyhedralFunction, x: &[Rational]) -> Result<ExtendedRational> {
    let n = f.dim();
    check_len(x, n, "biconjugate argument")?;
    let pd = PiecewiseDual::of(f);
    // Variables: x* | θ | λ | ν
    let w = n + pd.width();
    let mut ineq = QMatrix::zeros(0, w);
    for i in 0..pd.k + pd.m {
        let mut row = zeros(w);
        row[n + i] = -Rational::one();
        ineq.push_row(row);
    }
    let mut eq = QMatrix::zeros(0, w);
    let mut eq_rhs = Vec::new();
    for j in 0..n {
        let mut row = zeros(n);
        row[j] = -Rational::one();
        row.extend(pd.coordinate(f, j));
        eq.push_row(row);
        eq_rhs.push(Rational::zero());
    }
    let mut simplex = zeros(w);
    for v in simplex.iter_mut().skip(n).take(pd.k) {
        *v = Rational::one();
    }
    eq.push_row(simplex);
    eq_rhs.push(Rational::one());
    // minimize -(⟨x*, x⟩ - cost)
    let mut objective = neg(x);
    objective.extend(pd.cost(f));
    let lp = LpProblem::new(objective, ineq, zeros(pd.k + pd.m), eq, eq_rhs)?;
    Ok(match solve_lp(&lp)? {
        LpOutcome::Optimal { value, .. } => (-value).into(),
        LpOutcome::Unbounded { .. } => ExtendedRational::PosInfinity,
        LpOutcome::Infeasible { .. } => ExtendedRational::NegInfinity,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSplit {
    /// `P ∩ ri(Ω) ≠ ∅`. The split is computed either way since both sets are polyhedral.
    pub qualification_holds: bool,
    pub value: Rational,
    pub x1: QVector,
    pub x2: QVector,
    pub parts: (Rational, Rational),
}

/// `σ_{P∩Ω}(x*) = σ_P(x1*) + σ_Ω(x2*)` with the split read off the duals of
/// the `P` rows and the `Ω` rows.
pub fn support_intersection_rule(
    p: &HPolyhedron,
    omega: &HPolyhedron,
    x_star: &[Rational],
) -> Result<SupportSplit> {
    let n = p.dim();
    if omega.dim() != n {
        return Err(Error::DimensionMismatch(
            "support rule on different dimensions".into(),
        ));
    }
    check_len(x_star, n, "support argument")?;
    let qualification_holds = omega.relative_interior_meets(p)?.is_some();
    let id = QMatrix::identity(n);
    let mut lifted = Lifted::new(n);
    let bp = lifted.push_set(p, &id, &zeros(n));
    let bo = lifted.push_set(omega, &id, &zeros(n));
    match lifted.solve(neg(x_star))? {
        LpOutcome::Optimal {
            value,
            ineq_duals,
            eq_duals,
            ..
        } => {
            let x1 = lifted.reassemble(&bp, &ineq_duals, &eq_duals, n);
            let x2 = lifted.reassemble(&bo, &ineq_duals, &eq_duals, n);
            let part = |set: &HPolyhedron, w: &[Rational]| match set.support(w) {
                Support::Finite { value, .. } => Ok(value),
                _ => Err(Error::Verification(
                    "split part of the support rule is not finite".into(),
                )),
            };
            let parts = (part(p, &x1)?, part(omega, &x2)?);
            Ok(SupportSplit {
                qualification_holds,
                value: -value,
                x1,
                x2,
                parts,
            })
        }
        LpOutcome::Unbounded { .. } => Err(Error::ValueInfinite),
        LpOutcome::Infeasible { .. } => Err(Error::EmptyPolyhedron),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugateSplit {
    /// `dom f ∩ ri(dom g) ≠ ∅`.
    pub qualification_holds: bool,
    pub value: ExtendedRational,
    /// Present when the value is finite.
    pub split: Option<(QVector, QVector)>,
    pub parts: Option<(Rational, Rational)>,
}

fn finite_conjugate(f: &PolyhedralFunction, w: &[Rational]) -> Result<Rational> {
    match conjugate_value(f, w)? {
        ExtendedRational::Finite(v) => Ok(v),
        other => Err(Error::Verification(format!(
            "conjugate at a reassembled argument is {other}"
        ))),
    }
}

/// `(f+g)*(x*) = f*(x1*) + g*(x2*)` with `x1* + x2* = x*`, from one LP over `(x, t1, t2)`.
pub fn conjugate_sum_rule(
    f: &PolyhedralFunction,
    g: &PolyhedralFunction,
    x_star: &[Rational],
) -> Result<ConjugateSplit> {
    let n = f.dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch(
            "conjugate sum rule on different dimensions".into(),
        ));
    }
    check_len(x_star, n, "conjugate argument")?;
    let qualification_holds = g.domain().relative_interior_meets(f.domain())?.is_some();
    let total = n + 2;
    let arg = select(n, total, 0);
    let mut lifted = Lifted::new(total);
    let bf = lifted.push_epigraph(f, &arg, &zeros(n), n);
    let bg = lifted.push_epigraph(g, &arg, &zeros(n), n + 1);
    let mut objective = neg(x_star);
    objective.push(Rational::one());
    objective.push(Rational::one());
    match lifted.solve(objective)? {
        LpOutcome::Optimal {
            value,
            ineq_duals,
            eq_duals,
            ..
        } => {
            let x1 = lifted.reassemble(&bf, &ineq_duals, &eq_duals, n);
            let x2 = lifted.reassemble(&bg, &ineq_duals, &eq_duals, n);
            let parts = (finite_conjugate(f, &x1)?, finite_conjugate(g, &x2)?);
            Ok(ConjugateSplit {
                qualification_holds,
                value: (-value).into(),
                split: Some((x1, x2)),
                parts: Some(parts),
            })
        }
        LpOutcome::Unbounded { .. } => Ok(ConjugateSplit {
            qualification_holds,
            value: ExtendedRational::PosInfinity,
            split: None,
            parts: None,
        }),
        LpOutcome::Infeasible { .. } => Err(Error::EmptyPolyhedron),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugateChain {
    pub value: ExtendedRational,
    /// `y*` with `Aᵀy* = x*` and `g*(y*) = value`, when the value is finite.
    pub y_star: Option<QVector>,
}

/// `(g∘A)*(x*) = min {g*(y*) : Aᵀy* = x*}`, from one LP over `(x, t)`.
pub fn conjugate_chain_rule(
    g: &PolyhedralFunction,
    a: &QMatrix,
    x_star: &[Rational],
) -> Result<ConjugateChain> {
    let (m, n) = (a.nrows(), a.ncols());
    if g.dim() != m {
        return Err(Error::DimensionMismatch(
            "matrix rows must equal the dimension of g".into(),
        ));
    }
    check_len(x_star, n, "conjugate argument")?;
    if g.domain().preimage(a, &zeros(m))?.is_empty() {
        return Err(Error::RangeMissesDomain);
    }
    if solve_linear_system(&a.transpose(), x_star)?.is_none() {
        return Ok(ConjugateChain {
            value: ExtendedRational::PosInfinity,
            y_star: None,
        });
    }
    let total = n + 1;
    let arg = a.mul(&select(n, total, 0));
    let mut lifted = Lifted::new(total);
    let bg = lifted.push_epigraph(g, &arg, &zeros(m), n);
    let mut objective = neg(x_star);
    objective.push(Rational::one());
    match lifted.solve(objective)? {
        LpOutcome::Optimal {
            value,
            ineq_duals,
            eq_duals,
            ..
        } => {
            let y = lifted.reassemble(&bg, &ineq_duals, &eq_duals, m);
            Ok(ConjugateChain {
                value: (-value).into(),
                y_star: Some(y),
            })
        }
        LpOutcome::Unbounded { .. } => Ok(ConjugateChain {
            value: ExtendedRational::PosInfinity,
            y_star: None,
        }),
        LpOutcome::Infeasible { .. } => Err(Error::RangeMissesDomain),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfConvValue {
    pub value: ExtendedRational,
    /// `(u, v)` with `u + v = x` attaining the infimum.
    pub split: Option<(QVector, QVector)>,
}

/// `(f □ g)(x) = inf {f(u) + g(x - u)}` by one LP over `(u, t1, t2)`.
pub fn infimal_convolution_eval(
    f: &PolyhedralFunction,
    g: &PolyhedralFunction,
    x: &[Rational],
) -> Result<InfConvValue> {
    let n = f.dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch(
            "infimal convolution on different dimensions".into(),
        ));
    }
    check_len(x, n, "infimal convolution argument")?;
    let total = n + 2;
    let u = select(n, total, 0);
    let mut minus_u = u.clone();
    for i in 0..n {
        minus_u[(i, i)] = -Rational::one();
    }
    let mut lifted = Lifted::new(total);
    lifted.push_epigraph(f, &u, &zeros(n), n);
    lifted.push_epigraph(g, &minus_u, x, n + 1);
    let mut objective = zeros(total);
    objective[n] = Rational::one();
    objective[n + 1] = Rational::one();
    Ok(match lifted.solve(objective)? {
        LpOutcome::Optimal { x: z, value, .. } => {
            let u = z[..n].to_vec();
            let v = crate::linalg::sub(x, &u);
            InfConvValue {
                value: value.into(),
                split: Some((u, v)),
            }
        }
        LpOutcome::Unbounded { .. } => InfConvValue {
            value: ExtendedRational::NegInfinity,
            split: None,
        },
        LpOutcome::Infeasible { .. } => InfConvValue {
            value: ExtendedRational::PosInfinity,
            split: None,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityGap {
    pub p_hat: ExtendedRational,
    pub d_hat: ExtendedRational,
    pub primal_x: Option<QVector>,
    /// Maximizer of the dual LP when `d̂` is finite.
    pub dual_y: Option<QVector>,
}

fn check_fenchel_shapes(f: &PolyhedralFunction, g: &PolyhedralFunction, a: &QMatrix) -> Result<()> {
    if a.ncols() != f.dim() || a.nrows() != g.dim() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}×{} but f lives in R^{} and g in R^{}",
            a.nrows(),
            a.ncols(),
            f.dim(),
            g.dim()
        )));
    }
    Ok(())
}

/// `f(x) + g(Ax)`.
pub fn primal_objective(
    f: &PolyhedralFunction,
    g: &PolyhedralFunction,
    a: &QMatrix,
    x: &[Rational],
) -> Result<ExtendedRational> {
    check_fenchel_shapes(f, g, a)?;
    f.eval(x)?.checked_add(&g.eval(&a.mul_vec(x))?)
}

/// `-f*(Aᵀy*) - g*(-y*)`.
pub fn dual_objective(
    f: &PolyhedralFunction,
    g: &PolyhedralFunction,
    a: &QMatrix,
    y: &[Rational],
) -> Result<ExtendedRational> {
    check_fenchel_shapes(f, g, a)?;
    let fs = conjugate_value(f, &a.tr_mul_vec(y))?;
    let gs = conjugate_value(g, &neg(y))?;
    fs.neg().checked_sub(&gs)
}

struct PrimalSolution {
    p_hat: ExtendedRational,
    x: Option<QVector>,
    /// Dual solution reassembled from the multipliers of the `g` rows.
    y_from_multipliers: Option<QVector>,
}

fn solve_primal(
    f: &PolyhedralFunction,
    g: &PolyhedralFunction,
    a: &QMatrix,
) -> Result<PrimalSolution> {
    let (m, n) = (a.nrows(), a.ncols());
    let total = n + 2;
    let x = select(n, total, 0);
    let ax = a.mul(&x);
    let mut lifted = Lifted::new(total);
    lifted.push_epigraph(f, &x, &zeros(n), n);
    let bg = lifted.push_epigraph(g, &ax, &zeros(m), n + 1);
    let mut objective = zeros(total);
    objective[n] = Rational::one();
    objective[n + 1] = Rational::one();
    Ok(match lifted.solve(objective)? {
        LpOutcome::Optimal {
            x: z,
            value,
            ineq_duals,
            eq_duals,
        } => PrimalSolution {
            p_hat: value.into(),
            x: Some(z[..n].to_vec()),
            y_from_multipliers: Some(neg(&lifted.reassemble(&bg, &ineq_duals, &eq_duals, m))),
        },
        LpOutcome::Unbounded { .. } => PrimalSolution {
            p_hat: ExtendedRational::NegInfinity,
            x: None,
            y_from_multipliers: None,
        },
        LpOutcome::Infeasible { .. } => PrimalSolution {
            p_hat: ExtendedRational::PosInfinity,
            x: None,
            y_from_multipliers: None,
        },
    })
}

/// `d̂ = sup_{y*} -f*(Aᵀy*) - g*(-y*)` as one LP with both conjugates in
/// piecewise dual form. Returns the value and a maximizer when finite.
fn solve_dual(
    f: &PolyhedralFunction,
    g: &PolyhedralFunction,
    a: &QMatrix,
) -> Result<(ExtendedRational, Option<QVector>)> {
    let (m, n) = (a.nrows(), a.ncols());
    let (pf, pg) = (PiecewiseDual::of(f), PiecewiseDual::of(g));
    // Variables: y* | θ_f λ_f ν_f | θ_g λ_g ν_g
    let of = m;
    let og = m + pf.width();
    let total = og + pg.width();
    let mut ineq = QMatrix::zeros(0, total);
    for i in (of..of + pf.k + pf.m).chain(og..og + pg.k + pg.m) {
        let mut row = zeros(total);
        row[i] = -Rational::one();
        ineq.push_row(row);
    }
    let ineq_rhs = zeros(ineq.nrows());
    let mut eq = QMatrix::zeros(0, total);
    let mut eq_rhs = Vec::new();
    // Aᵀy* = Σθc + Aᵀλ + Eᵀν for f
    for j in 0..n {
        let mut row = zeros(total);
        for i in 0..m {
            row[i] = a[(i, j)].clone();
        }
        for (k, v) in pf.coordinate(f, j).into_iter().enumerate() {
            row[of + k] = -v;
        }
        eq.push_row(row);
        eq_rhs.push(Rational::zero());
    }
    // -y* = Σφc' + A'ᵀμ + E'ᵀρ for g
    for j in 0..m {
        let mut row = zeros(total);
        row[j] = -Rational::one();
        for (k, v) in pg.coordinate(g, j).into_iter().enumerate() {
            row[og + k] = -v;
        }
        eq.push_row(row);
        eq_rhs.push(Rational::zero());
    }
    for (start, k) in [(of, pf.k), (og, pg.k)] {
        let mut row = zeros(total);
        for v in row.iter_mut().skip(start).take(k) {
            *v = Rational::one();
        }
        eq.push_row(row);
        eq_rhs.push(Rational::one());
    }
    // maximize -(cost_f) - (cost_g)  ⇔  minimize cost_f + cost_g
    let mut objective = zeros(total);
    for (k, v) in pf.cost(f).into_iter().enumerate() {
        objective[of + k] = v;
    }
    for (k, v) in pg.cost(g).into_iter().enumerate() {
        objective[og + k] = v;
    }
    let lp = LpProblem::new(objective, ineq, ineq_rhs, eq, eq_rhs)?;
    Ok(match solve_lp(&lp)? {
        LpOutcome::Optimal { x, value, .. } => ((-value).into(), Some(x[..m].to_vec())),
        LpOutcome::Unbounded { .. } => (ExtendedRational::PosInfinity, None),
        LpOutcome::Infeasible { .. } => (ExtendedRational::NegInfinity, None),
    })
}

/// `p̂ = inf f(x) + g(Ax)` and `d̂ = sup -f*(Aᵀy*) - g*(-y*)`, each from its own LP.
pub fn weak_duality_gap(
    f: &PolyhedralFunction,
    g: &PolyhedralFunction,
    a: &QMatrix,
) -> Result<DualityGap> {
    check_fenchel_shapes(f, g, a)?;
    let primal = solve_primal(f, g, a)?;
    let (d_hat, dual_y) = solve_dual(f, g, a)?;
    if primal.p_hat < d_hat {
        return Err(Error::Verification(format!(
            "weak duality violated: p̂ = {} < d̂ = {d_hat}",
            primal.p_hat
        )));
    }
    Ok(DualityGap {
        p_hat: primal.p_hat,
        d_hat,
        primal_x: primal.x,
        dual_y,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityCertificate {
    pub p_hat: ExtendedRational,
    pub d_hat: ExtendedRational,
    pub primal_x: Option<QVector>,
    pub dual_y: Option<QVector>,
    pub equality: bool,
    /// `dom(g∘A) ∩ ri(dom f) ≠ ∅`.
    pub qualification_holds: bool,
    /// `dom g ∩ A(ri(dom f)) ≠ ∅`, computed through the image polyhedron.
    pub image_qualification_holds: bool,
}

impl DualityCertificate {
    /// Re-evaluates both objectives at the stored points.
    pub fn verify(
        &self,
        f: &PolyhedralFunction,
        g: &PolyhedralFunction,
        a: &QMatrix,
    ) -> Result<bool> {
        if self.p_hat < self.d_hat {
            return Ok(false);
        }
        if let Some(x) = &self.primal_x {
            if primal_objective(f, g, a, x)? != self.p_hat {
                return Ok(false);
            }
        }
        if let Some(y) = &self.dual_y {
            if dual_objective(f, g, a, y)? != self.d_hat {
                return Ok(false);
            }
        }
        Ok(self.equality == (self.p_hat == self.d_hat))
    }
}

/// Primal and dual values with attainment certificates. When `p̂` is finite the
/// dual point is reassembled from the primal LP multipliers and checked
/// against the independently solved dual LP.
pub fn fenchel_solve(
    f: &PolyhedralFunction,
    g: &PolyhedralFunction,
    a: &QMatrix,
) -> Result<DualityCertificate> {
    check_fenchel_shapes(f, g, a)?;
    let primal = solve_primal(f, g, a)?;
    let (d_hat, dual_lp_y) = solve_dual(f, g, a)?;
    if primal.p_hat < d_hat {
        return Err(Error::Verification(format!(
            "weak duality violated: p̂ = {} < d̂ = {d_hat}",
            primal.p_hat
        )));
    }
    let dual_y = match primal.y_from_multipliers {
        Some(y) if dual_objective(f, g, a, &y)? == d_hat => Some(y),
        Some(_) => {
            return Err(Error::Verification(
                "multiplier dual point does not attain d̂".into(),
            ))
        }
        None => dual_lp_y,
    };
    let dom_ga = g.domain().preimage(a, &zeros(a.nrows()))?;
    let qualification_holds = f.domain().relative_interior_meets(&dom_ga)?.is_some();
    let image = f.domain().affine_image(a, &zeros(a.nrows()))?;
    let image_qualification_holds = image.relative_interior_meets(g.domain())?.is_some();
    Ok(DualityCertificate {
        equality: primal.p_hat == d_hat,
        p_hat: primal.p_hat,
        d_hat,
        primal_x: primal.x,
        dual_y,
        qualification_holds,
        image_qualification_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};
    use crate::linalg::qvec;

    fn abs() -> PolyhedralFunction {
        PolyhedralFunction::from_i64(&[(&[1], 0), (&[-1], 0)], HPolyhedron::universe(1))
    }

    fn interval(lo: i64, hi: i64) -> HPolyhedron {
        HPolyhedron::from_i64(1, &[&[1], &[-1]], &[hi, -lo], &[], &[])
    }

    fn indicator(p: HPolyhedron) -> PolyhedralFunction {
        PolyhedralFunction::indicator(p).unwrap()
    }

    fn fin(v: Rational) -> ExtendedRational {
        ExtendedRational::Finite(v)
    }

    #[test]
    fn support_values() {
        let square = HPolyhedron::from_i64(
            2,
            &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]],
            &[1, 0, 1, 0],
            &[],
            &[],
        );
        let s = support_eval(&square, &qvec(&[1, 1])).unwrap();
        assert_eq!(s.value, fin(int(2)));
        assert_eq!(s.maximizer, Some(qvec(&[1, 1])));
        let s = support_eval(&HPolyhedron::universe(1), &qvec(&[1])).unwrap();
        assert_eq!(s.value, ExtendedRational::PosInfinity);
        assert_eq!(s.unbounded_ray, Some(qvec(&[1])));
        assert_eq!(
            support_eval(&interval(0, 0), &qvec(&[-7])).unwrap().value,
            ExtendedRational::zero()
        );
        assert_eq!(
            support_eval(&HPolyhedron::empty(1), &qvec(&[1])),
            Err(Error::EmptyPolyhedron)
        );
    }

    #[test]
    fn conjugates() {
        let c = conjugate_eval(&abs(), &[ratio(1, 2)]).unwrap();
        assert_eq!(c.value, ExtendedRational::zero());
        assert_eq!(c.maximizer, Some(qvec(&[0])));
        let c = conjugate_eval(&abs(), &[int(2)]).unwrap();
        assert_eq!(c.value, ExtendedRational::PosInfinity);
        assert!(c.unbounded_ray.unwrap()[0] > int(0));
        let zero_ind = indicator(interval(0, 0));
        for v in [-3, 0, 5] {
            assert_eq!(
                conjugate_value(&zero_ind, &[int(v)]).unwrap(),
                ExtendedRational::zero()
            );
            assert_eq!(
                conjugate_eval_dual(&zero_ind, &[int(v)]).unwrap(),
                ExtendedRational::zero()
            );
        }
        for v in [ratio(-3, 2), ratio(1, 3), int(1)] {
            assert_eq!(
                conjugate_eval_dual(&abs(), &[v.clone()]).unwrap(),
                conjugate_value(&abs(), &[v]).unwrap()
            );
        }
    }

    #[test]
    fn biconjugates() {
        let f = PolyhedralFunction::from_i64(&[(&[2], 1), (&[-1], 0)], interval(-3, 4));
        for x in [-3, -1, 0, 2, 4] {
            assert_eq!(
                biconjugate_eval(&f, &[int(x)]).unwrap(),
                f.eval(&[int(x)]).unwrap()
            );
        }
        assert_eq!(
            biconjugate_eval(&f, &[int(5)]).unwrap(),
            ExtendedRational::PosInfinity
        );
    }

    #[test]
    fn support_of_intersections() {
        let p = HPolyhedron::from_i64(2, &[&[1, 0]], &[0], &[], &[]);
        let omega = HPolyhedron::from_i64(2, &[&[0, 1]], &[0], &[], &[]);
        let s = support_intersection_rule(&p, &omega, &qvec(&[1, 1])).unwrap();
        assert_eq!(s.value, int(0));
        assert_eq!((s.x1.clone(), s.x2.clone()), (qvec(&[1, 0]), qvec(&[0, 1])));
        assert_eq!(s.parts, (int(0), int(0)));

        let s = support_intersection_rule(&interval(0, 1), &interval(0, 1), &qvec(&[1])).unwrap();
        assert_eq!(s.value, int(1));
        assert_eq!(add(&s.x1, &s.x2), qvec(&[1]));
        assert_eq!(&s.parts.0 + &s.parts.1, int(1));

        let s = support_intersection_rule(&interval(-1, 0), &interval(0, 1), &qvec(&[1])).unwrap();
        assert!(!s.qualification_holds);
        assert_eq!(s.value, int(0));
        assert_eq!(&s.parts.0 + &s.parts.1, int(0));

        let lower = HPolyhedron::from_i64(1, &[&[1]], &[0], &[], &[]);
        let upper = HPolyhedron::from_i64(1, &[&[-1]], &[0], &[], &[]);
        assert!(
            !support_intersection_rule(&lower, &upper, &qvec(&[1]))
                .unwrap()
                .qualification_holds
        );
        assert_eq!(
            support_intersection_rule(&HPolyhedron::universe(1), &upper, &qvec(&[1])),
            Err(Error::ValueInfinite)
        );
    }

    #[test]
    fn conjugate_sums() {
        let f = indicator(HPolyhedron::from_i64(1, &[&[-1]], &[0], &[], &[]));
        let s = conjugate_sum_rule(&f, &abs(), &qvec(&[1])).unwrap();
        assert!(s.qualification_holds);
        assert_eq!(s.value, ExtendedRational::zero());
        let (x1, x2) = s.split.unwrap();
        assert_eq!(add(&x1, &x2), qvec(&[1]));
        assert_eq!(s.parts, Some((int(0), int(0))));

        let zero = PolyhedralFunction::affine(qvec(&[0]), int(0));
        let s = conjugate_sum_rule(&abs(), &zero, &[ratio(1, 2)]).unwrap();
        assert_eq!(s.value, ExtendedRational::zero());
        assert_eq!(s.split.unwrap().1, qvec(&[0]));

        let z = indicator(interval(0, 0));
        assert_eq!(
            conjugate_sum_rule(&z, &z, &qvec(&[4])).unwrap().value,
            ExtendedRational::zero()
        );
        assert_eq!(
            conjugate_sum_rule(&abs(), &abs(), &qvec(&[3]))
                .unwrap()
                .value,
            ExtendedRational::PosInfinity
        );
    }

    #[test]
    fn conjugate_chains() {
        let a = QMatrix::from_i64(&[&[1, 1]]);
        let c = conjugate_chain_rule(&abs(), &a, &qvec(&[1, 1])).unwrap();
        assert_eq!(c.value, ExtendedRational::zero());
        assert_eq!(c.y_star, Some(qvec(&[1])));
        let c = conjugate_chain_rule(&abs(), &a, &qvec(&[1, 0])).unwrap();
        assert_eq!(c.value, ExtendedRational::PosInfinity);
        assert_eq!(c.y_star, None);
        let c = conjugate_chain_rule(&abs(), &QMatrix::identity(1), &[ratio(-1, 2)]).unwrap();
        assert_eq!(c.value, ExtendedRational::zero());
        assert_eq!(c.y_star, Some(vec![ratio(-1, 2)]));
        let far = indicator(interval(1, 2));
        assert_eq!(
            conjugate_chain_rule(&far, &QMatrix::from_i64(&[&[0]]), &qvec(&[0])),
            Err(Error::RangeMissesDomain)
        );
    }

    #[test]
    fn infimal_convolutions() {
        let z = indicator(interval(0, 0));
        for x in [-2, 0, 3] {
            assert_eq!(
                infimal_convolution_eval(&abs(), &z, &[int(x)])
                    .unwrap()
                    .value,
                fin(int(x.abs()))
            );
        }
        let half = indicator(HPolyhedron::from_i64(1, &[&[-1]], &[0], &[], &[]));
        let r = infimal_convolution_eval(&half, &half, &[int(1)]).unwrap();
        assert_eq!(r.value, ExtendedRational::zero());
        let (u, v) = r.split.unwrap();
        assert!(u[0] >= int(0) && v[0] >= int(0) && &u[0] + &v[0] == int(1));
        let r = infimal_convolution_eval(&abs(), &abs(), &[int(2)]).unwrap();
        assert_eq!(r.value, fin(int(2)));
        let lin = PolyhedralFunction::affine(qvec(&[1]), int(0));
        let r = infimal_convolution_eval(
            &lin,
            &PolyhedralFunction::affine(qvec(&[-1]), int(0)),
            &[int(0)],
        )
        .unwrap();
        assert_eq!(r.value, ExtendedRational::NegInfinity);
    }

    #[test]
    fn duality_examples() {
        let one = QMatrix::identity(1);
        let lin = PolyhedralFunction::affine(qvec(&[1]), int(0));
        let gap = weak_duality_gap(&abs(), &lin, &one).unwrap();
        assert_eq!(
            (gap.p_hat.clone(), gap.d_hat.clone()),
            (ExtendedRational::zero(), ExtendedRational::zero())
        );
        let c = fenchel_solve(&abs(), &lin, &one).unwrap();
        assert!(c.equality && c.qualification_holds && c.image_qualification_holds);
        assert_eq!(c.dual_y, Some(qvec(&[-1])));
        assert!(c.verify(&abs(), &lin, &one).unwrap());

        let z = indicator(interval(0, 0));
        let c = fenchel_solve(&z, &z, &one).unwrap();
        assert_eq!(
            (c.p_hat.clone(), c.d_hat.clone()),
            (ExtendedRational::zero(), ExtendedRational::zero())
        );
        assert!(c.equality && c.verify(&z, &z, &one).unwrap());
    }

    #[test]
    fn disjoint_domains() {
        // dom f = (-∞, -1], dom g = [1, ∞): the primal is infeasible, and the
        // dual objective 2y* is unbounded on y* ≥ 0, so both values are +∞.
        let f = indicator(HPolyhedron::from_i64(1, &[&[1]], &[-1], &[], &[]));
        let g = indicator(HPolyhedron::from_i64(1, &[&[-1]], &[-1], &[], &[]));
        let one = QMatrix::identity(1);
        let gap = weak_duality_gap(&f, &g, &one).unwrap();
        assert_eq!(gap.p_hat, ExtendedRational::PosInfinity);
        assert_eq!(gap.d_hat, ExtendedRational::PosInfinity);
        assert_eq!(
            dual_objective(&f, &g, &one, &[int(3)]).unwrap(),
            fin(int(6))
        );
        let c = fenchel_solve(&f, &g, &one).unwrap();
        assert!(!c.qualification_holds && !c.image_qualification_holds);
        assert!(c.verify(&f, &g, &one).unwrap());
    }

    #[test]
    fn unbounded_primal_forces_unbounded_dual() {
        let lin = PolyhedralFunction::affine(qvec(&[1]), int(0));
        let zero = PolyhedralFunction::affine(qvec(&[0]), int(0));
        let c = fenchel_solve(&lin, &zero, &QMatrix::identity(1)).unwrap();
        assert_eq!(c.p_hat, ExtendedRational::NegInfinity);
        assert_eq!(c.d_hat, ExtendedRational::NegInfinity);
    }
}
