//! Seeded property batteries over generated instances. Every instance is a pure
//! function of `(seed, battery, index)`, so parallel and sequential runs agree.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_traits::One;

use crate::arith::{int, ratio, ExtendedRational, Rational};
use crate::cones::{normal_intersection_rule, supports_at};
use crate::duality::{
    biconjugate_eval, conjugate_eval_dual, conjugate_sum_rule, conjugate_value, dual_objective,
    fenchel_solve, primal_objective, support_eval,
};
use crate::error::Result;
use crate::functions::{subdiff_chain_rule, subdiff_sum_rule_check, PolyhedralFunction};
use crate::gen::{Gen, Profile};
use crate::linalg::{add, dot, scale, unit, zeros, QMatrix, QVector};
use crate::lp::{solve_lp, verify_lp_certificate, LpOutcome};
use crate::polyhedron::{HPolyhedron, Support};
use crate::separation::{properly_separate, verify_separation_certificate, SeparationOutcome};
use crate::setvalued::{
    coderivative_chain_rule_check, coderivative_sum_rule_check, PolyMap, SplitPoint,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Parallel,
    Sequential,
}

impl Default for Mode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Mode::Parallel
        } else {
            Mode::Sequential
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub profile: Profile,
    /// Overrides every battery's instance count.
    pub count: Option<usize>,
    pub mode: Mode,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 1,
            profile: Profile::default(),
            count: None,
            mode: Mode::default(),
        }
    }
}

impl SuiteConfig {
    fn count(&self, default: usize) -> usize {
        self.count.unwrap_or(default)
    }
}

#[derive(Clone, Debug)]
pub struct BatteryReport {
    pub id: u8,
    pub name: &'static str,
    pub instances: usize,
    pub failure_count: usize,
    /// The first few failure messages.
    pub failures: Vec<String>,
    /// Tag counts, e.g. how many instances were qualified.
    pub tags: BTreeMap<String, usize>,
    pub elapsed: Duration,
}

impl BatteryReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn summary(&self) -> String {
        let tags: Vec<String> = self.tags.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "[{}] criterion {} {}: {} instances, {} failures, {:.1}s{}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.instances,
            self.failure_count,
            self.elapsed.as_secs_f64(),
            if tags.is_empty() {
                String::new()
            } else {
                format!(" ({})", tags.join(", "))
            }
        )
    }
}

#[derive(Default)]
struct Outcome {
    failures: Vec<String>,
    tags: Vec<&'static str>,
}

impl Outcome {
    fn check(&mut self, cond: bool, what: impl FnOnce() -> String) {
        if !cond {
            self.failures.push(what());
        }
    }

    fn tag(&mut self, t: &'static str) {
        self.tags.push(t);
    }
}

const MAX_MESSAGES: usize = 10;

fn map_indexed<T, F>(count: usize, mode: Mode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == Mode::Parallel {
        use rayon::prelude::*;
        return (0..count).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..count).map(f).collect()
}

type Check = fn(&mut Gen, &mut Outcome) -> Result<()>;

/// Runs each `(stream, count, check)` part and folds the outcomes into one report.
fn battery(
    id: u8,
    name: &'static str,
    cfg: &SuiteConfig,
    parts: &[(u64, usize, Check)],
) -> BatteryReport {
    let start = Instant::now();
    let mut report = BatteryReport {
        id,
        name,
        instances: 0,
        failure_count: 0,
        failures: Vec::new(),
        tags: BTreeMap::new(),
        elapsed: Duration::ZERO,
    };
    for &(stream, count, check) in parts {
        let stream = u64::from(id) << 8 | stream;
        let outcomes = map_indexed(count, cfg.mode, |i| {
            let mut g = Gen::for_instance(cfg.seed, stream, i as u64, cfg.profile);
            let mut o = Outcome::default();
            if let Err(e) = check(&mut g, &mut o) {
                o.failures.push(format!("error: {e}"));
            }
            o
        });
        report.instances += count;
        for (i, o) in outcomes.into_iter().enumerate() {
            for t in o.tags {
                *report.tags.entry(t.to_string()).or_default() += 1;
            }
            if !o.failures.is_empty() {
                report.failure_count += 1;
                if report.failures.len() < MAX_MESSAGES {
                    report.failures.push(format!(
                        "part {stream:#x} instance {i}: {}",
                        o.failures.join("; ")
                    ));
                }
            }
        }
    }
    report.elapsed = start.elapsed();
    report
}

fn fmt(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// A random convex combination of the slopes of `f`.
fn slope_mixture(g: &mut Gen, f: &PolyhedralFunction) -> QVector {
    let weights: Vec<i64> = f.pieces().iter().map(|_| g.int(0, 3)).collect();
    let total: i64 = weights.iter().sum();
    if total == 0 {
        return f.pieces()[0].0.clone();
    }
    let mut out = zeros(f.dim());
    for ((c, _), w) in f.pieces().iter().zip(weights) {
        out = add(&out, &scale(c, &ratio(w, total)));
    }
    out
}

/// The anchor plus finite maximizers of random linear functionals over `p`.
fn sample_points(g: &mut Gen, p: &HPolyhedron, anchor: &[Rational], count: usize) -> Vec<QVector> {
    let mut out = vec![anchor.to_vec()];
    while out.len() < count {
        let w = g.vector(p.dim());
        out.push(match p.support(&w) {
            Support::Finite { argmax, .. } => {
                // Midpoint with the anchor to land off the vertices too.
                if g.chance(0.5) {
                    scale(&add(&argmax, anchor), &ratio(1, 2))
                } else {
                    argmax
                }
            }
            _ => anchor.to_vec(),
        });
    }
    out
}

// 1

fn lp_instance(g: &mut Gen, o: &mut Outcome) -> Result<()> {
    let lp = g.lp();
    let out = solve_lp(&lp)?;
    o.check(verify_lp_certificate(&lp, &out), || {
        "certificate does not verify".into()
    });
    match &out {
        LpOutcome::Optimal {
            x,
            ineq_duals,
            eq_duals,
            value,
        } => {
            o.tag("optimal");
            let primal = dot(&lp.objective, x);
            let dual = -(dot(&lp.ineq_rhs, ineq_duals) + dot(&lp.eq_rhs, eq_duals));
            o.check(&primal == value && primal == dual, || {
                format!("primal {primal} dual {dual} value {value}")
            });
        }
        LpOutcome::Unbounded { .. } => o.tag("unbounded"),
        LpOutcome::Infeasible { .. } => o.tag("infeasible"),
    }
    Ok(())
}

pub fn lp_battery(cfg: &SuiteConfig) -> BatteryReport {
    battery(
        1,
        "LP certificate closure",
        cfg,
        &[(0, cfg.count(500), lp_instance)],
    )
}

// 2

fn separation_instance(g: &mut Gen, o: &mut Outcome) -> Result<()> {
    let n = g.dim(6);
    let (p, a) = g.polyhedron(n);
    let omega = match g.int(0, 2) {
        // Unrelated anchor.
        0 => g.polyhedron(n).0,
        // Shares the anchor, possibly flat and touching.
        1 => {
            let m = g.rows(1, n + 2);
            let k = g.int(0, (n as i64 - 1).min(2)) as usize;
            g.polyhedron_around(&a, m, k, false)
        }
        // Pushed off a face of P.
        _ => {
            let w = g.nonzero_vector(n);
            let far = match p.support(&w) {
                Support::Finite { argmax, .. } => argmax,
                _ => a.clone(),
            };
            let mut rows = vec![(w.iter().map(|x| -x).collect::<QVector>(), -dot(&w, &far))];
            let m = g.rows(0, n);
            let extra = g.polyhedron_around(&far, m, 0, false);
            for i in 0..extra.num_ineq() {
                rows.push((extra.ineq().row(i).to_vec(), extra.ineq_rhs()[i].clone()));
            }
            HPolyhedron::from_row_lists(n, rows, vec![])
        }
    };
    if omega.is_empty() {
        o.tag("skipped-empty");
        return Ok(());
    }
    let oracle = omega.relative_interior_meets(&p)?;
    match properly_separate(&p, &omega)? {
        SeparationOutcome::Separated(cert) => {
            o.tag("separated");
            o.check(oracle.is_none(), || {
                format!(
                    "separated although {} lies in P and ri(Ω)",
                    fmt(oracle.as_ref().unwrap())
                )
            });
            o.check(verify_separation_certificate(&p, &omega, &cert), || {
                "certificate does not verify".into()
            });
        }
        SeparationOutcome::NotSeparable { witness } => {
            o.tag("not-separable");
            o.check(oracle.is_some(), || {
                "no certificate although P misses ri(Ω)".into()
            });
            o.check(
                p.contains_point(&witness)? && omega.contains_point_ri(&witness)?,
                || "bad witness".into(),
            );
        }
    }
    Ok(())
}

pub fn separation_battery(cfg: &SuiteConfig) -> BatteryReport {
    battery(
        2,
        "separation iff P misses ri(Omega)",
        cfg,
        &[(0, cfg.count(300), separation_instance)],
    )
}

// 3

fn normal_cone_instance(g: &mut Gen, o: &mut Outcome) -> Result<()> {
    let n = g.dim(6);
    let x = g.small_vector(n);
    let (m1, m2) = (g.rows(1, n + 2), g.rows(1, n + 2));
    let k1 = usize::from(n > 1 && g.chance(0.2));
    let k2 = usize::from(n > 1 && g.chance(0.2));
    let p = g.polyhedron_around(&x, m1, k1, false);
    let omega = g.polyhedron_around(&x, m2, k2, false);
    let r = normal_intersection_rule(&p, &omega, &x)?;
    o.tag(if r.qualification_holds {
        "qualified"
    } else {
        "unqualified"
    });
    o.check(r.inclusion_holds, || "inclusion fails".into());
    if r.qualification_holds {
        o.check(r.rule_holds, || "equality fails under qualification".into());
        let w = r.qualification_witness.as_ref().unwrap();
        o.check(p.contains_point(w)? && omega.contains_point_ri(w)?, || {
            "bad qualification witness".into()
        });
    } else if r.rule_holds {
        o.tag("equality-without-qualification");
    }
    for d in &r.decompositions {
        o.check(d.verify(&r.normal_p, &r.normal_omega)?, || {
            format!("decomposition of {} fails", fmt(&d.target))
        });
    }
    let both = p.intersect(&omega)?;
    for gen in r.normal_intersection.generators() {
        o.check(supports_at(&both, &x, gen), || {
            format!("{} is not normal", fmt(gen))
        });
    }
    Ok(())
}

pub fn normal_cone_battery(cfg: &SuiteConfig) -> BatteryReport {
    battery(
        3,
        "normal cone intersection rule",
        cfg,
        &[(0, cfg.count(200), normal_cone_instance)],
    )
}

// 4

fn conjugate_instance(g: &mut Gen, o: &mut Outcome) -> Result<()> {
    let n = g.dim(6);
    let anchor = g.small_vector(n);
    let f = g.function_around(&anchor, false);
    let epi = f.epigraph();
    for q in 0..5 {
        let xs = if q < 3 {
            slope_mixture(g, &f)
        } else {
            g.vector(n)
        };
        let mut lifted = xs.clone();
        lifted.push(-Rational::one());
        let via_epi = support_eval(&epi, &lifted)?.value;
        let via_pieces = conjugate_eval_dual(&f, &xs)?;
        o.check(via_epi == via_pieces, || {
            format!("f*{} : {via_epi} vs {via_pieces}", fmt(&xs))
        });
    }
    for x in sample_points(g, f.domain(), &anchor, 5) {
        let fx = f.value_at(&x)?;
        let active = f.active_pieces(&x);
        let xs = f.pieces()[active[g.int(0, active.len() as i64 - 1) as usize]]
            .0
            .clone();
        let fs = conjugate_value(&f, &xs)?;
        let expect = ExtendedRational::Finite(dot(&x, &xs) - &fx);
        o.check(fs == expect, || {
            format!(
                "Fenchel-Young equality fails at x={} x*={}",
                fmt(&x),
                fmt(&xs)
            )
        });
        let other = g.vector(n);
        if let ExtendedRational::Finite(v) = conjugate_value(&f, &other)? {
            o.check(&fx + v >= dot(&x, &other), || {
                "Fenchel-Young inequality fails".into()
            });
        }
        let bi = biconjugate_eval(&f, &x)?;
        o.check(bi == ExtendedRational::Finite(fx.clone()), || {
            format!("f**{} = {bi}, f = {fx}", fmt(&x))
        });
    }
    Ok(())
}

pub fn conjugate_battery(cfg: &SuiteConfig) -> BatteryReport {
    battery(
        4,
        "conjugate identities",
        cfg,
        &[(0, cfg.count(200), conjugate_instance)],
    )
}

// 5

fn conjugate_sum_instance(g: &mut Gen, o: &mut Outcome) -> Result<()> {
    let n = g.dim(6);
    let anchor = g.small_vector(n);
    let f = g.function_around(&anchor, false);
    let h = g.function_around(&anchor, true);
    let xs = add(&slope_mixture(g, &f), &slope_mixture(g, &h));
    let r = conjugate_sum_rule(&f, &h, &xs)?;
    o.check(r.qualification_holds, || {
        "generated instance is not qualified".into()
    });
    let direct = conjugate_value(&f.sum(&h)?, &xs)?;
    o.check(r.value == direct, || {
        format!("rule {} vs direct {direct}", r.value)
    });
    match (&r.split, &r.parts, &r.value) {
        (Some((x1, x2)), Some((p1, p2)), ExtendedRational::Finite(v)) => {
            o.check(add(x1, x2) == xs, || "split does not add up".into());
            o.check(&(p1 + p2) == v, || "parts do not sum to the value".into());
            o.check(
                conjugate_value(&f, x1)? == ExtendedRational::Finite(p1.clone()),
                || "first part is not f*(x1)".into(),
            );
            o.check(
                conjugate_value(&h, x2)? == ExtendedRational::Finite(p2.clone()),
                || "second part is not g*(x2)".into(),
            );
        }
        _ => o.check(false, || format!("no attained split, value {}", r.value)),
    }
    Ok(())
}

pub fn conjugate_sum_battery(cfg: &SuiteConfig) -> BatteryReport {
    battery(
        5,
        "conjugate sum rule",
        cfg,
        &[(0, cfg.count(200), conjugate_sum_instance)],
    )
}

// 6

fn fenchel_instance(g: &mut Gen, o: &mut Outcome) -> Result<()> {
    let (f, h, a) = g.qualified_fenchel()?;
    let c = fenchel_solve(&f, &h, &a)?;
    o.tag(match c.p_hat {
        ExtendedRational::Finite(_) => "finite",
        ExtendedRational::NegInfinity => "unbounded",
        ExtendedRational::PosInfinity => "infeasible",
    });
    o.check(c.qualification_holds, || {
        "qualification flag is false".into()
    });
    o.check(c.equality && c.p_hat == c.d_hat, || {
        format!("p = {}, d = {}", c.p_hat, c.d_hat)
    });
    o.check(c.verify(&f, &h, &a)?, || {
        "certificate does not verify".into()
    });
    if c.p_hat.is_finite() {
        match (&c.primal_x, &c.dual_y) {
            (Some(x), Some(y)) => {
                o.check(primal_objective(&f, &h, &a, x)? == c.p_hat, || {
                    "primal point is not optimal".into()
                });
                o.check(dual_objective(&f, &h, &a, y)? == c.d_hat, || {
                    "dual point is not optimal".into()
                });
            }
            _ => o.check(false, || "missing attainment".into()),
        }
    }
    Ok(())
}

fn gap_instance(_: &mut Gen, o: &mut Outcome) -> Result<()> {
    let f = PolyhedralFunction::indicator(HPolyhedron::from_i64(1, &[&[1]], &[-1], &[], &[]))?;
    let h = PolyhedralFunction::indicator(HPolyhedron::from_i64(1, &[&[-1]], &[-1], &[], &[]))?;
    let a = QMatrix::identity(1);
    let c = fenchel_solve(&f, &h, &a)?;
    o.check(c.p_hat == ExtendedRational::PosInfinity, || {
        format!("gap instance: p = {}, expected +inf", c.p_hat)
    });
    o.check(c.d_hat == ExtendedRational::Finite(int(0)), || {
        format!("gap instance: d = {}, expected 0", c.d_hat)
    });
    Ok(())
}

pub fn fenchel_battery(cfg: &SuiteConfig) -> BatteryReport {
    battery(
        6,
        "strong duality with dual attainment",
        cfg,
        &[(0, cfg.count(200), fenchel_instance), (1, 1, gap_instance)],
    )
}

// 7

fn subdiff_two_path_instance(g: &mut Gen, o: &mut Outcome) -> Result<()> {
    let n = g.dim(6);
    let anchor = g.small_vector(n);
    let f = g.function_around(&anchor, false);
    let x = if g.chance(0.7) {
        anchor.clone()
    } else {
        sample_points(g, f.domain(), &anchor, 2).pop().unwrap()
    };
    let a = f.subdifferential_at(&x)?;
    let b = f.subdifferential_by_pieces(&x)?;
    o.check(a.set_eq(&b)?, || format!("routes differ at {}", fmt(&x)));
    Ok(())
}

fn subdiff_sum_instance(g: &mut Gen, o: &mut Outcome) -> Result<()> {
    let n = g.dim(4);
    let x = g.small_vector(n);
    let f1 = g.function_around(&x, false);
    let f2 = g.function_around(&x, true);
    let r = subdiff_sum_rule_check(&f1, &f2, &x)?;
    o.check(r.qualification_holds, || {
        "generated instance is not qualified".into()
    });
    o.check(r.inclusion_holds && r.rule_holds, || {
        "sum rule fails".into()
    });
    Ok(())
}

fn subdiff_chain_instance(g: &mut Gen, o: &mut Outcome) -> Result<()> {
    let n = g.dim(4);
    let m = g.dim(4);
    let x = g.small_vector(n);
    let a = g.matrix(m, n);
    let f = g.function_around(&a.mul_vec(&x), true);
    let r = subdiff_chain_rule(&f, &a, &x)?;
    o.check(r.qualification_holds, || {
        "generated instance is not qualified".into()
    });
    o.check(r.inclusion_holds && r.rule_holds, || {
        "chain rule fails".into()
    });
    Ok(())
}

pub fn subdiff_battery(cfg: &SuiteConfig) -> BatteryReport {
    battery(
        7,
        "subdifferential routes and calculus",
        cfg,
        &[
            (0, cfg.count(200), subdiff_two_path_instance),
            (1, cfg.count(100), subdiff_sum_instance),
            (2, cfg.count(100), subdiff_chain_instance),
        ],
    )
}

// 8

fn coderiv_sum_instance(g: &mut Gen, o: &mut Outcome) -> Result<()> {
    let nx = g.dim(3);
    let ny = g.dim(3);
    let x = g.small_vector(nx);
    let (y1, y2) = (g.small_vector(ny), g.small_vector(ny));
    let f1 = g.map_around(&x, &y1);
    let f2 = g.map_around(&x, &y2);
    let s = SplitPoint {
        x,
        y: add(&y1, &y2),
        y1,
        y2,
    };
    let ys = g.small_vector(ny);
    let r = coderivative_sum_rule_check(&f1, &f2, &s, &ys)?;
    o.tag(if r.qualification_holds {
        "sum-qualified"
    } else {
        "sum-unqualified"
    });
    o.check(r.inclusion_holds, || "sum inclusion fails".into());
    o.check(!r.qualification_holds || r.rule_holds, || {
        "sum equality fails under qualification".into()
    });
    Ok(())
}

fn coderiv_chain_instance(g: &mut Gen, o: &mut Outcome) -> Result<()> {
    let (nx, ny, nz) = (g.dim(2), g.dim(2), g.dim(2));
    let x = g.small_vector(nx);
    let y = g.small_vector(ny);
    let z = g.small_vector(nz);
    let f = g.map_around(&x, &y);
    let h = g.map_around(&y, &z);
    let zs = g.small_vector(nz);
    let r = coderivative_chain_rule_check(&f, &h, &x, &y, &z, &zs)?;
    let qualified = r.qualification_holds_a || r.qualification_holds_b;
    o.tag(if qualified {
        "chain-qualified"
    } else {
        "chain-unqualified"
    });
    o.check(r.inclusion_holds, || "chain inclusion fails".into());
    o.check(!qualified || r.rule_holds, || {
        "chain equality fails under qualification".into()
    });
    Ok(())
}

fn coderiv_linear_instance(g: &mut Gen, o: &mut Outcome) -> Result<()> {
    let (n, m) = (g.dim(6), g.dim(6));
    let a = g.matrix(m, n);
    let x = g.small_vector(n);
    let ys = g.vector(m);
    let d = PolyMap::linear(&a).coderivative_at(&x, &a.mul_vec(&x), &ys)?;
    let expect = HPolyhedron::singleton(&a.tr_mul_vec(&ys));
    o.check(d.set_eq(&expect)?, || {
        "linear coderivative is not {A^T y*}".into()
    });
    Ok(())
}

pub fn coderivative_battery(cfg: &SuiteConfig) -> BatteryReport {
    battery(
        8,
        "coderivative calculus",
        cfg,
        &[
            (0, cfg.count(100), coderiv_sum_instance),
            (1, cfg.count(100), coderiv_chain_instance),
            (2, cfg.count(50), coderiv_linear_instance),
        ],
    )
}

// 9

fn projection_instance(g: &mut Gen, o: &mut Outcome) -> Result<()> {
    let n = g.dim(6).max(2);
    let (p, anchor) = g.polyhedron(n);
    let k = g.int(1, n as i64 - 1) as usize;
    let q = p.project_fm(k)?;
    for _ in 0..10 {
        let mut y: QVector = anchor[..k].to_vec();
        for v in y.iter_mut() {
            *v += ratio(g.int(-4, 4), g.int(1, 2));
        }
        let mut pins = HPolyhedron::universe(n);
        for (j, v) in y.iter().enumerate() {
            pins = pins.intersect(&HPolyhedron::new(
                n,
                QMatrix::zeros(0, n),
                vec![],
                QMatrix::from_rows(n, vec![unit(n, j)])?,
                vec![v.clone()],
            )?)?;
        }
        let lifted = !p.intersect(&pins)?.is_empty();
        let member = q.contains_point(&y)?;
        o.tag(if lifted { "member" } else { "non-member" });
        o.check(lifted == member, || {
            format!(
                "projection says {member}, lifted LP says {lifted} at {}",
                fmt(&y)
            )
        });
    }
    Ok(())
}

pub fn projection_battery(cfg: &SuiteConfig) -> BatteryReport {
    battery(
        9,
        "projection oracle equivalence",
        cfg,
        &[(0, cfg.count(200), projection_instance)],
    )
}

pub fn run_battery(id: u8, cfg: &SuiteConfig) -> Option<BatteryReport> {
    Some(match id {
        1 => lp_battery(cfg),
        2 => separation_battery(cfg),
        3 => normal_cone_battery(cfg),
        4 => conjugate_battery(cfg),
        5 => conjugate_sum_battery(cfg),
        6 => fenchel_battery(cfg),
        7 => subdiff_battery(cfg),
        8 => coderivative_battery(cfg),
        9 => projection_battery(cfg),
        _ => return None,
    })
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<BatteryReport> {
    (1..=9).filter_map(|id| run_battery(id, cfg)).collect()
}
