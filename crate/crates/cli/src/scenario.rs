//! Scenarios: a command plus its payload, and the dispatcher that runs them.

use std::time::Instant;

use polycalc::cones::{normal_cone_at, normal_intersection_rule, GeneratedCone};
use polycalc::duality::{
    conjugate_chain_rule, conjugate_eval, conjugate_eval_dual, conjugate_sum_rule, fenchel_solve,
    infimal_convolution_eval, support_eval, support_intersection_rule,
};
use polycalc::functions::{subdiff_chain_rule, subdiff_sum_rule_check};
use polycalc::gen::{Gen, Profile};
use polycalc::lp::{solve_lp, verify_lp_certificate, LpOutcome, LpProblem};
use polycalc::separation::{properly_separate, verify_separation_certificate, SeparationOutcome};
use polycalc::setvalued::{
    coderivative_chain_rule_check, coderivative_sum_rule_check, find_split, SplitPoint,
};
use polycalc::suite::{run_battery, Mode, SuiteConfig};
use polycalc::{Error, ExtendedRational, HPolyhedron, QMatrix, Rational};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::wire::{
    expect_len, ext_out, matrix_in, matrix_out, vec_in, vec_out, Function, Map, Poly, WireResult, Q,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lp {
    pub c: Vec<Q>,
    #[serde(rename = "A", default)]
    pub a: Vec<Vec<Q>>,
    #[serde(default)]
    pub b: Vec<Q>,
    #[serde(rename = "E", default)]
    pub e_rows: Vec<Vec<Q>>,
    #[serde(default)]
    pub e: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiPoint {
    #[serde(rename = "P")]
    pub p: Poly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Separate {
    #[serde(rename = "P")]
    pub p: Poly,
    #[serde(rename = "Omega")]
    pub omega: Poly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalCone {
    #[serde(rename = "P")]
    pub p: Poly,
    pub x: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntersectionRule {
    #[serde(rename = "P")]
    pub p: Poly,
    #[serde(rename = "Omega")]
    pub omega: Poly,
    pub x: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Subdiff {
    pub f: Function,
    pub x: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubdiffSum {
    pub f1: Function,
    pub f2: Function,
    pub x: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubdiffChain {
    pub f: Function,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Q>>,
    pub x: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coderivative {
    #[serde(rename = "F")]
    pub f: Map,
    pub x: Vec<Q>,
    pub y: Vec<Q>,
    pub y_star: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoderivSum {
    #[serde(rename = "F1")]
    pub f1: Map,
    #[serde(rename = "F2")]
    pub f2: Map,
    pub x: Vec<Q>,
    pub y: Vec<Q>,
    /// When absent, a split `y = y1 + y2` is searched for.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y1: Option<Vec<Q>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y2: Option<Vec<Q>>,
    pub y_star: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoderivChain {
    #[serde(rename = "F")]
    pub f: Map,
    #[serde(rename = "G")]
    pub g: Map,
    pub x: Vec<Q>,
    pub y: Vec<Q>,
    pub z: Vec<Q>,
    pub z_star: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Conjugate {
    pub f: Function,
    pub x_star: Vec<Q>,
}

/// `σ_Ω(x*)`, or the intersection rule for `σ_{P∩Ω}` when `P` is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportCmd {
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Poly>,
    #[serde(rename = "Omega")]
    pub omega: Poly,
    pub x_star: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjSum {
    pub f: Function,
    pub g: Function,
    pub x_star: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjChain {
    pub g: Function,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Q>>,
    pub x_star: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Infconv {
    pub f: Function,
    pub g: Function,
    pub x: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fenchel {
    pub f: Function,
    pub g: Function,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Q>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSuite {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    /// Criteria to run, all when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub criteria: Vec<u8>,
    #[serde(default)]
    pub sequential: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Lp,
    Polyhedron,
    PolyhedronPair,
    PolyhedronPairWithCommonPoint,
    Function,
    FunctionPair,
    QualifiedFenchel,
    MapPair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generate {
    pub seed: u64,
    pub kind: Kind,
    pub dims: usize,
    pub rows: usize,
    pub bound: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "payload", rename_all = "kebab-case")]
pub enum Scenario {
    Lp(Lp),
    RiPoint(RiPoint),
    Separate(Separate),
    NormalCone(NormalCone),
    IntersectionRule(IntersectionRule),
    Subdiff(Subdiff),
    SubdiffSum(SubdiffSum),
    SubdiffChain(SubdiffChain),
    Coderivative(Coderivative),
    CoderivSum(CoderivSum),
    CoderivChain(CoderivChain),
    Conjugate(Conjugate),
    Support(SupportCmd),
    ConjSum(ConjSum),
    ConjChain(ConjChain),
    Infconv(Infconv),
    Fenchel(Fenchel),
    CheckSuite(CheckSuite),
    Generate(Generate),
}

impl Scenario {
    pub fn command(&self) -> String {
        match serde_json::to_value(self) {
            Ok(Value::Object(m)) => m
                .get("command")
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string(),
            _ => String::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    QualificationFailed,
    Infeasible,
    InvalidInput,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    /// False when a certificate or a rule that should hold failed to check.
    pub verified: bool,
    pub certificates: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub timing_ms: u64,
}

impl Report {
    pub fn invalid(command: &str, message: String) -> Self {
        Report {
            command: command.to_string(),
            status: Status::InvalidInput,
            verified: true,
            certificates: Value::Null,
            message: Some(message),
            timing_ms: 0,
        }
    }

    /// 0 on success, 1 on a verification failure, 2 on invalid input.
    pub fn exit_code(&self) -> u8 {
        match (self.status, self.verified) {
            (Status::InvalidInput, _) => 2,
            (_, false) => 1,
            _ => 0,
        }
    }
}

/// What a command produced before timing is attached.
struct Outcome {
    status: Status,
    verified: bool,
    certificates: Value,
}

fn ok(certificates: Value) -> Outcome {
    Outcome {
        status: Status::Ok,
        verified: true,
        certificates,
    }
}

fn qualified(holds: bool) -> Status {
    if holds {
        Status::Ok
    } else {
        Status::QualificationFailed
    }
}

enum Failure {
    Invalid(String),
    Infeasible(String),
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Invalid(s)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptyPolyhedron => Failure::Infeasible(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

type Run = std::result::Result<Outcome, Failure>;

fn qs(v: &[Rational]) -> Value {
    json!(vec_out(v))
}

fn opt_qs(v: &Option<Vec<Rational>>) -> Value {
    v.as_deref().map(qs).unwrap_or(Value::Null)
}

fn ext(v: &ExtendedRational) -> Value {
    json!(ext_out(v))
}

fn poly(p: &HPolyhedron) -> Value {
    json!(Poly::from_core(p))
}

fn cone(c: &GeneratedCone) -> Value {
    json!(c
        .generators()
        .iter()
        .map(|g| vec_out(g))
        .collect::<Vec<_>>())
}

fn matrix(rows: &[Vec<Q>], ncols: usize) -> WireResult<QMatrix> {
    matrix_in(rows, ncols, "A")
}

fn run_lp(s: &Lp) -> Run {
    let n = s.c.len();
    let p = LpProblem::new(
        vec_in(&s.c),
        matrix_in(&s.a, n, "A")?,
        vec_in(&s.b),
        matrix_in(&s.e_rows, n, "E")?,
        vec_in(&s.e),
    )?;
    let out = solve_lp(&p)?;
    let verified = verify_lp_certificate(&p, &out);
    let (status, certificates) = match &out {
        LpOutcome::Optimal {
            x,
            ineq_duals,
            eq_duals,
            value,
        } => (
            Status::Ok,
            json!({"outcome": "optimal", "x": qs(x), "ineq_duals": qs(ineq_duals), "eq_duals": qs(eq_duals), "value": Q(value.clone())}),
        ),
        LpOutcome::Unbounded { point, ray } => (
            Status::Ok,
            json!({"outcome": "unbounded", "point": qs(point), "ray": qs(ray)}),
        ),
        LpOutcome::Infeasible {
            ineq_farkas,
            eq_farkas,
        } => (
            Status::Infeasible,
            json!({"outcome": "infeasible", "ineq_farkas": qs(ineq_farkas), "eq_farkas": qs(eq_farkas)}),
        ),
    };
    Ok(Outcome {
        status,
        verified,
        certificates,
    })
}

fn run_ri_point(s: &RiPoint) -> Run {
    let p = s.p.to_core("P")?;
    if let Some((ineq, eq)) = p.emptiness_certificate() {
        return Ok(Outcome {
            status: Status::Infeasible,
            verified: true,
            certificates: json!({"ineq_farkas": qs(&ineq), "eq_farkas": qs(&eq)}),
        });
    }
    let r = p.implicit_equalities_report()?;
    let verified = p.contains_point_ri(&r.ri_point)?;
    Ok(Outcome {
        status: Status::Ok,
        verified,
        certificates: json!({
            "implicit_equality_rows": r.implicit_equality_rows,
            "affine_dim": r.affine_dim,
            "ri_point": qs(&r.ri_point),
        }),
    })
}

fn run_separate(s: &Separate) -> Run {
    let p = s.p.to_core("P")?;
    let omega = s.omega.to_core("Omega")?;
    Ok(match properly_separate(&p, &omega)? {
        SeparationOutcome::Separated(c) => Outcome {
            status: Status::Ok,
            verified: verify_separation_certificate(&p, &omega, &c),
            certificates: json!({
                "separable": true,
                "v": qs(&c.v),
                "alpha": Q(c.alpha.clone()),
                "farkas_P": {"ineq": qs(&c.farkas_p.ineq), "eq": qs(&c.farkas_p.eq)},
                "farkas_Omega": {"ineq": qs(&c.farkas_omega.ineq), "eq": qs(&c.farkas_omega.eq)},
                "strict_witness": qs(&c.strict_witness),
            }),
        },
        SeparationOutcome::NotSeparable { witness } => Outcome {
            status: Status::Ok,
            verified: p.contains_point(&witness)? && omega.contains_point_ri(&witness)?,
            certificates: json!({"separable": false, "witness": qs(&witness)}),
        },
    })
}

fn run_normal_cone(s: &NormalCone) -> Run {
    let p = s.p.to_core("P")?;
    let x = expect_len(&s.x, p.dim(), "x")?;
    let n = normal_cone_at(&p, &x)?.ok_or_else(|| "x is not in P".to_string())?;
    Ok(ok(
        json!({"generators": cone(&n), "cone": poly(&n.to_polyhedron()?)}),
    ))
}

fn run_intersection_rule(s: &IntersectionRule) -> Run {
    let p = s.p.to_core("P")?;
    let omega = s.omega.to_core("Omega")?;
    let x = expect_len(&s.x, p.dim(), "x")?;
    let r = normal_intersection_rule(&p, &omega, &x)?;
    let mut verified = r.inclusion_holds && (!r.qualification_holds || r.rule_holds);
    for d in &r.decompositions {
        verified &= d.verify(&r.normal_p, &r.normal_omega)?;
    }
    Ok(Outcome {
        status: qualified(r.qualification_holds),
        verified,
        certificates: json!({
            "qualification_holds": r.qualification_holds,
            "qualification_witness": opt_qs(&r.qualification_witness),
            "inclusion_holds": r.inclusion_holds,
            "rule_holds": r.rule_holds,
            "normal_P": cone(&r.normal_p),
            "normal_Omega": cone(&r.normal_omega),
            "normal_intersection": cone(&r.normal_intersection),
            "decompositions": r.decompositions.iter().map(|d| json!({
                "target": qs(&d.target),
                "part_P": qs(&d.part_p),
                "part_Omega": qs(&d.part_omega),
                "multipliers": qs(&d.multipliers),
            })).collect::<Vec<_>>(),
        }),
    })
}

fn run_subdiff(s: &Subdiff) -> Run {
    let f = s.f.to_core("f")?;
    let x = expect_len(&s.x, f.dim(), "x")?;
    let a = f.subdifferential_at(&x)?;
    let b = f.subdifferential_by_pieces(&x)?;
    let agree = a.set_eq(&b)?;
    Ok(Outcome {
        status: Status::Ok,
        verified: agree,
        certificates: json!({"subdifferential": poly(&a), "active_pieces": f.active_pieces(&x), "routes_agree": agree}),
    })
}

fn rule_report(
    qual: bool,
    inclusion: bool,
    rule: bool,
    left: &HPolyhedron,
    right: &HPolyhedron,
) -> Outcome {
    Outcome {
        status: qualified(qual),
        verified: inclusion && (!qual || rule),
        certificates: json!({
            "qualification_holds": qual,
            "inclusion_holds": inclusion,
            "rule_holds": rule,
            "left": poly(left),
            "right": poly(right),
        }),
    }
}

fn run_subdiff_sum(s: &SubdiffSum) -> Run {
    let f1 = s.f1.to_core("f1")?;
    let f2 = s.f2.to_core("f2")?;
    let x = expect_len(&s.x, f1.dim(), "x")?;
    let r = subdiff_sum_rule_check(&f1, &f2, &x)?;
    Ok(rule_report(
        r.qualification_holds,
        r.inclusion_holds,
        r.rule_holds,
        &r.left,
        &r.right,
    ))
}

fn run_subdiff_chain(s: &SubdiffChain) -> Run {
    let f = s.f.to_core("f")?;
    let a = matrix(&s.a, s.x.len())?;
    let r = subdiff_chain_rule(&f, &a, &vec_in(&s.x))?;
    Ok(rule_report(
        r.qualification_holds,
        r.inclusion_holds,
        r.rule_holds,
        &r.left,
        &r.right,
    ))
}

fn run_coderivative(s: &Coderivative) -> Run {
    let f = s.f.to_core("F")?;
    let x = expect_len(&s.x, f.nx(), "x")?;
    let y = expect_len(&s.y, f.ny(), "y")?;
    let ys = expect_len(&s.y_star, f.ny(), "y_star")?;
    Ok(ok(
        json!({"coderivative": poly(&f.coderivative_at(&x, &y, &ys)?)}),
    ))
}

fn run_coderiv_sum(s: &CoderivSum) -> Run {
    let f1 = s.f1.to_core("F1")?;
    let f2 = s.f2.to_core("F2")?;
    let x = expect_len(&s.x, f1.nx(), "x")?;
    let y = expect_len(&s.y, f1.ny(), "y")?;
    let ys = expect_len(&s.y_star, f1.ny(), "y_star")?;
    let split = match (&s.y1, &s.y2) {
        (Some(y1), Some(y2)) => SplitPoint {
            x,
            y,
            y1: expect_len(y1, f1.ny(), "y1")?,
            y2: expect_len(y2, f1.ny(), "y2")?,
        },
        (None, None) => find_split(&f1, &f2, &x, &y)?.ok_or(Error::InvalidSplit)?,
        _ => return Err("y1 and y2 must be given together".to_string().into()),
    };
    let r = coderivative_sum_rule_check(&f1, &f2, &split, &ys)?;
    let mut out = rule_report(
        r.qualification_holds,
        r.inclusion_holds,
        r.rule_holds,
        &r.left,
        &r.right,
    );
    out.certificates["split"] = json!({"y1": qs(&split.y1), "y2": qs(&split.y2)});
    Ok(out)
}

fn run_coderiv_chain(s: &CoderivChain) -> Run {
    let f = s.f.to_core("F")?;
    let g = s.g.to_core("G")?;
    let r = coderivative_chain_rule_check(
        &f,
        &g,
        &vec_in(&s.x),
        &vec_in(&s.y),
        &vec_in(&s.z),
        &vec_in(&s.z_star),
    )?;
    let qual = r.qualification_holds_a || r.qualification_holds_b;
    let mut out = rule_report(qual, r.inclusion_holds, r.rule_holds, &r.left, &r.right);
    out.certificates["qualification_holds_a"] = json!(r.qualification_holds_a);
    out.certificates["qualification_holds_b"] = json!(r.qualification_holds_b);
    Ok(out)
}

fn run_conjugate(s: &Conjugate) -> Run {
    let f = s.f.to_core("f")?;
    let xs = expect_len(&s.x_star, f.dim(), "x_star")?;
    let c = conjugate_eval(&f, &xs)?;
    let dual = conjugate_eval_dual(&f, &xs)?;
    Ok(Outcome {
        status: Status::Ok,
        verified: dual == c.value,
        certificates: json!({"value": ext(&c.value), "maximizer": opt_qs(&c.maximizer), "unbounded_ray": opt_qs(&c.unbounded_ray)}),
    })
}

fn run_support(s: &SupportCmd) -> Run {
    let omega = s.omega.to_core("Omega")?;
    let xs = expect_len(&s.x_star, omega.dim(), "x_star")?;
    let Some(p) = &s.p else {
        let c = support_eval(&omega, &xs)?;
        return Ok(ok(
            json!({"value": ext(&c.value), "maximizer": opt_qs(&c.maximizer), "unbounded_ray": opt_qs(&c.unbounded_ray)}),
        ));
    };
    let p = p.to_core("P")?;
    let r = support_intersection_rule(&p, &omega, &xs)?;
    Ok(Outcome {
        status: qualified(r.qualification_holds),
        verified: &r.parts.0 + &r.parts.1 == r.value && polycalc::linalg::add(&r.x1, &r.x2) == xs,
        certificates: json!({
            "qualification_holds": r.qualification_holds,
            "value": Q(r.value.clone()),
            "x1": qs(&r.x1),
            "x2": qs(&r.x2),
            "parts": [Q(r.parts.0.clone()), Q(r.parts.1.clone())],
        }),
    })
}

fn run_conj_sum(s: &ConjSum) -> Run {
    let f = s.f.to_core("f")?;
    let g = s.g.to_core("g")?;
    let xs = expect_len(&s.x_star, f.dim(), "x_star")?;
    let r = conjugate_sum_rule(&f, &g, &xs)?;
    let verified = match (&r.split, &r.parts, r.value.finite()) {
        (Some((x1, x2)), Some((p1, p2)), Some(v)) => {
            polycalc::linalg::add(x1, x2) == xs && &(p1 + p2) == v
        }
        _ => true,
    };
    Ok(Outcome {
        status: qualified(r.qualification_holds),
        verified,
        certificates: json!({
            "qualification_holds": r.qualification_holds,
            "value": ext(&r.value),
            "split": r.split.as_ref().map(|(a, b)| json!([qs(a), qs(b)])),
            "parts": r.parts.as_ref().map(|(a, b)| json!([Q(a.clone()), Q(b.clone())])),
        }),
    })
}

fn run_conj_chain(s: &ConjChain) -> Run {
    let g = s.g.to_core("g")?;
    let a = matrix(&s.a, s.x_star.len())?;
    let r = conjugate_chain_rule(&g, &a, &vec_in(&s.x_star))?;
    Ok(ok(
        json!({"value": ext(&r.value), "y_star": opt_qs(&r.y_star)}),
    ))
}

fn run_infconv(s: &Infconv) -> Run {
    let f = s.f.to_core("f")?;
    let g = s.g.to_core("g")?;
    let x = expect_len(&s.x, f.dim(), "x")?;
    let r = infimal_convolution_eval(&f, &g, &x)?;
    Ok(ok(
        json!({"value": ext(&r.value), "split": r.split.as_ref().map(|(a, b)| json!([qs(a), qs(b)]))}),
    ))
}

fn run_fenchel(s: &Fenchel) -> Run {
    let f = s.f.to_core("f")?;
    let g = s.g.to_core("g")?;
    let a = matrix(&s.a, f.dim())?;
    let c = fenchel_solve(&f, &g, &a)?;
    Ok(Outcome {
        status: qualified(c.qualification_holds),
        verified: c.verify(&f, &g, &a)?,
        certificates: json!({
            "p_hat": ext(&c.p_hat),
            "d_hat": ext(&c.d_hat),
            "primal_x": opt_qs(&c.primal_x),
            "dual_y": opt_qs(&c.dual_y),
            "equality": c.equality,
            "qualification_holds": c.qualification_holds,
            "image_qualification_holds": c.image_qualification_holds,
        }),
    })
}

pub fn suite_config(s: &CheckSuite) -> SuiteConfig {
    let mut cfg = SuiteConfig::default();
    if let Some(seed) = s.seed {
        cfg.seed = seed;
    }
    cfg.count = s.count;
    if let Some(d) = s.dims {
        cfg.profile.dims = d;
    }
    if let Some(r) = s.rows {
        cfg.profile.rows = r;
    }
    if s.sequential {
        cfg.mode = Mode::Sequential;
    }
    cfg
}

fn run_check_suite(s: &CheckSuite) -> Run {
    let cfg = suite_config(s);
    if cfg.profile.dims == 0 || cfg.profile.rows == 0 {
        return Err("dims and rows must be positive".to_string().into());
    }
    let ids: Vec<u8> = if s.criteria.is_empty() {
        (1..=9).collect()
    } else {
        s.criteria.clone()
    };
    let mut reports = Vec::new();
    for id in ids {
        let r = run_battery(id, &cfg).ok_or_else(|| format!("no criterion {id}"))?;
        eprintln!("{}", r.summary());
        reports.push(r);
    }
    let verified = reports.iter().all(|r| r.passed());
    Ok(Outcome {
        status: Status::Ok,
        verified,
        certificates: json!({
            "seed": cfg.seed,
            "criteria": reports.iter().map(|r| json!({
                "id": r.id,
                "name": r.name,
                "passed": r.passed(),
                "instances": r.instances,
                "failures": r.failure_count,
                "failure_messages": r.failures,
                "tags": r.tags,
                "elapsed_ms": r.elapsed.as_millis() as u64,
            })).collect::<Vec<_>>(),
        }),
    })
}

/// Deterministic scenario for `(seed, profile, kind)`. Generated polyhedra
/// contain a planted anchor point.
pub fn generate_instance(s: &Generate) -> WireResult<Scenario> {
    if s.dims == 0 || s.rows == 0 || s.bound <= 0 {
        return Err("dims, rows and bound must be positive".into());
    }
    let mut g = Gen::new(
        s.seed,
        Profile {
            dims: s.dims,
            rows: s.rows,
            bound: s.bound,
        },
    );
    let p = |h: &HPolyhedron| Poly::from_core(h);
    Ok(match s.kind {
        Kind::Lp => {
            let lp = g.lp();
            Scenario::Lp(Lp {
                c: vec_out(&lp.objective),
                a: matrix_out(&lp.ineq),
                b: vec_out(&lp.ineq_rhs),
                e_rows: matrix_out(&lp.eq),
                e: vec_out(&lp.eq_rhs),
            })
        }
        Kind::Polyhedron => {
            let n = g.dim(s.dims);
            Scenario::RiPoint(RiPoint {
                p: p(&g.polyhedron(n).0),
            })
        }
        Kind::PolyhedronPair => {
            let n = g.dim(s.dims);
            let (a, b) = (g.polyhedron(n).0, g.polyhedron(n).0);
            Scenario::Separate(Separate {
                p: p(&a),
                omega: p(&b),
            })
        }
        Kind::PolyhedronPairWithCommonPoint => {
            let n = g.dim(s.dims);
            let x = g.small_vector(n);
            let (m1, m2) = (g.rows(1, s.rows), g.rows(1, s.rows));
            let a = g.polyhedron_around(&x, m1, 0, false);
            let b = g.polyhedron_around(&x, m2, 0, false);
            Scenario::IntersectionRule(IntersectionRule {
                p: p(&a),
                omega: p(&b),
                x: vec_out(&x),
            })
        }
        Kind::Function => {
            let n = g.dim(s.dims);
            let x = g.small_vector(n);
            let f = g.function_around(&x, false);
            Scenario::Subdiff(Subdiff {
                f: Function::from_core(&f),
                x: vec_out(&x),
            })
        }
        Kind::FunctionPair => {
            let n = g.dim(s.dims);
            let x = g.small_vector(n);
            let f = g.function_around(&x, false);
            let h = g.function_around(&x, true);
            let xs = polycalc::linalg::add(&f.pieces()[0].0, &h.pieces()[0].0);
            Scenario::ConjSum(ConjSum {
                f: Function::from_core(&f),
                g: Function::from_core(&h),
                x_star: vec_out(&xs),
            })
        }
        Kind::QualifiedFenchel => {
            let (f, h, a) = g.qualified_fenchel().map_err(|e| e.to_string())?;
            Scenario::Fenchel(Fenchel {
                f: Function::from_core(&f),
                g: Function::from_core(&h),
                a: matrix_out(&a),
            })
        }
        Kind::MapPair => {
            let (nx, ny) = (g.dim(s.dims.min(3)), g.dim(s.dims.min(3)));
            let x = g.small_vector(nx);
            let (y1, y2) = (g.small_vector(ny), g.small_vector(ny));
            let f1 = g.map_around(&x, &y1);
            let f2 = g.map_around(&x, &y2);
            let ys = g.small_vector(ny);
            Scenario::CoderivSum(CoderivSum {
                f1: Map::from_core(&f1),
                f2: Map::from_core(&f2),
                x: vec_out(&x),
                y: vec_out(&polycalc::linalg::add(&y1, &y2)),
                y1: Some(vec_out(&y1)),
                y2: Some(vec_out(&y2)),
                y_star: vec_out(&ys),
            })
        }
    })
}

fn dispatch(s: &Scenario) -> Run {
    match s {
        Scenario::Lp(p) => run_lp(p),
        Scenario::RiPoint(p) => run_ri_point(p),
        Scenario::Separate(p) => run_separate(p),
        Scenario::NormalCone(p) => run_normal_cone(p),
        Scenario::IntersectionRule(p) => run_intersection_rule(p),
        Scenario::Subdiff(p) => run_subdiff(p),
        Scenario::SubdiffSum(p) => run_subdiff_sum(p),
        Scenario::SubdiffChain(p) => run_subdiff_chain(p),
        Scenario::Coderivative(p) => run_coderivative(p),
        Scenario::CoderivSum(p) => run_coderiv_sum(p),
        Scenario::CoderivChain(p) => run_coderiv_chain(p),
        Scenario::Conjugate(p) => run_conjugate(p),
        Scenario::Support(p) => run_support(p),
        Scenario::ConjSum(p) => run_conj_sum(p),
        Scenario::ConjChain(p) => run_conj_chain(p),
        Scenario::Infconv(p) => run_infconv(p),
        Scenario::Fenchel(p) => run_fenchel(p),
        Scenario::CheckSuite(p) => run_check_suite(p),
        Scenario::Generate(p) => generate_instance(p)
            .map(|sc| ok(json!(sc)))
            .map_err(Failure::Invalid),
    }
}

pub fn run_scenario(s: &Scenario) -> Report {
    let start = Instant::now();
    let command = s.command();
    let (status, verified, certificates, message) = match dispatch(s) {
        Ok(o) => (o.status, o.verified, o.certificates, None),
        Err(Failure::Invalid(m)) => (Status::InvalidInput, true, Value::Null, Some(m)),
        Err(Failure::Infeasible(m)) => (Status::Infeasible, true, Value::Null, Some(m)),
    };
    Report {
        command,
        status,
        verified,
        certificates,
        message,
        timing_ms: start.elapsed().as_millis() as u64,
    }
}
