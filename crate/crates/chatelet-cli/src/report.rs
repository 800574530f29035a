//! Versioned JSON reports. Every number is exact: rationals are `"num/den"`
//! strings and field elements are lists of such strings.

use chatelet::chatelet::{Certificate, ChateletSurface, Classification, PlaceResult, SurfaceAnalysis};
use chatelet::construct::{Construction, TraceIssue};
use chatelet::fibration::BundleReport;
use chatelet::numfield::{NFElement, NFPoly, NumberField};
use chatelet::ratpoly::fmt_rational;
use chatelet::{Error, RatPoly, Rational};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = "chatelet-report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub input: Value,
    pub body: Value,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn new(command: &str, input: Value, body: Value) -> Self {
        Report { schema: SCHEMA.into(), command: command.into(), input, body, notes: vec![], elapsed_ms: None }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

pub fn rat(q: &Rational) -> String {
    fmt_rational(q)
}

pub fn elem(x: &NFElement) -> Value {
    match x.to_rational() {
        Some(q) if x.field.is_rationals() => Value::String(rat(&q)),
        _ => Value::Array(x.coords.iter().map(|c| Value::String(rat(c))).collect()),
    }
}

pub fn nf_poly(f: &NFPoly) -> Value {
    Value::Array(f.coeffs().iter().map(elem).collect())
}

pub fn rat_poly(f: &RatPoly) -> Value {
    Value::Array(f.coeffs().iter().map(|c| Value::String(rat(c))).collect())
}

pub fn field(l: &NumberField) -> Value {
    if l.is_rationals() {
        Value::String("Q".into())
    } else {
        rat_poly(l.poly())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceEcho {
    pub field: Value,
    pub a: Value,
    pub p: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f2: Option<Value>,
}

pub fn surface_echo(v: &ChateletSurface) -> SurfaceEcho {
    let fac = v.factorization.as_ref();
    SurfaceEcho {
        field: field(&v.field),
        a: elem(&v.a),
        p: nf_poly(&v.p),
        k: fac.map(|f| elem(&f.k)),
        f1: fac.map(|f| nf_poly(&f.f1)),
        f2: fac.map(|f| nf_poly(&f.f2)),
    }
}

/// The surface in the input-file format, so it can be fed back to `analyze`.
pub fn surface_file(v: &ChateletSurface, extension: Option<&NumberField>) -> Value {
    let mut m = serde_json::Map::new();
    if !v.field.is_rationals() {
        m.insert("field".into(), int_poly(v.field.poly()));
    }
    m.insert("a".into(), elem(&v.a));
    match &v.factorization {
        Some(fac) => {
            m.insert("k".into(), elem(&fac.k));
            m.insert("f1".into(), nf_poly(&fac.f1));
            m.insert("f2".into(), nf_poly(&fac.f2));
        }
        None => {
            m.insert("p".into(), nf_poly(&v.p));
        }
    }
    if let Some(l) = extension {
        m.insert("extension".into(), int_poly(l.poly()));
    }
    Value::Object(m)
}

fn int_poly(f: &RatPoly) -> Value {
    Value::Array(
        f.coeffs().iter().map(|c| Value::from(i64::try_from(c.to_integer()).expect("small coefficients"))).collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaceRow {
    pub place: String,
    pub under: String,
    pub solvable: Option<bool>,
    pub invariant_set: Option<Vec<String>>,
    pub certificate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn certificate_summary(c: &Certificate) -> String {
    c.to_string()
}

pub fn place_row(r: &PlaceResult) -> PlaceRow {
    match &r.outcome {
        Ok(la) => PlaceRow {
            place: r.label.clone(),
            under: r.under.to_string(),
            solvable: Some(la.solvable),
            invariant_set: la.invariants.as_ref().map(|s| s.iter().map(ToString::to_string).collect()),
            certificate: Some(certificate_summary(&la.certificate)),
            error: None,
        },
        Err(e) => PlaceRow {
            place: r.label.clone(),
            under: r.under.to_string(),
            solvable: None,
            invariant_set: None,
            certificate: None,
            error: Some(e.to_string()),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub adelic_nonempty: bool,
    pub forced_sum: Option<String>,
    pub classification: String,
    pub places: Vec<String>,
    pub assumes_bm_only_obstruction: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSection {
    pub field: Value,
    pub bad_places: Vec<String>,
    pub places: Vec<PlaceRow>,
    pub verdict: Option<VerdictRow>,
}

pub fn analysis_section(l: &NumberField, g: &SurfaceAnalysis) -> AnalysisSection {
    AnalysisSection {
        field: field(l),
        bad_places: g.bad_places.iter().map(ToString::to_string).collect(),
        places: g.places.iter().map(place_row).collect(),
        verdict: g.verdict.as_ref().map(|v| {
            let (name, places) = match &v.classification {
                Classification::LocallyInsolvable(s) => ("LocallyInsolvable", s.clone()),
                Classification::HasseCounterexampleBM => ("HasseCounterexampleBM", vec![]),
                Classification::RationalPointsExistWAFailsOff(s) => ("RationalPointsExistWAFailsOff", s.clone()),
                Classification::RationalPointsExistWAHolds => ("RationalPointsExistWAHolds", vec![]),
                Classification::LocallySolvableEverywhere => ("LocallySolvableEverywhere", vec![]),
            };
            VerdictRow {
                adelic_nonempty: v.adelic_nonempty,
                forced_sum: v.forced_sum.map(|s| s.to_string()),
                classification: name.into(),
                places,
                assumes_bm_only_obstruction: v.assumes_bm_only_obstruction,
            }
        }),
    }
}

/// The worst library error among the place results, if any.
pub fn place_errors(g: &SurfaceAnalysis) -> Vec<&Error> {
    g.places.iter().filter_map(|r| r.outcome.as_ref().err()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintRow {
    pub parameter: String,
    pub denominator_support: Vec<u64>,
    pub conditions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionRow {
    pub recipe: String,
    pub s: Vec<String>,
    pub s_prime: Vec<String>,
    pub s_doubleprime: Vec<String>,
    pub v1: Option<u64>,
    pub v2: Option<u64>,
    pub a: String,
    pub b: Option<String>,
    pub c: Option<String>,
    pub surface: SurfaceEcho,
    pub rational_point: Option<Vec<String>>,
    pub constraints: Vec<ConstraintRow>,
    pub issues: Vec<String>,
}

pub fn construction_row(c: &Construction, issues: &[TraceIssue]) -> ConstructionRow {
    let t = &c.trace;
    let names = |ps: &[chatelet::hilbert::Place]| ps.iter().map(ToString::to_string).collect();
    ConstructionRow {
        recipe: t.recipe.to_string(),
        s: names(&t.s),
        s_prime: names(&t.s_prime),
        s_doubleprime: names(&t.s_doubleprime),
        v1: t.v1,
        v2: t.v2,
        a: rat(&t.a),
        b: t.b.as_ref().map(rat),
        c: t.c.as_ref().map(rat),
        surface: surface_echo(&c.surface),
        rational_point: t.rational_point.as_ref().map(|p| p.iter().map(rat).collect()),
        constraints: t
            .constraint_sets
            .iter()
            .map(|(name, cs)| ConstraintRow {
                parameter: name.clone(),
                denominator_support: cs.denominator_support.clone(),
                conditions: cs.constraints.iter().map(ToString::to_string).collect(),
            })
            .collect(),
        issues: issues.iter().map(ToString::to_string).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleRow {
    pub resultant: String,
    pub branch_locus: Value,
    pub branch_at_infinity: bool,
    pub expected_factors: Vec<FactorRow>,
    pub disjoint: bool,
    pub points_on_curve: Vec<bool>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorRow {
    pub factor: Value,
    pub divides: bool,
}

pub fn bundle_row(r: &BundleReport) -> BundleRow {
    BundleRow {
        resultant: rat(&r.resultant),
        branch_locus: rat_poly(&r.branch_locus),
        branch_at_infinity: r.branch_at_infinity,
        expected_factors: r
            .expected_factors
            .iter()
            .map(|(f, ok)| FactorRow { factor: rat_poly(f), divides: *ok })
            .collect(),
        disjoint: r.disjoint,
        points_on_curve: r.points_on_curve.clone(),
        pass: r.all_pass(),
    }
}
