//! Recipes building `(a, b, c)` and a Chatelet surface over Q from a place set `S`.
//!
//! * `V1`: no local points exactly at the places of `S`.
//! * `V2`: a rational point, and two local invariants exactly at `S`.
//! * `V3`: local points everywhere, invariant `1/2` exactly at `S`.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::arith::val_rat;
use crate::chatelet::ChateletSurface;
use crate::chooser::{
    self, affine, check_constraints, choose_a, odd_support, solve_constraints, Affine, Condition, ConstraintSet,
    LocalConstraint, DEFAULT_CAP,
};
use crate::error::{invalid, Error, Result};
use crate::hilbert::{Place, Sign};
use crate::numfield::NumberField;
use crate::ratpoly::{rat, RatPoly, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Recipe {
    V1,
    V2,
    V3,
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Recipe::V1 => "V1",
            Recipe::V2 => "V2",
            Recipe::V3 => "V3",
        })
    }
}

impl FromStr for Recipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "V1" | "1" => Ok(Recipe::V1),
            "V2" | "2" => Ok(Recipe::V2),
            "V3" | "3" => Ok(Recipe::V3),
            _ => invalid(format!("unknown recipe {s:?}; expected V1, V2 or V3")),
        }
    }
}

/// Every choice a recipe made, with the conditions each parameter satisfies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionTrace {
    pub recipe: Recipe,
    pub s: Vec<Place>,
    pub s_prime: Vec<Place>,
    pub s_doubleprime: Vec<Place>,
    pub v1: Option<u64>,
    pub v2: Option<u64>,
    pub a: Rational,
    /// `None` for the `V1` recipe with empty `S`, which uses `P = 1 - x^4`.
    pub b: Option<Rational>,
    pub c: Option<Rational>,
    /// The conditions on `a`, `b` and `c`, in that order.
    pub constraint_sets: Vec<(String, ConstraintSet)>,
    pub rational_point: Option<[Rational; 3]>,
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub surface: ChateletSurface,
    pub trace: ConstructionTrace,
}

/// Checks that every finite place of `S` splits completely in `l` and, if
/// the real place is in `S`, that `l` is totally real.
pub fn check_splits(l: &NumberField, s: &[Place]) -> Result<()> {
    for v in s {
        let ok = match v {
            Place::Infinite => l.signature().0 == l.degree(),
            Place::Finite(p) => l.splitting_type(*p).is_split(),
        };
        if !ok {
            return invalid(format!("{v} does not split completely in {l}"));
        }
    }
    Ok(())
}

fn finite(places: &[Place]) -> impl Iterator<Item = u64> + '_ {
    places.iter().filter_map(|v| v.prime())
}

fn has_inf(places: &[Place]) -> bool {
    places.contains(&Place::Infinite)
}

/// Odd primes at which `b` has a valuation with the given property.
fn odd_primes_where(b: &Rational, keep: impl Fn(i64) -> bool) -> Result<Vec<Place>> {
    Ok(crate::arith::rational_primes(b)?
        .into_iter()
        .filter(|&p| p != 2 && keep(val_rat(b, p)))
        .map(Place::Finite)
        .collect())
}

fn hilbert(p: u64, a: &Rational, target: Sign) -> Condition {
    Condition::HilbertEq { place: Place::Finite(p), reference: a.clone(), target }
}

/// Conditions on `b` for a recipe, given `S` and `a`.
pub fn b_constraints(recipe: Recipe, s: &[Place], a: &Rational) -> Result<ConstraintSet> {
    let s_prime = odd_support(a)?;
    let rest: Vec<Place> = s_prime.iter().filter(|v| !s.contains(v)).copied().collect();
    let mut cs = match recipe {
        Recipe::V2 => ConstraintSet::with_support(finite(s).chain([2]).collect()),
        Recipe::V3 => ConstraintSet::with_support(vec![2]),
        Recipe::V1 => ConstraintSet::with_support(vec![]),
    };
    match recipe {
        Recipe::V1 | Recipe::V3 => {
            if has_inf(s) {
                cs.add(Condition::SignAt(Sign::Minus));
            }
            if has_inf(&rest) {
                cs.add(Condition::SignAt(Sign::Plus));
            }
            for p in finite(s) {
                cs.add(hilbert(p, a, Sign::Minus));
                if recipe == Recipe::V3 {
                    cs.add(Condition::UnitAt(p));
                }
            }
            for p in finite(&rest) {
                cs.add(hilbert(p, a, Sign::Plus));
                if recipe == Recipe::V3 {
                    cs.add(Condition::UnitAt(p));
                }
            }
        }
        Recipe::V2 => {
            for p in finite(s) {
                cs.add(Condition::ValEquals { p, n: -val_rat(a, p) });
            }
            for p in finite(&rest) {
                cs.add(Condition::ValEquals { p, n: val_rat(a, p) });
            }
        }
    }
    cs.require_support();
    Ok(cs)
}

/// The set `S''` derived from `b`.
pub fn s_doubleprime(recipe: Recipe, b: &Rational) -> Result<Vec<Place>> {
    match recipe {
        Recipe::V1 => odd_primes_where(b, |v| v.rem_euclid(2) == 1),
        Recipe::V2 | Recipe::V3 => odd_primes_where(b, |v| v != 0),
    }
}

/// Conditions on `c` for a recipe, given `S`, `a`, `b` and the auxiliary primes.
pub fn c_constraints(
    recipe: Recipe,
    s: &[Place],
    a: &Rational,
    b: &Rational,
    aux: Option<(u64, u64)>,
) -> Result<ConstraintSet> {
    let s_prime = odd_support(a)?;
    let s2 = s_doubleprime(recipe, b)?;
    let rest: Vec<Place> = s_prime.iter().filter(|v| !s.contains(v)).copied().collect();
    let b2 = b * b;
    let mut cs;
    match recipe {
        Recipe::V1 => {
            cs = ConstraintSet::with_support(vec![]);
            for v in s {
                cs.add(Condition::SquareAt(*v));
            }
            for p in finite(&s2).filter(|p| !s_prime.contains(&Place::Finite(*p))) {
                cs.add(Condition::ValParity { p, odd: true });
            }
        }
        Recipe::V2 => {
            cs = ConstraintSet::with_support(vec![2]);
            let one_plus_cb2 = Affine::new(b2.clone(), rat(1));
            if has_inf(s) {
                cs.add_on(one_plus_cb2.clone(), Condition::SignAt(Sign::Minus));
            }
            if has_inf(&rest) {
                cs.add(Condition::SignAt(Sign::Plus));
            }
            for p in finite(s) {
                cs.add(hilbert(p, a, Sign::Minus));
                cs.add(Condition::UnitAt(p));
            }
            let (v1, v2) = aux.ok_or_else(|| Error::InvalidInput("V2 needs two auxiliary primes".into()))?;
            cs.add(Condition::ValEquals { p: v1, n: 1 });
            cs.add_on(one_plus_cb2, Condition::ValEquals { p: v2, n: 1 });
        }
        Recipe::V3 => {
            cs = ConstraintSet::with_support(vec![2]);
            let bc_plus_1 = affine(b.clone(), 1);
            if has_inf(s) {
                cs.add(Condition::SignAt(Sign::Plus));
                cs.add_on(bc_plus_1.clone(), Condition::SignAt(Sign::Plus));
            }
            if has_inf(&rest) {
                cs.add_on(bc_plus_1.clone(), Condition::SignAt(Sign::Minus));
            }
            for p in finite(&s_prime) {
                cs.add_on(bc_plus_1.clone(), Condition::ValEquals { p, n: val_rat(a, p) + 2 });
            }
            for p in finite(&s2) {
                cs.add(hilbert(p, a, Sign::Plus));
            }
            let (v1, v2) = aux.ok_or_else(|| Error::InvalidInput("V3 needs two auxiliary primes".into()))?;
            cs.add(Condition::ValEquals { p: v1, n: 1 });
            cs.add_on(bc_plus_1, Condition::ValEquals { p: v2, n: 1 });
        }
    }
    cs.require_support();
    Ok(cs)
}

/// The surface of a recipe for given parameters.
pub fn surface_for(recipe: Recipe, a: &Rational, b: &Rational, c: &Rational) -> Result<ChateletSurface> {
    let q = |cs: Vec<Rational>| RatPoly::new(cs);
    let zero = Rational::zero();
    match recipe {
        Recipe::V1 => {
            let p = q(vec![-(b * a * c), zero.clone(), zero.clone(), zero, b.clone()]);
            ChateletSurface::over_q(a, &p)
        }
        Recipe::V2 => {
            let f1 = q(vec![rat(1), zero.clone(), c.clone()]);
            let f2 = q(vec![b * b, zero, rat(1) + c * b * b]);
            ChateletSurface::over_q_factored(a, &rat(1), &f1, &f2)
        }
        Recipe::V3 => {
            let f1 = q(vec![-c.clone(), zero.clone(), rat(1)]);
            let f2 = q(vec![-(b * c) - rat(1), zero, b.clone()]);
            ChateletSurface::over_q_factored(a, &rat(1), &f1, &f2)
        }
    }
}

fn auxiliary_primes(l: &NumberField, avoid: &[Place]) -> Result<(u64, u64)> {
    let avoid: Vec<u64> = finite(avoid).collect();
    let v = l.find_split_primes(2, 2, &avoid)?;
    Ok((v[0], v[1]))
}

/// Runs a recipe for the extension `l` of Q and the place set `s`.
pub fn construct(recipe: Recipe, l: &NumberField, s: &[Place]) -> Result<Construction> {
    let s = chooser::validate_place_set(s)?;
    check_splits(l, &s)?;
    let choice = choose_a(l, &s)?;
    let a = choice.a.clone();
    let s_prime = choice.s_prime.clone();
    let mut sets = vec![("a".to_string(), choice.constraints.clone())];
    if recipe == Recipe::V1 && s.is_empty() {
        let p = RatPoly::new(vec![rat(1), rat(0), rat(0), rat(0), rat(-1)]);
        let surface = ChateletSurface::over_q(&a, &p)?;
        let trace = ConstructionTrace {
            recipe,
            s,
            s_prime,
            s_doubleprime: vec![],
            v1: None,
            v2: None,
            a,
            b: None,
            c: None,
            constraint_sets: sets,
            rational_point: Some([rat(0), rat(1), rat(0)]),
        };
        return Ok(Construction { surface, trace });
    }
    let bcs = b_constraints(recipe, &s, &a)?;
    let b = solve_constraints(&bcs, DEFAULT_CAP)?;
    sets.push(("b".into(), bcs));
    let s2 = s_doubleprime(recipe, &b)?;
    let aux = match recipe {
        Recipe::V1 => None,
        Recipe::V2 | Recipe::V3 => {
            let avoid: Vec<Place> = s_prime.iter().chain(&s2).copied().collect();
            Some(auxiliary_primes(l, &avoid)?)
        }
    };
    let ccs = c_constraints(recipe, &s, &a, &b, aux)?;
    let c = solve_constraints(&ccs, DEFAULT_CAP)?;
    sets.push(("c".into(), ccs));
    let surface = surface_for(recipe, &a, &b, &c)?;
    let rational_point = (recipe == Recipe::V2).then(|| [rat(0), b.clone(), rat(0)]);
    let trace = ConstructionTrace {
        recipe,
        s,
        s_prime,
        s_doubleprime: s2,
        v1: aux.map(|x| x.0),
        v2: aux.map(|x| x.1),
        a,
        b: Some(b),
        c: Some(c),
        constraint_sets: sets,
        rational_point,
    };
    Ok(Construction { surface, trace })
}

/// A failed check on a trace or on a parameter choice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceIssue {
    pub parameter: String,
    pub detail: String,
}

impl fmt::Display for TraceIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.parameter, self.detail)
    }
}

fn issue(parameter: &str, detail: impl Into<String>) -> TraceIssue {
    TraceIssue { parameter: parameter.into(), detail: detail.into() }
}

fn violations(name: &str, x: &Rational, cs: &ConstraintSet) -> Result<Vec<TraceIssue>> {
    Ok(check_constraints(x, cs)?
        .into_iter()
        .map(|v| issue(name, format!("{} fails ({})", v.constraint, v.detail)))
        .collect())
}

/// Re-derives `S'`, `S''` and every condition from `(a, b, c)` and checks
/// them, so a trace with stale derived data does not pass.
pub fn verify_parameters(
    recipe: Recipe,
    l: &NumberField,
    s: &[Place],
    a: &Rational,
    b: &Rational,
    c: &Rational,
    aux: Option<(u64, u64)>,
) -> Result<Vec<TraceIssue>> {
    let s = chooser::validate_place_set(s)?;
    check_splits(l, &s)?;
    let mut out = Vec::new();
    let a_set = chooser::a_constraints(&s);
    out.extend(violations("a", a, &a_set)?);
    let s_prime = odd_support(a)?;
    for v in &s {
        if !s_prime.contains(v) {
            out.push(issue("a", format!("{v} is in S but not in S'")));
        }
    }
    out.extend(violations("b", b, &b_constraints(recipe, &s, a)?)?);
    let s2 = s_doubleprime(recipe, b)?;
    if recipe == Recipe::V3 {
        if let Some(v) = s2.iter().find(|v| s_prime.contains(v)) {
            out.push(issue("b", format!("{v} lies in both S' and S''")));
        }
    }
    if let Some((v1, v2)) = aux {
        if v1 == v2 {
            out.push(issue("v1, v2", "the auxiliary primes coincide"));
        }
        for v in [v1, v2] {
            let p = Place::Finite(v);
            if v == 2 || s_prime.contains(&p) || s2.contains(&p) || !l.splitting_type(v).is_split() {
                out.push(issue("v1, v2", format!("{v} must split completely and avoid 2, S' and S''")));
            }
        }
    }
    out.extend(violations("c", c, &c_constraints(recipe, &s, a, b, aux)?)?);
    if recipe == Recipe::V2 || recipe == Recipe::V3 {
        let surface = surface_for(recipe, a, b, c)?;
        let fac = surface.factorization.as_ref().expect("factored recipes");
        if crate::numfield::nf_resultant(&fac.f1, &fac.f2)?.is_zero() {
            out.push(issue("c", "the two factors share a root"));
        }
    }
    Ok(out)
}

/// Checks a trace against its own recorded data.
pub fn verify_trace(trace: &ConstructionTrace, l: &NumberField) -> Result<Vec<TraceIssue>> {
    let mut out = Vec::new();
    if odd_support(&trace.a)? != trace.s_prime {
        out.push(issue("S'", "recorded S' differs from the one derived from a"));
    }
    let (Some(b), Some(c)) = (&trace.b, &trace.c) else {
        if trace.recipe != Recipe::V1 || !trace.s.is_empty() {
            out.push(issue("b, c", "missing parameters"));
        }
        return Ok(out);
    };
    if s_doubleprime(trace.recipe, b)? != trace.s_doubleprime {
        out.push(issue("S''", "recorded S'' differs from the one derived from b"));
    }
    let aux = trace.v1.zip(trace.v2);
    out.extend(verify_parameters(trace.recipe, l, &trace.s, &trace.a, b, c, aux)?);
    Ok(out)
}

/// The constraint list of a set, for display.
pub fn describe_constraints(cs: &ConstraintSet) -> Vec<String> {
    cs.constraints.iter().map(LocalConstraint::to_string).collect()
}

impl ConstructionTrace {
    /// True when the recorded rational point, if any, lies on `surface`.
    pub fn point_checks(&self, surface: &ChateletSurface) -> bool {
        match &self.rational_point {
            None => true,
            Some([x, y, z]) => {
                let f = &surface.field;
                surface.contains_point(&f.from_rational(x), &f.from_rational(y), &f.from_rational(z))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chatelet::{global_analysis, AnalysisOptions, Classification, Invariant};
    use crate::ratpoly::ratio;

    fn cubic() -> NumberField {
        NumberField::from_ints(&[-1, -2, 1, 1]).unwrap()
    }
    fn q_sqrt3() -> NumberField {
        NumberField::from_ints(&[-3, 0, 1]).unwrap()
    }

    #[test]
    fn recorded_parameter_triples_pass() {
        let f = Place::Finite;
        let cases: Vec<(Recipe, NumberField, Vec<Place>, Rational, Rational, Rational, Option<(u64, u64)>)> = vec![
            (Recipe::V1, cubic(), vec![f(29)], rat(377), rat(14), rat(238), None),
            (Recipe::V1, q_sqrt3(), vec![Place::Infinite], rat(-23), rat(-5), rat(5), None),
            (Recipe::V1, q_sqrt3(), vec![f(23)], rat(-23), rat(5), rat(35), None),
            (Recipe::V2, q_sqrt3(), vec![f(73)], rat(73), ratio(1, 73), rat(99), Some((11, 23))),
            (Recipe::V3, cubic(), vec![f(13)], rat(377), rat(5), rat(878_755_181), Some((43, 41))),
        ];
        for (recipe, l, s, a, b, c, aux) in cases {
            let issues = verify_parameters(recipe, &l, &s, &a, &b, &c, aux).unwrap();
            assert!(issues.is_empty(), "{recipe} {s:?}: {issues:?}");
        }
    }

    #[test]
    fn wrong_parameters_are_caught() {
        let issues =
            verify_parameters(Recipe::V1, &cubic(), &[Place::Finite(29)], &rat(377), &rat(15), &rat(238), None)
                .unwrap();
        assert!(!issues.is_empty());
        let issues = verify_parameters(
            Recipe::V2,
            &q_sqrt3(),
            &[Place::Finite(73)],
            &rat(73),
            &ratio(1, 73),
            &rat(99),
            Some((11, 11)),
        )
        .unwrap();
        assert!(issues.iter().any(|i| i.parameter == "v1, v2"));
    }

    #[test]
    fn empty_set_gives_quartic_with_point() {
        let c = construct(Recipe::V1, &q_sqrt3(), &[]).unwrap();
        assert_eq!(c.surface.p.to_ratpoly().unwrap(), RatPoly::from_ints(&[1, 0, 0, 0, -1]));
        assert!(c.trace.point_checks(&c.surface));
    }

    #[test]
    fn v1_closed_loop() {
        let c = construct(Recipe::V1, &cubic(), &[Place::Finite(29)]).unwrap();
        assert!(verify_trace(&c.trace, &cubic()).unwrap().is_empty());
        let g = global_analysis(&c.surface, &AnalysisOptions::default()).unwrap();
        assert_eq!(g.verdict.unwrap().classification, Classification::LocallyInsolvable(vec!["29".into()]));
    }

    #[test]
    fn v2_closed_loop_and_determinism() {
        let c = construct(Recipe::V2, &q_sqrt3(), &[Place::Finite(73)]).unwrap();
        assert_eq!(c.trace.b, Some(ratio(1, 73)));
        assert!(verify_trace(&c.trace, &q_sqrt3()).unwrap().is_empty());
        assert!(c.trace.point_checks(&c.surface));
        let again = construct(Recipe::V2, &q_sqrt3(), &[Place::Finite(73)]).unwrap();
        assert_eq!(again.trace, c.trace);
        let g = global_analysis(&c.surface, &AnalysisOptions::default()).unwrap();
        assert_eq!(g.verdict.unwrap().classification, Classification::RationalPointsExistWAFailsOff(vec!["73".into()]));
    }

    #[test]
    fn v3_closed_loop() {
        let c = construct(Recipe::V3, &cubic(), &[Place::Finite(13)]).unwrap();
        assert!(verify_trace(&c.trace, &cubic()).unwrap().is_empty());
        let g = global_analysis(&c.surface, &AnalysisOptions::default()).unwrap();
        for r in &g.places {
            let la = r.outcome.as_ref().unwrap();
            let want = if r.label == "13" { Invariant::Half } else { Invariant::Zero };
            assert_eq!(la.invariants.as_ref().unwrap().iter().copied().collect::<Vec<_>>(), vec![want], "{}", r.label);
        }
        assert_eq!(g.verdict.unwrap().classification, Classification::HasseCounterexampleBM);
    }

    #[test]
    fn stale_trace_is_rejected() {
        let mut c = construct(Recipe::V3, &cubic(), &[Place::Finite(13)]).unwrap();
        c.trace.s_doubleprime.push(Place::Finite(3));
        assert!(!verify_trace(&c.trace, &cubic()).unwrap().is_empty());
    }
}
