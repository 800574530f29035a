//! Bundled worked examples, each a list of exact checks.

use chatelet::chatelet::{
    analyze_over_extension, global_analysis, AnalysisOptions, ChateletSurface, Classification, Factorization,
    Invariant, PlaceResult, SurfaceAnalysis,
};
use chatelet::construct::{construct, verify_parameters, verify_trace, Recipe};
use chatelet::fibration::{builtin_bundles, check_bundle};
use chatelet::hilbert::{hilbert_symbol, symbol_support, Place, Sign};
use chatelet::numfield::{NFPoly, NumberField};
use chatelet::ratpoly::{rat, ratio};
use chatelet::{Error, RatPoly};
use num_traits::Zero;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), pass, detail: detail.into() }
}

pub struct Entry {
    pub id: &'static str,
    pub summary: &'static str,
    pub run: fn() -> Result<Vec<Check>, Error>,
}

pub fn entries() -> Vec<Entry> {
    vec![
        Entry { id: "hilbert-15-2-at-5", summary: "(-15, 2)_5 = -1", run: hilbert_15_2 },
        Entry { id: "hilbert-product-grid", summary: "product formula on a grid of small pairs", run: product_grid },
        Entry { id: "v1-cubic-29", summary: "V1 surface over the cubic field, S = {29}", run: v1_cubic_29 },
        Entry { id: "v1-real-inf", summary: "V1 surface over Q(sqrt 3), S = {inf}", run: v1_real_inf },
        Entry { id: "v1-real-23", summary: "V1 surface over Q(sqrt 3), S = {23}", run: v1_real_23 },
        Entry { id: "v2-sqrt3-73", summary: "V2 surface, weak approximation fails at 73", run: v2_sqrt3_73 },
        Entry { id: "v3-cubic-13", summary: "V3 surface, Hasse principle fails", run: v3_cubic_13 },
        Entry { id: "gaussian-vinf", summary: "quartic over Q(i) with no Q_5-point", run: gaussian_vinf },
        Entry { id: "gaussian-v1", summary: "V1 surface over Q(i), obstruction at 3", run: gaussian_v1 },
        Entry { id: "construct-closed-loop", summary: "recipes reproduce their local patterns", run: closed_loop },
        Entry { id: "recorded-parameters", summary: "recorded (a, b, c) triples pass the checkers", run: recorded },
        Entry { id: "split-primes-cubic", summary: "split primes of x^3 + x^2 - 2x - 1", run: split_cubic },
        Entry { id: "split-primes-sqrt3", summary: "split primes of x^2 - 3", run: split_sqrt3 },
        Entry { id: "bundle-wa-sqrt3", summary: "pencil for the V2 surface", run: || bundle("bundle-wa-sqrt3") },
        Entry { id: "bundle-hp-cubic", summary: "pencil for the V3 surface", run: || bundle("bundle-hp-cubic") },
        Entry {
            id: "bundle-hp-real-sqrt3",
            summary: "pencil for the real V1 surfaces",
            run: || bundle("bundle-hp-real-sqrt3"),
        },
        Entry {
            id: "bundle-hp-gaussian",
            summary: "pencil for the Q(i) surfaces",
            run: || bundle("bundle-hp-gaussian"),
        },
    ]
}

pub fn find(id: &str) -> Option<Entry> {
    entries().into_iter().find(|e| e.id == id)
}

fn cubic() -> NumberField {
    NumberField::from_ints(&[-1, -2, 1, 1]).expect("irreducible cubic")
}

fn sqrt3() -> NumberField {
    NumberField::from_ints(&[-3, 0, 1]).expect("x^2 - 3")
}

fn gaussian() -> NumberField {
    NumberField::from_ints(&[1, 0, 1]).expect("x^2 + 1")
}

fn opts() -> AnalysisOptions {
    AnalysisOptions::default()
}

/// `y^2 - a z^2 = b (x^4 - c)` over Q.
fn binomial(a: i64, b: i64, c: i64) -> Result<ChateletSurface, Error> {
    ChateletSurface::over_q(&rat(a), &RatPoly::from_ints(&[-b * c, 0, 0, 0, b]))
}

fn insolvable(g: &SurfaceAnalysis) -> Vec<String> {
    g.places.iter().filter(|r| matches!(&r.outcome, Ok(la) if !la.solvable)).map(|r| r.label.clone()).collect()
}

fn unsupported(g: &SurfaceAnalysis) -> Vec<String> {
    g.places.iter().filter(|r| r.outcome.is_err()).map(|r| r.label.clone()).collect()
}

fn invariants(r: &PlaceResult) -> Option<Vec<Invariant>> {
    r.outcome.as_ref().ok()?.invariants.as_ref().map(|s| s.iter().copied().collect())
}

fn insolvable_exactly(name: &str, g: &SurfaceAnalysis, want: &[&str]) -> Check {
    let got = insolvable(g);
    let skipped = unsupported(g);
    check(name, got == want, format!("insolvable at [{}]; uncertified [{}]", got.join(", "), skipped.join(", ")))
}

/// Places with invariant set `{1/2}` equal `half`, every other certified place has `{0}`.
fn invariant_pattern(name: &str, g: &SurfaceAnalysis, half: &[&str]) -> Check {
    let mut bad = Vec::new();
    let mut halves = Vec::new();
    for r in &g.places {
        match invariants(r) {
            Some(s) if s == [Invariant::Half] => halves.push(r.label.clone()),
            Some(s) if s == [Invariant::Zero] => {}
            Some(s) => bad.push(format!("{}: {s:?}", r.label)),
            None if r.outcome.is_err() => {}
            None => bad.push(format!("{}: no invariant", r.label)),
        }
    }
    check(
        name,
        bad.is_empty() && halves == half,
        format!("{{1/2}} at [{}]; unexpected [{}]", halves.join(", "), bad.join(", ")),
    )
}

fn classification(name: &str, g: &SurfaceAnalysis, want: &Classification) -> Check {
    match &g.verdict {
        Some(v) => check(name, &v.classification == want, v.classification.to_string()),
        None => check(name, false, "no verdict"),
    }
}

fn hilbert_15_2() -> Result<Vec<Check>, Error> {
    let s = hilbert_symbol(&rat(-15), &rat(2), Place::Finite(5))?;
    Ok(vec![check("(-15, 2)_5", s == Sign::Minus, s.to_string())])
}

fn product_grid() -> Result<Vec<Check>, Error> {
    let values = [-1i64, 2, -2, 3, -3, 5, -5, 7, 13, -13, 15, -15, 26, 377, 73];
    let mut failures = Vec::new();
    let mut pairs = 0;
    for &a in &values {
        for &b in &values {
            let (a, b) = (rat(a), rat(b));
            let mut minus = 0;
            for v in symbol_support(&a, &b)? {
                if hilbert_symbol(&a, &b, v)? == Sign::Minus {
                    minus += 1;
                }
            }
            pairs += 1;
            if minus % 2 == 1 {
                failures.push(format!("({a}, {b})"));
            }
        }
    }
    Ok(vec![check(
        "product formula",
        failures.is_empty(),
        format!("{pairs} pairs; failures [{}]", failures.join(", ")),
    )])
}

fn v1_cubic_29() -> Result<Vec<Check>, Error> {
    let v = binomial(377, 14, 89726)?;
    let g = global_analysis(&v, &opts())?;
    let gl = analyze_over_extension(&v, &cubic(), &opts())?;
    let above: Vec<&PlaceResult> = gl.places.iter().filter(|r| r.under == Place::Finite(29)).collect();
    let all_insolvable = above.len() == 3 && above.iter().all(|r| matches!(&r.outcome, Ok(la) if !la.solvable));
    Ok(vec![
        insolvable_exactly("over Q: insolvable exactly at 29", &g, &["29"]),
        check(
            "over L: three places above 29, none solvable",
            all_insolvable,
            format!("{} places above 29", above.len()),
        ),
    ])
}

fn v1_real_inf() -> Result<Vec<Check>, Error> {
    let g = global_analysis(&binomial(-23, -5, -115)?, &opts())?;
    Ok(vec![insolvable_exactly("insolvable exactly at inf", &g, &["inf"])])
}

fn v1_real_23() -> Result<Vec<Check>, Error> {
    let g = global_analysis(&binomial(-23, 5, -805)?, &opts())?;
    Ok(vec![insolvable_exactly("insolvable exactly at 23", &g, &["23"])])
}

fn v2_surface() -> Result<ChateletSurface, Error> {
    let f1 = RatPoly::from_ints(&[1, 0, 99]);
    let f2 = RatPoly::new(vec![ratio(1, 5329), rat(0), ratio(5428, 5329)]);
    ChateletSurface::over_q_factored(&rat(73), &rat(1), &f1, &f2)
}

fn v2_sqrt3_73() -> Result<Vec<Check>, Error> {
    let v = v2_surface()?;
    let g = global_analysis(&v, &opts())?;
    let at73 = g.place("73").and_then(invariants);
    let others =
        g.places.iter().filter(|r| r.label != "73").all(|r| invariants(r).is_some_and(|s| s == [Invariant::Zero]));
    let f = &v.field;
    let point = v.contains_point(&f.zero(), &f.from_rational(&ratio(1, 73)), &f.zero());
    Ok(vec![
        check(
            "invariant set {0, 1/2} at 73",
            at73.as_deref() == Some(&[Invariant::Zero, Invariant::Half][..]),
            format!("{at73:?}"),
        ),
        check("invariant set {0} elsewhere", others, ""),
        check("point (0, 1/73, 0) lies on the surface", point, ""),
        classification("verdict", &g, &Classification::RationalPointsExistWAFailsOff(vec!["73".into()])),
    ])
}

fn v3_surface() -> Result<ChateletSurface, Error> {
    let f1 = RatPoly::from_ints(&[-878_755_181, 0, 1]);
    let f2 = RatPoly::from_ints(&[-4_393_775_906, 0, 5]);
    ChateletSurface::over_q_factored(&rat(377), &rat(1), &f1, &f2)
}

fn v3_cubic_13() -> Result<Vec<Check>, Error> {
    let v = v3_surface()?;
    let g = global_analysis(&v, &opts())?;
    let gl = analyze_over_extension(&v, &cubic(), &opts())?;
    let adelic = g.verdict.as_ref().is_some_and(|v| v.adelic_nonempty);
    let above: Vec<&PlaceResult> = gl.places.iter().filter(|r| r.under == Place::Finite(13)).collect();
    let halves = above.iter().filter(|r| invariants(r).is_some_and(|s| s == [Invariant::Half])).count();
    let forced = gl.verdict.as_ref().and_then(|v| v.forced_sum).map(|s| s.to_string());
    Ok(vec![
        check("points everywhere locally", adelic, ""),
        invariant_pattern("over Q: {1/2} exactly at 13", &g, &["13"]),
        classification("over Q: verdict", &g, &Classification::HasseCounterexampleBM),
        check(
            "over L: three places above 13 with {1/2}",
            above.len() == 3 && halves == 3,
            format!("{halves} of {}", above.len()),
        ),
        check("over L: forced invariant sum is 1/2", forced.as_deref() == Some("1/2"), format!("{forced:?}")),
        classification("over L: verdict", &gl, &Classification::HasseCounterexampleBM),
    ])
}

fn gaussian_vinf() -> Result<Vec<Check>, Error> {
    let l = gaussian();
    let v = ChateletSurface::over_q(&rat(-15), &RatPoly::from_ints(&[30, 0, -20, 0, 2]))?.base_change(&l)?;
    let g = global_analysis(&v, &opts())?;
    let got = insolvable(&g);
    let at5 = !got.is_empty() && got.iter().all(|w| w.starts_with('5'));
    Ok(vec![check("insolvable exactly above 5", at5, format!("insolvable at [{}]", got.join(", ")))])
}

pub fn gaussian_v1_surface() -> Result<ChateletSurface, Error> {
    let l = gaussian();
    let i = l.theta();
    let e = |n: i64, m: i64| &l.from_int(n) + &i.scale(&rat(m));
    let quad = |c0, c2| NFPoly::new(&l, vec![c0, l.zero(), c2]);
    // A = (a, f1) with f1 = (-1 + 5i) x^2 - 15i; the other factor would shift
    // every invariant by the constant algebra (-15, -2).
    let f1 = quad(e(0, -15), e(-1, 5));
    let f2 = quad(-&e(5, 1), l.one());
    let k = l.from_int(-2);
    let p = f1.mul(&f2).scale(&k);
    ChateletSurface::new(l.from_int(-15), p, Some(Factorization { k, f1, f2 }))
}

fn gaussian_v1() -> Result<Vec<Check>, Error> {
    let g = global_analysis(&gaussian_v1_surface()?, &opts())?;
    let three = g.places.iter().find(|r| r.under == Place::Finite(3)).map(|r| r.label.clone()).unwrap_or_default();
    let obstructed = g.verdict.as_ref().is_some_and(|v| v.classification == Classification::HasseCounterexampleBM);
    Ok(vec![
        insolvable_exactly("solvable at every certified place", &g, &[]),
        invariant_pattern("{1/2} exactly at the inert place 3", &g, &[three.as_str()]),
        check(
            "reciprocity rules out rational points",
            obstructed,
            g.verdict.map(|v| v.classification.to_string()).unwrap_or_default(),
        ),
    ])
}

fn closed_loop() -> Result<Vec<Check>, Error> {
    let f = Place::Finite;
    let cases = [
        (Recipe::V1, sqrt3(), vec![f(23)], "23"),
        (Recipe::V1, sqrt3(), vec![Place::Infinite], "inf"),
        (Recipe::V1, cubic(), vec![f(29)], "29"),
        (Recipe::V2, sqrt3(), vec![f(73)], "73"),
        (Recipe::V3, cubic(), vec![f(13)], "13"),
    ];
    let mut out = Vec::new();
    for (recipe, l, s, place) in cases {
        let c = construct(recipe, &l, &s)?;
        let issues = verify_trace(&c.trace, &l)?;
        let g = global_analysis(&c.surface, &opts())?;
        let name = format!("{recipe} over {l}, S = {{{place}}}");
        out.push(check(
            format!("{name}: trace"),
            issues.is_empty() && c.trace.point_checks(&c.surface),
            format!("{} issues", issues.len()),
        ));
        if recipe == Recipe::V3 {
            out.push(invariant_pattern(&format!("{name}: invariants"), &g, &[place]));
        }
        let want = match recipe {
            Recipe::V1 => Classification::LocallyInsolvable(vec![place.into()]),
            Recipe::V2 => Classification::RationalPointsExistWAFailsOff(vec![place.into()]),
            Recipe::V3 => Classification::HasseCounterexampleBM,
        };
        out.push(classification(&name, &g, &want));
    }
    Ok(out)
}

fn recorded() -> Result<Vec<Check>, Error> {
    let f = Place::Finite;
    let cases = [
        (Recipe::V1, cubic(), vec![f(29)], rat(377), rat(14), rat(238), None),
        (Recipe::V1, sqrt3(), vec![Place::Infinite], rat(-23), rat(-5), rat(5), None),
        (Recipe::V1, sqrt3(), vec![f(23)], rat(-23), rat(5), rat(35), None),
        (Recipe::V2, sqrt3(), vec![f(73)], rat(73), ratio(1, 73), rat(99), Some((11, 23))),
        (Recipe::V3, cubic(), vec![f(13)], rat(377), rat(5), rat(878_755_181), Some((43, 41))),
    ];
    let mut out = Vec::new();
    for (recipe, l, s, a, b, c, aux) in cases {
        let issues = verify_parameters(recipe, &l, &s, &a, &b, &c, aux)?;
        let names: Vec<String> = issues.iter().map(ToString::to_string).collect();
        out.push(check(format!("{recipe} (a, b, c) = ({a}, {b}, {c})"), issues.is_empty(), names.join("; ")));
    }
    Ok(out)
}

fn split_cubic() -> Result<Vec<Check>, Error> {
    let got = cubic().find_split_primes(4, 2, &[])?;
    Ok(vec![check("first four split primes", got == [13, 29, 41, 43], format!("{got:?}"))])
}

fn split_sqrt3() -> Result<Vec<Check>, Error> {
    let got = sqrt3().find_split_primes(3, 2, &[])?;
    Ok(vec![check("contains 11 and 23", got.contains(&11) && got.contains(&23), format!("{got:?}"))])
}

fn bundle(id: &str) -> Result<Vec<Check>, Error> {
    let (_, spec) = builtin_bundles().into_iter().find(|(n, _)| *n == id).expect("builtin bundle");
    let r = check_bundle(&spec)?;
    let mut out = vec![check("res(P_inf, P_0) != 0", !r.resultant.is_zero(), r.resultant.to_string())];
    for (f, ok) in &r.expected_factors {
        out.push(check(format!("branch locus divisible by {f}"), *ok, ""));
    }
    out.push(check("branch loci disjoint", r.disjoint, ""));
    for (i, ok) in r.points_on_curve.iter().enumerate() {
        out.push(check(format!("curve point {}", i + 1), *ok, ""));
    }
    Ok(out)
}
