//! Chatelet surfaces `y^2 - a z^2 = P(x)`: local solvability, local invariants
//! of the quaternion algebra `(a, f1(x))`, and global verdicts.
//!
//! At a finite place the projective line of `x` is covered by two charts, the
//! ball `v(x) >= 0` and the ball `v(1/x) >= 1`.  Balls are refined until the
//! square class of `P` (and of the factors `f1`, `k f2` when present) is
//! constant on them.  At odd places a ball is split into the residue classes
//! that meet the zeros of the reduced polynomial, which are explored further,
//! and the remaining "generic" classes, whose classes are read off the
//! reduction directly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{self, pow_u64};
use crate::error::{invalid, Error, Result};
use crate::fpoly::{self, ExtField, FpPoly};
use crate::hilbert::{hilbert_from_classes, Place, Sign};
use crate::localfield::{embed_rational, is_square, LocalElement, LocalField, SquareClass};
use crate::numfield::{nf_discriminant, nf_resultant, LocalModel, NFElement, NFPoly, NumberField, PlaceKind, PlaceOfL};
use crate::ratpoly::{sample_points_between_roots, RatPoly, Rational};

/// `P = k f1 f2` with `f1`, `f2` of degree 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub k: NFElement,
    pub f1: NFPoly,
    pub f2: NFPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChateletSurface {
    pub field: NumberField,
    pub a: NFElement,
    pub p: NFPoly,
    pub factorization: Option<Factorization>,
}

/// The algebra `(a, f1(x))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrauerGenerator {
    pub a: NFElement,
    pub f1: NFPoly,
}

impl fmt::Display for BrauerGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.f1)
    }
}

impl ChateletSurface {
    pub fn new(a: NFElement, p: NFPoly, factorization: Option<Factorization>) -> Result<Self> {
        let field = a.field.clone();
        if a.is_zero() {
            return invalid("a must be nonzero");
        }
        if p.field != field {
            return invalid("a and P live in different fields");
        }
        if p.deg() != 4 {
            return invalid(format!("P must have degree 4, got {}", p.deg()));
        }
        if nf_discriminant(&p)?.is_zero() {
            return invalid(format!("P = {p} is not separable"));
        }
        if let Some(fac) = &factorization {
            if fac.f1.field != field || fac.f2.field != field || fac.k.field != field {
                return invalid("factorization lives in a different field");
            }
            if fac.f1.deg() != 2 || fac.f2.deg() != 2 || fac.f1.is_zero() || fac.f2.is_zero() {
                return invalid("factors must be quadratics");
            }
            if fac.f1.mul(&fac.f2).scale(&fac.k) != p {
                return invalid(format!("k f1 f2 = {} differs from P = {p}", fac.f1.mul(&fac.f2).scale(&fac.k)));
            }
        }
        Ok(ChateletSurface { field, a, p, factorization })
    }

    pub fn over_q(a: &Rational, p: &RatPoly) -> Result<Self> {
        let q = NumberField::rationals();
        Self::new(q.from_rational(a), NFPoly::from_ratpoly(&q, p), None)
    }

    /// The surface with `P = k f1 f2` over Q.
    pub fn over_q_factored(a: &Rational, k: &Rational, f1: &RatPoly, f2: &RatPoly) -> Result<Self> {
        let q = NumberField::rationals();
        let f1 = NFPoly::from_ratpoly(&q, f1);
        let f2 = NFPoly::from_ratpoly(&q, f2);
        let k = q.from_rational(k);
        let p = f1.mul(&f2).scale(&k);
        Self::new(q.from_rational(a), p, Some(Factorization { k, f1, f2 }))
    }

    /// The same equation over a number field `l`; the surface must be defined over Q.
    pub fn base_change(&self, l: &NumberField) -> Result<Self> {
        if !self.field.is_rationals() {
            return invalid("base change is only defined from Q");
        }
        let lift = |x: &NFElement| l.from_rational(&x.coords[0]);
        let lift_poly = |f: &NFPoly| NFPoly::new(l, f.coeffs().iter().map(lift).collect());
        let factorization = self.factorization.as_ref().map(|fac| Factorization {
            k: lift(&fac.k),
            f1: lift_poly(&fac.f1),
            f2: lift_poly(&fac.f2),
        });
        Self::new(lift(&self.a), lift_poly(&self.p), factorization)
    }

    /// The surface with `a t^2` and `P s^2`, isomorphic to this one.
    pub fn scaled(&self, t: &Rational, s: &Rational) -> Result<Self> {
        if t.is_zero() || s.is_zero() {
            return invalid("scaling factors must be nonzero");
        }
        let s2 = self.field.from_rational(&(s * s));
        let factorization = self.factorization.as_ref().map(|fac| Factorization {
            k: &fac.k * &s2,
            f1: fac.f1.clone(),
            f2: fac.f2.clone(),
        });
        Self::new(self.a.scale(&(t * t)), self.p.scale(&s2), factorization)
    }

    /// Whether `y^2 - a z^2 = P(x)` holds exactly.
    pub fn contains_point(&self, x: &NFElement, y: &NFElement, z: &NFElement) -> bool {
        let lhs = &(y * y) - &(&(&self.a * z) * z);
        lhs == self.p.eval(x)
    }

    pub fn brauer_generator(&self) -> Result<BrauerGenerator> {
        let fac = self.factorization.as_ref().ok_or(Error::MissingFactorization)?;
        Ok(BrauerGenerator { a: self.a.clone(), f1: fac.f1.clone() })
    }
}

impl fmt::Display for ChateletSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 - ({}) z^2 = ", self.a)?;
        match &self.factorization {
            Some(fac) => write!(f, "({}) ({}) ({})", fac.k, fac.f1, fac.f2),
            None => write!(f, "{}", self.p),
        }
    }
}

/// A local invariant in `{0, 1/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Invariant {
    Zero,
    Half,
}

impl Invariant {
    pub fn from_sign(s: Sign) -> Self {
        match s {
            Sign::Plus => Invariant::Zero,
            Sign::Minus => Invariant::Half,
        }
    }

    pub fn add(self, o: Self) -> Self {
        if self == o {
            Invariant::Zero
        } else {
            Invariant::Half
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Invariant::Zero => "0",
            Invariant::Half => "1/2",
        })
    }
}

/// Why a local answer holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Outside the bad places: good reduction forces solvability and invariant 0.
    GoodPlace,
    /// `a` is a square in the completion.
    LocalSquare,
    ComplexPlace,
    /// Sample points between the real roots of `P` where `P > 0`.
    RealSigns {
        witnesses: Vec<String>,
    },
    /// Exhaustive refinement of both charts of the projective line.
    BallTree {
        balls: usize,
        witnesses: Vec<String>,
    },
    /// Copied from the analysis of the place below.
    Delegated {
        from: String,
        inner: Box<Certificate>,
    },
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::GoodPlace => write!(f, "good reduction"),
            Certificate::LocalSquare => write!(f, "a is a local square"),
            Certificate::ComplexPlace => write!(f, "complex place"),
            Certificate::RealSigns { witnesses } => {
                write!(f, "real sign analysis; P > 0 at [{}]", witnesses.join(", "))
            }
            Certificate::BallTree { balls, witnesses } => {
                if witnesses.is_empty() {
                    write!(f, "exhausted {balls} {}, every class has symbol -1", plural(*balls))
                } else {
                    write!(f, "{balls} {}; witnesses [{}]", plural(*balls), witnesses.join("; "))
                }
            }
            Certificate::Delegated { from, inner } => write!(f, "same completion as {from}: {inner}"),
        }
    }
}

fn plural(balls: usize) -> &'static str {
    if balls == 1 {
        "ball"
    } else {
        "balls"
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalAnalysis {
    pub place: String,
    pub under: Place,
    pub solvable: bool,
    /// Realized values of the local invariant; `None` without a factorization.
    pub invariants: Option<BTreeSet<Invariant>>,
    pub certificate: Certificate,
}

impl LocalAnalysis {
    fn trivial(place: String, under: Place, factored: bool, certificate: Certificate) -> Self {
        LocalAnalysis {
            place,
            under,
            solvable: true,
            invariants: factored.then(|| BTreeSet::from([Invariant::Zero])),
            certificate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Unit digits used when embedding Taylor coefficients.
    pub precision: u32,
    /// Deepest ball radius exponent explored.
    pub max_depth: u32,
    /// Total balls explored per place.
    pub max_balls: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { precision: crate::localfield::DEFAULT_PRECISION, max_depth: 64, max_balls: 200_000 }
    }
}

/// Residue fields larger than this are not enumerated; the realized classes
/// of generic residues follow from the Weil bound instead.
const ENUM_LIMIT: u64 = 20_000;

/// Places of Q outside which the surface has good reduction: 2, the real
/// place when `a` is negative somewhere, and the primes dividing `a`, the
/// leading coefficient and discriminant of `P`, the resultant and leading
/// coefficients of the factors, any coefficient denominator, and the
/// discriminant of the field.
pub fn bad_places(v: &ChateletSurface) -> Result<Vec<Place>> {
    let mut primes: BTreeSet<u64> = BTreeSet::from([2]);
    let add_norm = |x: &NFElement, primes: &mut BTreeSet<u64>| -> Result<()> {
        if !x.is_zero() {
            primes.extend(arith::rational_primes(&x.norm())?);
        }
        primes.extend(x.denominator_primes()?);
        Ok(())
    };
    add_norm(&v.a, &mut primes)?;
    add_norm(&v.p.lc(), &mut primes)?;
    add_norm(&nf_discriminant(&v.p)?, &mut primes)?;
    primes.extend(v.p.denominator_primes()?);
    if let Some(fac) = &v.factorization {
        add_norm(&nf_resultant(&fac.f1, &fac.f2)?, &mut primes)?;
        add_norm(&(&fac.f1.lc() * &fac.f2.lc()), &mut primes)?;
        add_norm(&fac.k, &mut primes)?;
        primes.extend(fac.f1.denominator_primes()?);
        primes.extend(fac.f2.denominator_primes()?);
    }
    if !v.field.is_rationals() {
        primes.extend(arith::rational_primes(v.field.disc())?);
    }
    let mut out = Vec::new();
    for w in v.field.places_above(Place::Infinite)? {
        if matches!(w.kind, PlaceKind::Real { .. }) && w.embed(&v.a, 1)?.real_sign() == Some(-1) {
            out.push(Place::Infinite);
            break;
        }
    }
    out.extend(primes.into_iter().map(Place::Finite));
    Ok(out)
}

fn place_label(v: &ChateletSurface, w: &PlaceOfL) -> String {
    if v.field.is_rationals() {
        w.under.to_string()
    } else {
        w.label()
    }
}

/// The place of Q at `place`, as a place of the field Q.
pub fn rational_place(place: Place) -> Result<PlaceOfL> {
    Ok(NumberField::rationals().places_above(place)?.remove(0))
}

/// Solvability and realized invariants at one place of the field of `v`.
pub fn analyze_place(v: &ChateletSurface, w: &PlaceOfL, opts: &AnalysisOptions) -> Result<LocalAnalysis> {
    let label = place_label(v, w);
    let factored = v.factorization.is_some();
    match &w.kind {
        PlaceKind::Complex { .. } => Ok(LocalAnalysis::trivial(label, w.under, factored, Certificate::ComplexPlace)),
        PlaceKind::Real { .. } => analyze_real(v, w, label),
        PlaceKind::Finite(model) => analyze_finite(v, w, model, label, opts),
    }
}

pub fn locally_solvable(v: &ChateletSurface, w: &PlaceOfL) -> Result<(bool, Certificate)> {
    let opts = AnalysisOptions::default();
    let la = analyze_place(v, w, &opts)?;
    Ok((la.solvable, la.certificate))
}

/// Values of `inv_w A(x)` over the local points; empty when there are none.
pub fn invariant_set(v: &ChateletSurface, w: &PlaceOfL) -> Result<BTreeSet<Invariant>> {
    if v.factorization.is_none() {
        return Err(Error::MissingFactorization);
    }
    let la = analyze_place(v, w, &AnalysisOptions::default())?;
    Ok(la.invariants.unwrap_or_default())
}

fn analyze_real(v: &ChateletSurface, w: &PlaceOfL, label: String) -> Result<LocalAnalysis> {
    let factored = v.factorization.is_some();
    if w.embed(&v.a, 1)?.real_sign() == Some(1) {
        return Ok(LocalAnalysis::trivial(label, w.under, factored, Certificate::LocalSquare));
    }
    let p =
        v.p.to_ratpoly()
            .ok_or_else(|| Error::UnsupportedPlace(format!("{label}: real analysis needs rational coefficients")))?;
    let mut solvable = false;
    let mut invs = BTreeSet::new();
    let mut witnesses = Vec::new();
    for s in sample_points_between_roots(&p) {
        if !p.eval(&s).is_positive() {
            continue;
        }
        solvable = true;
        witnesses.push(format!("x={}", crate::ratpoly::fmt_rational(&s)));
        if let Some(fac) = &v.factorization {
            let f1s = fac.f1.eval(&v.field.from_rational(&s));
            let positive = w.embed(&f1s, 1)?.real_sign() == Some(1);
            invs.insert(if positive { Invariant::Zero } else { Invariant::Half });
        }
    }
    Ok(LocalAnalysis {
        place: label,
        under: w.under,
        solvable,
        invariants: factored.then_some(invs),
        certificate: Certificate::RealSigns { witnesses },
    })
}

/// One chart of the projective line: the polynomial whose square class
/// decides solvability, the two factors, and the radius of the starting ball.
struct Chart {
    name: &'static str,
    q: NFPoly,
    h: Option<[NFPoly; 2]>,
    start: u32,
}

fn charts(v: &ChateletSurface) -> [Chart; 2] {
    let hs = v.factorization.as_ref().map(|fac| [fac.f1.clone(), fac.f2.scale(&fac.k)]);
    let rev = hs.as_ref().map(|[h1, h2]| [h1.reversed(2), h2.reversed(2)]);
    [Chart { name: "x", q: v.p.clone(), h: hs, start: 0 }, Chart { name: "1/x", q: v.p.reversed(4), h: rev, start: 1 }]
}

fn analyze_finite(
    v: &ChateletSurface,
    w: &PlaceOfL,
    model: &LocalModel,
    label: String,
    opts: &AnalysisOptions,
) -> Result<LocalAnalysis> {
    let field = model.field.clone();
    let factored = v.factorization.is_some();
    let digits = opts.precision.max(field.square_digits());
    let a = model.embed(&v.a, digits)?;
    match is_square(&a) {
        Ok(true) => return Ok(LocalAnalysis::trivial(label, w.under, factored, Certificate::LocalSquare)),
        Ok(false) => {}
        Err(Error::Unsupported(msg)) => return Err(Error::UnsupportedPlace(format!("{label}: {msg}"))),
        Err(e) => return Err(e),
    }
    let kf = field.residue_field().expect("finite place");
    let mut search = BallSearch {
        nf: &v.field,
        model,
        a_class: a.square_class()?,
        digits,
        margin: field.square_digits(),
        nonsquare: if model.prime() == 2 { vec![] } else { first_nonsquare(&kf) },
        field,
        kf,
        factored,
        opts,
        balls: 0,
        solvable: false,
        found: BTreeSet::new(),
        witnesses: Vec::new(),
    };
    for chart in charts(v) {
        let c = v.field.zero();
        search.explore(&chart, &c, chart.start)?;
    }
    Ok(LocalAnalysis {
        place: label,
        under: w.under,
        solvable: search.solvable,
        invariants: factored.then(|| search.found.clone()),
        certificate: Certificate::BallTree { balls: search.balls, witnesses: search.witnesses },
    })
}

fn first_nonsquare(kf: &ExtField) -> FpPoly {
    (1u64..)
        .map(|i| fpoly::nth_poly(i, kf.degree(), kf.p))
        .find(|x| !kf.is_square(x))
        .expect("odd residue fields have nonsquares")
}

struct BallSearch<'a> {
    nf: &'a NumberField,
    model: &'a LocalModel,
    field: LocalField,
    kf: ExtField,
    a_class: SquareClass,
    digits: u32,
    margin: u32,
    nonsquare: FpPoly,
    factored: bool,
    opts: &'a AnalysisOptions,
    balls: usize,
    solvable: bool,
    found: BTreeSet<Invariant>,
    witnesses: Vec<String>,
}

/// Taylor coefficients embedded in the completion; `None` for exact zeros.
type Expansion = Vec<Option<LocalElement>>;

impl BallSearch<'_> {
    fn done(&self) -> bool {
        if self.factored {
            self.found.len() == 2
        } else {
            self.solvable
        }
    }

    fn record(&mut self, inv: Option<Invariant>, witness: String) {
        let new = match inv {
            Some(i) => self.found.insert(i),
            None => !self.solvable,
        };
        self.solvable = true;
        if new {
            self.witnesses.push(match inv {
                Some(i) => format!("{witness}: inv {i}"),
                None => witness,
            });
        }
    }

    fn symbol(&self, class: &SquareClass) -> Result<Sign> {
        hilbert_from_classes(&self.field, &self.a_class, class)
    }

    fn expand(&self, f: &NFPoly, c: &NFElement) -> Result<Expansion> {
        f.taylor_at(c)
            .iter()
            .map(|t| if t.is_zero() { Ok(None) } else { self.model.embed(t, self.digits).map(Some) })
            .collect()
    }

    /// The square class of `f` on the ball of radius `p^j`, when constant.
    fn stable_class(&self, t: &Expansion, j: u32) -> Result<Option<SquareClass>> {
        let Some(Some(t0)) = t.first() else { return Ok(None) };
        let v0 = t0.valuation().unwrap();
        let rest = min_shifted(t, j, 1);
        if rest.is_some_and(|r| v0 + (self.margin as i64) > r) {
            return Ok(None);
        }
        Ok(Some(t0.square_class()?))
    }

    fn factor_invariant(&self, chart: &Chart, c: &NFElement, j: u32) -> Result<Option<Invariant>> {
        for h in chart.h.iter().flatten() {
            if let Some(cls) = self.stable_class(&self.expand(h, c)?, j)? {
                return Ok(Some(Invariant::from_sign(self.symbol(&cls)?)));
            }
        }
        Ok(None)
    }

    fn describe(&self, chart: &Chart, c: &NFElement, j: u32) -> String {
        format!("{} in {} + {}^{} O", chart.name, c, self.model.prime(), j)
    }

    fn explore(&mut self, chart: &Chart, c: &NFElement, j: u32) -> Result<()> {
        if self.done() {
            return Ok(());
        }
        self.balls += 1;
        if self.balls > self.opts.max_balls || j > self.opts.max_depth {
            return Err(Error::PrecisionCapExceeded(j));
        }
        let t = self.expand(&chart.q, c)?;
        if let Some(cls) = self.stable_class(&t, j)? {
            if self.symbol(&cls)? == Sign::Minus {
                return Ok(());
            }
            if !self.factored {
                let w = self.describe(chart, c, j);
                self.record(None, w);
                return Ok(());
            }
            if let Some(inv) = self.factor_invariant(chart, c, j)? {
                let w = self.describe(chart, c, j);
                self.record(Some(inv), w);
                return Ok(());
            }
        } else if newton_root(&t, j) {
            if !self.factored {
                let w = format!("root of P in {}", self.describe(chart, c, j));
                self.record(None, w);
                return Ok(());
            }
            if let Some(inv) = self.factor_invariant(chart, c, j)? {
                let w = format!("near a root of P in {}", self.describe(chart, c, j));
                self.record(Some(inv), w);
                return Ok(());
            }
        }
        self.subdivide(chart, c, j, &t)
    }

    fn child(&self, c: &NFElement, j: u32, r: &FpPoly) -> Result<NFElement> {
        let lift = self.model.lift_residue(self.nf, r)?;
        let step = Rational::from_integer(pow_u64(self.model.prime(), j));
        Ok(c + &lift.scale(&step))
    }

    fn subdivide(&mut self, chart: &Chart, c: &NFElement, j: u32, t: &Expansion) -> Result<()> {
        if self.model.prime() == 2 {
            for d in 0..2u64 {
                let child = self.child(c, j, &fpoly::trim(vec![d]))?;
                self.explore(chart, &child, j + 1)?;
            }
            return Ok(());
        }
        let (_, qbar) = reduction(t, j);
        let roots = self.kf.roots_ext(&qbar);
        self.generic_children(chart, c, j, &qbar, roots.len())?;
        for r in roots {
            let child = self.child(c, j, &r)?;
            self.explore(chart, &child, j + 1)?;
        }
        Ok(())
    }

    fn class_of(&self, mu: i64, chi_square: bool) -> SquareClass {
        let unit = if chi_square { vec![1] } else { self.nonsquare.clone() };
        SquareClass::Finite { valuation: mu, unit }
    }

    /// Residue classes `c + p^j (d + p O)` with `d` not a zero of the reduction.
    fn generic_children(&mut self, chart: &Chart, c: &NFElement, j: u32, qbar: &[FpPoly], nroots: usize) -> Result<()> {
        let q = self.kf.size();
        if q <= BigUint::from(nroots) {
            return Ok(());
        }
        let enumerable = q <= BigUint::from(ENUM_LIMIT);
        let qn = q.to_u64().unwrap_or(u64::MAX);
        let f = self.kf.degree();
        let p = self.kf.p;
        let generic = |s: &Self| format!("{} (generic residues)", s.describe(chart, c, j + 1));
        let Some([h1, h2]) = &chart.h else {
            let mu = reduction_valuation(&self.expand(&chart.q, c)?, j);
            let mut chis = BTreeSet::new();
            if enumerable {
                for i in 0..qn {
                    let d = fpoly::nth_poly(i, f, p);
                    let val = self.kf.eval_ext(qbar, &d);
                    if !val.is_empty() {
                        chis.insert(self.kf.is_square(&val));
                    }
                }
            } else {
                match const_times_square(&self.kf, qbar) {
                    Some(lc) => {
                        chis.insert(self.kf.is_square(&lc));
                    }
                    None => chis.extend([true, false]),
                }
            }
            for chi in chis {
                if self.symbol(&self.class_of(mu, chi))? == Sign::Plus {
                    let w = generic(self);
                    self.record(None, w);
                }
            }
            return Ok(());
        };
        let e1 = self.expand(h1, c)?;
        let e2 = self.expand(h2, c)?;
        let (mu1, r1) = reduction(&e1, j);
        let (mu2, r2) = reduction(&e2, j);
        let mut pairs = BTreeSet::new();
        if enumerable {
            for i in 0..qn {
                let d = fpoly::nth_poly(i, f, p);
                let (x1, x2) = (self.kf.eval_ext(&r1, &d), self.kf.eval_ext(&r2, &d));
                if !x1.is_empty() && !x2.is_empty() {
                    pairs.insert((self.kf.is_square(&x1), self.kf.is_square(&x2)));
                }
                if pairs.len() == 4 {
                    break;
                }
            }
        } else {
            let chi = |g: &[FpPoly]| const_times_square(&self.kf, g).map(|lc| self.kf.is_square(&lc));
            let both = [true, false];
            match (chi(&r1), chi(&r2)) {
                (Some(a), Some(b)) => {
                    pairs.insert((a, b));
                }
                (Some(a), None) => pairs.extend(both.map(|b| (a, b))),
                (None, Some(b)) => pairs.extend(both.map(|a| (a, b))),
                (None, None) => match chi(qbar) {
                    Some(prod) => pairs.extend(both.map(|a| (a, a == prod))),
                    None => pairs.extend(both.into_iter().flat_map(|a| both.map(move |b| (a, b)))),
                },
            }
        }
        for (x1, x2) in pairs {
            let s1 = self.symbol(&self.class_of(mu1, x1))?;
            let s2 = self.symbol(&self.class_of(mu2, x2))?;
            if s1 * s2 == Sign::Plus {
                let w = generic(self);
                self.record(Some(Invariant::from_sign(s1)), w);
            }
        }
        Ok(())
    }
}

/// `min_{i >= from} v(T_i) + i j` over the nonzero coefficients.
fn min_shifted(t: &Expansion, j: u32, from: usize) -> Option<i64> {
    t.iter()
        .enumerate()
        .skip(from)
        .filter_map(|(i, x)| x.as_ref().map(|e| e.valuation().unwrap() + (i as i64) * (j as i64)))
        .min()
}

fn reduction_valuation(t: &Expansion, j: u32) -> i64 {
    min_shifted(t, j, 0).expect("nonzero polynomial")
}

/// Gauss valuation `mu` of `f(c + p^j y)` and its normalized reduction in `k[y]`.
fn reduction(t: &Expansion, j: u32) -> (i64, Vec<FpPoly>) {
    let mu = reduction_valuation(t, j);
    let coeffs = t
        .iter()
        .enumerate()
        .map(|(i, x)| match x {
            Some(e) if e.valuation().unwrap() + (i as i64) * (j as i64) == mu => first_digit(e),
            _ => vec![],
        })
        .collect();
    (mu, coeffs)
}

fn first_digit(e: &LocalElement) -> FpPoly {
    let p = e.field.prime().unwrap();
    fpoly::trim(e.unit().unwrap().iter().map(|c| fpoly::big_to_fp(c, p)).collect())
}

/// Newton's criterion on the ball: `f(c) = 0`, or `v(f(c)) > 2 v(f'(c))`
/// with the root it produces inside the ball.
fn newton_root(t: &Expansion, j: u32) -> bool {
    match (t.first(), t.get(1)) {
        (Some(None), _) => true,
        (Some(Some(t0)), Some(Some(t1))) => {
            let (v0, v1) = (t0.valuation().unwrap(), t1.valuation().unwrap());
            v0 > 2 * v1 && v0 - v1 >= j as i64
        }
        _ => false,
    }
}

/// The constant `c` when `g = c s^2` in `k[y]`, for `deg g <= 4` and odd characteristic.
fn const_times_square(kf: &ExtField, g: &[FpPoly]) -> Option<FpPoly> {
    let g: Vec<FpPoly> = {
        let mut g = g.to_vec();
        while g.last().is_some_and(|c| c.is_empty()) {
            g.pop();
        }
        g
    };
    let n = g.len().checked_sub(1)?;
    let lc = g[n].clone();
    if n % 2 == 1 {
        return None;
    }
    let li = kf.inv(&lc);
    let m: Vec<FpPoly> = g.iter().map(|c| kf.mul(c, &li)).collect();
    let p = kf.p;
    let half = fpoly::inv(2, p);
    let scale = |x: &FpPoly, s: u64| kf.mul(x, &vec![s]);
    let is_square_monic = match n {
        0 => true,
        2 => {
            // y^2 + b y + c is a square iff b^2 = 4c.
            let b2 = kf.mul(&m[1], &m[1]);
            b2 == scale(&m[0], 4 % p)
        }
        4 => {
            let s1 = scale(&m[3], half);
            let s0 = scale(&fpoly::sub(&m[2], &kf.mul(&s1, &s1), p), half);
            let want1 = scale(&kf.mul(&s1, &s0), 2 % p);
            let want0 = kf.mul(&s0, &s0);
            want1 == m[1] && want0 == m[0]
        }
        _ => return None,
    };
    is_square_monic.then_some(lc)
}

/// Outcome at one place, or why it could not be decided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceResult {
    pub label: String,
    pub under: Place,
    pub outcome: std::result::Result<LocalAnalysis, Error>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForcedSum {
    Zero,
    Half,
    Mixed,
}

impl fmt::Display for ForcedSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ForcedSum::Zero => "0",
            ForcedSum::Half => "1/2",
            ForcedSum::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// No local points at the listed places.
    LocallyInsolvable(Vec<String>),
    /// Points everywhere locally, and every adelic point has invariant sum 1/2.
    HasseCounterexampleBM,
    /// Rational points exist; weak approximation fails off the listed places.
    RationalPointsExistWAFailsOff(Vec<String>),
    RationalPointsExistWAHolds,
    /// Points everywhere locally; without a factorization nothing further is decided.
    LocallySolvableEverywhere,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::LocallyInsolvable(s) => write!(f, "LocallyInsolvable({})", s.join(", ")),
            Classification::HasseCounterexampleBM => write!(f, "HasseCounterexampleBM"),
            Classification::RationalPointsExistWAFailsOff(s) => {
                write!(f, "RationalPointsExistWAFailsOff({})", s.join(", "))
            }
            Classification::RationalPointsExistWAHolds => write!(f, "RationalPointsExistWAHolds"),
            Classification::LocallySolvableEverywhere => write!(f, "LocallySolvableEverywhere"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub adelic_nonempty: bool,
    pub forced_sum: Option<ForcedSum>,
    pub classification: Classification,
    /// The classification assumes the Brauer-Manin obstruction is the only
    /// obstruction to the Hasse principle and weak approximation for
    /// Chatelet surfaces.
    pub assumes_bm_only_obstruction: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceAnalysis {
    pub bad_places: Vec<Place>,
    pub places: Vec<PlaceResult>,
    /// `None` when some place could not be analyzed and no place is insolvable.
    pub verdict: Option<Verdict>,
}

impl SurfaceAnalysis {
    pub fn place(&self, label: &str) -> Option<&PlaceResult> {
        self.places.iter().find(|r| r.label == label)
    }
}

/// Combines per-place results into a verdict.
pub fn classify(places: &[PlaceResult], factored: bool) -> Option<Verdict> {
    let insolvable: Vec<String> =
        places.iter().filter(|r| matches!(&r.outcome, Ok(la) if !la.solvable)).map(|r| r.label.clone()).collect();
    if !insolvable.is_empty() {
        return Some(Verdict {
            adelic_nonempty: false,
            forced_sum: None,
            classification: Classification::LocallyInsolvable(insolvable),
            assumes_bm_only_obstruction: false,
        });
    }
    let analyses: Vec<&LocalAnalysis> = places.iter().map(|r| r.outcome.as_ref().ok()).collect::<Option<_>>()?;
    if !factored {
        return Some(Verdict {
            adelic_nonempty: true,
            forced_sum: None,
            classification: Classification::LocallySolvableEverywhere,
            assumes_bm_only_obstruction: false,
        });
    }
    let mut sum = Invariant::Zero;
    let mut two_valued = Vec::new();
    for la in analyses {
        let set = la.invariants.as_ref()?;
        if set.len() == 2 {
            two_valued.push(la.place.clone());
        } else {
            sum = sum.add(*set.iter().next()?);
        }
    }
    let (forced_sum, classification) = if !two_valued.is_empty() {
        (ForcedSum::Mixed, Classification::RationalPointsExistWAFailsOff(two_valued))
    } else if sum == Invariant::Half {
        (ForcedSum::Half, Classification::HasseCounterexampleBM)
    } else {
        (ForcedSum::Zero, Classification::RationalPointsExistWAHolds)
    };
    let conditional = classification != Classification::HasseCounterexampleBM;
    Some(Verdict {
        adelic_nonempty: true,
        forced_sum: Some(forced_sum),
        classification,
        assumes_bm_only_obstruction: conditional,
    })
}

/// Analyses at every place of the field of `v` above `under`.
fn analyze_above(v: &ChateletSurface, under: Place, opts: &AnalysisOptions) -> Vec<PlaceResult> {
    if v.field.is_rationals() {
        let outcome = rational_place(under).and_then(|w| analyze_place(v, &w, opts));
        return vec![PlaceResult { label: under.to_string(), under, outcome }];
    }
    match v.field.places_above(under) {
        Ok(ws) => {
            ws.iter().map(|w| PlaceResult { label: w.label(), under, outcome: analyze_place(v, w, opts) }).collect()
        }
        Err(e) => vec![ramified_result(v, under, e)],
    }
}

/// At a prime where the field model is unavailable the only supported case
/// is `a` a rational square in `Q_p`, which stays a square above it.
fn ramified_result(v: &ChateletSurface, under: Place, why: Error) -> PlaceResult {
    let label = format!("{under}.ramified");
    let p = under.prime().expect("real places always have models");
    let square = v.a.to_rational().and_then(|a| {
        let la = embed_rational(&a, &LocalField::Padic { p }, 3);
        is_square(&la).ok()
    });
    let outcome = if square == Some(true) {
        Ok(LocalAnalysis::trivial(label.clone(), under, v.factorization.is_some(), Certificate::LocalSquare))
    } else {
        Err(why)
    };
    PlaceResult { label, under, outcome }
}

/// Every bad place analyzed, and the resulting verdict.
pub fn global_analysis(v: &ChateletSurface, opts: &AnalysisOptions) -> Result<SurfaceAnalysis> {
    let bad = bad_places(v)?;
    let places: Vec<PlaceResult> = bad.iter().flat_map(|&u| analyze_above(v, u, opts)).collect();
    let verdict = classify(&places, v.factorization.is_some());
    Ok(SurfaceAnalysis { bad_places: bad, places, verdict })
}

/// Analysis of the base change of `v` (defined over Q) to `l`.  Places whose
/// completion is `Q_p` or `R` reuse the analysis over Q; the others are
/// computed in their own completion.
pub fn analyze_over_extension(v: &ChateletSurface, l: &NumberField, opts: &AnalysisOptions) -> Result<SurfaceAnalysis> {
    if !v.field.is_rationals() {
        return invalid("the surface must be defined over Q");
    }
    let vl = v.base_change(l)?;
    let bad = bad_places(v)?;
    let mut below: BTreeMap<Place, PlaceResult> = BTreeMap::new();
    let mut places = Vec::new();
    for &u in &bad {
        let ws = match l.places_above(u) {
            Ok(ws) => ws,
            Err(e) => {
                places.push(ramified_result(&vl, u, e));
                continue;
            }
        };
        for w in &ws {
            let delegate = match &w.kind {
                PlaceKind::Real { .. } => true,
                PlaceKind::Finite(m) => m.field.degree() == 1,
                PlaceKind::Complex { .. } => false,
            };
            let outcome = if delegate {
                let base = below.entry(u).or_insert_with(|| analyze_above(v, u, opts).remove(0));
                base.outcome.clone().map(|la| LocalAnalysis {
                    place: w.label(),
                    under: u,
                    certificate: Certificate::Delegated {
                        from: base.label.clone(),
                        inner: Box::new(la.certificate.clone()),
                    },
                    ..la
                })
            } else {
                analyze_place(&vl, w, opts)
            };
            places.push(PlaceResult { label: w.label(), under: u, outcome });
        }
    }
    let verdict = classify(&places, v.factorization.is_some());
    Ok(SurfaceAnalysis { bad_places: bad, places, verdict })
}

/// A rational point with `x = n/d`, `max(|n|, d) <= height`, and `y`, `z`
/// of height at most `height`, if the search finds one.
pub fn search_rational_point(v: &ChateletSurface, height: i64) -> Option<(Rational, Rational, Rational)> {
    let a = v.a.to_rational()?;
    let p = v.p.to_ratpoly()?;
    let xs = std::iter::once((0, 1)).chain((1..=height).flat_map(|h| {
        (1..=h)
            .flat_map(move |d| (-h..=h).map(move |n| (n, d)))
            .filter(move |&(n, d)| n.abs().max(d) == h && n.gcd(&d) == 1)
    }));
    for (n, d) in xs {
        let x = Rational::new(BigInt::from(n), BigInt::from(d));
        if let Some((y, z)) = represent_by_norm_form(&a, &p.eval(&x), height) {
            return Some((x, y, z));
        }
    }
    None
}

/// `y^2 - a z^2 = c` with `y = u/w`, `z = s/w`, all of height at most `bound`.
fn represent_by_norm_form(a: &Rational, c: &Rational, bound: i64) -> Option<(Rational, Rational)> {
    for w in 1..=bound {
        let w2 = Rational::from_integer(BigInt::from(w * w));
        for s in 0..=bound {
            let s = Rational::from_integer(BigInt::from(s));
            let y2w2 = c * &w2 + a * &s * &s;
            if y2w2.is_negative() {
                continue;
            }
            if let Some(u) = rational_sqrt(&y2w2) {
                let wq = Rational::from_integer(BigInt::from(w));
                return Some((u / &wq, s / wq));
            }
        }
    }
    None
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// `inv_v A` at a point with `f1(x) != 0` or `f2(x) != 0`, via rational symbols.
pub fn point_invariant(v: &ChateletSurface, x: &Rational, place: Place) -> Result<Invariant> {
    let fac = v.factorization.as_ref().ok_or(Error::MissingFactorization)?;
    let a = v.a.to_rational().ok_or_else(|| Error::Unsupported("a must be rational".into()))?;
    let xe = v.field.from_rational(x);
    for h in [fac.f1.clone(), fac.f2.scale(&fac.k)] {
        let hx = h.eval(&xe).to_rational().ok_or_else(|| Error::Unsupported("coefficients must be rational".into()))?;
        if !hx.is_zero() {
            return Ok(Invariant::from_sign(crate::hilbert::hilbert_symbol(&a, &hx, place)?));
        }
    }
    invalid("both factors vanish at x")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::{rat, ratio};

    fn q_poly(c: &[i64]) -> RatPoly {
        RatPoly::from_ints(c)
    }

    fn at(v: &ChateletSurface, place: Place) -> LocalAnalysis {
        analyze_place(v, &rational_place(place).unwrap(), &AnalysisOptions::default()).unwrap()
    }

    fn set(xs: &[Invariant]) -> Option<BTreeSet<Invariant>> {
        Some(xs.iter().copied().collect())
    }

    #[test]
    fn rejects_malformed_surfaces() {
        assert!(ChateletSurface::over_q(&rat(0), &q_poly(&[1, 0, 0, 0, 1])).is_err());
        assert!(ChateletSurface::over_q(&rat(2), &q_poly(&[1, 0, 0, 1])).is_err());
        assert!(ChateletSurface::over_q(&rat(2), &q_poly(&[1, 0, 2, 0, 1])).is_err());
    }

    #[test]
    fn bad_places_of_examples() {
        let v = ChateletSurface::over_q(&rat(377), &q_poly(&[-14 * 89726, 0, 0, 0, 14])).unwrap();
        let bad = bad_places(&v).unwrap();
        assert!(!bad.contains(&Place::Infinite));
        for p in [2, 7, 13, 17, 29] {
            assert!(bad.contains(&Place::Finite(p)), "{p}");
        }
        let w = ChateletSurface::over_q(&rat(-23), &q_poly(&[-5 * 115, 0, 0, 0, -5])).unwrap();
        assert!(bad_places(&w).unwrap().contains(&Place::Infinite));
    }

    #[test]
    fn insolvable_at_29() {
        let v = ChateletSurface::over_q(&rat(377), &q_poly(&[-14 * 89726, 0, 0, 0, 14])).unwrap();
        assert!(!at(&v, Place::Finite(29)).solvable);
        assert!(at(&v, Place::Finite(13)).solvable);
    }

    #[test]
    fn fifteen_surface() {
        // y^2 + 15 z^2 = 2(x^4 - 10x^2 + 15)
        let v = ChateletSurface::over_q(&rat(-15), &q_poly(&[30, 0, -20, 0, 2])).unwrap();
        assert!(!at(&v, Place::Finite(5)).solvable);
        for p in [2, 3, 7, 11] {
            assert!(at(&v, Place::Finite(p)).solvable, "{p}");
        }
        assert!(at(&v, Place::Infinite).solvable);
    }

    #[test]
    fn two_valued_at_73() {
        let c = rat(99);
        let b = ratio(1, 73);
        let f1 = RatPoly::new(vec![rat(1), rat(0), c.clone()]);
        let f2 = RatPoly::new(vec![&b * &b, rat(0), rat(1) + &c * &b * &b]);
        let v = ChateletSurface::over_q_factored(&rat(73), &rat(1), &f1, &f2).unwrap();
        assert_eq!(at(&v, Place::Finite(73)).invariants, set(&[Invariant::Zero, Invariant::Half]));
        assert_eq!(at(&v, Place::Finite(11)).invariants, set(&[Invariant::Zero]));
        assert!(v.contains_point(&v.field.zero(), &v.field.from_rational(&b), &v.field.zero()));
        let g = global_analysis(&v, &AnalysisOptions::default()).unwrap();
        let verdict = g.verdict.unwrap();
        assert_eq!(verdict.classification, Classification::RationalPointsExistWAFailsOff(vec!["73".into()]));
    }

    #[test]
    fn quadric_reduction_has_trivial_algebra() {
        // P = (x^2 + 1)(x^2 - 3), a = 3: the algebra (3, x^2 - 3) is trivial.
        let v = ChateletSurface::over_q_factored(&rat(3), &rat(1), &q_poly(&[-3, 0, 1]), &q_poly(&[1, 0, 1])).unwrap();
        let g = global_analysis(&v, &AnalysisOptions::default()).unwrap();
        assert_eq!(g.verdict.unwrap().classification, Classification::RationalPointsExistWAHolds);
    }

    #[test]
    fn square_a_is_trivial() {
        let v = ChateletSurface::over_q(&rat(1), &q_poly(&[-7, 0, 0, 1, 3])).unwrap();
        for u in bad_places(&v).unwrap() {
            let la = at(&v, u);
            assert!(la.solvable);
            assert_eq!(la.certificate, Certificate::LocalSquare);
        }
    }

    #[test]
    fn inert_place_over_gaussian_field() {
        let l = NumberField::from_ints(&[1, 0, 1]).unwrap();
        let i = l.theta();
        let e = |n: i64, m: i64| &l.from_int(n) + &i.scale(&rat(m));
        let x2 = |c0: NFElement, c2: NFElement| NFPoly::new(&l, vec![c0, l.zero(), c2]);
        let f1 = x2(-&e(5, 1), l.one());
        let f2 = x2(e(0, -15), e(-1, 5));
        let k = l.from_int(-2);
        let p = f1.mul(&f2).scale(&k);
        let v = ChateletSurface::new(l.from_int(-15), p, Some(Factorization { k, f1, f2 })).unwrap();
        let w = l.places_above(Place::Finite(3)).unwrap().remove(0);
        assert_eq!(w.residue_degree(), 2);
        assert_eq!(invariant_set(&v, &w).unwrap(), BTreeSet::from([Invariant::Half]));
    }

    #[test]
    fn generic_class_shortcut_matches_enumeration() {
        let kf = ExtField { p: 7, modulus: vec![4, 0, 1] };
        let sq = |g: Vec<FpPoly>| const_times_square(&kf, &g);
        // 3 (y + 2)^2 = 3y^2 + 12y + 12
        assert_eq!(sq(vec![vec![5], vec![5], vec![3]]), Some(vec![3]));
        assert_eq!(sq(vec![vec![1], vec![0], vec![1]]), None);
        // (y^2 + t)^2 = y^4 + 2t y^2 + t^2, t^2 = 3
        assert_eq!(sq(vec![vec![3], vec![], vec![0, 2], vec![], vec![1]]), Some(vec![1]));
    }

    #[test]
    fn lifted_residues_reduce_back() {
        let l = NumberField::from_ints(&[-1, -2, 1, 1]).unwrap();
        let w = l.places_above(Place::Finite(5)).unwrap().remove(0);
        let PlaceKind::Finite(m) = &w.kind else { panic!() };
        let kf = m.field.residue_field().unwrap();
        for i in [1u64, 7, 31, 124] {
            let r = fpoly::nth_poly(i, 3, 5);
            let x = m.lift_residue(&l, &r).unwrap();
            assert_eq!(first_digit(&m.embed(&x, 1).unwrap()), r);
            assert_eq!(kf.degree(), 3);
        }
    }

    fn cubic() -> NumberField {
        NumberField::from_ints(&[-1, -2, 1, 1]).unwrap()
    }

    fn v3_example() -> ChateletSurface {
        let (b, c) = (rat(5), rat(878_755_181));
        let f1 = RatPoly::new(vec![-&c, rat(0), rat(1)]);
        let f2 = RatPoly::new(vec![-(&b * &c) - rat(1), rat(0), b]);
        ChateletSurface::over_q_factored(&rat(377), &rat(1), &f1, &f2).unwrap()
    }

    #[test]
    fn v3_example_over_q() {
        let v = v3_example();
        let g = global_analysis(&v, &AnalysisOptions::default()).unwrap();
        let halves: Vec<&str> = g
            .places
            .iter()
            .filter(|r| r.outcome.as_ref().unwrap().invariants == set(&[Invariant::Half]))
            .map(|r| r.label.as_str())
            .collect();
        assert_eq!(halves, vec!["13"]);
        assert_eq!(g.verdict.unwrap().classification, Classification::HasseCounterexampleBM);
    }

    #[test]
    fn v3_example_over_cubic() {
        let g = analyze_over_extension(&v3_example(), &cubic(), &AnalysisOptions::default()).unwrap();
        for r in &g.places {
            assert!(r.outcome.is_ok(), "{}: {:?}", r.label, r.outcome);
        }
        let halves: Vec<&PlaceResult> =
            g.places.iter().filter(|r| r.outcome.as_ref().unwrap().invariants == set(&[Invariant::Half])).collect();
        assert_eq!(halves.len(), 3);
        assert!(halves.iter().all(|r| r.under == Place::Finite(13)));
        assert_eq!(g.verdict.unwrap().classification, Classification::HasseCounterexampleBM);
    }

    #[test]
    fn v1_example_over_cubic() {
        let v = ChateletSurface::over_q(&rat(377), &q_poly(&[-14 * 89726, 0, 0, 0, 14])).unwrap();
        let g = analyze_over_extension(&v, &cubic(), &AnalysisOptions::default()).unwrap();
        let above29: Vec<&PlaceResult> = g.places.iter().filter(|r| r.under == Place::Finite(29)).collect();
        assert_eq!(above29.len(), 3);
        assert!(above29.iter().all(|r| !r.outcome.as_ref().unwrap().solvable));
        assert!(matches!(g.verdict.unwrap().classification, Classification::LocallyInsolvable(_)));
    }
}
