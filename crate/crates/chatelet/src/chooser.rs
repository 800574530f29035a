//! Local conditions on a rational parameter and a deterministic solver for them.
//!
//! A candidate is `x = X / D` with `X` an integer and `D` built from the
//! allowed denominator primes.  At every constrained prime the admissible
//! residue classes of `X` are found by refining `p`-adic balls until each
//! constraint is constant on the ball.  Candidates are then enumerated by
//! increasing `|X|`, positive before negative, and the first one passing
//! [`check_constraints`] is returned.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, pow_u64, val_rat};
use crate::error::{Error, Result};
use crate::hilbert::{hilbert_symbol, Place, Sign};
use crate::localfield::{embed_rational, is_square};
use crate::numfield::NumberField;
use crate::ratpoly::{fmt_rational, rat, Rational};

/// Default cap on the number of candidates examined.
pub const DEFAULT_CAP: u64 = 1_000_000;
/// Residue classes per outer modulus.
const OUTER_LIMIT: usize = 10_000;

/// `scale * x + shift`, the quantity a condition is imposed on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub scale: Rational,
    pub shift: Rational,
}

impl Affine {
    pub fn identity() -> Self {
        Affine { scale: Rational::one(), shift: Rational::zero() }
    }

    pub fn new(scale: Rational, shift: Rational) -> Self {
        Affine { scale, shift }
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.scale * x + &self.shift
    }

    pub fn is_identity(&self) -> bool {
        self.scale.is_one() && self.shift.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    /// Sign at the real place.
    SignAt(Sign),
    SquareAt(Place),
    NonsquareAt(Place),
    ValParity {
        p: u64,
        odd: bool,
    },
    ValEquals {
        p: u64,
        n: i64,
    },
    UnitAt(u64),
    HilbertEq {
        place: Place,
        reference: Rational,
        target: Sign,
    },
    /// Denominator only at the listed primes.
    IntegralOutside(Vec<u64>),
}

impl Condition {
    fn prime(&self) -> Option<u64> {
        match self {
            Condition::SignAt(_) | Condition::IntegralOutside(_) => None,
            Condition::SquareAt(v) | Condition::NonsquareAt(v) => v.prime(),
            Condition::HilbertEq { place, .. } => place.prime(),
            Condition::ValParity { p, .. } | Condition::ValEquals { p, .. } | Condition::UnitAt(p) => Some(*p),
        }
    }

    fn needs_square_class(&self) -> bool {
        matches!(self, Condition::SquareAt(_) | Condition::NonsquareAt(_) | Condition::HilbertEq { .. })
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::SignAt(s) => write!(f, "sign at inf is {}", if *s == Sign::Plus { "+" } else { "-" }),
            Condition::SquareAt(v) => write!(f, "square at {v}"),
            Condition::NonsquareAt(v) => write!(f, "nonsquare at {v}"),
            Condition::ValParity { p, odd } => write!(f, "v_{p} {}", if *odd { "odd" } else { "even" }),
            Condition::ValEquals { p, n } => write!(f, "v_{p} = {n}"),
            Condition::UnitAt(p) => write!(f, "unit at {p}"),
            Condition::HilbertEq { place, reference, target } => {
                write!(f, "({}, .)_{place} = {target}", fmt_rational(reference))
            }
            Condition::IntegralOutside(s) => write!(f, "integral outside {s:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalConstraint {
    pub expr: Affine,
    pub cond: Condition,
}

impl LocalConstraint {
    pub fn on_x(cond: Condition) -> Self {
        LocalConstraint { expr: Affine::identity(), cond }
    }

    pub fn on(expr: Affine, cond: Condition) -> Self {
        LocalConstraint { expr, cond }
    }

    /// Whether the constraint holds at `x`; the detail string names the computed datum.
    pub fn holds(&self, x: &Rational) -> Result<(bool, String)> {
        let y = self.expr.apply(x);
        if y.is_zero() && !matches!(self.cond, Condition::IntegralOutside(_)) {
            return Ok((false, "value is 0".into()));
        }
        Ok(match &self.cond {
            Condition::SignAt(s) => {
                let positive = y.is_positive();
                (positive == (*s == Sign::Plus), format!("value {}", fmt_rational(&y)))
            }
            Condition::SquareAt(v) | Condition::NonsquareAt(v) => {
                let sq = is_square(&embed_rational(&y, &v.completion(), 3))?;
                (sq == matches!(self.cond, Condition::SquareAt(_)), format!("square at {v}: {sq}"))
            }
            Condition::ValParity { p, odd } => {
                let v = val_rat(&y, *p);
                ((v.rem_euclid(2) == 1) == *odd, format!("v_{p} = {v}"))
            }
            Condition::ValEquals { p, n } => {
                let v = val_rat(&y, *p);
                (v == *n, format!("v_{p} = {v}"))
            }
            Condition::UnitAt(p) => {
                let v = val_rat(&y, *p);
                (v == 0, format!("v_{p} = {v}"))
            }
            Condition::HilbertEq { place, reference, target } => {
                let s = hilbert_symbol(reference, &y, *place)?;
                (s == *target, format!("symbol {s}"))
            }
            Condition::IntegralOutside(support) => {
                let bad: Vec<u64> =
                    arith::prime_divisors(y.denom())?.into_iter().filter(|p| !support.contains(p)).collect();
                (bad.is_empty(), format!("denominator primes outside support: {bad:?}"))
            }
        })
    }
}

impl fmt::Display for LocalConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expr.is_identity() {
            write!(f, "x: {}", self.cond)
        } else {
            write!(f, "{}*x+{}: {}", fmt_rational(&self.expr.scale), fmt_rational(&self.expr.shift), self.cond)
        }
    }
}

/// A list of conditions on one rational unknown, with the primes allowed in its denominator.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    pub constraints: Vec<LocalConstraint>,
    pub denominator_support: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub constraint: LocalConstraint,
    pub detail: String,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_support(support: Vec<u64>) -> Self {
        let mut support = support;
        support.sort_unstable();
        support.dedup();
        ConstraintSet { constraints: vec![], denominator_support: support }
    }

    pub fn push(&mut self, c: LocalConstraint) {
        self.constraints.push(c);
    }

    pub fn add(&mut self, cond: Condition) {
        self.push(LocalConstraint::on_x(cond));
    }

    pub fn add_on(&mut self, expr: Affine, cond: Condition) {
        self.push(LocalConstraint::on(expr, cond));
    }

    /// Adds the membership condition for the allowed denominator support.
    pub fn require_support(&mut self) {
        let s = self.denominator_support.clone();
        self.add(Condition::IntegralOutside(s));
    }
}

/// The constraints of `cs` that fail at `x`.
pub fn check_constraints(x: &Rational, cs: &ConstraintSet) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    for c in &cs.constraints {
        let (ok, detail) = c.holds(x)?;
        if !ok {
            out.push(Violation { constraint: c.clone(), detail });
        }
    }
    Ok(out)
}

/// Admissible residue classes of `X` at one prime: pairs `(r, k)` meaning `X = r mod p^k`.
#[derive(Clone, Debug)]
struct PrimeClasses {
    p: u64,
    classes: Vec<(BigInt, u32)>,
    /// Some class was left undecided at the depth cap.
    incomplete: bool,
}

impl PrimeClasses {
    fn max_depth(&self) -> u32 {
        self.classes.iter().map(|c| c.1).max().unwrap_or(0)
    }

    fn density(&self) -> f64 {
        self.classes.iter().map(|(_, k)| (self.p as f64).powi(-(*k as i32))).sum()
    }

    fn contains(&self, x: &BigInt) -> bool {
        self.classes.iter().any(|(r, k)| x.mod_floor(&pow_u64(self.p, *k)) == *r)
    }

    /// All residues modulo `p^max_depth`, or `None` if there would be too many.
    fn expand(&self) -> Option<(BigInt, Vec<BigInt>)> {
        let k = self.max_depth();
        let m = pow_u64(self.p, k);
        let mut total = 0usize;
        for (_, kc) in &self.classes {
            total += pow_u64(self.p, k - kc).to_usize()?;
            if total > OUTER_LIMIT {
                return None;
            }
        }
        let mut out = Vec::with_capacity(total);
        for (r, kc) in &self.classes {
            let step = pow_u64(self.p, *kc);
            let count = pow_u64(self.p, k - kc).to_u64().unwrap();
            for j in 0..count {
                out.push(r + &step * BigInt::from(j));
            }
        }
        out.sort();
        Some((m, out))
    }
}

/// Refines classes of `X` at `p` until every constraint at `p` is constant.
fn classes_at(p: u64, cons: &[&LocalConstraint], d: &BigInt) -> Result<PrimeClasses> {
    let m = if p == 2 { 3 } else { 1 };
    let depth_cap: u32 = {
        let mut need = 0i64;
        for c in cons {
            let base = match &c.cond {
                Condition::ValEquals { n, .. } => n + 1,
                Condition::HilbertEq { reference, .. } => val_rat(reference, p).abs() + 2,
                _ => 2,
            };
            let vs = val_rat(&(&c.expr.scale / Rational::from_integer(d.clone())), p);
            let vt = if c.expr.shift.is_zero() { 0 } else { val_rat(&c.expr.shift, p) };
            need = need.max(base - vs + m + vt.abs());
        }
        let log_cap = (40.0 / (p as f64).log2()).floor() as i64;
        need.clamp(1, log_cap.max(2)) as u32
    };
    let mut out = PrimeClasses { p, classes: vec![], incomplete: false };
    let mut stack: Vec<(BigInt, u32)> = vec![(BigInt::zero(), 0)];
    while let Some((r, k)) = stack.pop() {
        match decide_class(p, m, cons, d, &r, k)? {
            Some(true) => out.classes.push((r, k)),
            Some(false) => {}
            None if k >= depth_cap => out.incomplete = true,
            None => {
                let step = pow_u64(p, k);
                for j in (0..p).rev() {
                    stack.push((&r + &step * BigInt::from(j), k + 1));
                }
            }
        }
    }
    out.classes.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
    Ok(out)
}

/// `Some(verdict)` when all constraints are constant on `r + p^k Z_p`.
fn decide_class(p: u64, m: i64, cons: &[&LocalConstraint], d: &BigInt, r: &BigInt, k: u32) -> Result<Option<bool>> {
    let x0 = Rational::new(r.clone(), d.clone());
    let mut all = true;
    for c in cons {
        let y0 = c.expr.apply(&x0);
        if y0.is_zero() {
            return Ok(None);
        }
        let slope = &c.expr.scale / Rational::from_integer(d.clone());
        let reach = val_rat(&slope, p) + k as i64;
        let v0 = val_rat(&y0, p);
        let margin = if c.cond.needs_square_class() { m } else { 1 };
        if v0 + margin > reach {
            return Ok(None);
        }
        let (ok, _) = c.holds(&x0)?;
        all &= ok;
    }
    Ok(Some(all))
}

/// Open real interval `(lo, hi)` cut out by the archimedean constraints.
fn real_interval(cs: &ConstraintSet) -> Result<(Option<Rational>, Option<Rational>)> {
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for c in &cs.constraints {
        let want_positive = match &c.cond {
            Condition::SignAt(s) => *s == Sign::Plus,
            Condition::SquareAt(Place::Infinite) => true,
            Condition::NonsquareAt(Place::Infinite) => false,
            Condition::HilbertEq { place: Place::Infinite, reference, target } => {
                if reference.is_positive() {
                    if *target == Sign::Minus {
                        return Err(Error::Unsatisfiable(format!("({}, .)_inf is never -1", fmt_rational(reference))));
                    }
                    continue;
                }
                *target == Sign::Plus
            }
            _ => continue,
        };
        let (s, t) = (&c.expr.scale, &c.expr.shift);
        if s.is_zero() {
            if t.is_positive() != want_positive || t.is_zero() {
                return Err(Error::Unsatisfiable(format!("constant constraint {c} fails")));
            }
            continue;
        }
        // s x + t > 0 or < 0.
        let root = -t / s;
        let above = want_positive == s.is_positive();
        if above {
            lo = Some(match lo {
                Some(l) if l > root => l,
                _ => root,
            });
        } else {
            hi = Some(match hi {
                Some(h) if h < root => h,
                _ => root,
            });
        }
    }
    if let (Some(l), Some(h)) = (&lo, &hi) {
        if l >= h {
            return Err(Error::Unsatisfiable("archimedean conditions are inconsistent".into()));
        }
    }
    Ok((lo, hi))
}

/// The first rational satisfying every constraint, in the documented search order.
pub fn solve_constraints(cs: &ConstraintSet, cap: u64) -> Result<Rational> {
    let interval = real_interval(cs)?;
    // Base denominator from negative prescribed valuations of x itself.
    let mut d = BigInt::one();
    for c in &cs.constraints {
        if let Condition::ValEquals { p, n } = &c.cond {
            if *n < 0 && c.expr.is_identity() {
                if !cs.denominator_support.contains(p) {
                    return Err(Error::Unsatisfiable(format!("v_{p} = {n} needs {p} in the denominator support")));
                }
                d = d.lcm(&pow_u64(*p, n.unsigned_abs() as u32));
            }
        }
    }
    let bounded = interval.0.is_some() && interval.1.is_some();
    let extra_prime = cs.denominator_support.contains(&2).then_some(2u64);
    let mut budget = cap;
    let rounds = if bounded && extra_prime.is_some() { 24 } else { 1 };
    let mut last_err = Error::SearchExhausted(cap);
    for j in 0..rounds {
        let dj = &d * pow_u64(2, j);
        if bounded {
            let (l, h) = (interval.0.as_ref().unwrap(), interval.1.as_ref().unwrap());
            // Skip denominators too small to fit a numerator in the interval.
            let width = (h - l) * Rational::from_integer(dj.clone());
            if width <= Rational::one() && j + 1 < rounds {
                continue;
            }
        }
        match search_with_denominator(cs, &dj, &interval, budget) {
            Ok(x) => return Ok(x),
            Err(Error::SearchExhausted(used)) => {
                budget = budget.saturating_sub(used);
                last_err = Error::SearchExhausted(cap);
                if budget == 0 {
                    break;
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

fn search_with_denominator(
    cs: &ConstraintSet,
    d: &BigInt,
    interval: &(Option<Rational>, Option<Rational>),
    cap: u64,
) -> Result<Rational> {
    let mut by_prime: BTreeMap<u64, Vec<&LocalConstraint>> = BTreeMap::new();
    for c in &cs.constraints {
        if let Some(p) = c.cond.prime() {
            by_prime.entry(p).or_default().push(c);
        }
    }
    let mut per_prime = Vec::new();
    for (p, cons) in &by_prime {
        let pc = classes_at(*p, cons, d)?;
        if pc.classes.is_empty() {
            return Err(Error::Unsatisfiable(if pc.incomplete {
                format!("no admissible class at {p} up to the refinement depth")
            } else {
                format!("conditions at {p} are inconsistent")
            }));
        }
        per_prime.push(pc);
    }
    // Outer modulus from the sparsest primes whose expansions stay small.
    per_prime.sort_by(|a, b| a.density().partial_cmp(&b.density()).unwrap().then(a.p.cmp(&b.p)));
    let mut outer_mod = BigInt::one();
    let mut outer: Vec<BigInt> = vec![BigInt::zero()];
    let mut inner = Vec::new();
    for pc in per_prime {
        match pc.expand() {
            Some((m, res)) if outer.len() * res.len() <= OUTER_LIMIT => {
                outer = crt_combine(&outer, &outer_mod, &res, &m);
                outer_mod *= m;
            }
            _ => inner.push(pc),
        }
    }
    outer.sort();
    let in_interval = |x: &Rational| -> bool {
        interval.0.as_ref().is_none_or(|l| x > l) && interval.1.as_ref().is_none_or(|h| x < h)
    };
    let dq = Rational::from_integer(d.clone());
    // Range of X allowed by the interval, if bounded.
    let x_lo = interval.0.as_ref().map(|l| (l * &dq).floor().to_integer());
    let x_hi = interval.1.as_ref().map(|h| (h * &dq).ceil().to_integer());
    let max_abs = match (&x_lo, &x_hi) {
        (Some(l), Some(h)) => Some(l.abs().max(h.abs())),
        _ => None,
    };
    let mut examined = 0u64;
    let mut layer = BigInt::zero();
    loop {
        let base = &layer * &outer_mod;
        if let Some(ma) = &max_abs {
            if &base > ma {
                return Err(Error::SearchExhausted(examined));
            }
        }
        // X = r mod M with |X| in [base, base + M): base + r and -(base + (-r mod M)).
        let mut cands: Vec<BigInt> = Vec::with_capacity(2 * outer.len());
        for r in &outer {
            let pos = &base + r;
            if !pos.is_zero() {
                cands.push(pos);
            }
            let neg = -(&base + (-r).mod_floor(&outer_mod));
            if !neg.is_zero() {
                cands.push(neg);
            }
        }
        cands.sort_by(|a, b| a.abs().cmp(&b.abs()).then(b.cmp(a)));
        for x in cands {
            examined += 1;
            if examined > cap {
                return Err(Error::SearchExhausted(cap));
            }
            let q = Rational::new(x.clone(), d.clone());
            if !in_interval(&q) || !inner.iter().all(|pc| pc.contains(&x)) {
                continue;
            }
            if check_constraints(&q, cs)?.is_empty() {
                return Ok(q);
            }
        }
        layer += 1;
    }
}

fn crt_combine(a: &[BigInt], ma: &BigInt, b: &[BigInt], mb: &BigInt) -> Vec<BigInt> {
    let m = ma * mb;
    let inv = arith::mod_inverse(ma, mb).expect("coprime moduli");
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            // z = x + ma * ((y - x) / ma mod mb)
            let t = ((y - x) * &inv).mod_floor(mb);
            out.push((x + ma * t).mod_floor(&m));
        }
    }
    out
}

/// Places where a parameter chosen for a set `S` has odd valuation or is negative.
pub fn odd_support(a: &Rational) -> Result<Vec<Place>> {
    let mut out = Vec::new();
    if a.is_negative() {
        out.push(Place::Infinite);
    }
    for p in arith::rational_primes(a)? {
        if p != 2 && val_rat(a, p).rem_euclid(2) == 1 {
            out.push(Place::Finite(p));
        }
    }
    Ok(out)
}

/// Result of [`choose_a`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceOfA {
    pub a: Rational,
    /// The places actually used (the split fallback prime when the input set was empty).
    pub s: Vec<Place>,
    pub s_prime: Vec<Place>,
    pub constraints: ConstraintSet,
    /// A split place where `a` is not a square, witnessing that `a` is not a square in L.
    pub nonsquare_witness: Option<Place>,
}

/// The conditions on `a` for a place set `S`: negative at infinity if `inf` is in `S`,
/// a square at 2, odd valuation at the finite places of `S`, integral.
pub fn a_constraints(s: &[Place]) -> ConstraintSet {
    let mut cs = ConstraintSet::with_support(vec![]);
    for v in s {
        match v {
            Place::Infinite => cs.add(Condition::SignAt(Sign::Minus)),
            Place::Finite(p) => cs.add(Condition::ValParity { p: *p, odd: true }),
        }
    }
    cs.add(Condition::SquareAt(Place::Finite(2)));
    cs.require_support();
    cs
}

pub fn validate_place_set(s: &[Place]) -> Result<Vec<Place>> {
    let mut s = s.to_vec();
    s.sort();
    s.dedup();
    if s.contains(&Place::Finite(2)) {
        return Err(Error::InvalidInput("the place set must avoid 2".into()));
    }
    for v in &s {
        if let Place::Finite(p) = v {
            if !arith::is_prime(*p) {
                return Err(Error::InvalidInput(format!("{p} is not prime")));
            }
        }
    }
    Ok(s)
}

/// Chooses an integral non-square `a` adapted to `S` and the field `L`.
pub fn choose_a(l: &NumberField, s: &[Place]) -> Result<ChoiceOfA> {
    let mut s = validate_place_set(s)?;
    if s.is_empty() {
        let v0 = l.find_split_primes(1, 2, &[])?[0];
        s = vec![Place::Finite(v0)];
    }
    let cs = a_constraints(&s);
    let a = solve_constraints(&cs, DEFAULT_CAP)?;
    let s_prime = odd_support(&a)?;
    let splits = s.iter().all(|v| match v {
        Place::Infinite => l.signature().0 == l.degree(),
        Place::Finite(p) => l.splitting_type(*p).is_split(),
    });
    let mut witness = None;
    if splits {
        for v in &s {
            let sq = is_square(&embed_rational(&a, &v.completion(), 3))?;
            if !sq {
                witness = Some(*v);
                break;
            }
        }
    }
    Ok(ChoiceOfA { a, s, s_prime, constraints: cs, nonsquare_witness: witness })
}

/// Shorthand used by the recipes.
pub(crate) fn affine(scale: Rational, shift: i64) -> Affine {
    Affine::new(scale, rat(shift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::ratio;
    use proptest::prelude::*;

    #[test]
    fn check_examples() {
        let mut cs = ConstraintSet::new();
        cs.add(Condition::SignAt(Sign::Minus));
        cs.add(Condition::SquareAt(Place::Finite(2)));
        cs.add(Condition::ValParity { p: 23, odd: true });
        assert!(check_constraints(&rat(-23), &cs).unwrap().is_empty());
        let mut cs = ConstraintSet::new();
        cs.add(Condition::NonsquareAt(Place::Finite(5)));
        assert_eq!(check_constraints(&rat(4), &cs).unwrap().len(), 1);
        let mut cs = ConstraintSet::with_support(vec![73]);
        cs.add(Condition::ValEquals { p: 73, n: -1 });
        cs.require_support();
        assert!(check_constraints(&ratio(1, 73), &cs).unwrap().is_empty());
        assert_eq!(check_constraints(&ratio(1, 146), &cs).unwrap().len(), 1);
    }

    #[test]
    fn solve_examples() {
        assert_eq!(solve_constraints(&ConstraintSet::new(), 10).unwrap(), rat(1));
        let mut cs = a_constraints(&[Place::Infinite, Place::Finite(23)]);
        let a = solve_constraints(&cs, DEFAULT_CAP).unwrap();
        assert!(check_constraints(&a, &cs).unwrap().is_empty());
        assert_eq!(a, rat(-23));
        cs.add(Condition::NonsquareAt(Place::Finite(5)));
        assert!(check_constraints(&a, &cs).unwrap().is_empty());
        let mut bad = ConstraintSet::new();
        bad.add(Condition::SquareAt(Place::Finite(5)));
        bad.add(Condition::NonsquareAt(Place::Finite(5)));
        assert!(matches!(solve_constraints(&bad, DEFAULT_CAP), Err(Error::Unsatisfiable(_))));
        let mut bad = ConstraintSet::new();
        bad.add(Condition::SquareAt(Place::Finite(7)));
        bad.add(Condition::ValParity { p: 7, odd: true });
        assert!(matches!(solve_constraints(&bad, DEFAULT_CAP), Err(Error::Unsatisfiable(_))));
        let mut bad = ConstraintSet::new();
        bad.add(Condition::SignAt(Sign::Minus));
        bad.add(Condition::SquareAt(Place::Infinite));
        assert!(matches!(solve_constraints(&bad, DEFAULT_CAP), Err(Error::Unsatisfiable(_))));
    }

    #[test]
    fn negative_valuation_and_affine_conditions() {
        let mut cs = ConstraintSet::with_support(vec![2, 73]);
        cs.add(Condition::ValEquals { p: 73, n: -1 });
        cs.require_support();
        assert_eq!(solve_constraints(&cs, DEFAULT_CAP).unwrap(), ratio(1, 73));
        // v_23(1 + c/5329) = 1 and v_11(c) = 1.
        let mut cs = ConstraintSet::with_support(vec![2]);
        cs.add(Condition::ValEquals { p: 11, n: 1 });
        cs.add_on(affine(ratio(1, 5329), 1), Condition::ValEquals { p: 23, n: 1 });
        cs.add(Condition::HilbertEq { place: Place::Finite(73), reference: rat(73), target: Sign::Minus });
        cs.add(Condition::UnitAt(73));
        cs.require_support();
        let c = solve_constraints(&cs, DEFAULT_CAP).unwrap();
        assert!(check_constraints(&c, &cs).unwrap().is_empty());
        assert!(check_constraints(&rat(99), &cs).unwrap().is_empty());
        assert!(c.abs() <= rat(99));
    }

    #[test]
    fn bounded_interval_uses_dyadic_denominators() {
        let mut cs = ConstraintSet::with_support(vec![2]);
        cs.add(Condition::SignAt(Sign::Plus));
        cs.add_on(affine(rat(-3), 1), Condition::SignAt(Sign::Plus));
        cs.add(Condition::ValParity { p: 5, odd: true });
        cs.require_support();
        let c = solve_constraints(&cs, DEFAULT_CAP).unwrap();
        assert!(c > rat(0) && c < ratio(1, 3));
        assert!(check_constraints(&c, &cs).unwrap().is_empty());
    }

    #[test]
    fn choose_a_examples() {
        let qs3 = NumberField::from_ints(&[-3, 0, 1]).unwrap();
        let ch = choose_a(&qs3, &[Place::Infinite]).unwrap();
        assert_eq!(ch.a, rat(-7));
        assert!(check_constraints(&rat(-23), &ch.constraints).unwrap().is_empty());
        assert_eq!(ch.s_prime, vec![Place::Infinite, Place::Finite(7)]);
        assert_eq!(ch.nonsquare_witness, Some(Place::Infinite));
        let cubic = NumberField::from_ints(&[-1, -2, 1, 1]).unwrap();
        let ch = choose_a(&cubic, &[Place::Finite(29)]).unwrap();
        assert!(check_constraints(&rat(377), &ch.constraints).unwrap().is_empty());
        assert!(ch.s_prime.contains(&Place::Finite(29)));
        let ch = choose_a(&qs3, &[]).unwrap();
        assert_eq!(ch.s, vec![Place::Finite(11)]);
        assert!(ch.s_prime.contains(&Place::Finite(11)));
    }

    fn random_set() -> impl Strategy<Value = ConstraintSet> {
        let primes = prop::sample::subsequence(vec![3u64, 5, 7, 11, 13], 0..3);
        (primes, any::<bool>(), any::<u8>()).prop_map(|(ps, neg, bits)| {
            let mut cs = ConstraintSet::new();
            if neg {
                cs.add(Condition::SignAt(Sign::Minus));
            }
            for (i, p) in ps.iter().enumerate() {
                let cond = match (bits >> (2 * i)) & 3 {
                    0 => Condition::ValParity { p: *p, odd: true },
                    1 => Condition::NonsquareAt(Place::Finite(*p)),
                    2 => Condition::UnitAt(*p),
                    _ => Condition::HilbertEq {
                        place: Place::Finite(*p),
                        reference: rat(*p as i64),
                        target: Sign::Minus,
                    },
                };
                cs.add(cond);
            }
            if bits & 0x80 != 0 {
                cs.add(Condition::SquareAt(Place::Finite(2)));
            }
            cs.require_support();
            cs
        })
    }

    proptest! {
        #![proptest_config(crate::testutil::config(300))]

        #[test]
        fn solutions_pass_checks(cs in random_set()) {
            let x = solve_constraints(&cs, DEFAULT_CAP).unwrap();
            prop_assert!(check_constraints(&x, &cs).unwrap().is_empty());
            prop_assert_eq!(solve_constraints(&cs, DEFAULT_CAP).unwrap(), x);
        }
    }
}
