//! Quadratic Hilbert symbols over local fields, a brute-force conic oracle
//! and a sampler for elements with a prescribed symbol.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{self, pow_u64, rat_mod, split_rat};
use crate::error::{invalid, Error, Result};
use crate::localfield::{embed_rational, is_square, is_square_class, LocalElement, LocalField, SquareClass};
use crate::ratpoly::Rational;

/// A place of Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinite,
    Finite(u64),
}

impl Place {
    pub fn prime(&self) -> Option<u64> {
        match self {
            Place::Infinite => None,
            Place::Finite(p) => Some(*p),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinite)
    }

    /// Completion of Q at this place.
    pub fn completion(&self) -> LocalField {
        match self {
            Place::Infinite => LocalField::Real,
            Place::Finite(p) => LocalField::Padic { p: *p },
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "inf" | "infinity" | "oo" | "\u{221e}" | "R" => Ok(Place::Infinite),
            _ => {
                let p: u64 = s.parse().map_err(|_| Error::InvalidInput(format!("not a place: {s:?}")))?;
                if !arith::is_prime(p) {
                    return invalid(format!("{p} is not prime"));
                }
                Ok(Place::Finite(p))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Self {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn to_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i32(s: i32) -> Result<Self> {
        match s {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => invalid(format!("{s} is not a sign")),
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, o: Sign) -> Sign {
        Sign::from_parity(self != o)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" | "+" => Ok(Sign::Plus),
            "-1" | "-" => Ok(Sign::Minus),
            other => invalid(format!("not a sign: {other:?}")),
        }
    }
}

/// `(a, b)_v` for nonzero rationals.
pub fn hilbert_symbol(a: &Rational, b: &Rational, v: Place) -> Result<Sign> {
    if a.is_zero() || b.is_zero() {
        return invalid("Hilbert symbol of zero");
    }
    match v {
        Place::Infinite => Ok(Sign::from_parity(a.is_negative() && b.is_negative())),
        Place::Finite(2) => {
            let (al, u) = split_rat(a, 2);
            let (be, w) = split_rat(b, 2);
            let eight = BigInt::from(8);
            let u = rat_mod(&u, &eight).to_u64().unwrap();
            let w = rat_mod(&w, &eight).to_u64().unwrap();
            Ok(dyadic(al, u, be, w))
        }
        Place::Finite(p) => {
            let (al, u) = split_rat(a, p);
            let (be, w) = split_rat(b, p);
            let pb = BigInt::from(p);
            let chi = |r: &Rational| arith::legendre(&rat_mod(r, &pb), p) < 0;
            let twist = al * be % 2 != 0 && p % 4 == 3;
            let odd = twist ^ (be % 2 != 0 && chi(&u)) ^ (al % 2 != 0 && chi(&w));
            Ok(Sign::from_parity(odd))
        }
    }
}

/// Dyadic symbol from valuations and units mod 8:
/// exponent `eps(u) eps(w) + al * omega(w) + be * omega(u)` with
/// `eps(u) = (u-1)/2` and `omega(u) = (u^2-1)/8`.
fn dyadic(al: i64, u: u64, be: i64, w: u64) -> Sign {
    let eps = |x: u64| (x - 1) / 2 % 2;
    let omega = |x: u64| (x * x - 1) / 8 % 2;
    let e = eps(u) * eps(w) + (al.rem_euclid(2) as u64) * omega(w) + (be.rem_euclid(2) as u64) * omega(u);
    Sign::from_parity(e % 2 == 1)
}

/// Symbol of two square classes of the same local field.
pub fn hilbert_from_classes(field: &LocalField, a: &SquareClass, b: &SquareClass) -> Result<Sign> {
    match (a, b) {
        (SquareClass::Real { positive: pa }, SquareClass::Real { positive: pb }) => Ok(Sign::from_parity(!pa && !pb)),
        (SquareClass::Finite { valuation: al, unit: u }, SquareClass::Finite { valuation: be, unit: w }) => {
            let p = field.prime().unwrap();
            if p == 2 {
                if field.degree() > 1 {
                    if is_square_class(field, a).unwrap_or(false) || is_square_class(field, b).unwrap_or(false) {
                        return Ok(Sign::Plus);
                    }
                    return Err(Error::Unsupported("Hilbert symbol in a dyadic extension".into()));
                }
                return Ok(dyadic(*al, u[0], *be, w[0]));
            }
            let kf = field.residue_field().unwrap();
            let q = kf.size();
            let twist = al * be % 2 != 0 && (&q % 4u32) == 3u32.into();
            let chi = |x: &Vec<u64>| !kf.is_square(&crate::fpoly::trim(x.clone()));
            let odd = twist ^ (be % 2 != 0 && chi(u)) ^ (al % 2 != 0 && chi(w));
            Ok(Sign::from_parity(odd))
        }
        _ => invalid("square classes of different kinds"),
    }
}

/// `(a, b)` for two elements of the same local field.
pub fn hilbert_symbol_ext(a: &LocalElement, b: &LocalElement) -> Result<Sign> {
    if a.field != b.field {
        return invalid(format!("mixed fields {} and {}", a.field, b.field));
    }
    if a.is_zero() || b.is_zero() {
        return invalid("Hilbert symbol of zero");
    }
    hilbert_from_classes(&a.field, &a.square_class()?, &b.square_class()?)
}

/// Decides whether `y^2 - a z^2 = c` has a point over `Q_v` by searching
/// primitive solutions of `x0^2 - a x1^2 - c x2^2 = 0` modulo `p^effort`.
/// A solution is accepted only with a Hensel certificate
/// `v(Q) > 2 v(dQ/dx_i)`; no solution at all modulo `p^effort` proves
/// insolubility.
pub fn conic_oracle(a: &Rational, c: &Rational, v: Place, effort: u32) -> Result<bool> {
    if a.is_zero() || c.is_zero() {
        return invalid("conic coefficients must be nonzero");
    }
    let p = match v {
        Place::Infinite => return Ok(a.is_positive() || c.is_positive()),
        Place::Finite(p) => p,
    };
    if effort == 0 {
        return Err(Error::EffortExhausted(effort));
    }
    let m_big = pow_u64(p, effort);
    let m = m_big.to_u128().filter(|m| *m <= 1 << 13).ok_or(Error::EffortExhausted(effort))?;
    // Dividing out even powers of p keeps each coefficient of valuation 0 or 1.
    let reduce = |q: &Rational| -> u128 {
        let (val, u) = split_rat(q, p);
        let r = rat_mod(&u, &m_big) * pow_u64(p, val.rem_euclid(2) as u32);
        r.mod_floor(&m_big).to_u128().unwrap()
    };
    let ra = reduce(a);
    let rc = reduce(c);
    // Square roots modulo p^effort, grouped by square.
    let mut roots: HashMap<u128, Vec<u128>> = HashMap::new();
    for x in 0..m {
        roots.entry(x * x % m).or_default().push(x);
    }
    let pv = |x: u128| -> u32 {
        if x == 0 {
            return effort;
        }
        let mut x = x;
        let mut k = 0;
        while x.is_multiple_of(p as u128) && k < effort {
            x /= p as u128;
            k += 1;
        }
        k
    };
    let p128 = p as u128;
    let mut any_primitive = false;
    for x1 in 0..m {
        for x2 in 0..m {
            let t = (ra * (x1 * x1 % m) % m + rc * (x2 * x2 % m) % m) % m;
            let Some(cands) = roots.get(&t) else { continue };
            for &x0 in cands {
                if x0 % p128 == 0 && x1 % p128 == 0 && x2 % p128 == 0 {
                    continue;
                }
                any_primitive = true;
                // All partial derivatives, valuation at least effort means unknown.
                let d0 = pv(2 * x0 % m);
                let d1 = pv(2 * ra % m * x1 % m);
                let d2 = pv(2 * rc % m * x2 % m);
                if 2 * d0.min(d1).min(d2) < effort {
                    return Ok(true);
                }
            }
        }
    }
    if any_primitive {
        Err(Error::EffortExhausted(effort))
    } else {
        Ok(false)
    }
}

/// Runs [`conic_oracle`] with increasing effort until it decides.
pub fn conic_decide(a: &Rational, c: &Rational, v: Place, max_effort: u32) -> Result<bool> {
    let mut last = Error::EffortExhausted(0);
    for effort in 1..=max_effort {
        match conic_oracle(a, c, v, effort) {
            Err(e @ Error::EffortExhausted(_)) => last = e,
            other => return other,
        }
    }
    Err(last)
}

/// The smallest integer `x`, ordered by absolute value then sign, with
/// `(a, x)_v = target`; with `want_unit` it must also be a unit at finite `v`.
pub fn sample_with_symbol(a: &Rational, v: Place, target: Sign, want_unit: bool) -> Result<Rational> {
    if a.is_zero() {
        return invalid("sampling needs a nonzero a");
    }
    if target == Sign::Minus && is_square(&embed_rational(a, &v.completion(), 3))? {
        return Err(Error::Unsatisfiable(format!("{a} is a square at {v}")));
    }
    let bound: i64 = match v {
        Place::Infinite => 1,
        Place::Finite(p) => 16 * p as i64 + 16,
    };
    for n in 1..=bound {
        if want_unit {
            if let Some(p) = v.prime() {
                if (n as u64).is_multiple_of(p) {
                    continue;
                }
            }
        }
        for x in [n, -n] {
            let x = Rational::from_integer(x.into());
            if hilbert_symbol(a, &x, v)? == target {
                return Ok(x);
            }
        }
    }
    Err(Error::Unsatisfiable(format!(
        "no {} with symbol {target} against {a} at {v}",
        if want_unit { "unit" } else { "integer" }
    )))
}

/// Places where `(a, b)_v` can be nontrivial: infinity and primes dividing `2ab`.
pub fn symbol_support(a: &Rational, b: &Rational) -> Result<Vec<Place>> {
    let mut primes = vec![2u64];
    primes.extend(arith::rational_primes(a)?);
    primes.extend(arith::rational_primes(b)?);
    primes.sort_unstable();
    primes.dedup();
    let mut out = vec![Place::Infinite];
    out.extend(primes.into_iter().map(Place::Finite));
    Ok(out)
}

/// Product of `(a, b)_v` over all places.
pub fn symbol_product(a: &Rational, b: &Rational) -> Result<Sign> {
    let mut acc = Sign::Plus;
    for v in symbol_support(a, b)? {
        acc = acc * hilbert_symbol(a, b, v)?;
    }
    Ok(acc)
}
