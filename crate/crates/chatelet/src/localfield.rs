//! Certified finite-precision models of R, Q_p and unramified extensions of Q_p.
//!
//! A finite element is `p^v * u` with `u` a unit known modulo `p^N`.  In an
//! unramified extension of degree `n` the unit is a vector of `n` residues in
//! the basis `1, t, ..., t^(n-1)` of `Z_p[t]/(g)` for a monic `g` that is
//! irreducible modulo `p`.  For the quadratic case `g = t^2 - d` with `d` the
//! smallest positive nonresidue.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, pow_u64, rat_mod, split_rat, val_int, val_rat};
use crate::error::{invalid, Error, Result};
use crate::fpoly::{self, ExtField, FpPoly};
use crate::ratpoly::{sgn, RatPoly, Rational};

/// Starting precision for certified computations.
pub const DEFAULT_PRECISION: u32 = 6;
/// Hard cap on p-adic precision; exceeding it is an error.
pub const PRECISION_CAP: u32 = 256;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalField {
    Real,
    Padic {
        p: u64,
    },
    /// `Q_p(t)` with `t^2 = d`, `d` a nonresidue mod the odd prime `p`.
    UnramQuad {
        p: u64,
        d: u64,
    },
    /// Unramified extension of degree at least 3, `modulus` monic and
    /// irreducible mod `p`, coefficients lowest degree first.
    Unram {
        p: u64,
        modulus: Vec<u64>,
    },
}

impl LocalField {
    pub fn padic(p: u64) -> Result<Self> {
        if !arith::is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        Ok(LocalField::Padic { p })
    }

    /// The unramified quadratic extension of `Q_p`, `p` odd.
    pub fn unram_quad(p: u64) -> Result<Self> {
        if p == 2 || !arith::is_prime(p) {
            return invalid(format!("unramified quadratic model needs an odd prime, got {p}"));
        }
        Ok(LocalField::UnramQuad { p, d: arith::smallest_nonresidue(p) })
    }

    /// The unramified extension of `Q_p` of degree `n`.
    pub fn unramified(p: u64, n: usize) -> Result<Self> {
        match n {
            0 => invalid("degree must be positive"),
            1 => Self::padic(p),
            2 if p != 2 => Self::unram_quad(p),
            _ => {
                if !arith::is_prime(p) {
                    return invalid(format!("{p} is not prime"));
                }
                Ok(LocalField::Unram { p, modulus: fpoly::smallest_irreducible(n, p) })
            }
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            LocalField::Real => None,
            LocalField::Padic { p } | LocalField::UnramQuad { p, .. } | LocalField::Unram { p, .. } => Some(*p),
        }
    }

    /// Residue degree over `Q_p` (1 for the reals).
    pub fn degree(&self) -> usize {
        match self {
            LocalField::Real | LocalField::Padic { .. } => 1,
            LocalField::UnramQuad { .. } => 2,
            LocalField::Unram { modulus, .. } => modulus.len() - 1,
        }
    }

    /// Monic integer modulus defining the ring of integers over `Z_p`.
    pub fn modulus(&self) -> Vec<BigInt> {
        match self {
            LocalField::Real | LocalField::Padic { .. } => vec![BigInt::zero(), BigInt::one()],
            LocalField::UnramQuad { d, .. } => vec![-BigInt::from(*d), BigInt::zero(), BigInt::one()],
            LocalField::Unram { modulus, .. } => modulus.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn residue_field(&self) -> Option<ExtField> {
        let p = self.prime()?;
        let modulus = match self {
            LocalField::Padic { .. } => vec![0, 1],
            LocalField::UnramQuad { d, .. } => vec![(p - d % p) % p, 0, 1],
            LocalField::Unram { modulus, .. } => modulus.clone(),
            LocalField::Real => unreachable!(),
        };
        Some(ExtField { p, modulus })
    }

    /// Number of unit digits that determine a square class: 3 at p = 2, else 1.
    pub fn square_digits(&self) -> u32 {
        if self.prime() == Some(2) {
            3
        } else {
            1
        }
    }

    pub fn is_dyadic_extension(&self) -> bool {
        self.prime() == Some(2) && self.degree() > 1
    }

    pub(crate) fn ring(&self) -> ResRing {
        ResRing { p: self.prime().expect("finite field"), modulus: self.modulus() }
    }
}

impl std::fmt::Display for LocalField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LocalField::Real => write!(f, "R"),
            LocalField::Padic { p } => write!(f, "Q_{p}"),
            LocalField::UnramQuad { p, d } => write!(f, "Q_{p}(sqrt {d})"),
            LocalField::Unram { p, modulus } => write!(f, "Q_{p}[t]/{modulus:?}"),
        }
    }
}

/// Arithmetic in `Z_p[t]/(g)` modulo `p^k`, elements as coefficient vectors.
#[derive(Clone, Debug)]
pub(crate) struct ResRing {
    pub p: u64,
    pub modulus: Vec<BigInt>,
}

impl ResRing {
    pub fn n(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn reduce(&self, v: &[BigInt], k: u32) -> Vec<BigInt> {
        let m = pow_u64(self.p, k);
        let mut out: Vec<BigInt> = v.iter().map(|c| c.mod_floor(&m)).collect();
        out.resize(self.n(), BigInt::zero());
        out
    }

    pub fn one(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.n()];
        v[0] = BigInt::one();
        v
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt], k: u32) -> Vec<BigInt> {
        let v: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.reduce(&v, k)
    }

    pub fn sub(&self, a: &[BigInt], b: &[BigInt], k: u32) -> Vec<BigInt> {
        let v: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.reduce(&v, k)
    }

    /// Reduces a long coefficient vector modulo the monic modulus.
    fn fold(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        let n = self.n();
        while v.len() > n {
            let c = v.pop().unwrap();
            if c.is_zero() {
                continue;
            }
            let base = v.len() - n;
            for (j, g) in self.modulus[..n].iter().enumerate() {
                v[base + j] -= &c * g;
            }
        }
        v.resize(n, BigInt::zero());
        v
    }

    pub fn mul(&self, a: &[BigInt], b: &[BigInt], k: u32) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                v[i + j] += x * y;
            }
        }
        self.reduce(&self.fold(v), k)
    }

    pub fn scale(&self, a: &[BigInt], c: &BigInt, k: u32) -> Vec<BigInt> {
        let v: Vec<BigInt> = a.iter().map(|x| x * c).collect();
        self.reduce(&v, k)
    }

    /// Minimum p-adic valuation of the coordinates; `None` when all vanish mod `p^k`.
    pub fn val(&self, a: &[BigInt], k: u32) -> Option<u32> {
        let m = pow_u64(self.p, k);
        a.iter().filter(|c| !c.mod_floor(&m).is_zero()).map(|c| val_int(c, self.p).min(k)).min()
    }

    pub fn div_p_pow(&self, a: &[BigInt], e: u32) -> Vec<BigInt> {
        let d = pow_u64(self.p, e);
        a.iter().map(|c| c / &d).collect()
    }

    pub fn to_fp(&self, a: &[BigInt]) -> FpPoly {
        fpoly::from_ints(a, self.p)
    }

    fn from_fp(&self, a: &FpPoly) -> Vec<BigInt> {
        let mut v: Vec<BigInt> = a.iter().map(|&c| BigInt::from(c)).collect();
        v.resize(self.n(), BigInt::zero());
        v
    }

    fn residue_field(&self) -> ExtField {
        ExtField { p: self.p, modulus: self.to_fp(&self.modulus) }
    }

    /// Inverse of a unit modulo `p^k` by Newton iteration from the residue field.
    pub fn inv(&self, a: &[BigInt], k: u32) -> Vec<BigInt> {
        let kf = self.residue_field();
        let mut y = self.from_fp(&kf.inv(&self.to_fp(a)));
        let mut prec = 1;
        let two = BigInt::from(2);
        while prec < k {
            prec = (2 * prec).min(k);
            let ay = self.mul(a, &y, prec);
            let corr = self.sub(&self.scale(&self.one(), &two, prec), &ay, prec);
            y = self.mul(&y, &corr, prec);
        }
        self.reduce(&y, k)
    }

    /// Evaluates an integer polynomial at `x` modulo `p^k`.
    pub fn eval_int_poly(&self, f: &[BigInt], x: &[BigInt], k: u32) -> Vec<BigInt> {
        let mut acc = vec![BigInt::zero(); self.n()];
        for c in f.iter().rev() {
            acc = self.mul(&acc, x, k);
            acc[0] += c;
            acc = self.reduce(&acc, k);
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalValue {
    /// Zero, exactly (`None`) or known only modulo `p^abs_precision`.
    Zero {
        abs_precision: Option<i64>,
    },
    Finite {
        valuation: i64,
        unit: Vec<BigInt>,
        precision: u32,
    },
    /// A real number in the closed interval `[lo, hi]`.
    Real {
        lo: Rational,
        hi: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalElement {
    pub field: LocalField,
    pub value: LocalValue,
}

/// Valuation and leading unit digits, which fix the class modulo squares.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SquareClass {
    Real { positive: bool },
    Finite { valuation: i64, unit: Vec<u64> },
}

impl LocalElement {
    pub fn zero(field: &LocalField) -> Self {
        LocalElement { field: field.clone(), value: LocalValue::Zero { abs_precision: None } }
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            LocalValue::Zero { .. } => true,
            LocalValue::Real { lo, hi } => lo.is_zero() && hi.is_zero(),
            _ => false,
        }
    }

    pub fn valuation(&self) -> Option<i64> {
        match &self.value {
            LocalValue::Finite { valuation, .. } => Some(*valuation),
            _ => None,
        }
    }

    pub fn unit(&self) -> Option<&[BigInt]> {
        match &self.value {
            LocalValue::Finite { unit, .. } => Some(unit),
            _ => None,
        }
    }

    pub fn precision(&self) -> Option<u32> {
        match &self.value {
            LocalValue::Finite { precision, .. } => Some(*precision),
            _ => None,
        }
    }

    /// Absolute precision: the element is known modulo `p^abs`. `None` if exact.
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.value {
            LocalValue::Zero { abs_precision } => *abs_precision,
            LocalValue::Finite { valuation, precision, .. } => Some(valuation + *precision as i64),
            LocalValue::Real { .. } => None,
        }
    }

    /// Builds an element from a residue vector known modulo `p^abs`, scaled by `p^shift`.
    pub(crate) fn from_residue(field: &LocalField, r: &[BigInt], abs: u32, shift: i64) -> Self {
        let ring = field.ring();
        match ring.val(r, abs) {
            None => LocalElement {
                field: field.clone(),
                value: LocalValue::Zero { abs_precision: Some(abs as i64 + shift) },
            },
            Some(v) => {
                let prec = abs - v;
                let unit = ring.reduce(&ring.div_p_pow(&ring.reduce(r, abs), v), prec);
                LocalElement {
                    field: field.clone(),
                    value: LocalValue::Finite { valuation: v as i64 + shift, unit, precision: prec },
                }
            }
        }
    }

    /// Sign of a real element when its interval excludes zero.
    pub fn real_sign(&self) -> Option<i32> {
        match &self.value {
            LocalValue::Real { lo, hi } => {
                if lo.is_positive() {
                    Some(1)
                } else if hi.is_negative() {
                    Some(-1)
                } else if lo.is_zero() && hi.is_zero() {
                    Some(0)
                } else {
                    None
                }
            }
            LocalValue::Zero { .. } => Some(0),
            LocalValue::Finite { .. } => None,
        }
    }

    fn same_field(&self, o: &Self) -> Result<()> {
        if self.field != o.field {
            return invalid(format!("elements of different fields {} and {}", self.field, o.field));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        let value = match &self.value {
            LocalValue::Zero { .. } => self.value.clone(),
            LocalValue::Real { lo, hi } => LocalValue::Real { lo: -hi, hi: -lo },
            LocalValue::Finite { valuation, unit, precision } => {
                let ring = self.field.ring();
                let neg: Vec<BigInt> = unit.iter().map(|c| -c).collect();
                LocalValue::Finite { valuation: *valuation, unit: ring.reduce(&neg, *precision), precision: *precision }
            }
        };
        LocalElement { field: self.field.clone(), value }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        let value = match (&self.value, &o.value) {
            (LocalValue::Real { lo: a, hi: b }, LocalValue::Real { lo: c, hi: d }) => {
                let prods = [a * c, a * d, b * c, b * d];
                LocalValue::Real { lo: prods.iter().min().unwrap().clone(), hi: prods.iter().max().unwrap().clone() }
            }
            (LocalValue::Zero { abs_precision }, other) | (other, LocalValue::Zero { abs_precision }) => {
                let shift = match other {
                    LocalValue::Finite { valuation, .. } => Some(*valuation),
                    LocalValue::Zero { abs_precision: Some(a) } => Some(*a),
                    _ => None,
                };
                match (abs_precision, shift) {
                    (Some(a), Some(s)) => LocalValue::Zero { abs_precision: Some(a + s) },
                    (None, _) => LocalValue::Zero { abs_precision: None },
                    (Some(_), None) => LocalValue::Zero { abs_precision: *abs_precision },
                }
            }
            (
                LocalValue::Finite { valuation: v1, unit: u1, precision: n1 },
                LocalValue::Finite { valuation: v2, unit: u2, precision: n2 },
            ) => {
                let n = (*n1).min(*n2);
                LocalValue::Finite { valuation: v1 + v2, unit: self.field.ring().mul(u1, u2, n), precision: n }
            }
            _ => return invalid("mixed real and p-adic operands"),
        };
        Ok(LocalElement { field: self.field.clone(), value })
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        match (&self.value, &o.value) {
            (LocalValue::Real { lo: a, hi: b }, LocalValue::Real { lo: c, hi: d }) => {
                Ok(LocalElement { field: self.field.clone(), value: LocalValue::Real { lo: a + c, hi: b + d } })
            }
            (LocalValue::Zero { abs_precision: None }, _) => Ok(o.clone()),
            (_, LocalValue::Zero { abs_precision: None }) => Ok(self.clone()),
            _ => {
                let a1 = self.abs_precision().unwrap();
                let a2 = o.abs_precision().unwrap();
                let abs = a1.min(a2);
                let vmin = [self.valuation(), o.valuation()].into_iter().flatten().min().unwrap_or(abs).min(abs);
                let ring = self.field.ring();
                let width = (abs - vmin) as u32;
                let mut acc = vec![BigInt::zero(); ring.n()];
                for x in [self, o] {
                    if let LocalValue::Finite { valuation, unit, .. } = &x.value {
                        let sh = pow_u64(ring.p, (*valuation - vmin) as u32);
                        acc = ring.add(&acc, &ring.scale(unit, &sh, width), width);
                    }
                }
                Ok(Self::from_residue(&self.field, &acc, width, vmin))
            }
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.value {
            LocalValue::Zero { .. } => invalid("inverse of zero"),
            LocalValue::Real { lo, hi } => {
                if lo.is_positive() || hi.is_negative() {
                    Ok(LocalElement {
                        field: self.field.clone(),
                        value: LocalValue::Real { lo: hi.recip(), hi: lo.recip() },
                    })
                } else {
                    invalid("real interval contains zero")
                }
            }
            LocalValue::Finite { valuation, unit, precision } => Ok(LocalElement {
                field: self.field.clone(),
                value: LocalValue::Finite {
                    valuation: -valuation,
                    unit: self.field.ring().inv(unit, *precision),
                    precision: *precision,
                },
            }),
        }
    }

    /// Valuation and unit digits modulo `p^m` (`m` = 3 at 2, else 1), or the sign.
    pub fn square_class(&self) -> Result<SquareClass> {
        match &self.value {
            LocalValue::Zero { .. } => invalid("square class of zero"),
            LocalValue::Real { .. } => match self.real_sign() {
                Some(s) if s != 0 => Ok(SquareClass::Real { positive: s > 0 }),
                _ => Err(Error::InsufficientPrecision { needed: 1, have: 0 }),
            },
            LocalValue::Finite { valuation, unit, precision } => {
                let m = self.field.square_digits();
                if *precision < m {
                    return Err(Error::InsufficientPrecision { needed: m, have: *precision });
                }
                let ring = self.field.ring();
                let r = ring.reduce(unit, m);
                Ok(SquareClass::Finite { valuation: *valuation, unit: r.iter().map(|c| c.to_u64().unwrap()).collect() })
            }
        }
    }
}

/// Embeds an exact element `sum c_i t^i` of `Q(t)` into a finite local field;
/// the unit is returned modulo `p^n`.
pub fn embed_exact(coords: &[Rational], field: &LocalField, n: u32) -> LocalElement {
    let p = field.prime().expect("finite local field");
    let nonzero: Vec<&Rational> = coords.iter().filter(|c| !c.is_zero()).collect();
    if nonzero.is_empty() {
        return LocalElement::zero(field);
    }
    let v = nonzero.iter().map(|c| val_rat(c, p)).min().unwrap();
    let m = pow_u64(p, n);
    let scale = Rational::from_integer(pow_u64(p, v.unsigned_abs() as u32));
    let mut unit: Vec<BigInt> = coords
        .iter()
        .map(|c| {
            let u = if v >= 0 { c / &scale } else { c * &scale };
            rat_mod(&u, &m)
        })
        .collect();
    unit.resize(field.degree(), BigInt::zero());
    LocalElement { field: field.clone(), value: LocalValue::Finite { valuation: v, unit, precision: n } }
}

/// Image of a rational in a local field with `n` digits of unit precision.
pub fn embed_rational(q: &Rational, field: &LocalField, n: u32) -> LocalElement {
    match field {
        LocalField::Real => {
            if q.is_zero() {
                LocalElement::zero(field)
            } else {
                LocalElement { field: field.clone(), value: LocalValue::Real { lo: q.clone(), hi: q.clone() } }
            }
        }
        _ => embed_exact(std::slice::from_ref(q), field, n),
    }
}

/// Whether a nonzero element is a square in its field.
pub fn is_square(x: &LocalElement) -> Result<bool> {
    if x.is_zero() {
        return invalid("square test of zero");
    }
    let class = x.square_class()?;
    is_square_class(&x.field, &class)
}

pub fn is_square_class(field: &LocalField, class: &SquareClass) -> Result<bool> {
    match class {
        SquareClass::Real { positive } => Ok(*positive),
        SquareClass::Finite { valuation, unit } => {
            let p = field.prime().unwrap();
            if p == 2 {
                // Base-field shortcut: a square of Q_2 stays a square in any extension.
                let in_base = unit[1..].iter().all(|&c| c == 0);
                let q2_square = in_base && valuation % 2 == 0 && unit[0] % 8 == 1;
                if field.degree() == 1 || q2_square {
                    return Ok(q2_square);
                }
                return Err(Error::Unsupported("square test in a dyadic extension".into()));
            }
            if valuation % 2 != 0 {
                return Ok(false);
            }
            let kf = field.residue_field().unwrap();
            Ok(kf.is_square(&fpoly::trim(unit.clone())))
        }
    }
}

/// Root of `f` congruent to the integral element `x0`, to the absolute precision of `x0`.
pub fn hensel_lift_root(f: &RatPoly, x0: &LocalElement) -> Result<LocalElement> {
    let field = &x0.field;
    if field.prime().is_none() {
        return invalid("Hensel lifting needs a p-adic field");
    }
    if field.is_dyadic_extension() {
        return Err(Error::Unsupported("Hensel lifting in a dyadic extension".into()));
    }
    if f.deg() == 0 {
        return invalid("constant polynomial has no roots");
    }
    let target = x0.abs_precision().unwrap_or(DEFAULT_PRECISION as i64);
    if target < 1 {
        return invalid("starting point has no precision");
    }
    let ring = field.ring();
    let start = match &x0.value {
        LocalValue::Zero { .. } => vec![BigInt::zero(); ring.n()],
        LocalValue::Finite { valuation, unit, .. } => {
            if *valuation < 0 {
                return invalid("starting point must be integral");
            }
            ring.scale(unit, &pow_u64(ring.p, *valuation as u32), target as u32 + 1)
        }
        LocalValue::Real { .. } => unreachable!(),
    };
    let fi: Vec<BigInt> = f.primitive().coeffs().iter().map(|c| c.to_integer()).collect();
    let root = hensel_lift_vec(&ring, &fi, start, target as u32)?;
    Ok(LocalElement::from_residue(field, &root, target as u32, 0))
}

/// Newton iteration in `Z_p[t]/(g)`: returns the root congruent to `x0`
/// modulo `p^target`, or `CriterionFailed` when `v(f(x0)) <= 2 v(f'(x0))`.
pub(crate) fn hensel_lift_vec(ring: &ResRing, f: &[BigInt], x0: Vec<BigInt>, target: u32) -> Result<Vec<BigInt>> {
    let df: Vec<BigInt> = f.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    let probe = 2 * target + 16;
    let e = match ring.val(&ring.eval_int_poly(&df, &x0, probe), probe) {
        Some(e) if e < target + 8 => e,
        _ => return Err(Error::CriterionFailed),
    };
    let w = target + e + 1;
    let mut x = ring.reduce(&x0, w);
    let fx = ring.eval_int_poly(f, &x, w);
    match ring.val(&fx, w) {
        Some(v) if v <= 2 * e => return Err(Error::CriterionFailed),
        _ => {}
    }
    for _ in 0..64 {
        let fx = ring.eval_int_poly(f, &x, w);
        let v = ring.val(&fx, w).unwrap_or(w);
        if v >= target + e {
            return Ok(ring.reduce(&x, target));
        }
        let dfx = ring.eval_int_poly(&df, &x, w);
        let u = ring.div_p_pow(&dfx, e);
        let uinv = ring.inv(&u, w - e);
        let step = ring.mul(&ring.div_p_pow(&fx, e), &uinv, w - e);
        x = ring.sub(&x, &step, w);
    }
    Err(Error::PrecisionCapExceeded(w))
}

/// Outcome of [`stable_square_class`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stability {
    Stable(SquareClass),
    Unstable,
}

/// Square class of `f(x0)`, certified constant on the ball of `x0` at its
/// absolute precision `A = v(x0) + N`.  Stability requires
/// `v(f(x0)) < N - m` and `v(f(x0)) + m <= min_i (v(T_i) + i A)` where `T_i`
/// are the Taylor coefficients of `f` at `x0`.
pub fn stable_square_class(f: &RatPoly, x0: &LocalElement) -> Result<Stability> {
    let field = &x0.field;
    let p = match field.prime() {
        Some(p) => p,
        None => return invalid("square classes on balls need a p-adic field"),
    };
    let (coords, abs, n) = exact_representative(x0)?;
    let m = field.square_digits() as i64;
    // Taylor coefficients of f at the exact representative, in Q(t).
    let modulus: Vec<Rational> = field.modulus().into_iter().map(Rational::from_integer).collect();
    let taylor = taylor_in_extension(f, &coords, &modulus);
    let value = &taylor[0];
    if value.iter().all(|c| c.is_zero()) {
        return Ok(Stability::Unstable);
    }
    let vf = value.iter().filter(|c| !c.is_zero()).map(|c| val_rat(c, p)).min().unwrap();
    if vf >= n as i64 - m {
        return Ok(Stability::Unstable);
    }
    for (i, t) in taylor.iter().enumerate().skip(1) {
        if let Some(vt) = t.iter().filter(|c| !c.is_zero()).map(|c| val_rat(c, p)).min() {
            if vf + m > vt + i as i64 * abs {
                return Ok(Stability::Unstable);
            }
        }
    }
    let e = embed_exact(value, field, m as u32);
    Ok(Stability::Stable(e.square_class()?))
}

/// Exact coordinates of the residue representative of `x0`, its absolute
/// precision and its unit precision.
fn exact_representative(x0: &LocalElement) -> Result<(Vec<Rational>, i64, u32)> {
    let p = x0.field.prime().unwrap();
    match &x0.value {
        LocalValue::Zero { abs_precision } => {
            let abs = abs_precision.unwrap_or(PRECISION_CAP as i64);
            Ok((vec![Rational::zero(); x0.field.degree()], abs, abs.max(0) as u32))
        }
        LocalValue::Finite { valuation, unit, precision } => {
            let s = Rational::from_integer(pow_u64(p, valuation.unsigned_abs() as u32));
            let coords = unit
                .iter()
                .map(|c| {
                    let c = Rational::from_integer(c.clone());
                    if *valuation >= 0 {
                        c * &s
                    } else {
                        c / &s
                    }
                })
                .collect();
            Ok((coords, valuation + *precision as i64, *precision))
        }
        LocalValue::Real { .. } => invalid("real element"),
    }
}

/// Multiplies two elements of `Q[t]/(g)` given by coordinates.
pub(crate) fn mul_mod_modulus(a: &[Rational], b: &[Rational], g: &[Rational]) -> Vec<Rational> {
    let n = g.len() - 1;
    let mut v = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    while v.len() > n {
        let c = v.pop().unwrap();
        let base = v.len() - n;
        for (j, gc) in g[..n].iter().enumerate() {
            v[base + j] -= &c * gc;
        }
    }
    v.resize(n, Rational::zero());
    v
}

/// Taylor coefficients `f^(i)(x)/i!` at a point of `Q[t]/(g)`.
fn taylor_in_extension(f: &RatPoly, x: &[Rational], g: &[Rational]) -> Vec<Vec<Rational>> {
    let n = g.len() - 1;
    let d = f.deg();
    // Horner-style synthetic division repeated d+1 times.
    let mut coeffs: Vec<Vec<Rational>> = f
        .coeffs()
        .iter()
        .map(|c| {
            let mut v = vec![Rational::zero(); n];
            v[0] = c.clone();
            v
        })
        .collect();
    let mut out = Vec::with_capacity(d + 1);
    for _ in 0..=d {
        let mut acc = vec![Rational::zero(); n];
        let mut next = vec![vec![Rational::zero(); n]; coeffs.len().saturating_sub(1)];
        for k in (0..coeffs.len()).rev() {
            let prod = mul_mod_modulus(&acc, x, g);
            acc = prod.iter().zip(&coeffs[k]).map(|(a, b)| a + b).collect();
            if k > 0 {
                next[k - 1] = acc.clone();
            }
        }
        out.push(acc);
        coeffs = next;
    }
    out
}

/// Residue of the unit of a p-adic rational modulo `p`, for odd `p`.
pub fn unit_residue(q: &Rational, p: u64) -> u64 {
    let (_, u) = split_rat(q, p);
    rat_mod(&u, &BigInt::from(p)).to_u64().unwrap()
}

/// Sign of a nonzero rational as a real square class.
pub fn real_class(q: &Rational) -> SquareClass {
    SquareClass::Real { positive: sgn(q) > 0 }
}

/// `p^e` as a big unsigned integer.
pub fn p_pow(p: u64, e: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), e as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::{rat, ratio};

    fn qp(p: u64) -> LocalField {
        LocalField::padic(p).unwrap()
    }

    fn unit0(e: &LocalElement) -> BigInt {
        e.unit().unwrap()[0].clone()
    }

    #[test]
    fn embed_examples() {
        let e = embed_rational(&rat(377), &qp(13), 4);
        assert_eq!(e.valuation(), Some(1));
        assert_eq!(unit0(&e), BigInt::from(29));
        let e = embed_rational(&ratio(1, 73), &qp(73), 3);
        assert_eq!(e.valuation(), Some(-1));
        assert_eq!(unit0(&e), BigInt::from(1));
        let e = embed_rational(&rat(-15), &qp(2), 5);
        assert_eq!(e.valuation(), Some(0));
        assert_eq!(unit0(&e), BigInt::from(17));
    }

    #[test]
    fn square_examples() {
        assert!(is_square(&embed_rational(&rat(-15), &qp(2), 5)).unwrap());
        assert!(!is_square(&embed_rational(&rat(2), &qp(5), 3)).unwrap());
        assert!(is_square(&embed_rational(&rat(9), &qp(7), 3)).unwrap());
        assert!(!is_square(&embed_rational(&rat(-1), &LocalField::Real, 1)).unwrap());
        let low = embed_rational(&rat(-15), &qp(2), 2);
        assert_eq!(is_square(&low), Err(Error::InsufficientPrecision { needed: 3, have: 2 }));
    }

    #[test]
    fn unram_quad_uses_smallest_nonresidue() {
        assert_eq!(LocalField::unram_quad(3).unwrap(), LocalField::UnramQuad { p: 3, d: 2 });
        assert_eq!(LocalField::unram_quad(7).unwrap(), LocalField::UnramQuad { p: 7, d: 3 });
        assert!(LocalField::unram_quad(2).is_err());
        // Every element of Q_3 is a square in the quadratic extension when its valuation is even.
        let f = LocalField::unram_quad(3).unwrap();
        assert!(is_square(&embed_rational(&rat(2), &f, 2)).unwrap());
        assert!(!is_square(&embed_rational(&rat(3), &f, 2)).unwrap());
    }

    #[test]
    fn hensel_examples() {
        let f = RatPoly::from_ints(&[1, 0, 1]);
        let r = hensel_lift_root(&f, &embed_rational(&rat(2), &qp(5), 2)).unwrap();
        assert_eq!(unit0(&r), BigInt::from(7));
        let f = RatPoly::from_ints(&[-1, 0, 1]);
        let r = hensel_lift_root(&f, &embed_rational(&rat(1), &qp(7), 3)).unwrap();
        assert_eq!(unit0(&r), BigInt::from(1));
        let f = RatPoly::from_ints(&[-3, 0, 1]);
        let r = hensel_lift_root(&f, &embed_rational(&rat(5), &qp(11), 2)).unwrap();
        assert_eq!(unit0(&r), BigInt::from(27));
        let f = RatPoly::from_ints(&[-2, 0, 1]);
        assert_eq!(hensel_lift_root(&f, &embed_rational(&rat(1), &qp(5), 2)), Err(Error::CriterionFailed));
    }

    #[test]
    fn hensel_in_quadratic_extension() {
        // x^2 + 1 has no root in Q_3 but does in its unramified quadratic extension.
        let f = LocalField::unram_quad(3).unwrap();
        let start = embed_exact(&[rat(0), rat(1)], &f, 4);
        let poly = RatPoly::from_ints(&[1, 0, 1]);
        // t^2 = 2 = -1 mod 3, so t is a root modulo 3.
        let r = hensel_lift_root(&poly, &start).unwrap();
        let sq = r.mul(&r).unwrap().add(&embed_rational(&rat(1), &f, 4)).unwrap();
        assert!(sq.is_zero());
        assert_eq!(sq.abs_precision(), Some(4));
    }

    #[test]
    fn stable_class_examples() {
        let c = rat(878_755_181);
        let f = RatPoly::new(vec![-c.clone(), rat(0), rat(1)]);
        let x0 = embed_rational(&rat(0), &qp(13), 6);
        let x0 = LocalElement { value: LocalValue::Zero { abs_precision: Some(6) }, ..x0 };
        let expected = embed_rational(&-c, &qp(13), 1).square_class().unwrap();
        assert_eq!(stable_square_class(&f, &x0).unwrap(), Stability::Stable(expected));
        // x0 of valuation -2: the class of x0^2.
        let f = RatPoly::new(vec![rat(-5), rat(0), rat(1)]);
        let x0 = embed_rational(&ratio(3, 169), &qp(13), 6);
        match stable_square_class(&f, &x0).unwrap() {
            Stability::Stable(SquareClass::Finite { valuation, .. }) => assert_eq!(valuation, -4),
            other => panic!("unexpected {other:?}"),
        }
        // v(f(x0)) = N - 1 is unstable.
        let f = RatPoly::from_ints(&[-1, 1]);
        let x0 = embed_rational(&rat(1 + 13i64.pow(5)), &qp(13), 6);
        assert_eq!(stable_square_class(&f, &x0).unwrap(), Stability::Unstable);
    }

    #[test]
    fn arithmetic_tracks_precision() {
        let f = qp(5);
        let a = embed_rational(&rat(26), &f, 4);
        let b = embed_rational(&rat(-1), &f, 4);
        let s = a.add(&b).unwrap();
        assert_eq!(s.valuation(), Some(2));
        assert_eq!(s.precision(), Some(2));
        let inv = a.inv().unwrap();
        assert_eq!(inv.mul(&a).unwrap(), embed_rational(&rat(1), &f, 4));
    }
}
