//! Exact rationals and univariate polynomials over Q.
//!
//! Polynomials store coefficients lowest degree first with no trailing zeros,
//! so the zero polynomial is the empty vector.
//!
//! The discriminant follows `disc(f) = (-1)^(n(n-1)/2) * res(f, f') / lc(f)`,
//! which gives `b^2 - 4ac` for quadratics.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().or_else(|_| invalid(format!("bad rational {s:?}")))?;
    let d: BigInt = d.parse().or_else(|_| invalid(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return invalid(format!("zero denominator in {s:?}"));
    }
    Ok(Rational::new(n, d))
}

/// Formats a rational as `"num/den"`.
pub fn fmt_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

/// Endpoint of a real interval: a rational or one of the two infinities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&n| rat(n)).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: vec![] }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c * x^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * rat(i as i64)).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().recip())
    }

    /// `x^n f(1/x)` with `n` the given formal degree (at least `deg f`).
    pub fn reversed(&self, n: usize) -> Self {
        let mut v = vec![Rational::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[n - i] = c.clone();
        }
        Self::new(v)
    }

    /// `f(x + c)`.
    pub fn shift(&self, c: &Rational) -> Self {
        let mut out = RatPoly::zero();
        let lin = RatPoly::new(vec![c.clone(), Rational::one()]);
        for a in self.coeffs.iter().rev() {
            out = &(&out * &lin) + &RatPoly::constant(a.clone());
        }
        out
    }

    /// `f(c x)`.
    pub fn scale_var(&self, c: &Rational) -> Self {
        let mut pw = Rational::one();
        let mut v = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            v.push(a * &pw);
            pw *= c;
        }
        Self::new(v)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = RatPoly::constant(Rational::one());
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.deg();
        let lc_inv = d.lc().recip();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (RatPoly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &lc_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (RatPoly::new(q), RatPoly::new(r))
    }

    pub fn rem(&self, d: &RatPoly) -> RatPoly {
        self.div_rem(d).1
    }

    /// Exact quotient; panics if `d` does not divide `self`.
    pub fn exact_div(&self, d: &RatPoly) -> RatPoly {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, f: &RatPoly) -> bool {
        f.rem(self).is_zero()
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `f / gcd(f, f')`, made monic.
    pub fn squarefree_part(&self) -> RatPoly {
        if self.deg() == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).monic()
    }

    /// Positive rational multiple with coprime integer coefficients.
    pub fn primitive(&self) -> RatPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> =
            self.coeffs.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
        let mut g = BigInt::zero();
        for n in &ints {
            g = g.gcd(n);
        }
        RatPoly::new(ints.into_iter().map(|n| Rational::new(n, g.clone())).collect())
    }

    /// Sign of `f` at a bound, infinities read from the leading term.
    pub fn sign_at(&self, b: &Bound) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let lc = sgn(&self.lc());
        match b {
            Bound::Finite(x) => sgn(&self.eval(x)),
            Bound::PosInf => lc,
            Bound::NegInf => {
                if self.deg().is_multiple_of(2) {
                    lc
                } else {
                    -lc
                }
            }
        }
    }
}

pub fn sgn(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}x", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}x^{i}", if show_coeff { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, o: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, o: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly::zero();
        }
        let mut v = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        RatPoly::new(v)
    }
}

/// Determinant over Q by Gaussian elimination.
pub fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &p;
            for c in col..n {
                let t = &factor * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    det
}

/// Sylvester matrix determinant for coefficient vectors of formal degrees
/// `f.len() - 1` and `g.len() - 1`; leading entries may vanish.
pub fn sylvester_det(f: &[Rational], g: &[Rational]) -> Rational {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return Rational::one();
    }
    let mut mat = vec![vec![Rational::zero(); size]; size];
    for i in 0..n {
        for (j, c) in f.iter().rev().enumerate() {
            mat[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in g.iter().rev().enumerate() {
            mat[n + i][i + j] = c.clone();
        }
    }
    determinant(mat)
}

/// Sylvester resultant; zero iff `f` and `g` share a complex root.
pub fn resultant(f: &RatPoly, g: &RatPoly) -> Result<Rational> {
    if f.is_zero() && g.is_zero() {
        return invalid("resultant of two zero polynomials");
    }
    if f.is_zero() || g.is_zero() {
        return Ok(Rational::zero());
    }
    Ok(sylvester_det(f.coeffs(), g.coeffs()))
}

pub fn discriminant(f: &RatPoly) -> Result<Rational> {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return invalid("discriminant of a constant polynomial"),
    };
    let r = resultant(f, &f.derivative())?;
    let d = r / f.lc();
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -d } else { d })
}

/// Sturm sequence with each term replaced by its primitive part.
pub fn sturm_sequence(f: &RatPoly) -> Vec<RatPoly> {
    let mut seq = vec![f.primitive()];
    let d = f.derivative();
    if d.is_zero() {
        return seq;
    }
    seq.push(d.primitive());
    loop {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push((-&r).primitive());
    }
    seq
}

fn variations(seq: &[RatPoly], b: &Bound) -> usize {
    let mut count = 0;
    let mut last = 0;
    for p in seq {
        let s = p.sign_at(b);
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots in `(lo, hi]` for squarefree `f`.
pub fn real_root_count(f: &RatPoly, lo: &Bound, hi: &Bound) -> Result<usize> {
    if f.is_zero() {
        return invalid("root count of the zero polynomial");
    }
    let seq = sturm_sequence(f);
    Ok(count_with(&seq, lo, hi))
}

fn count_with(seq: &[RatPoly], lo: &Bound, hi: &Bound) -> usize {
    variations(seq, lo).saturating_sub(variations(seq, hi))
}

/// Whether `f(x) >= 0` for some real `x`.
pub fn exists_nonneg_value(f: &RatPoly) -> bool {
    if f.is_zero() {
        return true;
    }
    let sf = f.squarefree_part();
    if sf.deg() > 0 && count_with(&sturm_sequence(&sf), &Bound::NegInf, &Bound::PosInf) > 0 {
        return true;
    }
    sgn(&f.eval(&Rational::zero())) > 0
}

/// Cauchy bound: every real root lies in `(-B, B)`.
pub fn root_bound(f: &RatPoly) -> Rational {
    let lc = f.lc().abs();
    let m = f.coeffs()[..f.deg()].iter().map(|c| c.abs()).max().unwrap_or_else(Rational::zero);
    m / lc + Rational::one()
}

/// Disjoint intervals `(lo, hi]` with rational endpoints, each holding exactly
/// one real root of the squarefree polynomial `f`, in increasing order and of
/// width at most `width`.
pub fn isolate_real_roots(f: &RatPoly, width: &Rational) -> Vec<(Rational, Rational)> {
    if f.deg() == 0 {
        return vec![];
    }
    let seq = sturm_sequence(f);
    let b = root_bound(f);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = count_with(&seq, &Bound::Finite(lo.clone()), &Bound::Finite(hi.clone()));
        if n == 0 {
            continue;
        }
        if n == 1 && &(&hi - &lo) <= width {
            out.push((lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / rat(2);
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Shrinks an isolating interval `(lo, hi]` of a root of squarefree `f` by bisection.
pub fn refine_root(f: &RatPoly, lo: &Rational, hi: &Rational, width: &Rational) -> (Rational, Rational) {
    let seq = sturm_sequence(f);
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / rat(2);
        if count_with(&seq, &Bound::Finite(lo.clone()), &Bound::Finite(mid.clone())) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Rational points strictly inside each open interval cut out by the real
/// roots of the squarefree polynomial `f`, from left to right.
pub fn sample_points_between_roots(f: &RatPoly) -> Vec<Rational> {
    let mut iv = isolate_real_roots(f, &Rational::one());
    if iv.is_empty() {
        return vec![Rational::zero()];
    }
    let mut pts = vec![&iv[0].0 - rat(1)];
    for i in 0..iv.len() - 1 {
        let c = iv[i].1.clone();
        if !f.eval(&c).is_zero() {
            pts.push(c);
            continue;
        }
        // The left root sits exactly at `c`; pull the next interval off it.
        let mut w = &iv[i + 1].1 - &iv[i + 1].0;
        while iv[i + 1].0 <= c {
            w /= rat(2);
            iv[i + 1] = refine_root(f, &iv[i + 1].0, &iv[i + 1].1, &w);
        }
        pts.push(iv[i + 1].0.clone());
    }
    pts.push(&iv[iv.len() - 1].1 + rat(1));
    pts
}
