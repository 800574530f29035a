//! Number fields `Q[t]/(f)`, prime splitting and embeddings into local fields.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, pow_u64, rat_mod};
use crate::error::{invalid, Error, Result};
use crate::fpoly::{self, ExtField, FpPoly};
use crate::hilbert::Place;
use crate::localfield::{hensel_lift_vec, LocalElement, LocalField, LocalValue, PRECISION_CAP};
use crate::ratpoly::{
    discriminant, isolate_real_roots, rat, real_root_count, refine_root, resultant, Bound, RatPoly, Rational,
};

/// How irreducibility of the defining polynomial was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    Linear,
    /// Irreducible modulo this prime, which does not divide the discriminant.
    ModPrime(u64),
    Unverified,
}

#[derive(Debug)]
struct FieldData {
    f: RatPoly,
    f_int: Vec<BigInt>,
    disc: Rational,
    irreducibility: Irreducibility,
}

/// `Q[t]/(f)` for a monic separable integer polynomial `f`.
#[derive(Clone, Debug)]
pub struct NumberField(Arc<FieldData>);

impl PartialEq for NumberField {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || self.0.f == o.0.f
    }
}
impl Eq for NumberField {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplittingType {
    Degrees(Vec<usize>),
    Ramified,
}

impl SplittingType {
    pub fn is_split(&self) -> bool {
        matches!(self, SplittingType::Degrees(d) if d.iter().all(|&x| x == 1))
    }
}

impl NumberField {
    pub fn new(f: RatPoly) -> Result<Self> {
        if f.deg() == 0 {
            return invalid("defining polynomial must have positive degree");
        }
        if !f.lc().is_one() || f.coeffs().iter().any(|c| !c.is_integer()) {
            return invalid(format!("defining polynomial {f} must be monic with integer coefficients"));
        }
        let disc = discriminant(&f)?;
        if disc.is_zero() {
            return invalid(format!("defining polynomial {f} is not separable"));
        }
        let f_int: Vec<BigInt> = f.coeffs().iter().map(|c| c.to_integer()).collect();
        let irreducibility = if f.deg() == 1 {
            Irreducibility::Linear
        } else {
            let mut cert = Irreducibility::Unverified;
            for p in (2..=100).filter(|&p| arith::is_prime(p)) {
                if (disc.numer() % BigInt::from(p)).is_zero() {
                    continue;
                }
                if fpoly::is_irreducible(&fpoly::from_ints(&f_int, p), p) {
                    cert = Irreducibility::ModPrime(p);
                    break;
                }
            }
            cert
        };
        Ok(NumberField(Arc::new(FieldData { f, f_int, disc, irreducibility })))
    }

    pub fn from_ints(c: &[i64]) -> Result<Self> {
        Self::new(RatPoly::from_ints(c))
    }

    /// Q itself, presented as `Q[t]/(t)`.
    pub fn rationals() -> Self {
        Self::from_ints(&[0, 1]).expect("t is a valid defining polynomial")
    }

    pub fn is_rationals(&self) -> bool {
        self.degree() == 1
    }

    pub fn poly(&self) -> &RatPoly {
        &self.0.f
    }

    pub fn degree(&self) -> usize {
        self.0.f.deg()
    }

    pub fn disc(&self) -> &Rational {
        &self.0.disc
    }

    pub fn irreducibility(&self) -> Irreducibility {
        self.0.irreducibility
    }

    pub fn elem(&self, coords: Vec<Rational>) -> NFElement {
        let n = self.degree();
        let reduced = RatPoly::new(coords).rem(&self.0.f);
        let mut coords = reduced.coeffs().to_vec();
        coords.resize(n, Rational::zero());
        NFElement { field: self.clone(), coords }
    }

    pub fn from_rational(&self, q: &Rational) -> NFElement {
        self.elem(vec![q.clone()])
    }

    pub fn from_int(&self, n: i64) -> NFElement {
        self.from_rational(&rat(n))
    }

    pub fn zero(&self) -> NFElement {
        self.from_int(0)
    }

    pub fn one(&self) -> NFElement {
        self.from_int(1)
    }

    /// The class of `t`.
    pub fn theta(&self) -> NFElement {
        self.elem(vec![Rational::zero(), Rational::one()])
    }

    /// Number of real and of complex places.
    pub fn signature(&self) -> (usize, usize) {
        let r = real_root_count(&self.0.f, &Bound::NegInf, &Bound::PosInf).unwrap_or(0);
        (r, (self.degree() - r) / 2)
    }

    /// Residue degrees of the factors of `f` mod `p`, ascending, or `Ramified` when `p | disc f`.
    pub fn splitting_type(&self, p: u64) -> SplittingType {
        if (self.0.disc.numer() % BigInt::from(p)).is_zero() {
            return SplittingType::Ramified;
        }
        let mut degs: Vec<usize> = self.factors_mod(p).iter().map(fpoly::deg).collect();
        degs.sort_unstable();
        SplittingType::Degrees(degs)
    }

    /// Monic irreducible factors of `f` mod `p`, sorted lexicographically by coefficient list.
    fn factors_mod(&self, p: u64) -> Vec<FpPoly> {
        let mut fs = fpoly::factor_squarefree(&fpoly::from_ints(&self.0.f_int, p), p);
        fs.sort();
        fs
    }

    /// The `count` smallest primes above `lower`, outside `avoid` and prime to
    /// `2 disc f`, at which `f` splits completely.
    pub fn find_split_primes(&self, count: usize, lower: u64, avoid: &[u64]) -> Result<Vec<u64>> {
        const CAP: u64 = 50_000_000;
        let mut out = Vec::with_capacity(count);
        let mut p = lower;
        while out.len() < count {
            p = arith::next_prime(p);
            if p > CAP {
                return Err(Error::SearchExhausted(p));
            }
            if p == 2 || avoid.contains(&p) {
                continue;
            }
            if self.splitting_type(p).is_split() {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// The places of this field above a place of Q.
    pub fn places_above(&self, v: Place) -> Result<Vec<PlaceOfL>> {
        match v {
            Place::Infinite => {
                let roots = isolate_real_roots(&self.0.f, &Rational::one());
                let mut out: Vec<PlaceOfL> = roots
                    .into_iter()
                    .enumerate()
                    .map(|(index, (lo, hi))| PlaceOfL {
                        under: v,
                        index,
                        kind: PlaceKind::Real { index, interval: (lo, hi) },
                    })
                    .collect();
                let r = out.len();
                for j in 0..(self.degree() - r) / 2 {
                    out.push(PlaceOfL { under: v, index: r + j, kind: PlaceKind::Complex { index: j } });
                }
                Ok(out)
            }
            Place::Finite(p) => {
                if self.splitting_type(p) == SplittingType::Ramified {
                    return Err(Error::UnsupportedPlace(format!("{p} divides the discriminant of {}", self.0.f)));
                }
                self.factors_mod(p)
                    .into_iter()
                    .enumerate()
                    .map(|(index, factor)| {
                        Ok(PlaceOfL {
                            under: v,
                            index,
                            kind: PlaceKind::Finite(Arc::new(LocalModel::new(self, p, factor)?)),
                        })
                    })
                    .collect()
            }
        }
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rationals() {
            write!(f, "Q")
        } else {
            write!(f, "Q[t]/({})", self.0.f)
        }
    }
}

/// An element `sum c_i t^i` of a number field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NFElement {
    pub field: NumberField,
    pub coords: Vec<Rational>,
}

impl NFElement {
    pub fn as_poly(&self) -> RatPoly {
        RatPoly::new(self.coords.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn to_rational(&self) -> Option<Rational> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    /// Norm to Q, `res(f, g)` for the representative `g`.
    pub fn norm(&self) -> Rational {
        if self.is_zero() {
            return Rational::zero();
        }
        let g = self.as_poly();
        if g.deg() == 0 {
            return num_traits::pow(g.lc(), self.field.degree());
        }
        resultant(self.field.poly(), &g).expect("nonzero operands")
    }

    pub fn inv(&self) -> Result<NFElement> {
        if self.is_zero() {
            return invalid("inverse of zero");
        }
        // Extended Euclid: s g + t f = gcd.
        let f = self.field.poly().clone();
        let (mut r0, mut r1) = (f, self.as_poly());
        let (mut s0, mut s1) = (RatPoly::zero(), RatPoly::constant(Rational::one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r0.deg() > 0 {
            return invalid(format!("{self} is a zero divisor; the defining polynomial is reducible"));
        }
        let c = r0.lc();
        Ok(self.field.elem(s0.scale(&c.recip()).coeffs().to_vec()))
    }

    pub fn pow(&self, e: u32) -> NFElement {
        let mut acc = self.field.one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, q: &Rational) -> NFElement {
        NFElement { field: self.field.clone(), coords: self.coords.iter().map(|c| c * q).collect() }
    }

    /// Primes dividing a denominator of a coordinate.
    pub fn denominator_primes(&self) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        for c in &self.coords {
            if !c.denom().is_one() {
                out.extend(arith::prime_divisors(c.denom())?);
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for NFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.to_rational() {
            return write!(f, "{q}");
        }
        write!(f, "{}", RatPoly::new(self.coords.clone()).to_string().replace('x', "t"))
    }
}

impl Add for &NFElement {
    type Output = NFElement;
    fn add(self, o: &NFElement) -> NFElement {
        assert_eq!(self.field, o.field, "elements of different fields");
        NFElement { field: self.field.clone(), coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &NFElement {
    type Output = NFElement;
    fn sub(self, o: &NFElement) -> NFElement {
        assert_eq!(self.field, o.field, "elements of different fields");
        NFElement { field: self.field.clone(), coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &NFElement {
    type Output = NFElement;
    fn neg(self) -> NFElement {
        NFElement { field: self.field.clone(), coords: self.coords.iter().map(|a| -a).collect() }
    }
}

impl Mul for &NFElement {
    type Output = NFElement;
    fn mul(self, o: &NFElement) -> NFElement {
        assert_eq!(self.field, o.field, "elements of different fields");
        if self.field.is_rationals() {
            return NFElement { field: self.field.clone(), coords: vec![&self.coords[0] * &o.coords[0]] };
        }
        self.field.elem((&self.as_poly() * &o.as_poly()).coeffs().to_vec())
    }
}

/// Value of a rational polynomial at a field element.
pub fn eval_at(f: &RatPoly, x: &NFElement) -> NFElement {
    let mut acc = x.field.zero();
    for c in f.coeffs().iter().rev() {
        acc = &acc * x;
        acc.coords[0] += c;
    }
    acc
}

/// Coefficients of `f(x + y)` as a polynomial in `y`, lowest degree first.
pub fn taylor_at(f: &RatPoly, x: &NFElement) -> Vec<NFElement> {
    let field = &x.field;
    let mut coeffs: Vec<NFElement> = f.coeffs().iter().map(|c| field.from_rational(c)).collect();
    let n = coeffs.len();
    // Repeated synthetic division by (y - x).
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = &coeffs[j + 1] * x;
            coeffs[j] = &coeffs[j] + &t;
        }
    }
    coeffs
}

#[derive(Clone, Debug)]
pub enum PlaceKind {
    /// Real embedding sending `t` to the root in the isolating interval `(lo, hi]`.
    Real {
        index: usize,
        interval: (Rational, Rational),
    },
    Complex {
        index: usize,
    },
    Finite(Arc<LocalModel>),
}

/// A place of a number field.
#[derive(Clone, Debug)]
pub struct PlaceOfL {
    pub under: Place,
    /// Rank among the places above `under`.
    pub index: usize,
    pub kind: PlaceKind,
}

impl PlaceOfL {
    pub fn residue_degree(&self) -> usize {
        match &self.kind {
            PlaceKind::Finite(m) => m.field.degree(),
            _ => 1,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            PlaceKind::Real { index, .. } => format!("inf.r{index}"),
            PlaceKind::Complex { index } => format!("inf.c{index}"),
            PlaceKind::Finite(m) => format!("{}.{}(f={})", self.under, self.index, m.field.degree()),
        }
    }

    pub fn local_field(&self) -> Option<&LocalField> {
        match &self.kind {
            PlaceKind::Finite(m) => Some(&m.field),
            PlaceKind::Real { .. } => Some(&LocalField::Real),
            PlaceKind::Complex { .. } => None,
        }
    }

    /// Image of `x` in the completion: a unit known to `n` digits at finite
    /// places, a sign-certifying interval at real places.
    pub fn embed(&self, x: &NFElement, n: u32) -> Result<LocalElement> {
        match &self.kind {
            PlaceKind::Finite(m) => m.embed(x, n),
            PlaceKind::Real { interval, .. } => embed_real(x, interval),
            PlaceKind::Complex { .. } => Err(Error::UnsupportedPlace("complex places have no square classes".into())),
        }
    }
}

impl fmt::Display for PlaceOfL {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Embedding of `x` at `t -> root in (lo, hi]`, refined until the sign is certain.
fn embed_real(x: &NFElement, interval: &(Rational, Rational)) -> Result<LocalElement> {
    let f = x.field.poly();
    let g = x.as_poly();
    let field = LocalField::Real;
    if g.is_zero() {
        return Ok(LocalElement::zero(&field));
    }
    if g.deg() == 0 {
        let c = g.lc();
        return Ok(LocalElement { field, value: LocalValue::Real { lo: c.clone(), hi: c } });
    }
    let (mut lo, mut hi) = interval.clone();
    let common = f.gcd(&g);
    if common.deg() > 0
        && real_root_count(&common.squarefree_part(), &Bound::Finite(lo.clone()), &Bound::Finite(hi.clone()))? > 0
    {
        return Ok(LocalElement::zero(&field));
    }
    let fs = f.squarefree_part();
    let mut width = &hi - &lo;
    for _ in 0..400 {
        let (a, b) = eval_interval(&g, &lo, &hi);
        if a.is_positive() || b.is_negative() {
            return Ok(LocalElement { field, value: LocalValue::Real { lo: a, hi: b } });
        }
        width /= rat(16);
        (lo, hi) = refine_root(&fs, &lo, &hi, &width);
    }
    Err(Error::PrecisionCapExceeded(400))
}

/// Interval enclosure of `g` on `[lo, hi]` by Horner's rule.
fn eval_interval(g: &RatPoly, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    let mut a = Rational::zero();
    let mut b = Rational::zero();
    for c in g.coeffs().iter().rev() {
        let prods = [&a * lo, &a * hi, &b * lo, &b * hi];
        a = prods.iter().min().unwrap() + c;
        b = prods.iter().max().unwrap() + c;
    }
    (a, b)
}

/// Completion of a number field at a finite place, with `t` sent to a
/// Hensel-lifted root of the corresponding factor of `f` mod `p`.
#[derive(Debug)]
pub struct LocalModel {
    pub field: LocalField,
    /// The factor of `f` mod `p` defining the place.
    pub factor: FpPoly,
    f_int: Vec<BigInt>,
    /// Image of `t` as a residue vector, with the precision it is known to.
    theta: Mutex<(u32, Vec<BigInt>)>,
}

impl LocalModel {
    fn new(nf: &NumberField, p: u64, factor: FpPoly) -> Result<Self> {
        let n = fpoly::deg(&factor);
        let (field, start) = match n {
            1 => (LocalField::Padic { p }, vec![BigInt::from((p - factor[0]) % p)]),
            2 if p != 2 => {
                let field = LocalField::unram_quad(p)?;
                let kf = field.residue_field().unwrap();
                let root = quad_root(&kf, &factor);
                (field, root.into_iter().map(BigInt::from).collect())
            }
            _ => {
                let field = LocalField::Unram { p, modulus: factor.clone() };
                let mut t = vec![BigInt::zero(); n];
                t[1] = BigInt::one();
                (field, t)
            }
        };
        let ring = field.ring();
        let start = ring.reduce(&start, 1);
        let theta = hensel_lift_vec(&ring, &nf.0.f_int, start, 8)?;
        Ok(LocalModel { field, factor, f_int: nf.0.f_int.clone(), theta: Mutex::new((8, theta)) })
    }

    pub fn prime(&self) -> u64 {
        self.field.prime().unwrap()
    }

    fn theta(&self, k: u32) -> Result<Vec<BigInt>> {
        let mut guard = self.theta.lock().expect("theta cache poisoned");
        let ring = self.field.ring();
        if guard.0 < k {
            let target = k.max(2 * guard.0);
            let lifted = hensel_lift_vec(&ring, &self.f_int, guard.1.clone(), target)?;
            *guard = (target, lifted);
        }
        Ok(ring.reduce(&guard.1, k))
    }

    /// Residue vector of an integral element modulo `p^k`.
    pub(crate) fn residue(&self, x: &NFElement, k: u32) -> Result<Vec<BigInt>> {
        let ring = self.field.ring();
        let th = self.theta(k)?;
        let m = pow_u64(self.prime(), k);
        let mut acc = vec![BigInt::zero(); ring.n()];
        for c in x.coords.iter().rev() {
            acc = ring.mul(&acc, &th, k);
            acc[0] += rat_mod(c, &m);
        }
        Ok(ring.reduce(&acc, k))
    }

    /// Image of `x` with `n` digits of unit precision.
    pub fn embed(&self, x: &NFElement, n: u32) -> Result<LocalElement> {
        if x.is_zero() {
            return Ok(LocalElement::zero(&self.field));
        }
        let p = self.prime();
        if self.field.degree() == 1 && x.field.is_rationals() {
            return Ok(crate::localfield::embed_exact(&x.coords, &self.field, n));
        }
        let d = x.coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let e_d = if d.is_one() { 0 } else { arith::val_int(&d, p) };
        let ring = self.field.ring();
        let integral = x.scale(&Rational::from_integer(d.clone()));
        let mut work = n + 4;
        loop {
            let r = self.residue(&integral, work)?;
            if let Some(v) = ring.val(&r, work) {
                if work - v >= n {
                    let unit = ring.reduce(&ring.div_p_pow(&r, v), n);
                    let d_unit = &d / pow_u64(p, e_d);
                    let inv = arith::mod_inverse(&d_unit, &pow_u64(p, n)).expect("unit");
                    let unit = ring.scale(&unit, &inv, n);
                    return Ok(LocalElement {
                        field: self.field.clone(),
                        value: LocalValue::Finite { valuation: v as i64 - e_d as i64, unit, precision: n },
                    });
                }
            }
            if work >= PRECISION_CAP {
                return Err(Error::PrecisionCapExceeded(PRECISION_CAP));
            }
            work = (2 * work).min(PRECISION_CAP);
        }
    }

    /// An element of `nf` whose residue at this place is `r`, as a
    /// combination of `1, t, ..., t^(f-1)` with coefficients in `[0, p)`.
    pub fn lift_residue(&self, nf: &NumberField, r: &FpPoly) -> Result<NFElement> {
        let p = self.prime();
        let f = self.field.degree();
        let ring = self.field.ring();
        let th = self.theta(1)?;
        let mut cols = Vec::with_capacity(f);
        let mut pw = ring.one();
        for _ in 0..f {
            cols.push(pw.iter().map(|c| fpoly::big_to_fp(c, p)).collect::<Vec<u64>>());
            pw = ring.mul(&pw, &th, 1);
        }
        // Row-reduce [cols | r] mod p.
        let mut m: Vec<Vec<u64>> =
            (0..f).map(|i| (0..f).map(|j| cols[j][i]).chain([r.get(i).copied().unwrap_or(0)]).collect()).collect();
        for col in 0..f {
            let piv = (col..f)
                .find(|&i| m[i][col] != 0)
                .ok_or_else(|| Error::Degenerate(format!("powers of t do not span the residue field at {p}")))?;
            m.swap(piv, col);
            let iv = fpoly::inv(m[col][col], p);
            for x in m[col].iter_mut() {
                *x = arith::mul_mod(*x, iv, p);
            }
            for i in 0..f {
                if i != col && m[i][col] != 0 {
                    let c = m[i][col];
                    for j in 0..=f {
                        m[i][j] = (m[i][j] + p - arith::mul_mod(c, m[col][j], p)) % p;
                    }
                }
            }
        }
        Ok(nf.elem(m.iter().map(|row| Rational::from_integer(BigInt::from(row[f]))).collect()))
    }

    /// Valuation of `x` at this place, `None` for zero.
    pub fn valuation(&self, x: &NFElement) -> Result<Option<i64>> {
        Ok(self.embed(x, 1)?.valuation())
    }
}

/// The root of a quadratic factor in `F_p[d]/(d^2 - nonresidue)` with the smaller `d`-coordinate.
fn quad_root(kf: &ExtField, factor: &FpPoly) -> Vec<u64> {
    let mut roots = kf.roots_of(factor);
    roots.iter_mut().for_each(|r| r.resize(2, 0));
    roots.sort_by_key(|r| (r[1], r[0]));
    roots.into_iter().next().expect("irreducible quadratic splits in the quadratic extension")
}

/// A ternary form with rational coefficients, terms `c * w0^i w1^j w2^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryForm {
    pub terms: Vec<(Rational, [u32; 3])>,
}

impl TernaryForm {
    pub fn new(terms: Vec<(Rational, [u32; 3])>) -> Result<Self> {
        let degs: Vec<u32> = terms.iter().map(|(_, e)| e.iter().sum()).collect();
        if degs.windows(2).any(|w| w[0] != w[1]) {
            return invalid("form is not homogeneous");
        }
        Ok(TernaryForm { terms })
    }

    pub fn eval(&self, pt: &[NFElement; 3]) -> NFElement {
        let field = &pt[0].field;
        let mut acc = field.zero();
        for (c, e) in &self.terms {
            let mut t = field.from_rational(c);
            for (x, &k) in pt.iter().zip(e) {
                t = &t * &x.pow(k);
            }
            acc = &acc + &t;
        }
        acc
    }
}

/// Whether a projective point lies on the curve `form = 0`.
pub fn verify_projective_point(form: &TernaryForm, pt: &[NFElement; 3]) -> Result<bool> {
    if pt.iter().all(|x| x.is_zero()) {
        return invalid("(0:0:0) is not a projective point");
    }
    Ok(form.eval(pt).is_zero())
}

/// A polynomial with coefficients in a number field, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NFPoly {
    pub field: NumberField,
    coeffs: Vec<NFElement>,
}

impl NFPoly {
    pub fn new(field: &NumberField, mut coeffs: Vec<NFElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        NFPoly { field: field.clone(), coeffs }
    }

    pub fn from_ratpoly(field: &NumberField, f: &RatPoly) -> Self {
        Self::new(field, f.coeffs().iter().map(|c| field.from_rational(c)).collect())
    }

    pub fn coeffs(&self) -> &[NFElement] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> NFElement {
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> NFElement {
        self.coeffs.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    /// The polynomial over Q when every coefficient is rational.
    pub fn to_ratpoly(&self) -> Option<RatPoly> {
        self.coeffs.iter().map(|c| c.to_rational()).collect::<Option<Vec<_>>>().map(RatPoly::new)
    }

    pub fn eval(&self, x: &NFElement) -> NFElement {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Coefficients of `f(x + y)` in `y`.
    pub fn taylor_at(&self, x: &NFElement) -> Vec<NFElement> {
        let mut coeffs = self.coeffs.clone();
        let n = coeffs.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = &coeffs[j + 1] * x;
                coeffs[j] = &coeffs[j] + &t;
            }
        }
        coeffs
    }

    /// `x^n f(1/x)` for a formal degree `n >= deg f`.
    pub fn reversed(&self, n: usize) -> Self {
        let c = (0..=n).rev().map(|k| self.coeff(k)).collect();
        Self::new(&self.field, c)
    }

    pub fn derivative(&self) -> Self {
        let c = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.scale(&rat(i as i64))).collect();
        Self::new(&self.field, c)
    }

    pub fn scale(&self, k: &NFElement) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, o: &NFPoly) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(&self.field, vec![]);
        }
        let mut v = vec![self.field.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = &v[i + j] + &(a * b);
            }
        }
        Self::new(&self.field, v)
    }

    /// Primes below which some coefficient may fail to be integral.
    pub fn denominator_primes(&self) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        for c in &self.coeffs {
            out.extend(c.denominator_primes()?);
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for NFPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.to_ratpoly() {
            return write!(f, "{r}");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})*x"),
                _ => format!("({c})*x^{k}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Determinant over a number field by Gaussian elimination.
fn nf_determinant(field: &NumberField, mut m: Vec<Vec<NFElement>>) -> Result<NFElement> {
    let n = m.len();
    let mut det = field.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Ok(field.zero());
        };
        if piv != col {
            m.swap(piv, col);
            det = -&det;
        }
        let p = m[col][col].clone();
        det = &det * &p;
        let pinv = p.inv()?;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * &pinv;
            for c in col..n {
                let t = &factor * &m[col][c];
                m[r][c] = &m[r][c] - &t;
            }
        }
    }
    Ok(det)
}

/// Sylvester resultant over a number field.
pub fn nf_resultant(f: &NFPoly, g: &NFPoly) -> Result<NFElement> {
    if f.is_zero() && g.is_zero() {
        return invalid("resultant of two zero polynomials");
    }
    if f.is_zero() || g.is_zero() {
        return Ok(f.field.zero());
    }
    if let (Some(a), Some(b)) = (f.to_ratpoly(), g.to_ratpoly()) {
        return Ok(f.field.from_rational(&resultant(&a, &b)?));
    }
    let (m, n) = (f.deg(), g.deg());
    let size = m + n;
    if size == 0 {
        return Ok(f.field.one());
    }
    let mut mat = vec![vec![f.field.zero(); size]; size];
    for i in 0..n {
        for (j, c) in f.coeffs.iter().rev().enumerate() {
            mat[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in g.coeffs.iter().rev().enumerate() {
            mat[n + i][i + j] = c.clone();
        }
    }
    nf_determinant(&f.field, mat)
}

/// Discriminant with the same sign convention as over Q.
pub fn nf_discriminant(f: &NFPoly) -> Result<NFElement> {
    if f.deg() == 0 {
        return invalid("discriminant of a constant");
    }
    let n = f.deg();
    let r = nf_resultant(f, &f.derivative())?;
    let q = &r * &f.lc().inv()?;
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -&q } else { q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::embed_rational;
    use crate::ratpoly::ratio;
    use proptest::prelude::*;

    fn q_sqrt3() -> NumberField {
        NumberField::from_ints(&[-3, 0, 1]).unwrap()
    }
    fn q_i() -> NumberField {
        NumberField::from_ints(&[1, 0, 1]).unwrap()
    }
    fn cubic() -> NumberField {
        NumberField::from_ints(&[-1, -2, 1, 1]).unwrap()
    }

    #[test]
    fn splitting_types() {
        assert_eq!(q_sqrt3().splitting_type(11), SplittingType::Degrees(vec![1, 1]));
        assert_eq!(q_i().splitting_type(3), SplittingType::Degrees(vec![2]));
        assert_eq!(q_i().splitting_type(2), SplittingType::Ramified);
        assert_eq!(cubic().splitting_type(5), SplittingType::Degrees(vec![3]));
        assert_eq!(cubic().splitting_type(7), SplittingType::Ramified);
    }

    #[test]
    fn split_prime_search() {
        assert_eq!(cubic().find_split_primes(4, 2, &[]).unwrap(), vec![13, 29, 41, 43]);
        assert_eq!(q_sqrt3().find_split_primes(3, 2, &[]).unwrap(), vec![11, 13, 23]);
        assert_eq!(q_i().find_split_primes(1, 2, &[]).unwrap(), vec![5]);
        assert_eq!(q_i().find_split_primes(2, 2, &[5]).unwrap(), vec![13, 17]);
    }

    #[test]
    fn signatures_and_certificates() {
        assert_eq!(q_sqrt3().signature(), (2, 0));
        assert_eq!(q_i().signature(), (0, 1));
        assert_eq!(cubic().signature(), (3, 0));
        assert_eq!(cubic().irreducibility(), Irreducibility::ModPrime(2));
        assert_eq!(NumberField::from_ints(&[1, 0, 0, 0, 1]).unwrap().irreducibility(), Irreducibility::Unverified);
        assert!(NumberField::from_ints(&[1, 2, 1]).is_err());
        assert!(NumberField::new(RatPoly::from_ints(&[1, 2])).is_err());
    }

    #[test]
    fn element_arithmetic() {
        let k = cubic();
        let a = k.theta();
        let b = &(&a * &a) - &k.from_int(2);
        // alpha = zeta + zeta^-1 satisfies alpha^2 - 2 = zeta^2 + zeta^-2.
        assert_eq!(eval_at(k.poly(), &a), k.zero());
        let inv = b.inv().unwrap();
        assert_eq!(&inv * &b, k.one());
        assert_eq!(a.norm(), rat(1));
        assert_eq!(q_i().elem(vec![rat(1), rat(1)]).norm(), rat(2));
        let t = taylor_at(&RatPoly::from_ints(&[0, 0, 1]), &a);
        assert_eq!(t[0], &a * &a);
        assert_eq!(t[1], a.scale(&rat(2)));
        assert_eq!(t[2], k.one());
    }

    #[test]
    fn split_embedding_of_i_at_5() {
        let places = q_i().places_above(Place::Finite(5)).unwrap();
        assert_eq!(places.len(), 2);
        let x = places[0].embed(&q_i().theta(), 3).unwrap();
        let u = x.unit().unwrap()[0].clone();
        assert_eq!(&u * &u % 125, BigInt::from(124));
        assert_eq!(u.mod_floor(&BigInt::from(5)), BigInt::from(3));
    }

    #[test]
    fn real_embedding_of_sqrt3() {
        let places = q_sqrt3().places_above(Place::Infinite).unwrap();
        match &places[1].kind {
            PlaceKind::Real { interval, .. } => assert_eq!(interval, &(rat(1), rat(2))),
            other => panic!("{other:?}"),
        }
        let e = places[1].embed(&q_sqrt3().theta(), 1).unwrap();
        assert_eq!(e.real_sign(), Some(1));
        let e = places[0].embed(&q_sqrt3().elem(vec![rat(2), rat(1)]), 1).unwrap();
        assert_eq!(e.real_sign(), Some(1));
        let e = places[1].embed(&q_sqrt3().elem(vec![ratio(-7, 4), rat(1)]), 1).unwrap();
        assert_eq!(e.real_sign(), Some(-1));
    }

    #[test]
    fn inert_embedding_of_5_plus_i() {
        let places = q_i().places_above(Place::Finite(3)).unwrap();
        assert_eq!(places.len(), 1);
        let e = places[0].embed(&q_i().elem(vec![rat(5), rat(1)]), 2).unwrap();
        assert_eq!(e.valuation(), Some(0));
        let u = e.unit().unwrap();
        assert_eq!(u[0].mod_floor(&BigInt::from(3)), BigInt::from(2));
        assert_eq!(u[1].mod_floor(&BigInt::from(3)), BigInt::from(1));
    }

    #[test]
    fn inert_cubic_place() {
        let k = cubic();
        let places = k.places_above(Place::Finite(5)).unwrap();
        assert_eq!(places.len(), 1);
        assert_eq!(places[0].residue_degree(), 3);
        let x = places[0].embed(&k.theta(), 6).unwrap();
        let y = places[0].embed(&k.elem(vec![rat(3), rat(-1), rat(2)]), 6).unwrap();
        let xy = places[0].embed(&(&k.theta() * &k.elem(vec![rat(3), rat(-1), rat(2)])), 6).unwrap();
        assert_eq!(x.mul(&y).unwrap(), xy);
    }

    #[test]
    fn points_on_curves() {
        let e = TernaryForm::new(vec![(rat(1), [0, 2, 1]), (rat(-1), [3, 0, 0]), (rat(16), [0, 0, 3])]).unwrap();
        let k = q_sqrt3();
        let pt = [k.from_int(4), k.theta().scale(&rat(4)), k.one()];
        assert!(verify_projective_point(&e, &pt).unwrap());
        assert!(verify_projective_point(&e, &[k.zero(), k.one(), k.zero()]).unwrap());
        assert!(!verify_projective_point(&e, &[k.one(), k.one(), k.one()]).unwrap());
        let gi = q_i();
        assert!(verify_projective_point(&e, &[gi.zero(), gi.theta().scale(&rat(4)), gi.one()]).unwrap());
        assert!(verify_projective_point(&e, &[gi.zero(), gi.zero(), gi.zero()]).is_err());
    }

    #[test]
    fn polynomials_over_fields() {
        let k = q_i();
        let i = k.theta();
        // x^2 - (5 + i) and (-1 + 5i) x^2 - 15 i
        let f1 = NFPoly::new(&k, vec![-&k.elem(vec![rat(5), rat(1)]), k.zero(), k.one()]);
        let f2 = NFPoly::new(&k, vec![i.scale(&rat(-15)), k.zero(), k.elem(vec![rat(-1), rat(5)])]);
        let r = nf_resultant(&f1, &f2).unwrap();
        // res = (lc f2 * (5+i) - 15i)^2 for x^2 - c against b x^2 - d.
        let inner = &(&k.elem(vec![rat(-1), rat(5)]) * &k.elem(vec![rat(5), rat(1)])) - &i.scale(&rat(15));
        assert_eq!(r, &inner * &inner);
        let p = f1.mul(&f2);
        assert!(!nf_discriminant(&p).unwrap().is_zero());
        let q = NFPoly::from_ratpoly(&k, &RatPoly::from_ints(&[-2, 0, 1]));
        assert_eq!(nf_discriminant(&q).unwrap(), k.from_int(8));
        let t = p.taylor_at(&i);
        assert_eq!(t[0], p.eval(&i));
        assert_eq!(p.reversed(4).coeff(0), p.lc());
    }

    fn small_elem(k: NumberField) -> impl Strategy<Value = NFElement> {
        proptest::collection::vec((-50i64..50, 1i64..6), k.degree())
            .prop_map(move |v| k.elem(v.into_iter().map(|(n, d)| ratio(n, d)).collect()))
    }

    proptest! {
        #![proptest_config(crate::testutil::config(100))]

        #[test]
        fn embedding_is_multiplicative(x in small_elem(cubic()), y in small_elem(cubic()), pi in 0usize..3) {
            prop_assume!(!x.is_zero() && !y.is_zero());
            let p = [13u64, 5, 29][pi];
            let k = cubic();
            for w in k.places_above(Place::Finite(p)).unwrap() {
                let ex = w.embed(&x, 6).unwrap();
                let ey = w.embed(&y, 6).unwrap();
                let exy = w.embed(&(&x * &y), 6).unwrap();
                prop_assert_eq!(ex.mul(&ey).unwrap(), exy);
            }
        }

        #[test]
        fn point_check_is_scale_invariant(s in small_elem(q_sqrt3())) {
            prop_assume!(!s.is_zero());
            let e = TernaryForm::new(vec![(rat(1), [0, 2, 1]), (rat(-1), [3, 0, 0]), (rat(16), [0, 0, 3])]).unwrap();
            let k = q_sqrt3();
            let pt = [k.from_int(4), k.theta().scale(&rat(4)), k.one()];
            let scaled = [&pt[0] * &s, &pt[1] * &s, &pt[2] * &s];
            prop_assert!(verify_projective_point(&e, &scaled).unwrap());
        }

        #[test]
        fn rational_embedding_matches(n in -500i64..500, d in 1i64..50) {
            prop_assume!(n != 0);
            let k = NumberField::rationals();
            let w = &k.places_above(Place::Finite(7)).unwrap()[0];
            let q = ratio(n, d);
            prop_assert_eq!(w.embed(&k.from_rational(&q), 5).unwrap(), embed_rational(&q, &LocalField::Padic { p: 7 }, 5));
        }
    }
}
