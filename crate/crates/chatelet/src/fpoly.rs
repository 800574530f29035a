//! Polynomials over the prime field F_p, coefficients lowest degree first.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::arith::{mul_mod, pow_mod};

pub type FpPoly = Vec<u64>;

pub fn trim(mut f: FpPoly) -> FpPoly {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

pub fn from_ints(c: &[BigInt], p: u64) -> FpPoly {
    let bp = BigInt::from(p);
    trim(c.iter().map(|x| x.mod_floor(&bp).to_u64().unwrap()).collect())
}

pub fn deg(f: &FpPoly) -> usize {
    f.len().saturating_sub(1)
}

pub fn inv(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub fn add(f: &FpPoly, g: &FpPoly, p: u64) -> FpPoly {
    let n = f.len().max(g.len());
    trim((0..n).map(|i| (f.get(i).copied().unwrap_or(0) + g.get(i).copied().unwrap_or(0)) % p).collect())
}

pub fn sub(f: &FpPoly, g: &FpPoly, p: u64) -> FpPoly {
    let n = f.len().max(g.len());
    trim((0..n).map(|i| (f.get(i).copied().unwrap_or(0) + p - g.get(i).copied().unwrap_or(0)) % p).collect())
}

pub fn mul(f: &FpPoly, g: &FpPoly, p: u64) -> FpPoly {
    if f.is_empty() || g.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(a, b, p)) % p;
        }
    }
    trim(out)
}

pub fn div_rem(f: &FpPoly, d: &FpPoly, p: u64) -> (FpPoly, FpPoly) {
    assert!(!d.is_empty(), "division by the zero polynomial");
    let mut r = f.clone();
    let dd = deg(d);
    if r.len() <= dd {
        return (vec![], trim(r));
    }
    let li = inv(*d.last().unwrap(), p);
    let mut q = vec![0u64; r.len() - dd];
    for k in (0..q.len()).rev() {
        let c = mul_mod(r[k + dd], li, p);
        if c != 0 {
            for (j, &dc) in d.iter().enumerate() {
                r[k + j] = (r[k + j] + p - mul_mod(c, dc, p)) % p;
            }
        }
        q[k] = c;
    }
    r.truncate(dd);
    (trim(q), trim(r))
}

pub fn rem(f: &FpPoly, d: &FpPoly, p: u64) -> FpPoly {
    div_rem(f, d, p).1
}

pub fn monic(f: &FpPoly, p: u64) -> FpPoly {
    match f.last() {
        None => vec![],
        Some(&l) => {
            let li = inv(l, p);
            f.iter().map(|&c| mul_mod(c, li, p)).collect()
        }
    }
}

pub fn gcd(f: &FpPoly, g: &FpPoly, p: u64) -> FpPoly {
    let (mut a, mut b) = (trim(f.clone()), trim(g.clone()));
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    monic(&a, p)
}

pub fn pow_mod_poly(base: &FpPoly, e: &BigUint, m: &FpPoly, p: u64) -> FpPoly {
    let mut result: FpPoly = vec![1];
    let b = rem(base, m, p);
    let bits = e.bits();
    for i in (0..bits).rev() {
        result = rem(&mul(&result, &result, p), m, p);
        if e.bit(i) {
            result = rem(&mul(&result, &b, p), m, p);
        }
    }
    result
}

fn x_poly() -> FpPoly {
    vec![0, 1]
}

/// Distinct-degree factorisation of a squarefree monic polynomial:
/// pairs `(d, product of all irreducible factors of degree d)`.
pub fn distinct_degree(f: &FpPoly, p: u64) -> Vec<(usize, FpPoly)> {
    let mut out = Vec::new();
    let mut rest = monic(f, p);
    let mut h = x_poly();
    let bp = BigUint::from(p);
    let mut d = 0;
    while deg(&rest) >= 2 * (d + 1) {
        d += 1;
        h = pow_mod_poly(&h, &bp, &rest, p);
        let g = gcd(&sub(&h, &x_poly(), p), &rest, p);
        if deg(&g) > 0 {
            out.push((d, g.clone()));
            rest = div_rem(&rest, &g, p).0;
            h = rem(&h, &rest, p);
        }
    }
    if deg(&rest) > 0 {
        out.push((deg(&rest), rest));
    }
    out
}

pub fn is_squarefree(f: &FpPoly, p: u64) -> bool {
    let df = trim(f.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % p, p)).collect());
    deg(&gcd(f, &df, p)) == 0
}

pub fn is_irreducible(f: &FpPoly, p: u64) -> bool {
    if deg(f) == 0 || !is_squarefree(f, p) {
        return false;
    }
    let dd = distinct_degree(f, p);
    dd.len() == 1 && dd[0].0 == deg(f)
}

/// The `k`-th polynomial of degree below `n` in base-`p` digit order.
pub fn nth_poly(mut k: u64, n: usize, p: u64) -> FpPoly {
    let mut v = Vec::with_capacity(n);
    for _ in 0..n {
        v.push(k % p);
        k /= p;
    }
    trim(v)
}

/// Splits a product of distinct irreducibles of degree `d` into its factors.
fn equal_degree(f: &FpPoly, d: usize, p: u64) -> Vec<FpPoly> {
    if deg(f) == d {
        return vec![monic(f, p)];
    }
    let n = deg(f);
    let mut k: u64 = p;
    loop {
        let a = nth_poly(k, n, p);
        k += 1;
        if deg(&a) == 0 {
            continue;
        }
        let t = if p == 2 {
            let mut acc = a.clone();
            let mut cur = a.clone();
            for _ in 1..d {
                cur = rem(&mul(&cur, &cur, p), f, p);
                acc = add(&acc, &cur, p);
            }
            acc
        } else {
            let q = num_traits::pow(BigUint::from(p), d);
            let e = (q - BigUint::one()) / BigUint::from(2u32);
            sub(&pow_mod_poly(&a, &e, f, p), &vec![1], p)
        };
        let g = gcd(&t, f, p);
        if deg(&g) > 0 && deg(&g) < n {
            let h = div_rem(f, &g, p).0;
            let mut out = equal_degree(&g, d, p);
            out.extend(equal_degree(&h, d, p));
            return out;
        }
    }
}

/// Monic irreducible factors of a squarefree polynomial, sorted
/// lexicographically by coefficient list.
pub fn factor_squarefree(f: &FpPoly, p: u64) -> Vec<FpPoly> {
    let mut out = Vec::new();
    for (d, g) in distinct_degree(f, p) {
        out.extend(equal_degree(&g, d, p));
    }
    out.sort();
    out
}

/// Smallest monic irreducible polynomial of degree `n` in base-`p` digit order.
pub fn smallest_irreducible(n: usize, p: u64) -> FpPoly {
    let mut k: u64 = 0;
    loop {
        let mut f = nth_poly(k, n, p);
        f.resize(n, 0);
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
        k += 1;
    }
}

/// Arithmetic in F_p[t]/(m) for an irreducible monic `m`.
#[derive(Clone, Debug)]
pub struct ExtField {
    pub p: u64,
    pub modulus: FpPoly,
}

impl ExtField {
    pub fn degree(&self) -> usize {
        deg(&self.modulus)
    }

    pub fn size(&self) -> BigUint {
        num_traits::pow(BigUint::from(self.p), self.degree())
    }

    pub fn mul(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        rem(&mul(a, b, self.p), &self.modulus, self.p)
    }

    pub fn pow(&self, a: &FpPoly, e: &BigUint) -> FpPoly {
        pow_mod_poly(a, e, &self.modulus, self.p)
    }

    pub fn inv(&self, a: &FpPoly) -> FpPoly {
        let e = self.size() - BigUint::from(2u32);
        self.pow(a, &e)
    }

    /// Euler criterion: `a^((q-1)/2) == 1`; odd characteristic only.
    pub fn is_square(&self, a: &FpPoly) -> bool {
        let e = (self.size() - BigUint::one()) / BigUint::from(2u32);
        self.pow(a, &e) == vec![1]
    }

    /// Evaluates a polynomial with F_p coefficients at the element `t`.
    pub fn eval(&self, f: &FpPoly, t: &FpPoly) -> FpPoly {
        let mut acc: FpPoly = vec![];
        for &c in f.iter().rev() {
            acc = add(&self.mul(&acc, t), &trim(vec![c]), self.p);
        }
        acc
    }

    /// Roots of `f` in this field, by splitting `gcd(f, t^q - t)`.
    pub fn roots_of(&self, f: &FpPoly) -> Vec<FpPoly> {
        let q = self.size();
        if q <= BigUint::from(200_000u32) {
            let qn = q.to_u64().unwrap();
            return (0..qn)
                .map(|k| nth_poly(k, self.degree(), self.p))
                .filter(|t| self.eval(f, t).is_empty())
                .collect();
        }
        self.roots_by_splitting(f)
    }

    fn roots_by_splitting(&self, f: &FpPoly) -> Vec<FpPoly> {
        let n = self.degree();
        let mut out = Vec::new();
        for g in factor_squarefree(f, self.p) {
            if !n.is_multiple_of(deg(&g)) {
                continue;
            }
            out.extend(self.split_linear(g.iter().map(|&c| trim(vec![c])).collect()));
        }
        out.sort();
        out
    }

    /// Evaluates a polynomial with coefficients in this field.
    pub fn eval_ext(&self, f: &[FpPoly], t: &FpPoly) -> FpPoly {
        let mut acc: FpPoly = vec![];
        for c in f.iter().rev() {
            acc = add(&self.mul(&acc, t), c, self.p);
        }
        acc
    }

    /// Distinct roots in this field of a polynomial with coefficients in it.
    pub fn roots_ext(&self, f: &[FpPoly]) -> Vec<FpPoly> {
        let f = ext_trim(f.to_vec());
        if f.len() <= 1 {
            return vec![];
        }
        let q = self.size();
        if q <= BigUint::from(200_000u32) {
            let qn = q.to_u64().unwrap();
            return (0..qn)
                .map(|k| nth_poly(k, self.degree(), self.p))
                .filter(|t| self.eval_ext(&f, t).is_empty())
                .collect();
        }
        let f = self.ext_monic(&f);
        let y: ExtPoly = vec![vec![], vec![1]];
        let yq = self.ext_pow_mod(&y, &q, &f);
        let g = self.ext_gcd(&self.ext_sub(&yq, &y), &f);
        if g.len() <= 1 {
            return vec![];
        }
        let mut roots = self.split_linear(g);
        roots.sort();
        roots
    }

    fn ext_mul(&self, a: &ExtPoly, b: &ExtPoly) -> ExtPoly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut o: ExtPoly = vec![vec![]; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                o[i + j] = add(&o[i + j], &self.mul(x, y), self.p);
            }
        }
        ext_trim(o)
    }

    fn ext_sub(&self, a: &ExtPoly, b: &ExtPoly) -> ExtPoly {
        let n = a.len().max(b.len());
        let e: FpPoly = vec![];
        ext_trim((0..n).map(|i| sub(a.get(i).unwrap_or(&e), b.get(i).unwrap_or(&e), self.p)).collect())
    }

    fn ext_monic(&self, a: &ExtPoly) -> ExtPoly {
        let li = self.inv(a.last().unwrap());
        a.iter().map(|c| self.mul(c, &li)).collect()
    }

    fn ext_div_rem(&self, a: &ExtPoly, m: &ExtPoly) -> (ExtPoly, ExtPoly) {
        let mut r = a.clone();
        let dm = m.len() - 1;
        let li = self.inv(m.last().unwrap());
        let mut quo: ExtPoly = vec![vec![]; a.len().saturating_sub(dm)];
        while r.len() > dm {
            let k = r.len() - 1 - dm;
            let c = self.mul(r.last().unwrap(), &li);
            for (j, mc) in m.iter().enumerate() {
                r[k + j] = sub(&r[k + j], &self.mul(&c, mc), self.p);
            }
            quo[k] = c;
            r = ext_trim(r);
        }
        (ext_trim(quo), r)
    }

    fn ext_gcd(&self, a: &ExtPoly, b: &ExtPoly) -> ExtPoly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_empty() {
            let r = self.ext_div_rem(&x, &y).1;
            x = y;
            y = r;
        }
        if x.is_empty() {
            return x;
        }
        self.ext_monic(&x)
    }

    fn ext_pow_mod(&self, b: &ExtPoly, e: &BigUint, m: &ExtPoly) -> ExtPoly {
        let mut r: ExtPoly = vec![vec![1]];
        for i in (0..e.bits()).rev() {
            r = self.ext_div_rem(&self.ext_mul(&r, &r), m).1;
            if e.bit(i) {
                r = self.ext_div_rem(&self.ext_mul(&r, b), m).1;
            }
        }
        r
    }

    /// Roots of a squarefree polynomial over this field that splits into
    /// linear factors, by Cantor-Zassenhaus (odd characteristic).
    fn split_linear(&self, g: ExtPoly) -> Vec<FpPoly> {
        let p = self.p;
        let e = (self.size() - BigUint::one()) / BigUint::from(2u32);
        let mut pending: Vec<ExtPoly> = vec![ext_trim(g)];
        let mut roots = Vec::new();
        let mut k: u64 = 1;
        while let Some(h) = pending.pop() {
            if h.len() <= 1 {
                continue;
            }
            if h.len() == 2 {
                let li = self.inv(&h[1]);
                roots.push(sub(&vec![], &self.mul(&h[0], &li), p));
                continue;
            }
            loop {
                let shift = nth_poly(k, self.degree(), p);
                k += 1;
                let a: ExtPoly = vec![shift, vec![1]];
                let t = self.ext_pow_mod(&a, &e, &h);
                let d = self.ext_gcd(&self.ext_sub(&t, &vec![vec![1]]), &h);
                if d.len() > 1 && d.len() < h.len() {
                    let quo = self.ext_div_rem(&h, &d).0;
                    pending.push(d);
                    pending.push(quo);
                    break;
                }
            }
        }
        roots
    }
}

/// Polynomial with coefficients in an [`ExtField`], lowest degree first.
pub type ExtPoly = Vec<FpPoly>;

fn ext_trim(mut v: ExtPoly) -> ExtPoly {
    while v.last().is_some_and(|c| c.is_empty()) {
        v.pop();
    }
    v
}

pub fn big_to_fp(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}
