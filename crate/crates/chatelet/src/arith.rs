//! Integer helpers: valuations, primality, factorisation and square roots modulo primes.

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ratpoly::Rational;

/// p-adic valuation of a nonzero integer.
pub fn val_int(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn val_rat(q: &Rational, p: u64) -> i64 {
    val_int(q.numer(), p) as i64 - val_int(q.denom(), p) as i64
}

/// Splits `q = p^v * u` and returns `(v, u)`.
pub fn split_rat(q: &Rational, p: u64) -> (i64, Rational) {
    let v = val_rat(q, p);
    let pv = Rational::from_integer(pow_u64(p, v.unsigned_abs() as u32));
    let u = if v >= 0 { q / pv } else { q * pv };
    (v, u)
}

/// Residue of a p-integral rational modulo `m`, in `[0, m)`.
pub fn rat_mod(q: &Rational, m: &BigInt) -> BigInt {
    let d = q.denom().mod_floor(m);
    let inv = mod_inverse(&d, m).expect("denominator must be a unit");
    (q.numer().mod_floor(m) * inv).mod_floor(m)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else if m.is_one() {
        Some(BigInt::zero())
    } else {
        None
    }
}

pub fn pow_u64(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Strong probable-prime test with a fixed set of bases; exact below 3.3e24.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

fn pollard_brent(n: &BigUint, c: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(2u32);
    let mut r: u64 = 1;
    let m: u64 = 64;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut steps: u64 = 0;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
        steps += r;
        if steps > 4_000_000 {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

fn factor_into(n: BigUint, out: &mut Vec<BigUint>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if is_probable_prime(&n) {
        out.push(n);
        return Ok(());
    }
    for c in 1..40u64 {
        if let Some(d) = pollard_brent(&n, c) {
            let e = &n / &d;
            factor_into(d, out)?;
            factor_into(e, out)?;
            return Ok(());
        }
    }
    Err(Error::Unsupported(format!("could not factor {n}")))
}

/// Distinct prime divisors of a nonzero integer, ascending.
pub fn prime_divisors(n: &BigInt) -> Result<Vec<u64>> {
    let mut m = n.abs().to_biguint().unwrap_or_default();
    if m.is_zero() {
        return Err(Error::InvalidInput("cannot factor zero".into()));
    }
    let mut primes = Vec::new();
    let mut p: u64 = 2;
    while p < 10_000 {
        let bp = BigUint::from(p);
        if (&m % &bp).is_zero() {
            primes.push(p);
            while (&m % &bp).is_zero() {
                m /= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut big = Vec::new();
    factor_into(m, &mut big)?;
    for f in big {
        let v = f.to_u64().ok_or_else(|| Error::Unsupported(format!("prime {f} does not fit in 64 bits")))?;
        primes.push(v);
    }
    primes.sort_unstable();
    primes.dedup();
    Ok(primes)
}

/// Primes dividing the numerator or denominator of a nonzero rational.
pub fn rational_primes(q: &Rational) -> Result<Vec<u64>> {
    let mut v = prime_divisors(q.numer())?;
    v.extend(prime_divisors(q.denom())?);
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

/// Legendre symbol of `a` modulo an odd prime `p`: 0, 1 or -1.
pub fn legendre(a: &BigInt, p: u64) -> i32 {
    let r = a.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p).find(|&d| pow_mod(d, (p - 1) / 2, p) == p - 1).expect("odd prime has nonresidues")
}

/// Square root of a residue modulo an odd prime (Tonelli-Shanks), the smaller of the two roots.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let z = smallest_nonresidue(p);
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r.min(p - r))
}

/// The integer `n` as a signed big integer.
pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn is_negative(q: &Rational) -> bool {
    q.numer().sign() == BigSign::Minus
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(2_305_843_009_213_693_951));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn factors_products_of_large_primes() {
        let n = BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64) * BigInt::from(12u32);
        assert_eq!(prime_divisors(&n).unwrap(), vec![2, 3, 998_244_353, 1_000_000_007]);
    }

    #[test]
    fn tonelli_shanks() {
        for p in [3u64, 5, 13, 17, 41, 73, 97, 193] {
            for a in 1..p {
                match sqrt_mod(a, p) {
                    Some(r) => assert_eq!(mul_mod(r, r, p), a),
                    None => assert_eq!(legendre(&BigInt::from(a), p), -1),
                }
            }
        }
    }

    #[test]
    fn valuations_and_units() {
        let q = Rational::new(BigInt::from(377), BigInt::from(1));
        assert_eq!(split_rat(&q, 13), (1, Rational::from_integer(BigInt::from(29))));
        let q = Rational::new(BigInt::from(1), BigInt::from(73));
        assert_eq!(split_rat(&q, 73), (-1, Rational::from_integer(BigInt::from(1))));
    }
}
