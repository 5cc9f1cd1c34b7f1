//! Internal dense polynomial arithmetic over a prime field F_p.
//!
//! Everything in this module works on raw little-endian coefficient slices
//! (`&[u64]`, entries reduced mod p, no trailing zeros; the empty slice is the
//! zero polynomial). The public wrappers in `ff` and `poly` delegate here both
//! for extension-field element arithmetic (reduction mod the field modulus)
//! and as the fast path for polynomials over prime fields.
//!
//! The characteristic is capped at 2^31 so that a product of two residues
//! fits in 62 bits: multiplication accumulates coefficient sums in `u128` and
//! division tracks lazy remainders in `i128`, in both cases with one final
//! reduction per coefficient.

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Largest supported characteristic (exclusive).
pub(crate) const MAX_PRIME: u64 = 1 << 31;

/// Strip trailing zeros in place.
pub(crate) fn normalize(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Degree, or `None` for the zero polynomial.
pub(crate) fn deg(v: &[u64]) -> Option<usize> {
    if v.is_empty() {
        None
    } else {
        debug_assert!(*v.last().unwrap() != 0);
        Some(v.len() - 1)
    }
}

pub(crate) fn add(x: &[u64], y: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; x.len().max(y.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let a = x.get(i).copied().unwrap_or(0);
        let b = y.get(i).copied().unwrap_or(0);
        *o = (a + b) % p;
    }
    normalize(&mut out);
    out
}

pub(crate) fn sub(x: &[u64], y: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; x.len().max(y.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let a = x.get(i).copied().unwrap_or(0);
        let b = y.get(i).copied().unwrap_or(0);
        *o = (a + p - b) % p;
    }
    normalize(&mut out);
    out
}

pub(crate) fn neg(x: &[u64], p: u64) -> Vec<u64> {
    let mut out: Vec<u64> = x.iter().map(|&a| (p - a) % p).collect();
    normalize(&mut out);
    out
}

pub(crate) fn scalar_mul(x: &[u64], c: u64, p: u64) -> Vec<u64> {
    if c == 0 {
        return Vec::new();
    }
    let mut out: Vec<u64> = x
        .iter()
        .map(|&a| ((a as u128 * c as u128) % p as u128) as u64)
        .collect();
    normalize(&mut out);
    out
}

pub(crate) fn mul(x: &[u64], y: &[u64], p: u64) -> Vec<u64> {
    if x.is_empty() || y.is_empty() {
        return Vec::new();
    }
    // Schoolbook with u128 accumulators: each term is < 2^62, so overflow
    // would need more than 2^66 terms.
    let mut acc = vec![0u128; x.len() + y.len() - 1];
    for (i, &a) in x.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in y.iter().enumerate() {
            acc[i + j] += a as u128 * b as u128;
        }
    }
    let mut out: Vec<u64> = acc.into_iter().map(|v| (v % p as u128) as u64).collect();
    normalize(&mut out);
    out
}

/// Modular inverse of a residue, via the extended Euclidean algorithm.
pub(crate) fn inv_u64(a: u64, p: u64) -> Result<u64> {
    if a % p == 0 {
        return Err(Error::DivisionByZero);
    }
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "p must be prime");
    Ok(s0.rem_euclid(p as i128) as u64)
}

/// Euclidean division: returns (quotient, remainder) with deg r < deg y.
///
/// The remainder lives in `i128` lazily; each step subtracts q_i * y from it
/// and reduces only the coefficient needed to read off the next quotient
/// digit. Total drift per cell is below len * p^2 < 2^126.
pub(crate) fn divrem(x: &[u64], y: &[u64], p: u64) -> Result<(Vec<u64>, Vec<u64>)> {
    let dy = match deg(y) {
        None => return Err(Error::DivisionByZero),
        Some(d) => d,
    };
    let dx = match deg(x) {
        None => return Ok((Vec::new(), Vec::new())),
        Some(d) => d,
    };
    if dx < dy {
        return Ok((Vec::new(), x.to_vec()));
    }
    let lead_inv = inv_u64(y[dy], p)? as u128;
    let mut r: Vec<i128> = x.iter().map(|&c| c as i128).collect();
    let mut q = vec![0u64; dx - dy + 1];
    for i in (0..=dx - dy).rev() {
        let top = r[i + dy].rem_euclid(p as i128) as u64;
        if top == 0 {
            r[i + dy] = 0;
            continue;
        }
        let qi = ((top as u128 * lead_inv) % p as u128) as u64;
        q[i] = qi;
        for j in 0..dy {
            r[i + j] -= qi as i128 * y[j] as i128;
        }
        // The leading term cancels by construction of qi.
        r[i + dy] = 0;
    }
    let mut rem: Vec<u64> = r[..dy]
        .iter()
        .map(|&c| c.rem_euclid(p as i128) as u64)
        .collect();
    normalize(&mut rem);
    normalize(&mut q);
    Ok((q, rem))
}

pub(crate) fn rem(x: &[u64], y: &[u64], p: u64) -> Result<Vec<u64>> {
    Ok(divrem(x, y, p)?.1)
}

/// Scale so the leading coefficient is 1. Zero stays zero.
pub(crate) fn make_monic(x: &[u64], p: u64) -> Result<Vec<u64>> {
    match deg(x) {
        None => Ok(Vec::new()),
        Some(d) => {
            if x[d] == 1 {
                Ok(x.to_vec())
            } else {
                Ok(scalar_mul(x, inv_u64(x[d], p)?, p))
            }
        }
    }
}

/// Monic gcd; gcd(0, 0) is an error.
pub(crate) fn gcd(x: &[u64], y: &[u64], p: u64) -> Result<Vec<u64>> {
    if x.is_empty() && y.is_empty() {
        return Err(Error::BothZero);
    }
    let (mut a, mut b) = (x.to_vec(), y.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p)?;
        a = b;
        b = r;
    }
    make_monic(&a, p)
}

/// Extended gcd restricted to what the library needs: the inverse of `a`
/// modulo `m`, assuming gcd(a, m) = 1 (m irreducible and a nonzero mod m).
pub(crate) fn inv_mod(a: &[u64], m: &[u64], p: u64) -> Result<Vec<u64>> {
    let a = rem(a, m, p)?;
    if a.is_empty() {
        return Err(Error::DivisionByZero);
    }
    let (mut r0, mut r1) = (m.to_vec(), a);
    let (mut s0, mut s1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p)?;
        let s = sub(&s0, &mul(&q, &s1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    // r0 = gcd(a, m), a unit when m is irreducible.
    let d = deg(&r0).expect("gcd of nonzero inputs");
    if d != 0 {
        return Err(Error::DivisionByZero);
    }
    Ok(scalar_mul(&s0, inv_u64(r0[0], p)?, p))
}

pub(crate) fn mulmod(x: &[u64], y: &[u64], m: &[u64], p: u64) -> Result<Vec<u64>> {
    rem(&mul(x, y, p), m, p)
}

/// base^e mod m by square-and-multiply over the bits of a big exponent.
pub(crate) fn powmod(base: &[u64], e: &BigUint, m: &[u64], p: u64) -> Result<Vec<u64>> {
    if deg(m).is_none() {
        return Err(Error::DivisionByZero);
    }
    let mut result = rem(&[1], m, p)?;
    let mut sq = rem(base, m, p)?;
    for i in 0..e.bits() {
        if e.bit(i) {
            result = mulmod(&result, &sq, m, p)?;
        }
        if i + 1 < e.bits() {
            sq = mulmod(&sq, &sq, m, p)?;
        }
    }
    Ok(result)
}

pub(crate) fn eval(f: &[u64], x: u64, p: u64) -> u64 {
    let mut acc = 0u128;
    for &c in f.iter().rev() {
        acc = (acc * x as u128 + c as u128) % p as u128;
    }
    acc as u64
}

/// Rabin irreducibility over F_p, used to bootstrap extension-field moduli
/// before any `FieldCtx` exists: f (monic, degree n >= 1) is irreducible iff
/// x^{p^n} = x (mod f) and gcd(x^{p^{n/t}} - x, f) = 1 for every prime t | n.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> Result<bool> {
    let n = match deg(f) {
        None | Some(0) => return Err(Error::DegreeZero),
        Some(d) => d,
    };
    if n == 1 {
        return Ok(true);
    }
    let x = [0u64, 1];
    for t in prime_divisors(n as u64) {
        let e = BigUint::from(p).pow((n as u64 / t) as u32);
        let h = powmod(&x, &e, f, p)?;
        let g = gcd(&sub(&h, &x, p), f, p)?;
        if deg(&g) != Some(0) {
            return Ok(false);
        }
    }
    let e = BigUint::from(p).pow(n as u32);
    Ok(powmod(&x, &e, f, p)? == x)
}

/// Distinct prime divisors of n, ascending.
pub(crate) fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_round_trips() {
        let p = 83;
        // (x^5 + 17x^2 + 1) / (x^2 + 3x + 2)
        let x = [1, 0, 17, 0, 0, 1];
        let y = [2, 3, 1];
        let (q, r) = divrem(&x, &y, p).unwrap();
        let back = add(&mul(&q, &y, p), &r, p);
        assert_eq!(back, x);
        assert!(deg(&r) < deg(&y));
    }

    #[test]
    fn division_rejects_zero() {
        assert!(matches!(divrem(&[1, 1], &[], 5), Err(Error::DivisionByZero)));
    }

    #[test]
    fn gcd_finds_planted_factor() {
        let p = 7;
        let common = [3, 1]; // x + 3
        let a = mul(&common, &[1, 0, 1], p);
        let b = mul(&common, &[3, 1, 1], p);
        // x^2+1 and x^2+x+3 are irreducible over F_7, so the gcd is exactly
        // the planted x + 3.
        assert_eq!(gcd(&a, &b, p).unwrap(), common);
    }

    #[test]
    fn inv_mod_is_inverse() {
        let p = 5;
        let m = [2, 0, 1]; // t^2 + 2, irreducible over F_5
        let a = [3, 4];
        let ai = inv_mod(&a, &m, p).unwrap();
        assert_eq!(mulmod(&a, &ai, &m, p).unwrap(), vec![1]);
    }

    #[test]
    fn powmod_fermat() {
        let p = 83;
        let m = [81, 3, 0, 1]; // irreducible cubic
        let e = BigUint::from(83u64).pow(3);
        // Frobenius to the field order fixes x.
        assert_eq!(powmod(&[0, 1], &e, &m, p).unwrap(), vec![0, 1]);
    }

    #[test]
    fn irreducibility_bootstrap() {
        assert!(is_irreducible(&[81, 3, 0, 1], 83).unwrap());
        assert!(is_irreducible(&[2, 0, 1], 5).unwrap());
        // t^2 + 4 = (t+1)(t+4) over F_5
        assert!(!is_irreducible(&[4, 0, 1], 5).unwrap());
        assert!(!is_irreducible(&[0, 0, 1], 5).unwrap());
    }

    #[test]
    fn prime_helpers() {
        assert_eq!(prime_divisors(1734), vec![2, 3, 17]);
        assert!(is_prime_u64(83));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(91));
    }
}
