//! Finite fields F_{p^n}, p an odd prime, presented as F_p[t]/(m(t)).
//!
//! A [`FieldCtx`] is an immutable description of the field (characteristic,
//! extension degree, modulus, enumeration cap), shared behind an `Arc` by
//! every element and polynomial that lives in it. Elements are dense
//! power-basis coordinate vectors of fixed length n with entries in [0, p);
//! two elements are equal iff their coordinate vectors are equal, so the
//! representation is canonical.
//!
//! Fields are deliberately small: everything downstream (point counting,
//! functional graphs, endomorphism verification) leans on exhaustive
//! enumeration, which is capped (default 10^6 elements) to keep brute force
//! at desk scale.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::fppoly;

/// Default ceiling for exhaustive element enumeration.
pub const DEFAULT_ENUM_CAP: u64 = 1_000_000;

/// An immutable finite field context F_{p^n} = F_p[t]/(m(t)).
pub struct FieldCtx {
    p: u64,
    n: usize,
    /// Monic, degree n, little-endian; `[0, 1]` when n = 1.
    modulus: Vec<u64>,
    enum_cap: u64,
}

impl FieldCtx {
    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Arc<Self>> {
        Self::new(p, 1, &[0, 1])
    }

    /// F_{p^n} with a caller-supplied monic irreducible modulus
    /// (little-endian, signed entries allowed and reduced mod p).
    pub fn new(p: u64, n: usize, modulus: &[i64]) -> Result<Arc<Self>> {
        if p < 3 || p % 2 == 0 || !fppoly::is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if p >= fppoly::MAX_PRIME {
            return Err(Error::PrimeTooLarge(p));
        }
        if n == 0 {
            return Err(Error::DegreeMismatch(
                "extension degree must be positive".into(),
            ));
        }
        let mut m: Vec<u64> = modulus
            .iter()
            .map(|&c| c.rem_euclid(p as i64) as u64)
            .collect();
        fppoly::normalize(&mut m);
        if fppoly::deg(&m) != Some(n) {
            return Err(Error::DegreeMismatch(format!(
                "modulus has degree {:?}, expected {}",
                fppoly::deg(&m),
                n
            )));
        }
        if *m.last().unwrap() != 1 {
            return Err(Error::InvalidData("modulus is not monic".into()));
        }
        if n == 1 {
            // F_p[t]/(t - c) is F_p itself; the representative is irrelevant.
            m = vec![0, 1];
        } else if !fppoly::is_irreducible(&m, p)? {
            return Err(Error::ReducibleModulus(p));
        }
        Ok(Arc::new(FieldCtx {
            p,
            n,
            modulus: m,
            enum_cap: DEFAULT_ENUM_CAP,
        }))
    }

    /// Same field with a different enumeration cap.
    pub fn with_enum_cap(self: &Arc<Self>, cap: u64) -> Arc<Self> {
        Arc::new(FieldCtx {
            p: self.p,
            n: self.n,
            modulus: self.modulus.clone(),
            enum_cap: cap,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Extension degree n.
    pub fn degree(&self) -> usize {
        self.n
    }

    /// The defining modulus, little-endian, length n + 1.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn enum_cap(&self) -> u64 {
        self.enum_cap
    }

    /// p^n, saturating at u128::MAX for absurd inputs.
    pub fn order_u128(&self) -> u128 {
        let mut acc = 1u128;
        for _ in 0..self.n {
            acc = acc.saturating_mul(self.p as u128);
        }
        acc
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.n as u32)
    }

    /// Two contexts describe the same field iff (p, n, modulus) agree.
    pub fn same_field(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other)
            || (self.p == other.p && self.n == other.n && self.modulus == other.modulus)
    }

    // ---- Element constructors ----

    pub fn zero(self: &Arc<Self>) -> FieldElem {
        FieldElem {
            ctx: Arc::clone(self),
            c: vec![0; self.n],
        }
    }

    pub fn one(self: &Arc<Self>) -> FieldElem {
        self.from_u64(1)
    }

    /// Embed an integer as a constant.
    pub fn from_u64(self: &Arc<Self>, v: u64) -> FieldElem {
        let mut c = vec![0; self.n];
        c[0] = v % self.p;
        FieldElem {
            ctx: Arc::clone(self),
            c,
        }
    }

    pub fn from_i64(self: &Arc<Self>, v: i64) -> FieldElem {
        self.from_u64(v.rem_euclid(self.p as i64) as u64)
    }

    /// Element from little-endian coordinates (at most n entries, padded with
    /// zeros; signed entries are reduced mod p).
    pub fn elem(self: &Arc<Self>, coords: &[i64]) -> Result<FieldElem> {
        if coords.len() > self.n {
            return Err(Error::DegreeMismatch(format!(
                "{} coordinates in a degree-{} extension",
                coords.len(),
                self.n
            )));
        }
        let mut c = vec![0u64; self.n];
        for (i, &v) in coords.iter().enumerate() {
            c[i] = v.rem_euclid(self.p as i64) as u64;
        }
        Ok(FieldElem {
            ctx: Arc::clone(self),
            c,
        })
    }

    /// Element from reduced coordinates; internal fast path.
    pub(crate) fn elem_raw(self: &Arc<Self>, mut c: Vec<u64>) -> FieldElem {
        debug_assert!(c.len() <= self.n && c.iter().all(|&v| v < self.p));
        c.resize(self.n, 0);
        FieldElem {
            ctx: Arc::clone(self),
            c,
        }
    }

    /// Element at a given position of the enumeration order.
    ///
    /// The order is lexicographic on coordinate vectors: position
    /// i has coordinates c_j = digit n-1-j of i in base p.
    pub fn elem_at(self: &Arc<Self>, index: u128) -> FieldElem {
        let mut c = vec![0u64; self.n];
        let mut i = index;
        for j in (0..self.n).rev() {
            c[j] = (i % self.p as u128) as u64;
            i /= self.p as u128;
        }
        debug_assert_eq!(i, 0, "index out of range");
        FieldElem {
            ctx: Arc::clone(self),
            c,
        }
    }

    /// All p^n elements in lexicographic coordinate order.
    pub fn elems(self: &Arc<Self>) -> Result<ElemIter> {
        let order = self.order_u128();
        if order > self.enum_cap as u128 {
            return Err(Error::FieldTooLarge {
                needed: order,
                cap: self.enum_cap,
            });
        }
        Ok(ElemIter {
            ctx: Arc::clone(self),
            next: 0,
            total: order as u64,
        })
    }
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{}", self.p, self.n)
        }
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

/// Iterator over all elements of an enumerable field.
pub struct ElemIter {
    ctx: Arc<FieldCtx>,
    next: u64,
    total: u64,
}

impl Iterator for ElemIter {
    type Item = FieldElem;

    fn next(&mut self) -> Option<FieldElem> {
        if self.next >= self.total {
            return None;
        }
        let e = self.ctx.elem_at(self.next as u128);
        self.next += 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for ElemIter {}

/// An element of F_{p^n}: n power-basis coordinates, each in [0, p).
#[derive(Clone)]
pub struct FieldElem {
    ctx: Arc<FieldCtx>,
    c: Vec<u64>,
}

impl FieldElem {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// Little-endian power-basis coordinates, length n.
    pub fn coords(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&v| v == 0)
    }

    /// Coordinates without trailing zeros, for the internal engine.
    fn stripped(&self) -> &[u64] {
        let mut len = self.c.len();
        while len > 0 && self.c[len - 1] == 0 {
            len -= 1;
        }
        &self.c[..len]
    }

    fn require_same_ctx(&self, other: &FieldElem) -> Result<()> {
        if self.ctx.same_field(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn checked_add(&self, rhs: &FieldElem) -> Result<FieldElem> {
        self.require_same_ctx(rhs)?;
        Ok(self
            .ctx
            .elem_raw(fppoly::add(self.stripped(), rhs.stripped(), self.ctx.p)))
    }

    pub fn checked_sub(&self, rhs: &FieldElem) -> Result<FieldElem> {
        self.require_same_ctx(rhs)?;
        Ok(self
            .ctx
            .elem_raw(fppoly::sub(self.stripped(), rhs.stripped(), self.ctx.p)))
    }

    pub fn checked_mul(&self, rhs: &FieldElem) -> Result<FieldElem> {
        self.require_same_ctx(rhs)?;
        let prod = fppoly::mul(self.stripped(), rhs.stripped(), self.ctx.p);
        let red = if self.ctx.n == 1 {
            prod
        } else {
            fppoly::rem(&prod, &self.ctx.modulus, self.ctx.p)?
        };
        Ok(self.ctx.elem_raw(red))
    }

    pub fn neg(&self) -> FieldElem {
        self.ctx.elem_raw(fppoly::neg(self.stripped(), self.ctx.p))
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let r = if self.ctx.n == 1 {
            vec![fppoly::inv_u64(self.c[0], self.ctx.p)?]
        } else {
            fppoly::inv_mod(self.stripped(), &self.ctx.modulus, self.ctx.p)?
        };
        Ok(self.ctx.elem_raw(r))
    }

    /// Square-and-multiply; 0^0 = 1 by convention.
    pub fn pow(&self, e: u64) -> FieldElem {
        self.pow_big(&BigUint::from(e))
    }

    pub fn pow_big(&self, e: &BigUint) -> FieldElem {
        let mut result = self.ctx.one();
        let mut sq = self.clone();
        for i in 0..e.bits() {
            if e.bit(i) {
                result = &result * &sq;
            }
            if i + 1 < e.bits() {
                sq = &sq * &sq;
            }
        }
        result
    }

    /// Quadratic character by Euler's criterion: 0 on zero, 1 on nonzero
    /// squares, -1 on nonresidues.
    pub fn quad_char(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let e = (self.ctx.order() - BigUint::one()) >> 1;
        if self.pow_big(&e).is_one() {
            1
        } else {
            -1
        }
    }

    /// A square root, if one exists, by Tonelli-Shanks. Deterministic: the
    /// nonresidue is the first one in enumeration order, and of the two roots
    /// the one with the smaller enumeration index is returned.
    pub fn sqrt(&self) -> Option<FieldElem> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if self.quad_char() != 1 {
            return None;
        }
        let one = BigUint::one();
        let q1: BigUint = self.ctx.order() - &one;
        let s = q1.trailing_zeros().expect("q - 1 > 0");
        let t: BigUint = &q1 >> s;
        let root = if s == 1 {
            // q = 3 mod 4: a^((q+1)/4) is a root.
            self.pow_big(&((self.ctx.order() + &one) >> 2))
        } else {
            let z = self.find_nonresidue();
            let mut m = s;
            let mut c = z.pow_big(&t);
            let mut u = self.pow_big(&t);
            let mut r = self.pow_big(&((&t + &one) >> 1));
            while !u.is_one() {
                let mut i = 0;
                let mut sq = u.clone();
                while !sq.is_one() {
                    sq = &sq * &sq;
                    i += 1;
                    debug_assert!(i < m);
                }
                let mut b = c;
                for _ in 0..m - i - 1 {
                    b = &b * &b;
                }
                m = i;
                c = &b * &b;
                u = &u * &c;
                r = &r * &b;
            }
            r
        };
        debug_assert!((&root * &root) == *self);
        let neg = root.neg();
        Some(if root.index() <= neg.index() { root } else { neg })
    }

    fn find_nonresidue(&self) -> FieldElem {
        // Half of all nonzero elements qualify; a short deterministic scan
        // of the enumeration order is plenty for desk-scale fields.
        let order = self.ctx.order_u128();
        let mut i = 1u128;
        while i < order {
            let cand = self.ctx.elem_at(i);
            if cand.quad_char() == -1 {
                return cand;
            }
            i += 1;
        }
        unreachable!("odd q has nonresidues");
    }

    /// Position in the enumeration order (lexicographic on coordinates).
    pub fn index(&self) -> u128 {
        let mut acc = 0u128;
        for &v in self.c.iter() {
            acc = acc * self.ctx.p as u128 + v as u128;
        }
        acc
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_field(&other.ctx) && self.c == other.c
    }
}

impl Eq for FieldElem {}

macro_rules! elem_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for &FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                self.$checked(rhs).expect("field context mismatch")
            }
        }
    };
}

elem_binop!(Add, add, checked_add);
elem_binop!(Sub, sub, checked_sub);
elem_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::neg(self)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctx.n == 1 {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "{:?}", self.c)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f83() -> Arc<FieldCtx> {
        FieldCtx::prime(83).unwrap()
    }

    fn f5t2() -> Arc<FieldCtx> {
        // F_25 as F_5[t]/(t^2 + 2)
        FieldCtx::new(5, 2, &[2, 0, 1]).unwrap()
    }

    /// Every (p, n) with p^n <= 343 gets one context, built on the first
    /// monic irreducible of degree n in enumeration order.
    fn small_fields() -> Vec<Arc<FieldCtx>> {
        let mut out = Vec::new();
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31].iter().copied() {
            let mut n = 1;
            while (p as u128).pow(n as u32) <= 343 {
                out.push(field_with_scanned_modulus(p, n));
                n += 1;
            }
        }
        out
    }

    fn field_with_scanned_modulus(p: u64, n: usize) -> Arc<FieldCtx> {
        if n == 1 {
            return FieldCtx::prime(p).unwrap();
        }
        let total = (p as u64).pow(n as u32);
        for i in 0..total {
            let mut coeffs = vec![0i64; n + 1];
            coeffs[n] = 1;
            let mut v = i;
            for j in (0..n).rev() {
                coeffs[j] = (v % p) as i64;
                v /= p;
            }
            if let Ok(ctx) = FieldCtx::new(p, n, &coeffs) {
                return ctx;
            }
        }
        panic!("no irreducible of degree {n} over F_{p}");
    }

    #[test]
    fn construction_validates() {
        assert!(FieldCtx::prime(83).is_ok());
        assert!(FieldCtx::prime(3).is_ok());
        assert!(matches!(FieldCtx::prime(2), Err(Error::NotPrime(2))));
        assert!(matches!(FieldCtx::prime(91), Err(Error::NotPrime(91))));
        assert!(matches!(
            FieldCtx::new(5, 2, &[1, 0, 0, 1]),
            Err(Error::DegreeMismatch(_))
        ));
        assert!(matches!(
            FieldCtx::new(5, 2, &[1, 0, 2]),
            Err(Error::InvalidData(_))
        ));
    }

    #[test]
    fn all_ten_irreducible_quadratics_over_f5() {
        // (25 - 5) / 2 = 10 monic irreducible quadratics; the rest must be
        // rejected as reducible.
        let mut ok = 0;
        let mut rejected = 0;
        for b in 0..5i64 {
            for c in 0..5i64 {
                match FieldCtx::new(5, 2, &[c, b, 1]) {
                    Ok(_) => ok += 1,
                    Err(Error::ReducibleModulus(5)) => rejected += 1,
                    Err(e) => panic!("unexpected error {e:?}"),
                }
            }
        }
        assert_eq!((ok, rejected), (10, 15));
    }

    #[test]
    fn arithmetic_matches_hand_values() {
        let f = f83();
        assert_eq!(&f.from_u64(56) + &f.from_u64(34), f.from_u64(7));
        assert_eq!(&f.from_i64(-32) * &f.from_u64(4), f.from_u64(38));
        let e = f5t2();
        let t = e.elem(&[0, 1]).unwrap();
        // t^2 reduces to -2 = 3 by the modulus.
        assert_eq!(&t * &t, e.from_u64(3));
    }

    #[test]
    fn inverses() {
        let f = f83();
        assert_eq!(f.from_u64(2).inv().unwrap(), f.from_u64(42));
        assert_eq!(f.from_u64(1).inv().unwrap(), f.from_u64(1));
        assert!(matches!(f.zero().inv(), Err(Error::DivisionByZero)));
        for ctx in small_fields() {
            for x in ctx.elems().unwrap() {
                if x.is_zero() {
                    continue;
                }
                assert!((&x.inv().unwrap() * &x).is_one(), "inv failed in {ctx}");
            }
        }
    }

    #[test]
    fn powers() {
        let f = f83();
        assert!(f.from_u64(2).pow(82).is_one());
        assert!(f.zero().pow(0).is_one());
        let e = f5t2();
        for x in e.elems().unwrap() {
            assert!(x.pow(0).is_one());
            if !x.is_zero() {
                assert!(x.pow(24).is_one());
            }
        }
    }

    #[test]
    fn enumeration_order_and_cap() {
        let f3 = FieldCtx::prime(3).unwrap();
        let vals: Vec<u64> = f3.elems().unwrap().map(|e| e.coords()[0]).collect();
        assert_eq!(vals, vec![0, 1, 2]);
        assert_eq!(f83().elems().unwrap().count(), 83);
        let e = f5t2();
        let all: Vec<FieldElem> = e.elems().unwrap().collect();
        assert_eq!(all.len(), 25);
        for (i, x) in all.iter().enumerate() {
            assert_eq!(x.index(), i as u128);
            assert_eq!(*x, e.elem_at(i as u128));
        }
        let capped = f83().with_enum_cap(10);
        assert!(matches!(capped.elems(), Err(Error::FieldTooLarge { .. })));
    }

    #[test]
    fn ring_axioms_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fields = [f83(), f5t2(), field_with_scanned_modulus(3, 3)];
        for ctx in &fields {
            let order = ctx.order_u128();
            for _ in 0..4_000 {
                let x = ctx.elem_at(rng.gen_range(0..order as u64) as u128);
                let y = ctx.elem_at(rng.gen_range(0..order as u64) as u128);
                let z = ctx.elem_at(rng.gen_range(0..order as u64) as u128);
                assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
                assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
                assert_eq!(&x + &y, &y + &x);
                assert_eq!(&x * &y, &y * &x);
                assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
                assert_eq!(&(&x - &y) + &y, x);
            }
        }
    }

    #[test]
    fn multiplicative_group_is_cyclic() {
        for ctx in [
            FieldCtx::prime(3).unwrap(),
            FieldCtx::prime(7).unwrap(),
            f5t2(),
            field_with_scanned_modulus(3, 3),
        ] {
            let order = ctx.order_u128() as u64 - 1;
            let has_generator = ctx.elems().unwrap().any(|x| {
                if x.is_zero() {
                    return false;
                }
                // ord(x) = p^n - 1 iff x^((p^n-1)/t) != 1 for every prime t.
                fppoly::prime_divisors(order)
                    .iter()
                    .all(|&t| !x.pow(order / t).is_one())
            });
            assert!(has_generator, "no generator found in {ctx}");
        }
    }

    #[test]
    fn canonical_round_trip() {
        let e = f5t2();
        for a in 0..5i64 {
            for b in 0..5i64 {
                let x = e.elem(&[a, b]).unwrap();
                assert_eq!(x.coords(), &[a as u64, b as u64]);
            }
        }
        assert!(e.elem(&[1, 2, 3]).is_err());
        // Signed coordinates reduce into range.
        assert_eq!(e.elem(&[-1, -7]).unwrap().coords(), &[4, 3]);
    }

    #[test]
    fn square_roots() {
        for ctx in small_fields() {
            let mut squares = 0;
            for x in ctx.elems().unwrap() {
                match x.quad_char() {
                    1 => {
                        squares += 1;
                        let r = x.sqrt().expect("square must have a root");
                        assert_eq!(&r * &r, x);
                    }
                    -1 => assert!(x.sqrt().is_none()),
                    _ => assert!(x.is_zero() && x.sqrt().unwrap().is_zero()),
                }
            }
            // Exactly (q - 1) / 2 nonzero squares.
            assert_eq!(squares as u128, (ctx.order_u128() - 1) / 2);
        }
    }

    #[test]
    fn context_mismatch_detected() {
        let a = f83().from_u64(1);
        let b = FieldCtx::prime(5).unwrap().from_u64(1);
        assert!(matches!(a.checked_add(&b), Err(Error::ContextMismatch)));
        // Structurally identical contexts interoperate.
        let c = FieldCtx::prime(83).unwrap().from_u64(6);
        assert_eq!(a.checked_add(&c).unwrap(), f83().from_u64(7));
    }
}
