//! Imaginary quadratic orders: the endomorphism-ring arithmetic behind the
//! valuation bookkeeping.
//!
//! For squarefree D < 0 the maximal order of Q(sqrt(D)) is Z[w] with
//! w = (1 + sqrt(D))/2 when D = 1 (mod 4) and w = sqrt(D) otherwise; the
//! discriminant is D respectively 4D. Elements are stored on the basis
//! (1, w) with arbitrary-precision coordinates, since the chains delta_i =
//! rho^(l^i) grow doubly exponentially.
//!
//! The key primitive is exact division x/y = x * conj(y) / norm(y), tested
//! coordinate-wise for integrality. On top of it sit the valuation
//! nu_alpha (how often a fixed prime-norm alpha divides), the recovery of
//! the Frobenius element from its trace and norm, and the lemma check that
//! nu_alpha(delta^e - 1) stays flat for e < l and jumps by exactly one at
//! e = l, provided nu_alpha(delta - 1) >= 1. That jump, iterated, is what
//! fixes the factorization depth of the whole construction.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fppoly;

/// Largest |D| accepted; keeps the squarefree check a cheap trial division.
const MAX_ABS_D: i64 = 1 << 31;

/// Bound on the norm of alpha in valuation routines, so the e = 1..l sweep
/// stays finite work.
const MAX_ALPHA_NORM: u64 = 1 << 20;

/// The maximal order of an imaginary quadratic field Q(sqrt(D)).
#[derive(Debug, PartialEq, Eq)]
pub struct QuadOrder {
    d: i64,
    disc: i64,
}

impl QuadOrder {
    /// D must be negative and squarefree.
    pub fn new(d: i64) -> Result<Arc<QuadOrder>> {
        if d >= 0 {
            return Err(Error::InvalidData(format!(
                "discriminant base {d} must be negative"
            )));
        }
        if d < -MAX_ABS_D {
            return Err(Error::InvalidData(format!("|{d}| is out of range")));
        }
        let m = (-d) as u64;
        let mut rest = m;
        for q in fppoly::prime_divisors(m) {
            let mut count = 0;
            while rest % q == 0 {
                rest /= q;
                count += 1;
            }
            if count > 1 {
                return Err(Error::InvalidData(format!("{d} is not squarefree")));
            }
        }
        let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        Ok(Arc::new(QuadOrder { d, disc }))
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// Field discriminant: D when D = 1 (mod 4), else 4D.
    pub fn disc(&self) -> i64 {
        self.disc
    }

    /// True when the basis element w is (1 + sqrt(D))/2.
    fn half_basis(&self) -> bool {
        self.d.rem_euclid(4) == 1
    }

    /// norm(w): (1 - D)/4 on the half basis, -D otherwise.
    fn w_norm(&self) -> i64 {
        if self.half_basis() {
            (1 - self.d) / 4
        } else {
            -self.d
        }
    }

    /// trace(w): 1 on the half basis, 0 otherwise.
    fn w_trace(&self) -> i64 {
        if self.half_basis() {
            1
        } else {
            0
        }
    }

    pub fn elem(self: &Arc<Self>, c0: i64, c1: i64) -> QuadInt {
        self.elem_big(BigInt::from(c0), BigInt::from(c1))
    }

    pub fn elem_big(self: &Arc<Self>, c0: BigInt, c1: BigInt) -> QuadInt {
        QuadInt {
            ord: Arc::clone(self),
            c0,
            c1,
        }
    }

    pub fn zero(self: &Arc<Self>) -> QuadInt {
        self.elem(0, 0)
    }

    pub fn one(self: &Arc<Self>) -> QuadInt {
        self.elem(1, 0)
    }

    pub fn same_order(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || self.d == other.d
    }

    /// Solve x + conj(x) = t, x * conj(x) = q0 in this order. Returns both
    /// conjugate solutions, the one with positive w-coordinate first.
    ///
    /// A solution exists exactly when t^2 - 4 q0 = c^2 * disc for a
    /// positive integer c; the Frobenius of an ordinary curve with CM by
    /// this field always satisfies that with its trace and field size.
    pub fn frobenius_from_trace(
        self: &Arc<Self>,
        t: i64,
        q0: u64,
    ) -> Result<(QuadInt, QuadInt)> {
        let not_in_order = || Error::NotInOrder {
            disc: self.disc,
            t,
            q0,
        };
        let s = (t as i128) * (t as i128) - 4 * q0 as i128;
        if s >= 0 || s % self.disc as i128 != 0 {
            return Err(not_in_order());
        }
        let c2 = s / self.disc as i128; // positive: s and disc both negative
        let c = (c2 as f64).sqrt().round() as i128;
        let c = (c - 2..=c + 2)
            .find(|&x| x > 0 && x * x == c2)
            .ok_or_else(not_in_order)?;
        let c = c as i64;
        let x = if self.half_basis() {
            // x = (t + c sqrt(D)) / 2 = (t - c)/2 + c w; t = c (mod 2)
            // holds because t^2 = c^2 D = c^2 (mod 4).
            self.elem((t - c) / 2, c)
        } else {
            // disc = 4D forces t even; x = t/2 + c sqrt(D).
            self.elem(t / 2, c)
        };
        debug_assert_eq!(x.trace(), BigInt::from(t));
        debug_assert_eq!(x.norm(), BigInt::from(q0));
        Ok((x.clone(), x.conj()))
    }
}

impl fmt::Display for QuadOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[w], w^2 = {}w + {}", self.w_trace(), -self.w_norm())
    }
}

/// An element c0 + c1*w of a [`QuadOrder`].
#[derive(Clone, PartialEq, Eq)]
pub struct QuadInt {
    ord: Arc<QuadOrder>,
    c0: BigInt,
    c1: BigInt,
}

impl QuadInt {
    pub fn order(&self) -> &Arc<QuadOrder> {
        &self.ord
    }

    pub fn c0(&self) -> &BigInt {
        &self.c0
    }

    pub fn c1(&self) -> &BigInt {
        &self.c1
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.c1.is_zero() && self.c0 == BigInt::from(1)
    }

    fn require_same_order(&self, other: &QuadInt) -> Result<()> {
        if self.ord.same_order(&other.ord) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn checked_add(&self, rhs: &QuadInt) -> Result<QuadInt> {
        self.require_same_order(rhs)?;
        Ok(self.ord.elem_big(&self.c0 + &rhs.c0, &self.c1 + &rhs.c1))
    }

    pub fn checked_sub(&self, rhs: &QuadInt) -> Result<QuadInt> {
        self.require_same_order(rhs)?;
        Ok(self.ord.elem_big(&self.c0 - &rhs.c0, &self.c1 - &rhs.c1))
    }

    pub fn neg(&self) -> QuadInt {
        self.ord.elem_big(-&self.c0, -&self.c1)
    }

    /// (a0 + a1 w)(b0 + b1 w) with w^2 = tr(w) w - N(w).
    pub fn checked_mul(&self, rhs: &QuadInt) -> Result<QuadInt> {
        self.require_same_order(rhs)?;
        let cross = &self.c0 * &rhs.c1 + &self.c1 * &rhs.c0;
        let ww = &self.c1 * &rhs.c1;
        let c0 = &self.c0 * &rhs.c0 - &ww * self.ord.w_norm();
        let c1 = cross + ww * self.ord.w_trace();
        Ok(self.ord.elem_big(c0, c1))
    }

    pub fn conj(&self) -> QuadInt {
        // conj(w) = tr(w) - w.
        let c0 = &self.c0 + &self.c1 * self.ord.w_trace();
        let c1 = -&self.c1;
        self.ord.elem_big(c0, c1)
    }

    pub fn trace(&self) -> BigInt {
        &self.c0 * 2 + &self.c1 * self.ord.w_trace()
    }

    /// Positive definite for D < 0: zero only at zero.
    pub fn norm(&self) -> BigInt {
        let n = &self.c0 * &self.c0
            + &self.c0 * &self.c1 * self.ord.w_trace()
            + &self.c1 * &self.c1 * self.ord.w_norm();
        debug_assert!(!n.is_negative());
        n
    }

    pub fn pow(&self, e: u64) -> QuadInt {
        let mut result = self.ord.one();
        let mut sq = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.checked_mul(&sq).expect("same order");
            }
            e >>= 1;
            if e > 0 {
                sq = sq.checked_mul(&sq).expect("same order");
            }
        }
        result
    }

    /// Exact quotient self/y via self * conj(y) / norm(y); fails with
    /// `NotDivisible` when the quotient leaves the order.
    pub fn exact_div(&self, y: &QuadInt) -> Result<QuadInt> {
        self.require_same_order(y)?;
        if y.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let z = self.checked_mul(&y.conj())?;
        let n = y.norm();
        if (&z.c0 % &n).is_zero() && (&z.c1 % &n).is_zero() {
            Ok(self.ord.elem_big(&z.c0 / &n, &z.c1 / &n))
        } else {
            Err(Error::NotDivisible)
        }
    }

    pub fn divides(&self, x: &QuadInt) -> Result<bool> {
        match x.exact_div(self) {
            Ok(_) => Ok(true),
            Err(Error::NotDivisible) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

macro_rules! quad_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for &QuadInt {
            type Output = QuadInt;
            fn $method(self, rhs: &QuadInt) -> QuadInt {
                self.$checked(rhs).expect("quadratic order mismatch")
            }
        }
    };
}

quad_binop!(Add, add, checked_add);
quad_binop!(Sub, sub, checked_sub);
quad_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt::neg(self)
    }
}

impl fmt::Debug for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.c0, self.c1)
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Check that alpha is usable as the valuation element: prime norm, not
/// too large, and unramified (its norm does not divide the discriminant).
fn require_valuation_element(alpha: &QuadInt) -> Result<u64> {
    if alpha.is_zero() {
        return Err(Error::DegenerateAlpha("alpha is zero".into()));
    }
    let norm = alpha.norm();
    let l = norm
        .to_u64()
        .filter(|&l| l <= MAX_ALPHA_NORM)
        .ok_or_else(|| Error::DegenerateAlpha(format!("norm {norm} is out of range")))?;
    if !fppoly::is_prime_u64(l) {
        return Err(Error::DegenerateAlpha(format!("norm {l} is not prime")));
    }
    if alpha.order().disc() % l as i64 == 0 {
        return Err(Error::DegenerateAlpha(format!(
            "{l} ramifies: it divides the discriminant {}",
            alpha.order().disc()
        )));
    }
    Ok(l)
}

/// alpha-adic valuation: the largest k with alpha^k | x, together with the
/// cofactor x / alpha^k. x must be nonzero.
pub fn nu_alpha(x: &QuadInt, alpha: &QuadInt) -> Result<(u32, QuadInt)> {
    require_valuation_element(alpha)?;
    if x.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let mut k = 0u32;
    let mut rest = x.clone();
    loop {
        match rest.exact_div(alpha) {
            Ok(q) => {
                rest = q;
                k += 1;
            }
            Err(Error::NotDivisible) => return Ok((k, rest)),
            Err(e) => return Err(e),
        }
    }
}

/// The tower delta_i = rho^(l^i) for i = 0..=depth, where rho = pi^n_exp.
pub fn delta_chain(pi: &QuadInt, n_exp: u32, l: u32, depth: usize) -> Result<Vec<QuadInt>> {
    if n_exp == 0 {
        return Err(Error::InvalidData("rho exponent must be positive".into()));
    }
    if l < 2 {
        return Err(Error::InvalidData(format!("transform degree {l} is too small")));
    }
    let mut out = Vec::with_capacity(depth + 1);
    out.push(pi.pow(n_exp as u64));
    for i in 0..depth {
        let next = out[i].pow(l as u64);
        out.push(next);
    }
    Ok(out)
}

/// Result of sweeping nu_alpha(delta^e - 1) for e = 1..=l.
#[derive(Clone, Debug)]
pub struct ValLemmaReport {
    /// nu_alpha(delta - 1).
    pub base_val: u32,
    /// Whether the lemma hypothesis base_val >= 1 holds; the flat-then-jump
    /// pattern is only guaranteed under it.
    pub hypothesis_met: bool,
    /// nu_alpha(delta^e - 1) for e = 1..=l (index e - 1).
    pub vals: Vec<u32>,
    /// vals equals [k, k, ..., k, k + 1] with k = base_val.
    pub pattern_holds: bool,
}

/// Sweep the valuations of delta^e - 1 for e = 1..=l and compare with the
/// flat-then-jump shape. delta must satisfy delta != 1 and alpha must be a
/// valid valuation element of norm l.
pub fn check_val_lemma(delta: &QuadInt, alpha: &QuadInt, l: u64) -> Result<ValLemmaReport> {
    let norm_l = require_valuation_element(alpha)?;
    if norm_l != l {
        return Err(Error::DegenerateAlpha(format!(
            "expected norm {l}, found {norm_l}"
        )));
    }
    let one = delta.order().one();
    let mut vals = Vec::with_capacity(l as usize);
    let mut power = delta.clone();
    for _ in 1..=l {
        let (k, _) = nu_alpha(&power.checked_sub(&one)?, alpha)?;
        vals.push(k);
        power = power.checked_mul(delta)?;
    }
    let base_val = vals[0];
    let pattern_holds = vals[..l as usize - 1].iter().all(|&v| v == base_val)
        && vals[l as usize - 1] == base_val + 1;
    Ok(ValLemmaReport {
        base_val,
        hypothesis_met: base_val >= 1,
        vals,
        pattern_holds,
    })
}
