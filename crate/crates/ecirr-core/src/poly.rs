//! Dense univariate polynomials over a [`FieldCtx`], with the factorization
//! and irreducibility machinery the iterative construction leans on.
//!
//! Coefficients are stored flat: a polynomial with k + 1 terms over F_{p^n}
//! keeps k + 1 chunks of n little-endian coordinates each. The invariant is
//! canonical form: the highest chunk is nonzero, and the zero polynomial is
//! the empty vector (degree `None`). Over prime fields (n = 1) every
//! operation short-circuits to the raw engine in `fppoly`; extension fields
//! go through generic chunk arithmetic.
//!
//! Factorization is squarefree decomposition, then distinct-degree splitting,
//! then randomized equal-degree splitting. The randomness only affects how
//! fast the splitting converges: factors are sorted canonically by (degree,
//! lexicographic coefficient order), so the output is independent of the
//! seed. This replaces the unspecified factor ordering of general-purpose
//! computer algebra systems and is what makes sequence runs reproducible.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ff::{FieldCtx, FieldElem};
use crate::fppoly;

/// Degree bounds above which modular composition switches from Horner to
/// baby-step/giant-step (prime fields only; extensions always use Horner).
const COMPOSE_BSGS_MIN_MOD_DEG: usize = 96;
const COMPOSE_BSGS_MIN_ARG_DEG: usize = 32;

/// Retry budget for one equal-degree split; each try succeeds with
/// probability about 1/2.
const EDF_RETRY_CAP: u32 = 64;

/// A dense univariate polynomial over a finite field.
#[derive(Clone)]
pub struct Poly {
    ctx: Arc<FieldCtx>,
    /// terms * n coordinates, little-endian at both levels; highest chunk
    /// nonzero (canonical), empty for the zero polynomial.
    c: Vec<u64>,
}

impl Poly {
    // ---- Constructors ----

    pub fn zero(ctx: &Arc<FieldCtx>) -> Poly {
        Poly {
            ctx: Arc::clone(ctx),
            c: Vec::new(),
        }
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> Poly {
        Poly::constant(ctx.one())
    }

    /// The monomial x.
    pub fn x(ctx: &Arc<FieldCtx>) -> Poly {
        Poly::monomial(ctx.one(), 1)
    }

    pub fn constant(c: FieldElem) -> Poly {
        let ctx = Arc::clone(c.ctx());
        let mut p = Poly {
            ctx,
            c: c.coords().to_vec(),
        };
        p.normalize();
        p
    }

    /// c * x^k.
    pub fn monomial(c: FieldElem, k: usize) -> Poly {
        let ctx = Arc::clone(c.ctx());
        let n = ctx.degree();
        let mut v = vec![0u64; n * k];
        v.extend_from_slice(c.coords());
        let mut p = Poly { ctx, c: v };
        p.normalize();
        p
    }

    /// Polynomial with integer coefficients embedded as constants
    /// (little-endian); works over any extension.
    pub fn from_ints(ctx: &Arc<FieldCtx>, coeffs: &[i64]) -> Poly {
        let n = ctx.degree();
        let mut v = vec![0u64; n * coeffs.len()];
        for (k, &a) in coeffs.iter().enumerate() {
            v[k * n] = a.rem_euclid(ctx.p() as i64) as u64;
        }
        let mut p = Poly {
            ctx: Arc::clone(ctx),
            c: v,
        };
        p.normalize();
        p
    }

    /// Polynomial from explicit field elements (little-endian).
    pub fn from_elems(ctx: &Arc<FieldCtx>, coeffs: &[FieldElem]) -> Result<Poly> {
        let n = ctx.degree();
        let mut v = vec![0u64; n * coeffs.len()];
        for (k, e) in coeffs.iter().enumerate() {
            if !ctx.same_field(e.ctx()) {
                return Err(Error::ContextMismatch);
            }
            v[k * n..(k + 1) * n].copy_from_slice(e.coords());
        }
        let mut p = Poly {
            ctx: Arc::clone(ctx),
            c: v,
        };
        p.normalize();
        Ok(p)
    }

    pub(crate) fn from_raw(ctx: &Arc<FieldCtx>, c: Vec<u64>) -> Poly {
        debug_assert_eq!(c.len() % ctx.degree(), 0);
        let mut p = Poly {
            ctx: Arc::clone(ctx),
            c,
        };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        let n = self.ctx.degree();
        while self.c.len() >= n && self.c[self.c.len() - n..].iter().all(|&v| v == 0) {
            self.c.truncate(self.c.len() - n);
        }
    }

    // ---- Accessors ----

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let n = self.ctx.degree();
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() / n - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn terms(&self) -> usize {
        self.c.len() / self.ctx.degree()
    }

    fn chunk(&self, k: usize) -> &[u64] {
        let n = self.ctx.degree();
        &self.c[k * n..(k + 1) * n]
    }

    /// Coefficient of x^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> FieldElem {
        if k >= self.terms() {
            self.ctx.zero()
        } else {
            self.ctx.elem_raw(self.chunk(k).to_vec())
        }
    }

    pub fn lead(&self) -> FieldElem {
        match self.degree() {
            None => self.ctx.zero(),
            Some(d) => self.coeff(d),
        }
    }

    pub fn is_monic(&self) -> bool {
        !self.is_zero() && self.lead().is_one()
    }

    pub fn coeffs(&self) -> Vec<FieldElem> {
        (0..self.terms()).map(|k| self.coeff(k)).collect()
    }

    pub(crate) fn raw(&self) -> &[u64] {
        &self.c
    }

    fn require_same_ctx(&self, other: &Poly) -> Result<()> {
        if self.ctx.same_field(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// Canonical order: by degree, then lexicographically on the flat
    /// little-endian coordinate vector (constant coefficient first).
    pub fn canonical_cmp(&self, other: &Poly) -> Ordering {
        let da = self.c.len();
        let db = other.c.len();
        da.cmp(&db).then_with(|| self.c.cmp(&other.c))
    }

    // ---- Ring operations ----

    pub fn checked_add(&self, rhs: &Poly) -> Result<Poly> {
        self.require_same_ctx(rhs)?;
        let p = self.ctx.p();
        let mut out = vec![0u64; self.c.len().max(rhs.c.len())];
        for (i, o) in out.iter_mut().enumerate() {
            let a = self.c.get(i).copied().unwrap_or(0);
            let b = rhs.c.get(i).copied().unwrap_or(0);
            *o = (a + b) % p;
        }
        Ok(Poly::from_raw(&self.ctx, out))
    }

    pub fn checked_sub(&self, rhs: &Poly) -> Result<Poly> {
        self.require_same_ctx(rhs)?;
        let p = self.ctx.p();
        let mut out = vec![0u64; self.c.len().max(rhs.c.len())];
        for (i, o) in out.iter_mut().enumerate() {
            let a = self.c.get(i).copied().unwrap_or(0);
            let b = rhs.c.get(i).copied().unwrap_or(0);
            *o = (a + p - b) % p;
        }
        Ok(Poly::from_raw(&self.ctx, out))
    }

    pub fn neg(&self) -> Poly {
        let p = self.ctx.p();
        let out = self.c.iter().map(|&a| (p - a) % p).collect();
        Poly::from_raw(&self.ctx, out)
    }

    pub fn checked_mul(&self, rhs: &Poly) -> Result<Poly> {
        self.require_same_ctx(rhs)?;
        if self.is_zero() || rhs.is_zero() {
            return Ok(Poly::zero(&self.ctx));
        }
        let p = self.ctx.p();
        let n = self.ctx.degree();
        if n == 1 {
            return Ok(Poly::from_raw(&self.ctx, fppoly::mul(&self.c, &rhs.c, p)));
        }
        // Chunked schoolbook: accumulate unreduced chunk products (degree
        // up to 2n - 2), then reduce each output chunk by the modulus once.
        let (ta, tb) = (self.terms(), rhs.terms());
        let width = 2 * n - 1;
        let mut acc = vec![0u128; (ta + tb - 1) * width];
        for i in 0..ta {
            let ca = self.chunk(i);
            for j in 0..tb {
                let cb = rhs.chunk(j);
                let base = (i + j) * width;
                for (u, &a) in ca.iter().enumerate() {
                    if a == 0 {
                        continue;
                    }
                    for (v, &b) in cb.iter().enumerate() {
                        acc[base + u + v] += a as u128 * b as u128;
                    }
                }
            }
        }
        let modulus = self.ctx.modulus().to_vec();
        let mut out = vec![0u64; (ta + tb - 1) * n];
        let mut tmp = vec![0u64; width];
        for k in 0..ta + tb - 1 {
            for (u, t) in tmp.iter_mut().enumerate() {
                *t = (acc[k * width + u] % p as u128) as u64;
            }
            let mut red = tmp.clone();
            fppoly::normalize(&mut red);
            let red = fppoly::rem(&red, &modulus, p)?;
            out[k * n..k * n + red.len()].copy_from_slice(&red);
        }
        Ok(Poly::from_raw(&self.ctx, out))
    }

    pub fn mul_elem(&self, c: &FieldElem) -> Result<Poly> {
        self.checked_mul(&Poly::constant(c.clone()))
    }

    /// Plain power by repeated squaring.
    pub fn pow(&self, e: u64) -> Poly {
        let mut result = Poly::one(&self.ctx);
        let mut sq = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        result
    }

    /// Euclidean division: f = q * g + r with deg r < deg g.
    pub fn divrem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.require_same_ctx(divisor)?;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.ctx.p();
        let n = self.ctx.degree();
        if n == 1 {
            let (q, r) = fppoly::divrem(&self.c, &divisor.c, p)?;
            return Ok((
                Poly::from_raw(&self.ctx, q),
                Poly::from_raw(&self.ctx, r),
            ));
        }
        let db = divisor.degree().unwrap();
        let da = match self.degree() {
            None => return Ok((Poly::zero(&self.ctx), Poly::zero(&self.ctx))),
            Some(d) if d < db => return Ok((Poly::zero(&self.ctx), self.clone())),
            Some(d) => d,
        };
        let modulus = self.ctx.modulus().to_vec();
        let lead_inv = divisor.lead().inv()?;
        let lead_inv = strip(lead_inv.coords());
        let mut r: Vec<Vec<u64>> = (0..=da).map(|k| strip(self.chunk(k)).to_vec()).collect();
        let mut q = vec![vec![0u64; 0]; da - db + 1];
        for i in (0..=da - db).rev() {
            let top = std::mem::take(&mut r[i + db]);
            if top.is_empty() {
                continue;
            }
            let qi = fppoly::mulmod(&top, lead_inv, &modulus, p)?;
            for j in 0..db {
                let t = fppoly::mulmod(&qi, strip(divisor.chunk(j)), &modulus, p)?;
                r[i + j] = fppoly::sub(&r[i + j], &t, p);
            }
            q[i] = qi;
        }
        let qp = Poly::from_chunks(&self.ctx, &q);
        let rp = Poly::from_chunks(&self.ctx, &r[..db]);
        Ok((qp, rp))
    }

    fn from_chunks(ctx: &Arc<FieldCtx>, chunks: &[Vec<u64>]) -> Poly {
        let n = ctx.degree();
        let mut v = vec![0u64; chunks.len() * n];
        for (k, ch) in chunks.iter().enumerate() {
            v[k * n..k * n + ch.len()].copy_from_slice(ch);
        }
        Poly::from_raw(ctx, v)
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly> {
        Ok(self.divrem(divisor)?.1)
    }

    /// Monic associate; zero stays zero.
    pub fn make_monic(&self) -> Result<Poly> {
        if self.is_zero() || self.is_monic() {
            return Ok(self.clone());
        }
        self.mul_elem(&self.lead().inv()?)
    }

    /// Monic gcd; gcd(0, 0) is an error.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        self.require_same_ctx(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(Error::BothZero);
        }
        let p = self.ctx.p();
        if self.ctx.degree() == 1 {
            return Ok(Poly::from_raw(&self.ctx, fppoly::gcd(&self.c, &other.c, p)?));
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        a.make_monic()
    }

    pub fn derivative(&self) -> Poly {
        let n = self.ctx.degree();
        let p = self.ctx.p();
        if self.terms() <= 1 {
            return Poly::zero(&self.ctx);
        }
        let mut v = vec![0u64; self.c.len() - n];
        for k in 1..self.terms() {
            let scale = (k as u64) % p;
            for u in 0..n {
                v[(k - 1) * n + u] =
                    ((self.c[k * n + u] as u128 * scale as u128) % p as u128) as u64;
            }
        }
        Poly::from_raw(&self.ctx, v)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &FieldElem) -> Result<FieldElem> {
        if !self.ctx.same_field(x.ctx()) {
            return Err(Error::ContextMismatch);
        }
        if self.ctx.degree() == 1 {
            let v = fppoly::eval(&self.c, x.coords()[0], self.ctx.p());
            return Ok(self.ctx.from_u64(v));
        }
        let mut acc = self.ctx.zero();
        for k in (0..self.terms()).rev() {
            acc = &(&acc * x) + &self.coeff(k);
        }
        Ok(acc)
    }

    /// self^e mod m by square-and-multiply.
    pub fn powmod(&self, e: &BigUint, m: &Poly) -> Result<Poly> {
        self.require_same_ctx(m)?;
        match m.degree() {
            None => return Err(Error::DivisionByZero),
            Some(0) => return Err(Error::DegreeZero),
            _ => {}
        }
        if self.ctx.degree() == 1 {
            let r = fppoly::powmod(&self.c, e, &m.c, self.ctx.p())?;
            return Ok(Poly::from_raw(&self.ctx, r));
        }
        let mut result = Poly::one(&self.ctx).rem(m)?;
        let mut sq = self.rem(m)?;
        for i in 0..e.bits() {
            if e.bit(i) {
                result = result.checked_mul(&sq)?.rem(m)?;
            }
            if i + 1 < e.bits() {
                sq = sq.checked_mul(&sq)?.rem(m)?;
            }
        }
        Ok(result)
    }

    /// self(g) mod m. Horner for small inputs, baby-step/giant-step over
    /// prime fields once the degrees justify the precomputed power table.
    pub fn compose_mod(&self, g: &Poly, m: &Poly) -> Result<Poly> {
        self.require_same_ctx(g)?;
        self.require_same_ctx(m)?;
        let dm = match m.degree() {
            None => return Err(Error::DivisionByZero),
            Some(0) => return Err(Error::DegreeZero),
            Some(d) => d,
        };
        let df = match self.degree() {
            None | Some(0) => return self.rem(m),
            Some(d) => d,
        };
        if self.ctx.degree() == 1 && dm >= COMPOSE_BSGS_MIN_MOD_DEG && df >= COMPOSE_BSGS_MIN_ARG_DEG
        {
            self.compose_mod_bsgs(g, m)
        } else {
            self.compose_mod_horner(g, m)
        }
    }

    fn compose_mod_horner(&self, g: &Poly, m: &Poly) -> Result<Poly> {
        let mut acc = Poly::zero(&self.ctx);
        let g = g.rem(m)?;
        for k in (0..self.terms()).rev() {
            acc = acc.checked_mul(&g)?.rem(m)?;
            acc = acc.checked_add(&Poly::constant(self.coeff(k)))?;
        }
        acc.rem(m)
    }

    /// Brent-Kung style composition: split self into s-coefficient blocks,
    /// evaluate each block at g with a precomputed power table (scalar work
    /// only), and combine blocks by Horner in g^s. Prime fields only.
    fn compose_mod_bsgs(&self, g: &Poly, m: &Poly) -> Result<Poly> {
        let p = self.ctx.p();
        let df = self.degree().unwrap();
        let s = ((df + 1) as f64).sqrt().ceil() as usize;
        let g = g.rem(m)?;
        // Baby steps: g^0 .. g^s mod m as raw prime-field vectors.
        let mut pows: Vec<Vec<u64>> = Vec::with_capacity(s + 1);
        pows.push(vec![1]);
        for i in 1..=s {
            let prev = &pows[i - 1];
            pows.push(fppoly::rem(&fppoly::mul(prev, &g.c, p), &m.c, p)?);
        }
        let giant = pows[s].clone();
        let blocks = df / s + 1;
        let dm = m.degree().unwrap();
        let mut acc: Vec<u64> = Vec::new();
        for blk in (0..blocks).rev() {
            acc = fppoly::rem(&fppoly::mul(&acc, &giant, p), &m.c, p)?;
            // Block value sum_j f_{blk*s+j} g^j accumulated coefficient-wise.
            let mut lazy = vec![0u128; dm.max(1)];
            for j in 0..s {
                let k = blk * s + j;
                if k >= self.terms() {
                    break;
                }
                let fc = self.c[k];
                if fc == 0 {
                    continue;
                }
                for (u, &gv) in pows[j].iter().enumerate() {
                    lazy[u] += fc as u128 * gv as u128;
                }
            }
            let mut block_val: Vec<u64> =
                lazy.into_iter().map(|v| (v % p as u128) as u64).collect();
            fppoly::normalize(&mut block_val);
            acc = fppoly::add(&acc, &block_val, p);
        }
        Ok(Poly::from_raw(&self.ctx, fppoly::rem(&acc, &m.c, p)?))
    }

    // ---- Irreducibility ----

    /// Rabin's test: f of degree k is irreducible over F_Q (Q = p^n) iff
    /// x^{Q^k} = x (mod f) and gcd(x^{Q^{k/t}} - x, f) = 1 for every prime
    /// t | k. Frobenius powers x^{Q^j} mod f are built by an addition chain
    /// of modular compositions.
    pub fn is_irreducible(&self) -> Result<bool> {
        let k = match self.degree() {
            None | Some(0) => return Err(Error::DegreeZero),
            Some(d) => d,
        };
        if k == 1 {
            return Ok(true);
        }
        let f = self.make_monic()?;
        let x = Poly::x(&self.ctx);
        let mut ladder = FrobeniusLadder::new(&f)?;
        for t in fppoly::prime_divisors(k as u64) {
            let h = ladder.power(k as u64 / t)?;
            let g = h.checked_sub(&x)?.gcd(&f)?;
            if g.degree() != Some(0) {
                return Ok(false);
            }
        }
        Ok(ladder.power(k as u64)? == x)
    }

    // ---- Factorization ----

    /// Complete factorization into monic irreducibles times a unit.
    ///
    /// The seed drives only the equal-degree splitting; the canonical sort
    /// makes the result seed-independent.
    pub fn factor(&self, seed: u64) -> Result<Factorization> {
        match self.degree() {
            None | Some(0) => return Err(Error::DegreeZero),
            _ => {}
        }
        let unit = self.lead();
        let monic = self.make_monic()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut factors: Vec<(Poly, u32)> = Vec::new();
        for (part, mult) in squarefree_parts(&monic)? {
            for (sf, d) in distinct_degree_parts(&part)? {
                for irr in equal_degree_split(&sf, d, &mut rng)? {
                    factors.push((irr, mult));
                }
            }
        }
        factors.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        Ok(Factorization { unit, factors })
    }

    /// Distinct monic irreducible factors in canonical order.
    pub fn distinct_factors(&self, seed: u64) -> Result<Vec<Poly>> {
        Ok(self.factor(seed)?.factors.into_iter().map(|(f, _)| f).collect())
    }

    /// Reinterpret a prime-field polynomial over an extension of the same
    /// characteristic (coefficients embed as constants).
    pub fn lift_to(&self, target: &Arc<FieldCtx>) -> Result<Poly> {
        if self.ctx.degree() != 1 {
            return Err(Error::InvalidData(
                "only prime-field polynomials lift coefficient-wise".into(),
            ));
        }
        if target.p() != self.ctx.p() {
            return Err(Error::ContextMismatch);
        }
        let n = target.degree();
        let mut v = vec![0u64; self.terms() * n];
        for (k, &c) in self.c.iter().enumerate() {
            v[k * n] = c;
        }
        Ok(Poly::from_raw(target, v))
    }
}

fn strip(v: &[u64]) -> &[u64] {
    let mut len = v.len();
    while len > 0 && v[len - 1] == 0 {
        len -= 1;
    }
    &v[..len]
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                self.$checked(rhs).expect("polynomial operation failed")
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_field(&other.ctx) && self.c == other.c
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctx.degree() == 1 {
            write!(f, "{:?}", self.c)
        } else {
            let chunks: Vec<&[u64]> = (0..self.terms()).map(|k| self.chunk(k)).collect();
            write!(f, "{chunks:?}")
        }
    }
}

/// Frobenius power cache: x^{Q^j} mod f for j requested through an addition
/// chain h_{a+b} = h_a o h_b of modular compositions.
struct FrobeniusLadder<'a> {
    f: &'a Poly,
    memo: HashMap<u64, Poly>,
}

impl<'a> FrobeniusLadder<'a> {
    fn new(f: &'a Poly) -> Result<Self> {
        let x = Poly::x(f.ctx());
        let h1 = x.powmod(&f.ctx().order(), f)?;
        let mut memo = HashMap::new();
        memo.insert(1, h1);
        Ok(FrobeniusLadder { f, memo })
    }

    /// x^{Q^j} mod f.
    fn power(&mut self, j: u64) -> Result<Poly> {
        debug_assert!(j >= 1);
        if let Some(h) = self.memo.get(&j) {
            return Ok(h.clone());
        }
        let h = if j % 2 == 0 {
            let half = self.power(j / 2)?;
            half.compose_mod(&half, self.f)?
        } else {
            let even = self.power(j - 1)?;
            let one = self.power(1)?;
            even.compose_mod(&one, self.f)?
        };
        self.memo.insert(j, h.clone());
        Ok(h)
    }
}

/// Squarefree decomposition in characteristic p (Yun's algorithm with the
/// p-th-power descent when the derivative vanishes). Returns pairwise
/// coprime monic squarefree parts with their multiplicities.
fn squarefree_parts(f: &Poly) -> Result<Vec<(Poly, u32)>> {
    debug_assert!(f.is_monic());
    let p = f.ctx().p() as u32;
    let mut out = Vec::new();
    let deriv = f.derivative();
    if deriv.is_zero() {
        // f = g(x^p); recurse on the p-th root.
        let g = pth_root(f)?;
        for (part, mult) in squarefree_parts(&g)? {
            out.push((part, mult * p));
        }
        return Ok(out);
    }
    let mut c = f.gcd(&deriv)?;
    let mut w = f.divrem(&c)?.0;
    let mut i = 1u32;
    while w.degree() != Some(0) {
        let y = w.gcd(&c)?;
        let z = w.divrem(&y)?.0;
        if z.degree() != Some(0) {
            out.push((z, i));
        }
        w = y;
        c = c.divrem(&w)?.0;
        i += 1;
    }
    if c.degree() != Some(0) {
        // Remaining p-th-power content.
        let g = pth_root(&c)?;
        for (part, mult) in squarefree_parts(&g)? {
            out.push((part, mult * p));
        }
    }
    Ok(out)
}

/// For f = g(x^p), recover g. Coefficient-wise p-th root: over F_{p^n} the
/// root of a is a^{p^{n-1}}.
fn pth_root(f: &Poly) -> Result<Poly> {
    let ctx = f.ctx();
    let p = ctx.p() as usize;
    let n = ctx.degree() as u32;
    let root_exp = BigUint::from(ctx.p()).pow(n - 1);
    let d = f.degree().unwrap();
    debug_assert_eq!(d % p, 0);
    let mut coeffs = Vec::with_capacity(d / p + 1);
    for k in 0..=d {
        let c = f.coeff(k);
        if k % p == 0 {
            coeffs.push(c.pow_big(&root_exp));
        } else {
            debug_assert!(c.is_zero(), "derivative vanished, so only x^p powers occur");
        }
    }
    Poly::from_elems(ctx, &coeffs)
}

/// Distinct-degree splitting of a monic squarefree f: returns (product of
/// irreducibles of degree d, d) pairs, d ascending.
fn distinct_degree_parts(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    let ctx = f.ctx();
    let q = ctx.order();
    let x = Poly::x(ctx);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = x.clone();
    let mut d = 0usize;
    while let Some(deg) = rest.degree() {
        if deg == 0 {
            break;
        }
        d += 1;
        if 2 * d > deg {
            // What is left is irreducible.
            out.push((rest.clone(), deg));
            break;
        }
        h = h.powmod(&q, &rest)?;
        let g = h.checked_sub(&x)?.gcd(&rest)?;
        if g.degree() != Some(0) {
            out.push((g.clone(), d));
            rest = rest.divrem(&g)?.0;
            h = h.rem(&rest)?;
        }
    }
    Ok(out)
}

/// Cantor-Zassenhaus equal-degree splitting: f is monic squarefree, all
/// irreducible factors of degree d. Odd q throughout (p >= 3).
fn equal_degree_split(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Poly>> {
    let deg = f.degree().unwrap();
    if deg == d {
        return Ok(vec![f.clone()]);
    }
    let ctx = f.ctx();
    let e = (ctx.order().pow(d as u32) - BigUint::one()) >> 1;
    for _ in 0..EDF_RETRY_CAP {
        let u = random_poly(ctx, deg, rng);
        if u.degree().is_none() {
            continue;
        }
        let w = u.powmod(&e, f)?.checked_sub(&Poly::one(ctx))?;
        let g = match w.degree() {
            None => continue,
            _ => w.gcd(f)?,
        };
        let gd = g.degree().unwrap();
        if gd == 0 || gd == deg {
            continue;
        }
        let h = f.divrem(&g)?.0;
        let mut out = equal_degree_split(&g, d, rng)?;
        out.extend(equal_degree_split(&h, d, rng)?);
        return Ok(out);
    }
    Err(Error::SplitRetriesExceeded(EDF_RETRY_CAP))
}

fn random_poly(ctx: &Arc<FieldCtx>, deg_bound: usize, rng: &mut ChaCha8Rng) -> Poly {
    let n = ctx.degree();
    let p = ctx.p();
    let mut v = vec![0u64; deg_bound * n];
    for entry in v.iter_mut() {
        *entry = rng.gen_range(0..p);
    }
    Poly::from_raw(ctx, v)
}

/// A complete factorization: `unit * prod factor^multiplicity` reproduces
/// the input exactly; factors are monic irreducible, canonically sorted.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub unit: FieldElem,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    /// Reassemble the factored polynomial.
    pub fn product(&self) -> Poly {
        let mut acc = Poly::constant(self.unit.clone());
        for (f, mult) in &self.factors {
            acc = &acc * &f.pow(*mult as u64);
        }
        acc
    }

    pub fn total_degree(&self) -> usize {
        self.factors
            .iter()
            .map(|(f, m)| f.degree().unwrap_or(0) * *m as usize)
            .sum()
    }
}

/// First monic irreducible of the given degree in canonical enumeration
/// order. Deterministic; used where a modulus must be conjured (for example
/// extension point counts).
pub fn first_irreducible(ctx: &Arc<FieldCtx>, degree: usize) -> Result<Poly> {
    if degree == 0 {
        return Err(Error::DegreeZero);
    }
    let p = ctx.p();
    if ctx.degree() != 1 {
        return Err(Error::InvalidData(
            "canonical irreducible scan is defined over prime fields".into(),
        ));
    }
    let total = (p as u128).saturating_pow(degree as u32);
    let mut i = 0u128;
    while i < total {
        // Coefficients of x^0..x^{degree-1} from the digits of i, most
        // significant digit at the constant coefficient, so the scan is
        // canonical (lexicographic from the constant term up).
        let mut coeffs = vec![0i64; degree + 1];
        coeffs[degree] = 1;
        let mut v = i;
        for j in (0..degree).rev() {
            coeffs[j] = (v % p as u128) as i64;
            v /= p as u128;
        }
        let cand = Poly::from_ints(ctx, &coeffs);
        if cand.is_irreducible()? {
            return Ok(cand);
        }
        i += 1;
    }
    unreachable!("irreducibles of every degree exist")
}

/// Random monic irreducible of the given degree, seeded scan.
pub fn random_irreducible(ctx: &Arc<FieldCtx>, degree: usize, seed: u64) -> Result<Poly> {
    if degree == 0 {
        return Err(Error::DegreeZero);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut f = random_poly(ctx, degree, &mut rng);
        f = f.checked_add(&Poly::monomial(ctx.one(), degree))?;
        if f.is_irreducible()? {
            return Ok(f);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f83() -> Arc<FieldCtx> {
        FieldCtx::prime(83).unwrap()
    }

    fn f9() -> Arc<FieldCtx> {
        FieldCtx::new(3, 2, &[1, 0, 1]).unwrap()
    }

    fn conway_f0(ctx: &Arc<FieldCtx>) -> Poly {
        Poly::from_ints(ctx, &[-2, 3, 0, 1])
    }

    /// All monic polynomials of the given degree, canonical order.
    fn all_monic(ctx: &Arc<FieldCtx>, degree: usize) -> Vec<Poly> {
        let p = ctx.p();
        let total = p.pow(degree as u32);
        (0..total)
            .map(|i| {
                let mut coeffs = vec![0i64; degree + 1];
                coeffs[degree] = 1;
                let mut v = i;
                for j in (0..degree).rev() {
                    coeffs[j] = (v % p) as i64;
                    v /= p;
                }
                Poly::from_ints(ctx, &coeffs)
            })
            .collect()
    }

    /// Trial-division irreducibility oracle: no monic divisor of degree in
    /// [1, deg/2].
    fn irreducible_by_trial_division(f: &Poly) -> bool {
        let d = f.degree().unwrap();
        for k in 1..=d / 2 {
            for g in all_monic(f.ctx(), k) {
                if f.rem(&g).unwrap().is_zero() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn mul_and_divrem_match_hand_values() {
        let ctx = f83();
        let a = Poly::from_ints(&ctx, &[1, 1]); // x + 1
        let b = Poly::from_ints(&ctx, &[-1, 1]); // x - 1
        assert_eq!(&a * &b, Poly::from_ints(&ctx, &[-1, 0, 1]));
        let f0 = conway_f0(&ctx);
        let (q, r) = f0.divrem(&Poly::x(&ctx)).unwrap();
        assert_eq!(q, Poly::from_ints(&ctx, &[3, 0, 1]));
        assert_eq!(r, Poly::from_ints(&ctx, &[-2]));
    }

    #[test]
    fn divrem_round_trips_randomly() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for ctx in [f83(), f9()] {
            for _ in 0..300 {
                let f = random_poly(&ctx, rng.gen_range(1..50), &mut rng);
                let g = random_poly(&ctx, rng.gen_range(1..50), &mut rng);
                if g.is_zero() {
                    continue;
                }
                let (q, r) = f.divrem(&g).unwrap();
                assert_eq!(&(&q * &g) + &r, f);
                if let (Some(dr), Some(dg)) = (r.degree(), g.degree()) {
                    assert!(dr < dg);
                }
            }
        }
    }

    #[test]
    fn gcd_contract() {
        let ctx = f83();
        let f = Poly::from_ints(&ctx, &[5, 2, 0, 3]);
        assert_eq!(f.gcd(&Poly::zero(&ctx)).unwrap(), f.make_monic().unwrap());
        assert!(matches!(
            Poly::zero(&ctx).gcd(&Poly::zero(&ctx)),
            Err(Error::BothZero)
        ));
        // gcd((x+1)^2 (x+2), (x+1)(x+3)) = x + 1
        let x1 = Poly::from_ints(&ctx, &[1, 1]);
        let a = &(&x1 * &x1) * &Poly::from_ints(&ctx, &[2, 1]);
        let b = &x1 * &Poly::from_ints(&ctx, &[3, 1]);
        assert_eq!(a.gcd(&b).unwrap(), x1);
    }

    #[test]
    fn gcd_shares_planted_factor_randomly() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ctx = FieldCtx::prime(5).unwrap();
        let irreducibles: Vec<Poly> = all_monic(&ctx, 3)
            .into_iter()
            .filter(|f| irreducible_by_trial_division(f))
            .collect();
        for _ in 0..50 {
            let planted = &irreducibles[rng.gen_range(0..irreducibles.len())];
            // Cofactors coprime to the planted cubic: random linear factors.
            let ca = Poly::from_ints(&ctx, &[rng.gen_range(0..5), 1]);
            let cb = Poly::from_ints(&ctx, &[rng.gen_range(0..5), 1]);
            let g = (planted * &ca).gcd(&(planted * &cb)).unwrap();
            let expected = if ca == cb { planted * &ca } else { planted.clone() };
            assert_eq!(g, expected.make_monic().unwrap());
        }
    }

    #[test]
    fn powmod_frobenius_fixes_irreducible_roots() {
        let ctx = f83();
        let f0 = conway_f0(&ctx);
        let x = Poly::x(&ctx);
        assert_eq!(x.powmod(&BigUint::one(), &f0).unwrap(), x);
        let q3 = BigUint::from(83u64).pow(3);
        assert_eq!(x.powmod(&q3, &f0).unwrap(), x);
        // Cross-check: proper Frobenius powers move x, so the root really
        // has degree 3 and not 1.
        for k in 1..3u32 {
            let e = BigUint::from(83u64).pow(k);
            assert_ne!(x.powmod(&e, &f0).unwrap(), x);
        }
    }

    #[test]
    fn compose_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ctx = f83();
        for _ in 0..20 {
            let m = random_irreducible(&ctx, rng.gen_range(96..130), rng.gen()).unwrap();
            let f = random_poly(&ctx, 120, &mut rng);
            let g = random_poly(&ctx, rng.gen_range(1..120), &mut rng);
            let h = f.compose_mod_horner(&g, &m).unwrap();
            let b = f.compose_mod_bsgs(&g, &m).unwrap();
            assert_eq!(h, b);
        }
    }

    #[test]
    fn irreducibility_known_cases() {
        let ctx = f83();
        assert!(conway_f0(&ctx).is_irreducible().unwrap());
        assert!(!Poly::from_ints(&ctx, &[-1, 0, 1]).is_irreducible().unwrap());
        assert!(matches!(
            Poly::one(&ctx).is_irreducible(),
            Err(Error::DegreeZero)
        ));
        // Linear polynomials are irreducible.
        assert!(Poly::from_ints(&ctx, &[5, 1]).is_irreducible().unwrap());
    }

    #[test]
    fn irreducibility_agrees_with_trial_division() {
        for p in [3u64, 5] {
            let ctx = FieldCtx::prime(p).unwrap();
            for d in 1..=4usize {
                for f in all_monic(&ctx, d) {
                    assert_eq!(
                        f.is_irreducible().unwrap(),
                        irreducible_by_trial_division(&f),
                        "disagreement at {f} over F_{p}"
                    );
                }
            }
        }
    }

    #[test]
    fn irreducibility_in_extension_fields() {
        let ctx = f9();
        // x^2 - c over F_9 is irreducible exactly when c is a nonsquare,
        // which the quadratic character detects.
        let mut found = 0;
        for x in ctx.elems().unwrap() {
            if x.is_zero() {
                continue;
            }
            let f = Poly::from_elems(&ctx, &[x.neg(), ctx.zero(), ctx.one()]).unwrap();
            let expected = x.quad_char() == -1;
            assert_eq!(f.is_irreducible().unwrap(), expected);
            found += 1;
        }
        assert_eq!(found, 8);
    }

    #[test]
    fn factor_simple_shapes() {
        let ctx = f83();
        let x = Poly::x(&ctx);
        let fac = (&x * &x).factor(0).unwrap();
        assert_eq!(fac.factors.len(), 1);
        assert_eq!(fac.factors[0], (x.clone(), 2));
        assert!(fac.unit.is_one());
        // Unit recovery: 7 * (x+1)^2.
        let seven = Poly::from_ints(&ctx, &[7]);
        let f = &seven * &Poly::from_ints(&ctx, &[1, 2, 1]);
        let fac = f.factor(0).unwrap();
        assert_eq!(fac.unit, ctx.from_u64(7));
        assert_eq!(fac.product(), f);
    }

    #[test]
    fn factor_reassembles_random_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ctx = FieldCtx::prime(5).unwrap();
        let pool: Vec<Poly> = (1..=8)
            .flat_map(|d| {
                all_monic(&ctx, d)
                    .into_iter()
                    .filter(|f| irreducible_by_trial_division(f))
                    .take(3)
                    .collect::<Vec<_>>()
            })
            .collect();
        for round in 0..40 {
            let mut f = Poly::from_ints(&ctx, &[rng.gen_range(1..5)]);
            let mut expected_deg = 0usize;
            for _ in 0..rng.gen_range(1..4) {
                let g = &pool[rng.gen_range(0..pool.len())];
                let mult = rng.gen_range(1..3u64);
                f = &f * &g.pow(mult);
                expected_deg += g.degree().unwrap() * mult as usize;
            }
            let fac = f.factor(round).unwrap();
            assert_eq!(fac.product(), f);
            assert_eq!(fac.total_degree(), expected_deg);
            for (g, _) in &fac.factors {
                assert!(g.is_monic() && g.is_irreducible().unwrap());
            }
        }
    }

    #[test]
    fn factor_is_seed_independent() {
        let ctx = FieldCtx::prime(7).unwrap();
        // Product of several quadratics and cubics.
        let f = Poly::from_ints(&ctx, &[3, 1, 4, 1, 5, 0, 2, 6, 1]);
        let a = f.factor(0).unwrap();
        let b = f.factor(987654321).unwrap();
        assert_eq!(a.unit, b.unit);
        assert_eq!(a.factors, b.factors);
        // Canonical order: degrees ascend, ties broken lexicographically.
        for w in a.factors.windows(2) {
            assert_ne!(w[0].0.canonical_cmp(&w[1].0), Ordering::Greater);
        }
    }

    #[test]
    fn factor_char_p_multiplicities() {
        let ctx = FieldCtx::prime(3).unwrap();
        // (x + 1)^9 has vanishing derivative twice over F_3.
        let f = Poly::from_ints(&ctx, &[1, 1]).pow(9);
        let fac = f.factor(0).unwrap();
        assert_eq!(fac.factors, vec![(Poly::from_ints(&ctx, &[1, 1]), 9)]);

        // Same descent through an extension: (x - t)^9 = x^9 - t^9 over F_9.
        let ctx9 = f9();
        let t = ctx9.elem(&[0, 1]).unwrap();
        let lin = Poly::from_elems(&ctx9, &[t.neg(), ctx9.one()]).unwrap();
        let fac = lin.pow(9).factor(0).unwrap();
        assert_eq!(fac.factors, vec![(lin, 9)]);
    }

    #[test]
    fn factor_in_extension_field() {
        let ctx = f9();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for round in 0..10 {
            let a = random_poly(&ctx, 3, &mut rng);
            let f = &(&a + &Poly::monomial(ctx.one(), 3)) * &Poly::x(&ctx);
            let fac = f.factor(round).unwrap();
            assert_eq!(fac.product(), f);
            for (g, _) in &fac.factors {
                assert!(g.is_irreducible().unwrap());
            }
        }
    }

    #[test]
    fn first_irreducible_is_canonical() {
        let ctx = FieldCtx::prime(5).unwrap();
        let f = first_irreducible(&ctx, 2).unwrap();
        // Lexicographic scan (constant coefficient most significant): the
        // x^2 + kx candidates are all divisible by x, x^2 + 1 factors as
        // (x+2)(x+3), and x^2 + x + 1 has no root mod 5.
        assert_eq!(f, Poly::from_ints(&ctx, &[1, 1, 1]));
        for d in 1..=5 {
            assert!(first_irreducible(&ctx, d).unwrap().is_irreducible().unwrap());
        }
    }

    #[test]
    fn random_irreducible_has_requested_degree() {
        let ctx = f83();
        for d in [1usize, 2, 3, 6, 10] {
            let f = random_irreducible(&ctx, d, d as u64).unwrap();
            assert_eq!(f.degree(), Some(d));
            assert!(f.is_monic());
        }
    }

    #[test]
    fn eval_matches_coefficient_walk() {
        let ctx = f9();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let f = random_poly(&ctx, 6, &mut rng);
            let x = ctx.elem_at(rng.gen_range(0..9) as u128);
            let mut expected = ctx.zero();
            let mut xe = ctx.one();
            for k in 0..f.terms() {
                expected = &expected + &(&f.coeff(k) * &xe);
                xe = &xe * &x;
            }
            assert_eq!(f.eval(&x).unwrap(), expected);
        }
    }
}
