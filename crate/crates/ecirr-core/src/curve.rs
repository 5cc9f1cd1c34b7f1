//! Elliptic curves y^2 = x^3 + Ax + B over odd-characteristic finite
//! fields: group law, brute-force point counts, extension-field orders via
//! the Frobenius trace recurrence, and verification that a rational map
//! really is the x-part of an endomorphism.
//!
//! Everything here is desk scale on purpose. Counting enumerates the field
//! (with a square table, so it is linear in q), and endomorphism checks
//! walk actual point pairs; both are gated by the field enumeration cap.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ff::{FieldCtx, FieldElem};
use crate::ratmap::{ProjPoint, RationalMap};

/// A point of the curve: affine or the point at infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurvePoint {
    Infinity,
    Affine(FieldElem, FieldElem),
}

impl CurvePoint {
    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&FieldElem> {
        match self {
            CurvePoint::Affine(x, _) => Some(x),
            CurvePoint::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&FieldElem> {
        match self {
            CurvePoint::Affine(_, y) => Some(y),
            CurvePoint::Infinity => None,
        }
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

/// Point count bookkeeping: field size q, group order n, trace t = q+1-n.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CurveOrderData {
    pub q: u64,
    pub n: u64,
    pub t: i64,
}

impl CurveOrderData {
    /// a^k + conj(a)^k for the Frobenius eigenvalues, by the recurrence
    /// s_0 = 2, s_1 = t, s_{i+1} = t s_i - q s_{i-1}.
    pub fn frobenius_trace_power(&self, k: u32) -> BigInt {
        let mut prev = BigInt::from(2);
        let mut cur = BigInt::from(self.t);
        if k == 0 {
            return prev;
        }
        for _ in 1..k {
            let next = &cur * self.t - &prev * self.q;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Group order over the degree-k extension: q^k + 1 - s_k.
    pub fn extension_order(&self, k: u32) -> BigInt {
        BigInt::from(self.q).pow(k) + 1 - self.frobenius_trace_power(k)
    }
}

/// y^2 = x^3 + Ax + B, nonsingular (4A^3 + 27B^2 != 0; over odd
/// characteristic this is exactly smoothness, also in characteristic 3).
#[derive(Clone, Debug)]
pub struct Curve {
    ctx: Arc<FieldCtx>,
    a: FieldElem,
    b: FieldElem,
}

impl Curve {
    pub fn new(a: FieldElem, b: FieldElem) -> Result<Curve> {
        if !a.ctx().same_field(b.ctx()) {
            return Err(Error::ContextMismatch);
        }
        let ctx = Arc::clone(a.ctx());
        let disc = &(&a.pow(3) * &ctx.from_u64(4)) + &(&b.pow(2) * &ctx.from_u64(27));
        if disc.is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(Curve { ctx, a, b })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn a(&self) -> &FieldElem {
        &self.a
    }

    pub fn b(&self) -> &FieldElem {
        &self.b
    }

    /// x^3 + Ax + B.
    pub fn rhs(&self, x: &FieldElem) -> Result<FieldElem> {
        if !self.ctx.same_field(x.ctx()) {
            return Err(Error::ContextMismatch);
        }
        Ok(&(&x.pow(3) + &(&self.a * x)) + &self.b)
    }

    pub fn contains(&self, pt: &CurvePoint) -> Result<bool> {
        match pt {
            CurvePoint::Infinity => Ok(true),
            CurvePoint::Affine(x, y) => {
                if !self.ctx.same_field(y.ctx()) {
                    return Err(Error::ContextMismatch);
                }
                Ok(y.pow(2) == self.rhs(x)?)
            }
        }
    }

    /// Checked affine point constructor.
    pub fn point(&self, x: FieldElem, y: FieldElem) -> Result<CurvePoint> {
        let pt = CurvePoint::Affine(x, y);
        if self.contains(&pt)? {
            Ok(pt)
        } else {
            Err(Error::PointNotOnCurve)
        }
    }

    pub fn negate(&self, pt: &CurvePoint) -> CurvePoint {
        match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => CurvePoint::Affine(x.clone(), y.neg()),
        }
    }

    /// Group law; rejects points that are not on the curve.
    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint> {
        if !self.contains(p)? {
            return Err(Error::PointNotOnCurve);
        }
        if !self.contains(q)? {
            return Err(Error::PointNotOnCurve);
        }
        self.add_unchecked(p, q)
    }

    fn add_unchecked(&self, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint> {
        let (x1, y1) = match p {
            CurvePoint::Infinity => return Ok(q.clone()),
            CurvePoint::Affine(x, y) => (x, y),
        };
        let (x2, y2) = match q {
            CurvePoint::Infinity => return Ok(p.clone()),
            CurvePoint::Affine(x, y) => (x, y),
        };
        let lambda = if x1 == x2 {
            if &y1.neg() == y2 {
                return Ok(CurvePoint::Infinity);
            }
            // Tangent: (3 x1^2 + A) / (2 y1).
            let num = &(&x1.pow(2) * &self.ctx.from_u64(3)) + &self.a;
            let den = y1 * &self.ctx.from_u64(2);
            &num * &den.inv()?
        } else {
            let num = y2 - y1;
            let den = x2 - x1;
            &num * &den.inv()?
        };
        let x3 = &(&lambda.pow(2) - x1) - x2;
        let y3 = &(&lambda * &(x1 - &x3)) - y1;
        Ok(CurvePoint::Affine(x3, y3))
    }

    /// k * P by double-and-add; the input point is validated once.
    pub fn scalar_mul(&self, k: u64, p: &CurvePoint) -> Result<CurvePoint> {
        if !self.contains(p)? {
            return Err(Error::PointNotOnCurve);
        }
        let mut acc = CurvePoint::Infinity;
        let mut sq = p.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &sq)?;
            }
            k >>= 1;
            if k > 0 {
                sq = self.add_unchecked(&sq, &sq)?;
            }
        }
        Ok(acc)
    }

    /// Every point of the curve over the working field.
    pub fn points(&self) -> Result<Vec<CurvePoint>> {
        let mut out = vec![CurvePoint::Infinity];
        for x in self.ctx.elems()? {
            let v = self.rhs(&x)?;
            if v.is_zero() {
                out.push(CurvePoint::Affine(x, self.ctx.zero()));
            } else if let Some(y) = v.sqrt() {
                out.push(CurvePoint::Affine(x.clone(), y.neg()));
                out.push(CurvePoint::Affine(x, y));
            }
        }
        Ok(out)
    }

    /// Brute-force order of E(F_q): 1 + sum_x #{y : y^2 = rhs(x)}, using a
    /// table of squares so the count is linear in q.
    pub fn count_points(&self) -> Result<CurveOrderData> {
        let q = self.ctx.order_u128();
        if q > self.ctx.enum_cap() as u128 {
            return Err(Error::FieldTooLarge {
                needed: q,
                cap: self.ctx.enum_cap(),
            });
        }
        let q = q as u64;
        // squares[i] = number of y with y^2 = element #i (0, 1, or 2).
        let mut squares = vec![0u8; q as usize];
        for y in self.ctx.elems()? {
            squares[(&y * &y).index() as usize] += 1;
        }
        let mut n = 1u64; // infinity
        for x in self.ctx.elems()? {
            n += squares[self.rhs(&x)?.index() as usize] as u64;
        }
        let t = q as i64 + 1 - n as i64;
        // Hasse bound; a violation would mean the count itself is broken.
        debug_assert!((t as i128) * (t as i128) <= 4 * q as i128);
        Ok(CurveOrderData { q, n, t })
    }

    /// Ordinary (as opposed to supersingular): p does not divide the trace.
    pub fn is_ordinary(&self) -> Result<bool> {
        let data = self.count_points()?;
        Ok(data.t % self.ctx.p() as i64 != 0)
    }

    /// Apply the endomorphism with x-part `map` and the map's y-scale to a
    /// point. Points whose x is a pole of the map (kernel points) go to
    /// infinity.
    pub fn apply_endomorphism(&self, map: &RationalMap, pt: &CurvePoint) -> Result<CurvePoint> {
        let (s_num, s_den) = map
            .y_scale()
            .ok_or_else(|| Error::InvalidMap("map carries no y-scale".into()))?;
        if !self.ctx.same_field(map.ctx()) {
            return Err(Error::ContextMismatch);
        }
        if !self.contains(pt)? {
            return Err(Error::PointNotOnCurve);
        }
        let (x, y) = match pt {
            CurvePoint::Infinity => return Ok(CurvePoint::Infinity),
            CurvePoint::Affine(x, y) => (x, y),
        };
        let img_x = match map.eval(&ProjPoint::Finite(x.clone()))? {
            ProjPoint::Infinity => return Ok(CurvePoint::Infinity),
            ProjPoint::Finite(v) => v,
        };
        let den = s_den.eval(x)?;
        if den.is_zero() {
            return Err(Error::InvalidMap(
                "y-scale has a pole outside the kernel".into(),
            ));
        }
        let img_y = &(y * &s_num.eval(x)?) * &den.inv()?;
        self.point(img_x, img_y)
    }
}

/// Outcome of checking a rational map against a curve as an endomorphism.
#[derive(Clone, Debug)]
pub struct EndoCheckReport {
    /// deg b = deg a - 1, as a separable degree-l endomorphism must have.
    pub degree_shape_ok: bool,
    /// Every checked on-curve x lands on a curve x (the image rhs is a
    /// square or the image is infinity).
    pub x_compatible: bool,
    pub x_checked: u64,
    /// phi(P + Q) = phi(P) + phi(Q) on checked pairs; `None` when the map
    /// carries no y-scale to build phi from.
    pub additive: Option<bool>,
    pub pairs_checked: u64,
    /// Whether the point set and pair set were swept completely.
    pub exhaustive: bool,
}

impl EndoCheckReport {
    pub fn all_ok(&self) -> bool {
        self.degree_shape_ok && self.x_compatible && self.additive.unwrap_or(true)
    }
}

/// Verify that `map` behaves as the x-part of an endomorphism of `curve`:
/// degree shape, x-compatibility on every rational point, and (when the
/// y-scale is present) additivity on point pairs. All points are always
/// checked for x-compatibility; pair checking is exhaustive when the number
/// of pairs fits in `pair_budget`, otherwise that many seeded random pairs.
pub fn verify_endomorphism(
    curve: &Curve,
    map: &RationalMap,
    pair_budget: u64,
    seed: u64,
) -> Result<EndoCheckReport> {
    if !curve.ctx().same_field(map.ctx()) {
        return Err(Error::ContextMismatch);
    }
    let l = map.degree();
    let degree_shape_ok = map.denominator().degree() == Some(l - 1);
    let points = curve.points()?;

    let mut x_compatible = true;
    let mut x_checked = 0u64;
    for pt in &points {
        if let CurvePoint::Affine(x, _) = pt {
            x_checked += 1;
            match map.eval(&ProjPoint::Finite(x.clone()))? {
                ProjPoint::Infinity => {}
                ProjPoint::Finite(img) => {
                    if curve.rhs(&img)?.quad_char() < 0 {
                        x_compatible = false;
                    }
                }
            }
        }
    }

    let (additive, pairs_checked, exhaustive) = if map.y_scale().is_some() {
        let total = points.len() as u64 * points.len() as u64;
        let mut ok = true;
        let mut checked = 0u64;
        if total <= pair_budget {
            for p in &points {
                for q in &points {
                    if !endo_additive_on(curve, map, p, q)? {
                        ok = false;
                    }
                    checked += 1;
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..pair_budget {
                let p = &points[rng.gen_range(0..points.len())];
                let q = &points[rng.gen_range(0..points.len())];
                if !endo_additive_on(curve, map, p, q)? {
                    ok = false;
                }
                checked += 1;
            }
        }
        (Some(ok), checked, total <= pair_budget)
    } else {
        (None, 0, true)
    };

    Ok(EndoCheckReport {
        degree_shape_ok,
        x_compatible,
        x_checked,
        additive,
        pairs_checked,
        exhaustive,
    })
}

fn endo_additive_on(
    curve: &Curve,
    map: &RationalMap,
    p: &CurvePoint,
    q: &CurvePoint,
) -> Result<bool> {
    // An image off the curve is a verification failure, not a caller error.
    let apply = |pt: &CurvePoint| match curve.apply_endomorphism(map, pt) {
        Ok(img) => Ok(Some(img)),
        Err(Error::PointNotOnCurve) => Ok(None),
        Err(e) => Err(e),
    };
    let sum = curve.add(p, q)?;
    let (lhs, fp, fq) = match (apply(&sum)?, apply(p)?, apply(q)?) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Ok(false),
    };
    let rhs = curve.add(&fp, &fq)?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn curve_f83() -> Curve {
        let ctx = FieldCtx::prime(83).unwrap();
        Curve::new(ctx.from_u64(56), ctx.from_u64(34)).unwrap()
    }

    fn curve_l3() -> Curve {
        let ctx = FieldCtx::prime(5).unwrap();
        Curve::new(ctx.from_u64(1), ctx.from_u64(1)).unwrap()
    }

    fn map_l3(ctx: &Arc<FieldCtx>) -> RationalMap {
        RationalMap::with_y_scale(
            Poly::from_ints(ctx, &[2, 0, 1, 1]),
            Poly::from_ints(ctx, &[1, 4, 4]),
            Some((
                Poly::from_ints(ctx, &[3, 3, 2, 3]),
                Poly::from_ints(ctx, &[2, 2, 4, 1]),
            )),
        )
        .unwrap()
    }

    #[test]
    fn construction_rejects_singular() {
        let ctx = FieldCtx::prime(5).unwrap();
        // y^2 = x^3: 4*0 + 27*0 = 0.
        assert!(matches!(
            Curve::new(ctx.zero(), ctx.zero()),
            Err(Error::SingularCurve)
        ));
        // y^2 = x^3 - 3x + 2 has discriminant zero: 4*27 = 108 = 27*4.
        assert!(matches!(
            Curve::new(ctx.from_i64(-3), ctx.from_u64(2)),
            Err(Error::SingularCurve)
        ));
        // Characteristic 3: A = 0 is singular regardless of B.
        let ctx3 = FieldCtx::prime(3).unwrap();
        assert!(matches!(
            Curve::new(ctx3.zero(), ctx3.one()),
            Err(Error::SingularCurve)
        ));
        assert!(Curve::new(ctx3.one(), ctx3.zero()).is_ok());
    }

    #[test]
    fn point_membership() {
        let e = curve_f83();
        let ctx = e.ctx().clone();
        // From the kernel data: x = 8 gives rhs = 8^3 + 56*8 + 34.
        let x = ctx.from_u64(8);
        let rhs = e.rhs(&x).unwrap();
        assert_eq!(rhs, ctx.from_u64((512 + 448 + 34) % 83));
        assert!(matches!(
            e.point(ctx.from_u64(1), ctx.from_u64(1)),
            Err(Error::PointNotOnCurve)
        ));
        // All enumerated points satisfy the equation, and the count of
        // points matches the group order companion data.
        let pts = e.points().unwrap();
        for pt in &pts {
            assert!(e.contains(pt).unwrap());
        }
        assert_eq!(pts.len() as u64, e.count_points().unwrap().n);
    }

    #[test]
    fn group_law_axioms() {
        let e = curve_l3();
        let pts = e.points().unwrap();
        assert_eq!(pts.len(), 9);
        for p in &pts {
            assert_eq!(e.add(p, &CurvePoint::Infinity).unwrap(), *p);
            assert_eq!(
                e.add(p, &e.negate(p)).unwrap(),
                CurvePoint::Infinity
            );
            for q in &pts {
                let s = e.add(p, q).unwrap();
                assert!(e.contains(&s).unwrap());
                assert_eq!(s, e.add(q, p).unwrap());
                for r in &pts {
                    let lhs = e.add(&s, r).unwrap();
                    let rhs = e.add(p, &e.add(q, r).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn scalar_mul_and_group_order() {
        let e = curve_f83();
        let data = e.count_points().unwrap();
        assert_eq!(data, CurveOrderData { q: 83, n: 68, t: 16 });
        for pt in e.points().unwrap() {
            assert_eq!(e.scalar_mul(data.n, &pt).unwrap(), CurvePoint::Infinity);
        }
        // (a + b) P = aP + bP on a sample point.
        let p = e
            .points()
            .unwrap()
            .into_iter()
            .find(|p| !p.is_infinity())
            .unwrap();
        for (a, b) in [(2u64, 3u64), (5, 9), (33, 36), (67, 1)] {
            let lhs = e.scalar_mul(a + b, &p).unwrap();
            let rhs = e
                .add(&e.scalar_mul(a, &p).unwrap(), &e.scalar_mul(b, &p).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn point_counts_match_frozen_data() {
        let l3 = curve_l3().count_points().unwrap();
        assert_eq!(l3, CurveOrderData { q: 5, n: 9, t: -3 });

        let ctx5 = FieldCtx::prime(5).unwrap();
        let l5 = Curve::new(ctx5.from_u64(3), ctx5.from_u64(2))
            .unwrap()
            .count_points()
            .unwrap();
        assert_eq!(l5, CurveOrderData { q: 5, n: 5, t: 1 });

        assert!(curve_f83().is_ordinary().unwrap());
        assert!(curve_l3().is_ordinary().unwrap());

        // Supersingular checks: trace 0 over the prime field.
        let ctx3 = FieldCtx::prime(3).unwrap();
        let ss3 = Curve::new(ctx3.one(), ctx3.zero()).unwrap();
        assert_eq!(ss3.count_points().unwrap(), CurveOrderData { q: 3, n: 4, t: 0 });
        assert!(!ss3.is_ordinary().unwrap());
        let ss5 = Curve::new(ctx5.zero(), ctx5.one()).unwrap();
        assert_eq!(ss5.count_points().unwrap(), CurveOrderData { q: 5, n: 6, t: 0 });
        assert!(!ss5.is_ordinary().unwrap());
    }

    #[test]
    fn extension_orders_follow_trace_recurrence() {
        // Degree-17 construction curve: N_2 = 6800.
        let data = curve_f83().count_points().unwrap();
        assert_eq!(data.extension_order(1), BigInt::from(68));
        assert_eq!(data.extension_order(2), BigInt::from(6800));

        // Direct recount over F_25 agrees with the recurrence from F_5.
        let base = curve_l3().count_points().unwrap();
        let ctx25 = FieldCtx::new(5, 2, &[2, 0, 1]).unwrap();
        let lifted = Curve::new(ctx25.from_u64(1), ctx25.from_u64(1)).unwrap();
        let direct = lifted.count_points().unwrap();
        assert_eq!(BigInt::from(direct.n), base.extension_order(2));

        // And one more level, F_5 -> F_125.
        let ctx125 = FieldCtx::new(5, 3, &[2, 3, 0, 1]).unwrap();
        let lifted = Curve::new(ctx125.from_u64(1), ctx125.from_u64(1)).unwrap();
        assert_eq!(
            BigInt::from(lifted.count_points().unwrap().n),
            base.extension_order(3)
        );
    }

    #[test]
    fn field_too_large_is_reported() {
        let ctx = FieldCtx::prime(83).unwrap().with_enum_cap(10);
        let e = Curve::new(ctx.from_u64(56), ctx.from_u64(34)).unwrap();
        assert!(matches!(
            e.count_points(),
            Err(Error::FieldTooLarge { needed: 83, cap: 10 })
        ));
    }

    #[test]
    fn endomorphism_kernel_and_application() {
        let e = curve_l3();
        let ctx = e.ctx().clone();
        let map = map_l3(&ctx);
        // Kernel points: x = 2 (the root of the denominator) and infinity;
        // that is 3 = l points in total.
        let mut kernel = 0;
        for pt in e.points().unwrap() {
            let img = e.apply_endomorphism(&map, &pt).unwrap();
            assert!(e.contains(&img).unwrap());
            if img.is_infinity() {
                kernel += 1;
                if let CurvePoint::Affine(x, _) = &pt {
                    assert_eq!(x, &ctx.from_u64(2));
                }
            }
        }
        assert_eq!(kernel, 3);
    }

    #[test]
    fn endomorphism_verification_passes_and_detects_tampering() {
        let e = curve_l3();
        let ctx = e.ctx().clone();
        let map = map_l3(&ctx);
        let report = verify_endomorphism(&e, &map, 10_000, 0).unwrap();
        assert!(report.degree_shape_ok);
        assert!(report.x_compatible);
        assert_eq!(report.additive, Some(true));
        assert!(report.exhaustive);
        assert_eq!(report.pairs_checked, 81);

        // Tampered y-scale: still a valid rational map, no longer additive.
        let bad = RationalMap::with_y_scale(
            Poly::from_ints(&ctx, &[2, 0, 1, 1]),
            Poly::from_ints(&ctx, &[1, 4, 4]),
            Some((
                Poly::from_ints(&ctx, &[4, 3, 2, 3]),
                Poly::from_ints(&ctx, &[2, 2, 4, 1]),
            )),
        )
        .unwrap();
        let report = verify_endomorphism(&e, &bad, 10_000, 0).unwrap();
        assert!(!report.all_ok());

        // Sampled mode still runs when the pair budget is small.
        let report = verify_endomorphism(&e, &map, 10, 1).unwrap();
        assert!(!report.exhaustive);
        assert_eq!(report.pairs_checked, 10);
        assert_eq!(report.additive, Some(true));
    }
}
