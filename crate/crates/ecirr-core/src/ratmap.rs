//! Degree-l rational maps x -> a(x)/b(x) on the projective line and the
//! polynomial transform they induce.
//!
//! For a map of odd prime degree l with a monic, deg b < deg a = l and
//! gcd(a, b) = 1, the transform sends a polynomial g of degree m to
//!
//! ```text
//! g~(x) = b(x)^m * g(a(x)/b(x)) = sum_k g_k a(x)^k b(x)^(m-k)
//! ```
//!
//! which has degree exactly l*m, preserves leading coefficients (so monic
//! stays monic), is multiplicative, and pulls roots back through the map:
//! the roots of g~ are precisely the preimages of the roots of g. Iterating
//! the transform and picking irreducible factors is the engine of the whole
//! construction.
//!
//! Maps arriving with a non-monic numerator (for instance from an
//! endomorphism written on a twist, where a quartic-twist scaling u
//! contributes u^2 to both numerator and denominator) are normalized by the
//! leading coefficient, which cancels in a/b; the scalar is retained as
//! `unit` for bookkeeping. An optional second fraction records the
//! y-coordinate multiplier of the endomorphism the map came from, used when
//! verifying additivity on curve points.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ff::{FieldCtx, FieldElem};
use crate::fppoly;
use crate::poly::Poly;

/// A point of the projective line P^1 over the working field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjPoint {
    Finite(FieldElem),
    Infinity,
}

impl ProjPoint {
    pub fn is_infinity(&self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(x) => write!(f, "{x}"),
            ProjPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// x -> a(x)/b(x) with a monic of odd prime degree l, deg b < l, and
/// gcd(a, b) = 1.
#[derive(Clone, Debug)]
pub struct RationalMap {
    a: Poly,
    b: Poly,
    l: usize,
    unit: FieldElem,
    s_num: Option<Poly>,
    s_den: Option<Poly>,
}

impl RationalMap {
    pub fn new(a: Poly, b: Poly) -> Result<RationalMap> {
        RationalMap::with_y_scale(a, b, None)
    }

    /// Construct, optionally carrying the y-multiplier fraction of the
    /// source endomorphism.
    pub fn with_y_scale(a: Poly, b: Poly, y_scale: Option<(Poly, Poly)>) -> Result<RationalMap> {
        if !a.ctx().same_field(b.ctx()) {
            return Err(Error::ContextMismatch);
        }
        let l = match a.degree() {
            None | Some(0) => {
                return Err(Error::InvalidMap("numerator must have positive degree".into()))
            }
            Some(d) => d,
        };
        if l == 2 || !fppoly::is_prime_u64(l as u64) {
            return Err(Error::InvalidMap(format!(
                "map degree {l} is not an odd prime"
            )));
        }
        match b.degree() {
            None => return Err(Error::InvalidMap("denominator is zero".into())),
            Some(d) if d >= l => {
                return Err(Error::InvalidMap(format!(
                    "denominator degree {d} is not below numerator degree {l}"
                )))
            }
            _ => {}
        }
        if a.gcd(&b)?.degree() != Some(0) {
            return Err(Error::InvalidMap(
                "numerator and denominator share a factor".into(),
            ));
        }
        let unit = a.lead();
        let (a, b) = if unit.is_one() {
            (a, b)
        } else {
            let inv = unit.inv()?;
            (a.mul_elem(&inv)?, b.mul_elem(&inv)?)
        };
        if let Some((num, den)) = &y_scale {
            if !num.ctx().same_field(a.ctx()) || !den.ctx().same_field(a.ctx()) {
                return Err(Error::ContextMismatch);
            }
            if den.is_zero() {
                return Err(Error::InvalidMap("y-scale denominator is zero".into()));
            }
        }
        let (s_num, s_den) = match y_scale {
            Some((num, den)) => (Some(num), Some(den)),
            None => (None, None),
        };
        Ok(RationalMap {
            a,
            b,
            l,
            unit,
            s_num,
            s_den,
        })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.a.ctx()
    }

    /// Monic numerator after normalization.
    pub fn numerator(&self) -> &Poly {
        &self.a
    }

    pub fn denominator(&self) -> &Poly {
        &self.b
    }

    /// The map degree l (an odd prime).
    pub fn degree(&self) -> usize {
        self.l
    }

    /// Leading coefficient the input numerator was divided by.
    pub fn unit(&self) -> &FieldElem {
        &self.unit
    }

    pub fn y_scale(&self) -> Option<(&Poly, &Poly)> {
        match (&self.s_num, &self.s_den) {
            (Some(n), Some(d)) => Some((n, d)),
            _ => None,
        }
    }

    /// Apply the map to a point of P^1. Poles go to infinity; infinity is
    /// fixed because deg a > deg b.
    pub fn eval(&self, x: &ProjPoint) -> Result<ProjPoint> {
        match x {
            ProjPoint::Infinity => Ok(ProjPoint::Infinity),
            ProjPoint::Finite(x) => {
                if !self.ctx().same_field(x.ctx()) {
                    return Err(Error::ContextMismatch);
                }
                let bx = self.b.eval(x)?;
                if bx.is_zero() {
                    Ok(ProjPoint::Infinity)
                } else {
                    let ax = self.a.eval(x)?;
                    Ok(ProjPoint::Finite(&ax * &bx.inv()?))
                }
            }
        }
    }

    /// Reinterpret a prime-field map over an extension of the same
    /// characteristic; the y-scale, if any, comes along.
    pub fn lift_to(&self, target: &Arc<FieldCtx>) -> Result<RationalMap> {
        let y_scale = match self.y_scale() {
            Some((num, den)) => Some((num.lift_to(target)?, den.lift_to(target)?)),
            None => None,
        };
        RationalMap::with_y_scale(self.a.lift_to(target)?, self.b.lift_to(target)?, y_scale)
    }

    /// The induced transform g -> b^(deg g) * g(a/b), computed by Horner in
    /// a with a running power of b. Degree multiplies by l; the leading
    /// coefficient is preserved.
    pub fn transform(&self, g: &Poly) -> Result<Poly> {
        if !self.ctx().same_field(g.ctx()) {
            return Err(Error::ContextMismatch);
        }
        let m = match g.degree() {
            None | Some(0) => return Err(Error::DegreeZero),
            Some(m) => m,
        };
        let mut acc = Poly::constant(g.coeff(m));
        let mut bpow = Poly::one(self.ctx());
        for k in (0..m).rev() {
            bpow = &bpow * &self.b;
            acc = &acc * &self.a;
            let gk = g.coeff(k);
            if !gk.is_zero() {
                acc = &acc + &bpow.mul_elem(&gk)?;
            }
        }
        debug_assert_eq!(acc.degree(), Some(self.l * m));
        debug_assert_eq!(acc.lead(), g.lead());
        Ok(acc)
    }
}
