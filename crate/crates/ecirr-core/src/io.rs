//! JSON descriptions of fields, curves, maps, and search fixtures.
//!
//! Coefficient vectors are little-endian and may hold any signed integers;
//! they are reduced into the field on load.  Descriptions carry enough
//! context to rebuild the objects without out-of-band information, so a map
//! or curve file round-trips through [`read_json`] / [`write_json`] alone.

use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::curve::{Curve, CurveOrderData};
use crate::error::{Error, Result};
use crate::ff::FieldCtx;
use crate::poly::Poly;
use crate::quadorder::{QuadInt, QuadOrder};
use crate::ratmap::RationalMap;

// ---- Field descriptions ----

/// A finite field F_{p^n}: `modulus` is the defining polynomial, length
/// n + 1; for n = 1 it is the trivial `[0, 1]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldDesc {
    pub p: u64,
    pub n: u32,
    pub modulus: Vec<i64>,
}

impl FieldDesc {
    pub fn build(&self) -> Result<Arc<FieldCtx>> {
        FieldCtx::new(self.p, self.n as usize, &self.modulus)
    }

    pub fn describe(ctx: &Arc<FieldCtx>) -> FieldDesc {
        FieldDesc {
            p: ctx.p(),
            n: ctx.degree() as u32,
            modulus: ctx.modulus().iter().map(|&c| c as i64).collect(),
        }
    }
}

// ---- Curve descriptions ----

/// A short Weierstrass curve with prime-subfield coefficients.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CurveDesc {
    #[serde(rename = "A")]
    pub a: i64,
    #[serde(rename = "B")]
    pub b: i64,
    pub field: FieldDesc,
}

impl CurveDesc {
    pub fn build(&self) -> Result<Curve> {
        let ctx = self.field.build()?;
        Curve::new(ctx.from_i64(self.a), ctx.from_i64(self.b))
    }
}

// ---- Map descriptions ----

/// A rational self-map x -> a(x)/b(x) of declared degree `l`, with an
/// optional y-scale `(s_num, s_den)` for maps that act on curve points.
///
/// Coefficients are plain integer vectors, so they always lie in the prime
/// subfield; `field` may name an extension to interpret them in.  When
/// `field` is absent the map is built over a caller-supplied field.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MapDesc {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_num: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_den: Option<Vec<i64>>,
    pub l: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDesc>,
}

impl MapDesc {
    pub fn build(&self, default_field: Option<&Arc<FieldCtx>>) -> Result<RationalMap> {
        let ctx = match (&self.field, default_field) {
            (Some(desc), _) => desc.build()?,
            (None, Some(ctx)) => ctx.clone(),
            (None, None) => {
                return Err(Error::InvalidData(
                    "map description names no field and none was supplied".into(),
                ))
            }
        };
        let a = Poly::from_ints(&ctx, &self.a);
        let b = Poly::from_ints(&ctx, &self.b);
        let y_scale = match (&self.s_num, &self.s_den) {
            (Some(n), Some(d)) => Some((Poly::from_ints(&ctx, n), Poly::from_ints(&ctx, d))),
            (None, None) => None,
            _ => {
                return Err(Error::InvalidData(
                    "y-scale requires both s_num and s_den".into(),
                ))
            }
        };
        let map = RationalMap::with_y_scale(a, b, y_scale)?;
        if map.degree() as u64 != self.l {
            return Err(Error::InvalidData(format!(
                "declared degree {} but numerator has degree {}",
                self.l,
                map.degree()
            )));
        }
        Ok(map)
    }

    /// Describe a map in normalized form (monic numerator, unit divided out).
    pub fn describe(map: &RationalMap) -> Result<MapDesc> {
        let (s_num, s_den) = match map.y_scale() {
            Some((n, d)) => (Some(poly_to_ints(n)?), Some(poly_to_ints(d)?)),
            None => (None, None),
        };
        Ok(MapDesc {
            a: poly_to_ints(map.numerator())?,
            b: poly_to_ints(map.denominator())?,
            s_num,
            s_den,
            l: map.degree() as u64,
            field: Some(FieldDesc::describe(map.ctx())),
        })
    }
}

// ---- Imaginary quadratic integers ----

/// An element c0 + c1*w of the maximal order of Q(sqrt(D)), D < 0 squarefree.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct QuadIntDesc {
    #[serde(rename = "D")]
    pub d: i64,
    pub c0: i64,
    pub c1: i64,
}

impl QuadIntDesc {
    pub fn build(&self) -> Result<QuadInt> {
        Ok(QuadOrder::new(self.d)?.elem(self.c0, self.c1))
    }
}

// ---- Search fixtures ----

/// A curve, an endomorphism-induced map on it, and the quadratic data of the
/// endomorphism, as recorded by the fixture search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureDesc {
    pub name: String,
    pub curve: CurveDesc,
    pub map: MapDesc,
    pub alpha: QuadIntDesc,
    pub trace: i64,
    #[serde(default)]
    pub comment: String,
}

/// A realized fixture: every description built and checked for coherence.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub comment: String,
    pub curve: Curve,
    pub map: RationalMap,
    pub alpha: QuadInt,
    pub trace: i64,
}

impl FixtureDesc {
    pub fn realize(&self) -> Result<Fixture> {
        let curve = self.curve.build()?;
        let map = self.map.build(Some(curve.ctx()))?;
        if !map.ctx().same_field(curve.ctx()) {
            return Err(Error::ContextMismatch);
        }
        Ok(Fixture {
            name: self.name.clone(),
            comment: self.comment.clone(),
            map,
            curve,
            alpha: self.alpha.build()?,
            trace: self.trace,
        })
    }
}

impl Fixture {
    /// Frobenius data of the fixture's base field curve.
    pub fn order_data(&self) -> CurveOrderData {
        let q = self.curve.ctx().p();
        CurveOrderData {
            q,
            n: (q as i64 + 1 - self.trace) as u64,
            t: self.trace,
        }
    }
}

// ---- File and string helpers ----

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(std::fs::write(path, text)?)
}

pub fn load_fixture(path: impl AsRef<Path>) -> Result<Fixture> {
    read_json::<FixtureDesc>(path)?.realize()
}

/// Parse a little-endian integer coefficient vector like `[81,3,0,1]`.
pub fn parse_poly(ctx: &Arc<FieldCtx>, text: &str) -> Result<Poly> {
    let ints: Vec<i64> = serde_json::from_str(text)?;
    Ok(Poly::from_ints(ctx, &ints))
}

/// Canonical integer coefficients of a prime-field polynomial.
pub fn poly_to_ints(p: &Poly) -> Result<Vec<i64>> {
    if p.ctx().degree() != 1 {
        return Err(Error::InvalidData(
            "only prime-field polynomials serialize as flat integer vectors".into(),
        ));
    }
    Ok(p.coeffs().iter().map(|c| c.coords()[0] as i64).collect())
}

/// SHA-256 of a polynomial's canonical form, as lowercase hex.  Stable
/// across runs; used to summarize polynomials too large to print.
pub fn poly_digest(p: &Poly) -> String {
    let ctx = p.ctx();
    let mut h = Sha256::new();
    h.update(ctx.p().to_le_bytes());
    h.update((ctx.degree() as u64).to_le_bytes());
    for c in ctx.modulus() {
        h.update(c.to_le_bytes());
    }
    for c in p.raw() {
        h.update(c.to_le_bytes());
    }
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for byte in out {
        s.push_str(&format!("{byte:02x}"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data_dir() -> std::path::PathBuf {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
    }

    #[test]
    fn field_desc_round_trip_and_validation() {
        let desc = FieldDesc { p: 5, n: 2, modulus: vec![2, 0, 1] };
        let ctx = desc.build().unwrap();
        assert_eq!(ctx.p(), 5);
        assert_eq!(ctx.degree(), 2);
        assert_eq!(FieldDesc::describe(&ctx), desc);

        // x^2 - 1 splits, so it cannot define F_25.
        let bad = FieldDesc { p: 5, n: 2, modulus: vec![-1, 0, 1] };
        assert!(bad.build().is_err());

        let json = serde_json::to_string(&desc).unwrap();
        let back: FieldDesc = serde_json::from_str(&json).unwrap();
        assert_eq!(back, desc);
    }

    #[test]
    fn fixture_files_realize_coherently() {
        for (file, l, order, depth_alpha_norm) in
            [("fixture_l3.json", 3, 9u64, 3), ("fixture_l5.json", 5, 5, 5)]
        {
            let fx = load_fixture(data_dir().join(file)).unwrap();
            assert_eq!(fx.map.degree(), l);
            assert_eq!(fx.curve.count_points().unwrap().n, order);
            assert_eq!(fx.order_data().n, order);
            // The endomorphism's quadratic norm equals the map degree.
            assert_eq!(fx.alpha.norm(), depth_alpha_norm.into());
            let report =
                crate::curve::verify_endomorphism(&fx.curve, &fx.map, 10_000, 0).unwrap();
            assert!(report.all_ok(), "{report:?}");
            assert!(report.exhaustive);
        }
    }

    #[test]
    fn printed_map_normalizes_to_unit_four() {
        let desc: MapDesc = read_json(data_dir().join("f83_l17.json")).unwrap();
        let map = desc.build(None).unwrap();
        assert_eq!(map.degree(), 17);
        assert_eq!(map.unit().coords(), &[4]);
        assert!(map.numerator().is_monic());
        assert!(map.y_scale().is_some());
        // 8 is a kernel x-coordinate, so the denominator vanishes there.
        let ctx = map.ctx().clone();
        assert!(map.denominator().eval(&ctx.from_i64(8)).unwrap().is_zero());

        let curve: CurveDesc = read_json(data_dir().join("f83_curve.json")).unwrap();
        let curve = curve.build().unwrap();
        let report = crate::curve::verify_endomorphism(&curve, &map, 400, 7).unwrap();
        assert!(report.all_ok(), "{report:?}");
    }

    #[test]
    fn map_desc_validation() {
        let field = FieldDesc { p: 5, n: 1, modulus: vec![0, 1] };
        let good = MapDesc {
            a: vec![2, 0, 1, 1],
            b: vec![1, 4, 4],
            s_num: None,
            s_den: None,
            l: 3,
            field: Some(field.clone()),
        };
        assert!(good.build(None).is_ok());

        let mut wrong_l = good.clone();
        wrong_l.l = 5;
        assert!(matches!(wrong_l.build(None), Err(Error::InvalidData(_))));

        let mut half_scale = good.clone();
        half_scale.s_num = Some(vec![1]);
        assert!(matches!(half_scale.build(None), Err(Error::InvalidData(_))));

        let mut no_field = good.clone();
        no_field.field = None;
        assert!(matches!(no_field.build(None), Err(Error::InvalidData(_))));
        let ctx = field.build().unwrap();
        assert!(no_field.build(Some(&ctx)).is_ok());

        // Round trip through describe.
        let map = good.build(None).unwrap();
        let back = MapDesc::describe(&map).unwrap();
        assert_eq!(back.build(None).unwrap().numerator(), map.numerator());
    }

    #[test]
    fn poly_parsing_and_digests() {
        let ctx = FieldCtx::prime(83).unwrap();
        let f = parse_poly(&ctx, "[81,3,0,1]").unwrap();
        assert_eq!(f.degree(), Some(3));
        assert!(f.is_irreducible().unwrap());
        assert_eq!(poly_to_ints(&f).unwrap(), vec![81, 3, 0, 1]);

        let d1 = poly_digest(&f);
        assert_eq!(d1.len(), 64);
        assert_eq!(d1, poly_digest(&f));
        let g = parse_poly(&ctx, "[81,3,0,2,1]").unwrap();
        assert_ne!(d1, poly_digest(&g));

        // Same coefficients over a different field digest differently.
        let ctx5 = FieldCtx::prime(5).unwrap();
        let h = parse_poly(&ctx5, "[1,3,0,1]").unwrap();
        let f5 = parse_poly(&ctx5, "[1,3,0,1]").unwrap();
        assert_eq!(poly_digest(&h), poly_digest(&f5));

        assert!(parse_poly(&ctx, "not json").is_err());
    }
}
