//! Points with rational or real-algebraic coordinates, and the extended
//! sample points produced by sign-condition sampling.

use std::cmp::Ordering;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::num::{format_rational, parse_rational, rational_to_f64, Rational};
use crate::poly::{rational_sign, MultiPoly};
use crate::roots::RootInterval;

/// A y-coordinate: rational, or one algebraic number on a vertical line.
#[derive(Clone, Debug)]
pub enum YCoord {
    Rat(Rational),
    Root(RootInterval),
}

impl YCoord {
    pub fn cmp_y(&self, other: &YCoord) -> Ordering {
        match (self, other) {
            (YCoord::Rat(a), YCoord::Rat(b)) => a.cmp(b),
            (YCoord::Rat(a), YCoord::Root(r)) => r.cmp_rational(a).reverse(),
            (YCoord::Root(r), YCoord::Rat(b)) => r.cmp_rational(b),
            (YCoord::Root(a), YCoord::Root(b)) => a.cmp_root(b),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            YCoord::Rat(r) => rational_to_f64(r),
            YCoord::Root(r) => r.to_f64(),
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            YCoord::Rat(r) => Some(r.clone()),
            YCoord::Root(r) => r.as_rational(),
        }
    }
}

/// A point with rational x; the y-coordinate may be algebraic (all algebraic
/// coordinates this crate ever produces sit on a rational vertical line or
/// are handled by the extended sample points below).
#[derive(Clone, Debug)]
pub struct AlgebraicPoint {
    pub x: Rational,
    pub y: YCoord,
}

impl AlgebraicPoint {
    pub fn rational(x: Rational, y: Rational) -> Self {
        AlgebraicPoint {
            x,
            y: YCoord::Rat(y),
        }
    }

    /// Exact sign of a bivariate polynomial at the point.
    pub fn sign_at(&self, p: &MultiPoly) -> Result<i8> {
        if p.nvars() != 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                got: p.nvars(),
            });
        }
        let on_line = p.substitute(0, &self.x); // univariate in y
        Ok(match &self.y {
            YCoord::Rat(y) => {
                let v = on_line.eval(&[y.clone()])?;
                rational_sign(&v)
            }
            YCoord::Root(r) => r.sign_of_upoly(&on_line),
        })
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rational_to_f64(&self.x), self.y.to_f64())
    }
}

/// Sample points from the decomposition: either a plain point at rational x,
/// or a point on a critical vertical line x = alpha with alpha algebraic.
///
/// `CritSection` pins y as the unique root of host(alpha, .) inside
/// [ylo, yhi]; `CritBand` has rational y.
#[derive(Clone, Debug)]
pub enum SamplePoint {
    Plain(AlgebraicPoint),
    CritBand {
        x: RootInterval,
        y: Rational,
    },
    CritSection {
        x: RootInterval,
        host: MultiPoly,
        ylo: Rational,
        yhi: Rational,
    },
}

impl SamplePoint {
    pub fn rational(x: Rational, y: Rational) -> Self {
        SamplePoint::Plain(AlgebraicPoint::rational(x, y))
    }

    /// Exact sign of a bivariate polynomial at the sample point.
    pub fn sign_at(&self, p: &MultiPoly) -> Result<i8> {
        if p.nvars() != 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                got: p.nvars(),
            });
        }
        match self {
            SamplePoint::Plain(pt) => pt.sign_at(p),
            SamplePoint::CritBand { x, y } => {
                // p(alpha, y0): substitute the rational y, sign at alpha.
                let along = p.substitute(1, y);
                Ok(x.sign_of_upoly(&along))
            }
            SamplePoint::CritSection { x, host, ylo, yhi } => {
                Ok(crate::algext::sign_at_section(p, x, host, ylo, yhi))
            }
        }
    }

    /// True when the x-coordinate is rational.
    pub fn x_rational(&self) -> Option<&Rational> {
        match self {
            SamplePoint::Plain(pt) => Some(&pt.x),
            _ => None,
        }
    }

    pub fn approx(&self) -> (f64, f64) {
        match self {
            SamplePoint::Plain(pt) => pt.to_f64(),
            SamplePoint::CritBand { x, y } => (x.to_f64(), rational_to_f64(y)),
            SamplePoint::CritSection { x, ylo, yhi, .. } => (
                x.to_f64(),
                (rational_to_f64(ylo) + rational_to_f64(yhi)) / 2.0,
            ),
        }
    }
}

// --- serde ---

impl Serialize for YCoord {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            YCoord::Rat(r) => ser.serialize_str(&format_rational(r)),
            YCoord::Root(root) => root.serialize(ser),
        }
    }
}

impl<'de> Deserialize<'de> for YCoord {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(de)?;
        match v {
            serde_json::Value::String(s) => Ok(YCoord::Rat(
                parse_rational(&s).map_err(D::Error::custom)?,
            )),
            other => Ok(YCoord::Root(
                serde_json::from_value(other).map_err(D::Error::custom)?,
            )),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    x: String,
    y: YCoord,
}

impl Serialize for AlgebraicPoint {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        PointRepr {
            x: format_rational(&self.x),
            y: self.y.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for AlgebraicPoint {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let r = PointRepr::deserialize(de)?;
        Ok(AlgebraicPoint {
            x: parse_rational(&r.x).map_err(D::Error::custom)?,
            y: r.y,
        })
    }
}

impl Serialize for SamplePoint {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let v = match self {
            SamplePoint::Plain(pt) => serde_json::json!({
                "kind": "plain",
                "point": serde_json::to_value(pt).map_err(serde::ser::Error::custom)?,
            }),
            SamplePoint::CritBand { x, y } => serde_json::json!({
                "kind": "critical-band",
                "x": serde_json::to_value(x).map_err(serde::ser::Error::custom)?,
                "y": format_rational(y),
            }),
            SamplePoint::CritSection { x, host, ylo, yhi } => serde_json::json!({
                "kind": "critical-section",
                "x": serde_json::to_value(x).map_err(serde::ser::Error::custom)?,
                "host": serde_json::to_value(host).map_err(serde::ser::Error::custom)?,
                "ylo": format_rational(ylo),
                "yhi": format_rational(yhi),
            }),
        };
        v.serialize(ser)
    }
}
