//! Real algebraic numbers as (square-free defining polynomial, isolating
//! interval) pairs, with exact comparison and sign evaluation.

use std::cmp::Ordering;

use num_bigint::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ipoly::IPoly;
use crate::num::{
    format_rational, parse_rational, rational_to_f64, simplest_in_closed, Rational,
};
use crate::poly::MultiPoly;

/// One real root of a square-free integer polynomial, pinned to an interval.
///
/// Invariants: exactly one root of `defining` lies in [lo, hi]; when lo < hi
/// neither endpoint is a root; when lo == hi the root is the rational lo.
#[derive(Clone, Debug)]
pub struct RootInterval {
    defining: IPoly,
    lo: Rational,
    hi: Rational,
}

/// Isolating intervals for all distinct real roots of a nonzero univariate
/// polynomial, in ascending order.
pub fn isolate_real_roots(p: &MultiPoly) -> Result<Vec<RootInterval>> {
    if p.nvars() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: p.nvars(),
        });
    }
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(RootInterval::isolate_ipoly(&IPoly::from_multipoly(p)))
}

impl RootInterval {
    pub fn isolate_ipoly(p: &IPoly) -> Vec<RootInterval> {
        assert!(!p.is_zero());
        let sqf = p.squarefree_part();
        p.isolate_roots()
            .into_iter()
            .map(|(lo, hi)| RootInterval {
                defining: sqf.clone(),
                lo,
                hi,
            })
            .collect()
    }

    pub(crate) fn from_parts(defining: IPoly, lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        RootInterval { defining, lo, hi }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn defining(&self) -> MultiPoly {
        self.defining.to_multipoly()
    }

    pub(crate) fn defining_ipoly(&self) -> &IPoly {
        &self.defining
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.is_point().then(|| self.lo.clone())
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.mid())
    }

    /// One bisection step; collapses to a point if the midpoint is the root.
    pub fn refine(&mut self) {
        if self.is_point() {
            return;
        }
        let m = self.mid();
        match self.defining.sign_at(&m) {
            0 => {
                self.lo = m.clone();
                self.hi = m;
            }
            s if s == self.defining.sign_at(&self.lo) => self.lo = m,
            _ => self.hi = m,
        }
    }

    pub fn refine_below(&mut self, eps: &Rational) {
        while !self.is_point() && &self.width() >= eps {
            self.refine();
        }
    }

    /// Attempts to recognize the root as a rational; purely a fast path, a
    /// miss is always safe.
    pub fn try_rational(&self, refine_steps: usize) -> Option<Rational> {
        let mut c = self.clone();
        for _ in 0..refine_steps {
            if c.is_point() {
                break;
            }
            c.refine();
        }
        if let Some(r) = c.as_rational() {
            return Some(r);
        }
        let cand = simplest_in_closed(&c.lo, &c.hi);
        (c.defining.sign_at(&cand) == 0).then_some(cand)
    }

    /// Is the root exactly this rational?
    pub fn equals_rational(&self, r: &Rational) -> bool {
        &self.lo <= r && r <= &self.hi && self.defining.sign_at(r) == 0
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        if self.equals_rational(r) {
            return Ordering::Equal;
        }
        let mut c = self.clone();
        loop {
            if &c.hi <= r {
                // hi == r is fine: the root is not r and not an endpoint root.
                return Ordering::Less;
            }
            if &c.lo >= r {
                return Ordering::Greater;
            }
            c.refine();
        }
    }

    /// Exact order between two represented roots (possibly of different
    /// polynomials).
    pub fn cmp_root(&self, other: &RootInterval) -> Ordering {
        if let Some(r) = self.as_rational() {
            return other.cmp_rational(&r).reverse();
        }
        if let Some(r) = other.as_rational() {
            return self.cmp_rational(&r);
        }
        // Equality is decided once: the roots coincide iff a common root of
        // both defining polynomials lies in the interval overlap (each
        // interval holds exactly one root of its own polynomial).
        let olo = self.lo.clone().max(other.lo.clone());
        let ohi = self.hi.clone().min(other.hi.clone());
        if olo <= ohi {
            let g = self.defining.gcd(&other.defining);
            if g.degree() >= 1 && g.has_root_in_closed(&olo, &ohi) {
                return Ordering::Equal;
            }
        }
        let mut a = self.clone();
        let mut b = other.clone();
        loop {
            if a.hi <= b.lo {
                return Ordering::Less;
            }
            if b.hi <= a.lo {
                return Ordering::Greater;
            }
            a.refine();
            b.refine();
            if let Some(r) = a.as_rational() {
                return b.cmp_rational(&r).reverse();
            }
            if let Some(r) = b.as_rational() {
                return a.cmp_rational(&r);
            }
        }
    }

    /// Exact sign of a univariate polynomial evaluated at the root.
    pub fn sign_of_upoly(&self, q: &MultiPoly) -> i8 {
        if q.is_zero() {
            return 0;
        }
        self.sign_of_ipoly(&IPoly::from_multipoly(q))
    }

    pub fn sign_of_ipoly(&self, q: &IPoly) -> i8 {
        if q.is_zero() {
            return 0;
        }
        if let Some(r) = self.as_rational() {
            return q.sign_at(&r);
        }
        // Zero test: q vanishes at the root iff gcd(defining, q) does.
        let g = self.defining.gcd(q);
        if g.degree() >= 1 && g.has_root_in_closed(&self.lo, &self.hi) {
            return 0;
        }
        // Nonzero: shrink until q is root-free over the interval, where its
        // sign is constant and equals the sign at either endpoint.
        let mut c = self.clone();
        loop {
            if let Some(r) = c.as_rational() {
                return q.sign_at(&r);
            }
            if !q.has_root_in_closed(&c.lo, &c.hi) {
                return q.sign_at(&c.lo);
            }
            c.refine();
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RootRepr {
    poly: MultiPoly,
    lo: String,
    hi: String,
}

impl Serialize for RootInterval {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        RootRepr {
            poly: self.defining(),
            lo: format_rational(&self.lo),
            hi: format_rational(&self.hi),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for RootInterval {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let r = RootRepr::deserialize(de)?;
        let poly = if r.poly.nvars() == 1 {
            r.poly
        } else {
            return Err(D::Error::custom("root interval polynomial must be univariate"));
        };
        let lo = parse_rational(&r.lo).map_err(D::Error::custom)?;
        let hi = parse_rational(&r.hi).map_err(D::Error::custom)?;
        if lo > hi {
            return Err(D::Error::custom("root interval with lo > hi"));
        }
        let ip = IPoly::from_multipoly(&poly);
        if ip.is_zero() {
            return Err(D::Error::custom("root interval with zero polynomial"));
        }
        Ok(RootInterval::from_parts(ip.squarefree_part(), lo, hi))
    }
}
