//! Commutative semigroup weights for the query structures.
//!
//! Weights enter as opaque strings on the input sets and leave as strings in
//! serialized trees, so every semigroup doubles as a codec. Subtraction is
//! never available; queries only ever accumulate.

use std::fmt::Debug;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::num::{format_rational, parse_rational, Rational};

/// A commutative semigroup with identity. Associativity, commutativity and
/// the identity law are property-tested for every implementation here; a
/// custom implementation must uphold them for query answers to be
/// order-independent.
pub trait Semigroup {
    type W: Clone + Debug + PartialEq;

    /// Stable name recorded in serialized structures.
    fn name(&self) -> &'static str;
    fn neutral(&self) -> Self::W;
    fn combine(&self, a: &Self::W, b: &Self::W) -> Self::W;
    fn parse(&self, s: &str) -> Result<Self::W>;
    fn format(&self, w: &Self::W) -> String;

    fn combine_all<'a, I>(&self, ws: I) -> Self::W
    where
        Self::W: 'a,
        I: IntoIterator<Item = &'a Self::W>,
    {
        ws.into_iter()
            .fold(self.neutral(), |acc, w| self.combine(&acc, w))
    }
}

/// Counting: weights are nonnegative integers (each set usually carries 1),
/// combined by addition. The default for point location.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counting;

impl Semigroup for Counting {
    type W = u64;

    fn name(&self) -> &'static str {
        "counting"
    }

    fn neutral(&self) -> u64 {
        0
    }

    fn combine(&self, a: &u64, b: &u64) -> u64 {
        a.checked_add(*b).expect("count overflow")
    }

    fn parse(&self, s: &str) -> Result<u64> {
        s.trim()
            .parse()
            .map_err(|_| Error::malformed(format!("invalid counting weight {s:?}")))
    }

    fn format(&self, w: &u64) -> String {
        w.to_string()
    }
}

/// Exact rational sums.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SumRational;

impl Semigroup for SumRational {
    type W = Rational;

    fn name(&self) -> &'static str {
        "sum"
    }

    fn neutral(&self) -> Rational {
        Rational::zero()
    }

    fn combine(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }

    fn parse(&self, s: &str) -> Result<Rational> {
        parse_rational(s)
    }

    fn format(&self, w: &Rational) -> String {
        format_rational(w)
    }
}

/// Union membership: did any contributing set carry `true`?
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BoolOr;

impl Semigroup for BoolOr {
    type W = bool;

    fn name(&self) -> &'static str {
        "bool-or"
    }

    fn neutral(&self) -> bool {
        false
    }

    fn combine(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }

    fn parse(&self, s: &str) -> Result<bool> {
        match s.trim() {
            "0" | "false" => Ok(false),
            "1" | "true" => Ok(true),
            other => Err(Error::malformed(format!("invalid boolean weight {other:?}"))),
        }
    }

    fn format(&self, w: &bool) -> String {
        if *w { "1".into() } else { "0".into() }
    }
}

/// Smallest contributing id; the identity is "no id yet".
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MinId;

impl Semigroup for MinId {
    type W = Option<u64>;

    fn name(&self) -> &'static str {
        "min-id"
    }

    fn neutral(&self) -> Option<u64> {
        None
    }

    fn combine(&self, a: &Option<u64>, b: &Option<u64>) -> Option<u64> {
        match (a, b) {
            (None, x) | (x, None) => *x,
            (Some(x), Some(y)) => Some(*x.min(y)),
        }
    }

    fn parse(&self, s: &str) -> Result<Option<u64>> {
        let s = s.trim();
        if s == "none" {
            return Ok(None);
        }
        s.parse()
            .map(Some)
            .map_err(|_| Error::malformed(format!("invalid id weight {s:?}")))
    }

    fn format(&self, w: &Option<u64>) -> String {
        match w {
            None => "none".into(),
            Some(id) => id.to_string(),
        }
    }
}
