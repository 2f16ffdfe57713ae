//! Scalar helpers on top of `num_rational::BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat_i64(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "p", "-p", or "p/q" (q > 0 after normalization).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::malformed(format!("bad rational numerator in {s:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::malformed(format!("bad rational denominator in {s:?}")))?;
    if d.is_zero() {
        return Err(Error::malformed(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Renders "p" for integers, "p/q" otherwise. Inverse of `parse_rational`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // Fall back through a scaled division for extreme magnitudes.
        let scaled = (r * Rational::from_integer(BigInt::from(1i64 << 53))).trunc();
        scaled.to_f64().unwrap_or(f64::NAN) / (1i64 << 53) as f64
    })
}

/// Simplest rational (minimal denominator, then minimal |numerator|) strictly
/// inside the open interval (lo, hi). Requires lo < hi.
pub fn simplest_in_open(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo < hi, "simplest_in_open needs lo < hi");
    if lo.is_negative() && hi.is_positive() {
        return Rational::zero();
    }
    if !hi.is_positive() {
        // Mirror into the positive axis.
        return -simplest_nonneg(&-hi.clone(), &-lo.clone());
    }
    simplest_nonneg(lo, hi)
}

/// Simplest rational in (lo, hi) with 0 <= lo < hi.
fn simplest_nonneg(lo: &Rational, hi: &Rational) -> Rational {
    let fl = lo.floor();
    let next_int = &fl + Rational::one();
    if &next_int < hi {
        // An integer lies strictly inside (next_int > lo always holds).
        return next_int;
    }
    if lo.is_integer() {
        // (lo, hi) within (fl, fl+1]: recurse on the reciprocal tail with an
        // unbounded upper end: simplest in (1/(hi-fl), inf) is floor+1.
        let inv_lo = (hi - &fl).recip();
        let k = inv_lo.floor() + Rational::one();
        return fl + k.recip();
    }
    let frac_lo = (hi - &fl).recip();
    let frac_hi = (lo - &fl).recip();
    fl + simplest_nonneg(&frac_lo, &frac_hi).recip()
}

/// Simplest rational in the closed interval [lo, hi] (lo <= hi). Used when an
/// isolating interval may have a rational root sitting on an endpoint.
pub fn simplest_in_closed(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo <= hi);
    if lo == hi {
        return lo.clone();
    }
    if !lo.is_positive() && !hi.is_negative() {
        return Rational::zero();
    }
    if hi.is_negative() {
        return -simplest_closed_pos(&-hi.clone(), &-lo.clone());
    }
    simplest_closed_pos(lo, hi)
}

/// Simplest rational in [lo, hi] with 0 < lo < hi.
fn simplest_closed_pos(lo: &Rational, hi: &Rational) -> Rational {
    let fl = lo.floor();
    if lo.is_integer() {
        return lo.clone();
    }
    let next_int = &fl + Rational::one();
    if &next_int <= hi {
        return next_int;
    }
    let frac_lo = (hi - &fl).recip();
    let frac_hi = (lo - &fl).recip();
    fl + simplest_closed_pos(&frac_lo, &frac_hi).recip()
}

/// Nearest multiple of 2^-bits (ties round toward +inf). Keeps solver
/// surrogate coordinates on a small-denominator grid.
pub fn dyadic_round(r: &Rational, bits: u32) -> Rational {
    let scale = Rational::from_integer(BigInt::one() << bits);
    let scaled = r * &scale;
    let rounded = (scaled + rat(1, 2)).floor();
    rounded / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_format_roundtrip() {
        for s in ["0", "7", "-3", "5/3", "-22/7"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
        assert_eq!(format_rational(&parse_rational("-6/4").unwrap()), "-3/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn simplest_picks_small_denominators() {
        // Independent check: brute-force denominators upward.
        let cases = [
            (rat(1, 3), rat(2, 3)),
            (rat(3, 7), rat(4, 7)),
            (rat(-5, 2), rat(-7, 3)),
            (rat(10, 1), rat(21, 2)),
            (rat(141, 100), rat(142, 100)),
        ];
        for (lo, hi) in cases {
            let got = simplest_in_open(&lo, &hi);
            assert!(lo < got && got < hi, "{got} not inside ({lo},{hi})");
            let brute = brute_simplest(&lo, &hi);
            assert_eq!(
                got.denom(),
                brute.denom(),
                "denominator not minimal in ({lo},{hi})"
            );
        }
    }

    fn brute_simplest(lo: &Rational, hi: &Rational) -> Rational {
        for q in 1i64..200 {
            let lo_scaled = lo * rat_i64(q);
            let mut n = lo_scaled.floor().to_integer();
            n += 1;
            loop {
                let cand = Rational::new(n.clone(), BigInt::from(q));
                if &cand >= hi {
                    break;
                }
                if &cand > lo {
                    return cand;
                }
                n += 1;
            }
        }
        panic!("no simple rational found");
    }

    #[test]
    fn simplest_closed_hits_endpoints() {
        assert_eq!(simplest_in_closed(&rat(2, 1), &rat(5, 2)), rat_i64(2));
        assert_eq!(simplest_in_closed(&rat(1, 2), &rat(1, 2)), rat(1, 2));
        assert_eq!(simplest_in_closed(&rat(-1, 3), &rat(1, 5)), Rational::zero());
    }

    #[test]
    fn dyadic_rounding() {
        assert_eq!(dyadic_round(&rat(1, 3), 2), rat(1, 4));
        assert_eq!(dyadic_round(&rat(5, 8), 1), rat(1, 2));
        assert_eq!(dyadic_round(&rat(1, 4), 1), rat(1, 2)); // tie rounds up
        assert_eq!(dyadic_round(&rat(-1, 3), 2), rat(-1, 4));
    }
}
