//! Dense univariate polynomials over the integers.
//!
//! This is the workhorse for real root isolation: Sturm sequences built from
//! primitive pseudo-remainders, Cauchy root bounds, and bisection. Rational
//! inputs are scaled to integers on entry (a positive factor, so every sign
//! query is unaffected).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::num::Rational;
use crate::poly::MultiPoly;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IPoly {
    /// Coefficients, constant term first; no trailing zeros; empty == zero.
    c: Vec<BigInt>,
}

impl IPoly {
    pub fn zero() -> Self {
        IPoly { c: Vec::new() }
    }

    pub fn from_coeffs(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        IPoly { c }
    }

    /// Scales a univariate rational polynomial to integer coefficients by the
    /// (positive) lcm of the denominators.
    pub fn from_multipoly(p: &MultiPoly) -> Self {
        assert_eq!(p.nvars(), 1, "IPoly::from_multipoly needs a univariate input");
        let mut den_lcm = BigInt::one();
        for (_, c) in p.terms() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let deg = p.degree_in(0) as usize;
        let mut out = vec![BigInt::zero(); deg + 1];
        for (e, c) in p.terms() {
            out[e[0] as usize] = c.numer() * (&den_lcm / c.denom());
        }
        IPoly::from_coeffs(out)
    }

    pub fn to_multipoly(&self) -> MultiPoly {
        MultiPoly::from_terms(
            1,
            self.c
                .iter()
                .enumerate()
                .map(|(i, c)| (vec![i as u32], BigRational::from_integer(c.clone()))),
        )
        .expect("arity is fixed at 1")
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; 0 for the zero polynomial (callers guard with `is_zero`).
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> &BigInt {
        self.c.last().expect("lc of zero polynomial")
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn negate(&self) -> Self {
        IPoly {
            c: self.c.iter().map(|x| -x).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        if self.c.len() <= 1 {
            return IPoly::zero();
        }
        IPoly::from_coeffs(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Evaluates the homogenized form at num/den (den > 0), which has the same
    /// sign as den^deg * p(num/den).
    pub fn eval_homog(&self, num: &BigInt, den: &BigInt) -> BigInt {
        debug_assert!(den.is_positive());
        if self.is_zero() {
            return BigInt::zero();
        }
        let n = self.degree();
        let mut acc = self.c[n].clone();
        let mut dp = BigInt::one();
        for i in (0..n).rev() {
            dp *= den;
            acc = acc * num + &self.c[i] * &dp;
        }
        acc
    }

    pub fn sign_at(&self, r: &Rational) -> i8 {
        let v = self.eval_homog(r.numer(), r.denom());
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Positive gcd of the coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.c {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the positive content, preserving signs.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return IPoly::zero();
        }
        let g = self.content();
        IPoly {
            c: self.c.iter().map(|c| c / &g).collect(),
        }
    }

    pub fn normalize_positive(&self) -> Self {
        let p = self.primitive();
        if p.is_zero() || p.lc().is_positive() {
            p
        } else {
            p.negate()
        }
    }

    /// Pseudo-remainder scaled so the overall multiplier of `f` is positive:
    /// returns r with r = c * (f mod g) pointwise for some c > 0.
    pub fn pseudo_rem_pos(f: &IPoly, g: &IPoly) -> IPoly {
        assert!(!g.is_zero());
        if g.degree() == 0 {
            return IPoly::zero();
        }
        let dg = g.degree();
        let lc_g = g.lc().clone();
        let mut r = f.clone();
        let mut mults = 0usize;
        while !r.is_zero() && r.degree() >= dg {
            let dr = r.degree();
            let lc_r = r.lc().clone();
            let delta = dr - dg;
            let mut nc = vec![BigInt::zero(); dr];
            for (i, coef) in nc.iter_mut().enumerate() {
                *coef = &lc_g * &r.c[i];
            }
            for j in 0..dg {
                nc[delta + j] -= &lc_r * &g.c[j];
            }
            r = IPoly::from_coeffs(nc);
            mults += 1;
        }
        if lc_g.is_negative() && mults % 2 == 1 {
            r.negate()
        } else {
            r
        }
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(&self, other: &IPoly) -> IPoly {
        if self.is_zero() {
            return other.normalize_positive();
        }
        if other.is_zero() {
            return self.normalize_positive();
        }
        let mut a = self.primitive();
        let mut b = other.primitive();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            if b.is_zero() {
                return a.normalize_positive();
            }
            if b.degree() == 0 {
                return IPoly::from_coeffs(vec![BigInt::one()]);
            }
            let r = IPoly::pseudo_rem_pos(&a, &b).primitive();
            a = b;
            b = r;
        }
    }

    /// Exact division (asserts divisibility over the integers).
    pub fn exact_div(&self, d: &IPoly) -> IPoly {
        assert!(!d.is_zero());
        if self.is_zero() {
            return IPoly::zero();
        }
        let dd = d.degree();
        let ds = self.degree();
        assert!(ds >= dd, "exact_div: degree of divisor too large");
        let mut rem = self.c.clone();
        let mut q = vec![BigInt::zero(); ds - dd + 1];
        for k in (0..=ds - dd).rev() {
            let num = rem[k + dd].clone();
            if num.is_zero() {
                continue;
            }
            let (qk, r0) = num.div_rem(d.lc());
            assert!(r0.is_zero(), "exact_div: inexact leading division");
            for j in 0..=dd {
                let sub = &qk * &d.c[j];
                rem[k + j] -= sub;
            }
            q[k] = qk;
        }
        assert!(rem.iter().all(|x| x.is_zero()), "exact_div: nonzero remainder");
        IPoly::from_coeffs(q)
    }

    /// Square-free part (same distinct roots, all simple), positive leading
    /// coefficient.
    pub fn squarefree_part(&self) -> IPoly {
        assert!(!self.is_zero());
        if self.degree() == 0 {
            return IPoly::from_coeffs(vec![BigInt::one()]);
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.normalize_positive();
        }
        self.exact_div(&g).normalize_positive()
    }

    /// Sturm sequence of (self, self'); with pseudo-remainders kept at
    /// positive multipliers this is a valid Sturm chain.
    pub fn sturm_seq(&self) -> Vec<IPoly> {
        assert!(!self.is_zero());
        let mut seq = vec![self.primitive()];
        let d = self.derivative();
        if d.is_zero() {
            return seq;
        }
        seq.push(d.primitive());
        loop {
            let n = seq.len();
            let r = IPoly::pseudo_rem_pos(&seq[n - 2], &seq[n - 1]);
            if r.is_zero() {
                return seq;
            }
            seq.push(r.negate().primitive());
        }
    }

    /// Strict bound B with every real root in (-B, B).
    pub fn cauchy_bound(&self) -> Rational {
        assert!(!self.is_zero());
        if self.degree() == 0 {
            return Rational::one();
        }
        let lc_abs = self.lc().abs();
        let max_low = self.c[..self.degree()]
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero);
        Rational::one() + Rational::new(max_low, lc_abs)
    }

    pub fn count_distinct_in_open(&self, lo: &Rational, hi: &Rational) -> usize {
        let sqf = self.squarefree_part();
        let chain = sqf.sturm_seq();
        assert!(sqf.sign_at(lo) != 0 && sqf.sign_at(hi) != 0);
        variations(&chain, lo) - variations(&chain, hi)
    }

    /// Whether the polynomial has any real root in the closed interval.
    pub fn has_root_in_closed(&self, lo: &Rational, hi: &Rational) -> bool {
        assert!(lo <= hi);
        if self.is_zero() {
            return true;
        }
        if self.sign_at(lo) == 0 || self.sign_at(hi) == 0 {
            return true;
        }
        if lo == hi {
            return false;
        }
        self.count_distinct_in_open(lo, hi) > 0
    }

    /// Isolating intervals for the distinct real roots, ascending; point
    /// intervals where a rational root was pinned; non-point interval
    /// endpoints are never roots.
    pub fn isolate_roots(&self) -> Vec<(Rational, Rational)> {
        assert!(!self.is_zero());
        let sqf = self.squarefree_part();
        if sqf.degree() == 0 {
            return Vec::new();
        }
        if sqf.degree() == 1 {
            let r = -Rational::new(sqf.c[0].clone(), sqf.c[1].clone());
            return vec![(r.clone(), r)];
        }
        let chain = sqf.sturm_seq();
        let bound = sqf.cauchy_bound();
        let lo = -bound.clone();
        let hi = bound;
        let v_lo = variations(&chain, &lo);
        let v_hi = variations(&chain, &hi);
        let mut out = Vec::new();
        let mut stack = vec![(lo, v_lo, hi, v_hi)];
        while let Some((a, va, b, vb)) = stack.pop() {
            let cnt = va - vb;
            if cnt == 0 {
                continue;
            }
            if cnt == 1 {
                out.push((a, b));
                continue;
            }
            let m: Rational = (&a + &b) / Rational::from_integer(BigInt::from(2));
            if sqf.sign_at(&m) == 0 {
                out.push((m.clone(), m.clone()));
                // Carve out a punctured neighborhood holding only this root.
                let mut eps = (&b - &a) / Rational::from_integer(BigInt::from(4));
                let (ml, mr) = loop {
                    let ml = &m - &eps;
                    let mr = &m + &eps;
                    if sqf.sign_at(&ml) != 0
                        && sqf.sign_at(&mr) != 0
                        && variations(&chain, &ml) - variations(&chain, &mr) == 1
                    {
                        break (ml, mr);
                    }
                    eps /= Rational::from_integer(BigInt::from(2));
                };
                let v_ml = variations(&chain, &ml);
                let v_mr = variations(&chain, &mr);
                stack.push((a, va, ml, v_ml));
                stack.push((mr, v_mr, b, vb));
            } else {
                let vm = variations(&chain, &m);
                stack.push((a, va, m.clone(), vm));
                stack.push((m, vm, b, vb));
            }
        }
        out.sort_by(|x, y| x.0.cmp(&y.0));
        out
    }
}

fn variations(seq: &[IPoly], at: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let s = p.sign_at(at);
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_i64};

    fn ip(coeffs: &[i64]) -> IPoly {
        IPoly::from_coeffs(coeffs.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn eval_and_signs() {
        let p = ip(&[-2, 0, 1]); // x^2 - 2
        assert_eq!(p.sign_at(&rat_i64(0)), -1);
        assert_eq!(p.sign_at(&rat_i64(2)), 1);
        assert_eq!(p.sign_at(&rat(3, 2)), 1);
        assert_eq!(p.sign_at(&rat(7, 5)), -1);
        let q = ip(&[-4, 0, 1]); // x^2 - 4
        assert_eq!(q.sign_at(&rat_i64(2)), 0);
    }

    #[test]
    fn gcd_examples() {
        let a = ip(&[-1, 0, 1]); // x^2 - 1
        let b = ip(&[-1, 0, 0, 1]); // x^3 - 1
        assert_eq!(a.gcd(&b), ip(&[-1, 1]));
        let c = ip(&[2, 2]); // 2x + 2
        let d = ip(&[4, 0, 4]); // 4x^2 + 4 (no common root)
        assert_eq!(c.gcd(&d), ip(&[1]));
    }

    #[test]
    fn squarefree_collapses_multiplicity() {
        // (x-1)^2 (x+2) = x^3 - 3x + 2
        let p = ip(&[2, -3, 0, 1]);
        let sf = p.squarefree_part();
        assert_eq!(sf, ip(&[-2, 1, 1])); // (x-1)(x+2) = x^2 + x - 2
    }

    #[test]
    fn isolate_mixed_roots() {
        // (x^2 - 2)(x - 1): roots -sqrt2, 1, sqrt2
        let p = ip(&[2, -2, -1, 1]);
        let ivs = p.isolate_roots();
        assert_eq!(ivs.len(), 3);
        for w in ivs.windows(2) {
            assert!(w[0].1 <= w[1].0, "isolating intervals must not overlap");
        }
        // Middle root is exactly 1; the three intervals must separate them.
        let approx: Vec<f64> = ivs
            .iter()
            .map(|(a, b)| {
                (crate::num::rational_to_f64(a) + crate::num::rational_to_f64(b)) / 2.0
            })
            .collect();
        let expect = [-std::f64::consts::SQRT_2, 1.0, std::f64::consts::SQRT_2];
        for (got, want) in approx.iter().zip(expect) {
            assert!((got - want).abs() < 0.5, "root near {want}, got {got}");
        }
        // Endpoint invariant: non-point endpoints are never roots.
        for (a, b) in &ivs {
            if a != b {
                assert_ne!(p.sign_at(a), 0);
                assert_ne!(p.sign_at(b), 0);
            }
        }
    }

    #[test]
    fn isolate_handles_multiplicity_and_no_roots() {
        let cube = ip(&[0, 0, 0, 1]); // x^3: one distinct root 0
        let ivs = cube.isolate_roots();
        assert_eq!(ivs.len(), 1);
        assert!(ivs[0].0 <= rat_i64(0) && rat_i64(0) <= ivs[0].1);

        let none = ip(&[1, 0, 1]); // x^2 + 1
        assert!(none.isolate_roots().is_empty());
        assert_eq!(none.count_distinct_in_open(&rat_i64(-10), &rat_i64(10)), 0);
    }

    #[test]
    fn count_distinct_examples() {
        // (x-1)(x-2)(x-3)
        let p = ip(&[-6, 11, -6, 1]);
        assert_eq!(p.count_distinct_in_open(&rat_i64(0), &rat_i64(10)), 3);
        assert_eq!(p.count_distinct_in_open(&rat(3, 2), &rat(5, 2)), 1);
        assert!(p.has_root_in_closed(&rat_i64(1), &rat_i64(1)));
        assert!(!p.has_root_in_closed(&rat(21, 20), &rat(11, 10)));
    }

    #[test]
    fn cauchy_bound_contains_roots() {
        let p = ip(&[-100, 0, 1]); // roots ±10
        let b = p.cauchy_bound();
        assert!(b > rat_i64(10));
        for (a, bb) in p.isolate_roots() {
            assert!(a >= -b.clone() && bb <= b);
        }
    }

    #[test]
    fn exact_div_roundtrip() {
        let a = ip(&[1, 2, 1]); // (x+1)^2
        let b = ip(&[1, 1]);
        assert_eq!(a.exact_div(&b), b);
        let c = ip(&[2, 4, 2]);
        assert_eq!(c.exact_div(&b), ip(&[2, 2]));
    }

    #[test]
    fn multipoly_roundtrip_scales_positively() {
        let p = MultiPoly::from_terms(1, vec![(vec![1], rat(-1, 2)), (vec![0], rat(1, 3))])
            .unwrap();
        let ip = IPoly::from_multipoly(&p);
        assert_eq!(ip, IPoly::from_coeffs(vec![BigInt::from(2), BigInt::from(-3)]));
        // Positive scaling preserves every sign.
        for t in [rat_i64(-1), rat_i64(0), rat_i64(1)] {
            let exact = p.eval(&[t.clone()]).unwrap();
            let got = ip.sign_at(&t);
            assert_eq!(got, crate::poly::rational_sign(&exact));
        }
    }
}
