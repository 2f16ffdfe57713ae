//! Exact arithmetic on a critical vertical line x = alpha, alpha real
//! algebraic.
//!
//! Elements of Q(alpha) are rational polynomials in x reduced modulo the
//! defining polynomial w of alpha; their signs are decided by a gcd-based
//! zero test plus interval refinement, never numerically. Polynomials in y
//! over Q(alpha) get Sturm chains whose pseudo-remainder multipliers are kept
//! positive at alpha, so root counting and isolation along the line are exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::ipoly::IPoly;
use crate::num::Rational;
use crate::poly::MultiPoly;
use crate::roots::RootInterval;

/// Dense rational polynomial in x (an element of Q(alpha) once reduced).
pub type XPoly = Vec<Rational>;

fn trim_x(mut p: XPoly) -> XPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn xpoly_to_ipoly(p: &XPoly) -> IPoly {
    let mut den_lcm = BigInt::one();
    for c in p {
        den_lcm = den_lcm.lcm(c.denom());
    }
    IPoly::from_coeffs(
        p.iter()
            .map(|c| c.numer() * (&den_lcm / c.denom()))
            .collect(),
    )
}

/// Polynomial in y with Q(alpha) coefficients. Kept "trimmed": the leading
/// coefficient has nonzero value at alpha (syntactically nonzero is not
/// enough). Empty = zero at alpha.
#[derive(Clone, Debug)]
pub struct ExtPoly {
    pub c: Vec<XPoly>,
}

impl ExtPoly {
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    fn lc(&self) -> &XPoly {
        self.c.last().expect("lc of zero ExtPoly")
    }

    fn negate(&self) -> ExtPoly {
        ExtPoly {
            c: self
                .c
                .iter()
                .map(|x| x.iter().map(|r| -r.clone()).collect())
                .collect(),
        }
    }

    fn deriv_y(&self) -> ExtPoly {
        if self.c.len() <= 1 {
            return ExtPoly { c: Vec::new() };
        }
        ExtPoly {
            c: self
                .c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, coef)| {
                    let f = Rational::from_integer(BigInt::from(j));
                    coef.iter().map(|r| r * &f).collect()
                })
                .collect(),
        }
    }

    /// Divides out a positive rational scalar content (size control only).
    fn normalize_content(&mut self) {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for coef in &self.c {
            for r in coef {
                if !r.is_zero() {
                    num_gcd = num_gcd.gcd(r.numer());
                    den_lcm = den_lcm.lcm(r.denom());
                }
            }
        }
        if num_gcd.is_zero() {
            return;
        }
        let factor = Rational::new(den_lcm, num_gcd);
        for coef in &mut self.c {
            for r in coef.iter_mut() {
                *r *= &factor;
            }
        }
    }
}

/// All exact work at one algebraic abscissa. Sign queries refine the stored
/// isolating interval persistently, so repeated queries get cheaper.
pub struct AlgCtx {
    alpha: RootInterval,
    /// Monic rational copy of alpha's defining polynomial, for reduction.
    wm: Vec<Rational>,
}

impl AlgCtx {
    pub fn new(alpha: RootInterval) -> Self {
        let w = alpha.defining_ipoly();
        let lc = Rational::from_integer(w.lc().clone());
        let wm: Vec<Rational> = w
            .coeffs()
            .iter()
            .map(|c| Rational::from_integer(c.clone()) / &lc)
            .collect();
        AlgCtx { alpha, wm }
    }

    pub fn alpha(&self) -> &RootInterval {
        &self.alpha
    }

    fn wdeg(&self) -> usize {
        self.wm.len() - 1
    }

    fn reduce(&self, p: XPoly) -> XPoly {
        let n = self.wdeg();
        let mut p = trim_x(p);
        while p.len() > n {
            let top = p.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let k = p.len() - n;
            for j in 0..n {
                p[k + j] -= &top * &self.wm[j];
            }
            p = trim_x(p);
        }
        p
    }

    fn mul_mod(&self, a: &XPoly, b: &XPoly) -> XPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, ca) in a.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.iter().enumerate() {
                out[i + j] += ca * cb;
            }
        }
        self.reduce(out)
    }

    /// Exact sign of the element's value at alpha.
    pub fn sign_of(&mut self, c: &XPoly) -> i8 {
        let ip = xpoly_to_ipoly(c);
        if ip.is_zero() {
            return 0;
        }
        if let Some(r) = self.alpha.as_rational() {
            return ip.sign_at(&r);
        }
        let g = self.alpha.defining_ipoly().gcd(&ip);
        if g.degree() >= 1 && g.has_root_in_closed(self.alpha.lo(), self.alpha.hi()) {
            return 0;
        }
        loop {
            if let Some(r) = self.alpha.as_rational() {
                return ip.sign_at(&r);
            }
            if !ip.has_root_in_closed(self.alpha.lo(), self.alpha.hi()) {
                return ip.sign_at(self.alpha.lo());
            }
            self.alpha.refine();
        }
    }

    /// Drops value-zero leading coefficients.
    pub fn trim(&mut self, mut f: ExtPoly) -> ExtPoly {
        while let Some(top) = f.c.last() {
            if self.sign_of(top) == 0 {
                f.c.pop();
            } else {
                break;
            }
        }
        f
    }

    /// Restriction of a bivariate polynomial to the line x = alpha, as a
    /// trimmed polynomial in y over Q(alpha).
    pub fn specialize(&mut self, p: &MultiPoly) -> ExtPoly {
        assert_eq!(p.nvars(), 2);
        let dy = p.degree_in(1) as usize;
        let mut c: Vec<XPoly> = vec![Vec::new(); dy + 1];
        for (e, coef) in p.terms() {
            let (i, j) = (e[0] as usize, e[1] as usize);
            if c[j].len() <= i {
                c[j].resize(i + 1, Rational::zero());
            }
            c[j][i] += coef;
        }
        let c = c.into_iter().map(|x| self.reduce(x)).collect();
        self.trim(ExtPoly { c })
    }

    /// Value of f at rational y, as an element of Q(alpha).
    pub fn eval_y(&self, f: &ExtPoly, y: &Rational) -> XPoly {
        let mut acc: XPoly = Vec::new();
        for coef in f.c.iter().rev() {
            let mut next: XPoly = acc.iter().map(|r| r * y).collect();
            if next.len() < coef.len() {
                next.resize(coef.len(), Rational::zero());
            }
            for (i, r) in coef.iter().enumerate() {
                next[i] += r;
            }
            acc = trim_x(next);
        }
        acc
    }

    /// Sign of a bivariate polynomial at (alpha, y0).
    pub fn sign_at(&mut self, p: &MultiPoly, y0: &Rational) -> i8 {
        let f = self.specialize(p);
        let v = self.eval_y(&f, y0);
        self.sign_of(&v)
    }

    /// Pseudo-remainder with the overall multiplier positive at alpha.
    fn prem_pos(&mut self, f: &ExtPoly, g: &ExtPoly) -> ExtPoly {
        assert!(!g.is_zero() && g.deg() >= 1);
        let dg = g.deg();
        let lc_g = g.lc().clone();
        let mut r = f.clone();
        let mut mults = 0usize;
        while !r.is_zero() && r.deg() >= dg {
            let dr = r.deg();
            let lc_r = r.lc().clone();
            let delta = dr - dg;
            let mut nc: Vec<XPoly> = Vec::with_capacity(dr);
            for i in 0..dr {
                nc.push(self.mul_mod(&lc_g, &r.c[i]));
            }
            for j in 0..dg {
                let sub = self.mul_mod(&lc_r, &g.c[j]);
                let cell = &mut nc[delta + j];
                if cell.len() < sub.len() {
                    cell.resize(sub.len(), Rational::zero());
                }
                for (i, s) in sub.iter().enumerate() {
                    cell[i] -= s;
                }
                *cell = trim_x(std::mem::take(cell));
            }
            r = self.trim(ExtPoly { c: nc });
            mults += 1;
        }
        if mults % 2 == 1 && self.sign_of(&lc_g) < 0 {
            r.negate()
        } else {
            r
        }
    }

    /// Sturm chain of (f, df/dy) over Q(alpha); valid for root counting of
    /// f(alpha, .) even when f is not square-free.
    pub fn sturm_chain(&mut self, f: &ExtPoly) -> Vec<ExtPoly> {
        assert!(!f.is_zero());
        let mut seq = vec![f.clone()];
        let d = self.trim(f.deriv_y());
        if d.is_zero() {
            return seq;
        }
        seq.push(d);
        loop {
            let n = seq.len();
            if seq[n - 1].deg() == 0 {
                return seq;
            }
            let mut r = self.prem_pos(&seq[n - 2], &seq[n - 1]);
            if r.is_zero() {
                return seq;
            }
            r = r.negate();
            r.normalize_content();
            seq.push(r);
        }
    }

    fn variations(&mut self, chain: &[ExtPoly], y: &Rational) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for f in chain {
            let v = self.eval_y(f, y);
            let s = self.sign_of(&v);
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

    /// Distinct roots of f(alpha, .) in the open interval; endpoints must not
    /// be roots.
    pub fn count_in_open(&mut self, chain: &[ExtPoly], lo: &Rational, hi: &Rational) -> usize {
        self.variations(chain, lo) - self.variations(chain, hi)
    }

    /// Strict bound B: every root of f(alpha, .) lies in (-B, B).
    fn root_bound(&mut self, f: &ExtPoly) -> Rational {
        assert!(!f.is_zero());
        loop {
            let lo = self.alpha.lo().clone();
            let hi = self.alpha.hi().clone();
            let lead = eval_interval(f.lc(), &lo, &hi);
            if !(lead.0.is_positive() || lead.1.is_negative()) {
                // Interval still straddles zero; narrow alpha.
                self.alpha.refine();
                continue;
            }
            let denom = lead.0.abs().min(lead.1.abs());
            let mut numer = Rational::zero();
            for coef in &f.c[..f.deg()] {
                let (m, hi2) = eval_interval(coef, &lo, &hi);
                numer = numer.max(m.abs()).max(hi2.abs());
            }
            return Rational::one() + numer / denom;
        }
    }

    /// Isolating intervals (ascending, disjoint) for the distinct real roots
    /// of f(alpha, .); point intervals where the root is the rational shown.
    /// Non-point endpoints are never roots.
    pub fn isolate(&mut self, f: &ExtPoly) -> Vec<(Rational, Rational)> {
        assert!(!f.is_zero());
        if f.deg() == 0 {
            return Vec::new();
        }
        let chain = self.sturm_chain(f);
        let bound = self.root_bound(f);
        let lo = -bound.clone();
        let hi = bound;
        let v_lo = self.variations(&chain, &lo);
        let v_hi = self.variations(&chain, &hi);
        let mut out = Vec::new();
        let mut stack = vec![(lo, v_lo, hi, v_hi)];
        let two = Rational::from_integer(BigInt::from(2));
        while let Some((a, va, b, vb)) = stack.pop() {
            let cnt = va - vb;
            if cnt == 0 {
                continue;
            }
            if cnt == 1 {
                out.push((a, b));
                continue;
            }
            let m: Rational = (&a + &b) / &two;
            let fm = self.eval_y(f, &m);
            if self.sign_of(&fm) == 0 {
                out.push((m.clone(), m.clone()));
                let mut eps = (&b - &a) / Rational::from_integer(BigInt::from(4));
                let (ml, mr) = loop {
                    let ml = &m - &eps;
                    let mr = &m + &eps;
                    let sl = {
                        let v = self.eval_y(f, &ml);
                        self.sign_of(&v)
                    };
                    let sr = {
                        let v = self.eval_y(f, &mr);
                        self.sign_of(&v)
                    };
                    if sl != 0
                        && sr != 0
                        && self.variations(&chain, &ml) - self.variations(&chain, &mr) == 1
                    {
                        break (ml, mr);
                    }
                    eps /= &two;
                };
                let v_ml = self.variations(&chain, &ml);
                let v_mr = self.variations(&chain, &mr);
                stack.push((a, va, ml, v_ml));
                stack.push((mr, v_mr, b, vb));
            } else {
                let vm = self.variations(&chain, &m);
                stack.push((a, va, m.clone(), vm));
                stack.push((m, vm, b, vb));
            }
        }
        out.sort_by(|x, y| x.0.cmp(&y.0));
        out
    }

    /// Last nonzero element of the pseudo-remainder chain: the gcd of f and g
    /// over Q(alpha), up to a unit. Roots of the result along x = alpha are
    /// exactly the common roots of f and g there.
    pub fn gcd_ext(&mut self, f: &ExtPoly, g: &ExtPoly) -> ExtPoly {
        if f.is_zero() {
            return g.clone();
        }
        if g.is_zero() {
            return f.clone();
        }
        let (mut a, mut b) = if f.deg() >= g.deg() {
            (f.clone(), g.clone())
        } else {
            (g.clone(), f.clone())
        };
        loop {
            if b.is_zero() {
                a.normalize_content();
                return a;
            }
            if b.deg() == 0 {
                return b;
            }
            let mut r = self.prem_pos(&a, &b);
            r.normalize_content();
            a = b;
            b = r;
        }
    }

    /// Product over Q(alpha)[y].
    pub fn ext_mul(&mut self, a: &ExtPoly, b: &ExtPoly) -> ExtPoly {
        if a.is_zero() || b.is_zero() {
            return ExtPoly { c: Vec::new() };
        }
        let mut c: Vec<XPoly> = vec![Vec::new(); a.deg() + b.deg() + 1];
        for (i, ai) in a.c.iter().enumerate() {
            for (j, bj) in b.c.iter().enumerate() {
                let prod = self.mul_mod(ai, bj);
                let cell = &mut c[i + j];
                if cell.len() < prod.len() {
                    cell.resize(prod.len(), Rational::zero());
                }
                for (k, v) in prod.iter().enumerate() {
                    cell[k] += v;
                }
            }
        }
        for cell in &mut c {
            *cell = trim_x(std::mem::take(cell));
        }
        self.trim(ExtPoly { c })
    }

    /// Narrows a window [ylo, yhi] that isolates one root of host(alpha, .)
    /// by one bisection step. Returns the refined window, or the exact
    /// rational root if the midpoint lands on it.
    pub fn refine_section(
        &mut self,
        host: &ExtPoly,
        ylo: &Rational,
        yhi: &Rational,
    ) -> std::result::Result<(Rational, Rational), Rational> {
        let two = Rational::from_integer(BigInt::from(2));
        let m = (ylo + yhi) / &two;
        let vm = self.eval_y(host, &m);
        let sm = self.sign_of(&vm);
        if sm == 0 {
            return Err(m);
        }
        let vlo = self.eval_y(host, ylo);
        let slo = self.sign_of(&vlo);
        if sm == slo {
            Ok((m, yhi.clone()))
        } else {
            Ok((ylo.clone(), m))
        }
    }
}

/// Interval Horner evaluation: encloses {c(x) : x in [lo, hi]}.
fn eval_interval(c: &XPoly, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    let mut acc = (Rational::zero(), Rational::zero());
    for r in c.iter().rev() {
        // acc * [lo, hi] + r
        let cands = [
            &acc.0 * lo,
            &acc.0 * hi,
            &acc.1 * lo,
            &acc.1 * hi,
        ];
        let mut mn = cands[0].clone();
        let mut mx = cands[0].clone();
        for v in &cands[1..] {
            if v < &mn {
                mn = v.clone();
            }
            if v > &mx {
                mx = v.clone();
            }
        }
        acc = (mn + r, mx + r);
    }
    acc
}

/// Sign of ps at the section point beta, where beta is the unique root of
/// hs in [ylo, yhi] and the window endpoints are not roots of hs.
pub fn section_sign(
    ctx: &mut AlgCtx,
    hs: &ExtPoly,
    ps: &ExtPoly,
    ylo: &Rational,
    yhi: &Rational,
) -> i8 {
    if ps.is_zero() {
        return 0;
    }
    if ylo == yhi {
        let v = ctx.eval_y(ps, ylo);
        return ctx.sign_of(&v);
    }
    if ps.deg() >= 1 {
        // Zero test: ps(beta) = 0 iff gcd(hs, ps) has a root in the window;
        // such a root is an hs-root in the window, hence beta itself. The
        // gcd divides hs, so the window endpoints are not gcd roots either.
        let g = ctx.gcd_ext(hs, ps);
        if g.deg() >= 1 {
            let chain = ctx.sturm_chain(&g);
            if ctx.count_in_open(&chain, ylo, yhi) > 0 {
                return 0;
            }
        }
    }
    nonzero_section_sign(ctx, hs, ps, ylo, yhi)
}

/// Sign of p at the point (alpha, beta) where beta is the unique root of
/// host(alpha, .) in [ylo, yhi] (endpoints not roots unless ylo == yhi).
pub fn sign_at_section(
    p: &MultiPoly,
    x: &RootInterval,
    host: &MultiPoly,
    ylo: &Rational,
    yhi: &Rational,
) -> i8 {
    let mut ctx = AlgCtx::new(x.clone());
    let hs = ctx.specialize(host);
    assert!(!hs.is_zero(), "section host vanishes identically on the line");
    if ylo == yhi {
        return ctx.sign_at(p, ylo);
    }
    let ps = ctx.specialize(p);
    section_sign(&mut ctx, &hs, &ps, ylo, yhi)
}

/// Sign of ps at the host root when ps is known not to vanish there: narrow
/// the window until ps is root-free across it, then read the endpoint sign.
fn nonzero_section_sign(
    ctx: &mut AlgCtx,
    hs: &ExtPoly,
    ps: &ExtPoly,
    ylo: &Rational,
    yhi: &Rational,
) -> i8 {
    let mut lo = ylo.clone();
    let mut hi = yhi.clone();
    let pchain = if ps.deg() >= 1 {
        Some(ctx.sturm_chain(ps))
    } else {
        None
    };
    loop {
        let slo = {
            let v = ctx.eval_y(ps, &lo);
            ctx.sign_of(&v)
        };
        let shi = {
            let v = ctx.eval_y(ps, &hi);
            ctx.sign_of(&v)
        };
        if slo != 0 && shi != 0 {
            match &pchain {
                None => return slo,
                Some(chain) => {
                    if ctx.count_in_open(chain, &lo, &hi) == 0 {
                        return slo;
                    }
                }
            }
        }
        match ctx.refine_section(hs, &lo, &hi) {
            Ok((a, b)) => {
                lo = a;
                hi = b;
            }
            Err(root) => {
                let v = ctx.eval_y(ps, &root);
                return ctx.sign_of(&v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_i64};
    use crate::point::SamplePoint;
    use crate::roots::isolate_real_roots;

    fn sqrt2() -> RootInterval {
        isolate_real_roots(&MultiPoly::univar(&[(-2, 0), (1, 2)]))
            .unwrap()
            .remove(1)
    }

    #[test]
    fn specialize_and_band_signs() {
        let mut ctx = AlgCtx::new(sqrt2());
        // x*y - 2 at (sqrt2, 1): sqrt2 - 2 < 0
        let p = MultiPoly::bivar(&[(1, 1, 1), (-2, 0, 0)]);
        assert_eq!(ctx.sign_at(&p, &rat_i64(1)), -1);
        // at (sqrt2, 2): 2*sqrt2 - 2 > 0
        assert_eq!(ctx.sign_at(&p, &rat_i64(2)), 1);
        // x^2 - 2 vanishes identically on the line
        let w = MultiPoly::bivar(&[(1, 2, 0), (-2, 0, 0)]);
        assert_eq!(ctx.sign_at(&w, &rat_i64(7)), 0);
    }

    #[test]
    fn trim_drops_value_zero_leaders() {
        let mut ctx = AlgCtx::new(sqrt2());
        // (x^2-2) y^3 + y - 1 restricted to x = sqrt2 is y - 1.
        let p = MultiPoly::bivar(&[(1, 2, 3), (-2, 0, 3), (1, 0, 1), (-1, 0, 0)]);
        let f = ctx.specialize(&p);
        assert_eq!(f.deg(), 1);
        let roots = ctx.isolate(&f);
        assert_eq!(roots.len(), 1);
        assert!(roots[0].0 <= rat_i64(1) && rat_i64(1) <= roots[0].1);
    }

    #[test]
    fn isolate_on_critical_line() {
        let mut ctx = AlgCtx::new(sqrt2());
        // y^2 - x at x = sqrt2: roots +- 2^(1/4), around +-1.19.
        let p = MultiPoly::bivar(&[(1, 0, 2), (-1, 1, 0)]);
        let f = ctx.specialize(&p);
        let roots = ctx.isolate(&f);
        assert_eq!(roots.len(), 2);
        assert!(roots[0].1 <= roots[1].0);
        // Root values straddle zero.
        assert!(roots[0].1 < rat_i64(0) || roots[0].0 < rat_i64(0));
        assert!(roots[1].0 > rat(1, 1) || roots[1].1 > rat(1, 1));
        // A poly with no roots on the line.
        let q = MultiPoly::bivar(&[(1, 0, 2), (1, 1, 0)]); // y^2 + x, x > 0
        let fq = ctx.specialize(&q);
        assert!(ctx.isolate(&fq).is_empty());
    }

    #[test]
    fn gcd_finds_common_section() {
        let mut ctx = AlgCtx::new(sqrt2());
        let base = MultiPoly::bivar(&[(1, 0, 2), (-1, 1, 0)]); // y^2 - x
        let f1 = &base * &MultiPoly::bivar(&[(1, 0, 1), (-1, 0, 0)]); // * (y-1)
        let f2 = &base * &MultiPoly::bivar(&[(1, 0, 1), (2, 0, 0)]); // * (y+2)
        let e1 = ctx.specialize(&f1);
        let e2 = ctx.specialize(&f2);
        let g = ctx.gcd_ext(&e1, &e2);
        assert_eq!(g.deg(), 2);
        assert_eq!(ctx.isolate(&g).len(), 2);
    }

    #[test]
    fn section_sign_with_cancellation() {
        // beta = 2^(1/4) as the positive root of y^2 - x at x = sqrt2,
        // window [1, 3/2].
        let host = MultiPoly::bivar(&[(1, 0, 2), (-1, 1, 0)]);
        let x = sqrt2();
        // y^4 - x^2 = (y^2-x)(y^2+x) vanishes at the section.
        let p = MultiPoly::bivar(&[(1, 0, 4), (-1, 2, 0)]);
        assert_eq!(sign_at_section(&p, &x, &host, &rat_i64(1), &rat(3, 2)), 0);
        // y - x at (sqrt2, 2^(1/4)): 1.19 - 1.41 < 0.
        let q = MultiPoly::bivar(&[(1, 0, 1), (-1, 1, 0)]);
        assert_eq!(sign_at_section(&q, &x, &host, &rat_i64(1), &rat(3, 2)), -1);
        // y + x > 0 there.
        let r = MultiPoly::bivar(&[(1, 0, 1), (1, 1, 0)]);
        assert_eq!(sign_at_section(&r, &x, &host, &rat_i64(1), &rat(3, 2)), 1);
        // Same checks through the SamplePoint interface.
        let sp = SamplePoint::CritSection {
            x,
            host,
            ylo: rat_i64(1),
            yhi: rat(3, 2),
        };
        assert_eq!(sp.sign_at(&p).unwrap(), 0);
        assert_eq!(sp.sign_at(&q).unwrap(), -1);
    }

    #[test]
    fn section_sign_rational_beta() {
        // host y^2 - 9 has rational root 3; alpha = sqrt2 plays no role in y.
        let host = MultiPoly::bivar(&[(1, 0, 2), (-9, 0, 0)]);
        let x = sqrt2();
        // x*y - 5 at (sqrt2, 3): 3 sqrt2 - 5 < 0 (4.24 - 5)
        let q = MultiPoly::bivar(&[(1, 1, 1), (-5, 0, 0)]);
        assert_eq!(sign_at_section(&q, &x, &host, &rat_i64(2), &rat_i64(4)), -1);
        // x*y - 4 at (sqrt2, 3): 4.24 - 4 > 0
        let r = MultiPoly::bivar(&[(1, 1, 1), (-4, 0, 0)]);
        assert_eq!(sign_at_section(&r, &x, &host, &rat_i64(2), &rat_i64(4)), 1);
    }
}
