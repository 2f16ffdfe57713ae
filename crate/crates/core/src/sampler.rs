//! Sign-condition sampling for finite sets of bivariate polynomials.
//!
//! One level of cylindrical decomposition: critical x-values (content roots,
//! leading-coefficient roots, discriminants, pairwise resultants) cut the
//! plane into slabs; each slab and each critical line gets a full vertical
//! stack of exact sample points. Every distinct realizable sign vector of the
//! input polynomials is realized by at least one sample.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algext::{section_sign, AlgCtx, ExtPoly};
use crate::error::{Error, Result};
use crate::num::{format_rational, parse_rational, rational_to_f64, simplest_in_open, Rational};
use crate::point::{AlgebraicPoint, SamplePoint, YCoord};
use crate::poly::{
    discriminant, gcd_poly, rational_sign, resultant, split_content_in, squarefree_in, MultiPoly,
};
use crate::roots::{isolate_real_roots, RootInterval};
use crate::sign::SignVector;

/// One exact sample point with the sign vector of the inputs and its position
/// in the decomposition (interleaved slab index, then height in the stack).
#[derive(Clone, Debug, Serialize)]
pub struct CellSample {
    pub point: SamplePoint,
    pub signs: SignVector,
    pub slab: u32,
    pub stack: u32,
}

/// ceil((50 * s * l / d)^d): the sign-condition count bound used for
/// theoretical sample sizes. Exact integer arithmetic throughout.
pub fn mt_bound(s: u64, l: u64, d: u64) -> Result<BigInt> {
    if s < 1 || l < 1 || d < 1 || d > l {
        return Err(Error::out_of_range(format!(
            "mt_bound needs s >= 1 and 1 <= d <= l, got s={s}, l={l}, d={d}"
        )));
    }
    let base = Rational::new(BigInt::from(50 * s * l), BigInt::from(d));
    let mut acc = Rational::one();
    for _ in 0..d {
        acc *= &base;
    }
    Ok(acc.ceil().to_integer())
}

/// An x-coordinate that may be rational or algebraic. Algebraic values are
/// always non-point intervals (rational roots are recognized and converted).
#[derive(Clone, Debug)]
pub enum XVal {
    Rat(Rational),
    Alg(RootInterval),
}

impl XVal {
    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        match self {
            XVal::Rat(a) => a.cmp(r),
            XVal::Alg(iv) => iv.cmp_rational(r),
        }
    }

    pub fn cmp_xval(&self, other: &XVal) -> Ordering {
        match (self, other) {
            (XVal::Rat(a), XVal::Rat(b)) => a.cmp(b),
            (XVal::Rat(a), XVal::Alg(iv)) => iv.cmp_rational(a).reverse(),
            (XVal::Alg(iv), XVal::Rat(b)) => iv.cmp_rational(b),
            (XVal::Alg(a), XVal::Alg(b)) => a.cmp_root(b),
        }
    }

    /// A rational at or below the value (equal only in the rational case).
    pub fn lower(&self) -> Rational {
        match self {
            XVal::Rat(r) => r.clone(),
            XVal::Alg(iv) => iv.lo().clone(),
        }
    }

    pub fn upper(&self) -> Rational {
        match self {
            XVal::Rat(r) => r.clone(),
            XVal::Alg(iv) => iv.hi().clone(),
        }
    }

    pub fn refine(&mut self) {
        if let XVal::Alg(iv) = self {
            iv.refine();
            if let Some(r) = iv.as_rational() {
                *self = XVal::Rat(r);
            }
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            XVal::Rat(r) => Some(r),
            XVal::Alg(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            XVal::Rat(r) => rational_to_f64(r),
            XVal::Alg(iv) => iv.to_f64(),
        }
    }
}

impl Serialize for XVal {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            XVal::Rat(r) => ser.serialize_str(&format_rational(r)),
            XVal::Alg(iv) => iv.serialize(ser),
        }
    }
}

impl<'de> Deserialize<'de> for XVal {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(de)?;
        match v {
            serde_json::Value::String(s) => Ok(XVal::Rat(
                parse_rational(&s).map_err(D::Error::custom)?,
            )),
            other => Ok(XVal::Alg(
                serde_json::from_value(other).map_err(D::Error::custom)?,
            )),
        }
    }
}

/// Merge the real roots of a list of univariate polynomials into a sorted,
/// deduplicated, pairwise strictly separated list of x-values.
pub(crate) fn merge_xvals(crit_polys: &[MultiPoly]) -> Result<Vec<XVal>> {
    let mut crits: Vec<XVal> = Vec::new();
    for cp in crit_polys {
        for iv in isolate_real_roots(cp)? {
            let x = match iv.try_rational(80) {
                Some(r) => XVal::Rat(r),
                None => XVal::Alg(iv),
            };
            let mut inserted = false;
            for k in 0..crits.len() {
                match x.cmp_xval(&crits[k]) {
                    Ordering::Equal => {
                        inserted = true;
                        break;
                    }
                    Ordering::Less => {
                        crits.insert(k, x.clone());
                        inserted = true;
                        break;
                    }
                    Ordering::Greater => {}
                }
            }
            if !inserted {
                crits.push(x);
            }
        }
    }
    // Separate neighbours so every slab has a visible rational gap.
    for k in 1..crits.len() {
        loop {
            if crits[k - 1].upper() < crits[k].lower() {
                break;
            }
            crits[k - 1].refine();
            crits[k].refine();
        }
    }
    Ok(crits)
}

/// The univariate polynomials whose roots are the critical x-values of the
/// input list: y-contents, leading y-coefficients, discriminants, and
/// pairwise resultants (with a cofactor fallback for shared components).
pub(crate) fn critical_polys_for(polys: &[MultiPoly]) -> Result<Vec<MultiPoly>> {
    let mut cpolys: Vec<MultiPoly> = Vec::new();
    let mut sqfs: Vec<Option<MultiPoly>> = vec![None; polys.len()];
    for (i, p) in polys.iter().enumerate() {
        if p.nvars() != 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                got: p.nvars(),
            });
        }
        if p.is_constant() {
            continue;
        }
        let (cont, prim) = split_content_in(p, 1);
        if !cont.is_constant() {
            cpolys.push(cont.squeeze_var(1)?);
        }
        if prim.degree_in(1) == 0 {
            continue;
        }
        let sqf = squarefree_in(&prim, 1);
        let lc = sqf.leading_coeff_in(1);
        if !lc.is_constant() {
            cpolys.push(lc.squeeze_var(1)?);
        }
        if sqf.degree_in(1) >= 2 {
            let disc = discriminant(&sqf, 1)?;
            if !disc.is_zero() && !disc.is_constant() {
                cpolys.push(disc.squeeze_var(1)?);
            }
        }
        sqfs[i] = Some(sqf);
    }
    for i in 0..polys.len() {
        let Some(a) = &sqfs[i] else { continue };
        for j in i + 1..polys.len() {
            let Some(b) = &sqfs[j] else { continue };
            if let Some(r) = cross_resultant(a, b)? {
                cpolys.push(r);
            }
        }
    }
    Ok(cpolys)
}

/// res_y of two square-free y-positive polynomials as a univariate in x,
/// falling back to the cofactors when they share a component. None when the
/// resultant is a nonzero constant (no crossings).
pub(crate) fn cross_resultant(a: &MultiPoly, b: &MultiPoly) -> Result<Option<MultiPoly>> {
    let mut r = resultant(a, b, 1)?;
    if r.is_zero() {
        // Shared factor: compare the cofactors instead (the shared part's
        // own criticals are already covered by discriminant terms).
        let h = gcd_poly(a, b);
        let a2 = a.exact_div(&h).expect("gcd divides");
        let b2 = b.exact_div(&h).expect("gcd divides");
        if a2.degree_in(1) == 0 || b2.degree_in(1) == 0 {
            return Ok(None);
        }
        r = resultant(&a2, &b2, 1)?;
    }
    if r.is_constant() {
        return Ok(None);
    }
    Ok(Some(r.squeeze_var(1)?))
}

/// Sorted, pairwise strictly separated critical x-values for the input list.
pub(crate) fn criticals_for(polys: &[MultiPoly]) -> Result<Vec<XVal>> {
    merge_xvals(&critical_polys_for(polys)?)
}

/// One rational sample abscissa per open slab (len = criticals + 1).
pub(crate) fn slab_points(crits: &[XVal]) -> Vec<Rational> {
    if crits.is_empty() {
        return vec![Rational::zero()];
    }
    let mut xs = Vec::with_capacity(crits.len() + 1);
    xs.push(crits[0].lower().floor() - Rational::one());
    for k in 0..crits.len() - 1 {
        xs.push(simplest_in_open(&crits[k].upper(), &crits[k + 1].lower()));
    }
    xs.push(crits[crits.len() - 1].upper().floor() + Rational::one());
    xs
}

/// Vertical stack over a rational abscissa: one sample per section (root of
/// some input restricted to the line) and one per gap, with exact signs.
pub(crate) fn stack_at(polys: &[MultiPoly], x0: &Rational) -> Result<Vec<(YCoord, Vec<i8>)>> {
    let specs: Vec<Option<MultiPoly>> = polys
        .iter()
        .map(|p| {
            let q = p.substitute(0, x0);
            (!q.is_zero()).then_some(q)
        })
        .collect();
    let mut product: Option<MultiPoly> = None;
    for q in specs.iter().flatten() {
        if q.degree_in(0) == 0 {
            continue;
        }
        product = Some(match product {
            None => q.clone(),
            Some(acc) => &acc * q,
        });
    }
    let roots = match &product {
        None => Vec::new(),
        Some(prod) => isolate_real_roots(prod)?,
    };
    let ys = interleave_roots(&roots);
    let mut out = Vec::with_capacity(ys.len());
    for y in ys {
        let signs: Vec<i8> = specs
            .iter()
            .map(|q| match q {
                None => 0,
                Some(q) => match &y {
                    YCoord::Rat(v) => {
                        rational_sign(&q.eval(&[v.clone()]).expect("univariate eval"))
                    }
                    YCoord::Root(r) => r.sign_of_upoly(q),
                },
            })
            .collect();
        out.push((y, signs));
    }
    Ok(out)
}

/// Band-section-band interleaving of a sorted disjoint root list.
fn interleave_roots(roots: &[RootInterval]) -> Vec<YCoord> {
    if roots.is_empty() {
        return vec![YCoord::Rat(Rational::zero())];
    }
    let mut ys = Vec::with_capacity(2 * roots.len() + 1);
    ys.push(YCoord::Rat(roots[0].lo().floor() - Rational::one()));
    for k in 0..roots.len() {
        ys.push(match roots[k].as_rational() {
            Some(r) => YCoord::Rat(r),
            None => YCoord::Root(roots[k].clone()),
        });
        if k + 1 < roots.len() {
            let a = roots[k].hi();
            let b = roots[k + 1].lo();
            // Touching endpoints are never roots, so the touch value works.
            let mid = if a == b {
                a.clone()
            } else {
                simplest_in_open(a, b)
            };
            ys.push(YCoord::Rat(mid));
        }
    }
    ys.push(YCoord::Rat(roots[roots.len() - 1].hi().floor() + Rational::one()));
    ys
}

/// Full exact stack on an irrational critical line x = alpha.
pub(crate) fn ext_stack(
    polys: &[MultiPoly],
    alpha: &RootInterval,
) -> Vec<(SamplePoint, Vec<i8>)> {
    let mut ctx = AlgCtx::new(alpha.clone());
    let specs: Vec<Option<ExtPoly>> = polys
        .iter()
        .map(|p| {
            let f = ctx.specialize(p);
            (!f.is_zero()).then_some(f)
        })
        .collect();
    let carriers: Vec<usize> = specs
        .iter()
        .enumerate()
        .filter(|(_, f)| f.as_ref().is_some_and(|f| f.deg() >= 1))
        .map(|(i, _)| i)
        .collect();

    let band_signs = |ctx: &mut AlgCtx, y: &Rational, specs: &[Option<ExtPoly>]| -> Vec<i8> {
        specs
            .iter()
            .map(|f| match f {
                None => 0,
                Some(f) => {
                    let v = ctx.eval_y(f, y);
                    ctx.sign_of(&v)
                }
            })
            .collect()
    };

    if carriers.is_empty() {
        let y = Rational::zero();
        let signs = band_signs(&mut ctx, &y, &specs);
        return vec![(
            SamplePoint::CritBand {
                x: alpha.clone(),
                y,
            },
            signs,
        )];
    }

    let mut hspec = specs[carriers[0]].clone().unwrap();
    let mut host = polys[carriers[0]].clone();
    for &i in &carriers[1..] {
        hspec = ctx.ext_mul(&hspec, specs[i].as_ref().unwrap());
        host = &host * &polys[i];
    }
    let windows = ctx.isolate(&hspec);
    if windows.is_empty() {
        let y = Rational::zero();
        let signs = band_signs(&mut ctx, &y, &specs);
        return vec![(
            SamplePoint::CritBand {
                x: alpha.clone(),
                y,
            },
            signs,
        )];
    }

    let mut out: Vec<(SamplePoint, Vec<i8>)> = Vec::with_capacity(2 * windows.len() + 1);
    let push_band = |ctx: &mut AlgCtx, y: Rational, out: &mut Vec<(SamplePoint, Vec<i8>)>| {
        let signs = band_signs(ctx, &y, &specs);
        out.push((
            SamplePoint::CritBand {
                x: alpha.clone(),
                y,
            },
            signs,
        ));
    };

    push_band(&mut ctx, windows[0].0.floor() - Rational::one(), &mut out);
    for k in 0..windows.len() {
        let (wlo, whi) = &windows[k];
        if wlo == whi {
            push_band(&mut ctx, wlo.clone(), &mut out);
        } else {
            let signs: Vec<i8> = specs
                .iter()
                .map(|f| match f {
                    None => 0,
                    Some(f) => section_sign(&mut ctx, &hspec, f, wlo, whi),
                })
                .collect();
            out.push((
                SamplePoint::CritSection {
                    x: alpha.clone(),
                    host: host.clone(),
                    ylo: wlo.clone(),
                    yhi: whi.clone(),
                },
                signs,
            ));
        }
        if k + 1 < windows.len() {
            let a = &windows[k].1;
            let b = &windows[k + 1].0;
            let mid = if a == b { a.clone() } else { simplest_in_open(a, b) };
            push_band(&mut ctx, mid, &mut out);
        }
    }
    push_band(
        &mut ctx,
        windows[windows.len() - 1].1.floor() + Rational::one(),
        &mut out,
    );
    out
}

/// Exact sample points realizing every realizable sign vector of the inputs.
pub fn sample_sign_conditions(polys: &[MultiPoly]) -> Result<Vec<CellSample>> {
    let crits = criticals_for(polys)?;
    let xs = slab_points(&crits);
    let mut out = Vec::new();
    for k in 0..xs.len() {
        for (stack, (y, signs)) in stack_at(polys, &xs[k])?.into_iter().enumerate() {
            out.push(CellSample {
                point: SamplePoint::Plain(AlgebraicPoint {
                    x: xs[k].clone(),
                    y,
                }),
                signs: SignVector(signs),
                slab: 2 * k as u32,
                stack: stack as u32,
            });
        }
        if k < crits.len() {
            let slab = (2 * k + 1) as u32;
            match &crits[k] {
                XVal::Rat(c) => {
                    for (stack, (y, signs)) in stack_at(polys, c)?.into_iter().enumerate() {
                        out.push(CellSample {
                            point: SamplePoint::Plain(AlgebraicPoint { x: c.clone(), y }),
                            signs: SignVector(signs),
                            slab,
                            stack: stack as u32,
                        });
                    }
                }
                XVal::Alg(r) => {
                    for (stack, (sp, signs)) in ext_stack(polys, r).into_iter().enumerate() {
                        out.push(CellSample {
                            point: sp,
                            signs: SignVector(signs),
                            slab,
                            stack: stack as u32,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Samples restricted to the zero set of `curve`: runs the decomposition on
/// {curve} and the inputs, keeps samples where the curve vanishes, and
/// reports the sign vectors of the inputs alone.
pub fn restrict_to_curve(polys: &[MultiPoly], curve: &MultiPoly) -> Result<Vec<CellSample>> {
    if curve.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut combined = Vec::with_capacity(polys.len() + 1);
    combined.push(curve.clone());
    combined.extend_from_slice(polys);
    let samples = sample_sign_conditions(&combined)?;
    Ok(samples
        .into_iter()
        .filter(|s| s.signs.0[0] == 0)
        .map(|s| CellSample {
            point: s.point,
            signs: SignVector(s.signs.0[1..].to_vec()),
            slab: s.slab,
            stack: s.stack,
        })
        .collect())
}

/// Exact points covering every sign-invariant piece of the zero set of `g`
/// with respect to `hs`: one per branch arc between curve criticals, every
/// curve point on a critical line, and full stacks on vertical-line
/// components. Cheaper than a joint decomposition of {g} ∪ hs: the only
/// pairwise eliminations taken are res(g, h), never h against h'.
pub(crate) fn curve_points(
    g: &MultiPoly,
    hs: &[MultiPoly],
) -> Result<Vec<(SamplePoint, Vec<i8>)>> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if g.nvars() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: g.nvars(),
        });
    }
    if g.is_constant() {
        return Ok(Vec::new());
    }
    let mut cps: Vec<MultiPoly> = Vec::new();
    let (gcont, gprim) = split_content_in(g, 1);
    if !gcont.is_constant() {
        cps.push(gcont.squeeze_var(1)?);
    }
    let gsqf = if gprim.degree_in(1) >= 1 {
        let s = squarefree_in(&gprim, 1);
        let lc = s.leading_coeff_in(1);
        if !lc.is_constant() {
            cps.push(lc.squeeze_var(1)?);
        }
        if s.degree_in(1) >= 2 {
            let disc = discriminant(&s, 1)?;
            if !disc.is_zero() && !disc.is_constant() {
                cps.push(disc.squeeze_var(1)?);
            }
        }
        Some(s)
    } else {
        None
    };
    for h in hs {
        if h.nvars() != 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                got: h.nvars(),
            });
        }
        if h.is_constant() {
            continue;
        }
        let (hcont, hprim) = split_content_in(h, 1);
        if !hcont.is_constant() {
            cps.push(hcont.squeeze_var(1)?);
        }
        if hprim.degree_in(1) >= 1 {
            if let Some(gs) = &gsqf {
                let hsq = squarefree_in(&hprim, 1);
                if let Some(r) = cross_resultant(gs, &hsq)? {
                    cps.push(r);
                }
            }
        }
    }
    let crits = merge_xvals(&cps)?;
    let mut out: Vec<(SamplePoint, Vec<i8>)> = Vec::new();
    for x0 in slab_points(&crits) {
        rational_line_points(g, hs, &x0, &mut out)?;
    }
    for c in &crits {
        match c {
            XVal::Rat(x0) => rational_line_points(g, hs, x0, &mut out)?,
            XVal::Alg(alpha) => ext_line_points(g, hs, alpha, &mut out),
        }
    }
    Ok(out)
}

/// Points of Z(g) on the rational line x = x0 with exact signs of hs.
pub(crate) fn rational_line_points(
    g: &MultiPoly,
    hs: &[MultiPoly],
    x0: &Rational,
    out: &mut Vec<(SamplePoint, Vec<i8>)>,
) -> Result<()> {
    let spec = g.substitute(0, x0);
    if spec.is_zero() {
        // Vertical-line component: every stack point lies on the curve.
        for (y, signs) in stack_at(hs, x0)? {
            out.push((
                SamplePoint::Plain(AlgebraicPoint { x: x0.clone(), y }),
                signs,
            ));
        }
        return Ok(());
    }
    if spec.degree_in(0) == 0 {
        return Ok(());
    }
    let hspecs: Vec<Option<MultiPoly>> = hs
        .iter()
        .map(|h| {
            let q = h.substitute(0, x0);
            (!q.is_zero()).then_some(q)
        })
        .collect();
    for iv in isolate_real_roots(&spec)? {
        let y = match iv.as_rational() {
            Some(r) => YCoord::Rat(r),
            None => YCoord::Root(iv),
        };
        let signs: Vec<i8> = hspecs
            .iter()
            .map(|q| match q {
                None => 0,
                Some(q) => match &y {
                    YCoord::Rat(v) => {
                        rational_sign(&q.eval(&[v.clone()]).expect("univariate eval"))
                    }
                    YCoord::Root(r) => r.sign_of_upoly(q),
                },
            })
            .collect();
        out.push((
            SamplePoint::Plain(AlgebraicPoint { x: x0.clone(), y }),
            signs,
        ));
    }
    Ok(())
}

/// Points of Z(g) on the irrational line x = alpha with exact signs of hs.
pub(crate) fn ext_line_points(
    g: &MultiPoly,
    hs: &[MultiPoly],
    alpha: &RootInterval,
    out: &mut Vec<(SamplePoint, Vec<i8>)>,
) {
    let mut ctx = AlgCtx::new(alpha.clone());
    let gspec = ctx.specialize(g);
    if gspec.is_zero() {
        out.extend(ext_stack(hs, alpha));
        return;
    }
    if gspec.deg() == 0 {
        return;
    }
    let hspecs: Vec<Option<ExtPoly>> = hs
        .iter()
        .map(|h| {
            let f = ctx.specialize(h);
            (!f.is_zero()).then_some(f)
        })
        .collect();
    for (wlo, whi) in ctx.isolate(&gspec) {
        if wlo == whi {
            let signs: Vec<i8> = hspecs
                .iter()
                .map(|f| match f {
                    None => 0,
                    Some(f) => {
                        let v = ctx.eval_y(f, &wlo);
                        ctx.sign_of(&v)
                    }
                })
                .collect();
            out.push((
                SamplePoint::CritBand {
                    x: alpha.clone(),
                    y: wlo,
                },
                signs,
            ));
        } else {
            let signs: Vec<i8> = hspecs
                .iter()
                .map(|f| match f {
                    None => 0,
                    Some(f) => section_sign(&mut ctx, &gspec, f, &wlo, &whi),
                })
                .collect();
            out.push((
                SamplePoint::CritSection {
                    x: alpha.clone(),
                    host: g.clone(),
                    ylo: wlo,
                    yhi: whi,
                },
                signs,
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_i64};
    use std::collections::BTreeSet;

    fn circle() -> MultiPoly {
        MultiPoly::bivar(&[(1, 2, 0), (1, 0, 2), (-1, 0, 0)])
    }

    fn distinct(samples: &[CellSample]) -> BTreeSet<SignVector> {
        samples.iter().map(|s| s.signs.clone()).collect()
    }

    #[test]
    fn mt_bound_frozen() {
        assert_eq!(mt_bound(3, 2, 2).unwrap(), BigInt::from(22500));
        assert_eq!(mt_bound(1, 2, 2).unwrap(), BigInt::from(2500));
        assert!(mt_bound(0, 2, 2).is_err());
        assert!(mt_bound(1, 2, 3).is_err());
    }

    #[test]
    fn circle_decomposition_shape() {
        let samples = sample_sign_conditions(&[circle()]).unwrap();
        assert_eq!(samples.len(), 13);
        let mut per_slab = std::collections::BTreeMap::new();
        for s in &samples {
            *per_slab.entry(s.slab).or_insert(0usize) += 1;
        }
        let sizes: Vec<usize> = per_slab.values().copied().collect();
        assert_eq!(sizes, vec![1, 3, 5, 3, 1]);
        let vecs = distinct(&samples);
        assert_eq!(vecs.len(), 3);
        assert!(vecs.contains(&SignVector(vec![-1])));
        assert!(vecs.contains(&SignVector(vec![0])));
        assert!(vecs.contains(&SignVector(vec![1])));
    }

    #[test]
    fn single_line_three_cells() {
        let y = MultiPoly::bivar(&[(1, 0, 1)]);
        let samples = sample_sign_conditions(&[y]).unwrap();
        assert_eq!(samples.len(), 3);
        assert_eq!(distinct(&samples).len(), 3);
    }

    #[test]
    fn axes_give_nine_vectors() {
        let x = MultiPoly::bivar(&[(1, 1, 0)]);
        let y = MultiPoly::bivar(&[(1, 0, 1)]);
        let samples = sample_sign_conditions(&[x, y]).unwrap();
        let vecs = distinct(&samples);
        assert_eq!(vecs.len(), 9);
    }

    #[test]
    fn vertical_component_goes_all_zero() {
        // x*y vanishes identically on the line x = 0.
        let p = MultiPoly::bivar(&[(1, 1, 1)]);
        let samples = sample_sign_conditions(&[p]).unwrap();
        let vecs = distinct(&samples);
        assert_eq!(vecs.len(), 3);
        // The all-zero vector must come from the critical line.
        assert!(samples
            .iter()
            .any(|s| s.signs == SignVector(vec![0]) && s.slab % 2 == 1));
    }

    #[test]
    fn signs_recheck_through_point_interface() {
        let parab = MultiPoly::bivar(&[(1, 0, 1), (-1, 2, 0)]); // y - x^2
        let polys = [circle(), parab];
        let samples = sample_sign_conditions(&polys).unwrap();
        for s in &samples {
            for (i, p) in polys.iter().enumerate() {
                assert_eq!(
                    s.point.sign_at(p).unwrap(),
                    s.signs.0[i],
                    "sign mismatch at sample {:?}",
                    s.point.approx()
                );
            }
        }
    }

    #[test]
    fn irrational_crossings_are_sampled() {
        // circle of radius sqrt3 and parabola meet at irrational abscissas:
        // x^4 + x^2 - 3 = 0.
        let c3 = MultiPoly::bivar(&[(1, 2, 0), (1, 0, 2), (-3, 0, 0)]);
        let parab = MultiPoly::bivar(&[(1, 0, 1), (-1, 2, 0)]);
        let samples = sample_sign_conditions(&[c3.clone(), parab.clone()]).unwrap();
        let vecs = distinct(&samples);
        assert!(
            vecs.contains(&SignVector(vec![0, 0])),
            "common zero must be sampled, got {vecs:?}"
        );
        // Exactness spot check on every critical-line sample.
        for s in &samples {
            assert_eq!(s.point.sign_at(&c3).unwrap(), s.signs.0[0]);
            assert_eq!(s.point.sign_at(&parab).unwrap(), s.signs.0[1]);
        }
    }

    #[test]
    fn restriction_to_curve() {
        let parab = MultiPoly::bivar(&[(1, 0, 1), (-1, 2, 0)]);
        let on_circle = restrict_to_curve(&[parab], &circle()).unwrap();
        assert!(!on_circle.is_empty());
        // All samples certified on the circle, and the parabola changes sign
        // along it (it passes through the disk).
        let mut signs = BTreeSet::new();
        for s in &on_circle {
            assert_eq!(s.point.sign_at(&circle()).unwrap(), 0);
            signs.insert(s.signs.0[0]);
        }
        assert!(signs.contains(&1) && signs.contains(&-1) && signs.contains(&0));
        assert!(restrict_to_curve(&[], &MultiPoly::zero(2)).is_err());
    }

    #[test]
    fn tangency_produces_touch_vector() {
        // Two circles tangent at (1, 0): unit circle and (x-2)^2 + y^2 = 1.
        let c2 = MultiPoly::bivar(&[(1, 2, 0), (-4, 1, 0), (1, 0, 2), (3, 0, 0)]);
        let samples = sample_sign_conditions(&[circle(), c2]).unwrap();
        let vecs = distinct(&samples);
        assert!(vecs.contains(&SignVector(vec![0, 0])), "tangency point must appear");
        // Inside-inside never happens for externally tangent circles.
        assert!(!vecs.contains(&SignVector(vec![-1, -1])));
    }

    #[test]
    fn rational_criticals_recognized() {
        let crits = criticals_for(&[circle()]).unwrap();
        assert_eq!(crits.len(), 2);
        assert!(matches!(&crits[0], XVal::Rat(r) if *r == rat_i64(-1)));
        assert!(matches!(&crits[1], XVal::Rat(r) if *r == rat_i64(1)));
        let xs = slab_points(&crits);
        assert_eq!(xs.len(), 3);
        assert!(xs[0] < rat_i64(-1) && xs[1] > rat_i64(-1) && xs[1] < rat_i64(1));
        assert_eq!(xs[1], rat(0, 1));
    }

    fn curve_vecs(g: &MultiPoly, hs: &[MultiPoly]) -> BTreeSet<Vec<i8>> {
        curve_points(g, hs)
            .unwrap()
            .into_iter()
            .map(|(_, s)| s)
            .collect()
    }

    #[test]
    fn curve_points_match_full_decomposition() {
        let parabola = MultiPoly::bivar(&[(1, 0, 1), (-1, 2, 0)]);
        let line = MultiPoly::bivar(&[(1, 0, 1), (-1, 1, 0)]);
        for hs in [vec![parabola.clone()], vec![parabola, line]] {
            let lean = curve_vecs(&circle(), &hs);
            let full: BTreeSet<Vec<i8>> = restrict_to_curve(&hs, &circle())
                .unwrap()
                .into_iter()
                .map(|s| s.signs.0)
                .collect();
            assert_eq!(lean, full);
        }
    }

    #[test]
    fn curve_points_irrational_crossings() {
        // The line y = x cuts the circle at x = ±1/sqrt(2).
        let line = MultiPoly::bivar(&[(1, 0, 1), (-1, 1, 0)]);
        let vecs = curve_vecs(&circle(), &[line]);
        assert_eq!(
            vecs,
            BTreeSet::from([vec![-1], vec![0], vec![1]]),
        );
    }

    #[test]
    fn curve_points_vertical_component() {
        // x^2 - 2 = 0 is a pair of irrational vertical lines.
        let g = MultiPoly::bivar(&[(1, 2, 0), (-2, 0, 0)]);
        let y = MultiPoly::bivar(&[(1, 0, 1)]);
        let vecs = curve_vecs(&g, &[y]);
        assert_eq!(
            vecs,
            BTreeSet::from([vec![-1], vec![0], vec![1]]),
        );
        // A rational vertical line through the circle: stack reuse.
        let gx = MultiPoly::bivar(&[(1, 1, 0)]);
        let vecs = curve_vecs(&gx, &[circle()]);
        assert_eq!(
            vecs,
            BTreeSet::from([vec![-1], vec![0], vec![1]]),
        );
    }
}
