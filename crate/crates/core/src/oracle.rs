//! Slow, independent recomputation paths used to gate the data structures.
//!
//! Each oracle reimplements the decision procedure from first principles:
//! sign conditions via cofactor-expanded Sylvester resultants and per-line
//! reading, weights and ranges via direct containment scans, ray shooting via
//! per-atom root isolation on the query line. They share only polynomial
//! arithmetic and the root isolator with the production code.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::num::{rat_i64, Rational};
use crate::point::YCoord;
use crate::poly::{rational_sign, MultiPoly};
use crate::range::DualFamilySpec;
use crate::rayshoot::{boundary_restriction, Hit};
use crate::roots::{isolate_real_roots, RootInterval};
use crate::semialg::SemiAlgSet;
use crate::semigroup::Semigroup;
use crate::sign::SignVector;

/// Resultant with respect to y by cofactor expansion of the Sylvester
/// matrix. Quadratic-exponential and perfectly fine at oracle degrees.
pub fn sylvester_resultant(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let m = a.degree_in(1) as usize;
    let n = b.degree_in(1) as usize;
    if m + n == 0 {
        return MultiPoly::one(2);
    }
    let ca = a.coeffs_desc_in(1);
    let cb = b.coeffs_desc_in(1);
    let size = m + n;
    let mut rows = vec![vec![MultiPoly::zero(2); size]; size];
    for i in 0..n {
        for (j, c) in ca.iter().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in cb.iter().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    determinant(&rows)
}

fn determinant(rows: &[Vec<MultiPoly>]) -> MultiPoly {
    match rows.len() {
        0 => MultiPoly::one(2),
        1 => rows[0][0].clone(),
        n => {
            let mut acc = MultiPoly::zero(2);
            for col in 0..n {
                if rows[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<MultiPoly>> = rows[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != col)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = &rows[0][col] * &determinant(&minor);
                acc = if col % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// Rational point strictly between two isolated roots (or past the last).
fn between(a: &RootInterval, b: Option<&RootInterval>) -> Rational {
    let Some(b) = b else {
        return a.hi() + &rat_i64(1);
    };
    let mut a = a.clone();
    let mut b = b.clone();
    loop {
        if a.hi() < b.lo() {
            return (a.hi() + b.lo()) / rat_i64(2);
        }
        a.refine();
        b.refine();
    }
}

/// Rational point strictly above `at` and strictly below the given root.
fn above(at: &Rational, next: Option<&RootInterval>) -> Rational {
    let Some(next) = next else {
        return at + &rat_i64(1);
    };
    let mut r = next.clone();
    loop {
        if let Some(v) = r.as_rational() {
            return (at + &v) / rat_i64(2);
        }
        if r.lo() > at {
            return (at + r.lo()) / rat_i64(2);
        }
        r.refine();
    }
}

/// One rational sample in every gap of a sorted distinct root list.
fn gaps(roots: &[RootInterval]) -> Vec<Rational> {
    if roots.is_empty() {
        return vec![rat_i64(0)];
    }
    let mut xs = Vec::with_capacity(roots.len() + 1);
    xs.push(roots[0].lo() - &rat_i64(1));
    for i in 0..roots.len() - 1 {
        xs.push(between(&roots[i], Some(&roots[i + 1])));
    }
    xs.push(roots.last().expect("nonempty").hi() + &rat_i64(1));
    xs
}

pub struct GridSigns {
    /// Every realizable strict sign vector; complete by delineability over
    /// the projection events.
    pub strict: BTreeSet<SignVector>,
    /// Vectors read at the sampled lines including on-curve points; a
    /// superset of `strict` but not exhaustive over irrational events.
    pub with_zeros: BTreeSet<SignVector>,
}

/// Sign vectors the slow way: project x-events through freshly expanded
/// resultants, then read each candidate vertical line by per-polynomial root
/// isolation and exact evaluation in the gaps and on the curves.
pub fn grid_curve_signs(polys: &[MultiPoly]) -> Result<GridSigns> {
    if polys.is_empty() {
        return Err(Error::malformed("need at least one polynomial"));
    }
    for p in polys {
        if p.nvars() != 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                got: p.nvars(),
            });
        }
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
    }
    let mut events: Vec<MultiPoly> = Vec::new();
    {
        let mut push = |p: MultiPoly| {
            if !p.is_zero() && p.total_degree() > 0 {
                events.push(p);
            }
        };
        for p in polys {
            if p.degree_in(1) == 0 {
                push(p.clone());
            } else {
                push(p.coeffs_desc_in(1)[0].clone());
                if p.degree_in(1) >= 2 {
                    push(sylvester_resultant(p, &p.derivative(1)));
                }
            }
        }
        for i in 0..polys.len() {
            for j in i + 1..polys.len() {
                if polys[i].degree_in(1) >= 1 && polys[j].degree_in(1) >= 1 {
                    push(sylvester_resultant(&polys[i], &polys[j]));
                }
            }
        }
    }
    let zero = rat_i64(0);
    let mut product: Option<MultiPoly> = None;
    for e in &events {
        let u = e.substitute(1, &zero);
        product = Some(match product.take() {
            None => u,
            Some(acc) => &acc * &u,
        });
    }
    let xroots = match &product {
        Some(p) => isolate_real_roots(p)?,
        None => Vec::new(),
    };
    let mut strict = BTreeSet::new();
    let mut with_zeros = BTreeSet::new();
    for x in gaps(&xroots) {
        line_vectors(polys, &x, &mut strict, &mut with_zeros)?;
    }
    for r in &xroots {
        if let Some(c) = r.try_rational(24) {
            line_vectors(polys, &c, &mut strict, &mut with_zeros)?;
        }
    }
    Ok(GridSigns { strict, with_zeros })
}

fn line_vectors(
    polys: &[MultiPoly],
    x: &Rational,
    strict: &mut BTreeSet<SignVector>,
    with_zeros: &mut BTreeSet<SignVector>,
) -> Result<()> {
    let specs: Vec<MultiPoly> = polys.iter().map(|p| p.substitute(0, x)).collect();
    let consts = const_signs(&specs);
    let mut yroots: Vec<RootInterval> = Vec::new();
    for (i, s) in specs.iter().enumerate() {
        if consts[i].is_none() {
            yroots.extend(isolate_real_roots(s)?);
        }
    }
    yroots.sort_by(|a, b| a.cmp_root(b));
    yroots.dedup_by(|a, b| a.cmp_root(b) == Ordering::Equal);
    for y in gaps(&yroots) {
        let mut v = Vec::with_capacity(specs.len());
        for (i, s) in specs.iter().enumerate() {
            v.push(match consts[i] {
                Some(c) => c,
                None => rational_sign(&s.eval(&[y.clone()])?),
            });
        }
        let sv = SignVector(v);
        if sv.is_strict() {
            strict.insert(sv.clone());
        }
        with_zeros.insert(sv);
    }
    for r in &yroots {
        with_zeros.insert(SignVector(root_signs(&specs, &consts, r)));
    }
    Ok(())
}

fn const_signs(specs: &[MultiPoly]) -> Vec<Option<i8>> {
    specs
        .iter()
        .map(|s| {
            if s.is_zero() {
                Some(0)
            } else if s.degree_in(0) == 0 {
                Some(rational_sign(&s.coeff(&[0])))
            } else {
                None
            }
        })
        .collect()
}

fn root_signs(specs: &[MultiPoly], consts: &[Option<i8>], r: &RootInterval) -> Vec<i8> {
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| match consts[i] {
            Some(c) => c,
            None => r.sign_of_upoly(s),
        })
        .collect()
}

/// Combined weight of the sets containing (x, y), by direct scan.
pub fn brute_force_weight<G: Semigroup>(
    sets: &[SemiAlgSet],
    semigroup: &G,
    x: &Rational,
    y: &Rational,
) -> Result<G::W> {
    let mut acc = semigroup.neutral();
    for s in sets {
        if s.contains_xy(x, y)? {
            let w = semigroup.parse(&s.weight)?;
            acc = semigroup.combine(&acc, &w);
        }
    }
    Ok(acc)
}

/// Combined weight of the data points lying in the range of (a, b), by
/// four-variable evaluation of the family's own atoms.
pub fn brute_force_range<G: Semigroup>(
    points: &[SemiAlgSet],
    family: &DualFamilySpec,
    semigroup: &G,
    a: &Rational,
    b: &Rational,
) -> Result<G::W> {
    let mut acc = semigroup.neutral();
    for s in points {
        let (px, py) = s.as_point().ok_or_else(|| {
            Error::malformed(format!("set {} is not a single rational point", s.id))
        })?;
        if family.contains_pair((a, b), (&px, &py))? {
            let w = semigroup.parse(&s.weight)?;
            acc = semigroup.combine(&acc, &w);
        }
    }
    Ok(acc)
}

/// First hit of the upward vertical ray from (x, y), recomputed from
/// scratch: full-dimensional sets by direct containment at distance zero,
/// everything else by per-atom root isolation on the query line (the
/// production walk isolates products of node polynomials instead). Lowest id
/// wins ties.
pub fn brute_force_first_hit(
    sets: &[SemiAlgSet],
    x: &Rational,
    y: &Rational,
) -> Result<Option<Hit>> {
    let mut region: Option<u64> = None;
    for s in sets {
        if s.dim_tag == 2 {
            if !s.formula.is_closed() {
                return Err(Error::malformed(format!(
                    "set {}: full-dimensional inputs must be syntactically closed",
                    s.id
                )));
            }
            if s.contains_xy(x, y)? && region.is_none_or(|id| s.id < id) {
                region = Some(s.id);
            }
        }
    }
    if let Some(id) = region {
        return Ok(Some(Hit {
            set: id,
            x: x.clone(),
            y: YCoord::Rat(y.clone()),
        }));
    }
    let mut best: Option<(RootInterval, u64)> = None;
    for s in sets {
        let thin;
        let set = if s.dim_tag == 2 {
            thin = boundary_restriction(s)?;
            &thin
        } else {
            s
        };
        if let Some(r) = first_on_line(set, x, y)? {
            best = Some(match best.take() {
                None => (r, set.id),
                Some((br, bid)) => match r.cmp_root(&br) {
                    Ordering::Less => (r, set.id),
                    Ordering::Equal if set.id < bid => (r, set.id),
                    _ => (br, bid),
                },
            });
        }
    }
    Ok(best.map(|(r, id)| Hit {
        set: id,
        x: x.clone(),
        y: match r.try_rational(24) {
            Some(v) => YCoord::Rat(v),
            None => YCoord::Root(r),
        },
    }))
}

fn first_on_line(
    set: &SemiAlgSet,
    qx: &Rational,
    qy: &Rational,
) -> Result<Option<RootInterval>> {
    let specs: Vec<MultiPoly> = set.polys.iter().map(|p| p.substitute(0, qx)).collect();
    let consts = const_signs(&specs);
    if consts.iter().all(Option::is_some) {
        let v: Vec<i8> = consts.iter().map(|c| c.expect("constant")).collect();
        if set.formula.eval(&v) {
            return Err(Error::malformed(format!(
                "set {} contains the line x = {}; no first hit exists",
                set.id,
                crate::num::format_rational(qx)
            )));
        }
        return Ok(None);
    }
    let mut roots: Vec<RootInterval> = Vec::new();
    for (i, s) in specs.iter().enumerate() {
        if consts[i].is_none() {
            roots.extend(isolate_real_roots(s)?);
        }
    }
    roots.sort_by(|a, b| a.cmp_root(b));
    roots.dedup_by(|a, b| a.cmp_root(b) == Ordering::Equal);
    let member_at = |yy: &Rational| -> Result<bool> {
        let mut v = Vec::with_capacity(specs.len());
        for (i, s) in specs.iter().enumerate() {
            v.push(match consts[i] {
                Some(c) => c,
                None => rational_sign(&s.eval(&[yy.clone()])?),
            });
        }
        Ok(set.formula.eval(&v))
    };
    let next = roots
        .iter()
        .position(|r| r.cmp_rational(qy) == Ordering::Greater);
    let probe = above(qy, next.map(|i| &roots[i]));
    if member_at(&probe)? {
        return Err(Error::malformed(format!(
            "set {} fills the ray right above ({}, {}); no first hit exists",
            set.id,
            crate::num::format_rational(qx),
            crate::num::format_rational(qy)
        )));
    }
    if consts.iter().any(|c| *c == Some(0)) {
        for i in next.unwrap_or(roots.len())..roots.len() {
            let mid = between(&roots[i], roots.get(i + 1));
            if member_at(&mid)? && !set.formula.eval(&root_signs(&specs, &consts, &roots[i])) {
                return Err(Error::malformed(format!(
                    "set {} accumulates on the ray at x = {}; no first hit exists",
                    set.id,
                    crate::num::format_rational(qx)
                )));
            }
        }
    }
    for r in roots.iter().skip(next.unwrap_or(roots.len())) {
        if set.formula.eval(&root_signs(&specs, &consts, r)) {
            return Ok(Some(r.clone()));
        }
    }
    Ok(None)
}
