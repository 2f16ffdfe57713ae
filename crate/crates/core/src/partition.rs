//! Partitioning tuples: subspace bookkeeping, the exact verification oracle,
//! a verification-gated randomized solver, and the sample-then-verify loop.
//!
//! The verifier is the only acceptance authority. Per strict sign condition σ
//! and set S it decides three geometric facts exactly:
//!
//!   A: S ∩ R_σ ≠ ∅        B: R_σ ⊄ S        C: R_σ meets an atom curve of S
//!
//! and reports S as "meets σ" when A ∧ (B ∨ C), as "contains σ" when
//! A ∧ ¬B ∧ ¬C. For closed formulas these facts reduce to (i) membership
//! tests of the tuple's own open-cell samples — all rational — and (ii) an
//! exact enumeration of sign-invariant pieces of each atom curve, which is
//! where all algebraic-number work concentrates. Everything else falls back
//! to a full joint decomposition per set. Both paths are exact; their
//! agreement is property-tested.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::algext::{section_sign, AlgCtx};
use crate::error::{Error, Result};
use crate::num::{dyadic_round, format_rational, Rational};
use crate::point::{SamplePoint, YCoord};
use crate::poly::{
    discriminant, rational_sign, split_content_in, squarefree_in, MultiPoly,
};
use crate::roots::isolate_real_roots;
use crate::sampler::{
    cross_resultant, curve_points, ext_line_points, rational_line_points, sample_sign_conditions,
    slab_points, CellSample, XVal,
};
use crate::semialg::{combined_samples, BoolFormula, SemiAlgSet};
use crate::sign::SignVector;

/// Smallest positive D with binom(D+2, 2) > 2^{j-1}.
pub fn degree_bound(j: u32) -> Result<u32> {
    if !(1..=16).contains(&j) {
        return Err(Error::out_of_range(format!(
            "level must be in 1..=16, got {j}"
        )));
    }
    let need = 1u64 << (j - 1);
    let mut d = 1u64;
    while (d + 2) * (d + 1) / 2 <= need {
        d += 1;
    }
    Ok(d as u32)
}

/// First 2^{j-1} + 1 monomials in graded-lex order (1, x, y, x², xy, y², …).
pub fn subspace_basis(j: u32) -> Result<Vec<MultiPoly>> {
    if !(1..=16).contains(&j) {
        return Err(Error::out_of_range(format!(
            "level must be in 1..=16, got {j}"
        )));
    }
    let count = (1usize << (j - 1)) + 1;
    let mut out = Vec::with_capacity(count);
    let mut deg = 0u32;
    while out.len() < count {
        for xe in (0..=deg).rev() {
            out.push(MultiPoly::bivar(&[(1, xe, deg - xe)]));
            if out.len() == count {
                break;
            }
        }
        deg += 1;
    }
    Ok(out)
}

/// D = ⌈2^{k/2}⌉, the degree parameter of a k-level tuple at d = 2.
pub fn big_d(k: u32) -> Result<u64> {
    if !(1..=12).contains(&k) {
        return Err(Error::out_of_range(format!("k must be in 1..=12, got {k}")));
    }
    let pow = 1u64 << k;
    let mut s = 1u64;
    while s * s < pow {
        s += 1;
    }
    Ok(s)
}

/// All 2^k strict sign vectors, ordered to match their string keys
/// ("+" sorts before "-").
pub fn strict_sigmas(k: u32) -> Vec<SignVector> {
    let n = 1usize << k;
    let mut out = Vec::with_capacity(n);
    for mask in 0..n {
        out.push(SignVector(
            (0..k)
                .map(|j| if (mask >> (k - 1 - j)) & 1 == 1 { -1 } else { 1 })
                .collect(),
        ));
    }
    out
}

#[derive(Serialize, Deserialize)]
struct TupleRepr {
    k: u32,
    polys: Vec<MultiPoly>,
}

/// A k-level partitioning tuple: P_j lives in the span of subspace_basis(j).
#[derive(Clone, Debug)]
pub struct PartitionTuple {
    k: u32,
    polys: Vec<MultiPoly>,
    big_d: u64,
}

impl PartitionTuple {
    pub fn new(k: u32, polys: Vec<MultiPoly>) -> Result<Self> {
        let d = big_d(k)?;
        if polys.len() != k as usize {
            return Err(Error::malformed(format!(
                "expected {k} polynomials, got {}",
                polys.len()
            )));
        }
        for (i, p) in polys.iter().enumerate() {
            let j = i as u32 + 1;
            if p.nvars() != 2 {
                return Err(Error::ArityMismatch {
                    expected: 2,
                    got: p.nvars(),
                });
            }
            if p.is_zero() {
                return Err(Error::ZeroPolynomial);
            }
            let allowed: BTreeSet<Vec<u32>> = subspace_basis(j)?
                .iter()
                .map(|m| m.terms().next().expect("monomial").0.to_vec())
                .collect();
            for (e, _) in p.terms() {
                if !allowed.contains(e) {
                    return Err(Error::malformed(format!(
                        "P_{j} contains the monomial x^{}y^{} outside subspace_basis({j})",
                        e[0], e[1]
                    )));
                }
            }
        }
        Ok(PartitionTuple { k, polys, big_d: d })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    pub fn big_d(&self) -> u64 {
        self.big_d
    }

    /// The generalized partitioning polynomial ∏ P_j.
    pub fn product(&self) -> MultiPoly {
        let mut acc = MultiPoly::one(2);
        for p in &self.polys {
            acc = &acc * p;
        }
        acc
    }
}

impl Serialize for PartitionTuple {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        TupleRepr {
            k: self.k,
            polys: self.polys.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PartitionTuple {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = TupleRepr::deserialize(de)?;
        PartitionTuple::new(repr.k, repr.polys).map_err(serde::de::Error::custom)
    }
}

/// A concrete point certifying that set `id` meets the realization of sigma.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub id: u64,
    pub point: SamplePoint,
    pub sigma: SignVector,
}

/// Verification result for one strict sign condition.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionEntry {
    pub realizable: bool,
    pub reps: Vec<CellSample>,
    pub meets: Vec<u64>,
    pub contains: Vec<u64>,
    pub witnesses: Vec<Witness>,
}

/// Full incidence classification of a set family against a tuple.
#[derive(Clone, Debug)]
pub struct PartitionReport {
    pub k: u32,
    pub set_count: usize,
    pub conditions: BTreeMap<SignVector, ConditionEntry>,
    pub residue: Vec<u64>,
}

impl PartitionReport {
    pub fn max_meets(&self) -> usize {
        self.conditions
            .values()
            .map(|e| e.meets.len())
            .max()
            .unwrap_or(0)
    }

    /// |S| / max meeting count; None encodes "infinite" (nothing meets).
    pub fn achieved_alpha(&self) -> Option<Rational> {
        let m = self.max_meets();
        if m == 0 {
            return None;
        }
        Some(Rational::new(self.set_count.into(), m.into()))
    }

    pub fn alpha_ok(&self, target: &Rational) -> bool {
        match self.achieved_alpha() {
            None => true,
            Some(a) => a >= *target,
        }
    }

    pub fn meets_of(&self, sigma: &SignVector) -> &[u64] {
        self.conditions
            .get(sigma)
            .map(|e| e.meets.as_slice())
            .unwrap_or(&[])
    }

    pub fn alpha_string(&self) -> String {
        match self.achieved_alpha() {
            None => "inf".into(),
            Some(a) => format_rational(&a),
        }
    }
}

impl Serialize for PartitionReport {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("PartitionReport", 5)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("set_count", &self.set_count)?;
        st.serialize_field("achieved_alpha", &self.alpha_string())?;
        st.serialize_field("residue", &self.residue)?;
        let keyed: BTreeMap<String, &ConditionEntry> = self
            .conditions
            .iter()
            .map(|(s, e)| (s.to_string(), e))
            .collect();
        st.serialize_field("conditions", &keyed)?;
        st.end()
    }
}

/// True when every satisfying sign vector of the formula pins some atom to
/// zero, i.e. the set is contained in the union of its atom curves.
fn eq_forced(formula: &BoolFormula, natoms: usize) -> bool {
    if natoms > 8 {
        return false;
    }
    let mut signs = vec![-1i8; natoms];
    loop {
        if formula.eval(&signs) && !signs.contains(&0) {
            return false;
        }
        // odometer over {-1, 0, 1}^natoms
        let mut i = 0;
        loop {
            if i == natoms {
                return true;
            }
            if signs[i] < 1 {
                signs[i] += 1;
                break;
            }
            signs[i] = -1;
            i += 1;
        }
    }
}

// --- exact per-set classification --------------------------------------

/// One merged critical abscissa of an atom curve, tagged with how it must be
/// scanned: `exact` lines get a full stack sample, other lines only need
/// crossing tests against the listed tuple polynomials.
struct TaggedRoot {
    x: XVal,
    exact: bool,
    tags: Vec<usize>,
}

fn insert_tagged(list: &mut Vec<TaggedRoot>, x: XVal, exact: bool, tag: Option<usize>) {
    use std::cmp::Ordering;
    for k in 0..list.len() {
        match x.cmp_xval(&list[k].x) {
            Ordering::Equal => {
                list[k].exact |= exact;
                if let Some(j) = tag {
                    if !list[k].tags.contains(&j) {
                        list[k].tags.push(j);
                    }
                }
                return;
            }
            Ordering::Less => {
                list.insert(
                    k,
                    TaggedRoot {
                        x,
                        exact,
                        tags: tag.into_iter().collect(),
                    },
                );
                return;
            }
            Ordering::Greater => {}
        }
    }
    list.push(TaggedRoot {
        x,
        exact,
        tags: tag.into_iter().collect(),
    });
}

/// Critical abscissa polynomials of one atom curve g: its own structure
/// criticals plus crossings with the other atoms (both scanned exactly,
/// since formula values can be confined to single points there) and
/// crossings with each tuple polynomial (tagged, cheap crossing test only).
fn tagged_criticals(
    g: &MultiPoly,
    others: &[&MultiPoly],
    tpolys: &[MultiPoly],
) -> Result<Vec<TaggedRoot>> {
    let mut exact_cps: Vec<MultiPoly> = Vec::new();
    let (gcont, gprim) = split_content_in(g, 1);
    if !gcont.is_constant() {
        exact_cps.push(gcont.squeeze_var(1)?);
    }
    let gsqf = if gprim.degree_in(1) >= 1 {
        let s = squarefree_in(&gprim, 1);
        let lc = s.leading_coeff_in(1);
        if !lc.is_constant() {
            exact_cps.push(lc.squeeze_var(1)?);
        }
        if s.degree_in(1) >= 2 {
            let disc = discriminant(&s, 1)?;
            if !disc.is_zero() && !disc.is_constant() {
                exact_cps.push(disc.squeeze_var(1)?);
            }
        }
        Some(s)
    } else {
        None
    };
    for &h in others {
        if h.is_constant() {
            continue;
        }
        let (hc, hp) = split_content_in(h, 1);
        if !hc.is_constant() {
            exact_cps.push(hc.squeeze_var(1)?);
        }
        if hp.degree_in(1) >= 1 {
            if let Some(gs) = &gsqf {
                if let Some(r) = cross_resultant(gs, &squarefree_in(&hp, 1))? {
                    exact_cps.push(r);
                }
            }
        }
    }

    let mut list: Vec<TaggedRoot> = Vec::new();
    for cp in &exact_cps {
        for iv in isolate_real_roots(cp)? {
            let x = match iv.try_rational(80) {
                Some(r) => XVal::Rat(r),
                None => XVal::Alg(iv),
            };
            insert_tagged(&mut list, x, true, None);
        }
    }
    for (j, p) in tpolys.iter().enumerate() {
        if p.is_constant() {
            continue;
        }
        let mut cps: Vec<MultiPoly> = Vec::new();
        let (pc, pp) = split_content_in(p, 1);
        if !pc.is_constant() {
            cps.push(pc.squeeze_var(1)?);
        }
        if pp.degree_in(1) >= 1 {
            if let Some(gs) = &gsqf {
                if let Some(r) = cross_resultant(gs, &squarefree_in(&pp, 1))? {
                    cps.push(r);
                }
            }
        }
        for cp in &cps {
            for iv in isolate_real_roots(cp)? {
                let x = match iv.try_rational(80) {
                    Some(r) => XVal::Rat(r),
                    None => XVal::Alg(iv),
                };
                insert_tagged(&mut list, x, false, Some(j));
            }
        }
    }
    // Separate neighbours so slab sampling sees rational gaps.
    for k in 1..list.len() {
        loop {
            if list[k - 1].x.upper() < list[k].x.lower() {
                break;
            }
            list[k - 1].x.refine();
            list[k].x.refine();
        }
    }
    Ok(list)
}

/// Exhaustive scan of one atom curve Z(g) against hlist = atoms ++ tuple.
/// Pushes full sign vectors for every sign-invariant piece relevant to
/// strict conditions, and atom-sign vectors at pure tuple crossings (where
/// some tuple polynomial vanishes on the curve) into `cross`.
fn scan_curve(
    g: &MultiPoly,
    set: &SemiAlgSet,
    tpolys: &[MultiPoly],
    full: &mut Vec<(SamplePoint, Vec<i8>)>,
    cross: &mut Vec<Vec<i8>>,
) -> Result<()> {
    let others: Vec<&MultiPoly> = set.polys.iter().filter(|h| !std::ptr::eq(*h, g)).collect();
    let mut hlist: Vec<MultiPoly> = set.polys.clone();
    hlist.extend_from_slice(tpolys);
    let tagged = tagged_criticals(g, &others, tpolys)?;

    let xvals: Vec<XVal> = tagged.iter().map(|t| t.x.clone()).collect();
    for x0 in slab_points(&xvals) {
        rational_line_points(g, &hlist, &x0, full)?;
    }
    for t in &tagged {
        if t.exact {
            match &t.x {
                XVal::Rat(c) => rational_line_points(g, &hlist, c, full)?,
                XVal::Alg(iv) => ext_line_points(g, &hlist, iv, full),
            }
            continue;
        }
        // Pure tuple-crossing line: strict-condition pieces here are
        // continuations of the adjacent slab arcs, so only the crossing
        // points themselves (where the tagged tuple polynomial vanishes on
        // the curve) carry new information — and only for residue.
        match &t.x {
            XVal::Rat(c) => {
                let gspec = g.substitute(0, c);
                if gspec.is_zero() {
                    rational_line_points(g, &hlist, c, full)?;
                    continue;
                }
                if gspec.degree_in(0) == 0 {
                    continue;
                }
                let sspecs: Vec<MultiPoly> =
                    set.polys.iter().map(|h| h.substitute(0, c)).collect();
                let roots = isolate_real_roots(&gspec)?;
                for &j in &t.tags {
                    let pspec = tpolys[j].substitute(0, c);
                    for iv in &roots {
                        let hits = if pspec.is_zero() {
                            true
                        } else {
                            match iv.as_rational() {
                                Some(y) => {
                                    rational_sign(&pspec.eval(&[y]).expect("univariate")) == 0
                                }
                                None => iv.sign_of_upoly(&pspec) == 0,
                            }
                        };
                        if hits {
                            let sp: Vec<i8> = sspecs
                                .iter()
                                .map(|q| {
                                    if q.is_zero() {
                                        return 0;
                                    }
                                    match iv.as_rational() {
                                        Some(y) => rational_sign(
                                            &q.eval(&[y]).expect("univariate"),
                                        ),
                                        None => iv.sign_of_upoly(q),
                                    }
                                })
                                .collect();
                            cross.push(sp);
                        }
                    }
                }
            }
            XVal::Alg(alpha) => {
                let mut ctx = AlgCtx::new(alpha.clone());
                let gspec = ctx.specialize(g);
                if gspec.is_zero() {
                    ext_line_points(g, &hlist, alpha, full);
                    continue;
                }
                if gspec.deg() == 0 {
                    continue;
                }
                let sspecs: Vec<_> = set.polys.iter().map(|h| ctx.specialize(h)).collect();
                let windows = ctx.isolate(&gspec);
                for &j in &t.tags {
                    let pspec = ctx.specialize(&tpolys[j]);
                    for (wlo, whi) in &windows {
                        let hits = if pspec.is_zero() {
                            true
                        } else if wlo == whi {
                            let v = ctx.eval_y(&pspec, wlo);
                            ctx.sign_of(&v) == 0
                        } else {
                            section_sign(&mut ctx, &gspec, &pspec, wlo, whi) == 0
                        };
                        if hits {
                            let sp: Vec<i8> = sspecs
                                .iter()
                                .map(|q| {
                                    if q.is_zero() {
                                        return 0;
                                    }
                                    if wlo == whi {
                                        let v = ctx.eval_y(q, wlo);
                                        ctx.sign_of(&v)
                                    } else {
                                        section_sign(&mut ctx, &gspec, q, wlo, whi)
                                    }
                                })
                                .collect();
                            cross.push(sp);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

struct SigmaFacts {
    meets: bool,
    contains: bool,
    witness: Option<SamplePoint>,
}

struct SetFacts {
    per_sigma: BTreeMap<SignVector, SigmaFacts>,
    residue: bool,
}

/// Open-cell samples of the tuple decomposition: rational points with strict
/// signs, one per full-dimensional cell.
struct BandSamples {
    by_sigma: BTreeMap<SignVector, Vec<(Rational, Rational)>>,
}

fn facts_closed(set: &SemiAlgSet, tpolys: &[MultiPoly], bands: &BandSamples) -> Result<SetFacts> {
    let nb = set.polys.len();
    let mut full: Vec<(SamplePoint, Vec<i8>)> = Vec::new();
    let mut cross: Vec<Vec<i8>> = Vec::new();
    for g in &set.polys {
        if !g.is_constant() {
            scan_curve(g, set, tpolys, &mut full, &mut cross)?;
        }
    }

    struct CurveFacts {
        any: bool,
        hit: Option<SamplePoint>,
        out: bool,
    }
    let mut curve: BTreeMap<SignVector, CurveFacts> = BTreeMap::new();
    for (pt, signs) in &full {
        let (sp, tp) = signs.split_at(nb);
        if tp.iter().any(|&s| s == 0) {
            continue;
        }
        let entry = curve.entry(SignVector(tp.to_vec())).or_insert(CurveFacts {
            any: false,
            hit: None,
            out: false,
        });
        entry.any = true;
        if set.formula.eval(sp) {
            if entry.hit.is_none() {
                entry.hit = Some(pt.clone());
            }
        } else {
            entry.out = true;
        }
    }

    let mut per_sigma = BTreeMap::new();
    for (sigma, pts) in &bands.by_sigma {
        let mut band_in: Option<SamplePoint> = None;
        let mut band_out = false;
        for (x, y) in pts {
            if set.contains_xy(x, y)? {
                if band_in.is_none() {
                    band_in = Some(SamplePoint::rational(x.clone(), y.clone()));
                }
            } else {
                band_out = true;
            }
            if band_in.is_some() && band_out {
                break;
            }
        }
        let cf = curve.get(sigma);
        let c = cf.map(|f| f.any).unwrap_or(false);
        let curve_in = cf.and_then(|f| f.hit.clone());
        let curve_out = cf.map(|f| f.out).unwrap_or(false);
        let a = band_in.is_some() || curve_in.is_some();
        let b = band_out || curve_out;
        per_sigma.insert(
            sigma.clone(),
            SigmaFacts {
                meets: a && (b || c),
                contains: a && !b && !c,
                witness: band_in.or(curve_in),
            },
        );
    }

    let residue = if eq_forced(&set.formula, nb) {
        full.iter().any(|(_, signs)| {
            let (sp, tp) = signs.split_at(nb);
            tp.contains(&0) && set.formula.eval(sp)
        }) || cross.iter().any(|sp| set.formula.eval(sp))
    } else {
        let mut found = false;
        for p in tpolys {
            if p.is_constant() {
                continue;
            }
            if curve_points(p, &set.polys)?
                .iter()
                .any(|(_, sp)| set.formula.eval(sp))
            {
                found = true;
                break;
            }
        }
        found
    };

    Ok(SetFacts { per_sigma, residue })
}

/// Fallback for non-closed formulas: one full joint decomposition per set.
fn facts_general(set: &SemiAlgSet, tpolys: &[MultiPoly], bands: &BandSamples) -> Result<SetFacts> {
    let nb = set.polys.len();
    let samples = combined_samples(set, tpolys)?;
    struct Acc {
        some_in: Option<SamplePoint>,
        some_out: bool,
        bcross: bool,
    }
    let mut acc: BTreeMap<SignVector, Acc> = BTreeMap::new();
    let mut residue = false;
    for s in &samples {
        let (sp, tp) = s.signs.0.split_at(nb);
        let inside = set.formula.eval(sp);
        if inside && tp.contains(&0) {
            residue = true;
        }
        if tp.iter().any(|&v| v == 0) {
            continue;
        }
        let entry = acc.entry(SignVector(tp.to_vec())).or_insert(Acc {
            some_in: None,
            some_out: false,
            bcross: false,
        });
        if sp.contains(&0) {
            entry.bcross = true;
        }
        if inside {
            if entry.some_in.is_none() {
                entry.some_in = Some(s.point.clone());
            }
        } else {
            entry.some_out = true;
        }
    }
    let mut per_sigma = BTreeMap::new();
    for sigma in bands.by_sigma.keys() {
        let facts = match acc.get(sigma) {
            None => SigmaFacts {
                meets: false,
                contains: false,
                witness: None,
            },
            Some(a) => SigmaFacts {
                meets: a.some_in.is_some() && (a.some_out || a.bcross),
                contains: a.some_in.is_some() && !a.some_out && !a.bcross,
                witness: a.some_in.clone(),
            },
        };
        per_sigma.insert(sigma.clone(), facts);
    }
    Ok(SetFacts { per_sigma, residue })
}

/// Exact incidence classification of every set against every strict sign
/// condition of the tuple, with retained and re-checked witnesses.
pub fn verify_partition(tuple: &PartitionTuple, sets: &[SemiAlgSet]) -> Result<PartitionReport> {
    let tpolys = tuple.polys();
    let k = tuple.k();
    {
        let mut seen = BTreeSet::new();
        for s in sets {
            if !seen.insert(s.id) {
                return Err(Error::malformed(format!("duplicate set id {}", s.id)));
            }
        }
    }

    let samples = sample_sign_conditions(tpolys)?;
    let mut bands = BandSamples {
        by_sigma: BTreeMap::new(),
    };
    let mut reps: BTreeMap<SignVector, Vec<CellSample>> = BTreeMap::new();
    for s in &samples {
        if s.slab % 2 != 0 || s.stack % 2 != 0 {
            continue;
        }
        let SamplePoint::Plain(pt) = &s.point else {
            continue;
        };
        let YCoord::Rat(y) = &pt.y else { continue };
        debug_assert!(s.signs.is_strict());
        bands
            .by_sigma
            .entry(s.signs.clone())
            .or_default()
            .push((pt.x.clone(), y.clone()));
        let r = reps.entry(s.signs.clone()).or_default();
        if r.len() < 4 {
            r.push(s.clone());
        }
    }

    let mut conditions: BTreeMap<SignVector, ConditionEntry> = strict_sigmas(k)
        .into_iter()
        .map(|sigma| {
            let realizable = bands.by_sigma.contains_key(&sigma);
            let entry = ConditionEntry {
                realizable,
                reps: reps.remove(&sigma).unwrap_or_default(),
                meets: Vec::new(),
                contains: Vec::new(),
                witnesses: Vec::new(),
            };
            (sigma, entry)
        })
        .collect();
    let mut residue = Vec::new();

    let mut order: Vec<&SemiAlgSet> = sets.iter().collect();
    order.sort_by_key(|s| s.id);
    for set in order {
        set.validate()?;
        let facts = if set.formula.is_closed() {
            facts_closed(set, tpolys, &bands)?
        } else {
            facts_general(set, tpolys, &bands)?
        };
        for (sigma, f) in facts.per_sigma {
            let entry = conditions.get_mut(&sigma).expect("strict sigma entry");
            if f.meets {
                entry.meets.push(set.id);
                entry.witnesses.push(Witness {
                    id: set.id,
                    point: f.witness.expect("meets implies witness"),
                    sigma: sigma.clone(),
                });
            } else if f.contains {
                entry.contains.push(set.id);
            }
        }
        if facts.residue {
            residue.push(set.id);
        }
    }

    let report = PartitionReport {
        k,
        set_count: sets.len(),
        conditions,
        residue,
    };
    recheck_witnesses(&report, tpolys, sets)?;
    Ok(report)
}

/// Certificate soundness audit: every stored meet witness must lie in its
/// set and realize its sign condition exactly.
fn recheck_witnesses(
    report: &PartitionReport,
    tpolys: &[MultiPoly],
    sets: &[SemiAlgSet],
) -> Result<()> {
    let by_id: BTreeMap<u64, &SemiAlgSet> = sets.iter().map(|s| (s.id, s)).collect();
    for entry in report.conditions.values() {
        for w in &entry.witnesses {
            let set = by_id.get(&w.id).expect("witness id");
            if !set.contains_sample(&w.point)? {
                return Err(Error::malformed(format!(
                    "witness audit failed: point not in set {}",
                    w.id
                )));
            }
            for (i, p) in tpolys.iter().enumerate() {
                if w.point.sign_at(p)? != w.sigma.0[i] {
                    return Err(Error::malformed(format!(
                        "witness audit failed: tuple sign mismatch for set {}",
                        w.id
                    )));
                }
            }
        }
    }
    Ok(())
}

// --- sample-size formulas ------------------------------------------------

/// ⌈(8·vc/eps²)·ln(1/(eps·delta))⌉. The logarithm is evaluated in floating
/// point; this function only sizes samples and never gates correctness.
pub fn epsilon_sample_size(vc: u64, eps: &Rational, delta: &Rational) -> Result<u64> {
    let one = Rational::one();
    if vc < 1 || !eps.is_positive() || *eps >= one || !delta.is_positive() || *delta >= one {
        return Err(Error::out_of_range(
            "epsilon_sample_size needs vc >= 1 and 0 < eps, delta < 1",
        ));
    }
    let scale = Rational::from_integer((8 * vc as i64).into()) / (eps * eps);
    let arg = crate::num::rational_to_f64(&(Rational::one() / (eps * delta)));
    let val = crate::num::rational_to_f64(&scale) * arg.ln();
    Ok(val.ceil() as u64)
}

/// ⌈200·n²·log₂ b⌉ for dual dimension n and complexity bound b.
pub fn vc_dim_bound(n: u64, b: u64) -> Result<u64> {
    if n < 1 || b < 2 {
        return Err(Error::out_of_range("vc_dim_bound needs n >= 1 and b >= 2"));
    }
    let val = 200.0 * (n as f64) * (n as f64) * (b as f64).log2();
    Ok(val.ceil() as u64)
}

/// ⌈4·rho·log₂(C·rho)⌉ converting a shatter-function bound to VC dimension.
pub fn shatter_to_vc(c: &Rational, rho: &Rational) -> Result<u64> {
    let prod = c * rho;
    if prod <= Rational::one() || !rho.is_positive() {
        return Err(Error::out_of_range("shatter_to_vc needs rho > 0 and C*rho > 1"));
    }
    let val = 4.0 * crate::num::rational_to_f64(rho) * crate::num::rational_to_f64(&prod).log2();
    Ok(val.ceil() as u64)
}

/// The (astronomically large) sample size the theory asks for; reported
/// alongside the practical default, never used to size anything.
pub fn theoretical_sample_size(k: u32) -> Result<u64> {
    let n_dual = (1u64 << k) - 1 + k as u64; // dim of the coefficient space of Y_k
    let b = (1u64 << k).max(2);
    let vc = vc_dim_bound(n_dual, b)?;
    epsilon_sample_size(vc, &Rational::new(1.into(), 2.into()), &Rational::new(1.into(), 2.into()))
}

// --- solver ----------------------------------------------------------------

const CLOUD_CAP: usize = 256;
const DESCENT_SWEEPS: usize = 3;
const MAX_BREAK_CANDIDATES: usize = 33;

struct CloudPoint {
    x: Rational,
    y: Rational,
    w: Rational,
}

/// Weighted surrogate points standing in for the sets during the search:
/// the verifier, not the cloud, decides acceptance.
fn surrogate_cloud(sets: &[SemiAlgSet], rng: &mut ChaCha8Rng) -> Result<Vec<CloudPoint>> {
    let mut pts = Vec::new();
    for s in sets {
        let m = match s.dim_tag {
            0 => 1,
            1 => 3,
            _ => 6,
        };
        let got = crate::semialg::sample_points_on(s, m)?;
        if got.is_empty() {
            continue;
        }
        let w = Rational::new(1.into(), (got.len() as i64).into());
        for p in got {
            let y = match p.y {
                YCoord::Rat(r) => r,
                YCoord::Root(iv) => {
                    let mid = (iv.lo() + iv.hi()) / Rational::from_integer(2.into());
                    dyadic_round(&mid, 12)
                }
            };
            pts.push(CloudPoint {
                x: p.x,
                y,
                w: w.clone(),
            });
        }
    }
    while pts.len() > CLOUD_CAP {
        let idx = rng.gen_range(0..pts.len());
        pts.swap_remove(idx);
    }
    Ok(pts)
}

/// Lexicographic objective: worst per-class absolute imbalance, then total.
fn imbalance(
    vals: &[Rational],
    cloud: &[CloudPoint],
    classes: &[usize],
    nclasses: usize,
) -> (Rational, Rational) {
    let mut sums = vec![Rational::zero(); nclasses];
    for (i, v) in vals.iter().enumerate() {
        if rational_sign(v) >= 0 {
            sums[classes[i]] += &cloud[i].w;
        } else {
            sums[classes[i]] -= &cloud[i].w;
        }
    }
    let mut worst = Rational::zero();
    let mut total = Rational::zero();
    for s in sums {
        let a = s.abs();
        if a > worst {
            worst = a.clone();
        }
        total += a;
    }
    (worst, total)
}

/// One coordinate-descent pass over the level-j coefficient space: near-bisect
/// every current class of the cloud simultaneously.
fn descend_level(
    basis: &[MultiPoly],
    cloud: &[CloudPoint],
    classes: &[usize],
    nclasses: usize,
    rng: &mut ChaCha8Rng,
) -> Result<MultiPoly> {
    let nb = basis.len();
    let m: Vec<Vec<Rational>> = cloud
        .iter()
        .map(|p| {
            basis
                .iter()
                .map(|b| b.eval(&[p.x.clone(), p.y.clone()]).expect("basis eval"))
                .collect()
        })
        .collect();
    let mut coef: Vec<Rational> = (0..nb)
        .map(|_| Rational::new(rng.gen_range(-4096i64..=4096).into(), 4096.into()))
        .collect();
    let mut vals: Vec<Rational> = m
        .iter()
        .map(|row| {
            row.iter()
                .zip(&coef)
                .map(|(a, c)| a * c)
                .fold(Rational::zero(), |acc, t| acc + t)
        })
        .collect();
    let mut best = imbalance(&vals, cloud, classes, nclasses);

    for _ in 0..DESCENT_SWEEPS {
        for i in 0..nb {
            // Signs flip at t = -(val - coef_i·m_i)/m_i per point.
            let mut brks: Vec<Rational> = Vec::new();
            for (p, row) in m.iter().enumerate() {
                if row[i].is_zero() {
                    continue;
                }
                let base = &vals[p] - &(&coef[i] * &row[i]);
                brks.push(-base / row[i].clone());
            }
            if brks.is_empty() {
                continue;
            }
            brks.sort();
            brks.dedup();
            let mut cands: Vec<Rational> = Vec::new();
            cands.push(brks[0].clone() - Rational::one());
            if brks.len() <= MAX_BREAK_CANDIDATES {
                for w in brks.windows(2) {
                    cands.push(crate::num::simplest_in_open(&w[0], &w[1]));
                }
            } else {
                let gaps = brks.len() - 1;
                for t in 0..MAX_BREAK_CANDIDATES {
                    let g = t * (gaps - 1) / (MAX_BREAK_CANDIDATES - 1);
                    cands.push(crate::num::simplest_in_open(&brks[g], &brks[g + 1]));
                }
            }
            cands.push(brks[brks.len() - 1].clone() + Rational::one());
            for cand in cands {
                let cand = dyadic_round(&cand, 12);
                let new_vals: Vec<Rational> = m
                    .iter()
                    .enumerate()
                    .map(|(p, row)| &vals[p] + &(&(&cand - &coef[i]) * &row[i]))
                    .collect();
                let score = imbalance(&new_vals, cloud, classes, nclasses);
                if score < best {
                    best = score;
                    coef[i] = cand;
                    vals = new_vals;
                }
            }
        }
    }

    let mut poly = MultiPoly::zero(2);
    for (b, c) in basis.iter().zip(&coef) {
        poly = &poly + &b.scale(c);
    }
    if poly.is_zero() {
        // Degenerate descent result; fall back to a plain basis monomial.
        poly = basis[1].clone();
    }
    Ok(poly)
}

fn descend_tuple(k: u32, cloud: &[CloudPoint], rng: &mut ChaCha8Rng) -> Result<Vec<MultiPoly>> {
    let mut polys = Vec::with_capacity(k as usize);
    let mut classes = vec![0usize; cloud.len()];
    for j in 1..=k {
        let basis = subspace_basis(j)?;
        let p = descend_level(&basis, cloud, &classes, 1 << (j - 1), rng)?;
        for (i, pt) in cloud.iter().enumerate() {
            let v = p.eval(&[pt.x.clone(), pt.y.clone()])?;
            classes[i] = classes[i] * 2 + usize::from(rational_sign(&v) < 0);
        }
        polys.push(p);
    }
    Ok(polys)
}

/// Search for a tuple whose verified alpha on `sample` reaches the target.
/// Acceptance authority is solely the verifier.
pub fn solve_small_instance(
    sample: &[SemiAlgSet],
    k: u32,
    alpha_target: &Rational,
    budget: u32,
    seed: u64,
) -> Result<(PartitionTuple, PartitionReport)> {
    if sample.is_empty() {
        return Err(Error::malformed("sample must be nonempty"));
    }
    if *alpha_target < Rational::one() {
        return Err(Error::out_of_range("alpha_target must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cloud = surrogate_cloud(sample, &mut rng)?;
    for _ in 0..budget {
        let polys = descend_tuple(k, &cloud, &mut rng)?;
        let tuple = PartitionTuple::new(k, polys)?;
        let report = verify_partition(&tuple, sample)?;
        if report.alpha_ok(alpha_target) {
            return Ok((tuple, report));
        }
    }
    Err(Error::Exhausted { budget })
}

// --- build loop -------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct PartitionConfig {
    pub k: u32,
    /// The global constant C0': both the solver target and the acceptance
    /// threshold are D^{2-δ}/c0.
    pub c0: Rational,
    /// Uniform subset size; defaults to min(|sets|, 8·D⁴).
    pub sample_size: Option<usize>,
    pub max_retries: u32,
    pub solver_budget: u32,
    pub seed: u64,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            k: 2,
            c0: Rational::from_integer(4.into()),
            sample_size: None,
            max_retries: 10,
            solver_budget: 12,
            seed: 0,
        }
    }
}

#[derive(Debug)]
pub struct BuildOutcome {
    pub tuple: PartitionTuple,
    pub report: PartitionReport,
    pub accepted: bool,
    pub attempts: u32,
    pub alpha_target: Rational,
    pub theoretical_sample: u64,
}

/// Target ratio D^{2-δ}/C0', clamped to 1. δ is the maximum *boundary*
/// dimension of the inputs, min(dim_tag, 1): strict conditions are met by
/// boundary-crossing sets only, so full-dimensional inputs shrink like
/// one-dimensional ones.
pub fn alpha_target(k: u32, c0: &Rational, sets: &[SemiAlgSet]) -> Result<Rational> {
    if !c0.is_positive() {
        return Err(Error::out_of_range("c0 must be positive"));
    }
    let d = big_d(k)?;
    let delta = sets
        .iter()
        .map(|s| s.dim_tag.min(1))
        .max()
        .unwrap_or(0) as u32;
    let mut t = Rational::one();
    for _ in 0..(2 - delta) {
        t *= Rational::from_integer(d.into());
    }
    t /= c0;
    Ok(t.max(Rational::one()))
}

/// Sample-then-verify loop: draw a uniform subset, solve on it, verify on
/// the full family, accept iff the verified alpha reaches the target.
/// Returns the best outcome even when not accepted.
pub fn build_partition(sets: &[SemiAlgSet], config: &PartitionConfig) -> Result<BuildOutcome> {
    let target = alpha_target(config.k, &config.c0, sets)?;
    let d = big_d(config.k)?;
    let default_size = (8 * d * d * d * d) as usize;
    let size = config
        .sample_size
        .unwrap_or(default_size)
        .min(sets.len())
        .max(1);
    let theoretical = theoretical_sample_size(config.k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let retries = config.max_retries.max(1);

    let mut best: Option<BuildOutcome> = None;
    for attempt in 1..=retries {
        let solver_seed = rng.gen::<u64>();
        let full_population = size >= sets.len();
        let subset: Vec<SemiAlgSet> = if full_population {
            sets.to_vec()
        } else {
            let mut idx = rand::seq::index::sample(&mut rng, sets.len(), size).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| sets[i].clone()).collect()
        };
        let solved = solve_small_instance(&subset, config.k, &target, config.solver_budget, solver_seed);
        let (tuple, sample_report) = match solved {
            Ok(pair) => pair,
            Err(Error::Exhausted { .. }) => continue,
            Err(e) => return Err(e),
        };
        let report = if full_population {
            sample_report
        } else {
            verify_partition(&tuple, sets)?
        };
        let accepted = report.alpha_ok(&target);
        let better = match &best {
            None => true,
            Some(b) => match (report.achieved_alpha(), b.report.achieved_alpha()) {
                (None, _) => true,
                (Some(_), None) => false,
                (Some(a), Some(c)) => a > c,
            },
        };
        if better {
            best = Some(BuildOutcome {
                tuple,
                report,
                accepted,
                attempts: attempt,
                alpha_target: target.clone(),
                theoretical_sample: theoretical,
            });
        }
        if accepted {
            return Ok(best.expect("just stored"));
        }
    }
    best.ok_or(Error::RetriesExhausted {
        attempts: retries,
        best_alpha: "none".into(),
    })
}

/// As build_partition, but an unaccepted best-effort result is an error.
pub fn build_partition_strict(
    sets: &[SemiAlgSet],
    config: &PartitionConfig,
) -> Result<BuildOutcome> {
    let outcome = build_partition(sets, config)?;
    if !outcome.accepted {
        return Err(Error::RetriesExhausted {
            attempts: outcome.attempts,
            best_alpha: outcome.report.alpha_string(),
        });
    }
    Ok(outcome)
}
