//! Vertical ray shooting at d = 2.
//!
//! The structure is a partition tree whose internal nodes carry a cylindrical
//! decomposition of the node tuple's product curve. Every cell stores two
//! auxiliary answers for the sets of the node family: the ids meeting the
//! closed cell (DS1) and, per band, the exact x-ranges over which the closed
//! cell's column is inhabited (DS2, "shadow" intervals with algebraic
//! endpoints). A query walks its stack upward, ruling out whole bands via
//! shadows and resolving candidate cells exactly on the query line.
//!
//! Full-dimensional inputs must be syntactically closed; they are answered at
//! distance zero through a point-location tree over the regions, and their
//! strict hits are delegated to the closed boundary companion (same
//! polynomials, formula strengthened so some atom vanishes).

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::locate::{LocateConfig, LocationTree, MAX_DEPTH};
use crate::num::{format_rational, rat, rat_i64, Rational};
use crate::partition::{build_partition, PartitionTuple};
use crate::point::{SamplePoint, YCoord};
use crate::poly::{rational_sign, MultiPoly};
use crate::roots::{isolate_real_roots, RootInterval};
use crate::sampler::{critical_polys_for, ext_stack, merge_xvals, slab_points, stack_at, XVal};
use crate::semialg::{BoolFormula, Rel, SemiAlgSet};
use crate::semigroup::MinId;
use crate::sign::SignVector;

pub const RAYSHOOT_FORMAT: &str = "geopart-rayshoot/1";

/// Leaves keep an inspection decomposition of their atom curves only while
/// the combined degree stays this small; queries never need it.
const LEAF_CAD_DEG_CAP: u32 = 6;

/// First intersection of the upward vertical ray from a query point. The
/// y-coordinate is rational or an isolated algebraic root on the query line.
#[derive(Clone, Debug)]
pub struct Hit {
    pub set: u64,
    pub x: Rational,
    pub y: YCoord,
}

impl Hit {
    pub fn to_json(&self) -> Value {
        json!({
            "set": self.set,
            "x": format_rational(&self.x),
            "y": serde_json::to_value(&self.y).expect("ycoord serializes"),
        })
    }
}

/// Same set and same exact point.
pub fn hits_agree(a: Option<&Hit>, b: Option<&Hit>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(p), Some(q)) => {
            p.set == q.set && p.x == q.x && p.y.cmp_y(&q.y) == Ordering::Equal
        }
        _ => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    Band,
    Section,
}

/// One maximal x-range of a shadow; `None` endpoints are unbounded. Endpoints
/// on the node's own critical abscissas never steer a query (those queries
/// land in the zero-width slab instead), so their closed flags follow the
/// coarser rule "the set meets the critical line at all".
#[derive(Clone, Debug)]
pub struct ShadowInterval {
    pub lo: Option<XVal>,
    pub hi: Option<XVal>,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl ShadowInterval {
    pub fn contains(&self, x: &Rational) -> bool {
        let lo_ok = match &self.lo {
            None => true,
            Some(v) => match v.cmp_rational(x) {
                Ordering::Less => true,
                Ordering::Equal => self.lo_closed,
                Ordering::Greater => false,
            },
        };
        let hi_ok = match &self.hi {
            None => true,
            Some(v) => match v.cmp_rational(x) {
                Ordering::Greater => true,
                Ordering::Equal => self.hi_closed,
                Ordering::Less => false,
            },
        };
        lo_ok && hi_ok
    }
}

pub fn shadow_contains(shadow: &[ShadowInterval], x: &Rational) -> bool {
    shadow.iter().any(|iv| iv.contains(x))
}

/// A band (open y-interval over a slab) or a section (graph of one root of
/// the product). `sample` exists only on freshly built structures; it is not
/// serialized.
#[derive(Clone, Debug)]
pub struct CadCell {
    pub slab: usize,
    pub stack: usize,
    pub kind: CellKind,
    pub sigma: SignVector,
    pub lower: Option<YCoord>,
    pub upper: Option<YCoord>,
    pub sample: Option<SamplePoint>,
    /// DS1: ids of family sets meeting the closed cell.
    pub active: Vec<u64>,
    /// DS2: union over the family of per-set shadows, merged.
    pub shadow: Vec<ShadowInterval>,
}

/// Decomposition adapted to a polynomial list: `2 * crit.len() + 1` stacks,
/// even indices are open slabs, odd ones the critical lines themselves.
#[derive(Clone, Debug)]
pub struct Cad {
    pub polys: Vec<MultiPoly>,
    pub crit: Vec<XVal>,
    pub slabs: Vec<Vec<CadCell>>,
}

impl Cad {
    /// Trivial decomposition: a single unbounded band.
    pub fn plane() -> Cad {
        cad_of(&[MultiPoly::constant(2, rat_i64(1))]).expect("constant decomposes")
    }

    pub fn cells(&self) -> impl Iterator<Item = &CadCell> {
        self.slabs.iter().flatten()
    }
}

/// The decomposition induced by a single curve f = 0.
pub fn first_stage_cad(f: &MultiPoly) -> Result<Cad> {
    if f.nvars() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: f.nvars(),
        });
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    cad_of(std::slice::from_ref(f))
}

fn cad_of(polys: &[MultiPoly]) -> Result<Cad> {
    let crit_polys = critical_polys_for(polys)?;
    let crit = merge_xvals(&crit_polys)?;
    let xs = slab_points(&crit);
    let mut slabs = Vec::with_capacity(2 * crit.len() + 1);
    for (i, x0) in xs.iter().enumerate() {
        slabs.push(rational_stack(polys, 2 * i, x0)?);
        if i < crit.len() {
            slabs.push(crit_stack(polys, 2 * i + 1, &crit[i])?);
        }
    }
    Ok(Cad {
        polys: polys.to_vec(),
        crit,
        slabs,
    })
}

fn rational_stack(polys: &[MultiPoly], slab: usize, x0: &Rational) -> Result<Vec<CadCell>> {
    let entries = stack_at(polys, x0)?;
    let ys: Vec<YCoord> = entries.iter().map(|(y, _)| y.clone()).collect();
    Ok(entries
        .into_iter()
        .enumerate()
        .map(|(i, (y, signs))| {
            let section = i % 2 == 1;
            CadCell {
                slab,
                stack: i,
                kind: if section { CellKind::Section } else { CellKind::Band },
                sigma: SignVector(signs),
                lower: if section {
                    Some(y.clone())
                } else if i > 0 {
                    Some(ys[i - 1].clone())
                } else {
                    None
                },
                upper: if section {
                    Some(y.clone())
                } else if i + 1 < ys.len() {
                    Some(ys[i + 1].clone())
                } else {
                    None
                },
                sample: Some(SamplePoint::Plain(crate::point::AlgebraicPoint {
                    x: x0.clone(),
                    y,
                })),
                active: Vec::new(),
                shadow: Vec::new(),
            }
        })
        .collect())
}

fn crit_stack(polys: &[MultiPoly], slab: usize, x: &XVal) -> Result<Vec<CadCell>> {
    match x {
        XVal::Rat(r) => rational_stack(polys, slab, r),
        XVal::Alg(iv) => {
            // Root descriptors on an irrational line have no univariate
            // defining polynomial; only the sample is kept.
            Ok(ext_stack(polys, iv)
                .into_iter()
                .enumerate()
                .map(|(i, (sp, signs))| {
                    let section = i % 2 == 1;
                    let y = match &sp {
                        SamplePoint::CritBand { y, .. } if section => {
                            Some(YCoord::Rat(y.clone()))
                        }
                        _ => None,
                    };
                    CadCell {
                        slab,
                        stack: i,
                        kind: if section { CellKind::Section } else { CellKind::Band },
                        sigma: SignVector(signs),
                        lower: y.clone(),
                        upper: y,
                        sample: Some(sp),
                        active: Vec::new(),
                        shadow: Vec::new(),
                    }
                })
                .collect())
        }
    }
}

/// Membership pattern of one set along a rational vertical line, folded onto
/// the band/section ordinals of the node product (band 0 lies below the
/// lowest root). Member sections are closed into both neighboring bands.
struct LineProfile {
    bands: Vec<bool>,
    sections: Vec<bool>,
}

impl LineProfile {
    fn at(&self, stack_idx: usize) -> bool {
        if stack_idx % 2 == 1 {
            self.sections.get(stack_idx / 2).copied().unwrap_or(false)
        } else {
            self.bands.get(stack_idx / 2).copied().unwrap_or(false)
        }
    }

    fn any(&self) -> bool {
        self.bands.iter().chain(&self.sections).any(|&b| b)
    }
}

fn line_profile(node_polys: &[MultiPoly], set: &SemiAlgSet, x0: &Rational) -> Result<LineProfile> {
    let k = node_polys.len();
    let mut combined = node_polys.to_vec();
    combined.extend(set.polys.iter().cloned());
    let nz: Vec<bool> = node_polys
        .iter()
        .map(|p| !p.substitute(0, x0).is_zero())
        .collect();
    let entries = stack_at(&combined, x0)?;
    let mut bands = vec![false];
    let mut sections = Vec::new();
    for (i, (_, signs)) in entries.iter().enumerate() {
        let member = set.formula.eval(&signs[k..]);
        let on_product = i % 2 == 1 && (0..k).any(|j| nz[j] && signs[j] == 0);
        if on_product {
            if member {
                *bands.last_mut().expect("band below") = true;
            }
            sections.push(member);
            bands.push(member);
        } else if member {
            *bands.last_mut().expect("current band") = true;
        }
    }
    Ok(LineProfile { bands, sections })
}

/// Per cad stack position, the raw shadow runs of one set. Membership is
/// decided exactly at every rational refinement abscissa; irrational
/// candidates break runs open (they are unreachable by rational queries).
fn set_runs(
    polys: &[MultiPoly],
    crit: &[XVal],
    stack_lens: &[usize],
    set: &SemiAlgSet,
) -> Result<Vec<Vec<Vec<ShadowInterval>>>> {
    let mut combined = polys.to_vec();
    combined.extend(set.polys.iter().cloned());
    let cands = merge_xvals(&critical_polys_for(&combined)?)?;
    let mut cpos = Vec::with_capacity(crit.len());
    {
        let mut j = 0usize;
        for c in crit {
            while j < cands.len() && cands[j].cmp_xval(c) == Ordering::Less {
                j += 1;
            }
            if j >= cands.len() || cands[j].cmp_xval(c) != Ordering::Equal {
                return Err(Error::malformed(
                    "refined abscissas lost a critical value of the node",
                ));
            }
            cpos.push(j);
            j += 1;
        }
    }
    let xs = slab_points(&cands);
    let ivals: Vec<LineProfile> = xs
        .iter()
        .map(|x| line_profile(polys, set, x))
        .collect::<Result<_>>()?;
    let cand_prof: Vec<Option<LineProfile>> = cands
        .iter()
        .map(|c| match c.as_rational() {
            Some(r) => line_profile(polys, set, r).map(Some),
            None => Ok(None),
        })
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(stack_lens.len());
    for s in 0..=crit.len() {
        let j_lo = if s == 0 { 0 } else { cpos[s - 1] + 1 };
        let j_hi = if s == crit.len() { cands.len() } else { cpos[s] };
        let mut slab_runs = Vec::with_capacity(stack_lens[2 * s]);
        for idx in 0..stack_lens[2 * s] {
            let mut runs: Vec<ShadowInterval> = Vec::new();
            let mut cur: Option<ShadowInterval> = None;
            let mut push_item =
                |present: bool, lo: Option<&XVal>, hi: Option<&XVal>, at_cand: bool| {
                    if present {
                        match cur.as_mut() {
                            None => {
                                cur = Some(ShadowInterval {
                                    lo: lo.cloned(),
                                    hi: hi.cloned(),
                                    lo_closed: at_cand,
                                    hi_closed: at_cand,
                                })
                            }
                            Some(r) => {
                                r.hi = hi.cloned();
                                r.hi_closed = at_cand;
                            }
                        }
                    } else if let Some(r) = cur.take() {
                        runs.push(r);
                    }
                };
            for j in j_lo..=j_hi {
                push_item(
                    ivals[j].at(idx),
                    if j == 0 { None } else { Some(&cands[j - 1]) },
                    if j == cands.len() { None } else { Some(&cands[j]) },
                    false,
                );
                if j < j_hi {
                    push_item(
                        cand_prof[j].as_ref().map(|p| p.at(idx)).unwrap_or(false),
                        Some(&cands[j]),
                        Some(&cands[j]),
                        true,
                    );
                }
            }
            drop(push_item);
            runs.extend(cur);
            if s > 0 {
                if let Some(first) = runs.first_mut() {
                    if !first.lo_closed
                        && first
                            .lo
                            .as_ref()
                            .is_some_and(|v| v.cmp_xval(&crit[s - 1]) == Ordering::Equal)
                        && cand_prof[cpos[s - 1]].as_ref().is_some_and(LineProfile::any)
                    {
                        first.lo_closed = true;
                    }
                }
            }
            if s < crit.len() {
                if let Some(last) = runs.last_mut() {
                    if !last.hi_closed
                        && last
                            .hi
                            .as_ref()
                            .is_some_and(|v| v.cmp_xval(&crit[s]) == Ordering::Equal)
                        && cand_prof[cpos[s]].as_ref().is_some_and(LineProfile::any)
                    {
                        last.hi_closed = true;
                    }
                }
            }
            slab_runs.push(runs);
        }
        out.push(slab_runs);
        if s < crit.len() {
            let mut crit_runs = Vec::with_capacity(stack_lens[2 * s + 1]);
            for idx in 0..stack_lens[2 * s + 1] {
                let mut runs = Vec::new();
                if let Some(p) = &cand_prof[cpos[s]] {
                    if p.at(idx) {
                        runs.push(ShadowInterval {
                            lo: Some(crit[s].clone()),
                            hi: Some(crit[s].clone()),
                            lo_closed: true,
                            hi_closed: true,
                        });
                    }
                }
                crit_runs.push(runs);
            }
            out.push(crit_runs);
        }
    }
    Ok(out)
}

fn cmp_lo(a: &Option<XVal>, b: &Option<XVal>) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(x), Some(y)) => x.cmp_xval(y),
    }
}

fn merge_intervals(mut v: Vec<ShadowInterval>) -> Vec<ShadowInterval> {
    if v.len() <= 1 {
        return v;
    }
    v.sort_by(|a, b| cmp_lo(&a.lo, &b.lo));
    let mut out: Vec<ShadowInterval> = Vec::new();
    for iv in v {
        if let Some(last) = out.last_mut() {
            let joined = match (&iv.lo, &last.hi) {
                (None, _) | (_, None) => true,
                (Some(a), Some(b)) => match a.cmp_xval(b) {
                    Ordering::Less => true,
                    Ordering::Equal => iv.lo_closed || last.hi_closed,
                    Ordering::Greater => false,
                },
            };
            if joined {
                match (&iv.hi, &last.hi) {
                    (None, Some(_)) => {
                        last.hi = None;
                        last.hi_closed = false;
                    }
                    (Some(a), Some(b)) => match a.cmp_xval(b) {
                        Ordering::Greater => {
                            last.hi = iv.hi;
                            last.hi_closed = iv.hi_closed;
                        }
                        Ordering::Equal => last.hi_closed = last.hi_closed || iv.hi_closed,
                        Ordering::Less => {}
                    },
                    _ => {}
                }
                continue;
            }
        }
        out.push(iv);
    }
    out
}

/// DS2 as a standalone operation: the merged shadow of one set over one cell.
pub fn shadow_set(
    set: &SemiAlgSet,
    cad: &Cad,
    slab: usize,
    stack: usize,
) -> Result<Vec<ShadowInterval>> {
    if slab >= cad.slabs.len() || stack >= cad.slabs[slab].len() {
        return Err(Error::out_of_range("no such cell"));
    }
    set.validate()?;
    let lens: Vec<usize> = cad.slabs.iter().map(Vec::len).collect();
    let runs = set_runs(&cad.polys, &cad.crit, &lens, set)?;
    Ok(merge_intervals(runs[slab][stack].clone()))
}

/// DS1 companion as an explicit semi-algebraic set: the points whose closed
/// upward ray meets S inside the given cell. Implemented for the shapes the
/// generators emit: the cell is a full-line band over a slab with rational
/// (or absent) bounds, and S has exactly one y-dependent atom, used as an
/// equation of y-degree at most two with constant leading coefficient; the
/// remaining atoms must be y-free side constraints.
pub fn column_set(set: &SemiAlgSet, cad: &Cad, slab: usize, stack: usize) -> Result<SemiAlgSet> {
    if slab >= cad.slabs.len() || stack >= cad.slabs[slab].len() {
        return Err(Error::out_of_range("no such cell"));
    }
    if slab % 2 != 0 || cad.slabs[slab].len() != 1 {
        return Err(Error::malformed(
            "column sets are built over full-line band cells",
        ));
    }
    set.validate()?;
    let lo = if slab == 0 {
        None
    } else {
        Some(cad.crit[slab / 2 - 1].as_rational().cloned().ok_or_else(|| {
            Error::malformed("column sets need rational slab bounds")
        })?)
    };
    let hi = if slab / 2 == cad.crit.len() {
        None
    } else {
        Some(cad.crit[slab / 2].as_rational().cloned().ok_or_else(|| {
            Error::malformed("column sets need rational slab bounds")
        })?)
    };

    let y_dep: Vec<usize> = (0..set.polys.len())
        .filter(|&i| set.polys[i].degree_in(1) > 0)
        .collect();
    let &[gi] = y_dep.as_slice() else {
        return Err(Error::malformed(
            "column sets need exactly one y-dependent atom",
        ));
    };
    let conj: Vec<&BoolFormula> = match &set.formula {
        BoolFormula::And(args) => args.iter().collect(),
        f @ BoolFormula::Atom { .. } => vec![f],
        _ => {
            return Err(Error::malformed(
                "column sets need a conjunction of atoms",
            ))
        }
    };
    let mut g_rel = None;
    let mut constraints = Vec::new();
    for f in conj {
        let BoolFormula::Atom { atom, rel } = f else {
            return Err(Error::malformed("column sets need a conjunction of atoms"));
        };
        if *atom == gi {
            if g_rel.replace(*rel).is_some() {
                return Err(Error::malformed("repeated curve atom"));
            }
        } else {
            constraints.push((*atom, *rel));
        }
    }
    if g_rel != Some(Rel::Eq0) {
        return Err(Error::malformed(
            "the y-dependent atom must appear as an equation",
        ));
    }

    let g = &set.polys[gi];
    let coeff_in_y = |src: &MultiPoly, j: u32| -> MultiPoly {
        let mut acc = MultiPoly::zero(2);
        for (e, c) in src.terms() {
            if e[1] == j {
                let mono = MultiPoly::var(2, 0).pow(e[0]);
                acc = &acc + &mono.scale(c);
            }
        }
        acc
    };

    let mut polys;
    let shape;
    match g.degree_in(1) {
        1 => {
            let a = coeff_in_y(g, 1);
            // below the graph where the leading coefficient is positive,
            // above it where negative; where it vanishes no column exists
            polys = vec![g.clone(), a];
            shape = BoolFormula::Or(vec![
                BoolFormula::And(vec![
                    BoolFormula::atom(1, Rel::Gt0),
                    BoolFormula::atom(0, Rel::Le0),
                ]),
                BoolFormula::And(vec![
                    BoolFormula::atom(1, Rel::Lt0),
                    BoolFormula::atom(0, Rel::Ge0),
                ]),
            ]);
        }
        2 => {
            let lead = coeff_in_y(g, 2);
            if lead.degree_in(0) > 0 {
                return Err(Error::out_of_range(
                    "column sets need a constant y^2 coefficient",
                ));
            }
            let c2 = lead.coeff(&[0, 0]);
            let gg = if rational_sign(&c2) < 0 {
                g.scale(&rat_i64(-1))
            } else {
                g.clone()
            };
            let c2 = if rational_sign(&c2) < 0 { -c2 } else { c2 };
            let b = coeff_in_y(&gg, 1);
            let c = coeff_in_y(&gg, 0);
            let disc = &(&b * &b) - &c.scale(&(rat_i64(4) * c2.clone()));
            let gy = &MultiPoly::var(2, 1).scale(&(rat_i64(2) * c2)) + &b;
            // below the upper branch: real roots exist and y is at most the
            // larger one (inside the parabola, or below its axis)
            polys = vec![gg, disc, gy];
            shape = BoolFormula::And(vec![
                BoolFormula::atom(1, Rel::Ge0),
                BoolFormula::Or(vec![
                    BoolFormula::atom(0, Rel::Le0),
                    BoolFormula::atom(2, Rel::Le0),
                ]),
            ]);
        }
        _ => {
            return Err(Error::out_of_range(
                "column sets are implemented up to y-degree two",
            ))
        }
    }

    let mut args = vec![shape];
    for (ai, rel) in constraints {
        args.push(BoolFormula::atom(polys.len(), rel));
        polys.push(set.polys[ai].clone());
    }
    let x = MultiPoly::var(2, 0);
    if let Some(lo) = lo {
        args.push(BoolFormula::atom(polys.len(), Rel::Gt0));
        polys.push(&x - &MultiPoly::constant(2, lo));
    }
    if let Some(hi) = hi {
        args.push(BoolFormula::atom(polys.len(), Rel::Lt0));
        polys.push(&x - &MultiPoly::constant(2, hi));
    }
    SemiAlgSet::new(
        set.id,
        2,
        set.weight.clone(),
        polys,
        BoolFormula::And(args),
    )
}

/// Closed boundary companion: same atoms, formula strengthened so some atom
/// vanishes. For a closed set the first strict hit of the companion equals
/// the first entry point into the set, and the companion is thin.
pub(crate) fn boundary_restriction(set: &SemiAlgSet) -> Result<SemiAlgSet> {
    let on_edge = BoolFormula::Or(
        (0..set.polys.len())
            .map(|i| BoolFormula::atom(i, Rel::Eq0))
            .collect(),
    );
    SemiAlgSet::new(
        set.id,
        1,
        set.weight.clone(),
        set.polys.clone(),
        BoolFormula::And(vec![set.formula.clone(), on_edge]),
    )
}

/// Split the input into the family the walk shoots against and the closed
/// full-dimensional regions (re-weighted by id for min-id location).
fn split_families(sets: &[SemiAlgSet]) -> Result<(Vec<SemiAlgSet>, Vec<SemiAlgSet>)> {
    let mut shoot = Vec::with_capacity(sets.len());
    let mut regions = Vec::new();
    for s in sets {
        s.validate()?;
        if s.dim_tag == 2 {
            if !s.formula.is_closed() {
                return Err(Error::malformed(format!(
                    "set {}: full-dimensional inputs must be syntactically closed",
                    s.id
                )));
            }
            regions.push(SemiAlgSet::new(
                s.id,
                2,
                s.id.to_string(),
                s.polys.clone(),
                s.formula.clone(),
            )?);
            shoot.push(boundary_restriction(s)?);
        } else {
            shoot.push(s.clone());
        }
    }
    Ok((shoot, regions))
}

#[derive(Clone, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct RayShootStats {
    pub degraded: bool,
    pub depth: usize,
    pub nodes: usize,
    pub leaves: usize,
    pub total_refs: usize,
    /// Largest number of open-slab band cells in a single node cad.
    pub band_cells_max: usize,
}

#[derive(Clone, Debug)]
pub enum RsKind {
    Leaf {
        cad: Option<Cad>,
    },
    Internal {
        tuple: PartitionTuple,
        cad: Cad,
        children: BTreeMap<SignVector, RsNode>,
    },
}

#[derive(Clone, Debug)]
pub struct RsNode {
    pub ids: Vec<u64>,
    pub kind: RsKind,
}

pub struct RayShootStructure {
    config: LocateConfig,
    originals: Vec<SemiAlgSet>,
    sets: Vec<SemiAlgSet>,
    by_id: BTreeMap<u64, usize>,
    regions: Option<LocationTree<MinId>>,
    root: RsNode,
    stats: RayShootStats,
}

pub fn build_rayshoot(sets: Vec<SemiAlgSet>, config: LocateConfig) -> Result<RayShootStructure> {
    if config.n0 < (1usize << config.k) {
        return Err(Error::out_of_range(format!(
            "n0 = {} must be at least 2^k = {}",
            config.n0,
            1u32 << config.k
        )));
    }
    let (shoot, region_sets) = split_families(&sets)?;
    let mut by_id = BTreeMap::new();
    for (i, s) in shoot.iter().enumerate() {
        if by_id.insert(s.id, i).is_some() {
            return Err(Error::malformed(format!("duplicate set id {}", s.id)));
        }
    }
    let regions = if region_sets.is_empty() {
        None
    } else {
        let mut rc = config.clone();
        rc.seed = config.seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
        Some(LocationTree::build(region_sets, MinId, rc)?)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut stats = RayShootStats::default();
    let mut family: Vec<u64> = shoot.iter().map(|s| s.id).collect();
    family.sort_unstable();
    let builder = Builder {
        config: &config,
        sets: &shoot,
        by_id: &by_id,
    };
    let root = builder.node(family, 1, &mut rng, &mut stats)?;
    Ok(RayShootStructure {
        config,
        originals: sets,
        sets: shoot,
        by_id,
        regions,
        root,
        stats,
    })
}

struct Builder<'a> {
    config: &'a LocateConfig,
    sets: &'a [SemiAlgSet],
    by_id: &'a BTreeMap<u64, usize>,
}

impl Builder<'_> {
    fn family_sets(&self, family: &[u64]) -> Vec<SemiAlgSet> {
        family
            .iter()
            .map(|id| self.sets[self.by_id[id]].clone())
            .collect()
    }

    fn leaf(&self, family: Vec<u64>, stats: &mut RayShootStats) -> Result<RsNode> {
        stats.leaves += 1;
        let cad = self.leaf_cad(&self.family_sets(&family))?;
        Ok(RsNode {
            ids: family,
            kind: RsKind::Leaf { cad },
        })
    }

    fn leaf_cad(&self, family_sets: &[SemiAlgSet]) -> Result<Option<Cad>> {
        if family_sets.is_empty() {
            return Ok(None);
        }
        let mut polys: Vec<MultiPoly> = Vec::new();
        let mut total = 0u32;
        for s in family_sets {
            for p in &s.polys {
                if !polys.contains(p) {
                    total += p.total_degree();
                    polys.push(p.clone());
                }
            }
        }
        if total > LEAF_CAD_DEG_CAP {
            return Ok(None);
        }
        let mut cad = cad_of(&polys)?;
        fill_aux(&mut cad, family_sets)?;
        Ok(Some(cad))
    }

    fn node(
        &self,
        family: Vec<u64>,
        depth: usize,
        rng: &mut ChaCha8Rng,
        stats: &mut RayShootStats,
    ) -> Result<RsNode> {
        stats.nodes += 1;
        stats.depth = stats.depth.max(depth);
        stats.total_refs += family.len();
        if family.len() <= self.config.n0 || depth >= MAX_DEPTH {
            if depth >= MAX_DEPTH {
                stats.degraded = true;
            }
            return self.leaf(family, stats);
        }
        let family_sets = self.family_sets(&family);
        let pconfig = self.config.partition_config(rng.gen());
        let outcome = match build_partition(&family_sets, &pconfig) {
            Ok(o) => o,
            Err(Error::RetriesExhausted { .. }) => {
                stats.degraded = true;
                return self.leaf(family, stats);
            }
            Err(e) => return Err(e),
        };
        if !outcome.accepted {
            stats.degraded = true;
        }
        let mut cad = cad_of(outcome.tuple.polys())?;
        fill_aux(&mut cad, &family_sets)?;
        stats.band_cells_max = stats.band_cells_max.max(open_band_cells(&cad));
        let mut children = BTreeMap::new();
        for (sigma, entry) in &outcome.report.conditions {
            if !entry.realizable || !sigma.is_strict() {
                continue;
            }
            let child_ids = entry.meets.clone();
            let node = if child_ids.len() >= family.len() {
                stats.degraded = true;
                stats.nodes += 1;
                stats.depth = stats.depth.max(depth + 1);
                stats.total_refs += child_ids.len();
                self.leaf(child_ids, stats)?
            } else {
                self.node(child_ids, depth + 1, rng, stats)?
            };
            children.insert(sigma.clone(), node);
        }
        Ok(RsNode {
            ids: family,
            kind: RsKind::Internal {
                tuple: outcome.tuple,
                cad,
                children,
            },
        })
    }
}

fn fill_aux(cad: &mut Cad, family_sets: &[SemiAlgSet]) -> Result<()> {
    let lens: Vec<usize> = cad.slabs.iter().map(Vec::len).collect();
    for set in family_sets {
        let runs = set_runs(&cad.polys, &cad.crit, &lens, set)?;
        for (si, slab_runs) in runs.into_iter().enumerate() {
            for (ci, r) in slab_runs.into_iter().enumerate() {
                if !r.is_empty() {
                    let cell = &mut cad.slabs[si][ci];
                    cell.active.push(set.id);
                    cell.shadow.extend(r);
                }
            }
        }
    }
    for stack in &mut cad.slabs {
        for cell in stack {
            cell.active.sort_unstable();
            cell.shadow = merge_intervals(std::mem::take(&mut cell.shadow));
        }
    }
    Ok(())
}

fn open_band_cells(cad: &Cad) -> usize {
    cad.slabs.iter().step_by(2).map(|s| (s.len() + 1) / 2).sum()
}

fn root_y(r: &RootInterval) -> YCoord {
    match r.try_rational(24) {
        Some(v) => YCoord::Rat(v),
        None => YCoord::Root(r.clone()),
    }
}

fn y_before_root(y: &YCoord, r: &RootInterval) -> bool {
    match y {
        YCoord::Rat(v) => r.cmp_rational(v) == Ordering::Greater,
        YCoord::Root(rr) => rr.cmp_root(r) == Ordering::Less,
    }
}

fn line_signs(specs: &[MultiPoly], y: &Rational) -> Result<Vec<i8>> {
    specs
        .iter()
        .map(|s| {
            if s.is_zero() {
                Ok(0)
            } else {
                Ok(rational_sign(&s.eval(&[y.clone()])?))
            }
        })
        .collect()
}

fn signs_at_root(specs: &[MultiPoly], r: &RootInterval) -> Vec<i8> {
    specs
        .iter()
        .map(|s| {
            if s.is_zero() {
                0
            } else if s.degree_in(0) == 0 {
                rational_sign(&s.coeff(&[0]))
            } else {
                r.sign_of_upoly(s)
            }
        })
        .collect()
}

fn sample_above(qy: &Rational, next: Option<&RootInterval>) -> Rational {
    let Some(next) = next else {
        return qy + &rat_i64(1);
    };
    let mut r = next.clone();
    loop {
        if let Some(v) = r.as_rational() {
            return (qy + &v) / rat_i64(2);
        }
        if r.lo() > qy {
            return (qy + r.lo()) / rat_i64(2);
        }
        r.refine();
    }
}

fn sample_between(lo: &RootInterval, hi: Option<&RootInterval>) -> Rational {
    let Some(hi) = hi else {
        return lo.hi() + &rat_i64(1);
    };
    let mut a = lo.clone();
    let mut b = hi.clone();
    loop {
        if a.hi() < b.lo() {
            return (a.hi() + b.lo()) / rat_i64(2);
        }
        a.refine();
        b.refine();
    }
}

/// First in-set root of one set strictly above qy on the line x = qx,
/// restricted to the open root window (lower, upper) when given. Errs when
/// the set accumulates on the ray with no attained first point.
fn set_first_on_line(
    set: &SemiAlgSet,
    qx: &Rational,
    qy: &Rational,
    lower: Option<&RootInterval>,
    upper: Option<&RootInterval>,
) -> Result<Option<RootInterval>> {
    let specs: Vec<MultiPoly> = set.polys.iter().map(|p| p.substitute(0, qx)).collect();
    let mut has_zero_spec = false;
    let mut product: Option<MultiPoly> = None;
    for s in &specs {
        if s.is_zero() {
            has_zero_spec = true;
        } else if s.degree_in(0) >= 1 {
            product = Some(match product.take() {
                None => s.clone(),
                Some(acc) => &acc * s,
            });
        }
    }
    let Some(product) = product else {
        // membership is constant along the whole line
        let signs: Vec<i8> = specs
            .iter()
            .map(|s| if s.is_zero() { 0 } else { rational_sign(&s.coeff(&[0])) })
            .collect();
        if set.formula.eval(&signs) {
            return Err(Error::malformed(format!(
                "set {} contains the line x = {}; no first hit exists",
                set.id,
                format_rational(qx)
            )));
        }
        return Ok(None);
    };
    let roots = isolate_real_roots(&product)?;
    let next_above = roots
        .iter()
        .position(|r| r.cmp_rational(qy) == Ordering::Greater);
    let probe = sample_above(qy, next_above.map(|i| &roots[i]));
    if set.formula.eval(&line_signs(&specs, &probe)?) {
        return Err(Error::malformed(format!(
            "set {} fills the ray right above ({}, {}); no first hit exists",
            set.id,
            format_rational(qx),
            format_rational(qy)
        )));
    }
    if has_zero_spec {
        // membership may persist on open intervals; a member interval whose
        // lower edge is not a member leaves the infimum unattained
        for i in next_above.unwrap_or(roots.len())..roots.len() {
            let s = sample_between(&roots[i], roots.get(i + 1));
            if set.formula.eval(&line_signs(&specs, &s)?)
                && !set.formula.eval(&signs_at_root(&specs, &roots[i]))
            {
                return Err(Error::malformed(format!(
                    "set {} accumulates on the ray at x = {}; no first hit exists",
                    set.id,
                    format_rational(qx)
                )));
            }
        }
    }
    for r in &roots {
        if r.cmp_rational(qy) != Ordering::Greater {
            continue;
        }
        if let Some(lo) = lower {
            if r.cmp_root(lo) != Ordering::Greater {
                continue;
            }
        }
        if let Some(up) = upper {
            if r.cmp_root(up) != Ordering::Less {
                break;
            }
        }
        if set.formula.eval(&signs_at_root(&specs, r)) {
            return Ok(Some(r.clone()));
        }
    }
    Ok(None)
}

impl RayShootStructure {
    pub fn stats(&self) -> &RayShootStats {
        &self.stats
    }

    pub fn config(&self) -> &LocateConfig {
        &self.config
    }

    /// The inputs as given (before the closed-boundary split).
    pub fn sets(&self) -> &[SemiAlgSet] {
        &self.originals
    }

    pub fn root(&self) -> &RsNode {
        &self.root
    }

    pub fn regions(&self) -> Option<&LocationTree<MinId>> {
        self.regions.as_ref()
    }

    /// The decomposition held at the root (inspection only).
    pub fn root_cad(&self) -> Option<&Cad> {
        match &self.root.kind {
            RsKind::Leaf { cad } => cad.as_ref(),
            RsKind::Internal { cad, .. } => Some(cad),
        }
    }

    pub fn shoot(&self, x: &Rational, y: &Rational) -> Result<Option<Hit>> {
        if let Some(regions) = &self.regions {
            if let Some(id) = regions.query_weight(x, y)? {
                return Ok(Some(Hit {
                    set: id,
                    x: x.clone(),
                    y: YCoord::Rat(y.clone()),
                }));
            }
        }
        self.walk(&self.root, x, y)
    }

    fn walk(&self, node: &RsNode, qx: &Rational, qy: &Rational) -> Result<Option<Hit>> {
        let RsKind::Internal {
            tuple,
            cad,
            children,
        } = &node.kind
        else {
            return self.line_resolve(&node.ids, qx, qy, None, None);
        };
        let specs: Vec<MultiPoly> = tuple.polys().iter().map(|p| p.substitute(0, qx)).collect();
        if specs.iter().any(MultiPoly::is_zero) {
            // the query line lies inside the partition curve
            return self.line_resolve(&node.ids, qx, qy, None, None);
        }
        let mut product: Option<MultiPoly> = None;
        for s in &specs {
            if s.degree_in(0) >= 1 {
                product = Some(match product.take() {
                    None => s.clone(),
                    Some(acc) => &acc * s,
                });
            }
        }
        let roots = match &product {
            Some(p) => isolate_real_roots(p)?,
            None => Vec::new(),
        };
        let mut pos = 2 * cad.crit.len();
        for (i, c) in cad.crit.iter().enumerate() {
            match c.cmp_rational(qx) {
                Ordering::Greater => {
                    pos = 2 * i;
                    break;
                }
                Ordering::Equal => {
                    pos = 2 * i + 1;
                    break;
                }
                Ordering::Less => {}
            }
        }
        let stack = &cad.slabs[pos];
        if stack.len() != 2 * roots.len() + 1 {
            return self.line_resolve(&node.ids, qx, qy, None, None);
        }
        let below = roots
            .iter()
            .filter(|r| r.cmp_rational(qy) == Ordering::Less)
            .count();
        let on = roots
            .iter()
            .any(|r| r.cmp_rational(qy) == Ordering::Equal);
        let q_idx = 2 * below + usize::from(on);
        for idx in q_idx..stack.len() {
            let cell = &stack[idx];
            if idx % 2 == 1 {
                if idx == q_idx {
                    continue;
                }
                let r = &roots[idx / 2];
                if let Some(id) = self.section_hit(&cell.active, qx, r)? {
                    return Ok(Some(Hit {
                        set: id,
                        x: qx.clone(),
                        y: root_y(r),
                    }));
                }
            } else {
                let band = idx / 2;
                let upper = roots.get(band);
                let marked = if idx == q_idx {
                    self.band_inhabited(&cell.active, qx, qy, upper)?
                } else {
                    shadow_contains(&cell.shadow, qx)
                };
                if !marked {
                    continue;
                }
                if cell.sigma.is_strict() {
                    if let Some(child) = children.get(&cell.sigma) {
                        if let Some(hit) = self.walk(child, qx, qy)? {
                            // accept only hits inside this band; the child
                            // family may continue above it
                            if upper.is_none_or(|up| y_before_root(&hit.y, up)) {
                                return Ok(Some(hit));
                            }
                        }
                    }
                }
                // exact fallback; a miss here is a closure artifact of the
                // shadow and the ascent continues
                let lower = if band == 0 { None } else { Some(&roots[band - 1]) };
                if let Some(hit) = self.line_resolve(&cell.active, qx, qy, lower, upper)? {
                    return Ok(Some(hit));
                }
            }
        }
        Ok(None)
    }

    fn section_hit(&self, active: &[u64], qx: &Rational, r: &RootInterval) -> Result<Option<u64>> {
        for id in active {
            let set = &self.sets[self.by_id[id]];
            let specs: Vec<MultiPoly> =
                set.polys.iter().map(|p| p.substitute(0, qx)).collect();
            if set.formula.eval(&signs_at_root(&specs, r)) {
                return Ok(Some(*id));
            }
        }
        Ok(None)
    }

    fn band_inhabited(
        &self,
        active: &[u64],
        qx: &Rational,
        qy: &Rational,
        upper: Option<&RootInterval>,
    ) -> Result<bool> {
        for id in active {
            let set = &self.sets[self.by_id[id]];
            if set_first_on_line(set, qx, qy, None, upper)?.is_some() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn line_resolve(
        &self,
        ids: &[u64],
        qx: &Rational,
        qy: &Rational,
        lower: Option<&RootInterval>,
        upper: Option<&RootInterval>,
    ) -> Result<Option<Hit>> {
        let mut best: Option<(RootInterval, u64)> = None;
        for id in ids {
            let set = &self.sets[self.by_id[id]];
            if let Some(r) = set_first_on_line(set, qx, qy, lower, upper)? {
                best = Some(match best.take() {
                    None => (r, *id),
                    Some((br, bid)) => {
                        if r.cmp_root(&br) == Ordering::Less {
                            (r, *id)
                        } else {
                            (br, bid)
                        }
                    }
                });
            }
        }
        Ok(best.map(|(r, id)| Hit {
            set: id,
            x: qx.clone(),
            y: root_y(&r),
        }))
    }

    /// Recheck every stored sign vector against freshly sampled points: eight
    /// abscissas per open slab, the critical lines themselves, and the build
    /// samples on irrational lines. Returns the number of checks.
    pub fn audit(&self) -> Result<usize> {
        let mut checked = 0;
        audit_node(&self.root, &mut checked)?;
        Ok(checked)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "format": RAYSHOOT_FORMAT,
            "config": self.config.to_json(),
            "stats": serde_json::to_value(&self.stats).expect("stats serialize"),
            "sets": serde_json::to_value(&self.originals).expect("sets serialize"),
            "regions": self.regions.as_ref().map(|t| t.to_json()),
            "root": node_to_json(&self.root),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let format = v.get("format").and_then(Value::as_str);
        if format != Some(RAYSHOOT_FORMAT) {
            return Err(Error::malformed(format!(
                "expected format {RAYSHOOT_FORMAT:?}, got {format:?}"
            )));
        }
        let config = LocateConfig::from_json(
            v.get("config")
                .ok_or_else(|| Error::malformed("missing config"))?,
        )?;
        let stats: RayShootStats = serde_json::from_value(
            v.get("stats")
                .cloned()
                .ok_or_else(|| Error::malformed("missing stats"))?,
        )
        .map_err(|e| Error::malformed(format!("bad stats: {e}")))?;
        let originals: Vec<SemiAlgSet> = serde_json::from_value(
            v.get("sets")
                .cloned()
                .ok_or_else(|| Error::malformed("missing sets"))?,
        )
        .map_err(|e| Error::malformed(format!("bad sets: {e}")))?;
        let (shoot, region_sets) = split_families(&originals)?;
        let mut by_id = BTreeMap::new();
        for (i, s) in shoot.iter().enumerate() {
            if by_id.insert(s.id, i).is_some() {
                return Err(Error::malformed(format!("duplicate set id {}", s.id)));
            }
        }
        let regions = match v.get("regions") {
            None | Some(Value::Null) => {
                if !region_sets.is_empty() {
                    return Err(Error::malformed(
                        "full-dimensional sets present but no region tree stored",
                    ));
                }
                None
            }
            Some(t) => Some(LocationTree::from_json(t, MinId)?),
        };
        let root = node_from_json(
            v.get("root")
                .ok_or_else(|| Error::malformed("missing root"))?,
        )?;
        Ok(RayShootStructure {
            config,
            originals,
            sets: shoot,
            by_id,
            regions,
            root,
            stats,
        })
    }
}

fn audit_node(node: &RsNode, checked: &mut usize) -> Result<()> {
    match &node.kind {
        RsKind::Leaf { cad } => {
            if let Some(c) = cad {
                audit_cad(c, checked)?;
            }
        }
        RsKind::Internal { cad, children, .. } => {
            audit_cad(cad, checked)?;
            for child in children.values() {
                audit_node(child, checked)?;
            }
        }
    }
    Ok(())
}

fn audit_cad(cad: &Cad, checked: &mut usize) -> Result<()> {
    let compare = |x: &Rational, stack: &[CadCell], checked: &mut usize| -> Result<()> {
        let entries = stack_at(&cad.polys, x)?;
        if entries.len() != stack.len() {
            return Err(Error::malformed(format!(
                "audit: stack size changed at x = {}",
                format_rational(x)
            )));
        }
        for (cell, (_, signs)) in stack.iter().zip(&entries) {
            if cell.sigma.0 != *signs {
                return Err(Error::malformed(format!(
                    "audit: sign vector drifted at x = {} (slab {}, stack {})",
                    format_rational(x),
                    cell.slab,
                    cell.stack
                )));
            }
            *checked += 1;
        }
        Ok(())
    };
    for s in 0..=cad.crit.len() {
        for x in audit_xs(&cad.crit, s) {
            compare(&x, &cad.slabs[2 * s], checked)?;
        }
        if s < cad.crit.len() {
            match cad.crit[s].as_rational() {
                Some(r) => compare(r, &cad.slabs[2 * s + 1], checked)?,
                None => {
                    for cell in &cad.slabs[2 * s + 1] {
                        if let Some(sp) = &cell.sample {
                            for (p, expected) in cad.polys.iter().zip(cell.sigma.iter()) {
                                if sp.sign_at(p)? != expected {
                                    return Err(Error::malformed(format!(
                                        "audit: stored sample disagrees (slab {}, stack {})",
                                        cell.slab, cell.stack
                                    )));
                                }
                                *checked += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn audit_xs(crit: &[XVal], s: usize) -> Vec<Rational> {
    let n = 8i64;
    if crit.is_empty() {
        return (1..=n / 2)
            .flat_map(|j| [rat_i64(-j), rat_i64(j)])
            .collect();
    }
    if s == 0 {
        let base = crit[0].lower();
        return (1..=n).map(|j| &base - &rat_i64(j)).collect();
    }
    if s == crit.len() {
        let base = crit[s - 1].upper();
        return (1..=n).map(|j| &base + &rat_i64(j)).collect();
    }
    let mut a = crit[s - 1].clone();
    let mut b = crit[s].clone();
    loop {
        let lo = a.upper();
        let hi = b.lower();
        if lo < hi {
            let w = &hi - &lo;
            return (1..=n).map(|j| &lo + &(&w * &rat(j, 9))).collect();
        }
        a.refine();
        b.refine();
    }
}

fn shadow_to_json(iv: &ShadowInterval) -> Value {
    json!({
        "lo": iv.lo.as_ref().map(|v| serde_json::to_value(v).expect("xval serialize")),
        "hi": iv.hi.as_ref().map(|v| serde_json::to_value(v).expect("xval serialize")),
        "lo_closed": iv.lo_closed,
        "hi_closed": iv.hi_closed,
    })
}

fn cell_to_json(cell: &CadCell) -> Value {
    json!({
        "slab": cell.slab,
        "stack": cell.stack,
        "kind": match cell.kind {
            CellKind::Band => "band",
            CellKind::Section => "section",
        },
        "sigma": cell.sigma.to_string(),
        "lower": cell.lower.as_ref().map(|y| serde_json::to_value(y).expect("ycoord serialize")),
        "upper": cell.upper.as_ref().map(|y| serde_json::to_value(y).expect("ycoord serialize")),
        "active": cell.active,
        "shadow": cell.shadow.iter().map(shadow_to_json).collect::<Vec<_>>(),
    })
}

fn cad_to_json(cad: &Cad) -> Value {
    json!({
        "polys": serde_json::to_value(&cad.polys).expect("polys serialize"),
        "crit": serde_json::to_value(&cad.crit).expect("crit serialize"),
        "slabs": cad
            .slabs
            .iter()
            .map(|stack| stack.iter().map(cell_to_json).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

fn node_to_json(node: &RsNode) -> Value {
    match &node.kind {
        RsKind::Leaf { cad } => json!({
            "kind": "leaf",
            "ids": node.ids,
            "cad": cad.as_ref().map(cad_to_json),
        }),
        RsKind::Internal {
            tuple,
            cad,
            children,
        } => json!({
            "kind": "internal",
            "ids": node.ids,
            "tuple": serde_json::to_value(tuple).expect("tuple serialize"),
            "cad": cad_to_json(cad),
            "children": children
                .iter()
                .map(|(sigma, child)| json!({
                    "sigma": sigma.to_string(),
                    "child": node_to_json(child),
                }))
                .collect::<Vec<_>>(),
        }),
    }
}

fn field<'v>(v: &'v Value, key: &str) -> Result<&'v Value> {
    v.get(key)
        .ok_or_else(|| Error::malformed(format!("node missing {key}")))
}

fn shadow_from_json(v: &Value) -> Result<ShadowInterval> {
    let side = |key: &str| -> Result<Option<XVal>> {
        match v.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(x) => serde_json::from_value(x.clone())
                .map(Some)
                .map_err(|e| Error::malformed(format!("bad shadow endpoint: {e}"))),
        }
    };
    Ok(ShadowInterval {
        lo: side("lo")?,
        hi: side("hi")?,
        lo_closed: field(v, "lo_closed")?.as_bool().unwrap_or(false),
        hi_closed: field(v, "hi_closed")?.as_bool().unwrap_or(false),
    })
}

fn cell_from_json(v: &Value) -> Result<CadCell> {
    let kind = match field(v, "kind")?.as_str() {
        Some("band") => CellKind::Band,
        Some("section") => CellKind::Section,
        other => return Err(Error::malformed(format!("bad cell kind {other:?}"))),
    };
    let ycoord = |key: &str| -> Result<Option<YCoord>> {
        match v.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(y) => serde_json::from_value(y.clone())
                .map(Some)
                .map_err(|e| Error::malformed(format!("bad cell bound: {e}"))),
        }
    };
    Ok(CadCell {
        slab: field(v, "slab")?.as_u64().unwrap_or(0) as usize,
        stack: field(v, "stack")?.as_u64().unwrap_or(0) as usize,
        kind,
        sigma: SignVector::parse(
            field(v, "sigma")?
                .as_str()
                .ok_or_else(|| Error::malformed("cell sigma must be a string"))?,
        )?,
        lower: ycoord("lower")?,
        upper: ycoord("upper")?,
        sample: None,
        active: serde_json::from_value(field(v, "active")?.clone())
            .map_err(|e| Error::malformed(format!("bad active list: {e}")))?,
        shadow: field(v, "shadow")?
            .as_array()
            .ok_or_else(|| Error::malformed("cell shadow must be an array"))?
            .iter()
            .map(shadow_from_json)
            .collect::<Result<_>>()?,
    })
}

fn cad_from_json(v: &Value) -> Result<Cad> {
    let polys: Vec<MultiPoly> = serde_json::from_value(field(v, "polys")?.clone())
        .map_err(|e| Error::malformed(format!("bad cad polys: {e}")))?;
    let crit: Vec<XVal> = serde_json::from_value(field(v, "crit")?.clone())
        .map_err(|e| Error::malformed(format!("bad cad criticals: {e}")))?;
    let slabs = field(v, "slabs")?
        .as_array()
        .ok_or_else(|| Error::malformed("cad slabs must be an array"))?
        .iter()
        .map(|stack| {
            stack
                .as_array()
                .ok_or_else(|| Error::malformed("cad stack must be an array"))?
                .iter()
                .map(cell_from_json)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if slabs.len() != 2 * crit.len() + 1 {
        return Err(Error::malformed("cad slab count does not match criticals"));
    }
    Ok(Cad { polys, crit, slabs })
}

fn node_from_json(v: &Value) -> Result<RsNode> {
    let ids: Vec<u64> = serde_json::from_value(field(v, "ids")?.clone())
        .map_err(|e| Error::malformed(format!("bad node ids: {e}")))?;
    match field(v, "kind")?.as_str() {
        Some("leaf") => {
            let cad = match v.get("cad") {
                None | Some(Value::Null) => None,
                Some(c) => Some(cad_from_json(c)?),
            };
            Ok(RsNode {
                ids,
                kind: RsKind::Leaf { cad },
            })
        }
        Some("internal") => {
            let tuple: PartitionTuple = serde_json::from_value(field(v, "tuple")?.clone())
                .map_err(|e| Error::malformed(format!("bad node tuple: {e}")))?;
            let cad = cad_from_json(field(v, "cad")?)?;
            let mut children = BTreeMap::new();
            for entry in field(v, "children")?
                .as_array()
                .ok_or_else(|| Error::malformed("children must be an array"))?
            {
                let sigma = SignVector::parse(
                    field(entry, "sigma")?
                        .as_str()
                        .ok_or_else(|| Error::malformed("child sigma must be a string"))?,
                )?;
                children.insert(sigma, node_from_json(field(entry, "child")?)?);
            }
            Ok(RsNode {
                ids,
                kind: RsKind::Internal {
                    tuple,
                    cad,
                    children,
                },
            })
        }
        other => Err(Error::malformed(format!("bad node kind {other:?}"))),
    }
}

/// Theoretical depth guard, shared with point location: the walk visits at
/// most one node per level, and each level shrinks families by the verified
/// factor.
pub fn rayshoot_depth_bound(n: usize, config: &LocateConfig, sets: &[SemiAlgSet]) -> Option<usize> {
    let shrink = crate::locate::shrink_factor(config.k, &config.c0, sets).ok()?;
    crate::locate::depth_bound(n, config.n0, &shrink)
}
