//! Semi-algebraic sets in the plane: boolean formulas over polynomial sign
//! atoms, exact membership, and classification against the realizations of
//! strict sign conditions of a polynomial tuple.

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::num::{simplest_in_open, Rational};
use crate::point::{AlgebraicPoint, SamplePoint, YCoord};
use crate::poly::{rational_sign, MultiPoly};
use crate::roots::isolate_real_roots;
use crate::sampler::{sample_sign_conditions, CellSample};
use crate::sign::SignVector;

/// Sign relation of one atom: `p rel 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rel {
    #[serde(rename = "lt0")]
    Lt0,
    #[serde(rename = "eq0")]
    Eq0,
    #[serde(rename = "gt0")]
    Gt0,
    #[serde(rename = "le0")]
    Le0,
    #[serde(rename = "ge0")]
    Ge0,
}

impl Rel {
    pub fn holds(self, sign: i8) -> bool {
        match self {
            Rel::Lt0 => sign < 0,
            Rel::Eq0 => sign == 0,
            Rel::Gt0 => sign > 0,
            Rel::Le0 => sign <= 0,
            Rel::Ge0 => sign >= 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoolFormula {
    Atom { atom: usize, rel: Rel },
    And(Vec<BoolFormula>),
    Or(Vec<BoolFormula>),
    Not(Box<BoolFormula>),
}

impl BoolFormula {
    pub fn atom(atom: usize, rel: Rel) -> Self {
        BoolFormula::Atom { atom, rel }
    }

    pub fn eval(&self, signs: &[i8]) -> bool {
        match self {
            BoolFormula::Atom { atom, rel } => rel.holds(signs[*atom]),
            BoolFormula::And(args) => args.iter().all(|f| f.eval(signs)),
            BoolFormula::Or(args) => args.iter().any(|f| f.eval(signs)),
            BoolFormula::Not(f) => !f.eval(signs),
        }
    }

    pub fn max_atom(&self) -> Option<usize> {
        match self {
            BoolFormula::Atom { atom, .. } => Some(*atom),
            BoolFormula::And(args) | BoolFormula::Or(args) => {
                args.iter().filter_map(|f| f.max_atom()).max()
            }
            BoolFormula::Not(f) => f.max_atom(),
        }
    }

    /// Syntactically closed: only non-strict atoms under and/or. Such a
    /// formula always defines a topologically closed set.
    pub fn is_closed(&self) -> bool {
        match self {
            BoolFormula::Atom { rel, .. } => matches!(rel, Rel::Eq0 | Rel::Le0 | Rel::Ge0),
            BoolFormula::And(args) | BoolFormula::Or(args) => {
                args.iter().all(|f| f.is_closed())
            }
            BoolFormula::Not(_) => false,
        }
    }

    pub fn validate(&self, natoms: usize) -> Result<()> {
        match self {
            BoolFormula::Atom { atom, .. } => {
                if *atom >= natoms {
                    return Err(Error::malformed(format!(
                        "formula references atom {atom} but only {natoms} polynomials are defined"
                    )));
                }
            }
            BoolFormula::And(args) | BoolFormula::Or(args) => {
                if args.is_empty() {
                    return Err(Error::malformed("and/or node with no arguments"));
                }
                for f in args {
                    f.validate(natoms)?;
                }
            }
            BoolFormula::Not(f) => f.validate(natoms)?,
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FormulaRepr {
    Atom { atom: usize, rel: Rel },
    Node { op: String, args: Vec<FormulaRepr> },
}

impl From<&BoolFormula> for FormulaRepr {
    fn from(f: &BoolFormula) -> Self {
        match f {
            BoolFormula::Atom { atom, rel } => FormulaRepr::Atom {
                atom: *atom,
                rel: *rel,
            },
            BoolFormula::And(args) => FormulaRepr::Node {
                op: "and".into(),
                args: args.iter().map(FormulaRepr::from).collect(),
            },
            BoolFormula::Or(args) => FormulaRepr::Node {
                op: "or".into(),
                args: args.iter().map(FormulaRepr::from).collect(),
            },
            BoolFormula::Not(f) => FormulaRepr::Node {
                op: "not".into(),
                args: vec![FormulaRepr::from(f.as_ref())],
            },
        }
    }
}

impl TryFrom<FormulaRepr> for BoolFormula {
    type Error = Error;
    fn try_from(r: FormulaRepr) -> Result<Self> {
        Ok(match r {
            FormulaRepr::Atom { atom, rel } => BoolFormula::Atom { atom, rel },
            FormulaRepr::Node { op, args } => {
                let args: Vec<BoolFormula> = args
                    .into_iter()
                    .map(BoolFormula::try_from)
                    .collect::<Result<_>>()?;
                match op.as_str() {
                    "and" => BoolFormula::And(args),
                    "or" => BoolFormula::Or(args),
                    "not" => {
                        if args.len() != 1 {
                            return Err(Error::malformed("not takes exactly one argument"));
                        }
                        BoolFormula::Not(Box::new(args.into_iter().next().unwrap()))
                    }
                    other => return Err(Error::UnknownKind(other.to_string())),
                }
            }
        })
    }
}

impl Serialize for BoolFormula {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        FormulaRepr::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BoolFormula {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        BoolFormula::try_from(FormulaRepr::deserialize(de)?).map_err(D::Error::custom)
    }
}

/// A planar semi-algebraic set: atoms (defining polynomials), a boolean
/// formula over their signs, a trusted dimension tag, and an opaque weight.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemiAlgSet {
    pub id: u64,
    #[serde(rename = "dim")]
    pub dim_tag: u8,
    pub weight: String,
    pub polys: Vec<MultiPoly>,
    pub formula: BoolFormula,
}

/// Outcome of comparing a set with the realization of one strict condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetClass {
    Disjoint,
    MeetsBoundary,
    ContainsRealization,
}

impl SemiAlgSet {
    pub fn new(
        id: u64,
        dim_tag: u8,
        weight: impl Into<String>,
        polys: Vec<MultiPoly>,
        formula: BoolFormula,
    ) -> Result<Self> {
        let set = SemiAlgSet {
            id,
            dim_tag,
            weight: weight.into(),
            polys,
            formula,
        };
        set.validate()?;
        Ok(set)
    }

    /// A degenerate set holding the single rational point (x, y).
    pub fn point(id: u64, weight: impl Into<String>, x: Rational, y: Rational) -> Self {
        let px = &MultiPoly::var(2, 0) - &MultiPoly::constant(2, x);
        let py = &MultiPoly::var(2, 1) - &MultiPoly::constant(2, y);
        SemiAlgSet {
            id,
            dim_tag: 0,
            weight: weight.into(),
            polys: vec![px, py],
            formula: BoolFormula::And(vec![
                BoolFormula::atom(0, Rel::Eq0),
                BoolFormula::atom(1, Rel::Eq0),
            ]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.polys.is_empty() {
            return Err(Error::malformed("set must declare at least one polynomial"));
        }
        if self.dim_tag > 2 {
            return Err(Error::malformed(format!(
                "dim tag {} out of range 0..=2",
                self.dim_tag
            )));
        }
        for p in &self.polys {
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
        self.formula.validate(self.polys.len())
    }

    pub fn signs_at(&self, q: &AlgebraicPoint) -> Result<Vec<i8>> {
        self.polys.iter().map(|p| q.sign_at(p)).collect()
    }

    pub fn contains(&self, q: &AlgebraicPoint) -> Result<bool> {
        Ok(self.formula.eval(&self.signs_at(q)?))
    }

    pub fn contains_xy(&self, x: &Rational, y: &Rational) -> Result<bool> {
        let signs: Vec<i8> = self
            .polys
            .iter()
            .map(|p| p.eval(&[x.clone(), y.clone()]).map(|v| rational_sign(&v)))
            .collect::<Result<_>>()?;
        Ok(self.formula.eval(&signs))
    }

    pub fn contains_sample(&self, sp: &SamplePoint) -> Result<bool> {
        let signs: Vec<i8> = self
            .polys
            .iter()
            .map(|p| sp.sign_at(p))
            .collect::<Result<_>>()?;
        Ok(self.formula.eval(&signs))
    }

    /// Recognize the canonical single-point encoding (two independent linear
    /// equality atoms under a top-level conjunction).
    pub fn as_point(&self) -> Option<(Rational, Rational)> {
        if self.dim_tag != 0 {
            return None;
        }
        let atoms = match &self.formula {
            BoolFormula::And(args) => args,
            _ => return None,
        };
        let mut eqs: Vec<&MultiPoly> = Vec::new();
        for a in atoms {
            match a {
                BoolFormula::Atom { atom, rel: Rel::Eq0 } => eqs.push(&self.polys[*atom]),
                _ => return None,
            }
        }
        if eqs.len() != 2 {
            return None;
        }
        // Solve the 2x2 linear system c0 + cx*x + cy*y = 0.
        let lin = |p: &MultiPoly| -> Option<(Rational, Rational, Rational)> {
            if p.total_degree() != 1 {
                return None;
            }
            Some((p.coeff(&[1, 0]), p.coeff(&[0, 1]), p.coeff(&[0, 0])))
        };
        let (a1, b1, c1) = lin(eqs[0])?;
        let (a2, b2, c2) = lin(eqs[1])?;
        let det = &a1 * &b2 - &a2 * &b1;
        if det == Rational::zero() {
            return None;
        }
        let x = (&b1 * &c2 - &b2 * &c1) / det.clone();
        let y = (&a2 * &c1 - &a1 * &c2) / det;
        Some((x, y))
    }

    /// Exact emptiness test through the sampler's completeness guarantee.
    pub fn is_empty(&self) -> Result<bool> {
        for s in sample_sign_conditions(&self.polys)? {
            if self.contains_sample(&s.point)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn strict_matches(tuple_signs: &[i8], sigma: &SignVector) -> bool {
    tuple_signs == sigma.0.as_slice()
}

/// Samples of the combined decomposition of a set's atoms and a tuple's
/// polynomials; the shared engine behind the classification predicates.
pub fn combined_samples(set: &SemiAlgSet, tuple_polys: &[MultiPoly]) -> Result<Vec<CellSample>> {
    let mut combined = set.polys.clone();
    combined.extend_from_slice(tuple_polys);
    sample_sign_conditions(&combined)
}

/// Does S intersect the realization of the strict condition sigma?
pub fn meets_condition(
    set: &SemiAlgSet,
    tuple_polys: &[MultiPoly],
    sigma: &SignVector,
) -> Result<bool> {
    check_sigma(tuple_polys, sigma)?;
    let nb = set.polys.len();
    for s in combined_samples(set, tuple_polys)? {
        let (sp, tp) = s.signs.0.split_at(nb);
        if strict_matches(tp, sigma) && set.formula.eval(sp) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Spec classification: boundary-meet dominates, then containment is decided
/// by the representative points. A realization split by the set without any
/// declared boundary crossing it (possible only across separate components)
/// is reported as MeetsBoundary, the sound over-approximation.
pub fn classify_against_realization(
    set: &SemiAlgSet,
    tuple_polys: &[MultiPoly],
    sigma: &SignVector,
) -> Result<SetClass> {
    check_sigma(tuple_polys, sigma)?;
    let nb = set.polys.len();
    let mut any = false;
    let mut bcross = false;
    let mut some_in = false;
    let mut some_out = false;
    for s in combined_samples(set, tuple_polys)? {
        let (sp, tp) = s.signs.0.split_at(nb);
        if !strict_matches(tp, sigma) {
            continue;
        }
        any = true;
        if sp.contains(&0) {
            bcross = true;
        }
        if set.formula.eval(sp) {
            some_in = true;
        } else {
            some_out = true;
        }
    }
    Ok(if !any {
        SetClass::Disjoint
    } else if bcross || (some_in && some_out) {
        SetClass::MeetsBoundary
    } else if some_in {
        SetClass::ContainsRealization
    } else {
        SetClass::Disjoint
    })
}

fn check_sigma(tuple_polys: &[MultiPoly], sigma: &SignVector) -> Result<()> {
    if sigma.0.len() != tuple_polys.len() {
        return Err(Error::ArityMismatch {
            expected: tuple_polys.len(),
            got: sigma.0.len(),
        });
    }
    if !sigma.is_strict() {
        return Err(Error::malformed("sign condition must be strict"));
    }
    Ok(())
}

/// Member points of S at rational abscissas, spread across the x-extent.
/// Degenerate sets visible only over irrational abscissas yield fewer (or
/// zero) points; exact verification never relies on this sampler.
pub fn sample_points_on(set: &SemiAlgSet, count: usize) -> Result<Vec<AlgebraicPoint>> {
    if count < 1 {
        return Err(Error::out_of_range("count must be at least 1"));
    }
    if set.dim_tag == 0 {
        if let Some((x, y)) = set.as_point() {
            let pt = AlgebraicPoint::rational(x, y);
            if set.contains(&pt)? {
                return Ok(vec![pt]);
            }
            return Ok(vec![]);
        }
    }
    let mut anchor_xs: Vec<Rational> = Vec::new();
    for s in sample_sign_conditions(&set.polys)? {
        if !set.contains_sample(&s.point)? {
            continue;
        }
        if let Some(x) = s.point.x_rational() {
            if !anchor_xs.contains(x) {
                anchor_xs.push(x.clone());
            }
        }
    }
    if anchor_xs.is_empty() {
        return Ok(vec![]);
    }
    anchor_xs.sort();
    let xmin = anchor_xs[0].clone();
    let xmax = anchor_xs[anchor_xs.len() - 1].clone();

    let mut grid: Vec<Rational> = Vec::new();
    if xmin == xmax {
        grid.push(xmin.clone());
    } else {
        let span = &xmax - &xmin;
        let steps = count.max(2) - 1;
        for i in 0..=steps {
            grid.push(&xmin + &span * Rational::new(i.into(), steps.into()));
        }
    }

    let mut picked: Vec<AlgebraicPoint> = Vec::new();
    let mut extras: Vec<AlgebraicPoint> = Vec::new();
    let pool: Vec<Rational> = grid
        .iter()
        .chain(anchor_xs.iter().filter(|x| !grid.contains(x)))
        .cloned()
        .collect();
    for (gi, x) in pool.iter().enumerate() {
        let mut first_here = true;
        for y in candidates_at(set, x)? {
            let pt = AlgebraicPoint {
                x: x.clone(),
                y,
            };
            if !set.contains(&pt)? {
                continue;
            }
            if first_here && gi < grid.len() {
                picked.push(pt);
                first_here = false;
            } else {
                extras.push(pt);
            }
        }
    }
    let mut out = picked;
    for e in extras {
        if out.len() >= count {
            break;
        }
        out.push(e);
    }
    out.truncate(count);
    Ok(out)
}

/// Candidate ordinates on the vertical line through x: roots of every atom's
/// specialization, plus midpoints between consecutive roots of the product
/// (interior candidates for full-dimensional sets).
fn candidates_at(set: &SemiAlgSet, x: &Rational) -> Result<Vec<YCoord>> {
    let mut out: Vec<YCoord> = Vec::new();
    let mut product: Option<MultiPoly> = None;
    for p in &set.polys {
        let q = p.substitute(0, x);
        if q.is_zero() || q.degree_in(0) == 0 {
            continue;
        }
        for r in isolate_real_roots(&q)? {
            out.push(match r.as_rational() {
                Some(v) => YCoord::Rat(v),
                None => YCoord::Root(r),
            });
        }
        product = Some(match product {
            None => q,
            Some(acc) => &acc * &q,
        });
    }
    if set.dim_tag == 2 {
        match product {
            None => out.push(YCoord::Rat(Rational::zero())),
            Some(prod) => {
                let roots = isolate_real_roots(&prod)?;
                if roots.is_empty() {
                    out.push(YCoord::Rat(Rational::zero()));
                } else {
                    out.push(YCoord::Rat(roots[0].lo().floor() - Rational::one()));
                    for w in roots.windows(2) {
                        let (a, b) = (w[0].hi(), w[1].lo());
                        let mid = if a == b { a.clone() } else { simplest_in_open(a, b) };
                        out.push(YCoord::Rat(mid));
                    }
                    out.push(YCoord::Rat(
                        roots[roots.len() - 1].hi().floor() + Rational::one(),
                    ));
                }
            }
        }
    }
    Ok(out)
}
