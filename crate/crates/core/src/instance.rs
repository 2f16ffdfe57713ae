//! Seeded instance generation and the instance file.
//!
//! Coordinates are random rationals with numerators bounded by the box and a
//! fixed denominator of 1024 before reduction, which keeps coefficient growth
//! across resultants and substitutions in check.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::num::{rat, Rational};
use crate::poly::MultiPoly;
use crate::semialg::{BoolFormula, Rel, SemiAlgSet};

pub const GENERATORS: &[&str] = &[
    "points",
    "disks",
    "circles",
    "arcs",
    "segments",
    "conic-arcs",
];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub seed: u64,
    pub generator: String,
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Instance {
    pub dimension: u8,
    pub metadata: InstanceMeta,
    pub sets: Vec<SemiAlgSet>,
}

impl Instance {
    pub fn new(metadata: InstanceMeta, sets: Vec<SemiAlgSet>) -> Result<Self> {
        let inst = Instance {
            dimension: 2,
            metadata,
            sets,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != 2 {
            return Err(Error::out_of_range(format!(
                "dimension {} is unsupported",
                self.dimension
            )));
        }
        let mut ids: Vec<u64> = self.sets.iter().map(|s| s.id).collect();
        ids.sort_unstable();
        for (i, id) in ids.iter().enumerate() {
            if *id != i as u64 {
                return Err(Error::malformed("set ids must be exactly 0..n-1"));
            }
        }
        for s in &self.sets {
            s.validate()?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("instance serializes")
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let inst: Instance = serde_json::from_value(v.clone())
            .map_err(|e| Error::malformed(format!("bad instance: {e}")))?;
        inst.validate()?;
        Ok(inst)
    }
}

struct Gen {
    rng: ChaCha8Rng,
    half: i64,
}

impl Gen {
    /// Uniform numerator over [lo, hi] at denominator 1024, reduced.
    fn q(&mut self, lo: i64, hi: i64) -> Rational {
        rat(self.rng.gen_range(lo..=hi), 1024)
    }

    fn coord(&mut self) -> Rational {
        let b = self.half * 1024;
        self.q(-b, b)
    }

    fn radius(&mut self) -> Rational {
        self.q(256, 1024)
    }

    /// Window half-extent as a fraction of the radius, bounded away from
    /// both 0 (degenerate window) and 1 (vertical tangent on the edge).
    fn frac(&mut self) -> Rational {
        self.q(256, 896)
    }
}

fn xv() -> MultiPoly {
    MultiPoly::var(2, 0)
}

fn yv() -> MultiPoly {
    MultiPoly::var(2, 1)
}

fn cst(r: Rational) -> MultiPoly {
    MultiPoly::constant(2, r)
}

fn circle_poly(cx: &Rational, cy: &Rational, r2: Rational) -> MultiPoly {
    let dx = &xv() - &cst(cx.clone());
    let dy = &yv() - &cst(cy.clone());
    &(&(&dx * &dx) + &(&dy * &dy)) - &cst(r2)
}

/// Closed x-window [a, b] appended as two extra atoms.
fn windowed(curve: MultiPoly, a: Rational, b: Rational) -> (Vec<MultiPoly>, BoolFormula) {
    (
        vec![curve, &xv() - &cst(a), &cst(b) - &xv()],
        BoolFormula::And(vec![
            BoolFormula::atom(0, Rel::Eq0),
            BoolFormula::atom(1, Rel::Ge0),
            BoolFormula::atom(2, Rel::Ge0),
        ]),
    )
}

fn gen_set(kind: &str, id: u64, g: &mut Gen) -> Result<SemiAlgSet> {
    match kind {
        "points" => Ok(SemiAlgSet::point(id, "1", g.coord(), g.coord())),
        "disks" | "circles" => {
            let (cx, cy, r) = (g.coord(), g.coord(), g.radius());
            let poly = circle_poly(&cx, &cy, &r * &r);
            if kind == "disks" {
                SemiAlgSet::new(id, 2, "1", vec![poly], BoolFormula::atom(0, Rel::Le0))
            } else {
                SemiAlgSet::new(id, 1, "1", vec![poly], BoolFormula::atom(0, Rel::Eq0))
            }
        }
        "arcs" => {
            let (cx, cy, r) = (g.coord(), g.coord(), g.radius());
            let a = &cx - &(&r * &g.frac());
            let b = &cx + &(&r * &g.frac());
            let (polys, formula) = windowed(circle_poly(&cx, &cy, &r * &r), a, b);
            SemiAlgSet::new(id, 1, "1", polys, formula)
        }
        "segments" => {
            let m = g.q(-2048, 2048);
            let c = g.coord();
            let a = g.coord();
            let b = &a + &g.q(512, 4096);
            let line = &yv() - &(&xv().scale(&m) + &cst(c));
            let (polys, formula) = windowed(line, a, b);
            SemiAlgSet::new(id, 1, "1", polys, formula)
        }
        "conic-arcs" if id % 2 == 0 => {
            // parabola arc y = q x^2 + m x + c over a closed window
            let mut lead = g.q(-2048, 2048);
            if lead.is_zero() {
                lead = rat(1, 4);
            }
            let m = g.q(-1024, 1024);
            let c = g.coord();
            let a = g.coord();
            let b = &a + &g.q(512, 2048);
            let curve = &yv()
                - &(&(&(&xv() * &xv()).scale(&lead) + &xv().scale(&m)) + &cst(c));
            let (polys, formula) = windowed(curve, a, b);
            SemiAlgSet::new(id, 1, "1", polys, formula)
        }
        "conic-arcs" => {
            // axis-aligned ellipse arc over a window inside its x-extent
            let (cx, cy) = (g.coord(), g.coord());
            let (rx, ry) = (g.radius(), g.radius());
            let dx = &xv() - &cst(cx.clone());
            let dy = &yv() - &cst(cy);
            let curve = &(&(&dx * &dx).scale(&(&ry * &ry)) + &(&dy * &dy).scale(&(&rx * &rx)))
                - &cst(&(&rx * &rx) * &(&ry * &ry));
            let a = &cx - &(&rx * &g.frac());
            let b = &cx + &(&rx * &g.frac());
            let (polys, formula) = windowed(curve, a, b);
            SemiAlgSet::new(id, 1, "1", polys, formula)
        }
        other => Err(Error::UnknownKind(format!("generator {other:?}"))),
    }
}

pub fn gen_instance(kind: &str, n: usize, seed: u64, half: i64) -> Result<Instance> {
    if !GENERATORS.contains(&kind) {
        return Err(Error::UnknownKind(format!("generator {kind:?}")));
    }
    if half <= 0 {
        return Err(Error::out_of_range("box half-width must be positive"));
    }
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        half,
    };
    let mut sets = Vec::with_capacity(n);
    for id in 0..n as u64 {
        sets.push(gen_set(kind, id, &mut g)?);
    }
    let mut params = BTreeMap::new();
    params.insert("n".into(), n.to_string());
    params.insert("box".into(), half.to_string());
    Instance::new(
        InstanceMeta {
            seed,
            generator: kind.into(),
            params,
        },
        sets,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_instance_is_valid() {
        let inst = gen_instance("points", 0, 1, 8).unwrap();
        assert!(inst.sets.is_empty());
        let v = inst.to_json();
        let back = Instance::from_json(&v).unwrap();
        assert!(back.sets.is_empty());
    }

    #[test]
    fn disks_are_single_quadratic_atoms() {
        let inst = gen_instance("disks", 100, 7, 8).unwrap();
        assert_eq!(inst.sets.len(), 100);
        for s in &inst.sets {
            assert_eq!(s.dim_tag, 2);
            assert_eq!(s.polys.len(), 1);
            assert_eq!(s.polys[0].total_degree(), 2);
            assert!(s.formula.is_closed());
        }
    }

    #[test]
    fn generation_is_byte_deterministic() {
        for kind in GENERATORS {
            let a = serde_json::to_string(&gen_instance(kind, 12, 42, 8).unwrap().to_json())
                .unwrap();
            let b = serde_json::to_string(&gen_instance(kind, 12, 42, 8).unwrap().to_json())
                .unwrap();
            assert_eq!(a, b, "kind {kind}");
            let c = serde_json::to_string(&gen_instance(kind, 12, 43, 8).unwrap().to_json())
                .unwrap();
            assert_ne!(a, c, "kind {kind}");
        }
    }

    #[test]
    fn windowed_kinds_have_nonempty_closed_windows() {
        for kind in ["arcs", "segments", "conic-arcs"] {
            let inst = gen_instance(kind, 24, 5, 8).unwrap();
            for s in &inst.sets {
                assert_eq!(s.dim_tag, 1);
                assert_eq!(s.polys.len(), 3);
                assert!(s.formula.is_closed());
                // window atoms are x - a and b - x; nonempty means a < b,
                // i.e. their sum b - a is a positive constant
                let width = &s.polys[1] + &s.polys[2];
                assert!(width.is_constant());
                assert!(crate::poly::rational_sign(&width.coeff(&[0, 0])) > 0);
            }
        }
    }

    #[test]
    fn conic_arcs_keep_constant_leading_y_coefficient() {
        let inst = gen_instance("conic-arcs", 16, 11, 8).unwrap();
        for s in &inst.sets {
            let curve = &s.polys[0];
            let d = curve.degree_in(1);
            assert!(d >= 1 && d <= 2);
            let lead = &curve.coeffs_desc_in(1)[0];
            assert_eq!(lead.degree_in(0), 0, "set {}", s.id);
        }
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(gen_instance("klein-bottles", 3, 0, 8).is_err());
        assert!(gen_instance("points", 3, 0, 0).is_err());
        // duplicate ids fail validation on read
        let mut inst = gen_instance("points", 3, 0, 8).unwrap();
        inst.sets[2].id = 0;
        assert!(Instance::from_json(&inst.to_json()).is_err());
    }
}
