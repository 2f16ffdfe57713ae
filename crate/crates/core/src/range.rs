//! Semi-algebraic range searching at dual dimension two.
//!
//! A query family is a boolean formula over polynomial atoms in four
//! variables: the query parameters (a, b) followed by the point coordinates
//! (p1, p2). Fixing a data point and substituting its coordinates turns each
//! atom into a bivariate polynomial in the query parameters, so every point
//! dualizes to a semi-algebraic set in the (a, b)-plane and a range query
//! becomes point location at the query's parameter vector.

use crate::error::{Error, Result};
use crate::locate::{LocateConfig, LocationTree};
use crate::num::{rat_i64, Rational};
use crate::poly::MultiPoly;
use crate::semialg::{BoolFormula, Rel, SemiAlgSet};
use crate::semigroup::Semigroup;

#[derive(Clone, Debug)]
pub struct DualFamilySpec {
    name: String,
    /// Atom templates over (a, b, p1, p2).
    polys: Vec<MultiPoly>,
    formula: BoolFormula,
    /// Dimension tag stamped onto dualized sets.
    dim_tag: u8,
}

impl DualFamilySpec {
    pub fn new(
        name: impl Into<String>,
        polys: Vec<MultiPoly>,
        formula: BoolFormula,
        dim_tag: u8,
    ) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::malformed("family must declare at least one atom"));
        }
        for p in &polys {
            if p.nvars() != 4 {
                return Err(Error::ArityMismatch {
                    expected: 4,
                    got: p.nvars(),
                });
            }
            if p.is_zero() {
                return Err(Error::ZeroPolynomial);
            }
        }
        formula.validate(polys.len())?;
        Ok(DualFamilySpec {
            name: name.into(),
            polys,
            formula,
            dim_tag,
        })
    }

    /// Points below or on the line y = a·x + b; vertical lines are not
    /// expressible in this parameterization.
    pub fn halfplane() -> Self {
        let a = MultiPoly::var(4, 0);
        let b = MultiPoly::var(4, 1);
        let p1 = MultiPoly::var(4, 2);
        let p2 = MultiPoly::var(4, 3);
        let atom = &(&(&a * &p1) + &b) - &p2;
        DualFamilySpec::new(
            "halfplane",
            vec![atom],
            BoolFormula::atom(0, Rel::Ge0),
            2,
        )
        .expect("halfplane family")
    }

    /// Translates of a fixed template set: the query (a, b) selects the copy
    /// shifted so that the template's origin sits at (a, b).
    pub fn translate_of(
        name: impl Into<String>,
        template: &[MultiPoly],
        formula: BoolFormula,
        dim_tag: u8,
    ) -> Result<Self> {
        // x ↦ p1 − a, y ↦ p2 − b, expanded monomial by monomial.
        let x = &MultiPoly::var(4, 2) - &MultiPoly::var(4, 0);
        let y = &MultiPoly::var(4, 3) - &MultiPoly::var(4, 1);
        let mut polys = Vec::with_capacity(template.len());
        for t in template {
            if t.nvars() != 2 {
                return Err(Error::ArityMismatch {
                    expected: 2,
                    got: t.nvars(),
                });
            }
            let mut out = MultiPoly::zero(4);
            for (exp, c) in t.terms() {
                let mono = &x.pow(exp[0]) * &y.pow(exp[1]);
                out = &out + &mono.scale(c);
            }
            polys.push(out);
        }
        DualFamilySpec::new(name, polys, formula, dim_tag)
    }

    /// Unit disks centered at the query point.
    pub fn disk_translate() -> Self {
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let disk = &(&(&x * &x) + &(&y * &y)) - &MultiPoly::constant(2, rat_i64(1));
        DualFamilySpec::translate_of(
            "disk-translate",
            &[disk],
            BoolFormula::atom(0, Rel::Le0),
            2,
        )
        .expect("disk family")
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "halfplane" => Ok(DualFamilySpec::halfplane()),
            "disk-translate" => Ok(DualFamilySpec::disk_translate()),
            other => Err(Error::UnknownKind(format!("range family {other:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    pub fn formula(&self) -> &BoolFormula {
        &self.formula
    }

    /// Direct four-variable evaluation of p ∈ Z_{x,G}; the oracle side of the
    /// duality round-trip.
    pub fn contains_pair(
        &self,
        x: (&Rational, &Rational),
        p: (&Rational, &Rational),
    ) -> Result<bool> {
        let pt = [x.0.clone(), x.1.clone(), p.0.clone(), p.1.clone()];
        let mut signs = Vec::with_capacity(self.polys.len());
        for poly in &self.polys {
            signs.push(poly.sign_eval(&pt)?);
        }
        Ok(self.formula.eval(&signs))
    }
}

/// The dual set S_p = {x : p ∈ Z_{x,G}} of one weighted data point.
pub fn dualize(
    family: &DualFamilySpec,
    id: u64,
    weight: impl Into<String>,
    px: &Rational,
    py: &Rational,
) -> Result<SemiAlgSet> {
    let polys: Vec<MultiPoly> = family
        .polys
        .iter()
        .map(|p| p.substitute(3, py).substitute(2, px))
        .collect();
    SemiAlgSet::new(id, family.dim_tag, weight, polys, family.formula.clone())
}

/// Location tree over the duals of a family of degenerate point sets; ids
/// and weights carry over from the inputs.
pub fn build_range_structure<G: Semigroup>(
    points: &[SemiAlgSet],
    family: &DualFamilySpec,
    semigroup: G,
    config: LocateConfig,
) -> Result<LocationTree<G>> {
    let mut duals = Vec::with_capacity(points.len());
    for set in points {
        let (px, py) = set.as_point().ok_or_else(|| {
            Error::malformed(format!("set {} is not a single rational point", set.id))
        })?;
        duals.push(dualize(family, set.id, set.weight.clone(), &px, &py)?);
    }
    LocationTree::build(duals, semigroup, config)
}

pub fn range_query<G: Semigroup>(
    tree: &LocationTree<G>,
    a: &Rational,
    b: &Rational,
) -> Result<G::W> {
    tree.query_weight(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;
    use crate::semigroup::Counting;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(n: u64, seed: u64) -> Vec<SemiAlgSet> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|id| {
                SemiAlgSet::point(
                    id,
                    "1",
                    rat(rng.gen_range(-8192i64..=8192), 1024),
                    rat(rng.gen_range(-8192i64..=8192), 1024),
                )
            })
            .collect()
    }

    fn brute<G: Semigroup>(
        points: &[SemiAlgSet],
        family: &DualFamilySpec,
        semigroup: &G,
        x: (&Rational, &Rational),
    ) -> G::W {
        let mut acc = semigroup.neutral();
        for s in points {
            let (px, py) = s.as_point().unwrap();
            if family.contains_pair(x, (&px, &py)).unwrap() {
                let w = semigroup.parse(&s.weight).unwrap();
                acc = semigroup.combine(&acc, &w);
            }
        }
        acc
    }

    #[test]
    fn halfplane_dual_is_literal_substitution() {
        let family = DualFamilySpec::halfplane();
        let dual = dualize(&family, 7, "1", &rat_i64(2), &rat_i64(3)).unwrap();
        // {(a,b) : 2a + b − 3 ≥ 0}
        let mut want = MultiPoly::zero(2);
        want = &want + &MultiPoly::var(2, 0).scale(&rat_i64(2));
        want = &want + &MultiPoly::var(2, 1);
        want = &want - &MultiPoly::constant(2, rat_i64(3));
        assert_eq!(dual.polys, vec![want]);
        assert_eq!(dual.id, 7);
    }

    #[test]
    fn disk_dual_at_origin_is_unit_disk() {
        let family = DualFamilySpec::disk_translate();
        let dual = dualize(&family, 0, "1", &rat_i64(0), &rat_i64(0)).unwrap();
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let want = &(&(&x * &x) + &(&y * &y)) - &MultiPoly::constant(2, rat_i64(1));
        assert_eq!(dual.polys, vec![want]);
        // Boundary counts: distance exactly one.
        assert!(dual.contains_xy(&rat(3, 5), &rat(4, 5)).unwrap());
        assert!(!dual.contains_xy(&rat_i64(1), &rat_i64(1)).unwrap());
    }

    #[test]
    fn membership_equivalence_holds_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for family in [DualFamilySpec::halfplane(), DualFamilySpec::disk_translate()] {
            for i in 0..1000u64 {
                let px = rat(rng.gen_range(-4096i64..=4096), 512);
                let py = rat(rng.gen_range(-4096i64..=4096), 512);
                let xa = rat(rng.gen_range(-4096i64..=4096), 512);
                let xb = rat(rng.gen_range(-4096i64..=4096), 512);
                let dual = dualize(&family, i, "1", &px, &py).unwrap();
                assert_eq!(
                    dual.contains_xy(&xa, &xb).unwrap(),
                    family.contains_pair((&xa, &xb), (&px, &py)).unwrap(),
                    "family {} pair {i}",
                    family.name()
                );
            }
        }
    }

    #[test]
    fn queries_match_direct_evaluation() {
        let points = random_points(60, 808);
        let config = LocateConfig {
            seed: 21,
            ..LocateConfig::default()
        };
        for family in [DualFamilySpec::disk_translate(), DualFamilySpec::halfplane()] {
            let tree =
                build_range_structure(&points, &family, Counting, config.clone()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1234);
            for i in 0..150usize {
                let (xa, xb) = if i % 4 == 3 {
                    // Boundary-incident: pick a data point and aim the range
                    // boundary straight through it.
                    let (px, py) = points[(3 * i) % points.len()].as_point().unwrap();
                    if family.name() == "halfplane" {
                        let slope = rat_i64((i % 7) as i64 - 3);
                        (slope.clone(), &py - &(&slope * &px))
                    } else {
                        (&px + &rat(3, 5), &py + &rat(4, 5))
                    }
                } else {
                    (
                        rat(rng.gen_range(-9000i64..=9000), 1000),
                        rat(rng.gen_range(-9000i64..=9000), 1000),
                    )
                };
                assert_eq!(
                    range_query(&tree, &xa, &xb).unwrap(),
                    brute(&points, &family, &Counting, (&xa, &xb)),
                    "family {} query ({xa}, {xb})",
                    family.name()
                );
            }
        }
    }

    #[test]
    fn disk_structure_depth_obeys_bound() {
        use crate::locate::{depth_bound, shrink_factor};
        let points = random_points(60, 3030);
        let config = LocateConfig {
            seed: 5,
            ..LocateConfig::default()
        };
        let family = DualFamilySpec::disk_translate();
        let tree = build_range_structure(&points, &family, Counting, config.clone()).unwrap();
        let shrink = shrink_factor(config.k, &config.c0, tree.sets()).unwrap();
        let bound = depth_bound(points.len(), config.n0, &shrink).unwrap();
        assert!(tree.stats().depth <= bound);
    }

    #[test]
    fn rebuild_is_deterministic() {
        let points = random_points(24, 99);
        let family = DualFamilySpec::halfplane();
        let config = LocateConfig {
            n0: 8,
            seed: 77,
            max_retries: 2,
            solver_budget: 4,
            ..LocateConfig::default()
        };
        let a = build_range_structure(&points, &family, Counting, config.clone()).unwrap();
        let b = build_range_structure(&points, &family, Counting, config).unwrap();
        assert_eq!(
            serde_json::to_string(&a.to_json()).unwrap(),
            serde_json::to_string(&b.to_json()).unwrap()
        );
    }

    #[test]
    fn empty_point_set_answers_neutral() {
        let family = DualFamilySpec::disk_translate();
        let tree =
            build_range_structure(&[], &family, Counting, LocateConfig::default()).unwrap();
        assert_eq!(range_query(&tree, &rat_i64(2), &rat_i64(-1)).unwrap(), 0);
    }

    #[test]
    fn non_point_inputs_are_rejected() {
        let x = MultiPoly::var(2, 0);
        let disk = &(&x * &x) - &MultiPoly::constant(2, rat_i64(1));
        let set =
            SemiAlgSet::new(0, 2, "1", vec![disk], BoolFormula::atom(0, Rel::Le0)).unwrap();
        let family = DualFamilySpec::halfplane();
        assert!(
            build_range_structure(&[set], &family, Counting, LocateConfig::default()).is_err()
        );
    }
}
