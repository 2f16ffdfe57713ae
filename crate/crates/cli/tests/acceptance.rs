//! Acceptance gate: ten go/no-go checks over the whole stack, each one test
//! so the harness prints one pass/fail line per criterion.
//!
//! Everything is seeded and exact; the only tolerances are the ones the
//! criteria themselves state (success quotas and the growth exponent).

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geopart_core::instance::gen_instance;
use geopart_core::locate::{depth_bound, shrink_factor, LocateConfig, LocationTree};
use geopart_core::num::{rat, rat_i64, Rational};
use geopart_core::oracle::{
    brute_force_first_hit, brute_force_range, brute_force_weight, grid_curve_signs,
};
use geopart_core::partition::{build_partition, PartitionConfig, PartitionTuple};
use geopart_core::range::{build_range_structure, dualize, range_query, DualFamilySpec};
use geopart_core::rayshoot::{build_rayshoot, first_stage_cad, hits_agree};
use geopart_core::sampler::{mt_bound, sample_sign_conditions};
use geopart_core::semialg::{BoolFormula, Rel, SemiAlgSet};
use geopart_core::semigroup::Counting;
use geopart_core::{MultiPoly, SignVector};

fn q16(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-65_536i64..=65_536), 1024)
}

// --- criteria 1 and 2: sign sampler vs oracle over one shared corpus --------

struct SignRun {
    sampled_strict: BTreeSet<SignVector>,
    oracle_strict: BTreeSet<SignVector>,
    realized: usize,
    max_deg: u64,
    len: u64,
}

fn random_cubic(rng: &mut ChaCha8Rng) -> MultiPoly {
    loop {
        let mut acc = MultiPoly::zero(2);
        for i in 0..=3u32 {
            for j in 0..=(3 - i) {
                if rng.gen_bool(0.5) {
                    let c = q16(rng);
                    if c != rat_i64(0) {
                        acc = &acc + &MultiPoly::bivar(&[(1, i, j)]).scale(&c);
                    }
                }
            }
        }
        if acc.total_degree() >= 1 {
            return acc;
        }
    }
}

fn sign_runs() -> &'static [SignRun] {
    static RUNS: OnceLock<Vec<SignRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        (0..200u64)
            .map(|seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(0x51c0 + seed);
                let len = rng.gen_range(1..=3usize);
                let polys: Vec<MultiPoly> =
                    (0..len).map(|_| random_cubic(&mut rng)).collect();
                let cells =
                    sample_sign_conditions(&polys).expect("sampling instance");
                let sampled_strict = cells
                    .iter()
                    .filter(|c| c.signs.is_strict())
                    .map(|c| c.signs.clone())
                    .collect();
                let realized = cells
                    .iter()
                    .map(|c| c.signs.clone())
                    .collect::<BTreeSet<_>>()
                    .len();
                let oracle = grid_curve_signs(&polys).expect("oracle instance");
                SignRun {
                    sampled_strict,
                    oracle_strict: oracle.strict,
                    realized,
                    max_deg: polys.iter().map(|p| p.total_degree() as u64).max().unwrap(),
                    len: len as u64,
                }
            })
            .collect()
    })
}

#[test]
fn criterion_01_sign_sampler_matches_oracle_on_200_instances() {
    let mut mismatches = 0;
    for (i, run) in sign_runs().iter().enumerate() {
        if run.sampled_strict != run.oracle_strict {
            mismatches += 1;
            eprintln!(
                "instance {i}: sampled {:?} oracle {:?}",
                run.sampled_strict, run.oracle_strict
            );
        }
    }
    assert_eq!(mismatches, 0, "strict sign-vector sets must match exactly");
}

#[test]
fn criterion_02_realized_conditions_stay_under_milnor_thom() {
    let mut violations = 0;
    for run in sign_runs() {
        let bound = mt_bound(run.max_deg, run.len, 2).expect("mt bound");
        if BigInt::from(run.realized) > bound {
            violations += 1;
        }
    }
    assert_eq!(violations, 0, "sign-condition counts must respect the bound");
}

// --- criterion 3: partition certification on points --------------------------

fn random_points(n: u64, seed: u64) -> Vec<SemiAlgSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|id| SemiAlgSet::point(id, "1", q16(&mut rng), q16(&mut rng)))
        .collect()
}

#[test]
fn criterion_03_point_partitions_certify_on_20_of_20_seeds() {
    for seed in 0..20u64 {
        let sets = random_points(64, 0x9037 + seed);
        let config = PartitionConfig {
            k: 2,
            c0: rat_i64(2),
            max_retries: 10,
            seed,
            ..PartitionConfig::default()
        };
        let outcome = build_partition(&sets, &config)
            .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert!(outcome.accepted, "seed {seed} not accepted");
        assert!(outcome.attempts <= 10, "seed {seed} used {} attempts", outcome.attempts);
        let worst = outcome.report.max_meets();
        assert!(worst <= 32, "seed {seed}: a strict condition meets {worst} > 32 points");
    }
}

// --- criteria 4 and 5: partition certification on unit circles --------------

fn unit_circles(n: u64, seed: u64) -> Vec<SemiAlgSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|id| {
            let cx = rat(rng.gen_range(-8192i64..=8192), 1024);
            let cy = rat(rng.gen_range(-8192i64..=8192), 1024);
            let dx = &MultiPoly::var(2, 0) - &MultiPoly::constant(2, cx);
            let dy = &MultiPoly::var(2, 1) - &MultiPoly::constant(2, cy);
            let p = &(&(&dx * &dx) + &(&dy * &dy)) - &MultiPoly::one(2);
            SemiAlgSet::new(id, 1, "1", vec![p], BoolFormula::atom(0, Rel::Eq0)).unwrap()
        })
        .collect()
}

fn circle_config(seed: u64, retries: u32) -> PartitionConfig {
    PartitionConfig {
        k: 4,
        c0: rat_i64(4),
        max_retries: retries,
        seed,
        ..PartitionConfig::default()
    }
}

#[test]
fn criterion_04_circle_partitions_certify_on_9_of_10_seeds() {
    let mut successes = 0;
    for seed in 0..10u64 {
        let sets = unit_circles(256, 0xc14c + seed);
        match build_partition(&sets, &circle_config(seed, 10)) {
            Ok(o) if o.accepted && o.attempts <= 10 && o.report.max_meets() <= 256 => {
                successes += 1;
            }
            Ok(_) | Err(_) => {}
        }
    }
    assert!(successes >= 9, "only {successes}/10 seeds certified");
}

#[test]
fn criterion_05_single_attempt_acceptance_frequency_is_at_least_0_35() {
    let mut accepted = 0;
    for seed in 0..60u64 {
        let sets = unit_circles(256, 0xf4e0 + seed);
        if let Ok(o) = build_partition(&sets, &circle_config(seed, 1)) {
            if o.accepted {
                accepted += 1;
            }
        }
    }
    // 0.35 * 60 = 21
    assert!(accepted >= 21, "accepted {accepted}/60 single attempts");
}

// --- criterion 6: point location exactness ----------------------------------

fn disk_center_radius(set: &SemiAlgSet) -> (Rational, Rational, Rational) {
    let p = &set.polys[0];
    let cx = -p.coeff(&[1, 0]) / rat_i64(2);
    let cy = -p.coeff(&[0, 1]) / rat_i64(2);
    let r2 = &(&cx * &cx) + &(&cy * &cy) - p.coeff(&[0, 0]);
    let n = r2.numer().sqrt();
    let d = r2.denom().sqrt();
    let r = Rational::new(n, d);
    assert_eq!(&r * &r, r2, "generated disk radius must be rational");
    (cx, cy, r)
}

/// A rational point exactly on the circle around (cx, cy), via the tangent
/// half-angle parameterization.
fn on_circle(cx: &Rational, cy: &Rational, r: &Rational, t: Rational) -> (Rational, Rational) {
    let one = rat_i64(1);
    let t2 = &t * &t;
    let den = &one + &t2;
    let x = cx + &(&(r * &(&one - &t2)) / &den);
    let y = cy + &(&(r * &(&t + &t)) / &den);
    (x, y)
}

/// A rational point on the zero set of a linear-in-basis tuple polynomial
/// (a + b·x + c·y), if it has one.
fn on_zero_set(p: &MultiPoly, rng: &mut ChaCha8Rng) -> Option<(Rational, Rational)> {
    if p.total_degree() > 1 {
        return None;
    }
    let a = p.coeff(&[0, 0]);
    let b = p.coeff(&[1, 0]);
    let c = p.coeff(&[0, 1]);
    let zero = rat_i64(0);
    if c != zero {
        let x = q16(rng);
        let y = -(&(&a + &(&b * &x)) / &c);
        Some((x, y))
    } else if b != zero {
        Some((-(&a / &b), q16(rng)))
    } else {
        None
    }
}

fn root_tuple<G: geopart_core::semigroup::Semigroup>(tree: &LocationTree<G>) -> PartitionTuple {
    let v = tree.to_json();
    serde_json::from_value(v["root"]["tuple"].clone()).expect("root is split")
}

#[test]
fn criterion_06_location_queries_match_scans_within_depth_bound() {
    let n = 300usize;
    let inst = gen_instance("disks", n, 60, 13).unwrap();
    let config = LocateConfig {
        seed: 6,
        ..LocateConfig::default()
    };
    let tree = LocationTree::build(inst.sets.clone(), Counting, config.clone()).unwrap();
    let stats = tree.stats();
    assert!(!stats.degraded, "build must certify every split");
    let shrink = shrink_factor(config.k, &config.c0, &inst.sets).unwrap();
    let bound = depth_bound(n, config.n0, &shrink).expect("shrink > 1");
    assert!(
        stats.depth <= bound,
        "depth {} exceeds bound {bound}",
        stats.depth
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0x10ca_7e);
    let tuple = root_tuple(&tree);
    let mut queries: Vec<(Rational, Rational)> = Vec::with_capacity(1000);
    // 50 on a disk boundary, 20 on the root partition variety, 930 generic
    for i in 0..50 {
        let (cx, cy, r) = disk_center_radius(&inst.sets[i * 6 % n]);
        let t = rat(rng.gen_range(-160i64..=160), 64);
        queries.push(on_circle(&cx, &cy, &r, t));
    }
    let mut vi = 0;
    while vi < 20 {
        let p = &tuple.polys()[vi % tuple.polys().len()];
        if let Some(pt) = on_zero_set(p, &mut rng) {
            queries.push(pt);
            vi += 1;
        } else {
            vi += 1; // constant-sign poly: substitute a generic query instead
            queries.push((q16(&mut rng), q16(&mut rng)));
        }
    }
    while queries.len() < 1000 {
        let b = 13 * 1024i64;
        queries.push((
            rat(rng.gen_range(-b..=b), 1024),
            rat(rng.gen_range(-b..=b), 1024),
        ));
    }

    for (x, y) in &queries {
        let got = tree.query_traced(x, y).unwrap();
        let want = brute_force_weight(&inst.sets, &Counting, x, y).unwrap();
        assert_eq!(got.weight, want, "at ({x}, {y})");
        if !got.degenerate {
            assert!(
                got.visits <= stats.depth,
                "non-degenerate walk visited {} > depth {}",
                got.visits,
                stats.depth
            );
        }
    }
}

// --- criterion 7: storage growth ---------------------------------------------

#[test]
fn criterion_07_total_references_grow_under_2_pow_2_5_per_doubling() {
    // constant-density boxes: half-width scales with sqrt(n)
    let grid: [(usize, i64); 4] = [(128, 8), (256, 11), (512, 16), (1024, 23)];
    let mut refs = Vec::new();
    for (i, (n, half)) in grid.iter().enumerate() {
        let inst = gen_instance("disks", *n, 70 + i as u64, *half).unwrap();
        let config = LocateConfig {
            seed: 7,
            ..LocateConfig::default()
        };
        let tree = LocationTree::build(inst.sets, Counting, config).unwrap();
        assert!(!tree.stats().degraded, "n={n} degraded");
        refs.push(tree.stats().total_refs);
    }
    for w in refs.windows(2) {
        // r1/r0 <= 2^2.5  <=>  r1^2 <= 32 * r0^2, exactly in integers
        assert!(
            w[1] * w[1] <= 32 * w[0] * w[0],
            "refs jumped {} -> {} (> 2^2.5x)",
            w[0],
            w[1]
        );
    }
}

// --- criterion 8: range searching ---------------------------------------------

fn range_queries(
    family: &DualFamilySpec,
    points: &[SemiAlgSet],
    seed: u64,
) -> Vec<(Rational, Rational)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(500);
    for i in 0..50 {
        // boundary-incident: the data point sits exactly on the range boundary
        let (px, py) = points[(i * 4) % points.len()].as_point().unwrap();
        if family.name() == "halfplane" {
            let a = rat(rng.gen_range(-4096i64..=4096), 1024);
            let b = &py - &(&a * &px);
            out.push((a, b));
        } else {
            out.push((&px + &rat(3, 5), &py + &rat(4, 5)));
        }
    }
    while out.len() < 500 {
        out.push((q16(&mut rng), q16(&mut rng)));
    }
    out
}

#[test]
fn criterion_08_range_queries_match_scans_and_duality_round_trips() {
    let points = random_points(200, 0x8a27);
    for name in ["halfplane", "disk-translate"] {
        let family = DualFamilySpec::by_name(name).unwrap();
        let config = LocateConfig {
            seed: 8,
            ..LocateConfig::default()
        };
        let tree = build_range_structure(&points, &family, Counting, config).unwrap();
        for (a, b) in range_queries(&family, &points, 0x88 + family.name().len() as u64) {
            let got = range_query(&tree, &a, &b).unwrap();
            let want = brute_force_range(&points, &family, &Counting, &a, &b).unwrap();
            assert_eq!(got, want, "{name} at ({a}, {b})");
        }

        let mut rng = ChaCha8Rng::seed_from_u64(0xd0a1);
        for _ in 0..1000 {
            let (a, b) = (q16(&mut rng), q16(&mut rng));
            let (px, py) = (q16(&mut rng), q16(&mut rng));
            let direct = family.contains_pair((&a, &b), (&px, &py)).unwrap();
            let dual = dualize(&family, 0, "1", &px, &py)
                .unwrap()
                .contains_xy(&a, &b)
                .unwrap();
            assert_eq!(direct, dual, "{name} duality at x=({a},{b}) p=({px},{py})");
        }
    }
}

// --- criterion 9: vertical ray shooting ---------------------------------------

#[test]
fn criterion_09_ray_shooting_matches_first_hit_oracle() {
    let circle = MultiPoly::bivar(&[(1, 2, 0), (1, 0, 2), (-1, 0, 0)]);
    let cad = first_stage_cad(&circle).unwrap();
    assert_eq!(cad.cells().count(), 13, "unit-circle decomposition");

    let inst = gen_instance("arcs", 100, 90, 8).unwrap();
    let config = LocateConfig {
        n0: 8,
        seed: 9,
        ..LocateConfig::default()
    };
    let rs = build_rayshoot(inst.sets.clone(), config).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4a75);
    let mut agreements = 0;
    for _ in 0..500 {
        let x = rat(rng.gen_range(-9216i64..=9216), 1024);
        let y = rat(rng.gen_range(-9216i64..=9216), 1024);
        let got = rs.shoot(&x, &y).unwrap();
        let want = brute_force_first_hit(&inst.sets, &x, &y).unwrap();
        assert!(
            hits_agree(got.as_ref(), want.as_ref()),
            "at ({x}, {y}): structure {got:?}, scan {want:?}"
        );
        agreements += 1;
    }
    assert_eq!(agreements, 500);
}

// --- criterion 10: byte-level determinism of the CLI ---------------------------

fn run_twice(dir: &Path, args: &[&str]) -> (Vec<u8>, Vec<u8>) {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_geopart"))
            .current_dir(dir)
            .args(args)
            .output()
            .expect("spawn geopart");
        assert!(
            matches!(out.status.code(), Some(0 | 2 | 3)),
            "geopart {:?}: {}",
            args,
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };
    (run(), run())
}

#[test]
fn criterion_10_every_command_is_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let steps: [&[&str]; 12] = [
        &["gen", "--kind", "circles", "--n", "5", "--seed", "3", "--output", "c5.json"],
        &["gen", "--kind", "points", "--n", "16", "--seed", "5", "--output", "p16.json"],
        &["gen", "--kind", "disks", "--n", "12", "--seed", "2", "--output", "d12.json"],
        &["signcond", "--input", "c5.json"],
        &["partition", "--input", "p16.json", "--c0", "2", "--seed", "5", "--output", "tuple.json"],
        &["verify", "--input", "p16.json", "--tuple", "tuple.json", "--c0", "2"],
        &["locate-build", "--input", "d12.json", "--n0", "8", "--seed", "2", "--output", "tree.json"],
        &["locate-query", "--input", "tree.json", "--at", "1/2,-3/4"],
        &["range-build", "--input", "p16.json", "--family", "halfplane", "--n0", "8", "--seed", "2", "--output", "rtree.json"],
        &["range-query", "--input", "rtree.json", "--at", "2,-1/2"],
        &["rayshoot-build", "--input", "c5.json", "--n0", "4", "--seed", "2", "--output", "rs.json"],
        &["rayshoot-query", "--input", "rs.json", "--at", "1/3,-50"],
    ];
    for args in steps {
        let (a, b) = run_twice(dir, args);
        assert_eq!(a, b, "output of geopart {args:?} changed between runs");
    }
    let (a, b) = run_twice(dir, &["bench", "--kind", "disks", "--ns", "8", "--queries", "5", "--seed", "4"]);
    assert_eq!(a, b, "bench records changed between runs");
    let (a, b) = run_twice(dir, &["render", "--input", "d12.json"]);
    assert_eq!(a, b, "rendering changed between runs");
    assert!(String::from_utf8(a).unwrap().starts_with("<svg"));
}
