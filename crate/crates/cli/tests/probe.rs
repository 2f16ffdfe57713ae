use std::time::Instant;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use geopart_core::num::{rat, rat_i64};
use geopart_core::oracle::grid_curve_signs;
use geopart_core::sampler::sample_sign_conditions;
use geopart_core::MultiPoly;

fn random_cubic(rng: &mut ChaCha8Rng) -> MultiPoly {
    loop {
        let mut acc = MultiPoly::zero(2);
        for i in 0..=3u32 {
            for j in 0..=(3 - i) {
                if rng.gen_bool(0.5) {
                    let c = rat(rng.gen_range(-65_536i64..=65_536), 1024);
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

#[test]
fn probe_sampler() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51c0);
    let len = rng.gen_range(1..=3usize);
    let polys: Vec<MultiPoly> = (0..len).map(|_| random_cubic(&mut rng)).collect();
    let t0 = Instant::now();
    let cells = sample_sign_conditions(&polys).unwrap();
    eprintln!("sampler: {} cells in {:?}", cells.len(), t0.elapsed());
}

#[test]
fn probe_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51c0);
    let len = rng.gen_range(1..=3usize);
    let polys: Vec<MultiPoly> = (0..len).map(|_| random_cubic(&mut rng)).collect();
    let t0 = Instant::now();
    let oracle = grid_curve_signs(&polys).unwrap();
    eprintln!("oracle: {} strict in {:?}", oracle.strict.len(), t0.elapsed());
}
