#![allow(dead_code)]

use prismatic::{complex, fixtures, ComplexState, DecoratedMetric};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Applies `count` random flips (skipping unflippable edges).
pub fn random_flips(rng: &mut ChaCha8Rng, metric: &DecoratedMetric, count: usize) -> DecoratedMetric {
    let mut m = metric.clone();
    let e = m.surface().num_edges();
    let mut done = 0;
    while done < count {
        let edge = rng.gen_range(0..e);
        if m.surface().is_flippable(edge) {
            m = m.flip(edge).unwrap();
            done += 1;
        }
    }
    m
}

/// The two multi-purpose test surfaces: one cusp and two cusps, both genus 2.
pub fn bases() -> [DecoratedMetric; 2] {
    [fixtures::genus_two_metric(), fixtures::two_cusp_metric()]
}

/// A convex state over a randomly flipped fixture with random weights in
/// `[-1.5, 1.5]`.
pub fn random_convex_state(rng: &mut ChaCha8Rng, base: &DecoratedMetric) -> ComplexState {
    let flips = rng.gen_range(0..6);
    let m = random_flips(rng, base, flips);
    let r = uniform(rng, m.surface().num_cusps(), -1.5, 1.5);
    complex::delaunayize(&m, &r).unwrap().state
}

/// Random admissible prism data with `l ∈ [-2, 3]³`, `r ∈ [-2, 2]³`.
pub fn random_admissible_prism(rng: &mut ChaCha8Rng) -> ([f64; 3], [f64; 3]) {
    loop {
        let l: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..3.0));
        let r: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        if prismatic::hypgeom::prism_angles(l, r).is_ok() {
            return (l, r);
        }
    }
}

pub fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}
