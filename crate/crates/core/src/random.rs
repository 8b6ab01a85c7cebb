//! Seeded random fixtures.
//!
//! All randomness goes through [`seeded_rng`], a ChaCha8 stream keyed by a
//! 64-bit seed, so every randomized report and test is reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::catalog;
use crate::channel::{DensityMatrix, KrausSet};
use crate::error::Result;
use crate::linalg::{c64, gram_schmidt, ComplexMatrix, ComplexVector};

pub type FixtureRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix of independent standard complex Gaussians.
pub fn ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let data = (0..rows * cols)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c64(re, im)
        })
        .collect();
    ComplexMatrix::from_vec(rows, cols, data).expect("gaussian samples are finite")
}

/// Haar-random unitary: Gram–Schmidt on the columns of a Ginibre matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let g = ginibre(n, n, rng);
        let cols: Vec<ComplexVector> = (0..n).map(|j| g.column(j)).collect();
        let q = gram_schmidt(&cols, 1e-8);
        if q.len() == n {
            return ComplexMatrix::from_columns(&q).expect("columns share a dimension");
        }
    }
}

/// `G G† / tr(G G†)` with `G` Ginibre; full rank with probability one.
pub fn random_density<R: Rng>(n: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(n, n, rng);
    let ggd = &g * &g.adjoint();
    let tr = ggd.trace().re;
    DensityMatrix::new(ggd.scale_real(1.0 / tr)).expect("G G† / tr is a state")
}

/// Random unit vector.
pub fn random_pure_state<R: Rng>(n: usize, rng: &mut R) -> ComplexVector {
    let g = ginibre(n, 1, rng).column(0);
    let norm = g.norm();
    g.scale(c64(1.0 / norm, 0.0))
}

/// Mixture of `count` Haar unitaries with weights drawn uniformly and
/// normalized.
pub fn random_unitary_mixture<R: Rng>(n: usize, count: usize, rng: &mut R) -> Result<KrausSet> {
    let raw: Vec<f64> = (0..count).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let unitaries: Vec<ComplexMatrix> = (0..count).map(|_| random_unitary(n, rng)).collect();
    catalog::make_random_unitary_mixture(&weights, &unitaries)
}

/// The fixture family used throughout the test suites: 2 to 4 Haar
/// unitaries, dimension alternating between 2 and 3.
pub fn fixture_mixture(seed: u64) -> Result<KrausSet> {
    let mut rng = seeded_rng(seed);
    let n = if seed % 2 == 0 { 2 } else { 3 };
    let count = rng.random_range(2..=4);
    Ok(random_unitary_mixture(n, count, &mut rng)?.with_label(format!("random_mixture_seed_{seed}")))
}
