//! Random matrices and states. All samplers take an explicit RNG; seeded
//! entry points use ChaCha8 so results are reproducible across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, CMatrix, C64};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| normal_c64(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q` so that diagonal is real positive.
pub fn haar_unitary_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = ginibre(rng, dim, dim);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for col in 0..dim {
        let d = r[(col, col)];
        let n = d.norm();
        let phase = if n > 0.0 { d / n } else { C64::new(1.0, 0.0) };
        for row in 0..dim {
            q[(row, col)] *= phase;
        }
    }
    q
}

/// Uniformly random unit vector.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    let v = ginibre(rng, dim, 1);
    let n = v.norm();
    v.iter().map(|z| z / n).collect()
}

/// Random positive semidefinite matrix `G G^dagger`.
pub fn random_positive<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = ginibre(rng, dim, dim);
    &g * g.adjoint()
}

/// Random descending Schmidt coefficients with unit sum of squares, each at
/// least `floor` before normalization.
pub fn random_schmidt<R: Rng + ?Sized>(rng: &mut R, dim: usize, floor: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..dim).map(|_| floor + rng.random::<f64>()).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x = (*x / s).sqrt());
    w.sort_by(|a, b| b.total_cmp(a));
    w
}
