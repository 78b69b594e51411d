//! Cross-operator ranks of bipartite unitaries and channels whose
//! environment starts out mixed.
//!
//! A unitary `U` on `H_a (x) H_e` is stored as a tensor with legs
//! `(b+, c+, a-, e-)`, where `b` and `c` are the output copies of `a` and
//! `e`. Its cross operator groups `(b, a)` against `(c, e)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{kraus_rank, Channel, Isometry};
use crate::duality::{schmidt, BipartiteKet};
use crate::error::{Error, Result};
use crate::linalg::{self, gates, CMatrix};
use crate::sampling::{haar_unitary_with, rng_from_seed};
use crate::tensor::{Leg, Space, Tensor};

const UNITARY_TOL: f64 = 1e-10;

/// Relative level below which a singular value counts as numerically absent
/// for the gap diagnostic.
pub const GAP_LEVEL: f64 = 1e-6;

pub fn haar_unitary(dim: usize, seed: u64) -> CMatrix {
    haar_unitary_with(&mut rng_from_seed(seed), dim)
}

/// `U` as a tensor with legs `(b+, c+, a-, e-)`.
pub fn unitary_tensor(u: &CMatrix, d_a: usize, d_e: usize) -> Result<Tensor> {
    let n = d_a * d_e;
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::Dimension(format!("expected a {n}x{n} unitary, got {}x{}", u.nrows(), u.ncols())));
    }
    let (a, e) = (Space::new("a", d_a)?, Space::new("e", d_e)?);
    let (b, c) = (Space::new("b", d_a)?, Space::new("c", d_e)?);
    Tensor::from_matrix("U", vec![Leg::open(&b), Leg::open(&c)], vec![Leg::closed(&a), Leg::closed(&e)], u)
}

/// Singular values of the cross operator `U_{ba;ce}`, descending.
pub fn cross_singular_values(u: &CMatrix, d_a: usize, d_e: usize) -> Result<Vec<f64>> {
    unitary_tensor(u, d_a, d_e)?.singular_values(&[0, 2], &[1, 3])
}

/// Operator-Schmidt rank of `U`, counting singular values above `tol` times
/// the largest.
pub fn cross_rank(u: &CMatrix, d_a: usize, d_e: usize, tol: f64) -> Result<usize> {
    Ok(linalg::numerical_rank(&cross_singular_values(u, d_a, d_e)?, tol))
}

/// True when the third singular value is visible at [`GAP_LEVEL`] but the
/// fourth is not.
fn gap_violation(s: &[f64]) -> bool {
    s.len() >= 4 && s[2] > GAP_LEVEL * s[0] && s[3] <= GAP_LEVEL * s[0]
}

/// Deterministic unitaries covering the low ranks: 20 products of fixed
/// Haar factors, `exp(i theta H_a (x) H_e)` on 101 angles in `[0, pi/2]` with
/// `H` the Hermitian part of the shift (`X` for qubits), the controlled
/// shift (CNOT), and SWAP when `d_a = d_e`.
pub fn structured_family(d_a: usize, d_e: usize) -> Vec<(String, CMatrix)> {
    let mut out = Vec::new();
    for k in 0..20u64 {
        let u = linalg::kron(&haar_unitary(d_a, 1_000 + k), &haar_unitary(d_e, 2_000 + k));
        out.push((format!("product-{k}"), u));
    }
    let herm = |d: usize| {
        let x = gates::shift(d);
        (&x + x.adjoint()).scale(0.5)
    };
    let h = linalg::kron(&herm(d_a), &herm(d_e));
    for k in 0..=100 {
        let theta = std::f64::consts::FRAC_PI_2 * k as f64 / 100.0;
        out.push((format!("xx-{k}"), linalg::expi_hermitian(&h, theta)));
    }
    let n = d_a * d_e;
    let cshift = CMatrix::from_fn(n, n, |r, col| {
        let (i, j) = (col / d_e, col % d_e);
        if r == i * d_e + (j + i) % d_e {
            linalg::ONE
        } else {
            linalg::ZERO
        }
    });
    out.push(("cnot".into(), cshift));
    if d_a == d_e {
        out.push(("swap".into(), gates::swap(d_a)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusConfig {
    pub d_a: usize,
    pub d_e: usize,
    /// Number of Haar samples.
    pub n: usize,
    pub seed: u64,
    pub tol: f64,
    /// Number of structured unitaries added to the Haar samples.
    pub structured: usize,
}

/// Counts of cross ranks. `counts` sums to `n + structured`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankHistogram {
    pub config: CensusConfig,
    pub counts: BTreeMap<usize, usize>,
    /// Samples whose third singular value is above the gap level while the
    /// fourth is below it. Only meaningful for two qubits.
    pub gap_violations: usize,
}

impl RankHistogram {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn count(&self, rank: usize) -> usize {
        self.counts.get(&rank).copied().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

/// Haar sample `i` is drawn from seed `seed + i`, so the histogram does not
/// depend on thread count.
pub fn rank_census(d_a: usize, d_e: usize, n: usize, seed: u64, tol: f64, structured: bool) -> Result<RankHistogram> {
    if n == 0 && !structured {
        return Err(Error::Dimension("census needs at least one sample".into()));
    }
    if d_a == 0 || d_e == 0 {
        return Err(Error::ZeroDimension(format!("d_a = {d_a}, d_e = {d_e}")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::BadTolerance(tol));
    }
    let dim = d_a * d_e;
    let mut svals: Vec<Vec<f64>> = (0..n as u64)
        .into_par_iter()
        .map(|i| cross_singular_values(&haar_unitary(dim, seed.wrapping_add(i)), d_a, d_e))
        .collect::<Result<_>>()?;
    let family = if structured { structured_family(d_a, d_e) } else { Vec::new() };
    for (_, u) in &family {
        svals.push(cross_singular_values(u, d_a, d_e)?);
    }
    let mut counts = BTreeMap::new();
    let mut gap_violations = 0;
    for s in &svals {
        *counts.entry(linalg::numerical_rank(s, tol)).or_insert(0) += 1;
        if d_a == 2 && d_e == 2 && gap_violation(s) {
            gap_violations += 1;
        }
    }
    Ok(RankHistogram {
        config: CensusConfig { d_a, d_e, n, seed, tol, structured: family.len() },
        counts,
        gap_violations,
    })
}

/// Channel on `H_a` from a unitary coupling to an environment `H_e` that is
/// half of the purification `|phi>` on `H_e (x) H_g`. The output of `H_e` is
/// `H_c`, and `(c, g)` together form the environment of the channel.
#[derive(Debug, Clone)]
pub struct MixedEnvChannel {
    u: Tensor,
    phi: BipartiteKet,
    channel: Channel,
}

impl MixedEnvChannel {
    /// `U` with legs `(b+, c+, a-, e-)`.
    pub fn unitary(&self) -> &Tensor {
        &self.u
    }

    pub fn phi(&self) -> &BipartiteKet {
        &self.phi
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    /// Schmidt rank of `|phi>`.
    pub fn sigma(&self, tol: f64) -> Result<usize> {
        Ok(schmidt(&self.phi, tol)?.rank)
    }
}

/// `V_{ba;cg} = sum_e U_{ba;ce} phi_{eg}`, with `(c, g)` fused into one
/// environment space `f`.
pub fn mixed_env_channel(u: &CMatrix, d_a: usize, phi: &BipartiteKet) -> Result<MixedEnvChannel> {
    let d_e = phi.space_a().dim();
    if phi.space_b().dim() != d_e {
        return Err(Error::Dimension(format!("purifying space has dimension {}, expected {d_e}", phi.space_b().dim())));
    }
    let ut = unitary_tensor(u, d_a, d_e)?;
    let dev = linalg::unitarity_deviation(u);
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let n = phi.norm_sqr().sqrt();
    if (n - 1.0).abs() > UNITARY_TOL {
        return Err(Error::NotNormalized(n));
    }
    // U's e- must meet phi's first leg; relabel phi onto U's environment space
    let e = ut.legs()[3].space.clone();
    let phi_t = phi.tensor().relabel(vec![Leg::open(&e), phi.tensor().legs()[1].clone()])?;
    // (b+, c+, a-, g+) -> (b+, c+, g+, a-)
    let v = ut.contract(&phi_t, &[(3, 0)])?.permute(&[0, 1, 3, 2])?;
    let f = Space::new("f", d_e * d_e)?;
    let v = Isometry::new(v.fuse(1, 2, &f)?.with_name("V"))?;
    Ok(MixedEnvChannel { u: ut, phi: phi.clone(), channel: Channel::new(v)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KrausBound {
    /// Kraus rank of the channel.
    pub kappa: usize,
    pub cross_rank: usize,
    /// Schmidt rank of `|phi>`.
    pub sigma: usize,
    /// `min(cross_rank, d_e * sigma)`.
    pub bound: usize,
    pub holds: bool,
}

pub fn kraus_bound_check(ch: &MixedEnvChannel, tol: f64) -> Result<KrausBound> {
    let kappa = kraus_rank(&ch.channel, tol)?;
    let cross = ch.u.rank(&[0, 2], &[1, 3], tol)?;
    let sigma = ch.sigma(tol)?;
    let d_e = ch.u.legs()[1].dim();
    let bound = cross.min(d_e * sigma);
    Ok(KrausBound { kappa, cross_rank: cross, sigma, bound, holds: kappa <= bound })
}
