//! Teleportation, dense coding and their unambiguous variants.
//!
//! Spaces follow one convention everywhere: the resource `|Psi>` lives on
//! `H_a (x) H_b`, the state to teleport on `H_c`, Alice measures on
//! `H_c (x) H_a` and Bob corrects on `H_b`. All three spaces share the
//! dimension `d`, and the reference map `H_c -> H_b` is the identity
//! between standard bases.

mod realization;
mod teleport;
mod unambiguous;

pub use realization::{product_factor, realize_unambiguous, UnambiguousRealization};
pub use teleport::{dense_coding_probs, run_teleport, teleport_operator, TeleportSetup};
pub use unambiguous::{
    build_bob_corrects, build_povm_alice_concentrates, build_split_concentration, concentration_operator,
    run_unambiguous, Concentration, UnambiguousProtocol,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{gates, CMatrix, C64};
use crate::tensor::{Leg, Polarity, Space, Tensor};

/// Per-outcome statistics of a teleportation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolOutcome {
    /// Probability that Alice obtains conclusive outcome `j`.
    pub q: Vec<f64>,
    /// Probability of the inconclusive outcome (0 for projective protocols).
    pub q0: f64,
    /// Probability that Bob's correction succeeds given outcome `j`.
    pub r: Vec<f64>,
    /// `p_j = q_j r_j`.
    pub p: Vec<f64>,
    /// Total success probability `sum_j p_j`.
    pub p_s: f64,
    /// `|<c|out_j>|^2` for each successful branch, `None` if the branch never
    /// occurs.
    pub fidelity: Vec<Option<f64>>,
}

impl ProtocolOutcome {
    pub fn min_fidelity(&self) -> f64 {
        self.fidelity.iter().flatten().copied().fold(1.0, f64::min)
    }
}

/// Generalized Bell basis on `H_c (x) H_a`: `Phi_{mn} = (I (x) X^m Z^n) sum_j |jj>`
/// with shift `X` and clock `Z`, ordered `j = m d + n`. Each has norm
/// squared `d`; `Phi_00 = sum_j |jj>`.
pub fn bell_basis(c: &Space, a: &Space) -> Result<Vec<Tensor>> {
    let d = c.dim();
    if a.dim() != d {
        return Err(Error::Dimension(format!("Bell basis needs equal dimensions, got {d} and {}", a.dim())));
    }
    let (x, z) = (gates::shift(d), gates::clock(d));
    let mut out = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            let op = x.pow(m as u32) * z.pow(n as u32);
            // component [c = j, a = k] is op[k, j]
            let coeffs = op.transpose();
            out.push(Tensor::from_matrix(format!("Phi{m}{n}"), vec![Leg::open(c)], vec![Leg::open(a)], &coeffs)?);
        }
    }
    Ok(out)
}

pub(crate) fn check_ket_on(t: &Tensor, space: &Space) -> Result<()> {
    if t.legs() != [Leg::open(space)] {
        return Err(Error::Shape(format!("expected a ket on {space}, got [{}]", t.leg_summary())));
    }
    Ok(())
}

pub(crate) fn check_two_open(t: &Tensor, first: &Space, second: &Space) -> Result<()> {
    let l = t.legs();
    if l.len() != 2 || l[0] != Leg::open(first) || l[1] != Leg::open(second) {
        return Err(Error::Shape(format!("expected legs ({}+, {}+), got [{}]", first.label(), second.label(), t.leg_summary())));
    }
    Ok(())
}

pub(crate) fn operator_on(t: &Tensor, space: &Space) -> Result<CMatrix> {
    let l = t.legs();
    if l.len() != 2 || l[0] != Leg::open(space) || l[1].space != *space || l[1].polarity != Polarity::Closed {
        return Err(Error::Shape(format!("expected an operator on {space}, got [{}]", t.leg_summary())));
    }
    t.as_operator()
}

/// `|<c|out>|^2 / <out|out>` with `H_b` identified with `H_c`.
pub(crate) fn fidelity(c: &Tensor, out: &[C64]) -> Option<f64> {
    let norm: f64 = out.iter().map(|z| z.norm_sqr()).sum();
    if norm < 1e-300 {
        return None;
    }
    let overlap: C64 = c.data().iter().zip(out).map(|(x, y)| x.conj() * y).sum();
    Some(overlap.norm_sqr() / norm)
}
