//! Amplitude damping in every representation: isometry, Kraus operators,
//! transition operator `Q`, dynamical operator `R`. Then the transpose map,
//! which is positive but not completely positive.

use atemporal::channels::{
    apply_kraus, apply_superop, dynamical_rank, is_completely_positive, kraus_from_transition, kraus_rank,
    transition_from_kraus, transition_from_map, Channel, Isometry,
};
use atemporal::linalg::{c, from_rows, ONE, ZERO};
use atemporal::{Space, Tensor};

fn main() -> atemporal::Result<()> {
    let a = Space::new("a", 2)?;
    let b = Space::new("b", 2)?;
    let gamma: f64 = 0.36;
    let k0 = from_rows(2, 2, &[ONE, ZERO, ZERO, c((1.0 - gamma).sqrt(), 0.0)]);
    let k1 = from_rows(2, 2, &[ZERO, c(gamma.sqrt(), 0.0), ZERO, ZERO]);

    let channel = Channel::new(Isometry::from_kraus(&b, &a, "f", &[k0, k1])?)?;
    println!("Kraus rank {} (rank of R: {})", kraus_rank(&channel, 1e-8)?, dynamical_rank(&channel, 1e-8)?);

    // |1><1| decays towards |0><0|
    let excited = Tensor::operator("rho", &a, &a, &from_rows(2, 2, &[ZERO, ZERO, ZERO, ONE]))?;
    let via_q = apply_superop(&channel, &excited)?;
    let via_kraus = apply_kraus(&channel, &excited)?;
    println!("output {:.2}", via_q.as_operator()?.map(|z| z.re));
    println!("Q and Kraus agree to {:.1e}", via_q.max_abs_diff(&via_kraus)?);

    let verdict = is_completely_positive(channel.transition(), 1e-8)?;
    println!("damping: CP = {}, min eigenvalue of R = {:.3}", verdict.positive, verdict.min_eigenvalue);

    // a fresh Kraus set read off Q reproduces Q
    let kraus = kraus_from_transition(channel.transition(), 1e-8)?;
    let q = transition_from_kraus(&kraus)?;
    println!("{} Kraus operators from Q, rebuilt Q error {:.1e}", kraus.len(), q.max_abs_diff(channel.transition())?);

    let transpose = transition_from_map(&a, &b, |m| m.transpose())?;
    let verdict = is_completely_positive(&transpose, 1e-8)?;
    println!("transpose: CP = {}, min eigenvalue of R = {:.3}", verdict.positive, verdict.min_eigenvalue);
    Ok(())
}
