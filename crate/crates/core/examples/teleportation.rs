//! Standard teleportation with the generalized Bell basis, and dense coding
//! as the same diagram with the loop closed.

use atemporal::duality::BipartiteKet;
use atemporal::protocols::{dense_coding_probs, run_teleport, teleport_operator, TeleportSetup};
use atemporal::sampling::{random_state, rng_from_seed};
use atemporal::{Space, Tensor};

fn main() -> atemporal::Result<()> {
    for d in [2, 3] {
        let a = Space::new("a", d)?;
        let b = Space::new("b", d)?;
        let cs = Space::new("c", d)?;
        let psi = BipartiteKet::from_schmidt_coefficients(&a, &b, &vec![1.0 / (d as f64).sqrt(); d])?;
        let setup = TeleportSetup::standard(psi, cs.clone())?;

        let m1 = teleport_operator(&setup, 1)?;
        println!("d = {d}: M_1 = {:.3}", m1.as_operator()?);

        let mut rng = rng_from_seed(7);
        let input = Tensor::ket("c", &cs, random_state(&mut rng, d))?;
        let out = run_teleport(&setup, &input)?;
        println!("  q = {:.4?}", out.q);
        println!("  worst fidelity {:.12}", out.min_fidelity());

        let p = dense_coding_probs(setup.resource(), setup.corrections(), setup.meas_basis())?;
        let off: f64 = p
            .iter()
            .enumerate()
            .flat_map(|(k, row)| row.iter().enumerate().filter(move |(j, _)| *j != k).map(|(_, v)| *v))
            .sum();
        println!("  dense coding: {} messages, total off-diagonal probability {off:.1e}", p.len());
    }
    Ok(())
}
