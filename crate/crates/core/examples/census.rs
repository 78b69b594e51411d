//! Cross-operator ranks of two-qubit unitaries never equal 3, so a qubit
//! channel built from a qubit environment never has Kraus rank 3.

use atemporal::census::{cross_rank, haar_unitary, kraus_bound_check, mixed_env_channel, rank_census};
use atemporal::duality::BipartiteKet;
use atemporal::linalg::gates;
use atemporal::Space;

fn main() -> atemporal::Result<()> {
    println!("CNOT cross rank {}", cross_rank(&gates::cnot(), 2, 2, 1e-8)?);
    println!("SWAP cross rank {}", cross_rank(&gates::swap(2), 2, 2, 1e-8)?);

    let hist = rank_census(2, 2, 2000, 42, 1e-8, true)?;
    println!("{}", hist.to_json());

    // a Haar coupling with a mixed environment
    let e = Space::new("e", 2)?;
    let g = Space::new("g", 2)?;
    for (name, lam) in [("pure", [1.0, 0.0]), ("mixed", [0.9f64.sqrt(), 0.1f64.sqrt()])] {
        let phi = BipartiteKet::from_schmidt_coefficients(&e, &g, &lam)?;
        let ch = mixed_env_channel(&haar_unitary(4, 5), 2, &phi)?;
        let check = kraus_bound_check(&ch, 1e-8)?;
        println!("{name} environment: kappa = {}, bound = {}", check.kappa, check.bound);
    }
    Ok(())
}
