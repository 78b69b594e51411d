//! Unambiguous teleportation through sqrt(0.8)|00> + sqrt(0.2)|11>. The three
//! ways of placing the concentration filter all reach d * lambda_min^2, and
//! the filter itself can be realized as a heralded isometry.

use atemporal::duality::BipartiteKet;
use atemporal::protocols::{
    bell_basis, build_bob_corrects, build_povm_alice_concentrates, build_split_concentration, concentration_operator,
    realize_unambiguous, run_unambiguous,
};
use atemporal::linalg::{c, ONE, ZERO};
use atemporal::{Leg, Space, Tensor};

fn main() -> atemporal::Result<()> {
    let a = Space::new("a", 2)?;
    let b = Space::new("b", 2)?;
    let cs = Space::new("c", 2)?;
    let psi = BipartiteKet::from_schmidt_coefficients(&a, &b, &[0.8f64.sqrt(), 0.2f64.sqrt()])?;

    let conc = concentration_operator(&psi, 1e-8)?;
    println!("concentration succeeds with probability {:.3}", conc.p_c);

    let basis = bell_basis(&cs, &a)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let inputs = [
        Tensor::ket("c", &cs, vec![ONE, ZERO])?,
        Tensor::ket("c", &cs, vec![c(h, 0.0), c(h, 0.0)])?,
    ];
    let protocols = [
        ("Alice filters", build_povm_alice_concentrates(&psi, &basis)?),
        ("Bob filters", build_bob_corrects(&psi, &basis)?),
        ("split", build_split_concentration(&psi)?),
    ];
    for (name, proto) in &protocols {
        for input in &inputs {
            let out = run_unambiguous(proto, input)?;
            println!("{name:>13}: q = {:.3?}, p = {:.3?}, p_s = {:.6}", out.q, out.p, out.p_s);
        }
    }

    // heralded K: success leaves K|alpha> / ||K|alpha>||
    let k = conc.k.relabel(vec![Leg::open(&b), Leg::closed(&a)])?;
    let r = realize_unambiguous(&k, 1e-12)?;
    for alpha in &inputs {
        let alpha = alpha.relabel(vec![Leg::open(&a)])?;
        println!("Pr(success) = {:.3}", r.success_probability(&alpha)?);
    }
    Ok(())
}
