//! Map-state duality on a partially entangled ket: Schmidt form, the map it
//! encodes, its inverse, and moving an operator from one side to the other.

use atemporal::duality::{
    interchange_exact, interchange_unitary, invert_ket, ket_to_map, map_to_ket, schmidt, Basis, BipartiteKet,
};
use atemporal::linalg::{gates, max_abs_diff};
use atemporal::{Space, Tensor};

fn main() -> atemporal::Result<()> {
    let a = Space::new("a", 2)?;
    let b = Space::new("b", 2)?;
    let psi = BipartiteKet::from_schmidt_coefficients(&a, &b, &[0.8f64.sqrt(), 0.2f64.sqrt()])?;

    let sd = schmidt(&psi, 1e-8)?;
    println!("Schmidt coefficients {:?}, rank {}", sd.coefficients, sd.rank);

    let basis = Basis::standard(&a);
    let m = ket_to_map(&psi, &basis)?;
    println!("as a map H_a -> H_b: [{}]", m.leg_summary());
    let back = map_to_ket(&m, &basis)?;
    println!("round trip error {:.1e}", back.tensor().max_abs_diff(psi.tensor())?);

    // Psi^-1 closes against Psi to the identity on either factor
    let inv = invert_ket(psi.tensor(), 1e-8)?;
    let id_a = inv.contract(psi.tensor(), &[(1, 1)])?.matricize(&[0], &[1])?;
    println!("Psi^-1 Psi over b = {:.3}", id_a.map(|z| z.re));

    // (A x I)|Psi> = (I x B)|Psi>
    let x = Tensor::operator("X", &a, &a, &gates::pauli_x())?;
    let bop = interchange_exact(&x, &psi, 1e-8)?;
    println!("B for A = X: {:.3}", bop.as_operator()?.map(|z| z.re));

    // the unitary version keeps B's spectrum equal to A's
    let h = Tensor::operator("H", &a, &a, &gates::hadamard())?;
    let ui = interchange_unitary(&h, &psi)?;
    let lhs = h.contract(psi.tensor(), &[(1, 0)])?;
    let rhs = ui.u.contract(&ui.v.contract(&ui.b.contract(psi.tensor(), &[(1, 1)])?, &[(1, 0)])?, &[(1, 1)])?;
    println!(
        "unitary interchange residual {:.1e}",
        max_abs_diff(&lhs.matricize(&[0], &[1])?, &rhs.matricize(&[0], &[1])?)
    );
    Ok(())
}
