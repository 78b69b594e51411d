//! Building diagrams by hand: an inner product, a partial trace, and the
//! same network contracted in two different orders.

use atemporal::linalg::{c, ONE, ZERO};
use atemporal::{Diagram, Edge, Leg, LegRef, Space, Tensor};

fn main() -> atemporal::Result<()> {
    let a = Space::new("a", 2)?;
    let b = Space::new("b", 2)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;

    // <+|0>: a ket and a bra joined along `a`
    let zero = Tensor::ket("zero", &a, vec![ONE, ZERO])?;
    let plus = Tensor::ket("plus", &a, vec![c(h, 0.0), c(h, 0.0)])?;
    let d = Diagram::new(vec![zero, plus.adjoint()], vec![Edge::new(LegRef::new(0, 0), LegRef::new(1, 0))])?;
    println!("<+|0> = {}", d.evaluate()?.scalar_value().unwrap());

    // rho_a = Tr_b |psi><psi| for psi = sqrt(0.8)|00> + sqrt(0.2)|11>
    let psi = Tensor::new(
        "psi",
        vec![Leg::open(&a), Leg::open(&b)],
        vec![c(0.8f64.sqrt(), 0.0), ZERO, ZERO, c(0.2f64.sqrt(), 0.0)],
    )?;
    let rho = psi.outer(&psi.adjoint()); // (a+, b+, a-, b-)
    let reduced = Diagram::new(vec![rho], vec![Edge::new(LegRef::new(0, 1), LegRef::new(0, 3))])?.evaluate()?;
    println!("rho_a legs [{}]", reduced.leg_summary());
    println!("rho_a = {:.3}", reduced.as_operator()?.map(|z| z.re));

    // a three-object loop: Tr(X Y Z) computed two ways
    let x = Tensor::operator("X", &a, &a, &atemporal::linalg::gates::pauli_x())?;
    let y = Tensor::operator("Y", &a, &a, &atemporal::linalg::gates::pauli_y())?;
    let z = Tensor::operator("Z", &a, &a, &atemporal::linalg::gates::pauli_z())?;
    let loop_ = Diagram::new(
        vec![x, y, z],
        vec![
            Edge::new(LegRef::new(1, 0), LegRef::new(0, 1)),
            Edge::new(LegRef::new(2, 0), LegRef::new(1, 1)),
            Edge::new(LegRef::new(0, 0), LegRef::new(2, 1)),
        ],
    )?;
    let forward = loop_.contract_all(&[0, 1, 2])?;
    let backward = loop_.contract_all(&[2, 1, 0])?;
    println!("Tr(XYZ) = {} = {}", forward.scalar_value().unwrap(), backward.scalar_value().unwrap());
    Ok(())
}
