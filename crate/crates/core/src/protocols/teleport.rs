use crate::diagram::{Diagram, Edge, LegRef};
use crate::duality::BipartiteKet;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::tensor::{Leg, Space, Tensor};

use super::{bell_basis, check_ket_on, check_two_open, fidelity, operator_on, ProtocolOutcome};

const UNITARY_TOL: f64 = 1e-10;

/// Resource, Alice's measurement basis and Bob's corrections for a
/// teleportation run. Measurement kets have `<Phi_j|Phi_j> = d` and together
/// satisfy `sum_j |Phi_j><Phi_j| = d I`.
#[derive(Debug, Clone)]
pub struct TeleportSetup {
    resource: BipartiteKet,
    space_c: Space,
    meas_basis: Vec<Tensor>,
    corrections: Vec<Tensor>,
}

impl TeleportSetup {
    pub fn new(resource: BipartiteKet, space_c: Space, meas_basis: Vec<Tensor>, corrections: Vec<Tensor>) -> Result<Self> {
        let d = space_c.dim();
        let (a, b) = (resource.space_a().clone(), resource.space_b().clone());
        if a.dim() != d || b.dim() != d {
            return Err(Error::Dimension(format!("teleportation needs d_a = d_b = d_c, got {}, {}, {d}", a.dim(), b.dim())));
        }
        if corrections.len() != d * d {
            return Err(Error::Dimension(format!("expected {} corrections", d * d)));
        }
        check_meas_basis(&meas_basis, &space_c, &a)?;
        for u in &corrections {
            operator_on(u, &b)?;
        }
        Ok(Self { resource, space_c, meas_basis, corrections })
    }

    /// Generalized Bell measurement with the corrections `U_j = M_j^dagger`,
    /// where `M_j` is computed with the resource rescaled to `<Psi|Psi> = d`.
    pub fn standard(resource: BipartiteKet, space_c: Space) -> Result<Self> {
        let d = space_c.dim() as f64;
        let scaled = BipartiteKet::new(resource.normalized()?.tensor().scale(c(d.sqrt(), 0.0)))?;
        let basis = bell_basis(&space_c, resource.space_a())?;
        let corrections = basis
            .iter()
            .map(|phi| {
                let m = m_operator(&scaled, phi)?;
                Ok(m.adjoint().permute(&[1, 0])?.with_name("U"))
            })
            .collect::<Result<Vec<_>>>()?;
        // corrections map H_b -> H_c; relabel them as operators on H_b
        let b = resource.space_b().clone();
        let corrections = corrections
            .into_iter()
            .map(|u| u.relabel(vec![Leg::open(&b), Leg::closed(&b)]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(resource, space_c, basis, corrections)
    }

    pub fn resource(&self) -> &BipartiteKet {
        &self.resource
    }

    pub fn space_c(&self) -> &Space {
        &self.space_c
    }

    pub fn meas_basis(&self) -> &[Tensor] {
        &self.meas_basis
    }

    pub fn corrections(&self) -> &[Tensor] {
        &self.corrections
    }

    pub fn outcomes(&self) -> usize {
        self.meas_basis.len()
    }
}

/// `d^2` kets on `(c+, a+)` with `sum_j |Phi_j><Phi_j| = d I`.
pub(super) fn check_meas_basis(basis: &[Tensor], c_space: &Space, a: &Space) -> Result<()> {
    let d = c_space.dim();
    if basis.len() != d * d {
        return Err(Error::Dimension(format!("expected {} measurement kets, got {}", d * d, basis.len())));
    }
    let mut frame = CMatrix::zeros(d * d, d * d);
    for phi in basis {
        check_two_open(phi, c_space, a)?;
        let v = phi.matricize(&[0, 1], &[])?;
        frame += &v * v.adjoint();
    }
    let dev = linalg::max_abs_diff(&frame, &CMatrix::identity(d * d, d * d).scale(d as f64));
    if dev > 1e-10 * d as f64 {
        return Err(Error::NotOrthonormal(dev));
    }
    Ok(())
}

pub(super) fn m_operator(resource: &BipartiteKet, phi: &Tensor) -> Result<Tensor> {
    // Phi^dag (c-, a-) joined to Psi's a+: (c-, b+)
    let m = phi.adjoint().contract(resource.tensor(), &[(1, 0)])?;
    Ok(m.permute(&[1, 0])?.with_name("M"))
}

/// `M_j = <Phi_j|Psi>`, a map `H_c -> H_b` with legs `(b+, c-)`. Unitary when
/// both kets are fully entangled with squared norm `d`.
pub fn teleport_operator(setup: &TeleportSetup, j: usize) -> Result<Tensor> {
    let phi = setup.meas_basis.get(j).ok_or_else(|| Error::Dimension(format!("no outcome {j}")))?;
    m_operator(&setup.resource, phi).map(|m| m.with_name(format!("M{j}")))
}

/// Runs the protocol on a normalized input `|c>`. Alice's projectors are
/// `|Phi_j><Phi_j| / d`, the resource is normalized before use, and every
/// correction must be unitary.
pub fn run_teleport(setup: &TeleportSetup, c_ket: &Tensor) -> Result<ProtocolOutcome> {
    check_ket_on(c_ket, &setup.space_c)?;
    let n = c_ket.norm();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(n));
    }
    for u in &setup.corrections {
        let dev = linalg::unitarity_deviation(&u.as_operator()?);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
    }
    let d = setup.space_c.dim() as f64;
    let omega = c_ket.outer(setup.resource.normalized()?.tensor());
    let mut out = ProtocolOutcome { q: vec![], q0: 0.0, r: vec![], p: vec![], p_s: 0.0, fidelity: vec![] };
    for (phi, u) in setup.meas_basis.iter().zip(&setup.corrections) {
        let branch = phi.adjoint().scale(c(1.0 / d.sqrt(), 0.0)).contract(&omega, &[(0, 0), (1, 1)])?;
        let q = branch.norm_sqr();
        let corrected = u.contract(&branch, &[(1, 0)])?;
        out.q.push(q);
        out.r.push(1.0);
        out.p.push(q);
        out.fidelity.push(fidelity(c_ket, corrected.data()));
    }
    out.p_s = out.p.iter().sum();
    out.q0 = (1.0 - out.q.iter().sum::<f64>()).max(0.0);
    Ok(out)
}

/// Dense-coding statistics from the closed loop `<Phi_j| (I (x) U_k) |Psi>`,
/// with `H_b` fed back into `H_c`. The resource is rescaled to squared norm
/// `d`; row `k` holds `p(j|k) = |loop|^2 / d^2`.
pub fn dense_coding_probs(resource: &BipartiteKet, encodings: &[Tensor], meas_basis: &[Tensor]) -> Result<Vec<Vec<f64>>> {
    let (a, b) = (resource.space_a().clone(), resource.space_b().clone());
    let d = a.dim();
    let first = meas_basis.first().ok_or_else(|| Error::Dimension("empty measurement basis".into()))?;
    let cs = first.legs()[0].space.clone();
    let psi = resource.normalized()?.tensor().scale(c((d as f64).sqrt(), 0.0));
    let mut rows = Vec::with_capacity(encodings.len());
    for u in encodings {
        let u = operator_on(u, &b)?;
        let u = Tensor::from_matrix("U", vec![Leg::open(&cs)], vec![Leg::closed(&b)], &u)?;
        let mut row = Vec::with_capacity(meas_basis.len());
        for phi in meas_basis {
            check_two_open(phi, &cs, &a)?;
            let diagram = Diagram::new(
                vec![phi.adjoint(), psi.clone(), u.clone()],
                vec![
                    Edge::new(LegRef::new(1, 0), LegRef::new(0, 1)),
                    Edge::new(LegRef::new(1, 1), LegRef::new(2, 1)),
                    Edge::new(LegRef::new(2, 0), LegRef::new(0, 0)),
                ],
            )?;
            let loop_value = diagram.evaluate()?.scalar_value().expect("closed loop");
            row.push(loop_value.norm_sqr() / (d * d) as f64);
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gates, ONE, ZERO};
    use crate::sampling::{haar_unitary_with, random_state, rng_from_seed};

    fn spaces(d: usize) -> (Space, Space, Space) {
        (Space::new("a", d).unwrap(), Space::new("b", d).unwrap(), Space::new("c", d).unwrap())
    }

    fn bell_resource(d: usize, norm_sqr: f64) -> BipartiteKet {
        let (a, b, _) = spaces(d);
        let x = (norm_sqr / d as f64).sqrt();
        BipartiteKet::from_schmidt_coefficients(&a, &b, &vec![x; d]).unwrap()
    }

    #[test]
    fn bell_operators_are_paulis() {
        let (_, _, cs) = spaces(2);
        let setup = TeleportSetup::standard(bell_resource(2, 2.0), cs).unwrap();
        let paulis = [gates::identity(2), gates::pauli_x(), gates::pauli_y(), gates::pauli_z()];
        for j in 0..4 {
            let m = teleport_operator(&setup, j).unwrap().as_operator().unwrap();
            assert!(linalg::unitarity_deviation(&m) < 1e-12);
            // equal to some Pauli up to a phase: |Tr(P^dag M)| = 2
            let hit = paulis.iter().any(|p| ((p.adjoint() * &m).trace().norm() - 2.0).abs() < 1e-12);
            assert!(hit, "M_{j} is not a Pauli");
        }
        // Phi_0 equals the resource, so M_0 is the identity
        let m0 = teleport_operator(&setup, 0).unwrap().as_operator().unwrap();
        assert!(linalg::max_abs_diff(&m0, &gates::identity(2)) < 1e-15);
    }

    #[test]
    fn partial_resource_singular_values() {
        let (a, b, cs) = spaces(2);
        let lam = [0.8f64.sqrt(), 0.2f64.sqrt()];
        let scaled: Vec<f64> = lam.iter().map(|l| l * 2f64.sqrt()).collect();
        let psi = BipartiteKet::from_schmidt_coefficients(&a, &b, &scaled).unwrap();
        let setup = TeleportSetup::standard(psi, cs).unwrap();
        for j in 0..4 {
            let s = linalg::singular_values(&teleport_operator(&setup, j).unwrap().as_operator().unwrap());
            assert!((s[0] - scaled[0]).abs() < 1e-12 && (s[1] - scaled[1]).abs() < 1e-12);
        }
        let c0 = Tensor::ket("c", setup.space_c(), vec![ONE, ZERO]).unwrap();
        assert!(matches!(run_teleport(&setup, &c0), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn standard_teleportation_is_exact() {
        for d in [2, 3] {
            let (_, _, cs) = spaces(d);
            let setup = TeleportSetup::standard(bell_resource(d, 1.0), cs.clone()).unwrap();
            let mut rng = rng_from_seed(11 + d as u64);
            for _ in 0..5 {
                let c_ket = Tensor::ket("c", &cs, random_state(&mut rng, d)).unwrap();
                let out = run_teleport(&setup, &c_ket).unwrap();
                for (q, f) in out.q.iter().zip(&out.fidelity) {
                    assert!((q - 1.0 / (d * d) as f64).abs() < 1e-12);
                    assert!((f.unwrap() - 1.0).abs() < 1e-12);
                }
                assert!((out.p_s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wrong_corrections_lose_fidelity() {
        let (_, b, cs) = spaces(2);
        let std = TeleportSetup::standard(bell_resource(2, 2.0), cs.clone()).unwrap();
        let ids = vec![Tensor::identity(&b); 4];
        let setup = TeleportSetup::new(std.resource().clone(), cs.clone(), std.meas_basis().to_vec(), ids).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = Tensor::ket("c", &cs, vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let out = run_teleport(&setup, &plus).unwrap();
        assert!(out.min_fidelity() < 1.0 - 1e-3);
        // |0> on the outcome whose correction really is the identity
        let zero = Tensor::ket("c", &cs, vec![ONE, ZERO]).unwrap();
        let out = run_teleport(&setup, &zero).unwrap();
        assert!((out.fidelity[0].unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dense_coding_standard_choice_is_identity() {
        for d in [2, 3] {
            let (_, _, cs) = spaces(d);
            let setup = TeleportSetup::standard(bell_resource(d, 1.0), cs).unwrap();
            let p = dense_coding_probs(setup.resource(), setup.corrections(), setup.meas_basis()).unwrap();
            for (k, row) in p.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    let expected = if j == k { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dense_coding_loop_value() {
        // Psi = Phi_0 and U = I: the loop is Tr(I) = d, so |loop|^2 / d^2 = 1
        let (_, b, cs) = spaces(2);
        let setup = TeleportSetup::standard(bell_resource(2, 2.0), cs).unwrap();
        let p = dense_coding_probs(setup.resource(), &[Tensor::identity(&b)], setup.meas_basis()).unwrap();
        assert!((p[0][0] - 1.0).abs() < 1e-12);
        assert!(p[0][1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn dense_coding_rows_are_stochastic() {
        let (_, b, cs) = spaces(2);
        let setup = TeleportSetup::standard(bell_resource(2, 2.0), cs).unwrap();
        let mut rng = rng_from_seed(5);
        let enc: Vec<Tensor> = (0..4).map(|_| Tensor::operator("U", &b, &b, &haar_unitary_with(&mut rng, 2)).unwrap()).collect();
        let p = dense_coding_probs(setup.resource(), &enc, setup.meas_basis()).unwrap();
        for row in &p {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let ids = vec![Tensor::identity(&b); 3];
        let p = dense_coding_probs(setup.resource(), &ids, setup.meas_basis()).unwrap();
        assert_eq!(p[0], p[1]);
        assert_eq!(p[1], p[2]);
    }
}
