use crate::duality::{schmidt, BipartiteKet, SchmidtDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::tensor::{matrix_positivity, Leg, Space, Tensor};

use super::teleport::{check_meas_basis, m_operator};
use super::{bell_basis, check_ket_on, check_two_open, fidelity, operator_on, ProtocolOutcome};

const INVARIANT_TOL: f64 = 1e-10;

/// Procrustean concentration on Alice's side.
#[derive(Debug, Clone)]
pub struct Concentration {
    /// `K = sum_j (lambda_m / lambda_j) |abar_j><abar_j|`, legs `(a+, a-)`.
    pub k: Tensor,
    /// `<Psi|K^dagger K|Psi> = d lambda_m^2` for the normalized resource.
    pub p_c: f64,
}

struct Resource {
    psi: BipartiteKet,
    sd: SchmidtDecomposition,
    d: usize,
}

impl Resource {
    fn new(psi: &BipartiteKet, tol: f64) -> Result<Self> {
        let psi = psi.normalized()?;
        let (da, db) = (psi.space_a().dim(), psi.space_b().dim());
        if da != db {
            return Err(Error::Dimension(format!("resource needs d_a = d_b, got {da} and {db}")));
        }
        let sd = schmidt(&psi, tol)?;
        if sd.rank < da {
            return Err(Error::NotInvertible { rank: sd.rank, dim: da });
        }
        Ok(Self { psi, sd, d: da })
    }

    fn lambda_m(&self) -> f64 {
        self.sd.min_coefficient()
    }

    /// `sum_j w_j |v_j><v_j|` over the Schmidt vectors on one side, with
    /// `w_j = (lambda_m / lambda_j)^power`.
    fn filter(&self, vectors: &CMatrix, power: f64) -> CMatrix {
        let lm = self.lambda_m();
        let w: Vec<f64> = self.sd.coefficients.iter().map(|l| (lm / l).powf(power)).collect();
        vectors * crate::duality::complex_diag(&w) * vectors.adjoint()
    }

    /// `sum_j |abar_j>|bbar_j>`, fully entangled with squared norm `d`.
    fn target(&self) -> Result<BipartiteKet> {
        let mu = &self.sd.left * self.sd.right.transpose();
        BipartiteKet::from_coefficients(self.psi.space_a(), self.psi.space_b(), &mu)
    }

    /// `U_j = <Phi_j|target>^dagger` as operators on `H_b`.
    fn corrections(&self, meas_basis: &[Tensor]) -> Result<Vec<CMatrix>> {
        let target = self.target()?;
        meas_basis.iter().map(|phi| Ok(m_operator(&target, phi)?.as_operator()?.adjoint())).collect()
    }
}

pub fn concentration_operator(psi: &BipartiteKet, tol: f64) -> Result<Concentration> {
    let r = Resource::new(psi, tol)?;
    let a = r.psi.space_a().clone();
    let k = Tensor::operator("K", &a, &a, &r.filter(&r.sd.left, 1.0))?;
    let lm = r.lambda_m();
    Ok(Concentration { k, p_c: r.d as f64 * lm * lm })
}

/// A heralded teleportation protocol: Alice's conclusive POVM elements
/// `G_j = |Gamma_j><Gamma_j|` on `H_c (x) H_a` and Bob's corrections `L_j`.
/// The remainder `G_0 = I - sum_j G_j` is the inconclusive outcome.
#[derive(Debug, Clone)]
pub struct UnambiguousProtocol {
    resource: BipartiteKet,
    space_c: Space,
    povm: Vec<Tensor>,
    corrections: Vec<Tensor>,
}

impl UnambiguousProtocol {
    /// Checks `G_0 >= 0` and that no `L_j` has a singular value above 1. The
    /// resource is normalized.
    pub fn new(resource: BipartiteKet, space_c: Space, povm: Vec<Tensor>, corrections: Vec<Tensor>) -> Result<Self> {
        let resource = resource.normalized()?;
        let (a, b) = (resource.space_a().clone(), resource.space_b().clone());
        let d = space_c.dim();
        if a.dim() != d || b.dim() != d {
            return Err(Error::Dimension(format!("protocol needs d_a = d_b = d_c, got {}, {}, {d}", a.dim(), b.dim())));
        }
        if povm.len() != corrections.len() {
            return Err(Error::Dimension(format!("{} POVM elements but {} corrections", povm.len(), corrections.len())));
        }
        for g in &povm {
            check_two_open(g, &space_c, &a)?;
        }
        for (j, l) in corrections.iter().enumerate() {
            let s = linalg::singular_values(&operator_on(l, &b)?);
            if s[0] > 1.0 + INVARIANT_TOL {
                return Err(Error::Unrealizable(format!("correction {j} has singular value {} > 1", s[0])));
            }
        }
        let p = Self { resource, space_c, povm, corrections };
        let min = matrix_positivity(&p.g0()?, INVARIANT_TOL)?.min_eigenvalue;
        if min < -INVARIANT_TOL {
            return Err(Error::Unrealizable(format!("inconclusive element has eigenvalue {min}")));
        }
        Ok(p)
    }

    pub fn resource(&self) -> &BipartiteKet {
        &self.resource
    }

    pub fn space_c(&self) -> &Space {
        &self.space_c
    }

    /// The kets `Gamma_j`, legs `(c+, a+)`.
    pub fn povm(&self) -> &[Tensor] {
        &self.povm
    }

    pub fn corrections(&self) -> &[Tensor] {
        &self.corrections
    }

    /// Same POVM with new corrections, rechecked.
    pub fn with_corrections(&self, corrections: Vec<Tensor>) -> Result<Self> {
        Self::new(self.resource.clone(), self.space_c.clone(), self.povm.clone(), corrections)
    }

    /// `G_0 = I - sum_j |Gamma_j><Gamma_j|` as a matrix on `(c a)`.
    pub fn g0(&self) -> Result<CMatrix> {
        let n = self.space_c.dim() * self.resource.space_a().dim();
        let mut g = CMatrix::identity(n, n);
        for gamma in &self.povm {
            let v = gamma.matricize(&[0, 1], &[])?;
            g -= &v * v.adjoint();
        }
        Ok(g)
    }

    /// Smallest eigenvalue of `d I_a - sum_j Tr_c G_j`; nonnegative for any
    /// valid POVM.
    pub fn trace_slack(&self) -> Result<f64> {
        let d = self.space_c.dim();
        let mut m = CMatrix::identity(d, d).scale(d as f64);
        for gamma in &self.povm {
            let g = gamma.matricize(&[0], &[1])?;
            // (Tr_c G)[a1, a2] = sum_c Gamma[c, a1] conj Gamma[c, a2]
            m -= g.transpose() * g.conjugate();
        }
        Ok(matrix_positivity(&m, INVARIANT_TOL)?.min_eigenvalue)
    }
}

fn protocol(r: &Resource, space_c: &Space, povm: Vec<CMatrix>, corrections: Vec<CMatrix>) -> Result<UnambiguousProtocol> {
    let (a, b) = (r.psi.space_a(), r.psi.space_b());
    let povm = povm
        .iter()
        .enumerate()
        .map(|(j, g)| Tensor::from_matrix(format!("Gamma{}", j + 1), vec![Leg::open(space_c)], vec![Leg::open(a)], g))
        .collect::<Result<Vec<_>>>()?;
    let corrections = corrections
        .iter()
        .enumerate()
        .map(|(j, l)| Tensor::operator(format!("L{}", j + 1), b, b, l))
        .collect::<Result<Vec<_>>>()?;
    UnambiguousProtocol::new(r.psi.clone(), space_c.clone(), povm, corrections)
}

/// `Gamma_j = (I (x) F^dagger) Phi_j / sqrt(d)` for a filter `F` on `H_a`.
fn filtered_povm(meas_basis: &[Tensor], f: &CMatrix, d: usize) -> Result<Vec<CMatrix>> {
    let scale = c(1.0 / (d as f64).sqrt(), 0.0);
    // coefficient matrix P[c, a]; (I (x) F^dag) acts as P -> P conj(F)
    meas_basis.iter().map(|phi| Ok(phi.matricize(&[0], &[1])? * f.conjugate() * scale)).collect()
}

fn meas_space(meas_basis: &[Tensor], r: &Resource) -> Result<Space> {
    let first = meas_basis.first().ok_or_else(|| Error::Dimension("empty measurement basis".into()))?;
    let cs = first.legs()[0].space.clone();
    check_meas_basis(meas_basis, &cs, r.psi.space_a())?;
    Ok(cs)
}

/// Alice folds the concentration `K` into her measurement; Bob applies
/// unitary corrections.
pub fn build_povm_alice_concentrates(psi: &BipartiteKet, meas_basis: &[Tensor]) -> Result<UnambiguousProtocol> {
    let r = Resource::new(psi, crate::tensor::DEFAULT_RANK_TOL)?;
    let cs = meas_space(meas_basis, &r)?;
    let k = r.filter(&r.sd.left, 1.0);
    let povm = filtered_povm(meas_basis, &k, r.d)?;
    protocol(&r, &cs, povm, r.corrections(meas_basis)?)
}

/// Alice measures projectively; Bob applies `L_j = U_j L` with `L` the
/// concentration filter on `H_b`.
pub fn build_bob_corrects(psi: &BipartiteKet, meas_basis: &[Tensor]) -> Result<UnambiguousProtocol> {
    let r = Resource::new(psi, crate::tensor::DEFAULT_RANK_TOL)?;
    let cs = meas_space(meas_basis, &r)?;
    let id = CMatrix::identity(r.d, r.d);
    let povm = filtered_povm(meas_basis, &id, r.d)?;
    let l = r.filter(&r.sd.right, 1.0);
    let corrections = r.corrections(meas_basis)?.into_iter().map(|u| u * &l).collect();
    protocol(&r, &cs, povm, corrections)
}

/// Each side applies the square root of its filter, on the generalized Bell
/// basis. The input space is named `c`.
pub fn build_split_concentration(psi: &BipartiteKet) -> Result<UnambiguousProtocol> {
    let r = Resource::new(psi, crate::tensor::DEFAULT_RANK_TOL)?;
    let cs = Space::new("c", r.d)?;
    let meas_basis = bell_basis(&cs, r.psi.space_a())?;
    let k = r.filter(&r.sd.left, 0.5);
    let l = r.filter(&r.sd.right, 0.5);
    let povm = filtered_povm(&meas_basis, &k, r.d)?;
    let corrections = r.corrections(&meas_basis)?.into_iter().map(|u| u * &l).collect();
    protocol(&r, &cs, povm, corrections)
}

/// `p_j = ||L_j <Gamma_j|Omega>||^2` with `|Omega> = |c> (x) |Psi>`; `q_j` is
/// Alice's outcome probability and `r_j = p_j / q_j` (0 if `q_j = 0`).
pub fn run_unambiguous(protocol: &UnambiguousProtocol, c_ket: &Tensor) -> Result<ProtocolOutcome> {
    check_ket_on(c_ket, &protocol.space_c)?;
    let n = c_ket.norm();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(n));
    }
    let omega = c_ket.outer(protocol.resource.tensor());
    let mut out = ProtocolOutcome { q: vec![], q0: 0.0, r: vec![], p: vec![], p_s: 0.0, fidelity: vec![] };
    for (gamma, l) in protocol.povm.iter().zip(&protocol.corrections) {
        let branch = gamma.adjoint().contract(&omega, &[(0, 0), (1, 1)])?;
        let q = branch.norm_sqr();
        let corrected = l.contract(&branch, &[(1, 0)])?;
        let p = corrected.norm_sqr();
        out.q.push(q);
        out.r.push(if q > 0.0 { (p / q).min(1.0) } else { 0.0 });
        out.p.push(p);
        out.fidelity.push(fidelity(c_ket, corrected.data()));
    }
    out.p_s = out.p.iter().sum();
    let omega_v = omega.matricize(&[0, 1, 2], &[])?;
    let b = protocol.resource.space_b().dim();
    let g0 = linalg::kron(&protocol.g0()?, &CMatrix::identity(b, b));
    out.q0 = (omega_v.adjoint() * g0 * &omega_v)[(0, 0)].re;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use crate::sampling::{haar_unitary_with, random_state, rng_from_seed};

    fn resource(lam2: &[f64]) -> BipartiteKet {
        let d = lam2.len();
        let a = Space::new("a", d).unwrap();
        let b = Space::new("b", d).unwrap();
        let lam: Vec<f64> = lam2.iter().map(|x| x.sqrt()).collect();
        BipartiteKet::from_schmidt_coefficients(&a, &b, &lam).unwrap()
    }

    /// Same Schmidt coefficients in random local bases.
    fn rotated(lam2: &[f64], seed: u64) -> BipartiteKet {
        let mut rng = rng_from_seed(seed);
        let d = lam2.len();
        let (ua, ub) = (haar_unitary_with(&mut rng, d), haar_unitary_with(&mut rng, d));
        crate::duality::apply_local(&resource(lam2), &ua, &ub).unwrap()
    }

    fn bell(d: usize) -> (Space, Vec<Tensor>) {
        let cs = Space::new("c", d).unwrap();
        let basis = bell_basis(&cs, &Space::new("a", d).unwrap()).unwrap();
        (cs, basis)
    }

    fn variants(psi: &BipartiteKet) -> Vec<UnambiguousProtocol> {
        let (_, basis) = bell(psi.space_a().dim());
        vec![
            build_povm_alice_concentrates(psi, &basis).unwrap(),
            build_bob_corrects(psi, &basis).unwrap(),
            build_split_concentration(psi).unwrap(),
        ]
    }

    fn inputs(cs: &Space, n: usize, seed: u64) -> Vec<Tensor> {
        let mut rng = rng_from_seed(seed);
        (0..n).map(|_| Tensor::ket("c", cs, random_state(&mut rng, cs.dim())).unwrap()).collect()
    }

    #[test]
    fn concentration_values() {
        let conc = concentration_operator(&resource(&[0.8, 0.2]), 1e-8).unwrap();
        assert!((conc.p_c - 0.4).abs() < 1e-12);
        let conc = concentration_operator(&resource(&[0.5, 0.3, 0.2]), 1e-8).unwrap();
        assert!((conc.p_c - 0.6).abs() < 1e-12);
        let conc = concentration_operator(&resource(&[0.25; 4]), 1e-8).unwrap();
        assert!((conc.p_c - 1.0).abs() < 1e-12);
        assert!(linalg::max_abs_diff(&conc.k.as_operator().unwrap(), &CMatrix::identity(4, 4)) < 1e-12);
    }

    #[test]
    fn concentration_produces_full_entanglement() {
        let psi = rotated(&[0.6, 0.3, 0.1], 3);
        let conc = concentration_operator(&psi, 1e-8).unwrap();
        let kk = conc.k.as_operator().unwrap();
        let s = linalg::singular_values(&kk);
        assert!((s[0] - 1.0).abs() < 1e-12);
        let out = crate::duality::apply_local(&psi, &kk, &CMatrix::identity(3, 3)).unwrap();
        let sd = schmidt(&out, 1e-8).unwrap();
        let mu = (3.0f64).sqrt() * 0.1f64.sqrt();
        for l in &sd.coefficients {
            assert!((l - mu / 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_resource_is_rejected() {
        let psi = resource(&[1.0, 0.0]);
        assert!(matches!(concentration_operator(&psi, 1e-8), Err(Error::NotInvertible { rank: 1, dim: 2 })));
        assert!(build_split_concentration(&psi).is_err());
    }

    #[test]
    fn optimal_variants_reach_the_bound() {
        for (lam2, ps) in [(vec![0.8, 0.2], 0.4), (vec![0.5, 0.3, 0.2], 0.6)] {
            let d = lam2.len();
            let lm2 = lam2.iter().copied().fold(1.0, f64::min);
            let psi = rotated(&lam2, 9);
            for proto in variants(&psi) {
                assert!(proto.trace_slack().unwrap() > -1e-9);
                for c_ket in inputs(proto.space_c(), 5, 2) {
                    let out = run_unambiguous(&proto, &c_ket).unwrap();
                    assert!((out.p_s - ps).abs() < 1e-9, "p_s = {}", out.p_s);
                    for (p, f) in out.p.iter().zip(&out.fidelity) {
                        assert!((p - lm2 / d as f64).abs() < 1e-9);
                        assert!((f.unwrap() - 1.0).abs() < 1e-10);
                    }
                    let total: f64 = out.q.iter().sum::<f64>() + out.q0;
                    assert!((total - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn bob_side_q_depends_on_input() {
        let psi = resource(&[0.8, 0.2]);
        let (cs, basis) = bell(2);
        let proto = build_bob_corrects(&psi, &basis).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let zero = Tensor::ket("c", &cs, vec![ONE, ZERO]).unwrap();
        let plus = Tensor::ket("c", &cs, vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let o1 = run_unambiguous(&proto, &zero).unwrap();
        let o2 = run_unambiguous(&proto, &plus).unwrap();
        let dq = o1.q.iter().zip(&o2.q).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(dq > 1e-3);
        for (x, y) in o1.p.iter().zip(&o2.p) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn fully_entangled_reduces_to_teleportation() {
        let psi = resource(&[0.5, 0.5]);
        let (cs, basis) = bell(2);
        let alice = build_povm_alice_concentrates(&psi, &basis).unwrap();
        assert!(linalg::max_abs(&alice.g0().unwrap()) < 1e-12);
        let bob = build_bob_corrects(&psi, &basis).unwrap();
        for l in bob.corrections() {
            assert!(linalg::unitarity_deviation(&l.as_operator().unwrap()) < 1e-12);
        }
        for c_ket in inputs(&cs, 3, 4) {
            let out = run_unambiguous(&bob, &c_ket).unwrap();
            assert!(out.r.iter().all(|r| (r - 1.0).abs() < 1e-12));
            assert!((out.p_s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_corrections_scale_quadratically() {
        let psi = resource(&[0.8, 0.2]);
        let (cs, basis) = bell(2);
        let proto = build_bob_corrects(&psi, &basis).unwrap();
        let half: Vec<Tensor> = proto.corrections().iter().map(|l| l.scale(c(0.5, 0.0))).collect();
        let weak = proto.with_corrections(half).unwrap();
        let c_ket = &inputs(&cs, 1, 8)[0];
        let out = run_unambiguous(&weak, c_ket).unwrap();
        assert!((out.p_s - 0.25 * 0.4).abs() < 1e-12);
        // pushing a correction past norm 1 is refused
        let big: Vec<Tensor> = proto.corrections().iter().map(|l| l.scale(c(2.0, 0.0))).collect();
        assert!(matches!(proto.with_corrections(big), Err(Error::Unrealizable(_))));
    }

    #[test]
    fn inflated_povm_is_refused() {
        let psi = resource(&[0.8, 0.2]);
        let (_, basis) = bell(2);
        let proto = build_povm_alice_concentrates(&psi, &basis).unwrap();
        let povm: Vec<Tensor> = proto.povm().iter().map(|g| g.scale(c(1.1, 0.0))).collect();
        let res = UnambiguousProtocol::new(psi, proto.space_c().clone(), povm, proto.corrections().to_vec());
        assert!(matches!(res, Err(Error::Unrealizable(_))));
    }

    #[test]
    fn empty_protocol_never_succeeds() {
        let psi = resource(&[0.8, 0.2]);
        let cs = Space::new("c", 2).unwrap();
        let proto = UnambiguousProtocol::new(psi, cs.clone(), vec![], vec![]).unwrap();
        let out = run_unambiguous(&proto, &inputs(&cs, 1, 1)[0]).unwrap();
        assert_eq!(out.p_s, 0.0);
        assert!((out.q0 - 1.0).abs() < 1e-12);
    }
}
