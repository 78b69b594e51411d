//! Map-state duality.
//!
//! A bipartite ket `|Psi> = sum mu_jk |a_j>|b_k>` corresponds to the map
//! `sum mu_jk |b_k><a_j|` once a transposer `|A> = sum_j |a_j>|a_j>` fixes the
//! basis on `H_a`. The Schmidt form, the inverse of a fully ranked entangled
//! ket, and the interchange solvers all follow from that correspondence.

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, C64, ZERO};
use crate::tensor::{Leg, Polarity, Space, Tensor};

const ORTHONORMAL_TOL: f64 = 1e-10;

/// An orthonormal basis of a space, stored as the columns of a unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    space: Space,
    vectors: CMatrix,
}

impl Basis {
    pub fn new(space: &Space, vectors: CMatrix) -> Result<Self> {
        let d = space.dim();
        if vectors.shape() != (d, d) {
            return Err(Error::Dimension(format!("basis for {space} must be {d}x{d}")));
        }
        let dev = linalg::unitarity_deviation(&vectors);
        if dev > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self { space: space.clone(), vectors })
    }

    pub fn standard(space: &Space) -> Self {
        Self { space: space.clone(), vectors: CMatrix::identity(space.dim(), space.dim()) }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Basis vectors as columns.
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }
}

/// The transposer `|A> = sum_j |a_j> (x) |a_j>`: two open legs on the basis'
/// space, with `<A|A> = d`. No complex conjugation enters.
pub fn transposer(basis: &Basis) -> Tensor {
    let u = basis.vectors();
    let t = u * u.transpose();
    let s = basis.space();
    Tensor::from_matrix("A", vec![Leg::open(s)], vec![Leg::open(s)], &t).expect("transposer shape")
}

/// A ket with exactly two open legs, on `H_a` then `H_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteKet(Tensor);

impl BipartiteKet {
    pub fn new(t: Tensor) -> Result<Self> {
        if t.legs().len() != 2 || t.legs().iter().any(|l| l.polarity != Polarity::Open) {
            return Err(Error::Shape(format!("bipartite ket needs two open legs, got [{}]", t.leg_summary())));
        }
        Ok(Self(t))
    }

    /// `|Psi> = sum_jk mu[j,k] |j>_a |k>_b`.
    pub fn from_coefficients(a: &Space, b: &Space, mu: &CMatrix) -> Result<Self> {
        Self::new(Tensor::from_matrix("Psi", vec![Leg::open(a)], vec![Leg::open(b)], mu)?)
    }

    /// `sum_j lambda_j |j>|j>` in the standard bases.
    pub fn from_schmidt_coefficients(a: &Space, b: &Space, lambda: &[f64]) -> Result<Self> {
        let mu = CMatrix::from_fn(a.dim(), b.dim(), |r, col| if r == col && r < lambda.len() { c(lambda[r], 0.0) } else { ZERO });
        Self::from_coefficients(a, b, &mu)
    }

    pub fn tensor(&self) -> &Tensor {
        &self.0
    }

    pub fn into_tensor(self) -> Tensor {
        self.0
    }

    pub fn space_a(&self) -> &Space {
        &self.0.legs()[0].space
    }

    pub fn space_b(&self) -> &Space {
        &self.0.legs()[1].space
    }

    /// The coefficient matrix `mu`, rows on `H_a`.
    pub fn coefficients(&self) -> CMatrix {
        self.0.matricize(&[0], &[1]).expect("two legs")
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.0.norm();
        if n == 0.0 {
            return Err(Error::ZeroOperator);
        }
        Ok(Self(self.0.scale(c(1.0 / n, 0.0))))
    }
}

/// `M = <A|Psi>`, the map `H_a -> H_b` with legs `(b+, a-)`.
pub fn ket_to_map(psi: &BipartiteKet, basis: &Basis) -> Result<Tensor> {
    if psi.space_a() != basis.space() {
        return Err(Error::SpaceMismatch { left: psi.space_a().to_string(), right: basis.space().to_string() });
    }
    // A^dag has legs (a-, a-); join its second leg with psi's a+
    let m = transposer(basis).adjoint().contract(psi.tensor(), &[(1, 0)])?;
    Ok(m.permute(&[1, 0])?.with_name("M"))
}

/// Inverse of [`ket_to_map`]: `|Psi> = (A-leg joined to M's input)`.
pub fn map_to_ket(map: &Tensor, basis: &Basis) -> Result<BipartiteKet> {
    let legs = map.legs();
    if legs.len() != 2 || legs[0].polarity != Polarity::Open || legs[1].polarity != Polarity::Closed {
        return Err(Error::Shape(format!("map needs legs (out+, in-), got [{}]", map.leg_summary())));
    }
    if &legs[1].space != basis.space() {
        return Err(Error::SpaceMismatch { left: legs[1].space.to_string(), right: basis.space().to_string() });
    }
    let psi = transposer(basis).contract(map, &[(1, 1)])?;
    BipartiteKet::new(psi.with_name("Psi"))
}

/// Descending Schmidt coefficients with the matching orthonormal vectors:
/// `|Psi> = sum_j lambda_j |abar_j> |bbar_j>`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    /// Columns are `|abar_j>`.
    pub left: CMatrix,
    /// Columns are `|bbar_j>`.
    pub right: CMatrix,
    /// Number of coefficients above the tolerance (Schmidt rank).
    pub rank: usize,
    space_a: Space,
    space_b: Space,
}

impl SchmidtDecomposition {
    /// Smallest coefficient, `lambda_m`.
    pub fn min_coefficient(&self) -> f64 {
        self.coefficients.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn reconstruct(&self) -> BipartiteKet {
        let k = self.coefficients.len();
        let lam = CMatrix::from_fn(k, k, |r, col| if r == col { c(self.coefficients[r], 0.0) } else { ZERO });
        let mu = &self.left * lam * self.right.transpose();
        BipartiteKet::from_coefficients(&self.space_a, &self.space_b, &mu).expect("same shape")
    }
}

pub fn schmidt(psi: &BipartiteKet, tol: f64) -> Result<SchmidtDecomposition> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::BadTolerance(tol));
    }
    let svd = linalg::svd(&psi.coefficients());
    let rank = linalg::numerical_rank(&svd.s, tol);
    Ok(SchmidtDecomposition {
        coefficients: svd.s,
        left: svd.u,
        // mu = U S V^dag = sum s_j u_j (conj v_j)^T, so bbar_j = conj(v_j) = row j of V^dag
        right: svd.v_t.transpose(),
        rank,
        space_a: psi.space_a().clone(),
        space_b: psi.space_b().clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// `rho_a = Tr_b |Psi><Psi|` (or the `b` counterpart).
pub fn reduced_density(psi: &BipartiteKet, keep: Side) -> Result<Tensor> {
    let traced = match keep {
        Side::A => 1,
        Side::B => 0,
    };
    let rho = psi.tensor().contract(&psi.tensor().adjoint(), &[(traced, traced)])?;
    Ok(rho.with_name("rho"))
}

fn check_invertible(t: &Tensor, tol: f64) -> Result<(CMatrix, Polarity)> {
    let legs = t.legs();
    if legs.len() != 2 || legs[0].polarity != legs[1].polarity {
        return Err(Error::Shape(format!("expected two legs of equal polarity, got [{}]", t.leg_summary())));
    }
    let mu = t.matricize(&[0], &[1])?;
    let (da, db) = (legs[0].dim(), legs[1].dim());
    if da != db {
        return Err(Error::Dimension(format!("inverse needs d_a = d_b, got {da} and {db}")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::BadTolerance(tol));
    }
    let rank = linalg::rank(&mu, tol);
    if rank < da {
        return Err(Error::NotInvertible { rank, dim: da });
    }
    Ok((mu, legs[0].polarity))
}

/// Inverse of a fully ranked entangled ket: the bra `Psi^-1` with
/// `Psi^-1 Psi = I` on either factor. Computed from the coefficient matrix as
/// `(mu^T)^-1`. Also accepts a bra, returning the ket it inverts.
pub fn invert_ket(psi: &Tensor, tol: f64) -> Result<Tensor> {
    let (mu, pol) = check_invertible(psi, tol)?;
    let inv = mu.transpose().try_inverse().ok_or(Error::NotInvertible { rank: 0, dim: mu.nrows() })?;
    let legs: Vec<Leg> = psi.legs().iter().map(|l| Leg { space: l.space.clone(), polarity: pol.flip() }).collect();
    Tensor::from_matrix("Psi^-1", vec![legs[0].clone()], vec![legs[1].clone()], &inv)
}

/// The same inverse written in Schmidt form, `sum_j lambda_j^-1 <abar_j|<bbar_j|`.
pub fn invert_ket_schmidt(psi: &BipartiteKet, tol: f64) -> Result<Tensor> {
    check_invertible(psi.tensor(), tol)?;
    let s = schmidt(psi, tol)?;
    let k = s.coefficients.len();
    let inv_lam = CMatrix::from_fn(k, k, |r, col| if r == col { c(1.0 / s.coefficients[r], 0.0) } else { ZERO });
    let w = s.left.map(|z| z.conj()) * inv_lam * s.right.map(|z| z.conj()).transpose();
    Tensor::from_matrix("Psi^-1", vec![Leg::closed(psi.space_a())], vec![Leg::closed(psi.space_b())], &w)
}

fn check_operator_on(op: &Tensor, space: &Space) -> Result<CMatrix> {
    let legs = op.legs();
    if legs.len() != 2
        || legs[0] != Leg::open(space)
        || legs[1] != Leg::closed(space)
    {
        return Err(Error::Shape(format!("expected an operator ({0}+, {0}-), got [{1}]", space.label(), op.leg_summary())));
    }
    op.as_operator()
}

/// Solves `(I (x) B)|Psi> = (A (x) I)|Psi>` for `B` on `H_b` using
/// `B = <(Psi^-1)^dag| A |Psi>`. Requires an invertible `Psi`.
pub fn interchange_exact(a_op: &Tensor, psi: &BipartiteKet, tol: f64) -> Result<Tensor> {
    check_operator_on(a_op, psi.space_a())?;
    let inv = invert_ket(psi.tensor(), tol)?;
    // A|Psi>: legs (a+, b+)
    let a_psi = a_op.contract(psi.tensor(), &[(1, 0)])?;
    // join with Psi^-1 over a: legs (b+, b-)
    let b = a_psi.contract(&inv, &[(0, 0)])?;
    Ok(b.with_name("B"))
}

/// Solution of `(U (x) V)(I (x) B)|Psi> = (A (x) I)|Psi>` with `B = S A S^dag`.
#[derive(Debug, Clone)]
pub struct UnitaryInterchange {
    /// Operator on `H_b`.
    pub b: Tensor,
    /// Unitary on `H_a`.
    pub u: Tensor,
    /// Unitary on `H_b`.
    pub v: Tensor,
    /// `S = sum_j |bbar_j><abar_j|`, a unitary `H_a -> H_b`.
    pub s: Tensor,
}

/// Works for any Schmidt rank. `B` is `A` copied into the Schmidt basis of
/// `H_b`; `U`, `V` map the Schmidt bases of `(I (x) B)|Psi>` onto those of
/// `(A (x) I)|Psi>`.
pub fn interchange_unitary(a_op: &Tensor, psi: &BipartiteKet) -> Result<UnitaryInterchange> {
    let a = check_operator_on(a_op, psi.space_a())?;
    let (sa, sb) = (psi.space_a().clone(), psi.space_b().clone());
    let d = sa.dim();
    if sb.dim() != d {
        return Err(Error::Dimension(format!("interchange needs d_a = d_b, got {d} and {}", sb.dim())));
    }
    let sch = schmidt(psi, crate::tensor::DEFAULT_RANK_TOL)?;
    // full Schmidt bases: columns of unitaries on H_a and H_b
    let abar = sch.left.clone();
    let bbar = sch.right.clone();
    let s = &bbar * abar.adjoint();
    let a_in = abar.adjoint() * &a * &abar;
    let b = &bbar * &a_in * bbar.adjoint();

    // In the Schmidt bases Psi_A has coefficients A_in[j,k] lambda_k and
    // Psi_B the transpose; one SVD of the former serves both.
    let lam = CMatrix::from_fn(d, d, |r, col| if r == col { c(sch.coefficients[r], 0.0) } else { ZERO });
    let m_a = &a_in * lam;
    let dec = m_a.clone().svd(true, true);
    let mut w = dec.u.expect("U");
    let v_t = dec.v_t.expect("V^t");
    let phases = linalg::fix_column_phases(&mut w);
    let mut z_conj = v_t.transpose();
    for (col, ph) in phases.iter().enumerate() {
        for r in 0..d {
            z_conj[(r, col)] *= ph.conj();
        }
    }
    // Psi_A = sum_i s_i (abar W)_i (bbar Zc)_i, Psi_B = sum_i s_i (abar Zc)_i (bbar W)_i
    let alpha_a = &abar * &w;
    let alpha_b = &abar * &z_conj;
    let beta_a = &bbar * &z_conj;
    let beta_b = &bbar * &w;
    let u = alpha_a * alpha_b.adjoint();
    let v = beta_a * beta_b.adjoint();

    Ok(UnitaryInterchange {
        b: Tensor::operator("B", &sb, &sb, &b)?,
        u: Tensor::operator("U", &sa, &sa, &u)?,
        v: Tensor::operator("V", &sb, &sb, &v)?,
        s: Tensor::operator("S", &sb, &sa, &s)?,
    })
}

/// `(X (x) Y)|Psi>` for operators on the two factors.
pub fn apply_local(psi: &BipartiteKet, on_a: &CMatrix, on_b: &CMatrix) -> Result<BipartiteKet> {
    let mu = psi.coefficients();
    if on_a.shape() != (mu.nrows(), mu.nrows()) || on_b.shape() != (mu.ncols(), mu.ncols()) {
        return Err(Error::Dimension("local operators do not match the ket".into()));
    }
    BipartiteKet::from_coefficients(psi.space_a(), psi.space_b(), &(on_a * mu * on_b.transpose()))
}

pub(crate) fn complex_diag(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |r, col| if r == col { C64::new(values[r], 0.0) } else { ZERO })
}
