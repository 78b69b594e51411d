//! Noisy channels built from an isometry `V: H_a -> H_b (x) H_f`.
//!
//! Leg conventions used throughout:
//!
//! | object            | legs                         |
//! |-------------------|------------------------------|
//! | isometry `V`      | `(b+, f+, a-)`               |
//! | Kraus operator    | `(b+, a-)`                   |
//! | channel ket       | `(a+, b+, f+)`               |
//! | transition `Q`    | `(a-, a+, b+, b-)`           |
//! | dynamical `R`     | `(a+, b+, a-, b-)`           |
//!
//! `Q` is read off the transition-operator diagram top row first: the closed
//! `a` and open `b` nodes of `V`, then the open `a` and closed `b` nodes of
//! `V^dagger`, reordered so the two `a` legs lead. `R` is the partial
//! transpose of `Q` on `H_a`, an operator on `H_ab` in the usual
//! (open | closed) reading.

use crate::duality::{transposer, Basis};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, ZERO};
use crate::tensor::{matrix_positivity, Leg, Polarity, Positivity, Space, Tensor};

const ISOMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Isometry(Tensor);

impl Isometry {
    /// Checks the `(b+, f+, a-)` signature and `V^dagger V = I_a`.
    pub fn new(v: Tensor) -> Result<Self> {
        let legs = v.legs();
        let ok = legs.len() == 3
            && legs[0].polarity == Polarity::Open
            && legs[1].polarity == Polarity::Open
            && legs[2].polarity == Polarity::Closed;
        if !ok {
            return Err(Error::Shape(format!("isometry needs legs (b+, f+, a-), got [{}]", v.leg_summary())));
        }
        let m = v.matricize(&[0, 1], &[2])?;
        let dev = linalg::isometry_deviation(&m);
        if dev > ISOMETRY_TOL {
            return Err(Error::NotIsometry(dev));
        }
        Ok(Self(v))
    }

    /// From the `(b f | a)` matrix.
    pub fn from_matrix(b: &Space, f: &Space, a: &Space, m: &CMatrix) -> Result<Self> {
        Self::new(Tensor::from_matrix("V", vec![Leg::open(b), Leg::open(f)], vec![Leg::closed(a)], m)?)
    }

    /// Stinespring dilation of a Kraus set: `V = sum_l K_l (x) |f_l>`.
    pub fn from_kraus(b: &Space, a: &Space, f_label: &str, kraus: &[CMatrix]) -> Result<Self> {
        let f = Space::new(f_label, kraus.len())?;
        let m = CMatrix::from_fn(b.dim() * f.dim(), a.dim(), |r, col| {
            let (bb, ff) = (r / f.dim(), r % f.dim());
            kraus[ff][(bb, col)]
        });
        Self::from_matrix(b, &f, a, &m)
    }

    pub fn tensor(&self) -> &Tensor {
        &self.0
    }

    pub fn space_b(&self) -> &Space {
        &self.0.legs()[0].space
    }

    pub fn space_f(&self) -> &Space {
        &self.0.legs()[1].space
    }

    pub fn space_a(&self) -> &Space {
        &self.0.legs()[2].space
    }

    /// `V` as a map `H_a -> H_b (x) H_f`.
    pub fn matrix(&self) -> CMatrix {
        self.0.matricize(&[0, 1], &[2]).expect("three legs")
    }
}

/// `V = T|e_0>` for a unitary `T` with legs `(b+, f+, a-, e-)` and a
/// normalized environment ket `|e_0>`.
pub fn isometry_from_unitary(t: &Tensor, e0: &Tensor) -> Result<Isometry> {
    let legs = t.legs();
    let ok = legs.len() == 4
        && legs[0].polarity == Polarity::Open
        && legs[1].polarity == Polarity::Open
        && legs[2].polarity == Polarity::Closed
        && legs[3].polarity == Polarity::Closed;
    if !ok {
        return Err(Error::Shape(format!("unitary needs legs (b+, f+, a-, e-), got [{}]", t.leg_summary())));
    }
    let dev = linalg::unitarity_deviation(&t.matricize(&[0, 1], &[2, 3])?);
    if dev > ISOMETRY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    if e0.legs().len() != 1 || e0.legs()[0].polarity != Polarity::Open {
        return Err(Error::Shape("environment state must be a single-leg ket".into()));
    }
    let n = e0.norm();
    if (n - 1.0).abs() > ISOMETRY_TOL {
        return Err(Error::NotNormalized(n));
    }
    Isometry::new(t.contract(e0, &[(3, 0)])?.with_name("V"))
}

/// The channel ket on `H_abf`: the transposer applied to the `a` node of `V`.
pub fn channel_ket(v: &Isometry, basis: &Basis) -> Result<Tensor> {
    if basis.space() != v.space_a() {
        return Err(Error::SpaceMismatch { left: basis.space().to_string(), right: v.space_a().to_string() });
    }
    // A (a+, a+) joined with V's a-: legs (a+, b+, f+)
    Ok(transposer(basis).contract(v.tensor(), &[(1, 2)])?.with_name("Psi"))
}

/// `K_l = <f_l|V`, one operator `(b+, a-)` per basis vector of `H_f`.
pub fn kraus_ops(v: &Isometry, f_basis: &Basis) -> Result<Vec<Tensor>> {
    if f_basis.space() != v.space_f() {
        return Err(Error::SpaceMismatch { left: f_basis.space().to_string(), right: v.space_f().to_string() });
    }
    let f = v.space_f();
    (0..f.dim())
        .map(|l| {
            let col = f_basis.vectors().column(l).iter().copied().collect();
            let bra = Tensor::ket(format!("f{l}"), f, col)?.adjoint();
            Ok(v.tensor().contract(&bra, &[(1, 0)])?.with_name(format!("K{l}")))
        })
        .collect()
}

const Q_ORDER: [usize; 4] = [1, 3, 0, 2];

/// `Q = Tr_f (V (x) V^dagger)`, by contracting the `f` line.
pub fn transition_operator(v: &Isometry) -> Result<Tensor> {
    // (b+, f+, a-) with (b-, f-, a+) over f: (b+, a-, b-, a+)
    let q = v.tensor().contract(&v.tensor().adjoint(), &[(1, 1)])?;
    Ok(q.permute(&Q_ORDER)?.with_name("Q"))
}

/// `Q = sum_l K_l (x) K_l^dagger`.
pub fn transition_from_kraus(kraus: &[Tensor]) -> Result<Tensor> {
    let first = kraus.first().ok_or_else(|| Error::Shape("empty Kraus set".into()))?;
    let mut acc: Option<Tensor> = None;
    for k in kraus {
        if k.legs() != first.legs() || k.legs().len() != 2 {
            return Err(Error::Shape("Kraus operators need matching (b+, a-) legs".into()));
        }
        let term = k.outer(&k.adjoint()).permute(&Q_ORDER)?;
        acc = Some(match acc {
            None => term,
            Some(t) => t.add(&term)?,
        });
    }
    Ok(acc.expect("nonempty").with_name("Q"))
}

fn check_transition_signature(q: &Tensor) -> Result<(Space, Space)> {
    let l = q.legs();
    let ok = l.len() == 4
        && l[0].polarity == Polarity::Closed
        && l[1].polarity == Polarity::Open
        && l[2].polarity == Polarity::Open
        && l[3].polarity == Polarity::Closed
        && l[0].space == l[1].space
        && l[2].space == l[3].space;
    if !ok {
        return Err(Error::Shape(format!("transition operator needs legs (a-, a+, b+, b-), got [{}]", q.leg_summary())));
    }
    Ok((l[0].space.clone(), l[2].space.clone()))
}

/// `R = A^dagger Q A`: the partial transpose of `Q` on `H_a` in `basis`.
pub fn dynamical_from_transition(q: &Tensor, basis: &Basis) -> Result<Tensor> {
    let (a, _) = check_transition_signature(q)?;
    if basis.space() != &a {
        return Err(Error::SpaceMismatch { left: basis.space().to_string(), right: a.to_string() });
    }
    let t = transposer(basis);
    // Q's a- meets A's open leg: (a+, a+, b+, b-)
    let step = t.contract(q, &[(1, 0)])?;
    // the second a+ meets A^dag's closed leg: (a-, a+, b+, b-)
    let r = t.adjoint().contract(&step, &[(1, 1)])?;
    Ok(r.permute(&[1, 2, 0, 3])?.with_name("R"))
}

/// A channel with its standard-basis Kraus set, `Q` and `R` computed once at
/// construction. Immutable afterwards.
#[derive(Debug, Clone)]
pub struct Channel {
    isometry: Isometry,
    kraus: Vec<Tensor>,
    transition: Tensor,
    dynamical: Tensor,
}

impl Channel {
    pub fn new(isometry: Isometry) -> Result<Self> {
        let kraus = kraus_ops(&isometry, &Basis::standard(isometry.space_f()))?;
        let transition = transition_operator(&isometry)?;
        let dynamical = dynamical_from_transition(&transition, &Basis::standard(isometry.space_a()))?;
        Ok(Self { isometry, kraus, transition, dynamical })
    }

    pub fn isometry(&self) -> &Isometry {
        &self.isometry
    }

    pub fn kraus(&self) -> &[Tensor] {
        &self.kraus
    }

    pub fn transition(&self) -> &Tensor {
        &self.transition
    }

    /// `R` in the standard basis of `H_a`.
    pub fn dynamical(&self) -> &Tensor {
        &self.dynamical
    }

    pub fn space_a(&self) -> &Space {
        self.isometry.space_a()
    }

    pub fn space_b(&self) -> &Space {
        self.isometry.space_b()
    }
}

fn check_operator(op: &Tensor, space: &Space) -> Result<()> {
    if op.legs() != [Leg::open(space), Leg::closed(space)] {
        return Err(Error::Dimension(format!("expected an operator on {space}, got [{}]", op.leg_summary())));
    }
    Ok(())
}

/// `V(A) = Tr_a[(A (x) I) Q]`.
pub fn apply_superop(channel: &Channel, a_op: &Tensor) -> Result<Tensor> {
    check_operator(a_op, channel.space_a())?;
    Ok(a_op.contract(channel.transition(), &[(0, 0), (1, 1)])?.with_name("V(A)"))
}

/// `V(A) = sum_l K_l A K_l^dagger`.
pub fn apply_kraus(channel: &Channel, a_op: &Tensor) -> Result<Tensor> {
    check_operator(a_op, channel.space_a())?;
    let a = a_op.as_operator()?;
    let db = channel.space_b().dim();
    let mut out = CMatrix::zeros(db, db);
    for k in channel.kraus() {
        let k = k.as_operator()?;
        out += &k * &a * k.adjoint();
    }
    Tensor::operator("V(A)", channel.space_b(), channel.space_b(), &out)
}

/// `(V (x) id_s)(P)` for an operator `P` on `H_a (x) H_s` with legs
/// `(a+, s+, a-, s-)`; the result has legs `(b+, s+, b-, s-)`.
pub fn apply_superop_extended(channel: &Channel, p: &Tensor) -> Result<Tensor> {
    let l = p.legs();
    if l.len() != 4 || l[0] != Leg::open(channel.space_a()) || l[2] != Leg::closed(channel.space_a()) || l[1] != l[3].flipped() || l[1].polarity != Polarity::Open {
        return Err(Error::Dimension(format!("expected an operator (a+, s+, a-, s-), got [{}]", p.leg_summary())));
    }
    let s = l[1].space.clone();
    let pm = p.matricize(&[0, 1], &[2, 3])?;
    let id_s = CMatrix::identity(s.dim(), s.dim());
    let b = channel.space_b();
    let mut out = CMatrix::zeros(b.dim() * s.dim(), b.dim() * s.dim());
    for k in channel.kraus() {
        let big = linalg::kron(&k.as_operator()?, &id_s);
        out += &big * &pm * big.adjoint();
    }
    Tensor::from_matrix("W(P)", vec![Leg::open(b), Leg::open(&s)], vec![Leg::closed(b), Leg::closed(&s)], &out)
}

/// `R = A^dagger Q A` in the chosen basis of `H_a`.
pub fn dynamical_operator(channel: &Channel, basis: &Basis) -> Result<Tensor> {
    dynamical_from_transition(channel.transition(), basis)
}

/// Kraus rank from the cross operator `V_{ba;f}`.
pub fn kraus_rank(channel: &Channel, tol: f64) -> Result<usize> {
    channel.isometry().tensor().rank(&[0, 2], &[1], tol)
}

/// Kraus rank as the ordinary rank of `R`.
pub fn dynamical_rank(channel: &Channel, tol: f64) -> Result<usize> {
    channel.dynamical().rank(&[0, 1], &[2, 3], tol)
}

/// Complete positivity of the superoperator generated by `Q`, decided by the
/// positivity of `R`. `Q` need not come from an isometry or preserve trace.
pub fn is_completely_positive(q: &Tensor, tol: f64) -> Result<Positivity> {
    let (a, _) = check_transition_signature(q)?;
    let r = dynamical_from_transition(q, &Basis::standard(&a))?;
    matrix_positivity(&r.matricize(&[0, 1], &[2, 3])?, tol)
}

/// Kraus operators `Y_l = sqrt(e_l) w_l` from the eigen-decomposition of
/// `R = sum_l e_l |w_l><w_l|`; for a CP `Q` these satisfy
/// `Q = sum_l Y_l (x) Y_l^dagger`. Eigenvalues at or below `tol` times the
/// largest are dropped.
pub fn kraus_from_transition(q: &Tensor, tol: f64) -> Result<Vec<Tensor>> {
    let verdict = is_completely_positive(q, tol)?;
    if !verdict.positive {
        return Err(Error::Unrealizable(format!("not completely positive (min eigenvalue {:e})", verdict.min_eigenvalue)));
    }
    let (a, b) = check_transition_signature(q)?;
    let r = dynamical_from_transition(q, &Basis::standard(&a))?.matricize(&[0, 1], &[2, 3])?;
    let (vals, vecs) = linalg::hermitian_eigen(&r);
    let top = vals.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    for (l, &e) in vals.iter().enumerate().rev() {
        if e <= tol * top {
            continue;
        }
        let w = vecs.column(l);
        let y = CMatrix::from_fn(b.dim(), a.dim(), |bb, aa| w[aa * b.dim() + bb] * c(e.sqrt(), 0.0));
        out.push(Tensor::operator(format!("Y{}", out.len()), &b, &a, &y)?);
    }
    if out.is_empty() {
        out.push(Tensor::operator("Y0", &b, &a, &CMatrix::from_element(b.dim(), a.dim(), ZERO))?);
    }
    Ok(out)
}

/// Transition operator of an arbitrary linear superoperator, given by its
/// action on the matrix units `|j><k|` of `H_a`.
pub fn transition_from_map(a: &Space, b: &Space, map: impl Fn(&CMatrix) -> CMatrix) -> Result<Tensor> {
    let (da, db) = (a.dim(), b.dim());
    let mut data = vec![ZERO; da * da * db * db];
    for j in 0..da {
        for k in 0..da {
            let mut unit = CMatrix::zeros(da, da);
            unit[(j, k)] = linalg::ONE;
            let out = map(&unit);
            for b1 in 0..db {
                for b2 in 0..db {
                    data[((j * da + k) * db + b1) * db + b2] = out[(b1, b2)];
                }
            }
        }
    }
    Tensor::new("Q", vec![Leg::closed(a), Leg::open(a), Leg::open(b), Leg::closed(b)], data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gates, max_abs_diff, ONE};

    fn sp(label: &str, d: usize) -> Space {
        Space::new(label, d).unwrap()
    }

    fn spaces() -> (Space, Space, Space, Space) {
        (sp("a", 2), sp("b", 2), sp("e", 2), sp("f", 2))
    }

    fn unitary_tensor(m: &CMatrix) -> Tensor {
        let (a, b, e, f) = spaces();
        Tensor::from_matrix("T", vec![Leg::open(&b), Leg::open(&f)], vec![Leg::closed(&a), Leg::closed(&e)], m).unwrap()
    }

    fn e0() -> Tensor {
        Tensor::ket("e0", &sp("e", 2), vec![ONE, ZERO]).unwrap()
    }

    fn identity_channel() -> Channel {
        Channel::new(isometry_from_unitary(&unitary_tensor(&CMatrix::identity(4, 4)), &e0()).unwrap()).unwrap()
    }

    fn copy_channel() -> Channel {
        Channel::new(isometry_from_unitary(&unitary_tensor(&gates::cnot()), &e0()).unwrap()).unwrap()
    }

    fn depolarizing() -> Channel {
        let (a, b, _, _) = spaces();
        let k: Vec<CMatrix> = [gates::identity(2), gates::pauli_x(), gates::pauli_y(), gates::pauli_z()]
            .into_iter()
            .map(|p| p.scale(0.5))
            .collect();
        Channel::new(Isometry::from_kraus(&b, &a, "f", &k).unwrap()).unwrap()
    }

    #[test]
    fn identity_unitary_appends_environment() {
        let v = identity_channel().isometry().matrix();
        for j in 0..2 {
            for r in 0..4 {
                let expected = if r == j * 2 { ONE } else { ZERO };
                assert_eq!(v[(r, j)], expected);
            }
        }
    }

    #[test]
    fn cnot_gives_copy_isometry() {
        let v = copy_channel().isometry().matrix();
        // V|j> = |j>|j>: column j has its one at row j*2 + j
        for j in 0..2 {
            assert_eq!(v[(j * 2 + j, j)], ONE);
            assert!((v.column(j).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = unitary_tensor(&CMatrix::from_element(4, 4, ONE));
        assert!(matches!(isometry_from_unitary(&bad, &e0()), Err(Error::NotUnitary(_))));
        let e = Tensor::ket("e0", &sp("e", 2), vec![ONE, ONE]).unwrap();
        assert!(matches!(isometry_from_unitary(&unitary_tensor(&gates::cnot()), &e), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn channel_ket_examples() {
        let ch = identity_channel();
        let basis = Basis::standard(ch.space_a());
        let psi = channel_ket(ch.isometry(), &basis).unwrap();
        // sum_j |j>|j>|0>
        let mut expected = vec![ZERO; 8];
        expected[0] = ONE;
        expected[6] = ONE;
        assert_eq!(psi.data(), expected.as_slice());
        assert!((psi.norm_sqr() - 2.0).abs() < 1e-14);
        let psi = channel_ket(copy_channel().isometry(), &basis).unwrap();
        let mut expected = vec![ZERO; 8];
        expected[0] = ONE;
        expected[7] = ONE;
        assert_eq!(psi.data(), expected.as_slice());
        // transposer undoes itself: A^dag joined to the a leg gives back V
        let back = transposer(&basis).adjoint().contract(&psi, &[(1, 0)]).unwrap().permute(&[1, 2, 0]).unwrap();
        assert!(back.max_abs_diff(copy_channel().isometry().tensor()).unwrap() < 1e-15);
    }

    #[test]
    fn kraus_examples() {
        let k = identity_channel().kraus().to_vec();
        assert_eq!(k[0].as_operator().unwrap(), CMatrix::identity(2, 2));
        assert_eq!(k[1].as_operator().unwrap(), CMatrix::zeros(2, 2));
        let k = copy_channel().kraus().to_vec();
        assert_eq!(k[0].as_operator().unwrap(), linalg::from_rows(2, 2, &[ONE, ZERO, ZERO, ZERO]));
        assert_eq!(k[1].as_operator().unwrap(), linalg::from_rows(2, 2, &[ZERO, ZERO, ZERO, ONE]));
    }

    #[test]
    fn transition_examples() {
        // identity: Q[a1,a2,b1,b2] = d(a1,b1) d(a2,b2)
        let q = identity_channel().transition().clone();
        for idx in 0..16 {
            let (a1, a2, b1, b2) = (idx / 8, (idx / 4) % 2, (idx / 2) % 2, idx % 2);
            let expected = if a1 == b1 && a2 == b2 { ONE } else { ZERO };
            assert_eq!(q.get(&[a1, a2, b1, b2]), expected);
        }
        // dephasing: only a1 = a2 = b1 = b2 survives
        let q = copy_channel().transition().clone();
        for idx in 0..16 {
            let (a1, a2, b1, b2) = (idx / 8, (idx / 4) % 2, (idx / 2) % 2, idx % 2);
            let expected = if a1 == a2 && a2 == b1 && b1 == b2 { ONE } else { ZERO };
            assert_eq!(q.get(&[a1, a2, b1, b2]), expected);
        }
        let from_k = transition_from_kraus(copy_channel().kraus()).unwrap();
        assert!(from_k.max_abs_diff(&q).unwrap() < 1e-15);
    }

    #[test]
    fn superop_examples() {
        let a = sp("a", 2);
        let m = linalg::from_rows(2, 2, &[c(0.3, 0.0), c(0.1, 0.2), c(-0.4, 0.0), c(0.7, -0.1)]);
        let op = Tensor::operator("A", &a, &a, &m).unwrap();
        let out = apply_superop(&identity_channel(), &op).unwrap();
        assert!(max_abs_diff(&out.as_operator().unwrap(), &m) < 1e-15);

        let plus = linalg::from_rows(2, 2, &[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)]);
        let op = Tensor::operator("rho", &a, &a, &plus).unwrap();
        let out = apply_superop(&copy_channel(), &op).unwrap().as_operator().unwrap();
        assert!(max_abs_diff(&out, &CMatrix::identity(2, 2).scale(0.5)) < 1e-15);
        let via_k = apply_kraus(&copy_channel(), &op).unwrap().as_operator().unwrap();
        assert!(max_abs_diff(&out, &via_k) < 1e-15);

        let wrong = Tensor::identity(&sp("z", 3));
        assert!(matches!(apply_superop(&copy_channel(), &wrong), Err(Error::Dimension(_))));
    }

    #[test]
    fn dynamical_examples() {
        let r = identity_channel().dynamical().matricize(&[0, 1], &[2, 3]).unwrap();
        // 2|Phi+><Phi+| = |00><00| + |00><11| + |11><00| + |11><11|
        let mut expected = CMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            expected[(i, j)] = ONE;
        }
        assert!(max_abs_diff(&r, &expected) < 1e-15);
        assert_eq!(dynamical_rank(&identity_channel(), 1e-8).unwrap(), 1);

        let r = copy_channel().dynamical().matricize(&[0, 1], &[2, 3]).unwrap();
        let (vals, _) = linalg::hermitian_eigen(&r);
        let expected = [0.0, 0.0, 1.0, 1.0];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-14);
        }
        assert!((r.trace() - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn kraus_rank_examples() {
        assert_eq!(kraus_rank(&identity_channel(), 1e-8).unwrap(), 1);
        assert_eq!(kraus_rank(&copy_channel(), 1e-8).unwrap(), 2);
        assert_eq!(dynamical_rank(&copy_channel(), 1e-8).unwrap(), 2);
        assert_eq!(kraus_rank(&depolarizing(), 1e-8).unwrap(), 4);
        assert_eq!(dynamical_rank(&depolarizing(), 1e-8).unwrap(), 4);
    }

    #[test]
    fn transpose_map_is_not_cp() {
        let a = sp("a", 2);
        let q = transition_from_map(&a, &a, |m| m.transpose()).unwrap();
        let r = dynamical_from_transition(&q, &Basis::standard(&a)).unwrap();
        assert!(max_abs_diff(&r.matricize(&[0, 1], &[2, 3]).unwrap(), &gates::swap(2)) < 1e-15);
        let v = is_completely_positive(&q, 1e-10).unwrap();
        assert!(!v.positive);
        assert!((v.min_eigenvalue + 1.0).abs() < 1e-12);
        assert!(kraus_from_transition(&q, 1e-10).is_err());
    }

    #[test]
    fn isometry_channels_are_cp_and_reconstructible() {
        for ch in [identity_channel(), copy_channel(), depolarizing()] {
            let v = is_completely_positive(ch.transition(), 1e-10).unwrap();
            assert!(v.positive && v.min_eigenvalue >= -1e-10);
            let y = kraus_from_transition(ch.transition(), 1e-10).unwrap();
            let q = transition_from_kraus(&y).unwrap();
            assert!(q.max_abs_diff(ch.transition()).unwrap() < 1e-10);
        }
    }

    #[test]
    fn rejects_wrong_signature() {
        let a = sp("a", 2);
        let q = Tensor::zeros("Q", vec![Leg::open(&a), Leg::open(&a), Leg::open(&a), Leg::closed(&a)]);
        assert!(matches!(is_completely_positive(&q, 1e-10), Err(Error::Shape(_))));
    }
}
