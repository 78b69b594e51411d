use crate::channels::Isometry;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::tensor::{basis_ket, Leg, Polarity, Space, Tensor};

/// Heralded implementation of a contraction `K`: an isometry into
/// `H_b (x) H_y` with `dim H_y = 2`, where finding `H_y` in `|eta_0>` leaves
/// `K_hat |alpha>` on `H_b`.
#[derive(Debug, Clone)]
pub struct UnambiguousRealization {
    khat: Tensor,
    lhat: Tensor,
    isometry: Isometry,
    success_projector: Tensor,
}

impl UnambiguousRealization {
    /// `K / sigma_max(K)`, legs `(b+, a-)`.
    pub fn khat(&self) -> &Tensor {
        &self.khat
    }

    /// `sqrt(I - K_hat^dagger K_hat)` on `H_a`.
    pub fn lhat(&self) -> &Tensor {
        &self.lhat
    }

    /// `V|alpha> = K_hat|alpha> (x) |eta_0> + L_hat|alpha> (x) |eta_1>`, legs
    /// `(b+, y+, a-)`.
    pub fn isometry(&self) -> &Isometry {
        &self.isometry
    }

    /// `S = |eta_0><eta_0|` on `H_y`.
    pub fn success_projector(&self) -> &Tensor {
        &self.success_projector
    }

    /// `(I (x) S) V |alpha>`, legs `(b+, y+)`.
    pub fn success_branch(&self, alpha: &Tensor) -> Result<Tensor> {
        let a = self.isometry.space_a();
        if alpha.legs() != [Leg::open(a)] {
            return Err(Error::Shape(format!("expected a ket on {a}, got [{}]", alpha.leg_summary())));
        }
        let out = self.isometry.tensor().contract(alpha, &[(2, 0)])?;
        // (y+, y-) joined to y+: (y+, b+) -> (b+, y+)
        self.success_projector.contract(&out, &[(1, 1)])?.permute(&[1, 0])
    }

    /// Born-rule probability of the success outcome for a normalized input.
    pub fn success_probability(&self, alpha: &Tensor) -> Result<f64> {
        let n = alpha.norm_sqr();
        if n == 0.0 {
            return Err(Error::ZeroOperator);
        }
        Ok(self.success_branch(alpha)?.norm_sqr() / n)
    }

    /// A unitary `T` on `H_b (x) H_y` whose columns `(x = 0, a)` reproduce `V`,
    /// i.e. `T (|eta_0> (x) |alpha>) = V|alpha>` with the ancilla index first.
    #[allow(dead_code)]
    pub(crate) fn unitary_extension(&self) -> CMatrix {
        linalg::complete_to_unitary(&self.isometry.matrix())
    }
}

pub fn realize_unambiguous(k: &Tensor, tol: f64) -> Result<UnambiguousRealization> {
    let legs = k.legs();
    if legs.len() != 2 || legs[0].polarity != Polarity::Open || legs[1].polarity != Polarity::Closed {
        return Err(Error::Shape(format!("expected an operator (b+, a-), got [{}]", k.leg_summary())));
    }
    let (b, a) = (legs[0].space.clone(), legs[1].space.clone());
    if b.dim() != a.dim() {
        return Err(Error::NotSquare { rows: b.dim(), cols: a.dim() });
    }
    let m = k.as_operator()?;
    let s = linalg::singular_values(&m);
    if s[0] <= tol {
        return Err(Error::ZeroOperator);
    }
    let khat = m.scale(1.0 / s[0]);
    let d = a.dim();
    let lhat = linalg::psd_sqrt(&(CMatrix::identity(d, d) - khat.adjoint() * &khat));
    let y = Space::new("y", 2)?;
    let v = CMatrix::from_fn(2 * d, d, |r, col| {
        let (bb, yy) = (r / 2, r % 2);
        if yy == 0 {
            khat[(bb, col)]
        } else {
            lhat[(bb, col)]
        }
    });
    let eta0 = basis_ket(&y, 0);
    Ok(UnambiguousRealization {
        khat: Tensor::from_matrix("Khat", vec![Leg::open(&b)], vec![Leg::closed(&a)], &khat)?,
        lhat: Tensor::operator("Lhat", &a, &a, &lhat)?,
        isometry: Isometry::from_matrix(&b, &y, &a, &v)?,
        success_projector: eta0.outer(&eta0.adjoint()).with_name("S"),
    })
}

/// Splits a two-leg tensor into `s |u> (x) |w>` with unit `|w>`; fails if the
/// tensor is not a product within `tol` relative to its largest singular
/// value.
pub fn product_factor(t: &Tensor, tol: f64) -> Result<(Tensor, Tensor)> {
    let legs = t.legs();
    if legs.len() != 2 {
        return Err(Error::Shape(format!("expected two legs, got [{}]", t.leg_summary())));
    }
    let svd = linalg::svd(&t.matricize(&[0], &[1])?);
    if svd.s[0] == 0.0 {
        return Err(Error::ZeroOperator);
    }
    if svd.s.get(1).is_some_and(|s1| *s1 > tol * svd.s[0]) {
        return Err(Error::Shape(format!("not a product: second singular value {}", svd.s[1])));
    }
    let left: Vec<_> = svd.u.column(0).iter().map(|z| z * c(svd.s[0], 0.0)).collect();
    let right: Vec<_> = svd.v_t.row(0).iter().copied().collect();
    Ok((
        Tensor::new("u", vec![legs[0].clone()], left)?,
        Tensor::new("w", vec![legs[1].clone()], right)?,
    ))
}
