//! Small dense complex linear-algebra helpers on top of `nalgebra`.
//!
//! Everything in the crate works on matrices of a few dozen rows at most, so
//! these helpers favour clarity over speed.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Row-major construction, mirroring how tensors store their data.
pub fn from_rows(rows: usize, cols: usize, data: &[C64]) -> CMatrix {
    CMatrix::from_row_slice(rows, cols, data)
}

/// Row-major flattening.
pub fn to_rows(m: &CMatrix) -> Vec<C64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for r in 0..m.nrows() {
        for col in 0..m.ncols() {
            out.push(m[(r, col)]);
        }
    }
    out
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Largest entry of `U^dagger U - I`.
pub fn isometry_deviation(m: &CMatrix) -> f64 {
    let g = m.adjoint() * m;
    max_abs_diff(&g, &CMatrix::identity(m.ncols(), m.ncols()))
}

pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    isometry_deviation(m)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Thin SVD with singular values sorted descending: `m = U diag(s) Vt`.
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v_t: CMatrix,
}

pub fn svd(m: &CMatrix) -> Svd {
    let dec = m.clone().svd(true, true);
    let u = dec.u.expect("requested U");
    let v_t = dec.v_t.expect("requested V^t");
    let s: Vec<f64> = dec.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let k = s.len();
    let u_sorted = CMatrix::from_fn(u.nrows(), k, |r, col| u[(r, order[col])]);
    let vt_sorted = CMatrix::from_fn(k, v_t.ncols(), |r, col| v_t[(order[r], col)]);
    Svd { u: u_sorted, s: order.iter().map(|&i| s[i]).collect(), v_t: vt_sorted }
}

/// Number of singular values above `tol` times the largest one.
pub fn numerical_rank(singular: &[f64], tol: f64) -> usize {
    let top = singular.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    singular.iter().filter(|&&s| s > tol * top).count()
}

pub fn rank(m: &CMatrix, tol: f64) -> usize {
    numerical_rank(&singular_values(m), tol)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending and
/// eigenvectors as the matching columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Positive square root of a positive semidefinite matrix; slightly negative
/// eigenvalues from rounding are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let n = m.nrows();
    let root = CMatrix::from_fn(n, n, |r, col| if r == col { c(vals[r].max(0.0).sqrt(), 0.0) } else { ZERO });
    &vecs * root * vecs.adjoint()
}

/// Exponential `exp(i t H)` of a Hermitian `H`.
pub fn expi_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(h);
    let n = h.nrows();
    let phases = CMatrix::from_fn(n, n, |r, col| if r == col { C64::from_polar(1.0, t * vals[r]) } else { ZERO });
    &vecs * phases * vecs.adjoint()
}

/// Extends the orthonormal columns of `m` to a full unitary by Gram-Schmidt
/// over the standard basis, visiting candidates in index order.
pub fn complete_to_unitary(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut cols: Vec<nalgebra::DVector<C64>> = m.column_iter().map(|col| col.into_owned()).collect();
    let mut candidate = 0;
    while cols.len() < n && candidate < n {
        let mut v = nalgebra::DVector::<C64>::zeros(n);
        v[candidate] = ONE;
        candidate += 1;
        // two passes keep the result orthogonal to working precision
        for _ in 0..2 {
            for q in &cols {
                let overlap = q.dotc(&v);
                v -= q * overlap;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / C64::from(norm));
        }
    }
    CMatrix::from_columns(&cols)
}

/// Multiplies each column by a phase so that its largest-modulus entry is
/// real and positive; ties go to the lowest row. Returns the phases applied.
pub fn fix_column_phases(m: &mut CMatrix) -> Vec<C64> {
    let mut applied = Vec::with_capacity(m.ncols());
    for col in 0..m.ncols() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for r in 0..m.nrows() {
            let a = m[(r, col)].norm();
            if a > best_abs + 1e-12 {
                best = r;
                best_abs = a;
            }
        }
        let phase = if best_abs > 0.0 { m[(best, col)].conj() / best_abs } else { ONE };
        for r in 0..m.nrows() {
            m[(r, col)] *= phase;
        }
        applied.push(phase);
    }
    applied
}

/// Pauli matrices and friends used throughout tests and examples.
pub mod gates {
    use super::*;

    pub fn identity(d: usize) -> CMatrix {
        CMatrix::identity(d, d)
    }

    pub fn pauli_x() -> CMatrix {
        from_rows(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn pauli_y() -> CMatrix {
        from_rows(2, 2, &[ZERO, -I, I, ZERO])
    }

    pub fn pauli_z() -> CMatrix {
        from_rows(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    pub fn hadamard() -> CMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        from_rows(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
    }

    /// Cyclic shift `X|j> = |j+1 mod d>`.
    pub fn shift(d: usize) -> CMatrix {
        CMatrix::from_fn(d, d, |r, col| if r == (col + 1) % d { ONE } else { ZERO })
    }

    /// Clock `Z|j> = w^j |j>` with `w = exp(2 pi i / d)`.
    pub fn clock(d: usize) -> CMatrix {
        CMatrix::from_fn(d, d, |r, col| {
            if r == col {
                C64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / d as f64)
            } else {
                ZERO
            }
        })
    }

    /// Controlled shift on `C^d (x) C^d`, control first: `|j,k> -> |j, k+j>`.
    /// For `d = 2` this is CNOT.
    pub fn controlled_shift(d: usize) -> CMatrix {
        let n = d * d;
        CMatrix::from_fn(n, n, |r, col| {
            let (j, k) = (col / d, col % d);
            if r == j * d + (k + j) % d {
                ONE
            } else {
                ZERO
            }
        })
    }

    pub fn cnot() -> CMatrix {
        controlled_shift(2)
    }

    pub fn swap(d: usize) -> CMatrix {
        let n = d * d;
        CMatrix::from_fn(n, n, |r, col| {
            let (j, k) = (col / d, col % d);
            if r == k * d + j {
                ONE
            } else {
                ZERO
            }
        })
    }
}
