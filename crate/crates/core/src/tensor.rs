//! Dense complex tensors with polarized legs.
//!
//! A [`Tensor`] is an "object" of an atemporal diagram: a multi-array over an
//! ordered list of [`Leg`]s. An open leg belongs to a ket space `H`, a closed
//! leg to the dual bra space `H^dagger`. Data is stored row-major over the legs
//! in their declared order, so the last leg varies fastest.
//!
//! Contraction joins one open leg with one closed leg of the same space. The
//! surviving legs of the left operand come first, followed by those of the
//! right operand, each group in its original relative order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ONE, ZERO};

/// Default relative threshold used by rank-returning operations.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Hermiticity check used by [`Tensor::is_positive`], relative to the largest
/// entry of the matricization.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Space {
    label: String,
    dim: usize,
}

impl Space {
    pub fn new(label: impl Into<String>, dim: usize) -> Result<Self> {
        let label = label.into();
        if dim == 0 {
            return Err(Error::ZeroDimension(label));
        }
        Ok(Self { label, dim })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.label, self.dim)
    }
}

/// A set of spaces with unique labels.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpaceRegistry {
    spaces: Vec<Space>,
}

impl SpaceRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a space; returns `false` if the label is already taken.
    pub fn insert(&mut self, space: Space) -> bool {
        if self.get(space.label()).is_some() {
            return false;
        }
        self.spaces.push(space);
        true
    }

    pub fn get(&self, label: &str) -> Option<&Space> {
        self.spaces.iter().find(|s| s.label == label)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Space> {
        self.spaces.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// Ket node.
    Open,
    /// Bra node.
    Closed,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Open => Polarity::Closed,
            Polarity::Closed => Polarity::Open,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Leg {
    pub space: Space,
    pub polarity: Polarity,
}

impl Leg {
    pub fn open(space: &Space) -> Self {
        Self { space: space.clone(), polarity: Polarity::Open }
    }

    pub fn closed(space: &Space) -> Self {
        Self { space: space.clone(), polarity: Polarity::Closed }
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn flipped(&self) -> Self {
        Self { space: self.space.clone(), polarity: self.polarity.flip() }
    }

    /// Whether this leg can be joined to `other` by a contraction line.
    pub fn check_joinable(&self, other: &Leg) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch { left: self.space.to_string(), right: other.space.to_string() });
        }
        if self.polarity == other.polarity {
            return Err(Error::PolarityMismatch { left: self.polarity, right: other.polarity });
        }
        Ok(())
    }
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = match self.polarity {
            Polarity::Open => '+',
            Polarity::Closed => '-',
        };
        write!(f, "{}{}", self.space.label, mark)
    }
}

/// Result of a positivity test: the verdict and the smallest eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Positivity {
    pub positive: bool,
    pub min_eigenvalue: f64,
}

/// A dense complex tensor with polarized legs. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    name: String,
    legs: Vec<Leg>,
    data: Vec<C64>,
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Advances a row-major multi-index; returns `false` after the last one.
fn next_index(idx: &mut [usize], dims: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < dims[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

impl Tensor {
    pub fn new(name: impl Into<String>, legs: Vec<Leg>, data: Vec<C64>) -> Result<Self> {
        let expected: usize = legs.iter().map(Leg::dim).product();
        if data.len() != expected {
            return Err(Error::DataLength { expected, got: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { name: name.into(), legs, data })
    }

    pub fn zeros(name: impl Into<String>, legs: Vec<Leg>) -> Self {
        let n = legs.iter().map(Leg::dim).product();
        Self { name: name.into(), legs, data: vec![ZERO; n] }
    }

    /// A zero-leg object holding one complex number.
    pub fn scalar(value: C64) -> Self {
        Self { name: "scalar".into(), legs: Vec::new(), data: vec![value] }
    }

    pub fn ket(name: impl Into<String>, space: &Space, data: Vec<C64>) -> Result<Self> {
        Self::new(name, vec![Leg::open(space)], data)
    }

    /// Builds an object whose `(row_legs | col_legs)` matricization is `m`.
    pub fn from_matrix(name: impl Into<String>, row_legs: Vec<Leg>, col_legs: Vec<Leg>, m: &CMatrix) -> Result<Self> {
        let rows: usize = row_legs.iter().map(Leg::dim).product();
        let cols: usize = col_legs.iter().map(Leg::dim).product();
        if m.nrows() != rows || m.ncols() != cols {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, legs require {}x{}",
                m.nrows(),
                m.ncols(),
                rows,
                cols
            )));
        }
        let mut legs = row_legs;
        legs.extend(col_legs);
        Self::new(name, legs, linalg::to_rows(m))
    }

    /// Operator from `input` to `output`: legs `(output+, input-)`.
    pub fn operator(name: impl Into<String>, output: &Space, input: &Space, m: &CMatrix) -> Result<Self> {
        Self::from_matrix(name, vec![Leg::open(output)], vec![Leg::closed(input)], m)
    }

    /// The identity `sum_j |j><j|` on `space`.
    pub fn identity(space: &Space) -> Self {
        let d = space.dim;
        let m = CMatrix::identity(d, d);
        Self::operator("I", space, space, &m).expect("identity shape")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn dims(&self) -> Vec<usize> {
        self.legs.iter().map(Leg::dim).collect()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_scalar(&self) -> bool {
        self.legs.is_empty()
    }

    pub fn scalar_value(&self) -> Option<C64> {
        self.is_scalar().then(|| self.data[0])
    }

    /// Entry at a multi-index given in leg order.
    pub fn get(&self, index: &[usize]) -> C64 {
        assert_eq!(index.len(), self.legs.len());
        let st = strides(&self.dims());
        self.data[index.iter().zip(&st).map(|(i, s)| i * s).sum::<usize>()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { name: self.name.clone(), legs: self.legs.clone(), data: self.data.iter().map(|z| z * factor).collect() }
    }

    /// Entrywise sum of two objects with identical legs.
    pub fn add(&self, other: &Tensor) -> Result<Self> {
        self.check_same_legs(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { name: self.name.clone(), legs: self.legs.clone(), data })
    }

    /// Largest entrywise deviation from an object with identical legs.
    pub fn max_abs_diff(&self, other: &Tensor) -> Result<f64> {
        self.check_same_legs(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    fn check_same_legs(&self, other: &Tensor) -> Result<()> {
        if self.legs != other.legs {
            return Err(Error::Shape(format!(
                "legs [{}] differ from [{}]",
                self.leg_summary(),
                other.leg_summary()
            )));
        }
        Ok(())
    }

    pub fn leg_summary(&self) -> String {
        self.legs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
    }

    fn check_leg(&self, leg: usize) -> Result<()> {
        if leg >= self.legs.len() {
            return Err(Error::DanglingLeg { object: self.name.clone(), leg, legs: self.legs.len() });
        }
        Ok(())
    }

    /// Reorders legs: leg `k` of the result is leg `order[k]` of `self`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let n = self.legs.len();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::BadPartition { legs: n });
        }
        for &k in order {
            self.check_leg(k)?;
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::BadPartition { legs: n });
            }
        }
        if order.iter().enumerate().all(|(i, &k)| i == k) {
            return Ok(self.clone());
        }
        let dims = self.dims();
        let src_strides = strides(&dims);
        let new_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
        let gather: Vec<usize> = order.iter().map(|&k| src_strides[k]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; n];
        loop {
            let off: usize = idx.iter().zip(&gather).map(|(i, s)| i * s).sum();
            data.push(self.data[off]);
            if !next_index(&mut idx, &new_dims) {
                break;
            }
        }
        let legs = order.iter().map(|&k| self.legs[k].clone()).collect();
        Ok(Self { name: self.name.clone(), legs, data })
    }

    /// Flips every polarity and conjugates the data, keeping the layout.
    pub fn adjoint(&self) -> Self {
        Self {
            name: format!("{}^dag", self.name),
            legs: self.legs.iter().map(Leg::flipped).collect(),
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Matrix with rows indexed by `row_legs` and columns by `col_legs`, each
    /// group flattened row-major in the order given.
    pub fn matricize(&self, row_legs: &[usize], col_legs: &[usize]) -> Result<CMatrix> {
        let n = self.legs.len();
        let mut order = row_legs.to_vec();
        order.extend_from_slice(col_legs);
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::BadPartition { legs: n });
        }
        for &k in &order {
            if k >= n || std::mem::replace(&mut seen[k], true) {
                return Err(Error::BadPartition { legs: n });
            }
        }
        let p = self.permute(&order)?;
        let rows: usize = row_legs.iter().map(|&k| self.legs[k].dim()).product();
        let cols: usize = col_legs.iter().map(|&k| self.legs[k].dim()).product();
        Ok(linalg::from_rows(rows, cols, &p.data))
    }

    /// The natural operator reading: open legs as rows, closed legs as columns.
    pub fn as_operator(&self) -> Result<CMatrix> {
        let (rows, cols) = self.polarity_split();
        self.matricize(&rows, &cols)
    }

    /// Leg indices split into (open, closed), in leg order.
    pub fn polarity_split(&self) -> (Vec<usize>, Vec<usize>) {
        let open = (0..self.legs.len()).filter(|&k| self.legs[k].polarity == Polarity::Open).collect();
        let closed = (0..self.legs.len()).filter(|&k| self.legs[k].polarity == Polarity::Closed).collect();
        (open, closed)
    }

    /// Numerical rank of a matricization: singular values above `tol` times
    /// the largest. The zero object has rank 0.
    pub fn rank(&self, row_legs: &[usize], col_legs: &[usize], tol: f64) -> Result<usize> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::BadTolerance(tol));
        }
        Ok(linalg::rank(&self.matricize(row_legs, col_legs)?, tol))
    }

    pub fn singular_values(&self, row_legs: &[usize], col_legs: &[usize]) -> Result<Vec<f64>> {
        Ok(linalg::singular_values(&self.matricize(row_legs, col_legs)?))
    }

    /// Positive-semidefiniteness of a square, Hermitian matricization. The
    /// verdict holds iff the smallest eigenvalue is at least `-tol` times the
    /// largest eigenvalue modulus.
    pub fn is_positive(&self, row_legs: &[usize], col_legs: &[usize], tol: f64) -> Result<Positivity> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::BadTolerance(tol));
        }
        let m = self.matricize(row_legs, col_legs)?;
        matrix_positivity(&m, tol)
    }

    /// Contracts leg pairs `(self_leg, other_leg)`. Each pair must join an
    /// open node with a closed node of the same space.
    pub fn contract(&self, other: &Tensor, pairs: &[(usize, usize)]) -> Result<Tensor> {
        let mut used_a = vec![false; self.legs.len()];
        let mut used_b = vec![false; other.legs.len()];
        for &(i, j) in pairs {
            self.check_leg(i)?;
            other.check_leg(j)?;
            if std::mem::replace(&mut used_a[i], true) || std::mem::replace(&mut used_b[j], true) {
                return Err(Error::BadPartition { legs: self.legs.len() + other.legs.len() });
            }
            self.legs[i].check_joinable(&other.legs[j])?;
        }
        let kept_a: Vec<usize> = (0..self.legs.len()).filter(|&k| !used_a[k]).collect();
        let kept_b: Vec<usize> = (0..other.legs.len()).filter(|&k| !used_b[k]).collect();
        let summed_a: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let summed_b: Vec<usize> = pairs.iter().map(|p| p.1).collect();

        let a = self.matricize(&kept_a, &summed_a)?;
        let b = other.matricize(&summed_b, &kept_b)?;
        let prod = a * b;

        let mut legs: Vec<Leg> = kept_a.iter().map(|&k| self.legs[k].clone()).collect();
        legs.extend(kept_b.iter().map(|&k| other.legs[k].clone()));
        Ok(Tensor { name: format!("{}*{}", self.name, other.name), legs, data: linalg::to_rows(&prod) })
    }

    /// Tensor product; legs of `self` first.
    pub fn outer(&self, other: &Tensor) -> Tensor {
        self.contract(other, &[]).expect("outer product never fails")
    }

    /// Joins leg `i` with leg `j` of the same object (partial trace).
    pub fn trace(&self, i: usize, j: usize) -> Result<Tensor> {
        self.check_leg(i)?;
        self.check_leg(j)?;
        if i == j {
            return Err(Error::BadPartition { legs: self.legs.len() });
        }
        self.legs[i].check_joinable(&self.legs[j])?;
        let kept: Vec<usize> = (0..self.legs.len()).filter(|&k| k != i && k != j).collect();
        let mut order = kept.clone();
        order.push(i);
        order.push(j);
        let p = self.permute(&order)?;
        let d = self.legs[i].dim();
        let outer: usize = kept.iter().map(|&k| self.legs[k].dim()).product();
        let data = (0..outer)
            .map(|o| (0..d).map(|t| p.data[o * d * d + t * d + t]).sum())
            .collect();
        let legs = kept.iter().map(|&k| self.legs[k].clone()).collect();
        Ok(Tensor { name: self.name.clone(), legs, data })
    }

    /// Replaces `count` consecutive legs starting at `start`, all with the same
    /// polarity, by a single leg on `space`. The data layout is unchanged.
    pub fn fuse(&self, start: usize, count: usize, space: &Space) -> Result<Tensor> {
        if count == 0 || start + count > self.legs.len() {
            return Err(Error::BadPartition { legs: self.legs.len() });
        }
        let group = &self.legs[start..start + count];
        let pol = group[0].polarity;
        if group.iter().any(|l| l.polarity != pol) {
            return Err(Error::Shape("fused legs must share a polarity".into()));
        }
        let dim: usize = group.iter().map(Leg::dim).product();
        if dim != space.dim() {
            return Err(Error::Dimension(format!("fused dimension {dim} does not match {space}")));
        }
        let mut legs = self.legs[..start].to_vec();
        legs.push(Leg { space: space.clone(), polarity: pol });
        legs.extend_from_slice(&self.legs[start + count..]);
        Ok(Tensor { name: self.name.clone(), legs, data: self.data.clone() })
    }

    /// Same data, different legs (dimensions must agree leg by leg).
    pub fn relabel(&self, legs: Vec<Leg>) -> Result<Tensor> {
        if legs.len() != self.legs.len() || legs.iter().zip(&self.legs).any(|(a, b)| a.dim() != b.dim()) {
            return Err(Error::Shape("relabelling must preserve leg dimensions".into()));
        }
        Ok(Tensor { name: self.name.clone(), legs, data: self.data.clone() })
    }

    /// Index of the first leg on `label` with the given polarity.
    pub fn find_leg(&self, label: &str, polarity: Polarity) -> Option<usize> {
        self.legs.iter().position(|l| l.space.label() == label && l.polarity == polarity)
    }
}

/// Positivity verdict for a square matrix, checking Hermiticity first.
pub fn matrix_positivity(m: &CMatrix, tol: f64) -> Result<Positivity> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let scale = linalg::max_abs(m);
    let deviation = linalg::hermitian_deviation(m);
    let allowed = HERMITIAN_TOL * scale;
    if deviation > allowed {
        return Err(Error::NotHermitian { deviation, allowed });
    }
    if m.nrows() == 0 {
        return Ok(Positivity { positive: true, min_eigenvalue: 0.0 });
    }
    let (vals, _) = linalg::hermitian_eigen(m);
    let min = vals[0];
    let top = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(Positivity { positive: min >= -tol * top, min_eigenvalue: min })
}

/// `sum_j |j><j|` helper used by several modules when only the data matters.
pub(crate) fn basis_ket(space: &Space, j: usize) -> Tensor {
    let mut data = vec![ZERO; space.dim()];
    data[j] = ONE;
    Tensor::ket(format!("{}_{j}", space.label()), space, data).expect("basis ket shape")
}
