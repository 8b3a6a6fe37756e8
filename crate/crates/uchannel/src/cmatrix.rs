//! Dense complex-matrix kernel.
//!
//! Everything above this module is built from [`ComplexMatrix`]: a row-major,
//! immutable, dense matrix of `Complex<f64>`, with tolerance-aware predicates
//! for the Hermitian/PSD decisions that drive all positivity tests. The
//! Hermitian eigendecomposition and singular values are delegated to nalgebra.

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Complex scalar, 64-bit real and imaginary parts.
pub type C64 = num_complex::Complex<f64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Numerical tolerances used by all predicates.
///
/// `psd_cutoff` is the relative eigenvalue floor below which a negative
/// eigenvalue disqualifies a matrix from being PSD, `equality_eps` the
/// relative Frobenius-distance floor for matrix equality and Hermiticity
/// decisions. Both are relative to `max(1, magnitude)` of the inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub psd_cutoff: f64,
    pub equality_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { psd_cutoff: 1e-9, equality_eps: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(psd_cutoff: f64, equality_eps: f64) -> Result<Self> {
        for (name, v) in [("psd_cutoff", psd_cutoff), ("equality_eps", equality_eps)] {
            if !v.is_finite() || !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidTolerance(format!("{name} = {v} not in [0, 1)")));
            }
        }
        Ok(Tolerance { psd_cutoff, equality_eps })
    }
}

/// Dense rectangular complex matrix, row-major storage.
///
/// Values are immutable after construction; all operations return new
/// matrices. Entries are checked finite at every construction boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        let m = ComplexMatrix { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    fn check_finite(&self) -> Result<()> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self.get(i, j);
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Matrix unit e_ij inside a `rows x cols` shape.
    pub fn matrix_unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        Self::from_fn(rows, cols, |r, c| if r == i && c == j { ONE } else { ZERO })
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO })
    }

    /// Convenience constructor from real row slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::DimensionMismatch("no rows given".into()));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0))).collect();
        Self::new(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("column length mismatch".into()));
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    pub fn multiply(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = vec![ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    data[i * other.cols + j] += aik * other.get(k, j);
                }
            }
        }
        Ok(ComplexMatrix { rows: self.rows, cols: other.cols, data })
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &ComplexMatrix, f: impl Fn(C64, C64) -> C64) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, factor: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conjugate(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Kronecker product with row-major blocks: block (i, j) equals
    /// `self[i][j] * other`.
    pub fn tensor(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = vec![ZERO; rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let aij = self.get(i, j);
                if aij == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        data[(i * other.rows + k) * cols + (j * other.cols + l)] =
                            aij * other.get(k, l);
                    }
                }
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn trace(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "trace of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|| a - a* ||_F`; zero exactly when the matrix is Hermitian.
    pub fn hermitian_deviation(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("hermitian_deviation needs a square matrix".into()));
        }
        Ok(self.sub(&self.adjoint())?.frobenius_norm())
    }

    /// Hermitian part `(a + a*) / 2`.
    pub fn hermitized(&self) -> Result<ComplexMatrix> {
        Ok(self.add(&self.adjoint())?.scale(C64::new(0.5, 0.0)))
    }

    /// Relative Frobenius equality: `||a - b|| <= eps * max(1, ||a||, ||b||)`.
    pub fn approx_eq(&self, other: &ComplexMatrix, eps: f64) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        let diff = self.sub(other).expect("shapes match").frobenius_norm();
        diff <= eps * 1f64.max(self.frobenius_norm()).max(other.frobenius_norm())
    }

    pub fn mul_vec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has length {}",
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * x[j]).sum())
            .collect())
    }

    pub(crate) fn to_na(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let svd = self.to_na().svd(false, false);
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }
}

/// Orthonormal basis of the null space of `m`, detected by singular values
/// at or below `cutoff_rel * max(1, sigma_max)`.
pub fn kernel_basis(m: &ComplexMatrix, cutoff_rel: f64) -> Vec<Vec<C64>> {
    // pad with zero rows so the thin SVD carries all right singular vectors
    let padded = if m.rows() < m.cols() {
        ComplexMatrix::from_fn(m.cols(), m.cols(), |i, j| {
            if i < m.rows() {
                m.get(i, j)
            } else {
                ZERO
            }
        })
    } else {
        m.clone()
    };
    let svd = padded.to_na().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = cutoff_rel * 1f64.max(sigma_max);
    let mut basis = Vec::new();
    for (j, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff {
            basis.push((0..padded.cols()).map(|k| v_t[(j, k)].conj()).collect());
        }
    }
    basis
}

/// Orthonormal basis of the column space of `m`, detected by singular values
/// strictly above `cutoff_rel * max(1, sigma_max)`.
pub fn range_basis(m: &ComplexMatrix, cutoff_rel: f64) -> Vec<Vec<C64>> {
    let svd = m.to_na().svd(true, false);
    let u = svd.u.expect("requested left singular vectors");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = cutoff_rel * 1f64.max(sigma_max);
    let mut basis = Vec::new();
    for (j, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            basis.push((0..m.rows()).map(|k| u[(k, j)]).collect());
        }
    }
    basis
}

/// Solve the square linear system `a x = b`; `None` when `a` is singular.
pub fn solve_linear(a: &ComplexMatrix, b: &[C64]) -> Option<Vec<C64>> {
    if !a.is_square() || b.len() != a.rows() {
        return None;
    }
    let rhs = nalgebra::DVector::from_column_slice(b);
    let lu = a.to_na().lu();
    lu.solve(&rhs).map(|x| x.iter().copied().collect())
}

/// Orthogonal projector `sum_v |v><v|` onto the span of an orthonormal family.
pub fn projector_from_basis(dim: usize, basis: &[Vec<C64>]) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(dim, dim);
    for v in basis {
        p = p.add(&outer(v, v)).expect("projector shapes agree");
    }
    p
}

/// Stack matrices with equal column counts on top of each other.
pub fn vstack(mats: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let cols = mats.first().ok_or_else(|| Error::DimensionMismatch("empty stack".into()))?.cols();
    if mats.iter().any(|m| m.cols() != cols) {
        return Err(Error::DimensionMismatch("vstack column counts differ".into()));
    }
    let rows: usize = mats.iter().map(|m| m.rows()).sum();
    let mut data = Vec::with_capacity(rows * cols);
    for m in mats {
        data.extend_from_slice(m.entries());
    }
    ComplexMatrix::new(rows, cols, data)
}

/// Stack matrices with equal row counts side by side.
pub fn hstack(mats: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let rows = mats.first().ok_or_else(|| Error::DimensionMismatch("empty stack".into()))?.rows();
    if mats.iter().any(|m| m.rows() != rows) {
        return Err(Error::DimensionMismatch("hstack row counts differ".into()));
    }
    let cols: usize = mats.iter().map(|m| m.cols()).sum();
    Ok(ComplexMatrix::from_fn(rows, cols, |i, mut j| {
        for m in mats {
            if j < m.cols() {
                return m.get(i, j);
            }
            j -= m.cols();
        }
        unreachable!("column index within total width")
    }))
}

// --- vectors ------------------------------------------------------------

/// Inner product, linear in the first argument: `sum_k x_k * conj(y_k)`.
pub fn inner(x: &[C64], y: &[C64]) -> Result<C64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "vector lengths {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(x.iter().zip(y).map(|(a, b)| a * b.conj()).sum())
}

pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Rank-one operator `|x><y|`, i.e. the matrix `x y*`.
pub fn outer(x: &[C64], y: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(x.len(), y.len(), |i, j| x[i] * y[j].conj())
}

pub fn basis_vector(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    v
}

// --- eigendecomposition and PSD predicates --------------------------------

/// Hermitian eigendecomposition with eigenvalues in descending order and
/// orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// Eigendecomposition of the Hermitian part of `a`.
///
/// Rejects inputs whose anti-Hermitian part exceeds the equality tolerance;
/// accepted inputs are symmetrized as `(a + a*) / 2` before factorization so
/// the result is well-defined under roundoff.
pub fn hermitian_eig(a: &ComplexMatrix, tol: &Tolerance) -> Result<HermitianEig> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let deviation = a.hermitian_deviation()?;
    if deviation > tol.equality_eps * 1f64.max(a.frobenius_norm()) {
        return Err(Error::HermiticityViolation { deviation });
    }
    let h = a.hermitized()?;
    let eig = h.to_na().symmetric_eigen();
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut columns: Vec<Vec<C64>> = order
        .iter()
        .map(|&k| (0..n).map(|i| eig.eigenvectors[(i, k)]).collect())
        .collect();
    for col in &mut columns {
        canonicalize_phase(col);
    }
    Ok(HermitianEig { eigenvalues, eigenvectors: ComplexMatrix::from_columns(n, &columns)? })
}

/// Rotate a vector by a global phase so its largest-modulus entry is positive
/// real. Keeps eigenvector output reproducible across runs.
fn canonicalize_phase(v: &mut [C64]) {
    let mut best = 0usize;
    for (i, z) in v.iter().enumerate() {
        if z.norm_sqr() > v[best].norm_sqr() {
            best = i;
        }
    }
    let z = v[best];
    if z.norm() > 0.0 {
        let phase = z / z.norm();
        let rot = phase.conj();
        for entry in v.iter_mut() {
            *entry *= rot;
        }
    }
}

/// Outcome of a PSD decision, with enough evidence to recompute it.
#[derive(Debug, Clone, Serialize)]
pub struct PsdCheck {
    pub is_hermitian: bool,
    pub hermitian_deviation: f64,
    pub eigenvalues: Vec<f64>,
    pub threshold: f64,
    pub psd: bool,
}

/// PSD test with diagnostics: Hermitian within tolerance and
/// `lambda_min >= -psd_cutoff * max(1, lambda_max, ||a||_F)`.
///
/// Non-Hermitian inputs report `psd = false` (with the deviation and the
/// spectrum of the Hermitian part); a non-square input is an error.
pub fn psd_check(a: &ComplexMatrix, tol: &Tolerance) -> Result<PsdCheck> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "PSD test on non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let deviation = a.hermitian_deviation()?;
    let is_hermitian = deviation <= tol.equality_eps * 1f64.max(a.frobenius_norm());
    let h = a.hermitized()?;
    let eig = h.to_na().symmetric_eigen();
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let lambda_max = eigenvalues.first().copied().unwrap_or(0.0);
    let lambda_min = eigenvalues.last().copied().unwrap_or(0.0);
    let threshold = -tol.psd_cutoff * 1f64.max(lambda_max).max(a.frobenius_norm());
    let psd = is_hermitian && lambda_min >= threshold;
    Ok(PsdCheck { is_hermitian, hermitian_deviation: deviation, eigenvalues, threshold, psd })
}

/// True iff `a` is Hermitian within tolerance and PSD up to the relative
/// eigenvalue floor. Non-square inputs are simply not PSD.
pub fn is_psd(a: &ComplexMatrix, tol: &Tolerance) -> bool {
    psd_check(a, tol).map(|c| c.psd).unwrap_or(false)
}

// --- bipartite operations --------------------------------------------------

fn check_bipartite(rho: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<()> {
    if dim_a == 0 || dim_b == 0 {
        return Err(Error::DimensionMismatch("factor dimensions must be positive".into()));
    }
    if !rho.is_square() || rho.rows() != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "expected square matrix of size {}, got {}x{}",
            dim_a * dim_b,
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(())
}

/// Transpose on the A factor: viewing `rho` as `dim_a x dim_a` blocks of size
/// `dim_b`, block (i, j) of the output is block (j, i) of the input.
pub fn partial_transpose(rho: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    check_bipartite(rho, dim_a, dim_b)?;
    Ok(ComplexMatrix::from_fn(rho.rows(), rho.cols(), |r, c| {
        let (i, a) = (r / dim_b, r % dim_b);
        let (j, b) = (c / dim_b, c % dim_b);
        rho.get(j * dim_b + a, i * dim_b + b)
    }))
}

/// Realigned matrix: row (i, j), column (k, l) entry is `rho[(i,k), (j,l)]`.
pub fn realign(rho: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    check_bipartite(rho, dim_a, dim_b)?;
    Ok(ComplexMatrix::from_fn(dim_a * dim_a, dim_b * dim_b, |r, c| {
        let (i, j) = (r / dim_a, r % dim_a);
        let (k, l) = (c / dim_b, c % dim_b);
        rho.get(i * dim_b + k, j * dim_b + l)
    }))
}

/// Partial trace over the B factor of a `(dim_a dim_b)`-sized square matrix.
pub fn partial_trace_b(rho: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
        (0..dim_b).map(|a| rho.get(i * dim_b + a, j * dim_b + a)).sum()
    })
}

/// Trace norm of the realigned matrix. Exceeding 1 witnesses entanglement for
/// ordinary bipartite states (CCNR criterion).
pub fn realignment_trace_norm(rho: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<f64> {
    Ok(realign(rho, dim_a, dim_b)?.singular_values().iter().sum())
}

// --- serde -----------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<(f64, f64)>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| (z.re, z.im)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixRepr::deserialize(deserializer)?;
        ComplexMatrix::new(
            raw.rows,
            raw.cols,
            raw.data.into_iter().map(|(re, im)| C64::new(re, im)).collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}
