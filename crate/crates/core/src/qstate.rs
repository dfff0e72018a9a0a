//! Core tensor-algebra types and operations on density matrices and pure
//! states.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::EntglError;
use crate::{linalg, tol, Result};

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix with row-major storage; the universal numeric
/// carrier for every operator in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(n_rows: usize, n_cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != n_rows * n_cols {
            return Err(EntglError::InvariantViolation(format!(
                "entry count {} does not match {}x{}",
                entries.len(),
                n_rows,
                n_cols
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(EntglError::InvariantViolation(
                "non-finite matrix entry".into(),
            ));
        }
        Ok(Self {
            n_rows,
            n_cols,
            entries,
        })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: vec![C_ZERO; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C_ONE);
        }
        m
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                entries.push(f(i, j));
            }
        }
        Self {
            n_rows,
            n_cols,
            entries,
        }
    }

    /// Build from real entries laid out row-major.
    pub fn from_real(n_rows: usize, n_cols: usize, reals: &[f64]) -> Result<Self> {
        Self::new(
            n_rows,
            n_cols,
            reals.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        )
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        debug_assert!(row < self.n_rows && col < self.n_cols);
        self.entries[row * self.n_cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        debug_assert!(row < self.n_rows && col < self.n_cols);
        self.entries[row * self.n_cols + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace requires a square matrix");
        (0..self.n_rows).map(|i| self.get(i, i)).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n_cols, self.n_rows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.n_rows, self.n_cols, |i, j| self.get(i, j).conj())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.n_cols, self.n_rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n_cols, other.n_rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self.get(i, k);
                if a == C_ZERO {
                    continue;
                }
                for j in 0..other.n_cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.n_cols, v.len());
        (0..self.n_rows)
            .map(|i| (0..self.n_cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.n_cols)
            .map(|j| (0..self.n_rows).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.n_rows {
            for j in 0..=i {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > tolerance {
                    return false;
                }
            }
        }
        true
    }

    /// Standard Kronecker product; dimensions multiply.
    pub fn kron(&self, other: &Self) -> Self {
        let (ra, ca) = (self.n_rows, self.n_cols);
        let (rb, cb) = (other.n_rows, other.n_cols);
        let mut out = Self::zeros(ra * rb, ca * cb);
        for i in 0..ra {
            for j in 0..ca {
                let a = self.get(i, j);
                if a == C_ZERO {
                    continue;
                }
                for k in 0..rb {
                    for l in 0..cb {
                        out.set(i * rb + k, j * cb + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, other: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::add(self, other)
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, other: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::sub(self, other)
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, other: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(other)
    }
}

/// Kronecker product as a free function.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Density matrix together with the list of subsystem dimensions.
///
/// Construction symmetrizes `(H + H^dagger)/2` and renormalizes the trace
/// when both are within tolerance of a valid state, and rejects otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumState {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl QuantumState {
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.len() < 2 || dims.iter().any(|&d| d == 0) {
            return Err(EntglError::InvariantViolation(
                "dims must list at least two positive subsystem dimensions".into(),
            ));
        }
        if !matrix.is_square() || matrix.n_rows() != total {
            return Err(EntglError::DimensionMismatch(format!(
                "matrix order {} does not equal product of dims {}",
                matrix.n_rows(),
                total
            )));
        }
        let scale = matrix.one_norm().max(1.0);
        if !matrix.is_hermitian(tol::HERM * scale) {
            return Err(EntglError::InvariantViolation(
                "matrix is not Hermitian within tolerance".into(),
            ));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol::TRACE * scale || tr.im.abs() > tol::TRACE * scale {
            return Err(EntglError::InvariantViolation(format!(
                "trace {} is not 1 within tolerance",
                tr
            )));
        }
        let sym = matrix.add(&matrix.dagger()).scale(Complex64::new(0.5, 0.0));
        let matrix = sym.scale(Complex64::new(1.0 / sym.trace().re, 0.0));
        let min_eig = linalg::herm_eigenvalues(&matrix)[0];
        if min_eig < -tol::PSD {
            return Err(EntglError::InvariantViolation(format!(
                "matrix has negative eigenvalue {min_eig}"
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// Constructor for states that are valid by construction. Skips the
    /// eigenvalue check but still symmetrizes and fixes the trace.
    pub(crate) fn from_trusted(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        let sym = matrix.add(&matrix.dagger()).scale(Complex64::new(0.5, 0.0));
        let matrix = sym.scale(Complex64::new(1.0 / sym.trace().re, 0.0));
        debug_assert_eq!(matrix.n_rows(), dims.iter().product::<usize>());
        Self { matrix, dims }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn is_bipartite(&self) -> bool {
        self.dims.len() == 2
    }

    fn bipartite_dims(&self) -> Result<(usize, usize)> {
        if !self.is_bipartite() {
            return Err(EntglError::NotBipartite(self.dims.len()));
        }
        Ok((self.dims[0], self.dims[1]))
    }
}

/// Pure state vector with a bipartite split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureStateVector {
    amplitudes: Vec<Complex64>,
    d_a: usize,
    d_b: usize,
}

impl PureStateVector {
    pub fn new(amplitudes: Vec<Complex64>, d_a: usize, d_b: usize) -> Result<Self> {
        if amplitudes.len() != d_a * d_b {
            return Err(EntglError::DimensionMismatch(format!(
                "amplitude count {} does not equal {}x{}",
                amplitudes.len(),
                d_a,
                d_b
            )));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol::NORM {
            return Err(EntglError::InvariantViolation(format!(
                "vector norm {norm} is not 1 within tolerance"
            )));
        }
        Ok(Self {
            amplitudes,
            d_a,
            d_b,
        })
    }

    /// Normalize on construction.
    pub fn normalized(mut amplitudes: Vec<Complex64>, d_a: usize, d_b: usize) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(EntglError::InvariantViolation("zero vector".into()));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(amplitudes, d_a, d_b)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    /// Density matrix |psi><psi| as a bipartite state.
    pub fn to_state(&self) -> QuantumState {
        let n = self.amplitudes.len();
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            self.amplitudes[i] * self.amplitudes[j].conj()
        });
        QuantumState::from_trusted(m, vec![self.d_a, self.d_b])
    }
}

/// Result of a Schmidt decomposition: descending coefficients and the two
/// orthonormal local bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtData {
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<Vec<Complex64>>,
    pub right_basis: Vec<Vec<Complex64>>,
    pub rank: usize,
}

/// Reduced state on the subsystems listed in `keep` (0-based, leftmost
/// tensor factor is index 0); trace is preserved.
pub fn partial_trace(s: &QuantumState, keep: &[usize]) -> Result<QuantumState> {
    let dims = s.dims();
    let n_sub = dims.len();
    if keep.is_empty() {
        return Err(EntglError::InvalidSubsystem {
            index: 0,
            count: n_sub,
        });
    }
    let mut seen = vec![false; n_sub];
    for &k in keep {
        if k >= n_sub {
            return Err(EntglError::InvalidSubsystem {
                index: k,
                count: n_sub,
            });
        }
        seen[k] = true;
    }
    let traced: Vec<usize> = (0..n_sub).filter(|i| !seen[*i]).collect();
    let keep_sorted: Vec<usize> = {
        let mut k: Vec<usize> = keep.to_vec();
        k.sort_unstable();
        k.dedup();
        k
    };
    let out_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let out_total: usize = out_dims.iter().product();
    let trace_total: usize = traced_dims.iter().product();

    let mut out = ComplexMatrix::zeros(out_total, out_total);
    let mut kept_row = vec![0usize; keep_sorted.len()];
    let mut kept_col = vec![0usize; keep_sorted.len()];
    let mut traced_digits = vec![0usize; traced.len()];
    let mut full_row = vec![0usize; n_sub];
    let mut full_col = vec![0usize; n_sub];
    for kr in 0..out_total {
        decompose(kr, &out_dims, &mut kept_row);
        for kc in 0..out_total {
            decompose(kc, &out_dims, &mut kept_col);
            for (slot, &sub) in keep_sorted.iter().enumerate() {
                full_row[sub] = kept_row[slot];
                full_col[sub] = kept_col[slot];
            }
            // traced digits run over the diagonal of the discarded factors
            let mut acc = C_ZERO;
            for t in 0..trace_total {
                decompose(t, &traced_dims, &mut traced_digits);
                for (slot, &sub) in traced.iter().enumerate() {
                    full_row[sub] = traced_digits[slot];
                    full_col[sub] = traced_digits[slot];
                }
                acc += s.matrix().get(compose(&full_row, dims), compose(&full_col, dims));
            }
            out.set(kr, kc, acc);
        }
    }
    let dims_out = if out_dims.len() == 1 {
        // QuantumState requires at least two factors; report a single kept
        // subsystem as itself times a trivial factor of dimension 1.
        vec![out_dims[0], 1]
    } else {
        out_dims
    };
    Ok(QuantumState::from_trusted(out, dims_out))
}

/// Transposition applied to one tensor factor. Hermiticity is preserved and
/// the operation is an involution.
pub fn partial_transpose(s: &QuantumState, subsystem: usize) -> Result<ComplexMatrix> {
    partial_transpose_matrix(s.matrix(), s.dims(), subsystem)
}

/// Partial transposition on a raw matrix with explicit subsystem dims.
pub fn partial_transpose_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    subsystem: usize,
) -> Result<ComplexMatrix> {
    if subsystem >= dims.len() {
        return Err(EntglError::InvalidSubsystem {
            index: subsystem,
            count: dims.len(),
        });
    }
    let total: usize = dims.iter().product();
    assert_eq!(m.n_rows(), total);
    let mut out = ComplexMatrix::zeros(total, total);
    let mut row_d = vec![0usize; dims.len()];
    let mut col_d = vec![0usize; dims.len()];
    for i in 0..total {
        for j in 0..total {
            decompose(i, dims, &mut row_d);
            decompose(j, dims, &mut col_d);
            std::mem::swap(&mut row_d[subsystem], &mut col_d[subsystem]);
            out.set(compose(&row_d, dims), compose(&col_d, dims), m.get(i, j));
        }
    }
    Ok(out)
}

/// Realigned matrix `R(rho)` of a bipartite state: the index rearrangement
/// `|i><j| (x) |k><l|  ->  |i><k| on rows, |j><l| on columns`, so that a
/// product state maps to a rank-one matrix.
pub fn realign(s: &QuantumState) -> Result<ComplexMatrix> {
    let (da, db) = s.bipartite_dims()?;
    let m = s.matrix();
    let mut out = ComplexMatrix::zeros(da * da, db * db);
    for a in 0..da {
        for b in 0..da {
            for c in 0..db {
                for d in 0..db {
                    // R(rho)[(a b),(c d)] = rho[(a c),(b d)]
                    out.set(a * da + b, c * db + d, m.get(a * db + c, b * db + d));
                }
            }
        }
    }
    Ok(out)
}

/// Trace norm: the sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    linalg::singular_values(a).iter().sum()
}

/// Schmidt decomposition of a bipartite pure state via the SVD of its
/// coefficient matrix.
pub fn schmidt_decompose(psi: &PureStateVector) -> SchmidtData {
    let (da, db) = (psi.d_a(), psi.d_b());
    let coeff = ComplexMatrix::from_fn(da, db, |i, j| psi.amplitudes()[i * db + j]);
    let (u, s, v) = linalg::svd_full(&coeff);
    let rank = s.iter().filter(|&&x| x > tol::RANK).count();
    let k = s.len();
    let left: Vec<Vec<Complex64>> = (0..k).map(|c| (0..da).map(|r| u.get(r, c)).collect()).collect();
    // psi_ij = sum_k s_k U_ik conj(V_jk), so the right vectors are conj(V) columns
    let right: Vec<Vec<Complex64>> = (0..k)
        .map(|c| (0..db).map(|r| v.get(r, c).conj()).collect())
        .collect();
    SchmidtData {
        coefficients: s,
        left_basis: left,
        right_basis: right,
        rank,
    }
}

/// The maximally entangled vector `sum_i |ii> / sqrt(d)`.
pub fn max_entangled(d: usize) -> PureStateVector {
    assert!(d >= 2, "max_entangled requires d >= 2");
    let mut amps = vec![C_ZERO; d * d];
    let w = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        amps[i * d + i] = w;
    }
    PureStateVector::new(amps, d, d).expect("construction is exact")
}

/// Projector onto the maximally entangled state on d (x) d.
pub fn max_entangled_projector(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    let w = Complex64::new(1.0 / d as f64, 0.0);
    for i in 0..d {
        for j in 0..d {
            m.set(i * d + i, j * d + j, w);
        }
    }
    m
}

/// The swap (flip) operator `F = sum_ij |ij><ji|` on d (x) d.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m.set(i * d + j, j * d + i, C_ONE);
        }
    }
    m
}

/// `Z = sum_i |ii><ii|` on d (x) d.
pub fn diag_correlation_projector(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        m.set(i * d + i, i * d + i, C_ONE);
    }
    m
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    let scale = h.one_norm().max(1.0);
    if !h.is_hermitian(tol::HERM * scale) {
        return Err(EntglError::NotHermitian);
    }
    Ok(linalg::herm_eigenvalues(h)[0])
}

/// True iff the partial transpose has smallest eigenvalue >= -tol.
pub fn is_ppt(s: &QuantumState, tolerance: f64) -> Result<bool> {
    if !s.is_bipartite() {
        return Err(EntglError::NotBipartite(s.dims().len()));
    }
    let pt = partial_transpose(s, 1)?;
    Ok(linalg::herm_eigenvalues(&pt)[0] >= -tolerance)
}

/// Overlap `Tr(rho P_+)` with the computational-basis maximally entangled
/// state. This is the fixed-basis overlap, not the maximum over all
/// maximally entangled states.
pub fn max_entangled_fidelity(s: &QuantumState) -> Result<f64> {
    let (da, db) = s.bipartite_dims()?;
    if da != db {
        return Err(EntglError::DimensionMismatch(format!(
            "fully entangled fraction needs d_a = d_b, got {da} and {db}"
        )));
    }
    let p = max_entangled_projector(da);
    let mut acc = C_ZERO;
    for i in 0..da * da {
        for j in 0..da * da {
            acc += p.get(i, j) * s.matrix().get(j, i);
        }
    }
    Ok(acc.re)
}

/// Reorder tensor factors of a square matrix: factor `i` of the output is
/// factor `perm[i]` of the input.
pub fn reorder_subsystems(m: &ComplexMatrix, dims: &[usize], perm: &[usize]) -> ComplexMatrix {
    let total: usize = dims.iter().product();
    assert_eq!(m.n_rows(), total);
    assert_eq!(perm.len(), dims.len());
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut out = ComplexMatrix::zeros(total, total);
    let n = dims.len();
    let mut rd = vec![0usize; n];
    let mut cd = vec![0usize; n];
    let mut nrd = vec![0usize; n];
    let mut ncd = vec![0usize; n];
    for i in 0..total {
        for j in 0..total {
            decompose(i, dims, &mut rd);
            decompose(j, dims, &mut cd);
            for k in 0..n {
                nrd[k] = rd[perm[k]];
                ncd[k] = cd[perm[k]];
            }
            out.set(compose(&nrd, &new_dims), compose(&ncd, &new_dims), m.get(i, j));
        }
    }
    out
}

/// Decompose a flat index into mixed-radix digits, most significant first.
#[inline]
pub fn decompose(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

/// Inverse of `decompose`.
#[inline]
pub fn compose(digits: &[usize], dims: &[usize]) -> usize {
    let mut idx = 0;
    for k in 0..dims.len() {
        idx = idx * dims[k] + digits[k];
    }
    idx
}
