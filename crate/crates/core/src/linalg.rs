//! Dense complex linear algebra: matrices, Hermitian eigensystems, states,
//! Kronecker products and seeded random sampling.
//!
//! Storage is dense `faer` matrices throughout. Hermitian eigensolves route
//! through a real symmetric solver whenever every imaginary part is exactly
//! zero, which is the case for the Fock-basis oscillator operators.

use faer::{Mat, MatRef, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::policy::Tolerances;

pub use num_complex::Complex64 as C64;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn init_parallelism() {
    static ONCE: std::sync::Once = std::sync::Once::new();
    // Parallelism is handled at the grid level with rayon.
    ONCE.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// Dense complex matrix, row-major in its public constructors.
#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    mat: Mat<C64>,
}

impl PartialEq for ComplexMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows() == other.rows()
            && self.cols() == other.cols()
            && (0..self.rows())
                .all(|i| (0..self.cols()).all(|j| self.mat[(i, j)] == other.mat[(i, j)]))
    }
}

impl ComplexMatrix {
    /// Build from `rows * cols` entries in row-major order.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self::from_fn(rows, cols, |i, j| entries[i * cols + j]))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            mat: Mat::from_fn(rows, cols, f),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| ZERO)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(
            n,
            n,
            |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO },
        )
    }

    pub(crate) fn from_mat(mat: Mat<C64>) -> Self {
        Self { mat }
    }

    pub(crate) fn as_mat(&self) -> MatRef<'_, C64> {
        self.mat.as_ref()
    }

    pub fn rows(&self) -> usize {
        self.mat.nrows()
    }

    pub fn cols(&self) -> usize {
        self.mat.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.mat[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_mat(self.mat.adjoint().to_owned())
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::DimensionMismatch {
                left: self.cols(),
                right: rhs.rows(),
            });
        }
        Ok(Self::from_mat(&self.mat * &rhs.mat))
    }

    fn check_same_shape(&self, rhs: &ComplexMatrix) -> Result<()> {
        if self.rows() != rhs.rows() || self.cols() != rhs.cols() {
            return Err(Error::DimensionMismatch {
                left: self.rows() * self.cols(),
                right: rhs.rows() * rhs.cols(),
            });
        }
        Ok(())
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> Result<Self> {
        self.check_same_shape(rhs)?;
        Ok(Self::from_mat(&self.mat + &rhs.mat))
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> Result<Self> {
        self.check_same_shape(rhs)?;
        Ok(Self::from_mat(&self.mat - &rhs.mat))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_fn(self.rows(), self.cols(), |i, j| self.mat[(i, j)] * c)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols() {
            return Err(Error::DimensionMismatch {
                left: self.cols(),
                right: v.len(),
            });
        }
        Ok(mat_vec(self.as_mat(), v))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        let g = gram(self);
        g.max_eigenvalue().max(0.0).sqrt()
    }
}

pub(crate) fn mat_vec(m: MatRef<'_, C64>, v: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; m.nrows()];
    for j in 0..m.ncols() {
        let vj = v[j];
        if vj == ZERO {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += m[(i, j)] * vj;
        }
    }
    out
}

pub(crate) fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub(crate) fn norm_sq(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Hermitian matrix; exactly Hermitian after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

/// Eigenvalues in ascending order with orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    /// Column `k` as an amplitude vector.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.rows())
            .map(|i| self.vectors.get(i, k))
            .collect()
    }

    pub fn max_value(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }
}

impl HermitianMatrix {
    /// Validate `m = m†` within the policy tolerance, then symmetrize exactly.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, Tolerances::DEFAULT.hermitian)
    }

    pub fn with_tolerance(m: ComplexMatrix, rel_tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let n = m.rows();
        let scale = m.max_abs();
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in i..n {
                asym = asym.max((m.get(i, j) - m.get(j, i).conj()).norm());
            }
        }
        if asym > rel_tol * scale {
            return Err(Error::NotHermitian {
                asymmetry: asym,
                scale,
            });
        }
        let mat = Mat::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(m.get(i, i).re, 0.0)
            } else {
                (m.get(i, j) + m.get(j, i).conj()) * 0.5
            }
        });
        Ok(Self {
            inner: ComplexMatrix::from_mat(mat),
        })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self {
            inner: ComplexMatrix::from_real_diagonal(diag),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.inner.get(i, j)
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_complex(self) -> ComplexMatrix {
        self.inner
    }

    /// True when every entry has an exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.inner.mat[(i, j)].im == 0.0))
    }

    pub(crate) fn real_part(&self) -> Mat<f64> {
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| self.inner.mat[(i, j)].re)
    }

    /// `self + s * other`, still Hermitian for real `s`.
    pub fn add_scaled(&self, other: &HermitianMatrix, s: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let n = self.dim();
        Ok(Self {
            inner: ComplexMatrix::from_fn(n, n, |i, j| self.get(i, j) + other.get(i, j) * s),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: self.inner.scale(C64::new(s, 0.0)),
        }
    }

    pub fn eigensystem(&self) -> Eigensystem {
        hermitian_eigensystem(self)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        init_parallelism();
        if self.is_real() {
            real_eigenvalues(self.real_part().as_ref())
        } else {
            self.inner
                .mat
                .self_adjoint_eigenvalues(Side::Lower)
                .expect("Hermitian eigenvalue iteration failed")
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("non-empty matrix")
    }

    /// Reject matrices with an eigenvalue below `-tol`.
    pub fn check_psd(&self, tol: f64) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < -tol {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }
}

pub(crate) fn real_eigenvalues(m: MatRef<'_, f64>) -> Vec<f64> {
    init_parallelism();
    m.self_adjoint_eigenvalues(Side::Lower)
        .expect("symmetric eigenvalue iteration failed")
}

pub(crate) fn real_eigensystem(m: MatRef<'_, f64>) -> Eigensystem {
    init_parallelism();
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .expect("symmetric eigen iteration failed");
    let values = evd.S().column_vector().iter().copied().collect();
    let u = evd.U();
    let vectors = ComplexMatrix::from_fn(u.nrows(), u.ncols(), |i, j| C64::new(u[(i, j)], 0.0));
    Eigensystem { values, vectors }
}

pub(crate) fn complex_eigensystem(m: MatRef<'_, C64>) -> Eigensystem {
    init_parallelism();
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .expect("Hermitian eigen iteration failed");
    let values = evd.S().column_vector().iter().map(|z| z.re).collect();
    Eigensystem {
        values,
        vectors: ComplexMatrix::from_mat(evd.U().to_owned()),
    }
}

/// Full eigensystem of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigensystem(h: &HermitianMatrix) -> Eigensystem {
    if h.is_real() {
        real_eigensystem(h.real_part().as_ref())
    } else {
        complex_eigensystem(h.inner.as_mat())
    }
}

/// `A†A`, Hermitian and positive semidefinite.
pub fn gram(a: &ComplexMatrix) -> HermitianMatrix {
    let prod = a.mat.adjoint() * &a.mat;
    let n = prod.nrows();
    // Symmetrize away rounding in the product.
    let mat = Mat::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(prod[(i, i)].re, 0.0)
        } else {
            (prod[(i, j)] + prod[(j, i)].conj()) * 0.5
        }
    });
    HermitianMatrix {
        inner: ComplexMatrix::from_mat(mat),
    }
}

/// Pure state vector; sub-normalized vectors (norm ≤ 1) are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let n2 = norm_sq(&amplitudes);
        if n2 > 1.0 + Tolerances::DEFAULT.state_norm {
            return Err(Error::InvalidState(format!(
                "squared norm {n2} exceeds one"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescale to unit norm. Fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm_sq(&amplitudes).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        for z in &mut amplitudes {
            *z /= n;
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[k] = ONE;
        Self { amplitudes }
    }

    pub(crate) fn from_unchecked(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.amplitudes)
    }

    /// Product state `self ⊗ other` with the same block convention as [`tensor`].
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                out.push(a * b);
            }
        }
        PureState { amplitudes: out }
    }
}

/// Positive unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    inner: HermitianMatrix,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        let h = HermitianMatrix::with_tolerance(m, tol.hermitian)?;
        let min = h.min_eigenvalue();
        if min < -tol.psd {
            return Err(Error::InvalidState(format!(
                "density matrix has eigenvalue {min:.3e}"
            )));
        }
        let tr: f64 = (0..h.dim()).map(|i| h.get(i, i).re).sum();
        if (tr - 1.0).abs() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr} differs from one")));
        }
        Ok(Self { inner: h })
    }

    /// `|φ⟩⟨φ|` for a unit vector.
    pub fn from_pure(state: &PureState) -> Result<Self> {
        Self::mixture(&[(1.0, state)])
    }

    /// `Σ w_k |φ_k⟩⟨φ_k|` with nonnegative weights.
    pub fn mixture(parts: &[(f64, &PureState)]) -> Result<Self> {
        let dim = parts
            .first()
            .map(|(_, s)| s.dim())
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let mut m = Mat::<C64>::zeros(dim, dim);
        for (w, s) in parts {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: s.dim(),
                });
            }
            if *w < 0.0 {
                return Err(Error::InvalidState(format!("negative weight {w}")));
            }
            let a = s.amplitudes();
            for i in 0..dim {
                for j in 0..dim {
                    m[(i, j)] += a[i] * a[j].conj() * *w;
                }
            }
        }
        Self::new(ComplexMatrix::from_mat(m))
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.inner.get(i, j)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i).re).sum()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.inner
    }
}

/// Anything with a well-defined expectation value `Tr(Hρ)`.
pub trait QuantumState {
    fn dim(&self) -> usize;
    /// Complex `Tr(Hρ)` before the imaginary part is discarded.
    fn raw_expectation(&self, h: &HermitianMatrix) -> C64;
}

impl QuantumState for PureState {
    fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    fn raw_expectation(&self, h: &HermitianMatrix) -> C64 {
        let hv = mat_vec(h.as_complex().as_mat(), &self.amplitudes);
        inner(&self.amplitudes, &hv)
    }
}

impl QuantumState for DensityMatrix {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn raw_expectation(&self, h: &HermitianMatrix) -> C64 {
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += h.get(i, j) * self.get(j, i);
            }
        }
        acc
    }
}

/// `Tr(Hρ)` or `⟨φ|H|φ⟩`.
pub fn expectation<S: QuantumState + ?Sized>(h: &HermitianMatrix, state: &S) -> Result<f64> {
    if h.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: state.dim(),
        });
    }
    Ok(state.raw_expectation(h).re)
}

/// Kronecker product: entry `(i·p+k, j·q+l)` is `A[i,j]·B[k,l]` for `B` of shape `p×q`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * p, a.cols() * q, |r, c| {
        a.get(r / p, c / q) * b.get(r % p, c % q)
    })
}

/// Hermitian Kronecker product.
pub fn tensor_hermitian(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix {
        inner: tensor(a.as_complex(), b.as_complex()),
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 step, used to derive independent per-index seeds.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Unit vector with i.i.d. complex standard normal entries, normalized.
pub fn random_pure_state_from<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    let amps: Vec<C64> = (0..dim).map(|_| complex_normal(rng)).collect();
    // A zero draw has probability zero.
    PureState::normalized(amps).expect("nonzero Gaussian draw")
}

/// Haar-distributed pure state, deterministic per seed.
pub fn random_pure_state(dim: usize, seed: u64) -> Result<PureState> {
    if dim == 0 {
        return Err(Error::InvalidParameter(
            "dimension must be at least 1".into(),
        ));
    }
    Ok(random_pure_state_from(&mut rng_from_seed(seed), dim))
}

/// Matrix with i.i.d. complex standard normal entries.
pub fn random_complex_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
) -> ComplexMatrix {
    let entries: Vec<C64> = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    ComplexMatrix::from_fn(rows, cols, |i, j| entries[i * cols + j])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(dim: usize, seed: u64) -> HermitianMatrix {
        let mut rng = rng_from_seed(seed);
        let b = random_complex_matrix(&mut rng, dim, dim);
        HermitianMatrix::new(b.add(&b.adjoint()).unwrap()).unwrap()
    }

    fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        a.sub(b).unwrap().max_abs()
    }

    #[test]
    fn diagonal_eigensystem_is_sorted() {
        let h = HermitianMatrix::from_real_diagonal(&[3.0, 1.0]);
        let es = h.eigensystem();
        assert_eq!(es.values, vec![1.0, 3.0]);
        assert!((es.vectors.get(1, 0).norm() - 1.0).abs() < 1e-14);
        assert!((es.vectors.get(0, 1).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::new(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap();
        let vals = HermitianMatrix::new(x).unwrap().eigenvalues();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        for seed in 0..5 {
            let h = random_hermitian(6, seed);
            let es = h.eigensystem();
            let lam = ComplexMatrix::from_real_diagonal(&es.values);
            let rec = es
                .vectors
                .matmul(&lam)
                .unwrap()
                .matmul(&es.vectors.adjoint())
                .unwrap();
            let scale = 1.0 + h.as_complex().max_abs();
            assert!(max_diff(&rec, h.as_complex()) <= 1e-9 * scale);
            let max_lam = es.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for k in 0..6 {
                let v = es.vector(k);
                let hv = h.as_complex().apply(&v).unwrap();
                let resid: f64 = hv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b * es.values[k]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(resid <= 1e-9 * (1.0 + max_lam));
                for l in 0..6 {
                    let ip = inner(&v, &es.vector(l));
                    let target = if k == l { 1.0 } else { 0.0 };
                    assert!((ip - C64::new(target, 0.0)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn non_hermitian_is_rejected_with_asymmetry() {
        let m = ComplexMatrix::new(2, 2, vec![ONE, c(2.0, 0.0), c(0.5, 0.0), ONE]).unwrap();
        match HermitianMatrix::new(m) {
            Err(Error::NotHermitian { asymmetry, .. }) => assert!((asymmetry - 1.5).abs() < 1e-15),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn entry_count_checked() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![ONE; 3]),
            Err(Error::EntryCount {
                expected: 4,
                found: 3
            })
        ));
    }

    #[test]
    fn gram_examples() {
        assert_eq!(
            gram(&ComplexMatrix::identity(3)),
            HermitianMatrix::identity(3)
        );
        let a = ComplexMatrix::from_real_diagonal(&[0.0, 2.0]);
        assert_eq!(gram(&a), HermitianMatrix::from_real_diagonal(&[0.0, 4.0]));
        for seed in 0..10 {
            let mut rng = rng_from_seed(seed);
            let a = random_complex_matrix(&mut rng, 5, 5);
            assert!(gram(&a).min_eigenvalue() >= -1e-12);
        }
    }

    #[test]
    fn expectation_examples() {
        let h = HermitianMatrix::from_real_diagonal(&[0.0, 1.0]);
        let rho = DensityMatrix::from_pure(&PureState::basis(2, 0)).unwrap();
        assert_eq!(expectation(&h, &rho).unwrap(), 0.0);
        let s = 0.5f64.sqrt();
        let phi = PureState::new(vec![c(s, 0.0), c(s, 0.0)]).unwrap();
        assert!((expectation(&h, &phi).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            expectation(&h, &PureState::basis(3, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn expectation_matches_spectral_sum() {
        let h = random_hermitian(5, 11);
        let mut rng = rng_from_seed(3);
        let phis: Vec<PureState> = (0..3)
            .map(|_| random_pure_state_from(&mut rng, 5))
            .collect();
        let rho =
            DensityMatrix::mixture(&[(0.2, &phis[0]), (0.3, &phis[1]), (0.5, &phis[2])]).unwrap();
        let es = h.eigensystem();
        let mut oracle = 0.0;
        for k in 0..5 {
            // ⟨v_k|ρ|v_k⟩ computed directly from the entries.
            let a = es.vector(k);
            let mut w = ZERO;
            for i in 0..5 {
                for j in 0..5 {
                    w += a[i].conj() * rho.get(i, j) * a[j];
                }
            }
            oracle += es.values[k] * w.re;
        }
        let raw = rho.raw_expectation(&h);
        assert!(raw.im.abs() < 1e-10);
        assert!((raw.re - oracle).abs() < 1e-10);
    }

    #[test]
    fn tensor_examples() {
        let mut rng = rng_from_seed(9);
        let a = random_complex_matrix(&mut rng, 3, 2);
        let one = ComplexMatrix::identity(1);
        assert_eq!(tensor(&a, &one), a);
        let d = tensor(
            &ComplexMatrix::from_real_diagonal(&[1.0, 2.0]),
            &ComplexMatrix::identity(2),
        );
        assert_eq!(d, ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 2.0, 2.0]));

        let a = random_complex_matrix(&mut rng, 3, 3);
        let phi = random_pure_state_from(&mut rng, 3);
        let psi = random_pure_state_from(&mut rng, 2);
        let lhs = tensor(&a, &ComplexMatrix::identity(2))
            .apply(phi.tensor(&psi).amplitudes())
            .unwrap();
        let a_phi = PureState::from_unchecked(a.apply(phi.amplitudes()).unwrap());
        let rhs = a_phi.tensor(&psi);
        for (x, y) in lhs.iter().zip(rhs.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn random_state_determinism_and_norm() {
        let one = random_pure_state(1, 42).unwrap();
        assert!((one.norm_sq() - 1.0).abs() < 1e-15);
        assert_eq!(
            random_pure_state(4, 7).unwrap(),
            random_pure_state(4, 7).unwrap()
        );
        assert_ne!(
            random_pure_state(4, 7).unwrap(),
            random_pure_state(4, 8).unwrap()
        );
        assert!(random_pure_state(0, 1).is_err());
    }

    #[test]
    fn random_state_marginal_mean() {
        // |φ₁|² is uniform on [0, 1] for Haar states in dimension 2.
        let mut rng = rng_from_seed(2024);
        let n = 10_000;
        let mean = (0..n)
            .map(|_| random_pure_state_from(&mut rng, 2).amplitudes()[0].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = ComplexMatrix::from_real_diagonal(&[0.5, 0.4]);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = ComplexMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(DensityMatrix::new(negative).is_err());
        let sub = PureState::new(vec![c(0.5, 0.0), ZERO]).unwrap();
        assert!(DensityMatrix::from_pure(&sub).is_err());
        assert!(PureState::new(vec![ONE, ONE]).is_err());
    }
}
