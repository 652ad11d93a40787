//! Dense complex matrices, Hermitian spectral tools, projections and Haar sampling.
//!
//! Every operator in the crate is carried by [`ComplexMatrix`], a square,
//! finite-valued wrapper around `nalgebra::DMatrix<Complex64>`. Matrices
//! serialize to the shared JSON layout
//! `{"n": int, "data": [[[re, im], ...], ...]}` in row-major order.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexVector = DVector<Complex64>;

/// Relative Frobenius tolerance for the Hermitian precondition of [`spectral_decomp`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Default absolute eigenvalue tolerance for projection validation.
pub const PROJECTION_TOL: f64 = 1e-8;

/// Per-dimension tolerance on `||U*U - I||_F` for [`UnitaryMatrix`].
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Wraps a dense matrix, checking squareness, `n >= 1` and finiteness.
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::NotSquare {
                rows: inner.nrows(),
                cols: inner.ncols(),
            });
        }
        if inner.nrows() == 0 {
            return Err(Error::EmptyMatrix);
        }
        let n = inner.nrows();
        for col in 0..n {
            for row in 0..n {
                let z = inner[(row, col)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row, col });
                }
            }
        }
        Ok(Self(inner))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Internal constructor for results of arithmetic on already-valid matrices.
    pub(crate) fn wrap(inner: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(inner.nrows(), inner.ncols());
        Self(inner)
    }

    pub(crate) fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(n, n, f))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    /// The matrix unit `E_ij`: a single 1 at row `i`, column `j`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = Complex64::new(1.0, 0.0);
        Self(m)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Outer product `x y*`.
    pub fn outer(x: &ComplexVector, y: &ComplexVector) -> Self {
        Self(x * y.adjoint())
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.diagonal().iter().sum()
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conjugate(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// `(M + M*) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// `||M - M*||_F / max(1, ||M||_F)`
    pub fn hermitian_deviation(&self) -> f64 {
        (&self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
            / self.frobenius_norm().max(1.0)
    }

    /// `(M x, x) = x* M x`
    pub fn expectation(&self, x: &ComplexVector) -> Complex64 {
        x.dotc(&(&self.0 * x))
    }

    pub fn apply_to(&self, x: &ComplexVector) -> ComplexVector {
        &self.0 * x
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        self.0.column(j).into_owned()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    data: Vec<Vec<[f64; 2]>>,
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        let n = m.n();
        let data = (0..n)
            .map(|i| (0..n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        MatrixJson { n, data }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Self> {
        if json.data.len() != json.n {
            return Err(Error::DimensionMismatch {
                expected: json.n,
                found: json.data.len(),
            });
        }
        let rows: Vec<Vec<Complex64>> = json
            .data
            .iter()
            .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        Self::from_rows(&rows)
    }
}

/// Serializes a vector as `[[re, im], ...]`.
pub fn vector_to_json(x: &ComplexVector) -> serde_json::Value {
    serde_json::Value::Array(x.iter().map(|z| serde_json::json!([z.re, z.im])).collect())
}

#[derive(Clone, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let deviation = unitarity_defect(&m);
        if deviation > UNITARY_TOL * m.n() as f64 {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Multiplies by the global phase `e^{i alpha}`.
    pub fn with_phase(&self, alpha: f64) -> Self {
        Self(self.0.scale(Complex64::from_polar(1.0, alpha)))
    }

    /// Fixes the global phase so that the first entry of the first column whose
    /// modulus exceeds `1e-8` is real and positive.
    pub fn canonical_phase(&self) -> Self {
        let first = self.0.column(0);
        match first.iter().find(|z| z.norm() > 1e-8) {
            Some(z) => Self(self.0.scale(z.conj() / z.norm())),
            None => self.clone(),
        }
    }

    /// Returns `(theta, ||self - e^{i theta} other||_F)` for the phase `theta`
    /// that minimizes the distance.
    pub fn phase_aligned_distance(&self, other: &UnitaryMatrix) -> (f64, f64) {
        let overlap = (other.0.adjoint().inner() * self.0.inner()).trace();
        let theta = if overlap.norm() > 0.0 {
            overlap.arg()
        } else {
            0.0
        };
        let aligned = other.0.scale(Complex64::from_polar(1.0, theta));
        (theta, self.0.distance(&aligned))
    }
}

impl fmt::Debug for UnitaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Unitary{:?}", self.0)
    }
}

impl Serialize for UnitaryMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

pub fn unitarity_defect(m: &ComplexMatrix) -> f64 {
    (&(&m.adjoint() * m) - &ComplexMatrix::identity(m.n())).frobenius_norm()
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn min(&self) -> (f64, ComplexVector) {
        (self.eigenvalues[0], self.eigenvectors.column(0))
    }

    pub fn max(&self) -> (f64, ComplexVector) {
        let last = self.eigenvalues.len() - 1;
        (self.eigenvalues[last], self.eigenvectors.column(last))
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = self.eigenvectors.inner();
        let lambda = DMatrix::from_diagonal(&DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        ComplexMatrix::wrap(v * lambda * v.adjoint())
    }
}

pub fn spectral_decomp(h: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let deviation = h.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(eigh(h))
}

/// Spectral decomposition of the Hermitian part of `h`, with no precondition.
pub(crate) fn eigh(h: &ComplexMatrix) -> SpectralDecomposition {
    let eig = SymmetricEigen::new(h.hermitian_part().into_inner());
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |row, col| eig.eigenvectors[(row, order[col])]);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Ascending eigenvalues of the Hermitian part of `h`.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    eigh(h).eigenvalues
}

/// Least eigenvalue and a matching unit eigenvector of the Hermitian part of `h`.
pub(crate) fn min_eigenpair(h: &ComplexMatrix) -> (f64, ComplexVector) {
    eigh(h).min()
}

/// Hermitian idempotent with a certified rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    matrix: ComplexMatrix,
    rank: usize,
    tol: f64,
}

impl Projection {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }
}

pub fn validate_projection(m: &ComplexMatrix, tol: f64) -> Result<Projection> {
    let scale = m.frobenius_norm().max(1.0);
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let spectrum = eigh(m);
    let mut rank = 0;
    for &lambda in &spectrum.eigenvalues {
        if (lambda - 1.0).abs() <= tol {
            rank += 1;
        } else if lambda.abs() > tol {
            return Err(Error::NotAProjection {
                reason: format!("eigenvalue {lambda} is not within {tol:e} of 0 or 1"),
            });
        }
    }
    let idempotency = (&(m * m) - m).frobenius_norm();
    if idempotency > tol * scale {
        return Err(Error::NotAProjection {
            reason: format!("||M^2 - M||_F = {idempotency:e} exceeds {tol:e}"),
        });
    }
    Ok(Projection {
        matrix: m.clone(),
        rank,
        tol,
    })
}

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`.
pub(crate) fn derived_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `n x n` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| complex_gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ginibre(n, rng).hermitian_part()
}

pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexVector {
    loop {
        let x = DVector::from_fn(n, |_, _| complex_gaussian(rng));
        let norm = x.norm();
        if norm > 1e-8 {
            return x.unscale(norm);
        }
    }
}

pub fn haar_unitary(n: usize, seed: u64) -> UnitaryMatrix {
    haar_unitary_with_rng(n, &mut rng_from_seed(seed))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the columns of `Q`
/// rephased so that the diagonal of `R` is real and positive.
pub fn haar_unitary_with_rng<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryMatrix {
    assert!(n >= 1, "dimension must be positive");
    let qr = ginibre(n, rng).into_inner().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix(ComplexMatrix::wrap(q))
}

pub fn random_rank_k_projection(n: usize, k: usize, seed: u64) -> Result<Projection> {
    random_rank_k_projection_with_rng(n, k, &mut rng_from_seed(seed))
}

/// `U diag(1 x k, 0 x (n-k)) U*` for Haar `U`.
pub fn random_rank_k_projection_with_rng<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<Projection> {
    if k == 0 || k >= n {
        return Err(Error::BadRank { k, n });
    }
    let u = haar_unitary_with_rng(n, rng);
    let frame = u.matrix().inner().columns(0, k).into_owned();
    let p = ComplexMatrix::wrap(&frame * frame.adjoint()).hermitian_part();
    let proj = validate_projection(&p, PROJECTION_TOL)?;
    debug_assert_eq!(proj.rank(), k);
    Ok(proj)
}

/// Rank-`|subset|` projection onto the span of the chosen columns of `basis`.
pub fn basis_projection(basis: &UnitaryMatrix, subset: &[usize]) -> ComplexMatrix {
    let n = basis.n();
    let mut p = ComplexMatrix::zeros(n);
    for &i in subset {
        let col = basis.matrix().column(i);
        p = &p + &ComplexMatrix::outer(&col, &col);
    }
    p.hermitian_part()
}
