//! Linear maps on `n x n` matrices as `n^2 x n^2` superoperators.
//!
//! The vectorization convention is column stacking throughout:
//! `vec(A)[i + j*n] = A[i, j]`, so that `vec(X Y Z) = (Z^T ⊗ X) vec(Y)`.
//! The Choi matrix is `C = Σ_ij E_ij ⊗ φ(E_ij)`, which makes
//! `C[i*n + k, j*n + l] = S[k + l*n, i + j*n]`: the two representations are
//! a permutation of each other's entries.

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ComplexVector};

pub const CONVENTION: &str = "column-stacking";

/// Condition number above which [`SuperOp::invert`] reports `Singular`.
pub const MAX_CONDITION: f64 = 1e12;

pub fn vectorize(a: &ComplexMatrix) -> ComplexVector {
    let n = a.n();
    DVector::from_fn(n * n, |idx, _| a[(idx % n, idx / n)])
}

pub fn unvectorize(v: &ComplexVector, n: usize) -> ComplexMatrix {
    debug_assert_eq!(v.len(), n * n);
    ComplexMatrix::from_fn(n, |i, j| v[i + j * n])
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(try_from = "SuperOpJson", into = "SuperOpJson")]
pub struct SuperOp {
    n: usize,
    matrix: ComplexMatrix,
}

#[derive(Clone, PartialEq, Debug)]
pub struct ChoiMatrix {
    n: usize,
    matrix: ComplexMatrix,
}

impl SuperOp {
    pub fn new(n: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.n() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: matrix.n(),
            });
        }
        Ok(Self { n, matrix })
    }

    /// Builds the superoperator of the linear map whose action on each matrix
    /// unit `E_ij` is `image(i, j)`.
    pub fn from_unit_images(
        n: usize,
        mut image: impl FnMut(usize, usize) -> ComplexMatrix,
    ) -> Self {
        let mut s = DMatrix::zeros(n * n, n * n);
        for j in 0..n {
            for i in 0..n {
                let col = vectorize(&image(i, j));
                s.set_column(i + j * n, &col);
            }
        }
        Self {
            n,
            matrix: ComplexMatrix::wrap(s),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            matrix: ComplexMatrix::identity(n * n),
        }
    }

    /// `a ↦ a^T`, a permutation matrix.
    pub fn transpose_map(n: usize) -> Self {
        Self::from_unit_images(n, |i, j| ComplexMatrix::unit(n, j, i))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn convention(&self) -> &'static str {
        CONVENTION
    }

    /// `φ(a) = unvec(S vec(a))`
    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: a.n(),
            });
        }
        Ok(self.apply_unchecked(a))
    }

    pub(crate) fn apply_unchecked(&self, a: &ComplexMatrix) -> ComplexMatrix {
        unvectorize(&self.matrix.apply_to(&vectorize(a)), self.n)
    }

    /// The Hilbert-Schmidt adjoint map, `Tr(b* φ(a)) = Tr(φ†(b)* a)`.
    pub fn adjoint_map(&self) -> Self {
        Self {
            n: self.n,
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &SuperOp) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(Self {
            n: self.n,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn add_scaled(&self, other: &SuperOp, weight: f64) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(Self {
            n: self.n,
            matrix: &self.matrix + &other.matrix.scale_real(weight),
        })
    }

    pub fn to_choi(&self) -> ChoiMatrix {
        let n = self.n;
        let s = &self.matrix;
        let c = ComplexMatrix::from_fn(n * n, |row, col| {
            let (i, k) = (row / n, row % n);
            let (j, l) = (col / n, col % n);
            s[(k + l * n, i + j * n)]
        });
        ChoiMatrix { n, matrix: c }
    }

    pub fn from_choi(choi: &ChoiMatrix) -> Self {
        let n = choi.n;
        let c = &choi.matrix;
        let s = ComplexMatrix::from_fn(n * n, |row, col| {
            let (k, l) = (row % n, row / n);
            let (i, j) = (col % n, col / n);
            c[(i * n + k, j * n + l)]
        });
        Self { n, matrix: s }
    }

    /// `||φ(I) - I||_F <= tol`
    pub fn is_unital(&self, tol: f64) -> bool {
        self.unitality_defect() <= tol
    }

    pub fn unitality_defect(&self) -> f64 {
        let id = ComplexMatrix::identity(self.n);
        self.apply_unchecked(&id).distance(&id)
    }

    /// Checks `φ(H)` is Hermitian on the `n^2` Hermitian basis elements
    /// `E_ii`, `E_ij + E_ji` and `i(E_ij - E_ji)`.
    pub fn is_hermiticity_preserving(&self, tol: f64) -> bool {
        hermitian_basis(self.n).iter().all(|h| {
            let image = self.apply_unchecked(h);
            (&image - &image.adjoint()).frobenius_norm() <= tol * h.frobenius_norm().max(1.0)
        })
    }

    /// Inverse superoperator, or `Singular` when the condition number exceeds
    /// [`MAX_CONDITION`].
    pub fn invert(&self) -> Result<Self> {
        let svd = SVD::new(self.matrix.inner().clone(), true, true);
        let sigma = &svd.singular_values;
        let max = sigma.max();
        let min = sigma.min();
        let condition = if min > 0.0 { max / min } else { f64::INFINITY };
        if condition.is_nan() || condition > MAX_CONDITION {
            return Err(Error::Singular { condition });
        }
        let u = svd.u.as_ref().expect("left singular vectors requested");
        let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
        let inv_sigma = DMatrix::from_diagonal(&sigma.map(|s| Complex64::new(1.0 / s, 0.0)));
        let inverse = v_t.adjoint() * inv_sigma * u.adjoint();
        Ok(Self {
            n: self.n,
            matrix: ComplexMatrix::wrap(inverse),
        })
    }
}

impl ChoiMatrix {
    pub fn new(n: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.n() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: matrix.n(),
            });
        }
        Ok(Self { n, matrix })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Hermitian basis of `n x n` matrices over the reals.
pub fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(n * n);
    for i in 0..n {
        basis.push(ComplexMatrix::unit(n, i, i));
        for j in (i + 1)..n {
            let eij = ComplexMatrix::unit(n, i, j);
            let eji = ComplexMatrix::unit(n, j, i);
            basis.push(&eij + &eji);
            basis.push((&eij - &eji).scale(Complex64::new(0.0, 1.0)));
        }
    }
    basis
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Superop,
    Choi,
}

#[derive(Clone, Serialize, Deserialize)]
struct SuperOpJson {
    n: usize,
    convention: String,
    repr: Representation,
    data: ComplexMatrix,
}

impl From<SuperOp> for SuperOpJson {
    fn from(s: SuperOp) -> Self {
        SuperOpJson {
            n: s.n,
            convention: CONVENTION.to_string(),
            repr: Representation::Superop,
            data: s.matrix,
        }
    }
}

impl TryFrom<SuperOpJson> for SuperOp {
    type Error = Error;

    fn try_from(json: SuperOpJson) -> Result<Self> {
        if json.convention != CONVENTION {
            return Err(Error::Convention(json.convention));
        }
        match json.repr {
            Representation::Superop => SuperOp::new(json.n, json.data),
            Representation::Choi => Ok(SuperOp::from_choi(&ChoiMatrix::new(json.n, json.data)?)),
        }
    }
}

/// Serializes the map in its Choi representation under the same file schema.
pub fn choi_to_json(s: &SuperOp) -> serde_json::Value {
    let json = SuperOpJson {
        n: s.n,
        convention: CONVENTION.to_string(),
        repr: Representation::Choi,
        data: s.to_choi().matrix,
    };
    serde_json::to_value(json).expect("matrix JSON is infallible")
}
