//! Rank-k projection decompositions, hypothesis audits and the Wigner-form
//! decomposition `φ(a) = U a U*` or `φ(a) = U a^T U*`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    basis_projection, derived_rng, eigh, random_rank_k_projection_with_rng, validate_projection,
    ComplexMatrix, ComplexVector, Projection, UnitaryMatrix, PROJECTION_TOL,
};
use crate::positivity::{
    positivity_certificate, PositivityCertificate, DEFAULT_MAX_ITERS, DEFAULT_RESTARTS,
};
use crate::superop::SuperOp;

/// Largest magnitude allowed for the non-leading eigenvalues of `φ(E_11)`.
pub const DEGENERACY_TOL: f64 = 1e-6;

/// Default acceptance threshold on the Wigner-form residual.
pub const DECOMPOSITION_TOL: f64 = 1e-6;

/// Default tolerance for pass/fail reporting of unitality, Hermiticity and positivity.
pub const CERTIFY_TOL: f64 = 1e-9;

pub const DEFAULT_SAMPLES: usize = 100;

/// Cap on the number of standard-basis subset projections in an audit.
pub const BASIS_SUBSET_CAP: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Direct,
    Transpose,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Direct => f.write_str("direct"),
            Variant::Transpose => f.write_str("transpose"),
        }
    }
}

/// A rank-one projection written as a signed combination of `k + 1` rank-k
/// projections from one atomic masa:
/// `p = (1/k) Σ_{j>=2} P_j - ((k-1)/k) P_1`.
#[derive(Debug, Clone)]
pub struct Lemma1Decomposition {
    pub p: Projection,
    /// `P_1, ..., P_{k+1}`; `P_j` is the sum of the chosen basis projections other than the j-th.
    pub projections: Vec<Projection>,
    pub k: usize,
    /// Basis columns used, with `indices[0]` the column spanning `p`.
    pub indices: Vec<usize>,
    pub residual: f64,
}

impl Lemma1Decomposition {
    /// Largest `||P_i P_j - P_j P_i||_F` over all pairs.
    pub fn max_commutator(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.projections.iter().enumerate() {
            for b in &self.projections[i + 1..] {
                let ab = a.matrix() * b.matrix();
                let ba = b.matrix() * a.matrix();
                worst = worst.max(ab.distance(&ba));
            }
        }
        worst
    }

    /// Applies the lemma's coefficients to arbitrary stand-ins for `P_1..P_{k+1}`,
    /// e.g. their images under a map.
    pub fn combine(&self, images: &[ComplexMatrix]) -> ComplexMatrix {
        lemma1_combination(images, self.k)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.p.n(),
            "k": self.k,
            "indices": self.indices,
            "p": self.p.matrix(),
            "projections": self.projections.iter().map(Projection::matrix).collect::<Vec<_>>(),
            "residual": self.residual,
        })
    }
}

/// `(1/k) Σ_{j>=2} X_j - ((k-1)/k) X_1`
pub fn lemma1_combination(terms: &[ComplexMatrix], k: usize) -> ComplexMatrix {
    assert_eq!(terms.len(), k + 1, "need k + 1 terms");
    let kf = k as f64;
    let mut sum = ComplexMatrix::zeros(terms[0].n());
    for t in &terms[1..] {
        sum = &sum + t;
    }
    &sum.scale_real(1.0 / kf) - &terms[0].scale_real((kf - 1.0) / kf)
}

/// Builds the `k + 1` rank-k projections for the rank-one projection onto
/// column `which` of `basis`. The remaining `k` columns are the next ones in
/// cyclic order.
pub fn lemma1_projections(
    n: usize,
    k: usize,
    basis: &UnitaryMatrix,
    which: usize,
) -> Result<Lemma1Decomposition> {
    if k == 0 || k >= n {
        return Err(Error::BadRank { k, n });
    }
    if basis.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: basis.n(),
        });
    }
    if which >= n {
        return Err(Error::BadIndex { index: which, n });
    }
    let indices: Vec<usize> = (0..=k).map(|offset| (which + offset) % n).collect();
    let p = validate_projection(&basis_projection(basis, &indices[..1]), PROJECTION_TOL)?;

    let mut projections = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let others: Vec<usize> = indices
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, &idx)| idx)
            .collect();
        let pj = validate_projection(&basis_projection(basis, &others), PROJECTION_TOL)?;
        debug_assert_eq!(pj.rank(), k);
        projections.push(pj);
    }

    let matrices: Vec<ComplexMatrix> = projections.iter().map(|q| q.matrix().clone()).collect();
    let residual = p.matrix().distance(&lemma1_combination(&matrices, k));
    Ok(Lemma1Decomposition {
        p,
        projections,
        k,
        indices,
        residual,
    })
}

/// Outcome of sampling whether a map sends rank-k projections to rank-k projections.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankKAudit {
    pub k: usize,
    pub samples: usize,
    pub pass_fraction: f64,
    /// Largest `||φ(Q)^2 - φ(Q)||_F` over the forward samples.
    pub max_residual: f64,
    /// The map is invertible and its inverse passes on every sample.
    pub inverse_pass: bool,
}

impl RankKAudit {
    pub fn passed(&self) -> bool {
        self.pass_fraction == 1.0 && self.inverse_pass
    }
}

/// Lexicographic k-subsets of `0..n`, at most `cap` of them.
fn basis_subsets(n: usize, k: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        if out.len() == cap {
            break;
        }
        out.push(current.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < n - k + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
    out
}

/// Random rank-k projections (sample `i` uses stream `i` of `seed`) followed by
/// the standard-basis subset projections.
pub fn audit_projections(n: usize, k: usize, samples: usize, seed: u64) -> Result<Vec<Projection>> {
    if k == 0 || k >= n {
        return Err(Error::BadRank { k, n });
    }
    let mut out = Vec::with_capacity(samples + BASIS_SUBSET_CAP);
    for i in 0..samples {
        out.push(random_rank_k_projection_with_rng(
            n,
            k,
            &mut derived_rng(seed, i as u64),
        )?);
    }
    let standard = UnitaryMatrix::identity(n);
    for subset in basis_subsets(n, k, BASIS_SUBSET_CAP) {
        out.push(validate_projection(
            &basis_projection(&standard, &subset),
            PROJECTION_TOL,
        )?);
    }
    Ok(out)
}

fn audit_map(map: &SuperOp, k: usize, projections: &[Projection], tol: f64) -> (usize, f64) {
    let check = |q: &Projection| {
        let image = map.apply_unchecked(q.matrix());
        let residual = (&(&image * &image) - &image).frobenius_norm();
        let pass = matches!(validate_projection(&image, tol), Ok(p) if p.rank() == k);
        (pass, residual)
    };

    #[cfg(feature = "parallel")]
    let results: Vec<(bool, f64)> = {
        use rayon::prelude::*;
        projections.par_iter().map(check).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(bool, f64)> = projections.iter().map(check).collect();

    results
        .into_iter()
        .fold((0, 0.0), |(passes, worst), (pass, residual)| {
            (passes + pass as usize, worst.max(residual))
        })
}

pub fn preserves_rank_k(
    map: &SuperOp,
    k: usize,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<RankKAudit> {
    let n = map.n();
    let projections = audit_projections(n, k, samples, seed)?;
    let total = projections.len();
    let (passes, max_residual) = audit_map(map, k, &projections, tol);
    let inverse_pass = match map.invert() {
        Ok(inverse) => audit_map(&inverse, k, &projections, tol).0 == total,
        Err(_) => false,
    };
    Ok(RankKAudit {
        k,
        samples: total,
        pass_fraction: passes as f64 / total as f64,
        max_residual,
        inverse_pass,
    })
}

/// `||φ(Q Q) - φ(Q)^2||_F`: how far `Q` is from the definite set of `φ`.
pub fn definite_set_check(map: &SuperOp, q: &Projection) -> Result<f64> {
    let square = q.matrix() * q.matrix();
    let image = map.apply(q.matrix())?;
    Ok(map.apply(&square)?.distance(&(&image * &image)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerForm {
    pub unitary: UnitaryMatrix,
    pub variant: Variant,
    /// `max_ij ||φ(E_ij) - model(E_ij)||_F`
    pub residual: f64,
}

impl WignerForm {
    /// `U a U*` or `U a^T U*`.
    pub fn model(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let u = self.unitary.matrix();
        let arg = match self.variant {
            Variant::Direct => a.clone(),
            Variant::Transpose => a.transpose(),
        };
        &(u * &arg) * &u.adjoint()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "variant": self.variant,
            "unitary": self.unitary,
            "residual": self.residual,
        })
    }
}

fn unit_images(map: &SuperOp) -> Vec<Vec<ComplexMatrix>> {
    let n = map.n();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| map.apply_unchecked(&ComplexMatrix::unit(n, i, j)))
                .collect()
        })
        .collect()
}

/// Closest unitary in Frobenius norm (the polar factor).
fn nearest_unitary(m: &ComplexMatrix) -> Option<UnitaryMatrix> {
    let svd = m.inner().clone().svd(true, true);
    let q = svd.u? * svd.v_t?;
    UnitaryMatrix::new(ComplexMatrix::new(q).ok()?).ok()
}

fn form_residual(images: &[Vec<ComplexMatrix>], u: &UnitaryMatrix, variant: Variant) -> f64 {
    let n = u.n();
    let cols: Vec<ComplexVector> = (0..n).map(|j| u.matrix().column(j)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let model = match variant {
                Variant::Direct => ComplexMatrix::outer(&cols[i], &cols[j]),
                Variant::Transpose => ComplexMatrix::outer(&cols[j], &cols[i]),
            };
            worst = worst.max(images[i][j].distance(&model));
        }
    }
    worst
}

fn candidate(
    images: &[Vec<ComplexMatrix>],
    u1: &ComplexVector,
    variant: Variant,
) -> Option<(UnitaryMatrix, f64)> {
    let n = u1.len();
    let columns: Vec<ComplexVector> = (0..n)
        .map(|j| match (j, variant) {
            (0, _) => u1.clone(),
            (_, Variant::Direct) => images[j][0].apply_to(u1),
            (_, Variant::Transpose) => images[0][j].apply_to(u1),
        })
        .collect();
    let raw = ComplexMatrix::new(nalgebra::DMatrix::from_columns(&columns)).ok()?;
    let u = nearest_unitary(&raw)?.canonical_phase();
    let residual = form_residual(images, &u, variant);
    Some((u, residual))
}

/// Recovers `U` and the variant from the images of the matrix units.
///
/// `φ(E_11) = u_1 u_1*` gives `u_1` up to phase. Under the direct form
/// `φ(E_j1) = u_j u_1*`, under the transposed form `φ(E_1j) = u_j u_1*`, so
/// either product with `u_1` yields the remaining columns with a common
/// phase. Both candidates are scored and the smaller residual wins.
///
/// The rank-one test on `φ(E_11)` uses `max(DEGENERACY_TOL, tol)`.
pub fn extract_unitary(map: &SuperOp, tol: f64) -> Result<WignerForm> {
    let n = map.n();
    let images = unit_images(map);
    let spectrum = eigh(&images[0][0]);
    let second = spectrum.eigenvalues[..n - 1]
        .iter()
        .fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if second > DEGENERACY_TOL.max(tol) {
        return Err(Error::DegenerateImage { second });
    }
    let (_, u1) = spectrum.max();

    let direct = candidate(&images, &u1, Variant::Direct);
    let transpose = candidate(&images, &u1, Variant::Transpose);
    let score = |c: &Option<(UnitaryMatrix, f64)>| c.as_ref().map_or(f64::INFINITY, |(_, r)| *r);
    let (direct_residual, transpose_residual) = (score(&direct), score(&transpose));

    let (best, variant) = if direct_residual <= transpose_residual {
        (direct, Variant::Direct)
    } else {
        (transpose, Variant::Transpose)
    };
    match best {
        Some((unitary, residual)) if residual <= tol => Ok(WignerForm {
            unitary,
            variant,
            residual,
        }),
        _ => Err(Error::NotWignerLike {
            direct: direct_residual,
            transpose: transpose_residual,
        }),
    }
}

/// The unit vector `y` with `(φ(a) x, x) = (a y, y)` for all `a`.
pub fn vector_state_partner(form: &WignerForm, x: &ComplexVector) -> ComplexVector {
    let y = form.unitary.matrix().adjoint().apply_to(x);
    match form.variant {
        Variant::Direct => y,
        Variant::Transpose => y.map(|z| z.conj()),
    }
}

/// Least eigenvalue of the Choi matrix: `0` for direct forms, `-1` for transposed ones.
pub fn choi_least_eigenvalue(map: &SuperOp) -> f64 {
    eigh(map.to_choi().matrix()).eigenvalues[0]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyConfig {
    pub samples: usize,
    /// Eigenvalue tolerance for validating images of rank-k projections.
    pub projection_tol: f64,
    /// Maximum accepted Wigner-form residual.
    pub decomposition_tol: f64,
    /// Tolerance for unitality, Hermiticity preservation and positivity.
    pub certify_tol: f64,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            projection_tol: PROJECTION_TOL,
            decomposition_tol: DECOMPOSITION_TOL,
            certify_tol: CERTIFY_TOL,
            restarts: DEFAULT_RESTARTS,
            max_iters: DEFAULT_MAX_ITERS,
            seed: 0,
        }
    }
}

impl ClassifyConfig {
    /// Uses a single tolerance for every check.
    pub fn with_tolerance(self, tol: f64) -> Self {
        Self {
            projection_tol: tol,
            decomposition_tol: tol,
            certify_tol: tol,
            ..self
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    UnitalityViolation,
    HermiticityViolation,
    PositivityViolation,
    RankKViolation,
    DecompositionFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Wigner,
    NotWigner(Vec<Reason>),
}

#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub n: usize,
    pub unital: bool,
    pub unitality_defect: f64,
    pub hermiticity_preserving: bool,
    /// Absent when the map is not Hermiticity-preserving.
    pub positivity: Option<PositivityCertificate>,
    pub rank_k_audit: RankKAudit,
    pub form: Option<WignerForm>,
    /// Residual of the best Wigner-form fit, when a decomposition was attempted.
    pub residual: Option<f64>,
    pub verdict: Verdict,
    pub config: ClassifyConfig,
}

impl AnalysisReport {
    pub fn is_wigner(&self) -> bool {
        self.verdict == Verdict::Wigner
    }

    pub fn reasons(&self) -> &[Reason] {
        match &self.verdict {
            Verdict::Wigner => &[],
            Verdict::NotWigner(reasons) => reasons,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let positivity = self
            .positivity
            .as_ref()
            .map(|c| c.to_json(self.config.certify_tol))
            .unwrap_or(serde_json::Value::Null);
        serde_json::json!({
            "verdict": if self.is_wigner() { "wigner" } else { "not_wigner" },
            "reasons": self.reasons(),
            "variant": self.form.as_ref().map(|f| f.variant),
            "unitary": self.form.as_ref().map(|f| &f.unitary),
            "residual": self.residual,
            "hypotheses": {
                "n": self.n,
                "unital": self.unital,
                "unitality_defect": self.unitality_defect,
                "hermiticity_preserving": self.hermiticity_preserving,
                "positivity": positivity,
                "rank_k": self.rank_k_audit,
            },
        })
    }
}

/// Checks unitality, Hermiticity preservation, positivity and rank-k
/// preservation (every check runs even after a failure), then decomposes
/// the map when all of them pass.
pub fn classify(map: &SuperOp, k: usize, config: &ClassifyConfig) -> Result<AnalysisReport> {
    let n = map.n();
    if k == 0 || k >= n {
        return Err(Error::BadRank { k, n });
    }
    let mut reasons = Vec::new();

    let unitality_defect = map.unitality_defect();
    let unital = unitality_defect <= config.certify_tol;
    if !unital {
        reasons.push(Reason::UnitalityViolation);
    }

    let hermiticity_preserving = map.is_hermiticity_preserving(config.certify_tol);
    if !hermiticity_preserving {
        reasons.push(Reason::HermiticityViolation);
    }

    // A positive map preserves Hermiticity, so failing that check also fails positivity.
    let positivity = if hermiticity_preserving {
        Some(positivity_certificate(
            map,
            config.restarts,
            config.max_iters,
            config.certify_tol,
            config.seed,
        )?)
    } else {
        None
    };
    if !positivity
        .as_ref()
        .is_some_and(|c| c.is_positive(config.certify_tol))
    {
        reasons.push(Reason::PositivityViolation);
    }

    let rank_k_audit =
        preserves_rank_k(map, k, config.samples, config.projection_tol, config.seed)?;
    if !rank_k_audit.passed() {
        reasons.push(Reason::RankKViolation);
    }

    let mut form = None;
    let mut residual = None;
    if reasons.is_empty() {
        match extract_unitary(map, config.decomposition_tol) {
            Ok(f) => {
                residual = Some(f.residual);
                form = Some(f);
            }
            Err(Error::NotWignerLike { direct, transpose }) => {
                residual = Some(direct.min(transpose));
                reasons.push(Reason::DecompositionFailure);
            }
            Err(_) => reasons.push(Reason::DecompositionFailure),
        }
    }

    let verdict = if reasons.is_empty() {
        Verdict::Wigner
    } else {
        Verdict::NotWigner(reasons)
    };
    Ok(AnalysisReport {
        n,
        unital,
        unitality_defect,
        hermiticity_preserving,
        positivity,
        rank_k_audit,
        form,
        residual,
        verdict,
        config: *config,
    })
}

/// `(a x, x)`
pub fn vector_state(a: &ComplexMatrix, x: &ComplexVector) -> Complex64 {
    a.expectation(x)
}
