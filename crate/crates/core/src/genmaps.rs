//! Generators of Wigner maps and of control maps that break individual hypotheses.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{derived_rng, haar_unitary, random_hermitian, ComplexMatrix, UnitaryMatrix};
use crate::superop::SuperOp;
use crate::wigner::Variant;

/// Superoperator of `a ↦ U a U*` (`conj(U) ⊗ U`) or `a ↦ U a^T U*`.
pub fn wigner_map(u: &UnitaryMatrix, variant: Variant) -> SuperOp {
    let n = u.n();
    let m = u.matrix();
    // Column i + j*n holds vec(φ(E_ij)); φ(E_ij) = u_i u_j* or u_j u_i*.
    let s = ComplexMatrix::from_fn(n * n, |row, col| {
        let (k, l) = (row % n, row / n);
        let (i, j) = (col % n, col / n);
        match variant {
            Variant::Direct => m[(k, i)] * m[(l, j)].conj(),
            Variant::Transpose => m[(k, j)] * m[(l, i)].conj(),
        }
    });
    SuperOp::new(n, s).expect("n^2 x n^2 by construction")
}

/// `α a + β Tr(a) I / n`
fn identity_plus_trace(n: usize, alpha: f64, beta: f64) -> SuperOp {
    let nf = n as f64;
    let s = ComplexMatrix::from_fn(n * n, |row, col| {
        let mut v = if row == col { alpha } else { 0.0 };
        // vec(I) is supported on indices i + i*n.
        if row % (n + 1) == 0 && col % (n + 1) == 0 {
            v += beta / nf;
        }
        num_complex::Complex64::new(v, 0.0)
    });
    SuperOp::new(n, s).expect("n^2 x n^2 by construction")
}

/// `a ↦ λ a + (1 - λ) Tr(a) I / n`
pub fn depolarizing(n: usize, lambda: f64) -> Result<SuperOp> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::BadParameter(format!(
            "lambda = {lambda} must lie in [0, 1]"
        )));
    }
    Ok(identity_plus_trace(n, lambda, 1.0 - lambda))
}

/// `a ↦ (1 + μ) Tr(a) I / n - μ a`; unital, and positive iff `μ <= 1/(n-1)`.
pub fn pseudo_depolarizing(n: usize, mu: f64) -> Result<SuperOp> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::BadParameter(format!(
            "mu = {mu} must be finite and >= 0"
        )));
    }
    Ok(identity_plus_trace(n, -mu, 1.0 + mu))
}

/// `a ↦ c Tr(a) I / n`
pub fn scaled_trace(n: usize, c: f64) -> SuperOp {
    identity_plus_trace(n, 0.0, c)
}

/// `wigner_map(U, variant) + ε G`, where `G` is the superoperator of
/// `a ↦ H a H` for a random Hermitian `H`, scaled to unit Frobenius norm.
pub fn perturbed_wigner(
    u: &UnitaryMatrix,
    variant: Variant,
    epsilon: f64,
    seed: u64,
) -> Result<SuperOp> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::BadParameter(format!(
            "epsilon = {epsilon} must be finite and >= 0"
        )));
    }
    let base = wigner_map(u, variant);
    if epsilon == 0.0 {
        return Ok(base);
    }
    let n = u.n();
    let h = random_hermitian(n, &mut derived_rng(seed, 1));
    let g = SuperOp::from_unit_images(n, |i, j| &(&h * &ComplexMatrix::unit(n, i, j)) * &h);
    let norm = g.matrix().frobenius_norm();
    base.add_scaled(&g, epsilon / norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExpectedFlags {
    pub unital: bool,
    pub positive: bool,
    pub rank_k_preserving: bool,
    pub wigner: bool,
}

impl ExpectedFlags {
    fn new(unital: bool, positive: bool, rank_k_preserving: bool) -> Self {
        Self {
            unital,
            positive,
            rank_k_preserving,
            wigner: unital && positive && rank_k_preserving,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Wigner,
    Depolarizing,
    PseudoDepolarizing,
    PerturbedWigner,
}

/// A generated map's family, dimension and numeric parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapFamily {
    pub family: Family,
    pub n: usize,
    pub parameters: BTreeMap<String, f64>,
}

impl MapFamily {
    /// Hypothesis outcomes at the default tolerances, for rank `k`.
    ///
    /// Perturbed maps with `0 < ε` are flagged non-unital and non-rank-k
    /// preserving; that holds once `ε` clears the default tolerances (about `1e-6`).
    pub fn expected(&self, k: usize) -> ExpectedFlags {
        let n = self.n;
        let param = |name: &str| self.parameters.get(name).copied().unwrap_or(0.0);
        match self.family {
            Family::Wigner => ExpectedFlags::new(true, true, true),
            Family::Depolarizing => {
                let exact = param("lambda") == 1.0;
                ExpectedFlags::new(true, true, exact)
            }
            Family::PseudoDepolarizing => {
                let mu = param("mu");
                if n == 1 {
                    return ExpectedFlags::new(true, true, true);
                }
                let positive = mu <= 1.0 / (n as f64 - 1.0);
                // Q ↦ I - Q when μ = 1 and n = 2k.
                let rank_k = mu == 1.0 && n == 2 * k;
                ExpectedFlags::new(true, positive, rank_k)
            }
            Family::PerturbedWigner => {
                let exact = param("epsilon") == 0.0;
                ExpectedFlags::new(exact, true, exact)
            }
        }
    }
}

/// The generator file read by the CLI:
/// `{"family": ..., "n": int, "params": {...}, "seed": int}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl GeneratorSpec {
    fn number(&self, name: &str, default: Option<f64>) -> Result<f64> {
        match self.params.get(name) {
            Some(v) => v
                .as_f64()
                .ok_or_else(|| Error::BadParameter(format!("{name} must be a number"))),
            None => default.ok_or_else(|| Error::BadParameter(format!("missing parameter {name}"))),
        }
    }

    fn variant(&self) -> Result<Variant> {
        match self.params.get("variant") {
            None => Ok(Variant::Direct),
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|_| Error::BadParameter(format!("unknown variant {v}"))),
        }
    }

    /// Builds the map; `default_seed` is used when the spec carries no seed.
    pub fn build(&self, default_seed: u64) -> Result<(SuperOp, MapFamily)> {
        if self.n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let seed = self.seed.unwrap_or(default_seed);
        let n = self.n;
        let mut parameters = BTreeMap::new();
        let map = match self.family {
            Family::Wigner => {
                let variant = self.variant()?;
                parameters.insert(
                    "transpose".into(),
                    (variant == Variant::Transpose) as u8 as f64,
                );
                wigner_map(&haar_unitary(n, seed), variant)
            }
            Family::Depolarizing => {
                let lambda = self.number("lambda", None)?;
                parameters.insert("lambda".into(), lambda);
                depolarizing(n, lambda)?
            }
            Family::PseudoDepolarizing => {
                let mu = self.number("mu", None)?;
                parameters.insert("mu".into(), mu);
                pseudo_depolarizing(n, mu)?
            }
            Family::PerturbedWigner => {
                let variant = self.variant()?;
                let epsilon = self.number("epsilon", None)?;
                parameters.insert(
                    "transpose".into(),
                    (variant == Variant::Transpose) as u8 as f64,
                );
                parameters.insert("epsilon".into(), epsilon);
                perturbed_wigner(&haar_unitary(n, seed), variant, epsilon, seed)?
            }
        };
        Ok((
            map,
            MapFamily {
                family: self.family,
                n,
                parameters,
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{eigh, random_unit_vector, rng_from_seed};

    #[test]
    fn wigner_map_examples() {
        let id = UnitaryMatrix::identity(3);
        assert_eq!(wigner_map(&id, Variant::Direct), SuperOp::identity(3));
        assert_eq!(
            wigner_map(&id, Variant::Transpose),
            SuperOp::transpose_map(3)
        );

        let u = haar_unitary(4, 3);
        let mut rng = rng_from_seed(3);
        let map = wigner_map(&u, Variant::Direct);
        for _ in 0..10 {
            let x = random_unit_vector(4, &mut rng);
            let ux = u.matrix().apply_to(&x);
            let image = map.apply(&ComplexMatrix::outer(&x, &x)).unwrap();
            assert!(image.distance(&ComplexMatrix::outer(&ux, &ux)) < 1e-14);
        }
    }

    #[test]
    fn direct_is_conj_kron() {
        let u = haar_unitary(3, 4);
        let kron = u.matrix().conjugate().inner().kronecker(u.matrix().inner());
        let s = wigner_map(&u, Variant::Direct);
        assert!((s.matrix().inner() - kron).norm() < 1e-15);
    }

    #[test]
    fn depolarizing_examples() {
        assert_eq!(depolarizing(3, 1.0).unwrap(), SuperOp::identity(3));

        let q = crate::matrix::random_rank_k_projection(4, 2, 1).unwrap();
        let image = depolarizing(4, 0.0).unwrap().apply(q.matrix()).unwrap();
        assert!(image.distance(&ComplexMatrix::identity(4).scale_real(0.5)) < 1e-14);

        let p = ComplexMatrix::unit(3, 1, 1);
        let spectrum = eigh(&depolarizing(3, 0.5).unwrap().apply(&p).unwrap()).eigenvalues;
        for (got, want) in spectrum.iter().zip([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }

        assert!(depolarizing(3, 1.5).is_err());
        assert!(depolarizing(3, -0.1).is_err());
    }

    #[test]
    fn pseudo_depolarizing_examples() {
        assert_eq!(
            pseudo_depolarizing(3, 0.0).unwrap(),
            depolarizing(3, 0.0).unwrap()
        );
        for (n, mu, want) in [(3, 1.0, -1.0 / 3.0), (4, 1.0 / 3.0, 0.0)] {
            let map = pseudo_depolarizing(n, mu).unwrap();
            let image = map.apply(&ComplexMatrix::unit(n, 0, 0)).unwrap();
            assert!((eigh(&image).eigenvalues[0] - want).abs() < 1e-14);
            assert!(map.is_unital(1e-14));
        }
        assert!(pseudo_depolarizing(3, -1.0).is_err());
    }

    #[test]
    fn perturbed_examples() {
        let u = haar_unitary(3, 6);
        assert_eq!(
            perturbed_wigner(&u, Variant::Direct, 0.0, 1).unwrap(),
            wigner_map(&u, Variant::Direct)
        );
        let p = perturbed_wigner(&u, Variant::Transpose, 0.25, 1).unwrap();
        let diff = p
            .matrix()
            .distance(wigner_map(&u, Variant::Transpose).matrix());
        assert!((diff - 0.25).abs() < 1e-14);
        assert!(p.is_hermiticity_preserving(1e-12));
    }

    #[test]
    fn covariant_families_commute_with_conjugation() {
        let mut rng = rng_from_seed(10);
        let v = haar_unitary(4, 10);
        let vm = v.matrix();
        for map in [
            depolarizing(4, 0.3).unwrap(),
            pseudo_depolarizing(4, 2.0).unwrap(),
        ] {
            let a = crate::matrix::ginibre(4, &mut rng);
            let lhs = map.apply(&(&(vm * &a) * &vm.adjoint())).unwrap();
            let rhs = &(vm * &map.apply(&a).unwrap()) * &vm.adjoint();
            assert!(lhs.distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn spec_parsing() {
        let spec: GeneratorSpec = serde_json::from_str(
            r#"{"family":"wigner","n":3,"params":{"variant":"transpose"},"seed":7}"#,
        )
        .unwrap();
        let (map, family) = spec.build(0).unwrap();
        assert_eq!(map.n(), 3);
        assert_eq!(family.parameters["transpose"], 1.0);
        assert_eq!(spec.build(0).unwrap().0, map);

        let spec: GeneratorSpec =
            serde_json::from_str(r#"{"family":"pseudo_depolarizing","n":3,"params":{"mu":1.0}}"#)
                .unwrap();
        let (_, family) = spec.build(0).unwrap();
        assert!(!family.expected(1).positive);

        assert!(serde_json::from_str::<GeneratorSpec>(r#"{"family":"kraus","n":3}"#).is_err());
        let missing: GeneratorSpec =
            serde_json::from_str(r#"{"family":"depolarizing","n":3}"#).unwrap();
        assert!(matches!(missing.build(0), Err(Error::BadParameter(_))));
        let bad: GeneratorSpec =
            serde_json::from_str(r#"{"family":"wigner","n":2,"params":{"variant":"sideways"}}"#)
                .unwrap();
        assert!(bad.build(0).is_err());
    }

    #[test]
    fn expected_flags() {
        let fam = |family, n, params: &[(&str, f64)]| MapFamily {
            family,
            n,
            parameters: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        };
        assert!(fam(Family::Wigner, 3, &[]).expected(1).wigner);
        assert!(
            !fam(Family::Depolarizing, 3, &[("lambda", 0.5)])
                .expected(1)
                .wigner
        );
        assert!(
            fam(Family::Depolarizing, 3, &[("lambda", 1.0)])
                .expected(1)
                .wigner
        );
        assert!(
            fam(Family::PseudoDepolarizing, 2, &[("mu", 1.0)])
                .expected(1)
                .wigner
        );
        let split = fam(Family::PseudoDepolarizing, 4, &[("mu", 1.0)]).expected(2);
        assert!(split.rank_k_preserving && !split.positive && !split.wigner);
    }
}
