//! Numerical positivity test for Hermiticity-preserving maps.
//!
//! A map is positive iff `λ_min(φ(x x*)) >= 0` for every unit vector `x`.
//! We minimize `f(x) = λ_min(φ(x x*))` over the complex unit sphere by
//! multi-start projected gradient descent. If `v` is a unit eigenvector for
//! the least eigenvalue, then `f(x) = v* φ(x x*) v = x* φ†(v v*) x`, so the
//! (sub)gradient is `M x` with `M = φ†(v v*)`, projected onto the tangent
//! space of the sphere at `x`.
//!
//! A negative result certifies non-positivity via its witness; a nonnegative
//! result is evidence only.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{
    derived_rng, min_eigenpair, random_unit_vector, vector_to_json, ComplexMatrix, ComplexVector,
};
use crate::superop::SuperOp;

pub const DEFAULT_RESTARTS: usize = 50;
pub const DEFAULT_MAX_ITERS: usize = 500;

const ARMIJO: f64 = 1e-4;
const GRADIENT_TOL: f64 = 1e-12;
const MIN_STEP: f64 = 1e-14;
const MAX_STEP: f64 = 1e3;

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityCertificate {
    /// Least eigenvalue of `φ(w w*)` at the witness `w`.
    pub min_value: f64,
    pub witness: ComplexVector,
    pub restarts: usize,
    /// The best restart stopped on a stationarity test rather than the iteration cap.
    pub converged: bool,
}

impl PositivityCertificate {
    pub fn is_positive(&self, tol: f64) -> bool {
        self.min_value >= -tol
    }

    pub fn to_json(&self, tol: f64) -> serde_json::Value {
        #[derive(Serialize)]
        struct Wire {
            min_value: f64,
            witness: serde_json::Value,
            restarts: usize,
            converged: bool,
            positive: bool,
        }
        serde_json::to_value(Wire {
            min_value: self.min_value,
            witness: vector_to_json(&self.witness),
            restarts: self.restarts,
            converged: self.converged,
            positive: self.is_positive(tol),
        })
        .expect("plain data serializes")
    }
}

struct Descent {
    value: f64,
    point: ComplexVector,
    converged: bool,
}

fn objective(map: &SuperOp, x: &ComplexVector) -> (f64, ComplexVector) {
    min_eigenpair(&map.apply_unchecked(&ComplexMatrix::outer(x, x)))
}

fn descend(map: &SuperOp, adjoint: &SuperOp, start: ComplexVector, max_iters: usize) -> Descent {
    let mut x = start;
    let (mut value, mut v) = objective(map, &x);
    let mut step = 1.0;
    let mut converged = false;

    for _ in 0..max_iters {
        let m = adjoint
            .apply_unchecked(&ComplexMatrix::outer(&v, &v))
            .hermitian_part();
        let g = m.apply_to(&x);
        let tangent = &g - &x * x.dotc(&g);
        let slope = tangent.norm_squared();
        if slope.sqrt() < GRADIENT_TOL {
            converged = true;
            break;
        }

        let mut t = step;
        let mut accepted = None;
        while t > MIN_STEP {
            let trial = &x - &tangent * num_complex::Complex64::new(t, 0.0);
            let trial = trial.unscale(trial.norm());
            let (trial_value, trial_v) = objective(map, &trial);
            if trial_value <= value - ARMIJO * t * slope {
                accepted = Some((trial, trial_value, trial_v));
                break;
            }
            t *= 0.5;
        }

        match accepted {
            Some((next, next_value, next_v)) => {
                let gain = value - next_value;
                x = next;
                value = next_value;
                v = next_v;
                step = (2.0 * t).min(MAX_STEP);
                if gain <= 1e-15 * value.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            None => {
                converged = true;
                break;
            }
        }
    }

    Descent {
        value,
        point: x,
        converged,
    }
}

/// Multi-start minimization of `λ_min(φ(x x*))` over unit vectors.
///
/// Restart `r` starts from a random unit vector drawn from stream `r` of the
/// generator seeded with `seed`, so the result does not depend on scheduling.
pub fn positivity_certificate(
    map: &SuperOp,
    restarts: usize,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Result<PositivityCertificate> {
    if restarts == 0 {
        return Err(Error::BadParameter(
            "at least one restart is required".into(),
        ));
    }
    if !map.is_hermiticity_preserving(tol.max(1e-10)) {
        return Err(Error::NotHermiticityPreserving);
    }
    let n = map.n();
    let adjoint = map.adjoint_map();
    let run = |r: usize| {
        let mut rng = derived_rng(seed, r as u64);
        let start = random_unit_vector(n, &mut rng);
        descend(map, &adjoint, start, max_iters)
    };

    #[cfg(feature = "parallel")]
    let runs: Vec<Descent> = {
        use rayon::prelude::*;
        (0..restarts).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<Descent> = (0..restarts).map(run).collect();

    let best = runs
        .into_iter()
        .reduce(|best, d| if d.value < best.value { d } else { best })
        .expect("restarts >= 1");

    let (min_value, _) = objective(map, &best.point);
    Ok(PositivityCertificate {
        min_value,
        witness: best.point,
        restarts,
        converged: best.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{haar_unitary, rng_from_seed};

    fn trace_plus_identity(n: usize, trace_weight: f64, identity_weight: f64) -> SuperOp {
        SuperOp::from_unit_images(n, |i, j| {
            let mut out = ComplexMatrix::unit(n, i, j).scale_real(identity_weight);
            if i == j {
                out = &out + &ComplexMatrix::identity(n).scale_real(trace_weight / n as f64);
            }
            out
        })
    }

    #[test]
    fn conjugation_is_positive() {
        let u = haar_unitary(4, 17);
        let map = SuperOp::from_unit_images(4, |i, j| {
            &(u.matrix() * &ComplexMatrix::unit(4, i, j)) * &u.matrix().adjoint()
        });
        let cert = positivity_certificate(&map, 20, DEFAULT_MAX_ITERS, 1e-9, 0).unwrap();
        assert!(cert.min_value >= -1e-9, "{}", cert.min_value);
        assert!(cert.is_positive(1e-9));
    }

    #[test]
    fn pseudo_depolarizing_minimum() {
        // φ(x x*) = (2/3) I - x x*
        let map = trace_plus_identity(3, 2.0, -1.0);
        let cert = positivity_certificate(&map, 10, DEFAULT_MAX_ITERS, 1e-9, 1).unwrap();
        assert!((cert.min_value + 1.0 / 3.0).abs() < 1e-6);
        assert!(!cert.is_positive(1e-9));
        assert!((cert.witness.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_minimum() {
        let map = trace_plus_identity(3, 0.7, 0.3);
        let cert = positivity_certificate(&map, 10, DEFAULT_MAX_ITERS, 1e-9, 2).unwrap();
        assert!((cert.min_value - 0.7 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn transpose_is_positive() {
        let cert = positivity_certificate(&SuperOp::transpose_map(3), 10, 200, 1e-9, 3).unwrap();
        assert!(cert.min_value.abs() < 1e-9);
    }

    #[test]
    fn non_uniform_minimum_is_found() {
        // φ(a) = D a D with D = diag(1, 2, 3) plus -0.5 Tr(a) E_33:
        // φ(x x*) = (Dx)(Dx)* - 0.5 E_33, minimized at x = e_1 with value -0.5.
        let n = 3;
        let d = ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 3.0]);
        let map = SuperOp::from_unit_images(n, |i, j| {
            let mut out = &(&d * &ComplexMatrix::unit(n, i, j)) * &d;
            if i == j {
                out = &out - &ComplexMatrix::unit(n, 2, 2).scale_real(0.5);
            }
            out
        });
        let cert = positivity_certificate(&map, 20, DEFAULT_MAX_ITERS, 1e-9, 4).unwrap();
        assert!((cert.min_value + 0.5).abs() < 1e-6, "{}", cert.min_value);
    }

    #[test]
    fn deterministic_for_seed() {
        let map = trace_plus_identity(4, 1.5, -0.5);
        let a = positivity_certificate(&map, 8, 100, 1e-9, 99).unwrap();
        let b = positivity_certificate(&map, 8, 100, 1e-9, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_non_hermiticity_preserving() {
        let mut rng = rng_from_seed(5);
        let map = SuperOp::new(2, crate::matrix::ginibre(4, &mut rng)).unwrap();
        assert!(matches!(
            positivity_certificate(&map, 4, 10, 1e-9, 0),
            Err(Error::NotHermiticityPreserving)
        ));
    }
}
