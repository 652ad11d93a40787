//! End-to-end acceptance criteria, shared by the `selftest` command and the
//! `acceptance` test target.
//!
//! Every criterion draws its random instances from fixed streams of a base
//! seed, so a run is reproducible.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::genmaps::{
    depolarizing, perturbed_wigner, pseudo_depolarizing, scaled_trace, wigner_map,
};
use crate::matrix::{
    derived_rng, ginibre, haar_unitary_with_rng, random_hermitian,
    random_rank_k_projection_with_rng, random_unit_vector, UnitaryMatrix,
};
use crate::positivity::{positivity_certificate, DEFAULT_MAX_ITERS};
use crate::superop::SuperOp;
use crate::wigner::{
    choi_least_eigenvalue, classify, definite_set_check, lemma1_projections, vector_state_partner,
    AnalysisReport, ClassifyConfig, Reason, Variant, Verdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Criteria 1-3 with `n <= 5`.
    Quick,
    /// All criteria with `n <= 8`.
    Full,
}

impl Mode {
    pub fn max_n(self) -> usize {
        match self {
            Mode::Quick => 5,
            Mode::Full => 8,
        }
    }

    pub fn criteria(self) -> &'static [u8] {
        match self {
            Mode::Quick => &[1, 2, 3],
            Mode::Full => &[1, 2, 3, 4, 5, 6, 7, 8, 9],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2}  {}  {:<36} {} ({:.2?})",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed
        )
    }
}

pub fn name(id: u8) -> &'static str {
    match id {
        1 => "rank-one decomposition identity",
        2 => "Wigner round trip",
        3 => "hypothesis ablation truth table",
        4 => "variant discriminator consistency",
        5 => "vector-state transfer",
        6 => "definite-set identity",
        7 => "representation round trips",
        8 => "positivity optimizer calibration",
        9 => "perturbation ladder",
        _ => "unknown",
    }
}

/// Runs criterion `id`; criteria other than 1-3 ignore `max_n` where they fix their own dimensions.
pub fn run_criterion(id: u8, max_n: usize, seed: u64) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = match id {
        1 => lemma_identity(max_n, seed),
        2 => round_trip(max_n, seed),
        3 => ablation(seed),
        4 => discriminator(max_n, seed),
        5 => vector_state_transfer(max_n, seed),
        6 => definite_set(max_n, seed),
        7 => representations(seed),
        8 => optimizer_calibration(seed),
        9 => perturbation_ladder(seed),
        _ => (false, format!("no criterion {id}")),
    };
    Outcome {
        id,
        name: name(id),
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

pub fn run(mode: Mode, seed: u64) -> Vec<Outcome> {
    mode.criteria()
        .iter()
        .map(|&id| run_criterion(id, mode.max_n(), seed))
        .collect()
}

fn lemma_identity(max_n: usize, seed: u64) -> (bool, String) {
    let mut rng = derived_rng(seed, 1);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 2..=max_n {
        for k in 1..n {
            for trial in 0..20 {
                let basis = haar_unitary_with_rng(n, &mut rng);
                match lemma1_projections(n, k, &basis, trial % n) {
                    Ok(d) => worst = worst.max(d.residual),
                    Err(e) => return (false, format!("n={n} k={k}: {e}")),
                }
                cases += 1;
            }
        }
    }
    (
        worst <= 1e-12,
        format!("{cases} cases, max residual {worst:.2e} (<= 1e-12)"),
    )
}

/// A Wigner map built from a Haar unitary, with the classification it received.
pub struct ClassifiedMap {
    pub map: SuperOp,
    pub unitary: UnitaryMatrix,
    pub variant: Variant,
    pub k: usize,
    pub report: AnalysisReport,
}

/// `count` random Wigner maps (n in 2..=max_n, random variant and k), classified
/// with the default configuration.
pub fn classified_maps(count: usize, max_n: usize, seed: u64, stream: u64) -> Vec<ClassifiedMap> {
    let mut rng = derived_rng(seed, stream);
    (0..count)
        .map(|trial| {
            let n = rng.random_range(2..=max_n);
            let k = rng.random_range(1..n);
            let variant = if rng.random_bool(0.5) {
                Variant::Direct
            } else {
                Variant::Transpose
            };
            let unitary = haar_unitary_with_rng(n, &mut rng);
            let map = wigner_map(&unitary, variant);
            let config = ClassifyConfig::default().with_seed(seed.wrapping_add(trial as u64));
            let report = classify(&map, k, &config).expect("k is in range");
            ClassifiedMap {
                map,
                unitary,
                variant,
                k,
                report,
            }
        })
        .collect()
}

fn round_trip(max_n: usize, seed: u64) -> (bool, String) {
    let maps = classified_maps(200, max_n, seed, 2);
    let mut failures = 0;
    let mut worst_residual: f64 = 0.0;
    let mut worst_unitary: f64 = 0.0;
    for m in &maps {
        let Some(form) = m.report.form.as_ref() else {
            failures += 1;
            continue;
        };
        let (_, error) = form.unitary.phase_aligned_distance(&m.unitary);
        worst_residual = worst_residual.max(form.residual);
        worst_unitary = worst_unitary.max(error);
        if form.variant != m.variant || form.residual > 1e-9 || error > 1e-8 {
            failures += 1;
        }
    }
    (
        failures == 0,
        format!(
            "{} trials, {failures} failures, max residual {worst_residual:.2e} (<= 1e-9), max unitary error {worst_unitary:.2e} (<= 1e-8)",
            maps.len()
        ),
    )
}

fn ablation(seed: u64) -> (bool, String) {
    let config = ClassifyConfig::default().with_seed(seed);
    let mut notes = Vec::new();
    let mut ok = true;

    let depol = classify(&depolarizing(4, 0.5).expect("valid"), 2, &config).expect("k valid");
    let depol_ok = depol.verdict == Verdict::NotWigner(vec![Reason::RankKViolation]);
    ok &= depol_ok;
    notes.push(format!("depolarizing {:?}", depol.reasons()));

    let pseudo =
        classify(&pseudo_depolarizing(3, 1.0).expect("valid"), 1, &config).expect("k valid");
    let min_value = pseudo.positivity.as_ref().map_or(f64::NAN, |c| c.min_value);
    let pseudo_ok = pseudo.reasons().contains(&Reason::PositivityViolation)
        && (min_value + 1.0 / 3.0).abs() <= 1e-6;
    ok &= pseudo_ok;
    notes.push(format!("pseudo-depolarizing min {min_value:.9}"));

    let doubled = classify(&scaled_trace(4, 2.0), 2, &config).expect("k valid");
    let doubled_ok = doubled.reasons().contains(&Reason::UnitalityViolation);
    ok &= doubled_ok;
    notes.push(format!("2Tr(a)I/n {:?}", doubled.reasons()));

    (ok, notes.join("; "))
}

fn discriminator(max_n: usize, seed: u64) -> (bool, String) {
    let maps = classified_maps(100, max_n, seed, 4);
    let mut mismatches = 0;
    for m in &maps {
        let Some(form) = m.report.form.as_ref() else {
            mismatches += 1;
            continue;
        };
        let least = choi_least_eigenvalue(&m.map);
        let consistent = match form.variant {
            Variant::Direct => least >= -1e-9,
            Variant::Transpose => (least + 1.0).abs() <= 1e-9,
        };
        if !consistent {
            mismatches += 1;
        }
    }
    (
        mismatches == 0,
        format!("{} maps, {mismatches} mismatches", maps.len()),
    )
}

fn vector_state_transfer(max_n: usize, seed: u64) -> (bool, String) {
    let maps = classified_maps(100, max_n, seed, 5);
    let mut rng = derived_rng(seed, 50);
    let mut worst: f64 = 0.0;
    let mut missing = 0;
    for m in &maps {
        let Some(form) = m.report.form.as_ref() else {
            missing += 1;
            continue;
        };
        let n = m.map.n();
        for _ in 0..100 {
            let a = random_hermitian(n, &mut rng);
            let x = random_unit_vector(n, &mut rng);
            let y = vector_state_partner(form, &x);
            let image = m.map.apply(&a).expect("dimensions agree");
            worst = worst.max((image.expectation(&x) - a.expectation(&y)).norm());
        }
    }
    (
        missing == 0 && worst <= 1e-10,
        format!(
            "{} maps x 100 pairs, {missing} unclassified, max gap {worst:.2e} (<= 1e-10)",
            maps.len()
        ),
    )
}

fn definite_set(max_n: usize, seed: u64) -> (bool, String) {
    let maps = classified_maps(100, max_n, seed, 6);
    let mut rng = derived_rng(seed, 60);
    let mut worst: f64 = 0.0;
    let mut missing = 0;
    for m in &maps {
        if !m.report.is_wigner() {
            missing += 1;
            continue;
        }
        for _ in 0..50 {
            let q = random_rank_k_projection_with_rng(m.map.n(), m.k, &mut rng).expect("k valid");
            worst = worst.max(definite_set_check(&m.map, &q).expect("dimensions agree"));
        }
    }
    (
        missing == 0 && worst <= 1e-10,
        format!(
            "{} maps x 50 projections, {missing} unclassified, max residual {worst:.2e} (<= 1e-10)",
            maps.len()
        ),
    )
}

fn representations(seed: u64) -> (bool, String) {
    let mut rng = derived_rng(seed, 7);
    let mut inexact = 0;
    let mut worst_linearity: f64 = 0.0;
    for i in 0..1000 {
        let n = 1 + i % 4;
        let map = SuperOp::new(n, ginibre(n * n, &mut rng)).expect("square");
        let choi = map.to_choi();
        if SuperOp::from_choi(&choi) != map || SuperOp::from_choi(&choi).to_choi() != choi {
            inexact += 1;
        }
        let (a, b) = (ginibre(n, &mut rng), ginibre(n, &mut rng));
        let alpha = ginibre(1, &mut rng)[(0, 0)];
        let beta = ginibre(1, &mut rng)[(0, 0)];
        let combined = &a.scale(alpha) + &b.scale(beta);
        let lhs = map.apply(&combined).expect("dimensions agree");
        let rhs = &map.apply(&a).expect("dimensions agree").scale(alpha)
            + &map.apply(&b).expect("dimensions agree").scale(beta);
        let scale = a.frobenius_norm() + b.frobenius_norm();
        worst_linearity = worst_linearity.max(lhs.distance(&rhs) / scale);
    }
    (
        inexact == 0 && worst_linearity <= 1e-12,
        format!("1000 maps, {inexact} inexact round trips, max relative linearity residual {worst_linearity:.2e} (<= 1e-12)"),
    )
}

fn optimizer_calibration(seed: u64) -> (bool, String) {
    let mut worst: f64 = 0.0;
    for n in 2..=6 {
        let nf = n as f64;
        for factor in [0.5, 1.0, 2.0] {
            let mu = factor / (nf - 1.0);
            let map = pseudo_depolarizing(n, mu).expect("mu >= 0");
            let cert = match positivity_certificate(&map, 50, DEFAULT_MAX_ITERS, 1e-9, seed) {
                Ok(c) => c,
                Err(e) => return (false, format!("n={n} mu={mu}: {e}")),
            };
            let closed_form = (1.0 + mu) / nf - mu;
            worst = worst.max((cert.min_value - closed_form).abs());
        }
    }
    (
        worst <= 1e-6,
        format!("15 maps, max deviation {worst:.2e} (<= 1e-6)"),
    )
}

fn perturbation_ladder(seed: u64) -> (bool, String) {
    let epsilon = 1e-3;
    let mut rng = derived_rng(seed, 9);
    let mut small_failures = 0;
    let mut large_failures = 0;
    let (mut lowest, mut highest) = (f64::INFINITY, 0.0_f64);
    for trial in 0..20u64 {
        let n = 2 + (trial as usize % 3);
        let k = 1 + (trial as usize % (n - 1));
        let variant = if trial % 2 == 0 {
            Variant::Direct
        } else {
            Variant::Transpose
        };
        let u = haar_unitary_with_rng(n, &mut rng);
        let trial_seed = seed.wrapping_add(trial);

        let map = perturbed_wigner(&u, variant, epsilon, trial_seed).expect("epsilon >= 0");
        let loose = ClassifyConfig::default()
            .with_tolerance(1e-2)
            .with_seed(trial_seed);
        let report = classify(&map, k, &loose).expect("k valid");
        match report.form.as_ref() {
            Some(form) if form.residual >= epsilon / 10.0 && form.residual <= 10.0 * epsilon => {
                lowest = lowest.min(form.residual);
                highest = highest.max(form.residual);
            }
            Some(form) => {
                lowest = lowest.min(form.residual);
                highest = highest.max(form.residual);
                small_failures += 1;
            }
            None => small_failures += 1,
        }

        let map = perturbed_wigner(&u, variant, 0.1, trial_seed).expect("epsilon >= 0");
        let strict = ClassifyConfig::default().with_seed(trial_seed);
        if classify(&map, k, &strict).expect("k valid").is_wigner() {
            large_failures += 1;
        }
    }
    (
        small_failures == 0 && large_failures == 0,
        format!(
            "eps=1e-3: {small_failures}/20 failures, residuals in [{lowest:.2e}, {highest:.2e}] (within [1e-4, 1e-2]); eps=0.1: {large_failures}/20 accepted"
        ),
    )
}
