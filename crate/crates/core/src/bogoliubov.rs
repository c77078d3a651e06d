//! Bogoliubov coefficients and particle spectra.
//!
//! Analytic pairs are built from the closed-form `|β|²` of each era with
//! real non-negative `α = √(1+|β|²)`, `β = √|β|²`. Numerical pairs come from
//! projecting an evolved mode onto the plane-wave out basis
//! `f = e^{−ikη}/√(2k)`:
//! `α = −i(χ ∂f* − ∂χ f*)`, `β = i(χ ∂f − ∂χ f)`.

use crate::background::{BackgroundModel, Era, ModelKind};
use crate::modes::{self, ModeError, ModeSolution};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Default flatness gate `|a''/a|/k²` at the projection time.
pub const DEFAULT_FLATNESS: f64 = 1e-6;
/// Largest Wronskian drift accepted by [`numerical_bogoliubov`].
pub const MAX_INPUT_DRIFT: f64 = 1e-6;
/// Planck factors are exactly zero beyond this exponent.
pub const PLANCK_CUTOFF: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BogoliubovError {
    #[error("{name} = {value} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("out region is not flat at eta = {eta}: |a''/a|/k^2 = {measured:e} > {threshold:e}")]
    NotAsymptoticallyFlat {
        eta: f64,
        measured: f64,
        threshold: f64,
    },
    #[error("projection is ill-conditioned: input Wronskian drift {drift:e} > {MAX_INPUT_DRIFT:e}")]
    IllConditioned { drift: f64 },
    #[error("eta_out = {0} is not a node of the solution grid")]
    NotOnGrid(f64),
    #[error("alpha = 0, the ratio |beta/alpha|^2 is undefined")]
    DegeneratePair,
    #[error("{0}")]
    Mode(#[from] ModeError),
}

pub type Result<T, E = BogoliubovError> = std::result::Result<T, E>;

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(BogoliubovError::Domain {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BogoliubovPair {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub k: f64,
    /// `| |α|² − |β|² − 1 |`
    pub normalization_residual: f64,
}

impl BogoliubovPair {
    pub fn new(k: f64, alpha: Complex64, beta: Complex64) -> Self {
        let normalization_residual = (alpha.norm_sqr() - beta.norm_sqr() - 1.0).abs();
        Self {
            alpha,
            beta,
            k,
            normalization_residual,
        }
    }

    /// Real non-negative pair with the given particle number.
    pub fn from_beta_sq(k: f64, beta_sq: f64) -> Result<Self> {
        if !(beta_sq >= 0.0 && beta_sq.is_finite()) {
            return Err(BogoliubovError::Domain {
                name: "beta_sq",
                value: beta_sq,
                reason: "must be finite and >= 0",
            });
        }
        Ok(Self {
            alpha: Complex64::new((1.0 + beta_sq).sqrt(), 0.0),
            beta: Complex64::new(beta_sq.sqrt(), 0.0),
            k,
            normalization_residual: 0.0,
        })
    }

    pub fn beta_sq(&self) -> f64 {
        self.beta.norm_sqr()
    }
}

/// `(π²α²/4k²) sech²(πk/2α)`
pub fn beta_sq_power_law(k: f64, alpha: f64) -> Result<f64> {
    positive("k", k)?;
    positive("alpha", alpha)?;
    let y = PI * k / (2.0 * alpha);
    // sech y = 2e^{−y}/(1 + e^{−2y}), safe for large y
    let e = (-y).exp();
    let sech = 2.0 * e / (1.0 + e * e);
    let pref = PI * alpha / (2.0 * k);
    Ok(pref * pref * sech * sech)
}

fn planck(x: f64) -> f64 {
    if x > PLANCK_CUTOFF {
        0.0
    } else {
        1.0 / x.exp_m1()
    }
}

/// `1/(e^{2πk/H} − 1)`
pub fn beta_sq_de_sitter(k: f64, h: f64) -> Result<f64> {
    positive("k", k)?;
    positive("H", h)?;
    Ok(planck(2.0 * PI * k / h))
}

/// `1/(e^{2πk/H0} − 1)`, the thermal approximation for the matter era.
pub fn beta_sq_matter(k: f64, h0: f64) -> Result<f64> {
    positive("k", k)?;
    positive("H0", h0)?;
    Ok(planck(2.0 * PI * k / h0))
}

/// No particle production in the radiation era.
pub fn beta_sq_radiation(k: f64) -> Result<f64> {
    positive("k", k)?;
    Ok(0.0)
}

/// Closed-form `|β_k|²` for an era.
pub fn analytic_beta_sq(model: &BackgroundModel, k: f64) -> Result<f64> {
    match model.era() {
        Era::Minkowski => {
            positive("k", k)?;
            Ok(0.0)
        }
        Era::RadiationDominated => beta_sq_radiation(k),
        Era::PowerLaw { alpha } => beta_sq_power_law(k, alpha),
        Era::MatterDominated { h0 } => beta_sq_matter(k, h0),
        Era::DeSitter { h } => beta_sq_de_sitter(k, h),
    }
}

/// Closed-form pair for an era, real and non-negative.
pub fn analytic_pair(model: &BackgroundModel, k: f64) -> Result<BogoliubovPair> {
    BogoliubovPair::from_beta_sq(k, analytic_beta_sq(model, k)?)
}

/// `z = |β/α|²`
pub fn z_ratio(pair: &BogoliubovPair) -> Result<f64> {
    let a2 = pair.alpha.norm_sqr();
    if a2 == 0.0 {
        return Err(BogoliubovError::DegeneratePair);
    }
    Ok(pair.beta.norm_sqr() / a2)
}

/// `λ_n = (1 − z) zⁿ` for `n = 0..=n_max`.
pub fn thermal_weights(z: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&z) {
        return Err(BogoliubovError::Domain {
            name: "z",
            value: z,
            reason: "must satisfy 0 <= z < 1",
        });
    }
    let mut out = Vec::with_capacity(n_max + 1);
    let mut w = 1.0 - z;
    for _ in 0..=n_max {
        out.push(w);
        w *= z;
    }
    Ok(out)
}

/// Projects the mode at grid node `eta_out` onto the plane-wave out basis.
pub fn numerical_bogoliubov(solution: &ModeSolution, eta_out: f64) -> Result<BogoliubovPair> {
    numerical_bogoliubov_with(solution, eta_out, DEFAULT_FLATNESS)
}

pub fn numerical_bogoliubov_with(solution: &ModeSolution, eta_out: f64, flatness: f64) -> Result<BogoliubovPair> {
    let k = solution.k();
    let i = solution.node_index(eta_out).ok_or(BogoliubovError::NotOnGrid(eta_out))?;
    let eta = solution.eta_grid()[i];
    let v = solution.spec().background().effective_potential(eta).map_err(ModeError::from)?;
    let measured = v.abs() / (k * k);
    if !(measured <= flatness) {
        return Err(BogoliubovError::NotAsymptoticallyFlat {
            eta,
            measured,
            threshold: flatness,
        });
    }
    let drift = solution.wronskian_drift();
    if !(drift <= MAX_INPUT_DRIFT) {
        return Err(BogoliubovError::IllConditioned { drift });
    }
    let (f, df) = modes::plane_wave_mode(k, eta)?;
    let (chi, dchi) = (solution.chi()[i], solution.dchi()[i]);
    let alpha = -Complex64::i() * (chi * df.conj() - dchi * f.conj());
    let beta = Complex64::i() * (chi * df - dchi * f);
    Ok(BogoliubovPair::new(k, alpha, beta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Analytic,
    Numerical,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Analytic => "analytic",
            Source::Numerical => "numerical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub k: f64,
    pub beta_sq: f64,
    pub z: f64,
}

/// Particle numbers over a k grid, sorted by ascending k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSpectrum {
    pub entries: Vec<SpectrumEntry>,
    pub era: ModelKind,
    pub source: Source,
}

/// One CSV row: `k, beta_sq, z, source, era`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub k: f64,
    pub beta_sq: f64,
    pub z: f64,
    pub source: Source,
    pub era: ModelKind,
}

impl ParticleSpectrum {
    pub fn from_pairs(pairs: &[BogoliubovPair], era: ModelKind, source: Source) -> Result<Self> {
        let mut entries = pairs
            .iter()
            .map(|p| {
                Ok(SpectrumEntry {
                    k: p.k,
                    beta_sq: p.beta_sq(),
                    z: z_ratio(p)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        entries.sort_by(|a, b| a.k.total_cmp(&b.k));
        Ok(Self { entries, era, source })
    }

    /// Closed-form spectrum of `model` on `ks`.
    pub fn analytic(model: &BackgroundModel, ks: &[f64]) -> Result<Self> {
        let pairs = ks
            .iter()
            .map(|&k| analytic_pair(model, k))
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(&pairs, model.kind(), Source::Analytic)
    }

    pub fn rows(&self) -> impl Iterator<Item = SpectrumRow> + '_ {
        self.entries.iter().map(|e| SpectrumRow {
            k: e.k,
            beta_sq: e.beta_sq,
            z: e.z,
            source: self.source,
            era: self.era,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::{Background, ConformalDomain, Orientation, SechPulse};
    use crate::modes::{evolve_mode, evolve_mode_on_grid, ModeSpec, Vacuum};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn power_law_examples() {
        // mpmath: (π²/4) sech²(π/2)
        assert_relative_eq!(beta_sq_power_law(1.0, 1.0).unwrap(), 0.39190124777049689, max_relative = 1e-14);
        assert!(beta_sq_power_law(10.0, 1.0).unwrap() < 1e-12);
        assert!(beta_sq_power_law(1.0, 1e-3).unwrap() < 1e-300);
        assert_eq!(beta_sq_power_law(1.0, 1e-6).unwrap(), 0.0);
        assert!(beta_sq_power_law(0.0, 1.0).is_err());
        assert!(beta_sq_power_law(1.0, -1.0).is_err());
    }

    #[test]
    fn planck_examples() {
        let k = 2f64.ln() / (2.0 * PI);
        assert_relative_eq!(beta_sq_de_sitter(k, 1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(beta_sq_matter(k, 1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(beta_sq_de_sitter(1.0, 2.0 * PI).unwrap(), 0.58197670686932642, max_relative = 1e-14);
        assert_relative_eq!(beta_sq_matter(1.0, 2.0 * PI).unwrap(), 0.58197670686932642, max_relative = 1e-14);
        assert_eq!(beta_sq_de_sitter(1e3, 1.0).unwrap(), 0.0);
        assert!(beta_sq_de_sitter(1e-12, 1.0).unwrap() > 1e10);
        assert!(beta_sq_de_sitter(1.0, 0.0).is_err());
    }

    #[test]
    fn radiation_is_empty() {
        for k in [1e-3, 1.0, 1e3] {
            assert_eq!(beta_sq_radiation(k).unwrap(), 0.0);
            let pair = analytic_pair(&BackgroundModel::radiation(), k).unwrap();
            assert_eq!(z_ratio(&pair).unwrap(), 0.0);
        }
    }

    #[test]
    fn z_ratio_examples() {
        let k = 2f64.ln() / (2.0 * PI);
        let pair = analytic_pair(&BackgroundModel::de_sitter(1.0).unwrap(), k).unwrap();
        assert_relative_eq!(pair.alpha.norm_sqr(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(z_ratio(&pair).unwrap(), 0.5, max_relative = 1e-14);
        let pair = analytic_pair(&BackgroundModel::de_sitter(3.0).unwrap(), 0.8).unwrap();
        assert_relative_eq!(z_ratio(&pair).unwrap(), (-2.0 * PI * 0.8 / 3.0).exp(), max_relative = 1e-13);
        let zero = BogoliubovPair::new(1.0, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        assert_eq!(z_ratio(&zero), Err(BogoliubovError::DegeneratePair));
    }

    #[test]
    fn thermal_weight_examples() {
        assert_eq!(thermal_weights(0.0, 3).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(thermal_weights(0.5, 2).unwrap(), vec![0.5, 0.25, 0.125]);
        let w = thermal_weights(0.9, 400).unwrap();
        let tail = 1.0 - w.iter().sum::<f64>();
        assert_relative_eq!(tail, 0.9f64.powi(401), max_relative = 1e-6);
        assert!(thermal_weights(1.0, 3).is_err());
        assert!(thermal_weights(-0.1, 3).is_err());
    }

    #[test]
    fn radiation_projection_is_trivial() {
        let bg: Background = BackgroundModel::radiation().into();
        for k in [0.1, 1.0, 7.0] {
            let spec = ModeSpec::new(k, bg, Vacuum::PlaneWaveIn).unwrap();
            let sol = evolve_mode(&spec, &ConformalDomain::new(&bg, 1.0, 40.0).unwrap(), 1e-10).unwrap();
            let pair = numerical_bogoliubov(&sol, 40.0).unwrap();
            assert!((pair.alpha - 1.0).norm() < 1e-8, "k={k} alpha={}", pair.alpha);
            assert!(pair.beta.norm() < 1e-8);
            assert!(pair.normalization_residual <= 1e-8);
        }
    }

    fn pulse_pair(pulse: SechPulse, k: f64, half_width: f64, points: usize, tol: f64) -> BogoliubovPair {
        let bg: Background = pulse.into();
        let lo = pulse.center() - half_width;
        let hi = pulse.center() + half_width;
        let grid: Vec<f64> = (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect();
        let spec = ModeSpec::new(k, bg, Vacuum::PlaneWaveIn).unwrap();
        let sol = evolve_mode_on_grid(&spec, &grid, Orientation::Forward, tol).unwrap();
        numerical_bogoliubov(&sol, hi).unwrap()
    }

    #[test]
    fn sech_pulse_against_closed_form_and_reference() {
        let pulse = SechPulse::new(1.0, 1.0, 0.0).unwrap();
        let pair = pulse_pair(pulse, 1.0, 25.0, 101, 1e-10);
        let reference = pulse_pair(pulse, 1.0, 25.0, 2001, 1e-12);
        assert!(pair.normalization_residual <= 1e-8);
        assert_relative_eq!(pair.beta_sq(), reference.beta_sq(), max_relative = 1e-6);
        // mpmath: cosh²((π/2)√3)/sinh²(π)
        assert_relative_eq!(reference.beta_sq(), 0.43631067992148334, max_relative = 1e-8);
        assert_relative_eq!(pulse.beta_sq_exact(1.0), 0.43631067992148334, max_relative = 1e-13);
    }

    #[test]
    fn projection_preconditions() {
        let pulse = SechPulse::new(1.0, 1.0, 0.0).unwrap();
        let bg: Background = pulse.into();
        let spec = ModeSpec::new(1.0, bg, Vacuum::PlaneWaveIn).unwrap();
        let sol = evolve_mode_on_grid(&spec, &[-25.0, 0.0, 2.0], Orientation::Forward, 1e-10).unwrap();
        match numerical_bogoliubov(&sol, 2.0) {
            Err(BogoliubovError::NotAsymptoticallyFlat { measured, .. }) => {
                assert_relative_eq!(measured, pulse.effective_potential(2.0), max_relative = 1e-14)
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(numerical_bogoliubov(&sol, 1.0), Err(BogoliubovError::NotOnGrid(1.0)));
    }

    #[test]
    fn spectrum_is_sorted_and_tagged() {
        let model = BackgroundModel::de_sitter(1.0).unwrap();
        let s = ParticleSpectrum::analytic(&model, &[2.0, 0.5, 1.0]).unwrap();
        let ks: Vec<f64> = s.entries.iter().map(|e| e.k).collect();
        assert_eq!(ks, vec![0.5, 1.0, 2.0]);
        let row = s.rows().next().unwrap();
        assert_eq!(row.source, Source::Analytic);
        assert_eq!(row.era, ModelKind::DeSitter);
        for e in &s.entries {
            assert_relative_eq!(e.z, e.beta_sq / (1.0 + e.beta_sq), max_relative = 1e-14);
        }
    }

    proptest! {
        #[test]
        fn planck_monotone(k in 1e-3f64..20.0, dk in 1e-3f64..5.0, h in 0.05f64..20.0, dh in 1e-3f64..5.0) {
            let b = beta_sq_de_sitter(k, h).unwrap();
            prop_assume!(b > 0.0 && beta_sq_de_sitter(k + dk, h).unwrap() > 0.0);
            prop_assert!(beta_sq_de_sitter(k + dk, h).unwrap() < b);
            prop_assert!(beta_sq_de_sitter(k, h + dh).unwrap() > b);
            prop_assert!(beta_sq_matter(k + dk, h).unwrap() < beta_sq_matter(k, h).unwrap());
            prop_assert!(beta_sq_matter(k, h + dh).unwrap() > beta_sq_matter(k, h).unwrap());
        }

        #[test]
        fn power_law_decreasing_in_k(k in 1e-3f64..10.0, dk in 1e-3f64..5.0, alpha in 0.1f64..5.0) {
            let b = beta_sq_power_law(k, alpha).unwrap();
            prop_assert!(b >= 0.0);
            prop_assert!(beta_sq_power_law(k + dk, alpha).unwrap() < b);
        }

        #[test]
        fn analytic_pair_normalized(k in 1e-3f64..10.0, h in 0.1f64..10.0) {
            let pair = analytic_pair(&BackgroundModel::de_sitter(h).unwrap(), k).unwrap();
            prop_assert!((pair.alpha.norm_sqr() - pair.beta.norm_sqr() - 1.0).abs() <= 1e-12 * pair.alpha.norm_sqr());
            let z = z_ratio(&pair).unwrap();
            prop_assert!((0.0..1.0).contains(&z));
            let b = pair.beta_sq();
            prop_assert!((z - b / (1.0 + b)).abs() <= 1e-14);
        }

        #[test]
        fn thermal_weights_sum(z in 0.0f64..0.95, n in 0usize..50) {
            let w = thermal_weights(z, n).unwrap();
            let tail = 1.0 - w.iter().sum::<f64>();
            prop_assert!((tail - z.powi(n as i32 + 1)).abs() <= 1e-13);
        }
    }
}
