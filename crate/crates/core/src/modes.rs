//! Mode functions of the rescaled field `χ_k = a u_k`.
//!
//! All modes are normalized by the Wronskian condition
//! `W[χ] = χ ∂χ* − χ* ∂χ = i`, which fixes the plane-wave amplitude to
//! `1/√(2k)` and the Hankel normalization to `√π/2`.

use crate::background::{Background, BackgroundError, ConformalDomain, ModelKind, Orientation};
use crate::ode::{self, OdeError};
use crate::specfun::{self, HankelKind, SpecialFunctionError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MIN_TOL: f64 = 1e-13;
pub const MAX_TOL: f64 = 1e-6;
pub const DEFAULT_GRID_POINTS: usize = 257;
/// Integration toward the `η = 0` singularity stops at `k|η|` equal to this.
pub const LATE_TIME_CUTOFF: f64 = 1e-3;
/// Largest `|a''/a|/k²` at which a plane wave is accepted as initial data.
pub const PLANE_WAVE_GATE: f64 = 1e-4;
/// `√(π/4)`
pub const HANKEL_NORMALIZATION: f64 = 0.886_226_925_452_758;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModeError {
    #[error("wavenumber k = {0} must be finite and > 0")]
    InvalidWavenumber(f64),
    #[error("tolerance {0:e} outside [1e-13, 1e-6]")]
    InvalidTolerance(f64),
    #[error("{0}")]
    Background(#[from] BackgroundError),
    #[error("{0}")]
    SpecialFunction(#[from] SpecialFunctionError),
    #[error("vacuum {vacuum:?} is not defined on the {background} background: {reason}")]
    IncompatibleVacuum {
        vacuum: Vacuum,
        background: &'static str,
        reason: String,
    },
    #[error("conformal time {0} is outside the domain of this mode (needs eta < 0)")]
    Domain(f64),
    #[error("grid must hold at least two strictly increasing conformal times")]
    InvalidGrid,
    #[error("integration failed: {0}")]
    Integration(#[from] OdeError),
}

pub type Result<T, E = ModeError> = std::result::Result<T, E>;

/// Initial state imposed on the mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Vacuum {
    /// `e^{−ikη}/√(2k)`, only where the potential is negligible.
    PlaneWaveIn,
    /// Exact positive-frequency solution for `a''/a = 2/η²`.
    BunchDavies,
    /// Positive-frequency Hankel solution of order ν.
    HankelSecond,
}

/// Wavenumber, background and vacuum choice for one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    k: f64,
    background: Background,
    vacuum: Vacuum,
}

fn check_k(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(ModeError::InvalidWavenumber(k))
    }
}

impl ModeSpec {
    pub fn new(k: f64, background: impl Into<Background>, vacuum: Vacuum) -> Result<Self> {
        check_k(k)?;
        let background = background.into();
        let incompatible = |reason: &str| ModeError::IncompatibleVacuum {
            vacuum,
            background: background.label(),
            reason: reason.to_owned(),
        };
        match vacuum {
            Vacuum::PlaneWaveIn => {}
            Vacuum::BunchDavies => match background.model() {
                Some(m) if (m.bessel_order() - 1.5).abs() < 1e-12 => {}
                _ => return Err(incompatible("needs a''/a = 2/eta^2")),
            },
            Vacuum::HankelSecond => match background.model() {
                Some(m) if m.bessel_order() <= specfun::MAX_ORDER => {}
                Some(_) => return Err(incompatible("Bessel order above 50")),
                None => return Err(incompatible("needs a power-law type background")),
            },
        }
        Ok(Self {
            k,
            background,
            vacuum,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn background(&self) -> &Background {
        &self.background
    }

    pub fn vacuum(&self) -> Vacuum {
        self.vacuum
    }

    /// Initial data `(χ, ∂χ)` at `eta`.
    pub fn initial_data(&self, eta: f64) -> Result<(Complex64, Complex64)> {
        self.background.check_domain(eta)?;
        match self.vacuum {
            Vacuum::PlaneWaveIn => {
                let v = self.background.effective_potential(eta)?;
                let ratio = v.abs() / (self.k * self.k);
                if ratio > PLANE_WAVE_GATE {
                    return Err(ModeError::IncompatibleVacuum {
                        vacuum: self.vacuum,
                        background: self.background.label(),
                        reason: format!("|a''/a|/k^2 = {ratio:e} at eta = {eta} exceeds {PLANE_WAVE_GATE:e}"),
                    });
                }
                plane_wave_mode(self.k, eta)
            }
            Vacuum::BunchDavies if eta < 0.0 => bunch_davies_mode(self.k, eta),
            Vacuum::BunchDavies => hankel_mode(self.k, eta, 1.5),
            Vacuum::HankelSecond => {
                let nu = self.background.model().expect("checked in new").bessel_order();
                hankel_mode(self.k, eta, nu)
            }
        }
    }

    /// The closed-form solution through the initial data, where one exists:
    /// Hankel-type vacua always, plane waves on backgrounds with `a''/a ≡ 0`.
    pub fn exact_solution(&self, eta: f64) -> Result<Option<(Complex64, Complex64)>> {
        let flat = matches!(
            self.background.model().map(|m| m.kind()),
            Some(ModelKind::Minkowski | ModelKind::RadiationDominated)
        );
        match self.vacuum {
            Vacuum::PlaneWaveIn if !flat => Ok(None),
            Vacuum::PlaneWaveIn => {
                self.background.check_domain(eta)?;
                plane_wave_mode(self.k, eta).map(Some)
            }
            _ => self.initial_data(eta).map(Some),
        }
    }
}

/// `W[χ] = χ ∂χ* − χ* ∂χ`, purely imaginary.
pub fn wronskian(chi: Complex64, dchi: Complex64) -> Complex64 {
    chi * dchi.conj() - chi.conj() * dchi
}

/// `e^{−ikη}/√(2k)` and its derivative.
pub fn plane_wave_mode(k: f64, eta: f64) -> Result<(Complex64, Complex64)> {
    check_k(k)?;
    if !eta.is_finite() {
        return Err(ModeError::Domain(eta));
    }
    let chi = Complex64::from_polar((0.5 / k).sqrt(), -k * eta);
    Ok((chi, Complex64::new(0.0, -k) * chi))
}

/// `(1/√(2k)) (1 − i/(kη)) e^{−ikη}` for `η < 0`, with its exact derivative.
pub fn bunch_davies_mode(k: f64, eta: f64) -> Result<(Complex64, Complex64)> {
    check_k(k)?;
    if !(eta.is_finite() && eta < 0.0) {
        return Err(ModeError::Domain(eta));
    }
    let x = k * eta;
    let wave = Complex64::from_polar((0.5 / k).sqrt(), -x);
    let chi = Complex64::new(1.0, -1.0 / x) * wave;
    // ∂η[(1 − i/(kη)) e^{−ikη}] = (i/(kη²) − 1/η − ik) e^{−ikη}
    let dchi = Complex64::new(-1.0 / eta, 1.0 / (k * eta * eta) - k) * wave;
    Ok((chi, dchi))
}

/// `(√π/2) √|η| H_ν(k|η|)`, positive frequency in the sense `∝ e^{−ikη}`
/// for large `k|η|`. For `η < 0` this is `H^(1)_ν`, the complex conjugate of
/// `H^(2)_ν`; for `η > 0` it is `H^(2)_ν`. Either way `W = i`.
pub fn hankel_mode(k: f64, eta: f64, nu: f64) -> Result<(Complex64, Complex64)> {
    check_k(k)?;
    if !(eta.is_finite() && eta != 0.0) {
        return Err(ModeError::Domain(eta));
    }
    let s = eta.abs();
    let x = k * s;
    let kind = if eta < 0.0 {
        HankelKind::First
    } else {
        HankelKind::Second
    };
    let (h, dh) = specfun::hankel_with_derivative(nu, x, kind)?;
    let root = s.sqrt();
    let chi = HANKEL_NORMALIZATION * root * h;
    // d/d|η|, then d|η|/dη = sign(η)
    let d_abs = HANKEL_NORMALIZATION * (h / (2.0 * root) + k * root * dh);
    let dchi = d_abs * eta.signum();
    Ok((chi, dchi))
}

/// Numerical mode on a grid of conformal times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSolution {
    spec: ModeSpec,
    eta_grid: Vec<f64>,
    chi: Vec<Complex64>,
    dchi: Vec<Complex64>,
    wronskian_error: Vec<f64>,
    wronskian_drift: f64,
    steps: usize,
}

impl ModeSolution {
    pub fn spec(&self) -> &ModeSpec {
        &self.spec
    }

    pub fn k(&self) -> f64 {
        self.spec.k
    }

    pub fn eta_grid(&self) -> &[f64] {
        &self.eta_grid
    }

    pub fn chi(&self) -> &[Complex64] {
        &self.chi
    }

    pub fn dchi(&self) -> &[Complex64] {
        &self.dchi
    }

    /// `|W − i|` per grid point.
    pub fn wronskian_error(&self) -> &[f64] {
        &self.wronskian_error
    }

    /// `max |W − i|` over the grid.
    pub fn wronskian_drift(&self) -> f64 {
        self.wronskian_drift
    }

    /// Accepted integrator steps.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.eta_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta_grid.is_empty()
    }

    /// Index of the grid node equal to `eta` (to 1e-12 relative).
    pub fn node_index(&self, eta: f64) -> Option<usize> {
        let tol = 1e-12 * eta.abs().max(f64::MIN_POSITIVE);
        let i = self.eta_grid.partition_point(|&e| e < eta - tol);
        (i < self.eta_grid.len() && (self.eta_grid[i] - eta).abs() <= tol).then_some(i)
    }

    /// `max |χ − χ_exact|/|χ_exact|` over the grid, `None` without a
    /// closed form.
    pub fn max_relative_deviation(&self) -> Result<Option<f64>> {
        let mut worst = 0.0f64;
        for (&eta, &chi) in self.eta_grid.iter().zip(&self.chi) {
            match self.spec.exact_solution(eta)? {
                Some((exact, _)) => worst = worst.max((chi - exact).norm() / exact.norm()),
                None => return Ok(None),
            }
        }
        Ok(Some(worst))
    }

    /// `u_k = χ/a` and its derivative; needs an FRW background.
    pub fn field_mode(&self) -> Result<FieldMode> {
        let bg = self.spec.background;
        let mut out = FieldMode {
            eta_grid: self.eta_grid.clone(),
            scale_factor: Vec::with_capacity(self.len()),
            phi: Vec::with_capacity(self.len()),
            dphi: Vec::with_capacity(self.len()),
        };
        for ((&eta, &chi), &dchi) in self.eta_grid.iter().zip(&self.chi).zip(&self.dchi) {
            let a = bg.scale_factor(eta)?;
            let hubble = bg.conformal_hubble(eta)?;
            let (phi, dphi) = field_from_rescaled(chi, dchi, a, hubble);
            out.scale_factor.push(a);
            out.phi.push(phi);
            out.dphi.push(dphi);
        }
        Ok(out)
    }
}

/// `φ = χ/a`, `φ' = (χ' − (a'/a) χ)/a`.
pub fn field_from_rescaled(chi: Complex64, dchi: Complex64, a: f64, conformal_hubble: f64) -> (Complex64, Complex64) {
    (chi / a, (dchi - conformal_hubble * chi) / a)
}

/// Unrescaled field mode `u_k` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMode {
    pub eta_grid: Vec<f64>,
    pub scale_factor: Vec<f64>,
    pub phi: Vec<Complex64>,
    pub dphi: Vec<Complex64>,
}

/// Grid used by [`evolve_mode`]: logarithmic in `|η|` for backgrounds
/// singular at `η = 0`, linear otherwise.
pub fn default_grid(background: &Background, eta_min: f64, eta_max: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    let same_sign = eta_min * eta_max > 0.0;
    let last = (points - 1) as f64;
    let mut grid: Vec<f64> = if background.singular_at_origin() && same_sign {
        let sign = eta_min.signum();
        let (a, b) = (eta_min.abs().ln(), eta_max.abs().ln());
        (0..points)
            .map(|i| sign * (a + (b - a) * i as f64 / last).exp())
            .collect()
    } else {
        (0..points)
            .map(|i| eta_min + (eta_max - eta_min) * i as f64 / last)
            .collect()
    };
    grid[0] = eta_min;
    grid[points - 1] = eta_max;
    grid
}

/// Integrates the mode equation over `domain` on the default grid,
/// clipping the interval at `k|η| = 10⁻³` near a singular origin.
pub fn evolve_mode(spec: &ModeSpec, domain: &ConformalDomain, tol: f64) -> Result<ModeSolution> {
    let (mut lo, mut hi) = (domain.eta_min(), domain.eta_max());
    if spec.background.singular_at_origin() {
        let cut = LATE_TIME_CUTOFF / spec.k;
        if hi < 0.0 && hi > -cut {
            hi = -cut;
        }
        if lo > 0.0 && lo < cut {
            lo = cut;
        }
        if lo >= hi {
            return Err(ModeError::InvalidGrid);
        }
    }
    let grid = default_grid(&spec.background, lo, hi, DEFAULT_GRID_POINTS);
    evolve_mode_on_grid(spec, &grid, domain.orientation(), tol)
}

/// Integrates the mode equation with initial data at the first grid point
/// (`Forward`) or the last (`Backward`), reporting the state at every node.
pub fn evolve_mode_on_grid(
    spec: &ModeSpec,
    grid: &[f64],
    orientation: Orientation,
    tol: f64,
) -> Result<ModeSolution> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(ModeError::InvalidTolerance(tol));
    }
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(ModeError::InvalidGrid);
    }
    for &eta in grid {
        spec.background.check_domain(eta)?;
    }
    if spec.background.singular_at_origin() && grid[0] < 0.0 && grid[grid.len() - 1] > 0.0 {
        return Err(ModeError::InvalidGrid);
    }

    let start = match orientation {
        Orientation::Forward => grid[0],
        Orientation::Backward => grid[grid.len() - 1],
    };
    let (chi0, dchi0) = spec.initial_data(start)?;
    let y0 = [chi0.re, chi0.im, dchi0.re, dchi0.im];
    let k2 = spec.k * spec.k;
    let background = spec.background;

    let mut potential_error = None;
    let rhs = |eta: f64, y: &[f64; 4]| {
        let v = match background.effective_potential(eta) {
            Ok(v) => v,
            Err(e) => {
                potential_error.get_or_insert(e);
                f64::NAN
            }
        };
        let w2 = k2 - v;
        [y[2], y[3], -w2 * y[0], -w2 * y[1]]
    };
    let scale = |a: &[f64; 4], b: &[f64; 4]| {
        let m_chi = a[0].hypot(a[1]).max(b[0].hypot(b[1]));
        let m_dchi = a[2].hypot(a[3]).max(b[2].hypot(b[3]));
        [tol * m_chi, tol * m_chi, tol * m_dchi, tol * m_dchi]
    };

    let outputs: Vec<f64> = match orientation {
        Orientation::Forward => grid[1..].to_vec(),
        Orientation::Backward => grid[..grid.len() - 1].iter().rev().copied().collect(),
    };
    let result = ode::integrate(rhs, scale, start, y0, &outputs, &ode::Options::default());
    if let Some(e) = potential_error {
        return Err(e.into());
    }
    let (states, stats) = result?;

    let mut ordered = Vec::with_capacity(grid.len());
    ordered.push(y0);
    ordered.extend(states);
    if orientation == Orientation::Backward {
        ordered.reverse();
    }

    let mut chi = Vec::with_capacity(grid.len());
    let mut dchi = Vec::with_capacity(grid.len());
    let mut wronskian_error = Vec::with_capacity(grid.len());
    let mut drift = 0.0f64;
    for y in ordered {
        let c = Complex64::new(y[0], y[1]);
        let d = Complex64::new(y[2], y[3]);
        let err = (wronskian(c, d) - Complex64::i()).norm();
        drift = drift.max(err);
        chi.push(c);
        dchi.push(d);
        wronskian_error.push(err);
    }
    Ok(ModeSolution {
        spec: *spec,
        eta_grid: grid.to_vec(),
        chi,
        dchi,
        wronskian_error,
        wronskian_drift: drift,
        steps: stats.accepted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::{BackgroundModel, SechPulse};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn normalization_constant() {
        assert_relative_eq!(HANKEL_NORMALIZATION, (std::f64::consts::PI / 4.0).sqrt(), max_relative = 1e-16);
    }

    #[test]
    fn plane_wave_examples() {
        let (chi, dchi) = plane_wave_mode(2.0, 0.0).unwrap();
        assert_eq!(chi, Complex64::new(0.5, 0.0));
        assert_eq!(dchi, Complex64::new(0.0, -1.0));
        for eta in [-3.0, 0.0, 1.7, 1e4] {
            let (chi, dchi) = plane_wave_mode(5.0, eta).unwrap();
            assert!((wronskian(chi, dchi) - Complex64::i()).norm() < 1e-15);
            assert_relative_eq!(chi.norm(), 0.1f64.sqrt(), max_relative = 1e-15);
        }
        assert!(plane_wave_mode(0.0, 1.0).is_err());
    }

    #[test]
    fn bunch_davies_examples() {
        let (chi, _) = bunch_davies_mode(1.0, -1.0).unwrap();
        // frozen from an arbitrary-precision evaluation of (1+i) e^{i} / √2
        assert!((chi - Complex64::new(-0.21295841515929619, 0.97706126389947567)).norm() < 1e-15);
        let (chi, dchi) = bunch_davies_mode(1.0, -0.37).unwrap();
        assert!((wronskian(chi, dchi) - Complex64::i()).norm() < 1e-12);
        let (bd, _) = bunch_davies_mode(1.0, -1e6).unwrap();
        let (pw, _) = plane_wave_mode(1.0, -1e6).unwrap();
        assert!(rel(bd, pw) < 1e-5);
        assert!(matches!(bunch_davies_mode(1.0, 0.0), Err(ModeError::Domain(_))));
    }

    #[test]
    fn bunch_davies_derivative_matches_finite_difference() {
        let (k, eta, h) = (1.3, -0.8, 1e-5);
        let (_, d) = bunch_davies_mode(k, eta).unwrap();
        let fd = (bunch_davies_mode(k, eta + h).unwrap().0 - bunch_davies_mode(k, eta - h).unwrap().0) / (2.0 * h);
        assert!(rel(fd, d) < 1e-8);
    }

    #[test]
    fn hankel_mode_is_bunch_davies_up_to_constant_phase() {
        let k = 0.7;
        let mut ratios = Vec::new();
        for i in 0..200 {
            let eta = -(10f64.powf(-2.0 + 5.0 * i as f64 / 199.0)) / k;
            let (h, dh) = hankel_mode(k, eta, 1.5).unwrap();
            let (b, _) = bunch_davies_mode(k, eta).unwrap();
            assert!((wronskian(h, dh) - Complex64::i()).norm() < 1e-8);
            ratios.push(h / b);
        }
        for r in &ratios {
            assert!((r.norm() - 1.0).abs() < 1e-8);
            assert!((r - ratios[0]).norm() < 1e-8);
        }
    }

    #[test]
    fn half_order_hankel_mode_is_plane_wave() {
        for eta in [-20.0, -3.0, 0.5, 40.0] {
            let (h, dh) = hankel_mode(1.0, eta, 0.5).unwrap();
            let (p, dp) = plane_wave_mode(1.0, eta).unwrap();
            let phase = h / p;
            assert!((phase.norm() - 1.0).abs() < 1e-14);
            assert!((dh / dp - phase).norm() < 1e-13);
        }
    }

    #[test]
    fn hankel_mode_wronskian_any_order() {
        for nu in [0.0, 0.3, 1.0, 2.5, 7.0] {
            for eta in [-30.0, -1.0, -0.05, 0.05, 2.0] {
                let (h, dh) = hankel_mode(1.0, eta, nu).unwrap();
                assert!((wronskian(h, dh) - Complex64::i()).norm() < 1e-8, "nu={nu} eta={eta}");
            }
        }
    }

    #[test]
    fn mode_spec_validation() {
        let rad = BackgroundModel::radiation();
        assert!(ModeSpec::new(0.0, rad, Vacuum::PlaneWaveIn).is_err());
        assert!(matches!(
            ModeSpec::new(1.0, rad, Vacuum::BunchDavies),
            Err(ModeError::IncompatibleVacuum { .. })
        ));
        let pulse = SechPulse::new(1.0, 1.0, 0.0).unwrap();
        assert!(ModeSpec::new(1.0, pulse, Vacuum::HankelSecond).is_err());
        assert!(ModeSpec::new(1.0, BackgroundModel::power_law(2.0 / 3.0).unwrap(), Vacuum::BunchDavies).is_ok());
        let ds = ModeSpec::new(1.0, BackgroundModel::de_sitter(1.0).unwrap(), Vacuum::PlaneWaveIn).unwrap();
        assert!(ds.initial_data(-10.0).is_err());
        assert!(ds.initial_data(-1000.0).is_ok());
    }

    #[test]
    fn radiation_plane_wave_stays_plane_wave() {
        let bg: Background = BackgroundModel::radiation().into();
        let spec = ModeSpec::new(1.0, bg, Vacuum::PlaneWaveIn).unwrap();
        let domain = ConformalDomain::new(&bg, 1.0, 20.0).unwrap();
        let sol = evolve_mode(&spec, &domain, DEFAULT_TOL).unwrap();
        for (eta, chi) in sol.eta_grid().iter().zip(sol.chi()) {
            let exact = plane_wave_mode(1.0, *eta).unwrap().0;
            assert!(rel(*chi, exact) < 1e-8);
        }
        assert!(sol.wronskian_drift() <= 1e-8);
        assert!(sol.max_relative_deviation().unwrap().unwrap() < 1e-8);
    }

    #[test]
    fn de_sitter_regression_against_exact_mode() {
        let bg: Background = BackgroundModel::de_sitter(1.0).unwrap().into();
        let spec = ModeSpec::new(1.0, bg, Vacuum::BunchDavies).unwrap();
        let domain = ConformalDomain::new(&bg, -1e3, -1e-2).unwrap();
        let sol = evolve_mode(&spec, &domain, DEFAULT_TOL).unwrap();
        let worst = sol
            .eta_grid()
            .iter()
            .zip(sol.chi())
            .map(|(eta, chi)| rel(*chi, bunch_davies_mode(1.0, *eta).unwrap().0))
            .fold(0.0, f64::max);
        assert!(worst <= 1e-6, "max rel error {worst:e}");
        assert_eq!(sol.max_relative_deviation().unwrap(), Some(worst));
        assert!(sol.wronskian_drift() <= 1e-8, "drift {:e}", sol.wronskian_drift());
    }

    #[test]
    fn late_time_cutoff_applied() {
        let bg: Background = BackgroundModel::de_sitter(1.0).unwrap().into();
        let spec = ModeSpec::new(2.0, bg, Vacuum::BunchDavies).unwrap();
        let domain = ConformalDomain::new(&bg, -100.0, -1e-9).unwrap();
        let sol = evolve_mode(&spec, &domain, DEFAULT_TOL).unwrap();
        assert_relative_eq!(*sol.eta_grid().last().unwrap(), -5e-4, max_relative = 1e-15);
    }

    #[test]
    fn backward_orientation_imposes_data_at_the_end() {
        let bg: Background = BackgroundModel::matter(1.0).unwrap().into();
        let spec = ModeSpec::new(1.0, bg, Vacuum::BunchDavies).unwrap();
        let domain = ConformalDomain::with_orientation(&bg, 0.5, 30.0, Orientation::Backward).unwrap();
        let sol = evolve_mode(&spec, &domain, DEFAULT_TOL).unwrap();
        let end = hankel_mode(1.0, 30.0, 1.5).unwrap().0;
        assert_eq!(*sol.chi().last().unwrap(), end);
        // the ν = 3/2 Hankel solution is exact on the whole interval
        let first = hankel_mode(1.0, 0.5, 1.5).unwrap().0;
        assert!(rel(sol.chi()[0], first) < 1e-7);
    }

    #[test]
    fn power_law_hankel_regression() {
        for alpha in [0.25, 0.5, 2.0, 4.0] {
            let m = BackgroundModel::power_law(alpha).unwrap();
            let bg: Background = m.into();
            let nu = m.bessel_order();
            let spec = ModeSpec::new(1.0, bg, Vacuum::HankelSecond).unwrap();
            let domain = ConformalDomain::new(&bg, -200.0, -0.05).unwrap();
            let sol = evolve_mode(&spec, &domain, DEFAULT_TOL).unwrap();
            for (eta, chi) in sol.eta_grid().iter().zip(sol.chi()) {
                let exact = hankel_mode(1.0, *eta, nu).unwrap().0;
                assert!(rel(*chi, exact) < 1e-6, "alpha={alpha} eta={eta}");
            }
        }
    }

    #[test]
    fn field_mode_round_trip() {
        let bg: Background = BackgroundModel::de_sitter(2.0).unwrap().into();
        let spec = ModeSpec::new(1.0, bg, Vacuum::BunchDavies).unwrap();
        let sol = evolve_mode(&spec, &ConformalDomain::new(&bg, -50.0, -0.1).unwrap(), DEFAULT_TOL).unwrap();
        let field = sol.field_mode().unwrap();
        for i in 0..sol.len() {
            let back = field.phi[i] * field.scale_factor[i];
            assert!(rel(back, sol.chi()[i]) < 1e-12);
        }
        let pulse = ModeSpec::new(1.0, SechPulse::new(1.0, 1.0, 0.0).unwrap(), Vacuum::PlaneWaveIn).unwrap();
        let bgp = *pulse.background();
        let sol = evolve_mode(&pulse, &ConformalDomain::new(&bgp, -20.0, 20.0).unwrap(), DEFAULT_TOL).unwrap();
        assert!(sol.field_mode().is_err());
    }

    #[test]
    fn invalid_requests() {
        let bg: Background = BackgroundModel::radiation().into();
        let spec = ModeSpec::new(1.0, bg, Vacuum::PlaneWaveIn).unwrap();
        assert!(matches!(
            evolve_mode_on_grid(&spec, &[1.0, 2.0], Orientation::Forward, 1e-3),
            Err(ModeError::InvalidTolerance(_))
        ));
        assert!(evolve_mode_on_grid(&spec, &[2.0, 1.0], Orientation::Forward, 1e-10).is_err());
        assert!(evolve_mode_on_grid(&spec, &[1.0], Orientation::Forward, 1e-10).is_err());
        assert!(matches!(
            evolve_mode_on_grid(&spec, &[-1.0, 1.0], Orientation::Forward, 1e-10),
            Err(ModeError::Background(_))
        ));
    }

    #[test]
    fn node_lookup() {
        let bg: Background = BackgroundModel::radiation().into();
        let spec = ModeSpec::new(1.0, bg, Vacuum::PlaneWaveIn).unwrap();
        let sol = evolve_mode_on_grid(&spec, &[1.0, 2.0, 3.5], Orientation::Forward, 1e-10).unwrap();
        assert_eq!(sol.node_index(2.0), Some(1));
        assert_eq!(sol.node_index(3.5), Some(2));
        assert_eq!(sol.node_index(2.5), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn scaling_covariance(k in 0.2f64..5.0, lambda in 0.2f64..5.0) {
            // χ(λk, η/λ) = χ(k, η)/√λ for ν-type modes
            let bg: Background = BackgroundModel::de_sitter(1.0).unwrap().into();
            let grid: Vec<f64> = (0..40).map(|i| -(10f64.powf(2.0 - 3.0 * i as f64 / 39.0)) / k).collect();
            let scaled: Vec<f64> = grid.iter().map(|e| e / lambda).collect();
            let a = evolve_mode_on_grid(&ModeSpec::new(k, bg, Vacuum::BunchDavies).unwrap(), &grid, Orientation::Forward, 1e-11).unwrap();
            let b = evolve_mode_on_grid(&ModeSpec::new(lambda * k, bg, Vacuum::BunchDavies).unwrap(), &scaled, Orientation::Forward, 1e-11).unwrap();
            for (ca, cb) in a.chi().iter().zip(b.chi()) {
                prop_assert!(rel(cb * lambda.sqrt(), *ca) < 1e-7);
            }
        }

        #[test]
        fn wronskian_conserved(k in 0.1f64..10.0, h in 0.1f64..10.0, start in 10.0f64..300.0) {
            let bg: Background = BackgroundModel::de_sitter(h).unwrap().into();
            let spec = ModeSpec::new(k, bg, Vacuum::BunchDavies).unwrap();
            let domain = ConformalDomain::new(&bg, -start / k, -0.01 / k).unwrap();
            let sol = evolve_mode(&spec, &domain, DEFAULT_TOL).unwrap();
            prop_assert!(sol.wronskian_drift() <= 1e-8, "drift {}", sol.wronskian_drift());
        }
    }
}
