//! Spatially flat FRW backgrounds in conformal time.
//!
//! Each [`BackgroundModel`] carries a scale-factor law `a(η)`, its admissible
//! conformal-time domain and the effective potential `a''/a` that enters the
//! rescaled mode equation `χ'' + (k² − a''/a) χ = 0`.
//!
//! Domains: de Sitter uses `η < 0`, radiation and matter use `η > 0`,
//! Minkowski accepts every finite `η`. Power-law backgrounds accept both
//! signs of `η`; the expanding branch is `η > 0` for `α < 1` and `η < 0` for
//! `α > 1` (see [`BackgroundModel::expanding_sign`]).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BackgroundError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("conformal time {eta} is outside the admissible domain of the {kind} background ({domain})")]
    OutsideDomain {
        kind: ModelKind,
        eta: f64,
        domain: &'static str,
    },
    #[error("cosmic time {t} is outside the domain of the {kind} background")]
    CosmicTimeOutsideDomain { kind: ModelKind, t: f64 },
    #[error("scale factor at eta = {eta} is not positive and finite ({value})")]
    DegenerateScaleFactor { eta: f64, value: f64 },
    #[error("the {0} background has no scale factor")]
    NoScaleFactor(&'static str),
}

pub type Result<T, E = BackgroundError> = std::result::Result<T, E>;

/// Scale-factor law selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Minkowski,
    PowerLaw,
    RadiationDominated,
    MatterDominated,
    DeSitter,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Minkowski,
        ModelKind::PowerLaw,
        ModelKind::RadiationDominated,
        ModelKind::MatterDominated,
        ModelKind::DeSitter,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Minkowski => "Minkowski",
            ModelKind::PowerLaw => "PowerLaw",
            ModelKind::RadiationDominated => "RadiationDominated",
            ModelKind::MatterDominated => "MatterDominated",
            ModelKind::DeSitter => "DeSitter",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Era together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Era {
    Minkowski,
    /// `a(t) ∝ t^α` in cosmic time.
    PowerLaw {
        alpha: f64,
    },
    RadiationDominated,
    /// `a(η) = a_ref H0² η² / 4`.
    MatterDominated { h0: f64 },
    /// `a(η) = −1/(Hη)`.
    DeSitter { h: f64 },
}

impl Era {
    pub fn kind(&self) -> ModelKind {
        match self {
            Era::Minkowski => ModelKind::Minkowski,
            Era::PowerLaw { .. } => ModelKind::PowerLaw,
            Era::RadiationDominated => ModelKind::RadiationDominated,
            Era::MatterDominated { .. } => ModelKind::MatterDominated,
            Era::DeSitter { .. } => ModelKind::DeSitter,
        }
    }
}

/// Bessel order `ν = |(1 − 3α) / (2(1 − α))|` of the power-law mode equation.
pub fn nu_index(alpha: f64) -> Result<f64> {
    validate_alpha(alpha)?;
    Ok(((1.0 - 3.0 * alpha) / (2.0 * (1.0 - alpha))).abs())
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(BackgroundError::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "must be finite and > 0",
        });
    }
    if alpha == 1.0 {
        return Err(BackgroundError::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "alpha = 1 is singular; use DeSitter for exponential expansion",
        });
    }
    Ok(())
}

fn validate_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(BackgroundError::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

/// A validated FRW background.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBackground", into = "RawBackground")]
pub struct BackgroundModel {
    era: Era,
    a_ref: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBackground {
    kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    h: Option<f64>,
    #[serde(rename = "H0", default, skip_serializing_if = "Option::is_none")]
    h0: Option<f64>,
    #[serde(default = "one")]
    a_ref: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawBackground> for BackgroundModel {
    type Error = BackgroundError;

    fn try_from(raw: RawBackground) -> Result<Self> {
        let missing = |name| BackgroundError::InvalidParameter {
            name,
            value: f64::NAN,
            reason: "required by this background kind",
        };
        let extraneous = |name, value| BackgroundError::InvalidParameter {
            name,
            value,
            reason: "not used by this background kind",
        };
        let mut allowed = (false, false, false);
        let era = match raw.kind {
            ModelKind::Minkowski => Era::Minkowski,
            ModelKind::RadiationDominated => Era::RadiationDominated,
            ModelKind::PowerLaw => {
                allowed.0 = true;
                Era::PowerLaw {
                    alpha: raw.alpha.ok_or_else(|| missing("alpha"))?,
                }
            }
            ModelKind::DeSitter => {
                allowed.1 = true;
                Era::DeSitter {
                    h: raw.h.ok_or_else(|| missing("H"))?,
                }
            }
            ModelKind::MatterDominated => {
                allowed.2 = true;
                Era::MatterDominated {
                    h0: raw.h0.ok_or_else(|| missing("H0"))?,
                }
            }
        };
        for (name, value, ok) in [
            ("alpha", raw.alpha, allowed.0),
            ("H", raw.h, allowed.1),
            ("H0", raw.h0, allowed.2),
        ] {
            if let (Some(v), false) = (value, ok) {
                return Err(extraneous(name, v));
            }
        }
        BackgroundModel::new(era)?.with_a_ref(raw.a_ref)
    }
}

impl From<BackgroundModel> for RawBackground {
    fn from(m: BackgroundModel) -> Self {
        let mut raw = RawBackground {
            kind: m.kind(),
            alpha: None,
            h: None,
            h0: None,
            a_ref: m.a_ref,
        };
        match m.era {
            Era::PowerLaw { alpha } => raw.alpha = Some(alpha),
            Era::DeSitter { h } => raw.h = Some(h),
            Era::MatterDominated { h0 } => raw.h0 = Some(h0),
            Era::Minkowski | Era::RadiationDominated => {}
        }
        raw
    }
}

impl BackgroundModel {
    pub fn new(era: Era) -> Result<Self> {
        match era {
            Era::Minkowski | Era::RadiationDominated => {}
            Era::PowerLaw { alpha } => validate_alpha(alpha)?,
            Era::MatterDominated { h0 } => validate_positive("H0", h0)?,
            Era::DeSitter { h } => validate_positive("H", h)?,
        }
        Ok(Self { era, a_ref: 1.0 })
    }

    pub fn minkowski() -> Self {
        Self {
            era: Era::Minkowski,
            a_ref: 1.0,
        }
    }

    pub fn radiation() -> Self {
        Self {
            era: Era::RadiationDominated,
            a_ref: 1.0,
        }
    }

    pub fn power_law(alpha: f64) -> Result<Self> {
        Self::new(Era::PowerLaw { alpha })
    }

    pub fn matter(h0: f64) -> Result<Self> {
        Self::new(Era::MatterDominated { h0 })
    }

    pub fn de_sitter(h: f64) -> Result<Self> {
        Self::new(Era::DeSitter { h })
    }

    /// Sets the overall normalization. De Sitter ignores it since `a = −1/(Hη)`.
    pub fn with_a_ref(mut self, a_ref: f64) -> Result<Self> {
        validate_positive("a_ref", a_ref)?;
        self.a_ref = a_ref;
        Ok(self)
    }

    pub fn era(&self) -> Era {
        self.era
    }

    pub fn kind(&self) -> ModelKind {
        self.era.kind()
    }

    pub fn a_ref(&self) -> f64 {
        self.a_ref
    }

    /// Bessel order of the mode equation, `a''/a = (ν² − 1/4)/η²`.
    pub fn bessel_order(&self) -> f64 {
        match self.era {
            Era::Minkowski | Era::RadiationDominated => 0.5,
            Era::PowerLaw { alpha } => nu_index(alpha).expect("validated at construction"),
            Era::MatterDominated { .. } | Era::DeSitter { .. } => 1.5,
        }
    }

    /// Exponent `p` in `a ∝ |η|^p`.
    fn conformal_exponent(&self) -> f64 {
        match self.era {
            Era::Minkowski => 0.0,
            Era::PowerLaw { alpha } => alpha / (1.0 - alpha),
            Era::RadiationDominated => 1.0,
            Era::MatterDominated { .. } => 2.0,
            Era::DeSitter { .. } => -1.0,
        }
    }

    /// Sign of `η` on which the scale factor grows toward the future, or
    /// `None` for Minkowski.
    pub fn expanding_sign(&self) -> Option<f64> {
        match self.era {
            Era::Minkowski => None,
            Era::PowerLaw { alpha } if alpha > 1.0 => Some(-1.0),
            Era::PowerLaw { .. } | Era::RadiationDominated | Era::MatterDominated { .. } => {
                Some(1.0)
            }
            Era::DeSitter { .. } => Some(-1.0),
        }
    }

    pub fn admits(&self, eta: f64) -> bool {
        if !eta.is_finite() {
            return false;
        }
        match self.era {
            Era::Minkowski => true,
            Era::PowerLaw { .. } => eta != 0.0,
            Era::RadiationDominated | Era::MatterDominated { .. } => eta > 0.0,
            Era::DeSitter { .. } => eta < 0.0,
        }
    }

    fn domain_text(&self) -> &'static str {
        match self.era {
            Era::Minkowski => "any finite eta",
            Era::PowerLaw { .. } => "eta != 0",
            Era::RadiationDominated | Era::MatterDominated { .. } => "eta > 0",
            Era::DeSitter { .. } => "eta < 0",
        }
    }

    pub fn check_domain(&self, eta: f64) -> Result<()> {
        if self.admits(eta) {
            Ok(())
        } else {
            Err(BackgroundError::OutsideDomain {
                kind: self.kind(),
                eta,
                domain: self.domain_text(),
            })
        }
    }

    pub fn scale_factor(&self, eta: f64) -> Result<f64> {
        self.check_domain(eta)?;
        let a = match self.era {
            Era::Minkowski => self.a_ref,
            Era::PowerLaw { .. } => self.a_ref * eta.abs().powf(self.conformal_exponent()),
            Era::RadiationDominated => self.a_ref * eta,
            Era::MatterDominated { h0 } => 0.25 * h0 * h0 * eta * eta * self.a_ref,
            Era::DeSitter { h } => -1.0 / (h * eta),
        };
        if a.is_finite() && a > 0.0 {
            Ok(a)
        } else {
            Err(BackgroundError::DegenerateScaleFactor { eta, value: a })
        }
    }

    /// `a''(η)/a(η)`.
    pub fn effective_potential(&self, eta: f64) -> Result<f64> {
        self.check_domain(eta)?;
        Ok(match self.era {
            Era::Minkowski | Era::RadiationDominated => 0.0,
            Era::MatterDominated { .. } | Era::DeSitter { .. } => 2.0 / (eta * eta),
            Era::PowerLaw { .. } => {
                let nu = self.bessel_order();
                (nu * nu - 0.25) / (eta * eta)
            }
        })
    }

    /// Conformal Hubble rate `a'(η)/a(η)`.
    pub fn conformal_hubble(&self, eta: f64) -> Result<f64> {
        self.check_domain(eta)?;
        Ok(match self.era {
            Era::Minkowski => 0.0,
            _ => self.conformal_exponent() / eta,
        })
    }

    /// Integrates `dη = dt / a` with the origin conventions documented on each era:
    /// de Sitter `η = −e^{−Ht}/H`, radiation and matter `t = 0` at `η = 0`,
    /// Minkowski `t = a_ref η`, power law `t = 0` at the big-bang (or big-rip) end
    /// of each branch.
    pub fn cosmic_to_conformal(&self, t: f64) -> Result<f64> {
        let bad = || BackgroundError::CosmicTimeOutsideDomain { kind: self.kind(), t };
        if !t.is_finite() {
            return Err(bad());
        }
        let eta = match self.era {
            Era::Minkowski => t / self.a_ref,
            Era::DeSitter { h } => -(-h * t).exp() / h,
            Era::RadiationDominated => {
                if t <= 0.0 {
                    return Err(bad());
                }
                (2.0 * t / self.a_ref).sqrt()
            }
            Era::MatterDominated { h0 } => {
                if t <= 0.0 {
                    return Err(bad());
                }
                (12.0 * t / (self.a_ref * h0 * h0)).cbrt()
            }
            Era::PowerLaw { alpha } => {
                if t == 0.0 {
                    return Err(bad());
                }
                let sign = if alpha < 1.0 { t.signum() } else { -t.signum() };
                sign * (t.abs() / (self.a_ref * (1.0 - alpha).abs())).powf(1.0 - alpha)
            }
        };
        self.check_domain(eta).map_err(|_| bad())?;
        Ok(eta)
    }

    /// Inverse of [`Self::cosmic_to_conformal`].
    pub fn conformal_to_cosmic(&self, eta: f64) -> Result<f64> {
        self.check_domain(eta)?;
        Ok(match self.era {
            Era::Minkowski => self.a_ref * eta,
            Era::DeSitter { h } => -(-h * eta).ln() / h,
            Era::RadiationDominated => 0.5 * self.a_ref * eta * eta,
            Era::MatterDominated { h0 } => self.a_ref * h0 * h0 * eta * eta * eta / 12.0,
            Era::PowerLaw { alpha } => {
                let sign = if alpha < 1.0 { eta.signum() } else { -eta.signum() };
                sign * self.a_ref * (1.0 - alpha).abs() * eta.abs().powf(1.0 / (1.0 - alpha))
            }
        })
    }
}

/// Synthetic potential `a''/a = amplitude · sech²((η − center)/width)` joining
/// two asymptotically flat regions. Its Bogoliubov coefficients are known in
/// closed form, see [`SechPulse::beta_sq_exact`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SechPulse {
    amplitude: f64,
    width: f64,
    center: f64,
}

impl SechPulse {
    pub fn new(amplitude: f64, width: f64, center: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(BackgroundError::InvalidParameter {
                name: "amplitude",
                value: amplitude,
                reason: "must be finite",
            });
        }
        validate_positive("width", width)?;
        if !center.is_finite() {
            return Err(BackgroundError::InvalidParameter {
                name: "center",
                value: center,
                reason: "must be finite",
            });
        }
        Ok(Self {
            amplitude,
            width,
            center,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn effective_potential(&self, eta: f64) -> f64 {
        let s = 1.0 / ((eta - self.center) / self.width).cosh();
        self.amplitude * s * s
    }

    /// Exact `|β_k|²` for scattering of a plane wave through the pulse.
    pub fn beta_sq_exact(&self, k: f64) -> f64 {
        let tau = self.width;
        let disc = 4.0 * self.amplitude * tau * tau - 1.0;
        let num = if disc >= 0.0 {
            (0.5 * std::f64::consts::PI * disc.sqrt()).cosh()
        } else {
            (0.5 * std::f64::consts::PI * (-disc).sqrt()).cos()
        };
        let den = (std::f64::consts::PI * k * tau).sinh();
        (num * num) / (den * den)
    }
}

/// Anything that can drive the mode equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Background {
    Frw(BackgroundModel),
    Pulse(SechPulse),
}

impl From<BackgroundModel> for Background {
    fn from(m: BackgroundModel) -> Self {
        Background::Frw(m)
    }
}

impl From<SechPulse> for Background {
    fn from(p: SechPulse) -> Self {
        Background::Pulse(p)
    }
}

impl Background {
    pub fn admits(&self, eta: f64) -> bool {
        match self {
            Background::Frw(m) => m.admits(eta),
            Background::Pulse(_) => eta.is_finite(),
        }
    }

    pub fn check_domain(&self, eta: f64) -> Result<()> {
        match self {
            Background::Frw(m) => m.check_domain(eta),
            Background::Pulse(_) if eta.is_finite() => Ok(()),
            Background::Pulse(_) => Err(BackgroundError::InvalidParameter {
                name: "eta",
                value: eta,
                reason: "must be finite",
            }),
        }
    }

    pub fn effective_potential(&self, eta: f64) -> Result<f64> {
        match self {
            Background::Frw(m) => m.effective_potential(eta),
            Background::Pulse(p) => {
                self.check_domain(eta)?;
                Ok(p.effective_potential(eta))
            }
        }
    }

    pub fn model(&self) -> Option<&BackgroundModel> {
        match self {
            Background::Frw(m) => Some(m),
            Background::Pulse(_) => None,
        }
    }

    pub fn scale_factor(&self, eta: f64) -> Result<f64> {
        match self {
            Background::Frw(m) => m.scale_factor(eta),
            Background::Pulse(_) => Err(BackgroundError::NoScaleFactor("sech-pulse")),
        }
    }

    pub fn conformal_hubble(&self, eta: f64) -> Result<f64> {
        match self {
            Background::Frw(m) => m.conformal_hubble(eta),
            Background::Pulse(_) => Err(BackgroundError::NoScaleFactor("sech-pulse")),
        }
    }

    /// `a''/a` is singular at `η = 0` for these backgrounds.
    pub fn singular_at_origin(&self) -> bool {
        match self {
            Background::Frw(m) => !matches!(m.kind(), ModelKind::Minkowski | ModelKind::RadiationDominated),
            Background::Pulse(_) => false,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Background::Frw(m) => m.kind().as_str(),
            Background::Pulse(_) => "SechPulse",
        }
    }
}

/// Conformal-time interval `[eta_min, eta_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalDomain {
    eta_min: f64,
    eta_max: f64,
    orientation: Orientation,
}

/// Which end of the interval carries the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Orientation {
    /// Data imposed at `eta_min`, evolved toward the future.
    #[default]
    Forward,
    /// Data imposed at `eta_max`, evolved toward the past.
    Backward,
}

impl ConformalDomain {
    pub fn new(background: &Background, eta_min: f64, eta_max: f64) -> Result<Self> {
        Self::with_orientation(background, eta_min, eta_max, Orientation::Forward)
    }

    pub fn with_orientation(
        background: &Background,
        eta_min: f64,
        eta_max: f64,
        orientation: Orientation,
    ) -> Result<Self> {
        background.check_domain(eta_min)?;
        background.check_domain(eta_max)?;
        if eta_min >= eta_max {
            return Err(BackgroundError::InvalidParameter {
                name: "eta_max",
                value: eta_max,
                reason: "must exceed eta_min",
            });
        }
        if background.singular_at_origin() && eta_min < 0.0 && eta_max > 0.0 {
            return Err(BackgroundError::InvalidParameter {
                name: "eta_max",
                value: eta_max,
                reason: "interval crosses the singularity at eta = 0",
            });
        }
        Ok(Self {
            eta_min,
            eta_max,
            orientation,
        })
    }

    pub fn eta_min(&self) -> f64 {
        self.eta_min
    }

    pub fn eta_max(&self) -> f64 {
        self.eta_max
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }
}
