//! Closed-form teleportation fidelities.
//!
//! The squeezed-resource formulas are logistic functions of twice the
//! effective squeezing and is evaluated without overflow for any argument.

use crate::bogoliubov::{self, BogoliubovError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FidelityError {
    #[error("{name} = {value} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("|beta| = {beta_abs} must be smaller than |alpha| = {alpha_abs}")]
    Degenerate { beta_abs: f64, alpha_abs: f64 },
    #[error("model {model} requires parameter {field}")]
    MissingParameter { model: FidelityModel, field: &'static str },
    #[error("model {model} does not take parameter {field}")]
    ExtraneousParameter { model: FidelityModel, field: &'static str },
    #[error("{0}")]
    Bogoliubov(#[from] BogoliubovError),
}

pub type Result<T, E = FidelityError> = std::result::Result<T, E>;

fn check(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<()> {
    if ok && !value.is_nan() {
        Ok(())
    } else {
        Err(FidelityError::Domain { name, value, reason })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<()> {
    check(name, value, value >= 0.0 && value.is_finite(), "must be finite and >= 0")
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    check(name, value, value > 0.0 && value.is_finite(), "must be finite and > 0")
}

/// `1/(1 + e^{−x})`
fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `1/(1 + e^{−2r})`
pub fn fidelity_tmsv(r: f64) -> Result<f64> {
    non_negative("r", r)?;
    Ok(logistic(2.0 * r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveSqueezing {
    pub r_eff: f64,
    /// `r_eff < 0`: the resulting fidelity is below the classical 1/2.
    pub sub_classical: bool,
}

/// `r − γ|β|²`
pub fn effective_squeezing(r: f64, beta_sq: f64, gamma: f64) -> Result<EffectiveSqueezing> {
    non_negative("r", r)?;
    non_negative("beta_sq", beta_sq)?;
    non_negative("gamma", gamma)?;
    let r_eff = r - gamma * beta_sq;
    Ok(EffectiveSqueezing {
        r_eff,
        sub_classical: r_eff < 0.0,
    })
}

/// `1/(1 + e^{−2(r − γ|β|²)})`, defined for negative effective squeezing too.
pub fn fidelity_effective(r: f64, beta_sq: f64, gamma: f64) -> Result<f64> {
    Ok(logistic(2.0 * effective_squeezing(r, beta_sq, gamma)?.r_eff))
}

pub fn fidelity_power_law(r: f64, k: f64, alpha: f64, gamma: f64) -> Result<f64> {
    fidelity_effective(r, bogoliubov::beta_sq_power_law(k, alpha)?, gamma)
}

pub fn fidelity_de_sitter_squeezed(r: f64, k: f64, h: f64, gamma: f64) -> Result<f64> {
    fidelity_effective(r, bogoliubov::beta_sq_de_sitter(k, h)?, gamma)
}

/// `(1 + e^{−πk/H})/2`
pub fn fidelity_de_sitter_ratio(k: f64, h: f64) -> Result<f64> {
    non_negative("k", k)?;
    positive("H", h)?;
    Ok(0.5 * (1.0 + (-PI * k / h).exp()))
}

/// `1 − e^{−2πk/H0}`
pub fn fidelity_matter(k: f64, h0: f64) -> Result<f64> {
    non_negative("k", k)?;
    positive("H0", h0)?;
    Ok(-(-2.0 * PI * k / h0).exp_m1())
}

/// `1/(1 + n)`
pub fn fidelity_thermal(n: f64) -> Result<f64> {
    non_negative("n", n)?;
    Ok(1.0 / (1.0 + n))
}

/// `(1 + C)/2`
pub fn fidelity_concurrence(c: f64) -> Result<f64> {
    check("C", c, (0.0..=1.0).contains(&c), "must lie in [0, 1]")?;
    Ok(0.5 * (1.0 + c))
}

/// `artanh(|β|/|α|)`
pub fn squeezing_from_ratio(beta_abs: f64, alpha_abs: f64) -> Result<f64> {
    non_negative("beta_abs", beta_abs)?;
    non_negative("alpha_abs", alpha_abs)?;
    if beta_abs >= alpha_abs {
        return Err(FidelityError::Degenerate { beta_abs, alpha_abs });
    }
    Ok((beta_abs / alpha_abs).atanh())
}

/// Selectable fidelity formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FidelityModel {
    Minkowski,
    EffectiveSqueezing,
    PowerLaw,
    DeSitterSqueezed,
    DeSitterRatio,
    Matter,
    ThermalChannel,
    Concurrence,
}

impl FidelityModel {
    pub const ALL: [FidelityModel; 8] = [
        FidelityModel::Minkowski,
        FidelityModel::EffectiveSqueezing,
        FidelityModel::PowerLaw,
        FidelityModel::DeSitterSqueezed,
        FidelityModel::DeSitterRatio,
        FidelityModel::Matter,
        FidelityModel::ThermalChannel,
        FidelityModel::Concurrence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FidelityModel::Minkowski => "Minkowski",
            FidelityModel::EffectiveSqueezing => "EffectiveSqueezing",
            FidelityModel::PowerLaw => "PowerLaw",
            FidelityModel::DeSitterSqueezed => "DeSitterSqueezed",
            FidelityModel::DeSitterRatio => "DeSitterRatio",
            FidelityModel::Matter => "Matter",
            FidelityModel::ThermalChannel => "ThermalChannel",
            FidelityModel::Concurrence => "Concurrence",
        }
    }

    /// Parameters that must be set (`gamma` is always optional where allowed).
    pub fn required(self) -> &'static [&'static str] {
        match self {
            FidelityModel::Minkowski => &["r"],
            FidelityModel::EffectiveSqueezing => &["r", "n"],
            FidelityModel::PowerLaw => &["r", "k", "alpha"],
            FidelityModel::DeSitterSqueezed => &["r", "k", "H"],
            FidelityModel::DeSitterRatio => &["k", "H"],
            FidelityModel::Matter => &["k", "H0"],
            FidelityModel::ThermalChannel => &["n"],
            FidelityModel::Concurrence => &["C"],
        }
    }

    pub fn takes_gamma(self) -> bool {
        matches!(
            self,
            FidelityModel::EffectiveSqueezing | FidelityModel::PowerLaw | FidelityModel::DeSitterSqueezed
        )
    }
}

impl std::fmt::Display for FidelityModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FidelityModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown fidelity model `{s}`"))
    }
}

/// A fidelity model with its parameters. For `EffectiveSqueezing` the
/// particle number `n` plays the role of `|β_k|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FidelityQuery {
    pub model: FidelityModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(rename = "H0", default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
}

/// Result of evaluating a [`FidelityQuery`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityOutcome {
    pub fidelity: f64,
    /// Particle number entering the formula, where there is one.
    pub beta_sq: Option<f64>,
    pub sub_classical: bool,
}

impl FidelityQuery {
    pub fn new(model: FidelityModel) -> Self {
        Self {
            model,
            r: None,
            gamma: None,
            k: None,
            h: None,
            h0: None,
            alpha: None,
            c: None,
            n: None,
        }
    }

    pub fn r(mut self, v: f64) -> Self {
        self.r = Some(v);
        self
    }

    pub fn gamma(mut self, v: f64) -> Self {
        self.gamma = Some(v);
        self
    }

    pub fn k(mut self, v: f64) -> Self {
        self.k = Some(v);
        self
    }

    pub fn hubble(mut self, v: f64) -> Self {
        self.h = Some(v);
        self
    }

    pub fn hubble0(mut self, v: f64) -> Self {
        self.h0 = Some(v);
        self
    }

    pub fn alpha(mut self, v: f64) -> Self {
        self.alpha = Some(v);
        self
    }

    pub fn concurrence(mut self, v: f64) -> Self {
        self.c = Some(v);
        self
    }

    pub fn n(mut self, v: f64) -> Self {
        self.n = Some(v);
        self
    }

    fn fields(&self) -> [(&'static str, Option<f64>); 8] {
        [
            ("r", self.r),
            ("gamma", self.gamma),
            ("k", self.k),
            ("H", self.h),
            ("H0", self.h0),
            ("alpha", self.alpha),
            ("C", self.c),
            ("n", self.n),
        ]
    }

    /// Checks presence and ranges of every parameter.
    pub fn validate(&self) -> Result<()> {
        let model = self.model;
        let required = model.required();
        for (field, value) in self.fields() {
            let allowed = required.contains(&field) || (field == "gamma" && model.takes_gamma());
            match value {
                None if required.contains(&field) => {
                    return Err(FidelityError::MissingParameter { model, field })
                }
                Some(_) if !allowed => return Err(FidelityError::ExtraneousParameter { model, field }),
                _ => {}
            }
        }
        if let Some(v) = self.r {
            non_negative("r", v)?;
        }
        if let Some(v) = self.gamma {
            non_negative("gamma", v)?;
        }
        if let Some(v) = self.n {
            non_negative("n", v)?;
        }
        if let Some(v) = self.c {
            check("C", v, (0.0..=1.0).contains(&v), "must lie in [0, 1]")?;
        }
        if let Some(v) = self.alpha {
            positive("alpha", v)?;
        }
        if let Some(v) = self.h {
            positive("H", v)?;
        }
        if let Some(v) = self.h0 {
            positive("H0", v)?;
        }
        if let Some(v) = self.k {
            // the ratio and matter formulas are defined at k = 0
            if matches!(model, FidelityModel::DeSitterRatio | FidelityModel::Matter) {
                non_negative("k", v)?;
            } else {
                positive("k", v)?;
            }
        }
        Ok(())
    }

    pub fn evaluate(&self) -> Result<FidelityOutcome> {
        self.validate()?;
        let get = |v: Option<f64>| v.expect("validated");
        let gamma = self.gamma.unwrap_or(1.0);
        let squeezed = |r: f64, beta_sq: f64| -> Result<FidelityOutcome> {
            let eff = effective_squeezing(r, beta_sq, gamma)?;
            Ok(FidelityOutcome {
                fidelity: logistic(2.0 * eff.r_eff),
                beta_sq: Some(beta_sq),
                sub_classical: eff.sub_classical,
            })
        };
        let plain = |fidelity: f64, beta_sq: Option<f64>| FidelityOutcome {
            fidelity,
            beta_sq,
            sub_classical: false,
        };
        match self.model {
            FidelityModel::Minkowski => Ok(plain(fidelity_tmsv(get(self.r))?, Some(0.0))),
            FidelityModel::EffectiveSqueezing => squeezed(get(self.r), get(self.n)),
            FidelityModel::PowerLaw => squeezed(
                get(self.r),
                bogoliubov::beta_sq_power_law(get(self.k), get(self.alpha))?,
            ),
            FidelityModel::DeSitterSqueezed => {
                squeezed(get(self.r), bogoliubov::beta_sq_de_sitter(get(self.k), get(self.h))?)
            }
            FidelityModel::DeSitterRatio => {
                let (k, h) = (get(self.k), get(self.h));
                let beta_sq = if k > 0.0 {
                    Some(bogoliubov::beta_sq_de_sitter(k, h)?)
                } else {
                    None
                };
                Ok(plain(fidelity_de_sitter_ratio(k, h)?, beta_sq))
            }
            FidelityModel::Matter => {
                let (k, h0) = (get(self.k), get(self.h0));
                let beta_sq = if k > 0.0 {
                    Some(bogoliubov::beta_sq_matter(k, h0)?)
                } else {
                    None
                };
                Ok(plain(fidelity_matter(k, h0)?, beta_sq))
            }
            FidelityModel::ThermalChannel => Ok(plain(fidelity_thermal(get(self.n))?, None)),
            FidelityModel::Concurrence => Ok(plain(fidelity_concurrence(get(self.c))?, None)),
        }
    }

    /// CSV row for a sweep output.
    pub fn row(&self, outcome: &FidelityOutcome) -> FidelityRow {
        FidelityRow {
            model: self.model,
            k: self.k,
            h: self.h,
            h0: self.h0,
            alpha: self.alpha,
            r: self.r,
            gamma: if self.model.takes_gamma() {
                Some(self.gamma.unwrap_or(1.0))
            } else {
                None
            },
            beta_sq: outcome.beta_sq,
            // no C column: concurrence rides in n
            n: if self.model == FidelityModel::Concurrence { self.c } else { self.n },
            fidelity: outcome.fidelity,
            flags: if outcome.sub_classical { "sub_classical" } else { "" }.to_owned(),
        }
    }
}

/// Columns `model, k, H, H0, alpha, r, gamma, beta_sq, n, fidelity, flags`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityRow {
    pub model: FidelityModel,
    pub k: Option<f64>,
    #[serde(rename = "H")]
    pub h: Option<f64>,
    #[serde(rename = "H0")]
    pub h0: Option<f64>,
    pub alpha: Option<f64>,
    pub r: Option<f64>,
    pub gamma: Option<f64>,
    pub beta_sq: Option<f64>,
    pub n: Option<f64>,
    pub fidelity: f64,
    pub flags: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogoliubov::beta_sq_matter;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn tmsv_examples() {
        assert_eq!(fidelity_tmsv(0.0).unwrap(), 0.5);
        assert_eq!(fidelity_tmsv(400.0).unwrap(), 1.0);
        assert_relative_eq!(fidelity_tmsv(1.0).unwrap(), 0.88079707797788244, max_relative = 1e-15);
        assert!(fidelity_tmsv(-0.1).is_err());
    }

    #[test]
    fn effective_examples() {
        assert_eq!(effective_squeezing(1.0, 0.0, 1.0).unwrap().r_eff, 1.0);
        assert_eq!(effective_squeezing(1.0, 0.5, 1.0).unwrap().r_eff, 0.5);
        let e = effective_squeezing(0.2, 0.5, 1.0).unwrap();
        assert_relative_eq!(e.r_eff, -0.3, max_relative = 1e-15);
        assert!(e.sub_classical);
        assert_relative_eq!(fidelity_effective(1.0, 0.5, 1.0).unwrap(), 0.73105857863000488, max_relative = 1e-15);
        assert_eq!(fidelity_effective(0.0, 0.0, 1.0).unwrap(), 0.5);
        assert_eq!(fidelity_effective(1.3, 0.0, 1.0).unwrap(), fidelity_tmsv(1.3).unwrap());
        assert!(fidelity_effective(0.2, 0.5, 1.0).unwrap() < 0.5);
        // huge particle numbers underflow smoothly to 0
        assert_eq!(fidelity_effective(1.0, 1e6, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn power_law_examples() {
        // mpmath: 1/(1 + e^{−2(1 − (π²/4) sech²(π/2))})
        assert_relative_eq!(fidelity_power_law(1.0, 1.0, 1.0, 1.0).unwrap(), 0.77139368866512387, max_relative = 1e-14);
        let ideal = fidelity_tmsv(1.0).unwrap();
        assert_eq!(fidelity_power_law(1.0, 1.0, 1e-4, 1.0).unwrap(), ideal);
        assert_eq!(fidelity_power_law(1.0, 1e3, 1.0, 1.0).unwrap(), ideal);
    }

    #[test]
    fn de_sitter_squeezed_examples() {
        let ideal = fidelity_tmsv(1.0).unwrap();
        assert_eq!(fidelity_de_sitter_squeezed(1.0, 1e3, 1.0, 1.0).unwrap(), ideal);
        let k = LN2 / (2.0 * PI);
        assert_relative_eq!(fidelity_de_sitter_squeezed(1.0, k, 1.0, 1.0).unwrap(), 0.5, max_relative = 1e-14);
        assert_eq!(fidelity_de_sitter_squeezed(1.0, 1.0, 1e-3, 1.0).unwrap(), ideal);
        assert_eq!(fidelity_de_sitter_squeezed(1.0, 1e-9, 1.0, 1.0).unwrap(), 0.0);
        // 2πk/H = 50: deviation far below 1e-20
        let f = fidelity_de_sitter_squeezed(1.0, 50.0 / (2.0 * PI), 1.0, 1.0).unwrap();
        assert!((f.ln() - ideal.ln()).abs() < 1e-20);
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(fidelity_de_sitter_ratio(0.0, 1.0).unwrap(), 1.0);
        assert_eq!(fidelity_de_sitter_ratio(1e3, 1.0).unwrap(), 0.5);
        assert_relative_eq!(fidelity_de_sitter_ratio(2.0, 2.0).unwrap(), 0.52160695913188612, max_relative = 1e-15);
    }

    #[test]
    fn matter_examples() {
        assert_eq!(fidelity_matter(0.0, 1.0).unwrap(), 0.0);
        assert_relative_eq!(fidelity_matter(LN2 / (2.0 * PI), 1.0).unwrap(), 0.5, max_relative = 1e-15);
        assert_eq!(fidelity_matter(1e3, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn thermal_and_concurrence_examples() {
        assert_eq!(fidelity_thermal(0.0).unwrap(), 1.0);
        assert_eq!(fidelity_thermal(1.0).unwrap(), 0.5);
        assert_eq!(fidelity_concurrence(0.0).unwrap(), 0.5);
        assert_eq!(fidelity_concurrence(1.0).unwrap(), 1.0);
        assert_eq!(fidelity_concurrence(0.5).unwrap(), 0.75);
        assert!(fidelity_concurrence(1.1).is_err());
        assert!(fidelity_thermal(-1.0).is_err());
    }

    #[test]
    fn ratio_squeezing_examples() {
        assert_eq!(squeezing_from_ratio(0.0, 1.0).unwrap(), 0.0);
        let r = squeezing_from_ratio((-PI).exp(), 1.0).unwrap();
        assert_relative_eq!(fidelity_tmsv(r).unwrap(), 0.5 * (1.0 + (-PI).exp()), max_relative = 1e-15);
        assert!(squeezing_from_ratio(1.0 - 1e-15, 1.0).unwrap() > 17.0);
        assert!(matches!(squeezing_from_ratio(1.0, 1.0), Err(FidelityError::Degenerate { .. })));
    }

    #[test]
    fn artanh_identity_on_grid() {
        for i in 0..1000 {
            let x = i as f64 / 1000.0;
            let lhs = fidelity_tmsv(x.atanh()).unwrap();
            assert!((lhs - 0.5 * (1.0 + x)).abs() <= 1e-12, "x={x}");
        }
    }

    #[test]
    fn thermal_matter_identity() {
        for i in 0..400 {
            let x = 1e-3 * (3e4f64).powf(i as f64 / 399.0);
            let k = x / (2.0 * PI);
            let a = fidelity_thermal(beta_sq_matter(k, 1.0).unwrap()).unwrap();
            let b = fidelity_matter(k, 1.0).unwrap();
            assert!((a - b).abs() <= 1e-14 * b, "2πk/H0={x}: {a} vs {b}");
        }
    }

    #[test]
    fn query_validation() {
        let q = FidelityQuery::new(FidelityModel::PowerLaw).r(1.0).k(1.0).alpha(1.0);
        assert_relative_eq!(q.evaluate().unwrap().fidelity, 0.77139368866512387, max_relative = 1e-14);
        assert_eq!(
            FidelityQuery::new(FidelityModel::PowerLaw).r(1.0).k(1.0).validate(),
            Err(FidelityError::MissingParameter {
                model: FidelityModel::PowerLaw,
                field: "alpha"
            })
        );
        assert_eq!(
            FidelityQuery::new(FidelityModel::Matter).k(1.0).hubble0(1.0).r(1.0).validate(),
            Err(FidelityError::ExtraneousParameter {
                model: FidelityModel::Matter,
                field: "r"
            })
        );
        assert!(FidelityQuery::new(FidelityModel::DeSitterRatio).k(1.0).hubble(1.0).gamma(1.0).validate().is_err());
        assert!(FidelityQuery::new(FidelityModel::Concurrence).concurrence(2.0).validate().is_err());
        let sub = FidelityQuery::new(FidelityModel::EffectiveSqueezing).r(0.2).n(0.5).evaluate().unwrap();
        assert!(sub.sub_classical);
        let row = FidelityQuery::new(FidelityModel::EffectiveSqueezing).r(0.2).n(0.5).row(&sub);
        assert_eq!(row.flags, "sub_classical");
        assert_eq!(row.gamma, Some(1.0));
    }

    #[test]
    fn query_serde() {
        let q: FidelityQuery = serde_json::from_str(r#"{"model":"DeSitterRatio","k":1,"H":1}"#).unwrap();
        assert_eq!(q, FidelityQuery::new(FidelityModel::DeSitterRatio).k(1.0).hubble(1.0));
        assert!(serde_json::from_str::<FidelityQuery>(r#"{"model":"Matter","k":1,"H0":1,"x":2}"#).is_err());
        assert_eq!("desitterratio".parse::<FidelityModel>(), Ok(FidelityModel::DeSitterRatio));
    }

    proptest! {
        #[test]
        fn tmsv_increasing(r in 0.0f64..10.0, dr in 1e-3f64..1.0) {
            prop_assert!(fidelity_tmsv(r + dr).unwrap() > fidelity_tmsv(r).unwrap());
        }

        #[test]
        fn effective_decreasing(r in 0.0f64..3.0, b in 0.0f64..3.0, db in 1e-3f64..1.0, g in 0.1f64..3.0, dg in 1e-3f64..1.0) {
            let f = fidelity_effective(r, b, g).unwrap();
            prop_assert!(fidelity_effective(r, b + db, g).unwrap() < f);
            prop_assert!(fidelity_effective(r, b, g + dg).unwrap() < f);
        }

        #[test]
        fn ratio_monotone(k in 0.0f64..5.0, dk in 1e-3f64..1.0, h in 0.2f64..5.0, dh in 1e-3f64..1.0) {
            // beyond πk/H ≈ 36 the correction is below one ulp of 1/2
            prop_assume!(PI * (k + dk) / h < 30.0);
            let f = fidelity_de_sitter_ratio(k, h).unwrap();
            prop_assert!(fidelity_de_sitter_ratio(k + dk, h).unwrap() < f);
            if k > 0.0 {
                prop_assert!(fidelity_de_sitter_ratio(k, h + dh).unwrap() > f);
            }
        }

        #[test]
        fn de_sitter_squeezed_monotone(r in 0.0f64..2.0, k in 0.05f64..2.0, dk in 1e-2f64..1.0, h in 0.5f64..5.0, dh in 1e-2f64..1.0) {
            let f = fidelity_de_sitter_squeezed(r, k, h, 1.0).unwrap();
            prop_assume!(f > 1e-300 && f < 1.0 - 1e-15);
            prop_assert!(fidelity_de_sitter_squeezed(r, k + dk, h, 1.0).unwrap() > f);
            prop_assert!(fidelity_de_sitter_squeezed(r, k, h + dh, 1.0).unwrap() < f);
        }

        #[test]
        fn all_in_unit_interval(r in 0.0f64..20.0, k in 1e-6f64..100.0, h in 1e-3f64..100.0, n in 0.0f64..1e6) {
            for f in [
                fidelity_tmsv(r).unwrap(),
                fidelity_power_law(r, k, h, 1.0).unwrap(),
                fidelity_de_sitter_squeezed(r, k, h, 1.0).unwrap(),
                fidelity_de_sitter_ratio(k, h).unwrap(),
                fidelity_matter(k, h).unwrap(),
                fidelity_thermal(n).unwrap(),
            ] {
                prop_assert!((0.0..=1.0).contains(&f));
            }
        }
    }
}
