//! Cartesian-product fidelity sweeps.
//!
//! Rows are ordered by `(model name, era parameter, r, gamma, k)`, each
//! ascending, and assembled in that order whatever the thread count.

use crate::args::{Common, Format, Spacing, SweepArgs};
use crate::output::{emit, encode};
use crate::{CliError, Result};
use cvtele_core::fidelity::{FidelityModel, FidelityQuery, FidelityRow};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl KGrid {
    /// Grid values with both end points exact.
    pub fn values(&self, allow_zero: bool) -> Result<Vec<f64>> {
        let bad = |why: &str| Err(CliError::Validation(format!("k grid {self:?}: {why}")));
        if self.points < 2 {
            return bad("needs at least 2 points");
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return bad("needs finite min < max");
        }
        let zero_ok = allow_zero && self.spacing == Spacing::Linear;
        if !(self.min > 0.0 || (zero_ok && self.min == 0.0)) {
            return bad("min must be > 0");
        }
        let last = (self.points - 1) as f64;
        let mut v: Vec<f64> = (0..self.points)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect();
        v[0] = self.min;
        v[self.points - 1] = self.max;
        Ok(v)
    }
}

/// Sweep configuration file. Parameter lists a selected model does not use
/// may be left out; `gamma` defaults to `[1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub models: Vec<FidelityModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_grid: Option<KGrid>,
    /// Explicit wavenumbers, alternative to `k_grid`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<f64>>,
    #[serde(default)]
    pub r: Vec<f64>,
    #[serde(default)]
    pub gamma: Vec<f64>,
    #[serde(rename = "H", default)]
    pub h: Vec<f64>,
    #[serde(rename = "H0", default)]
    pub h0: Vec<f64>,
    #[serde(default)]
    pub alpha: Vec<f64>,
    #[serde(rename = "C", default)]
    pub c: Vec<f64>,
    #[serde(default)]
    pub n: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Always true; present so configs can state it.
    #[serde(default = "yes")]
    pub deterministic: bool,
}

fn yes() -> bool {
    true
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("sweep config: {e}")))
    }

    fn sorted(name: &str, values: &[f64]) -> Result<Vec<f64>> {
        if values.is_empty() {
            return Err(CliError::Validation(format!("parameter list `{name}` is empty")));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(CliError::Validation(format!("parameter list `{name}` contains {v}")));
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup();
        Ok(v)
    }

    fn wavenumbers(&self) -> Result<Vec<f64>> {
        match (&self.k_grid, &self.k) {
            (Some(g), None) => g.values(false),
            (None, Some(ks)) => {
                let ks = Self::sorted("k", ks)?;
                if ks[0] <= 0.0 {
                    return Err(CliError::Validation("wavenumbers must be > 0".into()));
                }
                Ok(ks)
            }
            (Some(_), Some(_)) => Err(CliError::Validation("set only one of `k_grid` and `k`".into())),
            (None, None) => Err(CliError::Validation("a `k_grid` or `k` list is required".into())),
        }
    }

    /// All queries in output order.
    pub fn queries(&self) -> Result<Vec<FidelityQuery>> {
        if !self.deterministic {
            return Err(CliError::Validation("`deterministic` cannot be disabled".into()));
        }
        if self.models.is_empty() {
            return Err(CliError::Validation("`models` is empty".into()));
        }
        let mut models = self.models.clone();
        models.sort_by_key(|m| m.as_str());
        models.dedup();

        let mut out = Vec::new();
        for model in models {
            let needs = |f: &str| model.required().contains(&f);
            // the one era/state parameter each model takes, if any
            let era: Vec<Option<f64>> = match ["H", "H0", "alpha", "C", "n"].into_iter().find(|f| needs(f)) {
                Some("H") => Self::sorted("H", &self.h)?.into_iter().map(Some).collect(),
                Some("H0") => Self::sorted("H0", &self.h0)?.into_iter().map(Some).collect(),
                Some("alpha") => Self::sorted("alpha", &self.alpha)?.into_iter().map(Some).collect(),
                Some("C") => Self::sorted("C", &self.c)?.into_iter().map(Some).collect(),
                Some(_) => Self::sorted("n", &self.n)?.into_iter().map(Some).collect(),
                None => vec![None],
            };
            let rs: Vec<Option<f64>> = if needs("r") {
                Self::sorted("r", &self.r)?.into_iter().map(Some).collect()
            } else {
                vec![None]
            };
            let gammas: Vec<Option<f64>> = if model.takes_gamma() {
                let g = if self.gamma.is_empty() { vec![1.0] } else { self.gamma.clone() };
                Self::sorted("gamma", &g)?.into_iter().map(Some).collect()
            } else {
                vec![None]
            };
            let ks: Vec<Option<f64>> = if needs("k") {
                self.wavenumbers()?.into_iter().map(Some).collect()
            } else {
                vec![None]
            };
            for &p in &era {
                for &r in &rs {
                    for &gamma in &gammas {
                        for &k in &ks {
                            let mut q = FidelityQuery::new(model);
                            q.r = r;
                            q.gamma = gamma;
                            q.k = k;
                            match model {
                                FidelityModel::DeSitterSqueezed | FidelityModel::DeSitterRatio => q.h = p,
                                FidelityModel::Matter => q.h0 = p,
                                FidelityModel::PowerLaw => q.alpha = p,
                                FidelityModel::Concurrence => q.c = p,
                                FidelityModel::EffectiveSqueezing | FidelityModel::ThermalChannel => q.n = p,
                                FidelityModel::Minkowski => {}
                            }
                            q.validate().map_err(CliError::from)?;
                            out.push(q);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Evaluates the sweep on `threads` workers (0 = one per core).
pub fn run_sweep(config: &SweepConfig, threads: usize) -> Result<Vec<FidelityRow>> {
    let queries = config.queries()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    pool.install(|| {
        queries
            .par_iter()
            .map(|q| Ok(q.row(&q.evaluate()?)))
            .collect::<Result<Vec<_>>>()
    })
}

pub fn cmd_sweep(args: &SweepArgs, common: &Common) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.config.display())))?;
    let config = SweepConfig::parse(&text)?;
    let rows = run_sweep(&config, common.threads)?;
    let format = common.format.or(config.format).unwrap_or(Format::Csv);
    let out = common.out.clone().or(config.output.clone());
    emit(&encode(&rows, format)?, out.as_deref())
}
