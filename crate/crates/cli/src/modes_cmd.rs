use crate::args::{Common, Format, ModelArg, ModesArgs, VacuumArg};
use crate::output::{emit, encode};
use crate::{CliError, Result};
use cvtele_core::background::{Background, BackgroundModel, ConformalDomain, Orientation};
use cvtele_core::gaussian::{covariance_along, CovarianceRow};
use cvtele_core::modes::{self, ModeSolution, ModeSpec};
use serde::{Deserialize, Serialize};

/// Largest Wronskian drift accepted before exiting with status 2.
pub const DRIFT_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRow {
    pub eta: f64,
    pub chi_re: f64,
    pub chi_im: f64,
    pub dchi_re: f64,
    pub dchi_im: f64,
    pub wronskian_abs_err: f64,
}

pub fn mode_rows(solution: &ModeSolution) -> Vec<ModeRow> {
    solution
        .eta_grid()
        .iter()
        .zip(solution.chi())
        .zip(solution.dchi())
        .zip(solution.wronskian_error())
        .map(|(((&eta, chi), dchi), &err)| ModeRow {
            eta,
            chi_re: chi.re,
            chi_im: chi.im,
            dchi_re: dchi.re,
            dchi_im: dchi.im,
            wronskian_abs_err: err,
        })
        .collect()
}

pub fn covariance_rows(solution: &ModeSolution) -> Result<Vec<CovarianceRow>> {
    let field = solution.field_mode()?;
    let blocks = covariance_along(&field)?;
    field
        .eta_grid
        .iter()
        .zip(&blocks)
        .map(|(&eta, b)| Ok(CovarianceRow::new(solution.k(), eta, b)?))
        .collect()
}

fn model(args: &ModesArgs) -> Result<BackgroundModel> {
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| CliError::Validation(format!("--{name} is required for this model")))
    };
    let unused = |v: Option<f64>, name: &str| match v {
        Some(_) => Err(CliError::Validation(format!("--{name} does not apply to this model"))),
        None => Ok(()),
    };
    let (alpha, h, h0) = (args.alpha, args.h, args.h0);
    let m = match args.model {
        ModelArg::Minkowski | ModelArg::Radiation => {
            unused(alpha, "alpha")?;
            unused(h, "H")?;
            unused(h0, "H0")?;
            if args.model == ModelArg::Minkowski {
                BackgroundModel::minkowski()
            } else {
                BackgroundModel::radiation()
            }
        }
        ModelArg::PowerLaw => {
            unused(h, "H")?;
            unused(h0, "H0")?;
            BackgroundModel::power_law(need(alpha, "alpha")?)?
        }
        ModelArg::Matter => {
            unused(alpha, "alpha")?;
            unused(h, "H")?;
            BackgroundModel::matter(need(h0, "H0")?)?
        }
        ModelArg::DeSitter => {
            unused(alpha, "alpha")?;
            unused(h0, "H0")?;
            BackgroundModel::de_sitter(need(h, "H")?)?
        }
    };
    Ok(m)
}

/// Runs the integration described by the arguments.
pub fn solve(args: &ModesArgs, tol: f64) -> Result<ModeSolution> {
    let m = model(args)?;
    let vacuum = args.vacuum.unwrap_or(match args.model {
        ModelArg::Minkowski | ModelArg::Radiation => VacuumArg::PlaneWave,
        ModelArg::Matter | ModelArg::DeSitter => VacuumArg::BunchDavies,
        ModelArg::PowerLaw => VacuumArg::Hankel,
    });
    let bg = Background::from(m);
    let spec = ModeSpec::new(args.k, bg, vacuum.into())?;
    let orientation = if args.backward {
        Orientation::Backward
    } else {
        Orientation::Forward
    };
    let domain = ConformalDomain::with_orientation(&bg, args.eta_min, args.eta_max, orientation)?;
    Ok(modes::evolve_mode(&spec, &domain, tol)?)
}

pub fn cmd_modes(args: &ModesArgs, common: &Common) -> Result<()> {
    let solution = solve(args, common.tol.unwrap_or(modes::DEFAULT_TOL))?;
    let format = common.format.unwrap_or(Format::Csv);
    let bytes = if args.covariance {
        encode(&covariance_rows(&solution)?, format)?
    } else {
        encode(&mode_rows(&solution), format)?
    };
    emit(&bytes, common.out.as_deref())?;

    let drift = solution.wronskian_drift();
    eprintln!("points: {}, steps: {}", solution.len(), solution.steps());
    eprintln!("wronskian drift: {drift:e}");
    if let Some(dev) = solution.max_relative_deviation()? {
        eprintln!("max relative deviation from the exact mode: {dev:e}");
    }
    if drift > DRIFT_LIMIT {
        return Err(CliError::Numerical(format!(
            "wronskian drift {drift:e} exceeds {DRIFT_LIMIT:e}"
        )));
    }
    Ok(())
}
