//! Fidelity curves and the era comparison table.

use crate::args::{Common, Fig1Args, Fig2Args, Format, KGridArgs, Spacing, TableArgs};
use crate::output::{emit, encode, render_text};
use crate::sweep::KGrid;
use crate::{CliError, Result};
use cvtele_core::bogoliubov::{beta_sq_de_sitter, beta_sq_matter};
use cvtele_core::fidelity::{fidelity_de_sitter_ratio, fidelity_effective, fidelity_matter, fidelity_tmsv};
use serde::{Deserialize, Serialize};

/// Artifact default, the figure's own values are not recoverable.
pub const FIG1_DEFAULT_H: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
pub const FIG1_DEFAULT_GRID: KGrid = KGrid {
    min: 1e-3,
    max: 50.0,
    points: 200,
    spacing: Spacing::Log,
};
pub const FIG2_DEFAULT_GRID: KGrid = KGrid {
    min: 0.0,
    max: 5.0,
    points: 201,
    spacing: Spacing::Linear,
};
pub const TABLE_SAMPLE_K: [f64; 3] = [0.1, 1.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    #[serde(rename = "H")]
    pub h: f64,
    pub k: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    #[serde(rename = "H0")]
    pub h0: f64,
    pub k: f64,
    pub fidelity: f64,
}

fn wavenumbers(args: &KGridArgs, default: KGrid, allow_zero: bool) -> Result<Vec<f64>> {
    if let Some(ks) = &args.k {
        let mut ks = ks.clone();
        if ks.is_empty() || ks.iter().any(|k| !(k.is_finite() && (*k > 0.0 || (allow_zero && *k == 0.0)))) {
            return Err(CliError::Validation(format!("invalid wavenumber list {ks:?}")));
        }
        ks.sort_by(f64::total_cmp);
        ks.dedup();
        return Ok(ks);
    }
    let grid = KGrid {
        min: args.k_min.unwrap_or(default.min),
        max: args.k_max.unwrap_or(default.max),
        points: args.k_points.unwrap_or(default.points),
        spacing: args.k_spacing.unwrap_or(default.spacing),
    };
    grid.values(allow_zero)
}

/// Rows ordered by `(H, k)` ascending.
pub fn fig1_rows(h_list: &[f64], ks: &[f64]) -> Result<Vec<Fig1Row>> {
    let mut hs = h_list.to_vec();
    hs.sort_by(f64::total_cmp);
    hs.dedup();
    let mut rows = Vec::with_capacity(hs.len() * ks.len());
    for &h in &hs {
        for &k in ks {
            rows.push(Fig1Row {
                h,
                k,
                fidelity: fidelity_de_sitter_ratio(k, h)?,
            });
        }
    }
    Ok(rows)
}

pub fn fig2_rows(h0: f64, ks: &[f64]) -> Result<Vec<Fig2Row>> {
    ks.iter()
        .map(|&k| {
            Ok(Fig2Row {
                h0,
                k,
                fidelity: fidelity_matter(k, h0)?,
            })
        })
        .collect()
}

pub fn cmd_fig1(args: &Fig1Args, common: &Common) -> Result<()> {
    let hs = args.h.clone().unwrap_or_else(|| FIG1_DEFAULT_H.to_vec());
    if hs.is_empty() {
        return Err(CliError::Validation("empty H list".into()));
    }
    let rows = fig1_rows(&hs, &wavenumbers(&args.grid, FIG1_DEFAULT_GRID, false)?)?;
    emit(&encode(&rows, common.format.unwrap_or(Format::Csv))?, common.out.as_deref())
}

pub fn cmd_fig2(args: &Fig2Args, common: &Common) -> Result<()> {
    let rows = fig2_rows(args.h0, &wavenumbers(&args.grid, FIG2_DEFAULT_GRID, true)?)?;
    emit(&encode(&rows, common.format.unwrap_or(Format::Csv))?, common.out.as_deref())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub era: String,
    pub scale_factor: String,
    pub beta_sq_formula: String,
    pub fidelity_model: String,
    pub r: f64,
    pub gamma: f64,
    pub beta_sq_k1: f64,
    #[serde(rename = "fidelity_k0.1")]
    pub fidelity_k0_1: f64,
    pub fidelity_k1: f64,
    pub fidelity_k10: f64,
    pub trend: String,
    pub remark: String,
}

/// One row per era: Minkowski, radiation, matter, de Sitter.
pub fn table_rows(r: f64, gamma: f64, h: f64, h0: f64) -> Result<Vec<TableRow>> {
    let mink = fidelity_tmsv(r)?;
    let sample = |f: &dyn Fn(f64) -> Result<f64>| -> Result<[f64; 3]> {
        Ok([f(TABLE_SAMPLE_K[0])?, f(TABLE_SAMPLE_K[1])?, f(TABLE_SAMPLE_K[2])?])
    };
    let row = |era: &str, a: &str, b: &str, model: &str, beta_sq: f64, f: [f64; 3], trend: &str, remark: &str| TableRow {
        era: era.into(),
        scale_factor: a.into(),
        beta_sq_formula: b.into(),
        fidelity_model: model.into(),
        r,
        gamma,
        beta_sq_k1: beta_sq,
        fidelity_k0_1: f[0],
        fidelity_k1: f[1],
        fidelity_k10: f[2],
        trend: trend.into(),
        remark: remark.into(),
    };
    Ok(vec![
        row(
            "Minkowski",
            "a = const",
            "0",
            "1/(1+exp(-2r))",
            0.0,
            [mink; 3],
            "independent of k",
            "no particle creation, ideal baseline",
        ),
        row(
            "RadiationDominated",
            "a ~ eta",
            "0",
            "1/(1+exp(-2(r-gamma*beta_sq)))",
            0.0,
            sample(&|_| Ok(fidelity_effective(r, 0.0, gamma)?))?,
            "independent of k",
            "conformally trivial, vacuum preserved",
        ),
        row(
            "MatterDominated",
            "a = H0^2 eta^2/4",
            "1/(exp(2 pi k/H0)-1)",
            "1-exp(-2 pi k/H0)",
            beta_sq_matter(1.0, h0)?,
            sample(&|k| Ok(fidelity_matter(k, h0)?))?,
            "increases with k",
            "moderate degradation",
        ),
        row(
            "DeSitter",
            "a = -1/(H eta)",
            "1/(exp(2 pi k/H)-1)",
            "(1+exp(-pi k/H))/2",
            beta_sq_de_sitter(1.0, h)?,
            sample(&|k| Ok(fidelity_de_sitter_ratio(k, h)?))?,
            "decreases with k",
            "largest particle creation, strongest degradation",
        ),
    ])
}

pub fn render_table(rows: &[TableRow]) -> String {
    let header = [
        "era",
        "scale factor",
        "|beta_k|^2",
        "fidelity",
        "F(k=0.1)",
        "F(k=1)",
        "F(k=10)",
        "trend",
        "remark",
    ];
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.era.clone(),
                r.scale_factor.clone(),
                r.beta_sq_formula.clone(),
                r.fidelity_model.clone(),
                format!("{:.6}", r.fidelity_k0_1),
                format!("{:.6}", r.fidelity_k1),
                format!("{:.6}", r.fidelity_k10),
                r.trend.clone(),
                r.remark.clone(),
            ]
        })
        .collect();
    render_text(&header, &cells)
}

pub fn cmd_table(args: &TableArgs, common: &Common) -> Result<()> {
    let rows = table_rows(args.r, args.gamma, args.h, args.h0)?;
    let text = render_table(&rows);
    match common.format.unwrap_or(Format::Csv) {
        Format::Text => emit(text.as_bytes(), common.out.as_deref()),
        format => {
            emit(&encode(&rows, format)?, common.out.as_deref())?;
            if common.out.is_some() {
                emit(text.as_bytes(), None)?;
            }
            Ok(())
        }
    }
}
