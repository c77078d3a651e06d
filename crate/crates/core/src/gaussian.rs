//! Gaussian covariance-matrix description of single field modes and of
//! two-mode teleportation resources.
//!
//! Conventions: vacuum variance 1/2, mode ordering `(q₁, p₁, q₂, p₂)`,
//! symplectic form `Ω = ⊕ [[0, 1], [−1, 0]]`.

use crate::modes::{FieldMode, HANKEL_NORMALIZATION};
use crate::specfun::{self, SpecialFunctionError};
use nalgebra::{Matrix2, Matrix4, SMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Slack on the uncertainty relation and on the symplectic positivity test,
/// matched to the Wronskian accuracy of evolved modes: `|W| = 1 − δ` gives
/// `det = 1/4 − δ/2 + O(δ²)`.
pub const PHYSICALITY_TOL: f64 = 1e-8;
pub const SUBHORIZON_THRESHOLD: f64 = 10.0;
pub const SUPERHORIZON_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaussianError {
    #[error("non-physical covariance: {0}")]
    NonPhysical(String),
    #[error("{name} = {value} is outside its domain")]
    Domain { name: &'static str, value: f64 },
    #[error("k|eta| = {x} is outside the {regime} regime")]
    OutsideRegime { x: f64, regime: Regime },
    #[error("{0}")]
    SpecialFunction(#[from] SpecialFunctionError),
}

pub type Result<T, E = GaussianError> = std::result::Result<T, E>;

/// Second moments of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceBlock {
    qq: f64,
    pp: f64,
    qp: f64,
}

impl CovarianceBlock {
    /// Checks `qq, pp > 0` and `qq·pp − qp² ≥ 1/4` up to
    /// [`PHYSICALITY_TOL`] relative to `max(1, 4 qq·pp)`.
    pub fn new(qq: f64, pp: f64, qp: f64) -> Result<Self> {
        if !(qq > 0.0 && pp > 0.0 && qq.is_finite() && pp.is_finite() && qp.is_finite()) {
            return Err(GaussianError::NonPhysical(format!(
                "need finite qq > 0 and pp > 0, got qq = {qq}, pp = {pp}, qp = {qp}"
            )));
        }
        let block = Self { qq, pp, qp };
        let slack = PHYSICALITY_TOL * (4.0 * qq * pp).max(1.0);
        if block.det() < 0.25 - slack {
            return Err(GaussianError::NonPhysical(format!(
                "qq*pp - qp^2 = {} violates the uncertainty bound 1/4",
                block.det()
            )));
        }
        Ok(block)
    }

    /// `(n̄ + 1/2) I₂`
    pub fn thermal(nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(GaussianError::Domain { name: "nbar", value: nbar });
        }
        Self::new(nbar + 0.5, nbar + 0.5, 0.0)
    }

    pub fn vacuum() -> Self {
        Self {
            qq: 0.5,
            pp: 0.5,
            qp: 0.0,
        }
    }

    pub fn qq(&self) -> f64 {
        self.qq
    }

    pub fn pp(&self) -> f64 {
        self.pp
    }

    pub fn qp(&self) -> f64 {
        self.qp
    }

    /// `qq·pp − qp²`
    pub fn det(&self) -> f64 {
        self.qq * self.pp - self.qp * self.qp
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.qq, self.qp, self.qp, self.pp)
    }
}

/// `qq = |φ|²`, `pp = |a² φ'|²`, `qp = Re(φ a² φ'*)`.
pub fn covariance_from_mode(phi: Complex64, dphi: Complex64, a: f64) -> Result<CovarianceBlock> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(GaussianError::Domain { name: "a", value: a });
    }
    let momentum = a * a * dphi;
    CovarianceBlock::new(phi.norm_sqr(), momentum.norm_sqr(), (phi * momentum.conj()).re)
}

/// Blocks at every grid point of a field mode.
pub fn covariance_along(mode: &FieldMode) -> Result<Vec<CovarianceBlock>> {
    mode.phi
        .iter()
        .zip(&mode.dphi)
        .zip(&mode.scale_factor)
        .map(|((&phi, &dphi), &a)| covariance_from_mode(phi, dphi, a))
        .collect()
}

/// Symmetric 4×4 covariance `[[A, C], [Cᵀ, B]]` of two modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCovariance {
    sigma: Matrix4<f64>,
}

fn omega() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

impl TwoModeCovariance {
    /// Validates symmetry and `σ + (i/2)Ω ≥ 0` to [`PHYSICALITY_TOL`].
    pub fn new(sigma: Matrix4<f64>) -> Result<Self> {
        if sigma.iter().any(|v| !v.is_finite()) {
            return Err(GaussianError::NonPhysical("non-finite entry".into()));
        }
        let scale = sigma.abs().max().max(1.0);
        if (sigma - sigma.transpose()).abs().max() > PHYSICALITY_TOL * scale {
            return Err(GaussianError::NonPhysical("sigma is not symmetric".into()));
        }
        let min = Self::min_hermitian_eigenvalue(&sigma);
        if min < -PHYSICALITY_TOL * scale {
            return Err(GaussianError::NonPhysical(format!(
                "sigma + (i/2) Omega has eigenvalue {min:e} < 0"
            )));
        }
        Ok(Self { sigma })
    }

    pub fn from_blocks(a: Matrix2<f64>, b: Matrix2<f64>, c: Matrix2<f64>) -> Result<Self> {
        let mut s = Matrix4::zeros();
        s.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
        s.fixed_view_mut::<2, 2>(2, 2).copy_from(&b);
        s.fixed_view_mut::<2, 2>(0, 2).copy_from(&c);
        s.fixed_view_mut::<2, 2>(2, 0).copy_from(&c.transpose());
        Self::new(s)
    }

    /// Uncorrelated product of two blocks.
    pub fn product(a: &CovarianceBlock, b: &CovarianceBlock) -> Result<Self> {
        Self::from_blocks(a.matrix(), b.matrix(), Matrix2::zeros())
    }

    /// Two-mode squeezed vacuum with squeezing `r`.
    pub fn tmsv(r: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(GaussianError::Domain { name: "r", value: r });
        }
        let c = 0.5 * (2.0 * r).cosh();
        let s = 0.5 * (2.0 * r).sinh();
        Self::from_blocks(
            Matrix2::identity() * c,
            Matrix2::identity() * c,
            Matrix2::new(s, 0.0, 0.0, -s),
        )
    }

    pub fn sigma(&self) -> &Matrix4<f64> {
        &self.sigma
    }

    pub fn a(&self) -> Matrix2<f64> {
        self.sigma.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn b(&self) -> Matrix2<f64> {
        self.sigma.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn c(&self) -> Matrix2<f64> {
        self.sigma.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// Smallest eigenvalue of the Hermitian `σ + (i/2)Ω`, through its real
    /// symmetric 8×8 embedding `[[σ, −Ω/2], [Ω/2, σ]]`.
    fn min_hermitian_eigenvalue(sigma: &Matrix4<f64>) -> f64 {
        let k = omega() * 0.5;
        let mut m = SMatrix::<f64, 8, 8>::zeros();
        m.fixed_view_mut::<4, 4>(0, 0).copy_from(sigma);
        m.fixed_view_mut::<4, 4>(4, 4).copy_from(sigma);
        m.fixed_view_mut::<4, 4>(0, 4).copy_from(&(-k));
        m.fixed_view_mut::<4, 4>(4, 0).copy_from(&k);
        SymmetricEigen::new(m).eigenvalues.min()
    }
}

/// `2/√det(2σ + I)`, evaluated as written.
pub fn fidelity_two_mode(sigma: &TwoModeCovariance) -> f64 {
    let m = sigma.sigma * 2.0 + Matrix4::identity();
    2.0 / m.determinant().sqrt()
}

/// Unit-gain coherent-state teleportation through the resource `σ`:
/// `1/√det(I + ZAZ + B − ZC − CᵀZ)` with `Z = diag(1, −1)`.
pub fn fidelity_teleportation(sigma: &TwoModeCovariance) -> f64 {
    let z = Matrix2::new(1.0, 0.0, 0.0, -1.0);
    let (a, b, c) = (sigma.a(), sigma.b(), sigma.c());
    let gamma = Matrix2::identity() + z * a * z + b - z * c - c.transpose() * z;
    1.0 / gamma.determinant().sqrt()
}

/// `det(A + I/2)^{−1/2}`
pub fn fidelity_symmetric(block: &CovarianceBlock) -> f64 {
    let m = block.matrix() + Matrix2::identity() * 0.5;
    1.0 / m.determinant().sqrt()
}

/// `n̄ = √(qq·pp − qp²) − 1/2`; values within the physicality slack
/// below zero are clamped to 0.
pub fn noise_number_from_block(block: &CovarianceBlock) -> Result<f64> {
    let nbar = block.det().sqrt() - 0.5;
    if nbar >= 0.0 {
        Ok(nbar)
    } else if nbar > -PHYSICALITY_TOL * (4.0 * block.qq * block.pp).max(1.0) {
        Ok(0.0)
    } else {
        Err(GaussianError::NonPhysical(format!("negative noise number {nbar:e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Subhorizon,
    Intermediate,
    Superhorizon,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Subhorizon => "Subhorizon",
            Regime::Intermediate => "Intermediate",
            Regime::Superhorizon => "Superhorizon",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_regime(k: f64, eta: f64) -> Regime {
    let x = k * eta.abs();
    if x >= SUBHORIZON_THRESHOLD {
        Regime::Subhorizon
    } else if x <= SUPERHORIZON_THRESHOLD {
        Regime::Superhorizon
    } else {
        Regime::Intermediate
    }
}

fn subhorizon_check(k: f64, eta: f64, a: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(GaussianError::Domain { name: "k", value: k });
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(GaussianError::Domain { name: "a", value: a });
    }
    let x = k * eta.abs();
    if !(x >= SUBHORIZON_THRESHOLD) {
        return Err(GaussianError::OutsideRegime {
            x,
            regime: Regime::Subhorizon,
        });
    }
    Ok(())
}

/// Subhorizon block from the unnormalized Hankel asymptote:
/// `qq = 2/(πka²)`, `qp = 0`, and `pp = πka²/8` fixed by purity.
pub fn subhorizon_covariance(k: f64, eta: f64, a: f64) -> Result<CovarianceBlock> {
    subhorizon_check(k, eta, a)?;
    CovarianceBlock::new(2.0 / (PI * k * a * a), PI * k * a * a / 8.0, 0.0)
}

/// The same block for Wronskian-normalized modes (`N² = π/4` applied):
/// `qq = 1/(2ka²)`, `pp = ka²/2`. This is the form exact modes approach.
pub fn subhorizon_covariance_normalized(k: f64, eta: f64, a: f64) -> Result<CovarianceBlock> {
    subhorizon_check(k, eta, a)?;
    CovarianceBlock::new(0.5 / (k * a * a), 0.5 * k * a * a, 0.0)
}

/// `prefactor · (k|η|)^exponent`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub prefactor: f64,
    pub exponent: f64,
}

impl PowerLaw {
    pub fn at(&self, x: f64) -> f64 {
        self.prefactor * x.powf(self.exponent)
    }
}

/// Leading superhorizon behaviour of the normalized Hankel mode
/// `|χ|² ≈ N²|η| (Γ(ν)/π)² (2/x)^{2ν}` and of `k²|χ|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperhorizonScaling {
    pub qq: PowerLaw,
    pub pp: PowerLaw,
}

impl SuperhorizonScaling {
    /// Block built from the two scalings at `x = k|η|`, with `qp = 0`.
    pub fn block(&self, x: f64) -> Result<CovarianceBlock> {
        CovarianceBlock::new(self.qq.at(x), self.pp.at(x), 0.0)
    }
}

pub fn superhorizon_scaling(k: f64, eta: f64, nu: f64) -> Result<SuperhorizonScaling> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(GaussianError::Domain { name: "k", value: k });
    }
    if !(nu > 0.0 && nu <= specfun::MAX_ORDER) {
        return Err(GaussianError::Domain { name: "nu", value: nu });
    }
    let s = eta.abs();
    let x = k * s;
    if !(x > 0.0 && x <= SUPERHORIZON_THRESHOLD) {
        return Err(GaussianError::OutsideRegime {
            x,
            regime: Regime::Superhorizon,
        });
    }
    let g = specfun::gamma(nu)? / PI;
    let base = HANKEL_NORMALIZATION * HANKEL_NORMALIZATION * g * g * 4f64.powf(nu);
    Ok(SuperhorizonScaling {
        qq: PowerLaw {
            prefactor: base * s,
            exponent: -2.0 * nu,
        },
        pp: PowerLaw {
            prefactor: base / s,
            exponent: 2.0 - 2.0 * nu,
        },
    })
}

/// Columns `k, eta, regime, qq, pp, qp, nbar, fidelity_BH, fidelity_BI`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceRow {
    pub k: f64,
    pub eta: f64,
    pub regime: Regime,
    pub qq: f64,
    pub pp: f64,
    pub qp: f64,
    pub nbar: f64,
    #[serde(rename = "fidelity_BH")]
    pub fidelity_symmetric: f64,
    #[serde(rename = "fidelity_BI")]
    pub fidelity_thermal: f64,
}

impl CovarianceRow {
    pub fn new(k: f64, eta: f64, block: &CovarianceBlock) -> Result<Self> {
        let nbar = noise_number_from_block(block)?;
        Ok(Self {
            k,
            eta,
            regime: classify_regime(k, eta),
            qq: block.qq,
            pp: block.pp,
            qp: block.qp,
            nbar,
            fidelity_symmetric: fidelity_symmetric(block),
            fidelity_thermal: 1.0 / (1.0 + nbar),
        })
    }
}
