//! Lifshitz force between two identical coated bodies.
//!
//! Plate–plate pressure and sphere–plate force are evaluated after the
//! substitution `x = 2pζa/c`:
//!
//! ```text
//! P = kT/(8πa³) Σ'ₙ ∫_{xₙ}^∞ dx x² Σ_pol r²/(eˣ − r²)
//! F = kTR/(4a²) Σ'ₙ ∫_{xₙ}^∞ dx x (−Σ_pol ln(1 − r² e⁻ˣ))
//! ```
//!
//! with `xₙ = 2ζₙa/c` and `r = 1/G` per polarization. The sphere–plate
//! expression is the proximity-force integral of the plate pressure done
//! analytically. At zero temperature `kT Σ'ₙ` becomes `(ħ/2π)∫₀^∞ dζ`.
//!
//! The n = 0 term is taken in the ζ → 0 limit: TE vanishes unless the
//! material is a lossless plasma (or ideal), and TM reflects perfectly for
//! any material whose ε(iζ) diverges at zero frequency.

mod force;
mod pft;
pub mod reflection;

use std::f64::consts::PI;
use std::fmt;

use crate::constants::{C, HBAR, K_B};
use crate::dielectric::DielectricModel;
use crate::error::{Error, Result};

pub use force::{plate_pressure, sphere_plate_force, zero_frequency_check, ZeroFrequencyCheck};
pub use pft::{pft_consistency_check, PftCheck};
pub use reflection::{reflection_factors_homogeneous, reflection_factors_layered};

/// `ζₙ = 2πnkT/ħ`.
pub fn matsubara_frequency(n: usize, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::Domain(format!("temperature must be > 0, got {temperature}")));
    }
    Ok(2.0 * PI * n as f64 * K_B * temperature / HBAR)
}

/// `π²ħc/(240a⁴)`, the perfect-conductor pressure at T = 0.
pub fn ideal_casimir_pressure(a: f64) -> Result<f64> {
    check_separation(a)?;
    Ok(PI * PI * HBAR * C / (240.0 * a.powi(4)))
}

/// `π³ħcR/(360a³)`, the proximity-force sphere–plate force for perfect
/// conductors at T = 0.
pub fn ideal_sphere_plate_force(a: f64, radius: f64) -> Result<f64> {
    check_separation(a)?;
    Ok(PI.powi(3) * HBAR * C * radius / (360.0 * a.powi(3)))
}

pub(crate) fn check_separation(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("separation must be > 0, got {a}")))
    }
}

/// A finite film.
#[derive(Debug, Clone)]
pub struct Layer {
    pub model: DielectricModel,
    /// m
    pub thickness: f64,
}

/// Coating of one body: optional film over a semi-infinite substrate. Both
/// bodies carry the same stack.
#[derive(Debug, Clone)]
pub struct LayerStack {
    top: Option<Layer>,
    substrate: DielectricModel,
}

impl LayerStack {
    pub fn homogeneous(substrate: impl Into<DielectricModel>) -> Self {
        LayerStack {
            top: None,
            substrate: substrate.into(),
        }
    }

    pub fn layered(
        top: impl Into<DielectricModel>,
        thickness: f64,
        substrate: impl Into<DielectricModel>,
    ) -> Result<Self> {
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(Error::Domain(format!(
                "top layer thickness must be > 0, got {thickness}"
            )));
        }
        Ok(LayerStack {
            top: Some(Layer {
                model: top.into(),
                thickness,
            }),
            substrate: substrate.into(),
        })
    }

    pub fn ideal_metal() -> Self {
        LayerStack::homogeneous(DielectricModel::IdealMetal)
    }

    pub fn top(&self) -> Option<&Layer> {
        self.top.as_ref()
    }

    pub fn substrate(&self) -> &DielectricModel {
        &self.substrate
    }

    pub fn top_mut(&mut self) -> Option<&mut Layer> {
        self.top.as_mut()
    }

    pub fn substrate_mut(&mut self) -> &mut DielectricModel {
        &mut self.substrate
    }

    /// The model the fields see first.
    pub fn surface(&self) -> &DielectricModel {
        self.top.as_ref().map(|l| &l.model).unwrap_or(&self.substrate)
    }
}

impl fmt::Display for LayerStack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.top {
            Some(l) => write!(f, "{} [{:e} m] on {}", l.model, l.thickness, self.substrate),
            None => write!(f, "{}", self.substrate),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    PlatePlate { a: f64 },
    SpherePlate { a: f64, radius: f64 },
}

impl Geometry {
    /// Smallest R/a accepted for the sphere–plate formula.
    pub const MIN_RADIUS_RATIO: f64 = 100.0;
    /// Below this R/a a warning is attached to results.
    pub const WARN_RADIUS_RATIO: f64 = 1000.0;

    pub fn separation(&self) -> f64 {
        match *self {
            Geometry::PlatePlate { a } | Geometry::SpherePlate { a, .. } => a,
        }
    }

    pub fn validate(&self) -> Result<Vec<String>> {
        check_separation(self.separation())?;
        let mut warnings = Vec::new();
        if let Geometry::SpherePlate { a, radius } = *self {
            let ratio = radius / a;
            if !(ratio >= Self::MIN_RADIUS_RATIO) {
                return Err(Error::Domain(format!(
                    "sphere-plate formula needs R/a >= {}, got {ratio}",
                    Self::MIN_RADIUS_RATIO
                )));
            }
            if ratio < Self::WARN_RADIUS_RATIO {
                warnings.push(format!(
                    "R/a = {ratio:.0} is below {}; proximity-force corrections may matter",
                    Self::WARN_RADIUS_RATIO
                ));
            }
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThermalMode {
    MatsubaraSum,
    ZeroTemperatureIntegral,
}

impl fmt::Display for ThermalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThermalMode::MatsubaraSum => write!(f, "sum"),
            ThermalMode::ZeroTemperatureIntegral => write!(f, "integral"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpec {
    /// K; ignored by the zero-temperature integral.
    pub temperature: f64,
    pub mode: ThermalMode,
}

impl ThermalSpec {
    pub const DEFAULT_TEMPERATURE: f64 = 300.0;

    pub fn sum(temperature: f64) -> Self {
        ThermalSpec {
            temperature,
            mode: ThermalMode::MatsubaraSum,
        }
    }

    pub fn zero_temperature() -> Self {
        ThermalSpec {
            temperature: 0.0,
            mode: ThermalMode::ZeroTemperatureIntegral,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.mode == ThermalMode::MatsubaraSum && !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::Domain(format!(
                "Matsubara summation needs T > 0, got {}",
                self.temperature
            )));
        }
        Ok(())
    }
}

impl Default for ThermalSpec {
    fn default() -> Self {
        ThermalSpec::sum(Self::DEFAULT_TEMPERATURE)
    }
}

impl fmt::Display for ThermalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            ThermalMode::MatsubaraSum => write!(f, "sum(T={} K)", self.temperature),
            ThermalMode::ZeroTemperatureIntegral => write!(f, "integral(T=0)"),
        }
    }
}

/// Numerical controls for the force evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Relative tolerance of every x- and ζ-integral.
    pub rel_tol: f64,
    /// The x-integral runs to `xₙ + x_max_offset + 10 ln 10`.
    pub x_max_offset: f64,
    /// Matsubara terms are summed until they and the tail drop below this
    /// fraction of the partial sum.
    pub matsubara_tail_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            x_max_offset: 50.0,
            matsubara_tail_tol: 1e-10,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rel_tol", self.rel_tol),
            ("x_max_offset", self.x_max_offset),
            ("matsubara_tail_tol", self.matsubara_tail_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub(crate) fn x_span(&self) -> f64 {
        self.x_max_offset + 10.0 * std::f64::consts::LN_10
    }
}

/// A computed pressure (Pa) or force (N).
#[derive(Debug, Clone, PartialEq)]
pub struct ForceResult {
    pub value: f64,
    /// Matsubara terms summed, or integrand evaluations of the ζ-integral.
    pub n_terms_used: usize,
    /// Geometric estimate of the omitted Matsubara tail (included in `value`).
    pub tail_estimate: f64,
    pub thermal: ThermalSpec,
    pub warnings: Vec<String>,
}

/// A force or pressure evaluation with everything but the separation fixed.
#[derive(Debug, Clone)]
pub struct ForceJob {
    pub stack: LayerStack,
    /// Sphere radius; `None` evaluates the plate–plate pressure.
    pub radius: Option<f64>,
    pub thermal: ThermalSpec,
    pub quad: QuadratureSpec,
}

impl ForceJob {
    pub fn evaluate(&self, a: f64) -> Result<ForceResult> {
        match self.radius {
            Some(r) => sphere_plate_force(&self.stack, a, r, self.thermal, self.quad),
            None => plate_pressure(&self.stack, a, self.thermal, self.quad),
        }
    }

    pub fn value(&self, a: f64) -> Result<f64> {
        Ok(self.evaluate(a)?.value)
    }
}
