//! Dielectric functions on the real and imaginary frequency axes.
//!
//! The Drude form
//!
//! ```text
//! ε(ω)  = 1 − ω_p² / (ω (ω + i ω_τ))
//! ε(iζ) = 1 + ω_p² / (ζ (ζ + ω_τ))
//! ```
//!
//! covers the metals used here. Tabulated optical data go through the
//! dispersion relation in [`kk`]. The resistivity diagnostic
//! `ρ(ω) = Im[1/(ε₀(1 − ε)ω)]` is flat for Drude data and equals
//! `ω_τ/(ε₀ω_p²)`.

pub mod kk;
pub mod model;
pub mod table;

use num_complex::Complex64;

use crate::constants::{EPS_0, E_CHARGE, M_E, N_A};
use crate::error::{Error, Result};

pub use kk::{kk_eps_imag_axis, ExtrapolationPolicy, TabulatedModel};
pub use model::{DielectricModel, StaticLimit};
pub use table::{OpticalSample, OpticalTable};

/// Plasma and damping frequencies of a Drude metal, both in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeParams {
    omega_p: f64,
    omega_tau: f64,
}

impl DrudeParams {
    /// A dissipative Drude metal. Requires `omega_p ≥ 0` and `omega_tau > 0`.
    pub fn new(omega_p: f64, omega_tau: f64) -> Result<Self> {
        if !(omega_p.is_finite() && omega_p >= 0.0) {
            return Err(Error::Domain(format!("omega_p must be >= 0, got {omega_p}")));
        }
        if !(omega_tau.is_finite() && omega_tau > 0.0) {
            return Err(Error::Domain(format!(
                "omega_tau must be > 0, got {omega_tau} (use DrudeParams::plasma for the lossless limit)"
            )));
        }
        Ok(DrudeParams { omega_p, omega_tau })
    }

    /// The lossless plasma model (`omega_tau = 0`).
    pub fn plasma(omega_p: f64) -> Result<Self> {
        if !(omega_p.is_finite() && omega_p >= 0.0) {
            return Err(Error::Domain(format!("omega_p must be >= 0, got {omega_p}")));
        }
        Ok(DrudeParams {
            omega_p,
            omega_tau: 0.0,
        })
    }

    /// Build from plasma frequency and static resistivity (Ω·m).
    pub fn from_resistivity(omega_p: f64, rho_0: f64) -> Result<Self> {
        DrudeParams::new(omega_p, damping_from_resistivity(omega_p, rho_0)?)
    }

    pub fn omega_p(&self) -> f64 {
        self.omega_p
    }

    pub fn omega_tau(&self) -> f64 {
        self.omega_tau
    }

    pub fn is_lossless(&self) -> bool {
        self.omega_tau == 0.0
    }

    /// Static resistivity `ω_τ/(ε₀ω_p²)` in Ω·m.
    pub fn resistivity(&self) -> f64 {
        self.omega_tau / (EPS_0 * self.omega_p * self.omega_p)
    }

    pub fn with_omega_p(self, omega_p: f64) -> Result<Self> {
        if self.is_lossless() {
            DrudeParams::plasma(omega_p)
        } else {
            DrudeParams::new(omega_p, self.omega_tau)
        }
    }

    pub fn with_omega_tau(self, omega_tau: f64) -> Result<Self> {
        DrudeParams::new(self.omega_p, omega_tau)
    }
}

/// Drude ε(ω) on the real axis.
pub fn drude_eps_real_axis(p: &DrudeParams, omega: f64) -> Result<Complex64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("omega must be > 0, got {omega}")));
    }
    let denom = Complex64::new(omega * omega, omega * p.omega_tau);
    Ok(Complex64::new(1.0, 0.0) - p.omega_p * p.omega_p / denom)
}

/// Drude ε(iζ) on the imaginary axis.
pub fn drude_eps_imag_axis(p: &DrudeParams, zeta: f64) -> Result<f64> {
    if !(zeta > 0.0) || zeta.is_nan() {
        return Err(Error::Domain(format!("zeta must be > 0, got {zeta}")));
    }
    if zeta.is_infinite() {
        return Ok(1.0);
    }
    Ok(1.0 + p.omega_p * p.omega_p / (zeta * (zeta + p.omega_tau)))
}

/// One point of a resistivity spectrum. `rho` is `None` where ε = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResistivityPoint {
    pub omega: f64,
    pub rho: Option<f64>,
}

/// `ρ(ω) = Im[1/(ε₀(1 − ε(ω))ω)]` for each sample.
pub fn resistivity_spectrum(eps_values: &[(f64, Complex64)]) -> Result<Vec<ResistivityPoint>> {
    eps_values
        .iter()
        .map(|&(omega, eps)| {
            if !(omega > 0.0 && omega.is_finite()) {
                return Err(Error::Domain(format!("omega must be > 0, got {omega}")));
            }
            let one_minus = Complex64::new(1.0, 0.0) - eps;
            let rho = if one_minus == Complex64::new(0.0, 0.0) {
                None
            } else {
                Some((1.0 / (EPS_0 * omega * one_minus)).im)
            };
            Ok(ResistivityPoint { omega, rho })
        })
        .collect()
}

/// Free-electron content of a metal, for estimating ω_p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialComposition {
    /// kg/m³
    pub mass_density: f64,
    /// kg/mol
    pub molar_mass: f64,
    pub electrons_per_atom: f64,
    /// m*/mₑ
    pub effective_mass_ratio: f64,
}

impl MaterialComposition {
    pub fn new(mass_density: f64, molar_mass: f64, electrons_per_atom: f64) -> Self {
        MaterialComposition {
            mass_density,
            molar_mass,
            electrons_per_atom,
            effective_mass_ratio: 1.0,
        }
    }

    /// Free-electron number density, 1/m³.
    pub fn electron_density(&self) -> f64 {
        self.electrons_per_atom * N_A * self.mass_density / self.molar_mass
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be > 0, got {v}")))
            }
        };
        positive("mass_density", self.mass_density)?;
        positive("molar_mass", self.molar_mass)?;
        positive("effective_mass_ratio", self.effective_mass_ratio)?;
        if !(self.electrons_per_atom >= 0.0 && self.electrons_per_atom.is_finite()) {
            return Err(Error::Domain(format!(
                "electrons_per_atom must be >= 0, got {}",
                self.electrons_per_atom
            )));
        }
        Ok(())
    }
}

/// `ω_p = sqrt(e² n / (m* ε₀))`.
pub fn plasma_frequency(comp: &MaterialComposition) -> Result<f64> {
    comp.validate()?;
    let n = comp.electron_density();
    Ok((E_CHARGE * E_CHARGE * n / (comp.effective_mass_ratio * M_E * EPS_0)).sqrt())
}

/// `ω_τ = ε₀ ω_p² ρ₀`.
pub fn damping_from_resistivity(omega_p: f64, rho_0: f64) -> Result<f64> {
    if !(omega_p > 0.0 && omega_p.is_finite()) {
        return Err(Error::Domain(format!("omega_p must be > 0, got {omega_p}")));
    }
    if !(rho_0 > 0.0 && rho_0.is_finite()) {
        return Err(Error::Domain(format!("rho_0 must be > 0, got {rho_0}")));
    }
    Ok(EPS_0 * omega_p * omega_p * rho_0)
}
