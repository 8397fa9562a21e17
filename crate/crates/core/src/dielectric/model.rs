use std::fmt;
use std::sync::Arc;

use crate::dielectric::{drude_eps_imag_axis, DrudeParams, TabulatedModel};
use crate::error::Result;

/// Behaviour of ε(iζ) as ζ → 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StaticLimit {
    /// ε(iζ) grows without bound (metals).
    Divergent,
    /// ε(0) is finite.
    Finite(f64),
}

/// A dielectric response usable on the imaginary frequency axis.
#[derive(Debug, Clone)]
pub enum DielectricModel {
    Drude(DrudeParams),
    Tabulated(Arc<TabulatedModel>),
    /// ε → ∞ at every frequency. Both reflection factors are exactly ±1.
    IdealMetal,
}

impl DielectricModel {
    /// ε(iζ) for ζ > 0. Returns `f64::INFINITY` for the ideal metal.
    pub fn eps_imag_axis(&self, zeta: f64) -> Result<f64> {
        match self {
            DielectricModel::Drude(p) => drude_eps_imag_axis(p, zeta),
            DielectricModel::Tabulated(t) => t.eps_imag_axis(zeta),
            DielectricModel::IdealMetal => Ok(f64::INFINITY),
        }
    }

    pub fn static_limit(&self) -> Result<StaticLimit> {
        Ok(match self {
            DielectricModel::Drude(p) if p.omega_p() == 0.0 => StaticLimit::Finite(1.0),
            DielectricModel::Drude(_) | DielectricModel::IdealMetal => StaticLimit::Divergent,
            DielectricModel::Tabulated(t) => match t.static_eps()? {
                Some(e) => StaticLimit::Finite(e),
                None => StaticLimit::Divergent,
            },
        })
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self, DielectricModel::IdealMetal)
    }

    pub fn as_drude(&self) -> Option<&DrudeParams> {
        match self {
            DielectricModel::Drude(p) => Some(p),
            _ => None,
        }
    }
}

impl From<DrudeParams> for DielectricModel {
    fn from(p: DrudeParams) -> Self {
        DielectricModel::Drude(p)
    }
}

impl fmt::Display for DielectricModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DielectricModel::Drude(p) => write!(
                f,
                "drude(omega_p={:e},omega_tau={:e})",
                p.omega_p(),
                p.omega_tau()
            ),
            DielectricModel::Tabulated(t) => {
                let (lo, hi) = t.table().omega_range();
                write!(
                    f,
                    "table(n={},omega=[{lo:e},{hi:e}],extrapolation={})",
                    t.table().len(),
                    t.policy()
                )
            }
            DielectricModel::IdealMetal => write!(f, "ideal-metal"),
        }
    }
}
