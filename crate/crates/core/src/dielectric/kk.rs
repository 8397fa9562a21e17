//! ε(iζ) from tabulated Im ε(ω) through the dispersion relation
//!
//! ```text
//! ε(iζ) − 1 = (2/π) ∫₀^∞ dω ω Im ε(ω) / (ω² + ζ²)
//! ```
//!
//! Inside the table the integral runs in `u = ln ω` with Im ε interpolated
//! linearly in `(ln ω, ln Im ε)`. Outside, Im ε follows a power law
//! anchored at the end samples; the Drude-like tails (1/ω below, 1/ω³ above)
//! are integrated in closed form.

use std::f64::consts::PI;
use std::fmt;

use crate::dielectric::OpticalTable;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_to_infinity, integrate_with_breakpoints, Tolerance};

/// How Im ε(ω) is continued outside the tabulated range.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ExtrapolationPolicy {
    /// Im ε ∝ 1/ω below the table and ∝ 1/ω³ above.
    #[default]
    DrudeTails,
    /// Im ε ∝ ω^(−low_exponent) below and ω^(−high_exponent) above.
    PowerLaw {
        low_exponent: f64,
        high_exponent: f64,
    },
    /// Im ε = 0 outside the table.
    Zero,
}

impl fmt::Display for ExtrapolationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtrapolationPolicy::DrudeTails => write!(f, "drude-tails(low=w^-1,high=w^-3)"),
            ExtrapolationPolicy::PowerLaw {
                low_exponent,
                high_exponent,
            } => write!(f, "power-law(low=w^-{low_exponent},high=w^-{high_exponent})"),
            ExtrapolationPolicy::Zero => write!(f, "zero"),
        }
    }
}

impl std::str::FromStr for ExtrapolationPolicy {
    type Err = Error;

    /// `drude`, `zero` or `power:<low>,<high>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "drude" => Ok(ExtrapolationPolicy::DrudeTails),
            "zero" => Ok(ExtrapolationPolicy::Zero),
            other => {
                let bad = || Error::Input(format!("unknown extrapolation '{other}' (drude|zero|power:<low>,<high>)"));
                let (lo, hi) = other
                    .strip_prefix("power:")
                    .and_then(|r| r.split_once(','))
                    .ok_or_else(bad)?;
                let p = ExtrapolationPolicy::PowerLaw {
                    low_exponent: lo.trim().parse().map_err(|_| bad())?,
                    high_exponent: hi.trim().parse().map_err(|_| bad())?,
                };
                p.validate()?;
                Ok(p)
            }
        }
    }
}

impl ExtrapolationPolicy {
    fn exponents(&self) -> Option<(f64, f64)> {
        match *self {
            ExtrapolationPolicy::DrudeTails => Some((1.0, 3.0)),
            ExtrapolationPolicy::PowerLaw {
                low_exponent,
                high_exponent,
            } => Some((low_exponent, high_exponent)),
            ExtrapolationPolicy::Zero => None,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some((low, high)) = self.exponents() {
            if !(low.is_finite() && low < 2.0) {
                return Err(Error::Policy(format!(
                    "low-frequency tail w^-{low} makes the dispersion integral diverge (need exponent < 2)"
                )));
            }
            if !(high.is_finite() && high > 0.0) {
                return Err(Error::Policy(format!(
                    "high-frequency tail w^-{high} makes the dispersion integral diverge (need exponent > 0)"
                )));
            }
        }
        Ok(())
    }
}

const KK_REL_TOL: f64 = 1e-8;

/// An optical table prepared for repeated dispersion-relation evaluation.
#[derive(Debug, Clone)]
pub struct TabulatedModel {
    table: OpticalTable,
    policy: ExtrapolationPolicy,
    ln_omega: Vec<f64>,
    im: Vec<f64>,
    ln_im: Vec<f64>,
}

impl TabulatedModel {
    pub fn new(table: OpticalTable, policy: ExtrapolationPolicy) -> Result<Self> {
        policy.validate()?;
        let ln_omega = table.samples().iter().map(|s| s.omega.ln()).collect();
        let im: Vec<f64> = table.samples().iter().map(|s| s.eps.im).collect();
        let ln_im = im.iter().map(|v| if *v > 0.0 { v.ln() } else { f64::NEG_INFINITY }).collect();
        Ok(TabulatedModel {
            table,
            policy,
            ln_omega,
            im,
            ln_im,
        })
    }

    pub fn table(&self) -> &OpticalTable {
        &self.table
    }

    pub fn policy(&self) -> ExtrapolationPolicy {
        self.policy
    }

    /// Interpolated Im ε at `u = ln ω` inside the table.
    fn im_at(&self, u: f64) -> f64 {
        let n = self.ln_omega.len();
        let i = self.ln_omega.partition_point(|&x| x <= u).clamp(1, n - 1) - 1;
        let (u0, u1) = (self.ln_omega[i], self.ln_omega[i + 1]);
        let t = (u - u0) / (u1 - u0);
        if self.im[i] > 0.0 && self.im[i + 1] > 0.0 {
            (self.ln_im[i] + t * (self.ln_im[i + 1] - self.ln_im[i])).exp()
        } else {
            self.im[i] + t * (self.im[i + 1] - self.im[i])
        }
    }

    /// Im ε(ω) including the extrapolated tails.
    pub fn im_eps(&self, omega: f64) -> f64 {
        let (w0, w1) = self.table.omega_range();
        let (i0, i1) = (self.im[0], self.im[self.im.len() - 1]);
        match self.policy.exponents() {
            _ if omega >= w0 && omega <= w1 => self.im_at(omega.ln()),
            None => 0.0,
            Some((low, _)) if omega < w0 => i0 * (omega / w0).powf(-low),
            Some((_, high)) => i1 * (omega / w1).powf(-high),
        }
    }

    /// ε(0), or `None` when it diverges (metallic low-frequency tail).
    pub fn static_eps(&self) -> Result<Option<f64>> {
        let i0 = self.im[0];
        if let Some((low, _)) = self.policy.exponents() {
            if i0 > 0.0 && low >= 0.0 {
                return Ok(None);
            }
        }
        self.eval(0.0).map(Some)
    }

    /// ε(iζ) for ζ > 0.
    pub fn eps_imag_axis(&self, zeta: f64) -> Result<f64> {
        if !(zeta > 0.0) || zeta.is_nan() {
            return Err(Error::Domain(format!("zeta must be > 0, got {zeta}")));
        }
        if zeta.is_infinite() {
            return Ok(1.0);
        }
        self.eval(zeta)
    }

    fn eval(&self, zeta: f64) -> Result<f64> {
        let u0 = self.ln_omega[0];
        let u1 = self.ln_omega[self.ln_omega.len() - 1];
        let n_seg = self.ln_omega.len() - 1;
        let tol = Tolerance {
            rel: KK_REL_TOL,
            abs: 0.0,
            max_intervals: 8 * n_seg + 2000,
        };

        let inner = if self.im.iter().all(|&v| v == 0.0) {
            0.0
        } else {
            let g = |u: f64| {
                let r = zeta * (-u).exp();
                self.im_at(u) / (1.0 + r * r)
            };
            let interior = &self.ln_omega[1..self.ln_omega.len() - 1];
            integrate_with_breakpoints(g, u0, u1, interior, tol)?.value
        };

        let (low_tail, high_tail) = self.tails(zeta)?;
        Ok(1.0 + 2.0 / PI * (low_tail + inner + high_tail))
    }

    /// ∫ ω Im ε / (ω² + ζ²) dω below and above the table.
    fn tails(&self, zeta: f64) -> Result<(f64, f64)> {
        let Some((low, high)) = self.policy.exponents() else {
            return Ok((0.0, 0.0));
        };
        let (w0, w1) = self.table.omega_range();
        let (i0, i1) = (self.im[0], self.im[self.im.len() - 1]);
        let tol = Tolerance::relative(1e-10);

        let low_tail = if i0 == 0.0 {
            0.0
        } else if low == 1.0 && zeta > 0.0 {
            i0 * w0 / zeta * (w0 / zeta).atan()
        } else {
            let r = zeta / w0;
            let g = |t: f64| {
                let e = (2.0 * t).exp();
                i0 * (low * t).exp() / (1.0 + r * r * e)
            };
            if zeta == 0.0 && low >= 0.0 {
                return Err(Error::Policy(format!(
                    "static limit diverges for low-frequency tail w^-{low}"
                )));
            }
            integrate_to_infinity(g, 0.0, tol)?.value
        };

        let high_tail = if i1 == 0.0 {
            0.0
        } else if high == 3.0 {
            let tau = zeta / w1;
            let bracket = if tau < 1e-2 {
                let t2 = tau * tau;
                1.0 / 3.0 - t2 / 5.0 + t2 * t2 / 7.0 - t2 * t2 * t2 / 9.0
            } else {
                (1.0 - tau.atan() / tau) / (tau * tau)
            };
            i1 * bracket
        } else {
            let r = zeta / w1;
            let g = |t: f64| i1 * (-high * t).exp() / (1.0 + r * r * (-2.0 * t).exp());
            integrate_to_infinity(g, 0.0, tol)?.value
        };

        Ok((low_tail, high_tail))
    }
}

/// ε(iζ) of a table through the dispersion relation.
pub fn kk_eps_imag_axis(
    table: &OpticalTable,
    zeta: f64,
    extrapolation: ExtrapolationPolicy,
) -> Result<f64> {
    TabulatedModel::new(table.clone(), extrapolation)?.eps_imag_axis(zeta)
}
