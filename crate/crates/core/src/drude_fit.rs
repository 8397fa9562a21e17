//! Least-squares extraction of Drude parameters from tabulated ε(ω).
//!
//! Both Re ε and Im ε enter as relative residuals. The fit runs in
//! `(ln ω_p, ln ω_τ)` with a Levenberg–Marquardt damping schedule and the
//! analytic Jacobian of the Drude form.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::constants::C;
use crate::dielectric::{DrudeParams, OpticalSample, OpticalTable};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;
const STEP_TOL: f64 = 1e-10;
const OBJECTIVE_TOL: f64 = 1e-12;
const MIN_POINTS: usize = 3;

/// Wavelength window of the fit, m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        FitWindow {
            lambda_min: 2e-6,
            lambda_max: f64::INFINITY,
        }
    }
}

impl FitWindow {
    pub fn new(lambda_min: f64, lambda_max: f64) -> Result<Self> {
        let w = FitWindow {
            lambda_min,
            lambda_max,
        };
        w.validate()?;
        Ok(w)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda_min > 0.0 && self.lambda_min < self.lambda_max) {
            return Err(Error::Domain(format!(
                "fit window needs 0 < lambda_min < lambda_max, got [{}, {}]",
                self.lambda_min, self.lambda_max
            )));
        }
        Ok(())
    }

    pub fn contains(&self, omega: f64) -> bool {
        let lambda = 2.0 * PI * C / omega;
        lambda >= self.lambda_min && lambda <= self.lambda_max
    }
}

/// How each sample's residuals are normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightPolicy {
    /// Re and Im residuals each divided by the magnitude of that component.
    #[default]
    Uniform,
    /// Both residuals divided by |ε| of the sample.
    RelErr,
}

impl fmt::Display for WeightPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightPolicy::Uniform => write!(f, "uniform"),
            WeightPolicy::RelErr => write!(f, "relerr"),
        }
    }
}

impl FromStr for WeightPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(WeightPolicy::Uniform),
            "relerr" => Ok(WeightPolicy::RelErr),
            _ => Err(Error::Input(format!("unknown weight policy '{s}' (uniform|relerr)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: DrudeParams,
    pub sigma_omega_p: f64,
    pub sigma_omega_tau: f64,
    /// RMS of the weighted residuals.
    pub residual_norm: f64,
    pub n_points_used: usize,
    /// Policy the sigmas refer to.
    pub weights: WeightPolicy,
    pub iterations: usize,
}

struct Point {
    omega: f64,
    re: f64,
    im: f64,
    scale_re: f64,
    scale_im: f64,
}

impl Point {
    fn new(s: &OpticalSample, weights: WeightPolicy) -> Result<Self> {
        let norm = s.eps.norm();
        if !(norm > 0.0) {
            return Err(Error::Input(format!("eps = 0 at omega = {:e}", s.omega)));
        }
        let (scale_re, scale_im) = match weights {
            WeightPolicy::Uniform => {
                let pick = |v: f64| if v != 0.0 { v.abs() } else { norm };
                (pick(s.eps.re), pick(s.eps.im))
            }
            WeightPolicy::RelErr => (norm, norm),
        };
        Ok(Point {
            omega: s.omega,
            re: s.eps.re,
            im: s.eps.im,
            scale_re,
            scale_im,
        })
    }
}

/// Residuals and Jacobian rows in `(ln ω_p, ln ω_τ)`.
fn linearise(points: &[Point], theta: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
    let wp2 = (2.0 * theta[0]).exp();
    let wt = theta[1].exp();
    let mut r = Vec::with_capacity(2 * points.len());
    let mut j = Vec::with_capacity(2 * points.len());
    for p in points {
        let d = p.omega * p.omega + wt * wt;
        let re = 1.0 - wp2 / d;
        let im = wp2 * wt / (p.omega * d);
        r.push((re - p.re) / p.scale_re);
        j.push([-2.0 * wp2 / d / p.scale_re, 2.0 * wp2 * wt * wt / (d * d) / p.scale_re]);
        r.push((im - p.im) / p.scale_im);
        j.push([
            2.0 * im / p.scale_im,
            im * (p.omega * p.omega - wt * wt) / d / p.scale_im,
        ]);
    }
    (r, j)
}

fn objective(points: &[Point], theta: [f64; 2]) -> f64 {
    linearise(points, theta).0.iter().map(|v| v * v).sum()
}

fn normal_equations(r: &[f64], j: &[[f64; 2]]) -> ([[f64; 2]; 2], [f64; 2]) {
    let mut a = [[0.0; 2]; 2];
    let mut g = [0.0; 2];
    for (ri, ji) in r.iter().zip(j) {
        for k in 0..2 {
            g[k] += ji[k] * ri;
            for l in 0..2 {
                a[k][l] += ji[k] * ji[l];
            }
        }
    }
    (a, g)
}

fn solve2(a: [[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        (b[0] * a[1][1] - b[1] * a[0][1]) / det,
        (a[0][0] * b[1] - a[1][0] * b[0]) / det,
    ])
}

fn initial_guess(points: &[Point]) -> Result<[f64; 2]> {
    let mean_ln = points.iter().map(|p| p.omega.ln()).sum::<f64>() / points.len() as f64;
    let wt = mean_ln.exp();
    let low = &points[0];
    let d = low.omega * low.omega + wt * wt;
    let wp2 = if low.im > 0.0 {
        low.im * low.omega * d / wt
    } else {
        (1.0 - low.re) * d
    };
    if !(wp2 > 0.0 && wp2.is_finite()) {
        return Err(Error::Input(
            "data do not look like a Drude metal at the lowest in-window frequency".into(),
        ));
    }
    Ok([0.5 * wp2.ln(), mean_ln])
}

/// Fits Drude parameters to the samples of `table` inside `window`.
pub fn fit_drude(table: &OpticalTable, window: FitWindow, weights: WeightPolicy) -> Result<FitResult> {
    window.validate()?;
    let points = table
        .samples()
        .iter()
        .filter(|s| window.contains(s.omega))
        .map(|s| Point::new(s, weights))
        .collect::<Result<Vec<_>>>()?;
    if points.len() < MIN_POINTS {
        return Err(Error::Input(format!(
            "{} samples inside the fit window, need at least {MIN_POINTS}",
            points.len()
        )));
    }

    let mut theta = initial_guess(&points)?;
    let mut s = objective(&points, theta);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = s == 0.0;
    while !converged {
        if iterations == MAX_ITERATIONS {
            return Err(Error::Convergence {
                message: "Drude fit".into(),
                iterations,
                best: vec![theta[0].exp(), theta[1].exp()],
            });
        }
        iterations += 1;
        let (r, j) = linearise(&points, theta);
        let (a, g) = normal_equations(&r, &j);
        let damped = [
            [a[0][0] * (1.0 + lambda), a[0][1]],
            [a[1][0], a[1][1] * (1.0 + lambda)],
        ];
        let Some(step) = solve2(damped, [-g[0], -g[1]]) else {
            return Err(Error::Convergence {
                message: "singular normal equations in Drude fit".into(),
                iterations,
                best: vec![theta[0].exp(), theta[1].exp()],
            });
        };
        let trial = [theta[0] + step[0], theta[1] + step[1]];
        let s_trial = objective(&points, trial);
        if s_trial <= s {
            let decrease = if s > 0.0 { (s - s_trial) / s } else { 0.0 };
            theta = trial;
            s = s_trial;
            lambda = (lambda / 10.0).max(1e-12);
            // Steps in log-parameters are relative steps.
            let rel_step = step[0].abs().max(step[1].abs());
            converged = rel_step < STEP_TOL || decrease < OBJECTIVE_TOL || s == 0.0;
        } else {
            lambda *= 10.0;
            // No downhill step exists at any damping: stationary to roundoff.
            converged = lambda > 1e12;
        }
    }

    let (r, j) = linearise(&points, theta);
    let (a, _) = normal_equations(&r, &j);
    let m = r.len();
    let s2 = s / (m - 2) as f64;
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let (var_p, var_t) = if det > 0.0 {
        (s2 * a[1][1] / det, s2 * a[0][0] / det)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    let params = DrudeParams::new(theta[0].exp(), theta[1].exp())?;
    Ok(FitResult {
        sigma_omega_p: params.omega_p() * var_p.sqrt(),
        sigma_omega_tau: params.omega_tau() * var_t.sqrt(),
        params,
        residual_norm: (s / m as f64).sqrt(),
        n_points_used: points.len(),
        weights,
        iterations,
    })
}
