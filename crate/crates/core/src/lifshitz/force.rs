use std::f64::consts::PI;

use rayon::prelude::*;

use crate::constants::{C, HBAR, K_B};
use crate::dielectric::{DielectricModel, StaticLimit};
use crate::error::{Error, Result};
use crate::lifshitz::reflection::{
    te_homogeneous, te_layered, tm_homogeneous, tm_layered, Medium, Reflection,
};
use crate::lifshitz::{
    check_separation, matsubara_frequency, ForceResult, Geometry, LayerStack, QuadratureSpec,
    ThermalMode, ThermalSpec,
};
use crate::quadrature::{integrate_batched, integrate_with_breakpoints, Tolerance};
use crate::summation::NeumaierSum;

const MAX_MATSUBARA_TERMS: usize = 5_000_000;
const FIRST_BLOCK: usize = 16;
const MAX_BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kernel {
    Plate,
    Sphere,
}

/// Per-polarization integrand of the x-integral.
fn kernel_value(kernel: Kernel, x: f64, te: Reflection, tm: Reflection) -> f64 {
    match kernel {
        Kernel::Plate => {
            let em1 = x.exp_m1();
            let part = |r: Reflection| {
                let r2 = r.r_sq();
                if r2 == 0.0 {
                    0.0
                } else {
                    r2 / (em1 + r.one_minus_r_sq)
                }
            };
            x * x * (part(te) + part(tm))
        }
        Kernel::Sphere => {
            let emx = (-x).exp();
            let em1 = (-x).exp_m1();
            let part = |r: Reflection| {
                let r2 = r.r_sq();
                if r2 == 0.0 {
                    return 0.0;
                }
                // 1 − r²e⁻ˣ = (1 − r²) − r²(e⁻ˣ − 1)
                let v = r.one_minus_r_sq - r2 * em1;
                if v < 0.5 {
                    -v.ln()
                } else {
                    -(-r2 * emx).ln_1p()
                }
            };
            x * (part(te) + part(tm))
        }
    }
}

/// Media of the stack at one imaginary frequency.
#[derive(Debug, Clone, Copy)]
struct Optics {
    top: Option<(Medium, f64)>,
    sub: Medium,
}

fn medium_at(model: &DielectricModel, zeta: f64) -> Result<Medium> {
    Ok(Medium::at_frequency(model.eps_imag_axis(zeta)?))
}

fn reflections(optics: &Optics, p: f64, depth_scale: f64) -> (Reflection, Reflection) {
    match optics.top {
        None => (te_homogeneous(p, optics.sub), tm_homogeneous(p, optics.sub)),
        Some((top, _)) => (
            te_layered(p, top, optics.sub, depth_scale),
            tm_layered(p, top, optics.sub, depth_scale),
        ),
    }
}

fn static_te_kappa(model: &DielectricModel) -> f64 {
    match model {
        DielectricModel::IdealMetal => f64::INFINITY,
        DielectricModel::Drude(p) if p.is_lossless() => p.omega_p() * p.omega_p(),
        _ => 0.0,
    }
}

fn static_tm_eps(model: &DielectricModel) -> Result<f64> {
    Ok(match model.static_limit()? {
        StaticLimit::Divergent => f64::INFINITY,
        StaticLimit::Finite(e) => e,
    })
}

/// Evaluates the x-integrals for one stack, separation and kernel.
pub(crate) struct Engine<'a> {
    stack: &'a LayerStack,
    a: f64,
    quad: QuadratureSpec,
    kernel: Kernel,
    inner_tol: f64,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(stack: &'a LayerStack, a: f64, quad: QuadratureSpec, kernel: Kernel) -> Self {
        Engine {
            stack,
            a,
            quad,
            kernel,
            inner_tol: quad.rel_tol,
        }
    }

    fn with_inner_tol(mut self, tol: f64) -> Self {
        self.inner_tol = tol;
        self
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance {
            rel: self.inner_tol,
            abs: 0.0,
            max_intervals: 4000,
        }
    }

    fn x_integral<F>(&self, lower: f64, f: F) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let upper = lower + self.quad.x_span();
        let breaks = [lower + 0.5, lower + 2.0, lower + 6.0, lower + 15.0, lower + 35.0];
        Ok(integrate_with_breakpoints(f, lower, upper, &breaks, self.tolerance())?.value)
    }

    /// ∫_{ξ}^{ξ+span} dx kernel, with ξ = 2ζa/c, at ζ > 0.
    pub(crate) fn term(&self, zeta: f64) -> Result<f64> {
        let optics = Optics {
            top: match self.stack.top() {
                Some(l) => Some((medium_at(&l.model, zeta)?, l.thickness)),
                None => None,
            },
            sub: medium_at(self.stack.substrate(), zeta)?,
        };
        let xi = 2.0 * zeta * self.a / C;
        let depth_scale = optics.top.map(|(_, h)| zeta * h / C).unwrap_or(0.0);
        let kernel = self.kernel;
        self.x_integral(xi, |x| {
            let (te, tm) = reflections(&optics, x / xi, depth_scale);
            kernel_value(kernel, x, te, tm)
        })
    }

    /// The ζ → 0 limit of [`Engine::term`] (without the 1/2 weight).
    pub(crate) fn static_term(&self) -> Result<f64> {
        let a = self.a;
        let top = self.stack.top();
        let sub_model = self.stack.substrate();

        // TE: p → xc/(2a), s² → p² + kappa, depth ζs₁h/c → s₁h/c.
        let te_top = top.map(|l| static_te_kappa(&l.model));
        let te_sub = static_te_kappa(sub_model);
        let te_zero = te_sub == 0.0 && te_top.is_none_or(|k| k == 0.0);

        // TM: p = s = 1 relative, ε at its static value, depth → xh/(2a).
        let tm_top = match top {
            Some(l) => Some((static_tm_eps(&l.model)?, l.thickness)),
            None => None,
        };
        let tm_sub = static_tm_eps(sub_model)?;

        let kernel = self.kernel;
        let lower = 0.0;
        self.x_integral(lower, |x| {
            let te = if te_zero {
                Reflection {
                    r: 0.0,
                    one_minus_r_sq: 1.0,
                }
            } else {
                let p = x * C / (2.0 * a);
                let sub = Medium {
                    eps: f64::NAN,
                    kappa: te_sub,
                };
                match (top, te_top) {
                    (Some(l), Some(kappa)) => {
                        let t = Medium { eps: f64::NAN, kappa };
                        te_layered(p, t, sub, l.thickness / C)
                    }
                    _ => te_homogeneous(p, sub),
                }
            };
            let sub = Medium {
                eps: tm_sub,
                kappa: 0.0,
            };
            let tm = match tm_top {
                Some((eps, h)) => tm_layered(1.0, Medium { eps, kappa: 0.0 }, sub, x * h / (2.0 * a)),
                None => tm_homogeneous(1.0, sub),
            };
            kernel_value(kernel, x, te, tm)
        })
    }
}

struct SumOutcome {
    value: f64,
    terms: usize,
    tail: f64,
}

/// Σ'ₙ term(ζₙ): the n = 0 term gets weight 1/2. Terms n ≥ 1 are computed
/// in parallel blocks and accumulated strictly in order.
fn matsubara_sum(engine: &Engine<'_>, temperature: f64, tol: f64) -> Result<SumOutcome> {
    let zeta1 = matsubara_frequency(1, temperature)?;
    // Terms fall off like e^(-n x₁); fail before evaluating an unreachable sum.
    let x1 = 2.0 * zeta1 * engine.a / C;
    let needed = -tol.ln() / x1;
    if needed > MAX_MATSUBARA_TERMS as f64 {
        return Err(Error::TooManyTerms {
            needed,
            limit: MAX_MATSUBARA_TERMS,
        });
    }
    let mut total = NeumaierSum::new();
    total.add(0.5 * engine.static_term()?);

    let mut n = 1usize;
    let mut block = FIRST_BLOCK;
    let mut small_run = 0usize;
    let mut prev: Option<f64> = None;
    loop {
        let terms: Vec<f64> = (n..n + block)
            .into_par_iter()
            .map(|k| engine.term(k as f64 * zeta1))
            .collect::<Result<Vec<_>>>()?;
        for t in terms {
            total.add(t);
            let partial = total.total().abs();
            if t.abs() <= tol * partial {
                small_run += 1;
            } else {
                small_run = 0;
            }
            let tail = match prev {
                _ if t == 0.0 => 0.0,
                Some(p) if p != 0.0 && (t / p) < 1.0 && (t / p) >= 0.0 => {
                    let ratio = t / p;
                    t * ratio / (1.0 - ratio)
                }
                _ => f64::INFINITY,
            };
            prev = Some(t);
            if small_run >= 3 && tail.abs() <= tol * partial {
                total.add(tail);
                return Ok(SumOutcome {
                    value: total.total(),
                    terms: n + 1,
                    tail,
                });
            }
            n += 1;
            if n >= MAX_MATSUBARA_TERMS {
                return Err(Error::Truncation {
                    tail,
                    allowed: tol * partial,
                    terms: n,
                });
            }
        }
        block = (block * 2).min(MAX_BLOCK);
    }
}

/// (ħ/2π)∫₀^∞ dζ term(ζ) expressed in ξ = 2ζa/c, without the ħc/(4πa) factor.
fn zero_temperature_integral(engine: &Engine<'_>, a: f64, rel_tol: f64) -> Result<(f64, usize)> {
    let inner = Engine::new(engine.stack, a, engine.quad, engine.kernel)
        .with_inner_tol((rel_tol * 1e-2).max(1e-13));
    let span = engine.quad.x_span();
    let breaks = [1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.5, 4.0, 10.0, 25.0];
    let eval = |xs: &[f64; 21]| -> Result<[f64; 21]> {
        let v: Vec<f64> = xs
            .par_iter()
            .map(|&xi| inner.term(xi * C / (2.0 * a)))
            .collect::<Result<Vec<_>>>()?;
        let mut out = [0.0; 21];
        out.copy_from_slice(&v);
        Ok(out)
    };
    let tol = Tolerance {
        rel: rel_tol,
        abs: 0.0,
        max_intervals: 2000,
    };
    let r = integrate_batched(eval, 0.0, span, &breaks, tol)?;
    Ok((r.value, r.evaluations))
}

fn evaluate(
    stack: &LayerStack,
    a: f64,
    kernel: Kernel,
    thermal: ThermalSpec,
    quad: QuadratureSpec,
) -> Result<ForceResult> {
    check_separation(a)?;
    thermal.validate()?;
    quad.validate()?;
    let engine = Engine::new(stack, a, quad, kernel);
    let geometric = match kernel {
        Kernel::Plate => 1.0 / (8.0 * PI * a.powi(3)),
        Kernel::Sphere => 1.0 / (4.0 * a * a),
    };
    match thermal.mode {
        ThermalMode::MatsubaraSum => {
            let kt = K_B * thermal.temperature;
            let s = matsubara_sum(&engine, thermal.temperature, quad.matsubara_tail_tol)?;
            Ok(ForceResult {
                value: kt * geometric * s.value,
                n_terms_used: s.terms,
                tail_estimate: kt * geometric * s.tail,
                thermal,
                warnings: Vec::new(),
            })
        }
        ThermalMode::ZeroTemperatureIntegral => {
            let (integral, evals) = zero_temperature_integral(&engine, a, quad.rel_tol)?;
            let factor = HBAR * C / (4.0 * PI * a);
            Ok(ForceResult {
                value: factor * geometric * integral,
                n_terms_used: evals,
                tail_estimate: 0.0,
                thermal,
                warnings: Vec::new(),
            })
        }
    }
}

/// Pressure between two parallel plates carrying `stack`, Pa (positive =
/// attraction).
pub fn plate_pressure(
    stack: &LayerStack,
    a: f64,
    thermal: ThermalSpec,
    quad: QuadratureSpec,
) -> Result<ForceResult> {
    evaluate(stack, a, Kernel::Plate, thermal, quad)
}

/// Force between a sphere of radius `radius` and a plate, N (positive =
/// attraction).
pub fn sphere_plate_force(
    stack: &LayerStack,
    a: f64,
    radius: f64,
    thermal: ThermalSpec,
    quad: QuadratureSpec,
) -> Result<ForceResult> {
    let warnings = Geometry::SpherePlate { a, radius }.validate()?;
    let mut r = evaluate(stack, a, Kernel::Sphere, thermal, quad)?;
    r.value *= radius;
    r.tail_estimate *= radius;
    r.warnings = warnings;
    Ok(r)
}

/// The analytic n = 0 term against the finite-frequency term evaluated at
/// two small fractions of ζ₁.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroFrequencyCheck {
    pub analytic: f64,
    pub at_1e_4: f64,
    pub at_1e_5: f64,
}

impl ZeroFrequencyCheck {
    /// Relative deviations at 10⁻⁴ζ₁ and 10⁻⁵ζ₁.
    pub fn rel_diffs(&self) -> (f64, f64) {
        let d = |v: f64| ((v - self.analytic) / self.analytic).abs();
        (d(self.at_1e_4), d(self.at_1e_5))
    }

    pub fn max_rel_diff(&self) -> f64 {
        let (d4, d5) = self.rel_diffs();
        d4.max(d5)
    }

    /// True when the deviation shrinks towards ζ → 0. For lossy metals the
    /// TE part fades only like ε(iζ)ζ²a²/c² ∝ ζ, so the absolute agreement
    /// at a fixed small ζ depends on a and on the damping.
    pub fn converging(&self) -> bool {
        let (d4, d5) = self.rel_diffs();
        d5 <= d4
    }
}

pub fn zero_frequency_check(
    stack: &LayerStack,
    geometry: Geometry,
    temperature: f64,
    quad: QuadratureSpec,
) -> Result<ZeroFrequencyCheck> {
    geometry.validate()?;
    quad.validate()?;
    let kernel = match geometry {
        Geometry::PlatePlate { .. } => Kernel::Plate,
        Geometry::SpherePlate { .. } => Kernel::Sphere,
    };
    let engine = Engine::new(stack, geometry.separation(), quad, kernel);
    let z1 = matsubara_frequency(1, temperature)?;
    Ok(ZeroFrequencyCheck {
        analytic: engine.static_term()?,
        at_1e_4: engine.term(1e-4 * z1)?,
        at_1e_5: engine.term(1e-5 * z1)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ZETA_3;
    use crate::dielectric::DrudeParams;

    fn au() -> LayerStack {
        LayerStack::homogeneous(DrudeParams::new(1.37e16, 3.74e13).unwrap())
    }

    #[test]
    fn drude_static_plate_term_is_two_zeta3() {
        // TE drops out, TM reflects perfectly: ∫ x²/(eˣ−1) = 2ζ(3).
        let st = au();
        let e = Engine::new(&st, 1e-7, QuadratureSpec::default(), Kernel::Plate);
        let v = e.static_term().unwrap();
        assert!((v / (2.0 * ZETA_3) - 1.0).abs() < 1e-9, "{v}");
        let ideal = LayerStack::ideal_metal();
        let e = Engine::new(&ideal, 1e-7, QuadratureSpec::default(), Kernel::Plate);
        assert!((e.static_term().unwrap() / (4.0 * ZETA_3) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn drude_static_sphere_term_is_zeta3() {
        // ∫ −x ln(1 − e⁻ˣ) dx = ζ(3)
        let st = au();
        let e = Engine::new(&st, 1e-7, QuadratureSpec::default(), Kernel::Sphere);
        let v = e.static_term().unwrap();
        assert!((v / ZETA_3 - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn layered_static_term_equals_homogeneous_for_metals() {
        let al = DrudeParams::from_resistivity(2.40e16, 2.65e-8).unwrap();
        let aupd = DrudeParams::from_resistivity(1.69e16, 3.0e-7).unwrap();
        let st = LayerStack::layered(aupd, 15e-9, al).unwrap();
        let e = Engine::new(&st, 1e-7, QuadratureSpec::default(), Kernel::Plate);
        assert!((e.static_term().unwrap() / (2.0 * ZETA_3) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_frequency_limit_matches_small_zeta() {
        let quad = QuadratureSpec::default();
        let c = zero_frequency_check(&au(), Geometry::PlatePlate { a: 1e-7 }, 300.0, quad).unwrap();
        assert!(c.rel_diffs().1 < 1e-4, "{c:?}");
        for a in [1e-7, 5e-7] {
            for geom in [Geometry::PlatePlate { a }, Geometry::SpherePlate { a, radius: 1e-4 }] {
                let c = zero_frequency_check(&au(), geom, 300.0, quad).unwrap();
                let (d4, d5) = c.rel_diffs();
                assert!(c.converging() && d5 < d4 / 5.0, "{geom:?}: {c:?}");
            }
        }
        let ideal = LayerStack::ideal_metal();
        let geom = Geometry::SpherePlate { a: 5e-7, radius: 1e-4 };
        let c = zero_frequency_check(&ideal, geom, 300.0, quad).unwrap();
        assert!(c.max_rel_diff() < 1e-4, "{c:?}");
    }

    #[test]
    fn plasma_model_keeps_te_at_zero_frequency() {
        let plasma = LayerStack::homogeneous(DrudeParams::plasma(1.37e16).unwrap());
        let quad = QuadratureSpec::default();
        let c = zero_frequency_check(&plasma, Geometry::PlatePlate { a: 1e-7 }, 300.0, quad).unwrap();
        assert!(c.analytic > 2.0 * ZETA_3 * 1.1);
        assert!(c.max_rel_diff() < 1e-4, "{c:?}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let q = QuadratureSpec::default();
        assert!(plate_pressure(&au(), 0.0, ThermalSpec::default(), q).is_err());
        assert!(plate_pressure(&au(), 1e-7, ThermalSpec::sum(0.0), q).is_err());
        let bad = QuadratureSpec {
            rel_tol: -1.0,
            ..q
        };
        assert!(plate_pressure(&au(), 1e-7, ThermalSpec::default(), bad).is_err());
        assert!(sphere_plate_force(&au(), 1e-7, 1e-6, ThermalSpec::default(), q).is_err());
    }
}
