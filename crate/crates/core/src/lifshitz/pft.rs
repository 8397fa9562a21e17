use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::Result;
use crate::lifshitz::{plate_pressure, sphere_plate_force, LayerStack, QuadratureSpec, ThermalSpec};
use crate::quadrature::{integrate_batched, Tolerance};

/// Relative tolerance of the outer separation integral.
const PFT_REL_TOL: f64 = 1e-7;

/// Sphere–plate force from its closed form against `2πR ∫_a^∞ P(a') da'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PftCheck {
    pub closed_form: f64,
    pub integrated: f64,
    pub rel_diff: f64,
}

pub fn pft_consistency_check(
    stack: &LayerStack,
    a: f64,
    radius: f64,
    thermal: ThermalSpec,
    quad: QuadratureSpec,
) -> Result<PftCheck> {
    let closed_form = sphere_plate_force(stack, a, radius, thermal, quad)?.value;

    // a' = a/t maps [a, ∞) onto (0, 1]; da' = a dt/t².
    let eval = |ts: &[f64; 21]| -> Result<[f64; 21]> {
        let v: Vec<f64> = ts
            .par_iter()
            .map(|&t| {
                let p = plate_pressure(stack, a / t, thermal, quad)?.value;
                Ok(p * a / (t * t))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = [0.0; 21];
        out.copy_from_slice(&v);
        Ok(out)
    };
    let tol = Tolerance {
        rel: PFT_REL_TOL,
        abs: 0.0,
        max_intervals: 200,
    };
    let energy = integrate_batched(eval, 0.0, 1.0, &[0.05, 0.25, 0.6], tol)?.value;
    let integrated = 2.0 * PI * radius * energy;
    Ok(PftCheck {
        closed_form,
        integrated,
        rel_diff: ((closed_form - integrated) / closed_form).abs(),
    })
}
