//! Reflection factors G₁ (TE) and G₂ (TM) for homogeneous and two-layer
//! bodies, in the form used by the force integrands.
//!
//! Everything downstream needs only `G⁻²`, so the engine works with the
//! amplitude `r = 1/G`. Infinite ε (ideal metal) is allowed and gives
//! `|r| = 1`. The layered expressions are divided through by
//! `exp(ζ s₁ h / c)` so that only `exp(−2 ζ s₁ h / c)` appears.

use crate::error::{Error, Result};

/// `r = 1/G` together with `1 − r²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    pub r: f64,
    pub one_minus_r_sq: f64,
}

impl Reflection {
    fn from_r(r: f64) -> Self {
        Reflection {
            r,
            one_minus_r_sq: (1.0 - r) * (1.0 + r),
        }
    }

    pub fn perfect() -> Self {
        Reflection {
            r: 1.0,
            one_minus_r_sq: 0.0,
        }
    }

    pub fn r_sq(&self) -> f64 {
        self.r * self.r
    }

    /// `G = 1/r`; infinite when nothing is reflected.
    pub fn g(&self) -> f64 {
        1.0 / self.r
    }
}

/// Optical data of one medium at one frequency, in the variables of the
/// reflection formulas: `s² = p² + kappa`. At ζ > 0, `kappa = ε − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    pub eps: f64,
    pub kappa: f64,
}

impl Medium {
    pub fn at_frequency(eps: f64) -> Self {
        Medium {
            eps,
            kappa: eps - 1.0,
        }
    }

    fn is_ideal(&self) -> bool {
        self.eps.is_infinite() || self.kappa.is_infinite()
    }
}

// s − p = kappa / (s + p), without cancellation.
fn s_minus_p(p: f64, kappa: f64, s: f64) -> f64 {
    kappa / (s + p)
}

/// TE amplitude of a homogeneous half-space.
pub fn te_homogeneous(p: f64, m: Medium) -> Reflection {
    if m.kappa.is_infinite() {
        return Reflection::from_r(-1.0);
    }
    let s = (p * p + m.kappa).sqrt();
    let p_minus_s = -s_minus_p(p, m.kappa, s);
    let sum = p + s;
    Reflection {
        r: p_minus_s / sum,
        one_minus_r_sq: 4.0 * p * s / (sum * sum),
    }
}

/// TM amplitude of a homogeneous half-space.
pub fn tm_homogeneous(p: f64, m: Medium) -> Reflection {
    if m.eps.is_infinite() {
        return Reflection::perfect();
    }
    let s = (p * p + m.kappa).sqrt();
    let ep = m.eps * p;
    // εp − s = (ε²p² − p² − kappa)/(εp + s)
    let num = ((m.eps - 1.0) * (m.eps + 1.0) * p * p - m.kappa) / (ep + s);
    let sum = ep + s;
    Reflection {
        r: num / sum,
        one_minus_r_sq: 4.0 * ep * s / (sum * sum),
    }
}

/// TE amplitude of a film (medium 1, thickness entering through
/// `depth_scale · s₁`) on a substrate (medium 2).
///
/// Numerator and denominator are expanded into sign-definite sums, so the
/// h → 0 and h → ∞ limits carry no cancellation.
pub fn te_layered(p: f64, top: Medium, sub: Medium, depth_scale: f64) -> Reflection {
    if top.is_ideal() {
        return Reflection::from_r(-1.0);
    }
    let s1 = (p * p + top.kappa).sqrt();
    let two_y = 2.0 * depth_scale * s1;
    let q = (-two_y).exp();
    let one_minus_q = -(-two_y).exp_m1();
    let d1 = s_minus_p(p, top.kappa, s1);
    if sub.is_ideal() {
        let num = -(d1 + (p + s1) * q);
        let den = (p + s1) + d1 * q;
        return Reflection::from_r(num / den);
    }
    let s2 = (p * p + sub.kappa).sqrt();
    let d2 = s_minus_p(p, sub.kappa, s2);
    let num = -(d2 * (d1 + q * (s1 + p)) + one_minus_q * top.kappa);
    let den = (1.0 + q) * (p * s1 + s1 * s2) + one_minus_q * (s1 * s1 + p * s2);
    Reflection::from_r(num / den)
}

/// TM amplitude of a film on a substrate. The overall sign of the
/// two-layer TM factor is a convention (only G² enters the force); it is
/// fixed here so that the degenerate cases reduce to [`tm_homogeneous`].
pub fn tm_layered(p: f64, top: Medium, sub: Medium, depth_scale: f64) -> Reflection {
    if top.eps.is_infinite() {
        return Reflection::perfect();
    }
    let s1 = (p * p + top.kappa).sqrt();
    let two_y = 2.0 * depth_scale * s1;
    let q = (-two_y).exp();
    let one_minus_q = -(-two_y).exp_m1();
    let e1p = top.eps * p;
    if sub.eps.is_infinite() {
        let num = (1.0 + q) * e1p - one_minus_q * s1;
        let den = (1.0 + q) * e1p + one_minus_q * s1;
        return Reflection::from_r(num / den);
    }
    let s2 = (p * p + sub.kappa).sqrt();
    let e2p = sub.eps * p;
    // ε₂p − s₂ = ((ε₂² − 1)p² − κ₂)/(ε₂p + s₂)
    let e2p_minus_s2 = ((sub.eps - 1.0) * (sub.eps + 1.0) * p * p - sub.kappa) / (e2p + s2);
    let num = (1.0 + q) * top.eps * s1 * e2p_minus_s2
        + one_minus_q * (top.eps * top.eps * p * s2 - sub.eps * s1 * s1);
    let a = sub.eps * s1 + top.eps * s2;
    let b = sub.eps * s1 - top.eps * s2;
    let den = e1p * (a + b * q) + s1 * (a - b * q);
    Reflection::from_r(num / den)
}

fn check_eps_p(eps: f64, p: f64) -> Result<()> {
    if !(eps >= 1.0) {
        return Err(Error::Domain(format!("eps(i zeta) must be >= 1, got {eps}")));
    }
    if !(p >= 1.0) || p.is_infinite() {
        return Err(Error::Domain(format!("p must be >= 1 and finite, got {p}")));
    }
    Ok(())
}

/// `(G₁, G₂)` for a homogeneous body at ε(iζ) = `eps`. `G₁` is infinite
/// for ε = 1 (vacuum reflects nothing).
pub fn reflection_factors_homogeneous(eps: f64, p: f64) -> Result<(f64, f64)> {
    check_eps_p(eps, p)?;
    let m = Medium::at_frequency(eps);
    Ok((te_homogeneous(p, m).g(), tm_homogeneous(p, m).g()))
}

/// `(G₁, G₂)` for a film of ε₁ and thickness `h` on a half-space of ε₂.
pub fn reflection_factors_layered(eps1: f64, eps2: f64, p: f64, zeta: f64, h: f64) -> Result<(f64, f64)> {
    check_eps_p(eps1, p)?;
    check_eps_p(eps2, p)?;
    if !(zeta > 0.0 && zeta.is_finite()) {
        return Err(Error::Domain(format!("zeta must be > 0, got {zeta}")));
    }
    if !(h > 0.0) {
        return Err(Error::Domain(format!("film thickness must be > 0, got {h}")));
    }
    let (m1, m2) = (Medium::at_frequency(eps1), Medium::at_frequency(eps2));
    let depth = zeta * h / crate::constants::C;
    Ok((te_layered(p, m1, m2, depth).g(), tm_layered(p, m1, m2, depth).g()))
}
