//! Named materials and stacks.
//!
//! The "limit" materials use the perfect-crystal plasma frequency and the
//! bulk static resistivity; the "table1" materials are the fitted entries of
//! the best evaporated films.

use std::sync::Arc;

use crate::dielectric::{DielectricModel, DrudeParams, ExtrapolationPolicy, OpticalTable, TabulatedModel};
use crate::error::{Error, Result};
use crate::lifshitz::LayerStack;
use crate::units::{parse_frequency, parse_resistivity};

/// Thickness of the Au/Pd cap in the upper-limit stack, m.
pub const AUPD_THICKNESS: f64 = 15e-9;

/// `(name, ω_p [rad/s], ρ₀ [Ω·m])`
const LIMIT_MATERIALS: &[(&str, f64, f64)] = &[
    ("au-limit", 1.37e16, 2.25e-8),
    ("al-limit", 2.40e16, 2.65e-8),
    ("aupd-limit", 1.69e16, 30e-8),
];

/// `(name, ω_p, ω_τ)`
const FITTED_MATERIALS: &[(&str, f64, f64)] = &[
    ("au-table1", 1.372e16, 4.060e13),
    ("al-table1", 2.235e16, 12.49e13),
];

pub fn material_names() -> Vec<&'static str> {
    let mut v: Vec<_> = LIMIT_MATERIALS.iter().map(|m| m.0).collect();
    v.extend(FITTED_MATERIALS.iter().map(|m| m.0));
    v.push("ideal");
    v
}

pub fn drude_material(name: &str) -> Option<DrudeParams> {
    if let Some(&(_, wp, rho)) = LIMIT_MATERIALS.iter().find(|m| m.0 == name) {
        return DrudeParams::from_resistivity(wp, rho).ok();
    }
    FITTED_MATERIALS
        .iter()
        .find(|m| m.0 == name)
        .and_then(|&(_, wp, wt)| DrudeParams::new(wp, wt).ok())
}

pub fn material(name: &str) -> Result<DielectricModel> {
    if name == "ideal" {
        return Ok(DielectricModel::IdealMetal);
    }
    drude_material(name).map(DielectricModel::Drude).ok_or_else(|| {
        Error::Input(format!(
            "unknown material '{name}' (known: {})",
            material_names().join(", ")
        ))
    })
}

/// Resolves a material description:
///
/// - a named material (`au-limit`, `ideal`, ...);
/// - `drude:wp=<freq>,wtau=<freq>` or `drude:wp=<freq>,rho0=<resistivity>`;
/// - `plasma:wp=<freq>` (lossless);
/// - `table:<path>` (optical table, Kramers–Kronig transformed with `policy`).
pub fn parse_material(spec: &str, policy: ExtrapolationPolicy) -> Result<DielectricModel> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix("table:") {
        let table = OpticalTable::from_csv_path(path)?;
        return Ok(DielectricModel::Tabulated(Arc::new(TabulatedModel::new(table, policy)?)));
    }
    let (kind, rest) = match spec.split_once(':') {
        Some(kr) => kr,
        None => return material(spec),
    };
    let mut wp = None;
    let mut wtau = None;
    let mut rho0 = None;
    for kv in rest.split(',') {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Input(format!("expected key=value in '{spec}'")))?;
        match k.trim() {
            "wp" => wp = Some(parse_frequency(v)?),
            "wtau" => wtau = Some(parse_frequency(v)?),
            "rho0" => rho0 = Some(parse_resistivity(v)?),
            other => return Err(Error::Input(format!("unknown key '{other}' in '{spec}'"))),
        }
    }
    let wp = wp.ok_or_else(|| Error::Input(format!("'{spec}' needs wp=")))?;
    let params = match (kind, wtau, rho0) {
        ("plasma", None, None) => DrudeParams::plasma(wp)?,
        ("drude", Some(t), None) => DrudeParams::new(wp, t)?,
        ("drude", None, Some(r)) => DrudeParams::from_resistivity(wp, r)?,
        _ => {
            return Err(Error::Input(format!(
                "cannot build a material from '{spec}' (drude needs exactly one of wtau, rho0; plasma takes wp only)"
            )))
        }
    };
    Ok(DielectricModel::Drude(params))
}

/// `paper-upper-limit`: Al with a 15 nm Au/Pd cap (AFM samples).
/// `paper-upper-limit-au`: bulk Au (torsion-pendulum samples, 0.5 μm thick).
pub fn stack_names() -> &'static [&'static str] {
    &["paper-upper-limit", "paper-upper-limit-au"]
}

pub fn stack(name: &str) -> Result<LayerStack> {
    match name {
        "paper-upper-limit" => LayerStack::layered(material("aupd-limit")?, AUPD_THICKNESS, material("al-limit")?),
        "paper-upper-limit-au" => Ok(LayerStack::homogeneous(material("au-limit")?)),
        _ => Err(Error::Input(format!(
            "unknown preset '{name}' (known: {})",
            stack_names().join(", ")
        ))),
    }
}
