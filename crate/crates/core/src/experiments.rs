//! Measured force curves: loading, separation shifts, residuals against a
//! model, and parameter-sensitivity sweeps.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dielectric::{DielectricModel, DrudeParams};
use crate::error::{Error, Result};
use crate::lifshitz::{ForceJob, LayerStack};
use crate::output::{fmt_num, write_csv, Provenance};
use crate::units::{parse_force, parse_length};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcePoint {
    /// m
    pub a: f64,
    /// N
    pub force: f64,
    /// N
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentDataset {
    points: Vec<ForcePoint>,
    /// Separations as loaded, before any shift.
    measured: Vec<f64>,
    shift_applied: f64,
    label: String,
}

impl ExperimentDataset {
    pub fn new(points: Vec<ForcePoint>, label: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Input("dataset has no points".into()));
        }
        let mut bad = Vec::new();
        for (i, p) in points.iter().enumerate() {
            if !(p.a > 0.0 && p.a.is_finite() && p.force.is_finite()) {
                return Err(Error::Input(format!("row {}: invalid point {p:?}", i + 1)));
            }
            if let Some(s) = p.sigma {
                if !(s >= 0.0 && s.is_finite()) {
                    return Err(Error::Input(format!("row {}: sigma must be >= 0, got {s}", i + 1)));
                }
            }
            if i > 0 && p.a <= points[i - 1].a {
                bad.push((i + 1).to_string());
            }
        }
        if !bad.is_empty() {
            return Err(Error::Input(format!(
                "separations must be strictly increasing; offending rows: {}",
                bad.join(", ")
            )));
        }
        Ok(ExperimentDataset {
            measured: points.iter().map(|p| p.a).collect(),
            points,
            shift_applied: 0.0,
            label: label.into(),
        })
    }

    pub fn points(&self) -> &[ForcePoint] {
        &self.points
    }

    pub fn separations(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.a).collect()
    }

    pub fn shift_applied(&self) -> f64 {
        self.shift_applied
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Units of the `a` and `force` columns of a dataset file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetUnits {
    length: String,
    force: String,
}

impl DatasetUnits {
    pub fn new(length: &str, force: &str) -> Result<Self> {
        let (length, force) = (length.trim().to_string(), force.trim().to_string());
        parse_length(&format!("1{length}"))?;
        parse_force(&format!("1{force}"))?;
        Ok(DatasetUnits { length, force })
    }

    // Converting the text keeps decimal inputs exact, e.g. 0.1 um → 1e-7.
    fn length_si(&self, field: &str) -> Result<f64> {
        parse_length(&format!("{field}{}", self.length))
    }

    fn force_si(&self, field: &str) -> Result<f64> {
        parse_force(&format!("{field}{}", self.force))
    }
}

impl FromStr for DatasetUnits {
    type Err = Error;

    /// `"nm,pN"`
    fn from_str(s: &str) -> Result<Self> {
        let (l, f) = s
            .split_once(',')
            .ok_or_else(|| Error::Input(format!("units must look like 'nm,pN', got '{s}'")))?;
        DatasetUnits::new(l, f)
    }
}

/// Parses `a,force[,sigma]` rows. Units come from `units`, else from a
/// `# units: nm,pN` line in the text.
pub fn parse_force_dataset(text: &str, units: Option<DatasetUnits>, label: &str) -> Result<ExperimentDataset> {
    let declared = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .filter_map(|l| l.trim().strip_prefix("units:"))
        .map(|u| u.trim().parse::<DatasetUnits>())
        .next()
        .transpose()?;
    let units = units
        .or(declared)
        .ok_or_else(|| Error::Input("dataset units not declared (add '# units: nm,pN')".into()))?;

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Input(e.to_string()))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let fields: Vec<&str> = rec.iter().collect();
        if i == 0 && fields.iter().all(|f| f.parse::<f64>().is_err()) {
            // column names
            continue;
        }
        let row = i + 1;
        let bad = || {
            Error::Input(format!("line {row}: expected 'a,force[,sigma]', got '{}'", fields.join(",")))
        };
        let (a, f, sigma) = match fields.as_slice() {
            [a, f] => (*a, *f, None),
            [a, f, s] => (*a, *f, Some(*s)),
            _ => return Err(bad()),
        };
        points.push(ForcePoint {
            a: units.length_si(a).map_err(|_| bad())?,
            force: units.force_si(f).map_err(|_| bad())?,
            sigma: sigma.map(|s| units.force_si(s)).transpose().map_err(|_| bad())?,
        });
    }
    ExperimentDataset::new(points, label)
}

pub fn load_force_dataset(path: impl AsRef<Path>, units: Option<DatasetUnits>) -> Result<ExperimentDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_force_dataset(&text, units, &label).map_err(|e| e.context(path.display()))
}

/// Moves every point by `delta`. Separations are recomputed as
/// `measured + total shift`, so successive shifts compose exactly.
pub fn shift_separations(ds: &ExperimentDataset, delta: f64) -> ExperimentDataset {
    let shift = ds.shift_applied + delta;
    ExperimentDataset {
        points: ds
            .points
            .iter()
            .zip(&ds.measured)
            .map(|(p, &m)| ForcePoint { a: m + shift, ..*p })
            .collect(),
        measured: ds.measured.clone(),
        shift_applied: shift,
        label: ds.label.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualRow {
    pub a: f64,
    pub f_exp: f64,
    pub f_model: f64,
    pub residual: f64,
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualTable {
    pub rows: Vec<ResidualRow>,
}

impl ResidualTable {
    pub fn columns(&self) -> Vec<&'static str> {
        let mut c = vec!["a_m", "f_exp_N", "f_model_N", "residual_N"];
        if self.has_sigma() {
            c.push("sigma_N");
        }
        c
    }

    fn has_sigma(&self) -> bool {
        self.rows.iter().any(|r| r.sigma.is_some())
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let with_sigma = self.has_sigma();
        self.rows
            .iter()
            .map(|r| {
                let mut v = vec![fmt_num(r.a), fmt_num(r.f_exp), fmt_num(r.f_model), fmt_num(r.residual)];
                if with_sigma {
                    v.push(r.sigma.map(fmt_num).unwrap_or_default());
                }
                v
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W, provenance: &Provenance) -> Result<()> {
        write_csv(out, provenance, &self.columns(), &self.csv_rows())
    }
}

/// `F_exp − F_model` at every (shifted) dataset separation.
pub fn residuals<M>(ds: &ExperimentDataset, model: M) -> Result<ResidualTable>
where
    M: Fn(f64) -> Result<f64> + Sync,
{
    let rows = ds
        .points
        .par_iter()
        .map(|p| {
            let f_model = model(p.a).map_err(|e| e.context(format!("model at a = {:e} m", p.a)))?;
            Ok(ResidualRow {
                a: p.a,
                f_exp: p.force,
                f_model,
                residual: p.force - f_model,
                sigma: p.sigma,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualTable { rows })
}

/// A material parameter that a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// ω_p of the substrate at fixed ω_τ.
    SubstrateOmegaP,
    /// ω_τ of the substrate.
    SubstrateOmegaTau,
    /// ρ₀ of the substrate at fixed ω_p.
    SubstrateRho0,
    TopOmegaP,
    TopOmegaTau,
    TopRho0,
    TopThickness,
}

const PARAMETER_NAMES: &[(&str, SweepParameter)] = &[
    ("substrate.omega_p", SweepParameter::SubstrateOmegaP),
    ("substrate.omega_tau", SweepParameter::SubstrateOmegaTau),
    ("substrate.rho0", SweepParameter::SubstrateRho0),
    ("top.omega_p", SweepParameter::TopOmegaP),
    ("top.omega_tau", SweepParameter::TopOmegaTau),
    ("top.rho0", SweepParameter::TopRho0),
    ("top.thickness", SweepParameter::TopThickness),
];

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PARAMETER_NAMES
            .iter()
            .find(|(n, _)| *n == s)
            .map(|(_, p)| *p)
            .ok_or_else(|| {
                let known: Vec<_> = PARAMETER_NAMES.iter().map(|p| p.0).collect();
                Error::Input(format!("unknown parameter '{s}' (known: {})", known.join(", ")))
            })
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = PARAMETER_NAMES.iter().find(|(_, p)| p == self).map(|p| p.0).unwrap_or("?");
        f.write_str(name)
    }
}

fn scale_drude(model: &mut DielectricModel, which: SweepParameter, k: f64) -> Result<()> {
    let p: DrudeParams = *model
        .as_drude()
        .ok_or_else(|| Error::Input(format!("parameter {which} needs a Drude material, found {model}")))?;
    let scaled = match which {
        SweepParameter::SubstrateOmegaP | SweepParameter::TopOmegaP => p.with_omega_p(p.omega_p() * k)?,
        // ω_τ = ε₀ω_p²ρ₀, so at fixed ω_p both scale together.
        _ => p.with_omega_tau(p.omega_tau() * k)?,
    };
    *model = DielectricModel::Drude(scaled);
    Ok(())
}

/// The stack with `parameter` multiplied by `1 + delta`.
pub fn perturb(stack: &LayerStack, parameter: SweepParameter, delta: f64) -> Result<LayerStack> {
    if !(delta > -1.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("relative change must be > -1, got {delta}")));
    }
    let k = 1.0 + delta;
    let mut s = stack.clone();
    let missing_top = || Error::Input(format!("parameter {parameter} needs a top layer"));
    match parameter {
        SweepParameter::SubstrateOmegaP | SweepParameter::SubstrateOmegaTau | SweepParameter::SubstrateRho0 => {
            scale_drude(s.substrate_mut(), parameter, k)?
        }
        SweepParameter::TopOmegaP | SweepParameter::TopOmegaTau | SweepParameter::TopRho0 => {
            scale_drude(&mut s.top_mut().ok_or_else(missing_top)?.model, parameter, k)?
        }
        SweepParameter::TopThickness => {
            s.top_mut().ok_or_else(missing_top)?.thickness *= k;
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub delta: f64,
    pub a: f64,
    pub f_base: f64,
    pub f_perturbed: f64,
    /// `f_perturbed − f_base`
    pub delta_f: f64,
}

/// `F(perturbed) − F(base)` for every relative change and separation.
pub fn sensitivity_sweep(
    base: &ForceJob,
    parameter: &str,
    deltas: &[f64],
    separations: &[f64],
) -> Result<Vec<SweepPoint>> {
    let parameter: SweepParameter = parameter.parse()?;
    let stacks = deltas
        .iter()
        .map(|&d| perturb(&base.stack, parameter, d))
        .collect::<Result<Vec<_>>>()?;
    let f_base = separations
        .par_iter()
        .map(|&a| base.value(a))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(deltas.len() * separations.len());
    for (&delta, stack) in deltas.iter().zip(stacks) {
        let job = ForceJob { stack, ..base.clone() };
        let perturbed = if delta == 0.0 {
            f_base.clone()
        } else {
            separations
                .par_iter()
                .map(|&a| job.value(a))
                .collect::<Result<Vec<_>>>()?
        };
        for ((&a, &fb), fp) in separations.iter().zip(&f_base).zip(perturbed) {
            out.push(SweepPoint {
                delta,
                a,
                f_base: fb,
                f_perturbed: fp,
                delta_f: fp - fb,
            });
        }
    }
    Ok(out)
}
