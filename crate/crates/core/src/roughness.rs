//! Force averaged over a discrete distribution of local separations.
//!
//! This is a simple stand-in for a full distortion-averaging procedure: each
//! surface patch shifts the separation by `height_offset`, and the force is
//! the weighted mean over patches.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::summation::NeumaierSum;

/// Label attached to output that used this model.
pub const MODEL_LABEL: &str = "discrete height average (stand-in model)";

const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RoughnessProfile {
    /// `(height_offset [m], weight)`
    entries: Vec<(f64, f64)>,
}

impl RoughnessProfile {
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Input("roughness profile is empty".into()));
        }
        for (i, &(h, w)) in entries.iter().enumerate() {
            if !h.is_finite() {
                return Err(Error::Input(format!("entry {i}: height {h} is not finite")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Input(format!("entry {i}: weight must be > 0, got {w}")));
            }
        }
        let total: f64 = entries.iter().map(|e| e.1).collect::<NeumaierSum>().total();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Input(format!("roughness weights sum to {total}, not 1")));
        }
        Ok(RoughnessProfile { entries })
    }

    /// A flat surface.
    pub fn flat() -> Self {
        RoughnessProfile {
            entries: vec![(0.0, 1.0)],
        }
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn max_abs_offset(&self) -> f64 {
        self.entries.iter().map(|e| e.0.abs()).fold(0.0, f64::max)
    }

    /// CSV with header `height_m,weight`; `#` starts a comment.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Input(e.to_string()))?.clone();
        let cols: Vec<&str> = headers.iter().collect();
        if cols != ["height_m", "weight"] {
            return Err(Error::Input(format!(
                "roughness header must be 'height_m,weight', got '{}'",
                cols.join(",")
            )));
        }
        let mut entries = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Input(e.to_string()))?;
            let field = |k: usize| -> Result<f64> {
                rec.get(k)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::Input(format!("roughness row {}: bad field {k}", i + 1)))
            };
            entries.push((field(0)?, field(1)?));
        }
        RoughnessProfile::new(entries)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file)
    }
}

/// `Σᵢ wᵢ F(a + hᵢ)`.
pub fn averaged_force<F>(force: F, profile: &RoughnessProfile, a: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("separation must be > 0, got {a}")));
    }
    if profile.max_abs_offset() >= a {
        return Err(Error::Domain(format!(
            "roughness offset {:e} m reaches the separation {a:e} m",
            profile.max_abs_offset()
        )));
    }
    let mut sum = NeumaierSum::new();
    for &(h, w) in &profile.entries {
        sum.add(w * force(a + h)?);
    }
    Ok(sum.total())
}
