use std::io::Read;
use std::path::Path;

use num_complex::Complex64;

use crate::constants::C;
use crate::error::{Error, Result};

/// One tabulated point of ε(ω).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalSample {
    /// rad/s
    pub omega: f64,
    pub eps: Complex64,
}

/// ε(ω) sampled on the real frequency axis, sorted by frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalTable {
    samples: Vec<OpticalSample>,
}

impl OpticalTable {
    pub const MIN_SAMPLES: usize = 4;

    /// Validates: at least four samples, ω > 0 and strictly increasing,
    /// Im ε ≥ 0.
    pub fn new(samples: Vec<OpticalSample>) -> Result<Self> {
        if samples.len() < Self::MIN_SAMPLES {
            return Err(Error::Input(format!(
                "optical table needs at least {} samples, got {}",
                Self::MIN_SAMPLES,
                samples.len()
            )));
        }
        for (i, s) in samples.iter().enumerate() {
            if !(s.omega > 0.0 && s.omega.is_finite()) {
                return Err(Error::Input(format!("sample {i}: omega must be > 0, got {}", s.omega)));
            }
            if !(s.eps.re.is_finite() && s.eps.im.is_finite()) {
                return Err(Error::Input(format!("sample {i}: non-finite eps")));
            }
            if s.eps.im < 0.0 {
                return Err(Error::Input(format!(
                    "sample {i}: Im eps must be >= 0, got {}",
                    s.eps.im
                )));
            }
        }
        for (i, w) in samples.windows(2).enumerate() {
            if w[1].omega <= w[0].omega {
                return Err(Error::Input(format!(
                    "samples {} and {}: omega not strictly increasing ({} then {})",
                    i,
                    i + 1,
                    w[0].omega,
                    w[1].omega
                )));
            }
        }
        Ok(OpticalTable { samples })
    }

    /// Same as [`OpticalTable::new`] but sorts by frequency first.
    pub fn from_unsorted(mut samples: Vec<OpticalSample>) -> Result<Self> {
        samples.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        OpticalTable::new(samples)
    }

    /// Sample an ε(ω) function on a log-uniform grid.
    pub fn sample_log_uniform<F>(omega_min: f64, omega_max: f64, n: usize, eps: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64>,
    {
        if !(omega_min > 0.0 && omega_max > omega_min) || n < 2 {
            return Err(Error::Input("invalid log-uniform grid".into()));
        }
        let (l0, l1) = (omega_min.ln(), omega_max.ln());
        let samples = (0..n)
            .map(|i| {
                let omega = (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp();
                Ok(OpticalSample { omega, eps: eps(omega)? })
            })
            .collect::<Result<Vec<_>>>()?;
        OpticalTable::new(samples)
    }

    pub fn samples(&self) -> &[OpticalSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn omega_range(&self) -> (f64, f64) {
        (self.samples[0].omega, self.samples[self.samples.len() - 1].omega)
    }

    pub fn to_pairs(&self) -> Vec<(f64, Complex64)> {
        self.samples.iter().map(|s| (s.omega, s.eps)).collect()
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        OpticalTable::from_csv_reader(file)
    }

    /// Parse CSV with header `omega_rad_s,eps_re,eps_im` or `lambda_um,n,k`.
    /// Lines starting with `#` are comments.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .has_headers(true)
            .from_reader(reader);
        let headers: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::Input(format!("optical table header: {e}")))?
            .iter()
            .map(|h| h.to_ascii_lowercase())
            .collect();
        let layout = match headers.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
            ["omega_rad_s", "eps_re", "eps_im"] => Layout::Epsilon,
            ["lambda_um", "n", "k"] => Layout::RefractiveIndex,
            other => {
                return Err(Error::Input(format!(
                    "unrecognised optical table header {other:?}; expected omega_rad_s,eps_re,eps_im or lambda_um,n,k"
                )))
            }
        };

        let mut samples = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Input(format!("optical table row {}: {e}", row + 1)))?;
            if record.len() != 3 {
                return Err(Error::Input(format!(
                    "optical table row {}: expected 3 fields, got {}",
                    row + 1,
                    record.len()
                )));
            }
            let mut vals = [0.0; 3];
            for (j, field) in record.iter().enumerate() {
                vals[j] = field.parse().map_err(|_| {
                    Error::Input(format!("optical table row {}: cannot parse {field:?}", row + 1))
                })?;
            }
            samples.push(match layout {
                Layout::Epsilon => OpticalSample {
                    omega: vals[0],
                    eps: Complex64::new(vals[1], vals[2]),
                },
                Layout::RefractiveIndex => {
                    let lambda = vals[0] * 1e-6;
                    let nk = Complex64::new(vals[1], vals[2]);
                    OpticalSample {
                        omega: 2.0 * std::f64::consts::PI * C / lambda,
                        eps: nk * nk,
                    }
                }
            });
        }
        OpticalTable::from_unsorted(samples)
    }
}

enum Layout {
    Epsilon,
    RefractiveIndex,
}
