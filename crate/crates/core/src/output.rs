//! CSV emission with a provenance header.
//!
//! Header lines start with `#`. Unless a timestamp is requested they depend
//! only on the inputs, so identical runs give byte-identical files.

use std::io::Write;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Shortest round-trip representation.
pub fn fmt_num(v: f64) -> String {
    format!("{v:e}")
}

/// Provenance of one output file.
#[derive(Debug, Clone, Default)]
pub struct Provenance {
    pub command: String,
    /// Effective settings, in a fixed order.
    pub settings: Vec<(String, String)>,
    pub mode: Option<String>,
    pub tolerances: Option<String>,
    pub notes: Vec<String>,
    /// Seconds since the Unix epoch, if wanted.
    pub timestamp: Option<u64>,
}

impl Provenance {
    pub fn new(command: impl Into<String>) -> Self {
        Provenance {
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn setting(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.settings.push((key.into(), value.to_string()));
        self
    }

    /// SHA-256 of the canonical `key=value` lines of the settings.
    pub fn config_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("command={}\n", self.command));
        for (k, v) in &self.settings {
            h.update(format!("{k}={v}\n"));
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn header_lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("# casimir {}", env!("CARGO_PKG_VERSION")),
            format!("# command: {}", self.command),
            format!("# config_sha256: {}", self.config_hash()),
        ];
        if let Some(m) = &self.mode {
            out.push(format!("# mode: {m}"));
        }
        if let Some(t) = &self.tolerances {
            out.push(format!("# tolerances: {t}"));
        }
        for (k, v) in &self.settings {
            out.push(format!("# {k}: {v}"));
        }
        for n in &self.notes {
            out.push(format!("# note: {n}"));
        }
        if let Some(t) = self.timestamp {
            out.push(format!("# generated_unix: {t}"));
        }
        out
    }
}

/// Writes header, column names and rows.
pub fn write_csv<W: Write>(
    mut out: W,
    provenance: &Provenance,
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    for line in provenance.header_lines() {
        writeln!(out, "{line}")?;
    }
    let mut w = csv::WriterBuilder::new().flexible(false).from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(columns).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
