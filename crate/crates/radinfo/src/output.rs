//! CSV rows and the run manifest.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::config::{section_text, ExperimentSpec, Kind};
use crate::RunError;

pub const MANIFEST: &str = "manifest.txt";

pub const POSTERIOR_HEADER: &str = "x,fd,log2_density";
pub const MI_HEADER: &str = "snr_db,m_pulses,mi_bits,mi_stderr,bound_bits,ee,ee_lower_bound";
pub const SCATTERING_HEADER: &str = "snr_db,pri_s,m_pulses,model,info_bits";
pub const SWEEP_HEADER: &str = "point,snr_db,pri_s,m_pulses,value_bits,stderr_bits,bound_bits";

pub fn file_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Fig1 => "fig1_posterior.csv",
        Kind::Fig2 => "fig2_mi.csv",
        Kind::Fig3 => "fig3_ee.csv",
        Kind::Fig4 => "fig4_scattering.csv",
        Kind::Sweep => "sweep.csv",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorRow {
    pub x: f64,
    pub fd: f64,
    pub log2_density: f64,
}

/// One point of an MI curve. Bound columns are NaN for a single pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiRow {
    pub snr_db: f64,
    pub m_pulses: usize,
    pub mi_bits: f64,
    pub mi_stderr: f64,
    pub bound_bits: f64,
    pub ee: f64,
    pub ee_lower_bound: f64,
}

/// Jakes rows carry their PRI; closed-form reference rows have NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringRow {
    pub snr_db: f64,
    pub pri_s: f64,
    pub m_pulses: usize,
    pub model: String,
    pub info_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: usize,
    pub snr_db: f64,
    pub pri_s: f64,
    pub m_pulses: usize,
    pub value_bits: f64,
    pub stderr_bits: f64,
    pub bound_bits: f64,
}

/// Streams rows to a CSV file, flushing after every row.
pub struct RowWriter {
    path: PathBuf,
    inner: csv::Writer<File>,
}

impl RowWriter {
    /// Create (truncating) and write `header`.
    pub fn create(path: &Path, header: &str) -> Result<Self, RunError> {
        let file = File::create(path).map_err(|e| RunError::io(path, e))?;
        let mut w = Self::wrap(path, file);
        w.inner.write_record(header.split(',')).map_err(|e| w.csv_err(e))?;
        w.inner.flush().map_err(|e| RunError::io(path, e))?;
        Ok(w)
    }

    /// Open for appending below an existing header.
    pub fn append(path: &Path) -> Result<Self, RunError> {
        let file = OpenOptions::new().append(true).open(path).map_err(|e| RunError::io(path, e))?;
        Ok(Self::wrap(path, file))
    }

    fn wrap(path: &Path, file: File) -> Self {
        let inner = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        Self { path: path.to_path_buf(), inner }
    }

    pub fn write<T: Serialize>(&mut self, row: &T) -> Result<(), RunError> {
        self.inner.serialize(row).map_err(|e| self.csv_err(e))?;
        self.inner.flush().map_err(|e| RunError::io(&self.path, e))
    }

    fn csv_err(&self, source: csv::Error) -> RunError {
        RunError::Csv { path: self.path.clone(), source }
    }
}

pub fn write_rows<T: Serialize>(path: &Path, header: &str, rows: &[T]) -> Result<(), RunError> {
    let mut w = RowWriter::create(path, header)?;
    for row in rows {
        w.write(row)?;
    }
    Ok(())
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, RunError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| RunError::Csv { path: path.to_path_buf(), source: e })?;
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(|e| RunError::Csv { path: path.to_path_buf(), source: e })
}

/// Manifest text for a directory: existing sections for other experiments
/// are kept, the section for `kind` is replaced.
pub fn manifest_text(dir: &Path, kind: Kind, spec: &ExperimentSpec) -> Result<String, RunError> {
    let path = dir.join(MANIFEST);
    let mut others = Table::new();
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(existing) = toml::from_str::<Table>(&text) {
            for (k, v) in existing {
                if k != kind.name() && matches!(v, Value::Table(_)) {
                    others.insert(k, v);
                }
            }
        }
    }
    let mut out = format!(
        "# radinfo {}\n# reproduce with: radinfo <experiment> --config {MANIFEST}\n\n",
        env!("CARGO_PKG_VERSION")
    );
    let mut sections: Vec<(String, String)> = others
        .into_iter()
        .map(|(k, v)| {
            let mut t = Table::new();
            t.insert(k.clone(), v);
            (k, toml::to_string(&t).expect("table serializes"))
        })
        .collect();
    sections.push((kind.name().to_string(), section_text(kind, spec)));
    sections.sort_by(|a, b| a.0.cmp(&b.0));
    for (i, (_, text)) in sections.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(text);
    }
    Ok(out)
}

pub fn write_manifest(dir: &Path, kind: Kind, spec: &ExperimentSpec) -> Result<(), RunError> {
    let text = manifest_text(dir, kind, spec)?;
    let path = dir.join(MANIFEST);
    let mut f = File::create(&path).map_err(|e| RunError::io(&path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| RunError::io(&path, e))
}
