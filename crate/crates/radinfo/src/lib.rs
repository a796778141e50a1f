//! Experiment harness for the `radinfo-core` information metrics.
//!
//! Each experiment resolves an [`ExperimentSpec`](config::ExperimentSpec),
//! writes its CSV and records the resolved spec in `manifest.txt`, which can
//! be passed back as `--config` to reproduce the run byte for byte.
//!
//! | File | Columns |
//! |------|---------|
//! | `fig1_posterior.csv` | `x,fd,log2_density` |
//! | `fig2_mi.csv`, `fig3_ee.csv` | `snr_db,m_pulses,mi_bits,mi_stderr,bound_bits,ee,ee_lower_bound` |
//! | `fig4_scattering.csv` | `snr_db,pri_s,m_pulses,model,info_bits` |
//! | `sweep.csv` | `point,snr_db,pri_s,m_pulses,value_bits,stderr_bits,bound_bits` |

use std::path::{Path, PathBuf};

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{ExperimentSpec, Kind, Overrides};
pub use experiments::{run, RunSummary};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] radinfo_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

impl RunError {
    pub fn config(msg: impl Into<String>) -> Self {
        RunError::Config(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        RunError::Io { path: path.to_path_buf(), source }
    }

    /// 2 for configuration problems, 3 for numerical failures, 1 for IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Model(e) if e.is_config() => 2,
            RunError::Model(_) => 3,
            RunError::Io { .. } | RunError::Csv { .. } => 1,
        }
    }
}
