//! Experiment specs and their TOML configuration.
//!
//! A config file holds shared keys at the top level and per-experiment
//! overrides in `[fig1]` ... `[fig4]`, `[sweep]` tables:
//!
//! ```toml
//! seed = 7
//! trials = 50
//!
//! [fig2]
//! m_pulses = [4, 16]
//! snr_db = { start = -30.0, stop = 30.0, step = 3.0 }
//! ```
//!
//! Resolution order is built-in defaults, then `paper_scale`, then shared
//! keys, then the experiment's table, then command-line flags.

use std::fmt;
use std::path::Path;

use radinfo_core::posterior::IntegrationOptions;
use radinfo_core::{MonteCarloSpec, PriorRect, PulseTrainConfig, TruthMode};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Sweep,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::Fig1, Kind::Fig2, Kind::Fig3, Kind::Fig4, Kind::Sweep];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Fig1 => "fig1",
            Kind::Fig2 => "fig2",
            Kind::Fig3 => "fig3",
            Kind::Fig4 => "fig4",
            Kind::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inclusive SNR grid in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnrGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SnrGrid {
    pub fn single(snr_db: f64) -> Self {
        Self { start: snr_db, stop: snr_db, step: 1.0 }
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }

    fn validate(&self) -> Result<(), RunError> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step > 0.0 && self.step.is_finite()) {
            return Err(RunError::config("snr_db needs finite start/stop and step > 0"));
        }
        if self.stop < self.start {
            return Err(RunError::config("snr_db grid is empty (stop < start)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    Redrawn,
    Fixed,
}

/// What a sweep computes at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Monte Carlo range-Doppler information.
    RangeDoppler,
    /// Jakes Doppler scattering information.
    Scattering,
}

/// Everything an experiment run depends on. Output bytes are a function of
/// this struct alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub seed: u64,
    pub trials: usize,
    pub bandwidth_hz: f64,
    pub n_samples: usize,
    pub m_pulses: Vec<usize>,
    pub pri_s: Vec<f64>,
    pub snr_db: SnrGrid,
    pub alpha0: f64,
    pub x_center: f64,
    pub x_width: f64,
    pub fd_center: f64,
    /// Doppler prior width in cycles/sample; `0` means one unambiguous
    /// interval `1 / (T_R B)`.
    pub fd_width: f64,
    pub truth: Truth,
    pub nx: usize,
    pub nfd: usize,
    pub oversample: f64,
    /// Maximum Doppler of the Jakes model, Hz.
    pub fm_hz: f64,
    /// Scattered energy `E_s`.
    pub es: f64,
    pub metric: Metric,
}

impl ExperimentSpec {
    pub fn defaults(kind: Kind, paper_scale: bool) -> Self {
        let base = Self {
            seed: 1,
            trials: 100,
            bandwidth_hz: 1e6,
            n_samples: 64,
            m_pulses: vec![4, 16],
            pri_s: vec![64e-6],
            snr_db: SnrGrid { start: -30.0, stop: 30.0, step: 6.0 },
            alpha0: 1.0,
            x_center: 0.0,
            x_width: 16.0,
            fd_center: 0.0,
            fd_width: 0.0,
            truth: Truth::Redrawn,
            nx: 256,
            nfd: 256,
            oversample: 2.0,
            fm_hz: 1.0,
            es: 1.0,
            metric: Metric::RangeDoppler,
        };
        let full = Self { n_samples: 256, pri_s: vec![256e-6], ..base.clone() };
        match (kind, paper_scale) {
            (Kind::Fig1, _) => Self {
                trials: 1,
                n_samples: 256,
                m_pulses: vec![4],
                pri_s: vec![256e-6],
                snr_db: SnrGrid::single(20.0),
                x_width: 0.25,
                fd_width: 0.25 / (4.0 * 256.0),
                truth: Truth::Fixed,
                ..base
            },
            (Kind::Fig2, false) => base,
            (Kind::Fig2, true) => Self { m_pulses: vec![4, 16, 64], ..full },
            (Kind::Fig3, false) => Self { m_pulses: vec![16], ..base },
            (Kind::Fig3, true) => Self { m_pulses: vec![16], ..full },
            (Kind::Fig4, _) => Self {
                m_pulses: vec![256],
                pri_s: vec![1e-6, 1e-1, 1e5],
                snr_db: SnrGrid { start: -10.0, stop: 20.0, step: 2.0 },
                ..base
            },
            (Kind::Sweep, false) => Self {
                trials: 20,
                m_pulses: vec![2, 4],
                snr_db: SnrGrid { start: 0.0, stop: 20.0, step: 10.0 },
                ..base
            },
            (Kind::Sweep, true) => Self { m_pulses: vec![4, 16, 64], ..full },
        }
    }

    pub fn snr_points(&self) -> Vec<f64> {
        self.snr_db.points()
    }

    pub fn pulse_train(&self, m: usize, pri_s: f64) -> Result<PulseTrainConfig, RunError> {
        Ok(PulseTrainConfig::new(m, pri_s, self.bandwidth_hz, self.n_samples)?)
    }

    pub fn prior(&self, cfg: &PulseTrainConfig) -> Result<PriorRect, RunError> {
        let fd_width = if self.fd_width > 0.0 { self.fd_width } else { cfg.unambiguous_doppler() };
        let prior = PriorRect::new(self.x_center, self.x_width, self.fd_center, fd_width)?;
        prior.check_against(cfg)?;
        Ok(prior)
    }

    pub fn monte_carlo(&self) -> MonteCarloSpec {
        MonteCarloSpec {
            trials: self.trials,
            master_seed: self.seed,
            truth: match self.truth {
                Truth::Redrawn => TruthMode::Redrawn,
                Truth::Fixed => TruthMode::Fixed,
            },
            integration: IntegrationOptions {
                oversample: self.oversample,
                ..IntegrationOptions::with_grid(self.nx, self.nfd)
            },
            check_resolution: true,
        }
    }

    /// Checks that do not depend on the experiment kind.
    pub fn validate(&self) -> Result<(), RunError> {
        self.snr_db.validate()?;
        if self.trials == 0 {
            return Err(RunError::config("trials must be at least 1"));
        }
        if self.m_pulses.is_empty() || self.pri_s.is_empty() {
            return Err(RunError::config("m_pulses and pri_s must be nonempty"));
        }
        if self.nx < 2 || self.nfd < 2 {
            return Err(RunError::config("nx and nfd must be at least 2"));
        }
        if self.oversample.is_nan() || self.oversample <= 0.0 {
            return Err(RunError::config("oversample must be positive"));
        }
        if !(self.alpha0 >= 0.0 && self.alpha0.is_finite()) {
            return Err(RunError::config("alpha0 must be nonnegative"));
        }
        if !(self.es > 0.0 && self.fm_hz > 0.0) {
            return Err(RunError::config("es and fm_hz must be positive"));
        }
        Ok(())
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub paper_scale: bool,
}

/// Resolve the spec for `kind` from an optional config text.
pub fn resolve(kind: Kind, config: Option<&str>, cli: &Overrides) -> Result<ExperimentSpec, RunError> {
    let file: Table = match config {
        Some(text) => toml::from_str(text).map_err(|e: toml::de::Error| RunError::config(format!("config: {e}")))?,
        None => Table::new(),
    };
    let paper_scale = cli.paper_scale
        || match file.get("paper_scale") {
            Some(Value::Boolean(b)) => *b,
            Some(_) => return Err(RunError::config("paper_scale must be a boolean")),
            None => false,
        };

    let mut merged = to_table(&ExperimentSpec::defaults(kind, paper_scale));
    let shared: Table = file
        .iter()
        .filter(|(k, _)| k.as_str() != "paper_scale" && !Kind::ALL.iter().any(|kd| kd.name() == k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    merged.extend(shared);
    match file.get(kind.name()) {
        Some(Value::Table(section)) => merged.extend(section.clone()),
        Some(_) => return Err(RunError::config(format!("[{kind}] must be a table"))),
        None => {}
    }
    if let Some(seed) = cli.seed {
        merged.insert("seed".into(), Value::Integer(seed as i64));
    }
    if let Some(trials) = cli.trials {
        merged.insert("trials".into(), Value::Integer(trials as i64));
    }

    let spec: ExperimentSpec = Value::Table(merged)
        .try_into()
        .map_err(|e: toml::de::Error| RunError::config(format!("config: {}", e.message())))?;
    spec.validate()?;
    Ok(spec)
}

pub fn resolve_file(kind: Kind, path: Option<&Path>, cli: &Overrides) -> Result<ExperimentSpec, RunError> {
    let text = match path {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|e| RunError::io(p, e))?),
        None => None,
    };
    resolve(kind, text.as_deref(), cli)
}

fn to_table(spec: &ExperimentSpec) -> Table {
    match Value::try_from(spec) {
        Ok(Value::Table(t)) => t,
        _ => unreachable!("spec serializes to a table"),
    }
}

/// `[kind]` section text holding every resolved field.
pub fn section_text(kind: Kind, spec: &ExperimentSpec) -> String {
    let mut doc = Table::new();
    doc.insert(kind.name().into(), Value::Table(to_table(spec)));
    toml::to_string(&doc).expect("spec serializes")
}
