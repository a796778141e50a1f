//! Range-Doppler mutual information and entropy error.
//!
//! The Monte Carlo estimate is
//! `I = log2(D Lambda) - E_z[h(X, F_d | z)]`, with the conditional entropy
//! of each trial integrated by [`posterior_summary`]. The closed-form bound
//! replaces the posterior by its high-SNR Gaussian approximation with
//! covariance `diag(1/(2 rho^2 beta_x^2 M), 1/(2 rho^2 beta_d^2 M))`.

use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use crate::posterior::{
    posterior_summary, summary_resolution_check, synth_received, IntegrationOptions, NoiseSpec, PosteriorSummary,
    PriorRect, ResolutionCheck,
};
use crate::rng::{Purpose, TrialStream};
use crate::sigmodel::{spread_constants, PulseTrainConfig};
use crate::{log2, Error, Result};

/// How the true `(x0, fd0)` is chosen for each trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TruthMode {
    /// Uniform over the prior rectangle, fresh per trial. This is the
    /// mutual information proper.
    #[default]
    Redrawn,
    /// Always the rectangle center.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloSpec {
    pub trials: usize,
    pub master_seed: u64,
    pub truth: TruthMode,
    pub integration: IntegrationOptions,
    /// Run the grid-doubling check on trial 0.
    pub check_resolution: bool,
}

impl Default for MonteCarloSpec {
    fn default() -> Self {
        Self {
            trials: 100,
            master_seed: 0,
            truth: TruthMode::Redrawn,
            integration: IntegrationOptions::default(),
            check_resolution: true,
        }
    }
}

/// A Monte Carlo information estimate in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoEstimate {
    pub bits: f64,
    pub std_error: f64,
    pub trials: usize,
    /// Set when the trial-0 doubling check moved the entropy by more than
    /// [`crate::posterior::RESOLUTION_TOLERANCE_BITS`].
    pub resolution_warning: Option<ResolutionCheck>,
}

impl InfoEstimate {
    /// Aggregate per-trial information values, summed in slice order.
    pub fn from_trial_bits(per_trial: &[f64]) -> Result<Self> {
        let n = per_trial.len();
        if n == 0 {
            return Err(Error::Config("need at least one trial"));
        }
        let mean = per_trial.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = per_trial.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
            libm::sqrt(var / n as f64)
        } else {
            0.0
        };
        Ok(Self { bits: mean, std_error, trials: n, resolution_warning: None })
    }

    /// Mean conditional entropy implied by this estimate.
    pub fn conditional_entropy_bits(&self, prior: &PriorRect) -> f64 {
        prior.entropy_bits() - self.bits
    }
}

/// One Monte Carlo trial: the drawn truth and the posterior it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub x0: f64,
    pub fd0: f64,
    pub summary: PosteriorSummary,
    /// `log2(D Lambda) - h`.
    pub info_bits: f64,
    pub resolution: Option<ResolutionCheck>,
}

/// `N0` for a given SNR `rho^2 = alpha0^2 / N0` in dB. With `alpha0 = 0` the
/// noise level is taken relative to unit amplitude.
pub fn noise_level(alpha0: f64, snr_db: f64) -> f64 {
    let reference = if alpha0 > 0.0 { alpha0 * alpha0 } else { 1.0 };
    reference * libm::pow(10.0, -snr_db / 10.0)
}

fn rho_squared(snr_db: f64) -> f64 {
    libm::pow(10.0, snr_db / 10.0)
}

/// Truth `(x0, fd0, phi0)` for a trial; the phase is always random.
pub fn trial_truth(prior: &PriorRect, mode: TruthMode, master_seed: u64, trial: u64) -> (f64, f64, f64) {
    let mut s = TrialStream::new(master_seed, trial, Purpose::Truth);
    let (ux, uf) = s.uniform_pair(0);
    let (up, _) = s.uniform_pair(1);
    let phi0 = 2.0 * PI * up;
    match mode {
        TruthMode::Fixed => (prior.x_center, prior.fd_center, phi0),
        TruthMode::Redrawn => (prior.x_lo() + prior.x_width * ux, prior.fd_lo() + prior.fd_width * uf, phi0),
    }
}

fn validate(cfg: &PulseTrainConfig, prior: &PriorRect, snr_db: f64, alpha0: f64) -> Result<()> {
    prior.check_against(cfg)?;
    if !snr_db.is_finite() {
        return Err(Error::Config("snr_db must be finite"));
    }
    if !(alpha0 >= 0.0 && alpha0.is_finite()) {
        return Err(Error::Config("amplitude alpha0 must be nonnegative"));
    }
    Ok(())
}

/// Run trial `trial` of a Monte Carlo MI estimate. Pure in its arguments.
pub fn mi_trial(
    cfg: &PulseTrainConfig,
    prior: &PriorRect,
    snr_db: f64,
    alpha0: f64,
    mc: &MonteCarloSpec,
    trial: u64,
) -> Result<TrialOutcome> {
    validate(cfg, prior, snr_db, alpha0)?;
    let n0 = noise_level(alpha0, snr_db);
    let noise = NoiseSpec::new(n0, mc.master_seed)?;
    let (x0, fd0, phi0) = trial_truth(prior, mc.truth, mc.master_seed, trial);
    let z = synth_received(cfg, x0, fd0, phi0, alpha0, &noise, trial)?;
    let summary = posterior_summary(&z, cfg, prior, alpha0, n0, &mc.integration)?;
    let resolution = if mc.check_resolution && trial == 0 {
        Some(summary_resolution_check(&z, cfg, prior, alpha0, n0, &mc.integration)?)
    } else {
        None
    };
    Ok(TrialOutcome { x0, fd0, info_bits: prior.entropy_bits() - summary.entropy_bits, summary, resolution })
}

/// Fold trial outcomes (in trial order) into an estimate.
pub fn aggregate(outcomes: &[TrialOutcome]) -> Result<InfoEstimate> {
    let bits: Vec<f64> = outcomes.iter().map(|o| o.info_bits).collect();
    let mut est = InfoEstimate::from_trial_bits(&bits)?;
    est.resolution_warning = outcomes.iter().filter_map(|o| o.resolution).find(|r| !r.is_resolved());
    Ok(est)
}

/// Monte Carlo range-Doppler information, trials run sequentially.
pub fn mi_monte_carlo(
    cfg: &PulseTrainConfig,
    prior: &PriorRect,
    snr_db: f64,
    alpha0: f64,
    mc: &MonteCarloSpec,
) -> Result<InfoEstimate> {
    if mc.trials == 0 {
        return Err(Error::Config("need at least one trial"));
    }
    let outcomes =
        (0..mc.trials as u64).map(|t| mi_trial(cfg, prior, snr_db, alpha0, mc, t)).collect::<Result<Vec<_>>>()?;
    aggregate(&outcomes)
}

/// `log2(D Lambda beta_x beta_d M rho^2 / (pi e))`.
pub fn mi_upper_bound(cfg: &PulseTrainConfig, prior: &PriorRect, snr_db: f64) -> Result<f64> {
    Ok(range_info_bound(cfg, prior.x_width, snr_db)? + doppler_info_bound(cfg, prior.fd_width, snr_db)?)
}

/// `log2(D beta_x sqrt(M) rho / sqrt(pi e))`.
pub fn range_info_bound(cfg: &PulseTrainConfig, x_width: f64, snr_db: f64) -> Result<f64> {
    if !(x_width > 0.0) || !snr_db.is_finite() {
        return Err(Error::Config("need D > 0 and finite SNR"));
    }
    let beta = spread_constants(cfg).beta_x;
    Ok(log2(x_width * beta) + half_gain_bits(cfg, snr_db))
}

/// `log2(Lambda beta_d sqrt(M) rho / sqrt(pi e))`; undefined for one pulse.
pub fn doppler_info_bound(cfg: &PulseTrainConfig, fd_width: f64, snr_db: f64) -> Result<f64> {
    if cfg.m_pulses() < 2 {
        return Err(Error::Unsupported("Doppler information bound needs at least two pulses"));
    }
    if !(fd_width > 0.0) || !snr_db.is_finite() {
        return Err(Error::Config("need Lambda > 0 and finite SNR"));
    }
    let beta = spread_constants(cfg).beta_d;
    Ok(log2(fd_width * beta) + half_gain_bits(cfg, snr_db))
}

/// `log2(sqrt(M rho^2 / (pi e)))`.
fn half_gain_bits(cfg: &PulseTrainConfig, snr_db: f64) -> f64 {
    0.5 * log2(cfg.m_pulses() as f64 * rho_squared(snr_db) / (PI * E))
}

/// Entropy error `2^{2h} / (2 pi e)^2` for a conditional entropy `h` in bits.
pub fn entropy_error(h_cond_bits: f64) -> f64 {
    let two_pi_e = 2.0 * PI * E;
    libm::exp2(2.0 * h_cond_bits) / (two_pi_e * two_pi_e)
}

/// Entropy error implied by an information value:
/// `D^2 Lambda^2 / ((2 pi e)^2 4^I)`.
pub fn entropy_error_from_info(prior: &PriorRect, info_bits: f64) -> f64 {
    entropy_error(prior.entropy_bits() - info_bits)
}

/// Entropy-error lower bound from [`mi_upper_bound`].
pub fn ee_lower_bound(cfg: &PulseTrainConfig, prior: &PriorRect, snr_db: f64) -> Result<f64> {
    Ok(entropy_error_from_info(prior, mi_upper_bound(cfg, prior, snr_db)?))
}

/// Per-axis entropy errors. Each factor carries its own `(2 pi e)^2`, so
/// `ee_joint` is smaller than [`ee_lower_bound`] by exactly `(2 pi e)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EeResult {
    pub ee_joint: f64,
    pub ee_x: f64,
    pub ee_fd: f64,
}

pub fn ee_split(cfg: &PulseTrainConfig, prior: &PriorRect, snr_db: f64) -> Result<EeResult> {
    let ix = range_info_bound(cfg, prior.x_width, snr_db)?;
    let ifd = doppler_info_bound(cfg, prior.fd_width, snr_db)?;
    let two_pi_e_sq = (2.0 * PI * E) * (2.0 * PI * E);
    let ee_x = prior.x_width * prior.x_width / (two_pi_e_sq * libm::exp2(2.0 * ix));
    let ee_fd = prior.fd_width * prior.fd_width / (two_pi_e_sq * libm::exp2(2.0 * ifd));
    Ok(EeResult { ee_joint: ee_x * ee_fd, ee_x, ee_fd })
}
