//! Pulse-train geometry: steering vectors, ambiguity kernel and RMS spreads.
//!
//! The observation consists of `M` fast-time windows, one per pulse. Window
//! `m` holds `N` samples at absolute sample times `t = m*T_R*B + n` with
//! `n` in `[-N/2, N/2)`, and only pulse `m` contributes to it (the PRI is
//! long enough that neighbouring pulses do not reach into the window). The
//! steering vector is stored pulse-major, entry `m*N + (n + N/2)`:
//!
//! ```text
//! U[m, n](x, f_d) = sinc(n - x) * exp(j 2 pi f_d (m T_R B + n))
//! ```

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::specfun::{sin_pi, sinc};
use crate::{Complex64, Error, Result};

/// Radar pulse train. Delays are measured in samples (`1/B`) and Doppler
/// in cycles per sample, so only the product `T_R * B` enters the math.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseTrainConfig {
    m_pulses: usize,
    pri_seconds: f64,
    bandwidth_hz: f64,
    n_samples: usize,
}

impl PulseTrainConfig {
    pub fn new(m_pulses: usize, pri_seconds: f64, bandwidth_hz: f64, n_samples: usize) -> Result<Self> {
        if m_pulses == 0 {
            return Err(Error::Config("m_pulses must be at least 1"));
        }
        if n_samples < 2 || n_samples % 2 != 0 {
            return Err(Error::Config("n_samples must be even and at least 2"));
        }
        if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
            return Err(Error::Config("bandwidth_hz must be positive"));
        }
        if !(pri_seconds > 0.0 && pri_seconds.is_finite()) {
            return Err(Error::Config("pri_seconds must be positive"));
        }
        if m_pulses > 1 && pri_seconds * bandwidth_hz < n_samples as f64 {
            return Err(Error::Config("pulse windows overlap: pri_seconds * bandwidth_hz < n_samples"));
        }
        Ok(Self { m_pulses, pri_seconds, bandwidth_hz, n_samples })
    }

    /// Shorthand for the normalized case `B = 1 Hz`, `T_R = samples_per_pri` seconds.
    pub fn normalized(m_pulses: usize, samples_per_pri: f64, n_samples: usize) -> Result<Self> {
        Self::new(m_pulses, samples_per_pri, 1.0, n_samples)
    }

    pub fn m_pulses(&self) -> usize {
        self.m_pulses
    }

    pub fn pri_seconds(&self) -> f64 {
        self.pri_seconds
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// `T_R * B`: pulse spacing in samples.
    pub fn samples_per_pri(&self) -> f64 {
        self.pri_seconds * self.bandwidth_hz
    }

    /// Length of the stacked observation vector, `M * N`.
    pub fn observation_len(&self) -> usize {
        self.m_pulses * self.n_samples
    }

    /// Width of the unambiguous Doppler interval, `1 / (T_R B)` cycles/sample.
    pub fn unambiguous_doppler(&self) -> f64 {
        1.0 / self.samples_per_pri()
    }

    /// Fast-time index of window slot `i`.
    #[inline]
    pub(crate) fn fast_time(&self, i: usize) -> f64 {
        i as f64 - (self.n_samples / 2) as f64
    }
}

/// Root-mean-square spreads of the delay and Doppler responses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadConstants {
    /// Range spread in rad/sample; `pi / sqrt(3)` for an ideal band-limited pulse.
    pub beta_x: f64,
    /// Doppler spread, `pi T_R B sqrt((M^2 - 1) / 3)`; zero for a single pulse.
    pub beta_d: f64,
}

/// Steering vector `U(x, f_d)` of length `M * N`, pulse-major.
pub fn steering_vector(cfg: &PulseTrainConfig, x: f64, f_d: f64) -> Vec<Complex64> {
    let n = cfg.n_samples();
    let trb = cfg.samples_per_pri();
    let mut out = Vec::with_capacity(cfg.observation_len());
    let envelope: Vec<f64> = (0..n).map(|i| sinc(cfg.fast_time(i) - x)).collect();
    for m in 0..cfg.m_pulses() {
        let t0 = m as f64 * trb;
        for (i, &a) in envelope.iter().enumerate() {
            let phase = 2.0 * PI * f_d * (t0 + cfg.fast_time(i));
            out.push(Complex64::from_polar(a, phase));
        }
    }
    out
}

/// Dirichlet kernel `sin(pi M u) / sin(pi u)`.
pub fn dirichlet(m: usize, u: f64) -> f64 {
    let mf = m as f64;
    let den = sin_pi(u);
    if libm::fabs(den) < 1e-8 {
        // u = k + eps: (-1)^{k(M-1)} M (1 - pi^2 eps^2 (M^2 - 1) / 6)
        let k = libm::round(u);
        let eps = u - k;
        let sign = if libm::fmod(k * (mf - 1.0), 2.0) == 0.0 { 1.0 } else { -1.0 };
        sign * mf * (1.0 - PI * PI * eps * eps * (mf * mf - 1.0) / 6.0)
    } else {
        sin_pi(mf * u) / den
    }
}

/// Ambiguity kernel `sinc(dx) * D_M(T_R B df)`, the magnitude of
/// `U^H(x0, f0) U(x0 + dx, f0 + df)` for an infinitely long window.
pub fn ambiguity(cfg: &PulseTrainConfig, dx: f64, df: f64) -> f64 {
    sinc(dx) * dirichlet(cfg.m_pulses(), cfg.samples_per_pri() * df)
}

pub fn spread_constants(cfg: &PulseTrainConfig) -> SpreadConstants {
    let m = cfg.m_pulses() as f64;
    SpreadConstants {
        beta_x: PI / libm::sqrt(3.0),
        beta_d: PI * cfg.samples_per_pri() * libm::sqrt((m * m - 1.0) / 3.0),
    }
}

/// `a^H b`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}
