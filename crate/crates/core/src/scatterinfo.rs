//! Doppler scattering information.
//!
//! A target whose scattering coefficient fluctuates from pulse to pulse
//! delivers `sum_i log2(1 + lambda_i / N0)` bits, where `lambda_i` are the
//! eigenvalues of the slow-time correlation matrix `R_S` (Toeplitz, built
//! from the autocorrelation sampled at multiples of the PRI).

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::eigen::{self, HermitianMatrix};
use crate::sigmodel::{steering_vector, PulseTrainConfig};
use crate::specfun::j0;
use crate::{log2, Complex64, Error, Result};

/// Eigenvalues more negative than `-PSD_TOLERANCE * es` reject the model.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Slow-time autocorrelation family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// `J0(2 pi fm tau)`, isotropic scattering with maximum Doppler `fm` (Hz).
    Jakes { fm: f64 },
    /// `exp(-decay |tau|)`.
    Exponential { decay: f64 },
    /// Constant: the target does not decorrelate during the dwell.
    FullyCorrelated,
    /// White: pulses are independent.
    Uncorrelated,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Jakes { .. } => "jakes",
            ModelKind::Exponential { .. } => "exponential",
            ModelKind::FullyCorrelated => "fully_correlated",
            ModelKind::Uncorrelated => "uncorrelated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringModel {
    kind: ModelKind,
    es: f64,
}

impl ScatteringModel {
    pub fn new(kind: ModelKind, es: f64) -> Result<Self> {
        if !(es > 0.0 && es.is_finite()) {
            return Err(Error::Config("scattered energy es must be positive"));
        }
        match kind {
            ModelKind::Jakes { fm } if !(fm > 0.0 && fm.is_finite()) => {
                return Err(Error::Config("jakes model needs fm > 0"))
            }
            ModelKind::Exponential { decay } if !(decay > 0.0 && decay.is_finite()) => {
                return Err(Error::Config("exponential model needs decay > 0"))
            }
            _ => {}
        }
        Ok(Self { kind, es })
    }

    pub fn jakes(es: f64, fm: f64) -> Result<Self> {
        Self::new(ModelKind::Jakes { fm }, es)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Average scattered energy, `R_c(0)`.
    pub fn es(&self) -> f64 {
        self.es
    }
}

/// Hermitian Toeplitz slow-time correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    first_row: Vec<Complex64>,
}

impl CorrelationMatrix {
    /// Matrix with `R[i][j] = row[j-i]` for `j >= i` and its conjugate below.
    /// No PSD check is done here.
    pub fn from_first_row(first_row: Vec<Complex64>) -> Result<Self> {
        let Some(r0) = first_row.first() else {
            return Err(Error::Config("correlation matrix needs order >= 1"));
        };
        if r0.im != 0.0 || !(r0.re > 0.0) {
            return Err(Error::Config("diagonal of a correlation matrix must be real and positive"));
        }
        if first_row.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("non-finite correlation entry"));
        }
        Ok(Self { first_row })
    }

    pub fn order(&self) -> usize {
        self.first_row.len()
    }

    /// The common diagonal value.
    pub fn es(&self) -> f64 {
        self.first_row[0].re
    }

    pub fn first_row(&self) -> &[Complex64] {
        &self.first_row
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if j >= i {
            self.first_row[j - i]
        } else {
            self.first_row[i - j].conj()
        }
    }

    pub fn to_dense(&self) -> HermitianMatrix {
        let n = self.order();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.get(i, j));
            }
        }
        HermitianMatrix::from_row_major(n, data).expect("Toeplitz construction is Hermitian")
    }
}

/// Sorted eigenvalues of a correlation matrix plus the worst eigenpair residual.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// `max_k ||R v_k - lambda_k v_k||`.
    pub residual: f64,
}

impl EigenSpectrum {
    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

pub fn autocorr(model: &ScatteringModel, tau: f64) -> f64 {
    let es = model.es;
    match model.kind {
        ModelKind::Jakes { fm } => es * j0(2.0 * PI * fm * tau),
        ModelKind::Exponential { decay } => es * libm::exp(-decay * libm::fabs(tau)),
        ModelKind::FullyCorrelated => es,
        ModelKind::Uncorrelated => {
            if tau == 0.0 {
                es
            } else {
                0.0
            }
        }
    }
}

/// `R_S[i][j] = R_c(|i - j| T_R)`, verified positive semidefinite.
pub fn build_correlation_matrix(model: &ScatteringModel, m: usize, pri: f64) -> Result<CorrelationMatrix> {
    if m == 0 {
        return Err(Error::Config("need at least one pulse"));
    }
    if !(pri > 0.0 && pri.is_finite()) {
        return Err(Error::Config("pri must be positive"));
    }
    let row = (0..m).map(|k| Complex64::new(autocorr(model, k as f64 * pri), 0.0)).collect();
    let r = CorrelationMatrix::from_first_row(row)?;
    let values = eigen::eigh(&r.to_dense(), false)?.values;
    check_psd(&values, r.es())?;
    Ok(r)
}

fn check_psd(values: &[f64], es: f64) -> Result<()> {
    let min = values.last().copied().unwrap_or(0.0);
    let tolerance = -PSD_TOLERANCE * es;
    if min < tolerance {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min, tolerance });
    }
    Ok(())
}

pub fn hermitian_eigenvalues(r: &CorrelationMatrix) -> Result<EigenSpectrum> {
    let dense = r.to_dense();
    let dec = eigen::eigh(&dense, true)?;
    let residual = eigen::max_residual(&dense, &dec).unwrap_or(0.0);
    Ok(EigenSpectrum { eigenvalues: dec.values, residual })
}

/// Eigenvalue after PSD clipping: negatives and values inside the solver's
/// rounding floor (`8 n eps lambda_max`) count as zero.
pub fn clipped_eigenvalues(values: &[f64]) -> impl Iterator<Item = f64> + '_ {
    let lmax = values.iter().fold(0.0f64, |m, &v| m.max(v));
    let floor = 8.0 * values.len() as f64 * f64::EPSILON * lmax;
    values.iter().map(move |&v| if v <= floor { 0.0 } else { v })
}

/// `sum_i log2(1 + lambda_i / n0)` over a precomputed spectrum.
pub fn info_from_eigenvalues(values: &[f64], n0: f64) -> Result<f64> {
    if !(n0 > 0.0) {
        return Err(Error::Config("noise level n0 must be positive"));
    }
    Ok(clipped_eigenvalues(values).map(|v| log2(1.0 + v / n0)).sum())
}

/// Doppler scattering information in bits for `m` pulses at spacing `pri`.
pub fn scattering_info(model: &ScatteringModel, m: usize, pri: f64, n0: f64) -> Result<f64> {
    if !(n0 > 0.0) {
        return Err(Error::Config("noise level n0 must be positive"));
    }
    let r = build_correlation_matrix(model, m, pri)?;
    let spectrum = hermitian_eigenvalues(&r)?;
    info_from_eigenvalues(&spectrum.eigenvalues, n0)
}

/// Like [`scattering_info`] but with each eigenvalue scaled by the actual
/// finite-window energy `U^H(x) U(x)` of one pulse instead of 1.
pub fn scattering_info_exact(
    model: &ScatteringModel,
    pri: f64,
    n0: f64,
    cfg: &PulseTrainConfig,
    x: f64,
) -> Result<f64> {
    let single = PulseTrainConfig::new(1, cfg.pri_seconds(), cfg.bandwidth_hz(), cfg.n_samples())?;
    let gain: f64 = steering_vector(&single, x, 0.0).iter().map(|c| c.norm_sqr()).sum();
    let r = build_correlation_matrix(model, cfg.m_pulses(), pri)?;
    let spectrum = hermitian_eigenvalues(&r)?;
    let scaled: Vec<f64> = spectrum.eigenvalues.iter().map(|v| v * gain).collect();
    info_from_eigenvalues(&scaled, n0)
}

/// Information rate `B_d log2(1 + es/n0)` in bits per second when the PRI
/// equals the coherence time `1/B_d`.
pub fn scattering_info_rate(bd_hz: f64, es: f64, n0: f64) -> Result<f64> {
    if !(bd_hz > 0.0) {
        return Err(Error::Config("Doppler bandwidth must be positive"));
    }
    if !(n0 > 0.0) || !(es >= 0.0) {
        return Err(Error::Config("need es >= 0 and n0 > 0"));
    }
    Ok(bd_hz * log2(1.0 + es / n0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn autocorr_kinds() {
        let jakes = ScatteringModel::jakes(2.0, 1.0).unwrap();
        assert_eq!(autocorr(&jakes, 0.0), 2.0);
        let full = ScatteringModel::new(ModelKind::FullyCorrelated, 3.0).unwrap();
        assert_eq!(autocorr(&full, 123.4), 3.0);
        let white = ScatteringModel::new(ModelKind::Uncorrelated, 3.0).unwrap();
        assert_eq!(autocorr(&white, 0.0), 3.0);
        assert_eq!(autocorr(&white, 1e-9), 0.0);
        let exp = ScatteringModel::new(ModelKind::Exponential { decay: 2.0 }, 1.0).unwrap();
        assert!((autocorr(&exp, -0.5) - libm::exp(-1.0)).abs() < 1e-15);
    }

    #[test]
    fn jakes_zero_crossing() {
        // bisection for the first J0 root on the series definition
        let series = |x: f64| {
            let (mut s, mut t) = (1.0, 1.0);
            for k in 1..60 {
                t *= -(x * x / 4.0) / ((k * k) as f64);
                s += t;
            }
            s
        };
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if series(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tau = lo / (2.0 * PI);
        assert!((tau - 0.38274).abs() < 1e-5);
        let m = ScatteringModel::jakes(1.0, 1.0).unwrap();
        assert!(autocorr(&m, tau).abs() < 1e-8);
    }

    #[test]
    fn model_validation() {
        assert!(ScatteringModel::jakes(1.0, 0.0).is_err());
        assert!(ScatteringModel::jakes(0.0, 1.0).is_err());
        assert!(ScatteringModel::new(ModelKind::Exponential { decay: -1.0 }, 1.0).is_err());
    }

    #[test]
    fn matrices_for_limit_models() {
        let white = ScatteringModel::new(ModelKind::Uncorrelated, 2.0).unwrap();
        let r = build_correlation_matrix(&white, 5, 1.0).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(r.get(i, j).re, if i == j { 2.0 } else { 0.0 });
            }
        }
        let full = ScatteringModel::new(ModelKind::FullyCorrelated, 2.0).unwrap();
        let r = build_correlation_matrix(&full, 5, 1.0).unwrap();
        assert!((0..25).all(|k| r.get(k / 5, k % 5).re == 2.0));
    }

    #[test]
    fn jakes_small_pri_is_nearly_constant() {
        let m = ScatteringModel::jakes(1.0, 1.0).unwrap();
        let r = build_correlation_matrix(&m, 4, 1e-6).unwrap();
        for k in 0..4 {
            let x = 2.0 * PI * 1e-6 * k as f64;
            let v = r.first_row()[k].re;
            assert!((v - 1.0).abs() < 1e-6);
            assert!((v - (1.0 - x * x / 4.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_indefinite_row() {
        // first row [1, 2] has eigenvalues 3 and -1
        let r =
            CorrelationMatrix::from_first_row(alloc::vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]).unwrap();
        let values = eigen::eigh(&r.to_dense(), false).unwrap().values;
        assert!(matches!(check_psd(&values, 1.0), Err(Error::NotPositiveSemidefinite { .. })));
    }

    #[test]
    fn spectra_of_limit_models() {
        let white = ScatteringModel::new(ModelKind::Uncorrelated, 1.5).unwrap();
        let s = hermitian_eigenvalues(&build_correlation_matrix(&white, 8, 1.0).unwrap()).unwrap();
        assert!(s.eigenvalues.iter().all(|&v| v == 1.5));
        let full = ScatteringModel::new(ModelKind::FullyCorrelated, 1.5).unwrap();
        let s = hermitian_eigenvalues(&build_correlation_matrix(&full, 8, 1.0).unwrap()).unwrap();
        assert!((s.eigenvalues[0] - 12.0).abs() < 1e-13);
        assert!(s.eigenvalues[1..].iter().all(|v| v.abs() < 1e-13));
        assert!(s.residual < 1e-8 * 1.5);
    }

    #[test]
    fn closed_forms() {
        for &m in &[1usize, 4, 16] {
            for &snr in &[0.1, 1.0, 100.0] {
                let white = ScatteringModel::new(ModelKind::Uncorrelated, 1.0).unwrap();
                let got = scattering_info(&white, m, 1.0, 1.0 / snr).unwrap();
                let want = m as f64 * log2(1.0 + snr);
                assert!((got - want).abs() <= 1e-12 * want);
                let full = ScatteringModel::new(ModelKind::FullyCorrelated, 1.0).unwrap();
                let got = scattering_info(&full, m, 1.0, 1.0 / snr).unwrap();
                let want = log2(1.0 + m as f64 * snr);
                assert!((got - want).abs() <= 1e-12 * want);
            }
        }
    }

    #[test]
    fn single_pulse_any_model() {
        for kind in [ModelKind::Jakes { fm: 3.0 }, ModelKind::Exponential { decay: 0.1 }, ModelKind::FullyCorrelated] {
            let m = ScatteringModel::new(kind, 2.0).unwrap();
            let got = scattering_info(&m, 1, 0.3, 0.5).unwrap();
            assert!((got - log2(5.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn rate() {
        assert_eq!(scattering_info_rate(1.0, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(scattering_info_rate(2.0, 1.0, 1.0).unwrap(), 2.0);
        assert_eq!(scattering_info_rate(5.0, 3.0, 1.0).unwrap(), 10.0);
        assert!(scattering_info_rate(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn exact_mode_scales_by_window_energy() {
        let cfg = PulseTrainConfig::normalized(4, 64.0, 64).unwrap();
        let white = ScatteringModel::new(ModelKind::Uncorrelated, 1.0).unwrap();
        // integer delay: the sampled pulse has unit energy
        let at_zero = scattering_info_exact(&white, 1.0, 0.5, &cfg, 0.0).unwrap();
        assert!((at_zero - 4.0 * log2(3.0)).abs() < 1e-12);
        let half = scattering_info_exact(&white, 1.0, 0.5, &cfg, 0.5).unwrap();
        assert!(half < at_zero);
    }
}
