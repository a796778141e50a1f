//! Observation synthesis and the joint (delay, Doppler) posterior.
//!
//! With the carrier phase marginalized analytically the posterior on the
//! prior rectangle is
//!
//! ```text
//! p(x, f_d | z) ∝ I0( (2 alpha0 / N0) |z^H U(x, f_d)| )
//! ```
//!
//! and is handled in log form throughout. Two integrators are provided:
//! [`posterior_grid`] samples it on a uniform grid (what gets plotted), and
//! [`posterior_summary`] additionally refines the grid wherever the density
//! is too narrow for the coarse cells, which at high SNR is essential: the
//! posterior width shrinks like `1/(rho sqrt(M))` while the prior stays fixed.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use crate::rng::{Purpose, TrialStream};
use crate::sigmodel::{spread_constants, PulseTrainConfig};
use crate::specfun::{ln_i0, sinc};
use crate::{Complex64, Error, Result};

/// Tolerance on `sum p * cell_area = 1`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Entropy change (bits) under grid doubling above which a grid is flagged.
pub const RESOLUTION_TOLERANCE_BITS: f64 = 0.05;

/// Noise levels at or below this are treated as "no noise".
pub const NOISELESS_N0: f64 = 1e-300;

/// Uniform prior on `[x_c - D/2, x_c + D/2] x [f_c - L/2, f_c + L/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorRect {
    pub x_center: f64,
    /// `D`, samples.
    pub x_width: f64,
    pub fd_center: f64,
    /// `Lambda`, cycles/sample.
    pub fd_width: f64,
}

impl PriorRect {
    pub fn new(x_center: f64, x_width: f64, fd_center: f64, fd_width: f64) -> Result<Self> {
        if !(x_width > 0.0 && x_width.is_finite()) {
            return Err(Error::Config("prior delay width D must be positive"));
        }
        if !(fd_width > 0.0 && fd_width.is_finite()) {
            return Err(Error::Config("prior Doppler width must be positive"));
        }
        if !x_center.is_finite() || !fd_center.is_finite() {
            return Err(Error::Config("prior center must be finite"));
        }
        Ok(Self { x_center, x_width, fd_center, fd_width })
    }

    /// 16 samples by one unambiguous Doppler interval, centered at the origin.
    pub fn default_for(cfg: &PulseTrainConfig) -> Self {
        Self { x_center: 0.0, x_width: 16.0, fd_center: 0.0, fd_width: cfg.unambiguous_doppler() }
    }

    /// The Doppler width may not exceed one unambiguous interval.
    pub fn check_against(&self, cfg: &PulseTrainConfig) -> Result<()> {
        if self.fd_width > cfg.unambiguous_doppler() * (1.0 + 1e-12) {
            return Err(Error::Config("prior Doppler width exceeds 1/(T_R B)"));
        }
        Ok(())
    }

    pub fn x_lo(&self) -> f64 {
        self.x_center - 0.5 * self.x_width
    }

    pub fn fd_lo(&self) -> f64 {
        self.fd_center - 0.5 * self.fd_width
    }

    pub fn area(&self) -> f64 {
        self.x_width * self.fd_width
    }

    /// Prior entropy `log2(D Lambda)`.
    pub fn entropy_bits(&self) -> f64 {
        crate::log2(self.x_width) + crate::log2(self.fd_width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Variance per complex sample.
    pub n0: f64,
    pub master_seed: u64,
}

impl NoiseSpec {
    pub fn new(n0: f64, master_seed: u64) -> Result<Self> {
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::Config("noise variance n0 must be positive"));
        }
        Ok(Self { n0, master_seed })
    }

    pub fn is_noiseless(&self) -> bool {
        self.n0 <= NOISELESS_N0
    }
}

/// `alpha0 e^{j phi0} U(x0, fd0) + W`, with `W` drawn from the counter-based
/// stream for `(noise.master_seed, trial)`.
pub fn synth_received(
    cfg: &PulseTrainConfig,
    x0: f64,
    fd0: f64,
    phi0: f64,
    alpha0: f64,
    noise: &NoiseSpec,
    trial: u64,
) -> Result<Vec<Complex64>> {
    if !(alpha0 >= 0.0 && alpha0.is_finite()) {
        return Err(Error::Config("amplitude alpha0 must be nonnegative"));
    }
    if !(x0.is_finite() && fd0.is_finite() && phi0.is_finite()) {
        return Err(Error::Config("target parameters must be finite"));
    }
    let gain = Complex64::from_polar(alpha0, phi0);
    let mut z: Vec<Complex64> = crate::sigmodel::steering_vector(cfg, x0, fd0).into_iter().map(|u| gain * u).collect();
    if !noise.is_noiseless() {
        let sd = libm::sqrt(noise.n0);
        let mut stream = TrialStream::new(noise.master_seed, trial, Purpose::Noise);
        for (i, zi) in z.iter_mut().enumerate() {
            *zi += stream.complex_normal(i as u64) * sd;
        }
    }
    Ok(z)
}

/// Cell midpoints of `n` equal cells tiling `[lo, lo + width]`.
fn midpoints(lo: f64, width: f64, n: usize) -> Vec<f64> {
    let h = width / n as f64;
    (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect()
}

/// `a(x, f) = scale * |z^H U(x, f)|`, evaluated on tensor grids.
struct Kernel<'a> {
    z: &'a [Complex64],
    cfg: &'a PulseTrainConfig,
    scale: f64,
}

/// Per-Doppler factor of the kernel: for each `f` and fast-time slot `n`,
/// `e^{j 2 pi f n} sum_m conj(z[m, n]) e^{j 2 pi f m T_R B}`.
struct DopplerBasis {
    n: usize,
    rows: Vec<Complex64>,
}

impl<'a> Kernel<'a> {
    fn new(z: &'a [Complex64], cfg: &'a PulseTrainConfig, alpha0: f64, n0: f64) -> Result<Self> {
        if z.len() != cfg.observation_len() {
            return Err(Error::Config("observation length does not match M * N"));
        }
        if !(alpha0 >= 0.0 && alpha0.is_finite()) {
            return Err(Error::Config("amplitude alpha0 must be nonnegative"));
        }
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::Config("noise variance n0 must be positive"));
        }
        Ok(Self { z, cfg, scale: 2.0 * alpha0 / n0 })
    }

    fn basis(&self, fs: &[f64]) -> DopplerBasis {
        let n = self.cfg.n_samples();
        let m_pulses = self.cfg.m_pulses();
        let trb = self.cfg.samples_per_pri();
        let mut rows = vec![Complex64::new(0.0, 0.0); fs.len() * n];
        for (j, &f) in fs.iter().enumerate() {
            let row = &mut rows[j * n..(j + 1) * n];
            for m in 0..m_pulses {
                let w = Complex64::from_polar(1.0, 2.0 * PI * f * m as f64 * trb);
                let zm = &self.z[m * n..(m + 1) * n];
                for (acc, zi) in row.iter_mut().zip(zm) {
                    *acc += zi.conj() * w;
                }
            }
            for (i, acc) in row.iter_mut().enumerate() {
                *acc *= Complex64::from_polar(1.0, 2.0 * PI * f * self.cfg.fast_time(i));
            }
        }
        DopplerBasis { n, rows }
    }

    /// Kernel amplitudes, x-major: `out[k * nf + j]` is at `(xs[k], fs[j])`.
    fn amplitudes(&self, basis: &DopplerBasis, xs: &[f64], out: &mut Vec<f64>) {
        let n = basis.n;
        let nf = basis.rows.len() / n;
        out.clear();
        out.reserve(xs.len() * nf);
        let mut envelope = vec![0.0; n];
        for &x in xs {
            for (i, e) in envelope.iter_mut().enumerate() {
                *e = sinc(self.cfg.fast_time(i) - x);
            }
            for j in 0..nf {
                let row = &basis.rows[j * n..(j + 1) * n];
                let (mut re, mut im) = (0.0, 0.0);
                for (e, c) in envelope.iter().zip(row) {
                    re += e * c.re;
                    im += e * c.im;
                }
                out.push(self.scale * libm::hypot(re, im));
            }
        }
    }
}

/// Gridded posterior density on the prior rectangle, stored as natural-log
/// density, x-major (`log_density[i * nfd + j]` at `(x_axis[i], fd_axis[j])`).
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorGrid {
    x_axis: Vec<f64>,
    fd_axis: Vec<f64>,
    log_density: Vec<f64>,
    cell_area: f64,
}

impl PosteriorGrid {
    /// Normalize arbitrary log-weights sampled at the cell midpoints of `prior`.
    pub fn from_log_weights(prior: &PriorRect, nx: usize, nfd: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_dims(nx, nfd)?;
        let x_axis = midpoints(prior.x_lo(), prior.x_width, nx);
        let fd_axis = midpoints(prior.fd_lo(), prior.fd_width, nfd);
        let mut weights = Vec::with_capacity(nx * nfd);
        for &x in &x_axis {
            for &fd in &fd_axis {
                weights.push(f(x, fd));
            }
        }
        Self::normalized(x_axis, fd_axis, weights, prior.area() / (nx * nfd) as f64)
    }

    fn normalized(x_axis: Vec<f64>, fd_axis: Vec<f64>, mut log_w: Vec<f64>, cell_area: f64) -> Result<Self> {
        let lmax = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lmax.is_finite() {
            return Err(Error::Config("log-weights must be finite"));
        }
        let sum: f64 = log_w.iter().map(|l| libm::exp(l - lmax)).sum();
        let log_z = lmax + libm::log(sum) + libm::log(cell_area);
        for l in &mut log_w {
            *l -= log_z;
        }
        Ok(Self { x_axis, fd_axis, log_density: log_w, cell_area })
    }

    pub fn nx(&self) -> usize {
        self.x_axis.len()
    }

    pub fn nfd(&self) -> usize {
        self.fd_axis.len()
    }

    pub fn x_axis(&self) -> &[f64] {
        &self.x_axis
    }

    pub fn fd_axis(&self) -> &[f64] {
        &self.fd_axis
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_area
    }

    /// Natural-log density at cell `(i, j)`.
    pub fn log_density(&self, i: usize, j: usize) -> f64 {
        self.log_density[i * self.nfd() + j]
    }

    pub fn log_densities(&self) -> &[f64] {
        &self.log_density
    }

    pub fn total_mass(&self) -> f64 {
        self.log_density.iter().map(|l| libm::exp(*l)).sum::<f64>() * self.cell_area
    }

    /// Cell midpoint with the highest density.
    pub fn argmax(&self) -> (f64, f64) {
        let mut best = 0;
        for (k, l) in self.log_density.iter().enumerate() {
            if *l > self.log_density[best] {
                best = k;
            }
        }
        (self.x_axis[best / self.nfd()], self.fd_axis[best % self.nfd()])
    }

    /// `(x, fd, log2 density)` in storage order: fd varies fastest.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let nfd = self.nfd();
        self.log_density.iter().enumerate().map(move |(k, l)| (self.x_axis[k / nfd], self.fd_axis[k % nfd], l / LN_2))
    }
}

fn check_dims(nx: usize, nfd: usize) -> Result<()> {
    if nx < 2 || nfd < 2 {
        return Err(Error::Config("posterior grid needs at least 2 cells per axis"));
    }
    Ok(())
}

/// Posterior density of `(x, f_d)` given the observation `z`, sampled at the
/// midpoints of an `nx x nfd` grid over `prior`.
pub fn posterior_grid(
    z: &[Complex64],
    cfg: &PulseTrainConfig,
    prior: &PriorRect,
    alpha0: f64,
    n0: f64,
    nx: usize,
    nfd: usize,
) -> Result<PosteriorGrid> {
    check_dims(nx, nfd)?;
    prior.check_against(cfg)?;
    let kernel = Kernel::new(z, cfg, alpha0, n0)?;
    let x_axis = midpoints(prior.x_lo(), prior.x_width, nx);
    let fd_axis = midpoints(prior.fd_lo(), prior.fd_width, nfd);
    let mut amp = Vec::new();
    kernel.amplitudes(&kernel.basis(&fd_axis), &x_axis, &mut amp);
    let log_w = amp.iter().map(|&a| ln_i0(a)).collect();
    PosteriorGrid::normalized(x_axis, fd_axis, log_w, prior.area() / (nx * nfd) as f64)
}

/// Differential entropy of a gridded density in bits (midpoint rule).
pub fn posterior_entropy(grid: &PosteriorGrid) -> Result<f64> {
    let mass = grid.total_mass();
    if !((mass - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
        return Err(Error::Unnormalized { total_mass: mass });
    }
    let nats: f64 = grid
        .log_density
        .iter()
        .map(|&l| {
            let p = libm::exp(l);
            if p > 0.0 {
                -p * l
            } else {
                0.0
            }
        })
        .sum::<f64>()
        * grid.cell_area;
    Ok(nats / LN_2)
}

/// Knobs for [`posterior_summary`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    /// Coarse cells along delay.
    pub nx: usize,
    /// Coarse cells along Doppler.
    pub nfd: usize,
    /// Refined sub-cells per posterior standard deviation.
    pub oversample: f64,
    /// Coarse cells more than this many nats below the peak (after allowing
    /// for sub-cell peaks) are integrated at coarse resolution.
    pub mass_cutoff_nats: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self { nx: 256, nfd: 256, oversample: 2.0, mass_cutoff_nats: 36.0 }
    }
}

impl IntegrationOptions {
    pub fn with_grid(nx: usize, nfd: usize) -> Self {
        Self { nx, nfd, ..Self::default() }
    }
}

/// Entropy and first two moments of the posterior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorSummary {
    pub entropy_bits: f64,
    pub mean_x: f64,
    pub mean_fd: f64,
    pub var_x: f64,
    pub var_fd: f64,
    pub cov_x_fd: f64,
    /// Sub-cells per coarse cell along each axis (1 = no refinement).
    pub refine_x: usize,
    pub refine_fd: usize,
    /// Kernel evaluations spent.
    pub evaluations: usize,
}

/// Streaming log-sum-exp with moments about a reference point.
struct MassAccumulator {
    lmax: f64,
    s0: f64,
    sl: f64,
    sx: f64,
    sf: f64,
    sxx: f64,
    sff: f64,
    sxf: f64,
    x_ref: f64,
    f_ref: f64,
    count: usize,
}

impl MassAccumulator {
    fn new(x_ref: f64, f_ref: f64) -> Self {
        Self {
            lmax: f64::NEG_INFINITY,
            s0: 0.0,
            sl: 0.0,
            sx: 0.0,
            sf: 0.0,
            sxx: 0.0,
            sff: 0.0,
            sxf: 0.0,
            x_ref,
            f_ref,
            count: 0,
        }
    }

    #[inline]
    fn add(&mut self, l: f64, weight: f64, x: f64, f: f64) {
        self.count += 1;
        if l > self.lmax {
            let r = if self.lmax.is_finite() { libm::exp(self.lmax - l) } else { 0.0 };
            self.s0 *= r;
            self.sl *= r;
            self.sx *= r;
            self.sf *= r;
            self.sxx *= r;
            self.sff *= r;
            self.sxf *= r;
            self.lmax = l;
        }
        let w = weight * libm::exp(l - self.lmax);
        let (dx, df) = (x - self.x_ref, f - self.f_ref);
        self.s0 += w;
        self.sl += w * l;
        self.sx += w * dx;
        self.sf += w * df;
        self.sxx += w * dx * dx;
        self.sff += w * df * df;
        self.sxf += w * dx * df;
    }

    fn finish(&self, refine_x: usize, refine_fd: usize) -> PosteriorSummary {
        let nats = self.lmax + libm::log(self.s0) - self.sl / self.s0;
        let mx = self.sx / self.s0;
        let mf = self.sf / self.s0;
        PosteriorSummary {
            entropy_bits: nats / LN_2,
            mean_x: self.x_ref + mx,
            mean_fd: self.f_ref + mf,
            var_x: self.sxx / self.s0 - mx * mx,
            var_fd: self.sff / self.s0 - mf * mf,
            cov_x_fd: self.sxf / self.s0 - mx * mf,
            refine_x,
            refine_fd,
            evaluations: self.count,
        }
    }
}

/// Entropy and moments of the posterior, integrated with local refinement.
///
/// The coarse `nx x nfd` midpoint grid is evaluated first. Its peak
/// amplitude `a` bounds the kernel curvature by `a beta^2`, which gives a
/// lower bound `sigma` on the posterior width along each axis. Every coarse
/// cell that could hold non-negligible mass is then split into sub-cells no
/// wider than `sigma / oversample`; the rest keep their coarse midpoint value.
pub fn posterior_summary(
    z: &[Complex64],
    cfg: &PulseTrainConfig,
    prior: &PriorRect,
    alpha0: f64,
    n0: f64,
    opts: &IntegrationOptions,
) -> Result<PosteriorSummary> {
    let (nx, nfd) = (opts.nx, opts.nfd);
    check_dims(nx, nfd)?;
    if !(opts.oversample > 0.0) || !(opts.mass_cutoff_nats > 0.0) {
        return Err(Error::Config("oversample and mass cutoff must be positive"));
    }
    prior.check_against(cfg)?;
    let kernel = Kernel::new(z, cfg, alpha0, n0)?;
    let hx = prior.x_width / nx as f64;
    let hf = prior.fd_width / nfd as f64;
    let x_axis = midpoints(prior.x_lo(), prior.x_width, nx);
    let fd_axis = midpoints(prior.fd_lo(), prior.fd_width, nfd);

    let mut amp = Vec::new();
    kernel.amplitudes(&kernel.basis(&fd_axis), &x_axis, &mut amp);
    let coarse: Vec<f64> = amp.iter().map(|&a| ln_i0(a)).collect();
    let (mut best, mut amax) = (0usize, 0.0f64);
    for (k, &l) in coarse.iter().enumerate() {
        if l > coarse[best] {
            best = k;
        }
        amax = amax.max(amp[k]);
    }
    let mut acc = MassAccumulator::new(x_axis[best / nfd], fd_axis[best % nfd]);

    // Width bounds from the kernel curvature; the Doppler spread includes the
    // intra-pulse phase ramp, which matters when M = 1.
    let spreads = spread_constants(cfg);
    let beta_f = libm::sqrt(spreads.beta_d * spreads.beta_d + 4.0 * cfg.n_samples() as f64);
    let root_a = libm::sqrt(amax.max(1.0));
    let sigma_x = 1.0 / (spreads.beta_x * root_a);
    let sigma_f = 1.0 / (beta_f * root_a);
    let sx = refine_factor(opts.oversample * hx / sigma_x);
    let sf = refine_factor(opts.oversample * hf / sigma_f);
    let cell_area = hx * hf;

    if sx == 1 && sf == 1 {
        for (k, &l) in coarse.iter().enumerate() {
            acc.add(l, cell_area, x_axis[k / nfd], fd_axis[k % nfd]);
        }
        return Ok(acc.finish(1, 1));
    }

    // A peak can sit up to half a cell from the nearest midpoint.
    let (rx, rf) = (hx / sigma_x, hf / sigma_f);
    let slack = (rx * rx + rf * rf) / 8.0;
    let threshold = coarse[best] - opts.mass_cutoff_nats - 2.0 * slack;
    let sub_area = cell_area / (sx * sf) as f64;
    let mut sub_x = Vec::new();
    for j in 0..nfd {
        let candidate = |i: usize| coarse[i * nfd + j] >= threshold;
        if !(0..nx).any(candidate) {
            for i in 0..nx {
                acc.add(coarse[i * nfd + j], cell_area, x_axis[i], fd_axis[j]);
            }
            continue;
        }
        let f_lo = prior.fd_lo() + j as f64 * hf;
        let sub_f = midpoints(f_lo, hf, sf);
        let basis = kernel.basis(&sub_f);
        let mut i = 0;
        while i < nx {
            if !candidate(i) {
                acc.add(coarse[i * nfd + j], cell_area, x_axis[i], fd_axis[j]);
                i += 1;
                continue;
            }
            let start = i;
            while i < nx && candidate(i) {
                i += 1;
            }
            let run = i - start;
            let xs = midpoints(prior.x_lo() + start as f64 * hx, run as f64 * hx, run * sx);
            kernel.amplitudes(&basis, &xs, &mut sub_x);
            for (k, &a) in sub_x.iter().enumerate() {
                acc.add(ln_i0(a), sub_area, xs[k / sf], sub_f[k % sf]);
            }
        }
    }
    Ok(acc.finish(sx, sf))
}

fn refine_factor(ratio: f64) -> usize {
    let s = libm::ceil(ratio);
    if s <= 1.0 {
        1
    } else {
        s.min(4096.0) as usize
    }
}

/// Entropy at the requested grid and at twice the resolution in both axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionCheck {
    pub coarse_bits: f64,
    pub fine_bits: f64,
}

impl ResolutionCheck {
    pub fn delta_bits(&self) -> f64 {
        (self.fine_bits - self.coarse_bits).abs()
    }

    pub fn is_resolved(&self) -> bool {
        self.delta_bits() < RESOLUTION_TOLERANCE_BITS
    }
}

/// Doubling check for the uniform grid of [`posterior_grid`].
pub fn grid_resolution_check(
    z: &[Complex64],
    cfg: &PulseTrainConfig,
    prior: &PriorRect,
    alpha0: f64,
    n0: f64,
    nx: usize,
    nfd: usize,
) -> Result<ResolutionCheck> {
    let coarse = posterior_entropy(&posterior_grid(z, cfg, prior, alpha0, n0, nx, nfd)?)?;
    let fine = posterior_entropy(&posterior_grid(z, cfg, prior, alpha0, n0, 2 * nx, 2 * nfd)?)?;
    Ok(ResolutionCheck { coarse_bits: coarse, fine_bits: fine })
}

/// Doubling check for [`posterior_summary`].
pub fn summary_resolution_check(
    z: &[Complex64],
    cfg: &PulseTrainConfig,
    prior: &PriorRect,
    alpha0: f64,
    n0: f64,
    opts: &IntegrationOptions,
) -> Result<ResolutionCheck> {
    let coarse = posterior_summary(z, cfg, prior, alpha0, n0, opts)?.entropy_bits;
    let doubled = IntegrationOptions { nx: 2 * opts.nx, nfd: 2 * opts.nfd, ..*opts };
    let fine = posterior_summary(z, cfg, prior, alpha0, n0, &doubled)?.entropy_bits;
    Ok(ResolutionCheck { coarse_bits: coarse, fine_bits: fine })
}
