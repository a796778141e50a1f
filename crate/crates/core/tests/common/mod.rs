//! Reference implementations that share no numerics with the crate's fast
//! paths: direct separable inner products, a polynomial `ln I0`, plain
//! uniform-grid Riemann sums.
#![allow(dead_code)]

use std::f64::consts::PI;

use radinfo_core::{Complex64, PriorRect, PulseTrainConfig};

/// `ln I0(z)` from the classic polynomial fits (|rel err| < 2e-7).
pub fn ln_i0_poly(z: f64) -> f64 {
    let z = z.abs();
    if z < 3.75 {
        let t = (z / 3.75).powi(2);
        let p = 1.0
            + t * (3.5156229 + t * (3.0899424 + t * (1.2067492 + t * (0.2659732 + t * (0.0360768 + t * 0.0045813)))));
        p.ln()
    } else {
        let t = 3.75 / z;
        let p = 0.39894228
            + t * (0.01328592
                + t * (0.00225319
                    + t * (-0.00157565
                        + t * (0.00916281
                            + t * (-0.02057706 + t * (0.02635537 + t * (-0.01647633 + t * 0.00392377)))))));
        z - 0.5 * z.ln() + p.ln()
    }
}

pub fn sinc(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        (PI * u).sin() / (PI * u)
    }
}

/// Natural-log posterior on an `nx * nfd` midpoint grid, normalized by a
/// plain max-shifted sum. Returns `(log_density x-major, cell_area)`.
pub fn log_posterior(
    z: &[Complex64],
    cfg: &PulseTrainConfig,
    prior: &PriorRect,
    alpha0: f64,
    n0: f64,
    nx: usize,
    nfd: usize,
) -> (Vec<f64>, f64) {
    let n = cfg.n_samples();
    let trb = cfg.samples_per_pri();
    let times: Vec<f64> = (0..z.len()).map(|i| (i / n) as f64 * trb + (i % n) as f64 - (n / 2) as f64).collect();
    let fast: Vec<f64> = (0..z.len()).map(|i| (i % n) as f64 - (n / 2) as f64).collect();
    let hx = prior.x_width / nx as f64;
    let hf = prior.fd_width / nfd as f64;
    let x_lo = prior.x_center - 0.5 * prior.x_width;
    let f_lo = prior.fd_center - 0.5 * prior.fd_width;

    // conj(z_i) e^{j 2 pi f t_i} per Doppler column
    let cols: Vec<Vec<Complex64>> = (0..nfd)
        .map(|j| {
            let f = f_lo + (j as f64 + 0.5) * hf;
            z.iter().zip(&times).map(|(zi, &t)| zi.conj() * Complex64::from_polar(1.0, 2.0 * PI * f * t)).collect()
        })
        .collect();
    let scale = 2.0 * alpha0 / n0;
    let mut log_w = Vec::with_capacity(nx * nfd);
    for i in 0..nx {
        let x = x_lo + (i as f64 + 0.5) * hx;
        let env: Vec<f64> = fast.iter().map(|&t| sinc(t - x)).collect();
        for col in &cols {
            let s: Complex64 = col.iter().zip(&env).map(|(c, &e)| c * e).sum();
            log_w.push(ln_i0_poly(scale * s.norm()));
        }
    }
    let area = hx * hf;
    let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mass: f64 = log_w.iter().map(|l| (l - max).exp()).sum::<f64>() * area;
    let log_norm = max + mass.ln();
    (log_w.into_iter().map(|l| l - log_norm).collect(), area)
}

/// `-sum p log2 p * area`.
pub fn entropy_bits(log_density: &[f64], area: f64) -> f64 {
    -log_density.iter().map(|&l| l.exp() * l).sum::<f64>() * area / std::f64::consts::LN_2
}

pub fn mass(log_density: &[f64], area: f64) -> f64 {
    log_density.iter().map(|&l| l.exp()).sum::<f64>() * area
}

/// Eigenvalues of a 3x3 Hermitian matrix as roots of its characteristic
/// polynomial, descending.
pub fn cubic_eigenvalues(a: &[[Complex64; 3]; 3]) -> [f64; 3] {
    let tr = a[0][0].re + a[1][1].re + a[2][2].re;
    let minors = (a[0][0] * a[1][1] - a[0][1] * a[1][0])
        + (a[0][0] * a[2][2] - a[0][2] * a[2][0])
        + (a[1][1] * a[2][2] - a[1][2] * a[2][1]);
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    // lambda^3 - tr lambda^2 + c lambda - d, depressed with lambda = t + tr/3
    let (c, d) = (minors.re, det.re);
    let shift = tr / 3.0;
    let p = c - tr * tr / 3.0;
    let q = -2.0 * tr.powi(3) / 27.0 + tr * c / 3.0 - d;
    let mut roots = if p.abs() < 1e-300 {
        [shift; 3]
    } else {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        [0, 1, 2].map(|k| shift + r * (theta - 2.0 * PI * k as f64 / 3.0).cos())
    };
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    roots
}
