//! Special functions used by the posterior and scattering models.
//!
//! `ln I0` is provided only in log form. The posterior kernel routinely
//! evaluates it at arguments in the tens of thousands, where `I0` itself
//! overflows an `f64`.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::{Error, Result};

/// Crossover between the power series and the large-argument expansion of `ln I0`.
pub const I0_SERIES_LIMIT: f64 = 20.0;

/// Largest argument accepted by [`log_bessel_i0`].
pub const I0_MAX_ARG: f64 = 1e9;

/// Crossover between the power series and the Hankel expansion of `J0`.
///
/// Below this the alternating series loses at most ~1e-12 to cancellation;
/// above it the smallest Hankel term is below 1e-10.
pub const J0_SERIES_LIMIT: f64 = 12.0;

/// Accuracy contract attached to a special function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracySpec {
    pub relative_tolerance: f64,
}

impl AccuracySpec {
    pub fn new(relative_tolerance: f64) -> Result<Self> {
        if !(relative_tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive"));
        }
        Ok(Self { relative_tolerance })
    }
}

impl Default for AccuracySpec {
    fn default() -> Self {
        Self { relative_tolerance: 1e-10 }
    }
}

/// `sin(pi * u)` with exact zeros at the integers.
#[inline]
pub fn sin_pi(u: f64) -> f64 {
    let k = libm::round(u);
    let r = u - k;
    let s = libm::sin(PI * r);
    // k is an integer-valued float; parity decides the sign
    if libm::fmod(k, 2.0) == 0.0 {
        s
    } else {
        -s
    }
}

/// Normalized sinc, `sin(pi u) / (pi u)`.
#[inline]
pub fn sinc(u: f64) -> f64 {
    if libm::fabs(u) < 1e-6 {
        let x = PI * u;
        1.0 - x * x / 6.0
    } else {
        sin_pi(u) / (PI * u)
    }
}

/// Natural log of the modified Bessel function `I0(z)`.
pub fn log_bessel_i0(z: f64) -> Result<f64> {
    if !(0.0..=I0_MAX_ARG).contains(&z) {
        return Err(Error::Domain { function: "log_bessel_i0", arg: z });
    }
    Ok(ln_i0(z))
}

/// Unchecked `ln I0(z)` for `z >= 0`, used in the posterior hot loop.
#[inline]
pub(crate) fn ln_i0(z: f64) -> f64 {
    if z <= I0_SERIES_LIMIT {
        ln_i0_series(z)
    } else {
        ln_i0_asymptotic(z)
    }
}

fn ln_i0_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
        k += 1.0;
    }
    libm::log(sum)
}

/// `ln I0(z) = z - ln(2 pi z)/2 + ln(sum_k prod_{j<=k} (2j-1)^2 / (j 8 z))`.
fn ln_i0_asymptotic(z: f64) -> f64 {
    let inv8z = 1.0 / (8.0 * z);
    let mut term: f64 = 1.0;
    let mut tail = 0.0;
    let mut k = 1.0;
    loop {
        let next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) * inv8z / k;
        if next >= term || next < 1e-17 {
            if next < term {
                tail += next;
            }
            break;
        }
        tail += next;
        term = next;
        k += 1.0;
    }
    z - 0.5 * libm::log(2.0 * PI * z) + libm::log1p(tail)
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain { function: "bessel_j0", arg: x });
    }
    Ok(j0(x))
}

pub(crate) fn j0(x: f64) -> f64 {
    let ax = libm::fabs(x);
    if ax <= J0_SERIES_LIMIT {
        j0_series(ax)
    } else {
        j0_hankel(ax)
    }
}

fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= -q / (k * k);
        sum += term;
        if libm::fabs(term) < 1e-18 {
            break;
        }
        k += 1.0;
    }
    sum
}

/// `J0(x) = sqrt(2/(pi x)) (P cos(x - pi/4) - Q sin(x - pi/4))`.
fn j0_hankel(x: f64) -> f64 {
    // a_k = prod_{j<=k} (2j-1)^2 / (8 j x); P takes even k, Q odd k, alternating.
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a: f64 = 1.0;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        let next = a * (2.0 * kf - 1.0) * (2.0 * kf - 1.0) / (8.0 * kf * x);
        if next >= a || next < 1e-17 {
            break;
        }
        a = next;
        // sign pattern: Q = -a1 + a3 - a5..., P = 1 - a2 + a4 - ...
        match k % 4 {
            1 => q -= a,
            2 => p -= a,
            3 => q += a,
            _ => p += a,
        }
        k += 1;
    }
    let (s, c) = (libm::sin(x), libm::cos(x));
    let cos_chi = (c + s) * FRAC_1_SQRT_2;
    let sin_chi = (s - c) * FRAC_1_SQRT_2;
    libm::sqrt(2.0 / (PI * x)) * (p * cos_chi - q * sin_chi)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain 30-term series; independent of the adaptive stopping rule.
    fn i0_oracle(z: f64, terms: usize) -> f64 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 0..terms {
            if k > 0 {
                term *= (z * z / 4.0) / ((k * k) as f64);
            }
            sum += term;
        }
        sum
    }

    fn j0_oracle(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 0..80 {
            if k > 0 {
                term *= -(x * x / 4.0) / ((k * k) as f64);
            }
            sum += term;
        }
        sum
    }

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(sinc(3.0), 0.0);
        assert_eq!(sinc(-7.0), 0.0);
        assert!((sinc(0.5) - 2.0 / PI).abs() < 1e-15);
        for n in 1..2000 {
            assert_eq!(sinc(n as f64), 0.0);
        }
    }

    #[test]
    fn i0_small_and_series_regime() {
        assert_eq!(log_bessel_i0(0.0).unwrap(), 0.0);
        let want = i0_oracle(1.0, 30);
        assert!((want - 1.266_065_877_752_008_4).abs() < 1e-15);
        let got = log_bessel_i0(1.0).unwrap();
        assert!((got - libm::log(want)).abs() < 1e-10 * libm::log(want));
        for &z in &[0.01, 0.5, 2.0, 5.0, 10.0, 15.0, 19.99] {
            let want = libm::log(i0_oracle(z, 120));
            let got = log_bessel_i0(z).unwrap();
            assert!((got - want).abs() <= 1e-10 * want.abs().max(1e-300), "z={z}");
        }
    }

    #[test]
    fn i0_asymptotic_overlaps_series() {
        // Series in plain f64 stays accurate to ~1e-15 relative up to z=50.
        for &z in &[20.0, 20.5, 25.0, 35.0, 50.0] {
            let want = libm::log(i0_oracle(z, 200));
            assert!((ln_i0_asymptotic(z) - want).abs() < 1e-10, "z={z}");
            assert!((ln_i0_series(z) - want).abs() < 1e-12, "z={z}");
        }
    }

    #[test]
    fn i0_large_argument_is_finite() {
        let v = log_bessel_i0(700.0).unwrap();
        let lead = 700.0 - 0.5 * libm::log(1400.0 * PI);
        assert!(v.is_finite());
        // first correction is ln(1 + 1/(8z))
        assert!((v - lead - libm::log1p(1.0 / 5600.0)).abs() < 1e-6);
        assert!(log_bessel_i0(1e9).unwrap().is_finite());
    }

    #[test]
    fn i0_domain() {
        assert!(log_bessel_i0(-1e-3).is_err());
        assert!(log_bessel_i0(f64::NAN).is_err());
        assert!(log_bessel_i0(2e9).is_err());
    }

    #[test]
    fn i0_tail_derivative_approaches_one() {
        let mut prev = log_bessel_i0(10.0).unwrap();
        let mut z = 10.0;
        while z < 500.0 {
            let next = log_bessel_i0(z + 0.5).unwrap();
            let d = (next - prev) / 0.5;
            assert!(d > 0.9 && d < 1.0, "z={z} d={d}");
            prev = next;
            z += 0.5;
        }
    }

    #[test]
    fn j0_values() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        for &x in &[0.1, 1.0, 2.5, 5.0, 8.0, 11.9] {
            assert!((bessel_j0(x).unwrap() - j0_oracle(x)).abs() < 1e-12, "x={x}");
        }
        assert!(bessel_j0(f64::INFINITY).is_err());
    }

    #[test]
    fn j0_hankel_overlaps_series() {
        // The series is still good to ~1e-11 at 16.
        let mut x = 12.0;
        while x <= 16.0 {
            assert!((j0_hankel(x) - j0_oracle(x)).abs() < 1e-10, "x={x}");
            x += 0.25;
        }
    }

    #[test]
    fn j0_first_zero_by_bisection() {
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if j0_oracle(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(lo > 2.40 && lo < 2.41);
        assert!(bessel_j0(lo).unwrap().abs() < 1e-12);
    }

    #[test]
    fn j0_envelope_far_out() {
        let x = 1e5;
        let env = libm::sqrt(2.0 / (PI * x));
        assert!(bessel_j0(x).unwrap().abs() <= env + 1e-6);
        assert!(bessel_j0(1e6).unwrap().abs() <= libm::sqrt(2.0 / (PI * 1e6)) + 1e-9);
    }

    #[test]
    fn j0_is_even_and_bounded() {
        let mut x = -200.0;
        while x < 200.0 {
            let v = j0(x);
            assert_eq!(v, j0(-x));
            assert!(v.abs() <= 1.0);
            x += 0.173;
        }
    }
}
