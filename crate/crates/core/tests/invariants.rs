use std::f64::consts::PI;

use proptest::prelude::*;
use radinfo_core::infometrics::{mi_trial, noise_level};
use radinfo_core::posterior::{posterior_entropy, posterior_grid, synth_received};
use radinfo_core::scatterinfo::{
    build_correlation_matrix, hermitian_eigenvalues, info_from_eigenvalues, scattering_info,
};
use radinfo_core::sigmodel::{ambiguity, inner, steering_vector};
use radinfo_core::{Complex64, ModelKind, MonteCarloSpec, NoiseSpec, PriorRect, PulseTrainConfig, ScatteringModel};

fn observation(cfg: &PulseTrainConfig, prior: &PriorRect, snr_db: f64, seed: u64) -> (Vec<Complex64>, f64) {
    let n0 = noise_level(1.0, snr_db);
    let noise = NoiseSpec::new(n0, seed).unwrap();
    let z = synth_received(cfg, prior.x_center + 0.3, prior.fd_center, 1.1, 1.0, &noise, 0).unwrap();
    (z, n0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn steering_energy_near_one_per_pulse(
        m in 1usize..8,
        log_n in 7u32..10,
        x_frac in -1.0f64..1.0,
        fd in -0.01f64..0.01,
    ) {
        let n = 1usize << log_n;
        let cfg = PulseTrainConfig::normalized(m, n as f64, n).unwrap();
        let x = x_frac * n as f64 / 4.0;
        let u = steering_vector(&cfg, x, fd);
        let e = inner(&u, &u);
        prop_assert!(e.im.abs() < 1e-9);
        prop_assert!((e.re / m as f64 - 1.0).abs() <= 0.02);
    }

    #[test]
    fn ambiguity_matches_inner_product(
        m in 1usize..6,
        dx in -1.5f64..1.5,
        df_cells in -3.0f64..3.0,
    ) {
        let n = 512;
        let cfg = PulseTrainConfig::normalized(m, 512.0, n).unwrap();
        let df = df_cells / (m as f64 * 512.0);
        let a = steering_vector(&cfg, 0.0, 0.0);
        let b = steering_vector(&cfg, dx, df);
        let direct = inner(&a, &b).norm();
        let closed = ambiguity(&cfg, dx, df).abs();
        // truncated sinc tails and the intra-window phase ramp cost a few 1e-3
        prop_assert!((direct - closed).abs() <= 5e-3 * m as f64, "{} vs {}", direct, closed);
    }

    #[test]
    fn quarter_turn_phase_invariance_is_exact(quarter in 1u8..4, seed in 0u64..1000, snr in -5.0f64..25.0) {
        let cfg = PulseTrainConfig::normalized(2, 16.0, 16).unwrap();
        let prior = PriorRect::default_for(&cfg);
        let (z, n0) = observation(&cfg, &prior, snr, seed);
        let rot = [Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)][quarter as usize - 1];
        let zr: Vec<_> = z.iter().map(|c| c * rot).collect();
        let g = posterior_grid(&z, &cfg, &prior, 1.0, n0, 32, 32).unwrap();
        let gr = posterior_grid(&zr, &cfg, &prior, 1.0, n0, 32, 32).unwrap();
        prop_assert_eq!(g, gr);
    }

    #[test]
    fn arbitrary_phase_invariance(theta in 0.0f64..(2.0 * PI), seed in 0u64..1000, snr in -5.0f64..25.0) {
        let cfg = PulseTrainConfig::normalized(2, 16.0, 16).unwrap();
        let prior = PriorRect::default_for(&cfg);
        let (z, n0) = observation(&cfg, &prior, snr, seed);
        let rot = Complex64::from_polar(1.0, theta);
        let zr: Vec<_> = z.iter().map(|c| c * rot).collect();
        let g = posterior_grid(&z, &cfg, &prior, 1.0, n0, 32, 32).unwrap();
        let gr = posterior_grid(&zr, &cfg, &prior, 1.0, n0, 32, 32).unwrap();
        for (a, b) in g.log_densities().iter().zip(gr.log_densities()) {
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn positive_scaling_keeps_argmax(c in 0.01f64..100.0, seed in 0u64..1000) {
        let cfg = PulseTrainConfig::normalized(2, 16.0, 16).unwrap();
        let prior = PriorRect::default_for(&cfg);
        let (z, n0) = observation(&cfg, &prior, 10.0, seed);
        let zs: Vec<_> = z.iter().map(|v| v * c).collect();
        let g = posterior_grid(&z, &cfg, &prior, 1.0, n0, 48, 48).unwrap();
        let gs = posterior_grid(&zs, &cfg, &prior, 1.0, n0, 48, 48).unwrap();
        prop_assert_eq!(g.argmax(), gs.argmax());
    }

    #[test]
    fn joint_rescaling_leaves_density(k in 0.01f64..100.0, seed in 0u64..1000) {
        // alpha0^2 and n0 both times k, observation times sqrt k
        let cfg = PulseTrainConfig::normalized(2, 16.0, 16).unwrap();
        let prior = PriorRect::default_for(&cfg);
        let (z, n0) = observation(&cfg, &prior, 8.0, seed);
        let r = k.sqrt();
        let zs: Vec<_> = z.iter().map(|v| v * r).collect();
        let g = posterior_grid(&z, &cfg, &prior, 1.0, n0, 32, 32).unwrap();
        let gs = posterior_grid(&zs, &cfg, &prior, r, k * n0, 32, 32).unwrap();
        for (a, b) in g.log_densities().iter().zip(gs.log_densities()) {
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn normalized_and_entropy_bounded(
        seed in 0u64..1000,
        snr in -20.0f64..30.0,
        nx in 2usize..80,
        nfd in 2usize..80,
        d in 0.5f64..20.0,
        lam_frac in 0.05f64..1.0,
    ) {
        let cfg = PulseTrainConfig::normalized(3, 24.0, 16).unwrap();
        let prior = PriorRect::new(0.0, d, 0.0, lam_frac / (3.0 * 24.0)).unwrap();
        let (z, n0) = observation(&cfg, &prior, snr, seed);
        let g = posterior_grid(&z, &cfg, &prior, 1.0, n0, nx, nfd).unwrap();
        prop_assert!((g.total_mass() - 1.0).abs() <= 1e-9);
        let h = posterior_entropy(&g).unwrap();
        prop_assert!(h <= prior.entropy_bits() + 1e-9);
    }

    #[test]
    fn trials_reproduce_bit_for_bit(seed in any::<u64>(), trial in 0u64..1_000_000) {
        let cfg = PulseTrainConfig::normalized(2, 16.0, 16).unwrap();
        let prior = PriorRect::default_for(&cfg);
        let noise = NoiseSpec::new(0.3, seed).unwrap();
        let a = synth_received(&cfg, 0.1, 0.002, 0.4, 1.0, &noise, trial).unwrap();
        let b = synth_received(&cfg, 0.1, 0.002, 0.4, 1.0, &noise, trial).unwrap();
        prop_assert_eq!(&a, &b);
        let mc = MonteCarloSpec { trials: 1, master_seed: seed, check_resolution: false,
            integration: radinfo_core::posterior::IntegrationOptions::with_grid(32, 32), ..Default::default() };
        let t1 = mi_trial(&cfg, &prior, 5.0, 1.0, &mc, trial).unwrap();
        let t2 = mi_trial(&cfg, &prior, 5.0, 1.0, &mc, trial).unwrap();
        prop_assert_eq!(t1, t2);
    }
}

fn model(kind: u8, param: f64) -> ScatteringModel {
    let kind = match kind {
        0 => ModelKind::Jakes { fm: param },
        1 => ModelKind::Exponential { decay: param },
        2 => ModelKind::FullyCorrelated,
        _ => ModelKind::Uncorrelated,
    };
    ScatteringModel::new(kind, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trace_identity(kind in 0u8..4, param in 0.1f64..10.0, m in 1usize..96, log_pri in -6.0f64..2.0, es in 0.1f64..10.0) {
        let base = model(kind, param);
        let model = ScatteringModel::new(base.kind(), es).unwrap();
        let r = build_correlation_matrix(&model, m, 10f64.powf(log_pri)).unwrap();
        let spec = hermitian_eigenvalues(&r).unwrap();
        prop_assert!((spec.trace() / (m as f64 * es) - 1.0).abs() <= 1e-9);
        prop_assert!(spec.residual <= 1e-8 * es);
        prop_assert!(spec.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(*spec.eigenvalues.last().unwrap() >= -1e-10 * es);
    }

    #[test]
    fn clipping_never_yields_nan(
        values in proptest::collection::vec(-1e-12f64..10.0, 1..64),
        tiny in proptest::collection::vec(-1e-14f64..1e-14, 0..16),
        n0 in 1e-6f64..1e3,
    ) {
        let mut all = values.clone();
        all.extend(tiny);
        let info = info_from_eigenvalues(&all, n0).unwrap();
        prop_assert!(info.is_finite() && info >= 0.0);
    }

    #[test]
    fn information_ordering(m in 1usize..48, log_pri in -6.0f64..5.0, snr_db in -10.0f64..20.0, kind in 0u8..2, param in 0.2f64..5.0) {
        let n0 = 10f64.powf(-snr_db / 10.0);
        let pri = 10f64.powf(log_pri);
        let lo = scattering_info(&model(2, 0.0), m, pri, n0).unwrap();
        let mid = scattering_info(&model(kind, param), m, pri, n0).unwrap();
        let hi = scattering_info(&model(3, 0.0), m, pri, n0).unwrap();
        let slack = 1e-9 * hi;
        prop_assert!(lo <= mid + slack && mid <= hi + slack, "{} {} {}", lo, mid, hi);
    }

    #[test]
    fn jakes_nondecreasing_in_pri(m in 2usize..64, snr_db in -10.0f64..20.0) {
        let n0 = 10f64.powf(-snr_db / 10.0);
        let jakes = ScatteringModel::jakes(1.0, 1.0).unwrap();
        let vals: Vec<f64> = [1e-6, 1e-1, 1e5].iter().map(|&p| scattering_info(&jakes, m, p, n0).unwrap()).collect();
        prop_assert!(vals[0] <= vals[1] + 1e-9 && vals[1] <= vals[2] + 1e-9, "{:?}", vals);
    }
}

#[test]
fn trace_identity_at_order_1024() {
    let jakes = ScatteringModel::jakes(2.5, 1.0).unwrap();
    let r = build_correlation_matrix(&jakes, 1024, 0.05).unwrap();
    let spec = hermitian_eigenvalues(&r).unwrap();
    assert!((spec.trace() / (1024.0 * 2.5) - 1.0).abs() <= 1e-9);
    assert!(spec.residual <= 1e-8 * 2.5);
}
