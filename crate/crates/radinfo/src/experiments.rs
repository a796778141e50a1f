//! The five experiments. Monte Carlo trials run on a rayon pool; results
//! are gathered in trial order and reduced sequentially, so output bytes do
//! not depend on the thread count.

use std::fs;
use std::path::{Path, PathBuf};

use radinfo_core::infometrics::{
    aggregate, entropy_error_from_info, mi_trial, mi_upper_bound, noise_level, trial_truth,
};
use radinfo_core::posterior::{grid_resolution_check, posterior_grid, synth_received};
use radinfo_core::scatterinfo::{build_correlation_matrix, hermitian_eigenvalues, info_from_eigenvalues};
use radinfo_core::{Error, InfoEstimate, ModelKind, NoiseSpec, PriorRect, PulseTrainConfig, ScatteringModel};
use rayon::prelude::*;

use crate::config::{section_text, ExperimentSpec, Kind, Metric};
use crate::output::{
    self, file_name, MiRow, PosteriorRow, RowWriter, ScatteringRow, SweepRow, MI_HEADER, POSTERIOR_HEADER,
    SCATTERING_HEADER, SWEEP_HEADER,
};
use crate::RunError;

/// Marker left next to a partial `sweep.csv`; holds the spec it belongs to.
pub const RESUME_MARKER: &str = "sweep.resume";

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub csv: PathBuf,
    pub rows: usize,
    pub warnings: Vec<String>,
}

/// Run `kind` with `spec`, writing the CSV and manifest into `out_dir`.
/// `threads = None` lets rayon pick.
pub fn run(kind: Kind, spec: &ExperimentSpec, out_dir: &Path, threads: Option<usize>) -> Result<RunSummary, RunError> {
    spec.validate()?;
    fs::create_dir_all(out_dir).map_err(|e| RunError::io(out_dir, e))?;
    output::write_manifest(out_dir, kind, spec)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| RunError::config(format!("thread pool: {e}")))?;
    let csv = out_dir.join(file_name(kind));
    pool.install(|| match kind {
        Kind::Fig1 => run_fig1(spec, &csv),
        Kind::Fig2 | Kind::Fig3 => run_mi_curves(kind, spec, &csv),
        Kind::Fig4 => run_fig4(spec, &csv),
        Kind::Sweep => run_sweep(spec, out_dir, &csv),
    })
}

fn single<T: Copy>(values: &[T], what: &str, kind: Kind) -> Result<T, RunError> {
    match values {
        [v] => Ok(*v),
        _ => Err(RunError::config(format!("{kind} takes exactly one {what}"))),
    }
}

/// Gridded posterior for one noise draw.
pub fn run_fig1(spec: &ExperimentSpec, csv: &Path) -> Result<RunSummary, RunError> {
    let m = single(&spec.m_pulses, "m_pulses value", Kind::Fig1)?;
    let pri = single(&spec.pri_s, "pri_s value", Kind::Fig1)?;
    let snr = single(&spec.snr_points(), "SNR point", Kind::Fig1)?;
    let cfg = spec.pulse_train(m, pri)?;
    let prior = spec.prior(&cfg)?;
    let mc = spec.monte_carlo();
    let n0 = noise_level(spec.alpha0, snr);
    let (x0, fd0, phi0) = trial_truth(&prior, mc.truth, spec.seed, 0);
    let noise = NoiseSpec::new(n0, spec.seed)?;
    let z = synth_received(&cfg, x0, fd0, phi0, spec.alpha0, &noise, 0)?;
    let grid = posterior_grid(&z, &cfg, &prior, spec.alpha0, n0, spec.nx, spec.nfd)?;

    let mut warnings = Vec::new();
    let check = grid_resolution_check(&z, &cfg, &prior, spec.alpha0, n0, spec.nx, spec.nfd)?;
    if !check.is_resolved() {
        warnings.push(format!(
            "fig1: entropy moved {:.3} bits when the grid was doubled; raise nx/nfd or narrow the prior",
            check.delta_bits()
        ));
    }
    let rows: Vec<PosteriorRow> =
        grid.rows().map(|(x, fd, log2_density)| PosteriorRow { x, fd, log2_density }).collect();
    output::write_rows(csv, POSTERIOR_HEADER, &rows)?;
    eprintln!("fig1: {} cells, argmax {:?}", rows.len(), grid.argmax());
    Ok(RunSummary { csv: csv.to_path_buf(), rows: rows.len(), warnings })
}

/// Monte Carlo information for one point, trials in parallel.
pub fn mi_estimate(
    spec: &ExperimentSpec,
    cfg: &PulseTrainConfig,
    prior: &PriorRect,
    snr_db: f64,
) -> Result<InfoEstimate, RunError> {
    let mc = spec.monte_carlo();
    let outcomes = (0..mc.trials as u64)
        .into_par_iter()
        .map(|t| mi_trial(cfg, prior, snr_db, spec.alpha0, &mc, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(aggregate(&outcomes)?)
}

fn bound_or_nan(cfg: &PulseTrainConfig, prior: &PriorRect, snr_db: f64) -> Result<f64, RunError> {
    match mi_upper_bound(cfg, prior, snr_db) {
        Ok(b) => Ok(b),
        Err(Error::Unsupported(_)) => Ok(f64::NAN),
        Err(e) => Err(e.into()),
    }
}

fn resolution_warning(label: &str, est: &InfoEstimate) -> Option<String> {
    est.resolution_warning
        .map(|r| format!("{label}: entropy moved {:.3} bits when the grid was doubled; raise nx/nfd", r.delta_bits()))
}

/// One MI row (and its entropy-error columns).
pub fn mi_row(spec: &ExperimentSpec, m: usize, pri: f64, snr_db: f64) -> Result<(MiRow, InfoEstimate), RunError> {
    let cfg = spec.pulse_train(m, pri)?;
    let prior = spec.prior(&cfg)?;
    let est = mi_estimate(spec, &cfg, &prior, snr_db)?;
    let bound = bound_or_nan(&cfg, &prior, snr_db)?;
    let row = MiRow {
        snr_db,
        m_pulses: m,
        mi_bits: est.bits,
        mi_stderr: est.std_error,
        bound_bits: bound,
        ee: entropy_error_from_info(&prior, est.bits),
        ee_lower_bound: if bound.is_nan() { f64::NAN } else { entropy_error_from_info(&prior, bound) },
    };
    Ok((row, est))
}

/// MI (fig2) or EE (fig3) versus SNR, one curve per pulse count.
pub fn run_mi_curves(kind: Kind, spec: &ExperimentSpec, csv: &Path) -> Result<RunSummary, RunError> {
    let pri = single(&spec.pri_s, "pri_s value", kind)?;
    let mut writer = RowWriter::create(csv, MI_HEADER)?;
    let mut warnings = Vec::new();
    let mut rows = 0;
    for &m in &spec.m_pulses {
        for snr in spec.snr_points() {
            let (row, est) = mi_row(spec, m, pri, snr)?;
            eprintln!(
                "{kind} M={m} snr={snr} dB: {:.4} +- {:.4} bits (bound {:.4})",
                row.mi_bits, row.mi_stderr, row.bound_bits
            );
            warnings.extend(resolution_warning(&format!("{kind} M={m} snr={snr}"), &est));
            writer.write(&row)?;
            rows += 1;
        }
    }
    Ok(RunSummary { csv: csv.to_path_buf(), rows, warnings })
}

/// Jakes scattering information per PRI plus the two closed-form limits.
pub fn run_fig4(spec: &ExperimentSpec, csv: &Path) -> Result<RunSummary, RunError> {
    let m = single(&spec.m_pulses, "m_pulses value", Kind::Fig4)?;
    let jakes = ScatteringModel::jakes(spec.es, spec.fm_hz)?;
    let spectra = spec
        .pri_s
        .par_iter()
        .map(|&pri| Ok(hermitian_eigenvalues(&build_correlation_matrix(&jakes, m, pri)?)?.eigenvalues))
        .collect::<Result<Vec<_>, RunError>>()?;
    let limits = [ModelKind::Uncorrelated, ModelKind::FullyCorrelated]
        .iter()
        .map(|&kind| {
            let model = ScatteringModel::new(kind, spec.es)?;
            Ok((kind.name(), hermitian_eigenvalues(&build_correlation_matrix(&model, m, 1.0)?)?.eigenvalues))
        })
        .collect::<Result<Vec<_>, RunError>>()?;

    let snrs = spec.snr_points();
    let mut rows = Vec::new();
    for (&pri, values) in spec.pri_s.iter().zip(&spectra) {
        for &snr in &snrs {
            let n0 = scattering_n0(spec.es, snr);
            let info_bits = info_from_eigenvalues(values, n0)?;
            rows.push(ScatteringRow { snr_db: snr, pri_s: pri, m_pulses: m, model: "jakes".into(), info_bits });
        }
    }
    for (name, values) in &limits {
        for &snr in &snrs {
            let info_bits = info_from_eigenvalues(values, scattering_n0(spec.es, snr))?;
            rows.push(ScatteringRow { snr_db: snr, pri_s: f64::NAN, m_pulses: m, model: (*name).into(), info_bits });
        }
    }
    output::write_rows(csv, SCATTERING_HEADER, &rows)?;
    eprintln!("fig4: {} rows", rows.len());
    Ok(RunSummary { csv: csv.to_path_buf(), rows: rows.len(), warnings: Vec::new() })
}

/// `N0` with `rho^2 = E_s / N0`.
fn scattering_n0(es: f64, snr_db: f64) -> f64 {
    es * 10f64.powf(-snr_db / 10.0)
}

/// Grid points of a sweep in row order: pulse count, then PRI, then SNR.
pub fn sweep_points(spec: &ExperimentSpec) -> Vec<(usize, f64, f64)> {
    let snrs = spec.snr_points();
    let mut points = Vec::new();
    for &m in &spec.m_pulses {
        for &pri in &spec.pri_s {
            for &snr in &snrs {
                points.push((m, pri, snr));
            }
        }
    }
    points
}

/// Product sweep over `m_pulses x pri_s x snr_db`. Rows are flushed as they
/// complete; a marker lets a rerun with the same spec continue after the
/// last complete row.
pub fn run_sweep(spec: &ExperimentSpec, out_dir: &Path, csv: &Path) -> Result<RunSummary, RunError> {
    let marker = out_dir.join(RESUME_MARKER);
    let fingerprint = section_text(Kind::Sweep, spec);
    let points = sweep_points(spec);

    let done = match fs::read_to_string(&marker) {
        Ok(text) if text == fingerprint && csv.exists() => {
            let mut kept = completed_rows(csv);
            kept.truncate(points.len());
            output::write_rows(csv, SWEEP_HEADER, &kept)?;
            kept.len()
        }
        _ => {
            RowWriter::create(csv, SWEEP_HEADER)?;
            0
        }
    };
    if done > 0 {
        eprintln!("sweep: resuming after {done} of {} points", points.len());
    }
    fs::write(&marker, &fingerprint).map_err(|e| RunError::io(&marker, e))?;

    let mut writer = RowWriter::append(csv)?;
    let mut warnings = Vec::new();
    let mut spectrum: Option<((usize, u64), Vec<f64>)> = None;
    for (i, &(m, pri, snr)) in points.iter().enumerate().skip(done) {
        let row = match spec.metric {
            Metric::RangeDoppler => {
                let (row, est) = mi_row(spec, m, pri, snr)?;
                warnings.extend(resolution_warning(&format!("sweep point {i}"), &est));
                SweepRow {
                    point: i,
                    snr_db: snr,
                    pri_s: pri,
                    m_pulses: m,
                    value_bits: row.mi_bits,
                    stderr_bits: row.mi_stderr,
                    bound_bits: row.bound_bits,
                }
            }
            Metric::Scattering => {
                let key = (m, pri.to_bits());
                if spectrum.as_ref().map(|(k, _)| *k) != Some(key) {
                    let jakes = ScatteringModel::jakes(spec.es, spec.fm_hz)?;
                    let values = hermitian_eigenvalues(&build_correlation_matrix(&jakes, m, pri)?)?.eigenvalues;
                    spectrum = Some((key, values));
                }
                let values = &spectrum.as_ref().expect("just filled").1;
                let n0 = scattering_n0(spec.es, snr);
                SweepRow {
                    point: i,
                    snr_db: snr,
                    pri_s: pri,
                    m_pulses: m,
                    value_bits: info_from_eigenvalues(values, n0)?,
                    stderr_bits: 0.0,
                    bound_bits: m as f64 * (1.0 + spec.es / n0).log2(),
                }
            }
        };
        eprintln!("sweep point {i}/{}: M={m} pri={pri} snr={snr} -> {:.4} bits", points.len(), row.value_bits);
        writer.write(&row)?;
    }
    fs::remove_file(&marker).map_err(|e| RunError::io(&marker, e))?;
    Ok(RunSummary { csv: csv.to_path_buf(), rows: points.len(), warnings })
}

/// Leading rows of a partial sweep that were written in full.
fn completed_rows(csv: &Path) -> Vec<SweepRow> {
    let Ok(text) = fs::read_to_string(csv) else { return Vec::new() };
    let whole = &text[..text.rfind('\n').map_or(0, |i| i + 1)];
    csv::Reader::from_reader(whole.as_bytes())
        .deserialize::<SweepRow>()
        .map_while(Result::ok)
        .enumerate()
        .take_while(|(i, row)| row.point == *i)
        .map(|(_, row)| row)
        .collect()
}
