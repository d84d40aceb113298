use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Observable, RunConfig};
use super::grid::{format_f64, PhaseGrid, GRID_FILE};
use crate::bands::{analyze_bands, vnee_profile};
use crate::dynamics::{middle_state_quench, QuenchResult};
use crate::error::{Error, Result};
use crate::model::DickeSystem;
use crate::observables::{
    inverse_participation_ratio, mean_photon_number, multifractal_dimension, participation_ratio,
};
use crate::thermal::{mi_transition_temperature, SpinSystem, TwoSpinEnsemble};

/// Differences below this count as converged even if they stop decreasing.
pub const CONVERGENCE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScanOptions {
    /// Skip (g1, g2) points whose values are already in the output grid.
    pub resume: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    pub grid: PhaseGrid,
    /// (g1, g2) points computed in this run.
    pub computed: usize,
    /// (g1, g2) points taken from an existing output.
    pub skipped: usize,
}

impl ScanOutcome {
    pub fn is_complete(&self) -> bool {
        self.grid.missing_count() == 0
    }
}

/// Creates `dir` and checks that a file can be written there.
pub fn ensure_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let probe = dir.join(".write-check");
    fs::write(&probe, b"")?;
    fs::remove_file(&probe)?;
    Ok(())
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))
}

type CellValues = Vec<std::result::Result<f64, String>>;

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".to_string())
}

/// Values at one (g1, g2) point, one per temperature for thermal observables.
fn compute_point(config: &RunConfig, g1: f64, g2: f64, temps: &[f64]) -> CellValues {
    let width = if config.observable.is_thermal() && config.observable != Observable::TcCurve {
        temps.len()
    } else {
        1
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| point_values(config, g1, g2, temps)));
    let values = match outcome {
        Ok(Ok(v)) => return v.into_iter().map(finite).collect(),
        Ok(Err(e)) => e.to_string(),
        Err(payload) => format!("panic: {}", panic_message(payload)),
    };
    vec![Err(values); width]
}

fn finite(x: std::result::Result<f64, String>) -> std::result::Result<f64, String> {
    match x {
        Ok(v) if !v.is_finite() => Err(format!("non-finite value {v}")),
        other => other,
    }
}

fn point_values(config: &RunConfig, g1: f64, g2: f64, temps: &[f64]) -> Result<CellValues> {
    let params = config.params(g1, g2);
    let one = |x: f64| Ok(vec![Ok(x)]);
    let n_atoms = params.n_atoms as f64;
    match config.observable {
        Observable::GsEnergyDensity => one(DickeSystem::new(params)?.ground_energy()? / n_atoms),
        Observable::PhotonDensity | Observable::IprGs | Observable::PrStateK | Observable::D1StateK => {
            let system = DickeSystem::new(params)?;
            let resolved = system.diagonalize()?;
            let spectrum = &resolved.spectrum;
            if config.observable == Observable::IprGs {
                return one(inverse_participation_ratio(spectrum.vector(0))?);
            }
            let v = spectrum.vector(config.state.resolve(spectrum.len())?);
            one(match config.observable {
                Observable::PhotonDensity => mean_photon_number(v, system.basis())?,
                Observable::PrStateK => participation_ratio(v)?,
                _ => multifractal_dimension(v, 1.0, system.basis().dim())?,
            })
        }
        Observable::ChiLower | Observable::ChiUpper | Observable::RCentral => {
            let system = DickeSystem::new(params)?;
            let bands = analyze_bands(&system, &system.diagonalize()?)?;
            let value = match config.observable {
                Observable::ChiLower => bands.chi_lower,
                Observable::ChiUpper => bands.chi_upper,
                _ => Some(bands.r_mean()),
            };
            match value {
                Some(x) => one(x),
                None => Ok(vec![Err("entropy profile has no jumps in this half".to_string())]),
            }
        }
        Observable::QuenchPr => {
            let t = *config.times.last().expect("validated non-empty");
            let q = quench_at(params)?(&[t])?;
            one(q.pr_t[0])
        }
        Observable::MiGrid => {
            let ensemble = thermal_ensemble(params)?;
            Ok(temps
                .iter()
                .map(|&t| ensemble.mutual_information(t).map(|m| m.i12).map_err(|e| e.to_string()))
                .collect())
        }
        Observable::TcCurve => {
            let ensemble = thermal_ensemble(params)?;
            one(mi_transition_temperature(&ensemble, &params, temps)?.t_min_derivative)
        }
        Observable::VneeProfile => Err(Error::InvalidArgument(
            "vnee_profile is a single-point observable; use run_profile".into(),
        )),
    }
}

fn thermal_ensemble(params: crate::basis::ModelParams) -> Result<TwoSpinEnsemble> {
    let system = SpinSystem::new(params)?;
    let resolved = system.diagonalize()?;
    TwoSpinEnsemble::new(&resolved.spectrum, system.space())
}

fn quench_at(params: crate::basis::ModelParams) -> Result<impl Fn(&[f64]) -> Result<QuenchResult>> {
    let system = DickeSystem::new(params)?;
    let spectrum = system.diagonalize()?.spectrum;
    Ok(move |times: &[f64]| middle_state_quench(&spectrum, system.basis(), times))
}

/// Computes the configured observable on the whole grid and writes it to
/// `config.out`. Cell failures become missing values; only configuration
/// and I/O problems are errors.
pub fn run_scan(config: &RunConfig, options: ScanOptions) -> Result<ScanOutcome> {
    config.validate()?;
    if config.observable == Observable::VneeProfile {
        return Err(Error::InvalidArgument(
            "vnee_profile is a single-point observable; use run_profile".into(),
        ));
    }
    ensure_writable(&config.out)?;
    let mut grid = PhaseGrid::empty(config, config.observable == Observable::MiGrid);
    let existing = config.out.join(GRID_FILE);
    if options.resume && existing.exists() {
        grid.values = grid.read_values(&existing)?;
    }

    let temps = config.temperature_axis();
    let nt = grid.t_len();
    let points: Vec<(usize, f64, f64)> = (0..grid.len() / nt)
        .map(|p| {
            let (g1, g2, _) = grid.coordinates(p * nt);
            (p, g1, g2)
        })
        .filter(|&(p, _, _)| grid.values[p * nt..(p + 1) * nt].iter().any(Option::is_none))
        .collect();
    let skipped = grid.len() / nt - points.len();

    let results: Vec<(usize, CellValues)> = pool(config.workers)?.install(|| {
        points
            .par_iter()
            .map(|&(p, g1, g2)| (p, compute_point(config, g1, g2, &temps)))
            .collect()
    });
    for (p, values) in results {
        for (it, v) in values.into_iter().enumerate() {
            let k = p * nt + it;
            match v {
                Ok(x) => {
                    grid.values[k] = Some(x);
                    grid.reasons.remove(&k);
                }
                Err(reason) => {
                    grid.values[k] = None;
                    grid.reasons.insert(k, reason);
                }
            }
        }
    }
    grid.write_dir(&config.out)?;
    Ok(ScanOutcome {
        grid,
        computed: points.len(),
        skipped,
    })
}

/// (E_n, S_n) at the single configured point, written to `profile.csv`.
pub fn run_profile(config: &RunConfig) -> Result<Vec<(f64, f64)>> {
    let config = RunConfig {
        observable: Observable::VneeProfile,
        ..config.clone()
    };
    config.validate()?;
    ensure_writable(&config.out)?;
    let system = DickeSystem::new(config.params(config.g1.min, config.g2.min))?;
    let profile = vnee_profile(&system.diagonalize()?.spectrum, system.basis())?;
    let mut w = csv::Writer::from_path(config.out.join("profile.csv"))?;
    w.write_record(["E", "S"])?;
    for &(e, s) in &profile {
        w.write_record([format_f64(e), format_f64(s)])?;
    }
    w.flush()?;
    write_point_manifest(&config)?;
    Ok(profile)
}

/// PR(t) of the quenched middle state at the single configured point,
/// written to `quench.csv`.
pub fn run_quench(config: &RunConfig) -> Result<QuenchResult> {
    if config.g1.steps != 1 || config.g2.steps != 1 {
        return Err(Error::InvalidArgument("quench runs at a single (g1, g2) point".into()));
    }
    let config = RunConfig {
        observable: Observable::QuenchPr,
        ..config.clone()
    };
    config.validate()?;
    ensure_writable(&config.out)?;
    let result = quench_at(config.params(config.g1.min, config.g2.min))?(&config.times)?;
    let mut w = csv::Writer::from_path(config.out.join("quench.csv"))?;
    w.write_record(["t", "pr", "norm"])?;
    for ((t, pr), norm) in result.times.iter().zip(&result.pr_t).zip(&result.norms) {
        w.write_record([format_f64(*t), format_f64(*pr), format_f64(*norm)])?;
    }
    w.flush()?;
    write_point_manifest(&config)?;
    Ok(result)
}

fn write_point_manifest(config: &RunConfig) -> Result<()> {
    let meta = super::grid::GridMetadata::new(config);
    fs::write(
        config.out.join(super::grid::MANIFEST_FILE),
        serde_json::to_string_pretty(&meta)? + "\n",
    )?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub observable: Observable,
    pub cutoffs: Vec<usize>,
    /// Max |difference| over cells present at both of two consecutive
    /// cutoffs; `None` when they share no cells.
    pub max_differences: Vec<Option<f64>>,
    pub non_convergent: bool,
}

/// Re-runs the scan at each cutoff (outputs in `out/nmax_<n>`) and compares
/// consecutive grids.
pub fn convergence_scan(
    config: &RunConfig,
    cutoffs: &[usize],
    options: ScanOptions,
) -> Result<(ConvergenceReport, Vec<PhaseGrid>)> {
    if cutoffs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "convergence scan needs at least 2 cutoffs, got {}",
            cutoffs.len()
        )));
    }
    ensure_writable(&config.out)?;
    let grids = cutoffs
        .iter()
        .map(|&n_max| {
            let c = RunConfig {
                n_max,
                out: config.out.join(format!("nmax_{n_max}")),
                ..config.clone()
            };
            Ok(run_scan(&c, options)?.grid)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_differences: Vec<Option<f64>> = grids
        .windows(2)
        .map(|w| {
            w[0].values
                .iter()
                .zip(&w[1].values)
                .filter_map(|(a, b)| Some((a.as_ref()? - b.as_ref()?).abs()))
                .reduce(f64::max)
        })
        .collect();
    let non_convergent = max_differences.windows(2).any(|d| match (d[0], d[1]) {
        (Some(a), Some(b)) => b >= a && b > CONVERGENCE_FLOOR,
        _ => true,
    });
    let report = ConvergenceReport {
        observable: config.observable,
        cutoffs: cutoffs.to_vec(),
        max_differences,
        non_convergent,
    };
    fs::write(
        config.out.join("convergence.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    Ok((report, grids))
}
