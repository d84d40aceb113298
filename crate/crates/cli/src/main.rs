//! `dicke`: grid sweeps, quenches, thermal scans, cutoff convergence checks
//! and heatmaps for the anisotropic Dicke model.
//!
//! Exit codes: 0 success, 1 configuration error, 2 finished with missing
//! cells, 3 fatal error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use dicke_core::sweep::{
    convergence_scan, render_heatmap, run_profile, run_quench, run_scan, Axis, HeatmapStyle, Observable, PhaseGrid,
    RunConfig, ScanOptions, ScanOutcome, StateSelector,
};
use dicke_core::thermal::analytic_tc;

#[derive(Parser)]
#[command(
    name = "dicke",
    version,
    about = "Exact-diagonalization sweeps of the anisotropic Dicke model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Observable on a (g1, g2) grid.
    Scan(Common),
    /// PR(t) after a quench of the middle H0 eigenstate at one point.
    Quench {
        #[command(flatten)]
        common: Common,
        /// Comma-separated sample times.
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
    },
    /// Two-atom mutual information on a (g1, g2, T) grid.
    Thermal(Common),
    /// Temperature of the steepest I12(T) descent on a (g1, g2) grid.
    Tc(Common),
    /// Repeats a scan for several cutoffs and compares the grids.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Comma-separated n_max values.
        #[arg(long = "nmax-list", value_delimiter = ',', required = true)]
        nmax_list: Vec<usize>,
    },
    /// Renders a saved grid as an SVG heatmap.
    Plot {
        /// Directory holding grid.csv and manifest.json.
        #[arg(long)]
        input: PathBuf,
        /// Output file; `<input>/heatmap.svg` by default.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Temperature slice of thermal grids.
        #[arg(long, default_value_t = 0)]
        t_index: usize,
        #[arg(long)]
        title: Option<String>,
        /// Colour-scale limits as min:max.
        #[arg(long)]
        range: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    observable: Option<String>,
    /// min:max:steps or a single value.
    #[arg(long)]
    g1: Option<String>,
    #[arg(long)]
    g2: Option<String>,
    /// Number of atoms.
    #[arg(long = "N")]
    n_atoms: Option<usize>,
    /// Fock cutoff.
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    omega0: Option<f64>,
    /// ground, middle or an eigenstate index.
    #[arg(long)]
    state: Option<String>,
    /// min:max:steps.
    #[arg(long)]
    temps: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Keep cells already present in the output directory.
    #[arg(long)]
    resume: bool,
}

enum Failure {
    Config(anyhow::Error),
    Fatal(anyhow::Error),
}

impl From<dicke_core::Error> for Failure {
    fn from(e: dicke_core::Error) -> Self {
        use dicke_core::Error as E;
        match e {
            E::InvalidParams(_) | E::InvalidArgument(_) | E::Json(_) | E::DimensionGuard { .. } => {
                Failure::Config(e.into())
            }
            _ => Failure::Fatal(e.into()),
        }
    }
}

fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

impl Common {
    fn resolve(&self, default_observable: Option<Observable>) -> Result<RunConfig, Failure> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))
                    .map_err(config_err)?;
                RunConfig::from_json_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))
                    .map_err(config_err)?
            }
            None => RunConfig::default(),
        };
        if let Some(o) = default_observable {
            c.observable = o;
        }
        if let Some(o) = &self.observable {
            c.observable = o.parse()?;
        }
        if let Some(a) = &self.g1 {
            c.g1 = a.parse::<Axis>()?;
        }
        if let Some(a) = &self.g2 {
            c.g2 = a.parse::<Axis>()?;
        }
        if let Some(a) = &self.temps {
            c.temps = Some(a.parse::<Axis>()?);
        }
        if let Some(s) = &self.state {
            c.state = s.parse::<StateSelector>()?;
        }
        c.n_atoms = self.n_atoms.unwrap_or(c.n_atoms);
        c.n_max = self.nmax.unwrap_or(c.n_max);
        c.omega = self.omega.unwrap_or(c.omega);
        c.omega0 = self.omega0.unwrap_or(c.omega0);
        c.workers = self.workers.unwrap_or(c.workers);
        if let Some(out) = &self.out {
            c.out = out.clone();
        }
        Ok(c)
    }

    fn options(&self) -> ScanOptions {
        ScanOptions { resume: self.resume }
    }
}

fn report(outcome: &ScanOutcome, config: &RunConfig) -> ExitCode {
    let missing = outcome.grid.missing_count();
    println!(
        "{}: {} cells ({} points computed, {} reused, {} missing) -> {}",
        config.observable,
        outcome.grid.len(),
        outcome.computed,
        outcome.skipped,
        missing,
        config.out.display()
    );
    if missing > 0 {
        eprintln!(
            "missing cells are listed in {}",
            config.out.join("missing.csv").display()
        );
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn scan(common: &Common, observable: Option<Observable>) -> Result<ExitCode, Failure> {
    let config = common.resolve(observable)?;
    if config.observable == Observable::VneeProfile {
        let profile = run_profile(&config)?;
        println!(
            "vnee_profile: {} levels -> {}",
            profile.len(),
            config.out.join("profile.csv").display()
        );
        return Ok(ExitCode::SUCCESS);
    }
    let outcome = run_scan(&config, common.options())?;
    if config.observable == Observable::TcCurve {
        for (k, v) in outcome.grid.values.iter().enumerate() {
            let (g1, g2, _) = outcome.grid.coordinates(k);
            let tc = analytic_tc(&config.params(g1, g2));
            println!(
                "g1={g1} g2={g2} T(min dI12/dT)={} analytic T_c={}",
                v.map_or("missing".to_string(), |x| x.to_string()),
                tc.map_or("none".to_string(), |x| x.to_string())
            );
        }
    }
    Ok(report(&outcome, &config))
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Scan(common) => scan(&common, None),
        Command::Thermal(common) => scan(&common, Some(Observable::MiGrid)),
        Command::Tc(common) => scan(&common, Some(Observable::TcCurve)),
        Command::Quench { common, times } => {
            let mut config = common.resolve(Some(Observable::QuenchPr))?;
            if let Some(t) = times {
                config.times = t;
            }
            let q = run_quench(&config)?;
            println!("t,pr,norm");
            for ((t, pr), n) in q.times.iter().zip(&q.pr_t).zip(&q.norms) {
                println!("{t},{pr},{n}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Converge { common, nmax_list } => {
            let config = common.resolve(None)?;
            let (report, grids) = convergence_scan(&config, &nmax_list, common.options())?;
            for (pair, d) in report.cutoffs.windows(2).zip(&report.max_differences) {
                println!(
                    "n_max {} -> {}: max |diff| = {}",
                    pair[0],
                    pair[1],
                    d.map_or("n/a".to_string(), |x| x.to_string())
                );
            }
            if report.non_convergent {
                println!("warning: differences do not decrease with the cutoff");
            }
            let missing: usize = grids.iter().map(PhaseGrid::missing_count).sum();
            Ok(if missing > 0 {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Plot {
            input,
            out,
            t_index,
            title,
            range,
        } => {
            let value_range = match range {
                Some(r) => {
                    let (a, b) = r
                        .split_once(':')
                        .ok_or_else(|| config_err(anyhow!("--range expects min:max, got '{r}'")))?;
                    let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| config_err(anyhow!("--range: {e}")));
                    Some((parse(a)?, parse(b)?))
                }
                None => None,
            };
            let grid = PhaseGrid::read_dir(&input)?;
            let style = HeatmapStyle {
                title,
                value_range,
                t_index,
            };
            let svg = render_heatmap(&grid, &style)?;
            let out = out.unwrap_or_else(|| input.join("heatmap.svg"));
            std::fs::write(&out, svg)
                .with_context(|| format!("writing {}", out.display()))
                .map_err(Failure::Fatal)?;
            println!("heatmap -> {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Fatal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
