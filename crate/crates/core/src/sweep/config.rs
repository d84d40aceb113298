use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::ModelParams;
use crate::dynamics::SNAPSHOT_TIMES;
use crate::error::{Error, Result};
use crate::thermal::{MAX_THERMAL_ATOMS, MIN_TEMPERATURE_POINTS};

/// Quantity computed per grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// E_gs / N.
    GsEnergyDensity,
    /// ⟨a†a⟩ / j of the selected state.
    PhotonDensity,
    IprGs,
    /// PR of the selected state.
    PrStateK,
    /// D_1 of the selected state.
    D1StateK,
    /// (E_n, S_n) over the whole spectrum; single point only.
    VneeProfile,
    ChiLower,
    ChiUpper,
    RCentral,
    /// PR of the quenched middle state at the last configured time.
    QuenchPr,
    /// I12 on the (g1, g2, T) grid.
    MiGrid,
    /// Temperature of the steepest descent of I12(T).
    TcCurve,
}

impl Observable {
    pub const ALL: [Observable; 12] = [
        Observable::GsEnergyDensity,
        Observable::PhotonDensity,
        Observable::IprGs,
        Observable::PrStateK,
        Observable::D1StateK,
        Observable::VneeProfile,
        Observable::ChiLower,
        Observable::ChiUpper,
        Observable::RCentral,
        Observable::QuenchPr,
        Observable::MiGrid,
        Observable::TcCurve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::GsEnergyDensity => "gs_energy_density",
            Observable::PhotonDensity => "photon_density",
            Observable::IprGs => "ipr_gs",
            Observable::PrStateK => "pr_state_k",
            Observable::D1StateK => "d1_state_k",
            Observable::VneeProfile => "vnee_profile",
            Observable::ChiLower => "chi_lower",
            Observable::ChiUpper => "chi_upper",
            Observable::RCentral => "r_central",
            Observable::QuenchPr => "quench_pr",
            Observable::MiGrid => "mi_grid",
            Observable::TcCurve => "tc_curve",
        }
    }

    /// Computed on the spin product space over a temperature axis.
    pub fn is_thermal(self) -> bool {
        matches!(self, Observable::MiGrid | Observable::TcCurve)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Observable::ALL.into_iter().find(|o| o.name() == s).ok_or_else(|| {
            let names: Vec<_> = Observable::ALL.iter().map(|o| o.name()).collect();
            Error::InvalidArgument(format!(
                "unknown observable '{s}', expected one of {}",
                names.join(", ")
            ))
        })
    }
}

/// Which eigenstate per-state observables refer to. `Middle` is index
/// ⌊N_D/2⌋ of the energy-ordered spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StateSelector {
    Ground,
    Middle,
    Index(usize),
}

impl StateSelector {
    pub fn resolve(self, dim: usize) -> Result<usize> {
        let k = match self {
            StateSelector::Ground => 0,
            StateSelector::Middle => dim / 2,
            StateSelector::Index(k) => k,
        };
        if k >= dim {
            return Err(Error::InvalidArgument(format!(
                "state index {k} out of range for dimension {dim}"
            )));
        }
        Ok(k)
    }
}

impl fmt::Display for StateSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSelector::Ground => f.write_str("ground"),
            StateSelector::Middle => f.write_str("middle"),
            StateSelector::Index(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for StateSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ground" => Ok(StateSelector::Ground),
            "middle" => Ok(StateSelector::Middle),
            _ => s
                .parse()
                .map(StateSelector::Index)
                .map_err(|_| Error::InvalidArgument(format!("state must be ground, middle or an index, got '{s}'"))),
        }
    }
}

impl TryFrom<String> for StateSelector {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<StateSelector> for String {
    fn from(s: StateSelector) -> String {
        s.to_string()
    }
}

/// Uniform axis `min:max:steps`; a single step sits at `min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn point(x: f64) -> Self {
        Axis {
            min: x,
            max: x,
            steps: 1,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| match i {
                0 => self.min,
                _ if i == self.steps - 1 => self.max,
                _ => self.min + (self.max - self.min) * i as f64 / last,
            })
            .collect()
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidArgument(format!("{name}: steps must be >= 1")));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min < 0.0 || self.max < self.min {
            return Err(Error::InvalidArgument(format!(
                "{name}: need 0 <= min <= max, got {}:{}",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

impl FromStr for Axis {
    type Err = Error;

    /// `min:max:steps`, or a bare value for a single point.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("expected min:max:steps or a number, got '{s}'"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [x] => Ok(Axis::point(x.trim().parse().map_err(|_| bad())?)),
            [a, b, n] => Ok(Axis {
                min: a.trim().parse().map_err(|_| bad())?,
                max: b.trim().parse().map_err(|_| bad())?,
                steps: n.trim().parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub observable: Observable,
    pub omega: f64,
    pub omega0: f64,
    pub n_atoms: usize,
    pub n_max: usize,
    pub g1: Axis,
    pub g2: Axis,
    /// Temperature axis of thermal observables; T = 0 alone when absent.
    pub temps: Option<Axis>,
    pub state: StateSelector,
    /// Quench sample times; the grid value is PR at the last one.
    pub times: Vec<f64>,
    pub out: PathBuf,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            observable: Observable::GsEnergyDensity,
            omega: 1.0,
            omega0: 1.0,
            n_atoms: 20,
            n_max: 100,
            g1: Axis {
                min: 0.0,
                max: 2.0,
                steps: 16,
            },
            g2: Axis {
                min: 0.0,
                max: 2.0,
                steps: 16,
            },
            temps: None,
            state: StateSelector::Ground,
            times: SNAPSHOT_TIMES.to_vec(),
            out: PathBuf::from("out"),
            workers: 0,
        }
    }
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn params(&self, g1: f64, g2: f64) -> ModelParams {
        ModelParams {
            omega: self.omega,
            omega0: self.omega0,
            g1,
            g2,
            n_atoms: self.n_atoms,
            n_max: self.n_max,
        }
    }

    pub fn temperature_axis(&self) -> Vec<f64> {
        match self.temps {
            Some(axis) => axis.values(),
            None => vec![0.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.g1.validate("g1")?;
        self.g2.validate("g2")?;
        self.params(self.g1.min, self.g2.min).validate()?;
        if let Some(t) = self.temps {
            t.validate("temps")?;
        }
        if self.observable.is_thermal() && self.n_atoms > MAX_THERMAL_ATOMS {
            return Err(Error::InvalidArgument(format!(
                "{} needs N <= {MAX_THERMAL_ATOMS}, got {}",
                self.observable, self.n_atoms
            )));
        }
        match self.observable {
            Observable::TcCurve => {
                let n = self.temps.map_or(0, |t| t.steps);
                if n < MIN_TEMPERATURE_POINTS {
                    return Err(Error::InvalidArgument(format!(
                        "tc_curve needs at least {MIN_TEMPERATURE_POINTS} temperatures, got {n}"
                    )));
                }
            }
            Observable::QuenchPr => {
                if self.times.is_empty() || self.times.iter().any(|t| !t.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "quench times must be finite and non-empty".into(),
                    ));
                }
            }
            Observable::VneeProfile if self.g1.steps != 1 || self.g2.steps != 1 => {
                return Err(Error::InvalidArgument(
                    "vnee_profile is computed at a single (g1, g2) point".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }
}
