use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};

pub const GRID_FILE: &str = "grid.csv";
pub const MISSING_FILE: &str = "missing.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Tie-break used for the decoupled middle state, echoed into every manifest.
pub const MIDDLE_STATE_RULE: &str = "H0 levels ranked by (energy, canonical basis index); state at rank floor(N_D/2)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub config: RunConfig,
    pub version: String,
    pub n_max: usize,
    pub middle_state_rule: String,
}

impl GridMetadata {
    pub fn new(config: &RunConfig) -> Self {
        GridMetadata {
            config: config.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            n_max: config.n_max,
            middle_state_rule: MIDDLE_STATE_RULE.to_string(),
        }
    }
}

/// Values on a (g1, g2) grid, optionally with a temperature axis.
///
/// Cells are stored with g1 slowest and T fastest:
/// index = (i1 · len(g2) + i2) · len(T) + iT.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub g1_axis: Vec<f64>,
    pub g2_axis: Vec<f64>,
    pub t_axis: Option<Vec<f64>>,
    pub values: Vec<Option<f64>>,
    /// Why each missing cell is missing.
    pub reasons: BTreeMap<usize, String>,
    pub metadata: GridMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Manifest {
    metadata: GridMetadata,
    g1_axis: Vec<f64>,
    g2_axis: Vec<f64>,
    t_axis: Option<Vec<f64>>,
    cells: usize,
    missing: BTreeMap<usize, String>,
}

/// Shortest representation that parses back to the same f64.
pub fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

impl PhaseGrid {
    pub fn empty(config: &RunConfig, thermal: bool) -> Self {
        let g1_axis = config.g1.values();
        let g2_axis = config.g2.values();
        let t_axis = thermal.then(|| config.temperature_axis());
        let cells = g1_axis.len() * g2_axis.len() * t_axis.as_ref().map_or(1, Vec::len);
        PhaseGrid {
            g1_axis,
            g2_axis,
            t_axis,
            values: vec![None; cells],
            reasons: BTreeMap::new(),
            metadata: GridMetadata::new(config),
        }
    }

    pub fn t_len(&self) -> usize {
        self.t_axis.as_ref().map_or(1, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index(&self, i1: usize, i2: usize, it: usize) -> usize {
        (i1 * self.g2_axis.len() + i2) * self.t_len() + it
    }

    pub fn get(&self, i1: usize, i2: usize, it: usize) -> Option<f64> {
        self.values[self.index(i1, i2, it)]
    }

    /// (g1, g2, T) of a cell; T is `None` for non-thermal grids.
    pub fn coordinates(&self, index: usize) -> (f64, f64, Option<f64>) {
        let nt = self.t_len();
        let it = index % nt;
        let point = index / nt;
        let i2 = point % self.g2_axis.len();
        let i1 = point / self.g2_axis.len();
        (self.g1_axis[i1], self.g2_axis[i2], self.t_axis.as_ref().map(|t| t[it]))
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    fn check_shape(&self) -> Result<()> {
        let expected = self.g1_axis.len() * self.g2_axis.len() * self.t_len();
        if self.values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.values.len(),
            });
        }
        Ok(())
    }

    fn header(&self, last: &str) -> Vec<String> {
        let mut h = vec!["g1".to_string(), "g2".to_string()];
        if self.t_axis.is_some() {
            h.push("T".to_string());
        }
        h.push(last.to_string());
        h
    }

    fn coordinate_fields(&self, index: usize) -> Vec<String> {
        let (g1, g2, t) = self.coordinates(index);
        let mut row = vec![format_f64(g1), format_f64(g2)];
        if let Some(t) = t {
            row.push(format_f64(t));
        }
        row
    }

    /// Writes grid.csv, missing.csv and manifest.json into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        self.check_shape()?;
        fs::create_dir_all(dir)?;

        let mut grid = csv::Writer::from_path(dir.join(GRID_FILE))?;
        grid.write_record(self.header("value"))?;
        for (k, v) in self.values.iter().enumerate() {
            let mut row = self.coordinate_fields(k);
            row.push(v.map(format_f64).unwrap_or_default());
            grid.write_record(&row)?;
        }
        grid.flush()?;

        let mut missing = csv::Writer::from_path(dir.join(MISSING_FILE))?;
        missing.write_record(self.header("reason"))?;
        for (k, v) in self.values.iter().enumerate() {
            if v.is_none() {
                let mut row = self.coordinate_fields(k);
                row.push(self.reasons.get(&k).cloned().unwrap_or_default());
                missing.write_record(&row)?;
            }
        }
        missing.flush()?;

        let manifest = Manifest {
            metadata: self.metadata.clone(),
            g1_axis: self.g1_axis.clone(),
            g2_axis: self.g2_axis.clone(),
            t_axis: self.t_axis.clone(),
            cells: self.values.len(),
            missing: self.reasons.clone(),
        };
        fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(())
    }

    /// Reads a grid written by [`PhaseGrid::write_dir`].
    pub fn read_dir(dir: &Path) -> Result<Self> {
        let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
        let mut grid = PhaseGrid {
            g1_axis: manifest.g1_axis,
            g2_axis: manifest.g2_axis,
            t_axis: manifest.t_axis,
            values: vec![None; manifest.cells],
            reasons: manifest.missing,
            metadata: manifest.metadata,
        };
        grid.check_shape()?;
        grid.values = grid.read_values(&dir.join(GRID_FILE))?;
        Ok(grid)
    }

    /// Values of an existing grid.csv whose coordinates match this grid
    /// exactly, row by row.
    pub fn read_values(&self, path: &Path) -> Result<Vec<Option<f64>>> {
        let mut reader = csv::Reader::from_path(path)?;
        let expected = self.header("value");
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if header != expected {
            return Err(Error::InvalidArgument(format!(
                "{}: header {header:?} does not match {expected:?}",
                path.display()
            )));
        }
        let mut values = Vec::with_capacity(self.values.len());
        for (k, record) in reader.records().enumerate() {
            let record = record?;
            let mismatch =
                || Error::InvalidArgument(format!("{}: row {} does not match the grid", path.display(), k + 1));
            if k >= self.values.len() || record.len() != expected.len() {
                return Err(mismatch());
            }
            let coords = self.coordinate_fields(k);
            let parsed: Vec<f64> = record
                .iter()
                .take(coords.len())
                .map(|s| s.parse::<f64>().map_err(|_| mismatch()))
                .collect::<Result<_>>()?;
            let wanted: Vec<f64> = coords.iter().map(|s| s.parse().unwrap()).collect();
            if parsed != wanted {
                return Err(mismatch());
            }
            let field = &record[coords.len()];
            values.push(if field.is_empty() {
                None
            } else {
                Some(field.parse::<f64>().map_err(|_| mismatch())?)
            });
        }
        if values.len() != self.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                found: values.len(),
            });
        }
        Ok(values)
    }
}
