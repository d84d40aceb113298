//! Parameter sweeps over (g1, g2) and temperature grids, cutoff convergence
//! scans, CSV/JSON persistence and SVG heatmaps.

pub mod config;
pub mod grid;
pub mod heatmap;
pub mod scan;

pub use config::{Axis, Observable, RunConfig, StateSelector};
pub use grid::{GridMetadata, PhaseGrid};
pub use heatmap::{render_heatmap, HeatmapStyle};
pub use scan::{convergence_scan, run_profile, run_quench, run_scan, ConvergenceReport, ScanOptions, ScanOutcome};
