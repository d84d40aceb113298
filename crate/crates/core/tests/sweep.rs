use std::fs;
use std::path::Path;
use std::time::Instant;

use dicke_core::sweep::heatmap::{color_at, hex};
use dicke_core::sweep::{
    convergence_scan, render_heatmap, run_scan, Axis, HeatmapStyle, Observable, PhaseGrid, RunConfig, ScanOptions,
    StateSelector,
};
use dicke_core::DickeSystem;

fn config(dir: &Path, observable: Observable, g1: &str, g2: &str) -> RunConfig {
    RunConfig {
        observable,
        n_atoms: 4,
        n_max: 10,
        g1: g1.parse().unwrap(),
        g2: g2.parse().unwrap(),
        out: dir.to_path_buf(),
        workers: 2,
        ..RunConfig::default()
    }
}

#[test]
fn small_grid_is_fast_and_correct() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(dir.path(), Observable::GsEnergyDensity, "0:1:2", "0:1:2");
    let start = Instant::now();
    let outcome = run_scan(&c, ScanOptions::default()).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert_eq!((outcome.computed, outcome.skipped), (4, 0));
    assert!(outcome.is_complete());
    for k in 0..4 {
        let (g1, g2, t) = outcome.grid.coordinates(k);
        assert_eq!(t, None);
        let e = DickeSystem::new(c.params(g1, g2)).unwrap().ground_energy().unwrap() / 4.0;
        assert_eq!(outcome.grid.values[k], Some(e));
    }
    // decoupled ground state: all atoms down, no photons
    assert_eq!(outcome.grid.values[0], Some(-0.5));
    let csv = fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert!(csv.starts_with("g1,g2,value\n0.0,0.0,-0.5\n"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn output_is_bit_identical_across_runs_and_worker_counts() {
    let outputs: Vec<(String, String)> = [1, 3, 1]
        .into_iter()
        .map(|workers| {
            let dir = tempfile::tempdir().unwrap();
            let mut c = config(dir.path(), Observable::PrStateK, "0.2:1.4:3", "0:1.5:4");
            c.state = StateSelector::Middle;
            c.workers = workers;
            run_scan(&c, ScanOptions::default()).unwrap();
            let read = |f: &str| fs::read_to_string(dir.path().join(f)).unwrap();
            (read("grid.csv"), read("missing.csv"))
        })
        .collect();
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn resume_reuses_complete_points_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(dir.path(), Observable::PhotonDensity, "0:1:2", "0:1:3");
    let first = run_scan(&c, ScanOptions::default()).unwrap();
    let grid_csv = fs::read_to_string(dir.path().join("grid.csv")).unwrap();

    let resumed = run_scan(&c, ScanOptions { resume: true }).unwrap();
    assert_eq!((resumed.computed, resumed.skipped), (0, 6));
    assert_eq!(resumed.grid.values, first.grid.values);

    // blank two cells: only those points are recomputed
    let mut lines: Vec<String> = grid_csv.lines().map(str::to_string).collect();
    for row in [2, 5] {
        let cut = lines[row].rfind(',').unwrap();
        lines[row].truncate(cut + 1);
    }
    fs::write(dir.path().join("grid.csv"), lines.join("\n") + "\n").unwrap();
    let patched = run_scan(&c, ScanOptions { resume: true }).unwrap();
    assert_eq!((patched.computed, patched.skipped), (2, 4));
    assert_eq!(fs::read_to_string(dir.path().join("grid.csv")).unwrap(), grid_csv);

    let read = PhaseGrid::read_dir(dir.path()).unwrap();
    assert_eq!(read, patched.grid);
    assert_eq!(read.metadata.config, c);
    assert_eq!(read.metadata.n_max, 10);

    // a resume against a different grid is refused
    let other = config(dir.path(), Observable::PhotonDensity, "0:1:3", "0:1:3");
    assert!(run_scan(&other, ScanOptions { resume: true }).is_err());
}

#[test]
fn failed_cells_are_recorded_as_missing() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path(), Observable::PrStateK, "0:1:2", "0.5");
    // N_D = 55 at N = 4, n_max = 10
    c.state = StateSelector::Index(55);
    let outcome = run_scan(&c, ScanOptions::default()).unwrap();
    assert_eq!(outcome.grid.missing_count(), 2);
    assert!(outcome.grid.reasons[&0].contains("out of range"));
    let missing = fs::read_to_string(dir.path().join("missing.csv")).unwrap();
    assert_eq!(missing.lines().count(), 3);
    assert!(missing.starts_with("g1,g2,reason\n"));
    let grid = fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert!(grid.lines().skip(1).all(|l| l.ends_with(',')));
}

#[test]
fn thermal_grid_has_a_temperature_column() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path(), Observable::MiGrid, "0.5", "0:1:2");
    c.n_max = 6;
    c.temps = Some("0:1:3".parse().unwrap());
    let outcome = run_scan(&c, ScanOptions::default()).unwrap();
    assert_eq!(outcome.grid.len(), 6);
    assert_eq!(outcome.grid.coordinates(4), (0.5, 1.0, Some(0.5)));
    let csv = fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert!(csv.starts_with("g1,g2,T,value\n"));
    assert!(outcome
        .grid
        .values
        .iter()
        .all(|v| v.is_some_and(|x| (0.0..=2.0 * std::f64::consts::LN_2).contains(&x))));
}

fn two_by_two(dir: &Path, values: [Option<f64>; 4]) -> PhaseGrid {
    let c = config(dir, Observable::IprGs, "0:1:2", "0:1:2");
    let mut grid = PhaseGrid::empty(&c, false);
    grid.values = values.to_vec();
    grid
}

/// Fill colours of the `cell` rects in document order.
fn cell_fills(svg: &str) -> Vec<String> {
    svg.lines()
        .filter(|l| l.contains(r#"class="cell""#))
        .map(|l| {
            let start = l.find("fill=\"").unwrap() + 6;
            l[start..start + 7].to_string()
        })
        .collect()
}

/// Linear interpolation between the three colour stops, written out
/// independently of the renderer.
fn expected_color(u: f64) -> String {
    let stops = [
        (0.0, [44.0, 123.0, 182.0]),
        (0.5, [255.0, 255.0, 191.0]),
        (1.0, [215.0, 25.0, 28.0]),
    ];
    let (a, b) = if u <= 0.5 {
        (stops[0], stops[1])
    } else {
        (stops[1], stops[2])
    };
    let s = (u - a.0) / (b.0 - a.0);
    let c: Vec<u8> = (0..3).map(|i| (a.1[i] + (b.1[i] - a.1[i]) * s).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

#[test]
fn heatmap_colours_follow_the_scale() {
    let dir = tempfile::tempdir().unwrap();
    let grid = two_by_two(dir.path(), [Some(0.0), Some(1.0 / 3.0), Some(2.0 / 3.0), Some(1.0)]);
    let svg = render_heatmap(&grid, &HeatmapStyle::default()).unwrap();
    let expected: Vec<String> = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]
        .iter()
        .map(|&u| expected_color(u))
        .collect();
    assert_eq!(cell_fills(&svg), expected);
    assert_eq!(expected[0], "#2c7bb6");
    assert_eq!(expected[3], "#d7191c");
    assert!(svg.contains(r#"class="colorbar""#));
    assert!(svg.contains(">g1<") && svg.contains(">g2<"));
    assert_eq!(svg, render_heatmap(&grid, &HeatmapStyle::default()).unwrap());
    for u in [0.1, 0.25, 0.49, 0.5, 0.51, 0.9] {
        assert_eq!(hex(color_at(u)), expected_color(u));
    }
}

#[test]
fn heatmap_hatches_missing_cells_and_rejects_empty_grids() {
    let dir = tempfile::tempdir().unwrap();
    let grid = two_by_two(dir.path(), [Some(0.2), None, Some(0.4), Some(0.9)]);
    let svg = render_heatmap(&grid, &HeatmapStyle::default()).unwrap();
    assert_eq!(svg.matches(r#"class="missing""#).count(), 1);
    assert!(svg.contains(r#"fill="url(#hatch)""#));
    assert_eq!(cell_fills(&svg).len(), 3);

    let empty = two_by_two(dir.path(), [None; 4]);
    assert!(render_heatmap(&empty, &HeatmapStyle::default()).is_err());
    let style = HeatmapStyle {
        value_range: Some((0.0, 1.0)),
        ..HeatmapStyle::default()
    };
    assert!(render_heatmap(&empty, &style).is_err());
}

#[test]
fn normal_phase_ground_state_is_cutoff_converged() {
    let dir = tempfile::tempdir().unwrap();
    let c = RunConfig {
        g1: Axis::point(0.2),
        g2: Axis::point(0.2),
        ..config(dir.path(), Observable::GsEnergyDensity, "0", "0")
    };
    let (report, grids) = convergence_scan(&c, &[20, 40], ScanOptions::default()).unwrap();
    assert_eq!(grids.len(), 2);
    assert!(report.max_differences[0].unwrap() < 1e-10);
    assert!(!report.non_convergent);
    assert!(dir.path().join("nmax_20/grid.csv").exists());
    assert!(dir.path().join("convergence.json").exists());
    assert!(convergence_scan(&c, &[20], ScanOptions::default()).is_err());
}

#[test]
fn invalid_configurations_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = [
        RunConfig {
            n_atoms: 3,
            ..config(dir.path(), Observable::IprGs, "0", "0")
        },
        RunConfig {
            n_atoms: 14,
            ..config(dir.path(), Observable::MiGrid, "0", "0")
        },
        RunConfig {
            temps: Some("0:1:5".parse().unwrap()),
            ..config(dir.path(), Observable::TcCurve, "0", "0")
        },
        RunConfig {
            times: vec![],
            ..config(dir.path(), Observable::QuenchPr, "0", "0")
        },
        config(dir.path(), Observable::VneeProfile, "0", "0"),
    ];
    for c in bad {
        assert!(run_scan(&c, ScanOptions::default()).is_err(), "{:?}", c.observable);
    }
    assert!("2:1:3"
        .parse::<Axis>()
        .map(|a| a.validate("g1"))
        .map_or(true, |r| r.is_err()));
    assert!(RunConfig::from_json_str(r#"{"observable":"ipr_gs","bogus":1}"#).is_err());
}
