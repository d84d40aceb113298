//! Self-contained SVG heatmaps of a [`PhaseGrid`].
//!
//! Colours run linearly through three stops: blue `#2c7bb6` at the bottom of
//! the value range, pale yellow `#ffffbf` at the midpoint and red `#d7191c`
//! at the top. Missing cells are hatched.

use std::fmt::Write;

use super::grid::PhaseGrid;
use crate::error::{Error, Result};

pub const COLOR_STOPS: [(f64, [u8; 3]); 3] = [
    (0.0, [0x2c, 0x7b, 0xb6]),
    (0.5, [0xff, 0xff, 0xbf]),
    (1.0, [0xd7, 0x19, 0x1c]),
];

const PLOT_SIZE: f64 = 400.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 40.0;
const BAR_GAP: f64 = 20.0;
const BAR_WIDTH: f64 = 20.0;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct HeatmapStyle {
    pub title: Option<String>,
    /// Colour-scale limits; the range of present values when `None`.
    pub value_range: Option<(f64, f64)>,
    /// Temperature slice of thermal grids.
    pub t_index: usize,
}

/// Colour of a position u ∈ [0, 1] on the scale (clamped).
pub fn color_at(u: f64) -> [u8; 3] {
    let u = u.clamp(0.0, 1.0);
    let (lo, hi) = if u <= COLOR_STOPS[1].0 {
        (COLOR_STOPS[0], COLOR_STOPS[1])
    } else {
        (COLOR_STOPS[1], COLOR_STOPS[2])
    };
    let s = (u - lo.0) / (hi.0 - lo.0);
    std::array::from_fn(|i| {
        let (a, b) = (lo.1[i] as f64, hi.1[i] as f64);
        (a + (b - a) * s).round() as u8
    })
}

pub fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn label(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn render_heatmap(grid: &PhaseGrid, style: &HeatmapStyle) -> Result<String> {
    let (n1, n2) = (grid.g1_axis.len(), grid.g2_axis.len());
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if style.t_index >= grid.t_len() {
        return Err(Error::InvalidArgument(format!(
            "temperature index {} out of range ({} temperatures)",
            style.t_index,
            grid.t_len()
        )));
    }
    let slice: Vec<Option<f64>> = (0..n1)
        .flat_map(|i1| (0..n2).map(move |i2| (i1, i2)))
        .map(|(i1, i2)| grid.get(i1, i2, style.t_index))
        .collect();
    let present = slice.iter().flatten();
    let (lo, hi) = match style.value_range {
        Some(r) => r,
        None => present
            .fold(None, |acc: Option<(f64, f64)>, &v| {
                Some(acc.map_or((v, v), |(a, b)| (a.min(v), b.max(v))))
            })
            .ok_or_else(|| Error::InvalidArgument("every cell of the grid is missing".into()))?,
    };
    if slice.iter().all(Option::is_none) {
        return Err(Error::InvalidArgument("every cell of the grid is missing".into()));
    }
    let scale = |v: f64| if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };

    let (cw, ch) = (PLOT_SIZE / n1 as f64, PLOT_SIZE / n2 as f64);
    let bar_x = LEFT + PLOT_SIZE + BAR_GAP;
    let width = bar_x + BAR_WIDTH + 70.0;
    let height = TOP + PLOT_SIZE + 50.0;

    let mut s = String::new();
    let w = &mut s;
    // writing into a String cannot fail
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, "<defs>");
    let _ = writeln!(
        w,
        r##"<pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)"><rect width="6" height="6" fill="#ffffff"/><line x1="0" y1="0" x2="0" y2="6" stroke="#555555" stroke-width="2"/></pattern>"##
    );
    let _ = writeln!(w, r#"<linearGradient id="scale" x1="0" y1="1" x2="0" y2="0">"#);
    for (u, c) in COLOR_STOPS {
        let _ = writeln!(w, r#"<stop offset="{u}" stop-color="{}"/>"#, hex(c));
    }
    let _ = writeln!(w, "</linearGradient>");
    let _ = writeln!(w, "</defs>");
    let _ = writeln!(w, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    if let Some(title) = &style.title {
        let _ = writeln!(
            w,
            r#"<text x="{:.3}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            LEFT + PLOT_SIZE / 2.0,
            escape(title)
        );
    }
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            let x = LEFT + i1 as f64 * cw;
            let y = TOP + (n2 - 1 - i2) as f64 * ch;
            let (class, fill) = match slice[i1 * n2 + i2] {
                Some(v) => ("cell", hex(color_at(scale(v)))),
                None => ("missing", "url(#hatch)".to_string()),
            };
            let _ = writeln!(
                w,
                r#"<rect class="{class}" x="{x:.3}" y="{y:.3}" width="{cw:.3}" height="{ch:.3}" fill="{fill}"/>"#
            );
        }
    }
    let _ = writeln!(
        w,
        r##"<rect x="{LEFT:.3}" y="{TOP:.3}" width="{PLOT_SIZE:.3}" height="{PLOT_SIZE:.3}" fill="none" stroke="#000000"/>"##
    );

    let bottom = TOP + PLOT_SIZE;
    let ticks = [
        (LEFT, grid.g1_axis[0], "start"),
        (LEFT + PLOT_SIZE, grid.g1_axis[n1 - 1], "end"),
    ];
    for (x, v, anchor) in ticks {
        let _ = writeln!(
            w,
            r#"<text x="{x:.3}" y="{:.3}" text-anchor="{anchor}">{}</text>"#,
            bottom + 16.0,
            label(v)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">g1</text>"#,
        LEFT + PLOT_SIZE / 2.0,
        bottom + 36.0
    );
    for (y, v) in [(bottom, grid.g2_axis[0]), (TOP + 10.0, grid.g2_axis[n2 - 1])] {
        let _ = writeln!(
            w,
            r#"<text x="{:.3}" y="{y:.3}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            label(v)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle" transform="rotate(-90 {:.3} {:.3})">g2</text>"#,
        LEFT - 40.0,
        TOP + PLOT_SIZE / 2.0,
        LEFT - 40.0,
        TOP + PLOT_SIZE / 2.0
    );

    let _ = writeln!(
        w,
        r##"<rect class="colorbar" x="{bar_x:.3}" y="{TOP:.3}" width="{BAR_WIDTH:.3}" height="{PLOT_SIZE:.3}" fill="url(#scale)" stroke="#000000"/>"##
    );
    for (y, v) in [(TOP + 10.0, hi), (bottom, lo)] {
        let _ = writeln!(
            w,
            r#"<text class="colorbar-label" x="{:.3}" y="{y:.3}">{}</text>"#,
            bar_x + BAR_WIDTH + 4.0,
            label(v)
        );
    }
    if let Some(t) = &grid.t_axis {
        let _ = writeln!(
            w,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="end">T = {}</text>"#,
            LEFT + PLOT_SIZE,
            TOP - 6.0,
            label(t[style.t_index])
        );
    }
    let _ = writeln!(w, "</svg>");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
