// SPDX-License-Identifier: Apache-2.0

//! SVG output: phase-diagram heatmaps, price trajectories and landscape
//! fits. Documents use a small SVG subset (`rect`, `line`, `polyline`,
//! `circle`, `text`, `pattern`) and depend only on their input.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::config::Axis;
use crate::ensemble::CellResult;
use crate::error::{Error, Result};
use crate::glmodel::{GLPolynomial, Landscape};
use crate::phase::{temperature_with, TemperatureDefinition};

/// Full speculative colour, `#2166ac`.
pub const BLUE: (u8, u8, u8) = (0x21, 0x66, 0xac);
/// Full fundamental colour, `#b2182b`.
pub const RED: (u8, u8, u8) = (0xb2, 0x18, 0x2b);
pub const WHITE: (u8, u8, u8) = (0xff, 0xff, 0xff);

/// Which sweep parameters go on the heatmap axes. The remaining parameters
/// split the sweep into panels, one document each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatmapSpec {
    pub x: Axis,
    pub y: Axis,
    /// Temperature used for the cell annotations.
    pub temperature: TemperatureDefinition,
}

impl Default for HeatmapSpec {
    fn default() -> Self {
        HeatmapSpec {
            x: Axis::N,
            y: Axis::M,
            temperature: TemperatureDefinition::default(),
        }
    }
}

impl HeatmapSpec {
    pub fn panel_axes(&self) -> Vec<Axis> {
        Axis::ALL.into_iter().filter(|&a| a != self.x && a != self.y).collect()
    }
}

/// One heatmap document.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapPanel {
    /// Values of the panel axes, in [`Axis::ALL`] order.
    pub panel: Vec<(Axis, f64)>,
    pub svg: String,
}

impl HeatmapPanel {
    /// File stem such as `heatmap_s2_lambda1_d100`.
    pub fn file_stem(&self) -> String {
        let mut stem = "heatmap".to_string();
        for (axis, v) in &self.panel {
            let _ = write!(stem, "_{}{}", axis.as_str(), v);
        }
        stem
    }
}

/// Fill colour of a cell: white towards blue by the speculative fraction or
/// white towards red by the fundamental fraction, whichever fraction is
/// larger (blue on ties). White when both are zero.
pub fn cell_color(f_spec: f64, f_fund: f64) -> (u8, u8, u8) {
    let (f, hue) = if f_spec >= f_fund { (f_spec, BLUE) } else { (f_fund, RED) };
    let f = f.clamp(0.0, 1.0);
    let mix = |w: u8, c: u8| (w as f64 + f * (c as f64 - w as f64)).round() as u8;
    (mix(WHITE.0, hue.0), mix(WHITE.1, hue.1), mix(WHITE.2, hue.2))
}

pub fn hex((r, g, b): (u8, u8, u8)) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| a.total_cmp(b).is_eq());
    v
}

fn label(v: f64) -> String {
    format!("{v}")
}

const CELL_W: usize = 90;
const CELL_H: usize = 50;
const LEFT: usize = 80;
const TOP: usize = 60;
const BOTTOM: usize = 60;
const RIGHT: usize = 20;

/// Renders one heatmap per combination of panel-axis values. Grid points
/// without a summary (failed or absent cells) are drawn hatched.
pub fn emit_heatmap(cells: &[CellResult], spec: &HeatmapSpec) -> Result<Vec<HeatmapPanel>> {
    if spec.x == spec.y {
        return Err(Error::parameter("heatmap", "x and y axes must differ"));
    }
    if cells.is_empty() {
        return Err(Error::parameter("heatmap", "no cells to draw"));
    }
    let panel_axes = spec.panel_axes();
    let key = |c: &CellResult| -> Vec<f64> { panel_axes.iter().map(|a| a.value(&c.config)).collect() };
    let mut panels: Vec<Vec<f64>> = cells.iter().map(key).collect();
    panels.sort_by(|a, b| {
        a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    panels.dedup();
    let xs = sorted_unique(cells.iter().map(|c| spec.x.value(&c.config)).collect());
    let ys = sorted_unique(cells.iter().map(|c| spec.y.value(&c.config)).collect());

    let mut out = Vec::new();
    for pk in panels {
        let width = LEFT + CELL_W * xs.len() + RIGHT;
        let height = TOP + CELL_H * ys.len() + BOTTOM;
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
        );
        svg.push_str(concat!(
            "<defs>\n",
            r#"<pattern id="hatch" width="8" height="8" patternUnits="userSpaceOnUse" patternTransform="rotate(45)">"#,
            r##"<rect width="8" height="8" fill="#ffffff"/><line x1="0" y1="0" x2="0" y2="8" stroke="#999999" stroke-width="2"/>"##,
            "</pattern>\n</defs>\n"
        ));
        let _ = writeln!(svg, r##"<rect width="{width}" height="{height}" fill="#ffffff"/>"##);
        let panel_desc: Vec<String> = panel_axes
            .iter()
            .zip(&pk)
            .map(|(a, v)| format!("{}={}", a.as_str(), label(*v)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<text x="{LEFT}" y="22" font-size="14">speculative (blue) / fundamental (red); {}</text>"#,
            escape(&panel_desc.join(", "))
        );
        for (yi, &yv) in ys.iter().enumerate() {
            // Largest y value on top.
            let row = ys.len() - 1 - yi;
            let y0 = TOP + row * CELL_H;
            for (xi, &xv) in xs.iter().enumerate() {
                let x0 = LEFT + xi * CELL_W;
                let cell = cells.iter().find(|c| {
                    key(c) == pk
                        && spec.x.value(&c.config).total_cmp(&xv).is_eq()
                        && spec.y.value(&c.config).total_cmp(&yv).is_eq()
                });
                match cell.and_then(|c| c.summary.as_ref().map(|s| (c, s))) {
                    Some((c, s)) => {
                        let fill = hex(cell_color(s.f_spec, s.f_fund));
                        let t = temperature_with(c.config.memory, c.config.n_agents, c.config.strategies, spec.temperature);
                        let _ = writeln!(
                            svg,
                            r##"<rect x="{x0}" y="{y0}" width="{CELL_W}" height="{CELL_H}" fill="{fill}" stroke="#333333"><title>f_spec={:.3} f_fund={:.3} f_undet={:.3} f_abort={:.3}</title></rect>"##,
                            s.f_spec, s.f_fund, s.f_undet, s.f_abort
                        );
                        let _ = writeln!(
                            svg,
                            r#"<text x="{}" y="{}" text-anchor="middle">T={:.3}</text>"#,
                            x0 + CELL_W / 2,
                            y0 + CELL_H / 2 + 4,
                            t.value()
                        );
                    }
                    None => {
                        let why = cell.and_then(|c| c.error.clone()).unwrap_or_else(|| "missing".into());
                        let _ = writeln!(
                            svg,
                            r##"<rect x="{x0}" y="{y0}" width="{CELL_W}" height="{CELL_H}" fill="url(#hatch)" stroke="#333333"><title>{}</title></rect>"##,
                            escape(&why)
                        );
                    }
                }
            }
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
                LEFT - 8,
                y0 + CELL_H / 2 + 4,
                escape(&label(yv))
            );
        }
        let base = TOP + ys.len() * CELL_H;
        for (xi, &xv) in xs.iter().enumerate() {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                LEFT + xi * CELL_W + CELL_W / 2,
                base + 18,
                escape(&label(xv))
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            LEFT + xs.len() * CELL_W / 2,
            base + 40,
            spec.x.as_str()
        );
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            TOP + ys.len() * CELL_H / 2,
            TOP + ys.len() * CELL_H / 2,
            spec.y.as_str()
        );
        svg.push_str("</svg>\n");
        out.push(HeatmapPanel {
            panel: panel_axes.iter().copied().zip(pk).collect(),
            svg,
        });
    }
    Ok(out)
}

/// Linear map from a data range onto a pixel range.
struct Scale {
    d0: f64,
    d1: f64,
    p0: f64,
    p1: f64,
}

impl Scale {
    fn new(d0: f64, d1: f64, p0: f64, p1: f64) -> Self {
        let (d0, d1) = if d1 > d0 { (d0, d1) } else { (d0 - 0.5, d0 + 0.5) };
        Scale { d0, d1, p0, p1 }
    }

    fn map(&self, x: f64) -> f64 {
        self.p0 + (x - self.d0) / (self.d1 - self.d0) * (self.p1 - self.p0)
    }
}

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 360.0;
const PAD: f64 = 60.0;

fn frame(svg: &mut String, title: &str, x_label: &str, y_label: &str, x: &Scale, y: &Scale) {
    let (w, h) = (PLOT_W + 2.0 * PAD, PLOT_H + 2.0 * PAD);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r##"<rect width="{w}" height="{h}" fill="#ffffff"/>"##);
    let _ = writeln!(
        svg,
        r##"<rect x="{PAD}" y="{PAD}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="#333333"/>"##
    );
    let _ = writeln!(svg, r#"<text x="{PAD}" y="{}" font-size="14">{}</text>"#, PAD - 20.0, escape(title));
    let bottom = PAD + PLOT_H;
    for (v, anchor, px) in [(x.d0, "start", PAD), (x.d1, "end", PAD + PLOT_W)] {
        let _ = writeln!(svg, r#"<text x="{px}" y="{}" text-anchor="{anchor}">{}</text>"#, bottom + 16.0, tick(v));
    }
    for (v, py) in [(y.d0, bottom), (y.d1, PAD)] {
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, PAD - 6.0, py + 4.0, tick(v));
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        PAD + PLOT_W / 2.0,
        bottom + 40.0,
        escape(x_label)
    );
    let cy = PAD + PLOT_H / 2.0;
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{cy}" text-anchor="middle" transform="rotate(-90 16 {cy})">{}</text>"#,
        escape(y_label)
    );
}

fn tick(v: f64) -> String {
    format!("{v:.3}")
}

fn polyline(svg: &mut String, pts: impl Iterator<Item = (f64, f64)>, color: &str) {
    let mut s = String::new();
    for (k, (x, y)) in pts.enumerate() {
        if k > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:.2},{y:.2}");
    }
    let _ = writeln!(svg, r#"<polyline points="{s}" fill="none" stroke="{color}" stroke-width="1.5"/>"#);
}

fn hline(svg: &mut String, y: f64, color: &str, dash: bool) {
    let dash = if dash { r#" stroke-dasharray="6 4""# } else { "" };
    let _ = writeln!(
        svg,
        r#"<line x1="{PAD}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="{color}"{dash}/>"#,
        PAD + PLOT_W
    );
}

/// Most points drawn per trajectory; longer series are thinned evenly.
pub const MAX_TRAJECTORY_POINTS: usize = 4000;

/// Log-price trajectory with the fundamental price and the ±50% band.
pub fn emit_trajectory(prices: &[f64], fundamental_price: f64, title: &str) -> String {
    let logs: Vec<f64> = prices.iter().map(|p| p.ln()).collect();
    let band = [(0.5 * fundamental_price).ln(), fundamental_price.ln(), (1.5 * fundamental_price).ln()];
    let lo = logs.iter().copied().chain(band).fold(f64::INFINITY, f64::min);
    let hi = logs.iter().copied().chain(band).fold(f64::NEG_INFINITY, f64::max);
    let steps = prices.len().saturating_sub(1) as f64;
    let x = Scale::new(0.0, steps.max(1.0), PAD, PAD + PLOT_W);
    let y = Scale::new(lo, hi, PAD + PLOT_H, PAD);
    let mut svg = String::new();
    frame(&mut svg, title, "t", "ln P", &x, &y);
    hline(&mut svg, y.map(band[0]), "#b2182b", true);
    hline(&mut svg, y.map(band[1]), "#b2182b", false);
    hline(&mut svg, y.map(band[2]), "#b2182b", true);
    let stride = logs.len().div_ceil(MAX_TRAJECTORY_POINTS).max(1);
    let pts = logs
        .iter()
        .enumerate()
        .filter(|(k, _)| k % stride == 0 || *k + 1 == logs.len())
        .map(|(k, &l)| (x.map(k as f64), y.map(l)));
    polyline(&mut svg, pts, "#2166ac");
    svg.push_str("</svg>\n");
    svg
}

/// Binned landscape as points and the fitted quartic as a curve.
pub fn emit_landscape(landscape: &Landscape, fit: Option<&GLPolynomial>, title: &str) -> String {
    let curve: Vec<(f64, f64)> = match fit {
        Some(p) => (0..=200)
            .map(|k| {
                let o = -1.0 + k as f64 / 100.0;
                (o, p.evaluate(o))
            })
            .collect(),
        None => Vec::new(),
    };
    let values = landscape.values.iter().copied().chain(curve.iter().map(|c| c.1));
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.fold(f64::NEG_INFINITY, f64::max);
    let x = Scale::new(-1.0, 1.0, PAD, PAD + PLOT_W);
    let y = Scale::new(lo, hi, PAD + PLOT_H, PAD);
    let mut svg = String::new();
    frame(&mut svg, title, "o", "-ln density", &x, &y);
    for (&c, &v) in landscape.centers.iter().zip(&landscape.values) {
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#333333"/>"##,
            x.map(c),
            y.map(v)
        );
    }
    if !curve.is_empty() {
        polyline(&mut svg, curve.iter().map(|&(o, v)| (x.map(o), y.map(v))), "#b2182b");
    }
    svg.push_str("</svg>\n");
    svg
}
