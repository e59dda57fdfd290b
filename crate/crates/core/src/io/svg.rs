//! Static SVG charts: six-panel sweep summaries and grid snapshots.
//!
//! Every plotted point carries its exact data coordinates in `data-x` /
//! `data-y` attributes, and every panel records its data range and plot
//! rectangle, so the drawing can be checked against the source numbers.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::io::csv::SweepRow;
use crate::metrics;
use crate::population::{Color, Configuration, FriendshipGraph};
use crate::utility::UtilityParams;

/// Panels in reading order: top row left to right, then the bottom row.
pub const PANELS: [(&str, &str); 6] = [
    ("iterations", "Iterations"),
    ("moran", "Moran's I"),
    ("fsi", "Freeman segregation index"),
    ("movers", "Agents who moved"),
    ("avg_welfare", "Average welfare"),
    ("total_welfare", "Total welfare"),
];

const PANEL_W: f64 = 300.0;
const PANEL_H: f64 = 240.0;
const MARGIN_L: f64 = 52.0;
const MARGIN_R: f64 = 14.0;
const MARGIN_T: f64 = 28.0;
const MARGIN_B: f64 = 36.0;
const TITLE_H: f64 = 36.0;

const RED: &str = "#c0392b";
const BLUE: &str = "#2e6eb5";
const LINE: &str = "#222222";

/// Escape text for use in element content and attribute values.
pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Maps data coordinates to pixels inside one panel.
#[derive(Debug, Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)
    }

    fn py(&self, y: f64) -> f64 {
        self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)
    }
}

/// Pad a possibly degenerate range so it has positive width.
fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        (lo - pad, hi + pad)
    }
}

fn points_attr(pts: &[(f64, f64)]) -> String {
    pts.iter()
        .map(|(x, y)| format!("{x:.3},{y:.3}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn tick_label(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn column(rows: &[SweepRow], field: &str) -> (Vec<f64>, Vec<f64>) {
    rows.iter()
        .map(|r| {
            (
                r.mean_of(field).unwrap_or(f64::NAN),
                r.sd_of(field).unwrap_or(f64::NAN),
            )
        })
        .unzip()
}

/// Render a sweep summary as a 2×3 panel figure. Means are drawn as bold
/// polylines with markers, standard deviations as a shaded band; the total
/// welfare panel also stacks the color and friendship parts.
pub fn render_sweep_chart(rows: &[SweepRow], title: &str, axis_label: &str) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::config(
            "sweep table has no data rows; nothing to plot",
        ));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.sweep_value).collect();
    let (x0, x1) = {
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            (lo, hi)
        } else {
            padded(lo, hi)
        }
    };

    let width = 3.0 * PANEL_W;
    let height = TITLE_H + 2.0 * PANEL_H;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text class="title" x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        width / 2.0,
        escape(title)
    )
    .unwrap();

    for (i, (field, label)) in PANELS.iter().enumerate() {
        let ox = (i % 3) as f64 * PANEL_W;
        let oy = TITLE_H + (i / 3) as f64 * PANEL_H;
        let (mean, sd) = column(rows, field);
        let stacked = *field == "total_welfare";
        let (color_part, _) = column(rows, "welfare_color_part");
        let (friend_part, _) = column(rows, "welfare_friend_part");

        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (m, s) in mean.iter().zip(&sd) {
            lo = lo.min(m - s);
            hi = hi.max(m + s);
        }
        if stacked {
            lo = lo.min(0.0);
            for (c, f) in color_part.iter().zip(&friend_part) {
                hi = hi.max(c + f);
            }
        }
        let (y0, y1) = padded(lo, hi);
        let frame = Frame {
            x0,
            x1,
            y0,
            y1,
            left: ox + MARGIN_L,
            right: ox + PANEL_W - MARGIN_R,
            top: oy + MARGIN_T,
            bottom: oy + PANEL_H - MARGIN_B,
        };

        writeln!(
            svg,
            r#"<g class="panel" data-field="{field}" data-x-min="{x0}" data-x-max="{x1}" data-y-min="{y0}" data-y-max="{y1}" data-left="{}" data-right="{}" data-top="{}" data-bottom="{}">"#,
            frame.left, frame.right, frame.top, frame.bottom
        )
        .unwrap();
        writeln!(
            svg,
            r##"<rect class="frame" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#999"/>"##,
            frame.left,
            frame.top,
            frame.right - frame.left,
            frame.bottom - frame.top
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text class="panel-title" x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#,
            (frame.left + frame.right) / 2.0,
            oy + 18.0,
            escape(label)
        )
        .unwrap();
        for (v, anchor_y) in [(y0, frame.bottom), (y1, frame.top)] {
            writeln!(
                svg,
                r#"<text class="tick" x="{}" y="{}" text-anchor="end">{}</text>"#,
                frame.left - 4.0,
                anchor_y + 4.0,
                tick_label(v)
            )
            .unwrap();
        }
        for (v, anchor) in [(x0, "start"), (x1, "end")] {
            writeln!(
                svg,
                r#"<text class="tick" x="{}" y="{}" text-anchor="{anchor}">{}</text>"#,
                frame.px(v),
                frame.bottom + 14.0,
                tick_label(v)
            )
            .unwrap();
        }
        writeln!(
            svg,
            r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (frame.left + frame.right) / 2.0,
            frame.bottom + 28.0,
            escape(axis_label)
        )
        .unwrap();

        if stacked {
            let base: Vec<(f64, f64)> = xs.iter().map(|&x| (frame.px(x), frame.py(0.0))).collect();
            let color_top: Vec<(f64, f64)> = xs
                .iter()
                .zip(&color_part)
                .map(|(&x, &c)| (frame.px(x), frame.py(c)))
                .collect();
            let friend_top: Vec<(f64, f64)> = xs
                .iter()
                .zip(color_part.iter().zip(&friend_part))
                .map(|(&x, (&c, &f))| (frame.px(x), frame.py(c + f)))
                .collect();
            for (class, upper, lower, fill) in [
                ("stack-color", &color_top, &base, "#d9d9d9"),
                ("stack-friend", &friend_top, &color_top, "#8c8c8c"),
            ] {
                let mut ring = upper.clone();
                ring.extend(lower.iter().rev());
                writeln!(
                    svg,
                    r#"<polygon class="{class}" points="{}" fill="{fill}" stroke="none"/>"#,
                    points_attr(&ring)
                )
                .unwrap();
            }
        }

        let upper: Vec<(f64, f64)> = xs
            .iter()
            .zip(mean.iter().zip(&sd))
            .map(|(&x, (&m, &s))| (frame.px(x), frame.py(m + s)))
            .collect();
        let lower: Vec<(f64, f64)> = xs
            .iter()
            .zip(mean.iter().zip(&sd))
            .map(|(&x, (&m, &s))| (frame.px(x), frame.py(m - s)))
            .collect();
        let mut band = upper;
        band.extend(lower.iter().rev());
        writeln!(
            svg,
            r#"<polygon class="sd-band" points="{}" fill="{BLUE}" fill-opacity="0.2" stroke="none"/>"#,
            points_attr(&band)
        )
        .unwrap();

        let line: Vec<(f64, f64)> = xs
            .iter()
            .zip(&mean)
            .map(|(&x, &m)| (frame.px(x), frame.py(m)))
            .collect();
        writeln!(
            svg,
            r#"<polyline class="mean" points="{}" fill="none" stroke="{LINE}" stroke-width="2.5"/>"#,
            points_attr(&line)
        )
        .unwrap();
        for ((&x, (&m, &s)), (px, py)) in xs.iter().zip(mean.iter().zip(&sd)).zip(&line) {
            writeln!(
                svg,
                r#"<circle class="point" cx="{px:.3}" cy="{py:.3}" r="2.5" fill="{LINE}" data-x="{x}" data-y="{m}" data-sd="{s}"/>"#
            )
            .unwrap();
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

const CELL: f64 = 40.0;
const PAD: f64 = 20.0;
const CAPTION_H: f64 = 30.0;

/// Draw the torus as an `n×n` lattice with colored, labelled agents and the
/// friendship edges between their cells. With `params` the caption also
/// reports total welfare.
pub fn render_grid_snapshot(
    config: &Configuration,
    graph: &FriendshipGraph,
    params: Option<&UtilityParams>,
) -> String {
    let grid = config.grid();
    let n = grid.side() as f64;
    let size = 2.0 * PAD + n * CELL;
    let height = size + CAPTION_H;
    let center = |cell| {
        let r = grid.row(cell) as f64 - 1.0;
        let c = grid.col(cell) as f64 - 1.0;
        (PAD + (c + 0.5) * CELL, PAD + (r + 0.5) * CELL)
    };

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{height}" viewBox="0 0 {size} {height}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<rect width="{size}" height="{height}" fill="white"/>"#
    )
    .unwrap();
    svg.push_str("<g class=\"lattice\">\n");
    for cell in grid.cells() {
        let (cx, cy) = center(cell);
        let (class, fill) = match config.occupant(cell).map(|a| config.color(a)) {
            Some(Color::Red) => ("cell red", RED),
            Some(Color::Blue) => ("cell blue", BLUE),
            None => ("cell empty", "white"),
        };
        writeln!(
            svg,
            r##"<rect class="{class}" data-cell="{}" x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#555"/>"##,
            cell.id(),
            cx - CELL / 2.0,
            cy - CELL / 2.0
        )
        .unwrap();
    }
    svg.push_str("</g>\n<g class=\"friendships\">\n");
    for (a, b) in graph.edges() {
        if a.index() >= config.num_agents() || b.index() >= config.num_agents() {
            continue;
        }
        let (x1, y1) = center(config.cell_of(a));
        let (x2, y2) = center(config.cell_of(b));
        writeln!(
            svg,
            r#"<line class="friendship" data-a="{a}" data-b="{b}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="black" stroke-opacity="0.45" stroke-width="1"/>"#
        )
        .unwrap();
    }
    svg.push_str("</g>\n<g class=\"labels\">\n");
    for agent in config.agents() {
        let (cx, cy) = center(config.cell_of(agent.id));
        writeln!(
            svg,
            r#"<text class="label" x="{cx}" y="{}" text-anchor="middle" fill="white">{}</text>"#,
            cy + 4.0,
            agent.id
        )
        .unwrap();
    }
    svg.push_str("</g>\n");
    writeln!(
        svg,
        r#"<text class="caption" x="{PAD}" y="{}">{}</text>"#,
        size + 12.0,
        escape(&snapshot_caption(config, graph, params))
    )
    .unwrap();
    svg.push_str("</svg>\n");
    svg
}

fn snapshot_caption(
    config: &Configuration,
    graph: &FriendshipGraph,
    params: Option<&UtilityParams>,
) -> String {
    let fsi = match metrics::freeman_index(config) {
        Ok(f) if !f.degenerate => format!("FSI = {:.3}", f.value),
        _ => "FSI = n/a".to_string(),
    };
    match params {
        Some(p) if graph.num_agents() == config.num_agents() => {
            let w = metrics::welfare(config, graph, p);
            format!("{fsi}, total welfare = {:.2}", w.total)
        }
        _ => fsi,
    }
}
