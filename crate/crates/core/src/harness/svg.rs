//! Static SVG drawings of planar instances and wake-up trees.
//!
//! Tree edges are drawn as axis-aligned L-shaped polylines (horizontal leg
//! first), which is one of the shortest L1 paths between the endpoints.
//! Edges of length zero are not drawn.

use std::fmt::Write as _;
use std::path::Path;

use crate::model::{FtpInstance, WakeupTree};
use crate::reduction::GroupMap;

use super::HarnessError;

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 40.0;
const LEGEND_WIDTH: f64 = 120.0;

const GROUP_COLORS: [(&str, &str); 6] = [
    ("R", "#222222"),
    ("A", "#1f77b4"),
    ("A'", "#17becf"),
    ("B", "#d62728"),
    ("B'", "#ff9896"),
    ("C", "#2ca02c"),
];
const DEFAULT_COLOR: &str = "#555555";

fn color_of(group: Option<&str>) -> &'static str {
    group
        .and_then(|g| GROUP_COLORS.iter().find(|(name, _)| *name == g))
        .map_or(DEFAULT_COLOR, |(_, c)| c)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the robots, the optional tree and a legend into an SVG document.
pub fn render_svg(
    inst: &FtpInstance,
    tree: Option<&WakeupTree>,
    groups: Option<&GroupMap>,
) -> Result<String, HarnessError> {
    if !inst.is_planar() {
        return Err(HarnessError::NotPlanar);
    }
    if let Some(tree) = tree {
        crate::model::validate_tree(tree, inst, None).map_err(HarnessError::InvalidTree)?;
    }
    let pts: Vec<(f64, f64)> = inst.robots().iter().map(|p| (p.x.to_f64(), p.y.to_f64())).collect();
    // the origin is always in frame so the axes are visible
    let xs = pts.iter().map(|p| p.0).chain([0.0]);
    let ys = pts.iter().map(|p| p.1).chain([0.0]);
    let (min_x, max_x) = xs.fold((f64::MAX, f64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let (min_y, max_y) = ys.fold((f64::MAX, f64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let span = (max_x - min_x).max(max_y - min_y).max(1.0);
    let scale = (CANVAS - 2.0 * MARGIN) / span;
    let width = (max_x - min_x) * scale + 2.0 * MARGIN + LEGEND_WIDTH;
    let height = (max_y - min_y) * scale + 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - min_x) * scale;
    let sy = |y: f64| MARGIN + (max_y - y) * scale;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{width:.1}" height="{height:.1}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r##"<g class="axes" stroke="#bbbbbb" stroke-width="1"><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/></g>"##,
        sx(min_x),
        sy(0.0),
        sx(max_x),
        sy(0.0),
        sx(0.0),
        sy(min_y),
        sx(0.0),
        sy(max_y),
    );

    if let Some(tree) = tree {
        let _ = writeln!(
            out,
            r##"<g class="edges" fill="none" stroke="#888888" stroke-width="1.5">"##
        );
        for (p, c) in tree.edges() {
            let (a, b) = (pts[p], pts[c]);
            if a == b {
                continue;
            }
            let _ = writeln!(
                out,
                r#"<polyline class="edge" points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}"/>"#,
                sx(a.0),
                sy(a.1),
                sx(b.0),
                sy(a.1),
                sx(b.0),
                sy(b.1)
            );
        }
        let _ = writeln!(out, "</g>");
    }

    let _ = writeln!(out, r#"<g class="robots" font-family="sans-serif" font-size="10">"#);
    for (r, &(x, y)) in pts.iter().enumerate() {
        let group = groups.and_then(|g| g.group_of(r));
        let label = match group {
            Some(g) => format!("{g}{}", index_in_group(groups.expect("group implies map"), r) + 1),
            None => r.to_string(),
        };
        let fill = color_of(group);
        let source = if r == inst.source() { " source" } else { "" };
        let p = inst.robots()[r];
        let _ = writeln!(
            out,
            r#"<circle class="robot{source}" cx="{:.2}" cy="{:.2}" r="4" fill="{fill}"><title>{} {}</title></circle>"#,
            sx(x),
            sy(y),
            escape(&label),
            escape(&p.to_string())
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            sx(x) + 5.0,
            sy(y) - 5.0,
            escape(&label)
        );
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r#"<g class="legend" font-family="sans-serif" font-size="11">"#);
    let lx = width - LEGEND_WIDTH + 10.0;
    let entries: Vec<(&str, &str)> = match groups {
        Some(_) => GROUP_COLORS.to_vec(),
        None => vec![("robot", DEFAULT_COLOR)],
    };
    for (row, (name, color)) in entries.iter().enumerate() {
        let y = MARGIN + row as f64 * 16.0;
        let _ = writeln!(
            out,
            r#"<circle cx="{lx:.2}" cy="{y:.2}" r="4" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 8.0,
            y + 4.0,
            escape(name)
        );
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    Ok(out)
}

fn index_in_group(groups: &GroupMap, r: usize) -> usize {
    [
        &groups.roots,
        &groups.a,
        &groups.a_prime,
        &groups.b,
        &groups.b_prime,
        &groups.c,
    ]
    .iter()
    .find_map(|g| g.iter().position(|&x| x == r))
    .unwrap_or(0)
}

pub fn write_svg(
    path: &Path,
    inst: &FtpInstance,
    tree: Option<&WakeupTree>,
    groups: Option<&GroupMap>,
) -> Result<(), HarnessError> {
    let svg = render_svg(inst, tree, groups)?;
    std::fs::write(path, svg).map_err(|e| HarnessError::Io(path.display().to_string(), e))
}
