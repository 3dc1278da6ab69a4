//! Static SVG drawings of tables and orbits on a fixed 1000 × 1000 canvas.

use std::fmt::Write;

use crate::curve::{BilliardTable, Vec2};

const CANVAS: f64 = 1000.0;
const MARGIN: f64 = 0.06;
const OUTLINE_SAMPLES: usize = 2000;

/// One table with an optional orbit, drawn side by side with the others.
pub struct Panel<'a> {
    pub table: &'a BilliardTable,
    /// Orbit vertices in table coordinates.
    pub orbit: Option<Vec<Vec2>>,
}

/// Draws the panels left to right, each scaled to fit its column. Block
/// joints are marked with dots and orbits are closed polylines.
pub fn render_svg(panels: &[Panel]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    );
    let _ = writeln!(out, r#"<rect width="{CANVAS}" height="{CANVAS}" fill="white"/>"#);
    let columns = panels.len().max(1) as f64;
    let width = CANVAS / columns;
    for (i, panel) in panels.iter().enumerate() {
        let t = panel.table;
        let l = t.length();
        let outline: Vec<Vec2> = (0..OUTLINE_SAMPLES).map(|k| t.point(l * k as f64 / OUTLINE_SAMPLES as f64)).collect();
        let (lo, hi) = bounds(&outline);
        let span = (hi - lo).max();
        let scale = (1.0 - 2.0 * MARGIN) * width.min(CANVAS) / span;
        let center = 0.5 * (lo + hi);
        let origin = Vec2::new(width * (i as f64 + 0.5), 0.5 * CANVAS);
        // flip y so the table keeps its orientation on screen
        let map = |p: Vec2| Vec2::new(origin.x + scale * (p.x - center.x), origin.y - scale * (p.y - center.y));

        let _ = writeln!(out, r#"<g id="panel{}">"#, i + 1);
        let _ = writeln!(out, r##"<polygon points="{}" fill="none" stroke="#1f3a93" stroke-width="2"/>"##, points(outline.iter().map(|&p| map(p))));
        if let Some(orbit) = &panel.orbit {
            let _ = writeln!(
                out,
                r##"<polygon points="{}" fill="none" stroke="#c0392b" stroke-width="1"/>"##,
                points(orbit.iter().map(|&p| map(p)))
            );
        }
        for &j in t.joints() {
            let q = map(t.point(j));
            let _ = writeln!(out, r##"<circle cx="{:.3}" cy="{:.3}" r="5" fill="#27ae60"/>"##, q.x, q.y);
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

fn bounds(pts: &[Vec2]) -> (Vec2, Vec2) {
    let mut lo = Vec2::repeat(f64::INFINITY);
    let mut hi = Vec2::repeat(f64::NEG_INFINITY);
    for p in pts {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

fn points(it: impl Iterator<Item = Vec2>) -> String {
    it.map(|p| format!("{:.3},{:.3}", p.x, p.y)).collect::<Vec<_>>().join(" ")
}
