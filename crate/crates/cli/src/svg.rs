//! Static SVG rendering of planar realizations: one `<g>` layer per
//! configuration (plates as translucent triangles, edges as segments, knots
//! as circles) and knot labels placed at the first configuration.

use std::fmt::Write as _;

use snapkit::model::{Configuration, EdgeRole, Framework};

use crate::error::{CliError, CliResult};

const PALETTE: [&str; 8] = ["#2ca02c", "#d62728", "#17becf", "#1f77b4", "#e377c2", "#ff7f0e", "#9467bd", "#8c564b"];
const WIDTH: f64 = 640.0;
const MARGIN: f64 = 40.0;

/// A configuration to draw and its legend name.
pub struct Layer<'a> {
    pub name: String,
    pub cfg: &'a Configuration,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders `layers` (the first one is the base) into an SVG document.
pub fn render(fw: &Framework, layers: &[Layer<'_>]) -> CliResult<String> {
    if fw.dimension() != 2 {
        return Err(CliError::Usage("plotting supports planar frameworks only".into()));
    }
    if layers.is_empty() {
        return Err(CliError::Usage("nothing to plot".into()));
    }
    for layer in layers {
        if layer.cfg.dimension() != 2 || layer.cfg.knot_count() != fw.knot_count() {
            return Err(CliError::Usage(format!("layer {} does not match the framework", layer.name)));
        }
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for layer in layers {
        for p in layer.cfg.as_slice().chunks(2) {
            xmin = xmin.min(p[0]);
            xmax = xmax.max(p[0]);
            ymin = ymin.min(p[1]);
            ymax = ymax.max(p[1]);
        }
    }
    let span = (xmax - xmin).max(ymax - ymin).max(1e-12);
    let scale = (WIDTH - 2.0 * MARGIN) / span;
    let height = (ymax - ymin) * scale + 2.0 * MARGIN + 20.0 * layers.len() as f64;
    let px = |x: f64| MARGIN + (x - xmin) * scale;
    let py = |y: f64| MARGIN + (ymax - y) * scale;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (idx, layer) in layers.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<g class="configuration" id="layer-{idx}" data-name="{}" stroke="{color}" fill="{color}">"#,
            escape(&layer.name)
        );
        let k = |id: usize| layer.cfg.knot(id - 1);
        for plate in fw.plates() {
            let pts: Vec<String> = plate
                .knots
                .iter()
                .map(|&id| format!("{:.3},{:.3}", px(k(id)[0]), py(k(id)[1])))
                .collect();
            let _ = writeln!(
                out,
                r#"  <polygon class="plate" points="{}" fill-opacity="0.25" stroke-width="1"/>"#,
                pts.join(" ")
            );
        }
        for (e, edge) in fw.edges().iter().enumerate() {
            let (a, b) = (k(edge.i), k(edge.j));
            let class = match fw.edge_role(e) {
                EdgeRole::Bar => "bar",
                EdgeRole::PlateMaterial => "plate-edge",
            };
            let _ = writeln!(
                out,
                r#"  <line class="{class}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke-width="2"/>"#,
                px(a[0]),
                py(a[1]),
                px(b[0]),
                py(b[1])
            );
        }
        for (i, knot) in fw.knots().iter().enumerate() {
            let p = layer.cfg.knot(i);
            let fill = if knot.pinned { "black" } else { "white" };
            let _ = writeln!(
                out,
                r#"  <circle class="knot" cx="{:.3}" cy="{:.3}" r="4" fill="{fill}" stroke-width="1.5"/>"#,
                px(p[0]),
                py(p[1])
            );
        }
        let _ = writeln!(
            out,
            r#"  <text class="legend" x="{MARGIN:.0}" y="{:.3}" font-size="13" stroke="none">{}</text>"#,
            height - 10.0 - 20.0 * (layers.len() - 1 - idx) as f64,
            escape(&layer.name)
        );
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, r#"<g class="labels" font-size="12" fill="black">"#);
    for (i, knot) in fw.knots().iter().enumerate() {
        let p = layers[0].cfg.knot(i);
        let _ = writeln!(
            out,
            r#"  <text class="knot-label" x="{:.3}" y="{:.3}">{}</text>"#,
            px(p[0]) + 6.0,
            py(p[1]) - 6.0,
            knot.id
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
