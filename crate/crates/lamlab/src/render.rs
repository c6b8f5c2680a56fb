//! SVG chord diagrams of laminations and matings.

use std::f64::consts::PI;
use std::fmt::Write;

use num_traits::ToPrimitive;

use crate::circle::{Angle, Leaf};
use crate::lamination::Polygon;

#[derive(Clone, Debug)]
pub struct Style {
    pub size: u32,
    pub geodesic: bool,
    pub colors: [String; 2],
}

impl Default for Style {
    fn default() -> Self {
        Style {
            size: 800,
            geodesic: false,
            colors: ["#1f4e9c".to_string(), "#b8322a".to_string()],
        }
    }
}

/// Leaves and polygons drawn in one color.
#[derive(Clone, Debug, Default)]
pub struct Layer {
    pub leaves: Vec<Leaf>,
    pub polygons: Vec<Polygon>,
}

fn turns(x: &Angle) -> f64 {
    let (n, d) = (x.numer().to_f64(), x.denom().to_f64());
    match (n, d) {
        (Some(n), Some(d)) if d.is_finite() && d > 0.0 => n / d,
        _ => 0.0,
    }
}

struct Frame {
    c: f64,
    r: f64,
}

impl Frame {
    fn point(&self, t: f64) -> (f64, f64) {
        let a = 2.0 * PI * t;
        (self.c + self.r * a.cos(), self.c - self.r * a.sin())
    }

    fn chord(&self, l: &Leaf, geodesic: bool) -> String {
        let (t1, t2) = (turns(l.lo()), turns(l.hi()));
        let (x1, y1) = self.point(t1);
        let (x2, y2) = self.point(t2);
        let span = 2.0 * PI * (t2 - t1);
        let short = span.min(2.0 * PI - span);
        if !geodesic || (short - PI).abs() < 1e-9 {
            return format!(r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#);
        }
        let mid = if span <= PI {
            2.0 * PI * t1 + span / 2.0
        } else {
            2.0 * PI * t2 + short / 2.0
        };
        let dist = self.r / (short / 2.0).cos();
        let (cx, cy) = (self.c + dist * mid.cos(), self.c - dist * mid.sin());
        let radius = self.r * (short / 2.0).tan();
        let cross = (x2 - x1) * (cy - y1) - (y2 - y1) * (cx - x1);
        let sweep = u8::from(cross > 0.0);
        format!(
            r#"<path d="M {x1:.3} {y1:.3} A {radius:.3} {radius:.3} 0 0 {sweep} {x2:.3} {y2:.3}"/>"#
        )
    }
}

/// Renders up to two layers: the first in `colors[0]`, the second in `colors[1]`.
pub fn render_svg(layers: &[Layer], style: &Style) -> String {
    let s = style.size as f64;
    let frame = Frame {
        c: s / 2.0,
        r: s / 2.0 - 10.0,
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        style.size
    );
    let _ = writeln!(
        out,
        r##"<circle cx="{0:.3}" cy="{0:.3}" r="{1:.3}" fill="none" stroke="#000000" stroke-width="1"/>"##,
        frame.c, frame.r
    );
    for (i, layer) in layers.iter().enumerate() {
        let color = &style.colors[i % 2];
        let mut polys = layer.polygons.clone();
        polys.sort();
        let mut leaves = layer.leaves.clone();
        leaves.sort();
        leaves.dedup();
        let _ = writeln!(out, r#"<g class="layer-{i}-polygons" fill="{color}" fill-opacity="0.2" stroke="none">"#);
        for p in &polys {
            let pts: Vec<String> = p
                .vertices
                .iter()
                .map(|v| {
                    let (x, y) = frame.point(turns(v));
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let _ = writeln!(out, r#"<polygon points="{}"/>"#, pts.join(" "));
        }
        let _ = writeln!(out, "</g>");
        let _ = writeln!(out, r#"<g class="layer-{i}-leaves" stroke="{color}" stroke-width="1" fill="none">"#);
        for l in &leaves {
            let _ = writeln!(out, "{}", frame.chord(l, style.geodesic));
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}
