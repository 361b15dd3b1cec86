//! SVG 1.1 rendering of Poincaré-disk figures: the unit-disk boundary, data
//! markers, closed contour polylines, and a median marker. Marker classes
//! are stable (`data`, `contour`, `median`) so artifacts are testable.

use std::fmt::Write;

use hyperq::{to_ball, HPoint};

const PALETTE: [&str; 6] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02",
];

fn ball_xy(p: &HPoint) -> (f64, f64) {
    let b = to_ball(p);
    (b.coords()[0], b.coords()[1])
}

/// Renders a disk figure. Each contour is a closed polygon through its
/// vertices in direction order; `median` draws a distinct marker.
pub fn render_disk(
    data: &[HPoint],
    contours: &[(f64, Vec<HPoint>)],
    median: Option<&HPoint>,
) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(concat!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" ",
        "viewBox=\"-1.08 -1.08 2.16 2.16\" width=\"640\" height=\"640\">\n"
    ));
    // Flip the y axis so mathematical coordinates render conventionally.
    s.push_str("<g transform=\"scale(1,-1)\">\n");
    s.push_str(concat!(
        "<circle class=\"disk\" cx=\"0\" cy=\"0\" r=\"1\" ",
        "fill=\"none\" stroke=\"#000000\" stroke-width=\"0.004\"/>\n"
    ));
    for p in data {
        let (x, y) = ball_xy(p);
        let _ = writeln!(
            s,
            "<circle class=\"data\" cx=\"{x:.6}\" cy=\"{y:.6}\" r=\"0.009\" fill=\"#44444488\"/>"
        );
    }
    for (i, (beta, verts)) in contours.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts = String::new();
        for v in verts {
            let (x, y) = ball_xy(v);
            let _ = write!(pts, "{x:.6},{y:.6} ");
        }
        let _ = writeln!(
            s,
            "<polygon class=\"contour\" data-beta=\"{beta}\" points=\"{}\" \
             fill=\"none\" stroke=\"{color}\" stroke-width=\"0.006\"/>",
            pts.trim_end()
        );
    }
    if let Some(m) = median {
        let (x, y) = ball_xy(m);
        let _ = writeln!(
            s,
            "<circle class=\"median\" cx=\"{x:.6}\" cy=\"{y:.6}\" r=\"0.014\" \
             fill=\"#0047ab\" stroke=\"#ffffff\" stroke-width=\"0.004\"/>"
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}
