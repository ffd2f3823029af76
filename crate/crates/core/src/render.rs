//! Plain SVG 1.1 figures of clusters: native arc segments, one fill per
//! region, optional pressure labels.

use std::fmt::Write;

use crate::arc_geometry::{DirectedArc, Point};
use crate::cluster::{Cluster, EXTERNAL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub labels: bool,
    /// Pixels per unit length.
    pub scale: f64,
    /// Margin in pixels.
    pub margin: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { labels: false, scale: 120.0, margin: 24.0 }
    }
}

const FILLS: [&str; 8] = ["#8fb8de", "#f2b880", "#a8d5a2", "#e6a0b4", "#c7b4e3", "#f0e08a", "#9fd8d3", "#d9b38c"];

fn fill_for(index: usize) -> &'static str {
    FILLS[index % FILLS.len()]
}

/// Coordinates with y flipped so that counterclockwise stays counterclockwise on screen.
struct Frame {
    min_x: f64,
    max_y: f64,
    opts: RenderOptions,
}

impl Frame {
    fn x(&self, p: Point) -> f64 {
        (p.x - self.min_x) * self.opts.scale + self.opts.margin
    }

    fn y(&self, p: Point) -> f64 {
        (self.max_y - p.y) * self.opts.scale + self.opts.margin
    }

    fn pt(&self, p: Point) -> String {
        format!("{:.4},{:.4}", tidy(self.x(p)), tidy(self.y(p)))
    }
}

/// Avoid printing "-0.0000".
fn tidy(v: f64) -> f64 {
    if v.abs() < 5e-5 {
        0.0
    } else {
        v
    }
}

fn segment(frame: &Frame, arc: &DirectedArc) -> String {
    match arc.radius() {
        None => format!("L{}", frame.pt(arc.end())),
        Some(r) => {
            let large = u8::from(arc.turn().abs() > std::f64::consts::PI);
            // After the y flip a left turn is a clockwise sweep in SVG terms.
            let sweep = u8::from(arc.turn() < 0.0);
            let r = r * frame.opts.scale;
            format!("A{r:.4},{r:.4} 0 {large} {sweep} {}", frame.pt(arc.end()))
        }
    }
}

fn path_of(frame: &Frame, arcs: &[DirectedArc]) -> String {
    let mut d = String::new();
    if let Some(first) = arcs.first() {
        d.push_str(&format!("M{}", frame.pt(first.start())));
        for a in arcs {
            d.push(' ');
            d.push_str(&segment(frame, a));
        }
        d.push_str(" Z");
    }
    d
}

/// Render the cluster as a standalone SVG document. The output is
/// deterministic apart from the version comment on the second line.
pub fn render_svg(c: &Cluster, opts: &RenderOptions) -> String {
    let samples: Vec<Point> = (0..c.edges().len()).flat_map(|e| c.arc(e).sample(32)).collect();
    let (mut min_x, mut max_x, mut min_y, mut max_y) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in &samples {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    if samples.is_empty() {
        (min_x, max_x, min_y, max_y) = (0.0, 1.0, 0.0, 1.0);
    }
    let frame = Frame { min_x, max_y, opts: *opts };
    let width = (max_x - min_x) * opts.scale + 2.0 * opts.margin;
    let height = (max_y - min_y) * opts.scale + 2.0 * opts.margin;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<!-- quadbubble {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.2}\" height=\"{height:.2}\" viewBox=\"0 0 {width:.2} {height:.2}\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");

    let bounded = c.bounded_region_ids();
    out.push_str("<g id=\"regions\" stroke=\"none\">\n");
    for (f, face) in c.faces().iter().enumerate() {
        if face.region == EXTERNAL {
            continue;
        }
        let k = bounded.iter().position(|&id| id == face.region).unwrap_or(0);
        let poly = c.face_polygon(f);
        let _ = writeln!(
            out,
            "<path class=\"region\" data-region=\"{}\" fill=\"{}\" d=\"{}\"/>",
            face.region,
            fill_for(k),
            path_of(&frame, poly.arcs())
        );
    }
    out.push_str("</g>\n");

    out.push_str("<g id=\"edges\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" stroke-linejoin=\"round\">\n");
    for e in 0..c.edges().len() {
        let a = c.arc(e);
        let _ = writeln!(out, "<path d=\"M{} {}\"/>", frame.pt(a.start()), segment(&frame, a));
    }
    out.push_str("</g>\n");

    out.push_str("<g id=\"vertices\" fill=\"black\">\n");
    for v in c.vertices() {
        let _ = writeln!(out, "<circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"3\"/>", tidy(frame.x(*v)), tidy(frame.y(*v)));
    }
    out.push_str("</g>\n");

    if opts.labels {
        out.push_str("<g id=\"labels\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">\n");
        for (f, face) in c.faces().iter().enumerate() {
            if face.region == EXTERNAL {
                continue;
            }
            let pts: Vec<Point> = c.face_polygon(f).arcs().iter().flat_map(|a| a.sample(16)).collect();
            let n = pts.len().max(1) as f64;
            let centre = Point::new(pts.iter().map(|p| p.x).sum::<f64>() / n, pts.iter().map(|p| p.y).sum::<f64>() / n);
            let text = match c.pressure(face.region) {
                Some(p) => format!("E{} p={:.4}", face.region, p),
                None => format!("E{}", face.region),
            };
            let _ = writeln!(
                out,
                "<text x=\"{:.4}\" y=\"{:.4}\">{text}</text>",
                tidy(frame.x(centre)),
                tidy(frame.y(centre))
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}
