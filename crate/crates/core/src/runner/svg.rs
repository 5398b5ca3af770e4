//! Minimal standalone SVG scatter/polyline plots.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 640.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 190.0;
const MARGIN_Y: f64 = 50.0;
/// Cap on background points drawn; denser clouds are thinned by stride.
pub(crate) const MAX_BACKGROUND: usize = 4000;

const PATH_COLOURS: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Viridis-like ramp, sampled at 5 stops.
const RAMP: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn ramp(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let x = t * (RAMP.len() - 1) as f64;
    let i = (x.floor() as usize).min(RAMP.len() - 2);
    let f = x - i as f64;
    let (a, b) = (RAMP[i], RAMP[i + 1]);
    let c = |u: f64, v: f64| (u + f * (v - u)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(a.0, b.0), c(a.1, b.1), c(a.2, b.2))
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Plot {
    pub title: String,
    pub subtitle: String,
    pub x_label: String,
    pub y_label: String,
    /// Shape samples, drawn gray.
    pub background: Vec<[f64; 2]>,
    /// Points coloured by value, with the legend label of the value.
    pub colored: Vec<([f64; 2], f64)>,
    pub color_label: String,
    pub paths: Vec<(String, Vec<[f64; 2]>)>,
    /// Highlighted points (probe centres), drawn as crosses.
    pub markers: Vec<(String, [f64; 2])>,
    /// Data window; computed from the content when `None`.
    pub window: Option<([f64; 2], [f64; 2])>,
}

fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.to_string() }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        if let Some(w) = self.window {
            return w;
        }
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let all = self
            .background
            .iter()
            .chain(self.colored.iter().map(|(p, _)| p))
            .chain(self.paths.iter().flat_map(|(_, v)| v.iter()))
            .chain(self.markers.iter().map(|(_, p)| p));
        for p in all {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if !lo[0].is_finite() {
            return ([-1.0, -1.0], [1.0, 1.0]);
        }
        (lo, hi)
    }

    /// Renders with equal axis scales and a 5% pad around the window.
    pub fn render(&self) -> String {
        let (mut lo, mut hi) = self.bounds();
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        for k in 0..2 {
            let c = 0.5 * (lo[k] + hi[k]);
            lo[k] = c - 0.55 * span;
            hi[k] = c + 0.55 * span;
        }
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - 2.0 * MARGIN_Y;
        let side = plot_w.min(plot_h);
        let sx = |x: f64| MARGIN_LEFT + (x - lo[0]) / (hi[0] - lo[0]) * side;
        let sy = |y: f64| MARGIN_Y + side - (y - lo[1]) / (hi[1] - lo[1]) * side;
        let inside = |p: &[f64; 2]| p[0] >= lo[0] && p[0] <= hi[0] && p[1] >= lo[1] && p[1] <= hi[1];

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" font-size="15">{}</text>"#,
            MARGIN_LEFT,
            escape(&self.title)
        );
        if !self.subtitle.is_empty() {
            let _ = writeln!(
                s,
                r##"<text x="{}" y="38" font-size="11" fill="#555">{}</text>"##,
                MARGIN_LEFT,
                escape(&self.subtitle)
            );
        }

        // Axes frame, ticks and labels.
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_Y}" width="{side}" height="{side}" fill="none" stroke="black"/>"#
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let (xv, yv) = (lo[0] + f * (hi[0] - lo[0]), lo[1] + f * (hi[1] - lo[1]));
            let (px, py) = (sx(xv), sy(yv));
            let bottom = MARGIN_Y + side;
            let _ = writeln!(
                s,
                r#"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                bottom + 5.0,
                bottom + 18.0,
                fmt_num(xv)
            );
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 5.0,
                MARGIN_LEFT - 8.0,
                py + 4.0,
                fmt_num(yv)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + side / 2.0,
            MARGIN_Y + side + 36.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            MARGIN_Y + side / 2.0,
            MARGIN_Y + side / 2.0,
            escape(&self.y_label)
        );

        let _ = writeln!(s, r##"<g fill="#9a9a9a">"##);
        for p in self.background.iter().filter(|p| inside(p)) {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="1.2"/>"#, sx(p[0]), sy(p[1]));
        }
        let _ = writeln!(s, "</g>");

        for (i, (_, poly)) in self.paths.iter().enumerate() {
            if poly.len() < 2 {
                continue;
            }
            let pts: Vec<String> = poly.iter().map(|p| format!("{:.2},{:.2}", sx(p[0]), sy(p[1]))).collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                pts.join(" "),
                PATH_COLOURS[i % PATH_COLOURS.len()]
            );
        }

        let (vmin, vmax) = self
            .colored
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, v)| (a.min(*v), b.max(*v)));
        let norm = |v: f64| if vmax > vmin { (v - vmin) / (vmax - vmin) } else { 1.0 };
        for (p, v) in self.colored.iter().filter(|(p, _)| inside(p)) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.6" fill="{}"/>"#,
                sx(p[0]),
                sy(p[1]),
                ramp(norm(*v))
            );
        }

        for (_, p) in self.markers.iter().filter(|(_, p)| inside(p)) {
            let (x, y) = (sx(p[0]), sy(p[1]));
            let _ = writeln!(
                s,
                r#"<path d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}" stroke="black" stroke-width="2"/>"#,
                x - 5.0,
                y - 5.0,
                x + 5.0,
                y + 5.0,
                x - 5.0,
                y + 5.0,
                x + 5.0,
                y - 5.0
            );
        }

        // Legend.
        let lx = MARGIN_LEFT + side + 20.0;
        let mut ly = MARGIN_Y + 10.0;
        let entry = |s: &mut String, ly: &mut f64, swatch: &dyn Fn(f64) -> String, label: &str| {
            let _ = writeln!(s, "{}", swatch(*ly));
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 22.0,
                *ly + 4.0,
                escape(label)
            );
            *ly += 20.0;
        };
        if !self.background.is_empty() {
            let sw = |y: f64| format!(r##"<circle cx="{:.2}" cy="{y:.2}" r="3" fill="#9a9a9a"/>"##, lx + 8.0);
            entry(&mut s, &mut ly, &sw, "shape samples");
        }
        for (i, (label, _)) in self.paths.iter().enumerate() {
            let sw = |y: f64| {
                format!(
                    r#"<line x1="{lx:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="2"/>"#,
                    lx + 16.0,
                    PATH_COLOURS[i % PATH_COLOURS.len()]
                )
            };
            entry(&mut s, &mut ly, &sw, label);
        }
        let mut marker_labels: Vec<&str> = self.markers.iter().map(|(l, _)| l.as_str()).collect();
        marker_labels.dedup();
        for label in marker_labels {
            let sw = |y: f64| {
                format!(
                    r#"<path d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}" stroke="black" stroke-width="2"/>"#,
                    lx + 4.0,
                    y - 4.0,
                    lx + 12.0,
                    y + 4.0,
                    lx + 4.0,
                    y + 4.0,
                    lx + 12.0,
                    y - 4.0
                )
            };
            entry(&mut s, &mut ly, &sw, label);
        }
        if !self.colored.is_empty() {
            let _ = writeln!(s, r#"<text x="{lx:.2}" y="{:.2}">{}</text>"#, ly + 4.0, escape(&self.color_label));
            ly += 12.0;
            for i in 0..=10 {
                let t = 1.0 - i as f64 / 10.0;
                let _ = writeln!(
                    s,
                    r#"<rect x="{lx:.2}" y="{:.2}" width="16" height="8" fill="{}"/>"#,
                    ly + 8.0 * i as f64,
                    ramp(t)
                );
            }
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{}</text><text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 22.0,
                ly + 8.0,
                fmt_num(vmax),
                lx + 22.0,
                ly + 88.0,
                fmt_num(vmin)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_is_compact() {
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(1.5e-5), "1.50e-5");
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(ramp(0.0), "#440154");
        assert_eq!(ramp(1.0), "#fde725");
        assert_eq!(ramp(f64::NAN), "#440154");
    }

    #[test]
    fn render_has_axes_legend_and_layers() {
        let plot = Plot {
            title: "t <1>".into(),
            x_label: "x0".into(),
            y_label: "x1".into(),
            background: vec![[0.0, 0.0], [1.0, 1.0]],
            colored: vec![([0.5, 0.5], 2.0)],
            color_label: "spread".into(),
            paths: vec![("path".into(), vec![[0.0, 0.0], [1.0, 0.0]])],
            markers: vec![("probe".into(), [0.2, 0.2])],
            ..Plot::default()
        };
        let svg = plot.render();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("t &lt;1&gt;"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        for label in ["shape samples", "path", "probe", "spread", ">x0<", ">x1<"] {
            assert!(svg.contains(label), "{label}");
        }
    }
}
