//! Dependency-free SVG report plots: line charts, empirical CDFs and
//! labelled scatter plots. Output is a single self-contained `<svg>`
//! document with inline styling.

const WIDTH: f64 = 840.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 30.0;
const MARGIN_T: f64 = 50.0;
const MARGIN_B: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// One named polyline.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn from_points<'a>(points: impl Iterator<Item = &'a (f64, f64)>) -> Frame {
        let mut f = Frame {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        for &(x, y) in points {
            f.x_min = f.x_min.min(x);
            f.x_max = f.x_max.max(x);
            f.y_min = f.y_min.min(y);
            f.y_max = f.y_max.max(y);
        }
        if !f.x_min.is_finite() {
            f = Frame {
                x_min: 0.0,
                x_max: 1.0,
                y_min: 0.0,
                y_max: 1.0,
            };
        }
        if f.x_max - f.x_min < 1e-12 {
            f.x_min -= 0.5;
            f.x_max += 0.5;
        }
        if f.y_max - f.y_min < 1e-12 {
            f.y_min -= 0.5;
            f.y_max += 0.5;
        }
        // 4% padding on the y axis keeps curves off the frame.
        let pad = 0.04 * (f.y_max - f.y_min);
        f.y_min -= pad;
        f.y_max += pad;
        f
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B
            - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a >= 10000.0 || a < 0.001 {
        format!("{v:.2e}")
    } else if a >= 10.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

fn chart_skeleton(out: &mut String, title: &str, x_label: &str, y_label: &str, frame: &Frame) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    out.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    ));
    // Axes box
    out.push_str(&format!(
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        WIDTH - MARGIN_L - MARGIN_R,
        HEIGHT - MARGIN_T - MARGIN_B
    ));
    // Ticks
    for i in 0..=5 {
        let fx = frame.x_min + (frame.x_max - frame.x_min) * i as f64 / 5.0;
        let px = frame.px(fx);
        out.push_str(&format!(
            "<line x1=\"{px}\" y1=\"{}\" x2=\"{px}\" y2=\"{}\" stroke=\"#333\"/>\n",
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{px}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            HEIGHT - MARGIN_B + 20.0,
            fmt_tick(fx)
        ));
        let fy = frame.y_min + (frame.y_max - frame.y_min) * i as f64 / 5.0;
        let py = frame.py(fy);
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{py}\" x2=\"{MARGIN_L}\" y2=\"{py}\" stroke=\"#333\"/>\n",
            MARGIN_L - 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            MARGIN_L - 9.0,
            py + 4.0,
            fmt_tick(fy)
        ));
        out.push_str(&format!(
            "<line x1=\"{MARGIN_L}\" y1=\"{py}\" x2=\"{}\" y2=\"{py}\" stroke=\"#eee\"/>\n",
            WIDTH - MARGIN_R
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    ));
    out.push_str(&format!(
        "<text x=\"20\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">{}</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    ));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Multi-series line chart.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let frame = Frame::from_points(series.iter().flat_map(|s| s.points.iter()));
    let mut out = String::new();
    chart_skeleton(&mut out, title, x_label, y_label, &frame);
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
            .collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
            path.join(" ")
        ));
        let ly = MARGIN_T + 18.0 + 18.0 * i as f64;
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"3\"/>\n",
            WIDTH - MARGIN_R - 170.0,
            WIDTH - MARGIN_R - 140.0
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            WIDTH - MARGIN_R - 132.0,
            ly + 4.0,
            escape(&s.name)
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Staircase points of the empirical CDF; the last point reaches y = 1 at
/// the maximum value.
pub fn cdf_points(values: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let mut pts = Vec::with_capacity(2 * n);
    for (i, v) in sorted.iter().enumerate() {
        pts.push((*v, i as f64 / n as f64));
        pts.push((*v, (i + 1) as f64 / n as f64));
    }
    pts
}

/// Empirical CDF chart, one staircase per named value set.
pub fn cdf_chart(title: &str, x_label: &str, sets: &[(String, Vec<f64>)]) -> String {
    let series: Vec<Series> = sets
        .iter()
        .map(|(name, values)| Series {
            name: name.clone(),
            points: cdf_points(values),
        })
        .collect();
    line_chart(title, x_label, "empirical CDF", &series)
}

/// Scatter chart with one labelled marker per point.
pub fn scatter_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    points: &[(f64, f64, String)],
) -> String {
    let raw: Vec<(f64, f64)> = points.iter().map(|&(x, y, _)| (x, y)).collect();
    let frame = Frame::from_points(raw.iter());
    let mut out = String::new();
    chart_skeleton(&mut out, title, x_label, y_label, &frame);
    for (i, (x, y, label)) in points.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let (px, py) = (frame.px(*x), frame.py(*y));
        out.push_str(&format!(
            "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"5\" fill=\"{color}\"/>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>\n",
            px + 8.0,
            py - 6.0,
            escape(label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_reaches_one_at_the_maximum() {
        let pts = cdf_points(&[0.3, 0.9, 0.5]);
        let last = pts.last().unwrap();
        assert_eq!(last.0, 0.9);
        assert_eq!(last.1, 1.0);
        assert_eq!(pts[0].1, 0.0);
    }

    #[test]
    fn charts_are_well_formed_svg() {
        let svg = line_chart(
            "loss",
            "epoch",
            "mse",
            &[Series {
                name: "train".into(),
                points: vec![(0.0, 1.0), (1.0, 0.5), (2.0, 0.25)],
            }],
        );
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("polyline"));
        assert!(svg.contains("train"));

        let svg = scatter_chart(
            "tradeoff",
            "bits",
            "agcs",
            &[(10.0, 0.8, "a".into()), (100.0, 0.95, "b".into())],
        );
        assert!(svg.contains("circle"));
        assert_eq!(svg.matches("<circle").count(), 2);
    }

    #[test]
    fn degenerate_single_point_does_not_break_scaling() {
        let svg = cdf_chart("one", "x", &[("only".into(), vec![0.7])]);
        assert!(!svg.contains("NaN"));
        assert!(!svg.contains("inf"));
    }
}
