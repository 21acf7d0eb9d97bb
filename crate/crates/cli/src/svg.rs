//! Deterministic static SVG emission: line charts and heatmaps with fixed
//! geometry and no timestamps, so identical data produces identical bytes.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: [&str; 4] = ["#1b6ca8", "#c23b22", "#3a7d44", "#8b5e83"];

pub struct Series<'a> {
    pub label: &'a str,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.3}");
    s
}

struct Axis {
    min: f64,
    max: f64,
}

impl Axis {
    fn from_values<'a>(values: impl Iterator<Item = &'a f64>) -> Axis {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in values {
            if v.is_finite() {
                min = min.min(v);
                max = max.max(v);
            }
        }
        if !min.is_finite() {
            min = 0.0;
            max = 1.0;
        }
        if max - min < 1e-300 {
            max = min + 1.0;
        }
        let pad = 0.05 * (max - min);
        Axis {
            min: min - pad,
            max: max + pad,
        }
    }

    fn to_px(&self, v: f64, lo: f64, hi: f64) -> f64 {
        lo + (v - self.min) / (self.max - self.min) * (hi - lo)
    }
}

/// Line chart of one or more series; `log_log` plots log10 of both axes
/// (values must be positive).
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], log_log: bool)
    -> String
{
    let tf = |v: f64| if log_log { v.log10() } else { v };
    let all_x: Vec<f64> = series.iter().flat_map(|s| s.xs.iter().map(|&v| tf(v))).collect();
    let all_y: Vec<f64> = series.iter().flat_map(|s| s.ys.iter().map(|&v| tf(v))).collect();
    let ax = Axis::from_values(all_x.iter());
    let ay = Axis::from_values(all_y.iter());
    let (x0, x1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (y0, y1) = (HEIGHT - MARGIN_B, MARGIN_T);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-family=\"monospace\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        title
    ));
    // Frame and grid lines with tick labels.
    svg.push_str(&format!(
        "<rect x=\"{x0}\" y=\"{y1}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        x1 - x0,
        y0 - y1
    ));
    for i in 0..=4 {
        let fx = ax.min + (ax.max - ax.min) * i as f64 / 4.0;
        let fy = ay.min + (ay.max - ay.min) * i as f64 / 4.0;
        let px = ax.to_px(fx, x0, x1);
        let py = ay.to_px(fy, y0, y1);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y0}\" x2=\"{}\" y2=\"{y1}\" stroke=\"#ddd\"/>\n",
            fmt(px),
            fmt(px)
        ));
        svg.push_str(&format!(
            "<line x1=\"{x0}\" y1=\"{}\" x2=\"{x1}\" y2=\"{}\" stroke=\"#ddd\"/>\n",
            fmt(py),
            fmt(py)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
            fmt(px),
            HEIGHT - MARGIN_B + 16.0,
            fmt(fx)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
            MARGIN_L - 6.0,
            fmt(py + 3.0),
            fmt(fy)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        HEIGHT - 12.0,
        x_label
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        y_label
    ));
    for (si, s) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let points: Vec<String> = s
            .xs
            .iter()
            .zip(s.ys)
            .map(|(&x, &y)| {
                format!("{},{}", fmt(ax.to_px(tf(x), x0, x1)), fmt(ay.to_px(tf(y), y0, y1)))
            })
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" fill=\"{color}\">{}</text>\n",
            x1 - 150.0,
            y1 + 16.0 + 14.0 * si as f64,
            s.label
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Grayscale-to-blue heatmap of a row-major `rows x cols` field.
pub fn heatmap(title: &str, values: &[f64], rows: usize, cols: usize) -> String {
    assert_eq!(values.len(), rows * cols);
    let vmax = values.iter().cloned().fold(0.0f64, f64::max).max(1e-300);
    let (x0, x1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (y0, y1) = (HEIGHT - MARGIN_B, MARGIN_T);
    let cw = (x1 - x0) / cols as f64;
    let ch = (y0 - y1) / rows as f64;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-family=\"monospace\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        title
    ));
    for r in 0..rows {
        for c in 0..cols {
            let t = (values[r * cols + c] / vmax).clamp(0.0, 1.0);
            let red = (255.0 * (1.0 - t)) as u8;
            let green = (255.0 * (1.0 - 0.6 * t)) as u8;
            let blue = 255 - (80.0 * t) as u8;
            // Row 0 drawn at the bottom so the vertical axis increases upward.
            let y = y0 - (r + 1) as f64 * ch;
            svg.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#{red:02x}{green:02x}{blue:02x}\"/>\n",
                fmt(x0 + c as f64 * cw),
                fmt(y),
                fmt(cw + 0.5),
                fmt(ch + 0.5)
            ));
        }
    }
    svg.push_str(&format!(
        "<rect x=\"{x0}\" y=\"{y1}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        x1 - x0,
        y0 - y1
    ));
    svg.push_str("</svg>\n");
    svg
}
