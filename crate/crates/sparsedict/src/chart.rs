//! Direct SVG emission for per-dataset trend charts: a two-panel figure
//! with reconstruction error and classification accuracy against the
//! dictionary size rate, one polyline per method.
//!
//! Output is fully deterministic: fixed float formatting, no timestamps.

use crate::classify::DictMethod;
use crate::eval::EvaluationReport;

const PANEL_W: f64 = 460.0;
const PANEL_H: f64 = 340.0;
const MARGIN_L: f64 = 62.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 42.0;
const MARGIN_B: f64 = 46.0;
const GAP: f64 = 40.0;

fn method_color(method: DictMethod) -> &'static str {
    match method {
        DictMethod::Adl => "#d62728",
        DictMethod::Wd => "#2c2c2c",
        DictMethod::Random => "#7f7f7f",
        DictMethod::Somd => "#1f77b4",
        DictMethod::Ngasd => "#2ca02c",
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else if v.abs() >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.3}")
    }
}

struct Panel {
    x0: f64,
    title: String,
    y_label: String,
    y_min: f64,
    y_max: f64,
    /// (method, points as (rate, value)).
    series: Vec<(DictMethod, Vec<(f64, f64)>)>,
    rates: Vec<f64>,
}

impl Panel {
    fn plot_x(&self, rate: f64) -> f64 {
        let (lo, hi) = (self.rates[0], *self.rates.last().unwrap());
        let span = (hi - lo).max(1e-9);
        self.x0 + MARGIN_L + (rate - lo) / span * (PANEL_W - MARGIN_L - MARGIN_R)
    }

    fn plot_y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(1e-12);
        MARGIN_T + (1.0 - (v - self.y_min) / span) * (PANEL_H - MARGIN_T - MARGIN_B)
    }

    fn render(&self, out: &mut String) {
        let left = self.x0 + MARGIN_L;
        let right = self.x0 + PANEL_W - MARGIN_R;
        let top = MARGIN_T;
        let bottom = PANEL_H - MARGIN_B;

        out.push_str(&format!(
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" font-family=\"sans-serif\">{}</text>\n",
            fmt((left + right) / 2.0),
            self.title
        ));
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n",
            fmt(left),
            fmt(top),
            fmt(right - left),
            fmt(bottom - top)
        ));

        // y ticks
        for i in 0..=4 {
            let v = self.y_min + (self.y_max - self.y_min) * i as f64 / 4.0;
            let y = self.plot_y(v);
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#ccc\" stroke-width=\"0.5\"/>\n",
                fmt(left),
                fmt(y),
                fmt(right),
                fmt(y)
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">{}</text>\n",
                fmt(left - 6.0),
                fmt(y + 4.0),
                fmt_tick(v)
            ));
        }
        // x ticks at each rate
        for &rate in &self.rates {
            let x = self.plot_x(rate);
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#444\" stroke-width=\"1\"/>\n",
                fmt(x),
                fmt(bottom),
                fmt(x),
                fmt(bottom + 4.0)
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">{}</text>\n",
                fmt(x),
                fmt(bottom + 18.0),
                rate
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">dictionary size rate</text>\n",
            fmt((left + right) / 2.0),
            fmt(bottom + 36.0)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" transform=\"rotate(-90 {} {})\">{}</text>\n",
            fmt(self.x0 + 16.0),
            fmt((top + bottom) / 2.0),
            fmt(self.x0 + 16.0),
            fmt((top + bottom) / 2.0),
            self.y_label
        ));

        for (method, points) in &self.series {
            if points.is_empty() {
                continue;
            }
            let path: Vec<String> = points
                .iter()
                .map(|&(r, v)| format!("{},{}", fmt(self.plot_x(r)), fmt(self.plot_y(v))))
                .collect();
            out.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                path.join(" "),
                method_color(*method)
            ));
            for &(r, v) in points {
                out.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n",
                    fmt(self.plot_x(r)),
                    fmt(self.plot_y(v)),
                    method_color(*method)
                ));
            }
        }
    }
}

fn series_bounds(series: &[(DictMethod, Vec<(f64, f64)>)]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, points) in series {
        for &(_, v) in points {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.08).max(1e-6);
    (lo - pad, hi + pad)
}

/// Two-panel SVG for one dataset. Axes auto-scale to the data since
/// reconstruction errors vary in scale between datasets.
pub fn dataset_chart_svg(report: &EvaluationReport, dataset: &str) -> String {
    let rates = report.rates.clone();
    let mut recon_series = Vec::new();
    let mut acc_series = Vec::new();
    for &method in &report.methods {
        let recon: Vec<(f64, f64)> = rates
            .iter()
            .filter_map(|&r| report.mean_recon_error(dataset, method, r).map(|v| (r, v)))
            .collect();
        let acc: Vec<(f64, f64)> = rates
            .iter()
            .filter_map(|&r| report.mean_accuracy(dataset, method, r).map(|v| (r, v)))
            .collect();
        recon_series.push((method, recon));
        acc_series.push((method, acc));
    }

    let (recon_lo, recon_hi) = series_bounds(&recon_series);
    let (acc_lo, acc_hi) = series_bounds(&acc_series);

    let total_w = PANEL_W * 2.0 + GAP;
    let total_h = PANEL_H + 30.0;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        fmt(total_w),
        fmt(total_h),
        fmt(total_w),
        fmt(total_h)
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    Panel {
        x0: 0.0,
        title: format!("{dataset}: reconstruction error"),
        y_label: "mean reconstruction error".into(),
        y_min: recon_lo,
        y_max: recon_hi,
        series: recon_series,
        rates: rates.clone(),
    }
    .render(&mut out);
    Panel {
        x0: PANEL_W + GAP,
        title: format!("{dataset}: classification accuracy"),
        y_label: "mean accuracy".into(),
        y_min: acc_lo,
        y_max: acc_hi,
        series: acc_series,
        rates: rates.clone(),
    }
    .render(&mut out);

    // legend
    let mut x = MARGIN_L;
    let y = PANEL_H + 16.0;
    for &method in &report.methods {
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            fmt(x),
            fmt(y - 4.0),
            fmt(x + 22.0),
            fmt(y - 4.0),
            method_color(method)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" font-family=\"sans-serif\">{}</text>\n",
            fmt(x + 27.0),
            fmt(y),
            method.as_str().to_uppercase()
        ));
        x += 110.0;
    }

    out.push_str("</svg>\n");
    out
}
