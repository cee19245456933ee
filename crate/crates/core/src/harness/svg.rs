//! Self-contained SVG line plots: one polyline per series, point markers,
//! tick labels, legend, linear or log-10 y axis. No drawing dependencies;
//! output bytes are a pure function of the inputs.

use crate::error::{Error, Result};

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 830.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 470.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
    "#7f7f7f",
];

/// One labeled curve.
#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Snap a raw interval to the 1-2-5 ladder.
fn nice_step(range: f64, n: usize) -> f64 {
    let raw = range / n as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    let nice = if r <= 1.0 {
        1.0
    } else if r <= 2.0 {
        2.0
    } else if r <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn fmt_at_step(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 {
        0
    } else {
        (-step.log10().floor()) as usize
    };
    let s = format!("{v:.decimals$}");
    // Avoid the "-0" label.
    if s.starts_with('-') && s.trim_start_matches(['-', '0', '.']).is_empty() {
        s[1..].to_string()
    } else {
        s
    }
}

/// Tick positions and labels over [min, max] in axis units.
fn linear_ticks(min: f64, max: f64) -> Vec<(f64, String)> {
    let step = nice_step(max - min, 5);
    let mut t = (min / step).ceil() * step;
    let mut out = Vec::new();
    while t <= max + 1e-9 * step {
        out.push((t, fmt_at_step(t, step)));
        t += step;
    }
    out
}

/// Decade ticks for a log-10 axis given bounds in log units.
fn log_ticks(lmin: f64, lmax: f64) -> Vec<(f64, String)> {
    let mut out = Vec::new();
    for e in (lmin.floor() as i64)..=(lmax.ceil() as i64) {
        let l = e as f64;
        if l >= lmin - 1e-9 && l <= lmax + 1e-9 {
            out.push((l, format!("1e{e}")));
        }
    }
    if out.len() < 2 {
        out = vec![(lmin, format!("{:.2e}", 10f64.powf(lmin))), (
            lmax,
            format!("{:.2e}", 10f64.powf(lmax)),
        )];
    }
    out
}

/// Render the plot. Non-finite points are dropped, as are non-positive y
/// values on a log axis; an entirely unplottable input is an error.
pub fn line_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    log_y: bool,
) -> Result<String> {
    let usable: Vec<(usize, Vec<(f64, f64)>)> = series
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let pts = s
                .points
                .iter()
                .copied()
                .filter(|&(x, y)| {
                    x.is_finite() && y.is_finite() && (!log_y || y > 0.0)
                })
                .map(|(x, y)| (x, if log_y { y.log10() } else { y }))
                .collect::<Vec<_>>();
            (i, pts)
        })
        .collect();
    let all: Vec<(f64, f64)> =
        usable.iter().flat_map(|(_, pts)| pts.iter().copied()).collect();
    if all.is_empty() {
        return Err(Error::InvalidConfig(
            "no plottable points (after dropping non-finite and non-positive-log values)"
                .into(),
        ));
    }

    let (mut x0, mut x1) = all
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(x, _)| {
            (lo.min(x), hi.max(x))
        });
    let (mut y0, mut y1) = all
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, y)| {
            (lo.min(y), hi.max(y))
        });
    if x1 - x0 < 1e-12 {
        let pad = x0.abs().max(1.0) * 0.1;
        x0 -= pad;
        x1 += pad;
    }
    if y1 - y0 < 1e-12 {
        let pad = if log_y { 1.0 } else { y0.abs().max(1.0) * 0.1 };
        y0 -= pad;
        y1 += pad;
    } else if !log_y {
        // Headroom so curves do not sit on the frame.
        let pad = 0.05 * (y1 - y0);
        y0 -= pad;
        y1 += pad;
    }

    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (RIGHT - LEFT);
    let sy = |y: f64| BOTTOM - (y - y0) / (y1 - y0) * (BOTTOM - TOP);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
    ));
    svg.push_str(&format!(
        "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"28\" text-anchor=\"middle\" font-size=\"18\">{}</text>\n",
        0.5 * (LEFT + RIGHT),
        xml_escape(title)
    ));

    // Gridlines and tick labels.
    let xticks = linear_ticks(x0, x1);
    let yticks = if log_y { log_ticks(y0, y1) } else { linear_ticks(y0, y1) };
    for (t, label) in &xticks {
        let px = sx(*t);
        svg.push_str(&format!(
            "  <line x1=\"{px:.2}\" y1=\"{TOP}\" x2=\"{px:.2}\" y2=\"{BOTTOM}\" \
             stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n"
        ));
        svg.push_str(&format!(
            "  <text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
            BOTTOM + 18.0,
            xml_escape(label)
        ));
    }
    for (t, label) in &yticks {
        let py = sy(*t);
        svg.push_str(&format!(
            "  <line x1=\"{LEFT}\" y1=\"{py:.2}\" x2=\"{RIGHT}\" y2=\"{py:.2}\" \
             stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n"
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"12\">{}</text>\n",
            LEFT - 8.0,
            py + 4.0,
            xml_escape(label)
        ));
    }

    // Frame.
    svg.push_str(&format!(
        "  <line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" \
         stroke=\"#000000\" stroke-width=\"1.5\"/>\n"
    ));
    svg.push_str(&format!(
        "  <line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" \
         stroke=\"#000000\" stroke-width=\"1.5\"/>\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        0.5 * (LEFT + RIGHT),
        HEIGHT - 18.0,
        xml_escape(x_label)
    ));
    svg.push_str(&format!(
        "  <text x=\"22\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"14\" \
         transform=\"rotate(-90 22 {:.2})\">{}</text>\n",
        0.5 * (TOP + BOTTOM),
        0.5 * (TOP + BOTTOM),
        xml_escape(y_label)
    ));

    // Curves: one polyline per series plus point markers.
    for (i, pts) in &usable {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> =
            pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
        for &(x, y) in pts {
            svg.push_str(&format!(
                "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>\n",
                sx(x),
                sy(y)
            ));
        }
    }

    // Legend, top-right inside the frame.
    for (row, (i, _)) in usable.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = TOP + 16.0 + 18.0 * row as f64;
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
             stroke=\"{color}\" stroke-width=\"2.5\"/>\n",
            RIGHT - 150.0,
            RIGHT - 122.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{}</text>\n",
            RIGHT - 116.0,
            y + 4.0,
            xml_escape(&series[*i].label)
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}
