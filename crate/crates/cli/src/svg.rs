//! Minimal static SVG charts. Output depends only on the input values:
//! no timestamps, no ids, fixed decimal formatting.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 360.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 70.0;
const PALETTE: [&str; 6] = [
    "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860",
];

pub struct Series<'a> {
    pub label: &'a str,
    pub values: &'a [f64],
    /// Optional (low, high) whisker per value.
    pub spread: Option<&'a [(f64, f64)]>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn nice_max(v: f64) -> f64 {
    if v.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || !v.is_finite() {
        return 1.0;
    }
    let mag = 10f64.powf(v.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&m| m >= v)
        .unwrap_or(10.0 * mag)
}

fn header(out: &mut String, title: &str, y_label: &str, x_label: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" \
         viewBox=\"0 0 {WIDTH:.0} {HEIGHT:.0}\" font-family=\"sans-serif\" font-size=\"11\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n\
         <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n\
         <text x=\"14\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1})\">{}</text>\n",
        WIDTH / 2.0,
        escape(title),
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        HEIGHT - 8.0,
        escape(x_label),
        TOP + (HEIGHT - TOP - BOTTOM) / 2.0,
        TOP + (HEIGHT - TOP - BOTTOM) / 2.0,
        escape(y_label),
    );
}

fn y_axis(out: &mut String, y_max: f64) {
    let plot_h = HEIGHT - TOP - BOTTOM;
    let base = HEIGHT - BOTTOM;
    let _ = writeln!(
        out,
        "<line x1=\"{LEFT:.1}\" y1=\"{TOP:.1}\" x2=\"{LEFT:.1}\" y2=\"{base:.1}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        out,
        "<line x1=\"{LEFT:.1}\" y1=\"{base:.1}\" x2=\"{:.1}\" y2=\"{base:.1}\" stroke=\"black\"/>",
        WIDTH - RIGHT
    );
    for i in 0..=4 {
        let v = y_max * i as f64 / 4.0;
        let y = base - plot_h * i as f64 / 4.0;
        let _ = writeln!(
            out,
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{LEFT:.1}\" y2=\"{y:.1}\" stroke=\"black\"/>\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>",
            LEFT - 4.0,
            LEFT - 6.0,
            y + 4.0,
            format_tick(v)
        );
    }
}

fn format_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn legend(out: &mut String, labels: &[&str]) {
    if labels.len() < 2 {
        return;
    }
    for (i, label) in labels.iter().enumerate() {
        let x = LEFT + 10.0 + 140.0 * i as f64;
        let _ = writeln!(
            out,
            "<rect x=\"{x:.1}\" y=\"{:.1}\" width=\"10\" height=\"10\" fill=\"{}\"/>\
             <text x=\"{:.1}\" y=\"{:.1}\">{}</text>",
            TOP - 12.0,
            PALETTE[i % PALETTE.len()],
            x + 14.0,
            TOP - 3.0,
            escape(label)
        );
    }
}

/// Grouped bar chart: one group per category, one bar per series.
pub fn bar_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    categories: &[String],
    series: &[Series],
) -> String {
    let mut out = String::new();
    header(&mut out, title, y_label, x_label);
    let top_value = series
        .iter()
        .flat_map(|s| {
            s.values
                .iter()
                .copied()
                .chain(s.spread.into_iter().flatten().map(|&(_, hi)| hi))
        })
        .fold(0.0, f64::max);
    let y_max = nice_max(top_value);
    y_axis(&mut out, y_max);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let base = HEIGHT - BOTTOM;
    let group_w = plot_w / categories.len().max(1) as f64;
    let bar_w = group_w * 0.8 / series.len().max(1) as f64;
    let scale = |v: f64| base - plot_h * (v / y_max).clamp(0.0, 1.0);

    for (si, s) in series.iter().enumerate() {
        let colour = PALETTE[si % PALETTE.len()];
        for (ci, &v) in s.values.iter().enumerate() {
            let x = LEFT + group_w * ci as f64 + group_w * 0.1 + bar_w * si as f64;
            let y = scale(v);
            let _ = writeln!(
                out,
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{bar_w:.2}\" height=\"{:.2}\" fill=\"{colour}\"/>",
                base - y
            );
            if let Some(&(lo, hi)) = s.spread.and_then(|sp| sp.get(ci)) {
                let cx = x + bar_w / 2.0;
                let _ = writeln!(
                    out,
                    "<line x1=\"{cx:.2}\" y1=\"{:.2}\" x2=\"{cx:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
                    scale(lo),
                    scale(hi)
                );
            }
        }
    }
    let rotate = categories.len() > 12;
    for (ci, cat) in categories.iter().enumerate() {
        let x = LEFT + group_w * (ci as f64 + 0.5);
        let y = base + 14.0;
        if rotate {
            let _ = writeln!(
                out,
                "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"8\" text-anchor=\"end\" \
                 transform=\"rotate(-90 {x:.2} {y:.2})\">{}</text>",
                escape(cat)
            );
        } else {
            let _ = writeln!(
                out,
                "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"middle\">{}</text>",
                escape(cat)
            );
        }
    }
    let labels: Vec<&str> = series.iter().map(|s| s.label).collect();
    legend(&mut out, &labels);
    out.push_str("</svg>\n");
    out
}

/// Scatter plot; each series is a list of (x, y) points.
pub fn scatter(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(&str, Vec<(f64, f64)>)],
) -> String {
    let mut out = String::new();
    header(&mut out, title, y_label, x_label);
    let points = series.iter().flat_map(|(_, pts)| pts.iter());
    let (x_top, y_top) = points.fold((0.0f64, 0.0f64), |(a, b), &(x, y)| (a.max(x), b.max(y)));
    let (x_max, y_max) = (nice_max(x_top), nice_max(y_top));
    y_axis(&mut out, y_max);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let base = HEIGHT - BOTTOM;
    for i in 0..=4 {
        let v = x_max * i as f64 / 4.0;
        let x = LEFT + plot_w * i as f64 / 4.0;
        let _ = writeln!(
            out,
            "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            base + 14.0,
            format_tick(v)
        );
    }
    for (si, (_, pts)) in series.iter().enumerate() {
        let colour = PALETTE[si % PALETTE.len()];
        for &(x, y) in pts {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{colour}\"/>",
                LEFT + plot_w * (x / x_max).clamp(0.0, 1.0),
                base - plot_h * (y / y_max).clamp(0.0, 1.0)
            );
        }
    }
    let labels: Vec<&str> = series.iter().map(|(l, _)| *l).collect();
    legend(&mut out, &labels);
    out.push_str("</svg>\n");
    out
}
