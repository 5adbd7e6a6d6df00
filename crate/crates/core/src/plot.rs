//! Line charts of results CSV files as plain SVG.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::mean_std;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// Mean and standard deviation of `y` at one `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlotPoint {
    pub x: f64,
    pub mean: f64,
    pub std: f64,
}

/// Series name to points sorted by `x`.
pub type SeriesData = BTreeMap<String, Vec<PlotPoint>>;

fn column(header: &csv::StringRecord, name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::MissingField(name.to_string()))
}

/// Group rows by `series`, then average `y` per distinct `x`.
pub fn summarize<R: Read>(input: R, x: &str, y: &str, series: &str) -> Result<SeriesData> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    let (cx, cy, cs) = (column(&header, x)?, column(&header, y)?, column(&header, series)?);
    let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |c: usize| -> Result<f64> {
            let raw = rec.get(c).unwrap_or("");
            raw.parse().map_err(|_| Error::Parse {
                line: k + 2,
                msg: format!("`{}` is not numeric", raw),
            })
        };
        groups
            .entry(rec.get(cs).unwrap_or("").to_string())
            .or_default()
            .push((num(cx)?, num(cy)?));
    }
    Ok(groups
        .into_iter()
        .map(|(name, mut pts)| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut out = Vec::new();
            for chunk in pts.chunk_by(|a, b| a.0 == b.0) {
                let ys: Vec<f64> = chunk.iter().map(|p| p.1).collect();
                let (mean, std) = mean_std(&ys);
                out.push(PlotPoint { x: chunk[0].0, mean, std });
            }
            (name, out)
        })
        .collect())
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Render one polyline per series with error bars and a legend.
pub fn render_svg(data: &SeriesData, x_label: &str, y_label: &str) -> String {
    let all = || data.values().flatten();
    let (x0, x1) = span(all().map(|p| p.x));
    let (y0, y1) = span(all().flat_map(|p| [p.mean - p.std, p.mean + p.std]));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT},{TOP} V{:.2} H{:.2}" fill="none" stroke="black"/>"#,
        TOP + ph,
        LEFT + pw
    );
    for (v, anchor_x) in [(x0, sx(x0)), (x1, sx(x1))] {
        let _ = writeln!(
            s,
            r#"<text x="{anchor_x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 16.0,
            tick(v)
        );
    }
    for v in [y0, y1] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            sy(v) + 4.0,
            tick(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(y_label)
    );

    for (k, (name, pts)) in data.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.x), sy(p.mean)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        );
        for p in pts.iter().filter(|p| p.std > 0.0) {
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}"/>"#,
                sy(p.mean - p.std),
                sy(p.mean + p.std),
                x = sx(p.x)
            );
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v.abs() >= 1000.0 || (v != 0.0 && v.abs() < 0.01) {
        format!("{v:.3e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Read `csv`, plot mean `y` against `x` for each value of `series`, and
/// write the SVG to `out`.
pub fn render_plot(csv: &Path, x: &str, y: &str, series: &str, out: &Path) -> Result<()> {
    let data = summarize(std::fs::File::open(csv)?, x, y, series)?;
    std::fs::write(out, render_svg(&data, x, y))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "x,y,s\n1,2,a\n1,4,a\n2,5,a\n1,1,b\n";

    #[test]
    fn summarize_groups_and_averages() {
        let d = summarize(CSV.as_bytes(), "x", "y", "s").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d["a"][0].x, 1.0);
        assert_eq!(d["a"][0].mean, 3.0);
        assert_eq!(d["a"][1].mean, 5.0);
        assert_eq!(d["b"].len(), 1);
    }

    #[test]
    fn missing_field() {
        assert!(matches!(
            summarize(CSV.as_bytes(), "x", "nope", "s"),
            Err(Error::MissingField(f)) if f == "nope"
        ));
    }

    #[test]
    fn two_series_two_polylines() {
        let d = summarize(CSV.as_bytes(), "x", "y", "s").unwrap();
        let svg = render_svg(&d, "x", "y");
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">a</text>") && svg.contains(">b</text>"));
        assert_eq!(svg, render_svg(&d, "x", "y"));
    }

    #[test]
    fn single_point_is_one_vertex() {
        let d = summarize("x,y,s\n3,7,only\n".as_bytes(), "x", "y", "s").unwrap();
        let svg = render_svg(&d, "x", "y");
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let points = line.split('"').nth(1).unwrap();
        assert_eq!(points.split(' ').count(), 1);
    }
}
