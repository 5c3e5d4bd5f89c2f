//! CSV files with a self-describing `#` header, and minimal SVG line charts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::cache::VERSION_TAG;
use crate::error::{CliError, Result};

/// `# title`, then `# key: value` lines, then `# column ...` lines.
pub fn header_block(title: &str, fields: &[(&str, String)], columns: &[&str]) -> String {
    let mut out = format!("# radbif {title}\n");
    for (k, v) in fields {
        let _ = writeln!(out, "# {k}: {v}");
    }
    for c in columns {
        let _ = writeln!(out, "# column {c}");
    }
    out
}

/// A CSV table: metadata, column names with units, and numeric rows.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: String,
    pub fields: Vec<(&'static str, String)>,
    /// `(name, description with unit)`.
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn field(mut self, key: &'static str, value: impl ToString) -> Self {
        self.fields.push((key, value.to_string()));
        self
    }

    pub fn column(mut self, name: impl Into<String>, description: impl Into<String>) -> Self {
        self.columns.push((name.into(), description.into()));
        self
    }

    pub fn render(&self) -> Result<String> {
        let mut fields = vec![("version", VERSION_TAG.to_string())];
        fields.extend(self.fields.iter().cloned());
        let described: Vec<String> = self
            .columns
            .iter()
            .map(|(n, d)| format!("{n}: {d}"))
            .collect();
        let described: Vec<&str> = described.iter().map(String::as_str).collect();
        let mut out = header_block(&self.title, &fields, &described);
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Cache {
            path: self.title.clone(),
            reason: e.to_string(),
        };
        w.write_record(self.columns.iter().map(|c| c.0.as_str()))
            .map_err(fail)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format!("{x:?}")))
                .map_err(fail)?;
        }
        let body = w.into_inner().map_err(|e| CliError::Cache {
            path: self.title.clone(),
            reason: e.to_string(),
        })?;
        out.push_str(&String::from_utf8_lossy(&body));
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        write_text(path, &self.render()?)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    Ok(path.to_path_buf())
}

/// One labelled polyline.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Line chart with axes, a zero line and a legend.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h, m) = (720.0, 440.0, 60.0);
    let all = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    );
    let _ = writeln!(svg, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
        w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        "<g stroke=\"black\"><line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\"/><line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{b}\"/></g>",
        b = h - m,
        r = w - m
    );
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(
            svg,
            "<line x1=\"{m}\" y1=\"{z:.2}\" x2=\"{r}\" y2=\"{z:.2}\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>",
            z = py(0.0),
            r = w - m
        );
    }
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            px(xv),
            h - m + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            m - 6.0,
            py(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
        w / 2.0,
        h - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
        h / 2.0,
        h / 2.0,
        escape(y_label)
    );
    for (k, s) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\" points=\"{}\"/>",
            pts.join(" ")
        );
        let ly = m + 16.0 * k as f64;
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{:.2}\" fill=\"{colour}\" text-anchor=\"end\">{}</text>",
            w - m - 4.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_has_self_describing_header() {
        let mut t = Table::new("demo")
            .field("dimension", 3)
            .column("x", "radius")
            .column("y", "value");
        t.rows.push(vec![0.5, -1.25]);
        let text = t.render().unwrap();
        assert!(text.starts_with("# radbif demo\n# version: "));
        assert!(text.contains("# dimension: 3\n"));
        assert!(text.contains("# column x: radius\n"));
        assert!(text.ends_with("x,y\n0.5,-1.25\n"));
    }

    #[test]
    fn chart_has_one_polyline_per_series() {
        let s = |l: &str| Series {
            label: l.into(),
            points: vec![(0.0, 1.0), (1.0, -1.0)],
        };
        let svg = line_chart("t", "x", "y", &[s("a"), s("b<c")]);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("b&lt;c"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
