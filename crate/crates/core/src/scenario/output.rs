//! CSV, SVG and JSON emission. Plotting is presentation only.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use plotters::prelude::*;
use serde::Serialize;

use super::ScenarioResult;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self {
            name: name.to_string(),
            unit: unit.to_string(),
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.name, self.unit)
    }
}

/// Header row of `name [unit]` labels, then one row per sweep point; absent
/// values are left empty.
pub fn write_csv<W: Write>(result: &ScenarioResult, out: &mut W) -> Result<()> {
    let header: Vec<String> = result.columns.iter().map(|c| c.to_string()).collect();
    writeln!(out, "{}", header.join(","))?;
    for row in &result.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|v| v.map_or(String::new(), |v| format!("{v:.10e}")))
            .collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

fn plot_error<E: std::error::Error + Send + Sync>(e: DrawingAreaErrorKind<E>) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Line plot of the result's plot columns against its first column.
pub fn write_svg(result: &ScenarioResult, path: &Path) -> Result<()> {
    let series: Vec<(String, Vec<(f64, f64)>)> = result
        .plot_columns
        .iter()
        .map(|&j| {
            let pts = result
                .rows
                .iter()
                .filter_map(|r| Some((r[0]?, r[j]?)))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect();
            (result.columns[j].to_string(), pts)
        })
        .collect();
    let all = series.iter().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| {
        let span = hi - lo;
        let m = if span > 0.0 {
            0.05 * span
        } else {
            0.5 * lo.abs().max(1e-30)
        };
        (lo - m, hi + m)
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);

    let root = SVGBackend::new(path, (960, 640)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_error)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(&result.name, ("sans-serif", 22))
        .margin(20)
        .x_label_area_size(50)
        .y_label_area_size(90)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(plot_error)?;
    let y_unit = result
        .plot_columns
        .first()
        .map(|&j| result.columns[j].unit.clone())
        .unwrap_or_default();
    chart
        .configure_mesh()
        .x_desc(result.columns[0].to_string())
        .y_desc(format!("[{y_unit}]"))
        .x_label_formatter(&|v| format!("{v:.3e}"))
        .y_label_formatter(&|v| format!("{v:.3e}"))
        .draw()
        .map_err(plot_error)?;
    for (k, (label, pts)) in series.into_iter().enumerate() {
        let color = Palette99::pick(k).to_rgba();
        chart
            .draw_series(LineSeries::new(pts, color.stroke_width(2)))
            .map_err(plot_error)?
            .label(label)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_error)?;
    root.present().map_err(plot_error)?;
    Ok(())
}

#[derive(Serialize)]
struct Sidecar<'a> {
    name: &'a str,
    columns: &'a [Column],
    metadata: &'a super::Metadata,
    summary: &'a [String],
}

/// Writes `<name>.csv`, `<name>.svg`, `<name>.json` and any extra tables into
/// `dir`, returning the paths in that order.
pub fn write_outputs(result: &ScenarioResult, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let csv = dir.join(format!("{}.csv", result.name));
    let mut f = std::io::BufWriter::new(std::fs::File::create(&csv)?);
    write_csv(result, &mut f)?;
    f.flush()?;
    written.push(csv);

    let svg = dir.join(format!("{}.svg", result.name));
    write_svg(result, &svg)?;
    written.push(svg);

    let json = dir.join(format!("{}.json", result.name));
    let sidecar = Sidecar {
        name: &result.name,
        columns: &result.columns,
        metadata: &result.metadata,
        summary: &result.summary,
    };
    let text = serde_json::to_string_pretty(&sidecar).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    std::fs::write(&json, text + "\n")?;
    written.push(json);

    for (name, text) in &result.extra_files {
        let p = dir.join(name);
        std::fs::write(&p, text)?;
        written.push(p);
    }
    Ok(written)
}
