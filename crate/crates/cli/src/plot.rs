//! SVG renderings of result tables.

use std::collections::BTreeMap;
use std::path::Path;

use nfmimo::table::Table;
use plotters::prelude::*;

type PlotResult = Result<(), Box<dyn std::error::Error>>;

const PALETTE: [RGBColor; 8] = [
    RGBColor(31, 119, 180),
    RGBColor(255, 127, 14),
    RGBColor(44, 160, 44),
    RGBColor(214, 39, 40),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
    RGBColor(227, 119, 194),
    RGBColor(127, 127, 127),
];

pub fn render(t: &Table, path: &Path) -> PlotResult {
    match &t.plot {
        Some(h) if h.heatmap => heatmap(t, path, &h.title),
        Some(_) => lines(t, path),
        None => Ok(()),
    }
}

fn finite_bounds<'a>(vals: impl Iterator<Item = &'a f64>) -> Option<(f64, f64)> {
    let (lo, hi) = vals.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if lo > hi {
        return None;
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
    Some((lo - pad, hi + pad))
}

fn lines(t: &Table, path: &Path) -> PlotResult {
    let h = t.plot.as_ref().ok_or("no plot hint")?;
    let x = t.numeric_column(&h.x).ok_or("missing x column")?;
    let groups: Vec<String> = match &h.group {
        Some(g) => {
            let k = t.column(g).ok_or("missing group column")?;
            t.rows.iter().map(|r| format!("{g}={}", r[k])).collect()
        }
        None => vec![String::new(); t.rows.len()],
    };
    // (series label) -> points, kept in first-seen order of labels
    let mut order = Vec::new();
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    let mut all_y = Vec::new();
    for y in &h.ys {
        let ys = t.numeric_column(y).ok_or("missing y column")?;
        for ((xi, yi), g) in x.iter().zip(&ys).zip(&groups) {
            if !(xi.is_finite() && yi.is_finite()) {
                continue;
            }
            let label = if g.is_empty() { y.clone() } else { format!("{y} ({g})") };
            if !series.contains_key(&label) {
                order.push(label.clone());
            }
            series.entry(label).or_default().push((*xi, *yi));
            all_y.push(*yi);
        }
    }
    let (x0, x1) = finite_bounds(x.iter()).ok_or("no finite x values")?;
    let (y0, y1) = finite_bounds(all_y.iter()).ok_or("no finite y values")?;

    let root = SVGBackend::new(path, (800, 520)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(&h.title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(x0..x1, y0..y1)?;
    chart.configure_mesh().x_desc(h.x.as_str()).y_desc("value").draw()?;
    for (i, label) in order.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts = series[label].clone();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        chart
            .draw_series(LineSeries::new(pts.iter().cloned(), color.stroke_width(2)))?
            .label(label.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2)));
        chart.draw_series(pts.iter().map(|&p| Circle::new(p, 3, color.filled())))?;
    }
    chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw()?;
    root.present()?;
    Ok(())
}

fn heatmap(t: &Table, path: &Path, title: &str) -> PlotResult {
    let h = t.plot.as_ref().ok_or("no plot hint")?;
    let cols: Vec<Vec<f64>> = h.ys.iter().map(|c| t.numeric_column(c).ok_or("missing column")).collect::<Result<_, _>>()?;
    let n_rows = t.rows.len();
    let n_cols = cols.len();
    let lo = cols.iter().flatten().cloned().filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min).max(-60.0);
    let root = SVGBackend::new(path, (640, 640)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(30)
        .y_label_area_size(30)
        .build_cartesian_2d(0..n_cols, 0..n_rows)?;
    chart.configure_mesh().disable_mesh().draw()?;
    chart.draw_series((0..n_rows).flat_map(|u| {
        let cols = &cols;
        (0..n_cols).map(move |v| {
            let val = cols[v][u];
            // 0 dB maps to full intensity, `lo` and below to white
            let s = if val.is_finite() && lo < 0.0 { ((val - lo) / -lo).clamp(0.0, 1.0) } else { 0.0 };
            let shade = (255.0 * (1.0 - s)) as u8;
            let color = RGBColor(255, shade, shade);
            Rectangle::new([(v, n_rows - 1 - u), (v + 1, n_rows - u)], color.filled())
        })
    }))?;
    root.present()?;
    Ok(())
}
