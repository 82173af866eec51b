//! SVG line plots of a finished run.

use std::path::Path;

use plotters::prelude::*;
use tank_core::{ClosedLoopConfig, ModelKind, TraceRecord, TraceRow};

const SIZE: (u32, u32) = (900, 900);

type Column = fn(&TraceRow) -> f64;

struct Series {
    label: String,
    color: RGBColor,
    points: Vec<(f64, f64)>,
}

fn model_color(m: ModelKind) -> RGBColor {
    match m {
        ModelKind::Linear => RGBColor(31, 119, 180),
        ModelKind::Nonlinear => RGBColor(214, 39, 40),
    }
}

fn suffix(m: ModelKind, overlay: bool) -> &'static str {
    match (overlay, m) {
        (false, _) => "",
        (true, ModelKind::Linear) => "_l",
        (true, ModelKind::Nonlinear) => "_n",
    }
}

fn trace_series(records: &[TraceRecord], name: &str, f: Column) -> Vec<Series> {
    let overlay = records.len() > 1;
    records
        .iter()
        .map(|r| Series {
            label: format!("{name}{}", suffix(r.model, overlay)),
            color: model_color(r.model),
            points: r.rows.iter().map(|row| (row.t, f(row))).collect(),
        })
        .collect()
}

fn auto_range(series: &[Series]) -> (f64, f64) {
    let (lo, hi) = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1e-12) };
    (lo - pad, hi + pad)
}

fn tick(v: &f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-2..1e3).contains(&a) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn panel<DB: DrawingBackend>(
    area: &DrawingArea<DB, plotters::coord::Shift>,
    title: &str,
    t_end: f64,
    y_range: (f64, f64),
    series: &[Series],
) -> Result<(), String>
where
    DB::ErrorType: 'static,
{
    let mut chart = ChartBuilder::on(area)
        .caption(title, ("sans-serif", 18))
        .margin(10)
        .x_label_area_size(30)
        .y_label_area_size(70)
        .build_cartesian_2d(0.0..t_end, y_range.0..y_range.1)
        .map_err(|e| e.to_string())?;
    chart
        .configure_mesh()
        .x_desc("t [s]")
        .y_label_formatter(&tick)
        .draw()
        .map_err(|e| e.to_string())?;
    for s in series {
        let color = s.color;
        chart
            .draw_series(LineSeries::new(s.points.iter().copied(), color.stroke_width(2)))
            .map_err(|e| e.to_string())?
            .label(s.label.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| e.to_string())?;
    Ok(())
}

fn reference(cfg: &ClosedLoopConfig, rows: &[TraceRow], label: &str, pick: usize) -> Series {
    Series {
        label: label.into(),
        color: BLACK,
        points: rows
            .iter()
            .map(|row| {
                let r = cfg.reference.eval(row.t);
                (row.t, [r.y, r.ydot, r.yddot][pick])
            })
            .collect(),
    }
}

/// Writes `outputs.svg` (y, ydot, yddot against the reference) and
/// `funnel.svg` (e inside the funnel, and u). Several records are overlaid.
pub fn emit_plots(records: &[TraceRecord], cfg: &ClosedLoopConfig, out: &Path) -> Result<(), String> {
    if records.is_empty() || records.iter().any(|r| r.rows.is_empty()) {
        return Err("cannot plot an empty trace".into());
    }
    let t_end = records
        .iter()
        .map(|r| r.rows.last().map_or(0.0, |row| row.t))
        .fold(0.0, f64::max);
    let rows = &records[0].rows;

    let path = out.join("outputs.svg");
    {
        let root = SVGBackend::new(&path, SIZE).into_drawing_area();
        root.fill(&WHITE).map_err(|e| e.to_string())?;
        let areas = root.split_evenly((3, 1));
        let panels: [(&str, &str, &str, Column); 3] = [
            ("Output y and reference", "y", "y_ref", |r| r.y),
            ("First derivative", "ydot", "ydot_ref", |r| r.ydot),
            ("Second derivative", "yddot", "yddot_ref", |r| r.yddot),
        ];
        for (k, (title, name, ref_name, f)) in panels.into_iter().enumerate() {
            let mut series = trace_series(records, name, f);
            series.push(reference(cfg, rows, ref_name, k));
            panel(&areas[k], title, t_end, auto_range(&series), &series)?;
        }
        root.present().map_err(|e| format!("{}: {e}", path.display()))?;
    }

    let path = out.join("funnel.svg");
    {
        let root = SVGBackend::new(&path, (SIZE.0, 2 * SIZE.1 / 3)).into_drawing_area();
        root.fill(&WHITE).map_err(|e| e.to_string())?;
        let areas = root.split_evenly((2, 1));

        let mut series = trace_series(records, "e", |r| r.e);
        let max_e = series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1.abs()))
            .fold(0.0, f64::max);
        // the radius has a pole at t = 0; clip the envelope at the axis top
        let top = (1.2 * cfg.phi0.radius(t_end)).max(1.5 * max_e).max(1e-12);
        let upper: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.funnel0_inv.min(top))).collect();
        series.push(Series {
            label: "+1/phi0".into(),
            color: RGBColor(90, 90, 90),
            points: upper.clone(),
        });
        series.push(Series {
            label: "-1/phi0".into(),
            color: RGBColor(150, 150, 150),
            points: upper.iter().map(|&(t, v)| (t, -v)).collect(),
        });
        panel(&areas[0], "Tracking error in the performance funnel", t_end, (-top, top), &series)?;

        let series = trace_series(records, "u", |r| r.u);
        panel(&areas[1], "Input u", t_end, auto_range(&series), &series)?;
        root.present().map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}
