//! Static SVG plots of mean error against time.

use std::path::Path;

use plotters::prelude::*;

const FLOOR_DEG: f64 = 1e-9;

/// One curve: legend label and `(t_s, mean_err_deg)` points.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Writes a log-scale error-vs-time chart. Errors are returned as text so the
/// caller can downgrade them to warnings.
pub fn plot_mean_errors(path: &Path, title: &str, series: &[Series]) -> Result<(), String> {
    let t_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .fold(1.0_f64, f64::max);
    let (lo, hi) = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1.max(FLOOR_DEG)))
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() || hi <= 0.0 {
        return Err("nothing to plot".into());
    }
    let y_range = (lo * 0.5)..(hi * 2.0);

    let root = SVGBackend::new(path, (1000, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| e.to_string())?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(45)
        .y_label_area_size(70)
        .build_cartesian_2d(0.0..t_max, y_range.log_scale())
        .map_err(|e| e.to_string())?;
    chart
        .configure_mesh()
        .x_desc("time [s]")
        .y_desc("mean attitude error [deg]")
        .draw()
        .map_err(|e| e.to_string())?;

    for (i, s) in series.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(s.points.iter().map(|&(t, e)| (t, e.max(FLOOR_DEG))), color.stroke_width(2)))
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
    root.present().map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_svg() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.svg");
        let series = vec![
            Series { label: "a".into(), points: vec![(1.0, 1.0), (2.0, 0.1), (3.0, 0.0)] },
            Series { label: "b".into(), points: vec![(1.0, 2.0), (3.0, 0.5)] },
        ];
        plot_mean_errors(&path, "t", &series).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
    }

    #[test]
    fn empty_input_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(plot_mean_errors(&dir.path().join("p.svg"), "t", &[]).is_err());
    }
}
