//! Minimal static SVG line chart for waterfall curves.

use crate::waterfall::PredictedBand;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 48.0;
const PALETTE: [&str; 4] = ["#d6336c", "#2f9e44", "#1c7ed6", "#f08c00"];

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn polyline(values: &[f64], y_min: f64, y_max: f64, style: &str) -> String {
    let n = values.len();
    let x = |i: usize| PAD + if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 } * (W - 2.0 * PAD);
    let y = |v: f64| PAD + (y_max - v.clamp(y_min, y_max)) / (y_max - y_min) * (H - 2.0 * PAD);
    let step = (n / 1000).max(1);
    let pts: Vec<String> = (0..n)
        .step_by(step)
        .chain(std::iter::once(n - 1))
        .map(|i| format!("{:.1},{:.1}", x(i), y(values[i])))
        .collect();
    format!("<polyline fill=\"none\" {style} points=\"{}\"/>\n", pts.join(" "))
}

/// Waterfall chart: x is the patient fraction, y the best % change. `series`
/// are extra samples (e.g. monotherapy or observed arms) drawn as their own
/// sorted curves.
pub fn waterfall_svg(band: &PredictedBand, series: &[(&str, &[f64])]) -> String {
    let all = band
        .predicted
        .iter()
        .chain(series.iter().flat_map(|(_, v)| v.iter()));
    let y_max = all.fold(0.0f64, |m, &v| m.max(v)).clamp(20.0, 100.0);
    let y_min = -100.0;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" font-family=\"sans-serif\" font-size=\"11\">\n"
    );
    out.push_str(&format!(
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>\n",
        W - 2.0 * PAD,
        H - 2.0 * PAD
    ));
    let zero_y = PAD + y_max / (y_max - y_min) * (H - 2.0 * PAD);
    out.push_str(&format!(
        "<line x1=\"{PAD}\" x2=\"{}\" y1=\"{zero_y:.1}\" y2=\"{zero_y:.1}\" stroke=\"#bbb\"/>\n",
        W - PAD
    ));
    out.push_str(&format!("<text x=\"4\" y=\"{}\">{y_max}</text>\n", PAD + 4.0));
    out.push_str(&format!("<text x=\"4\" y=\"{}\">-100</text>\n", H - PAD + 4.0));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\">patient fraction</text>\n",
        W / 2.0 - 40.0,
        H - 12.0
    ));
    if let (Some(lo), Some(hi)) = (&band.lower, &band.upper) {
        for edge in [lo, hi] {
            out.push_str(&polyline(edge, y_min, y_max, "stroke=\"#999\" stroke-width=\"1\""));
        }
    }
    for (k, (label, values)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        out.push_str(&polyline(
            &sorted_desc(values),
            y_min,
            y_max,
            &format!("stroke=\"{color}\" stroke-width=\"1.5\""),
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{label}</text>\n",
            W - PAD - 150.0,
            PAD + 16.0 + 14.0 * k as f64
        ));
    }
    out.push_str(&polyline(
        &band.predicted,
        y_min,
        y_max,
        "stroke=\"#000\" stroke-width=\"2\" stroke-dasharray=\"6 4\"",
    ));
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_polylines() {
        let band = PredictedBand {
            index: vec![0.0, 0.5, 1.0],
            predicted: vec![10.0, -20.0, -100.0],
            lower: Some(vec![5.0, -30.0, -100.0]),
            upper: Some(vec![15.0, -10.0, -90.0]),
            mean: None,
            widened: 0,
        };
        let svg = waterfall_svg(&band, &[("mono", &[-50.0, 30.0])]);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert!(svg.contains(">mono<"));
    }
}
