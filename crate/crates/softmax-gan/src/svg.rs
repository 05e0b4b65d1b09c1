//! Minimal hand-rolled SVG scatter plots for eyeballing training runs:
//! data samples against generator samples on labeled axes. The output
//! is a single self-contained file with no scripts, fonts, or links.

use crate::data::GridBounds;
use crate::error::Result;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 46.0;
const MARGIN_BOTTOM: f64 = 62.0;
const N_TICKS: usize = 5;

const DATA_COLOR: &str = "#1f77b4";
const MODEL_COLOR: &str = "#d62728";

struct Frame {
    bounds: GridBounds,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let t = (x - self.bounds.min_x) / (self.bounds.max_x - self.bounds.min_x);
        MARGIN_LEFT + t * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    // SVG y grows downward; flip so larger data y plots higher.
    fn py(&self, y: f64) -> f64 {
        let t = (y - self.bounds.min_y) / (self.bounds.max_y - self.bounds.min_y);
        HEIGHT - MARGIN_BOTTOM - t * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }

    fn contains(&self, p: &[f64; 2]) -> bool {
        p[0] >= self.bounds.min_x
            && p[0] <= self.bounds.max_x
            && p[1] >= self.bounds.min_y
            && p[1] <= self.bounds.max_y
    }
}

fn tick_label(v: f64) -> String {
    if v.abs() < 5e-3 {
        "0".to_string()
    } else {
        format!("{v:.2}")
    }
}

/// Render data samples (filled circles) and generator samples (crosses)
/// over `bounds`. Points outside the bounds are dropped rather than
/// drawn off-frame.
pub fn scatter_svg(
    title: &str,
    data_points: &[[f64; 2]],
    model_points: &[[f64; 2]],
    bounds: &GridBounds,
) -> String {
    let frame = Frame { bounds: *bounds };
    let mut out = String::with_capacity(4096 + 80 * (data_points.len() + model_points.len()));
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"26\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        title
    ));

    // Plot frame.
    let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (y0, y1) = (MARGIN_TOP, HEIGHT - MARGIN_BOTTOM);
    out.push_str(&format!(
        "<rect x=\"{x0:.1}\" y=\"{y0:.1}\" width=\"{:.1}\" height=\"{:.1}\" \
         fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n",
        x1 - x0,
        y1 - y0
    ));

    // Ticks and numeric labels on both axes.
    for i in 0..N_TICKS {
        let t = i as f64 / (N_TICKS - 1) as f64;
        let vx = bounds.min_x + t * (bounds.max_x - bounds.min_x);
        let vy = bounds.min_y + t * (bounds.max_y - bounds.min_y);
        let px = frame.px(vx);
        let py = frame.py(vy);
        out.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{y1:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            y1 + 6.0
        ));
        out.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
             text-anchor=\"middle\">{}</text>\n",
            y1 + 20.0,
            tick_label(vx)
        ));
        out.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{x0:.1}\" y2=\"{py:.1}\" stroke=\"black\"/>\n",
            x0 - 6.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
             text-anchor=\"end\">{}</text>\n",
            x0 - 10.0,
            py + 4.0,
            tick_label(vy)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"14\" \
         text-anchor=\"middle\">x</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 16.0
    ));
    out.push_str(&format!(
        "<text x=\"20\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"14\" \
         text-anchor=\"middle\" transform=\"rotate(-90 20 {:.1})\">y</text>\n",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    ));

    // Data: translucent filled circles.
    for p in data_points.iter().filter(|p| frame.contains(p)) {
        out.push_str(&format!(
            "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"2.5\" fill=\"{DATA_COLOR}\" \
             fill-opacity=\"0.5\"/>\n",
            frame.px(p[0]),
            frame.py(p[1])
        ));
    }
    // Model: crosses, drawn on top.
    for p in model_points.iter().filter(|p| frame.contains(p)) {
        let (cx, cy) = (frame.px(p[0]), frame.py(p[1]));
        out.push_str(&format!(
            "<path d=\"M{:.1} {:.1}L{:.1} {:.1}M{:.1} {:.1}L{:.1} {:.1}\" \
             stroke=\"{MODEL_COLOR}\" stroke-width=\"1.2\"/>\n",
            cx - 3.0,
            cy - 3.0,
            cx + 3.0,
            cy + 3.0,
            cx - 3.0,
            cy + 3.0,
            cx + 3.0,
            cy - 3.0
        ));
    }

    // Legend, top-right corner of the plot area.
    let lx = x1 - 150.0;
    let ly = y0 + 14.0;
    out.push_str(&format!(
        "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"140\" height=\"46\" fill=\"white\" \
         stroke=\"black\" stroke-width=\"0.8\"/>\n",
        lx,
        ly - 10.0
    ));
    out.push_str(&format!(
        "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{DATA_COLOR}\"/>\n",
        lx + 14.0,
        ly + 4.0
    ));
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">data</text>\n",
        lx + 28.0,
        ly + 8.0
    ));
    out.push_str(&format!(
        "<path d=\"M{:.1} {:.1}L{:.1} {:.1}M{:.1} {:.1}L{:.1} {:.1}\" stroke=\"{MODEL_COLOR}\" \
         stroke-width=\"1.2\"/>\n",
        lx + 11.0,
        ly + 21.0,
        lx + 17.0,
        ly + 27.0,
        lx + 11.0,
        ly + 27.0,
        lx + 17.0,
        ly + 21.0
    ));
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">generated</text>\n",
        lx + 28.0,
        ly + 28.0
    ));
    out.push_str("</svg>\n");
    out
}

pub fn write_scatter_svg(
    path: &std::path::Path,
    title: &str,
    data_points: &[[f64; 2]],
    model_points: &[[f64; 2]],
    bounds: &GridBounds,
) -> Result<()> {
    std::fs::write(path, scatter_svg(title, data_points, model_points, bounds))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds() -> GridBounds {
        GridBounds::square(3.0).unwrap()
    }

    #[test]
    fn structure_and_marker_counts() {
        let data = vec![[0.0, 0.0], [1.0, 1.0], [-2.0, 0.5]];
        let model = vec![[0.5, -0.5], [2.0, 2.0]];
        let svg = scatter_svg("run", &data, &model, &bounds());
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(svg.trim_end().ends_with("</svg>"));
        // 3 data circles + 1 legend circle.
        assert_eq!(svg.matches("<circle").count(), 4);
        // 2 model crosses + 1 legend cross.
        assert_eq!(svg.matches("<path").count(), 3);
        assert!(svg.contains(">data</text>"));
        assert!(svg.contains(">generated</text>"));
        assert!(svg.contains(">x</text>"));
        assert!(svg.contains(">y</text>"));
    }

    #[test]
    fn out_of_bounds_points_are_dropped() {
        let svg = scatter_svg("t", &[[10.0, 0.0]], &[[0.0, -10.0]], &bounds());
        assert_eq!(svg.matches("<circle").count(), 1); // legend only
        assert_eq!(svg.matches("<path").count(), 1); // legend only
    }

    #[test]
    fn no_external_references() {
        let svg = scatter_svg("t", &[[0.0, 0.0]], &[], &bounds());
        assert!(!svg.contains("href"));
        assert!(!svg.contains("<script"));
        assert!(!svg.contains("@import"));
        // The only URL is the SVG namespace declaration itself.
        assert_eq!(svg.matches("http").count(), 1);
    }

    #[test]
    fn axes_are_labeled_with_tick_values() {
        let svg = scatter_svg("t", &[], &[], &bounds());
        assert!(svg.contains(">-3.00</text>"));
        assert!(svg.contains(">3.00</text>"));
        assert!(svg.contains(">0</text>"));
    }

    #[test]
    fn output_is_deterministic() {
        let data = vec![[0.1, 0.2]];
        let model = vec![[0.3, 0.4]];
        assert_eq!(
            scatter_svg("same", &data, &model, &bounds()),
            scatter_svg("same", &data, &model, &bounds())
        );
    }
}
