//! Minimal static SVG renderers for the optional `--svg` outputs: a bar
//! chart for label distributions and a choropleth for per-area values.
//! Data files are the primary artifacts; these are quick-look renderings.

use std::collections::BTreeMap;
use std::fmt::Write;

use geobench_core::geo::AreaGeometry;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 60.0;

/// Five-stop viridis-style ramp: dark purple (low) to yellow (high).
fn color_for(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let (r0, g0, b0) = STOPS[i];
    let (r1, g1, b1) = STOPS[i + 1];
    format!(
        "rgb({},{},{})",
        (r0 + (r1 - r0) * f).round() as u8,
        (g0 + (g1 - g0) * f).round() as u8,
        (b0 + (b1 - b0) * f).round() as u8
    )
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Vertical bar chart; bars in the given order, labels slanted under the
/// axis.
pub fn bar_chart(title: &str, bars: &[(String, f64)]) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\">"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"30\" text-anchor=\"middle\" font-size=\"18\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
    let max = bars.iter().map(|(_, v)| *v).fold(0.0_f64, f64::max).max(f64::MIN_POSITIVE);
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN - 40.0;
    let slot = plot_w / bars.len().max(1) as f64;
    let bar_w = slot * 0.8;
    for (i, (label, value)) in bars.iter().enumerate() {
        let h = value / max * plot_h;
        let x = MARGIN + i as f64 * slot + slot * 0.1;
        let y = MARGIN + (plot_h - h);
        let _ = writeln!(
            svg,
            "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{bar_w:.1}\" height=\"{h:.1}\" \
             fill=\"{}\"><title>{}: {value}</title></rect>",
            color_for(value / max),
            escape(label)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"end\" \
             transform=\"rotate(-45 {:.1} {:.1})\">{}</text>",
            x + bar_w / 2.0,
            MARGIN + plot_h + 14.0,
            x + bar_w / 2.0,
            MARGIN + plot_h + 14.0,
            escape(label)
        );
    }
    let _ = writeln!(
        svg,
        "<line x1=\"{MARGIN}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#333\"/>",
        MARGIN + plot_h,
        WIDTH - MARGIN,
        MARGIN + plot_h
    );
    svg.push_str("</svg>\n");
    svg
}

/// Choropleth of per-area values over the loaded polygons, plate-carrée
/// projection fitted to the geometry bounding box.
pub fn choropleth(title: &str, areas: &[AreaGeometry], values: &BTreeMap<String, f64>) -> String {
    let mut lat_min = f64::MAX;
    let mut lat_max = f64::MIN;
    let mut lon_min = f64::MAX;
    let mut lon_max = f64::MIN;
    for area in areas {
        for ring in &area.rings {
            for &(lat, lon) in ring {
                lat_min = lat_min.min(lat);
                lat_max = lat_max.max(lat);
                lon_min = lon_min.min(lon);
                lon_max = lon_max.max(lon);
            }
        }
    }
    let lat_span = (lat_max - lat_min).max(1e-9);
    let lon_span = (lon_max - lon_min).max(1e-9);
    let scale = ((WIDTH - 2.0 * MARGIN) / lon_span).min((HEIGHT - 2.0 * MARGIN) / lat_span);
    let project = |lat: f64, lon: f64| {
        let x = MARGIN + (lon - lon_min) * scale;
        let y = HEIGHT - MARGIN - (lat - lat_min) * scale;
        (x, y)
    };

    let vmax = values.values().copied().fold(0.0_f64, f64::max).max(f64::MIN_POSITIVE);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\">"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"30\" text-anchor=\"middle\" font-size=\"18\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
    for area in areas {
        let value = values.get(&area.name).copied().unwrap_or(0.0);
        let fill = color_for(value / vmax);
        // One path per area, rings as subpaths, so holes stay holes.
        let mut d = String::new();
        for ring in &area.rings {
            for (i, &(lat, lon)) in ring.iter().enumerate() {
                let (x, y) = project(lat, lon);
                let _ = write!(d, "{}{x:.1} {y:.1} ", if i == 0 { "M" } else { "L" });
            }
            d.push_str("Z ");
        }
        let _ = writeln!(
            svg,
            "<path d=\"{}\" fill=\"{fill}\" fill-rule=\"evenodd\" \
             stroke=\"#333\" stroke-width=\"0.5\"><title>{}: {value}</title></path>",
            d.trim_end(),
            escape(&area.name)
        );
    }
    // Simple two-point legend.
    let _ = writeln!(
        svg,
        "<rect x=\"{MARGIN}\" y=\"{}\" width=\"20\" height=\"12\" fill=\"{}\"/>\
         <text x=\"{}\" y=\"{}\" font-size=\"11\">0</text>",
        HEIGHT - 34.0,
        color_for(0.0),
        MARGIN + 26.0,
        HEIGHT - 24.0
    );
    let _ = writeln!(
        svg,
        "<rect x=\"{}\" y=\"{}\" width=\"20\" height=\"12\" fill=\"{}\"/>\
         <text x=\"{}\" y=\"{}\" font-size=\"11\">{vmax}</text>",
        MARGIN + 70.0,
        HEIGHT - 34.0,
        color_for(1.0),
        MARGIN + 96.0,
        HEIGHT - 24.0
    );
    svg.push_str("</svg>\n");
    svg
}
