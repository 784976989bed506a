use std::fmt::Write;

use biphoton_core::Pattern;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn polyline(out: &mut String, p: &Pattern, y_max: f64, style: &str) {
    let axis = p.axis();
    let (x0, x1) = (axis.x_min(), axis.node(axis.len() - 1));
    let sx = (WIDTH - 2.0 * MARGIN) / (x1 - x0);
    let sy = (HEIGHT - 2.0 * MARGIN) / y_max;
    out.push_str("<polyline fill=\"none\" ");
    out.push_str(style);
    out.push_str(" points=\"");
    for (x, y) in axis.nodes().zip(p.density()) {
        write!(out, "{:.2},{:.2} ", MARGIN + (x - x0) * sx, HEIGHT - MARGIN - y * sy).unwrap();
    }
    out.push_str("\"/>\n");
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Analytic pattern as a solid line, oracle as a dotted line on the same axes.
pub fn render(title: &str, analytic: &Pattern, numeric: Option<&Pattern>) -> String {
    let y_max = numeric
        .map_or(analytic.max(), |n| n.max().max(analytic.max()))
        .max(f64::MIN_POSITIVE);
    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    )
    .unwrap();
    writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>").unwrap();
    writeln!(out, "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>", WIDTH / 2.0, escape(title)).unwrap();
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    writeln!(out, "<path d=\"M{left},{top} L{left},{bottom} L{right},{bottom}\" stroke=\"black\" fill=\"none\"/>").unwrap();

    let axis = analytic.axis();
    let (x0, x1) = (axis.x_min(), axis.node(axis.len() - 1));
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let px = left + t * (right - left);
        writeln!(out, "<line x1=\"{px:.2}\" y1=\"{bottom}\" x2=\"{px:.2}\" y2=\"{}\" stroke=\"black\"/>", bottom + 5.0).unwrap();
        writeln!(out, "<text x=\"{px:.2}\" y=\"{}\" text-anchor=\"middle\">{:.4}</text>", bottom + 20.0, x0 + t * (x1 - x0)).unwrap();
    }
    writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">x</text>", WIDTH / 2.0, HEIGHT - 12.0).unwrap();
    writeln!(out, "<text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">probability density</text>", HEIGHT / 2.0, HEIGHT / 2.0).unwrap();

    polyline(&mut out, analytic, y_max, "stroke=\"#1f4e9c\" stroke-width=\"1.5\"");
    if let Some(n) = numeric {
        polyline(&mut out, n, y_max, "stroke=\"#c0392b\" stroke-width=\"1.5\" stroke-dasharray=\"1,3\"");
    }
    let mut legend = vec![(analytic.label(), "#1f4e9c", "")];
    if let Some(n) = numeric {
        legend.push((n.label(), "#c0392b", " stroke-dasharray=\"1,3\""));
    }
    for (i, (label, colour, dash)) in legend.into_iter().enumerate() {
        let y = top + 14.0 + 18.0 * i as f64;
        writeln!(out, "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"{colour}\" stroke-width=\"1.5\"{dash}/>", right - 230.0, right - 200.0).unwrap();
        writeln!(out, "<text x=\"{}\" y=\"{}\">{}</text>", right - 194.0, y + 4.0, escape(label)).unwrap();
    }
    out.push_str("</svg>\n");
    out
}
