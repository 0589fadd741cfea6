//! Minimal static scatter plots.

use std::fmt::Write as _;

pub struct Series<'a> {
    pub name: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
}

const SIZE: f64 = 480.0;
const MARGIN: f64 = 56.0;

/// Scatter of all series on common axes `[0, max]`, with the diagonal
/// `y = x` dashed.
pub fn scatter(series: &[Series<'_>], x_label: &str, y_label: &str, max: f64) -> String {
    let max = if max > 0.0 { max } else { 1.0 };
    let span = SIZE - 2.0 * MARGIN;
    let px = |x: f64| MARGIN + x / max * span;
    let py = |y: f64| SIZE - MARGIN - y / max * span;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let (x0, y0, x1, y1) = (px(0.0), py(0.0), px(max), py(max));
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="gray" stroke-dasharray="4 4"/>"#
    );
    for k in 0..=4 {
        let v = max * f64::from(k) / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            px(v),
            y0 + 16.0,
            tick(v)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            py(v) + 4.0,
            tick(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        SIZE - 14.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        SIZE / 2.0,
        SIZE / 2.0,
        escape(y_label)
    );
    for (k, ser) in series.iter().enumerate() {
        let _ = writeln!(s, r#"<g fill="{}" fill-opacity="0.7">"#, ser.color);
        for &(x, y) in &ser.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3.5"/>"#,
                px(x),
                py(y)
            );
        }
        let ly = MARGIN + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<circle cx="{:.1}" cy="{:.1}" r="4"/>"#,
            MARGIN + 10.0,
            ly
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" fill="black" fill-opacity="1">{}</text>"#,
            MARGIN + 20.0,
            ly + 4.0,
            escape(ser.name)
        );
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.1}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
