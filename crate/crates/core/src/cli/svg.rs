use std::fmt::Write as _;

use crate::linalg::C64;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

/// Eigenvalues of `U` as dots around the unit circle, eigenvalues of `T` as
/// crosses on the real axis.
pub fn unit_circle(evolution: &[C64], discriminant: &[f64], title: &str) -> String {
    let r = SIZE / 2.0 - MARGIN;
    let c = SIZE / 2.0;
    let map = |z: C64| (c + r * z.re, c - r * z.im);
    let mut s = header(SIZE, SIZE, title);
    let _ = writeln!(s, r##"<circle cx="{c}" cy="{c}" r="{r}" fill="none" stroke="#999"/>"##);
    let _ = writeln!(
        s,
        r##"<line x1="{}" y1="{c}" x2="{}" y2="{c}" stroke="#ccc"/>"##,
        c - r - 10.0,
        c + r + 10.0
    );
    for &x in discriminant {
        let (px, py) = map(C64::new(x, 0.0));
        let _ = writeln!(
            s,
            r##"<path d="M{:.2} {:.2} l6 6 m0 -6 l-6 6" stroke="#d62728"/>"##,
            px - 3.0,
            py - 3.0
        );
    }
    for &z in evolution {
        let (px, py) = map(z);
        let _ = writeln!(
            s,
            r##"<circle cx="{px:.2}" cy="{py:.2}" r="3" fill="#1f77b4" fill-opacity="0.7"/>"##
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Points on `[-1, 1]`, ticks colored by preimage level.
pub fn number_line(points: &[(f64, usize)], title: &str) -> String {
    let width = 2.0 * SIZE;
    let height = 120.0;
    let y = height / 2.0;
    let span = width - 2.0 * MARGIN;
    let map = |x: f64| MARGIN + (x + 1.0) / 2.0 * span;
    let max_level = points.iter().map(|p| p.1).max().unwrap_or(0).max(1) as f64;
    let mut s = header(width, height, title);
    let _ = writeln!(
        s,
        r##"<line x1="{MARGIN}" y1="{y}" x2="{}" y2="{y}" stroke="#333"/>"##,
        width - MARGIN
    );
    for (x, label) in [(-1.0, "-1"), (0.0, "0"), (1.0, "1")] {
        let px = map(x);
        let _ = writeln!(
            s,
            r##"<text x="{px:.2}" y="{}" font-size="12" text-anchor="middle">{label}</text>"##,
            y + 30.0
        );
    }
    for &(x, level) in points {
        let px = map(x);
        let shade = (200.0 * (1.0 - level as f64 / max_level)) as u8;
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="rgb({shade},{shade},255)"/>"#,
            y - 12.0,
            y + 12.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn header(width: f64, height: f64, title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_mark_per_point() {
        let s = unit_circle(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)], &[0.5], "a<b");
        assert_eq!(s.matches("fill-opacity").count(), 2);
        assert_eq!(s.matches("<path").count(), 1);
        assert!(s.contains("a&lt;b"));
        assert!(s.trim_end().ends_with("</svg>"));
        let line = number_line(&[(-0.5, 0), (0.25, 2)], "set");
        assert_eq!(line.matches("rgb(").count(), 2);
    }
}
