//! SVG output: heatmaps as embedded base64 PNG tiles and log-log line plots.
//! No timestamps or other run-dependent metadata are written.

use std::fmt::Write;

use base64::Engine;

use crate::error::{QcError, Result};
use crate::field::Field;

/// Five-stop approximation of the viridis colormap.
const STOPS: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

fn color(t: f64) -> [u8; 3] {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let x = t * (STOPS.len() - 1) as f64;
    let i = (x.floor() as usize).min(STOPS.len() - 2);
    let s = x - i as f64;
    let mut out = [0u8; 3];
    for (k, o) in out.iter_mut().enumerate() {
        *o = (STOPS[i][k] * (1.0 - s) + STOPS[i + 1][k] * s).round() as u8;
    }
    out
}

fn png_bytes(width: usize, height: usize, rgb: &[u8]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut buf, width as u32, height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc
            .write_header()
            .map_err(|e| QcError::Config(format!("png encoding failed: {e}")))?;
        w.write_image_data(rgb)
            .map_err(|e| QcError::Config(format!("png encoding failed: {e}")))?;
    }
    Ok(buf)
}

/// Heatmap of `|f|` with north up; at most `max_px` pixels per side.
pub fn heatmap_svg(f: &Field, title: &str, max_px: usize) -> Result<String> {
    let n = f.grid().n();
    let stride = n.div_ceil(max_px.max(1)).max(1);
    let m = n.div_ceil(stride);
    let mut mags = Vec::with_capacity(m * m);
    // row 0 of the image is the top (largest y)
    for r in (0..m).rev() {
        for c in 0..m {
            mags.push(f.get((r * stride).min(n - 1), (c * stride).min(n - 1)).norm());
        }
    }
    let top = mags.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let scale = if top > 0.0 { 1.0 / top } else { 0.0 };
    let rgb: Vec<u8> = mags.iter().flat_map(|v| color(v * scale)).collect();
    let b64 = base64::engine::general_purpose::STANDARD.encode(png_bytes(m, m, &rgb)?);
    let g = f.grid();
    let (lo, hi) = (g.origin(), g.origin() + g.side());
    let mut s = String::new();
    let size = m.max(256);
    let _ = write!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">
<text x="10" y="20" font-family="sans-serif" font-size="14">{title}</text>
<image x="10" y="30" width="{size}" height="{size}" style="image-rendering:pixelated" href="data:image/png;base64,{b64}"/>
<text x="10" y="{yl}" font-family="sans-serif" font-size="11">x, y in [{x0:.3}, {x1:.3}] x [{y0:.3}, {y1:.3}]; max |f| = {top:.4e}</text>
</svg>
"#,
        w = size + 20,
        h = size + 60,
        yl = size + 48,
        x0 = lo.re,
        x1 = hi.re,
        y0 = lo.im,
        y1 = hi.im,
    );
    Ok(s)
}

/// Named series of `(x, y)` points on log-log axes; non-positive values are
/// dropped.
pub fn loglog_svg(series: &[(String, Vec<(f64, f64)>)], title: &str, xlabel: &str, ylabel: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const M: f64 = 60.0;
    const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, p)| p.iter().copied())
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (0.0, 1.0, 0.0, 1.0);
    if !pts.is_empty() {
        x0 = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        x1 = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        y0 = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        y1 = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    }
    let pad = |a: f64, b: f64| {
        if b - a < 1e-9 {
            (a - 0.5, b + 0.5)
        } else {
            (a - 0.05 * (b - a), b + 0.05 * (b - a))
        }
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let px = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let py = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<text x="{M}" y="24" font-size="14">{title}</text>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * M,
        H - 2.0 * M
    );
    for k in (x0.ceil() as i64)..=(x1.floor() as i64) {
        let x = px(k as f64);
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">1e{k}</text>"#,
            H - M + 16.0
        );
    }
    for k in (y0.ceil() as i64)..=(y1.floor() as i64) {
        let y = py(k as f64);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{y:.1}" text-anchor="end">1e{k}</text>"#,
            M - 6.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{xlabel}</text>"#,
        W / 2.0,
        H - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{ylabel}</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (i, (name, p)) in series.iter().enumerate() {
        let col = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = p
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", px(x.log10()), py(y.log10())))
            .collect();
        if !path.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{col}" stroke-width="2" points="{}"/>"#,
                path.join(" ")
            );
            for q in &path {
                let (cx, cy) = q.split_once(',').expect("formatted pair");
                let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{col}"/>"#);
            }
        }
        let ly = M + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{ly:.1}" fill="{col}">{name}</text>"#,
            W - M - 150.0
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpec;
    use num_complex::Complex64;

    #[test]
    fn heatmap_embeds_a_png() {
        let g = GridSpec::new(Complex64::new(0.0, 0.0), 1.0, 32).unwrap();
        let f = Field::sample(g, |z| z).unwrap();
        let s = heatmap_svg(&f, "z", 16).unwrap();
        let start = s.find("base64,").unwrap() + 7;
        let end = start + s[start..].find('"').unwrap();
        let bytes = base64::engine::general_purpose::STANDARD
            .decode(&s[start..end])
            .unwrap();
        assert_eq!(&bytes[1..4], b"PNG");
        assert_eq!(s, heatmap_svg(&f, "z", 16).unwrap());
    }

    #[test]
    fn loglog_skips_non_positive_points() {
        let s = loglog_svg(
            &[("a".into(), vec![(1.0, 1.0), (10.0, 0.0), (100.0, 0.01)])],
            "t",
            "n",
            "v",
        );
        assert_eq!(s.matches("<circle").count(), 2);
        assert_eq!(color(0.0), [68, 1, 84]);
        assert_eq!(color(1.0), [253, 231, 37]);
    }
}
