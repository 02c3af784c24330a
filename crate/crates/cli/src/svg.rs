//! Minimal SVG 1.1 scatter/polyline writer in ω-plane coordinates.
//!
//! The viewBox is the plotted rectangle itself with the imaginary axis
//! flipped (SVG y = −Im ω), and the aspect ratio is not preserved. Marker
//! sizes are therefore given in pixels and converted per axis. Numbers are
//! printed with a fixed precision so identical input gives identical bytes.

use std::fmt::Write;

use num_complex::Complex64;

pub const EIGEN: &str = "#1f4fd1";
pub const ESSENTIAL: &str = "#d11f1f";
pub const GAMMA: &str = "#1a8a3a";
pub const POLE: &str = "#000000";
pub const AXIS: &str = "#b0b0b0";

pub struct Plot {
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    width: f64,
    height: f64,
    body: String,
}

fn n(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" { "0.000000".into() } else { s }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

impl Plot {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Plot { re_min, re_max, im_min, im_max, width: 1200.0, height: 600.0, body: String::new() }
    }

    fn sx(&self) -> f64 {
        (self.re_max - self.re_min) / self.width
    }

    fn sy(&self) -> f64 {
        (self.im_max - self.im_min) / self.height
    }

    fn visible(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    pub fn axes(&mut self) {
        let (a, b) = (Complex64::new(self.re_min, 0.0), Complex64::new(self.re_max, 0.0));
        if self.im_min <= 0.0 && self.im_max >= 0.0 {
            self.polyline(&[a, b], AXIS, 1.0, None);
        }
        if self.re_min <= 0.0 && self.re_max >= 0.0 {
            self.polyline(&[Complex64::new(0.0, self.im_min), Complex64::new(0.0, self.im_max)], AXIS, 1.0, None);
        }
    }

    /// Line through the points in order; stroke width in pixels.
    pub fn polyline(&mut self, pts: &[Complex64], color: &str, width: f64, dash: Option<&str>) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts.iter().map(|z| format!("{},{}", n(z.re), n(-z.im))).collect();
        let dash = dash.map(|d| format!(" stroke-dasharray=\"{d}\"")).unwrap_or_default();
        let _ = writeln!(
            self.body,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\" vector-effect=\"non-scaling-stroke\"{dash}/>",
            coords.join(" ")
        );
    }

    pub fn circles(&mut self, pts: &[Complex64], color: &str, radius_px: f64) {
        let (rx, ry) = (radius_px * self.sx(), radius_px * self.sy());
        for z in pts.iter().copied().filter(|z| self.visible(*z)).collect::<Vec<_>>() {
            let _ = writeln!(
                self.body,
                "<ellipse cx=\"{}\" cy=\"{}\" rx=\"{}\" ry=\"{}\" fill=\"{color}\"/>",
                n(z.re),
                n(-z.im),
                n(rx),
                n(ry)
            );
        }
    }

    pub fn crosses(&mut self, pts: &[Complex64], color: &str, half_px: f64) {
        let (dx, dy) = (half_px * self.sx(), half_px * self.sy());
        for z in pts.iter().copied().filter(|z| self.visible(*z)).collect::<Vec<_>>() {
            let (x, y) = (z.re, -z.im);
            let _ = writeln!(
                self.body,
                "<path d=\"M{} {}L{} {}M{} {}L{} {}\" stroke=\"{color}\" stroke-width=\"2\" vector-effect=\"non-scaling-stroke\"/>",
                n(x - dx),
                n(y - dy),
                n(x + dx),
                n(y + dy),
                n(x - dx),
                n(y + dy),
                n(x + dx),
                n(y - dy)
            );
        }
    }

    pub fn squares(&mut self, pts: &[Complex64], color: &str, half_px: f64) {
        let (dx, dy) = (half_px * self.sx(), half_px * self.sy());
        for z in pts.iter().copied().filter(|z| self.visible(*z)).collect::<Vec<_>>() {
            let _ = writeln!(
                self.body,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{color}\"/>",
                n(z.re - dx),
                n(-z.im - dy),
                n(2.0 * dx),
                n(2.0 * dy)
            );
        }
    }

    pub fn render(&self, title: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\" preserveAspectRatio=\"none\">",
            self.width,
            self.height,
            n(self.re_min),
            n(-self.im_max),
            n(self.re_max - self.re_min),
            n(self.im_max - self.im_min)
        );
        let _ = writeln!(out, "<title>{}</title>", escape(title));
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
            n(self.re_min),
            n(-self.im_max),
            n(self.re_max - self.re_min),
            n(self.im_max - self.im_min)
        );
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}
