//! Hard-edged RGB rasterization.
//!
//! Coverage is a point test at each pixel's integer sample position, with no
//! antialiasing, so every primitive is bit-exact and cheap to re-derive in
//! tests. All drawing clips silently to the canvas.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, TAU};

use crate::error::{param_err, Result};
use crate::geometry::{wrap_angle, CubicBezier, Point};

/// Maximum chord deviation used when flattening curves, in pixels.
pub const FLATTEN_TOLERANCE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Color {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Color {
    pub const WHITE: Color = Color::rgb(255, 255, 255);
    pub const BLACK: Color = Color::rgb(0, 0, 0);
    pub const BLUE: Color = Color::rgb(0, 0, 255);
    pub const RED: Color = Color::rgb(255, 0, 0);
    pub const MASK_GRAY: Color = Color::rgb(128, 128, 128);

    pub const fn rgb(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }
}

/// Row-major RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canvas {
    width: usize,
    height: usize,
    pixels: Vec<Color>,
}

/// Inclusive pixel bounds of a float box, clipped to the canvas.
fn clip_box(
    canvas: &Canvas,
    min_x: f64,
    min_y: f64,
    max_x: f64,
    max_y: f64,
) -> Option<(usize, usize, usize, usize)> {
    if !(min_x.is_finite() && min_y.is_finite() && max_x.is_finite() && max_y.is_finite()) {
        return None;
    }
    if canvas.width == 0 || canvas.height == 0 {
        return None;
    }
    let x0 = libm::ceil(min_x).max(0.0);
    let y0 = libm::ceil(min_y).max(0.0);
    let x1 = libm::floor(max_x).min((canvas.width - 1) as f64);
    let y1 = libm::floor(max_y).min((canvas.height - 1) as f64);
    if x0 > x1 || y0 > y1 {
        return None;
    }
    Some((x0 as usize, y0 as usize, x1 as usize, y1 as usize))
}

fn dist2_to_segment(px: f64, py: f64, a: Point, b: Point) -> f64 {
    let (abx, aby) = (b.x - a.x, b.y - a.y);
    let (apx, apy) = (px - a.x, py - a.y);
    let len2 = abx * abx + aby * aby;
    if len2 == 0.0 {
        return apx * apx + apy * apy;
    }
    let t = ((apx * abx + apy * aby) / len2).clamp(0.0, 1.0);
    let dx = apx - abx * t;
    let dy = apy - aby * t;
    dx * dx + dy * dy
}

impl Canvas {
    /// White canvas.
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, Color::WHITE)
    }

    pub fn filled(width: usize, height: usize, color: Color) -> Self {
        Self {
            width,
            height,
            pixels: vec![color; width * height],
        }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<Color>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(param_err!(
                "{} pixels for a {width}x{height} canvas",
                pixels.len()
            ));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds a canvas from packed `RGBRGB...` bytes.
    pub fn from_rgb_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != width * height * 3 {
            return Err(param_err!(
                "{} bytes for a {width}x{height} RGB canvas",
                bytes.len()
            ));
        }
        let pixels = bytes
            .chunks_exact(3)
            .map(|c| Color::rgb(c[0], c[1], c[2]))
            .collect();
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn to_rgb_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.pixels.len() * 3);
        for c in &self.pixels {
            out.extend_from_slice(&[c.r, c.g, c.b]);
        }
        out
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Color] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> Option<Color> {
        (x < self.width && y < self.height).then(|| self.pixels[y * self.width + x])
    }

    pub fn set(&mut self, x: usize, y: usize, color: Color) {
        if x < self.width && y < self.height {
            self.pixels[y * self.width + x] = color;
        }
    }

    pub fn count(&self, color: Color) -> usize {
        self.pixels.iter().filter(|&&c| c == color).count()
    }

    /// Fills the pixels whose sample points lie in `[x0, x1) × [y0, y1)`.
    pub fn fill_rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, color: Color) {
        // Half-open: shrink the upper bound just below the edge.
        let Some((ax, ay, bx, by)) = clip_box(self, x0, y0, x1, y1) else {
            return;
        };
        for y in ay..=by {
            if (y as f64) >= y1 {
                continue;
            }
            for x in ax..=bx {
                if (x as f64) < x1 {
                    self.pixels[y * self.width + x] = color;
                }
            }
        }
    }

    /// Sets every pixel within `radius` of `center`.
    pub fn draw_disc(&mut self, center: Point, radius: f64, color: Color) {
        if !(radius >= 0.0) || !center.is_finite() {
            return;
        }
        let r2 = radius * radius;
        let Some((x0, y0, x1, y1)) = clip_box(
            self,
            center.x - radius,
            center.y - radius,
            center.x + radius,
            center.y + radius,
        ) else {
            return;
        };
        for y in y0..=y1 {
            let dy = y as f64 - center.y;
            for x in x0..=x1 {
                let dx = x as f64 - center.x;
                if dx * dx + dy * dy <= r2 {
                    self.pixels[y * self.width + x] = color;
                }
            }
        }
    }

    /// Sets every pixel within `width / 2` of the segment `ab` (round caps).
    pub fn draw_segment(&mut self, a: Point, b: Point, width: f64, color: Color) {
        if !(width > 0.0) || !a.is_finite() || !b.is_finite() {
            return;
        }
        let h = width / 2.0;
        let h2 = h * h;
        let Some((x0, y0, x1, y1)) = clip_box(
            self,
            a.x.min(b.x) - h,
            a.y.min(b.y) - h,
            a.x.max(b.x) + h,
            a.y.max(b.y) + h,
        ) else {
            return;
        };
        for y in y0..=y1 {
            for x in x0..=x1 {
                if dist2_to_segment(x as f64, y as f64, a, b) <= h2 {
                    self.pixels[y * self.width + x] = color;
                }
            }
        }
    }

    /// Draws a cubic Bézier as a stroked polyline flattened to within
    /// [`FLATTEN_TOLERANCE`].
    pub fn draw_cubic_bezier(&mut self, curve: &CubicBezier, width: f64, color: Color) {
        let pts = curve.flatten(FLATTEN_TOLERANCE);
        for w in pts.windows(2) {
            self.draw_segment(w[0], w[1], width, color);
        }
    }

    /// Fills the annular sector `r_inner ≤ d < r_outer`, with the pixel's
    /// angle in `[angle0, angle1)` measured from `angle0` counter to the
    /// y-down axis. A span of 2π or more fills the whole ring.
    pub fn draw_annulus_arc(
        &mut self,
        center: Point,
        r_inner: f64,
        r_outer: f64,
        angle0: f64,
        angle1: f64,
        color: Color,
    ) {
        if !(r_inner >= 0.0 && r_outer > r_inner) || !center.is_finite() {
            return;
        }
        let span = angle1 - angle0;
        if !(span > 0.0) {
            return;
        }
        let full = span >= TAU;
        let (min_x, min_y, max_x, max_y) = if full {
            (
                center.x - r_outer,
                center.y - r_outer,
                center.x + r_outer,
                center.y + r_outer,
            )
        } else {
            sector_bounds(center, r_inner, r_outer, angle0, span)
        };
        let Some((x0, y0, x1, y1)) = clip_box(self, min_x, min_y, max_x, max_y) else {
            return;
        };
        let (ri2, ro2) = (r_inner * r_inner, r_outer * r_outer);
        for y in y0..=y1 {
            let dy = y as f64 - center.y;
            for x in x0..=x1 {
                let dx = x as f64 - center.x;
                let d2 = dx * dx + dy * dy;
                if d2 < ri2 || d2 >= ro2 {
                    continue;
                }
                if full || wrap_angle(libm::atan2(dy, dx) - angle0) < span {
                    self.pixels[y * self.width + x] = color;
                }
            }
        }
    }

    /// Radial wall at `angle` from `r_inner` to `r_outer`.
    pub fn draw_radial_wall(
        &mut self,
        center: Point,
        r_inner: f64,
        r_outer: f64,
        angle: f64,
        width: f64,
        color: Color,
    ) {
        if !(r_inner >= 0.0 && r_outer >= r_inner) {
            return;
        }
        let a = Point::polar(center, r_inner, angle);
        let b = Point::polar(center, r_outer, angle);
        self.draw_segment(a, b, width, color);
    }
}

fn sector_bounds(center: Point, r_in: f64, r_out: f64, a0: f64, span: f64) -> (f64, f64, f64, f64) {
    let mut pts: Vec<Point> = vec![
        Point::polar(center, r_in, a0),
        Point::polar(center, r_in, a0 + span),
        Point::polar(center, r_out, a0),
        Point::polar(center, r_out, a0 + span),
    ];
    // Axis extremes reached inside the span.
    let first = libm::ceil(a0 / FRAC_PI_2) as i64;
    let mut k = first;
    while (k as f64) * FRAC_PI_2 <= a0 + span {
        pts.push(Point::polar(center, r_out, k as f64 * FRAC_PI_2));
        k += 1;
    }
    let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        b.0 = b.0.min(p.x);
        b.1 = b.1.min(p.y);
        b.2 = b.2.max(p.x);
        b.3 = b.3.max(p.y);
    }
    // Cover rounding in the trig evaluation.
    (b.0 - 1.0, b.1 - 1.0, b.2 + 1.0, b.3 + 1.0)
}

/// Box-filter resize. Integer factors average whole blocks in integer
/// arithmetic; other sizes weight source pixels by overlap area. Each channel
/// is rounded half up.
pub fn downscale(canvas: &Canvas, target_w: usize, target_h: usize) -> Result<Canvas> {
    if target_w == 0 || target_h == 0 {
        return Err(param_err!("target size {target_w}x{target_h} has a zero dimension"));
    }
    let (w, h) = (canvas.width, canvas.height);
    if w == 0 || h == 0 {
        return Err(param_err!("source canvas is empty"));
    }
    if (w, h) == (target_w, target_h) {
        return Ok(canvas.clone());
    }
    let mut out = Vec::with_capacity(target_w * target_h);
    if w % target_w == 0 && h % target_h == 0 {
        let (fx, fy) = (w / target_w, h / target_h);
        let n = (fx * fy) as u32;
        for ty in 0..target_h {
            for tx in 0..target_w {
                let mut sum = [0u32; 3];
                for y in ty * fy..(ty + 1) * fy {
                    for x in tx * fx..(tx + 1) * fx {
                        let c = canvas.pixels[y * w + x];
                        sum[0] += u32::from(c.r);
                        sum[1] += u32::from(c.g);
                        sum[2] += u32::from(c.b);
                    }
                }
                let round = |s: u32| ((2 * s + n) / (2 * n)) as u8;
                out.push(Color::rgb(round(sum[0]), round(sum[1]), round(sum[2])));
            }
        }
    } else {
        let sx = w as f64 / target_w as f64;
        let sy = h as f64 / target_h as f64;
        for ty in 0..target_h {
            let (y_lo, y_hi) = (ty as f64 * sy, (ty + 1) as f64 * sy);
            for tx in 0..target_w {
                let (x_lo, x_hi) = (tx as f64 * sx, (tx + 1) as f64 * sx);
                let mut acc = [0.0f64; 3];
                let mut area = 0.0;
                let ys = libm::floor(y_lo) as usize;
                let ye = (libm::ceil(y_hi) as usize).min(h);
                let xs = libm::floor(x_lo) as usize;
                let xe = (libm::ceil(x_hi) as usize).min(w);
                for y in ys..ye {
                    let oy = (y_hi.min((y + 1) as f64) - y_lo.max(y as f64)).max(0.0);
                    for x in xs..xe {
                        let ox = (x_hi.min((x + 1) as f64) - x_lo.max(x as f64)).max(0.0);
                        let wgt = ox * oy;
                        let c = canvas.pixels[y * w + x];
                        acc[0] += wgt * f64::from(c.r);
                        acc[1] += wgt * f64::from(c.g);
                        acc[2] += wgt * f64::from(c.b);
                        area += wgt;
                    }
                }
                let round = |v: f64| libm::floor(v / area + 0.5).clamp(0.0, 255.0) as u8;
                out.push(Color::rgb(round(acc[0]), round(acc[1]), round(acc[2])));
            }
        }
    }
    Canvas::from_pixels(target_w, target_h, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_zero_disc_sets_one_pixel() {
        let mut c = Canvas::new(10, 10);
        c.draw_disc(Point::new(4.0, 5.0), 0.0, Color::BLACK);
        assert_eq!(c.count(Color::BLACK), 1);
        assert_eq!(c.get(4, 5), Some(Color::BLACK));
    }

    #[test]
    fn off_canvas_primitives_do_nothing() {
        let mut c = Canvas::new(20, 20);
        let before = c.clone();
        c.draw_disc(Point::new(-50.0, -50.0), 10.0, Color::BLACK);
        c.draw_segment(Point::new(100.0, 0.0), Point::new(200.0, 30.0), 3.0, Color::BLACK);
        c.draw_disc(Point::new(f64::INFINITY, 5.0), 3.0, Color::BLACK);
        c.draw_segment(Point::new(f64::NAN, 0.0), Point::new(1.0, 1.0), 3.0, Color::BLACK);
        assert_eq!(c, before);
    }

    #[test]
    fn degenerate_segment_is_disc() {
        let mut a = Canvas::new(30, 30);
        let mut b = Canvas::new(30, 30);
        let p = Point::new(12.3, 14.8);
        a.draw_segment(p, p, 5.0, Color::BLACK);
        b.draw_disc(p, 2.5, Color::BLACK);
        assert_eq!(a, b);
    }

    #[test]
    fn empty_annulus_cases() {
        let mut c = Canvas::new(50, 50);
        let center = Point::new(25.0, 25.0);
        c.draw_annulus_arc(center, 5.0, 20.0, 1.0, 1.0, Color::BLACK);
        c.draw_annulus_arc(center, 10.0, 10.0, 0.0, TAU, Color::BLACK);
        assert_eq!(c.count(Color::BLACK), 0);
    }

    #[test]
    fn downscale_examples() {
        let px = [Color::BLACK, Color::WHITE, Color::WHITE, Color::WHITE];
        let c = Canvas::from_pixels(2, 2, px.to_vec()).unwrap();
        let d = downscale(&c, 1, 1).unwrap();
        assert_eq!(d.get(0, 0), Some(Color::rgb(191, 191, 191)));
        assert!(downscale(&c, 0, 1).is_err());
        assert_eq!(downscale(&c, 2, 2).unwrap(), c);

        let u = Canvas::filled(9, 6, Color::rgb(10, 20, 30));
        let d = downscale(&u, 4, 4).unwrap();
        assert!(d.pixels().iter().all(|&p| p == Color::rgb(10, 20, 30)));
    }

    #[test]
    fn round_half_up_on_ties() {
        // (0 + 255 + 0 + 255) / 4 = 127.5 -> 128
        let px = [Color::BLACK, Color::WHITE, Color::BLACK, Color::WHITE];
        let c = Canvas::from_pixels(2, 2, px.to_vec()).unwrap();
        assert_eq!(downscale(&c, 1, 1).unwrap().get(0, 0), Some(Color::rgb(128, 128, 128)));
    }
}
