//! Points and cubic Bézier curves.

use core::ops::{Add, Mul, Neg, Sub};

use alloc::vec::Vec;

use crate::error::{contract_err, Result};

/// A position in pixel coordinates. Pixel `(x, y)` has its sample point at
/// the integer coordinates `(x, y)`; `y` grows downwards.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Point at `radius` from `center` in direction `angle` (radians).
    pub fn polar(center: Point, radius: f64, angle: f64) -> Self {
        Self::new(
            center.x + radius * libm::cos(angle),
            center.y + radius * libm::sin(angle),
        )
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Distance from `p` to the closed segment `ab`.
pub fn distance_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// A cubic Bézier segment from `p0` to `p3` with control points `c1`, `c2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicBezier {
    pub p0: Point,
    pub c1: Point,
    pub c2: Point,
    pub p3: Point,
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(contract_err!("bezier parameter t = {t} outside [0, 1]"))
    }
}

impl CubicBezier {
    pub const fn new(p0: Point, c1: Point, c2: Point, p3: Point) -> Self {
        Self { p0, c1, c2, p3 }
    }

    /// Bernstein form, no range check. Exact at `t = 0` and `t = 1`.
    pub fn point_at(&self, t: f64) -> Point {
        if t == 0.0 {
            return self.p0;
        }
        if t == 1.0 {
            return self.p3;
        }
        let s = 1.0 - t;
        self.p0 * (s * s * s)
            + self.c1 * (3.0 * s * s * t)
            + self.c2 * (3.0 * s * t * t)
            + self.p3 * (t * t * t)
    }

    pub fn derivative_at(&self, t: f64) -> Point {
        let s = 1.0 - t;
        (self.c1 - self.p0) * (3.0 * s * s)
            + (self.c2 - self.c1) * (6.0 * s * t)
            + (self.p3 - self.c2) * (3.0 * t * t)
    }

    /// Splits at `t = 1/2` into two halves.
    pub fn split_half(&self) -> (CubicBezier, CubicBezier) {
        let a = self.p0.lerp(self.c1, 0.5);
        let b = self.c1.lerp(self.c2, 0.5);
        let c = self.c2.lerp(self.p3, 0.5);
        let ab = a.lerp(b, 0.5);
        let bc = b.lerp(c, 0.5);
        let mid = ab.lerp(bc, 0.5);
        (
            CubicBezier::new(self.p0, a, ab, mid),
            CubicBezier::new(mid, bc, c, self.p3),
        )
    }

    /// Largest distance of the control points from the chord `p0 p3`.
    /// The curve lies in the control polygon's hull, so this bounds how far
    /// the curve strays from the chord.
    pub fn flatness(&self) -> f64 {
        let d1 = distance_to_segment(self.c1, self.p0, self.p3);
        let d2 = distance_to_segment(self.c2, self.p0, self.p3);
        d1.max(d2)
    }

    /// Polyline approximation whose chords deviate from the curve by at most
    /// `tolerance`. The first and last points are `p0` and `p3`.
    pub fn flatten(&self, tolerance: f64) -> Vec<Point> {
        const MAX_DEPTH: u32 = 18;
        let mut out = Vec::new();
        out.push(self.p0);
        let mut stack = alloc::vec![(*self, 0u32)];
        while let Some((curve, depth)) = stack.pop() {
            if depth >= MAX_DEPTH || curve.flatness() <= tolerance {
                out.push(curve.p3);
            } else {
                let (left, right) = curve.split_half();
                stack.push((right, depth + 1));
                stack.push((left, depth + 1));
            }
        }
        out
    }
}

/// Cubic Bernstein combination of the four points at `t ∈ [0, 1]`.
pub fn eval_cubic_bezier(p0: Point, c1: Point, c2: Point, p3: Point, t: f64) -> Result<Point> {
    check_t(t)?;
    Ok(CubicBezier::new(p0, c1, c2, p3).point_at(t))
}

/// `3(1-t)²(c1-p0) + 6(1-t)t(c2-c1) + 3t²(p3-c2)` at `t ∈ [0, 1]`.
pub fn bezier_derivative(p0: Point, c1: Point, c2: Point, p3: Point, t: f64) -> Result<Point> {
    check_t(t)?;
    Ok(CubicBezier::new(p0, c1, c2, p3).derivative_at(t))
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let tau = core::f64::consts::TAU;
    let r = a - tau * libm::floor(a / tau);
    if r >= tau {
        0.0
    } else {
        r
    }
}
