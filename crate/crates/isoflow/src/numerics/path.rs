//! Piecewise-linear paths in the complex plane.

use num_complex::Complex64;

use crate::{Error, Result};

/// A piecewise-linear path in the `u`-plane, open or closed.
///
/// A closed path is traversed through its vertices in order and back to the
/// first vertex along an implicit closing segment (unless the last vertex
/// already equals the first). The path parameter runs over `[0, n]` where `n`
/// is the number of segments, with `t in [i, i+1]` tracing segment `i`
/// linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    vertices: Vec<Complex64>,
    closed: bool,
    samples_hint: usize,
}

impl PathSpec {
    /// An open polyline through `vertices`.
    pub fn polyline(vertices: Vec<Complex64>, samples_hint: usize) -> Result<Self> {
        Self::new(vertices, false, samples_hint)
    }

    /// A closed loop through `vertices`; the closing edge is implicit.
    pub fn loop_through(vertices: Vec<Complex64>, samples_hint: usize) -> Result<Self> {
        Self::new(vertices, true, samples_hint)
    }

    /// An axis-aligned rectangle loop with corners `(x0, -h)`, `(x1, -h)`,
    /// `(x1, h)`, `(x0, h)`, traversed counterclockwise.
    pub fn rectangle(x0: f64, x1: f64, h: f64, samples_hint: usize) -> Result<Self> {
        Self::loop_through(
            vec![
                Complex64::new(x0, -h),
                Complex64::new(x1, -h),
                Complex64::new(x1, h),
                Complex64::new(x0, h),
            ],
            samples_hint,
        )
    }

    fn new(mut vertices: Vec<Complex64>, closed: bool, samples_hint: usize) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidPath("at least 2 vertices required".into()));
        }
        if samples_hint == 0 {
            return Err(Error::InvalidPath("samples_hint must be positive".into()));
        }
        if closed && vertices.first() == vertices.last() {
            vertices.pop();
            if vertices.len() < 2 {
                return Err(Error::InvalidPath(
                    "closed path needs at least 2 distinct vertices".into(),
                ));
            }
        }
        let scale = vertices.iter().map(|v| v.norm()).fold(1.0, f64::max);
        for w in vertices.windows(2) {
            if (w[1] - w[0]).norm() <= 1e-14 * scale {
                return Err(Error::InvalidPath(
                    "consecutive vertices must be distinct".into(),
                ));
            }
        }
        let path = PathSpec {
            vertices,
            closed,
            samples_hint,
        };
        if closed && path.self_intersects(1e-12 * scale) {
            return Err(Error::InvalidPath(
                "closed path must be a simple loop".into(),
            ));
        }
        Ok(path)
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn samples_hint(&self) -> usize {
        self.samples_hint
    }

    /// Number of linear segments (including the implicit closing edge).
    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    /// Endpoints of segment `i`.
    pub fn segment(&self, i: usize) -> (Complex64, Complex64) {
        let n = self.vertices.len();
        let a = self.vertices[i % n];
        let b = self.vertices[(i + 1) % n];
        (a, b)
    }

    /// Point at path parameter `t in [0, segment_count()]`.
    pub fn point(&self, t: f64) -> Complex64 {
        let n = self.segment_count() as f64;
        let t = t.clamp(0.0, n);
        let i = (t.floor() as usize).min(self.segment_count() - 1);
        let (a, b) = self.segment(i);
        a + (b - a) * (t - i as f64)
    }

    /// Total arc length.
    pub fn length(&self) -> f64 {
        (0..self.segment_count())
            .map(|i| {
                let (a, b) = self.segment(i);
                (b - a).norm()
            })
            .sum()
    }

    /// The same path traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let mut vertices: Vec<_> = self.vertices.iter().rev().copied().collect();
        if self.closed {
            vertices.rotate_left(self.vertices.len() - 1);
        }
        PathSpec {
            vertices,
            closed: self.closed,
            samples_hint: self.samples_hint,
        }
    }

    /// Winding number of a closed path around `p` (0 for open paths).
    pub fn winding_number(&self, p: Complex64) -> i32 {
        if !self.closed {
            return 0;
        }
        let mut total = 0.0;
        for i in 0..self.segment_count() {
            let (a, b) = self.segment(i);
            total += ((b - p) / (a - p)).arg();
        }
        (total / std::f64::consts::TAU).round() as i32
    }

    /// Minimum distance from the path to `p`.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        (0..self.segment_count())
            .map(|i| {
                let (a, b) = self.segment(i);
                let d = b - a;
                let s = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
                (p - (a + d * s)).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn self_intersects(&self, tol: f64) -> bool {
        let n = self.segment_count();
        for i in 0..n {
            for j in (i + 1)..n {
                // skip adjacent segments (shared endpoint)
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = self.segment(i);
                let (c, d) = self.segment(j);
                if segments_cross(a, b, c, d, tol) {
                    return true;
                }
            }
        }
        false
    }
}

fn segments_cross(a: Complex64, b: Complex64, c: Complex64, d: Complex64, tol: f64) -> bool {
    let cross = |p: Complex64, q: Complex64| p.re * q.im - p.im * q.re;
    let r = b - a;
    let s = d - c;
    let denom = cross(r, s);
    let qp = c - a;
    if denom.abs() < tol * (r.norm() * s.norm()).max(1.0) {
        return false; // parallel; overlapping collinear segments not expected here
    }
    let t = cross(qp, s) / denom;
    let u = cross(qp, r) / denom;
    (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_single_vertex() {
        assert!(PathSpec::polyline(vec![c(0.0, 0.0)], 16).is_err());
    }

    #[test]
    fn rejects_duplicate_consecutive_vertices() {
        assert!(PathSpec::polyline(vec![c(0.0, 0.0), c(0.0, 0.0)], 16).is_err());
    }

    #[test]
    fn rejects_self_intersecting_loop() {
        // bowtie
        let r = PathSpec::loop_through(
            vec![c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)],
            16,
        );
        assert!(r.is_err());
    }

    #[test]
    fn winding_numbers_of_rectangle() {
        let p = PathSpec::rectangle(-1.0, 1.0, 0.5, 16).unwrap();
        assert_eq!(p.winding_number(c(0.0, 0.0)), 1);
        assert_eq!(p.winding_number(c(2.0, 0.0)), 0);
        assert_eq!(p.reversed().winding_number(c(0.0, 0.0)), -1);
    }

    #[test]
    fn reversal_preserves_geometry() {
        let p = PathSpec::rectangle(-1.0, 1.0, 0.5, 16).unwrap();
        let q = p.reversed();
        assert_eq!(p.length(), q.length());
        let n = p.segment_count() as f64;
        let eps = 1e-12;
        for k in 0..=8 {
            let t = n * k as f64 / 8.0;
            assert!((p.point(t) - q.point(n - t)).norm() < eps);
        }
    }
}
