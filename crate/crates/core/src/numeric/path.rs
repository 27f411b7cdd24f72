//! Piecewise-linear complex paths.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;

fn push_distinct(v: &mut Vec<Complex64>, z: Complex64) {
    if v.last() != Some(&z) {
        v.push(z);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polyline {
    pub vertices: Vec<Complex64>,
}

impl Polyline {
    pub fn new(vertices: Vec<Complex64>) -> Self {
        assert!(vertices.len() >= 2, "a path needs two vertices");
        Polyline { vertices }
    }

    pub fn segment(a: Complex64, b: Complex64) -> Self {
        Polyline { vertices: vec![a, b] }
    }

    /// Regular n-gon inscribed in the circle, starting and ending at center + radius·e^{iφ}.
    pub fn circle(center: Complex64, radius: f64, n: usize, phase: f64) -> Self {
        let mut vertices: Vec<Complex64> =
            (0..n).map(|k| center + Complex64::from_polar(radius, phase + TAU * k as f64 / n as f64)).collect();
        vertices.push(vertices[0]);
        Polyline { vertices }
    }

    /// The closed loop start → circle around `center` (through the point nearest `start`) → start.
    pub fn keyhole(start: Complex64, center: Complex64, radius: f64, n: usize) -> Self {
        let phase = (start - center).arg();
        let entry = center + Complex64::from_polar(radius, phase);
        let mut vertices = vec![start];
        if (entry - start).norm() > 0.0 {
            vertices.push(entry);
        }
        let circ = Polyline::circle(center, radius, n, phase);
        vertices.extend(circ.vertices.into_iter().skip(1));
        vertices.push(start);
        vertices.dedup();
        Polyline { vertices }
    }

    pub fn start(&self) -> Complex64 {
        self.vertices[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.vertices.last().unwrap()
    }

    pub fn is_closed(&self) -> bool {
        (self.start() - self.end()).norm() == 0.0
    }

    pub fn reversed(&self) -> Self {
        Polyline { vertices: self.vertices.iter().rev().copied().collect() }
    }

    pub fn then(&self, other: &Polyline) -> Self {
        assert!((self.end() - other.start()).norm() < 1e-15, "paths must join");
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices.iter().skip(1));
        Polyline { vertices }
    }

    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    /// Distance from `p` to the path.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        self.segments()
            .map(|(a, b)| {
                let d = b - a;
                let t = if d.norm_sqr() == 0.0 { 0.0 } else { ((p - a) * d.conj()).re / d.norm_sqr() };
                (a + d * t.clamp(0.0, 1.0) - p).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Winding number of a closed path about `p`.
    pub fn winding_number(&self, p: Complex64) -> i64 {
        let total: f64 = self.segments().map(|(a, b)| ((b - p) / (a - p)).arg()).sum();
        (total / TAU).round() as i64
    }

    /// `n` points equally spaced in arclength, both endpoints excluded when `interior`.
    pub fn samples(&self, n: usize, interior: bool) -> Vec<Complex64> {
        let len = self.length();
        (0..n)
            .map(|k| {
                let s = if interior { (k as f64 + 0.5) / n as f64 } else if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
                self.point_at(s * len)
            })
            .collect()
    }

    pub fn point_at(&self, mut s: f64) -> Complex64 {
        for (a, b) in self.segments() {
            let l = (b - a).norm();
            if s <= l {
                return a + (b - a) * (s / l);
            }
            s -= l;
        }
        self.end()
    }

    /// The path refined so that every sample point becomes a vertex.
    pub fn with_samples(&self, n: usize) -> (Polyline, Vec<usize>) {
        let len = self.length();
        let mut targets: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) / n as f64 * len).collect();
        targets.reverse();
        let mut vertices = vec![self.start()];
        let mut idx = Vec::new();
        let mut acc = 0.0;
        for (a, b) in self.segments() {
            let l = (b - a).norm();
            while let Some(&t) = targets.last() {
                if t > acc + l {
                    break;
                }
                targets.pop();
                push_distinct(&mut vertices, a + (b - a) * ((t - acc) / l));
                idx.push(vertices.len() - 1);
            }
            acc += l;
            push_distinct(&mut vertices, b);
        }
        (Polyline { vertices }, idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn winding_and_distance() {
        let c = Polyline::circle(Complex64::new(1.0, 0.0), 0.25, 64, 0.0);
        assert!(c.is_closed());
        assert_eq!(c.winding_number(Complex64::new(1.0, 0.0)), 1);
        assert_eq!(c.winding_number(Complex64::new(2.0, 0.0)), 0);
        assert_eq!(c.reversed().winding_number(Complex64::new(1.0, 0.0)), -1);
        assert!((c.distance_to(Complex64::new(1.0, 0.0)) - 0.25).abs() < 1e-3);
    }

    #[test]
    fn sample_vertices() {
        let p = Polyline::segment(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        let (q, idx) = p.with_samples(4);
        assert_eq!(idx.len(), 4);
        assert!((q.vertices[idx[0]].re - 0.125).abs() < 1e-15);
        assert!((q.length() - 1.0).abs() < 1e-15);
    }
}
