use num_complex::Complex64;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

type C = Complex64;

/// Smooth map `t ∈ [0, 1] ↦ (γ(t), γ'(t))`.
pub type ParamFn = Arc<dyn Fn(f64) -> (C, C) + Send + Sync>;

/// A user-supplied C¹ parametrization on `[0, 1]`.
#[derive(Clone)]
pub struct ParametricCurve {
    pub label: String,
    pub closed: bool,
    pub f: ParamFn,
}

impl fmt::Debug for ParametricCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricCurve")
            .field("label", &self.label)
            .field("closed", &self.closed)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum CurveKind {
    /// Circular arc `center + radius·e^{iθ}` for θ running from `theta0` to `theta1`.
    Arc {
        center: C,
        radius: f64,
        theta0: f64,
        theta1: f64,
    },
    Segment {
        start: C,
        end: C,
    },
    Parametric(ParametricCurve),
}

/// Whether the natural parametrization keeps the domain on its left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
}

#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    pub kind: CurveKind,
    pub orientation: Orientation,
}

impl BoundaryCurve {
    pub fn arc(center: C, radius: f64, theta0: f64, theta1: f64) -> Self {
        BoundaryCurve {
            kind: CurveKind::Arc {
                center,
                radius,
                theta0,
                theta1,
            },
            orientation: Orientation::Positive,
        }
    }

    pub fn circle(center: C, radius: f64) -> Self {
        Self::arc(center, radius, 0.0, TAU)
    }

    pub fn segment(start: C, end: C) -> Self {
        BoundaryCurve {
            kind: CurveKind::Segment { start, end },
            orientation: Orientation::Positive,
        }
    }

    pub fn parametric(label: impl Into<String>, closed: bool, f: ParamFn) -> Self {
        BoundaryCurve {
            kind: CurveKind::Parametric(ParametricCurve {
                label: label.into(),
                closed,
                f,
            }),
            orientation: Orientation::Positive,
        }
    }

    pub fn reversed(mut self) -> Self {
        self.orientation = match self.orientation {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        };
        self
    }

    /// Point and derivative of the natural parametrization.
    fn natural(&self, s: f64) -> (C, C) {
        match &self.kind {
            CurveKind::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let sweep = theta1 - theta0;
                let e = C::from_polar(1.0, theta0 + sweep * s);
                (center + e * *radius, C::i() * e * (*radius * sweep))
            }
            CurveKind::Segment { start, end } => (start + (end - start) * s, end - start),
            CurveKind::Parametric(p) => (p.f)(s),
        }
    }

    /// Point and derivative along the traversal direction, `t ∈ [0, 1]`.
    pub fn eval(&self, t: f64) -> (C, C) {
        match self.orientation {
            Orientation::Positive => self.natural(t),
            Orientation::Negative => {
                let (z, dz) = self.natural(1.0 - t);
                (z, -dz)
            }
        }
    }

    pub fn point(&self, t: f64) -> C {
        self.eval(t).0
    }

    pub fn start(&self) -> C {
        self.point(0.0)
    }

    pub fn end(&self) -> C {
        self.point(1.0)
    }

    pub fn is_closed(&self) -> bool {
        match &self.kind {
            CurveKind::Arc { theta0, theta1, .. } => ((theta1 - theta0).abs() - TAU).abs() < 1e-12,
            CurveKind::Segment { .. } => false,
            CurveKind::Parametric(p) => p.closed,
        }
    }

    pub fn length(&self) -> f64 {
        match &self.kind {
            CurveKind::Arc {
                radius,
                theta0,
                theta1,
                ..
            } => radius * (theta1 - theta0).abs(),
            CurveKind::Segment { start, end } => (end - start).norm(),
            CurveKind::Parametric(_) => {
                // composite Gauss–Legendre would be overkill: the parametrizations are smooth
                let n = 4096;
                let h = 1.0 / n as f64;
                (0..n).map(|i| self.eval((i as f64 + 0.5) * h).1.norm() * h).sum()
            }
        }
    }

    /// Samples along the curve used for bounding boxes and coarse searches.
    pub fn samples(&self, n: usize) -> Vec<C> {
        (0..=n).map(|i| self.point(i as f64 / n as f64)).collect()
    }

    /// Euclidean distance from `z` to the curve.
    pub fn distance(&self, z: C) -> f64 {
        match &self.kind {
            CurveKind::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let d = z - center;
                let ends = (self.start() - z).norm().min((self.end() - z).norm());
                if d.norm() == 0.0 {
                    return *radius;
                }
                if angle_in_sweep(d.arg(), *theta0, *theta1) {
                    (d.norm() - radius).abs().min(ends)
                } else {
                    ends
                }
            }
            CurveKind::Segment { start, end } => point_segment_distance(z, *start, *end),
            CurveKind::Parametric(_) => self.parametric_nearest(z).1,
        }
    }

    /// Nearest parameter and distance for a parametric curve (natural parameter).
    fn parametric_nearest(&self, z: C) -> (f64, f64) {
        let n = 1024;
        let mut best = (0.0, f64::INFINITY);
        for i in 0..=n {
            let s = i as f64 / n as f64;
            let d = (self.natural(s).0 - z).norm();
            if d < best.1 {
                best = (s, d);
            }
        }
        // golden-section refinement on the bracketing cells
        let h = 1.0 / n as f64;
        let (mut a, mut b) = ((best.0 - h).max(0.0), (best.0 + h).min(1.0));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let f = |s: f64| (self.natural(s).0 - z).norm();
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..60 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = f(d);
            }
        }
        let s = 0.5 * (a + b);
        let dist = f(s).min(best.1);
        (s, dist)
    }

    /// Total turning of `arg(γ(t) − z)` along the traversal, in radians.
    pub fn angle_change(&self, z: C) -> f64 {
        match &self.kind {
            CurveKind::Segment { .. } => chord_angle(z, self.start(), self.end()),
            CurveKind::Arc { theta0, theta1, .. } => {
                let pieces = (((theta1 - theta0).abs() / (PI / 8.0)).ceil() as usize).max(1);
                self.subdivided_angle(z, pieces)
            }
            CurveKind::Parametric(_) => self.subdivided_angle(z, 256),
        }
    }

    fn subdivided_angle(&self, z: C, pieces: usize) -> f64 {
        let h = 1.0 / pieces as f64;
        (0..pieces)
            .map(|i| self.piece_angle(z, i as f64 * h, (i + 1) as f64 * h, 0))
            .sum()
    }

    /// Curve point with closed loops snapped shut, so the chord chain has no gap.
    fn node(&self, t: f64) -> C {
        if t >= 1.0 && self.is_closed() {
            self.point(0.0)
        } else {
            self.point(t)
        }
    }

    fn piece_angle(&self, z: C, t0: f64, t1: f64, depth: usize) -> f64 {
        let a = self.node(t0);
        let b = self.node(t1);
        // deviation of the piece from its chord
        let mut dev: f64 = 0.0;
        for k in 1..4 {
            let t = t0 + (t1 - t0) * k as f64 / 4.0;
            dev = dev.max(point_segment_distance(self.point(t), a, b));
        }
        let dz = point_segment_distance(z, a, b);
        if dz > 2.0 * dev + 1e-300 || depth > 60 {
            chord_angle(z, a, b)
        } else {
            let m = 0.5 * (t0 + t1);
            self.piece_angle(z, t0, m, depth + 1) + self.piece_angle(z, m, t1, depth + 1)
        }
    }

    /// Whether the closed segment `[a, b]` meets the curve.
    pub fn intersects_segment(&self, a: C, b: C) -> bool {
        match &self.kind {
            CurveKind::Segment { start, end } => segments_intersect(a, b, *start, *end),
            CurveKind::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let d = b - a;
                let f = a - center;
                let qa = d.norm_sqr();
                if qa == 0.0 {
                    return false;
                }
                let qb = 2.0 * (f.re * d.re + f.im * d.im);
                let qc = f.norm_sqr() - radius * radius;
                let disc = qb * qb - 4.0 * qa * qc;
                if disc < 0.0 {
                    return false;
                }
                let sq = disc.sqrt();
                [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)]
                    .iter()
                    .any(|&t| {
                        (0.0..=1.0).contains(&t) && {
                            let p = a + d * t - center;
                            angle_in_sweep(p.arg(), *theta0, *theta1)
                        }
                    })
            }
            CurveKind::Parametric(_) => {
                let n = 1024;
                let (lo, hi) = (
                    C::new(a.re.min(b.re), a.im.min(b.im)),
                    C::new(a.re.max(b.re), a.im.max(b.im)),
                );
                let mut prev = self.natural(0.0).0;
                for i in 1..=n {
                    let next = self.natural(i as f64 / n as f64).0;
                    let overlaps = prev.re.max(next.re) >= lo.re
                        && prev.re.min(next.re) <= hi.re
                        && prev.im.max(next.im) >= lo.im
                        && prev.im.min(next.im) <= hi.im;
                    if overlaps && segments_intersect(a, b, prev, next) {
                        return true;
                    }
                    prev = next;
                }
                false
            }
        }
    }

    /// Axis-aligned bounds `(min, max)` of the curve.
    pub fn bounds(&self) -> (C, C) {
        let pts: Vec<C> = match &self.kind {
            CurveKind::Segment { start, end } => vec![*start, *end],
            CurveKind::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let mut v = vec![self.start(), self.end()];
                for k in 0..4 {
                    let th = k as f64 * PI / 2.0;
                    if angle_in_sweep(th, *theta0, *theta1) {
                        v.push(center + C::from_polar(*radius, th));
                    }
                }
                v
            }
            CurveKind::Parametric(_) => self.samples(2048),
        };
        let mut lo = C::new(f64::INFINITY, f64::INFINITY);
        let mut hi = C::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            lo = C::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = C::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        (lo, hi)
    }
}

/// Whether angle `phi` lies on the arc swept from `theta0` to `theta1`.
pub(crate) fn angle_in_sweep(phi: f64, theta0: f64, theta1: f64) -> bool {
    let sweep = theta1 - theta0;
    if sweep.abs() >= TAU - 1e-12 {
        return true;
    }
    let s = if sweep >= 0.0 {
        (phi - theta0).rem_euclid(TAU)
    } else {
        (theta0 - phi).rem_euclid(TAU)
    };
    s <= sweep.abs() + 1e-15
}

fn chord_angle(z: C, a: C, b: C) -> f64 {
    ((b - z) / (a - z)).arg()
}

pub(crate) fn point_segment_distance(z: C, a: C, b: C) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a).re * d.re + (z - a).im * d.im) / l2;
    let t = t.clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

fn cross(u: C, v: C) -> f64 {
    u.re * v.im - u.im * v.re
}

/// Closed-segment intersection, counting touching and collinear overlap.
pub(crate) fn segments_intersect(p1: C, p2: C, q1: C, q2: C) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: C, b: C, p: C, d: f64| {
        d == 0.0
            && p.re >= a.re.min(b.re)
            && p.re <= a.re.max(b.re)
            && p.im >= a.im.min(b.im)
            && p.im <= a.im.max(b.im)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}
