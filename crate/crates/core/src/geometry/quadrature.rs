use super::Domain;
use crate::error::{BergmanError, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

/// Dyadic refinement levels toward the endpoints of open curves.
pub const DEFAULT_GRADING_LEVELS: usize = 6;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub curve: usize,
    pub t0: f64,
    pub t1: f64,
    /// Index of the panel's first node in the rule.
    pub start: usize,
}

/// Contour rule `∮ f(z) dz ≈ Σ f(z_k) w_k` over the whole boundary.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<C>,
    /// Unit tangents along the traversal direction.
    pub tangents: Vec<C>,
    /// Complex weights including the `γ'(t) dt` factor.
    pub weights: Vec<C>,
    /// Arc-length weights `|w_k|`.
    pub arc_weights: Vec<f64>,
    pub panels: Vec<Panel>,
    pub order: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(C) -> C) -> C {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| f(z) * w)
            .sum()
    }
}

fn breakpoints(panels: usize, levels: usize, graded: bool) -> Vec<f64> {
    let mut t: Vec<f64> = (0..=panels).map(|k| k as f64 / panels as f64).collect();
    if graded {
        let h = 1.0 / panels as f64;
        for l in 1..=levels {
            let s = h * 0.5f64.powi(l as i32);
            t.push(s);
            t.push(1.0 - s);
        }
        t.sort_by(f64::total_cmp);
        t.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    }
    t
}

/// Gauss–Legendre panels on every boundary curve; open curves are graded toward
/// their endpoints with [`DEFAULT_GRADING_LEVELS`] dyadic levels.
pub fn boundary_quadrature(domain: &Domain, panels: usize, order: usize) -> Result<QuadratureRule> {
    boundary_quadrature_graded(domain, panels, order, DEFAULT_GRADING_LEVELS)
}

pub fn boundary_quadrature_graded(
    domain: &Domain,
    panels: usize,
    order: usize,
    levels: usize,
) -> Result<QuadratureRule> {
    if order < 2 {
        return Err(BergmanError::InvalidInput(format!("quadrature order must be ≥ 2, got {order}")));
    }
    if panels == 0 {
        return Err(BergmanError::InvalidInput("panels per curve must be ≥ 1".into()));
    }
    let (gx, gw) = gauss_legendre(order);
    let mut rule = QuadratureRule {
        nodes: Vec::new(),
        tangents: Vec::new(),
        weights: Vec::new(),
        arc_weights: Vec::new(),
        panels: Vec::new(),
        order,
    };
    for (ci, curve) in domain.curves().iter().enumerate() {
        if curve.length() <= 0.0 {
            return Err(BergmanError::DegenerateGeometry(format!("curve {ci} has zero length")));
        }
        let bps = breakpoints(panels, levels, !curve.is_closed());
        for w in bps.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            let half = 0.5 * (t1 - t0);
            let mid = 0.5 * (t1 + t0);
            rule.panels.push(Panel {
                curve: ci,
                t0,
                t1,
                start: rule.nodes.len(),
            });
            for (x, wt) in gx.iter().zip(&gw) {
                let (z, dz) = curve.eval(mid + half * x);
                if dz.norm() == 0.0 {
                    return Err(BergmanError::DegenerateGeometry(format!(
                        "curve {ci} has vanishing derivative"
                    )));
                }
                let w = dz * (half * wt);
                rule.nodes.push(z);
                rule.tangents.push(dz / dz.norm());
                rule.weights.push(w);
                rule.arc_weights.push(w.norm());
            }
        }
    }
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        for n in [2usize, 5, 16, 33] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            for deg in 0..(2 * n) {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn circle_rule_node_count_and_cauchy() {
        let d = Domain::disc(1.0).unwrap();
        let r = boundary_quadrature(&d, 8, 16).unwrap();
        assert_eq!(r.len(), 128);
        let v = r.integrate(|z| 1.0 / z);
        assert!((v - c(0.0, 2.0 * PI)).norm() < 1e-12);
        let zbar = r.integrate(|z| z.conj());
        assert!((zbar - c(0.0, 2.0 * PI)).norm() < 1e-10);
        let one = r.integrate(|_| c(1.0, 0.0));
        assert!(one.norm() < 1e-12 * 2.0 * PI);
    }

    #[test]
    fn square_rule_area() {
        let d = Domain::square(1.0).unwrap();
        let r = boundary_quadrature(&d, 4, 8).unwrap();
        let v = r.integrate(|z| z.conj());
        assert!((v - c(0.0, 8.0)).norm() < 1e-10);
        let cauchy = r.integrate(|z| 1.0 / (z - c(0.3, -0.2)));
        assert!((cauchy - c(0.0, 2.0 * PI)).norm() < 1e-10);
    }

    #[test]
    fn graded_panels_on_open_curves() {
        let d = Domain::kerzman();
        let r = boundary_quadrature(&d, 12, 16).unwrap();
        assert_eq!(r.panels.len(), 3 * (12 + 2 * DEFAULT_GRADING_LEVELS));
        let one = r.integrate(|_| c(1.0, 0.0));
        assert!(one.norm() < 1e-12 * d.boundary_length());
        let cauchy = r.integrate(|z| 1.0 / (z - c(-0.4, -0.3)));
        assert!((cauchy - c(0.0, 2.0 * PI)).norm() < 1e-10);
    }

    #[test]
    fn rejects_low_order() {
        let d = Domain::disc(1.0).unwrap();
        assert!(boundary_quadrature(&d, 8, 1).is_err());
    }
}
