//! Laurent-series kernel and Green's-function capacity of `r < |z| < R`.

use crate::error::{BergmanError, Result};
use crate::geometry::Domain;
use crate::kernel::Block;
use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

/// Relative size of the neglected tail at which adaptive summation stops.
const TAIL_TOL: f64 = 1e-18;
const MAX_TERMS: usize = 200_000;

/// `‖z^k‖²` over the annulus `r < |z| < R`.
pub fn laurent_norm_sqr(k: i64, r: f64, big_r: f64) -> f64 {
    if k == -1 {
        2.0 * PI * (big_r / r).ln()
    } else {
        let e = (2 * k + 2) as i32;
        PI * (big_r.powi(e) - r.powi(e)) / (k + 1) as f64
    }
}

fn falling(k: f64, a: usize) -> f64 {
    (0..a).map(|i| k - i as f64).product()
}

/// A summed kernel block with an estimate of the neglected tail, relative to
/// the absolute series for each entry.
#[derive(Debug, Clone, Copy)]
pub struct LaurentSum {
    pub block: Block,
    pub tail: f64,
    pub terms: usize,
}

#[derive(Debug, Clone)]
pub struct AnnulusKernel {
    r: f64,
    big_r: f64,
    /// Fixed truncation `|k| ≤ M`; `None` sums adaptively.
    truncation: Option<usize>,
    domain: Domain,
}

impl AnnulusKernel {
    pub fn new(r: f64, big_r: f64) -> Result<Self> {
        Ok(AnnulusKernel {
            r,
            big_r,
            truncation: None,
            domain: Domain::annulus(r, big_r)?,
        })
    }

    pub fn with_truncation(mut self, m: usize) -> Self {
        self.truncation = Some(m);
        self
    }

    pub fn radii(&self) -> (f64, f64) {
        (self.r, self.big_r)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// `∂_z^a ∂_{w̄}^b K(z, w)` for `a, b ≤ 2` as `Σ_k z^k w̄^k / ‖z^k‖²`.
    ///
    /// The positive and negative halves are summed separately, each written as
    /// a geometric ratio times a bounded coefficient so that no power overflows.
    pub fn sum(&self, z: C, w: C) -> Result<LaurentSum> {
        if z.norm() == 0.0 || w.norm() == 0.0 {
            return Err(BergmanError::Pole(format!("annulus kernel at the origin ({z}, {w})")));
        }
        let (r, big_r) = (self.r, self.big_r);
        let rho2 = (r / big_r).powi(2);
        let zw = z * w.conj();
        let inv_z = [C::new(1.0, 0.0), 1.0 / z, 1.0 / (z * z)];
        let inv_w = {
            let wc = w.conj();
            [C::new(1.0, 0.0), 1.0 / wc, 1.0 / (wc * wc)]
        };
        let mut block = [[C::new(0.0, 0.0); 3]; 3];
        let mut abs = [[0.0f64; 3]; 3];
        let mut tail: f64 = 0.0;
        let mut terms = 0;

        let add = |k: f64, t: C, block: &mut Block, abs: &mut [[f64; 3]; 3]| -> f64 {
            let mut rel: f64 = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    let v = t * (falling(k, a) * falling(k, b)) * inv_z[a] * inv_w[b];
                    block[a][b] += v;
                    abs[a][b] += v.norm();
                    if abs[a][b] > 0.0 {
                        rel = rel.max(v.norm() / abs[a][b]);
                    }
                }
            }
            rel
        };

        // k = -1
        let t = 1.0 / (2.0 * PI * (big_r / r).ln()) / zw;
        add(-1.0, t, &mut block, &mut abs);
        terms += 1;

        // k >= 0: (k+1)/(π R² (1 − ρ^{2k+2})) (z w̄/R²)^k
        let x = zw / (big_r * big_r);
        let xn = x.norm();
        let mut p = C::new(1.0, 0.0);
        let mut k = 0usize;
        loop {
            let coef = (k + 1) as f64 / (PI * big_r * big_r * (1.0 - rho2.powi(k as i32 + 1)));
            let rel = add(k as f64, p * coef, &mut block, &mut abs);
            terms += 1;
            k += 1;
            if self.stop(k, rel, xn, &mut tail)? {
                break;
            }
            p *= x;
        }

        // k = -j, j >= 2: (j−1)/(π r² (1 − ρ^{2j−2})) (r²/(z w̄))^j
        let y = C::new(r * r, 0.0) / zw;
        let yn = y.norm();
        let mut p = y * y;
        let mut j = 2usize;
        loop {
            let coef = (j - 1) as f64 / (PI * r * r * (1.0 - rho2.powi(j as i32 - 1)));
            let rel = add(-(j as f64), p * coef, &mut block, &mut abs);
            terms += 1;
            if self.stop(j + 1, rel, yn, &mut tail)? {
                break;
            }
            j += 1;
            p *= y;
        }
        Ok(LaurentSum { block, tail, terms })
    }

    /// Termination test once the term of index `n − 1` is in; tracks the tail estimate.
    fn stop(&self, n: usize, rel: f64, ratio: f64, tail: &mut f64) -> Result<bool> {
        if let Some(m) = self.truncation {
            if n > m {
                *tail = tail.max(rel * ratio / (1.0 - ratio).max(1e-300));
                return Ok(true);
            }
            return Ok(false);
        }
        if ratio >= 1.0 {
            return Err(BergmanError::Pole(format!(
                "annulus Laurent series diverges (ratio {ratio})"
            )));
        }
        // polynomial factors k^4 are absorbed by waiting for a tiny term
        let est = rel * ratio / (1.0 - ratio) * 2.0;
        if n >= 8 && est < TAIL_TOL {
            *tail = tail.max(est);
            return Ok(true);
        }
        if n >= MAX_TERMS {
            *tail = tail.max(est);
            return Ok(true);
        }
        Ok(false)
    }
}

/// Logarithmic capacity `c_β(p) = exp lim_{z→p} (G(z, p) − log|z − p|)` of the
/// annulus `r < |z| < R`, from the classical Fourier series of the Green's
/// function. The series is summed until its terms drop below `1e−18`, then
/// doubled in length to measure the remaining change.
pub fn annulus_capacity(r: f64, big_r: f64, p: C) -> Result<CapacityEstimate> {
    if !(0.0 < r && r < big_r) {
        return Err(BergmanError::InvalidInput(format!("annulus needs 0 < r < R, got ({r}, {big_r})")));
    }
    let rho = p.norm() / big_r;
    let q = r / big_r;
    if !(q < rho && rho < 1.0) {
        return Err(BergmanError::OutsideDomain(p));
    }
    let (h, n) = robin_constant(q, rho, None);
    let (h2, _) = robin_constant(q, rho, Some(2 * n));
    Ok(CapacityEstimate {
        c_beta: h2.exp() / big_r,
        terms: 2 * n,
        doubling_change: (h2 - h).abs(),
    })
}

/// Robin constant `h(ρ)` of the harmonic correction
/// `h = B0 log|z| + Σ (A_m |z|^m + B_m |z|^{−m}) cos mθ`, fixed by
/// `h = −log|z − ρ|` on both circles of `q < |z| < 1`. Sums `terms` terms, or
/// until they fall below `1e−18`; returns the sum and the count used.
fn robin_constant(q: f64, rho: f64, terms: Option<usize>) -> (f64, usize) {
    let b0 = -rho.ln() / q.ln();
    let mut h = b0 * rho.ln();
    let mut m = 1usize;
    loop {
        let mf = m as f64;
        let qm = q.powi(m as i32);
        let a = rho.powi(m as i32) / mf;
        let b = (q / rho).powi(m as i32) / mf;
        // B_m = q^m (b − a q^m)/(1 − q^{2m}); B_m ρ^{−m} is formed without q^{−m}
        let scaled = (b - a * qm) / (1.0 - qm * qm);
        let am = a - qm * scaled;
        let term = am * rho.powi(m as i32) + scaled * (q / rho).powi(m as i32);
        h += term;
        let done = match terms {
            Some(n) => m >= n,
            None => (term.abs() < 1e-18 && m >= 8) || m >= MAX_TERMS,
        };
        if done {
            return (h, m);
        }
        m += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityEstimate {
    pub c_beta: f64,
    pub terms: usize,
    /// Change of the Robin constant between `terms/2` and `terms` terms.
    pub doubling_change: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum_at_fixed_truncation() {
        let k = AnnulusKernel::new(0.5, 1.0).unwrap();
        let z = C::new(0.75, 0.0);
        let direct: f64 = (-80i64..=80)
            .map(|k| 0.75f64.powi(2 * k as i32) / laurent_norm_sqr(k, 0.5, 1.0))
            .sum();
        let m80 = k.clone().with_truncation(80).sum(z, z).unwrap();
        let m160 = k.clone().with_truncation(160).sum(z, z).unwrap();
        assert!((m80.block[0][0].re - direct).abs() < 1e-13 * direct);
        assert!((m80.block[0][0] - m160.block[0][0]).norm() < 1e-12 * direct);
        let adaptive = k.sum(z, z).unwrap();
        assert!((adaptive.block[0][0] - m160.block[0][0]).norm() < 1e-14 * direct);
        assert!(adaptive.tail < 1e-17);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let k = AnnulusKernel::new(0.3, 1.2).unwrap();
        let (z, w) = (C::new(0.5, 0.3), C::new(-0.2, 0.6));
        let b = k.sum(z, w).unwrap().block;
        let h = 1e-5;
        let f = |z: C| k.sum(z, w).unwrap().block[0][1];
        let fd = (f(z + h) - f(z - h)) / (2.0 * h);
        assert!((fd - b[1][1]).norm() < 1e-6 * b[1][1].norm());
        // ∂_{w̄} via the conjugate direction in w
        let g = |w: C| k.sum(z, w).unwrap().block[2][0];
        let fd = (g(w + h) - g(w - h)) / (2.0 * h);
        assert!((fd - b[2][1]).norm() < 1e-6 * b[2][1].norm());
    }

    #[test]
    fn capacity_converges_and_scales() {
        let c1 = annulus_capacity(0.5, 1.0, C::new(0.75, 0.0)).unwrap();
        assert!(c1.doubling_change < 1e-15);
        let c2 = annulus_capacity(1.0, 2.0, C::new(0.0, 1.5)).unwrap();
        assert!((c1.c_beta - 2.0 * c2.c_beta).abs() < 1e-13);
        // the hole shrinks away: capacity tends to that of the disc
        let thin = annulus_capacity(1e-12, 1.0, C::new(0.5, 0.0)).unwrap();
        assert!((thin.c_beta - 4.0 / 3.0).abs() < 0.05);
        assert!(annulus_capacity(0.5, 1.0, C::new(0.2, 0.0)).is_err());
    }
}
