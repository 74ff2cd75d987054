//! The unit ball in `ℂⁿ`, `n ≤ 4`, where everything is explicit.

use crate::error::{BergmanError, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

pub const MAX_BALL_DIM: usize = 4;

fn inner(z: &[C], w: &[C]) -> C {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

fn norm_sqr(z: &[C]) -> f64 {
    z.iter().map(|a| a.norm_sqr()).sum()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `K(z, w) = n! / (πⁿ (1 − ⟨z, w⟩)^{n+1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallKernel {
    n: usize,
}

impl BallKernel {
    pub fn new(n: usize) -> Result<Self> {
        if !(1..=MAX_BALL_DIM).contains(&n) {
            return Err(BergmanError::UnsupportedDomain(format!(
                "ball(n) is supported for 1 ≤ n ≤ {MAX_BALL_DIM}, got n = {n}"
            )));
        }
        Ok(BallKernel { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `c² = 2/(n+1)`: the holomorphic sectional curvature is `−c²`.
    pub fn c_squared(&self) -> f64 {
        2.0 / (self.n as f64 + 1.0)
    }

    /// Euclidean volume `πⁿ/n!`.
    pub fn volume(&self) -> f64 {
        PI.powi(self.n as i32) / factorial(self.n)
    }

    fn check(&self, z: &[C]) -> Result<()> {
        if z.len() != self.n {
            return Err(BergmanError::InvalidInput(format!(
                "point has {} coordinates, ball has dimension {}",
                z.len(),
                self.n
            )));
        }
        if norm_sqr(z) >= 1.0 {
            return Err(BergmanError::OutsideDomain(z[0]));
        }
        Ok(())
    }

    pub fn contains(&self, z: &[C]) -> bool {
        z.len() == self.n && norm_sqr(z) < 1.0
    }

    fn one_minus(&self, z: &[C], w: &[C]) -> Result<C> {
        let d = C::new(1.0, 0.0) - inner(z, w);
        if d.norm() < 1e-14 {
            return Err(BergmanError::Pole(format!("⟨z, w⟩ = 1 on ball({})", self.n)));
        }
        Ok(d)
    }

    pub fn kernel(&self, z: &[C], w: &[C]) -> Result<C> {
        self.check(z)?;
        self.check(w)?;
        let d = self.one_minus(z, w)?;
        Ok(factorial(self.n) / PI.powi(self.n as i32) / d.powi(self.n as i32 + 1))
    }

    /// Metric matrix `g_{αβ̄}(z) = (n+1)[δ/(1−|z|²) + z̄_α z_β/(1−|z|²)²]`.
    pub fn metric(&self, z: &[C]) -> Result<DMatrix<C>> {
        self.check(z)?;
        let n1 = self.n as f64 + 1.0;
        let s = 1.0 - norm_sqr(z);
        Ok(DMatrix::from_fn(self.n, self.n, |a, b| {
            let delta = if a == b { 1.0 / s } else { 0.0 };
            (C::new(delta, 0.0) + z[a].conj() * z[b] / (s * s)) * n1
        }))
    }

    /// `v_j = ∂_{t̄_j} log K(z, t)|_p − ∂_{t̄_j} log K(t, t)|_p`.
    fn log_derivative_offset(&self, p: &[C], z: &[C]) -> Result<DVector<C>> {
        let n1 = self.n as f64 + 1.0;
        let d = self.one_minus(z, p)?;
        let s = 1.0 - norm_sqr(p);
        Ok(DVector::from_fn(self.n, |j, _| (z[j] / d - p[j] / s) * n1))
    }

    fn inverse_metric(&self, p: &[C]) -> Result<DMatrix<C>> {
        self.metric(p)?
            .try_inverse()
            .ok_or_else(|| BergmanError::IllConditioned { z: p[0], g: 0.0 })
    }

    /// Representative coordinate `w_α(z) = Σ_j g^{j̄α}(p) v_j(z)`.
    pub fn rep_coordinate(&self, p: &[C], z: &[C]) -> Result<Vec<C>> {
        self.check(z)?;
        let v = self.log_derivative_offset(p, z)?;
        let w = self.inverse_metric(p)?.transpose() * v;
        Ok(w.iter().copied().collect())
    }

    /// `Q = Σ w_α g_{αβ̄}(p) w̄_β`.
    pub fn q_form(&self, p: &[C], w: &[C]) -> Result<f64> {
        let g = self.metric(p)?;
        let mut q = C::new(0.0, 0.0);
        for a in 0..self.n {
            for b in 0..self.n {
                q += w[a] * g[(a, b)] * w[b].conj();
            }
        }
        Ok(q.re)
    }

    /// Diastasis `log[K(z,z)K(p,p)/|K(z,p)|²]` and its prediction
    /// `−(2/c²) log(1 − (c²/2) Q(z))`.
    pub fn diastasis(&self, p: &[C], z: &[C]) -> Result<(f64, f64)> {
        let n1 = self.n as f64 + 1.0;
        let d = self.one_minus(z, p)?;
        let phi = -n1 * ((1.0 - norm_sqr(z)) * (1.0 - norm_sqr(p)) / d.norm_sqr()).ln();
        let w = self.rep_coordinate(p, z)?;
        let q = self.q_form(p, &w)?;
        let c2 = self.c_squared();
        let arg = 1.0 - 0.5 * c2 * q;
        let pred = if arg > 0.0 { -(2.0 / c2) * arg.ln() } else { f64::NAN };
        Ok((phi, pred))
    }

    /// Jacobian `∂w_α/∂z_k` of the representative coordinate.
    pub fn rep_jacobian(&self, p: &[C], z: &[C]) -> Result<DMatrix<C>> {
        self.check(z)?;
        let n1 = self.n as f64 + 1.0;
        let d = self.one_minus(z, p)?;
        let jv = DMatrix::from_fn(self.n, self.n, |j, k| {
            let delta = if j == k { C::new(1.0, 0.0) / d } else { C::new(0.0, 0.0) };
            (delta + z[j] * p[k].conj() / (d * d)) * n1
        });
        Ok(self.inverse_metric(p)?.transpose() * jv)
    }

    /// Right-hand side of `K(z, p) = D_T(z) · n! det g(p) / (πⁿ (n+1)ⁿ)`,
    /// which at `p = 0` reads `K(z, 0) = D_T(z) / vol`.
    pub fn kernel_from_jacobian(&self, p: &[C], z: &[C]) -> Result<C> {
        let dt = self.rep_jacobian(p, z)?.determinant();
        let det_g = self.metric(p)?.determinant();
        let n1 = self.n as f64 + 1.0;
        Ok(dt * det_g * factorial(self.n) / (PI.powi(self.n as i32) * n1.powi(self.n as i32)))
    }

    /// Holomorphic sectional curvature at `z` in direction `v`, half the
    /// Gaussian curvature of the metric restricted to the affine line `z + λv`
    /// (affine complex lines are totally geodesic in the ball). The Laplacian
    /// of `log h(λ)` is taken by Richardson-extrapolated five-point stencils.
    pub fn holomorphic_sectional_curvature(&self, z: &[C], v: &[C]) -> Result<f64> {
        self.check(z)?;
        let along = |lam: C| -> Result<f64> {
            let x: Vec<C> = z.iter().zip(v).map(|(a, b)| a + lam * b).collect();
            let g = self.metric(&x)?;
            let mut h = C::new(0.0, 0.0);
            for a in 0..self.n {
                for b in 0..self.n {
                    h += v[a] * g[(a, b)] * v[b].conj();
                }
            }
            Ok(h.re.ln())
        };
        let room = 1.0 - norm_sqr(z).sqrt();
        let vn = norm_sqr(v).sqrt();
        let h0 = 0.05 * room / vn;
        let lap = |h: f64| -> Result<f64> {
            let c = along(C::new(0.0, 0.0))?;
            let s = along(C::new(h, 0.0))? + along(C::new(-h, 0.0))? + along(C::new(0.0, h))? + along(C::new(0.0, -h))?;
            Ok((s - 4.0 * c) / (h * h))
        };
        let l = (4.0 * lap(h0 / 2.0)? - lap(h0)?) / 3.0;
        let h = along(C::new(0.0, 0.0))?.exp();
        // ∂∂̄ = Δ/4 and κ = −(2/h) ∂∂̄ log h
        Ok(0.5 * (-(2.0 / h) * l / 4.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<C> {
        loop {
            let z: Vec<C> = (0..n)
                .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * radius)
                .collect();
            if norm_sqr(&z) < radius * radius {
                return z;
            }
        }
    }

    #[test]
    fn kernel_at_origin() {
        let b = BallKernel::new(2).unwrap();
        let o = [C::new(0.0, 0.0); 2];
        assert!((b.kernel(&o, &o).unwrap().re - 2.0 / (PI * PI)).abs() < 1e-15);
        let d = BallKernel::new(1).unwrap();
        assert!((d.kernel(&o[..1], &o[..1]).unwrap().re - 1.0 / PI).abs() < 1e-16);
        assert!(BallKernel::new(5).is_err());
    }

    #[test]
    fn diastasis_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            let b = BallKernel::new(n).unwrap();
            let o = vec![C::new(0.0, 0.0); n];
            for _ in 0..20 {
                let z = random_point(&mut rng, n, 0.9);
                let k = |x: &[C], y: &[C]| b.kernel(x, y).unwrap();
                let phi = (k(&z, &z) * k(&o, &o) / k(&z, &o).norm_sqr()).re.ln();
                let expect = -(n as f64 + 1.0) * (1.0 - norm_sqr(&z)).ln();
                assert!((phi - expect).abs() < 1e-12);
                let p = random_point(&mut rng, n, 0.6);
                let (phi, pred) = b.diastasis(&p, &z).unwrap();
                assert!((phi - pred).abs() < 1e-12 * (1.0 + phi.abs()), "n={n}: {phi} vs {pred}");
            }
        }
    }

    #[test]
    fn rep_coordinate_is_identity_at_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 1..=4 {
            let b = BallKernel::new(n).unwrap();
            let o = vec![C::new(0.0, 0.0); n];
            let z = random_point(&mut rng, n, 0.95);
            let w = b.rep_coordinate(&o, &z).unwrap();
            for (a, c) in w.iter().zip(&z) {
                assert!((a - c).norm() < 1e-15);
            }
            // image region Q < 2/c² is the unit ball itself
            let q = b.q_form(&o, &w).unwrap();
            assert!((q - (n as f64 + 1.0) * norm_sqr(&z)).abs() < 1e-13);
        }
    }

    #[test]
    fn image_stays_inside_region() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let b = BallKernel::new(3).unwrap();
        let p = random_point(&mut rng, 3, 0.5);
        for _ in 0..50 {
            let z = random_point(&mut rng, 3, 0.99);
            let w = b.rep_coordinate(&p, &z).unwrap();
            assert!(b.q_form(&p, &w).unwrap() < 2.0 / b.c_squared());
        }
    }

    #[test]
    fn jacobian_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for n in 1..=4 {
            let b = BallKernel::new(n).unwrap();
            let p = random_point(&mut rng, n, 0.5);
            let z = random_point(&mut rng, n, 0.9);
            let lhs = b.kernel(&z, &p).unwrap();
            let rhs = b.kernel_from_jacobian(&p, &z).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm(), "n={n}");
        }
        let b = BallKernel::new(2).unwrap();
        let o = [C::new(0.0, 0.0); 2];
        let z = [C::new(0.3, 0.1), C::new(-0.2, 0.4)];
        let dt = b.rep_jacobian(&o, &z).unwrap().determinant();
        assert!((dt - 1.0).norm() < 1e-15);
        assert!((b.kernel(&z, &o).unwrap() * b.volume() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn sectional_curvature_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for n in 1..=4 {
            let b = BallKernel::new(n).unwrap();
            for _ in 0..5 {
                let z = random_point(&mut rng, n, 0.7);
                let v = random_point(&mut rng, n, 1.0);
                let h = b.holomorphic_sectional_curvature(&z, &v).unwrap();
                assert!((h + 2.0 / (n as f64 + 1.0)).abs() < 1e-6, "n={n}: {h}");
            }
        }
    }

    #[test]
    fn pole_on_boundary_contact() {
        let b = BallKernel::new(2).unwrap();
        let z = [C::new(0.6, 0.0), C::new(0.0, 0.8 - 1e-16)];
        assert!(b.kernel(&z, &z).is_err());
    }
}
