//! Truncated Taylor arithmetic used by the closed-form kernels.
//!
//! [`Jet3`] carries a holomorphic function and its first three derivatives
//! at a point; [`BiJet`] carries the Taylor coefficients of a function of
//! `(z, w̄)` up to second order in each variable, which is exactly the
//! derivative block a kernel evaluator has to return.

use num_complex::Complex64;
use std::ops::{Add, Mul};

type C = Complex64;

/// Value and derivatives `f, f', f'', f'''` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3(pub [C; 4]);

impl Jet3 {
    /// The identity map `z ↦ z` at `z`.
    pub fn variable(z: C) -> Self {
        Jet3([z, C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)])
    }

    pub fn value(&self) -> C {
        self.0[0]
    }

    pub fn d1(&self) -> C {
        self.0[1]
    }

    pub fn d2(&self) -> C {
        self.0[2]
    }

    pub fn d3(&self) -> C {
        self.0[3]
    }

    /// Chain rule: given the derivatives `phi[k] = φ^{(k)}(self.value())` of an
    /// outer function, returns the jet of `φ ∘ self`.
    pub fn compose(&self, phi: [C; 4]) -> Self {
        let [_, u1, u2, u3] = self.0;
        Jet3([
            phi[0],
            phi[1] * u1,
            phi[2] * u1 * u1 + phi[1] * u2,
            phi[3] * u1 * u1 * u1 + phi[2] * u1 * u2 * 3.0 + phi[1] * u3,
        ])
    }
}

/// Taylor coefficients `c[a][b]` of `δz^a δw̄^b`, truncated at `a, b ≤ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiJet(pub [[C; 3]; 3]);

impl BiJet {
    pub fn zero() -> Self {
        BiJet([[C::new(0.0, 0.0); 3]; 3])
    }

    pub fn constant(c: C) -> Self {
        let mut j = Self::zero();
        j.0[0][0] = c;
        j
    }

    /// Lifts a holomorphic jet in `z` (only `f, f', f''` are used).
    pub fn from_z(f: &Jet3) -> Self {
        let mut j = Self::zero();
        j.0[0][0] = f.0[0];
        j.0[1][0] = f.0[1];
        j.0[2][0] = f.0[2] * 0.5;
        j
    }

    /// Lifts `conj(f(w))`, an antiholomorphic function of `w`.
    pub fn from_w_conj(f: &Jet3) -> Self {
        let mut j = Self::zero();
        j.0[0][0] = f.0[0].conj();
        j.0[0][1] = f.0[1].conj();
        j.0[0][2] = f.0[2].conj() * 0.5;
        j
    }

    pub fn constant_term(&self) -> C {
        self.0[0][0]
    }

    /// `∂_z^a ∂_{w̄}^b` of the represented function at the base point.
    pub fn derivative(&self, a: usize, b: usize) -> C {
        const FACT: [f64; 3] = [1.0, 1.0, 2.0];
        self.0[a][b] * (FACT[a] * FACT[b])
    }

    /// All derivatives `∂_z^a ∂_{w̄}^b`, `a, b ≤ 2`.
    pub fn derivative_block(&self) -> [[C; 3]; 3] {
        let mut out = [[C::new(0.0, 0.0); 3]; 3];
        for (a, row) in out.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = self.derivative(a, b);
            }
        }
        out
    }

    /// `φ ∘ self` from `phi[m] = φ^{(m)}(c00)`, `m ≤ 4`.
    pub fn compose(&self, phi: [C; 5]) -> Self {
        let mut delta = *self;
        delta.0[0][0] = C::new(0.0, 0.0);
        let mut out = BiJet::constant(phi[0]);
        let mut power = BiJet::constant(C::new(1.0, 0.0));
        let mut factorial = 1.0;
        for (m, &d) in phi.iter().enumerate().skip(1) {
            power = power * delta;
            factorial *= m as f64;
            out = out + power.scale(d / factorial);
        }
        out
    }

    pub fn scale(&self, s: C) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }
}

impl Add for BiJet {
    type Output = BiJet;
    fn add(self, rhs: BiJet) -> BiJet {
        let mut out = self;
        for a in 0..3 {
            for b in 0..3 {
                out.0[a][b] += rhs.0[a][b];
            }
        }
        out
    }
}

impl Mul for BiJet {
    type Output = BiJet;
    fn mul(self, rhs: BiJet) -> BiJet {
        let mut out = BiJet::zero();
        for a1 in 0..3 {
            for b1 in 0..3 {
                let x = self.0[a1][b1];
                if x == C::new(0.0, 0.0) {
                    continue;
                }
                for a2 in 0..3 - a1 {
                    for b2 in 0..3 - b1 {
                        out.0[a1 + a2][b1 + b2] += x * rhs.0[a2][b2];
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn compose_matches_exp_of_square() {
        // f(z) = exp(z^2): f' = 2z f, f'' = (2 + 4z^2) f, f''' = (12z + 8z^3) f
        let z = c(0.3, -0.2);
        let inner = Jet3([z * z, z * 2.0, c(2.0, 0.0), c(0.0, 0.0)]);
        let e = (z * z).exp();
        let j = inner.compose([e, e, e, e]);
        assert!((j.d1() - z * 2.0 * e).norm() < 1e-14);
        assert!((j.d2() - (z * z * 4.0 + 2.0) * e).norm() < 1e-14);
        assert!((j.d3() - (z * 12.0 + z * z * z * 8.0) * e).norm() < 1e-13);
    }

    #[test]
    fn bijet_reproduces_product_derivatives() {
        // F(z, w̄) = (z w̄)^2 at z = 0.5, w = 0.25 i
        let z = c(0.5, 0.0);
        let w = c(0.0, 0.25);
        let u = BiJet::from_z(&Jet3::variable(z)) * BiJet::from_w_conj(&Jet3::variable(w));
        let f = u * u;
        let wb = w.conj();
        // ∂_z ∂_w̄ (z w̄)^2 = 4 z w̄
        assert!((f.derivative(1, 1) - z * wb * 4.0).norm() < 1e-15);
        // ∂_z^2 ∂_w̄^2 = 4
        assert!((f.derivative(2, 2) - c(4.0, 0.0)).norm() < 1e-15);
        // ∂_z^2 = 2 w̄^2
        assert!((f.derivative(2, 0) - wb * wb * 2.0).norm() < 1e-15);
    }

    #[test]
    fn bijet_compose_reciprocal_square() {
        // φ(u) = (1-u)^{-2} with u = z w̄: ∂_z∂_w̄ φ = 2/(1-u)^3 + 6u/(1-u)^4
        let z = c(0.3, 0.1);
        let w = c(-0.2, 0.4);
        let u = BiJet::from_z(&Jet3::variable(z)) * BiJet::from_w_conj(&Jet3::variable(w));
        let u0 = u.constant_term();
        let s = C::new(1.0, 0.0) - u0;
        let phi = [
            s.powi(-2),
            s.powi(-3) * 2.0,
            s.powi(-4) * 6.0,
            s.powi(-5) * 24.0,
            s.powi(-6) * 120.0,
        ];
        let f = u.compose(phi);
        let expected = s.powi(-3) * 2.0 + u0 * s.powi(-4) * 6.0;
        assert!((f.derivative(1, 1) - expected).norm() < 1e-13);
        let k22 = s.powi(-4) * 12.0 + u0 * s.powi(-5) * 96.0 + u0 * u0 * s.powi(-6) * 120.0;
        assert!((f.derivative(2, 2) - k22).norm() < 1e-12);
    }
}
