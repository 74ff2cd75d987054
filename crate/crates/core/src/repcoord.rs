//! The Bergman representative coordinate
//! `T(z) = g(p)⁻¹ [∂_{t̄} log K(z, t) − ∂_{t̄} log K(t, t)]_{t = p}`
//! and the quantities built from it: `T′`, the diastasis, the Green's
//! function `log|T| + ½ log(g(p)/2)` and Newton inversion.

use crate::error::{BergmanError, Result};
use crate::kernel::{metric_sample_with, KernelSource};
use num_complex::Complex64;
use serde::Serialize;
use std::sync::Arc;

type C = Complex64;

/// `|K(z,p)|` below this fraction of `√(K(z,z) K(p,p))` is treated as a zero.
pub const KERNEL_ZERO_GUARD: f64 = 1e-10;

/// Newton tolerance on `|T(z) − w|`.
pub const INVERT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiastasisValue {
    pub z: C,
    pub phi: f64,
    pub prediction: f64,
    pub residual: f64,
}

/// Everything the map pipeline reports at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepSample {
    pub z: C,
    pub w: C,
    pub dw: C,
    /// `K(z, p)`
    pub k_zp: C,
    /// `Q(z) = g(p)|w|²`
    pub q: f64,
    pub diastasis: DiastasisValue,
    /// Green's function; `None` when the source lacks constant curvature.
    pub green: Option<f64>,
}

#[derive(Clone)]
pub struct RepCoordinate {
    source: Arc<dyn KernelSource>,
    anchor: C,
    g_p: f64,
    k_pp: f64,
    /// `∂_{t̄} log K(t, t)` at `t = p`
    offset: C,
    c2: f64,
    constant_curvature: bool,
}

impl std::fmt::Debug for RepCoordinate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RepCoordinate")
            .field("source", &self.source.label())
            .field("anchor", &self.anchor)
            .field("g_p", &self.g_p)
            .field("c2", &self.c2)
            .field("constant_curvature", &self.constant_curvature)
            .finish()
    }
}

impl RepCoordinate {
    pub fn new(source: Arc<dyn KernelSource>, anchor: C) -> Result<Self> {
        let s = metric_sample_with(source.as_ref(), anchor, 0.0)?;
        let k_pp = s.block[0][0].re;
        Ok(RepCoordinate {
            offset: s.block[0][1] / k_pp,
            source,
            anchor,
            g_p: s.g,
            k_pp,
            c2: 1.0,
            constant_curvature: false,
        })
    }

    /// Declares the outcome of the curvature detector; unlocks the Green's
    /// function and the capacity.
    pub fn with_constant_curvature(mut self, yes: bool) -> Self {
        self.constant_curvature = yes;
        self
    }

    pub fn constant_curvature(&self) -> bool {
        self.constant_curvature
    }

    pub fn source(&self) -> &Arc<dyn KernelSource> {
        &self.source
    }

    pub fn anchor(&self) -> C {
        self.anchor
    }

    /// `g(p)`
    pub fn metric_at_anchor(&self) -> f64 {
        self.g_p
    }

    pub fn kernel_at_anchor(&self) -> f64 {
        self.k_pp
    }

    /// `∂_{t̄} log K(t, t)|_{t=p}`
    pub fn offset(&self) -> C {
        self.offset
    }

    pub fn c_squared(&self) -> f64 {
        self.c2
    }

    /// `√(2/(c² g(p)))`: the image is the disc `Q < 2/c²`.
    pub fn image_radius(&self) -> f64 {
        (2.0 / (self.c2 * self.g_p)).sqrt()
    }

    fn guarded(&self, z: C) -> Result<([[C; 3]; 3], f64)> {
        let b = self.source.block(z, self.anchor)?;
        let k_zz = self.source.kernel(z, z, 0, 0)?.re;
        let ratio = b[0][0].norm() / (k_zz * self.k_pp).sqrt();
        if !(ratio >= KERNEL_ZERO_GUARD) {
            return Err(BergmanError::NearKernelZero { z, ratio });
        }
        Ok((b, k_zz))
    }

    pub fn coordinate(&self, z: C) -> Result<C> {
        let (b, _) = self.guarded(z)?;
        Ok((b[0][1] / b[0][0] - self.offset) / self.g_p)
    }

    /// `T′(z) = g(p)⁻¹ (K₁₁ K − K₁₀ K₀₁)/K²` at `(z, p)`.
    pub fn derivative(&self, z: C) -> Result<C> {
        let (b, _) = self.guarded(z)?;
        Ok(derivative_from_block(&b, self.g_p))
    }

    pub fn diastasis(&self, z: C) -> Result<DiastasisValue> {
        let (b, k_zz) = self.guarded(z)?;
        let w = (b[0][1] / b[0][0] - self.offset) / self.g_p;
        Ok(self.diastasis_from(z, b[0][0], k_zz, w))
    }

    fn diastasis_from(&self, z: C, k_zp: C, k_zz: f64, w: C) -> DiastasisValue {
        let phi = if z == self.anchor {
            0.0
        } else {
            (k_zz * self.k_pp / k_zp.norm_sqr()).ln()
        };
        let q = self.g_p * w.norm_sqr();
        let arg = 1.0 - 0.5 * self.c2 * q;
        let prediction = if arg > 0.0 { -(2.0 / self.c2) * arg.ln() } else { f64::INFINITY };
        DiastasisValue {
            z,
            phi,
            prediction,
            residual: (phi - prediction).abs(),
        }
    }

    fn require_constant(&self) -> Result<()> {
        if self.constant_curvature {
            Ok(())
        } else {
            Err(BergmanError::NotApplicable(format!(
                "{} does not have constant curvature −2",
                self.source.label()
            )))
        }
    }

    /// `F(z) = log|T(z)| + ½ log(g(p)/2)`.
    pub fn green_function(&self, z: C) -> Result<f64> {
        self.require_constant()?;
        if z == self.anchor {
            return Err(BergmanError::InvalidInput("Green's function evaluated at its pole".into()));
        }
        Ok(self.coordinate(z)?.norm().ln() + 0.5 * (self.g_p / 2.0).ln())
    }

    /// `c_β(p) = √(g(p)/2)`.
    pub fn capacity(&self) -> Result<f64> {
        self.require_constant()?;
        Ok((self.g_p / 2.0).sqrt())
    }

    /// All reported quantities at `z` from two kernel evaluations.
    pub fn sample(&self, z: C) -> Result<RepSample> {
        let (b, k_zz) = self.guarded(z)?;
        let w = (b[0][1] / b[0][0] - self.offset) / self.g_p;
        let diastasis = self.diastasis_from(z, b[0][0], k_zz, w);
        let green = if self.constant_curvature && z != self.anchor {
            Some(w.norm().ln() + 0.5 * (self.g_p / 2.0).ln())
        } else {
            None
        };
        Ok(RepSample {
            z,
            w,
            dw: derivative_from_block(&b, self.g_p),
            k_zp: b[0][0],
            q: self.g_p * w.norm_sqr(),
            diastasis,
            green,
        })
    }

    /// Solves `T(z) = w` by Newton's method with step halving, trying `seed`,
    /// then `p`, then eight points on the ray from `p` in the direction of `w`.
    pub fn invert(&self, w: C, seed: Option<C>) -> Result<C> {
        let domain = self.source.domain();
        let inradius = domain.distance_to_boundary(self.anchor);
        let dir = if w.norm() > 0.0 { w / w.norm() } else { C::new(1.0, 0.0) };
        let mut seeds: Vec<C> = seed.into_iter().collect();
        seeds.push(self.anchor);
        seeds.extend((1..=8).map(|k| self.anchor + dir * (0.1 * k as f64 * inradius)));
        for s in seeds {
            if let Some(z) = self.newton(w, s) {
                return Ok(z);
            }
        }
        Err(BergmanError::InversionFailure(w))
    }

    fn newton(&self, w: C, seed: C) -> Option<C> {
        let domain = self.source.domain();
        if !domain.contains(seed) {
            return None;
        }
        let mut z = seed;
        let mut r = self.coordinate(z).ok()? - w;
        for _ in 0..40 {
            if r.norm() <= INVERT_TOL * 1e-2 {
                break;
            }
            let d = self.derivative(z).ok()?;
            let step = r / d;
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..20 {
                let cand = z - step * t;
                if domain.contains(cand) {
                    if let Ok(tc) = self.coordinate(cand) {
                        let rc = tc - w;
                        if rc.norm() < r.norm() {
                            z = cand;
                            r = rc;
                            accepted = true;
                            break;
                        }
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        (r.norm() <= INVERT_TOL).then_some(z)
    }
}

fn derivative_from_block(b: &[[C; 3]; 3], g_p: f64) -> C {
    let k = b[0][0];
    (b[1][1] * k - b[1][0] * b[0][1]) / (k * k * g_p)
}
