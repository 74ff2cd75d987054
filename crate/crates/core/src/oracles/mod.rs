//! Closed-form ground truth: kernels of the disc, its conformal images, the
//! annulus and the ball, together with Green's functions and capacities.

mod annulus;
mod ball;
mod maps;

pub use annulus::{annulus_capacity, laurent_norm_sqr, AnnulusKernel, CapacityEstimate, LaurentSum};
pub use ball::{BallKernel, MAX_BALL_DIM};
pub use maps::{
    disc_map, kerzman_map, map_by_id, mobius, quadratic_map, sector_map, slit_map, ConformalMap, Stage,
};

use crate::error::{BergmanError, Result};
use crate::geometry::{Domain, DomainTag};
use crate::jet::{BiJet, Jet3};
use crate::kernel::{Block, KernelSource};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

type C = Complex64;

/// A planar domain whose Bergman kernel is known in closed form.
#[derive(Debug, Clone)]
pub enum AnalyticKernel {
    /// `K_D(z, w) = f′(z) conj(f′(w)) / (π (1 − f(z) conj(f(w)))²)` for a Riemann map `f`.
    Conformal(ConformalMap),
    Annulus(AnnulusKernel),
}

impl AnalyticKernel {
    pub fn from_map_id(id: &str) -> Result<Self> {
        Ok(AnalyticKernel::Conformal(map_by_id(id)?))
    }

    /// The oracle matching a stock domain, if one exists.
    pub fn for_domain(domain: &Domain) -> Option<Self> {
        let map = match domain.tag()? {
            DomainTag::Disc { radius } => disc_map(*radius).ok()?,
            DomainTag::Annulus { inner, outer } => {
                return AnnulusKernel::new(*inner, *outer).ok().map(AnalyticKernel::Annulus)
            }
            DomainTag::SectorComplement {
                r_max,
                theta_min,
                theta_max,
            } => {
                if *r_max == 1.0 && (*theta_min - FRAC_PI_2).abs() < 1e-12 && (*theta_max - TAU).abs() < 1e-12 {
                    kerzman_map()
                } else {
                    sector_map(*r_max, *theta_min, *theta_max).ok()?
                }
            }
            DomainTag::SlitDisc { slit_from, slit_to } if *slit_to == 1.0 => slit_map(*slit_from).ok()?,
            DomainTag::ConformalImage { map } => map_by_id(map).ok()?,
            _ => return None,
        };
        Some(AnalyticKernel::Conformal(map))
    }

    pub fn is_simply_connected(&self) -> bool {
        matches!(self, AnalyticKernel::Conformal(_))
    }

    pub fn map(&self) -> Option<&ConformalMap> {
        match self {
            AnalyticKernel::Conformal(m) => Some(m),
            AnalyticKernel::Annulus(_) => None,
        }
    }

    pub fn id(&self) -> String {
        match self {
            AnalyticKernel::Conformal(m) => m.id().to_string(),
            AnalyticKernel::Annulus(a) => {
                let (r, big_r) = a.radii();
                format!("annulus:{r},{big_r}")
            }
        }
    }
}

/// Derivative block of `f′(z) conj(f′(w)) φ(f(z) conj(f(w)))` with
/// `φ(u) = 1/(π (1 − u)²)`, by bivariate Taylor arithmetic.
fn conformal_block(map: &ConformalMap, z: C, w: C) -> Result<Block> {
    let fz = map.jet(z)?;
    let fw = map.jet(w)?;
    let u = BiJet::from_z(&fz) * BiJet::from_w_conj(&fw);
    let one_minus = C::new(1.0, 0.0) - u.constant_term();
    if one_minus.norm() < 1e-14 {
        return Err(BergmanError::Pole(format!(
            "{}: f(z) conj(f(w)) = 1 at ({z}, {w})",
            map.id()
        )));
    }
    let mut phi = [C::new(0.0, 0.0); 5];
    let mut fact = 1.0;
    for (m, v) in phi.iter_mut().enumerate() {
        fact *= (m + 1) as f64;
        *v = fact / PI / one_minus.powi(m as i32 + 2);
    }
    let dz = Jet3([fz.d1(), fz.d2(), fz.d3(), C::new(0.0, 0.0)]);
    let dw = Jet3([fw.d1(), fw.d2(), fw.d3(), C::new(0.0, 0.0)]);
    let k = BiJet::from_z(&dz) * BiJet::from_w_conj(&dw) * u.compose(phi);
    Ok(k.derivative_block())
}

impl KernelSource for AnalyticKernel {
    fn block(&self, z: C, w: C) -> Result<Block> {
        match self {
            AnalyticKernel::Conformal(m) => conformal_block(m, z, w),
            AnalyticKernel::Annulus(a) => Ok(a.sum(z, w)?.block),
        }
    }

    fn domain(&self) -> &Domain {
        match self {
            AnalyticKernel::Conformal(m) => m.domain(),
            AnalyticKernel::Annulus(a) => a.domain(),
        }
    }

    fn label(&self) -> String {
        format!("oracle({})", self.id())
    }

    fn is_oracle(&self) -> bool {
        true
    }

    fn truncation(&self, z: C) -> f64 {
        match self {
            AnalyticKernel::Conformal(_) => 0.0,
            AnalyticKernel::Annulus(a) => a.sum(z, z).map(|s| s.tail).unwrap_or(f64::INFINITY),
        }
    }
}

/// `∂_z^a ∂_{w̄}^b K(z, w)` from the closed form.
pub fn oracle_kernel(ak: &AnalyticKernel, z: C, w: C, a: usize, b: usize) -> Result<C> {
    ak.kernel(z, w, a, b)
}

fn simply_connected(ak: &AnalyticKernel) -> Result<&ConformalMap> {
    ak.map().ok_or_else(|| {
        BergmanError::UnsupportedDomain(format!(
            "{} is multiply connected; no closed-form Green's function",
            ak.id()
        ))
    })
}

/// Green's function `G(z, p) = log|m_{f(p)}(f(z))|`, where `m_a` is the disc
/// automorphism sending `a` to 0.
pub fn oracle_green(ak: &AnalyticKernel, z: C, p: C) -> Result<f64> {
    let map = simply_connected(ak)?;
    if z == p {
        return Err(BergmanError::InvalidInput("Green's function evaluated at its pole".into()));
    }
    let a = map.eval(p)?;
    let u = map.eval(z)?;
    Ok(((u - a) / (C::new(1.0, 0.0) - a.conj() * u)).norm().ln())
}

/// `(c_β(p), c_B(p))`, both equal to `|f′(p)|/(1 − |f(p)|²)` on simply connected domains.
pub fn oracle_capacities(ak: &AnalyticKernel, p: C) -> Result<(f64, f64)> {
    let map = simply_connected(ak)?;
    let j = map.jet(p)?;
    let c = j.d1().norm() / (1.0 - j.value().norm_sqr());
    Ok((c, c))
}

/// Planar domain of a registered map id.
pub fn domain_for_map(map: &str) -> Result<Domain> {
    Ok(map_by_id(map)?.domain().clone())
}
