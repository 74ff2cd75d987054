//! Bounded planar domains described by oriented piecewise-smooth boundaries.
//!
//! A [`Domain`] is a list of [`BoundaryCurve`]s whose traversals together
//! wind once around every interior point. Slits are represented by a
//! segment traversed in both directions, so they enclose no area but are
//! still seen by membership tests, distances and path searches.

mod curve;
mod path;
mod quadrature;
mod spec;

pub use curve::{BoundaryCurve, CurveKind, Orientation, ParamFn, ParametricCurve};
pub use path::{shortest_inner_path, GridGraph, InnerPath};
pub use quadrature::{
    boundary_quadrature, boundary_quadrature_graded, gauss_legendre, Panel, QuadratureRule,
    DEFAULT_GRADING_LEVELS,
};
pub use spec::DomainSpec;

use crate::error::{BergmanError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

type C = Complex64;

/// Points closer than this to the boundary are reported as exterior.
pub const BOUNDARY_BAND: f64 = 1e-12;

/// Analytic label attached to stock domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainTag {
    Disc { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    SectorComplement { r_max: f64, theta_min: f64, theta_max: f64 },
    SlitDisc { slit_from: f64, slit_to: f64 },
    ConformalImage { map: String },
    Polygon,
    Ball { n: usize },
}

#[derive(Debug, Clone)]
pub struct Domain {
    id: String,
    curves: Vec<BoundaryCurve>,
    tag: Option<DomainTag>,
    bbox: (C, C),
}

impl Domain {
    /// Builds a planar domain and validates its boundary.
    pub fn new(id: impl Into<String>, curves: Vec<BoundaryCurve>, tag: Option<DomainTag>) -> Result<Self> {
        let id = id.into();
        if curves.is_empty() {
            return Err(BergmanError::DegenerateGeometry(format!("{id}: no boundary curves")));
        }
        let mut lo = C::new(f64::INFINITY, f64::INFINITY);
        let mut hi = C::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut total = 0.0;
        for c in &curves {
            let len = c.length();
            if !(len.is_finite() && len > 0.0) {
                return Err(BergmanError::DegenerateGeometry(format!(
                    "{id}: curve with length {len}"
                )));
            }
            total += len;
            let (a, b) = c.bounds();
            lo = C::new(lo.re.min(a.re), lo.im.min(a.im));
            hi = C::new(hi.re.max(b.re), hi.im.max(b.im));
        }
        if !(total.is_finite() && total > 0.0) {
            return Err(BergmanError::DegenerateGeometry(format!("{id}: boundary length {total}")));
        }
        Ok(Domain {
            id,
            curves,
            tag,
            bbox: (lo, hi),
        })
    }

    /// Disc `|z| < radius`.
    pub fn disc(radius: f64) -> Result<Self> {
        check_positive("radius", radius)?;
        Domain::new(
            format!("disc({radius})"),
            vec![BoundaryCurve::circle(C::new(0.0, 0.0), radius)],
            Some(DomainTag::Disc { radius }),
        )
    }

    /// Annulus `inner < |z| < outer`.
    pub fn annulus(inner: f64, outer: f64) -> Result<Self> {
        check_positive("r", inner)?;
        if outer <= inner {
            return Err(BergmanError::InvalidInput(format!(
                "annulus needs r < R, got r={inner}, R={outer}"
            )));
        }
        Domain::new(
            format!("annulus({inner},{outer})"),
            vec![
                BoundaryCurve::circle(C::new(0.0, 0.0), outer),
                BoundaryCurve::circle(C::new(0.0, 0.0), inner).reversed(),
            ],
            Some(DomainTag::Annulus { inner, outer }),
        )
    }

    /// Circular sector `{r e^{iθ} : 0 < r < r_max, θ_min < θ < θ_max}`.
    pub fn sector(r_max: f64, theta_min: f64, theta_max: f64) -> Result<Self> {
        check_positive("r_max", r_max)?;
        let opening = theta_max - theta_min;
        if !(opening > 0.0 && opening < TAU) {
            return Err(BergmanError::InvalidInput(format!(
                "sector opening must lie in (0, 2π), got {opening}"
            )));
        }
        let a = C::from_polar(r_max, theta_min);
        let b = C::from_polar(r_max, theta_max);
        let o = C::new(0.0, 0.0);
        Domain::new(
            format!("sector({r_max},{theta_min},{theta_max})"),
            vec![
                BoundaryCurve::arc(o, r_max, theta_min, theta_max),
                BoundaryCurve::segment(b, o),
                BoundaryCurve::segment(o, a),
            ],
            Some(DomainTag::SectorComplement {
                r_max,
                theta_min,
                theta_max,
            }),
        )
    }

    /// The sector `0 < r < 1, π/2 < θ < 2π`.
    pub fn kerzman() -> Self {
        Domain::sector(1.0, std::f64::consts::FRAC_PI_2, TAU).expect("valid sector")
    }

    /// Unit disc with the real segment `[slit_from, slit_to]` removed.
    pub fn slit_disc(slit_from: f64, slit_to: f64) -> Result<Self> {
        if !(-1.0 < slit_from && slit_from < slit_to && slit_to <= 1.0) {
            return Err(BergmanError::InvalidInput(format!(
                "slit must satisfy -1 < from < to <= 1, got [{slit_from}, {slit_to}]"
            )));
        }
        let a = C::new(slit_from, 0.0);
        let b = C::new(slit_to, 0.0);
        Domain::new(
            format!("slit_disc({slit_from},{slit_to})"),
            vec![
                BoundaryCurve::circle(C::new(0.0, 0.0), 1.0),
                BoundaryCurve::segment(b, a),
                BoundaryCurve::segment(b, a).reversed(),
            ],
            Some(DomainTag::SlitDisc { slit_from, slit_to }),
        )
    }

    /// Polygon with counter-clockwise vertices.
    pub fn polygon(vertices: &[C]) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(BergmanError::DegenerateGeometry("polygon needs 3 vertices".into()));
        }
        let n = vertices.len();
        let signed_area: f64 = (0..n)
            .map(|i| {
                let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                a.re * b.im - a.im * b.re
            })
            .sum();
        let ccw: Vec<C> = if signed_area > 0.0 {
            vertices.to_vec()
        } else {
            vertices.iter().rev().copied().collect()
        };
        let curves = (0..n)
            .map(|i| BoundaryCurve::segment(ccw[i], ccw[(i + 1) % n]))
            .collect();
        Domain::new(format!("polygon({n})"), curves, Some(DomainTag::Polygon))
    }

    /// Square `[-h, h]²`.
    pub fn square(h: f64) -> Result<Self> {
        Domain::polygon(&[C::new(-h, -h), C::new(h, -h), C::new(h, h), C::new(-h, h)])
    }

    /// Domain bounded by a single closed parametric curve.
    pub fn from_closed_curve(id: impl Into<String>, curve: BoundaryCurve, tag: Option<DomainTag>) -> Result<Self> {
        Domain::new(id, vec![curve], tag)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tag(&self) -> Option<&DomainTag> {
        self.tag.as_ref()
    }

    pub fn curves(&self) -> &[BoundaryCurve] {
        &self.curves
    }

    pub fn bbox(&self) -> (C, C) {
        self.bbox
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn with_tag(mut self, tag: DomainTag) -> Self {
        self.tag = Some(tag);
        self
    }

    pub fn boundary_length(&self) -> f64 {
        self.curves.iter().map(|c| c.length()).sum()
    }

    /// Area by the boundary rule `(1/2i) ∮ z̄ dz`.
    pub fn area(&self) -> f64 {
        let rule = boundary_quadrature(self, 16, 16).expect("validated domain");
        (rule.integrate(|z| z.conj()) / C::new(0.0, 2.0)).re
    }

    /// Whether some boundary component is a clockwise closed curve, i.e. the
    /// domain has a hole with interior (slits do not count).
    pub fn has_hole(&self) -> bool {
        self.curves
            .iter()
            .any(|c| c.is_closed() && c.orientation == Orientation::Negative)
    }

    /// Winding number of the boundary about `z` (rounded).
    pub fn winding_number(&self, z: C) -> i64 {
        let total: f64 = self.curves.iter().map(|c| c.angle_change(z)).sum();
        (total / TAU).round() as i64
    }

    pub fn distance_to_boundary(&self, z: C) -> f64 {
        self.curves
            .iter()
            .map(|c| c.distance(z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Membership: winding number +1 and not within [`BOUNDARY_BAND`] of ∂Ω.
    pub fn contains(&self, z: C) -> bool {
        let (lo, hi) = self.bbox;
        if z.re < lo.re || z.re > hi.re || z.im < lo.im || z.im > hi.im {
            return false;
        }
        if self.distance_to_boundary(z) < BOUNDARY_BAND {
            return false;
        }
        self.winding_number(z) == 1
    }

    /// Whether the open segment `(a, b)` stays off the boundary.
    pub fn segment_clear(&self, a: C, b: C) -> bool {
        !self.curves.iter().any(|c| c.intersects_segment(a, b))
    }

    /// Lattice points `spacing·(i + i j)` inside the domain at distance ≥ `margin`
    /// from the boundary, ordered by real part then imaginary part.
    pub fn interior_grid(&self, spacing: f64, margin: f64) -> Result<Vec<C>> {
        if !(spacing > 0.0) {
            return Err(BergmanError::InvalidInput(format!("spacing must be positive, got {spacing}")));
        }
        if !(margin >= 0.0) {
            return Err(BergmanError::InvalidInput(format!("margin must be nonnegative, got {margin}")));
        }
        let (lo, hi) = self.bbox;
        let i0 = (lo.re / spacing).ceil() as i64;
        let i1 = (hi.re / spacing).floor() as i64;
        let j0 = (lo.im / spacing).ceil() as i64;
        let j1 = (hi.im / spacing).floor() as i64;
        let mut out = Vec::new();
        for i in i0..=i1 {
            for j in j0..=j1 {
                let z = C::new(i as f64 * spacing, j as f64 * spacing);
                if self.contains(z) && (margin == 0.0 || self.distance_to_boundary(z) >= margin) {
                    out.push(z);
                }
            }
        }
        if out.is_empty() {
            log::warn!(
                "interior grid of {} is empty (spacing {spacing}, margin {margin})",
                self.id
            );
        }
        Ok(out)
    }

    /// Interior samples hugging the boundary at distance ≈ `margin`: offsets of
    /// boundary samples in a fan of directions, keeping those at distance ≥ margin.
    pub fn boundary_layer(&self, margin: f64, per_curve: usize) -> Vec<C> {
        let mut out = Vec::new();
        for c in &self.curves {
            for p in c.samples(per_curve) {
                for k in 0..16 {
                    let z = p + C::from_polar(margin, k as f64 * TAU / 16.0);
                    if self.contains(z) && self.distance_to_boundary(z) >= margin * (1.0 - 1e-9) {
                        out.push(z);
                    }
                }
            }
        }
        out
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(BergmanError::InvalidInput(format!("{name} must be positive, got {v}")))
    }
}
