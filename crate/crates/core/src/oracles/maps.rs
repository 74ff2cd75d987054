//! Riemann maps onto the unit disc, built as compositions of elementary stages.

use crate::error::{BergmanError, Result};
use crate::geometry::{BoundaryCurve, Domain, DomainTag};
use crate::jet::Jet3;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

type C = Complex64;

const I: C = C { re: 0.0, im: 1.0 };
const ONE: C = C { re: 1.0, im: 0.0 };

/// Points this close (in argument) to a power-map cut are rejected.
const CUT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    /// `u ↦ a u + b`
    Affine { a: C, b: C },
    /// `u ↦ (a u + b) / (c u + d)`
    Mobius { a: C, b: C, c: C, d: C },
    /// `u ↦ u^alpha` on the sector `lo < arg u < lo + span`; the branch cut is
    /// placed in the middle of the complementary sector.
    Power { alpha: f64, lo: f64, span: f64 },
}

impl Stage {
    /// `[φ, φ', φ'', φ''']` at `u`.
    fn derivatives(&self, u: C, map: &str) -> Result<[C; 4]> {
        match *self {
            Stage::Affine { a, b } => Ok([a * u + b, a, C::new(0.0, 0.0), C::new(0.0, 0.0)]),
            Stage::Mobius { a, b, c, d } => {
                let den = c * u + d;
                if den.norm() < 1e-300 {
                    return Err(BergmanError::Pole(format!("{map}: Möbius pole at {u}")));
                }
                let det = a * d - b * c;
                Ok([
                    (a * u + b) / den,
                    det / (den * den),
                    -c * det * 2.0 / den.powi(3),
                    c * c * det * 6.0 / den.powi(4),
                ])
            }
            Stage::Power { alpha, lo, span } => {
                let r = u.norm();
                if r == 0.0 {
                    return Err(BergmanError::Branch { map: map.to_string(), z: u });
                }
                let start = lo - (TAU - span) / 2.0;
                let theta = (u.arg() - start).rem_euclid(TAU);
                if theta < CUT_TOL || TAU - theta < CUT_TOL {
                    return Err(BergmanError::Branch { map: map.to_string(), z: u });
                }
                let v = C::from_polar(r.powf(alpha), alpha * (theta + start));
                Ok([
                    v,
                    v / u * alpha,
                    v / (u * u) * (alpha * (alpha - 1.0)),
                    v / (u * u * u) * (alpha * (alpha - 1.0) * (alpha - 2.0)),
                ])
            }
        }
    }

    fn inverse(&self, w: C, map: &str) -> Result<C> {
        match *self {
            Stage::Affine { a, b } => Ok((w - b) / a),
            Stage::Mobius { a, b, c, d } => {
                let den = a - c * w;
                if den.norm() < 1e-300 {
                    return Err(BergmanError::Pole(format!("{map}: inverse Möbius pole at {w}")));
                }
                Ok((d * w - b) / den)
            }
            Stage::Power { alpha, lo, span } => {
                let r = w.norm();
                if r == 0.0 {
                    return Ok(C::new(0.0, 0.0));
                }
                let start = alpha * lo - (TAU - alpha * span) / 2.0;
                let theta = (w.arg() - start).rem_euclid(TAU) + start;
                Ok(C::from_polar(r.powf(1.0 / alpha), theta / alpha))
            }
        }
    }
}

/// Stages of the map from the upper half-disc onto the unit disc:
/// `s ↦ (1+s)/(1−s)` (first quadrant), squaring (upper half-plane), Cayley.
fn half_disc_to_disc() -> Vec<Stage> {
    vec![
        Stage::Mobius {
            a: ONE,
            b: ONE,
            c: -ONE,
            d: ONE,
        },
        Stage::Power {
            alpha: 2.0,
            lo: 0.0,
            span: FRAC_PI_2,
        },
        Stage::Mobius { a: ONE, b: -I, c: ONE, d: I },
    ]
}

/// Biholomorphism `f` of a planar domain onto the unit disc.
#[derive(Debug, Clone)]
pub struct ConformalMap {
    id: String,
    stages: Vec<Stage>,
    domain: Domain,
}

impl ConformalMap {
    pub fn new(id: impl Into<String>, stages: Vec<Stage>, domain: Domain) -> Self {
        ConformalMap {
            id: id.into(),
            stages,
            domain,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// `f, f', f'', f'''` at `z`.
    pub fn jet(&self, z: C) -> Result<Jet3> {
        let mut j = Jet3::variable(z);
        for s in &self.stages {
            j = j.compose(s.derivatives(j.value(), &self.id)?);
        }
        Ok(j)
    }

    pub fn eval(&self, z: C) -> Result<C> {
        Ok(self.jet(z)?.value())
    }

    pub fn derivative(&self, z: C) -> Result<C> {
        Ok(self.jet(z)?.d1())
    }

    pub fn inverse(&self, w: C) -> Result<C> {
        let mut z = w;
        for s in self.stages.iter().rev() {
            z = s.inverse(z, &self.id)?;
        }
        Ok(z)
    }
}

/// Disc automorphism `z ↦ (z − p)/(1 − p̄ z)`.
pub fn mobius(p: C) -> Result<ConformalMap> {
    if !(p.norm() < 1.0) {
        return Err(BergmanError::InvalidInput(format!("Möbius parameter {p} must lie in the unit disc")));
    }
    let id = if p.im == 0.0 {
        format!("mobius:{}", p.re)
    } else {
        format!("mobius:{},{}", p.re, p.im)
    };
    let domain = Domain::disc(1.0)?
        .with_id(id.clone())
        .with_tag(DomainTag::ConformalImage { map: id.clone() });
    Ok(ConformalMap::new(
        id,
        vec![Stage::Mobius {
            a: ONE,
            b: -p,
            c: -p.conj(),
            d: ONE,
        }],
        domain,
    ))
}

/// Scaling of the disc of radius `r` onto the unit disc.
pub fn disc_map(r: f64) -> Result<ConformalMap> {
    let domain = Domain::disc(r)?;
    Ok(ConformalMap::new(
        format!("disc:{r}"),
        vec![Stage::Affine {
            a: C::new(1.0 / r, 0.0),
            b: C::new(0.0, 0.0),
        }],
        domain,
    ))
}

/// Riemann map of the circular sector `0 < |z| < r_max, θ_min < arg z < θ_max`.
pub fn sector_map(r_max: f64, theta_min: f64, theta_max: f64) -> Result<ConformalMap> {
    let domain = Domain::sector(r_max, theta_min, theta_max)?;
    let span = theta_max - theta_min;
    let mut stages = vec![
        Stage::Affine {
            a: C::from_polar(1.0 / r_max, -theta_min),
            b: C::new(0.0, 0.0),
        },
        Stage::Power {
            alpha: PI / span,
            lo: 0.0,
            span,
        },
    ];
    stages.extend(half_disc_to_disc());
    Ok(ConformalMap::new(
        format!("sector:{r_max},{theta_min},{theta_max}"),
        stages,
        domain,
    ))
}

/// Riemann map of Kerzman's domain `0 < r < 1, π/2 < θ < 2π`: rotation by
/// `e^{−iπ/2}`, the power `ζ^{2/3}` onto the upper half-disc, then the
/// half-disc map.
pub fn kerzman_map() -> ConformalMap {
    let mut m = sector_map(1.0, FRAC_PI_2, TAU).expect("valid sector");
    m.id = "kerzman".into();
    m.domain = m.domain.with_id("kerzman");
    m
}

/// Riemann map of the unit disc slit along `[a, 1)`.
pub fn slit_map(a: f64) -> Result<ConformalMap> {
    let domain = Domain::slit_disc(a, 1.0)?;
    let mut stages = vec![
        Stage::Mobius {
            a: ONE,
            b: C::new(-a, 0.0),
            c: C::new(-a, 0.0),
            d: ONE,
        },
        Stage::Affine {
            a: -ONE,
            b: C::new(0.0, 0.0),
        },
        Stage::Power {
            alpha: 0.5,
            lo: -PI,
            span: TAU,
        },
        Stage::Affine {
            a: I,
            b: C::new(0.0, 0.0),
        },
    ];
    stages.extend(half_disc_to_disc());
    let id = if a == 0.0 { "slit_disc".to_string() } else { format!("slit:{a}") };
    Ok(ConformalMap::new(id.clone(), stages, domain.with_id(id)))
}

/// Inverse of the image `h(𝔻)` of `h(ζ) = ζ + a ζ²`, `0 < |a| < 1/2`:
/// `f(z) = (√(1 + 4az) − 1) / (2a)`.
pub fn quadratic_map(a: f64) -> Result<ConformalMap> {
    if !(a != 0.0 && a.abs() < 0.5) {
        return Err(BergmanError::InvalidInput(format!(
            "quadratic map needs 0 < |a| < 1/2, got {a}"
        )));
    }
    let id = format!("quadratic:{a}");
    let curve = BoundaryCurve::parametric(
        id.clone(),
        true,
        Arc::new(move |t: f64| {
            let e = C::from_polar(1.0, TAU * t);
            let z = e + e * e * a;
            let dz = (ONE + e * (2.0 * a)) * e * C::new(0.0, TAU);
            (z, dz)
        }),
    );
    let domain = Domain::from_closed_curve(id.clone(), curve, Some(DomainTag::ConformalImage { map: id.clone() }))?;
    let stages = vec![
        Stage::Affine {
            a: C::new(4.0 * a, 0.0),
            b: ONE,
        },
        Stage::Power {
            alpha: 0.5,
            lo: -PI,
            span: TAU,
        },
        Stage::Affine {
            a: C::new(1.0 / (2.0 * a), 0.0),
            b: C::new(-1.0 / (2.0 * a), 0.0),
        },
    ];
    Ok(ConformalMap::new(id, stages, domain))
}

fn parse_numbers(s: &str, id: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| BergmanError::InvalidInput(format!("bad number {x:?} in map id {id:?}")))
        })
        .collect()
}

/// Looks up a map by id: `mobius:x[,y]`, `disc:r`, `kerzman`,
/// `sector:r,θ_min,θ_max`, `slit_disc`, `slit:a`, `quadratic:a`.
pub fn map_by_id(id: &str) -> Result<ConformalMap> {
    let (head, tail) = match id.split_once(':') {
        Some((h, t)) => (h, Some(t)),
        None => (id, None),
    };
    let nums = |n: usize| -> Result<Vec<f64>> {
        let v = parse_numbers(tail.unwrap_or(""), id)?;
        if v.len() == n {
            Ok(v)
        } else {
            Err(BergmanError::InvalidInput(format!("map id {id:?} expects {n} parameters")))
        }
    };
    match (head, tail) {
        ("kerzman", None) => Ok(kerzman_map()),
        ("slit_disc", None) => slit_map(0.0),
        ("disc", None) => disc_map(1.0),
        ("disc", Some(_)) => disc_map(nums(1)?[0]),
        ("slit", Some(_)) => slit_map(nums(1)?[0]),
        ("quadratic", Some(_)) => quadratic_map(nums(1)?[0]),
        ("sector", Some(_)) => {
            let v = nums(3)?;
            sector_map(v[0], v[1], v[2])
        }
        ("mobius", Some(t)) => {
            let v = parse_numbers(t, id)?;
            match v.as_slice() {
                [x] => mobius(C::new(*x, 0.0)),
                [x, y] => mobius(C::new(*x, *y)),
                _ => Err(BergmanError::InvalidInput(format!("map id {id:?} expects 1 or 2 parameters"))),
            }
        }
        _ => Err(BergmanError::InvalidInput(format!("unknown map id {id:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn interior_samples(d: &Domain, n: usize, seed: u64) -> Vec<C> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = d.bbox();
        let mut out = Vec::new();
        while out.len() < n {
            let z = c(rng.gen_range(lo.re..hi.re), rng.gen_range(lo.im..hi.im));
            if d.contains(z) {
                out.push(z);
            }
        }
        out
    }

    #[test]
    fn mobius_basics() {
        let id = mobius(c(0.0, 0.0)).unwrap();
        assert_eq!(id.eval(c(0.3, 0.2)).unwrap(), c(0.3, 0.2));
        let m = mobius(c(0.5, 0.0)).unwrap();
        assert_eq!(m.eval(c(0.5, 0.0)).unwrap(), c(0.0, 0.0));
        assert!((m.derivative(c(0.5, 0.0)).unwrap() - 4.0 / 3.0).norm() < 1e-15);
        assert!((m.inverse(m.eval(c(-0.2, 0.7)).unwrap()).unwrap() - c(-0.2, 0.7)).norm() < 1e-15);
    }

    #[test]
    fn kerzman_boundary_maps_to_circle() {
        let m = kerzman_map();
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for curve in m.domain().curves() {
            for k in 1..=67 {
                let z = curve.point(k as f64 / 68.0);
                worst = worst.max((m.eval(z).unwrap().norm() - 1.0).abs());
                count += 1;
            }
        }
        assert!(count >= 200);
        assert!(worst < 1e-8, "{worst:e}");
    }

    #[test]
    fn kerzman_interior_and_round_trip() {
        let m = kerzman_map();
        assert!(m.eval(c(-0.5, 0.0)).unwrap().norm() < 1.0);
        for z in interior_samples(m.domain(), 50, 3) {
            let w = m.eval(z).unwrap();
            assert!(w.norm() < 1.0);
            assert!((m.inverse(w).unwrap() - z).norm() < 1e-10, "{z}");
        }
    }

    #[test]
    fn kerzman_corner_exponent() {
        // |f'(z)| ~ C |z|^{−1/3} along the bisector of the sector
        let m = kerzman_map();
        let dir = C::from_polar(1.0, 1.25 * PI);
        let rs = [1e-2, 1e-3, 1e-4];
        let d: Vec<f64> = rs.iter().map(|&r| m.derivative(dir * r).unwrap().norm().ln()).collect();
        let slope = (d[2] - d[0]) / (rs[2].ln() - rs[0].ln());
        assert!((-0.37..=-0.30).contains(&slope), "{slope}");
    }

    #[test]
    fn kerzman_cut_is_a_branch_error() {
        let m = kerzman_map();
        // the cut sits on the bisector θ = π/4 of the excluded quadrant
        let z = C::from_polar(0.5, PI / 4.0);
        assert!(matches!(m.eval(z), Err(BergmanError::Branch { .. })));
        assert!(matches!(m.eval(c(0.0, 0.0)), Err(BergmanError::Branch { .. })));
    }

    #[test]
    fn slit_map_round_trip_and_boundary() {
        let m = map_by_id("slit_disc").unwrap();
        for z in interior_samples(m.domain(), 50, 4) {
            let w = m.eval(z).unwrap();
            assert!(w.norm() < 1.0);
            assert!((m.inverse(w).unwrap() - z).norm() < 1e-10);
        }
        // both banks of the slit land on the unit circle
        for x in [0.1, 0.5, 0.9] {
            for y in [1e-12, -1e-12] {
                assert!((m.eval(c(x, y)).unwrap().norm() - 1.0).abs() < 1e-5);
            }
        }
        let shifted = map_by_id("slit:-0.3").unwrap();
        let z = c(0.1, 0.4);
        assert!((shifted.inverse(shifted.eval(z).unwrap()).unwrap() - z).norm() < 1e-12);
    }

    #[test]
    fn quadratic_map_inverts_h() {
        let m = map_by_id("quadratic:0.15").unwrap();
        for z in interior_samples(m.domain(), 30, 5) {
            let w = m.eval(z).unwrap();
            assert!(w.norm() < 1.0);
            assert!((w + w * w * 0.15 - z).norm() < 1e-13);
        }
        for k in 0..20 {
            let z = m.domain().curves()[0].point(k as f64 / 20.0);
            assert!((m.eval(z).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn jets_match_finite_differences() {
        for id in ["kerzman", "slit_disc", "quadratic:0.15", "mobius:0.3,-0.2", "sector:1,0.5,2"] {
            let m = map_by_id(id).unwrap();
            let z = interior_samples(m.domain(), 1, 9)[0];
            let j = m.jet(z).unwrap();
            let h = 1e-4;
            let fd1 = (m.eval(z + h).unwrap() - m.eval(z - h).unwrap()) / (2.0 * h);
            let fd2 = (m.derivative(z + h).unwrap() - m.derivative(z - h).unwrap()) / (2.0 * h);
            let fd3 = (m.jet(z + h).unwrap().d2() - m.jet(z - h).unwrap().d2()) / (2.0 * h);
            assert!((fd1 - j.d1()).norm() < 1e-6 * (1.0 + j.d1().norm()), "{id}");
            assert!((fd2 - j.d2()).norm() < 1e-5 * (1.0 + j.d2().norm()), "{id}");
            assert!((fd3 - j.d3()).norm() < 1e-4 * (1.0 + j.d3().norm()), "{id}");
        }
    }

    #[test]
    fn registry_rejects_unknown_ids() {
        assert!(map_by_id("nope").is_err());
        assert!(map_by_id("mobius:1.5").is_err());
        assert!(map_by_id("sector:1,2").is_err());
    }
}
