//! Bergman kernel evaluation, metric and curvature.
//!
//! Every kernel provider, numeric or closed-form, implements [`KernelSource`]
//! by returning the block of mixed derivatives `∂_z^a ∂_{w̄}^b K(z, w)` for
//! `a, b ≤ 2`. The metric `g = ∂_z∂_z̄ log K(z, z)` and the Gaussian curvature
//! `κ = −(2/g) ∂_z∂_z̄ log g` are formed from that block alone.

use crate::error::{BergmanError, Result};
use crate::geometry::Domain;
use crate::orthobasis::{build_basis_with, eval_basis, BasisConfig, BasisEval, OrthonormalBasis};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

type C = Complex64;

/// `block[a][b] = ∂_z^a ∂_{w̄}^b K(z, w)`.
pub type Block = [[C; 3]; 3];

/// Minimum distance to the boundary for metric and curvature evaluation.
pub const DEFAULT_MARGIN: f64 = 0.02;

/// Anything that can evaluate the Bergman kernel of a planar domain.
pub trait KernelSource: Send + Sync {
    fn block(&self, z: C, w: C) -> Result<Block>;

    /// A single mixed derivative; sources may override this with a cheaper path.
    fn kernel(&self, z: C, w: C, a: usize, b: usize) -> Result<C> {
        if a > 2 || b > 2 {
            return Err(BergmanError::InvalidInput(format!("derivative orders ({a},{b}) exceed 2")));
        }
        Ok(self.block(z, w)?[a][b])
    }

    fn domain(&self) -> &Domain;

    fn label(&self) -> String;

    /// Whether values come from a closed form rather than a truncated basis.
    fn is_oracle(&self) -> bool;

    /// Relative weight of the highest-degree terms at `z` (zero for exact sources).
    fn truncation(&self, _z: C) -> f64 {
        0.0
    }
}

/// Kernel `K(z, w) = Σ q_k(z) conj(q_k(w))` of a numeric basis.
#[derive(Debug, Clone)]
pub struct KernelField {
    basis: OrthonormalBasis,
    domain: Domain,
}

impl KernelField {
    pub fn new(domain: Domain, basis: OrthonormalBasis) -> Self {
        KernelField { basis, domain }
    }

    /// Builds the basis for `domain` anchored at `center`.
    pub fn build(domain: &Domain, center: C, config: &BasisConfig) -> Result<Self> {
        let basis = build_basis_with(domain, center, config)?;
        Ok(KernelField::new(domain.clone(), basis))
    }

    pub fn basis(&self) -> &OrthonormalBasis {
        &self.basis
    }

    pub fn eval(&self, z: C) -> BasisEval {
        eval_basis(&self.basis, z)
    }
}

fn series(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

impl KernelSource for KernelField {
    fn block(&self, z: C, w: C) -> Result<Block> {
        let ez = self.eval(z);
        let ew = self.eval(w);
        let zs = [&ez.values, &ez.d1, &ez.d2];
        let ws = [&ew.values, &ew.d1, &ew.d2];
        let mut out = [[C::new(0.0, 0.0); 3]; 3];
        for (a, row) in out.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = series(zs[a], ws[b]);
            }
        }
        Ok(out)
    }

    fn kernel(&self, z: C, w: C, a: usize, b: usize) -> Result<C> {
        if a > 2 || b > 2 {
            return Err(BergmanError::InvalidInput(format!("derivative orders ({a},{b}) exceed 2")));
        }
        let ez = self.eval(z);
        let ew = self.eval(w);
        let pick = |e: &BasisEval, k: usize| -> Vec<C> {
            match k {
                0 => e.values.clone(),
                1 => e.d1.clone(),
                _ => e.d2.clone(),
            }
        };
        Ok(series(&pick(&ez, a), &pick(&ew, b)))
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn label(&self) -> String {
        format!("numeric(N={})", self.basis.degree)
    }

    fn is_oracle(&self) -> bool {
        false
    }

    fn truncation(&self, z: C) -> f64 {
        truncation_probe(self, z)
    }
}

/// Tail indicator `Σ_{tail} |q_k(z)|² / Σ_k |q_k(z)|²`.
pub fn truncation_probe(field: &KernelField, z: C) -> f64 {
    let e = field.eval(z);
    let total: f64 = e.values.iter().map(|v| v.norm_sqr()).sum();
    let tail: f64 = field.basis.tail_indices().iter().map(|&k| e.values[k].norm_sqr()).sum();
    if total > 0.0 {
        tail / total
    } else {
        0.0
    }
}

/// Metric and curvature data at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSample {
    pub z: C,
    pub g: f64,
    pub kappa: f64,
    pub log_k: f64,
    #[serde(skip)]
    pub block: Block,
}

/// Metric coefficient from a diagonal block.
pub fn metric_from_block(b: &Block) -> C {
    let k = b[0][0];
    (k * b[1][1] - b[1][0] * b[0][1]) / (k * k)
}

/// `∂_z∂_z̄ log g` on the diagonal from the derivative block at `(z, z)`.
///
/// With `N = K K_{11} − K_{10} K_{01}` one has `log g = log N − 2 log K`, and
/// the derivatives of `N` along the diagonal only involve entries of the block.
pub fn ddbar_log_metric(b: &Block) -> f64 {
    let k = b[0][0];
    let n = k * b[1][1] - b[1][0] * b[0][1];
    let n_z = k * b[2][1] - b[2][0] * b[0][1];
    let n_zb = k * b[1][2] - b[1][0] * b[0][2];
    let n_zzb = k * b[2][2] - b[2][0] * b[0][2];
    let g = n / (k * k);
    ((n * n_zzb - n_z * n_zb) / (n * n) - g * 2.0).re
}

fn check_margin(src: &dyn KernelSource, z: C, margin: f64) -> Result<()> {
    let d = src.domain();
    if !d.contains(z) {
        return Err(BergmanError::OutsideDomain(z));
    }
    let dist = d.distance_to_boundary(z);
    if dist < margin {
        return Err(BergmanError::MarginViolation { z, margin, distance: dist });
    }
    Ok(())
}

pub fn metric_sample(src: &dyn KernelSource, z: C) -> Result<MetricSample> {
    metric_sample_with(src, z, DEFAULT_MARGIN)
}

/// `g` and `κ` at `z`, refusing points closer than `margin` to the boundary.
pub fn metric_sample_with(src: &dyn KernelSource, z: C, margin: f64) -> Result<MetricSample> {
    check_margin(src, z, margin)?;
    let b = src.block(z, z)?;
    let k = b[0][0].re;
    if !(k > 1e-300) {
        return Err(BergmanError::Underflow(z));
    }
    let gc = metric_from_block(&b);
    let g = gc.re;
    if !(g > 0.0) || gc.im.abs() > 1e-10 * g.abs().max(1e-300) {
        return Err(BergmanError::IllConditioned { z, g });
    }
    let kappa = -2.0 / g * ddbar_log_metric(&b);
    Ok(MetricSample {
        z,
        g,
        kappa,
        log_k: k.ln(),
        block: b,
    })
}

/// Metric coefficient only.
pub fn metric(src: &dyn KernelSource, z: C) -> Result<f64> {
    let b = src.block(z, z)?;
    if !(b[0][0].re > 1e-300) {
        return Err(BergmanError::Underflow(z));
    }
    let g = metric_from_block(&b).re;
    if !(g > 0.0) {
        return Err(BergmanError::IllConditioned { z, g });
    }
    Ok(g)
}

/// Curvature from a five-point Laplacian of `log g` with one Richardson step;
/// an independent cross-check of the analytic value in [`MetricSample`].
pub fn kappa_fd(src: &dyn KernelSource, z: C, h: f64) -> Result<f64> {
    let lg = |x: C| -> Result<f64> { Ok(metric(src, x)?.ln()) };
    let f0 = lg(z)?;
    let lap = |h: f64| -> Result<f64> {
        let s = lg(z + h)? + lg(z - h)? + lg(z + C::new(0.0, h))? + lg(z - C::new(0.0, h))?;
        Ok((s - 4.0 * f0) / (h * h))
    };
    let (l1, l2) = (lap(h)?, lap(h / 2.0)?);
    let ddbar = (4.0 * l2 - l1) / 3.0 / 4.0;
    Ok(-2.0 / f0.exp() * ddbar)
}

/// Applies `f` to every point in parallel, keeping the input order.
pub fn sweep<T, F>(points: &[C], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(C) -> T + Sync + Send,
{
    points.par_iter().map(|&z| f(z)).collect()
}

/// Detector threshold on `max |κ + 2|` over the detector grid.
pub const CURVATURE_TOL: f64 = 1e-4;

/// Summary of `κ` over a set of points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureStats {
    pub mean: f64,
    pub stdev: f64,
    /// `max |κ + 2|`
    pub max_deviation: f64,
    pub argmax: C,
    pub evaluated: usize,
    pub skipped: usize,
}

pub fn curvature_stats(src: &dyn KernelSource, points: &[C], margin: f64) -> CurvatureStats {
    let samples = sweep(points, |z| metric_sample_with(src, z, margin).map(|s| s.kappa));
    let ok: Vec<(C, f64)> = points
        .iter()
        .zip(&samples)
        .filter_map(|(z, k)| k.as_ref().ok().map(|k| (*z, *k)))
        .collect();
    let n = ok.len().max(1) as f64;
    let mean = ok.iter().map(|(_, k)| k).sum::<f64>() / n;
    let var = ok.iter().map(|(_, k)| (k - mean).powi(2)).sum::<f64>() / n;
    let (argmax, max_deviation) = ok
        .iter()
        .map(|(z, k)| (*z, (k + 2.0).abs()))
        .fold((C::new(0.0, 0.0), 0.0f64), |acc, x| if x.1 > acc.1 { x } else { acc });
    CurvatureStats {
        mean,
        stdev: var.sqrt(),
        max_deviation,
        argmax,
        evaluated: ok.len(),
        skipped: points.len() - ok.len(),
    }
}

/// Grid used by the curvature detector, scaled to the bounding box.
pub fn detector_grid(domain: &Domain) -> Result<Vec<C>> {
    let (lo, hi) = domain.bbox();
    let diag = (hi - lo).norm();
    domain.interior_grid(diag / 24.0, diag / 16.0)
}

/// Diagonal quantities of a truncated basis are only trusted where the tail
/// weight stays below this.
pub const TRUNCATION_LIMIT: f64 = 1e-9;

/// Fewest resolved detector points before falling back to the whole grid.
const MIN_TRUSTED: usize = 10;

/// Outcome of the constant-curvature detector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureVerdict {
    pub stats: CurvatureStats,
    /// Detector points where the diagonal is resolved; when fewer than ten,
    /// the whole grid is used and the numeric field usually fails the test.
    pub trusted_points: usize,
    /// `max |κ + 2| ≤ CURVATURE_TOL` on the detector grid.
    pub numerically_constant: bool,
    /// A hole with interior is not a polar set, so no disc-less-polar-set
    /// structure is possible whatever the sampled values say.
    pub has_hole: bool,
    pub constant: bool,
}

pub fn detect_constant_curvature(src: &dyn KernelSource) -> Result<CurvatureVerdict> {
    let grid = detector_grid(src.domain())?;
    let trusted: Vec<C> = grid
        .iter()
        .copied()
        .filter(|&z| src.truncation(z) <= TRUNCATION_LIMIT)
        .collect();
    let trusted_points = trusted.len();
    let points = if trusted_points >= MIN_TRUSTED { &trusted } else { &grid };
    let stats = curvature_stats(src, points, 0.0);
    if stats.evaluated == 0 {
        return Err(BergmanError::InsufficientSamples("no detector point could be evaluated".into()));
    }
    let numerically_constant = stats.max_deviation <= CURVATURE_TOL;
    let has_hole = src.domain().has_hole();
    Ok(CurvatureVerdict {
        stats,
        trusted_points,
        numerically_constant,
        has_hole,
        constant: numerically_constant && !has_hole,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn disc_field(center: C) -> KernelField {
        KernelField::build(&Domain::disc(1.0).unwrap(), center, &BasisConfig::default()).unwrap()
    }

    fn disc_k(z: C, w: C) -> C {
        1.0 / (PI * (C::new(1.0, 0.0) - z * w.conj()).powi(2))
    }

    #[test]
    fn disc_kernel_values() {
        let f = disc_field(c(0.0, 0.0));
        let z = c(0.3, 0.0);
        assert!((f.kernel(z, c(0.0, 0.0), 0, 0).unwrap() - 1.0 / PI).norm() < 1e-10);
        // ∂_{w̄} K(z, w) at w = 0 is 2z/π
        assert!((f.kernel(z, c(0.0, 0.0), 0, 1).unwrap() - 0.6 / PI).norm() < 1e-9);
        for (z, w) in [(c(0.5, 0.2), c(-0.3, 0.6)), (c(0.7, 0.0), c(0.0, -0.7))] {
            let rel = (f.kernel(z, w, 0, 0).unwrap() - disc_k(z, w)).norm() / disc_k(z, w).norm();
            assert!(rel < 1e-9, "{z} {w}: {rel:e}");
        }
    }

    #[test]
    fn hermitian_symmetry_is_exact() {
        let f = disc_field(c(0.1, 0.2));
        let (z, w) = (c(0.3, -0.4), c(-0.5, 0.1));
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(f.kernel(z, w, a, b).unwrap(), f.kernel(w, z, b, a).unwrap().conj());
            }
        }
    }

    #[test]
    fn block_agrees_with_single_entries() {
        let f = disc_field(c(0.0, 0.0));
        let (z, w) = (c(0.2, 0.1), c(0.4, -0.3));
        let b = f.block(z, w).unwrap();
        for (a, row) in b.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                assert_eq!(*v, f.kernel(z, w, a, k).unwrap());
            }
        }
    }

    #[test]
    fn disc_metric_and_curvature() {
        let f = disc_field(c(0.0, 0.0));
        let m = metric_sample(&f, c(0.0, 0.0)).unwrap();
        assert!((m.g - 2.0).abs() < 1e-10);
        assert!((m.kappa + 2.0).abs() < 1e-6);
        let m = metric_sample(&f, c(0.5, 0.0)).unwrap();
        assert!((m.g - 2.0 / 0.5625).abs() < 1e-8);
        assert!((m.kappa + 2.0).abs() < 1e-6);
        let fd = kappa_fd(&f, c(0.5, 0.0), 0.05 * 0.5).unwrap();
        assert!((fd + 2.0).abs() < 1e-5, "{fd}");
    }

    #[test]
    fn annulus_curvature() {
        // a thick annulus has visibly non-constant curvature
        let d = Domain::annulus(0.05, 1.0).unwrap();
        let f = KernelField::build(&d, c(0.5, 0.0), &BasisConfig::default()).unwrap();
        let m = metric_sample(&f, c(0.24, 0.0)).unwrap();
        assert!((m.kappa + 2.5050760759).abs() < 1e-6, "{}", m.kappa);
        // for r = 0.5 the deviation from −2 is about 5e−11 at |z| = 0.75
        let d = Domain::annulus(0.5, 1.0).unwrap();
        let f = KernelField::build(&d, c(0.75, 0.0), &BasisConfig::default()).unwrap();
        let m = metric_sample(&f, c(0.75, 0.0)).unwrap();
        assert!((m.kappa + 2.0).abs() < 1e-8, "{}", m.kappa);
    }

    #[test]
    fn truncation_indicator() {
        let f = disc_field(c(0.0, 0.0));
        assert!(truncation_probe(&f, c(0.5, 0.0)) < 1e-12);
        assert!(truncation_probe(&f, c(0.95, 0.0)) > 1e-4);
        // q_k(0) = 0 for k ≥ 1 up to rounding in the recurrence
        assert!(truncation_probe(&f, c(0.0, 0.0)) < 1e-24);
    }

    #[test]
    fn reproducing_property() {
        let cases = [
            (Domain::disc(1.0).unwrap(), c(0.0, 0.0), c(0.3, 0.2)),
            (Domain::square(1.0).unwrap(), c(0.1, 0.0), c(-0.2, 0.4)),
            (Domain::kerzman(), c(-0.5, -0.2), c(-0.3, -0.4)),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (d, p, w) in cases {
            let cfg = BasisConfig::default();
            let f = KernelField::build(&d, p, &cfg).unwrap();
            let rule = crate::geometry::boundary_quadrature(&d, cfg.panels, cfg.order).unwrap();
            let fitter = crate::orthobasis::PrimitiveFitter::new(&rule, p, cfg.degree).unwrap();
            let kw: Vec<C> = rule.nodes.iter().map(|&z| f.kernel(z, w, 0, 0).unwrap()).collect();
            let kprim = fitter.primitive(&kw);
            for _ in 0..20 {
                let coeffs: Vec<C> = (0..=cfg.degree - 2)
                    .map(|k| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.8f64.powi(k as i32))
                    .collect();
                let poly = |z: C| coeffs.iter().rev().fold(C::new(0.0, 0.0), |acc, a| acc * (z - p) + a);
                let fv: Vec<C> = rule.nodes.iter().map(|&z| poly(z)).collect();
                let ip = fitter.inner(&fv, &kprim);
                assert!((ip - poly(w)).norm() < 1e-8, "{}: {:e}", d.id(), (ip - poly(w)).norm());
            }
        }
    }

    #[test]
    fn positivity_floor() {
        let f = disc_field(c(0.2, 0.0));
        for z in [c(0.0, 0.0), c(0.5, 0.5), c(-0.8, 0.1)] {
            let k = f.kernel(z, z, 0, 0).unwrap().re;
            assert!(k >= 1.0 / f.basis().area);
        }
    }

    #[test]
    fn margin_is_enforced() {
        let f = disc_field(c(0.0, 0.0));
        assert!(matches!(
            metric_sample(&f, c(0.99, 0.0)),
            Err(BergmanError::MarginViolation { .. })
        ));
        assert!(matches!(metric_sample(&f, c(1.5, 0.0)), Err(BergmanError::OutsideDomain(_))));
    }

    #[test]
    fn sweep_preserves_order() {
        let pts: Vec<C> = (0..100).map(|k| c(k as f64 * 0.001, 0.0)).collect();
        let out = sweep(&pts, |z| z.re);
        assert!(out.windows(2).all(|w| w[0] < w[1]));
    }
}
