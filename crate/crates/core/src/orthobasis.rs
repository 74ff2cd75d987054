//! Orthonormal polynomial bases of the Bergman space `A²(Ω)`.
//!
//! Area inner products are reduced to contour integrals,
//! `⟨f, g⟩ = ∫_Ω f ḡ dA = (1/2i) ∮ f · conj(G) dz` with `G' = g`, so every
//! basis function is carried together with a polynomial primitive. Primitives
//! of new Krylov vectors are recovered by a least-squares fit against the
//! derivatives of an auxiliary boundary-orthonormal basis, which is exact for
//! polynomials of the relevant degree.

use crate::error::{BergmanError, Result};
use crate::geometry::{boundary_quadrature, Domain, DomainTag, QuadratureRule};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type C = Complex64;

const ZERO: C = C { re: 0.0, im: 0.0 };

/// Subdiagonal entries below this end the Arnoldi process early.
pub const BREAKDOWN: f64 = 1e-14;

/// Degree and quadrature resolution for a numeric basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisConfig {
    pub degree: usize,
    pub panels: usize,
    pub order: usize,
}

impl Default for BasisConfig {
    fn default() -> Self {
        BasisConfig {
            degree: 60,
            panels: 16,
            order: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisKind {
    /// Polynomials in `z − center` generated by the recurrence
    /// `(z − c) q_k = Σ_{j ≤ k+1} H[j][k] q_j`; `hessenberg` is row-major.
    Arnoldi { hessenberg: Vec<Vec<C>> },
    /// Laurent monomials `z^k / ‖z^k‖` on `inner < |z| < outer`, ordered
    /// `k = 0, 1, …, degree, −1, −2, …, −negative`.
    Laurent { inner: f64, outer: f64, negative: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthonormalBasis {
    pub domain_id: String,
    pub center: C,
    pub degree: usize,
    pub area: f64,
    pub kind: BasisKind,
}

/// Basis values and first two derivatives at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEval {
    pub values: Vec<C>,
    pub d1: Vec<C>,
    pub d2: Vec<C>,
}

impl OrthonormalBasis {
    pub fn len(&self) -> usize {
        match &self.kind {
            BasisKind::Arnoldi { .. } => self.degree + 1,
            BasisKind::Laurent { negative, .. } => self.degree + 1 + negative,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn hessenberg(&self) -> Option<&[Vec<C>]> {
        match &self.kind {
            BasisKind::Arnoldi { hessenberg } => Some(hessenberg),
            BasisKind::Laurent { .. } => None,
        }
    }

    /// Indices of the highest-degree terms, used as a truncation indicator.
    pub fn tail_indices(&self) -> Vec<usize> {
        let n = self.degree;
        match &self.kind {
            BasisKind::Arnoldi { .. } => ((n + 1).saturating_sub(5)..=n).collect(),
            BasisKind::Laurent { negative, .. } => {
                let mut v: Vec<usize> = ((n + 1).saturating_sub(5)..=n).collect();
                let m = *negative;
                v.extend((n + 1 + m.saturating_sub(5)..n + 1 + m).filter(|&i| i > n));
                v
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("basis serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| BergmanError::InvalidInput(format!("basis json: {e}")))
    }
}

/// `⟨z^j, z^k⟩ = (1 / (2i(k+1))) ∮ z^j z̄^{k+1} dz`, averaged with the conjugate
/// of the swapped integral so the result is exactly conjugate-symmetric.
pub fn monomial_inner_product(rule: &QuadratureRule, j: usize, k: usize) -> C {
    let one = |a: usize, b: usize| -> C {
        let s = rule.integrate(|z| z.powu(a as u32) * z.conj().powu(b as u32 + 1));
        s / C::new(0.0, 2.0 * (b as f64 + 1.0))
    };
    0.5 * (one(j, k) + one(k, j).conj())
}

/// Least-squares primitive operator on the nodes of a rule.
///
/// An auxiliary basis `u_0 … u_m` is orthonormalized on the boundary nodes
/// (arc-length weights) by Arnoldi; a polynomial `f` of degree `< m` is then
/// written as `Σ a_j u'_{j+1}` and its primitive is `Σ a_j u_{j+1}`.
pub struct PrimitiveFitter {
    center: C,
    nodes: Vec<C>,
    weights: Vec<C>,
    sqrt_arc: Vec<f64>,
    u: DMatrix<C>,
    q: DMatrix<C>,
    r: DMatrix<C>,
    col_scale: Vec<f64>,
}

impl PrimitiveFitter {
    /// Fitter exact for integrands of degree `≤ max_degree`.
    pub fn new(rule: &QuadratureRule, center: C, max_degree: usize) -> Result<Self> {
        let n = rule.len();
        let m = max_degree + 2; // u_0 … u_{max_degree+1}
        if n < 2 * m {
            return Err(BergmanError::InvalidInput(format!(
                "{n} quadrature nodes cannot resolve degree {max_degree}"
            )));
        }
        let w = &rule.arc_weights;
        let dot = |a: &[C], b: &[C]| -> C { (0..n).map(|i| a[i] * b[i].conj() * w[i]).sum() };
        let shifted: Vec<C> = rule.nodes.iter().map(|&z| z - center).collect();
        let total: f64 = w.iter().sum();
        let mut u: Vec<Vec<C>> = vec![vec![C::new(1.0 / total.sqrt(), 0.0); n]];
        let mut hb = vec![vec![ZERO; m]; m];
        for k in 0..m - 1 {
            let mut v: Vec<C> = (0..n).map(|i| shifted[i] * u[k][i]).collect();
            for _ in 0..2 {
                for (j, uj) in u.iter().enumerate() {
                    let h = dot(&v, uj);
                    hb[j][k] += h;
                    for i in 0..n {
                        v[i] -= h * uj[i];
                    }
                }
            }
            let nrm = dot(&v, &v).re.sqrt();
            if nrm < BREAKDOWN {
                return Err(BergmanError::DegenerateGeometry(
                    "boundary nodes do not determine the auxiliary basis".into(),
                ));
            }
            hb[k + 1][k] = C::new(nrm, 0.0);
            u.push(v.iter().map(|x| x / nrm).collect());
        }
        // derivatives of u at the nodes by the differentiated recurrence
        let mut du: Vec<Vec<C>> = vec![vec![ZERO; n]];
        for k in 0..m - 1 {
            let h = hb[k + 1][k].re;
            let col: Vec<C> = (0..n)
                .map(|i| {
                    let mut s = u[k][i] + shifted[i] * du[k][i];
                    for (j, duj) in du.iter().enumerate().take(k + 1) {
                        s -= hb[j][k] * duj[i];
                    }
                    s / h
                })
                .collect();
            du.push(col);
        }
        let sqrt_arc: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
        let cols = m - 1;
        let col_scale: Vec<f64> = (0..cols)
            .map(|j| {
                let s: f64 = (0..n).map(|i| du[j + 1][i].norm_sqr() * w[i]).sum::<f64>().sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        let v = DMatrix::from_fn(n, cols, |i, j| du[j + 1][i] * (sqrt_arc[i] / col_scale[j]));
        let qr = v.qr();
        let umat = DMatrix::from_fn(n, m, |i, j| u[j][i]);
        Ok(PrimitiveFitter {
            center,
            nodes: rule.nodes.clone(),
            weights: rule.weights.clone(),
            sqrt_arc,
            u: umat,
            q: qr.q(),
            r: qr.r(),
            col_scale,
        })
    }

    pub fn center(&self) -> C {
        self.center
    }

    pub fn nodes(&self) -> &[C] {
        &self.nodes
    }

    /// Values at the nodes of a primitive of the polynomial sampled as `f`.
    pub fn primitive(&self, f: &[C]) -> Vec<C> {
        let n = self.nodes.len();
        let cols = self.r.ncols();
        let b: Vec<C> = (0..n).map(|i| f[i] * self.sqrt_arc[i]).collect();
        let mut y = vec![ZERO; cols];
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = (0..n).map(|i| self.q[(i, j)].conj() * b[i]).sum();
        }
        for j in (0..cols).rev() {
            let mut s = y[j];
            for k in j + 1..cols {
                s -= self.r[(j, k)] * y[k];
            }
            y[j] = s / self.r[(j, j)];
        }
        (0..n)
            .map(|i| {
                (0..cols)
                    .map(|j| self.u[(i, j + 1)] * (y[j] / self.col_scale[j]))
                    .sum()
            })
            .collect()
    }

    /// `(1/2i) Σ f · conj(G) w` with `G` a primitive of `g`.
    pub fn inner(&self, f: &[C], g_primitive: &[C]) -> C {
        let s: C = (0..self.nodes.len())
            .map(|i| f[i] * g_primitive[i].conj() * self.weights[i])
            .sum();
        s / C::new(0.0, 2.0)
    }
}

/// Builds the numeric basis of degree `degree` anchored at `center`.
///
/// Stock annuli get the exact Laurent basis with as many negative as positive
/// powers; every other planar domain uses the Arnoldi process.
pub fn build_basis(domain: &Domain, center: C, degree: usize, rule: &QuadratureRule) -> Result<OrthonormalBasis> {
    if degree == 0 {
        return Err(BergmanError::InvalidInput("basis degree must be ≥ 1".into()));
    }
    if let Some(DomainTag::Ball { n }) = domain.tag() {
        return Err(BergmanError::UnsupportedDomain(format!("ball({n})")));
    }
    if !domain.contains(center) {
        return Err(BergmanError::OutsideDomain(center));
    }
    if let Some(DomainTag::Annulus { inner, outer }) = domain.tag() {
        return Ok(laurent_basis(domain.id(), *inner, *outer, center, degree, degree));
    }
    arnoldi_basis(domain.id(), center, degree, rule)
}

/// [`build_basis`] with a rule generated from `config`.
pub fn build_basis_with(domain: &Domain, center: C, config: &BasisConfig) -> Result<OrthonormalBasis> {
    let rule = boundary_quadrature(domain, config.panels, config.order)?;
    build_basis(domain, center, config.degree, &rule)
}

pub fn laurent_basis(id: &str, inner: f64, outer: f64, center: C, degree: usize, negative: usize) -> OrthonormalBasis {
    OrthonormalBasis {
        domain_id: id.to_string(),
        center,
        degree,
        area: PI * (outer * outer - inner * inner),
        kind: BasisKind::Laurent {
            inner,
            outer,
            negative,
        },
    }
}

/// `‖z^k‖²` on the annulus `r < |z| < R`.
pub fn laurent_norm_sqr(k: i64, r: f64, big_r: f64) -> f64 {
    if k == -1 {
        2.0 * PI * (big_r / r).ln()
    } else {
        let e = 2 * k + 2;
        PI * (big_r.powi(e as i32) - r.powi(e as i32)) / (k + 1) as f64
    }
}

fn arnoldi_basis(id: &str, center: C, degree: usize, rule: &QuadratureRule) -> Result<OrthonormalBasis> {
    let fitter = PrimitiveFitter::new(rule, center, degree)?;
    let n = rule.len();
    let shifted: Vec<C> = rule.nodes.iter().map(|&z| z - center).collect();
    let area = (rule.integrate(|z| z.conj()) / C::new(0.0, 2.0)).re;
    if !(area > 0.0) {
        return Err(BergmanError::DegenerateGeometry(format!("{id}: nonpositive area {area}")));
    }
    let s = 1.0 / area.sqrt();
    let mut q: Vec<Vec<C>> = vec![vec![C::new(s, 0.0); n]];
    let mut prim: Vec<Vec<C>> = vec![shifted.iter().map(|z| z * s).collect()];
    let mut h = vec![vec![ZERO; degree]; degree + 1];
    let mut reached = degree;
    for k in 0..degree {
        let mut f: Vec<C> = (0..n).map(|i| shifted[i] * q[k][i]).collect();
        let mut big_f = fitter.primitive(&f);
        for _ in 0..2 {
            for j in 0..=k {
                let c = fitter.inner(&f, &prim[j]);
                h[j][k] += c;
                for i in 0..n {
                    f[i] -= c * q[j][i];
                    big_f[i] -= c * prim[j][i];
                }
            }
        }
        let nrm = fitter.inner(&f, &big_f).re.max(0.0).sqrt();
        if nrm < BREAKDOWN {
            log::warn!("{id}: Arnoldi breakdown at degree {}; basis reduced", k + 1);
            reached = k;
            break;
        }
        h[k + 1][k] = C::new(nrm, 0.0);
        q.push(f.iter().map(|x| x / nrm).collect());
        prim.push(big_f.iter().map(|x| x / nrm).collect());
    }
    let hessenberg: Vec<Vec<C>> = h.into_iter().take(reached + 1).map(|row| row[..reached].to_vec()).collect();
    Ok(OrthonormalBasis {
        domain_id: id.to_string(),
        center,
        degree: reached,
        area,
        kind: BasisKind::Arnoldi { hessenberg },
    })
}

/// Values, first and second derivatives of every basis function at `z`.
pub fn eval_basis(basis: &OrthonormalBasis, z: C) -> BasisEval {
    match &basis.kind {
        BasisKind::Arnoldi { hessenberg } => eval_arnoldi(basis, hessenberg, z),
        BasisKind::Laurent {
            inner,
            outer,
            negative,
        } => eval_laurent(basis.degree, *negative, *inner, *outer, z),
    }
}

fn eval_arnoldi(basis: &OrthonormalBasis, h: &[Vec<C>], z: C) -> BasisEval {
    let n = basis.degree;
    let x = z - basis.center;
    let mut v = vec![ZERO; n + 1];
    let mut d1 = vec![ZERO; n + 1];
    let mut d2 = vec![ZERO; n + 1];
    v[0] = C::new(1.0 / basis.area.sqrt(), 0.0);
    for k in 0..n {
        let mut s0 = x * v[k];
        let mut s1 = v[k] + x * d1[k];
        let mut s2 = d1[k] * 2.0 + x * d2[k];
        for j in 0..=k {
            let c = h[j][k];
            s0 -= c * v[j];
            s1 -= c * d1[j];
            s2 -= c * d2[j];
        }
        let sub = h[k + 1][k].re;
        v[k + 1] = s0 / sub;
        d1[k + 1] = s1 / sub;
        d2[k + 1] = s2 / sub;
    }
    BasisEval { values: v, d1, d2 }
}

fn eval_laurent(degree: usize, negative: usize, r: f64, big_r: f64, z: C) -> BasisEval {
    let exps = (0..=degree as i64).chain((1..=negative as i64).map(|k| -k));
    let mut out = BasisEval {
        values: Vec::with_capacity(degree + negative + 1),
        d1: Vec::with_capacity(degree + negative + 1),
        d2: Vec::with_capacity(degree + negative + 1),
    };
    for k in exps {
        let s = 1.0 / laurent_norm_sqr(k, r, big_r).sqrt();
        let kf = k as f64;
        let p = |e: i64| -> C {
            if e >= 0 {
                z.powu(e as u32)
            } else {
                z.powu((-e) as u32).inv()
            }
        };
        out.values.push(p(k) * s);
        out.d1.push(if k == 0 { ZERO } else { p(k - 1) * (kf * s) });
        out.d2.push(if k == 0 || k == 1 {
            ZERO
        } else {
            p(k - 2) * (kf * (kf - 1.0) * s)
        });
    }
    out
}

/// Gram matrix `⟨q_j, q_k⟩` of an Arnoldi basis on an independent rule.
pub fn gram_matrix(basis: &OrthonormalBasis, rule: &QuadratureRule) -> Result<Vec<Vec<C>>> {
    let m = basis.len();
    let fitter = PrimitiveFitter::new(rule, basis.center, basis.degree + 1)?;
    let evals: Vec<BasisEval> = rule.nodes.iter().map(|&z| eval_basis(basis, z)).collect();
    let cols: Vec<Vec<C>> = (0..m).map(|k| evals.iter().map(|e| e.values[k]).collect()).collect();
    let prims: Vec<Vec<C>> = cols.iter().map(|c| fitter.primitive(c)).collect();
    Ok((0..m)
        .map(|j| (0..m).map(|k| fitter.inner(&cols[j], &prims[k])).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn disc_basis(center: C, degree: usize) -> OrthonormalBasis {
        let d = Domain::disc(1.0).unwrap();
        let rule = boundary_quadrature(&d, 12, 16).unwrap();
        build_basis(&d, center, degree, &rule).unwrap()
    }

    fn max_dev_from_identity(g: &[Vec<C>]) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, row) in g.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((v - target).norm());
            }
        }
        worst
    }

    #[test]
    fn disc_monomial_inner_products() {
        let rule = boundary_quadrature(&Domain::disc(1.0).unwrap(), 8, 16).unwrap();
        assert!((monomial_inner_product(&rule, 0, 0) - PI).norm() < 1e-12);
        assert!((monomial_inner_product(&rule, 1, 1) - PI / 2.0).norm() < 1e-12);
        assert!(monomial_inner_product(&rule, 0, 1).norm() < 1e-12);
        let a = monomial_inner_product(&rule, 3, 2);
        let b = monomial_inner_product(&rule, 2, 3);
        assert_eq!(a, b.conj());
    }

    #[test]
    fn disc_basis_is_scaled_monomials() {
        let b = disc_basis(c(0.0, 0.0), 10);
        let z = c(0.31, -0.47);
        let e = eval_basis(&b, z);
        for k in 0..=10 {
            let exact = z.powu(k as u32) * ((k as f64 + 1.0) / PI).sqrt();
            assert!((e.values[k] - exact).norm() < 1e-12, "k={k}");
        }
        let e0 = eval_basis(&b, c(0.0, 0.0));
        assert!((e0.values[0] - 1.0 / PI.sqrt()).norm() < 1e-14);
        assert!(e0.values[1..].iter().all(|v| v.norm() < 1e-14));
        assert!((e0.d1[1] - (2.0 / PI).sqrt()).norm() < 1e-12);
    }

    #[test]
    fn hessenberg_shape_and_positive_subdiagonal() {
        let b = disc_basis(c(0.2, 0.1), 12);
        let h = b.hessenberg().unwrap();
        assert_eq!(h.len(), 13);
        for (j, row) in h.iter().enumerate() {
            assert_eq!(row.len(), 12);
            for (k, v) in row.iter().enumerate() {
                if j > k + 1 {
                    assert_eq!(*v, ZERO);
                }
                if j == k + 1 {
                    assert!(v.re > 0.0 && v.im == 0.0);
                }
            }
        }
    }

    #[test]
    fn annulus_laurent_norms() {
        let d = Domain::annulus(0.5, 1.0).unwrap();
        let rule = boundary_quadrature(&d, 12, 16).unwrap();
        let b = build_basis(&d, c(0.75, 0.0), 10, &rule).unwrap();
        assert_eq!(b.len(), 21);
        for k in [0i64, 1, 5, 10] {
            let expect = PI * (1.0 - 0.5f64.powi(2 * k as i32 + 2)) / (k + 1) as f64;
            assert!((laurent_norm_sqr(k, 0.5, 1.0) - expect).abs() < 1e-15);
            // agreement with the boundary-reduced monomial integral
            let got = monomial_inner_product(&rule, k as usize, k as usize).re;
            assert!((got - expect).abs() < 1e-12, "k={k}: {got} vs {expect}");
        }
        assert!((laurent_norm_sqr(-1, 0.5, 1.0) - 2.0 * PI * 2f64.ln()).abs() < 1e-15);
        let e = eval_basis(&b, c(0.7, 0.1));
        assert_eq!(e.values.len(), 21);
        assert!((e.values[0] - 1.0 / b.area.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn slit_disc_matches_disc_hessenberg() {
        let slit = Domain::slit_disc(0.0, 1.0).unwrap();
        let disc = Domain::disc(1.0).unwrap();
        let p = c(-0.5, 0.0);
        let bs = build_basis(&slit, p, 10, &boundary_quadrature(&slit, 12, 16).unwrap()).unwrap();
        let bd = build_basis(&disc, p, 10, &boundary_quadrature(&disc, 12, 16).unwrap()).unwrap();
        let (hs, hd) = (bs.hessenberg().unwrap(), bd.hessenberg().unwrap());
        for (rs, rd) in hs.iter().zip(hd) {
            for (a, b) in rs.iter().zip(rd) {
                assert!((a - b).norm() < 1e-10);
            }
        }
        assert!((bs.area - bd.area).abs() < 1e-12);
    }

    #[test]
    fn gram_on_finer_rule_is_identity() {
        let cases = [
            (Domain::disc(1.0).unwrap(), c(0.0, 0.0)),
            (Domain::square(1.0).unwrap(), c(0.1, 0.2)),
            (Domain::kerzman(), c(-0.5, 0.0)),
            (Domain::slit_disc(0.0, 1.0).unwrap(), c(-0.5, 0.0)),
        ];
        for (d, p) in cases {
            let cfg = BasisConfig::default();
            let b = build_basis_with(&d, p, &cfg).unwrap();
            let fine = boundary_quadrature(&d, 2 * cfg.panels, cfg.order).unwrap();
            let g = gram_matrix(&b, &fine).unwrap();
            let dev = max_dev_from_identity(&g);
            assert!(dev <= 1e-8, "{}: ‖G − I‖ = {dev:e}", d.id());
        }
    }

    #[test]
    fn shift_relation_holds() {
        let d = Domain::kerzman();
        let b = build_basis(&d, c(-0.5, -0.1), 40, &boundary_quadrature(&d, 12, 16).unwrap()).unwrap();
        let h = b.hessenberg().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut tested = 0;
        while tested < 50 {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if !d.contains(z) {
                continue;
            }
            tested += 1;
            let e = eval_basis(&b, z);
            let scale = e.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for k in 0..b.degree {
                let s: C = (0..=k + 1).map(|j| h[j][k] * e.values[j]).sum();
                let lhs = (z - b.center) * e.values[k];
                assert!((lhs - s).norm() <= 1e-10 * (1.0 + z.norm()) * scale);
            }
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        let d = Domain::square(1.0).unwrap();
        let b = build_basis(&d, c(0.0, 0.0), 20, &boundary_quadrature(&d, 12, 16).unwrap()).unwrap();
        let z = c(0.23, -0.31);
        let e = eval_basis(&b, z);
        for k in [5usize, 10, 20] {
            let err = |h: f64| {
                let p = eval_basis(&b, z + h).values[k];
                let m = eval_basis(&b, z - h).values[k];
                ((p - m) / (2.0 * h) - e.d1[k]).norm()
            };
            let (e1, e2) = (err(1e-4), err(1e-5));
            let order = (e1 / e2).log10();
            assert!(order >= 1.9, "k={k} order {order}");
            let err2 = |h: f64| {
                let p = eval_basis(&b, z + h).d1[k];
                let m = eval_basis(&b, z - h).d1[k];
                ((p - m) / (2.0 * h) - e.d2[k]).norm()
            };
            let order2 = (err2(1e-2) / err2(1e-3)).log10();
            assert!(order2 >= 1.9, "k={k} second-derivative order {order2}");
        }
    }

    #[test]
    fn scale_covariance() {
        let r = 0.6;
        let dr = Domain::disc(r).unwrap();
        let br = build_basis(&dr, c(0.0, 0.0), 30, &boundary_quadrature(&dr, 12, 16).unwrap()).unwrap();
        let b1 = disc_basis(c(0.0, 0.0), 30);
        let z = c(0.2, 0.25);
        let er = eval_basis(&br, z);
        let e1 = eval_basis(&b1, z / r);
        for k in 0..=30 {
            assert!((er.values[k] - e1.values[k] / r).norm() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn evaluation_is_deterministic() {
        let b = disc_basis(c(0.1, 0.0), 20);
        let z = c(0.4, 0.4);
        assert_eq!(eval_basis(&b, z), eval_basis(&b, z));
    }

    #[test]
    fn json_round_trip() {
        let b = disc_basis(c(0.1, -0.2), 5);
        let back = OrthonormalBasis::from_json(&b.to_json()).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn rejects_exterior_center() {
        let d = Domain::disc(1.0).unwrap();
        let rule = boundary_quadrature(&d, 4, 8).unwrap();
        assert!(matches!(
            build_basis(&d, c(2.0, 0.0), 5, &rule),
            Err(BergmanError::OutsideDomain(_))
        ));
    }
}
