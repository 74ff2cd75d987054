//! Command-line front end: `bergmap kernel|map|check`.

use crate::checks::{
    parse_check_list, run_ball_check, run_checks, BallContext, CheckId, CheckReport, PlanarContext,
};
use crate::error::BergmanError;
use crate::geometry::{boundary_quadrature, DomainSpec};
use crate::kernel::{detect_constant_curvature, metric_sample_with, KernelField, KernelSource};
use crate::oracles::{AnalyticKernel, BallKernel};
use crate::orthobasis::{gram_matrix, BasisConfig, BasisKind};
use crate::repcoord::RepCoordinate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

type C = Complex64;

#[derive(Debug, Parser)]
#[command(name = "bergmap", version, about = "Bergman kernels, representative coordinates and theorem checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kernel, metric and curvature on the interior grid.
    Kernel(RunArgs),
    /// Representative coordinate, diastasis and Green's function on the grid.
    Map(RunArgs),
    /// Run theorem checks and write one report per check.
    Check(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceMode {
    /// Numeric basis, with the closed form (when known) for boundary ladders.
    Auto,
    Numeric,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PpmField {
    Kzz,
    AbsKzp,
    G,
    Kappa,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Domain spec JSON file.
    #[arg(long)]
    pub domain: PathBuf,
    /// Anchor point `re,im`.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub anchor: String,
    #[arg(long, default_value_t = 60)]
    pub degree: usize,
    #[arg(long, default_value_t = 16)]
    pub panels: usize,
    #[arg(long, default_value_t = 16)]
    pub order: usize,
    /// Comma-separated check ids, or `all`.
    #[arg(long, default_value = "all")]
    pub checks: String,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub spacing: f64,
    #[arg(long, default_value_t = 0.05)]
    pub margin: f64,
    #[arg(long, value_enum, default_value_t = SourceMode::Auto)]
    pub source: SourceMode,
    /// Boundary point `re,im` for the boundary ladders.
    #[arg(long, allow_hyphen_values = true)]
    pub boundary_point: Option<String>,
    /// Heatmap of a scalar field, written as `kernel.ppm`.
    #[arg(long, value_enum)]
    pub ppm: Option<PpmField>,
    /// Record wall-clock runtimes (makes outputs non-reproducible).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Parse(String),
    #[error("build failed: {0}")]
    Build(String),
    #[error("{0}")]
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Build(_) => 3,
            CliError::Run(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(format!("i/o: {e}"))
    }
}

fn build_err(e: BergmanError) -> CliError {
    CliError::Build(e.to_string())
}

/// Validated run configuration; everything but the output directory and the
/// timing switch enters the config hash.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub domain: DomainSpec,
    pub anchor: [f64; 2],
    pub degree: usize,
    pub panels: usize,
    pub order: usize,
    pub checks: Vec<CheckId>,
    pub spacing: f64,
    pub margin: f64,
    pub source: SourceMode,
    pub boundary_point: Option<[f64; 2]>,
    pub ppm: Option<PpmField>,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub timings: bool,
}

fn parse_point(s: &str, what: &str) -> Result<[f64; 2], CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::Parse(format!("{what} must be `re,im`, got {s:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let re: f64 = parts[0].parse().map_err(|_| bad())?;
    let im: f64 = parts[1].parse().map_err(|_| bad())?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok([re, im])
}

impl RunConfig {
    pub fn from_args(command: &str, a: &RunArgs) -> Result<Self, CliError> {
        let text = fs::read_to_string(&a.domain)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", a.domain.display())))?;
        let domain = DomainSpec::from_json(&text).map_err(|e| CliError::Parse(e.to_string()))?;
        let checks = parse_check_list(&a.checks).map_err(|e| CliError::Parse(e.to_string()))?;
        for (name, v) in [("degree", a.degree), ("panels", a.panels), ("order", a.order)] {
            if v == 0 {
                return Err(CliError::Parse(format!("{name} must be positive")));
            }
        }
        if !(a.spacing > 0.0 && a.spacing.is_finite()) || !(a.margin > 0.0 && a.margin.is_finite()) {
            return Err(CliError::Parse("spacing and margin must be positive".into()));
        }
        Ok(RunConfig {
            command: command.to_string(),
            domain,
            anchor: parse_point(&a.anchor, "anchor")?,
            degree: a.degree,
            panels: a.panels,
            order: a.order,
            checks,
            spacing: a.spacing,
            margin: a.margin,
            source: a.source,
            boundary_point: a.boundary_point.as_deref().map(|s| parse_point(s, "boundary point")).transpose()?,
            ppm: a.ppm,
            out: a.out.clone(),
            timings: a.timings,
        })
    }

    pub fn anchor(&self) -> C {
        C::new(self.anchor[0], self.anchor[1])
    }

    /// SHA-256 of the canonical JSON of the configuration.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    fn basis_config(&self) -> BasisConfig {
        BasisConfig {
            degree: self.degree,
            panels: self.panels,
            order: self.order,
        }
    }
}

/// Shortest round-trip decimal.
fn num(x: f64) -> String {
    format!("{x:?}")
}

struct Writer<'a> {
    dir: &'a Path,
    hash: String,
}

impl Writer<'_> {
    fn csv(&self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let mut s = format!("# config_hash={}\n{}\n", self.hash, header.join(","));
        for row in rows {
            let cells: Vec<String> = row.iter().map(|&x| num(x)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        fs::write(self.dir.join(name), s)?;
        Ok(())
    }

    fn json(&self, name: &str, mut v: Value) -> Result<(), CliError> {
        if let Value::Object(m) = &mut v {
            m.insert("config_hash".into(), Value::String(self.hash.clone()));
        }
        let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Run(e.to_string()))?;
        s.push('\n');
        fs::write(self.dir.join(name), s)?;
        Ok(())
    }
}

fn writer<'a>(cfg: &'a RunConfig) -> Result<Writer<'a>, CliError> {
    fs::create_dir_all(&cfg.out)?;
    Ok(Writer {
        dir: &cfg.out,
        hash: cfg.hash(),
    })
}

fn ball_of(cfg: &RunConfig) -> Result<Option<BallContext>, CliError> {
    match cfg.domain {
        DomainSpec::Ball { n } => {
            let k = BallKernel::new(n).map_err(|e| CliError::Parse(e.to_string()))?;
            BallContext::from_first(k, cfg.anchor())
                .map(Some)
                .map_err(|e| CliError::Parse(e.to_string()))
        }
        _ => Ok(None),
    }
}

/// Primary source and the closed form used for boundary ladders.
fn sources(cfg: &RunConfig) -> Result<(Arc<dyn KernelSource>, Option<AnalyticKernel>), CliError> {
    let domain = cfg.domain.build().map_err(|e| CliError::Parse(e.to_string()))?;
    let oracle = AnalyticKernel::for_domain(&domain);
    let numeric = || -> Result<Arc<dyn KernelSource>, CliError> {
        Ok(Arc::new(KernelField::build(&domain, cfg.anchor(), &cfg.basis_config()).map_err(build_err)?))
    };
    match cfg.source {
        SourceMode::Auto => Ok((numeric()?, oracle)),
        SourceMode::Numeric => Ok((numeric()?, None)),
        SourceMode::Oracle => {
            let o = oracle.ok_or_else(|| CliError::Build(format!("no closed-form kernel for {}", domain.id())))?;
            Ok((Arc::new(o.clone()), Some(o)))
        }
    }
}

pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Kernel(a) => cmd_kernel(&RunConfig::from_args("kernel", &a)?),
        Command::Map(a) => cmd_map(&RunConfig::from_args("map", &a)?),
        Command::Check(a) => cmd_check(&RunConfig::from_args("check", &a)?),
    }
}

// ---------------------------------------------------------------- kernel

pub fn cmd_kernel(cfg: &RunConfig) -> Result<i32, CliError> {
    if let Some(ball) = ball_of(cfg)? {
        return kernel_ball(cfg, &ball);
    }
    let (src, oracle) = sources(cfg)?;
    let d = src.domain();
    let p = cfg.anchor();
    if !d.contains(p) {
        return Err(CliError::Parse(format!("anchor {p} lies outside {}", d.id())));
    }
    let grid = d.interior_grid(cfg.spacing, cfg.margin).map_err(|e| CliError::Parse(e.to_string()))?;
    let rows: Vec<Option<Vec<f64>>> = grid
        .par_iter()
        .map(|&z| {
            let s = metric_sample_with(src.as_ref(), z, 0.0).ok()?;
            let k = src.kernel(z, p, 0, 0).ok()?;
            Some(vec![z.re, z.im, k.re, k.im, s.block[0][0].re, s.g, s.kappa])
        })
        .collect();
    let skipped = rows.iter().filter(|r| r.is_none()).count();
    let rows: Vec<Vec<f64>> = rows.into_iter().flatten().collect();
    let w = writer(cfg)?;
    w.csv("kernel.csv", &["re_z", "im_z", "re_k_zp", "im_k_zp", "k_zz", "g", "kappa"], &rows)?;

    let mut meta = json!({
        "command": "kernel",
        "domain": d.id(),
        "anchor": cfg.anchor,
        "source": src.label(),
        "mode": if src.is_oracle() { "analytic" } else { "numeric" },
        "config": cfg,
        "points": {"written": rows.len(), "skipped": skipped},
    });
    // accuracy probes
    let trunc = grid.iter().map(|&z| src.truncation(z)).fold(0.0f64, f64::max);
    meta["probes"] = json!({ "truncation_max": trunc, "truncation_anchor": src.truncation(p) });
    if let Some(o) = oracle.filter(|_| !src.is_oracle()) {
        let err = rows
            .iter()
            .filter_map(|r| {
                let z = C::new(r[0], r[1]);
                let k = o.kernel(z, p, 0, 0).ok()?;
                Some((C::new(r[2], r[3]) - k).norm() / k.norm())
            })
            .fold(0.0f64, f64::max);
        meta["probes"]["oracle"] = json!(o.id());
        meta["probes"]["oracle_relative_error_max"] = json!(err);
    }
    if cfg.source != SourceMode::Oracle {
        let field = KernelField::build(d, p, &cfg.basis_config()).map_err(build_err)?;
        let b = field.basis();
        meta["basis"] = json!({"center": [b.center.re, b.center.im], "degree": b.degree, "area": b.area,
            "panels": cfg.panels, "order": cfg.order});
        if let BasisKind::Arnoldi { .. } = b.kind {
            let rule = boundary_quadrature(d, 2 * cfg.panels, cfg.order).map_err(build_err)?;
            let g = gram_matrix(b, &rule).map_err(build_err)?;
            let dev = g
                .iter()
                .enumerate()
                .flat_map(|(j, row)| row.iter().enumerate().map(move |(k, v)| (v - if j == k { 1.0 } else { 0.0 }).norm()))
                .fold(0.0f64, f64::max);
            meta["probes"]["orthonormality_max_deviation"] = json!(dev);
        }
    }
    if let Some(field) = cfg.ppm {
        let col = match field {
            PpmField::Kzz => 4,
            PpmField::AbsKzp => usize::MAX,
            PpmField::G => 5,
            PpmField::Kappa => 6,
        };
        let value = |r: &Vec<f64>| if col == usize::MAX { r[2].hypot(r[3]) } else { r[col] };
        let (lo, hi) = write_ppm(&w, &rows, cfg.spacing, value)?;
        meta["ppm"] = json!({"field": field, "min": lo, "max": hi});
    }
    w.json("meta.json", meta)?;
    Ok(0)
}

/// Grayscale heatmap on the lattice spanned by the rows, min-max normalised.
fn write_ppm(w: &Writer, rows: &[Vec<f64>], spacing: f64, value: impl Fn(&Vec<f64>) -> f64) -> Result<(f64, f64), CliError> {
    if rows.is_empty() {
        return Err(CliError::Run("no grid point to draw".into()));
    }
    let idx = |x: f64| (x / spacing).round() as i64;
    let (i0, i1) = rows.iter().fold((i64::MAX, i64::MIN), |a, r| (a.0.min(idx(r[0])), a.1.max(idx(r[0]))));
    let (j0, j1) = rows.iter().fold((i64::MAX, i64::MIN), |a, r| (a.0.min(idx(r[1])), a.1.max(idx(r[1]))));
    let finite: Vec<f64> = rows.iter().map(&value).filter(|v| v.is_finite()).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (wd, ht) = ((i1 - i0 + 1) as usize, (j1 - j0 + 1) as usize);
    let mut px = vec![0u8; wd * ht];
    for r in rows {
        let v = value(r);
        let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
        let (i, j) = ((idx(r[0]) - i0) as usize, (j1 - idx(r[1])) as usize);
        px[j * wd + i] = (t.clamp(0.0, 1.0) * 255.0).round() as u8;
    }
    let mut out = format!("P5\n# config_hash={}\n{wd} {ht}\n255\n", w.hash).into_bytes();
    out.extend_from_slice(&px);
    fs::write(w.dir.join("kernel.ppm"), out)?;
    Ok((lo, hi))
}

/// Points `(t, 0, …, 0)` on the first coordinate disc of the ball.
fn ball_line(spacing: f64, margin: f64) -> Vec<C> {
    let n = (1.0 / spacing).floor() as i64;
    let mut out = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            let z = C::new(i as f64 * spacing, j as f64 * spacing);
            if z.norm() <= 1.0 - margin {
                out.push(z);
            }
        }
    }
    out
}

fn embed(dim: usize, z: C) -> Vec<C> {
    let mut v = vec![C::new(0.0, 0.0); dim];
    v[0] = z;
    v
}

fn kernel_ball(cfg: &RunConfig, ball: &BallContext) -> Result<i32, CliError> {
    let k = &ball.kernel;
    let n = k.dim();
    let p = &ball.anchor;
    let mut rows = Vec::new();
    for z in ball_line(cfg.spacing, cfg.margin) {
        let zv = embed(n, z);
        let kzp = k.kernel(&zv, p).map_err(build_err)?;
        let kzz = k.kernel(&zv, &zv).map_err(build_err)?.re;
        let g = k.metric(&zv).map_err(build_err)?[(0, 0)].re;
        // Gaussian curvature of the restriction to the first coordinate line
        let kappa = 2.0 * k.holomorphic_sectional_curvature(&zv, &embed(n, C::new(1.0, 0.0))).map_err(build_err)?;
        rows.push(vec![z.re, z.im, kzp.re, kzp.im, kzz, g, kappa]);
    }
    let w = writer(cfg)?;
    w.csv("kernel.csv", &["re_z", "im_z", "re_k_zp", "im_k_zp", "k_zz", "g", "kappa"], &rows)?;
    let origin = vec![C::new(0.0, 0.0); n];
    w.json(
        "meta.json",
        json!({
            "command": "kernel",
            "domain": format!("ball({n})"),
            "anchor": cfg.anchor,
            "source": format!("oracle(ball({n}))"),
            "mode": "analytic",
            "config": cfg,
            "k_origin": k.kernel(&origin, &origin).map_err(build_err)?.re,
            "c_squared": k.c_squared(),
            "points": {"written": rows.len(), "skipped": 0},
        }),
    )?;
    Ok(0)
}

// ---------------------------------------------------------------- map

pub fn cmd_map(cfg: &RunConfig) -> Result<i32, CliError> {
    if let Some(ball) = ball_of(cfg)? {
        return map_ball(cfg, &ball);
    }
    let (src, _) = sources(cfg)?;
    let d = src.domain().clone();
    let p = cfg.anchor();
    if !d.contains(p) {
        return Err(CliError::Parse(format!("anchor {p} lies outside {}", d.id())));
    }
    let verdict = detect_constant_curvature(src.as_ref()).map_err(build_err)?;
    let rc = RepCoordinate::new(src.clone(), p)
        .map_err(build_err)?
        .with_constant_curvature(verdict.constant);
    let grid = d.interior_grid(cfg.spacing, cfg.margin).map_err(|e| CliError::Parse(e.to_string()))?;
    let samples: Vec<_> = grid.par_iter().map(|&z| rc.sample(z)).collect();
    let mut rows = Vec::new();
    let mut guard_trips = 0;
    let mut excluded = 0;
    for s in &samples {
        match s {
            Ok(s) => rows.push(vec![
                s.z.re,
                s.z.im,
                s.w.re,
                s.w.im,
                s.dw.re,
                s.dw.im,
                s.diastasis.phi,
                s.green.unwrap_or(f64::NAN),
            ]),
            Err(BergmanError::NearKernelZero { .. }) => guard_trips += 1,
            Err(_) => excluded += 1,
        }
    }
    let inverse: Vec<f64> = samples
        .par_iter()
        .filter_map(|s| s.as_ref().ok())
        .map(|s| rc.invert(s.w, None).map_or(f64::INFINITY, |z| (z - s.z).norm()))
        .collect();
    let failures = inverse.iter().filter(|r| !r.is_finite()).count();
    let inv_max = inverse.iter().copied().filter(|r| r.is_finite()).fold(0.0f64, f64::max);
    let w = writer(cfg)?;
    w.csv("map.csv", &["re_z", "im_z", "re_w", "im_w", "re_dw", "im_dw", "phi", "green"], &rows)?;
    let mut meta = json!({
        "command": "map",
        "domain": d.id(),
        "anchor": cfg.anchor,
        "source": src.label(),
        "config": cfg,
        "image_radius": rc.image_radius(),
        "c_squared": rc.c_squared(),
        "metric_at_anchor": rc.metric_at_anchor(),
        "kernel_at_anchor": rc.kernel_at_anchor(),
        "constant_curvature": verdict.constant,
        "curvature": verdict,
        "points": {"attempted": grid.len(), "evaluated": rows.len(), "guard_trips": guard_trips, "margin_exclusions": excluded},
        "inverse": {"count": inverse.len(), "failures": failures, "residual_max": inv_max},
    });
    if !verdict.constant {
        meta["note"] = json!("curvature is not constant -2: T is evaluated but carries no theorem contract");
    }
    w.json("map_meta.json", meta)?;
    Ok(0)
}

fn map_ball(cfg: &RunConfig, ball: &BallContext) -> Result<i32, CliError> {
    let k = &ball.kernel;
    let n = k.dim();
    let p = &ball.anchor;
    let mut rows = Vec::new();
    for z in ball_line(cfg.spacing, cfg.margin) {
        let zv = embed(n, z);
        let wv = k.rep_coordinate(p, &zv).map_err(build_err)?;
        let q = k.q_form(p, &wv).map_err(build_err)?;
        let (phi, pred) = k.diastasis(p, &zv).map_err(build_err)?;
        let mut row = vec![z.re, z.im];
        for c in &wv {
            row.extend([c.re, c.im]);
        }
        row.extend([q, phi, pred]);
        rows.push(row);
    }
    let mut header = vec!["re_z1".to_string(), "im_z1".to_string()];
    for a in 1..=n {
        header.push(format!("re_w{a}"));
        header.push(format!("im_w{a}"));
    }
    header.extend(["q", "phi", "phi_predicted"].map(String::from));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let w = writer(cfg)?;
    w.csv("map.csv", &header, &rows)?;
    w.json(
        "map_meta.json",
        json!({
            "command": "map",
            "domain": format!("ball({n})"),
            "anchor": cfg.anchor,
            "source": format!("oracle(ball({n}))"),
            "config": cfg,
            "c_squared": k.c_squared(),
            "image": format!("Q < {}", n + 1),
            "constant_curvature": true,
        }),
    )?;
    Ok(0)
}

// ---------------------------------------------------------------- check

pub fn cmd_check(cfg: &RunConfig) -> Result<i32, CliError> {
    let reports: Vec<CheckReport> = if let Some(ball) = ball_of(cfg)? {
        cfg.checks.iter().map(|&id| run_ball_check(id, &ball, cfg.timings)).collect()
    } else {
        let (src, oracle) = sources(cfg)?;
        let q = cfg.boundary_point.map(|[x, y]| C::new(x, y));
        let ctx = PlanarContext::new(src, oracle, cfg.anchor(), cfg.spacing, cfg.margin)
            .map_err(|e| match e {
                BergmanError::OutsideDomain(_) | BergmanError::InvalidInput(_) => CliError::Parse(e.to_string()),
                e => build_err(e),
            })?
            .with_boundary_point(q);
        run_checks(&cfg.checks, &ctx, cfg.timings)
    };
    let w = writer(cfg)?;
    let mut summary_rows = String::new();
    let _ = writeln!(summary_rows, "# config_hash={}", w.hash);
    summary_rows.push_str("check_id,verdict,trend,expected,as_expected,residual_max\n");
    let mut entries = Vec::new();
    for r in &reports {
        let v = serde_json::to_value(r).map_err(|e| CliError::Run(e.to_string()))?;
        w.json(&format!("{}.json", r.check_id), v)?;
        if !r.ladder.is_empty() {
            let rows: Vec<Vec<f64>> = r.ladder.iter().map(|l| vec![l.param, l.value]).collect();
            w.csv(&format!("{}_ladder.csv", r.check_id), &["param", "value"], &rows)?;
        }
        let _ = writeln!(
            summary_rows,
            "{},{},{},{},{},{}",
            r.check_id,
            r.verdict.as_str(),
            r.trend.as_deref().unwrap_or(""),
            r.expected.as_deref().unwrap_or(""),
            r.as_expected,
            num(r.residual_max)
        );
        entries.push(json!({
            "check_id": r.check_id,
            "verdict": r.verdict,
            "trend": r.trend,
            "expected": r.expected,
            "as_expected": r.as_expected,
            "residual_max": r.residual_max,
        }));
    }
    let all = reports.iter().all(|r| r.as_expected);
    fs::write(w.dir.join("summary.csv"), summary_rows)?;
    w.json(
        "summary.json",
        json!({
            "domain": reports.first().map(|r| r.domain.clone()),
            "anchor": cfg.anchor,
            "config": cfg,
            "checks": entries,
            "all_as_expected": all,
        }),
    )?;
    for r in &reports {
        log::info!("{:<20} {:<24} expected {:?}", r.check_id, r.outcome(), r.expected);
    }
    Ok(if all { 0 } else { 1 })
}

/// Caps the global worker pool from `BERGMAP_THREADS`.
pub fn init_threads() {
    if let Some(n) = std::env::var("BERGMAP_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("worker pool already initialised: {e}");
            }
        }
    }
}
