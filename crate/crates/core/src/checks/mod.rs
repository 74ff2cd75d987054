//! Numerical checks of the theorems about Bergman kernels and representative
//! coordinates. Each check produces a [`CheckReport`]; statements quantified
//! over boundary points or shrinking neighbourhoods are reported as trends
//! over explicit ladders rather than decided.

mod ball;
mod planar;
mod report;

pub use ball::{run_ball_check, BallContext};
pub use planar::{passing_radius, PlanarContext, SimilarityLadder};
pub use report::{CheckReport, Finding, LadderPoint, PointCounts, Residuals, Verdict};

use crate::error::{BergmanError, Result};
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    Suita,
    ConditionB,
    KernelSimilar,
    Transformation,
    Curvature,
    BoundaryExtension,
    LocalConnectivity,
    KernelInfimum,
    BoundedRepcoord,
}

impl CheckId {
    pub const ALL: [CheckId; 9] = [
        CheckId::Suita,
        CheckId::ConditionB,
        CheckId::KernelSimilar,
        CheckId::Transformation,
        CheckId::Curvature,
        CheckId::BoundaryExtension,
        CheckId::LocalConnectivity,
        CheckId::KernelInfimum,
        CheckId::BoundedRepcoord,
    ];

    /// Checks that make sense on the ball oracles.
    pub const BALL: [CheckId; 4] = [
        CheckId::KernelSimilar,
        CheckId::Transformation,
        CheckId::Curvature,
        CheckId::BoundedRepcoord,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckId::Suita => "suita",
            CheckId::ConditionB => "condition_b",
            CheckId::KernelSimilar => "kernel_similar",
            CheckId::Transformation => "transformation",
            CheckId::Curvature => "curvature",
            CheckId::BoundaryExtension => "boundary_extension",
            CheckId::LocalConnectivity => "local_connectivity",
            CheckId::KernelInfimum => "kernel_infimum",
            CheckId::BoundedRepcoord => "bounded_repcoord",
        }
    }

    pub fn citation(&self) -> &'static str {
        match self {
            CheckId::Suita => {
                "Suita's inequality πK ≥ c_β², with equality exactly on a disc possibly less a \
                 relatively closed polar set; the chain πK(w,w) ≥ c_B²(w) ≥ g(w)/2"
            }
            CheckId::ConditionB => {
                "Condition (B): |∂K(z,p)/∂z| ≤ 𝓒|K(z,p)| for p in an open set U; on the disc the \
                 bound is < 2|K(z,p)|, and it is not satisfied for the examples of Fornæss and Kerzman"
            }
            CheckId::KernelSimilar => {
                "every p has a small neighbourhood U_p with sup_{ζ∈U_p} |K(z,ζ)| ≤ 2|K(z,p)|"
            }
            CheckId::Transformation => {
                "K(z,p) = g(p)/(2π) T′(z) and |T′(z)| ≤ (2π/g(p))|K(z,p)| with equality on Ω; \
                 diastasis Φ_p = −(2/c²) log(1 − (c²/2)|T|²); Green's function log|T| + log√g(p) − log√2"
            }
            CheckId::Curvature => {
                "Gaussian curvature identically equal to −2; holomorphic sectional curvature −c² \
                 with n = 2c⁻² − 1"
            }
            CheckId::BoundaryExtension => {
                "the representative coordinate extends continuously up to the closure, and the \
                 boundary of the image is a Jordan curve"
            }
            CheckId::LocalConnectivity => {
                "local C¹-connectivity around a boundary point; domains with piecewise C¹-smooth \
                 boundaries qualify"
            }
            CheckId::KernelInfimum => {
                "inf_z |K(z,p)| = 0 = inf_z |T′(z)|, with h_p = 2 log|K(z,p)|; Kerzman's domain has a \
                 kernel K(·,p) that blows up to infinity at a boundary point"
            }
            CheckId::BoundedRepcoord => {
                "sup_{ζ∈U} |K(z,ζ)| ≤ 𝓒|K(z,p)| makes the representative coordinate map into a \
                 bounded domain, |w(z)| ≤ 𝓒/r_p + C_p"
            }
        }
    }
}

impl std::fmt::Display for CheckId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = BergmanError;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| BergmanError::InvalidInput(format!("unknown check id {s:?}")))
    }
}

/// Parses `"all"` or a comma-separated list of check ids, sorted and deduplicated.
pub fn parse_check_list(s: &str) -> Result<Vec<CheckId>> {
    if s.trim() == "all" {
        return Ok(CheckId::ALL.to_vec());
    }
    let mut ids = s
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<Vec<CheckId>>>()?;
    if ids.is_empty() {
        return Err(BergmanError::InvalidInput("empty check list".into()));
    }
    ids.sort();
    ids.dedup();
    Ok(ids)
}

/// Runs one planar check, turning any error into a report with verdict `error`.
pub fn run_check(id: CheckId, ctx: &PlanarContext, timings: bool) -> CheckReport {
    let start = Instant::now();
    let mut report = match planar::run(id, ctx) {
        Ok(r) => r,
        Err(e) => CheckReport::error(id.as_str(), ctx.domain().id(), ctx.anchor, e.to_string()),
    };
    if report.verdict != Verdict::Error {
        let expected = planar::expectation(id, ctx);
        report.expect(expected);
    }
    if timings {
        report.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    report
}

/// Runs the given checks concurrently, returning reports in check-id order.
pub fn run_checks(ids: &[CheckId], ctx: &PlanarContext, timings: bool) -> Vec<CheckReport> {
    use rayon::prelude::*;
    let mut ids = ids.to_vec();
    ids.sort();
    ids.par_iter().map(|&id| run_check(id, ctx, timings)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_check_lists() {
        assert_eq!(parse_check_list("all").unwrap().len(), 9);
        let ids = parse_check_list("curvature,suita,suita").unwrap();
        assert_eq!(ids, vec![CheckId::Suita, CheckId::Curvature]);
        assert!(parse_check_list("foo").is_err());
        assert!(parse_check_list("suita,foo").is_err());
    }

    #[test]
    fn ids_round_trip() {
        for id in CheckId::ALL {
            assert_eq!(id.as_str().parse::<CheckId>().unwrap(), id);
            assert!(!id.citation().is_empty());
        }
    }
}
