use super::Domain;
use crate::error::{BergmanError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// JSON description of a domain, e.g. `{"type":"annulus","r":0.5,"R":1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainSpec {
    Disc {
        radius: f64,
    },
    Annulus {
        r: f64,
        #[serde(rename = "R")]
        big_r: f64,
    },
    SectorComplement {
        r_max: f64,
        theta_min: f64,
        theta_max: f64,
    },
    SlitDisc {
        slit_from: f64,
        slit_to: f64,
    },
    ConformalImage {
        map: String,
    },
    Ball {
        n: usize,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
}

impl DomainSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| BergmanError::InvalidInput(format!("domain spec: {e}")))
    }

    pub fn is_ball(&self) -> bool {
        matches!(self, DomainSpec::Ball { .. })
    }

    /// Builds the planar domain; ball specs are analytic-only and rejected here.
    pub fn build(&self) -> Result<Domain> {
        match self {
            DomainSpec::Disc { radius } => Domain::disc(*radius),
            DomainSpec::Annulus { r, big_r } => Domain::annulus(*r, *big_r),
            DomainSpec::SectorComplement {
                r_max,
                theta_min,
                theta_max,
            } => Domain::sector(*r_max, *theta_min, *theta_max),
            DomainSpec::SlitDisc { slit_from, slit_to } => Domain::slit_disc(*slit_from, *slit_to),
            DomainSpec::ConformalImage { map } => crate::oracles::domain_for_map(map),
            DomainSpec::Polygon { vertices } => {
                let v: Vec<Complex64> = vertices.iter().map(|[x, y]| Complex64::new(*x, *y)).collect();
                Domain::polygon(&v)
            }
            DomainSpec::Ball { n } => Err(BergmanError::UnsupportedDomain(format!(
                "ball({n}) has no planar boundary"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_stock_specs() {
        let d = DomainSpec::from_json(r#"{"type":"disc","radius":1.0}"#).unwrap();
        assert_eq!(d, DomainSpec::Disc { radius: 1.0 });
        let a = DomainSpec::from_json(r#"{"type":"annulus","r":0.5,"R":1.0}"#).unwrap();
        assert_eq!(a, DomainSpec::Annulus { r: 0.5, big_r: 1.0 });
        let s = DomainSpec::from_json(
            r#"{"type":"sector_complement","r_max":1.0,"theta_min":1.5707963,"theta_max":6.2831853}"#,
        )
        .unwrap();
        assert!(s.build().unwrap().contains(Complex64::new(-0.5, 0.0)));
        let b = DomainSpec::from_json(r#"{"type":"ball","n":2}"#).unwrap();
        assert!(b.is_ball());
        assert!(b.build().is_err());
    }

    #[test]
    fn missing_field_is_named() {
        let e = DomainSpec::from_json(r#"{"type":"disc"}"#).unwrap_err();
        assert!(e.to_string().contains("radius"), "{e}");
    }

    #[test]
    fn round_trips_through_json() {
        let spec = DomainSpec::SlitDisc {
            slit_from: 0.0,
            slit_to: 1.0,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(DomainSpec::from_json(&text).unwrap(), spec);
    }
}
