//! Vacuum AdS₃ causal geometry for four pointlike boundary regions: the
//! scattering region, its ridge, the decision regions, and the check that
//! boundary mutual information matches twice the ridge length.

pub mod boundary;
pub mod causal;
pub mod region;

use serde::Serialize;
use thiserror::Error;

pub use boundary::{decision_regions, geodesic_length, mutual_information, BaseInterval, Diamond};
pub use causal::{bulk_causal, BoundaryPoint, BulkPoint, Causal};
pub use region::{ridge_curve, scattering_region, scattering_region_nonempty, RegionSearch, Ridge, ScatteringConfig};

/// Causal classification and region tolerance.
pub const TOL: f64 = 1e-9;
/// Slack allowed in `I ≥ 2·ridge`.
pub const WEDGE_TOL: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point is not on the AdS quadric (X·X = {0})")]
    NotOnQuadric(f64),
    #[error("scattering region is empty: {0}")]
    EmptyRegion(String),
    #[error("decision region is empty: {0}")]
    EmptyDiamond(String),
    #[error("boundary points are not spacelike separated")]
    NotSpacelike,
}

pub type Result<T> = std::result::Result<T, GeometryError>;

#[derive(Clone, Debug, Serialize)]
pub struct GeometryReport {
    pub region_nonempty: bool,
    pub region_margin: f64,
    pub ridge_length: f64,
    pub decision_intervals: [BaseInterval; 2],
    pub mutual_information: f64,
    pub saturation_residual: f64,
    /// `I − 2·ridge`.
    pub wedge_margin: f64,
    /// `I ≥ 2·ridge − WEDGE_TOL` whenever the region is nonempty.
    pub wedge_holds: bool,
}

pub fn verify_connected_wedge(cfg: &ScatteringConfig, resolution: usize, eps: f64) -> Result<GeometryReport> {
    let region = scattering_region(cfg);
    let ridge_length = if region.nonempty { ridge_curve(cfg, resolution)?.length } else { 0.0 };
    let [d0, d1] = decision_regions(cfg)?;
    let mi = mutual_information(cfg, eps)?;
    let wedge_margin = mi - 2.0 * ridge_length;
    Ok(GeometryReport {
        region_nonempty: region.nonempty,
        region_margin: region.margin,
        ridge_length,
        decision_intervals: [d0.base, d1.base],
        mutual_information: mi,
        saturation_residual: wedge_margin.abs(),
        wedge_margin,
        wedge_holds: !region.nonempty || wedge_margin >= -WEDGE_TOL,
    })
}

/// Twenty configurations: five delays, each symmetric and with three kinds of
/// asymmetry (staggered output times, shifted input angle, rotated outputs).
pub fn config_grid() -> Vec<ScatteringConfig> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let mut out = Vec::new();
    for delay in [0.05, 0.1, 0.2, 0.4, 0.6] {
        let t = PI + delay;
        out.push(ScatteringConfig::delayed(delay));
        out.push(ScatteringConfig::new((0.0, 0.0), (0.0, PI), (t + 0.1, FRAC_PI_2), (t, -FRAC_PI_2)));
        out.push(ScatteringConfig::new((0.0, 0.0), (0.05, PI - 0.15), (t + 0.1, FRAC_PI_2), (t + 0.1, -FRAC_PI_2)));
        out.push(ScatteringConfig::new((0.0, 0.0), (0.0, PI), (t, FRAC_PI_2 + 0.1), (t, -FRAC_PI_2 + 0.1)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginal_report() {
        let r = verify_connected_wedge(&ScatteringConfig::marginal(), 1 << 12, 1e-3).unwrap();
        assert!(r.region_nonempty);
        assert!(r.mutual_information.abs() < 1e-9 && r.ridge_length < 1e-9 && r.saturation_residual < 1e-9);
    }

    #[test]
    fn delayed_report_saturates() {
        let r = verify_connected_wedge(&ScatteringConfig::delayed(0.2), 1 << 12, 1e-3).unwrap();
        assert!(r.mutual_information > 0.0 && r.ridge_length > 0.0);
        assert!(r.saturation_residual < 1e-3, "{r:?}");
    }

    #[test]
    fn presets_parse() {
        assert_eq!(ScatteringConfig::preset("marginal"), Some(ScatteringConfig::marginal()));
        assert_eq!(ScatteringConfig::preset("delay-0.2"), Some(ScatteringConfig::delayed(0.2)));
        assert_eq!(ScatteringConfig::preset("nope"), None);
    }
}
