//! Boundary cylinder: decision regions and holographic mutual information.

use std::f64::consts::PI;

use serde::Serialize;

use crate::causal::{wrap, BoundaryPoint};
use crate::region::ScatteringConfig;
use crate::{GeometryError, Result};

/// Spatial base of a causal diamond: its left and right corners, with `theta`
/// unwrapped so `right.theta > left.theta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BaseInterval {
    pub left: (f64, f64),
    pub right: (f64, f64),
}

impl BaseInterval {
    pub fn width(&self) -> f64 {
        self.right.1 - self.left.1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Diamond {
    pub bottom: (f64, f64),
    pub top: (f64, f64),
    pub base: BaseInterval,
}

/// `Ĵ⁺(c) ∩ Ĵ⁻(r₀) ∩ Ĵ⁻(r₁)` in null coordinates `u = t − θ`, `v = t + θ`
/// unwrapped around `c`. Each output is taken at its image within `π` of `c`.
fn diamond(c: &BoundaryPoint, rs: [&BoundaryPoint; 2]) -> Result<Diamond> {
    let (uc, vc) = (c.t - c.theta, c.t + c.theta);
    let mut u_top = f64::INFINITY;
    let mut v_top = f64::INFINITY;
    for r in rs {
        let th = c.theta + wrap(r.theta - c.theta);
        u_top = u_top.min(r.t - th);
        v_top = v_top.min(r.t + th);
    }
    if u_top - uc <= 1e-12 || v_top - vc <= 1e-12 {
        return Err(GeometryError::EmptyDiamond(format!(
            "input at ({:.3}, {:.3}) is not strictly in the past of both outputs",
            c.t, c.theta
        )));
    }
    let point = |u: f64, v: f64| ((u + v) / 2.0, (v - u) / 2.0);
    Ok(Diamond {
        bottom: point(uc, vc),
        top: point(u_top, v_top),
        base: BaseInterval { left: point(u_top, vc), right: point(uc, v_top) },
    })
}

pub fn decision_regions(cfg: &ScatteringConfig) -> Result<[Diamond; 2]> {
    Ok([diamond(&cfg.c0, [&cfg.r0, &cfg.r1])?, diamond(&cfg.c1, [&cfg.r0, &cfg.r1])?])
}

/// Regulated length of the boundary-anchored geodesic between `(t, θ)` points:
/// `ln(2(cos Δt − cos Δθ)/ε²)`, which is `2 ln((2/ε) sin(Δθ/2))` on a time slice.
pub fn geodesic_length(p: (f64, f64), q: (f64, f64), eps: f64) -> Result<f64> {
    let x = (p.0 - q.0).cos() - (p.1 - q.1).cos();
    if x <= 0.0 {
        return Err(GeometryError::NotSpacelike);
    }
    Ok((2.0 * x).ln() - 2.0 * eps.ln())
}

/// `I(V₀:V₁) = max(0, L(γ_V₀) + L(γ_V₁) − L(connected))`, in units with 4G_N = 1.
pub fn mutual_information(cfg: &ScatteringConfig, eps: f64) -> Result<f64> {
    let [d0, d1] = decision_regions(cfg)?;
    let (a0, b0, a1, b1) = (d0.base.left, d0.base.right, d1.base.left, d1.base.right);
    if d0.base.width() + d1.base.width() >= 2.0 * PI {
        return Err(GeometryError::EmptyDiamond("decision regions overlap".into()));
    }
    let disconnected = geodesic_length(a0, b0, eps)? + geodesic_length(a1, b1, eps)?;
    let connected = geodesic_length(b0, a1, eps)? + geodesic_length(b1, a0, eps)?;
    Ok((disconnected - connected).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn marginal_bases() {
        let [d0, d1] = decision_regions(&ScatteringConfig::marginal()).unwrap();
        assert!((d0.base.left.0 - FRAC_PI_4).abs() < 1e-12 && (d0.base.left.1 + FRAC_PI_4).abs() < 1e-12);
        assert!((d0.base.right.0 - FRAC_PI_4).abs() < 1e-12 && (d0.base.right.1 - FRAC_PI_4).abs() < 1e-12);
        assert!((d1.base.width() - PI / 2.0).abs() < 1e-12);
        assert!(mutual_information(&ScatteringConfig::marginal(), 1e-3).unwrap().abs() < 1e-12);
    }

    #[test]
    fn delayed_bases_widen() {
        let [d0, d1] = decision_regions(&ScatteringConfig::delayed(0.2)).unwrap();
        assert!((d0.base.width() - (PI / 2.0 + 0.2)).abs() < 1e-12);
        assert!(d0.base.right.1 < d1.base.left.1 && d1.base.right.1 < d0.base.left.1 + 2.0 * PI);
        // Closed form 4 artanh(sin δ) for the symmetric configuration.
        let i = mutual_information(&ScatteringConfig::delayed(0.2), 1e-3).unwrap();
        assert!((i - 4.0 * 0.2f64.sin().atanh()).abs() < 1e-12, "{i}");
    }

    #[test]
    fn null_degenerate_diamond() {
        // r₀ sits on the future light ray of c₀.
        let cfg = ScatteringConfig::new((0.0, 0.0), (0.0, PI), (PI / 2.0, PI / 2.0), (PI, -PI / 2.0));
        assert!(matches!(decision_regions(&cfg), Err(GeometryError::EmptyDiamond(_))));
    }

    #[test]
    fn cutoff_cancels() {
        let cfg = ScatteringConfig::new((0.0, 0.1), (0.15, 3.0), (3.5, 1.4), (3.4, 4.9));
        let vals: Vec<f64> = [1e-3, 1e-4, 1e-5].iter().map(|&e| mutual_information(&cfg, e).unwrap()).collect();
        assert!(vals[0] > 0.0);
        assert!((vals[0] - vals[1]).abs() < 1e-9 && (vals[0] - vals[2]).abs() < 1e-9);
    }
}
