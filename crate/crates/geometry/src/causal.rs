//! Points of global AdS₃ (unit radius) and their causal relations.
//!
//! Embedding space is R^{2,2} with `X·Y = −X₀Y₀ − X₁Y₁ + X₂Y₂ + X₃Y₃` and the
//! bulk is the quadric `X·X = −1`:
//! `X = (cosh ρ cos t, cosh ρ sin t, sinh ρ cos θ, sinh ρ sin θ)`.
//! The embedding only sees `t mod 2π`; points here carry the lifted time.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::{GeometryError, Result, TOL};

pub type Vec4 = [f64; 4];

pub fn dot(a: &Vec4, b: &Vec4) -> f64 {
    -a[0] * b[0] - a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Angle reduced to `(−π, π]`.
pub fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub t: f64,
    pub theta: f64,
}

impl BoundaryPoint {
    pub fn new(t: f64, theta: f64) -> Self {
        BoundaryPoint { t, theta: theta.rem_euclid(TAU) }
    }

    /// Null ray of the point, signed so that `X·P < 0` exactly when `X` is
    /// timelike to it (for `|Δt| < π`).
    pub fn null_ray(&self) -> Vec4 {
        [-self.t.cos(), -self.t.sin(), -self.theta.cos(), -self.theta.sin()]
    }

    pub fn direction(&self) -> [f64; 2] {
        [self.theta.cos(), self.theta.sin()]
    }

    pub fn shifted(&self, dt: f64) -> Self {
        BoundaryPoint::new(self.t + dt, self.theta)
    }

    pub fn reflected(&self) -> Self {
        BoundaryPoint::new(self.t, -self.theta)
    }
}

/// Bulk point in global coordinates. `rho` may be infinite for a boundary limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BulkPoint {
    pub t: f64,
    pub rho: f64,
    pub theta: f64,
}

impl BulkPoint {
    pub fn new(t: f64, rho: f64, theta: f64) -> Self {
        BulkPoint { t, rho, theta: theta.rem_euclid(TAU) }
    }

    pub fn embedding(&self) -> Vec4 {
        let (c, s) = (self.rho.cosh(), self.rho.sinh());
        [c * self.t.cos(), c * self.t.sin(), s * self.theta.cos(), s * self.theta.sin()]
    }

    /// Reads a point off the quadric, lifting its time to the sheet nearest `near_t`.
    pub fn from_embedding(x: &Vec4, near_t: f64) -> Result<Self> {
        let scale = x.iter().map(|v| v * v).sum::<f64>().max(1.0);
        if (dot(x, x) + 1.0).abs() > 1e-9 * scale {
            return Err(GeometryError::NotOnQuadric(dot(x, x)));
        }
        let t0 = x[1].atan2(x[0]);
        let t = t0 + TAU * ((near_t - t0) / TAU).round();
        Ok(BulkPoint::new(t, x[2].hypot(x[3]).asinh(), x[3].atan2(x[2])))
    }

    /// Position in the unit disk, `tanh ρ (cos θ, sin θ)`.
    pub fn disk(&self) -> [f64; 2] {
        let r = self.rho.tanh();
        [r * self.theta.cos(), r * self.theta.sin()]
    }

    pub fn from_disk(t: f64, w: [f64; 2]) -> Self {
        let r = w[0].hypot(w[1]);
        BulkPoint::new(t, r.atanh(), w[1].atan2(w[0]))
    }
}

/// Time for light from the boundary direction `e` to reach disk point `w`.
pub fn light_time(e: [f64; 2], w: [f64; 2]) -> f64 {
    (e[0] * w[0] + e[1] * w[1]).clamp(-1.0, 1.0).acos()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Causal {
    TimelikeFuture,
    Null,
    Spacelike,
    Past,
}

/// Relation of `x` to the boundary point `p`. The future light cone of `p`
/// reaches `(ρ, φ)` at `Δt = arccos(tanh ρ cos φ) ∈ [0, π]`; on the universal
/// cover that is the whole story. Null means on the future cone within 1e-9;
/// anything on or inside the past cone is `Past`.
pub fn bulk_causal(p: &BoundaryPoint, x: &BulkPoint) -> Causal {
    let dt = x.t - p.t;
    let tn = light_time(p.direction(), x.disk());
    if (dt - tn).abs() <= TOL {
        Causal::Null
    } else if dt > tn {
        Causal::TimelikeFuture
    } else if dt <= -tn + TOL {
        Causal::Past
    } else {
        Causal::Spacelike
    }
}
