//! The scattering region `J⁺(c₀) ∩ J⁺(c₁) ∩ J⁻(r₀) ∩ J⁻(r₁)` and its ridge.
//!
//! At disk point `w` the region occupies the times between the later arrival
//! from `c₀, c₁` and the earlier deadline for `r₀, r₁`, so existence reduces to
//! maximising `margin(w) = min deadline − max arrival` over the disk.

use serde::{Deserialize, Serialize};

use crate::causal::{dot, light_time, wrap, BoundaryPoint, BulkPoint, Vec4};
use crate::{GeometryError, Result, TOL};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringConfig {
    pub c0: BoundaryPoint,
    pub c1: BoundaryPoint,
    pub r0: BoundaryPoint,
    pub r1: BoundaryPoint,
}

impl ScatteringConfig {
    pub fn new(c0: (f64, f64), c1: (f64, f64), r0: (f64, f64), r1: (f64, f64)) -> Self {
        let b = |p: (f64, f64)| BoundaryPoint::new(p.0, p.1);
        ScatteringConfig { c0: b(c0), c1: b(c1), r0: b(r0), r1: b(r1) }
    }

    /// Inputs at `θ = 0, π`, outputs at `θ = ±π/2` and time `π + delay`.
    pub fn delayed(delay: f64) -> Self {
        use std::f64::consts::{FRAC_PI_2, PI};
        Self::new((0.0, 0.0), (0.0, PI), (PI + delay, FRAC_PI_2), (PI + delay, -FRAC_PI_2))
    }

    /// Light from the inputs meets at the centre exactly when it must leave.
    pub fn marginal() -> Self {
        Self::delayed(0.0)
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "marginal" => Some(Self::marginal()),
            "delayed" => Some(Self::delayed(0.2)),
            _ => name.strip_prefix("delay-").and_then(|d| d.parse().ok()).map(Self::delayed),
        }
    }

    pub fn map(&self, f: impl Fn(&BoundaryPoint) -> BoundaryPoint) -> Self {
        ScatteringConfig { c0: f(&self.c0), c1: f(&self.c1), r0: f(&self.r0), r1: f(&self.r1) }
    }

    pub fn arrival(&self, w: [f64; 2]) -> f64 {
        (self.c0.t + light_time(self.c0.direction(), w)).max(self.c1.t + light_time(self.c1.direction(), w))
    }

    pub fn deadline(&self, w: [f64; 2]) -> f64 {
        (self.r0.t - light_time(self.r0.direction(), w)).min(self.r1.t - light_time(self.r1.direction(), w))
    }

    pub fn margin(&self, w: [f64; 2]) -> f64 {
        self.deadline(w) - self.arrival(w)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegionSearch {
    pub nonempty: bool,
    /// Largest time window over the disk; negative when the region is empty.
    pub margin: f64,
    /// A point of the region (middle of the widest window).
    pub witness: BulkPoint,
}

const GRID: usize = 161;
const EDGE: f64 = 1.0 - 1e-12;

fn clamp_disk(w: [f64; 2]) -> [f64; 2] {
    let r = w[0].hypot(w[1]);
    if r > EDGE {
        [w[0] * EDGE / r, w[1] * EDGE / r]
    } else {
        w
    }
}

/// Grid over the disk, then compass search from the best few grid points down
/// to step 1e-13.
pub fn scattering_region(cfg: &ScatteringConfig) -> RegionSearch {
    let h = 2.0 / (GRID - 1) as f64;
    let mut cands: Vec<(f64, [f64; 2])> = Vec::new();
    for i in 0..GRID {
        for j in 0..GRID {
            let w = [-1.0 + i as f64 * h, -1.0 + j as f64 * h];
            if w[0].hypot(w[1]) <= EDGE {
                cands.push((cfg.margin(w), w));
            }
        }
    }
    cands.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = cands[0];
    for &(m0, w0) in cands.iter().take(8) {
        let (mut m, mut w, mut step) = (m0, w0, h);
        while step > 1e-13 {
            let mut moved = false;
            for d in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]] {
                let v = clamp_disk([w[0] + step * d[0], w[1] + step * d[1]]);
                let mv = cfg.margin(v);
                if mv > m {
                    (m, w, moved) = (mv, v, true);
                }
            }
            if !moved {
                step /= 2.0;
            }
        }
        if m > best.0 {
            best = (m, w);
        }
    }
    let (margin, w) = best;
    let t = 0.5 * (cfg.arrival(w) + cfg.deadline(w));
    RegionSearch { nonempty: margin >= -TOL, margin, witness: BulkPoint::from_disk(t, w) }
}

pub fn scattering_region_nonempty(cfg: &ScatteringConfig) -> bool {
    scattering_region(cfg).nonempty
}

#[derive(Clone, Debug, Serialize)]
pub struct Ridge {
    pub points: Vec<BulkPoint>,
    pub length: f64,
}

/// Unit-speed hyperbola `cosh s A + sinh s B` cut out of the quadric by the
/// plane orthogonal to both input null rays.
struct Section {
    a: Vec4,
    b: Vec4,
}

impl Section {
    fn new(p0: &Vec4, p1: &Vec4) -> Result<Self> {
        let k = dot(p0, p1);
        if k.abs() < 1e-12 {
            return Err(GeometryError::EmptyRegion("inputs are null separated".into()));
        }
        let proj = |v: Vec4| -> Vec4 {
            let (a, b) = (dot(&v, p1) / k, dot(&v, p0) / k);
            std::array::from_fn(|i| v[i] - a * p0[i] - b * p1[i])
        };
        let basis: Vec<Vec4> = (0..4).map(|i| proj(std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }))).collect();
        let mut pick = (0, 1, 0.0f64);
        for i in 0..4 {
            for j in i + 1..4 {
                let g = dot(&basis[i], &basis[i]) * dot(&basis[j], &basis[j]) - dot(&basis[i], &basis[j]).powi(2);
                if g.abs() > pick.2.abs() {
                    pick = (i, j, g);
                }
            }
        }
        if pick.2 >= -1e-12 {
            return Err(GeometryError::EmptyRegion("ridge plane is not Lorentzian".into()));
        }
        let (v1, v2) = (basis[pick.0], basis[pick.1]);
        let (a, b, c) = (dot(&v1, &v1), dot(&v1, &v2), dot(&v2, &v2));
        let disc = (((a - c) / 2.0).powi(2) + b * b).sqrt();
        let vec = |lam: f64| -> Vec4 {
            let (q1, q2) = if (lam - c).abs() + b.abs() > (lam - a).abs() + b.abs() { (lam - c, b) } else { (b, lam - a) };
            let n = q1.hypot(q2);
            let s = lam.abs().sqrt() * n;
            std::array::from_fn(|i| (q1 * v1[i] + q2 * v2[i]) / s)
        };
        Ok(Section { a: vec((a + c) / 2.0 - disc), b: vec((a + c) / 2.0 + disc) })
    }

    fn at(&self, branch: f64, s: f64) -> Vec4 {
        let (ch, sh) = (s.cosh(), s.sinh());
        std::array::from_fn(|i| branch * ch * self.a[i] + sh * self.b[i])
    }
}

const SPAN: f64 = 15.0;
const SAMPLES: usize = 6001;

/// Window left above the ridge at parameter `s`, or `None` off the ridge
/// (the plane also holds points where the light cones meet mod 2π only).
fn ridge_window(cfg: &ScatteringConfig, x: &Vec4) -> Option<(f64, BulkPoint)> {
    let p = BulkPoint::from_embedding(x, cfg.c0.t + 1.0).ok()?;
    let w = p.disk();
    let t0 = cfg.c0.t + light_time(cfg.c0.direction(), w);
    let t1 = cfg.c1.t + light_time(cfg.c1.direction(), w);
    if (t0 - t1).abs() > 1e-7 || wrap(p.t - t0).abs() > 1e-7 {
        return None;
    }
    Some((cfg.deadline(w) - t0, BulkPoint::new(t0, p.rho, p.theta)))
}

/// `∂J⁺(c₀) ∩ ∂J⁺(c₁)` clipped to the pasts of both outputs, sampled at
/// `resolution` points; length is the sum of embedding-space chords.
pub fn ridge_curve(cfg: &ScatteringConfig, resolution: usize) -> Result<Ridge> {
    let sec = Section::new(&cfg.c0.null_ray(), &cfg.c1.null_ray())?;
    let h = |branch: f64, s: f64| ridge_window(cfg, &sec.at(branch, s)).map_or(f64::NEG_INFINITY, |r| r.0);
    let ds = 2.0 * SPAN / (SAMPLES - 1) as f64;
    let mut best = (f64::NEG_INFINITY, 1.0, 0.0);
    for branch in [1.0, -1.0] {
        for k in 0..SAMPLES {
            let s = -SPAN + k as f64 * ds;
            let v = h(branch, s);
            if v > best.0 {
                best = (v, branch, s);
            }
        }
    }
    let (top, branch, s0) = best;
    if top < -TOL {
        return Err(GeometryError::EmptyRegion(format!("ridge misses the output pasts by {:.3e}", -top)));
    }
    // Golden-section search for the peak of the window.
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (s0 - ds, s0 + ds);
    for _ in 0..200 {
        let (m1, m2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if h(branch, m1) < h(branch, m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let peak = 0.5 * (lo + hi);
    let end = |dir: f64| -> Result<f64> {
        let mut out = peak;
        while h(branch, out) >= 0.0 {
            out += dir * ds;
            if (out - peak).abs() > 2.0 * SPAN {
                return Err(GeometryError::EmptyRegion("ridge is unbounded".into()));
            }
        }
        let mut inside = peak;
        for _ in 0..200 {
            let mid = 0.5 * (inside + out);
            if h(branch, mid) >= 0.0 {
                inside = mid;
            } else {
                out = mid;
            }
        }
        Ok(inside)
    };
    if h(branch, peak) <= 0.0 {
        let (_, p) = ridge_window(cfg, &sec.at(branch, peak)).ok_or_else(|| GeometryError::EmptyRegion("lost the ridge".into()))?;
        return Ok(Ridge { points: vec![p], length: 0.0 });
    }
    let (sa, sb) = (end(-1.0)?, end(1.0)?);
    let n = resolution.max(2);
    let xs: Vec<Vec4> = (0..n).map(|i| sec.at(branch, sa + (sb - sa) * i as f64 / (n - 1) as f64)).collect();
    let length = xs
        .windows(2)
        .map(|w| {
            let d: Vec4 = std::array::from_fn(|i| w[1][i] - w[0][i]);
            dot(&d, &d).max(0.0).sqrt()
        })
        .sum();
    let points = xs
        .iter()
        .map(|x| ridge_window(cfg, x).map(|r| r.1).ok_or_else(|| GeometryError::EmptyRegion("lost the ridge".into())))
        .collect::<Result<_>>()?;
    Ok(Ridge { points, length })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal::{bulk_causal, Causal};

    #[test]
    fn presets_decide_existence() {
        let on = scattering_region(&ScatteringConfig::delayed(0.2));
        assert!(on.nonempty && (on.margin - 0.2).abs() < 1e-9, "{on:?}");
        let off = scattering_region(&ScatteringConfig::delayed(-0.2));
        assert!(!off.nonempty && (off.margin + 0.2).abs() < 1e-9);
        let m = scattering_region(&ScatteringConfig::marginal());
        assert!(m.nonempty && m.margin.abs() < 1e-9);
    }

    #[test]
    fn witness_satisfies_all_four_cones() {
        let cfg = ScatteringConfig::delayed(0.3);
        let w = scattering_region(&cfg).witness;
        for c in [cfg.c0, cfg.c1] {
            assert_eq!(bulk_causal(&c, &w), Causal::TimelikeFuture);
        }
        for r in [cfg.r0, cfg.r1] {
            // w is in the past of r iff r is in the future of w; check by symmetry in time.
            let flipped = BoundaryPoint::new(-r.t, r.theta);
            assert_eq!(bulk_causal(&flipped, &BulkPoint::new(-w.t, w.rho, w.theta)), Causal::TimelikeFuture);
        }
    }

    #[test]
    fn symmetric_ridge_is_a_diameter_segment() {
        for delay in [0.05, 0.2, 0.4] {
            let r = ridge_curve(&ScatteringConfig::delayed(delay), 1 << 12).unwrap();
            // Ridge sits at t = π/2 on the axis θ = ±π/2, out to tanh ρ = sin(delay).
            let exact = 2.0 * delay.sin().atanh();
            assert!((r.length - exact).abs() < 1e-8, "{delay}: {} vs {exact}", r.length);
            for p in &r.points {
                assert!((p.t - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
            }
        }
        let m = ridge_curve(&ScatteringConfig::marginal(), 1 << 12).unwrap();
        assert!(m.length < 1e-9);
        assert!(matches!(ridge_curve(&ScatteringConfig::delayed(-0.1), 64), Err(GeometryError::EmptyRegion(_))));
    }

    #[test]
    fn ridge_length_converges() {
        let cfg = ScatteringConfig::new((0.0, 0.1), (0.15, 3.0), (3.5, 1.4), (3.4, 4.9));
        let a = ridge_curve(&cfg, 1 << 11).unwrap().length;
        let b = ridge_curve(&cfg, 1 << 12).unwrap().length;
        assert!(a > 0.0 && ((a - b) / b).abs() < 1e-5, "{a} {b}");
    }
}
