//! Dense matrices of the qudit Clifford generators.
//!
//! `X|j⟩ = |j+1⟩`, `Z|j⟩ = ωʲ|j⟩`, `H|i⟩ = d^{-1/2} Σ_m ω^{mi}|m⟩`,
//! `CNOT|i,j⟩ = |i,i+j⟩`. For odd d, `S|i⟩ = ω^{i(i+1)/2}|i⟩`; for d = 2 that
//! formula collapses to Z, so the qubit phase gate `diag(1, i)` is used instead.

use crate::linalg::{omega, CMat, C64, ONE};

pub fn x(d: usize) -> CMat {
    CMat::from_fn(d, d, |i, j| if i == (j + 1) % d { ONE } else { C64::new(0.0, 0.0) })
}

pub fn z(d: usize) -> CMat {
    CMat::from_fn(d, d, |i, j| if i == j { omega(d, i as i64) } else { C64::new(0.0, 0.0) })
}

pub fn h(d: usize) -> CMat {
    let s = 1.0 / (d as f64).sqrt();
    CMat::from_fn(d, d, |m, i| omega(d, (m * i) as i64) * s)
}

pub fn s(d: usize) -> CMat {
    if d == 2 {
        let mut m = CMat::identity(2, 2);
        m[(1, 1)] = C64::new(0.0, 1.0);
        return m;
    }
    CMat::from_fn(d, d, |i, j| {
        if i == j {
            omega(d, (i * (i + 1) / 2) as i64)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Control is the first (more significant) qudit.
pub fn cnot(d: usize) -> CMat {
    let n = d * d;
    CMat::from_fn(n, n, |r, c| {
        let (i, j) = (c / d, c % d);
        if r == i * d + (i + j) % d {
            ONE
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn swap(d: usize) -> CMat {
    let n = d * d;
    CMat::from_fn(n, n, |r, c| if r == (c % d) * d + c / d { ONE } else { C64::new(0.0, 0.0) })
}

/// `X^a Z^b`.
pub fn weyl(d: usize, a: usize, b: usize) -> CMat {
    crate::linalg::mat_pow(&x(d), (a % d) as u32) * crate::linalg::mat_pow(&z(d), (b % d) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frob_dist, is_unitary};

    #[test]
    fn generators_are_unitary() {
        for d in [2, 3, 5] {
            for g in [x(d), z(d), h(d), s(d), cnot(d), swap(d)] {
                assert!(is_unitary(&g, 1e-12));
            }
        }
    }

    #[test]
    fn weyl_commutation() {
        for d in [2, 3, 5] {
            let lhs = z(d) * x(d);
            let rhs = x(d) * z(d) * omega(d, 1);
            assert!(frob_dist(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn hadamard_has_order_four() {
        for d in [2, 3, 5] {
            let h4 = crate::linalg::mat_pow(&h(d), 4);
            assert!(frob_dist(&h4, &CMat::identity(d, d)) < 1e-12);
        }
    }
}
