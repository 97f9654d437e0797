//! Generalized Pauli (Weyl) words `ζᵖ ⊗_j X^{a_j} Z^{b_j}`.
//!
//! The phase unit ζ is `i` for qubits (phases in Z₄) and `ω = e^{2πi/d}` for odd
//! d (phases in Z_d). In both cases ω = ζ^k with k = 2 for qubits and 1 otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{omega, CMat, C64};
use crate::qudit::gates;

/// Order of the phase group.
pub fn phase_order(d: usize) -> usize {
    if d == 2 {
        4
    } else {
        d
    }
}

/// Number of ζ units in one factor of ω.
pub fn omega_units(d: usize) -> usize {
    if d == 2 {
        2
    } else {
        1
    }
}

pub fn zeta(d: usize, p: usize) -> C64 {
    if d == 2 {
        C64::new(0.0, 1.0).powu((p % 4) as u32)
    } else {
        omega(d, p as i64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliWord {
    d: usize,
    x: Vec<usize>,
    z: Vec<usize>,
    phase: usize,
}

impl PauliWord {
    pub fn new(d: usize, x: Vec<usize>, z: Vec<usize>, phase: usize) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::dim("x and z exponent vectors differ in length"));
        }
        let x = x.into_iter().map(|v| v % d).collect();
        let z = z.into_iter().map(|v| v % d).collect();
        Ok(Self { d, x, z, phase: phase % phase_order(d) })
    }

    pub fn identity(d: usize, n: usize) -> Self {
        Self { d, x: vec![0; n], z: vec![0; n], phase: 0 }
    }

    /// `XᵃZᵇ` on qudit `q` of `n`.
    pub fn single(d: usize, n: usize, q: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(d, n);
        p.x[q] = a % d;
        p.z[q] = b % d;
        p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[usize] {
        &self.x
    }

    pub fn z(&self) -> &[usize] {
        &self.z
    }

    pub fn phase(&self) -> usize {
        self.phase
    }

    pub fn with_phase(mut self, p: usize) -> Self {
        self.phase = p % phase_order(self.d);
        self
    }

    fn shift_phase(&mut self, units: i64) {
        let ord = phase_order(self.d) as i64;
        self.phase = (self.phase as i64 + units).rem_euclid(ord) as usize;
    }

    fn check(&self, other: &PauliWord) -> Result<()> {
        if self.d != other.d || self.n() != other.n() {
            return Err(Error::dim("Pauli words on different registers"));
        }
        Ok(())
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &PauliWord) -> Result<PauliWord> {
        self.check(other)?;
        let d = self.d;
        let mut out = self.clone();
        let mut cross = 0usize;
        for j in 0..self.n() {
            // Z^b X^c = ω^{bc} X^c Z^b
            cross += self.z[j] * other.x[j];
            out.x[j] = (self.x[j] + other.x[j]) % d;
            out.z[j] = (self.z[j] + other.z[j]) % d;
        }
        out.shift_phase((other.phase + omega_units(d) * (cross % d)) as i64);
        Ok(out)
    }

    pub fn pow(&self, k: usize) -> PauliWord {
        let mut out = Self::identity(self.d, self.n());
        for _ in 0..k {
            out = out.mul(self).expect("same register");
        }
        out
    }

    pub fn adjoint(&self) -> PauliWord {
        let d = self.d;
        let ab: usize = self.x.iter().zip(&self.z).map(|(a, b)| a * b).sum();
        let mut out = Self {
            d,
            x: self.x.iter().map(|a| (d - a) % d).collect(),
            z: self.z.iter().map(|b| (d - b) % d).collect(),
            phase: 0,
        };
        out.shift_phase(-(self.phase as i64) + (omega_units(d) * (ab % d)) as i64);
        out
    }

    /// Matrix transpose in the computational basis.
    pub fn transpose(&self) -> PauliWord {
        let d = self.d;
        let ab: usize = self.x.iter().zip(&self.z).map(|(a, b)| a * b).sum();
        let mut out = Self { d, x: self.x.iter().map(|a| (d - a) % d).collect(), z: self.z.clone(), phase: self.phase };
        out.shift_phase(-((omega_units(d) * (ab % d)) as i64));
        out
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> PauliWord {
        let d = self.d;
        let mut out = Self { d, x: self.x.clone(), z: self.z.iter().map(|b| (d - b) % d).collect(), phase: 0 };
        out.shift_phase(-(self.phase as i64));
        out
    }

    /// λ with `P Q = ω^λ Q P`.
    pub fn symplectic(&self, other: &PauliWord) -> Result<usize> {
        self.check(other)?;
        let d = self.d;
        let mut s = 0i64;
        for j in 0..self.n() {
            s += (self.z[j] * other.x[j]) as i64 - (self.x[j] * other.z[j]) as i64;
        }
        Ok(s.rem_euclid(d as i64) as usize)
    }

    pub fn commutes_with(&self, other: &PauliWord) -> Result<bool> {
        Ok(self.symplectic(other)? == 0)
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&v| v == 0)
    }

    pub fn eq_up_to_phase(&self, other: &PauliWord) -> bool {
        self.d == other.d && self.x == other.x && self.z == other.z
    }

    /// Factor on the listed qudits (phase dropped).
    pub fn restrict(&self, qudits: &[usize]) -> PauliWord {
        Self {
            d: self.d,
            x: qudits.iter().map(|&q| self.x[q]).collect(),
            z: qudits.iter().map(|&q| self.z[q]).collect(),
            phase: 0,
        }
    }

    /// Place this word on `positions` of an `n`-qudit register.
    pub fn embed(&self, n: usize, positions: &[usize]) -> Result<PauliWord> {
        if positions.len() != self.n() || positions.iter().any(|&p| p >= n) {
            return Err(Error::range("embedding positions"));
        }
        let mut out = Self::identity(self.d, n);
        for (j, &p) in positions.iter().enumerate() {
            out.x[p] = self.x[j];
            out.z[p] = self.z[j];
        }
        out.phase = self.phase;
        Ok(out)
    }

    /// Single-qudit factor `X^{a_q} Z^{b_q}` as a dense matrix.
    pub fn factor_matrix(&self, q: usize) -> CMat {
        gates::weyl(self.d, self.x[q], self.z[q])
    }

    pub fn dense(&self) -> CMat {
        let mut m = CMat::identity(1, 1) * zeta(self.d, self.phase);
        for q in 0..self.n() {
            m = m.kronecker(&self.factor_matrix(q));
        }
        m
    }
}

impl std::fmt::Display for PauliWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let unit = if self.d == 2 { "i" } else { "ω" };
        write!(f, "{unit}^{}", self.phase)?;
        for q in 0..self.n() {
            write!(f, " X{}Z{}", self.x[q], self.z[q])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frob_dist;
    use proptest::prelude::*;

    fn word(d: usize, n: usize) -> impl Strategy<Value = PauliWord> {
        (
            proptest::collection::vec(0..d, n),
            proptest::collection::vec(0..d, n),
            0..phase_order(d),
        )
            .prop_map(move |(x, z, p)| PauliWord::new(d, x, z, p).unwrap())
    }

    fn pair(n: usize) -> impl Strategy<Value = (PauliWord, PauliWord)> {
        prop_oneof![Just(2usize), Just(3usize), Just(5usize)].prop_flat_map(move |d| (word(d, n), word(d, n)))
    }

    proptest! {
        #[test]
        fn product_matches_dense((p, q) in pair(2)) {
            let pq = p.mul(&q).unwrap();
            prop_assert!(frob_dist(&pq.dense(), &(p.dense() * q.dense())) < 1e-9);
        }

        #[test]
        fn adjoint_transpose_conj_match_dense((p, _q) in pair(2)) {
            prop_assert!(frob_dist(&p.adjoint().dense(), &p.dense().adjoint()) < 1e-9);
            prop_assert!(frob_dist(&p.transpose().dense(), &p.dense().transpose()) < 1e-9);
            prop_assert!(frob_dist(&p.conj().dense(), &p.dense().conjugate()) < 1e-9);
        }

        #[test]
        fn symplectic_form_is_the_commutation_phase((p, q) in pair(3)) {
            let lam = p.symplectic(&q).unwrap();
            let lhs = p.dense() * q.dense();
            let rhs = q.dense() * p.dense() * omega(p.d(), lam as i64);
            prop_assert!(frob_dist(&lhs, &rhs) < 1e-9);
        }

        #[test]
        fn word_times_adjoint_is_identity((p, _q) in pair(3)) {
            let e = p.mul(&p.adjoint()).unwrap();
            prop_assert_eq!(e, PauliWord::identity(p.d(), p.n()));
        }
    }

    #[test]
    fn qubit_y_phase() {
        // XZ = -iY, so i·XZ = Y.
        let y = PauliWord::new(2, vec![1], vec![1], 1).unwrap();
        let dense = y.dense();
        assert!((dense[(0, 1)] - C64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((dense[(1, 0)] - C64::new(0.0, 1.0)).norm() < 1e-12);
    }
}
