use rand::Rng;
use rand_distr::StandardNormal;

use super::density::DensityOperator;
use super::kernel;
use super::TOL;
use crate::error::{Error, Result};
use crate::linalg::{dim_u128, is_prime, CMat, C64, ONE, ZERO};

/// Normalized pure state of `n` qudits of prime dimension `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    d: usize,
    n: usize,
    amps: Vec<C64>,
}

/// Full state vectors above this many entries are refused.
pub const STATE_CAP: u128 = 1 << 22;

pub(crate) fn check_d(d: usize) -> Result<()> {
    if is_prime(d) {
        Ok(())
    } else {
        Err(Error::NotPrime(d))
    }
}

pub(crate) fn check_cap(d: usize, n: usize, what: &str) -> Result<usize> {
    let dim = dim_u128(d, n);
    if dim > STATE_CAP {
        return Err(Error::CapExceeded { what: what.into(), dim, cap: STATE_CAP });
    }
    Ok(dim as usize)
}

impl DenseState {
    /// `|0…0⟩`.
    pub fn zero(d: usize, n: usize) -> Result<Self> {
        Self::basis(d, &vec![0; n])
    }

    /// Computational basis state from its digits.
    pub fn basis(d: usize, digits: &[usize]) -> Result<Self> {
        check_d(d)?;
        let n = digits.len();
        let dim = check_cap(d, n, "basis state")?;
        let mut idx = 0;
        for &k in digits {
            if k >= d {
                return Err(Error::range(format!("digit {k} for d = {d}")));
            }
            idx = idx * d + k;
        }
        let mut amps = vec![ZERO; dim];
        amps[idx] = ONE;
        Ok(Self { d, n, amps })
    }

    pub fn from_amplitudes(d: usize, n: usize, amps: Vec<C64>) -> Result<Self> {
        check_d(d)?;
        let dim = check_cap(d, n, "state")?;
        if amps.len() != dim {
            return Err(Error::dim(format!("{} amplitudes for {n} qudits of d = {d}", amps.len())));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::Invalid(format!("state norm {norm}")));
        }
        Ok(Self { d, n, amps })
    }

    /// Normalizes `amps`; fails on the zero vector.
    pub fn normalized(d: usize, n: usize, mut amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::Invalid("zero vector".into()));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::from_amplitudes(d, n, amps)
    }

    /// Haar-random pure state.
    pub fn random(d: usize, n: usize, rng: &mut impl Rng) -> Result<Self> {
        check_d(d)?;
        let dim = check_cap(d, n, "state")?;
        let amps = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(d, n, amps)
    }

    /// `Σ_j |j⟩|j⟩ / √(dⁿ)` on `2n` qudits, first block paired with second.
    pub fn max_entangled(d: usize, n: usize) -> Result<Self> {
        check_d(d)?;
        let dim = check_cap(d, n, "state")?;
        check_cap(d, 2 * n, "state")?;
        let mut amps = vec![ZERO; dim * dim];
        let s = 1.0 / (dim as f64).sqrt();
        for j in 0..dim {
            amps[j * dim + j] = C64::new(s, 0.0);
        }
        Ok(Self { d, n: 2 * n, amps })
    }

    pub(crate) fn from_raw(d: usize, n: usize, amps: Vec<C64>) -> Self {
        Self { d, n, amps }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &DenseState) -> Result<C64> {
        if self.d != other.d || self.n != other.n {
            return Err(Error::dim("inner product of different registers"));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &DenseState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn tensor(&self, other: &DenseState) -> Result<DenseState> {
        if self.d != other.d {
            return Err(Error::dim("tensor product of different d"));
        }
        check_cap(self.d, self.n + other.n, "tensor product")?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { d: self.d, n: self.n + other.n, amps })
    }

    pub fn apply_gate(&self, gate: &CMat, targets: &[usize]) -> Result<DenseState> {
        let mut out = self.clone();
        out.apply_gate_mut(gate, targets)?;
        Ok(out)
    }

    pub fn apply_gate_mut(&mut self, gate: &CMat, targets: &[usize]) -> Result<()> {
        kernel::apply_matrix(&mut self.amps, self.d, self.n, gate, targets)
    }

    /// Reorder qudits so that new qudit `i` is old qudit `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Result<DenseState> {
        if order.len() != self.n {
            return Err(Error::dim("permutation length"));
        }
        let m = kernel::split_matrix(&self.amps, self.d, self.n, order)?;
        Ok(Self { d: self.d, n: self.n, amps: m.column(0).iter().copied().collect() })
    }

    pub fn to_density(&self) -> DensityOperator {
        let v = CMat::from_column_slice(self.dim(), 1, &self.amps);
        DensityOperator::from_raw(self.d, self.n, &v * v.adjoint())
    }

    /// Reduced state on `keep` (in the given order), computed without forming |ψ⟩⟨ψ|.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityOperator> {
        let m = kernel::split_matrix(&self.amps, self.d, self.n, keep)?;
        Ok(DensityOperator::from_raw(self.d, keep.len(), &m * m.adjoint()))
    }

    /// Amplitudes as a column matrix.
    pub fn column(&self) -> CMat {
        CMat::from_column_slice(self.dim(), 1, &self.amps)
    }
}

/// Free-function form of [`DenseState::apply_gate`].
pub fn apply_gate(state: &DenseState, gate: &CMat, targets: &[usize]) -> Result<DenseState> {
    state.apply_gate(gate, targets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::gates;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn x_flips_qubit() {
        let s = DenseState::zero(2, 1).unwrap().apply_gate(&gates::x(2), &[0]).unwrap();
        assert_eq!(s, DenseState::basis(2, &[1]).unwrap());
    }

    #[test]
    fn qutrit_hadamard_on_zero() {
        let s = DenseState::zero(3, 1).unwrap().apply_gate(&gates::h(3), &[0]).unwrap();
        for a in s.amplitudes() {
            assert!((a - C64::new(1.0 / 3f64.sqrt(), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn qutrit_cnot_adds_control() {
        let s = DenseState::basis(3, &[1, 1]).unwrap().apply_gate(&gates::cnot(3), &[0, 1]).unwrap();
        assert_eq!(s, DenseState::basis(3, &[1, 2]).unwrap());
        // Reversed targets: qudit 1 controls qudit 0.
        let s = DenseState::basis(3, &[1, 2]).unwrap().apply_gate(&gates::cnot(3), &[1, 0]).unwrap();
        assert_eq!(s, DenseState::basis(3, &[0, 2]).unwrap());
    }

    #[test]
    fn gate_errors() {
        let s = DenseState::zero(3, 2).unwrap();
        assert!(matches!(s.apply_gate(&gates::x(2), &[0]), Err(Error::DimensionMismatch(_))));
        assert!(matches!(s.apply_gate(&gates::x(3), &[2]), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(s.apply_gate(&gates::cnot(3), &[1, 1]), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(DenseState::zero(4, 1), Err(Error::NotPrime(4))));
    }

    #[test]
    fn permute_reorders_digits() {
        let s = DenseState::basis(3, &[0, 1, 2]).unwrap();
        assert_eq!(s.permute(&[2, 0, 1]).unwrap(), DenseState::basis(3, &[2, 0, 1]).unwrap());
    }

    #[test]
    fn random_state_is_normalized_and_seeded() {
        let a = DenseState::random(5, 2, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = DenseState::random(5, 2, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }
}
