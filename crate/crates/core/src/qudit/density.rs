use serde::Serialize;

use super::kernel;
use super::state::check_d;
use super::TOL;
use crate::error::{Error, Result};
use crate::linalg::{self, max_abs, CMat, C64, ZERO};

/// Density operator on `n` qudits of dimension `d`.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    d: usize,
    n: usize,
    m: CMat,
}

impl DensityOperator {
    /// Validated constructor: Hermitian, unit trace, no eigenvalue below −1e-9.
    pub fn from_matrix(d: usize, n: usize, m: CMat) -> Result<Self> {
        check_d(d)?;
        let dim = d.pow(n as u32);
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::dim(format!("{}x{} matrix for dimension {dim}", m.nrows(), m.ncols())));
        }
        if max_abs(&(&m - m.adjoint())) > TOL {
            return Err(Error::Invalid("not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TOL {
            return Err(Error::Invalid(format!("trace {tr}")));
        }
        let min = linalg::hermitian_eigenvalues(&m).into_iter().fold(f64::INFINITY, f64::min);
        if min < -TOL {
            return Err(Error::Invalid(format!("negative eigenvalue {min}")));
        }
        Ok(Self { d, n, m })
    }

    pub(crate) fn from_raw(d: usize, n: usize, m: CMat) -> Self {
        Self { d, n, m }
    }

    pub fn maximally_mixed(d: usize, n: usize) -> Result<Self> {
        check_d(d)?;
        let dim = d.pow(n as u32);
        Ok(Self { d, n, m: CMat::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0) })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        if self.d != other.d {
            return Err(Error::dim("tensor product of different d"));
        }
        Ok(Self { d: self.d, n: self.n + other.n, m: self.m.kronecker(&other.m) })
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        kernel::check_targets(self.n, keep)?;
        let st = kernel::strides(self.d, self.n);
        let rest: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let row = kernel::digit_offsets(self.d, keep.iter().map(|&q| st[q]));
        let col = kernel::digit_offsets(self.d, rest.iter().map(|&q| st[q]));
        let k = row.len();
        let mut out = CMat::from_element(k, k, ZERO);
        for i in 0..k {
            for j in 0..k {
                let mut acc = ZERO;
                for &r in &col {
                    acc += self.m[(row[i] + r, row[j] + r)];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(Self { d: self.d, n: keep.len(), m: out })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.m)
    }

    pub fn entropy(&self) -> Entropy {
        Entropy::from_nats(
            self.eigenvalues().into_iter().filter(|&p| p > 1e-15).map(|p| -p * p.ln()).sum(),
        )
    }

    /// `⟨ψ|ρ|ψ⟩` for a pure state on the same register.
    pub fn expectation(&self, psi: &super::DenseState) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::dim("expectation value register"));
        }
        let v = psi.column();
        Ok((v.adjoint() * &self.m * v)[(0, 0)].re)
    }
}

/// An entropic quantity with both units spelled out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Entropy {
    pub nats: f64,
    /// Base-2 units (a maximally entangled qubit pair carries 2 of these in I(L:R)).
    pub ebits: f64,
}

impl Entropy {
    pub fn from_nats(nats: f64) -> Self {
        Self { nats, ebits: nats / std::f64::consts::LN_2 }
    }
}

pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    rho.partial_trace(keep)
}

fn same_register(a: &DensityOperator, b: &DensityOperator) -> Result<()> {
    if a.d != b.d || a.dim() != b.dim() {
        return Err(Error::dim(format!("{} vs {} dimensional operators", a.dim(), b.dim())));
    }
    Ok(())
}

/// Uhlmann fidelity `(tr√(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_register(rho, sigma)?;
    let sr = linalg::psd_sqrt(&rho.m);
    let inner = &sr * &sigma.m * &sr;
    let f: f64 = linalg::hermitian_eigenvalues(&inner).into_iter().map(|x| x.max(0.0).sqrt()).sum();
    Ok((f * f).clamp(0.0, 1.0))
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_register(rho, sigma)?;
    Ok(linalg::half_trace_norm(&(&rho.m - &sigma.m)))
}

/// `I(A:B) = S(A) + S(B) − S(AB)` for a bipartition of the qudits of `rho`.
pub fn mutual_information(rho: &DensityOperator, a: &[usize], b: &[usize]) -> Result<Entropy> {
    let mut ab: Vec<usize> = a.iter().chain(b).copied().collect();
    ab.sort_unstable();
    let sa = rho.partial_trace(a)?.entropy().nats;
    let sb = rho.partial_trace(b)?.entropy().nats;
    let sab = rho.partial_trace(&ab)?.entropy().nats;
    Ok(Entropy::from_nats(sa + sb - sab))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::DenseState;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn half_of_bell_pair_is_mixed() {
        let phi = DenseState::max_entangled(2, 1).unwrap().to_density();
        let r = phi.partial_trace(&[0]).unwrap();
        let mm = DensityOperator::maximally_mixed(2, 1).unwrap();
        assert!(trace_distance(&r, &mm).unwrap() < 1e-12);
    }

    #[test]
    fn product_factor_survives() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = DenseState::random(3, 1, &mut rng).unwrap().to_density();
        let b = DenseState::random(3, 1, &mut rng).unwrap().to_density();
        let ab = a.tensor(&b).unwrap();
        assert!(trace_distance(&ab.partial_trace(&[0]).unwrap(), &a).unwrap() < 1e-12);
    }

    /// Index-summation oracle written independently of the stride machinery.
    #[test]
    fn partial_trace_matches_brute_force() {
        let psi = DenseState::random(3, 3, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let rho = psi.to_density();
        let got = rho.partial_trace(&[0, 2]).unwrap();
        let m = rho.matrix();
        for i0 in 0..3 {
            for i2 in 0..3 {
                for j0 in 0..3 {
                    for j2 in 0..3 {
                        let mut acc = ZERO;
                        for k in 0..3 {
                            acc += m[(i0 * 9 + k * 3 + i2, j0 * 9 + k * 3 + j2)];
                        }
                        assert!((got.matrix()[(i0 * 3 + i2, j0 * 3 + j2)] - acc).norm() < 1e-12);
                    }
                }
            }
        }
        // The pure-state route agrees too.
        let via_state = psi.reduced(&[0, 2]).unwrap();
        assert!(max_abs(&(via_state.matrix() - got.matrix())) < 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let zero = DenseState::basis(2, &[0]).unwrap().to_density();
        let one = DenseState::basis(2, &[1]).unwrap().to_density();
        let s = 1.0 / 2f64.sqrt();
        let plus = DenseState::from_amplitudes(2, 1, vec![C64::new(s, 0.0); 2]).unwrap().to_density();
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-9);
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-9);
        assert!((fidelity(&zero, &plus).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn trace_distance_examples() {
        let zero = DenseState::basis(2, &[0]).unwrap().to_density();
        let one = DenseState::basis(2, &[1]).unwrap().to_density();
        let mm = DensityOperator::maximally_mixed(2, 1).unwrap();
        assert!(trace_distance(&zero, &zero).unwrap() < 1e-12);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        assert!((trace_distance(&zero, &mm).unwrap() - 0.5).abs() < 1e-12);
        let big = DensityOperator::maximally_mixed(2, 2).unwrap();
        assert!(matches!(trace_distance(&zero, &big), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn bell_pair_mutual_information() {
        for d in [2usize, 3, 5] {
            let phi = DenseState::max_entangled(d, 1).unwrap().to_density();
            let i = mutual_information(&phi, &[0], &[1]).unwrap();
            assert!((i.ebits - 2.0 * (d as f64).log2()).abs() < 1e-9);
            assert!((i.nats - 2.0 * (d as f64).ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn validation_rejects_bad_operators() {
        let m = CMat::identity(2, 2);
        assert!(DensityOperator::from_matrix(2, 1, m).is_err());
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = C64::new(1.5, 0.0);
        m[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(DensityOperator::from_matrix(2, 1, m).is_err());
    }
}
