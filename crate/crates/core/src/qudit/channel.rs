use super::density::DensityOperator;
use super::state::check_d;
use super::TOL;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64, ZERO};

#[derive(Clone, Debug)]
enum Repr {
    Kraus(Vec<CMat>),
    /// Normalized Choi operator on output ⊗ reference.
    Choi(CMat),
}

/// Completely positive trace-preserving map from `n_in` to `n_out` qudits.
#[derive(Clone, Debug)]
pub struct Channel {
    d: usize,
    n_in: usize,
    n_out: usize,
    repr: Repr,
}

impl Channel {
    pub fn from_kraus(d: usize, n_in: usize, n_out: usize, ops: Vec<CMat>) -> Result<Self> {
        check_d(d)?;
        let (di, dout) = (d.pow(n_in as u32), d.pow(n_out as u32));
        let mut sum = CMat::zeros(di, di);
        for k in &ops {
            if k.nrows() != dout || k.ncols() != di {
                return Err(Error::dim(format!("Kraus operator {}x{}, expected {dout}x{di}", k.nrows(), k.ncols())));
            }
            sum += k.adjoint() * k;
        }
        if linalg::frob_dist(&sum, &CMat::identity(di, di)) > TOL {
            return Err(Error::Invalid("Kraus operators are not complete".into()));
        }
        Ok(Self { d, n_in, n_out, repr: Repr::Kraus(ops) })
    }

    /// From a trace-one Choi operator on output ⊗ reference.
    pub fn from_choi(d: usize, n_in: usize, n_out: usize, choi: CMat) -> Result<Self> {
        check_d(d)?;
        let (di, dout) = (d.pow(n_in as u32), d.pow(n_out as u32));
        if choi.nrows() != di * dout || choi.ncols() != di * dout {
            return Err(Error::dim("Choi operator size"));
        }
        let rho = DensityOperator::from_matrix(d, n_in + n_out, choi.clone())?;
        let refs: Vec<usize> = (n_out..n_out + n_in).collect();
        let marg = rho.partial_trace(&refs)?;
        let target = CMat::identity(di, di) * C64::new(1.0 / di as f64, 0.0);
        if linalg::frob_dist(marg.matrix(), &target) > TOL {
            return Err(Error::Invalid("Choi operator is not trace preserving".into()));
        }
        Ok(Self { d, n_in, n_out, repr: Repr::Choi(choi) })
    }

    pub fn identity(d: usize, n: usize) -> Result<Self> {
        let dim = d.pow(n as u32);
        Self::from_kraus(d, n, n, vec![CMat::identity(dim, dim)])
    }

    pub fn unitary(d: usize, n: usize, u: CMat) -> Result<Self> {
        Self::from_kraus(d, n, n, vec![u])
    }

    /// `ρ ↦ tr(ρ) I/dⁿ`.
    pub fn completely_depolarizing(d: usize, n: usize) -> Result<Self> {
        let dim = d.pow(n as u32);
        let s = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        let mut ops = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut k = CMat::zeros(dim, dim);
                k[(i, j)] = s;
                ops.push(k);
            }
        }
        Self::from_kraus(d, n, n, ops)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    fn dims(&self) -> (usize, usize) {
        (self.d.pow(self.n_in as u32), self.d.pow(self.n_out as u32))
    }

    pub fn choi(&self) -> CMat {
        match &self.repr {
            Repr::Choi(c) => c.clone(),
            Repr::Kraus(ops) => {
                let (di, dout) = self.dims();
                let mut c = CMat::zeros(di * dout, di * dout);
                for k in ops {
                    // (K ⊗ I)|Φ⟩ has entry K[o, i]/√di at index o·di + i.
                    let v = CMat::from_fn(di * dout, 1, |r, _| k[(r / di, r % di)]);
                    c += &v * v.adjoint();
                }
                c / C64::new(di as f64, 0.0)
            }
        }
    }

    pub fn kraus(&self) -> Vec<CMat> {
        match &self.repr {
            Repr::Kraus(ops) => ops.clone(),
            Repr::Choi(c) => {
                let (di, dout) = self.dims();
                let (vals, vecs) = linalg::hermitian_eig(&(c * C64::new(di as f64, 0.0)));
                vals.iter()
                    .enumerate()
                    .filter(|(_, &l)| l > 1e-14)
                    .map(|(j, &l)| {
                        let s = l.sqrt();
                        CMat::from_fn(dout, di, |o, i| vecs[(o * di + i, j)] * s)
                    })
                    .collect()
            }
        }
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let (di, dout) = self.dims();
        if rho.d() != self.d || rho.dim() != di {
            return Err(Error::dim("channel input register"));
        }
        let m = match &self.repr {
            Repr::Kraus(ops) => {
                let mut out = CMat::zeros(dout, dout);
                for k in ops {
                    out += k * rho.matrix() * k.adjoint();
                }
                out
            }
            Repr::Choi(c) => {
                // ρ_out = di · tr_ref[J (I ⊗ ρᵀ)]
                let rt = rho.matrix().transpose();
                let mut out = CMat::from_element(dout, dout, ZERO);
                for o1 in 0..dout {
                    for o2 in 0..dout {
                        let mut acc = ZERO;
                        for i in 0..di {
                            for j in 0..di {
                                acc += c[(o1 * di + i, o2 * di + j)] * rt[(j, i)];
                            }
                        }
                        out[(o1, o2)] = acc * C64::new(di as f64, 0.0);
                    }
                }
                out
            }
        };
        Ok(DensityOperator::from_raw(self.d, self.n_out, m))
    }
}

/// `(𝒞 ⊗ I)(Φ⁺)` as a density operator on output ⊗ reference.
pub fn choi_of(channel: &Channel) -> DensityOperator {
    DensityOperator::from_raw(channel.d, channel.n_out + channel.n_in, channel.choi())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::{gates, trace_distance, DenseState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_choi_is_bell_projector() {
        let c = choi_of(&Channel::identity(2, 1).unwrap());
        let phi = DenseState::max_entangled(2, 1).unwrap().to_density();
        assert!(trace_distance(&c, &phi).unwrap() < 1e-12);
    }

    #[test]
    fn depolarizing_choi_is_maximally_mixed() {
        let c = choi_of(&Channel::completely_depolarizing(3, 1).unwrap());
        let mm = DensityOperator::maximally_mixed(3, 2).unwrap();
        assert!(trace_distance(&c, &mm).unwrap() < 1e-12);
    }

    #[test]
    fn x_channel_choi() {
        let c = choi_of(&Channel::unitary(2, 1, gates::x(2)).unwrap());
        let expect = DenseState::max_entangled(2, 1).unwrap().apply_gate(&gates::x(2), &[0]).unwrap().to_density();
        assert!(trace_distance(&c, &expect).unwrap() < 1e-12);
    }

    #[test]
    fn kraus_choi_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // Amplitude-damping-like qutrit channel built from an isometry.
        let u = {
            let psi = DenseState::random(3, 2, &mut rng).unwrap();
            let v = psi.column();
            let p = &v * v.adjoint();
            CMat::identity(9, 9) - p * C64::new(2.0, 0.0)
        };
        let ops: Vec<CMat> = (0..3).map(|e| CMat::from_fn(3, 3, |o, i| u[(o * 3 + e, i * 3)])).collect();
        let ch = Channel::from_kraus(3, 1, 1, ops).unwrap();
        let back = Channel::from_choi(3, 1, 1, ch.choi()).unwrap();
        let again = Channel::from_kraus(3, 1, 1, back.kraus()).unwrap();
        for _ in 0..20 {
            let rho = DenseState::random(3, 1, &mut rng).unwrap().to_density();
            let a = ch.apply(&rho).unwrap();
            assert!(trace_distance(&a, &back.apply(&rho).unwrap()).unwrap() < 1e-9);
            assert!(trace_distance(&a, &again.apply(&rho).unwrap()).unwrap() < 1e-9);
            assert!((a.trace() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn incomplete_kraus_rejected() {
        assert!(Channel::from_kraus(2, 1, 1, vec![gates::x(2) * C64::new(0.5, 0.0)]).is_err());
    }
}
