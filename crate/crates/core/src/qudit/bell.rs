//! Generalized Bell basis `|Φ_ab⟩ = (XᵃZᵇ ⊗ I)|Φ⁺⟩`.
//!
//! Teleporting `ψ` through `Φ⁺` with outcome `(a, b)` leaves `(XᵃZᵇ)†ψ` on the
//! far qudit, so the correction is `XᵃZᵇ`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gates;
use super::kernel;
use super::state::{check_d, DenseState};
use crate::error::{Error, Result};
use crate::linalg::{omega, CMat, C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BellOutcome {
    pub a: usize,
    pub b: usize,
}

impl BellOutcome {
    pub fn index(&self, d: usize) -> usize {
        self.a * d + self.b
    }

    pub fn from_index(d: usize, k: usize) -> Self {
        Self { a: k / d, b: k % d }
    }

    pub fn all(d: usize) -> impl Iterator<Item = BellOutcome> {
        (0..d * d).map(move |k| Self::from_index(d, k))
    }
}

/// Two-qudit `|Φ_ab⟩`.
pub fn bell_state(d: usize, a: usize, b: usize) -> Result<DenseState> {
    check_d(d)?;
    let s = 1.0 / (d as f64).sqrt();
    let mut amps = vec![ZERO; d * d];
    for j in 0..d {
        amps[((j + a) % d) * d + j] = omega(d, (b * j) as i64) * s;
    }
    DenseState::from_amplitudes(d, 2, amps)
}

/// Kraus operators `|a,b⟩⟨Φ_ab|`, indexed by `a·d + b`: the measured pair keeps
/// the classical record in the computational basis.
pub fn bell_kraus(d: usize) -> Vec<CMat> {
    BellOutcome::all(d)
        .map(|o| {
            let phi = bell_state(d, o.a, o.b).expect("prime d");
            let mut k = CMat::zeros(d * d, d * d);
            for (c, amp) in phi.amplitudes().iter().enumerate() {
                k[(o.index(d), c)] = amp.conj();
            }
            k
        })
        .collect()
}

/// The correction `XᵃZᵇ` that undoes teleportation outcome `(a, b)`.
pub fn bell_teleport_correction(d: usize, o: BellOutcome) -> CMat {
    gates::weyl(d, o.a, o.b)
}

/// Born-rule sampled Bell measurement on qudits `pair`.
pub fn measure_generalized_bell(
    state: &DenseState,
    pair: (usize, usize),
    rng: &mut impl Rng,
) -> Result<(BellOutcome, DenseState)> {
    let d = state.d();
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = None;
    for o in BellOutcome::all(d) {
        let (p, post) = measure_generalized_bell_forced(state, pair, o)?;
        if let Some(post) = post {
            acc += p;
            last = Some((o, post));
            if r < acc {
                break;
            }
        }
    }
    last.ok_or_else(|| Error::Invalid("no outcome has positive probability".into()))
}

/// Bell measurement with a forced outcome. Returns the exact probability and
/// the renormalized post-measurement state (`None` when the probability is 0).
pub fn measure_generalized_bell_forced(
    state: &DenseState,
    pair: (usize, usize),
    outcome: BellOutcome,
) -> Result<(f64, Option<DenseState>)> {
    let d = state.d();
    if pair.0 == pair.1 {
        return Err(Error::range("Bell measurement on a single qudit"));
    }
    if outcome.a >= d || outcome.b >= d {
        return Err(Error::range("Bell outcome"));
    }
    let k = &bell_kraus(d)[outcome.index(d)];
    let mut amps = state.amplitudes().to_vec();
    kernel::apply_matrix(&mut amps, d, state.n(), k, &[pair.0, pair.1])?;
    let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if p < 1e-15 {
        return Ok((p, None));
    }
    let s = 1.0 / p.sqrt();
    for a in &mut amps {
        *a *= C64::new(s, 0.0);
    }
    Ok((p, Some(DenseState::from_raw(d, state.n(), amps))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bell_basis_is_orthonormal() {
        for d in [2, 3, 5] {
            let all: Vec<DenseState> = BellOutcome::all(d).map(|o| bell_state(d, o.a, o.b).unwrap()).collect();
            for (i, a) in all.iter().enumerate() {
                for (j, b) in all.iter().enumerate() {
                    let ip = a.inner(b).unwrap().norm();
                    assert!((ip - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn phi_plus_gives_zero_outcome() {
        let phi = DenseState::max_entangled(3, 1).unwrap();
        let (p, _) = measure_generalized_bell_forced(&phi, (0, 1), BellOutcome { a: 0, b: 0 }).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let (o, _) = measure_generalized_bell(&phi, (0, 1), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(o, BellOutcome { a: 0, b: 0 });
    }

    #[test]
    fn x_on_phi_plus_gives_a_one() {
        let s = DenseState::max_entangled(2, 1).unwrap().apply_gate(&gates::x(2), &[0]).unwrap();
        let (p, _) = measure_generalized_bell_forced(&s, (0, 1), BellOutcome { a: 1, b: 0 }).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outcome_probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in [2, 3, 5] {
            let s = DenseState::random(d, 3, &mut rng).unwrap();
            let total: f64 = BellOutcome::all(d)
                .map(|o| measure_generalized_bell_forced(&s, (2, 0), o).unwrap().0)
                .sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn qutrit_teleportation_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = DenseState::random(3, 1, &mut rng).unwrap();
        let full = psi.tensor(&DenseState::max_entangled(3, 1).unwrap()).unwrap();
        for o in BellOutcome::all(3) {
            let (p, post) = measure_generalized_bell_forced(&full, (0, 1), o).unwrap();
            assert!((p - 1.0 / 9.0).abs() < 1e-12);
            let post = post.unwrap().apply_gate(&bell_teleport_correction(3, o), &[2]).unwrap();
            let out = post.reduced(&[2]).unwrap();
            assert!((out.expectation(&psi).unwrap() - 1.0).abs() < 1e-9);
        }
    }
}
