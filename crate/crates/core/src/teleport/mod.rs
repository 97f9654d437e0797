//! Bell-basis teleportation and port-based teleportation with the
//! pretty-good measurement.

mod lanczos;
mod pbt;

pub use pbt::{
    build_pgm, pbt_channel, pbt_entanglement_fidelity, pbt_report, pbt_fidelity_dense,
    trace_commutation_check, PBTInstance, PBTParams, PbtReport, POVM_CAP,
};

use rand::Rng;

use crate::error::{Error, Result};
use crate::qudit::{bell_teleport_correction, measure_generalized_bell_forced, BellOutcome, DenseState};

/// Teleport `sources[j]` through the pair `pairs[j] = (near, far)` with forced
/// Bell outcomes. Returns the branch probability and the post-measurement state;
/// with `correct` the far qudits hold the source state exactly.
pub fn bell_teleport(
    state: &DenseState,
    sources: &[usize],
    pairs: &[(usize, usize)],
    outcomes: &[BellOutcome],
    correct: bool,
) -> Result<(f64, DenseState)> {
    if sources.len() != pairs.len() || pairs.len() != outcomes.len() {
        return Err(Error::dim("sources, pairs and outcomes must have equal length"));
    }
    let mut s = state.clone();
    let mut prob = 1.0;
    for ((&src, &(near, far)), &o) in sources.iter().zip(pairs).zip(outcomes) {
        let (p, post) = measure_generalized_bell_forced(&s, (src, near), o)?;
        prob *= p;
        s = post.ok_or_else(|| Error::Invalid("forced outcome has probability zero".into()))?;
        if correct {
            s.apply_gate_mut(&bell_teleport_correction(s.d(), o), &[far])?;
        }
    }
    Ok((prob, s))
}

/// Sampled variant of [`bell_teleport`].
pub fn bell_teleport_sampled(
    state: &DenseState,
    sources: &[usize],
    pairs: &[(usize, usize)],
    correct: bool,
    rng: &mut impl Rng,
) -> Result<(Vec<BellOutcome>, DenseState)> {
    let mut s = state.clone();
    let mut seen = Vec::new();
    for (&src, &(near, far)) in sources.iter().zip(pairs) {
        let (o, post) = crate::qudit::measure_generalized_bell(&s, (src, near), rng)?;
        s = post;
        if correct {
            s.apply_gate_mut(&bell_teleport_correction(s.d(), o), &[far])?;
        }
        seen.push(o);
    }
    Ok((seen, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::gates;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(d: usize, seed: u64) -> (DenseState, DenseState) {
        let psi = DenseState::random(d, 1, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let full = psi.tensor(&DenseState::max_entangled(d, 1).unwrap()).unwrap();
        (psi, full)
    }

    #[test]
    fn zero_outcome_needs_no_correction() {
        let full = DenseState::zero(2, 1).unwrap().tensor(&DenseState::max_entangled(2, 1).unwrap()).unwrap();
        let (p, s) = bell_teleport(&full, &[0], &[(1, 2)], &[BellOutcome { a: 0, b: 0 }], false).unwrap();
        assert!((p - 0.25).abs() < 1e-12);
        let zero = DenseState::zero(2, 1).unwrap();
        assert!((s.reduced(&[2]).unwrap().expectation(&zero).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn corrected_teleportation_is_exact() {
        for d in [2, 3, 5] {
            let (psi, full) = setup(d, d as u64);
            for o in BellOutcome::all(d) {
                let (_, s) = bell_teleport(&full, &[0], &[(1, 2)], &[o], true).unwrap();
                assert!((s.reduced(&[2]).unwrap().expectation(&psi).unwrap() - 1.0).abs() < 1e-9);
            }
        }
    }

    /// Uncorrected qubit output is XᵃZᵇψ up to a global sign.
    #[test]
    fn uncorrected_qubit_output() {
        let (psi, full) = setup(2, 8);
        for o in BellOutcome::all(2) {
            let (_, s) = bell_teleport(&full, &[0], &[(1, 2)], &[o], false).unwrap();
            let expect = psi.apply_gate(&gates::weyl(2, o.a, o.b), &[0]).unwrap();
            assert!((s.reduced(&[2]).unwrap().expectation(&expect).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sampled_run_is_exact() {
        let (psi, full) = setup(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (_, s) = bell_teleport_sampled(&full, &[0], &[(1, 2)], true, &mut rng).unwrap();
        assert!((s.reduced(&[2]).unwrap().expectation(&psi).unwrap() - 1.0).abs() < 1e-9);
    }
}
