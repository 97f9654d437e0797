use nlqc_core::circuit::{Circuit, CliffordCircuit, GateKind, GateOp};
use nlqc_core::pauli::PauliWord;
use nlqc_core::protocol::{clifford_protocol, verify_implements, worst_branch_distance};
use nlqc_core::surgery::{clifford_surgery, complexity_report, surgery_report};
use nlqc_core::tableau::{conjugate_pauli, random_clifford};
use nlqc_core::{CMat, C64};
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(cases) }
}

fn close(a: &CMat, b: &CMat) -> bool {
    (a - b).iter().all(|z| z.norm() < 1e-9)
}

fn generators(d: usize, n: usize) -> Vec<PauliWord> {
    (0..n).flat_map(|q| [PauliWord::single(d, n, q, 1, 0), PauliWord::single(d, n, q, 0, 1)]).collect()
}

/// `(d, n₀, n₁)` small enough for dense runs of the protocol and its surgery.
fn split() -> impl Strategy<Value = (usize, usize, usize)> {
    prop::sample::select(vec![(2usize, 1usize, 1usize), (2, 1, 2), (2, 2, 1), (3, 1, 1), (3, 1, 2), (5, 1, 1)])
}

proptest! {
    #![proptest_config(cfg(40))]

    #[test]
    fn tableau_matches_dense(d in prop::sample::select(vec![2usize, 3]), n in 1usize..4, seed in any::<u64>()) {
        let c = random_clifford(n, d, seed).unwrap();
        let u = c.unitary().unwrap();
        for p in generators(d, n) {
            let img = conjugate_pauli(&c, &p).unwrap();
            prop_assert!(close(&img.dense(), &(&u * p.dense() * u.adjoint())));
        }
    }

    #[test]
    fn generator_conjugation_stays_in_the_group(d in prop::sample::select(vec![2usize, 3, 5]), g in 0usize..5, x in 0usize..5, z in 0usize..5, ph in 0usize..4) {
        let kind = [GateKind::X, GateKind::Z, GateKind::H, GateKind::S, GateKind::Cnot][g].clone();
        let n = 2;
        let q: Vec<usize> = (0..kind.arity(d)).collect();
        let c = CliffordCircuit::new(Circuit::from_ops(d, n, vec![GateOp::new(kind, q)]).unwrap()).unwrap();
        let p = PauliWord::new(d, vec![x % d, 0], vec![z % d, (x + z) % d], ph % nlqc_core::pauli::phase_order(d)).unwrap();
        let img = conjugate_pauli(&c, &p).unwrap();
        let u = c.unitary().unwrap();
        prop_assert!(close(&img.dense(), &(&u * p.dense() * u.adjoint())));
    }

    #[test]
    fn inverse_circuit_round_trips(d in prop::sample::select(vec![2usize, 3]), n in 1usize..4, seed in any::<u64>(), x in 0usize..3, z in 0usize..3) {
        let c = random_clifford(n, d, seed).unwrap();
        let p = PauliWord::single(d, n, 0, x % d, z % d).mul(&PauliWord::single(d, n, n - 1, z % d, 1)).unwrap();
        let back = conjugate_pauli(&c.inverse(), &conjugate_pauli(&c, &p).unwrap()).unwrap();
        prop_assert_eq!(back, p);
    }
}

proptest! {
    #![proptest_config(cfg(12))]

    #[test]
    fn clifford_protocols_are_exact((d, n0, n1) in split(), seed in any::<u64>()) {
        let c = random_clifford(n0 + n1, d, seed).unwrap();
        let p = clifford_protocol(&c, (n0, n1), None).unwrap();
        let u = c.unitary().unwrap();
        prop_assert!(worst_branch_distance(&p, &u).unwrap() < 1e-9);
        prop_assert!(verify_implements(&p, &u, 1e-9).unwrap().pass);
        let acc = p.account().unwrap();
        let k = acc.ebit_count.unwrap() as f64;
        prop_assert!((k * 2.0 * (d as f64).log2() - acc.mutual_information.ebits).abs() < 1e-6);
    }

    #[test]
    fn surgery_is_exact_with_footprint_law((d, n0, n1) in split(), seed in any::<u64>()) {
        let c = random_clifford(n0 + n1, d, seed).unwrap();
        let p = clifford_protocol(&c, (n0, n1), None).unwrap();
        let lp = clifford_surgery(&p).unwrap();
        let r = surgery_report(&p, &lp).unwrap();
        prop_assert!(r.exact, "{:?}", r);
        let cr = complexity_report(&lp);
        prop_assert_eq!(cr.n_prime, 2 * cr.resource_pairs);
        prop_assert_eq!(cr.clifford_relations, Some(true));
    }
}

#[test]
fn qubit_phases_survive_conjugation() {
    // H Y H = −Y.
    let h = CliffordCircuit::new(Circuit::new(2, 1).unwrap().gate(GateKind::H, &[0]).unwrap()).unwrap();
    let y = PauliWord::single(2, 1, 0, 1, 1);
    let img = conjugate_pauli(&h, &y).unwrap();
    assert!(close(&img.dense(), &(y.dense() * C64::new(-1.0, 0.0))));
}
