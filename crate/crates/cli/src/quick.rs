//! Fast identity checks: the trivial examples of every module.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use nlqc_core::circuit::{Circuit, CliffordCircuit, GateKind};
use nlqc_core::code_routing::ThresholdScheme;
use nlqc_core::garden_hose::{gh_complexity, gh_evaluate, interaction_to_preprocessed, ControlProgram, GHStrategy, Node};
use nlqc_core::protocol::{
    clifford_protocol, product_replacement_check, verify_implements, Instr, OneRoundProtocol, Resource, Task,
};
use nlqc_core::qudit::{
    choi_of, fidelity, gates, measure_generalized_bell_forced, trace_distance, BellOutcome, Channel, DenseState,
    DensityOperator,
};
use nlqc_core::surgery::{clifford_surgery, complexity_report, surgery_report};
use nlqc_core::tableau::{gate_count, tableau_simulate, StabilizerTableau};
use nlqc_core::teleport::{bell_teleport, trace_commutation_check};
use nlqc_core::{CMat, Error};
use nlqc_geometry::{verify_connected_wedge, ScatteringConfig};

use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct QuickCheck {
    pub id: String,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

type Check = fn() -> Result<bool, CliError>;

const CHECKS: [(&str, Check); 20] = [
    ("fidelity of a state with itself is 1", self_fidelity),
    ("trace distance of identical states is 0", identical_distance),
    ("orthogonal pure states are at distance 1", orthogonal_distance),
    ("identity channel has the Φ⁺ Choi state", identity_choi),
    ("completely depolarising Choi state is I/d ⊗ I/d", depolarising_choi),
    ("Bell measurement of Φ⁺ gives (0,0)", bell_of_phi_plus),
    ("empty circuit has the identity tableau", empty_tableau),
    ("gate counts of [] and [H, CNOT]", gate_counts),
    ("U^⊗N trace commutation holds for U = I", trace_commutation_identity),
    ("|0⟩ teleported with outcome (0,0) needs no correction", teleport_zero),
    ("trivial protocol is the identity", trivial_protocol),
    ("exact protocol is at distance 0 from its target", exact_protocol),
    ("product resource leaves a sure task sure", unentangled_bound),
    ("zero-pipe strategy keeps Q on the left", zero_pipes),
    ("empty strategy costs nothing", empty_cost),
    ("empty interaction still gets a register", empty_interaction),
    ("k−1 shares cannot decode", insufficient_shares),
    ("0-pair surgery has an empty interaction", zero_pair_surgery),
    ("0-pair surgery has n′ = 0", zero_pair_footprint),
    ("marginal geometry has I = ridge = 0", marginal_geometry),
];

pub fn run_all() -> Vec<QuickCheck> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(i, &(name, check))| {
            let (pass, detail) = match check() {
                Ok(p) => (p, String::new()),
                Err(e) => (false, format!("error: {e}")),
            };
            QuickCheck { id: format!("T{:02}", i + 1), name, pass, detail }
        })
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

fn mats_close(a: &CMat, b: &CMat) -> bool {
    a.shape() == b.shape() && (a - b).iter().all(|z| z.norm() < 1e-9)
}

fn mixed(seed: u64) -> Result<DensityOperator, CliError> {
    let psi = DenseState::random(3, 1, &mut ChaCha8Rng::seed_from_u64(seed))?;
    let m = psi.to_density().matrix() * nlqc_core::C64::new(0.6, 0.0)
        + DensityOperator::maximally_mixed(3, 1)?.matrix() * nlqc_core::C64::new(0.4, 0.0);
    Ok(DensityOperator::from_matrix(3, 1, m)?)
}

fn self_fidelity() -> Result<bool, CliError> {
    let rho = mixed(1)?;
    Ok(close(fidelity(&rho, &rho)?, 1.0))
}

fn identical_distance() -> Result<bool, CliError> {
    let rho = mixed(2)?;
    Ok(close(trace_distance(&rho, &rho)?, 0.0))
}

fn orthogonal_distance() -> Result<bool, CliError> {
    let a = DenseState::basis(2, &[0])?.to_density();
    let b = DenseState::basis(2, &[1])?.to_density();
    Ok(close(trace_distance(&a, &b)?, 1.0))
}

fn identity_choi() -> Result<bool, CliError> {
    let j = choi_of(&Channel::identity(2, 1)?);
    Ok(mats_close(j.matrix(), DenseState::max_entangled(2, 1)?.to_density().matrix()))
}

fn depolarising_choi() -> Result<bool, CliError> {
    let j = choi_of(&Channel::completely_depolarizing(3, 1)?);
    Ok(mats_close(j.matrix(), DensityOperator::maximally_mixed(3, 2)?.matrix()))
}

fn bell_of_phi_plus() -> Result<bool, CliError> {
    let phi = DenseState::max_entangled(3, 1)?;
    let (p, _) = measure_generalized_bell_forced(&phi, (0, 1), BellOutcome { a: 0, b: 0 })?;
    Ok(close(p, 1.0))
}

fn empty_tableau() -> Result<bool, CliError> {
    Ok(tableau_simulate(&CliffordCircuit::empty(3, 2)?) == StabilizerTableau::identity(3, 2))
}

fn gate_counts() -> Result<bool, CliError> {
    let hc = Circuit::new(2, 2)?.gate(GateKind::H, &[0])?.gate(GateKind::Cnot, &[0, 1])?;
    Ok(gate_count(&Circuit::new(2, 2)?) == 0 && gate_count(&hc) == 2)
}

fn trace_commutation_identity() -> Result<bool, CliError> {
    Ok(trace_commutation_check(&CMat::identity(2, 2), 3))
}

fn teleport_zero() -> Result<bool, CliError> {
    let s = DenseState::basis(2, &[0])?.tensor(&DenseState::max_entangled(2, 1)?)?;
    let (p, post) = bell_teleport(&s, &[0], &[(1, 2)], &[BellOutcome { a: 0, b: 0 }], false)?;
    let out = post.reduced(&[2])?;
    Ok(close(p, 0.25) && close(out.expectation(&DenseState::basis(2, &[0])?)?, 1.0))
}

fn trivial_protocol() -> Result<bool, CliError> {
    let p = OneRoundProtocol::new(2, 1, 1, Resource::Pairs(0), 0, 0);
    Ok(verify_implements(&p, &CMat::identity(4, 4), 1e-12)?.pass)
}

fn exact_protocol() -> Result<bool, CliError> {
    let c = CliffordCircuit::swap(2)?;
    let p = clifford_protocol(&c, (1, 1), None)?;
    Ok(verify_implements(&p, &c.unitary()?, 1e-12)?.pass)
}

fn unentangled_bound() -> Result<bool, CliError> {
    let rho = DensityOperator::maximally_mixed(2, 2)?;
    let p = OneRoundProtocol::new(2, 0, 0, Resource::Density { rho, n_l: 1 }, 0, 0);
    let r = product_replacement_check(&p, &Task::Trivial)?;
    Ok(close(r.i_nats, 0.0) && close(r.p_suc_entangled, 1.0) && close(r.p_suc_product, 1.0) && r.pass)
}

fn zero_pipes() -> Result<bool, CliError> {
    let s = GHStrategy::empty(1, 1)?;
    let mut ok = true;
    for (x, y) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let r = gh_evaluate(&s, x, y)?;
        ok &= r.side == 0 && r.terminal == Node::Q;
    }
    Ok(ok)
}

fn empty_cost() -> Result<bool, CliError> {
    Ok(gh_complexity(&GHStrategy::empty(2, 2)?).gh_cost == 0)
}

fn empty_interaction() -> Result<bool, CliError> {
    let p = ControlProgram::from_strategy(&GHStrategy::empty(1, 1)?);
    let t = interaction_to_preprocessed(&p, 0)?;
    Ok(t.register.is_some() && t.truth_table()? == p.truth_table()?)
}

fn insufficient_shares() -> Result<bool, CliError> {
    let sc = ThresholdScheme::new(3, 2, 3)?;
    let e = sc.encode(&DenseState::basis(3, &[1])?)?;
    Ok(matches!(sc.decode(&e, &[(0, 0)]), Err(Error::InsufficientShares { .. })))
}

fn local_protocol() -> OneRoundProtocol {
    let mut p = OneRoundProtocol::new(2, 1, 1, Resource::Pairs(0), 0, 0);
    p.first_left.push(Instr::gate(gates::h(2), vec![0]));
    p.second_right.push(Instr::gate(gates::x(2), vec![1]));
    p
}

fn zero_pair_surgery() -> Result<bool, CliError> {
    let p = local_protocol();
    let lp = clifford_surgery(&p)?;
    let empty = lp.program.stages.iter().filter(|s| s.name == "interaction").all(|s| s.instrs.is_empty());
    Ok(empty && surgery_report(&p, &lp)?.exact)
}

fn zero_pair_footprint() -> Result<bool, CliError> {
    let lp = clifford_surgery(&local_protocol())?;
    Ok(complexity_report(&lp).n_prime == 0)
}

fn marginal_geometry() -> Result<bool, CliError> {
    let r = verify_connected_wedge(&ScatteringConfig::marginal(), 1 << 12, 1e-3)?;
    Ok(r.mutual_information.abs() < 1e-9 && r.ridge_length.abs() < 1e-9 && r.saturation_residual < 1e-9)
}
