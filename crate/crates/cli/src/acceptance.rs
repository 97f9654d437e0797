//! The ten acceptance criteria, each a self-contained check with its own
//! tolerance and time limit.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use nlqc_core::circuit::{Circuit, CliffordCircuit, GateKind, GateOp};
use nlqc_core::garden_hose::{ceil_log2, interaction_to_preprocessed, CondInstr, ControlProgram, Node, Op, Pred};
use nlqc_core::protocol::{bk_protocol, bk_protocol_with_ports, bk_report, random_sweep};
use nlqc_core::qudit::DenseState;
use nlqc_core::surgery::{clifford_surgery, complexity_report, surgery_report};
use nlqc_core::tableau::{random_clifford, tableau_simulate};
use nlqc_core::teleport::{build_pgm, pbt_report, PBTParams};
use nlqc_core::{CMat, C64};
use nlqc_geometry::{config_grid, mutual_information, verify_connected_wedge, ScatteringConfig};

use crate::commands::{gh_row, BoolFn, CliffordCase};
use crate::CliError;

pub const EXACT: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    /// Checks passed and the run finished inside the limit.
    pub pass: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
    pub limit_seconds: Option<u64>,
}

impl Criterion {
    pub fn line(&self) -> String {
        let limit = self.limit_seconds.map_or(String::new(), |s| format!(" / {s} s"));
        format!(
            "{} {:>2} {:<34} {:>7.1} s{limit}  {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

type Check = fn() -> Result<(bool, String), CliError>;

/// Id, name, time limit in seconds, check.
pub const CRITERIA: [(u32, &str, Option<u64>, Check); 10] = [
    (1, "Clifford protocol exactness", Some(120), clifford_exactness),
    (2, "Clifford surgery", Some(120), clifford_surgery_check),
    (3, "port-based teleportation", Some(300), pbt_check),
    (4, "port-teleportation protocol", Some(300), bk_check),
    (5, "garden-hose AND/OR", Some(60), garden_hose_check),
    (6, "location-register transform", Some(60), transform_check),
    (7, "code-routing AND/OR over d=3", Some(60), code_routing_check),
    (8, "product-replacement bound", Some(300), bound_sweep),
    (9, "geometry saturation", Some(180), geometry_check),
    (10, "tableau/dense oracle", None, oracle_check),
];

pub fn run(id: u32) -> Option<Criterion> {
    let &(id, name, limit, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let (ok, detail) = match check() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    let in_time = limit.map_or(true, |s| elapsed <= Duration::from_secs(s));
    let detail = if in_time { detail } else { format!("{detail}; over the time limit") };
    Some(Criterion { id, name, pass: ok && in_time, detail, elapsed, limit_seconds: limit })
}

/// `(seed, d, n₀, n₁)` for the fifty random Cliffords. Surgery adds two qudits
/// per cut pair, so qutrits stop at three qudits and d=5 at 1+1.
pub fn clifford_cases() -> Vec<(u64, usize, usize, usize)> {
    let shapes = [(2, 1, 1), (2, 1, 2), (2, 2, 1), (2, 2, 2), (2, 1, 3), (2, 3, 1), (3, 1, 1), (3, 1, 2), (3, 2, 1), (5, 1, 1)];
    (0..50u64).map(|k| {
        let (d, n0, n1) = shapes[k as usize % shapes.len()];
        (1000 + k, d, n0, n1)
    })
    .collect()
}

fn clifford_exactness() -> Result<(bool, String), CliError> {
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    let mut pairs = 0;
    for (seed, d, n0, n1) in clifford_cases() {
        let case = CliffordCase::run(&random_clifford(n0 + n1, d, seed)?, n0, n1)?;
        worst = worst.max(case.choi_distance).max(case.worst_branch_distance);
        pairs += case.pairs;
        if !case.ok(EXACT) {
            bad.push(seed);
        }
    }
    Ok((bad.is_empty(), format!("50 Cliffords, {pairs} pairs in total, worst branch distance {worst:.1e}, failing seeds {bad:?}")))
}

fn clifford_surgery_check() -> Result<(bool, String), CliError> {
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for (seed, d, n0, n1) in clifford_cases() {
        let case = CliffordCase::run(&random_clifford(n0 + n1, d, seed)?, n0, n1)?;
        let lp = clifford_surgery(&case.protocol)?;
        let r = surgery_report(&case.protocol, &lp)?;
        let c = complexity_report(&lp);
        worst = worst.max(r.choi_distance).max(r.worst_broadcast_distance.unwrap_or(0.0));
        let footprint = c.n_prime == 2 * c.resource_pairs;
        let gates = c.interaction_gate_count.is_some_and(|g| g <= 4 * c.resource_pairs);
        if !(r.choi_distance < EXACT && r.worst_broadcast_distance.is_some_and(|w| w < EXACT) && footprint && gates) {
            bad.push(seed);
        }
    }
    Ok((bad.is_empty(), format!("worst distance {worst:.1e}, n' = 2E_c and gates <= 4E_c, failing seeds {bad:?}")))
}

fn pbt_check() -> Result<(bool, String), CliError> {
    let one = build_pgm(PBTParams::new(2, 1)?)?.choi();
    let quarter = CMat::identity(4, 4) * C64::new(0.25, 0.0);
    let n1 = (&one - &quarter).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut ok = n1 < 1e-12;
    let mut fids = Vec::new();
    let mut povm: f64 = 0.0;
    for n in 1..=6 {
        let params = PBTParams::new(2, n)?;
        let r = pbt_report(params)?;
        ok &= r.choi_trace_distance <= r.bound + EXACT;
        let pgm = build_pgm(params)?;
        povm = povm.max(pgm.completeness_error()).max(-pgm.min_eigenvalue());
        fids.push(r.choi_fidelity);
    }
    let increasing = fids.windows(2).all(|w| w[1] > w[0]);
    ok &= increasing && povm <= EXACT;
    let f: Vec<String> = fids.iter().map(|f| format!("{f:.4}")).collect();
    Ok((ok, format!("N=1 Choi off I/4 by {n1:.1e}; F(N=1..6) = [{}]; POVM error {povm:.1e}", f.join(", "))))
}

fn bk_check() -> Result<(bool, String), CliError> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, u) in [("I⊗I", CMat::identity(4, 4)), ("CNOT", nlqc_core::qudit::gates::cnot(2))] {
        let d2 = bk_report(&u, 2, (1, 1), 2)?.choi_distance;
        let d8 = bk_report(&u, 2, (1, 1), 8)?.choi_distance;
        let a = bk_protocol(&u, 2, (1, 1), 3)?.choi()?;
        let b = bk_protocol_with_ports(&u, 2, (1, 1), 3, &[2, 0, 1])?.choi()?;
        let relabel = a.distance(&b);
        ok &= d8 < d2 && relabel < EXACT;
        parts.push(format!("{name}: N=2 {d2:.4}, N=8 {d8:.4}, relabel {relabel:.1e}"));
    }
    Ok((ok, parts.join("; ")))
}

fn garden_hose_check() -> Result<(bool, String), CliError> {
    let mut ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut runs = 0;
    for f in [BoolFn::And, BoolFn::Or] {
        let s = f.strategy();
        let t = interaction_to_preprocessed(&ControlProgram::from_strategy(&s), s.pipes())?;
        let q = DenseState::random(2, 1, &mut rng)?;
        for (x, y) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let g = gh_row(&s, &t, x, y, Some(&q))?;
            let (n, agree, fid) = g.quantum.expect("quantum run requested");
            runs += n;
            ok &= g.side == f.eval(x, y) && agree && fid >= 1.0 - EXACT;
        }
    }
    ok &= BoolFn::And.strategy().pipes() == 2 && BoolFn::Or.strategy().pipes() == 3;
    Ok((ok, format!("truth tables match on 8 inputs, {runs} forced-outcome runs at corrected fidelity 1")))
}

/// AND decided inside the interaction phase on one pipe.
fn and_in_interaction() -> ControlProgram {
    let both = Pred::And(Box::new(Pred::XBit(0)), Box::new(Pred::YBit(0)));
    ControlProgram {
        e: 1,
        nx: 1,
        ny: 1,
        workspace_bits: 2,
        left: Vec::new(),
        interaction: vec![CondInstr::new(both, Op::Measure(Node::Q, Node::L(1)))],
        right: Vec::new(),
        register: None,
    }
}

/// OR: the left sends `Q` across when `x = 1`, the interaction does when `y = 1`.
fn or_in_interaction() -> ControlProgram {
    ControlProgram {
        left: vec![CondInstr::new(Pred::XBit(0), Op::Send(Node::Q, 1))],
        interaction: vec![CondInstr::new(
            Pred::And(Box::new(Pred::Not(Box::new(Pred::XBit(0)))), Box::new(Pred::YBit(0))),
            Op::Measure(Node::Q, Node::L(1)),
        )],
        ..and_in_interaction()
    }
}

fn transform_check() -> Result<(bool, String), CliError> {
    let mut ok = true;
    let mut worst_bits = 0;
    let programs = [
        (BoolFn::And, ControlProgram::from_strategy(&BoolFn::And.strategy())),
        (BoolFn::Or, ControlProgram::from_strategy(&BoolFn::Or.strategy())),
        (BoolFn::And, and_in_interaction()),
        (BoolFn::Or, or_in_interaction()),
    ];
    for (f, p) in &programs {
        let t = interaction_to_preprocessed(p, p.e)?;
        let before = p.truth_table()?;
        let after = t.truth_table()?;
        ok &= before == after && after.iter().all(|&(x, y, side)| side == f.eval(x, y));
        let bits = t.register.expect("transform adds a register").bits();
        ok &= bits <= ceil_log2(p.e + 2) + 2;
        worst_bits = worst_bits.max(bits);
    }
    Ok((ok, format!("{} programs keep their truth tables, register at most {worst_bits} bits", programs.len())))
}

fn code_routing_check() -> Result<(bool, String), CliError> {
    let mut ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut fid, mut hide) = (f64::INFINITY, 0.0f64);
    for f in [BoolFn::And, BoolFn::Or] {
        let plan = f.plan(3)?;
        for (x, y) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let q = DenseState::random(3, 1, &mut rng)?;
            let r = nlqc_core::code_routing::code_route(&plan, x, y, &q, &mut rng)?;
            ok &= r.side == f.eval(x, y) && r.fidelity >= 1.0 - EXACT && r.hiding_distance <= EXACT;
            fid = fid.min(r.fidelity);
            hide = hide.max(r.hiding_distance);
        }
    }
    Ok((ok, format!("worst recovery fidelity {fid:.12}, losing side within {hide:.1e} of I/3")))
}

fn bound_sweep() -> Result<(bool, String), CliError> {
    let (_, s) = random_sweep(0..100)?;
    Ok((
        s.pass == s.cases,
        format!(
            "half-I form holds on {}/{} (violations at seeds {:?}); I >= D(1||p_prod) on {}/{}, D_max form on {}/{}",
            s.pass, s.cases, s.violations, s.kl_pass, s.cases, s.dmax_pass, s.cases
        ),
    ))
}

fn geometry_check() -> Result<(bool, String), CliError> {
    let res = 1 << 12;
    let m = verify_connected_wedge(&ScatteringConfig::marginal(), res, 1e-3)?;
    let marginal = m.mutual_information.abs() < EXACT && m.ridge_length.abs() < EXACT;
    let cfg = ScatteringConfig::delayed(0.2);
    let g = verify_connected_wedge(&cfg, res, 1e-3)?;
    let is: Vec<f64> = [1e-3, 1e-4, 1e-5].iter().map(|&e| mutual_information(&cfg, e)).collect::<Result<_, _>>()?;
    let cutoff = is.iter().map(|i| (i - is[0]).abs()).fold(0.0, f64::max);
    let mut margin = f64::INFINITY;
    for c in config_grid() {
        let r = verify_connected_wedge(&c, res, 1e-3)?;
        if r.region_nonempty {
            margin = margin.min(r.wedge_margin);
        }
    }
    let ok = marginal && g.saturation_residual < 1e-3 && cutoff < EXACT && margin >= -1e-3;
    Ok((
        ok,
        format!(
            "marginal I={:.1e} ridge={:.1e}; delay-0.2 residual {:.1e}, cutoff drift {cutoff:.1e}; grid margin {margin:.1e}",
            m.mutual_information, m.ridge_length, g.saturation_residual
        ),
    ))
}

/// `|tr(A†B)| = dim` exactly when the unitaries agree up to a global phase.
fn phase_distance(a: &CMat, b: &CMat) -> f64 {
    let ov = (a.adjoint() * b).trace();
    let ph = if ov.norm() > 0.0 { ov / ov.norm() } else { C64::new(1.0, 0.0) };
    (a * ph - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn oracle_check() -> Result<(bool, String), CliError> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for d in [2, 3] {
        for kind in [GateKind::X, GateKind::Z, GateKind::H, GateKind::S, GateKind::Cnot] {
            let qs: Vec<usize> = (0..kind.arity(d)).collect();
            let c = CliffordCircuit::new(Circuit::from_ops(d, 2, vec![GateOp::new(kind, qs)])?)?;
            worst = worst.max(phase_distance(&tableau_simulate(&c).to_unitary()?, &c.unitary()?));
            count += 1;
        }
    }
    for k in 0..100u64 {
        let (n, d) = (1 + (k % 3) as usize, if k % 2 == 0 { 2 } else { 3 });
        let c = random_clifford(n, d, 5000 + k)?;
        worst = worst.max(phase_distance(&tableau_simulate(&c).to_unitary()?, &c.unitary()?));
        count += 1;
    }
    Ok((worst < EXACT, format!("{count} circuits, worst phase-adjusted deviation {worst:.1e}")))
}
