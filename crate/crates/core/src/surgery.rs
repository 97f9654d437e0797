//! Surgery on one-round protocols: cut the shared pairs and stitch the two
//! halves back together with a local interaction.
//!
//! Clifford surgery prepares each pair locally on both sides and Bell-measures
//! the inner halves in the interaction. The inserted Pauli is pushed through the
//! Clifford first-round stage of one side and undone before the second round.
//! Port-teleportation surgery handles one-sided tasks: the right prepares `N`
//! copies of its pair halves, runs its first round on each, and the
//! interaction port-teleports the left's cut halves into one copy.
//!
//! The interaction acts only on freshly prepared registers, disjoint from both
//! first-round stages, so the simulation may run it before or after them.
//! That changes nothing but the cost of the outcome tree.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::circuit::CliffordCircuit;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::pauli::PauliWord;
use crate::protocol::exec::{shrink, Branch, Init, Instr, LowRank, Owner, Program, Record, Stage};
use crate::protocol::{OneRoundProtocol, Resource};
use crate::qudit::{gates, BellOutcome, DenseState};
use crate::tableau::conjugate_pauli;
use crate::teleport::{build_pgm, PBTParams};

const PORT_LABEL: &str = "port*";

fn cut_label(j: usize) -> String {
    format!("cut#{j}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SurgeryMode {
    Clifford,
    Pbt { n_ports: usize },
}

/// Three-party program: interaction (stage 0), first-round left/right (1, 2),
/// second-round left/right (3, 4). Both second-round stages see the
/// interaction outcomes.
#[derive(Clone, Debug)]
pub struct LocalInteractionProtocol {
    pub mode: SurgeryMode,
    pub program: Program,
    /// Pairs in the original protocol.
    pub pairs: usize,
    pub interaction_left: usize,
    pub interaction_right: usize,
    /// Elementary operations in the interaction, when it is a circuit.
    pub interaction_gates: Option<usize>,
    /// Outcome labels sent to both output stages.
    pub broadcast: Vec<String>,
}

impl LocalInteractionProtocol {
    pub fn interaction_qudits(&self) -> usize {
        self.interaction_left + self.interaction_right
    }

    pub fn choi(&self) -> Result<LowRank> {
        self.program.choi()
    }
}

type Fix = Arc<dyn Fn(&Record) -> Result<Record> + Send + Sync>;

/// Feeds every adaptive instruction (and whatever it expands into) the
/// transcript rewritten by `fix`.
fn rewire(instrs: Vec<Instr>, fix: &Fix) -> Vec<Instr> {
    instrs
        .into_iter()
        .map(|i| match i {
            Instr::Adaptive(f) => {
                let fix = fix.clone();
                Instr::adaptive(move |rec| {
                    let r = fix(rec)?;
                    Ok(rewire(f(&r)?, &fix))
                })
            }
            other => other,
        })
        .collect()
}

struct Parts {
    n_regs: usize,
    owners: Vec<Owner>,
    init: Vec<Init>,
    interaction: Vec<Instr>,
    first_left: Vec<Instr>,
    first_right: Vec<Instr>,
    transfers: Vec<(usize, Owner)>,
    second_left: Vec<Instr>,
    second_right: Vec<Instr>,
}

/// Stage indices; the interaction runs either before or after the first round.
#[derive(Clone, Copy)]
struct Order {
    interaction: usize,
    first_left: usize,
    first_right: usize,
}

impl Order {
    fn new(interaction_first: bool) -> Self {
        if interaction_first {
            Order { interaction: 0, first_left: 1, first_right: 2 }
        } else {
            Order { interaction: 2, first_left: 0, first_right: 1 }
        }
    }
}

fn assemble(p: &OneRoundProtocol, parts: Parts, order: Order) -> Result<Program> {
    let mut fr = Stage::new("first-right", Owner::Right, parts.first_right, vec![order.first_right]);
    fr.transfers = parts.transfers;
    let mut first = vec![
        (order.interaction, Stage::new("interaction", Owner::Interaction, parts.interaction, vec![order.interaction])),
        (order.first_left, Stage::new("first-left", Owner::Left, parts.first_left, vec![order.first_left])),
        (order.first_right, fr),
    ];
    first.sort_by_key(|s| s.0);
    let mut stages: Vec<Stage> = first.into_iter().map(|s| s.1).collect();
    stages.push(Stage::new("second-left", Owner::Left, parts.second_left, vec![0, 1, 2, 3]));
    stages.push(Stage::new("second-right", Owner::Right, parts.second_right, vec![0, 1, 2, 4]));
    let prog = Program {
        d: p.d,
        n_in: p.n_in(),
        n_regs: parts.n_regs,
        owners: parts.owners,
        init: parts.init,
        stages,
        outputs: p.out0.iter().chain(&p.out1).copied().collect(),
    };
    prog.validate()?;
    Ok(prog)
}

fn pair_count(p: &OneRoundProtocol) -> Result<usize> {
    match p.resource {
        Resource::Pairs(k) => Ok(k),
        Resource::Density { .. } => Err(Error::Invalid("surgery needs a resource of maximally entangled pairs".into())),
    }
}

fn exchange(p: &OneRoundProtocol) -> Vec<(usize, Owner)> {
    p.to_right.iter().map(|&q| (q, Owner::Right)).chain(p.to_left.iter().map(|&q| (q, Owner::Left))).collect()
}

/// Stages the frame can be pushed through: Clifford circuits, Paulis, swaps
/// and Bell measurements, no adaptive steps.
fn frame_ready(instrs: &[Instr]) -> bool {
    instrs.iter().all(|i| match i {
        Instr::Circuit { circuit, .. } => circuit.is_clifford(),
        Instr::Pauli { .. } | Instr::Swap(..) | Instr::BellMeasure { .. } => true,
        _ => false,
    })
}

/// Pauli frame bookkeeping for one branch of the cut protocol.
struct FramePlan {
    d: usize,
    n: usize,
    /// Stage index of the first-round stage the frame passes through.
    stage: usize,
    from_right: bool,
    /// Where the error of cut `j` lands before the first round.
    seats: Vec<usize>,
    instrs: Vec<Instr>,
}

impl FramePlan {
    fn single(&self, x: usize, z: usize) -> PauliWord {
        PauliWord::single(self.d, 1, 0, x, z)
    }

    /// Frame `(x, z)` per register after the first round, and the transcript
    /// with the frame stage's Bell outcomes relabelled to the uncut protocol.
    ///
    /// Bell-measuring `(L̃, R̃)` with outcome `M = XᵃZᵇ` leaves `(L, R)` in
    /// `(I ⊗ M†)Φ⁺ = (conj(M) ⊗ I)Φ⁺`. A later Bell measurement on `(u, v)`
    /// carrying `E_u ⊗ E_v` reports `Φ_ab` where the uncut run has `Φ_a'b'`,
    /// `Xᵃ'Zᵇ' ∝ E_u† XᵃZᵇ (E_v†)ᵀ`, and leaves `|ab⟩` instead of `|a'b'⟩`.
    fn resolve(&self, rec: &Record) -> Result<(Vec<usize>, Vec<usize>, Record)> {
        let d = self.d;
        let (mut x, mut z) = (vec![0; self.n], vec![0; self.n]);
        for (j, &q) in self.seats.iter().enumerate() {
            let o = rec.bell(&cut_label(j), d).ok_or_else(|| Error::MalformedProgram("cut outcome not visible".into()))?;
            let m = self.single(o.a, o.b);
            let err = if self.from_right { m.adjoint() } else { m.conj() };
            x[q] = err.x()[0];
            z[q] = err.z()[0];
        }
        let mut entries = rec.entries().to_vec();
        let mut slots = (0..entries.len()).filter(|&k| entries[k].stage == self.stage).collect::<Vec<_>>().into_iter();
        for ins in &self.instrs {
            match ins {
                Instr::Circuit { circuit, targets } => {
                    let sub = PauliWord::new(d, targets.iter().map(|&q| x[q]).collect(), targets.iter().map(|&q| z[q]).collect(), 0)?;
                    let c = conjugate_pauli(&CliffordCircuit::new((**circuit).clone())?, &sub)?;
                    for (j, &q) in targets.iter().enumerate() {
                        x[q] = c.x()[j];
                        z[q] = c.z()[j];
                    }
                }
                Instr::Pauli { .. } => {}
                Instr::Swap(a, b) => {
                    x.swap(*a, *b);
                    z.swap(*a, *b);
                }
                Instr::BellMeasure { label, pair: (u, v) } => {
                    let k = slots.next().ok_or_else(|| Error::MalformedProgram(format!("no outcome for {label}")))?;
                    if &entries[k].label != label {
                        return Err(Error::MalformedProgram(format!("transcript order differs at {label}")));
                    }
                    let o = BellOutcome::from_index(d, entries[k].outcome);
                    let eu = self.single(x[*u], z[*u]);
                    let ev = self.single(x[*v], z[*v]);
                    let w = eu.adjoint().mul(&self.single(o.a, o.b))?.mul(&ev.adjoint().transpose())?;
                    let (a2, b2) = (w.x()[0], w.z()[0]);
                    entries[k].outcome = a2 * d + b2;
                    x[*u] = (o.a + d - a2) % d;
                    z[*u] = 0;
                    x[*v] = (o.b + d - b2) % d;
                    z[*v] = 0;
                }
                _ => return Err(Error::NotClifford(format!("{ins:?} in the frame stage"))),
            }
        }
        Ok((x, z, Record::from_entries(entries)))
    }
}

/// Undoes the frame on the registers `regs` after the exchange.
fn correction(plan: Arc<FramePlan>, regs: Vec<usize>) -> Instr {
    Instr::adaptive(move |rec| {
        let (x, z, _) = plan.resolve(rec)?;
        let t: Vec<usize> = regs.iter().copied().filter(|&q| x[q] != 0 || z[q] != 0).collect();
        if t.is_empty() {
            return Ok(Vec::new());
        }
        let w = PauliWord::new(plan.d, t.iter().map(|&q| x[q]).collect(), t.iter().map(|&q| z[q]).collect(), 0)?.adjoint();
        Ok(vec![Instr::Pauli { word: w, targets: t }])
    })
}

/// Exact local form of a protocol whose right (or else left) first-round
/// stage is Clifford. Each pair `(L_j, R_j)` becomes `(L_j, L̃_j)` on the left
/// and `(R̃_j, R_j)` on the right; the interaction Bell-measures `(L̃_j, R̃_j)`.
pub fn clifford_surgery(p: &OneRoundProtocol) -> Result<LocalInteractionProtocol> {
    p.to_program()?;
    let e = pair_count(p)?;
    let d = p.d;
    let n = p.n_regs();
    let from_right = if e == 0 || frame_ready(&p.first_right) {
        true
    } else if frame_ready(&p.first_left) {
        false
    } else {
        return Err(Error::NotClifford("neither first-round stage is a Clifford circuit with Bell measurements".into()));
    };
    // The cut measurements only branch, so they go after the first round.
    let order = Order::new(false);
    let lt = |j: usize| n + j;
    let rt = |j: usize| n + e + j;
    let mut owners = p.initial_owners();
    owners.extend(std::iter::repeat(Owner::Interaction).take(2 * e));
    let pairs: Vec<(usize, usize)> = (0..e).map(|j| (p.l(j), lt(j))).chain((0..e).map(|j| (rt(j), p.r(j)))).collect();
    let plan = Arc::new(FramePlan {
        d,
        n,
        stage: if from_right { order.first_right } else { order.first_left },
        from_right,
        seats: (0..e).map(|j| if from_right { p.r(j) } else { p.l(j) }).collect(),
        instrs: if from_right { p.first_right.clone() } else { p.first_left.clone() },
    });
    let fin = p.final_owners();
    let held = |o: Owner| (0..n).filter(|&q| fin[q] == o).collect::<Vec<_>>();
    let fix: Fix = {
        let plan = plan.clone();
        Arc::new(move |rec| plan.resolve(rec).map(|r| r.2))
    };
    let mut second_left = vec![correction(plan.clone(), held(Owner::Left))];
    second_left.extend(rewire(p.second_left.clone(), &fix));
    let mut second_right = vec![correction(plan, held(Owner::Right))];
    second_right.extend(rewire(p.second_right.clone(), &fix));
    let program = assemble(
        p,
        Parts {
            n_regs: n + 2 * e,
            owners,
            init: vec![Init::Pairs(pairs)],
            interaction: (0..e).map(|j| Instr::bell(cut_label(j), lt(j), rt(j))).collect(),
            first_left: p.first_left.clone(),
            first_right: p.first_right.clone(),
            transfers: exchange(p),
            second_left,
            second_right,
        },
        order,
    )?;
    Ok(LocalInteractionProtocol {
        mode: SurgeryMode::Clifford,
        program,
        pairs: e,
        interaction_left: e,
        interaction_right: e,
        // Fourier (Hadamard for qubits), CNOT and two basis measurements per pair.
        interaction_gates: Some(4 * e),
        broadcast: (0..e).map(cut_label).collect(),
    })
}

/// Unitary family `{U^x}` on `A₀A₁`, both held on the left; `x` is a
/// classical input on the right.
#[derive(Clone, Debug)]
pub struct OneSidedTask {
    pub d: usize,
    pub n_in: usize,
    pub unitaries: Vec<CMat>,
}

impl OneSidedTask {
    pub fn new(d: usize, n_in: usize, unitaries: Vec<CMat>) -> Result<Self> {
        let dim = d.pow(n_in as u32);
        for u in &unitaries {
            if u.nrows() != dim || !linalg::is_unitary(u, 1e-9) {
                return Err(Error::dim("task unitary does not match A₀A₁"));
            }
        }
        Ok(Self { d, n_in, unitaries })
    }
}

fn relabel(ins: &Instr, map: &dyn Fn(usize) -> usize, suffix: &str) -> Result<Instr> {
    let m = |t: &[usize]| t.iter().map(|&q| map(q)).collect::<Vec<_>>();
    Ok(match ins {
        Instr::Circuit { circuit, targets } => Instr::Circuit { circuit: circuit.clone(), targets: m(targets) },
        Instr::Gate { matrix, targets } => Instr::Gate { matrix: matrix.clone(), targets: m(targets) },
        Instr::Pauli { word, targets } => Instr::Pauli { word: word.clone(), targets: m(targets) },
        Instr::Swap(a, b) => Instr::Swap(map(*a), map(*b)),
        Instr::BellMeasure { label, pair } => Instr::bell(format!("{label}#{suffix}"), map(pair.0), map(pair.1)),
        Instr::Measure { label, targets, kraus } => {
            Instr::Measure { label: format!("{label}#{suffix}"), targets: m(targets), kraus: kraus.clone() }
        }
        Instr::Adaptive(_) => return Err(Error::NotOneSided("right first round must be a fixed isometry of its pair halves".into())),
    })
}

/// Qubit task `{I, Z}`: the right party's bit decides whether to flip the phase.
pub fn z_flip_task() -> OneSidedTask {
    OneSidedTask { d: 2, n_in: 1, unitaries: vec![CMat::identity(2, 2), gates::z(2)] }
}

/// Left teleports `A₀` to the right, the right applies `Zˣ` and sends it back
/// for the Pauli correction.
pub fn z_flip_protocol(x: usize) -> Result<OneRoundProtocol> {
    if x > 1 {
        return Err(Error::range(format!("input {x} of 2")));
    }
    let mut p = OneRoundProtocol::new(2, 1, 0, Resource::Pairs(1), 0, 0);
    let (l0, r0) = (p.l(0), p.r(0));
    p.first_left.push(Instr::bell("t", 0, l0));
    p.first_right.push(Instr::Pauli { word: PauliWord::single(2, 1, 0, 0, x), targets: vec![r0] });
    p.to_left = vec![r0];
    p.second_left.push(Instr::adaptive(move |rec| {
        let o = rec.bell("t", 2).ok_or_else(|| Error::MalformedProgram("outcome t not visible".into()))?;
        Ok(vec![Instr::Pauli { word: PauliWord::single(2, 1, 0, o.a, o.b), targets: vec![r0] }])
    }));
    p.out0 = vec![r0];
    Ok(p)
}


/// Local form of `p` (the protocol for input `x` of `task`) with `n_ports`
/// copies on the right.
pub fn pbt_surgery(task: &OneSidedTask, x: usize, p: &OneRoundProtocol, n_ports: usize) -> Result<LocalInteractionProtocol> {
    if x >= task.unitaries.len() {
        return Err(Error::range(format!("input {x} of {}", task.unitaries.len())));
    }
    if p.n1 != 0 || p.n0 != task.n_in || p.d != task.d {
        return Err(Error::NotOneSided("quantum inputs must all sit on the left".into()));
    }
    p.to_program()?;
    let e = pair_count(p)?;
    let d = p.d;
    let n = p.n_regs();
    let ra = p.right_anc;
    let block = 2 * e + ra;
    let v1 = move |j: usize| n + j;
    let start = move |i: usize| n + e + i * block;
    let r0 = p.r(0);
    let ra0 = p.right_anc(0);
    // Right-round registers are R and the right ancillas.
    let copy = move |i: usize, q: usize| {
        if (r0..r0 + e).contains(&q) {
            start(i) + e + (q - r0)
        } else {
            start(i) + 2 * e + (q - ra0)
        }
    };
    let right_regs: Vec<usize> = (0..e).map(|j| p.r(j)).chain((0..ra).map(|j| p.right_anc(j))).collect();

    let params = PBTParams::with_register(d, e, n_ports)?;
    let kraus: Vec<CMat> = build_pgm(params)?.kraus();

    let fin = p.final_owners();
    let mut owners = p.initial_owners();
    for &q in &right_regs {
        owners[q] = fin[q];
    }
    owners.extend(std::iter::repeat(Owner::Interaction).take(e));
    for _ in 0..n_ports {
        owners.extend(std::iter::repeat(Owner::Interaction).take(e));
        owners.extend(std::iter::repeat(Owner::Right).take(e + ra));
    }
    let mut pairs: Vec<(usize, usize)> = (0..e).map(|j| (p.l(j), v1(j))).collect();
    for i in 0..n_ports {
        pairs.extend((0..e).map(|j| (start(i) + j, start(i) + e + j)));
    }
    let mut targets: Vec<usize> = (0..e).map(v1).collect();
    for i in 0..n_ports {
        targets.extend((0..e).map(|j| start(i) + j));
    }

    let mut first_right = Vec::new();
    for i in 0..n_ports {
        for ins in &p.first_right {
            first_right.push(relabel(ins, &|q| copy(i, q), &i.to_string())?);
        }
    }
    let mut transfers = exchange(p);
    transfers.retain(|&(q, o)| o == Owner::Right || !right_regs.contains(&q));
    for i in 0..n_ports {
        transfers.extend(p.to_left.iter().map(|&q| (copy(i, q), Owner::Left)));
    }

    let order = Order::new(true);
    let fix: Fix = Arc::new(move |rec: &Record| {
        let i = rec.get(PORT_LABEL).ok_or_else(|| Error::MalformedProgram("port outcome not visible".into()))?;
        let tag = i.to_string();
        let entries = rec
            .entries()
            .iter()
            .filter_map(|en| {
                if en.stage != order.first_right {
                    return Some(en.clone());
                }
                let (base, k) = en.label.rsplit_once('#')?;
                (k == tag).then(|| {
                    let mut en = en.clone();
                    en.label = base.to_string();
                    en
                })
            })
            .collect();
        Ok(Record::from_entries(entries))
    });
    let pick = |regs: Vec<usize>| {
        Instr::adaptive(move |rec| {
            let i = rec.get(PORT_LABEL).ok_or_else(|| Error::MalformedProgram("port outcome not visible".into()))?;
            Ok(regs.iter().map(|&q| Instr::Swap(copy(i, q), q)).collect())
        })
    };
    let to_left: Vec<usize> = right_regs.iter().copied().filter(|q| p.to_left.contains(q)).collect();
    let stay: Vec<usize> = right_regs.iter().copied().filter(|q| !p.to_left.contains(q)).collect();
    let mut second_left = vec![pick(to_left)];
    second_left.extend(rewire(p.second_left.clone(), &fix));
    let mut second_right = vec![pick(stay)];
    second_right.extend(rewire(p.second_right.clone(), &fix));

    let program = assemble(
        p,
        Parts {
            n_regs: n + e + n_ports * block,
            owners,
            init: vec![Init::Pairs(pairs)],
            interaction: vec![Instr::Measure { label: PORT_LABEL.into(), targets, kraus: Arc::new(kraus) }],
            first_left: p.first_left.clone(),
            first_right,
            transfers,
            second_left,
            second_right,
        },
        order,
    )?;
    Ok(LocalInteractionProtocol {
        mode: SurgeryMode::Pbt { n_ports },
        program,
        pairs: e,
        interaction_left: e,
        interaction_right: n_ports * e,
        interaction_gates: None,
        broadcast: vec![PORT_LABEL.into()],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityReport {
    /// Qudits brought into the interaction.
    pub n_prime: usize,
    pub n0_prime: usize,
    pub n1_prime: usize,
    pub interaction_gate_count: Option<usize>,
    pub resource_pairs: usize,
    /// `n′/2`.
    pub half_n_prime: f64,
    /// For Clifford surgery: `n₀′+n₁′ ≤ 2E_c` and gate count `≤ 4E_c`.
    pub clifford_relations: Option<bool>,
}

pub fn complexity_report(lp: &LocalInteractionProtocol) -> ComplexityReport {
    let n_prime = lp.interaction_qudits();
    let clifford_relations = match lp.mode {
        SurgeryMode::Clifford => {
            Some(n_prime <= 2 * lp.pairs && lp.interaction_gates.is_some_and(|g| g <= 4 * lp.pairs))
        }
        SurgeryMode::Pbt { .. } => None,
    };
    ComplexityReport {
        n_prime,
        n0_prime: lp.interaction_left,
        n1_prime: lp.interaction_right,
        interaction_gate_count: lp.interaction_gates,
        resource_pairs: lp.pairs,
        half_n_prime: n_prime as f64 / 2.0,
        clifford_relations,
    }
}

/// Largest distance to `reference` over the broadcast outcomes, each
/// conditional Choi state renormalised.
pub fn worst_broadcast_distance(lp: &LocalInteractionProtocol, reference: &LowRank) -> Result<f64> {
    let input = DenseState::max_entangled(lp.program.d, lp.program.n_in)?;
    Ok(broadcast_distance(lp, &lp.program.run_branches(&input)?, reference))
}

fn broadcast_distance(lp: &LocalInteractionProtocol, branches: &[Branch], reference: &LowRank) -> f64 {
    let mut groups: BTreeMap<Vec<Option<usize>>, (Vec<&CMat>, f64)> = BTreeMap::new();
    for b in branches {
        let key = lp.broadcast.iter().map(|l| b.record.get(l)).collect();
        let g = groups.entry(key).or_default();
        g.0.push(&b.factor);
        g.1 += b.prob;
    }
    let norm = reference.trace().sqrt();
    let r = &reference.factor / C64::new(norm, 0.0);
    let mut worst: f64 = 0.0;
    for (factors, prob) in groups.values() {
        let v = concat(r.nrows(), factors) / C64::new(prob.sqrt(), 0.0);
        worst = worst.max(linalg::low_rank_trace_distance(&v, &r));
    }
    worst
}

fn concat(rows: usize, factors: &[&CMat]) -> CMat {
    let cols: usize = factors.iter().map(|f| f.ncols()).sum();
    let mut v = CMat::zeros(rows, cols);
    let mut c = 0;
    for f in factors {
        v.columns_mut(c, f.ncols()).copy_from(f);
        c += f.ncols();
    }
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct SurgeryReport {
    pub mode: SurgeryMode,
    /// Choi distance between the cut protocol and the original.
    pub choi_distance: f64,
    /// Clifford mode only: worst distance over broadcast outcomes.
    pub worst_broadcast_distance: Option<f64>,
    pub exact: bool,
    pub complexity: ComplexityReport,
}

pub fn surgery_report(original: &OneRoundProtocol, lp: &LocalInteractionProtocol) -> Result<SurgeryReport> {
    let reference = original.choi()?;
    let (dist, worst) = match lp.mode {
        SurgeryMode::Clifford => {
            // One pass over the outcome tree serves both checks.
            let input = DenseState::max_entangled(lp.program.d, lp.program.n_in)?;
            let branches = lp.program.run_branches(&input)?;
            let all: Vec<&CMat> = branches.iter().map(|b| &b.factor).collect();
            let choi = LowRank { d: reference.d, n: reference.n, factor: shrink(&concat(reference.factor.nrows(), &all)) };
            (choi.distance(&reference), Some(broadcast_distance(lp, &branches, &reference)))
        }
        SurgeryMode::Pbt { .. } => (lp.choi()?.distance(&reference), None),
    };
    Ok(SurgeryReport {
        mode: lp.mode,
        choi_distance: dist,
        worst_broadcast_distance: worst,
        exact: dist < 1e-9 && worst.map_or(true, |w| w < 1e-9),
        complexity: complexity_report(lp),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Circuit, GateKind};
    use crate::protocol::{clifford_protocol, verify_implements};
    use crate::qudit::gates;
    use crate::tableau::random_clifford;
    use crate::teleport::pbt_entanglement_fidelity;

    fn t_gate() -> CMat {
        let mut t = CMat::identity(2, 2);
        t[(1, 1)] = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        t
    }

    fn exact(p: &OneRoundProtocol) -> LocalInteractionProtocol {
        let lp = clifford_surgery(p).unwrap();
        let r = surgery_report(p, &lp).unwrap();
        assert!(r.choi_distance < 1e-9, "{}", r.choi_distance);
        assert!(r.worst_broadcast_distance.unwrap() < 1e-9, "{:?}", r.worst_broadcast_distance);
        assert!(r.exact);
        lp
    }

    #[test]
    fn swap_surgery() {
        let c = CliffordCircuit::swap(2).unwrap();
        let p = clifford_protocol(&c, (1, 1), None).unwrap();
        let lp = exact(&p);
        assert!(verify_implements(&p, &c.unitary().unwrap(), 1e-9).unwrap().pass);
        let cr = complexity_report(&lp);
        assert_eq!((cr.n_prime, cr.interaction_gate_count, cr.resource_pairs), (2, Some(4), 1));
        assert_eq!(cr.half_n_prime, 1.0);
        assert_eq!(cr.clifford_relations, Some(true));
    }

    #[test]
    fn no_pairs_no_interaction() {
        let mut p = OneRoundProtocol::new(2, 1, 1, Resource::Pairs(0), 0, 0);
        p.first_left.push(Instr::gate(gates::x(2), vec![0]));
        // Non-Clifford is fine when there is nothing to cut.
        p.second_right.push(Instr::gate(t_gate(), vec![1]));
        let lp = exact(&p);
        assert!(lp.program.stages.iter().find(|s| s.name == "interaction").unwrap().instrs.is_empty());
        assert_eq!(complexity_report(&lp).n_prime, 0);
    }

    #[test]
    fn random_two_pair_clifford() {
        let (seed, c) = (1..)
            .map(|s| (s, random_clifford(4, 2, s).unwrap()))
            .find(|(_, c)| {
                let dec = crate::protocol::InteractionDecomposition::reduce(c.circuit(), 2, 2).unwrap();
                let s = dec.summary();
                s.n0_prime == 2 && s.n1_prime == 2
            })
            .unwrap();
        let p = clifford_protocol(&c, (2, 2), None).unwrap();
        assert_eq!(p.account().unwrap().ebit_count, Some(2), "seed {seed}");
        let lp = exact(&p);
        let cr = complexity_report(&lp);
        assert_eq!(cr.n_prime, 4);
        assert!(cr.interaction_gate_count.unwrap() <= 8);
    }

    /// Odd d, and Bell measurements inside the frame stage (teleporting right
    /// to left).
    #[test]
    fn qutrit_protocols() {
        let cnot = CliffordCircuit::new(Circuit::new(3, 2).unwrap().gate(GateKind::Cnot, &[0, 1]).unwrap()).unwrap();
        exact(&clifford_protocol(&cnot, (1, 1), None).unwrap());
        let c = random_clifford(3, 3, 4).unwrap();
        let p = clifford_protocol(&c, (2, 1), None).unwrap();
        assert!(p.first_right.iter().any(|i| matches!(i, Instr::BellMeasure { .. })));
        exact(&p);
    }

    /// Right teleports `T|ψ⟩` to the left: the right stage is not Clifford, so
    /// the frame goes through the (empty) left stage.
    fn teleport_t(left_t: bool) -> OneRoundProtocol {
        let mut p = OneRoundProtocol::new(2, 1, 1, Resource::Pairs(1), 0, 0);
        let (a1, r0, l0) = (p.a1(0), p.r(0), p.l(0));
        if left_t {
            p.first_left.push(Instr::gate(t_gate(), vec![0]));
        }
        p.first_right.push(Instr::gate(t_gate(), vec![a1]));
        p.first_right.push(Instr::bell("m", a1, r0));
        p.second_left.push(Instr::adaptive(move |rec| {
            let o = rec.bell("m", 2).unwrap();
            Ok(vec![Instr::Pauli { word: PauliWord::single(2, 1, 0, o.a, o.b), targets: vec![l0] }])
        }));
        p.out0 = vec![0, l0];
        p.out1 = vec![];
        p
    }

    #[test]
    fn frame_on_the_left() {
        let p = teleport_t(false);
        let target = CMat::identity(2, 2).kronecker(&t_gate());
        assert!(verify_implements(&p, &target, 1e-9).unwrap().pass);
        exact(&p);
        assert!(matches!(clifford_surgery(&teleport_t(true)), Err(Error::NotClifford(_))));
    }

    fn z_task() -> OneSidedTask {
        z_flip_task()
    }

    fn z_protocol(x: usize) -> OneRoundProtocol {
        z_flip_protocol(x).unwrap()
    }

    #[test]
    fn pbt_surgery_sweep() {
        let task = z_task();
        for x in 0..2 {
            let p = z_protocol(x);
            assert!(verify_implements(&p, &task.unitaries[x], 1e-9).unwrap().pass);
            let mut last = f64::INFINITY;
            for n in [1, 2, 4, 8] {
                let lp = pbt_surgery(&task, x, &p, n).unwrap();
                assert_eq!(lp.interaction_qudits(), 1 + n);
                let dist = surgery_report(&p, &lp).unwrap().choi_distance;
                // The cut pair becomes a port-teleportation channel ahead of Zˣ.
                let f = pbt_entanglement_fidelity(PBTParams::new(2, n).unwrap()).unwrap();
                assert!((dist - (1.0 - f)).abs() < 1e-9, "x={x} N={n}: {dist} vs {}", 1.0 - f);
                assert!(dist <= last + 1e-12);
                last = dist;
                if n == 1 {
                    assert!((dist - 0.75).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn pbt_surgery_rejects() {
        let task = z_task();
        let two_sided = teleport_t(false);
        assert!(matches!(pbt_surgery(&task, 0, &two_sided, 2), Err(Error::NotOneSided(_))));
        let mut p = z_protocol(1);
        p.first_right = vec![Instr::adaptive(|_| Ok(vec![]))];
        assert!(matches!(pbt_surgery(&task, 1, &p, 2), Err(Error::NotOneSided(_))));
        assert!(pbt_surgery(&task, 2, &z_protocol(0), 2).is_err());
    }
}
