//! Branching executor shared by every protocol shape in the crate.
//!
//! A [`Program`] is a list of stages, each owned by a party. Measurements fork
//! the run over all outcomes (forced-outcome sweep) and the unnormalised branch
//! states are accumulated as a low-rank factor of the output operator, so the
//! branch weights come for free. Global qudit layout:
//! `[inputs | reference | other registers | purifiers]`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::linalg::{self, compress_factor, CMat, C64, ZERO};
use crate::pauli::{zeta, PauliWord};
use crate::qudit::{bell_kraus, gates, kernel, BellOutcome, DenseState, DensityOperator};

/// Branches with squared norm below this are dropped.
const PRUNE: f64 = 1e-20;
const MAX_COLUMNS: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Owner {
    Left,
    Right,
    Interaction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordEntry {
    pub label: String,
    pub outcome: usize,
    pub stage: usize,
}

/// Classical transcript of one branch.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Record {
    entries: Vec<RecordEntry>,
}

impl Record {
    pub fn entries(&self) -> &[RecordEntry] {
        &self.entries
    }

    /// Latest outcome recorded under `label`.
    pub fn get(&self, label: &str) -> Option<usize> {
        self.entries.iter().rev().find(|e| e.label == label).map(|e| e.outcome)
    }

    pub fn bell(&self, label: &str, d: usize) -> Option<BellOutcome> {
        self.get(label).map(|k| BellOutcome::from_index(d, k))
    }

    pub(crate) fn from_entries(entries: Vec<RecordEntry>) -> Record {
        Record { entries }
    }

    fn visible(&self, stages: &[usize]) -> Record {
        Record { entries: self.entries.iter().filter(|e| stages.contains(&e.stage)).cloned().collect() }
    }
}

pub type AdaptiveFn = Arc<dyn Fn(&Record) -> Result<Vec<Instr>> + Send + Sync>;

#[derive(Clone)]
pub enum Instr {
    /// A circuit whose qudit `j` is register `targets[j]`.
    Circuit { circuit: Arc<Circuit>, targets: Vec<usize> },
    Gate { matrix: Arc<CMat>, targets: Vec<usize> },
    Pauli { word: PauliWord, targets: Vec<usize> },
    Swap(usize, usize),
    /// Generalized Bell measurement; the pair is left in `|a⟩|b⟩`.
    BellMeasure { label: String, pair: (usize, usize) },
    /// Instrument with Kraus operators indexed by outcome.
    Measure { label: String, targets: Vec<usize>, kraus: Arc<Vec<CMat>> },
    /// Instructions chosen from the transcript visible to the stage.
    Adaptive(AdaptiveFn),
}

impl Instr {
    pub fn circuit(c: Circuit, targets: Vec<usize>) -> Instr {
        Instr::Circuit { circuit: Arc::new(c), targets }
    }

    pub fn gate(m: CMat, targets: Vec<usize>) -> Instr {
        Instr::Gate { matrix: Arc::new(m), targets }
    }

    pub fn bell(label: impl Into<String>, a: usize, b: usize) -> Instr {
        Instr::BellMeasure { label: label.into(), pair: (a, b) }
    }

    pub fn adaptive(f: impl Fn(&Record) -> Result<Vec<Instr>> + Send + Sync + 'static) -> Instr {
        Instr::Adaptive(Arc::new(f))
    }

    /// Registers touched (empty for adaptive instructions until expanded).
    pub fn targets(&self) -> Vec<usize> {
        match self {
            Instr::Circuit { targets, .. }
            | Instr::Gate { targets, .. }
            | Instr::Pauli { targets, .. }
            | Instr::Measure { targets, .. } => targets.clone(),
            Instr::Swap(a, b) => vec![*a, *b],
            Instr::BellMeasure { pair, .. } => vec![pair.0, pair.1],
            Instr::Adaptive(_) => Vec::new(),
        }
    }

    /// Clifford operations and Bell measurements.
    pub fn is_clifford(&self) -> bool {
        match self {
            Instr::Circuit { circuit, .. } => circuit.is_clifford(),
            Instr::Pauli { .. } | Instr::Swap(..) | Instr::BellMeasure { .. } => true,
            _ => false,
        }
    }
}

impl fmt::Debug for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Circuit { circuit, targets } => write!(f, "Circuit({} ops on {targets:?})", circuit.ops().len()),
            Instr::Gate { matrix, targets } => write!(f, "Gate({}x{} on {targets:?})", matrix.nrows(), matrix.ncols()),
            Instr::Pauli { word, targets } => write!(f, "Pauli({word} on {targets:?})"),
            Instr::Swap(a, b) => write!(f, "Swap({a}, {b})"),
            Instr::BellMeasure { label, pair } => write!(f, "Bell[{label}]{pair:?}"),
            Instr::Measure { label, targets, kraus } => write!(f, "Measure[{label}]({} outcomes on {targets:?})", kraus.len()),
            Instr::Adaptive(_) => write!(f, "Adaptive"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Stage {
    pub name: String,
    pub owner: Owner,
    pub instrs: Vec<Instr>,
    /// Stages whose records this stage may read (normally including itself).
    pub sees: Vec<usize>,
    /// Ownership changes applied once the stage is done.
    pub transfers: Vec<(usize, Owner)>,
}

impl Stage {
    pub fn new(name: &str, owner: Owner, instrs: Vec<Instr>, sees: Vec<usize>) -> Self {
        Self { name: name.into(), owner, instrs, sees, transfers: Vec::new() }
    }
}

/// Preparation of non-input registers; everything else starts in `|0⟩`.
#[derive(Clone, Debug)]
pub enum Init {
    /// `Φ⁺` on each `(a, b)`.
    Pairs(Vec<(usize, usize)>),
    /// Mixed state on `qudits` (in this order), purified onto fresh qudits.
    Mixed { qudits: Vec<usize>, rho: DensityOperator },
}

#[derive(Clone, Debug)]
pub struct Program {
    pub d: usize,
    /// Input qudits are registers `0..n_in`.
    pub n_in: usize,
    pub n_regs: usize,
    pub owners: Vec<Owner>,
    pub init: Vec<Init>,
    pub stages: Vec<Stage>,
    pub outputs: Vec<usize>,
}

/// Unnormalised output `V V†` on outputs ⊗ reference.
#[derive(Clone, Debug)]
pub struct LowRank {
    pub d: usize,
    pub n: usize,
    pub factor: CMat,
}

impl LowRank {
    pub fn trace(&self) -> f64 {
        self.factor.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn matrix(&self) -> CMat {
        &self.factor * self.factor.adjoint()
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        let dim = linalg::dim_u128(self.d, self.n);
        if dim > 1 << 12 {
            return Err(Error::CapExceeded { what: "output density operator".into(), dim, cap: 1 << 12 });
        }
        Ok(DensityOperator::from_raw(self.d, self.n, self.matrix()))
    }

    pub fn distance(&self, other: &LowRank) -> f64 {
        linalg::low_rank_trace_distance(&self.factor, &other.factor)
    }

    /// `⟨v|ρ|v⟩`.
    pub fn overlap(&self, v: &CMat) -> f64 {
        (v.adjoint() * &self.factor).iter().map(|z| z.norm_sqr()).sum()
    }
}

/// One leaf of the outcome tree.
#[derive(Clone, Debug)]
pub struct Branch {
    pub record: Record,
    pub prob: f64,
    /// Unnormalised factor; its Frobenius norm squared is `prob`.
    pub factor: CMat,
}

/// Orthogonal factor with `V V†` unchanged, via whichever Gram matrix is smaller.
pub(crate) fn shrink(v: &CMat) -> CMat {
    // Measured qudits sit in basis states, so most columns are exactly zero.
    let live: Vec<usize> = (0..v.ncols()).filter(|&c| v.column(c).iter().any(|z| z.norm_sqr() > 0.0)).collect();
    if live.len() < v.ncols() {
        return shrink(&v.select_columns(&live));
    }
    if v.ncols() <= v.nrows() {
        return compress_factor(v, 1e-24);
    }
    let (vals, vecs) = linalg::hermitian_eig(&(v * v.adjoint()));
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 1e-24).collect();
    let mut out = CMat::zeros(v.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &(vecs.column(i) * C64::new(vals[i].sqrt(), 0.0)));
    }
    out
}

fn concat(a: &CMat, b: &CMat) -> CMat {
    let mut w = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    w.columns_mut(0, a.ncols()).copy_from(a);
    w.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    w
}

/// Global state with measured-out qudits parked as classical digits, so later
/// instructions run on a vector `d^k` times smaller.
#[derive(Clone)]
struct Psi {
    amps: Vec<C64>,
    /// Digit of each parked physical qudit; `None` while it lives in `amps`.
    parked: Vec<Option<usize>>,
}

impl Psi {
    fn n_live(&self) -> usize {
        self.parked.iter().filter(|p| p.is_none()).count()
    }

    /// Index of live qudit `q` within `amps`.
    fn pos(&self, q: usize) -> usize {
        self.parked[..q].iter().filter(|p| p.is_none()).count()
    }

    fn unpark(&mut self, d: usize, q: usize) {
        let Some(k) = self.parked[q] else { return };
        let low = d.pow((self.n_live() - self.pos(q)) as u32);
        let mut out = vec![ZERO; self.amps.len() * d];
        for (i, &a) in self.amps.iter().enumerate() {
            out[((i / low) * d + k) * low + i % low] = a;
        }
        self.amps = out;
        self.parked[q] = None;
    }

    /// Parks each of `qs` that sits in a single basis state.
    fn park(&mut self, d: usize, qs: &[usize]) {
        for &q in qs {
            if self.parked[q].is_some() {
                continue;
            }
            let low = d.pow((self.n_live() - 1 - self.pos(q)) as u32);
            let mut digit = None;
            let definite = self.amps.iter().enumerate().filter(|(_, a)| **a != ZERO).all(|(i, _)| {
                let k = (i / low) % d;
                *digit.get_or_insert(k) == k
            });
            let (true, Some(k)) = (definite, digit) else { continue };
            self.amps = (0..self.amps.len() / d).map(|j| self.amps[((j / low) * d + k) * low + j % low]).collect();
            self.parked[q] = Some(k);
        }
    }
}

struct Exec<'a> {
    prog: &'a Program,
    d: usize,
    map: Vec<usize>,
    keep: Vec<usize>,
    owners_at: Vec<Vec<Owner>>,
    acc: Option<CMat>,
    branches: Option<Vec<Branch>>,
    leaves: usize,
}

impl Exec<'_> {
    fn check_owner(&self, stage: usize, ins: &Instr) -> Result<()> {
        let owner = self.prog.stages[stage].owner;
        for t in ins.targets() {
            if t >= self.prog.n_regs {
                return Err(Error::range(format!("register {t} of {}", self.prog.n_regs)));
            }
            if self.owners_at[stage][t] != owner {
                return Err(Error::Ownership(format!(
                    "stage '{}' ({owner:?}) touches register {t} held by {:?}",
                    self.prog.stages[stage].name, self.owners_at[stage][t]
                )));
            }
        }
        Ok(())
    }

    fn g(&self, t: &[usize]) -> Vec<usize> {
        t.iter().map(|&q| self.map[q]).collect()
    }

    /// Live positions of `targets`, unparking any that are parked.
    fn live(&self, psi: &mut Psi, targets: &[usize]) -> Vec<usize> {
        for &q in targets {
            psi.unpark(self.d, q);
        }
        targets.iter().map(|&q| psi.pos(q)).collect()
    }

    fn apply(&self, psi: &mut Psi, m: &CMat, targets: &[usize]) -> Result<()> {
        kernel::check_targets(self.prog.n_regs, targets)?;
        let pos = self.live(psi, &self.g(targets));
        let n = psi.n_live();
        kernel::apply_matrix(&mut psi.amps, self.d, n, m, &pos)
    }

    fn dfs(&mut self, mut amps: Psi, mut stack: Vec<(usize, Instr)>, record: Record) -> Result<()> {
        let d = self.d;
        while let Some((s, ins)) = stack.pop() {
            match ins {
                Instr::Circuit { circuit, targets } => {
                    if circuit.n() != targets.len() || circuit.d() != d {
                        return Err(Error::dim("circuit does not match its targets"));
                    }
                    if circuit.ops().len() > 1 && d.pow(targets.len() as u32) <= 32 {
                        // One pass over the state instead of one per gate.
                        self.apply(&mut amps, &circuit.unitary()?, &targets)?;
                    } else {
                        for op in circuit.ops() {
                            let t: Vec<usize> = op.qudits.iter().map(|&q| targets[q]).collect();
                            self.apply(&mut amps, &op.matrix(d), &t)?;
                        }
                    }
                }
                Instr::Gate { matrix, targets } => self.apply(&mut amps, &matrix, &targets)?,
                Instr::Pauli { word, targets } => {
                    if word.n() != targets.len() {
                        return Err(Error::dim("Pauli word does not match its targets"));
                    }
                    for (j, &t) in targets.iter().enumerate() {
                        if word.x()[j] != 0 || word.z()[j] != 0 {
                            self.apply(&mut amps, &word.factor_matrix(j), &[t])?;
                        }
                    }
                    let ph = zeta(d, word.phase());
                    amps.amps.iter_mut().for_each(|a| *a *= ph);
                }
                Instr::Swap(a, b) => {
                    kernel::check_targets(self.prog.n_regs, &[a, b])?;
                    let pos = self.live(&mut amps, &self.g(&[a, b]));
                    let n = amps.n_live();
                    kernel::swap_qudits(&mut amps.amps, d, n, pos[0], pos[1])?
                }
                Instr::BellMeasure { label, pair } => {
                    let kraus = Arc::new(bell_kraus(d));
                    return self.fork(amps, stack, record, s, label, vec![pair.0, pair.1], kraus);
                }
                Instr::Measure { label, targets, kraus } => {
                    return self.fork(amps, stack, record, s, label, targets, kraus);
                }
                Instr::Adaptive(f) => {
                    let view = record.visible(&self.prog.stages[s].sees);
                    let list = f(&view)?;
                    for i in list.into_iter().rev() {
                        self.check_owner(s, &i)?;
                        stack.push((s, i));
                    }
                }
            }
        }
        self.finish(amps, record)
    }

    #[allow(clippy::too_many_arguments)]
    fn fork(
        &mut self,
        amps: Psi,
        stack: Vec<(usize, Instr)>,
        record: Record,
        s: usize,
        label: String,
        targets: Vec<usize>,
        kraus: Arc<Vec<CMat>>,
    ) -> Result<()> {
        for (o, k) in kraus.iter().enumerate() {
            let mut b = amps.clone();
            self.apply(&mut b, k, &targets)?;
            if b.amps.iter().map(|z| z.norm_sqr()).sum::<f64>() < PRUNE {
                continue;
            }
            b.park(self.d, &self.g(&targets));
            let mut r = record.clone();
            r.entries.push(RecordEntry { label: label.clone(), outcome: o, stage: s });
            self.dfs(b, stack.clone(), r)?;
        }
        Ok(())
    }

    fn finish(&mut self, mut psi: Psi, record: Record) -> Result<()> {
        self.leaves += 1;
        // Parked qudits outside `keep` only drop zero columns, which leaves `V V†` alone.
        let pos = self.live(&mut psi, &self.keep);
        let v = shrink(&kernel::split_matrix(&psi.amps, self.d, psi.n_live(), &pos)?);
        if let Some(list) = &mut self.branches {
            let prob = v.iter().map(|z| z.norm_sqr()).sum();
            list.push(Branch { record, prob, factor: v });
            return Ok(());
        }
        let next = match self.acc.take() {
            None => v,
            Some(a) => concat(&a, &v),
        };
        self.acc = Some(if next.ncols() > MAX_COLUMNS { shrink(&next) } else { next });
        Ok(())
    }
}

/// Run statistics alongside the output.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub output: LowRank,
    pub leaves: usize,
}

impl Program {
    /// Static checks: register ranges, initial ownership, instruction ownership.
    pub fn validate(&self) -> Result<Vec<Vec<Owner>>> {
        if self.owners.len() != self.n_regs || self.n_in > self.n_regs {
            return Err(Error::MalformedProgram("ownership table does not cover the registers".into()));
        }
        let mut seen = vec![false; self.n_regs];
        for init in &self.init {
            let qs: Vec<usize> = match init {
                Init::Pairs(p) => p.iter().flat_map(|&(a, b)| [a, b]).collect(),
                Init::Mixed { qudits, rho } => {
                    if rho.n() != qudits.len() || rho.d() != self.d {
                        return Err(Error::dim("mixed preparation size"));
                    }
                    qudits.clone()
                }
            };
            for q in qs {
                if q < self.n_in || q >= self.n_regs || seen[q] {
                    return Err(Error::MalformedProgram(format!("register {q} prepared twice or is an input")));
                }
                seen[q] = true;
            }
        }
        kernel::check_targets(self.n_regs, &self.outputs)?;
        let mut owners = self.owners.clone();
        let mut table = Vec::with_capacity(self.stages.len());
        for (s, st) in self.stages.iter().enumerate() {
            for &v in &st.sees {
                if v > s {
                    return Err(Error::MalformedProgram(format!("stage {s} reads later stage {v}")));
                }
            }
            table.push(owners.clone());
            for ins in &st.instrs {
                for t in ins.targets() {
                    if t >= self.n_regs {
                        return Err(Error::range(format!("register {t} of {}", self.n_regs)));
                    }
                    if owners[t] != st.owner {
                        return Err(Error::Ownership(format!(
                            "stage '{}' ({:?}) touches register {t} held by {:?}",
                            st.name, st.owner, owners[t]
                        )));
                    }
                }
            }
            for &(q, o) in &st.transfers {
                if q >= self.n_regs {
                    return Err(Error::range(format!("transfer of register {q}")));
                }
                owners[q] = o;
            }
        }
        Ok(table)
    }

    fn layout(&self, n_ref: usize) -> (Vec<usize>, usize) {
        let map = (0..self.n_regs).map(|i| if i < self.n_in { i } else { i + n_ref }).collect();
        (map, self.n_regs + n_ref)
    }

    /// Initial global state: `input ⊗ prepared registers ⊗ purifiers`.
    fn initial(&self, input: &DenseState) -> Result<(Vec<C64>, usize, usize)> {
        let d = self.d;
        if input.d() != d || input.n() < self.n_in {
            return Err(Error::dim(format!("input has {} qudits, program needs at least {}", input.n(), self.n_in)));
        }
        let n_ref = input.n() - self.n_in;
        let rest = self.n_regs - self.n_in;
        // Blocks in preparation order; `order` lists which register each qudit is.
        let mut order: Vec<usize> = Vec::new();
        let mut purifier_count = 0;
        let mut block = DenseState::zero(d, 0)?;
        let mut prepared = vec![false; self.n_regs];
        for init in &self.init {
            match init {
                Init::Pairs(pairs) => {
                    for &(a, b) in pairs {
                        block = block.tensor(&DenseState::max_entangled(d, 1)?)?;
                        order.extend([a, b]);
                        prepared[a] = true;
                        prepared[b] = true;
                    }
                }
                Init::Mixed { qudits, rho } => {
                    let (vals, vecs) = linalg::hermitian_eig(rho.matrix());
                    let kept: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 1e-14).collect();
                    let mut p = 0;
                    while d.pow(p as u32) < kept.len() {
                        p += 1;
                    }
                    let dim = rho.dim();
                    let pd = d.pow(p as u32);
                    let mut amps = vec![C64::new(0.0, 0.0); dim * pd];
                    for (k, &i) in kept.iter().enumerate() {
                        let s = vals[i].sqrt();
                        for r in 0..dim {
                            amps[r * pd + k] = vecs[(r, i)] * s;
                        }
                    }
                    block = block.tensor(&DenseState::normalized(d, qudits.len() + p, amps)?)?;
                    order.extend(qudits.iter().copied());
                    for q in qudits {
                        prepared[*q] = true;
                    }
                    for j in 0..p {
                        order.push(self.n_regs + purifier_count + j);
                    }
                    purifier_count += p;
                }
            }
        }
        for q in self.n_in..self.n_regs {
            if !prepared[q] {
                block = block.tensor(&DenseState::zero(d, 1)?)?;
                order.push(q);
            }
        }
        let n_tot = input.n() + rest + purifier_count;
        if linalg::dim_u128(d, n_tot) > 1 << 22 {
            return Err(Error::CapExceeded { what: "protocol state".into(), dim: linalg::dim_u128(d, n_tot), cap: 1 << 22 });
        }
        // Sort block qudits into [registers ascending, purifiers].
        let mut idx: Vec<usize> = (0..order.len()).collect();
        idx.sort_by_key(|&i| order[i]);
        let block = block.permute(&idx)?;
        let full = input.tensor(&block)?;
        Ok((full.into_amplitudes(), n_tot, n_ref))
    }

    fn exec(&self, input: &DenseState, per_branch: bool) -> Result<(Exec<'_>, Vec<usize>)> {
        let owners_at = self.validate()?;
        let (amps, n_tot, n_ref) = self.initial(input)?;
        let (map, _) = self.layout(n_ref);
        let mut keep: Vec<usize> = self.outputs.iter().map(|&q| map[q]).collect();
        keep.extend(self.n_in..self.n_in + n_ref);
        let mut ex = Exec {
            prog: self,
            d: self.d,
            map,
            keep: keep.clone(),
            owners_at,
            acc: None,
            branches: if per_branch { Some(Vec::new()) } else { None },
            leaves: 0,
        };
        let mut stack = Vec::new();
        for (s, st) in self.stages.iter().enumerate().rev() {
            for ins in st.instrs.iter().rev() {
                stack.push((s, ins.clone()));
            }
        }
        ex.dfs(Psi { amps, parked: vec![None; n_tot] }, stack, Record::default())?;
        Ok((ex, keep))
    }

    /// Output on `outputs ⊗ reference`, where the reference is whatever part of
    /// `input` lies beyond the first `n_in` qudits.
    pub fn run(&self, input: &DenseState) -> Result<RunOutput> {
        let (ex, keep) = self.exec(input, false)?;
        let rows = self.d.pow(keep.len() as u32);
        let factor = ex.acc.map(|a| shrink(&a)).unwrap_or_else(|| CMat::zeros(rows, 0));
        Ok(RunOutput { output: LowRank { d: self.d, n: keep.len(), factor }, leaves: ex.leaves })
    }

    /// Every leaf of the outcome tree with its transcript.
    pub fn run_branches(&self, input: &DenseState) -> Result<Vec<Branch>> {
        let (ex, _) = self.exec(input, true)?;
        Ok(ex.branches.unwrap_or_default())
    }

    /// Output for half of `Φ⁺` on the inputs: the Choi operator (output ⊗ reference).
    pub fn choi(&self) -> Result<LowRank> {
        Ok(self.run(&DenseState::max_entangled(self.d, self.n_in)?)?.output)
    }
}

/// `(U ⊗ I)|Φ⁺⟩` as a single-column factor.
pub fn unitary_choi_vector(d: usize, n: usize, u: &CMat) -> Result<LowRank> {
    let phi = DenseState::max_entangled(d, n)?;
    let targets: Vec<usize> = (0..n).collect();
    let v = phi.apply_gate(u, &targets)?;
    Ok(LowRank { d, n: 2 * n, factor: v.column() })
}

/// Identity unitary on `n` qudits.
pub fn identity_unitary(d: usize, n: usize) -> CMat {
    let dim = d.pow(n as u32);
    CMat::identity(dim, dim)
}

pub(crate) fn kron_all(ms: &[CMat]) -> CMat {
    ms.iter().fold(CMat::identity(1, 1), |acc, m| acc.kronecker(m))
}

pub(crate) fn weyl_word(d: usize, outcomes: &[BellOutcome]) -> CMat {
    kron_all(&outcomes.iter().map(|o| gates::weyl(d, o.a, o.b)).collect::<Vec<_>>())
}
