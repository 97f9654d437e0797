//! The one-round shape: first-round local stages, one simultaneous exchange of
//! registers, second-round local stages.

use serde::Serialize;

use super::exec::{unitary_choi_vector, Init, Instr, LowRank, Owner, Program, Stage};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::qudit::{mutual_information, DenseState, DensityOperator, Entropy};

#[derive(Clone, Debug)]
pub enum Resource {
    /// `k` maximally entangled qudit pairs `(L_j, R_j)`.
    Pairs(usize),
    /// Arbitrary state on `L ⊗ R` with `n_l` qudits on the left.
    Density { rho: DensityOperator, n_l: usize },
}

impl Resource {
    pub fn n_l(&self) -> usize {
        match self {
            Resource::Pairs(k) => *k,
            Resource::Density { n_l, .. } => *n_l,
        }
    }

    pub fn n_r(&self) -> usize {
        match self {
            Resource::Pairs(k) => *k,
            Resource::Density { rho, n_l } => rho.n() - n_l,
        }
    }

    /// Density operator on `L₁…L_k R₁…R_k`.
    pub fn density(&self, d: usize) -> Result<DensityOperator> {
        match self {
            Resource::Pairs(k) => Ok(DenseState::max_entangled(d, *k)?.to_density()),
            Resource::Density { rho, .. } => Ok(rho.clone()),
        }
    }

    /// `ρ_L ⊗ ρ_R` built from the marginals.
    pub fn product_replacement(&self, d: usize) -> Result<Resource> {
        let rho = self.density(d)?;
        let (nl, nr) = (self.n_l(), self.n_r());
        let l = rho.partial_trace(&(0..nl).collect::<Vec<_>>())?;
        let r = rho.partial_trace(&(nl..nl + nr).collect::<Vec<_>>())?;
        Ok(Resource::Density { rho: l.tensor(&r)?, n_l: nl })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResourceAccount {
    /// Number of maximally entangled pairs, when the resource is in pair form.
    pub ebit_count: Option<usize>,
    pub mutual_information: Entropy,
}

impl ResourceAccount {
    pub fn of(resource: &Resource, d: usize) -> Result<Self> {
        match resource {
            Resource::Pairs(k) => {
                // I(L:R) is additive over the tensor factors.
                let pair = DenseState::max_entangled(d, 1)?.to_density();
                let one = mutual_information(&pair, &[0], &[1])?;
                Ok(Self { ebit_count: Some(*k), mutual_information: Entropy::from_nats(one.nats * *k as f64) })
            }
            Resource::Density { rho, n_l } => {
                let l: Vec<usize> = (0..*n_l).collect();
                let r: Vec<usize> = (*n_l..rho.n()).collect();
                Ok(Self { ebit_count: None, mutual_information: mutual_information(rho, &l, &r)? })
            }
        }
    }
}

/// Register numbering: `A₀ | A₁ | L | R | left ancillas | right ancillas`.
#[derive(Clone, Debug)]
pub struct OneRoundProtocol {
    pub d: usize,
    pub n0: usize,
    pub n1: usize,
    pub resource: Resource,
    pub left_anc: usize,
    pub right_anc: usize,
    pub first_left: Vec<Instr>,
    pub first_right: Vec<Instr>,
    /// Registers that cross from the left to the right in the exchange.
    pub to_right: Vec<usize>,
    pub to_left: Vec<usize>,
    pub second_left: Vec<Instr>,
    pub second_right: Vec<Instr>,
    /// `B₀` (held on the left at the end) and `B₁`.
    pub out0: Vec<usize>,
    pub out1: Vec<usize>,
}

impl OneRoundProtocol {
    /// Empty stages; outputs default to the inputs.
    pub fn new(d: usize, n0: usize, n1: usize, resource: Resource, left_anc: usize, right_anc: usize) -> Self {
        Self {
            d,
            n0,
            n1,
            resource,
            left_anc,
            right_anc,
            first_left: Vec::new(),
            first_right: Vec::new(),
            to_right: Vec::new(),
            to_left: Vec::new(),
            second_left: Vec::new(),
            second_right: Vec::new(),
            out0: (0..n0).collect(),
            out1: (n0..n0 + n1).collect(),
        }
    }

    pub fn a0(&self, j: usize) -> usize {
        j
    }

    pub fn a1(&self, j: usize) -> usize {
        self.n0 + j
    }

    pub fn l(&self, j: usize) -> usize {
        self.n0 + self.n1 + j
    }

    pub fn r(&self, j: usize) -> usize {
        self.n0 + self.n1 + self.resource.n_l() + j
    }

    pub fn left_anc(&self, j: usize) -> usize {
        self.r(self.resource.n_r()) + j
    }

    pub fn right_anc(&self, j: usize) -> usize {
        self.left_anc(self.left_anc) + j
    }

    pub fn n_regs(&self) -> usize {
        self.right_anc(self.right_anc)
    }

    pub fn n_in(&self) -> usize {
        self.n0 + self.n1
    }

    pub fn account(&self) -> Result<ResourceAccount> {
        ResourceAccount::of(&self.resource, self.d)
    }

    pub fn with_resource(&self, resource: Resource) -> Result<Self> {
        if resource.n_l() != self.resource.n_l() || resource.n_r() != self.resource.n_r() {
            return Err(Error::dim("replacement resource has a different shape"));
        }
        Ok(Self { resource, ..self.clone() })
    }

    pub(crate) fn initial_owners(&self) -> Vec<Owner> {
        let mut o = vec![Owner::Left; self.n_regs()];
        for j in 0..self.n1 {
            o[self.a1(j)] = Owner::Right;
        }
        for j in 0..self.resource.n_r() {
            o[self.r(j)] = Owner::Right;
        }
        for j in 0..self.right_anc {
            o[self.right_anc(j)] = Owner::Right;
        }
        o
    }

    /// Who holds each register after the exchange.
    pub(crate) fn final_owners(&self) -> Vec<Owner> {
        let mut o = self.initial_owners();
        for &q in &self.to_right {
            o[q] = Owner::Right;
        }
        for &q in &self.to_left {
            o[q] = Owner::Left;
        }
        o
    }

    /// Stages 0/1 are the first round (each sees only itself); stages 2/3 the
    /// second round, which sees both first-round transcripts.
    pub fn to_program(&self) -> Result<Program> {
        let init = match &self.resource {
            Resource::Pairs(k) => vec![Init::Pairs((0..*k).map(|j| (self.l(j), self.r(j))).collect())],
            Resource::Density { rho, n_l } => {
                let qs: Vec<usize> =
                    (0..*n_l).map(|j| self.l(j)).chain((0..rho.n() - n_l).map(|j| self.r(j))).collect();
                vec![Init::Mixed { qudits: qs, rho: rho.clone() }]
            }
        };
        let owners = self.initial_owners();
        for &q in &self.to_right {
            if owners.get(q) != Some(&Owner::Left) {
                return Err(Error::Ownership(format!("register {q} sent right is not on the left")));
            }
        }
        for &q in &self.to_left {
            if owners.get(q) != Some(&Owner::Right) {
                return Err(Error::Ownership(format!("register {q} sent left is not on the right")));
            }
        }
        let mut final_owner = owners.clone();
        for &q in &self.to_right {
            final_owner[q] = Owner::Right;
        }
        for &q in &self.to_left {
            final_owner[q] = Owner::Left;
        }
        if self.out0.iter().any(|&q| final_owner.get(q) != Some(&Owner::Left))
            || self.out1.iter().any(|&q| final_owner.get(q) != Some(&Owner::Right))
        {
            return Err(Error::Ownership("outputs are not held by their output party".into()));
        }
        // The two first-round stages act on disjoint registers, so either may
        // run first; the one that forks less goes first to keep the tree small.
        let (il, ir) = if branching(self.d, &self.first_right) < branching(self.d, &self.first_left) { (1, 0) } else { (0, 1) };
        let fl = Stage::new("first-left", Owner::Left, self.first_left.clone(), vec![il]);
        let fr = Stage::new("first-right", Owner::Right, self.first_right.clone(), vec![ir]);
        let mut first = if il == 0 { (fl, fr) } else { (fr, fl) };
        first.1.transfers = self
            .to_right
            .iter()
            .map(|&q| (q, Owner::Right))
            .chain(self.to_left.iter().map(|&q| (q, Owner::Left)))
            .collect();
        let prog = Program {
            d: self.d,
            n_in: self.n_in(),
            n_regs: self.n_regs(),
            owners,
            init,
            stages: vec![
                first.0,
                first.1,
                Stage::new("second-left", Owner::Left, self.second_left.clone(), vec![0, 1, 2]),
                Stage::new("second-right", Owner::Right, self.second_right.clone(), vec![0, 1, 3]),
            ],
            outputs: self.out0.iter().chain(&self.out1).copied().collect(),
        };
        prog.validate()?;
        Ok(prog)
    }

    pub fn n_out(&self) -> usize {
        self.out0.len() + self.out1.len()
    }

    pub fn choi(&self) -> Result<LowRank> {
        self.to_program()?.choi()
    }
}

/// Static number of leaves a stage forks into (adaptive parts count once).
fn branching(d: usize, instrs: &[Instr]) -> f64 {
    instrs
        .iter()
        .map(|i| match i {
            Instr::BellMeasure { .. } => (d * d) as f64,
            Instr::Measure { kraus, .. } => kraus.len() as f64,
            _ => 1.0,
        })
        .product()
}

/// Runs the protocol on `input` (inputs first, then any reference qudits) and
/// returns the state on `B₀B₁ ⊗ reference`.
pub fn execute(p: &OneRoundProtocol, input: &DenseState) -> Result<DensityOperator> {
    execute_low_rank(p, input)?.to_density()
}

pub fn execute_low_rank(p: &OneRoundProtocol, input: &DenseState) -> Result<LowRank> {
    if input.d() != p.d || input.n() < p.n_in() {
        return Err(Error::dim("input does not cover A₀A₁"));
    }
    Ok(p.to_program()?.run(input)?.output)
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub choi_distance: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Choi trace distance to `target` (a unitary on `A₀A₁ → B₀B₁`).
pub fn verify_implements(p: &OneRoundProtocol, target: &CMat, tol: f64) -> Result<VerifyReport> {
    let n = p.n_in();
    if p.n_out() != n || target.nrows() != p.d.pow(n as u32) || !target.is_square() {
        return Err(Error::dim("target unitary does not match the protocol registers"));
    }
    let ideal = unitary_choi_vector(p.d, n, target)?;
    let dist = p.choi()?.distance(&ideal);
    Ok(VerifyReport { choi_distance: dist, tol, pass: dist <= tol })
}

/// Largest Choi distance over the leaves of the outcome tree, each leaf
/// renormalised.
pub fn worst_branch_distance(p: &OneRoundProtocol, target: &CMat) -> Result<f64> {
    let n = p.n_in();
    let ideal = unitary_choi_vector(p.d, n, target)?;
    let branches = p.to_program()?.run_branches(&DenseState::max_entangled(p.d, n)?)?;
    let mut worst: f64 = 0.0;
    for b in branches {
        let f = &b.factor / crate::linalg::C64::new(b.prob.sqrt(), 0.0);
        worst = worst.max(linalg::low_rank_trace_distance(&f, &ideal.factor));
    }
    Ok(worst)
}
