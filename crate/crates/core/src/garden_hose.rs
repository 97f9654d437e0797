//! Garden-hose strategies for f-routing.
//!
//! `E` pipes (shared pairs `Lᵢ Rᵢ`) plus the quantum input `Q` on the left.
//! Depending on `x` the left party Bell-measures disjoint pairs of its nodes
//! `{Q, L₁..L_E}`, and depending on `y` the right party does the same on
//! `{R₁..R_E}`. `Q` then sits at the unique unmeasured node reached by walking
//! from `Q` along measurement edges and pipes.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::pauli::PauliWord;
use crate::qudit::{measure_generalized_bell_forced, BellOutcome, DenseState};

/// Largest input width handled.
pub const MAX_INPUT_BITS: usize = 4;
/// Cap on `d^(2E+1)` for the dense execution.
const STATE_CAP: u128 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Q,
    /// Left end of pipe `i` (1-based).
    L(usize),
    R(usize),
}

impl Node {
    /// 0 for `Q` and left ends, 1 for right ends.
    pub fn side(self) -> usize {
        match self {
            Node::R(_) => 1,
            _ => 0,
        }
    }

    /// Other end of the pipe.
    pub fn pipe_partner(self) -> Option<Node> {
        match self {
            Node::Q => None,
            Node::L(i) => Some(Node::R(i)),
            Node::R(i) => Some(Node::L(i)),
        }
    }

    fn pipe(self) -> Option<usize> {
        match self {
            Node::Q => None,
            Node::L(i) | Node::R(i) => Some(i),
        }
    }

    fn in_range(self, e: usize) -> bool {
        self.pipe().map_or(true, |i| (1..=e).contains(&i))
    }

    /// Position in the dense register `[Q, L₁..L_E, R₁..R_E]`.
    fn qudit(self, e: usize) -> usize {
        match self {
            Node::Q => 0,
            Node::L(i) => i,
            Node::R(i) => e + i,
        }
    }

    pub fn parse(s: &str) -> Result<Node> {
        let bad = || Error::Format(format!("node name {s:?}"));
        if s == "Q" {
            return Ok(Node::Q);
        }
        let (head, num) = s.split_at(1.min(s.len()));
        let i: usize = num.parse().map_err(|_| bad())?;
        match head {
            "L" => Ok(Node::L(i)),
            "R" => Ok(Node::R(i)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Q => write!(f, "Q"),
            Node::L(i) => write!(f, "L{i}"),
            Node::R(i) => write!(f, "R{i}"),
        }
    }
}

impl Serialize for Node {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Node {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Node::parse(&s).map_err(serde::de::Error::custom)
    }
}

pub type Matching = Vec<(Node, Node)>;

#[derive(Clone, Debug, PartialEq)]
pub struct GHStrategy {
    e: usize,
    nx: usize,
    ny: usize,
    left: BTreeMap<u64, Matching>,
    right: BTreeMap<u64, Matching>,
}

fn check_matching(pairs: &[(Node, Node)], e: usize, left: bool) -> Result<()> {
    let mut seen = HashSet::new();
    for &(a, b) in pairs {
        for n in [a, b] {
            if !n.in_range(e) {
                return Err(Error::MalformedMatching(format!("node {n} with {e} pipes")));
            }
            if (n.side() == 0) != left {
                return Err(Error::MalformedMatching(format!("node {n} on the wrong side")));
            }
            if !seen.insert(n) {
                return Err(Error::MalformedMatching(format!("node {n} appears twice")));
            }
        }
    }
    Ok(())
}

impl GHStrategy {
    pub fn new(
        e: usize,
        nx: usize,
        ny: usize,
        left: BTreeMap<u64, Matching>,
        right: BTreeMap<u64, Matching>,
    ) -> Result<Self> {
        if nx > MAX_INPUT_BITS || ny > MAX_INPUT_BITS {
            return Err(Error::range(format!("input widths ({nx}, {ny}) above {MAX_INPUT_BITS}")));
        }
        for (side, map, n) in [(true, &left, nx), (false, &right, ny)] {
            for (&v, pairs) in map {
                if v >> n != 0 {
                    return Err(Error::range(format!("input value {v} for {n} bits")));
                }
                check_matching(pairs, e, side)?;
            }
        }
        Ok(Self { e, nx, ny, left, right })
    }

    /// No pipes, `Q` never moves.
    pub fn empty(nx: usize, ny: usize) -> Result<Self> {
        Self::new(0, nx, ny, BTreeMap::new(), BTreeMap::new())
    }

    /// Two pipes: the left joins `Q` to `L₁` iff `x = 1`; the right joins `R₁R₂`
    /// iff `y = 0`.
    pub fn and() -> Self {
        let left = BTreeMap::from([(1, vec![(Node::Q, Node::L(1))])]);
        let right = BTreeMap::from([(0, vec![(Node::R(1), Node::R(2))])]);
        Self::new(2, 1, 1, left, right).expect("valid preset")
    }

    /// Three pipes: `Q` joins `L₁` if `x = 0` and `L₃` if `x = 1`; the right
    /// joins `R₁R₂` iff `y = 0`.
    pub fn or() -> Self {
        let left = BTreeMap::from([(0, vec![(Node::Q, Node::L(1))]), (1, vec![(Node::Q, Node::L(3))])]);
        let right = BTreeMap::from([(0, vec![(Node::R(1), Node::R(2))])]);
        Self::new(3, 1, 1, left, right).expect("valid preset")
    }

    pub fn pipes(&self) -> usize {
        self.e
    }

    pub fn input_bits(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn left_pairs(&self, x: u64) -> &[(Node, Node)] {
        self.left.get(&x).map_or(&[], |v| v.as_slice())
    }

    pub fn right_pairs(&self, y: u64) -> &[(Node, Node)] {
        self.right.get(&y).map_or(&[], |v| v.as_slice())
    }

    fn check_inputs(&self, x: u64, y: u64) -> Result<()> {
        if x >> self.nx != 0 || y >> self.ny != 0 {
            return Err(Error::range(format!("inputs ({x}, {y}) for widths ({}, {})", self.nx, self.ny)));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: StrategyFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let parse = |map: BTreeMap<String, Vec<[Node; 2]>>, n: usize| -> Result<BTreeMap<u64, Matching>> {
            map.into_iter()
                .map(|(k, v)| {
                    if k.len() != n || !k.chars().all(|c| c == '0' || c == '1') {
                        return Err(Error::Format(format!("input key {k:?} for {n} bits")));
                    }
                    let val = if n == 0 { 0 } else { u64::from_str_radix(&k, 2).expect("checked digits") };
                    Ok((val, v.into_iter().map(|[a, b]| (a, b)).collect()))
                })
                .collect()
        };
        let left = parse(f.left, f.nx)?;
        let right = parse(f.right, f.ny)?;
        Self::new(f.e, f.nx, f.ny, left, right)
    }

    pub fn to_json(&self) -> String {
        let dump = |map: &BTreeMap<u64, Matching>, n: usize| {
            map.iter()
                .map(|(v, pairs)| (bits(*v, n), pairs.iter().map(|&(a, b)| [a, b]).collect()))
                .collect::<BTreeMap<String, Vec<[Node; 2]>>>()
        };
        let f = StrategyFile { e: self.e, nx: self.nx, ny: self.ny, left: dump(&self.left, self.nx), right: dump(&self.right, self.ny) };
        serde_json::to_string_pretty(&f).expect("plain data")
    }
}

/// `v` as an `n`-character bit string, most significant bit first.
pub fn bits(v: u64, n: usize) -> String {
    (0..n).rev().map(|i| if (v >> i) & 1 == 1 { '1' } else { '0' }).collect()
}

#[derive(Serialize, Deserialize)]
struct StrategyFile {
    #[serde(rename = "E")]
    e: usize,
    nx: usize,
    ny: usize,
    #[serde(default)]
    left: BTreeMap<String, Vec<[Node; 2]>>,
    #[serde(default)]
    right: BTreeMap<String, Vec<[Node; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoutingOutcome {
    pub side: usize,
    pub terminal: Node,
    /// Nodes visited, alternating measurement edges and pipes.
    pub path: Vec<Node>,
    /// Single-qudit Pauli that undoes the accumulated teleportation frame.
    pub correction: PauliWord,
}

/// Walks from `Q`. `step` sees each measured pair as listed, and whether the
/// current holder is its first entry.
fn walk(s: &GHStrategy, x: u64, y: u64, mut step: impl FnMut((Node, Node), bool)) -> Result<(Node, Vec<Node>)> {
    s.check_inputs(x, y)?;
    let mut partner: HashMap<Node, ((Node, Node), bool)> = HashMap::new();
    for &p in s.left_pairs(x).iter().chain(s.right_pairs(y)) {
        partner.insert(p.0, (p, true));
        partner.insert(p.1, (p, false));
    }
    let mut cur = Node::Q;
    let mut path = vec![Node::Q];
    let mut used = HashSet::new();
    while let Some(&(pair, first)) = partner.get(&cur) {
        if !used.insert(pair) || path.len() > 2 * s.e + 1 {
            return Err(Error::MalformedMatching(format!("walk revisits {cur}")));
        }
        let other = if first { pair.1 } else { pair.0 };
        step(pair, first);
        let next = other.pipe_partner().ok_or_else(|| Error::MalformedMatching("walk returns to Q".into()))?;
        path.push(other);
        path.push(next);
        cur = next;
    }
    Ok((cur, path))
}

/// Combinatorial routing; the correction is the identity.
pub fn gh_evaluate(s: &GHStrategy, x: u64, y: u64) -> Result<RoutingOutcome> {
    let (terminal, path) = walk(s, x, y, |_, _| {})?;
    Ok(RoutingOutcome { side: terminal.side(), terminal, path, correction: PauliWord::identity(2, 1) })
}

/// Measurement schedule for inputs `(x, y)`: left pairs, then right pairs.
pub fn schedule(s: &GHStrategy, x: u64, y: u64) -> Vec<(Node, Node)> {
    s.left_pairs(x).iter().chain(s.right_pairs(y)).copied().collect()
}

/// Routing with the Pauli frame for Bell outcomes given in schedule order.
///
/// Measuring `(u, v)` with outcome `(a, b)` applies `(XᵃZᵇ)†` to the
/// teleported state when the holder is `u`, and the entrywise conjugate
/// `conj(XᵃZᵇ)` when it is `v` (`Φ_ab` is `(I ⊗ (XᵃZᵇ)ᵀ)Φ⁺`).
pub fn gh_route(s: &GHStrategy, x: u64, y: u64, d: usize, outcomes: &[BellOutcome]) -> Result<RoutingOutcome> {
    let sched = schedule(s, x, y);
    if outcomes.len() != sched.len() {
        return Err(Error::dim(format!("{} outcomes for {} measurements", outcomes.len(), sched.len())));
    }
    let by_pair: HashMap<(Node, Node), BellOutcome> = sched.iter().copied().zip(outcomes.iter().copied()).collect();
    let mut frame = PauliWord::identity(d, 1);
    let (terminal, path) = walk(s, x, y, |pair, first| {
        let o = by_pair[&pair];
        let m = PauliWord::single(d, 1, 0, o.a, o.b);
        let n = if first { m.adjoint() } else { m.conj() };
        frame = n.mul(&frame).expect("same register");
    })?;
    Ok(RoutingOutcome { side: terminal.side(), terminal, path, correction: frame.adjoint() })
}

#[derive(Clone, Debug)]
pub struct QuantumRun {
    pub outcomes: Vec<BellOutcome>,
    pub prob: f64,
    /// Uncorrected state at the terminal node (global phase arbitrary).
    pub state: DenseState,
    pub routing: RoutingOutcome,
}

/// Dense execution with forced Bell outcomes (schedule order).
pub fn gh_quantum_execute(
    s: &GHStrategy,
    x: u64,
    y: u64,
    q: &DenseState,
    outcomes: &[BellOutcome],
) -> Result<QuantumRun> {
    let d = q.d();
    if q.n() != 1 {
        return Err(Error::dim("Q must be a single qudit"));
    }
    let e = s.e;
    let dim = linalg::dim_u128(d, 2 * e + 1);
    if dim > STATE_CAP {
        return Err(Error::CapExceeded { what: "garden-hose state".into(), dim, cap: STATE_CAP });
    }
    let routing = gh_route(s, x, y, d, outcomes)?;
    let mut state = q.clone();
    for _ in 0..e {
        state = state.tensor(&DenseState::max_entangled(d, 1)?)?;
    }
    // [Q, L₁R₁, L₂R₂, ...] → [Q, L₁..L_E, R₁..R_E]
    let order: Vec<usize> = std::iter::once(0).chain((0..e).map(|j| 1 + 2 * j)).chain((0..e).map(|j| 2 + 2 * j)).collect();
    state = state.permute(&order)?;
    let mut prob = 1.0;
    for (&(a, b), &o) in schedule(s, x, y).iter().zip(outcomes) {
        let (p, post) = measure_generalized_bell_forced(&state, (a.qudit(e), b.qudit(e)), o)?;
        prob *= p;
        match post {
            Some(st) => state = st,
            None => return Err(Error::Invalid("forced outcome has probability 0".into())),
        }
    }
    let rho = state.reduced(&[routing.terminal.qudit(e)])?;
    let (vals, vecs) = linalg::hermitian_eig(rho.matrix());
    let top = (0..vals.len()).max_by(|&i, &j| vals[i].total_cmp(&vals[j])).expect("nonempty");
    let amps: Vec<_> = vecs.column(top).iter().copied().collect();
    Ok(QuantumRun { outcomes: outcomes.to_vec(), prob, state: DenseState::normalized(d, 1, amps)?, routing })
}

/// Every forced-outcome run for `(x, y)`.
pub fn gh_quantum_sweep(s: &GHStrategy, x: u64, y: u64, q: &DenseState) -> Result<Vec<QuantumRun>> {
    let d = q.d();
    let m = schedule(s, x, y).len();
    let total = (d * d).pow(m as u32);
    (0..total)
        .map(|mut k| {
            let outs: Vec<BellOutcome> = (0..m)
                .map(|_| {
                    let o = BellOutcome::from_index(d, k % (d * d));
                    k /= d * d;
                    o
                })
                .collect();
            gh_quantum_execute(s, x, y, q, &outs)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GhComplexity {
    pub pipes: usize,
    pub gh_cost: usize,
}

pub fn gh_complexity(s: &GHStrategy) -> GhComplexity {
    GhComplexity { pipes: s.e, gh_cost: s.e }
}

// ---------------------------------------------------------------------------
// Control programs and the location-register transform.

/// Condition on the classical inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Pred {
    True,
    XEq(u64),
    YEq(u64),
    XBit(usize),
    YBit(usize),
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

impl Pred {
    pub fn eval(&self, x: u64, y: u64) -> bool {
        match self {
            Pred::True => true,
            Pred::XEq(v) => x == *v,
            Pred::YEq(v) => y == *v,
            Pred::XBit(i) => (x >> i) & 1 == 1,
            Pred::YBit(i) => (y >> i) & 1 == 1,
            Pred::Not(p) => !p.eval(x, y),
            Pred::And(a, b) => a.eval(x, y) && b.eval(x, y),
            Pred::Or(a, b) => a.eval(x, y) || b.eval(x, y),
        }
    }

    fn uses(&self) -> (bool, bool) {
        match self {
            Pred::True => (false, false),
            Pred::XEq(_) | Pred::XBit(_) => (true, false),
            Pred::YEq(_) | Pred::YBit(_) => (false, true),
            Pred::Not(p) => p.uses(),
            Pred::And(a, b) | Pred::Or(a, b) => {
                let (ax, ay) = a.uses();
                let (bx, by) = b.uses();
                (ax || bx, ay || by)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Op {
    /// Bell measurement of two nodes.
    Measure(Node, Node),
    /// Send the node straight to the output on the given side.
    Send(Node, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CondInstr {
    pub when: Pred,
    pub op: Op,
}

impl CondInstr {
    pub fn new(when: Pred, op: Op) -> Self {
        Self { when, op }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationRegister {
    /// Indexes `{Q, pipe 1..E, none}`.
    pub location_bits: usize,
    /// Direct-send flag and the side it went to.
    pub flag_bits: usize,
}

impl LocationRegister {
    pub fn bits(&self) -> usize {
        self.location_bits + self.flag_bits
    }
}

/// Conditional Bell-measurement schedule in three phases. The left phase sees
/// `x`, the right phase `y`, the interaction phase both.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlProgram {
    pub e: usize,
    pub nx: usize,
    pub ny: usize,
    pub workspace_bits: usize,
    pub left: Vec<CondInstr>,
    pub interaction: Vec<CondInstr>,
    pub right: Vec<CondInstr>,
    /// Present after [`interaction_to_preprocessed`].
    pub register: Option<LocationRegister>,
}

pub fn ceil_log2(n: usize) -> usize {
    (usize::BITS - n.saturating_sub(1).leading_zeros()) as usize
}

impl ControlProgram {
    /// The strategy's schedule as a program with an empty interaction phase.
    /// Workspace is what it takes to name a node.
    pub fn from_strategy(s: &GHStrategy) -> Self {
        let conv = |map: &BTreeMap<u64, Matching>, left: bool| {
            map.iter()
                .flat_map(|(&v, pairs)| {
                    pairs.iter().map(move |&(a, b)| {
                        CondInstr::new(if left { Pred::XEq(v) } else { Pred::YEq(v) }, Op::Measure(a, b))
                    })
                })
                .collect()
        };
        Self {
            e: s.e,
            nx: s.nx,
            ny: s.ny,
            workspace_bits: ceil_log2(2 * s.e + 1),
            left: conv(&s.left, true),
            interaction: Vec::new(),
            right: conv(&s.right, false),
            register: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedProgram(m));
        if self.nx > MAX_INPUT_BITS || self.ny > MAX_INPUT_BITS {
            return bad(format!("input widths ({}, {})", self.nx, self.ny));
        }
        for (name, instrs, side) in
            [("left", &self.left, Some(0)), ("interaction", &self.interaction, None), ("right", &self.right, Some(1))]
        {
            for ins in instrs.iter() {
                let (ux, uy) = ins.when.uses();
                if (side == Some(0) && uy) || (side == Some(1) && ux) {
                    return bad(format!("{name} phase reads an input it cannot see"));
                }
                let nodes = match ins.op {
                    Op::Measure(a, b) if a == b => return bad(format!("{name} phase measures {a} with itself")),
                    Op::Measure(a, b) => vec![a, b],
                    Op::Send(n, s) if s > 1 => return bad(format!("send of {n} to side {s}")),
                    Op::Send(n, _) => vec![n],
                };
                for n in nodes {
                    if !n.in_range(self.e) {
                        return bad(format!("node {n} with {} pipes", self.e));
                    }
                    if side.is_some_and(|s| n.side() != s) {
                        return bad(format!("{name} phase touches {n}"));
                    }
                }
            }
        }
        Ok(())
    }

    fn active(&self, x: u64, y: u64) -> Result<(HashMap<Node, Node>, HashMap<Node, usize>)> {
        let mut meas = HashMap::new();
        let mut sends = HashMap::new();
        for ins in self.left.iter().chain(&self.interaction).chain(&self.right) {
            if !ins.when.eval(x, y) {
                continue;
            }
            let clash = |n: Node| Error::MalformedProgram(format!("node {n} used twice on input ({x}, {y})"));
            match ins.op {
                Op::Measure(a, b) => {
                    for (u, v) in [(a, b), (b, a)] {
                        if meas.insert(u, v).is_some() || sends.contains_key(&u) {
                            return Err(clash(u));
                        }
                    }
                }
                Op::Send(n, s) => {
                    if sends.insert(n, s).is_some() || meas.contains_key(&n) {
                        return Err(clash(n));
                    }
                }
            }
        }
        Ok((meas, sends))
    }

    /// Output side by following `Q` through every active instruction.
    fn direct_side(&self, x: u64, y: u64) -> Result<usize> {
        let (meas, sends) = self.active(x, y)?;
        let mut cur = Node::Q;
        for _ in 0..=2 * self.e + 1 {
            if let Some(&s) = sends.get(&cur) {
                return Ok(s);
            }
            match meas.get(&cur) {
                None => return Ok(cur.side()),
                Some(&other) => {
                    cur = other.pipe_partner().ok_or_else(|| Error::MalformedProgram("Q measured twice".into()))?;
                }
            }
        }
        Err(Error::MalformedProgram("walk does not terminate".into()))
    }

    /// Register machine: the left phase follows `Q` as far as left measurements
    /// go, the register travels to the interaction, and the interaction
    /// continues the walk over all transcripts and emits the side bit. The
    /// side of the live pipe end is finite control state, not register.
    fn tracked_side<'a>(&'a self, x: u64, y: u64) -> Result<usize> {
        #[derive(Clone, Copy)]
        enum Loc {
            Q,
            Pipe(usize, usize),
            Sent(usize),
        }
        let holder = |l: Loc| match l {
            Loc::Q => Some(Node::Q),
            Loc::Pipe(i, 0) => Some(Node::L(i)),
            Loc::Pipe(i, _) => Some(Node::R(i)),
            Loc::Sent(_) => None,
        };
        let advance = |l: Loc, instrs: &[&CondInstr]| -> Result<Option<Loc>> {
            let Some(h) = holder(l) else { return Ok(None) };
            for ins in instrs {
                match ins.op {
                    Op::Send(n, s) if n == h => return Ok(Some(Loc::Sent(s))),
                    Op::Measure(a, b) if a == h || b == h => {
                        let other = if a == h { b } else { a };
                        let next = other.pipe_partner().ok_or_else(|| Error::MalformedProgram("Q measured twice".into()))?;
                        let i = next.pipe().expect("pipe end");
                        return Ok(Some(Loc::Pipe(i, next.side())));
                    }
                    _ => {}
                }
            }
            Ok(None)
        };
        self.active(x, y)?;
        let on = |v: &'a [CondInstr]| -> Vec<&'a CondInstr> { v.iter().filter(|i| i.when.eval(x, y)).collect() };
        let (left, right, inter) = (on(&self.left), on(&self.right), on(&self.interaction));
        let mut loc = Loc::Q;
        let limit = 2 * self.e + 2;
        // Left phase: only left nodes are reachable.
        for _ in 0..limit {
            if holder(loc).map_or(true, |h| h.side() != 0) {
                break;
            }
            match advance(loc, &left)? {
                Some(l) => loc = l,
                None => break,
            }
        }
        // Interaction: transcripts of both sides plus its own instructions.
        let all: Vec<&CondInstr> = left.iter().chain(&right).chain(&inter).copied().collect();
        for _ in 0..limit {
            match advance(loc, &all)? {
                Some(l) => loc = l,
                None => {
                    return Ok(match loc {
                        Loc::Q => 0,
                        Loc::Pipe(_, s) | Loc::Sent(s) => s,
                    })
                }
            }
        }
        Err(Error::MalformedProgram("walk does not terminate".into()))
    }

    /// Output side on inputs `(x, y)`.
    pub fn run(&self, x: u64, y: u64) -> Result<usize> {
        if x >> self.nx != 0 || y >> self.ny != 0 {
            return Err(Error::range(format!("inputs ({x}, {y})")));
        }
        match self.register {
            Some(_) => self.tracked_side(x, y),
            None => self.direct_side(x, y),
        }
    }

    /// All `(x, y, side)`.
    pub fn truth_table(&self) -> Result<Vec<(u64, u64, usize)>> {
        let mut out = Vec::new();
        for x in 0..1u64 << self.nx {
            for y in 0..1u64 << self.ny {
                out.push((x, y, self.run(x, y)?));
            }
        }
        Ok(out)
    }
}

/// Adds the location register that follows `Q` through the measurements.
pub fn interaction_to_preprocessed(p: &ControlProgram, e: usize) -> Result<ControlProgram> {
    p.validate()?;
    if e != p.e {
        return Err(Error::MalformedProgram(format!("program has {} pipes, transform asked for {e}", p.e)));
    }
    if p.register.is_some() {
        return Err(Error::MalformedProgram("program already carries a location register".into()));
    }
    Ok(ControlProgram { register: Some(LocationRegister { location_bits: ceil_log2(e + 2), flag_bits: 2 }), ..p.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::DensityOperator;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn corrected_fidelity(run: &QuantumRun, q: &DenseState) -> f64 {
        let c = run.routing.correction.dense();
        let v = &c * run.state.column();
        (q.column().adjoint() * v)[(0, 0)].norm_sqr()
    }

    #[test]
    fn and_table() {
        let s = GHStrategy::and();
        let sides: Vec<usize> = [(0, 0), (0, 1), (1, 0), (1, 1)].iter().map(|&(x, y)| gh_evaluate(&s, x, y).unwrap().side).collect();
        assert_eq!(sides, vec![0, 0, 0, 1]);
        let r = gh_evaluate(&s, 1, 0).unwrap();
        assert_eq!(r.path, vec![Node::Q, Node::L(1), Node::R(1), Node::R(2), Node::L(2)]);
        assert_eq!(r.terminal, Node::L(2));
        assert_eq!(gh_evaluate(&s, 1, 1).unwrap().terminal, Node::R(1));
    }

    #[test]
    fn or_table() {
        let s = GHStrategy::or();
        let sides: Vec<usize> = [(0, 0), (0, 1), (1, 0), (1, 1)].iter().map(|&(x, y)| gh_evaluate(&s, x, y).unwrap().side).collect();
        assert_eq!(sides, vec![0, 1, 1, 1]);
    }

    #[test]
    fn costs() {
        assert_eq!(gh_complexity(&GHStrategy::and()), GhComplexity { pipes: 2, gh_cost: 2 });
        assert_eq!(gh_complexity(&GHStrategy::or()).gh_cost, 3);
        assert_eq!(gh_complexity(&GHStrategy::empty(1, 1).unwrap()).pipes, 0);
    }

    #[test]
    fn malformed_matchings() {
        let dup = BTreeMap::from([(0, vec![(Node::Q, Node::L(1)), (Node::L(1), Node::L(2))])]);
        assert!(matches!(GHStrategy::new(2, 1, 1, dup, BTreeMap::new()), Err(Error::MalformedMatching(_))));
        let wrong_side = BTreeMap::from([(0, vec![(Node::Q, Node::R(1))])]);
        assert!(GHStrategy::new(1, 1, 1, wrong_side, BTreeMap::new()).is_err());
        let out_of_range = BTreeMap::from([(0, vec![(Node::Q, Node::L(3))])]);
        assert!(GHStrategy::new(2, 1, 1, out_of_range, BTreeMap::new()).is_err());
        assert!(gh_evaluate(&GHStrategy::and(), 2, 0).is_err());
    }

    #[test]
    fn json_round_trip() {
        for s in [GHStrategy::and(), GHStrategy::or()] {
            let back = GHStrategy::from_json(&s.to_json()).unwrap();
            assert_eq!(back, s);
        }
        let text = r#"{"E": 1, "nx": 1, "ny": 1, "left": {"1": [["Q", "L1"]]}, "right": {}}"#;
        let s = GHStrategy::from_json(text).unwrap();
        assert_eq!(gh_evaluate(&s, 1, 0).unwrap().side, 1);
        assert!(GHStrategy::from_json(r#"{"E": 1, "nx": 1, "ny": 1, "left": {"10": []}}"#).is_err());
        assert!(GHStrategy::from_json(r#"{"E": 1, "nx": 1, "ny": 1, "left": {"1": [["Q", "X1"]]}}"#).is_err());
    }

    #[test]
    fn and_moves_plus_state_to_the_right() {
        let s = GHStrategy::and();
        let h = 1.0 / 2f64.sqrt();
        let plus = DenseState::from_amplitudes(2, 1, vec![linalg::C64::new(h, 0.0); 2]).unwrap();
        let runs = gh_quantum_sweep(&s, 1, 1, &plus).unwrap();
        assert_eq!(runs.len(), 4);
        for run in &runs {
            assert_eq!(run.routing.side, 1);
            assert!((corrected_fidelity(run, &plus) - 1.0).abs() < 1e-9);
        }
        assert!((runs.iter().map(|r| r.prob).sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_pipes_leave_q_alone() {
        let s = GHStrategy::empty(1, 1).unwrap();
        let q = DenseState::random(2, 1, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let run = gh_quantum_execute(&s, 0, 1, &q, &[]).unwrap();
        assert_eq!(run.routing.terminal, Node::Q);
        assert_eq!(run.routing.side, 0);
        assert!((corrected_fidelity(&run, &q) - 1.0).abs() < 1e-12);
    }

    /// Every input of every preset, every forced outcome, qubits and qutrits.
    #[test]
    fn quantum_agrees_with_combinatorics() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for s in [GHStrategy::and(), GHStrategy::or()] {
            for d in [2, 3] {
                let q = DenseState::random(d, 1, &mut rng).unwrap();
                for x in 0..2 {
                    for y in 0..2 {
                        let comb = gh_evaluate(&s, x, y).unwrap();
                        for run in gh_quantum_sweep(&s, x, y, &q).unwrap() {
                            assert_eq!(run.routing.terminal, comb.terminal);
                            assert_eq!(run.routing.path, comb.path);
                            assert!((corrected_fidelity(&run, &q) - 1.0).abs() < 1e-9, "d={d} x={x} y={y}");
                        }
                    }
                }
            }
        }
    }

    /// A reversed pair forces the conjugate frame; the reduced state check is
    /// independent of the extracted phase.
    #[test]
    fn reversed_pair_order() {
        let left = BTreeMap::from([(0, vec![(Node::L(1), Node::Q)])]);
        let right = BTreeMap::from([(0, vec![(Node::R(2), Node::R(1))])]);
        let s = GHStrategy::new(2, 1, 1, left, right).unwrap();
        let q = DenseState::random(3, 1, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        for run in gh_quantum_sweep(&s, 0, 0, &q).unwrap() {
            assert_eq!(run.routing.terminal, Node::L(2));
            let c = run.routing.correction.dense();
            let fixed = DensityOperator::from_matrix(3, 1, &c * run.state.to_density().matrix() * c.adjoint()).unwrap();
            assert!((fixed.expectation(&q).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn transform_preserves_presets() {
        for (s, f) in [(GHStrategy::and(), [0, 0, 0, 1]), (GHStrategy::or(), [0, 1, 1, 1])] {
            let p = ControlProgram::from_strategy(&s);
            let t = interaction_to_preprocessed(&p, s.pipes()).unwrap();
            let table: Vec<usize> = t.truth_table().unwrap().into_iter().map(|r| r.2).collect();
            assert_eq!(table, f);
            assert_eq!(p.truth_table().unwrap(), t.truth_table().unwrap());
            let bits = t.register.unwrap().bits();
            assert!(bits <= ceil_log2(s.pipes() + 2) + 2);
            assert!(bits <= p.workspace_bits + 2);
        }
    }

    #[test]
    fn empty_interaction_still_gets_a_register() {
        let p = ControlProgram::from_strategy(&GHStrategy::empty(1, 1).unwrap());
        let t = interaction_to_preprocessed(&p, 0).unwrap();
        assert_eq!(t.register.unwrap().bits(), 3);
        assert_eq!(t.truth_table().unwrap(), p.truth_table().unwrap());
    }

    /// AND decided inside the interaction on a single pipe, plus a direct
    /// send on the left.
    #[test]
    fn interaction_phase_and_sends() {
        let both = Pred::And(Box::new(Pred::XBit(0)), Box::new(Pred::YBit(0)));
        let mut p = ControlProgram {
            e: 1,
            nx: 1,
            ny: 1,
            workspace_bits: 2,
            left: Vec::new(),
            interaction: vec![CondInstr::new(both, Op::Measure(Node::Q, Node::L(1)))],
            right: Vec::new(),
            register: None,
        };
        p.validate().unwrap();
        let t = interaction_to_preprocessed(&p, 1).unwrap();
        assert_eq!(t.truth_table().unwrap().iter().map(|r| r.2).collect::<Vec<_>>(), vec![0, 0, 0, 1]);
        // Left sends Q to side 1 outright when x = 0.
        p.left.push(CondInstr::new(Pred::XEq(0), Op::Send(Node::Q, 1)));
        let t = interaction_to_preprocessed(&p, 1).unwrap();
        assert_eq!(p.truth_table().unwrap(), t.truth_table().unwrap());
        assert_eq!(t.truth_table().unwrap().iter().map(|r| r.2).collect::<Vec<_>>(), vec![1, 1, 0, 1]);
    }

    #[test]
    fn visibility_is_enforced() {
        let mut p = ControlProgram::from_strategy(&GHStrategy::and());
        p.left.push(CondInstr::new(Pred::YEq(0), Op::Measure(Node::L(1), Node::L(2))));
        assert!(matches!(p.validate(), Err(Error::MalformedProgram(_))));
        assert!(interaction_to_preprocessed(&p, 2).is_err());
        let p = ControlProgram::from_strategy(&GHStrategy::and());
        assert!(interaction_to_preprocessed(&p, 3).is_err());
    }

    /// Random strategies: walks end within 2E+1 steps and the register
    /// machine agrees with direct evaluation on every input.
    #[test]
    fn random_strategies_agree() {
        use rand::seq::SliceRandom;
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let e = rng.gen_range(0..5usize);
            let (nx, ny) = (rng.gen_range(0..=3usize), rng.gen_range(0..=3usize));
            let side = |nodes: Vec<Node>, rng: &mut ChaCha8Rng| {
                let mut m = BTreeMap::new();
                for v in 0..1u64 << if nodes[0].side() == 0 { nx } else { ny } {
                    let mut ns = nodes.clone();
                    ns.shuffle(rng);
                    let k = rng.gen_range(0..=ns.len() / 2);
                    m.insert(v, (0..k).map(|j| (ns[2 * j], ns[2 * j + 1])).collect::<Matching>());
                }
                m
            };
            let lnodes: Vec<Node> = std::iter::once(Node::Q).chain((1..=e).map(Node::L)).collect();
            let left = side(lnodes, &mut rng);
            let right = if e == 0 { BTreeMap::new() } else { side((1..=e).map(Node::R).collect(), &mut rng) };
            let s = GHStrategy::new(e, nx, ny, left, right).unwrap();
            let p = ControlProgram::from_strategy(&s);
            let t = interaction_to_preprocessed(&p, e).unwrap();
            for x in 0..1u64 << nx {
                for y in 0..1u64 << ny {
                    let r = gh_evaluate(&s, x, y).unwrap();
                    assert!(r.path.len() <= 2 * e + 1);
                    assert_eq!(p.run(x, y).unwrap(), r.side);
                    assert_eq!(t.run(x, y).unwrap(), r.side);
                }
            }
        }
    }
}
