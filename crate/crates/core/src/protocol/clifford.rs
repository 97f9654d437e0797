//! Interaction decompositions and the Clifford one-round protocol
//! (teleport the smaller interaction side, apply the interaction, undo the
//! propagated Pauli frame on both sides).

use std::sync::Arc;

use serde::Serialize;

use super::exec::Instr;
use super::one_round::{OneRoundProtocol, Resource};
use crate::circuit::{Circuit, CliffordCircuit, GateOp};
use crate::error::{Error, Result};
use crate::linalg;
use crate::pauli::PauliWord;
use crate::tableau::{conjugate_pauli, tableau_simulate};

/// `C = (W^L ⊗ W^R) · U^I · (V^L ⊗ V^R)` with unitary (ancilla-free) pieces.
/// `V`/`W` circuits use local numbering on their side; `U^I` uses the global
/// numbering `A₀ = 0..n₀`, `A₁ = n₀..n₀+n₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionDecomposition {
    pub n0: usize,
    pub n1: usize,
    pub v_left: Circuit,
    pub v_right: Circuit,
    pub interaction: Circuit,
    pub w_left: Circuit,
    pub w_right: Circuit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionSummary {
    pub n0_prime: usize,
    pub n1_prime: usize,
    pub interaction_gates: usize,
}

fn one_sided(op: &GateOp, n0: usize) -> bool {
    op.qudits.iter().all(|&q| q < n0) || op.qudits.iter().all(|&q| q >= n0)
}

impl InteractionDecomposition {
    /// Everything in the interaction.
    pub fn trivial(c: &Circuit, n0: usize, n1: usize) -> Result<Self> {
        if c.n() != n0 + n1 {
            return Err(Error::dim("split does not match the circuit"));
        }
        let d = c.d();
        Ok(Self {
            n0,
            n1,
            v_left: Circuit::new(d, n0)?,
            v_right: Circuit::new(d, n1)?,
            interaction: c.clone(),
            w_left: Circuit::new(d, n0)?,
            w_right: Circuit::new(d, n1)?,
        })
    }

    /// Moves one-sided gates that commute to the front into `V` and those that
    /// commute to the back into `W`.
    pub fn reduce(c: &Circuit, n0: usize, n1: usize) -> Result<Self> {
        if c.n() != n0 + n1 {
            return Err(Error::dim("split does not match the circuit"));
        }
        let d = c.d();
        let n = n0 + n1;
        let mut frozen = vec![false; n];
        let (mut vl, mut vr, mut mid) = (Vec::new(), Vec::new(), Vec::new());
        for op in c.ops() {
            if one_sided(op, n0) && op.qudits.iter().all(|&q| !frozen[q]) {
                if op.qudits[0] < n0 {
                    vl.push(op.clone());
                } else {
                    vr.push(shift(op, n0));
                }
            } else {
                op.qudits.iter().for_each(|&q| frozen[q] = true);
                mid.push(op.clone());
            }
        }
        let mut frozen = vec![false; n];
        let (mut wl, mut wr, mut core) = (Vec::new(), Vec::new(), Vec::new());
        for op in mid.into_iter().rev() {
            if one_sided(&op, n0) && op.qudits.iter().all(|&q| !frozen[q]) {
                if op.qudits[0] < n0 {
                    wl.push(op);
                } else {
                    wr.push(shift(&op, n0));
                }
            } else {
                op.qudits.iter().for_each(|&q| frozen[q] = true);
                core.push(op);
            }
        }
        wl.reverse();
        wr.reverse();
        core.reverse();
        Ok(Self {
            n0,
            n1,
            v_left: Circuit::from_ops(d, n0, vl)?,
            v_right: Circuit::from_ops(d, n1, vr)?,
            interaction: Circuit::from_ops(d, n, core)?,
            w_left: Circuit::from_ops(d, n0, wl)?,
            w_right: Circuit::from_ops(d, n1, wr)?,
        })
    }

    pub fn d(&self) -> usize {
        self.interaction.d()
    }

    /// `(A₀′, A₁′)`: interaction support on each side, global numbering.
    pub fn interaction_qudits(&self) -> (Vec<usize>, Vec<usize>) {
        let s = self.interaction.support();
        (s.iter().copied().filter(|&q| q < self.n0).collect(), s.iter().copied().filter(|&q| q >= self.n0).collect())
    }

    pub fn summary(&self) -> DecompositionSummary {
        let (a, b) = self.interaction_qudits();
        DecompositionSummary { n0_prime: a.len(), n1_prime: b.len(), interaction_gates: self.interaction.ops().len() }
    }

    /// The composed circuit on `A₀A₁`.
    pub fn compose(&self) -> Result<Circuit> {
        let n = self.n0 + self.n1;
        let left: Vec<usize> = (0..self.n0).collect();
        let right: Vec<usize> = (self.n0..n).collect();
        let mut ops = Vec::new();
        ops.extend(self.v_left.remap(n, &left)?.ops().iter().cloned());
        ops.extend(self.v_right.remap(n, &right)?.ops().iter().cloned());
        ops.extend(self.interaction.ops().iter().cloned());
        ops.extend(self.w_left.remap(n, &left)?.ops().iter().cloned());
        ops.extend(self.w_right.remap(n, &right)?.ops().iter().cloned());
        Circuit::from_ops(self.d(), n, ops)
    }

    /// Whether the pieces compose to `c` (tableaux for Clifford circuits, dense
    /// unitaries up to global phase otherwise).
    pub fn verify(&self, c: &Circuit) -> Result<bool> {
        let composed = self.compose()?;
        if composed.n() != c.n() || composed.d() != c.d() {
            return Ok(false);
        }
        if composed.is_clifford() && c.is_clifford() {
            let a = tableau_simulate(&CliffordCircuit::new(composed)?);
            let b = tableau_simulate(&CliffordCircuit::new(c.clone())?);
            return Ok(a == b);
        }
        Ok(linalg::dist_up_to_phase(&composed.unitary()?, &c.unitary()?) < 1e-9)
    }
}

fn shift(op: &GateOp, n0: usize) -> GateOp {
    GateOp { kind: op.kind.clone(), qudits: op.qudits.iter().map(|&q| q - n0).collect(), pow: op.pow }
}

/// Pauli frame `Q† = (U (P_x†) U†)†` split into the two owners' factors.
fn frame_correction(
    cint: &CliffordCircuit,
    outcomes: &[(usize, usize)],
    offset: usize,
) -> Result<PauliWord> {
    let d = cint.d();
    let n = cint.n();
    let mut p = PauliWord::identity(d, n);
    for (j, &(a, b)) in outcomes.iter().enumerate() {
        p = p.mul(&PauliWord::single(d, n, offset + j, a, b))?;
    }
    Ok(conjugate_pauli(cint, &p.adjoint())?.adjoint())
}

/// Teleportation protocol for `c` split `n₀ | n₁`. Without an explicit decomposition the
/// built-in reduction is used. Consumes `min{n₀′, n₁′}` pairs.
pub fn clifford_protocol(
    c: &CliffordCircuit,
    split: (usize, usize),
    decomposition: Option<InteractionDecomposition>,
) -> Result<OneRoundProtocol> {
    let (n0, n1) = split;
    if c.n() != n0 + n1 {
        return Err(Error::dim(format!("circuit on {} qudits, split {n0}+{n1}", c.n())));
    }
    let dec = match decomposition {
        Some(dec) => {
            if !dec.verify(c.circuit())? {
                return Err(Error::Invalid("decomposition does not compose to the circuit".into()));
            }
            dec
        }
        None => InteractionDecomposition::reduce(c.circuit(), n0, n1)?,
    };
    if !dec.interaction.is_clifford() {
        return Err(Error::NotClifford("interaction unitary".into()));
    }
    let d = c.d();
    let (a0p, a1p) = dec.interaction_qudits();
    let (k0, k1) = (a0p.len(), a1p.len());
    let pairs = if k0 == 0 || k1 == 0 { 0 } else { k0.min(k1) };
    let mut p = OneRoundProtocol::new(d, n0, n1, Resource::Pairs(pairs), 0, 0);
    let a0: Vec<usize> = (0..n0).collect();
    let a1: Vec<usize> = (n0..n0 + n1).collect();
    p.first_left.push(Instr::circuit(dec.v_left.clone(), a0.clone()));
    p.first_right.push(Instr::circuit(dec.v_right.clone(), a1.clone()));

    // Compact interaction on [A₀′, A₁′].
    let order: Vec<usize> = a0p.iter().chain(&a1p).copied().collect();
    let mut map = vec![usize::MAX; n0 + n1];
    for (i, &q) in order.iter().enumerate() {
        map[q] = i;
    }
    let cint = CliffordCircuit::new(dec.interaction.remap(order.len(), &map)?)?;

    let (mut out0, mut out1) = (a0.clone(), a1.clone());
    if pairs == 0 {
        if !order.is_empty() {
            let instr = Instr::circuit(cint.circuit().clone(), order.clone());
            if k1 == 0 {
                p.first_left.push(instr);
            } else {
                p.first_right.push(instr);
            }
        }
    } else {
        let forward = k0 <= k1;
        let (k, offset) = if forward { (k0, 0) } else { (k1, k0) };
        // Teleported qudits, the sending-side halves, and the receiving halves.
        let sent: Vec<usize> = if forward { a0p.clone() } else { a1p.clone() };
        let near: Vec<usize> = (0..k).map(|j| if forward { p.l(j) } else { p.r(j) }).collect();
        let far: Vec<usize> = (0..k).map(|j| if forward { p.r(j) } else { p.l(j) }).collect();
        let bells: Vec<Instr> = (0..k).map(|j| Instr::bell(format!("x{j}"), sent[j], near[j])).collect();
        let mut targets = order.clone();
        for j in 0..k {
            targets[offset + j] = far[j];
        }
        let apply = Instr::circuit(cint.circuit().clone(), targets.clone());
        if forward {
            p.first_left.extend(bells);
            p.first_right.push(apply);
            p.to_left = far.clone();
        } else {
            p.first_right.extend(bells);
            p.first_left.push(apply);
            p.to_right = far.clone();
        }
        let cint = Arc::new(cint);
        let labels: Vec<String> = (0..k).map(|j| format!("x{j}")).collect();
        for side in [0usize, 1] {
            let (cint, labels, targets) = (cint.clone(), labels.clone(), targets.clone());
            let range: Vec<usize> = if side == 0 { (0..k0).collect() } else { (k0..k0 + k1).collect() };
            let corr = Instr::adaptive(move |rec| {
                let outs: Vec<(usize, usize)> = labels
                    .iter()
                    .map(|l| rec.bell(l, d).map(|o| (o.a, o.b)))
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::MalformedProgram("missing Bell outcome".into()))?;
                let q = frame_correction(&cint, &outs, offset)?;
                Ok(vec![Instr::Pauli { word: q.restrict(&range), targets: range.iter().map(|&i| targets[i]).collect() }])
            });
            if side == 0 {
                p.second_left.push(corr);
            } else {
                p.second_right.push(corr);
            }
        }
        // The teleported qudits now live on the receiving halves.
        for j in 0..k {
            if forward {
                let pos = a0p[j];
                out0[pos] = far[j];
            } else {
                let pos = a1p[j] - n0;
                out1[pos] = far[j];
            }
        }
    }
    p.second_left.push(Instr::circuit(dec.w_left.clone(), out0.clone()));
    p.second_right.push(Instr::circuit(dec.w_right.clone(), out1.clone()));
    p.out0 = out0;
    p.out1 = out1;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;
    use crate::protocol::one_round::{verify_implements, worst_branch_distance};
    use crate::tableau::random_clifford;

    fn swap_circuit(d: usize) -> CliffordCircuit {
        CliffordCircuit::swap(d).unwrap()
    }

    #[test]
    fn swap_circuit_is_swap() {
        for d in [2, 3, 5] {
            let u = swap_circuit(d).unitary().unwrap();
            assert!(linalg::dist_up_to_phase(&u, &crate::qudit::gates::swap(d)) < 1e-9);
        }
    }

    #[test]
    fn identity_needs_no_pairs() {
        let c = CliffordCircuit::empty(2, 2).unwrap();
        let p = clifford_protocol(&c, (1, 1), None).unwrap();
        assert_eq!(p.account().unwrap().ebit_count, Some(0));
        assert!(verify_implements(&p, &c.unitary().unwrap(), 1e-9).unwrap().pass);
    }

    #[test]
    fn swap_uses_one_pair() {
        let c = swap_circuit(2);
        let p = clifford_protocol(&c, (1, 1), None).unwrap();
        assert_eq!(p.account().unwrap().ebit_count, Some(1));
        assert!(worst_branch_distance(&p, &c.unitary().unwrap()).unwrap() < 1e-9);
    }

    #[test]
    fn qutrit_cnot() {
        let c = CliffordCircuit::new(Circuit::new(3, 2).unwrap().gate(GateKind::Cnot, &[0, 1]).unwrap()).unwrap();
        let p = clifford_protocol(&c, (1, 1), None).unwrap();
        let acc = p.account().unwrap();
        assert_eq!(acc.ebit_count, Some(1));
        assert!((acc.mutual_information.ebits - 2.0 * 3f64.log2()).abs() < 1e-6);
        let w = worst_branch_distance(&p, &c.unitary().unwrap()).unwrap();
        assert!(w < 1e-9, "{w}");
    }

    #[test]
    fn reduction_strips_local_gates() {
        let c = Circuit::new(2, 3)
            .unwrap()
            .gate(GateKind::H, &[0])
            .unwrap()
            .gate(GateKind::S, &[2])
            .unwrap()
            .gate(GateKind::Cnot, &[0, 1])
            .unwrap()
            .gate(GateKind::H, &[1])
            .unwrap()
            .gate(GateKind::Cnot, &[1, 2])
            .unwrap()
            .gate(GateKind::X, &[0])
            .unwrap();
        let dec = InteractionDecomposition::reduce(&c, 1, 2).unwrap();
        assert!(dec.verify(&c).unwrap());
        assert_eq!(dec.summary(), DecompositionSummary { n0_prime: 1, n1_prime: 1, interaction_gates: 1 });
        assert_eq!(dec.v_left.ops().len(), 1);
        assert_eq!(dec.v_right.ops().len(), 1);
        assert_eq!(dec.w_right.ops().len(), 2);
    }

    #[test]
    fn mirrored_teleport_when_right_is_smaller() {
        let c = random_clifford(3, 2, 4).unwrap();
        let p = clifford_protocol(&c, (2, 1), None).unwrap();
        assert_eq!(p.account().unwrap().ebit_count, Some(1));
        assert!(worst_branch_distance(&p, &c.unitary().unwrap()).unwrap() < 1e-9);
    }

    #[test]
    fn random_cliffords_are_exact() {
        for (seed, d, n0, n1) in [(1u64, 2usize, 2usize, 2usize), (2, 3, 1, 2), (3, 5, 1, 1), (4, 3, 2, 1)] {
            let c = random_clifford(n0 + n1, d, seed).unwrap();
            let p = clifford_protocol(&c, (n0, n1), None).unwrap();
            let u = c.unitary().unwrap();
            assert!(worst_branch_distance(&p, &u).unwrap() < 1e-9, "seed {seed}");
            assert!(verify_implements(&p, &u, 1e-9).unwrap().pass);
        }
    }

    #[test]
    fn rejects_bad_decomposition() {
        let c = swap_circuit(2);
        let wrong = InteractionDecomposition::trivial(&Circuit::new(2, 2).unwrap(), 1, 1).unwrap();
        assert!(clifford_protocol(&c, (1, 1), Some(wrong)).is_err());
        let ok = InteractionDecomposition::trivial(c.circuit(), 1, 1).unwrap();
        assert!(clifford_protocol(&c, (1, 1), Some(ok)).is_ok());
    }
}
