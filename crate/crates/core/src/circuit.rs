//! Gate-list circuits and the JSON circuit format
//! `{"d", "n", "gates": [{"g", "q", "pow"}]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{is_prime, mat_pow, CMat, C64};
use crate::qudit::{gates, kernel, DenseState};

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    X,
    Z,
    H,
    S,
    Cnot,
    /// Arbitrary unitary on `d^k` dimensions.
    Custom(CMat),
}

impl GateKind {
    pub fn arity(&self, d: usize) -> usize {
        match self {
            GateKind::Cnot => 2,
            GateKind::Custom(m) => {
                let mut k = 0;
                let mut dim = 1;
                while dim < m.nrows() {
                    dim *= d;
                    k += 1;
                }
                k
            }
            _ => 1,
        }
    }

    pub fn is_clifford_generator(&self) -> bool {
        !matches!(self, GateKind::Custom(_))
    }

    /// Smallest k > 0 with Gᵏ = I (for generators).
    pub fn order(&self, d: usize) -> Option<u32> {
        match self {
            GateKind::X | GateKind::Z | GateKind::Cnot => Some(d as u32),
            GateKind::H => Some(4),
            GateKind::S => Some(if d == 2 { 4 } else { d as u32 }),
            GateKind::Custom(_) => None,
        }
    }

    pub fn matrix(&self, d: usize) -> CMat {
        match self {
            GateKind::X => gates::x(d),
            GateKind::Z => gates::z(d),
            GateKind::H => gates::h(d),
            GateKind::S => gates::s(d),
            GateKind::Cnot => gates::cnot(d),
            GateKind::Custom(m) => m.clone(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Cnot => "CNOT",
            GateKind::Custom(_) => "custom",
        }
    }
}

/// One gate `G^pow` on `qudits` (control first for CNOT).
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qudits: Vec<usize>,
    pub pow: u32,
}

impl GateOp {
    pub fn new(kind: GateKind, qudits: Vec<usize>) -> Self {
        Self { kind, qudits, pow: 1 }
    }

    pub fn pow(kind: GateKind, qudits: Vec<usize>, pow: i64, d: usize) -> Self {
        let pow = match kind.order(d) {
            Some(o) => pow.rem_euclid(o as i64) as u32,
            None => pow.max(0) as u32,
        };
        Self { kind, qudits, pow }
    }

    pub fn matrix(&self, d: usize) -> CMat {
        mat_pow(&self.kind.matrix(d), self.pow)
    }

    /// The inverse operation `G^{-pow}`.
    pub fn inverse(&self, d: usize) -> GateOp {
        match &self.kind {
            GateKind::Custom(m) => GateOp { kind: GateKind::Custom(mat_pow(m, self.pow).adjoint()), qudits: self.qudits.clone(), pow: 1 },
            k => GateOp::pow(k.clone(), self.qudits.clone(), -(self.pow as i64), d),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    d: usize,
    n: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if !is_prime(d) {
            return Err(Error::NotPrime(d));
        }
        Ok(Self { d, n, ops: Vec::new() })
    }

    pub fn from_ops(d: usize, n: usize, ops: Vec<GateOp>) -> Result<Self> {
        let mut c = Self::new(d, n)?;
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        kernel::check_targets(self.n, &op.qudits)?;
        let arity = op.kind.arity(self.d);
        if let GateKind::Custom(m) = &op.kind {
            if m.nrows() != self.d.pow(arity as u32) || !m.is_square() {
                return Err(Error::dim("custom gate size is not a power of d"));
            }
            if !crate::linalg::is_unitary(m, 1e-9) {
                return Err(Error::Invalid("custom gate is not unitary".into()));
            }
        }
        if op.qudits.len() != arity {
            return Err(Error::dim(format!("{} acts on {arity} qudits, got {}", op.kind.name(), op.qudits.len())));
        }
        self.ops.push(op);
        Ok(())
    }

    /// Convenience for generator gates with power 1.
    pub fn gate(mut self, kind: GateKind, qudits: &[usize]) -> Result<Self> {
        self.push(GateOp::new(kind, qudits.to_vec()))?;
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn is_clifford(&self) -> bool {
        self.ops.iter().all(|o| o.kind.is_clifford_generator())
    }

    /// Gates in reverse order with inverted powers.
    pub fn inverse(&self) -> Circuit {
        Circuit { d: self.d, n: self.n, ops: self.ops.iter().rev().map(|o| o.inverse(self.d)).collect() }
    }

    /// Relabel qudits through `map` into an `n`-qudit register.
    pub fn remap(&self, n: usize, map: &[usize]) -> Result<Circuit> {
        let ops = self
            .ops
            .iter()
            .map(|o| GateOp { kind: o.kind.clone(), qudits: o.qudits.iter().map(|&q| map[q]).collect(), pow: o.pow })
            .collect();
        Circuit::from_ops(self.d, n, ops)
    }

    pub fn apply(&self, state: &DenseState) -> Result<DenseState> {
        if state.d() != self.d || state.n() < self.n {
            return Err(Error::dim("circuit register"));
        }
        let mut s = state.clone();
        for op in &self.ops {
            s.apply_gate_mut(&op.matrix(self.d), &op.qudits)?;
        }
        Ok(s)
    }

    /// Dense `dⁿ × dⁿ` unitary built column by column.
    pub fn unitary(&self) -> Result<CMat> {
        let dim = self.d.pow(self.n as u32);
        let mut u = CMat::zeros(dim, dim);
        let mut digits = vec![0usize; self.n];
        for col in 0..dim {
            let mut c = col;
            for q in (0..self.n).rev() {
                digits[q] = c % self.d;
                c /= self.d;
            }
            let out = self.apply(&DenseState::basis(self.d, &digits)?)?;
            for (r, a) in out.amplitudes().iter().enumerate() {
                u[(r, col)] = *a;
            }
        }
        Ok(u)
    }

    /// Qudits touched by any gate.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.ops.iter().flat_map(|o| o.qudits.iter().copied()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CircuitFile::from(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let f: CircuitFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        f.into_circuit()
    }
}

/// Circuit whose gates are drawn from the generators {X, Z, H, S, CNOT}.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordCircuit(Circuit);

impl CliffordCircuit {
    pub fn new(c: Circuit) -> Result<Self> {
        if let Some(op) = c.ops.iter().find(|o| !o.kind.is_clifford_generator()) {
            return Err(Error::NotClifford(format!("{} gate on {:?}", op.kind.name(), op.qudits)));
        }
        Ok(Self(c))
    }

    pub fn empty(d: usize, n: usize) -> Result<Self> {
        Ok(Self(Circuit::new(d, n)?))
    }

    /// SWAP of two qudits from generators.
    pub fn swap(d: usize) -> Result<Self> {
        let mut c = Circuit::new(d, 2)?;
        c.push(GateOp::new(GateKind::Cnot, vec![0, 1]))?;
        c.push(GateOp::pow(GateKind::Cnot, vec![1, 0], -1, d))?;
        c.push(GateOp::new(GateKind::Cnot, vec![0, 1]))?;
        // The three CNOTs give |a,b⟩ → |−b, a⟩; H² negates qudit 0 back.
        c.push(GateOp::pow(GateKind::H, vec![0], 2, d))?;
        Ok(Self(c))
    }

    pub fn circuit(&self) -> &Circuit {
        &self.0
    }

    pub fn into_circuit(self) -> Circuit {
        self.0
    }

    pub fn d(&self) -> usize {
        self.0.d
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.0.ops
    }

    pub fn inverse(&self) -> CliffordCircuit {
        Self(self.0.inverse())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::new(Circuit::from_json(text)?)
    }
}

impl std::ops::Deref for CliffordCircuit {
    type Target = Circuit;
    fn deref(&self) -> &Circuit {
        &self.0
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum GateField {
    Name(String),
    Matrix(Vec<[f64; 2]>),
}

#[derive(Serialize, Deserialize)]
struct GateEntry {
    g: GateField,
    q: Vec<usize>,
    #[serde(default = "one")]
    pow: i64,
}

fn one() -> i64 {
    1
}

#[derive(Serialize, Deserialize)]
struct CircuitFile {
    d: usize,
    n: usize,
    gates: Vec<GateEntry>,
}

impl From<&Circuit> for CircuitFile {
    fn from(c: &Circuit) -> Self {
        let gates = c
            .ops
            .iter()
            .map(|o| {
                let g = match &o.kind {
                    GateKind::Custom(m) => GateField::Matrix(
                        (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| (i, j))).map(|(i, j)| [m[(i, j)].re, m[(i, j)].im]).collect(),
                    ),
                    k => GateField::Name(k.name().to_string()),
                };
                GateEntry { g, q: o.qudits.clone(), pow: o.pow as i64 }
            })
            .collect();
        CircuitFile { d: c.d, n: c.n, gates }
    }
}

impl CircuitFile {
    fn into_circuit(self) -> Result<Circuit> {
        let mut c = Circuit::new(self.d, self.n)?;
        for e in self.gates {
            let kind = match e.g {
                GateField::Name(s) => match s.as_str() {
                    "X" => GateKind::X,
                    "Z" => GateKind::Z,
                    "H" => GateKind::H,
                    "S" => GateKind::S,
                    "CNOT" => GateKind::Cnot,
                    other => return Err(Error::Format(format!("unknown gate {other:?}"))),
                },
                GateField::Matrix(entries) => {
                    let dim = (entries.len() as f64).sqrt().round() as usize;
                    if dim * dim != entries.len() {
                        return Err(Error::Format("custom matrix is not square".into()));
                    }
                    let flat: Vec<C64> = entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                    GateKind::Custom(CMat::from_row_slice(dim, dim, &flat))
                }
            };
            c.push(GateOp::pow(kind, e.q, e.pow, self.d))?;
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frob_dist;

    #[test]
    fn json_round_trip_with_custom_gate() {
        let t = CMat::from_fn(2, 2, |i, j| if i == j { if i == 0 { C64::new(1.0, 0.0) } else { C64::from_polar(1.0, 0.785) } } else { C64::new(0.0, 0.0) });
        let c = Circuit::new(2, 2).unwrap().gate(GateKind::H, &[0]).unwrap().gate(GateKind::Cnot, &[0, 1]).unwrap().gate(GateKind::Custom(t), &[1]).unwrap();
        let back = Circuit::from_json(&c.to_json()).unwrap();
        assert!(frob_dist(&c.unitary().unwrap(), &back.unwrap_unitary()) < 1e-12);
        assert!(matches!(CliffordCircuit::from_json(&c.to_json()), Err(Error::NotClifford(_))));
    }

    impl Circuit {
        fn unwrap_unitary(&self) -> CMat {
            self.unitary().unwrap()
        }
    }

    #[test]
    fn negative_powers_normalize() {
        let text = r#"{"d": 3, "n": 1, "gates": [{"g": "X", "q": [0], "pow": -1}]}"#;
        let c = Circuit::from_json(text).unwrap();
        assert_eq!(c.ops()[0].pow, 2);
    }

    #[test]
    fn inverse_undoes_circuit() {
        let c = Circuit::new(3, 2)
            .unwrap()
            .gate(GateKind::H, &[0])
            .unwrap()
            .gate(GateKind::S, &[1])
            .unwrap()
            .gate(GateKind::Cnot, &[1, 0])
            .unwrap();
        let u = c.unitary().unwrap() * c.inverse().unitary().unwrap();
        assert!(frob_dist(&u, &CMat::identity(9, 9)) < 1e-12);
    }

    #[test]
    fn bad_gates_rejected() {
        assert!(Circuit::new(2, 2).unwrap().gate(GateKind::Cnot, &[0]).is_err());
        assert!(Circuit::new(2, 2).unwrap().gate(GateKind::X, &[2]).is_err());
        assert!(Circuit::new(4, 1).is_err());
    }
}
