//! Symplectic stabilizer tableaux: the images of every `X_j` and `Z_j` under a
//! Clifford circuit, with phases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, CliffordCircuit, GateKind, GateOp};
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::pauli::{omega_units, phase_order, PauliWord};

#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerTableau {
    d: usize,
    n: usize,
    x_img: Vec<PauliWord>,
    z_img: Vec<PauliWord>,
}

/// Images of `X_q` and `Z_q` for every target `q` of one generator application.
fn generator_images(d: usize, n: usize, kind: &GateKind, qs: &[usize]) -> Vec<(usize, PauliWord, PauliWord)> {
    let k = omega_units(d);
    let ord = phase_order(d);
    let xw = |q: usize| PauliWord::single(d, n, q, 1, 0);
    let zw = |q: usize| PauliWord::single(d, n, q, 0, 1);
    match kind {
        GateKind::X => vec![(qs[0], xw(qs[0]), zw(qs[0]).with_phase(ord - k))],
        GateKind::Z => vec![(qs[0], xw(qs[0]).with_phase(k), zw(qs[0]))],
        GateKind::H => vec![(qs[0], zw(qs[0]), PauliWord::single(d, n, qs[0], d - 1, 0))],
        // S X S† = i·XZ for qubits and ω·XZ for odd d; both are one ζ unit.
        GateKind::S => vec![(qs[0], PauliWord::single(d, n, qs[0], 1, 1).with_phase(1), zw(qs[0]))],
        GateKind::Cnot => {
            let (c, t) = (qs[0], qs[1]);
            let xc = xw(c).mul(&xw(t)).expect("same register");
            let zt = PauliWord::single(d, n, c, 0, d - 1).mul(&zw(t)).expect("same register");
            vec![(c, xc, zw(c)), (t, xw(t), zt)]
        }
        GateKind::Custom(_) => unreachable!("custom gates are rejected before conjugation"),
    }
}

/// `G P G†` for a single generator application.
fn conjugate_by_generator(p: &PauliWord, kind: &GateKind, qs: &[usize]) -> PauliWord {
    let d = p.d();
    let images = generator_images(d, p.n(), kind, qs);
    let mut x = p.x().to_vec();
    let mut z = p.z().to_vec();
    for &q in qs {
        x[q] = 0;
        z[q] = 0;
    }
    let mut out = PauliWord::new(d, x, z, p.phase()).expect("same length");
    for (q, xi, zi) in images {
        out = out.mul(&xi.pow(p.x()[q])).expect("same register");
        out = out.mul(&zi.pow(p.z()[q])).expect("same register");
    }
    out
}

fn conjugate_by_op(p: &PauliWord, op: &GateOp) -> PauliWord {
    let mut out = p.clone();
    for _ in 0..op.pow {
        out = conjugate_by_generator(&out, &op.kind, &op.qudits);
    }
    out
}

impl StabilizerTableau {
    pub fn identity(d: usize, n: usize) -> Self {
        Self {
            d,
            n,
            x_img: (0..n).map(|q| PauliWord::single(d, n, q, 1, 0)).collect(),
            z_img: (0..n).map(|q| PauliWord::single(d, n, q, 0, 1)).collect(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Image of `X_q`.
    pub fn x_image(&self, q: usize) -> &PauliWord {
        &self.x_img[q]
    }

    /// Image of `Z_q`.
    pub fn z_image(&self, q: usize) -> &PauliWord {
        &self.z_img[q]
    }

    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        if !op.kind.is_clifford_generator() {
            return Err(Error::NotClifford(format!("custom gate on {:?}", op.qudits)));
        }
        for row in self.x_img.iter_mut().chain(self.z_img.iter_mut()) {
            *row = conjugate_by_op(row, op);
        }
        Ok(())
    }

    /// `U P U†` for the Clifford `U` this tableau represents.
    pub fn conjugate(&self, p: &PauliWord) -> Result<PauliWord> {
        if p.d() != self.d || p.n() != self.n {
            return Err(Error::dim("Pauli word and tableau registers differ"));
        }
        let mut out = PauliWord::identity(self.d, self.n).with_phase(p.phase());
        for q in 0..self.n {
            out = out.mul(&self.x_img[q].pow(p.x()[q]))?;
            out = out.mul(&self.z_img[q].pow(p.z()[q]))?;
        }
        Ok(out)
    }

    /// Rows obey `[X_i, X_j] = [Z_i, Z_j] = 0` and `Z_i X_j = ω^{δij} X_j Z_i`.
    pub fn is_symplectic(&self) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                let xx = self.x_img[i].symplectic(&self.x_img[j]).unwrap_or(1);
                let zz = self.z_img[i].symplectic(&self.z_img[j]).unwrap_or(1);
                let zx = self.z_img[i].symplectic(&self.x_img[j]).unwrap_or(7);
                if xx != 0 || zz != 0 || zx != usize::from(i == j) {
                    return false;
                }
            }
        }
        true
    }

    /// Dense unitary (up to global phase) rebuilt from the tableau alone: `U|0⟩`
    /// is the joint +1 eigenvector of the `Z` images and `U|x⟩ = Π_j X̃_j^{x_j} U|0⟩`.
    pub fn to_unitary(&self) -> Result<CMat> {
        let d = self.d;
        let dim = d.pow(self.n as u32);
        let mut proj = CMat::identity(dim, dim);
        for zi in &self.z_img {
            let m = zi.dense();
            let mut acc = CMat::zeros(dim, dim);
            let mut pw = CMat::identity(dim, dim);
            for _ in 0..d {
                acc += &pw;
                pw = &pw * &m;
            }
            proj = proj * acc / C64::new(d as f64, 0.0);
        }
        let best = (0..dim)
            .max_by(|&a, &b| proj.column(a).norm().partial_cmp(&proj.column(b).norm()).expect("finite"))
            .expect("nonempty");
        let v0 = proj.column(best).into_owned();
        let norm = v0.norm();
        if norm < 1e-6 {
            return Err(Error::Invalid("tableau has no stabilizer state".into()));
        }
        let v0 = v0 / C64::new(norm, 0.0);
        let xs: Vec<CMat> = self.x_img.iter().map(|w| w.dense()).collect();
        let mut u = CMat::zeros(dim, dim);
        for col in 0..dim {
            let mut v = v0.clone();
            let mut c = col;
            for q in (0..self.n).rev() {
                for _ in 0..c % d {
                    v = &xs[q] * v;
                }
                c /= d;
            }
            u.set_column(col, &v.column(0));
        }
        Ok(u)
    }
}

pub fn tableau_simulate(circuit: &CliffordCircuit) -> StabilizerTableau {
    let mut t = StabilizerTableau::identity(circuit.d(), circuit.n());
    for op in circuit.ops() {
        t.apply(op).expect("validated Clifford circuit");
    }
    t
}

/// `C P C†`, computed gate by gate.
pub fn conjugate_pauli(circuit: &CliffordCircuit, p: &PauliWord) -> Result<PauliWord> {
    if p.d() != circuit.d() || p.n() != circuit.n() {
        return Err(Error::dim("Pauli word and circuit registers differ"));
    }
    Ok(circuit.ops().iter().fold(p.clone(), |acc, op| conjugate_by_op(&acc, op)))
}

/// Number of generator gates, each power counted once.
pub fn gate_count(circuit: &Circuit) -> usize {
    circuit.ops().len()
}

/// Seeded random generator word. Not Haar over the Clifford group, but every
/// generator appears with every power, so small groups are fully supported.
pub fn random_clifford(n: usize, d: usize, seed: u64) -> Result<CliffordCircuit> {
    if n == 0 {
        return Err(Error::Invalid("random Clifford on zero qudits".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = 6 + 6 * n * n;
    let mut c = Circuit::new(d, n)?;
    for _ in 0..len {
        let kind = match rng.gen_range(0..if n > 1 { 6 } else { 4 }) {
            0 => GateKind::X,
            1 => GateKind::Z,
            2 => GateKind::H,
            3 => GateKind::S,
            _ => GateKind::Cnot,
        };
        let qs = if kind == GateKind::Cnot {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            vec![a, b]
        } else {
            vec![rng.gen_range(0..n)]
        };
        let order = kind.order(d).expect("generator") as i64;
        let pow = rng.gen_range(1..order);
        c.push(GateOp::pow(kind, qs, pow, d))?;
    }
    CliffordCircuit::new(c)
}
