//! Arbitrary unitaries through port-based teleportation.
//!
//! The left party Bell-teleports `A₀` to the right over `n₀` pairs `F`. The
//! right party port-teleports `F₁A₁` back over `N` ports, each a block of
//! `n₀+n₁` pairs. Not knowing the port, the left party applies
//! `U (Pˣ ⊗ I)` to every port, then ships the `A₁` halves of all ports across.
//! In the second round both sides keep the port named by the broadcast index.

use std::sync::Arc;

use serde::Serialize;

use super::exec::{unitary_choi_vector, weyl_word, Instr};
use super::one_round::{OneRoundProtocol, Resource};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::qudit::BellOutcome;
use crate::teleport::{build_pgm, pbt_entanglement_fidelity, PBTParams};

/// Port-teleportation protocol with ports in their natural order.
pub fn bk_protocol(u: &CMat, d: usize, split: (usize, usize), n_ports: usize) -> Result<OneRoundProtocol> {
    let order: Vec<usize> = (0..n_ports).collect();
    bk_protocol_with_ports(u, d, split, n_ports, &order)
}

/// Port-teleportation protocol where logical port `i` uses physical pair block `slots[i]`.
pub fn bk_protocol_with_ports(
    u: &CMat,
    d: usize,
    (n0, n1): (usize, usize),
    n_ports: usize,
    slots: &[usize],
) -> Result<OneRoundProtocol> {
    let m = n0 + n1;
    if m == 0 || n_ports == 0 {
        return Err(Error::Invalid("need at least one input qudit and one port".into()));
    }
    if !u.is_square() || linalg::dim_u128(d, m) != u.nrows() as u128 || !linalg::is_unitary(u, 1e-9) {
        return Err(Error::dim("U must be a unitary on A₀A₁"));
    }
    let mut sorted = slots.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n_ports).collect::<Vec<_>>() {
        return Err(Error::Invalid("port slots must be a permutation".into()));
    }
    let params = PBTParams::with_register(d, m, n_ports)?;
    let pgm = build_pgm(params)?;
    let kraus: Vec<CMat> = pgm.kraus();

    let mut p = OneRoundProtocol::new(d, n0, n1, Resource::Pairs(n0 + n_ports * m), n0, n1);
    let port = |slot: usize, q: usize| n0 + slot * m + q;
    let l_port: Vec<Vec<usize>> = (0..n_ports).map(|s| (0..m).map(|q| p.l(port(s, q))).collect()).collect();
    let r_port: Vec<Vec<usize>> = (0..n_ports).map(|s| (0..m).map(|q| p.r(port(s, q))).collect()).collect();

    for j in 0..n0 {
        p.first_left.push(Instr::bell(format!("x{j}"), p.a0(j), p.l(j)));
    }
    let u_arc = Arc::new(u.clone());
    let ports = l_port.clone();
    p.first_left.push(Instr::adaptive(move |rec| {
        let outs: Vec<BellOutcome> =
            (0..n0).map(|j| rec.bell(&format!("x{j}"), d).ok_or_else(|| missing("x"))).collect::<Result<_>>()?;
        let corr = weyl_word(d, &outs).kronecker(&CMat::identity(d.pow(n1 as u32), d.pow(n1 as u32)));
        let g = Arc::new(&*u_arc * corr);
        Ok(ports.iter().map(|t| Instr::Gate { matrix: g.clone(), targets: t.clone() }).collect())
    }));

    // Π_i refers to logical port i, which sits in block slots[i]; targets
    // list the blocks in logical order.
    let mut targets: Vec<usize> = (0..n0).map(|j| p.r(j)).chain((0..n1).map(|j| p.a1(j))).collect();
    for i in 0..n_ports {
        targets.extend(&r_port[slots[i]]);
    }
    p.first_right.push(Instr::Measure { label: "port".into(), targets, kraus: Arc::new(kraus) });

    p.to_right = l_port.iter().flat_map(|t| t[n0..].to_vec()).collect();

    let (ports, slots_l) = (l_port.clone(), slots.to_vec());
    let anc: Vec<usize> = (0..n0).map(|j| p.left_anc(j)).collect();
    p.second_left.push(Instr::adaptive(move |rec| {
        let i = rec.get("port").ok_or_else(|| missing("port"))?;
        Ok((0..n0).map(|q| Instr::Swap(ports[slots_l[i]][q], anc[q])).collect())
    }));
    let (ports, slots_r) = (l_port, slots.to_vec());
    let anc: Vec<usize> = (0..n1).map(|j| p.right_anc(j)).collect();
    p.second_right.push(Instr::adaptive(move |rec| {
        let i = rec.get("port").ok_or_else(|| missing("port"))?;
        Ok((0..n1).map(|q| Instr::Swap(ports[slots_r[i]][n0 + q], anc[q])).collect())
    }));
    p.out0 = (0..n0).map(|j| p.left_anc(j)).collect();
    p.out1 = (0..n1).map(|j| p.right_anc(j)).collect();
    Ok(p)
}

fn missing(label: &str) -> Error {
    Error::MalformedProgram(format!("outcome {label} not visible"))
}

#[derive(Clone, Debug, Serialize)]
pub struct BkReport {
    pub d: usize,
    pub n0: usize,
    pub n1: usize,
    pub n_ports: usize,
    /// Total maximally entangled pairs, `n₀ + N(n₀+n₁)`.
    pub pairs: usize,
    pub choi_distance: f64,
    /// `min(1, ½·4d_A²/√N)` from the port-teleportation bound with `d_A = d^{n₀+n₁}`.
    pub pbt_bound: f64,
    /// `min(1, ½·4d_A⁴/√N)`, which is `½·2^{4n'+2}/√N` for qubits with `n' = n₀+n₁`.
    pub quoted_bound: f64,
    /// "dense" or "matrix-free".
    pub method: String,
}

/// Choi distance of the port-teleportation protocol to `U`.
///
/// The Bell step is exact and `U` acts after the port step, so the channel is
/// `U ∘ T_PBT` and its Choi distance to `U` equals that of the port-teleportation
/// channel to the identity, `1 − F`. Dense simulation is used while the
/// state fits; beyond that the matrix-free fidelity gives the same number.
pub fn bk_report(u: &CMat, d: usize, (n0, n1): (usize, usize), n_ports: usize) -> Result<BkReport> {
    let m = n0 + n1;
    let pairs = n0 + n_ports * m;
    let qudits = 3 * m + 2 * pairs;
    let dense = linalg::dim_u128(d, qudits) <= 1 << 22;
    let (dist, method) = if dense {
        let p = bk_protocol(u, d, (n0, n1), n_ports)?;
        let ideal = unitary_choi_vector(d, m, u)?;
        (p.choi()?.distance(&ideal), "dense")
    } else {
        if !u.is_square() || linalg::dim_u128(d, m) != u.nrows() as u128 || !linalg::is_unitary(u, 1e-9) {
            return Err(Error::dim("U must be a unitary on A₀A₁"));
        }
        let f = pbt_entanglement_fidelity(PBTParams::with_register(d, m, n_ports)?)?;
        (1.0 - f, "matrix-free")
    };
    let params = PBTParams::with_register(d, m, n_ports)?;
    let da = params.d_a() as f64;
    let quoted = (0.5 * 4.0 * da.powi(4) / (n_ports as f64).sqrt()).min(1.0);
    Ok(BkReport {
        d,
        n0,
        n1,
        n_ports,
        pairs,
        choi_distance: dist,
        pbt_bound: params.trace_distance_bound(),
        quoted_bound: quoted,
        method: method.into(),
    })
}
