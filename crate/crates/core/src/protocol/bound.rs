//! Product-replacement check: run a protocol once with its resource and once
//! with `ρ_L ⊗ ρ_R`, and compare the drop in success probability with `I(L:R)`.
//!
//! Three inequalities are reported side by side.
//! * `½ I ≥ −ln p_prod`, the form checked by [`BoundReport::pass`].
//! * `I ≥ D(p_ent ‖ p_prod)` for the binary success variable. The whole
//!   protocol followed by the success test is one channel applied to the
//!   resource, so this is data processing of relative entropy and cannot fail.
//! * `D_max(ρ_LR ‖ ρ_L⊗ρ_R) ≥ ln(p_ent / p_prod)`, from the operator
//!   inequality `ρ_LR ≤ e^{D_max} ρ_L⊗ρ_R`.
//!
//! The first one can fail. A protocol whose outputs detect both bit and phase
//! errors on one Bell pair (SWAP by teleportation, checked against its ideal
//! output) keeps `p_prod = 1/4` while `e^{−I/2} = 1/2`.

use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::exec::{unitary_choi_vector, Instr, Record};
use super::one_round::{OneRoundProtocol, Resource};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::qudit::{DenseState, DensityOperator};
use crate::tableau::random_clifford;

pub type OutcomePredicate = Arc<dyn Fn(&Record) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum Task {
    /// Always succeeds.
    Trivial,
    /// Success decided from the classical transcript of a branch.
    Outcomes(OutcomePredicate),
    /// Success iff the renormalised branch output has fidelity at least
    /// `threshold` with the Choi state of `target`.
    ChoiFidelity { target: CMat, threshold: f64 },
    /// A referee measures the output against the Choi state of `target`.
    Verify { target: CMat },
}

impl std::fmt::Debug for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Task::Trivial => write!(f, "Trivial"),
            Task::Outcomes(_) => write!(f, "Outcomes(..)"),
            Task::ChoiFidelity { threshold, .. } => write!(f, "ChoiFidelity {{ threshold: {threshold} }}"),
            Task::Verify { .. } => write!(f, "Verify"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub i_nats: f64,
    pub i_ebits: f64,
    pub p_suc_entangled: f64,
    pub p_suc_product: f64,
    /// `I/2` in nats.
    pub lhs: f64,
    /// `−ln p_prod`; infinite when the product run never succeeds.
    pub rhs: f64,
    /// `lhs ≥ rhs − 1e-9`.
    pub pass: bool,
    /// Binary relative entropy `D(p_ent ‖ p_prod)` in nats.
    pub kl_nats: f64,
    /// `I ≥ kl_nats − 1e-9`.
    pub kl_pass: bool,
    pub dmax_nats: f64,
    /// `dmax_nats ≥ ln(p_ent / p_prod) − 1e-9`.
    pub dmax_pass: bool,
}

/// Success probability of `p` on the Choi input (inputs maximally entangled
/// with a reference), from the full outcome tree.
pub fn success_probability(p: &OneRoundProtocol, task: &Task) -> Result<f64> {
    let n = p.n_in();
    let input = DenseState::max_entangled(p.d, n)?;
    let prog = p.to_program()?;
    match task {
        Task::Trivial => Ok(prog.run(&input)?.output.trace()),
        Task::Outcomes(pred) => {
            Ok(prog.run_branches(&input)?.iter().filter(|b| pred(&b.record)).map(|b| b.prob).sum())
        }
        Task::ChoiFidelity { target, threshold } => {
            let ideal = unitary_choi_vector(p.d, n, target)?;
            check_output(p, &ideal.factor)?;
            Ok(prog
                .run_branches(&input)?
                .iter()
                .filter(|b| b.prob > 0.0)
                .filter(|b| {
                    let ov: f64 = (ideal.factor.adjoint() * &b.factor).iter().map(|z| z.norm_sqr()).sum();
                    ov / b.prob >= *threshold
                })
                .map(|b| b.prob)
                .sum())
        }
        Task::Verify { target } => {
            let ideal = unitary_choi_vector(p.d, n, target)?;
            check_output(p, &ideal.factor)?;
            Ok(prog.run(&input)?.output.overlap(&ideal.factor))
        }
    }
}

fn check_output(p: &OneRoundProtocol, ideal: &CMat) -> Result<()> {
    if p.n_out() != p.n_in() || ideal.nrows() != p.d.pow(2 * p.n_in() as u32) {
        return Err(Error::dim("task target does not match the protocol outputs"));
    }
    Ok(())
}

/// `D_max(ρ_LR ‖ ρ_L ⊗ ρ_R)` in nats.
pub fn max_mutual_information(resource: &Resource, d: usize) -> Result<f64> {
    let rho = resource.density(d)?;
    let sigma = resource.product_replacement(d)?.density(d)?;
    if rho.dim() > 1 << 12 {
        return Err(Error::CapExceeded { what: "resource density".into(), dim: rho.dim() as u128, cap: 1 << 12 });
    }
    let top = linalg::hermitian_eigenvalues(sigma.matrix()).into_iter().fold(0.0, f64::max);
    let w = linalg::pinv_sqrt(sigma.matrix(), 1e-12 * top);
    let m = &w * rho.matrix() * &w;
    Ok(linalg::hermitian_eigenvalues(&m).into_iter().fold(0.0, f64::max).ln())
}

fn binary_kl(p: f64, q: f64) -> f64 {
    let term = |a: f64, b: f64| {
        if a <= 0.0 {
            0.0
        } else if b <= 0.0 {
            f64::INFINITY
        } else {
            a * (a / b).ln()
        }
    };
    term(p, q) + term(1.0 - p, 1.0 - q)
}

pub fn product_replacement_check(p: &OneRoundProtocol, task: &Task) -> Result<BoundReport> {
    const TOL: f64 = 1e-9;
    let account = p.account()?;
    let i = account.mutual_information;
    let p_ent = success_probability(p, task)?.min(1.0);
    let prod = p.with_resource(p.resource.product_replacement(p.d)?)?;
    let p_prod = success_probability(&prod, task)?.clamp(0.0, 1.0);
    let lhs = 0.5 * i.nats;
    let rhs = -p_prod.ln();
    let kl = binary_kl(p_ent, p_prod);
    let dmax = max_mutual_information(&p.resource, p.d)?;
    Ok(BoundReport {
        i_nats: i.nats,
        i_ebits: i.ebits,
        p_suc_entangled: p_ent,
        p_suc_product: p_prod,
        lhs,
        rhs,
        pass: lhs >= rhs - TOL,
        kl_nats: kl,
        kl_pass: i.nats >= kl - TOL,
        dmax_nats: dmax,
        dmax_pass: p_ent <= p_prod * (dmax + TOL).exp(),
    })
}

/// Computational-basis measurement on `k` qudits.
fn basis_measurement(d: usize, k: usize) -> Arc<Vec<CMat>> {
    let dim = d.pow(k as u32);
    Arc::new(
        (0..dim)
            .map(|i| {
                let mut m = CMat::zeros(dim, dim);
                m[(i, i)] = C64::new(1.0, 0.0);
                m
            })
            .collect(),
    )
}

/// Seeded random qubit protocol with a classical task.
///
/// There are no inputs, so every correlation in the transcript comes from the
/// resource: one or two pairs `cos θ|00⟩ + sin θ|11⟩` (maximally entangled for a
/// quarter of the seeds). Each stage is a random Clifford on the registers its
/// party holds, each resource qudit crosses to the other side or stays with a
/// fair coin, and both parties finish by measuring everything they hold. The task accepts
/// exactly the transcripts that occur with the original resource, so the
/// entangled run succeeds with certainty.
pub fn random_instance(seed: u64) -> Result<(OneRoundProtocol, Task)> {
    let d = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..=2usize);
    let maximal = rng.gen_bool(0.25);
    let mut state = DenseState::zero(d, 0)?;
    for _ in 0..k {
        let th: f64 = if maximal { std::f64::consts::FRAC_PI_4 } else { rng.gen_range(0.05..std::f64::consts::FRAC_PI_4) };
        let amps = vec![C64::new(th.cos(), 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(th.sin(), 0.0)];
        state = state.tensor(&DenseState::from_amplitudes(d, 2, amps)?)?;
    }
    // Pair-major order L₁R₁L₂R₂ → L₁L₂R₁R₂.
    let order: Vec<usize> = (0..k).map(|j| 2 * j).chain((0..k).map(|j| 2 * j + 1)).collect();
    let rho: DensityOperator = state.permute(&order)?.to_density();
    let mut p = OneRoundProtocol::new(d, 0, 0, Resource::Density { rho, n_l: k }, 0, 0);

    let stage = |regs: &[usize], rng: &mut ChaCha8Rng| -> Result<Instr> {
        let c = random_clifford(regs.len(), d, rng.gen())?;
        Ok(Instr::circuit(c.into_circuit(), regs.to_vec()))
    };
    let ls: Vec<usize> = (0..k).map(|j| p.l(j)).collect();
    let rs: Vec<usize> = (0..k).map(|j| p.r(j)).collect();
    p.first_left.push(stage(&ls, &mut rng)?);
    p.first_right.push(stage(&rs, &mut rng)?);
    let mut held = (Vec::new(), Vec::new());
    for &q in &ls {
        if rng.gen_bool(0.5) {
            p.to_right.push(q);
            held.1.push(q);
        } else {
            held.0.push(q);
        }
    }
    for &q in &rs {
        if rng.gen_bool(0.5) {
            p.to_left.push(q);
            held.0.push(q);
        } else {
            held.1.push(q);
        }
    }
    for (label, regs, second) in [("o0", &held.0, &mut p.second_left), ("o1", &held.1, &mut p.second_right)] {
        if regs.is_empty() {
            continue;
        }
        second.push(stage(regs, &mut rng)?);
        second.push(Instr::Measure { label: label.into(), targets: regs.clone(), kraus: basis_measurement(d, regs.len()) });
    }

    let key = |r: &Record| (r.get("o0").unwrap_or(0), r.get("o1").unwrap_or(0));
    let seen: HashSet<(usize, usize)> = p
        .to_program()?
        .run_branches(&DenseState::zero(d, 0)?)?
        .iter()
        .filter(|b| b.prob > 1e-12)
        .map(|b| key(&b.record))
        .collect();
    let task = Task::Outcomes(Arc::new(move |r: &Record| seen.contains(&key(r))));
    Ok((p, task))
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub cases: usize,
    pub pass: usize,
    pub kl_pass: usize,
    pub dmax_pass: usize,
    /// Seeds where `½ I ≥ −ln p_prod` fails.
    pub violations: Vec<u64>,
}

pub fn random_sweep(seeds: impl IntoIterator<Item = u64>) -> Result<(Vec<BoundReport>, SweepSummary)> {
    let mut reports = Vec::new();
    let mut s = SweepSummary { cases: 0, pass: 0, kl_pass: 0, dmax_pass: 0, violations: Vec::new() };
    for seed in seeds {
        let (p, task) = random_instance(seed)?;
        let r = product_replacement_check(&p, &task)?;
        s.cases += 1;
        s.pass += r.pass as usize;
        s.kl_pass += r.kl_pass as usize;
        s.dmax_pass += r.dmax_pass as usize;
        if !r.pass {
            s.violations.push(seed);
        }
        reports.push(r);
    }
    Ok((reports, s))
}
