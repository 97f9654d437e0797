//! Port-based teleportation with the pretty-good measurement (PGM).
//!
//! Register order for the POVM is `A, L₁, …, L_N`, each a `d_A`-dimensional
//! register of `k` qudits, `A` most significant. All operators involved are real
//! symmetric, so the dense route works over `f64`.

use nalgebra::{ComplexField, DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::lanczos::lanczos_fn;
use crate::error::{Error, Result};
use crate::linalg::{self, is_prime, max_abs, CMat, C64};
use crate::qudit::{Channel, DenseState};

/// Cap on `d_A^(N+1)` for dense POVM matrices.
pub const POVM_CAP: u128 = 1 << 14;
/// Cap on `d_A^(N+1)` for the matrix-free fidelity.
const VECTOR_CAP: u128 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PBTParams {
    /// Local prime dimension.
    pub d: usize,
    /// Qudits per register, so `d_A = d^k`.
    pub k: usize,
    pub n_ports: usize,
}

impl PBTParams {
    /// `d_a` must be a prime power.
    pub fn new(d_a: usize, n_ports: usize) -> Result<Self> {
        if d_a < 2 {
            return Err(Error::Invalid(format!("d_A = {d_a}")));
        }
        let p = (2..=d_a).find(|p| d_a % p == 0).unwrap();
        let (mut rest, mut k) = (d_a, 0);
        while rest % p == 0 {
            rest /= p;
            k += 1;
        }
        if rest != 1 {
            return Err(Error::Invalid(format!("d_A = {d_a} is not a prime power")));
        }
        Self::with_register(p, k, n_ports)
    }

    pub fn with_register(d: usize, k: usize, n_ports: usize) -> Result<Self> {
        if !is_prime(d) {
            return Err(Error::NotPrime(d));
        }
        if k == 0 || n_ports == 0 {
            return Err(Error::Invalid("need k ≥ 1 and N ≥ 1".into()));
        }
        Ok(Self { d, k, n_ports })
    }

    pub fn d_a(&self) -> usize {
        self.d.pow(self.k as u32)
    }

    /// `d_A^(N+1)`.
    pub fn povm_dim(&self) -> u128 {
        linalg::dim_u128(self.d_a(), self.n_ports + 1)
    }

    /// The diamond-norm accuracy `4 d_A² / √N`.
    pub fn epsilon(&self) -> f64 {
        4.0 * (self.d_a() * self.d_a()) as f64 / (self.n_ports as f64).sqrt()
    }

    /// Bound on the Choi trace distance implied by [`Self::epsilon`]: the Choi
    /// state is one admissible input, and the trace distance is half the norm.
    pub fn trace_distance_bound(&self) -> f64 {
        (0.5 * self.epsilon()).min(1.0)
    }
}

/// Strides of `A, L₁, …, L_N` in the POVM index.
fn strides(da: usize, n: usize) -> Vec<usize> {
    (0..=n).map(|p| da.pow((n - p) as u32)).collect()
}

fn digit(u: usize, stride: usize, da: usize) -> usize {
    (u / stride) % da
}

/// Indices with zero digits in the A slot and in port `i`.
fn pair_bases(da: usize, n: usize, i: usize) -> Vec<usize> {
    let st = strides(da, n);
    (0..da.pow((n + 1) as u32)).filter(|&u| digit(u, st[0], da) == 0 && digit(u, st[i], da) == 0).collect()
}

/// `σ_i = B Bᵀ`.
fn sigma_factor(da: usize, n: usize, i: usize) -> DMatrix<f64> {
    let st = strides(da, n);
    let bases = pair_bases(da, n, i);
    let c = (da as f64).powi(-(n as i32)).sqrt();
    let mut b = DMatrix::zeros(da.pow((n + 1) as u32), bases.len());
    for (col, &u0) in bases.iter().enumerate() {
        for j in 0..da {
            b[(u0 + j * (st[0] + st[i]), col)] = c;
        }
    }
    b
}

/// PGM instance: POVM elements `Π₁ … Π_N` on `A L₁ … L_N`.
#[derive(Clone, Debug)]
pub struct PBTInstance {
    params: PBTParams,
    povm: Vec<DMatrix<f64>>,
}

pub fn build_pgm(params: PBTParams) -> Result<PBTInstance> {
    let dim = params.povm_dim();
    if dim > POVM_CAP {
        return Err(Error::CapExceeded { what: "PGM POVM".into(), dim, cap: POVM_CAP });
    }
    let (da, n, dim) = (params.d_a(), params.n_ports, dim as usize);
    if n == 1 {
        return Ok(PBTInstance { params, povm: vec![DMatrix::identity(dim, dim)] });
    }
    let factors: Vec<DMatrix<f64>> = (1..=n).map(|i| sigma_factor(da, n, i)).collect();
    let mut rho = DMatrix::zeros(dim, dim);
    for b in &factors {
        rho += b * b.transpose();
    }
    let eig = SymmetricEigen::new(rho);
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut scaled = eig.eigenvectors.clone();
    for (j, &l) in eig.eigenvalues.iter().enumerate() {
        let s = if l > 1e-10 * top { 1.0 / l.sqrt() } else { 0.0 };
        scaled.column_mut(j).scale_mut(s);
    }
    let r = scaled * eig.eigenvectors.transpose();
    let mut povm: Vec<DMatrix<f64>> = factors
        .iter()
        .map(|b| {
            let rb = &r * b;
            &rb * rb.transpose()
        })
        .collect();
    let mut delta = DMatrix::identity(dim, dim);
    for p in &povm {
        delta -= p;
    }
    delta /= n as f64;
    for p in &mut povm {
        *p += &delta;
        // keep exact symmetry
        *p = (&*p + p.transpose()) * 0.5;
    }
    Ok(PBTInstance { params, povm })
}

impl PBTInstance {
    pub fn params(&self) -> PBTParams {
        self.params
    }

    pub fn povm(&self) -> &[DMatrix<f64>] {
        &self.povm
    }

    pub fn povm_complex(&self) -> Vec<CMat> {
        self.povm.iter().map(|p| p.map(|x| C64::new(x, 0.0))).collect()
    }

    /// Kraus operators `√Π_i`.
    pub fn kraus(&self) -> Vec<CMat> {
        self.povm
            .iter()
            .map(|p| {
                let eig = SymmetricEigen::new(p.clone());
                let s = eig.eigenvalues.map(|x| x.max(0.0).sqrt());
                let r = &eig.eigenvectors * DMatrix::from_diagonal(&s) * eig.eigenvectors.transpose();
                r.map(|x| C64::new(x, 0.0))
            })
            .collect()
    }

    /// Resource `Φ⁺^{⊗N}` on `L₁ R₁ L₂ R₂ …`.
    pub fn resource(&self) -> Result<DenseState> {
        let pair = DenseState::max_entangled(self.params.d, self.params.k)?;
        let mut s = pair.clone();
        for _ in 1..self.params.n_ports {
            s = s.tensor(&pair)?;
        }
        Ok(s)
    }

    /// `max |Σ Π_i − I|` entrywise.
    pub fn completeness_error(&self) -> f64 {
        let dim = self.povm[0].nrows();
        let mut sum = -DMatrix::<f64>::identity(dim, dim);
        for p in &self.povm {
            sum += p;
        }
        sum.amax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.povm
            .iter()
            .map(|p| SymmetricEigen::new(p.clone()).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
            .fold(f64::INFINITY, f64::min)
    }

    /// Normalised Choi operator of the PBT channel on `R ⊗ A′`.
    ///
    /// For the resource `Φ_{A′A} ⊗ Φ^{⊗N}` the amplitude matrix between
    /// `A L₁…L_N` and `A′ R₁…R_N` is `I/√D`, so outcome `i` leaves
    /// `Π_iᵀ / D` on `A′ R₁…R_N`; the other ports are then discarded.
    pub fn choi(&self) -> CMat {
        let (da, n) = (self.params.d_a(), self.params.n_ports);
        let st = strides(da, n);
        let dim = self.povm[0].nrows();
        let mut j = CMat::zeros(da * da, da * da);
        for (i, p) in self.povm.iter().enumerate() {
            let port = i + 1;
            let rest = pair_bases(da, n, port);
            for r in 0..da {
                for a in 0..da {
                    for r2 in 0..da {
                        for a2 in 0..da {
                            let (u, v) = (a * st[0] + r * st[port], a2 * st[0] + r2 * st[port]);
                            let acc: f64 = rest.iter().map(|&b| p[(v + b, u + b)]).sum();
                            j[(r * da + a, r2 * da + a2)] += C64::new(acc / dim as f64, 0.0);
                        }
                    }
                }
            }
        }
        j
    }

    pub fn channel(&self) -> Result<Channel> {
        Channel::from_choi(self.params.d, self.params.k, self.params.k, self.choi())
    }
}

pub fn pbt_channel(params: PBTParams) -> Result<Channel> {
    build_pgm(params)?.channel()
}

fn identity_choi(da: usize) -> CMat {
    let mut phi = CMat::zeros(da * da, da * da);
    for a in 0..da {
        for b in 0..da {
            phi[(a * da + a, b * da + b)] = C64::new(1.0 / da as f64, 0.0);
        }
    }
    phi
}

/// Entanglement fidelity `⟨Φ|J|Φ⟩` through the dense POVM.
pub fn pbt_fidelity_dense(params: PBTParams) -> Result<f64> {
    let j = build_pgm(params)?.choi();
    let da = params.d_a();
    Ok((0..da).flat_map(|a| (0..da).map(move |b| (a, b))).map(|(a, b)| j[(a * da + a, b * da + b)].re).sum::<f64>()
        / da as f64)
}

/// Partitions of `total` into at most `parts` positive parts, largest first.
fn partitions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(rem: usize, max: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        if cur.len() == parts {
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            go(rem - p, p, parts, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, total, parts, &mut Vec::new(), &mut out);
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Number of strings in `[d_A]^{len}` whose symbol counts form `lambda`.
fn orbit_size(lambda: &[usize], da: usize) -> f64 {
    let len: usize = lambda.iter().sum();
    let mut m = factorial(len) / lambda.iter().map(|&l| factorial(l)).product::<f64>();
    m *= factorial(da) / factorial(da - lambda.len());
    let mut i = 0;
    while i < lambda.len() {
        let run = lambda[i..].iter().take_while(|&&l| l == lambda[i]).count();
        m /= factorial(run);
        i += run;
    }
    m
}

/// Entanglement fidelity of the PGM scheme without forming any POVM matrix.
///
/// With `K = Σ_i Φ_{AL_i} ⊗ I`,
/// `F = N / d_A^{N+1} · Σ_m ‖(⟨Φ_{AL₁}| ⊗ I) K^{-1/2} |Φ_{AL₁}⟩|m⟩‖²`,
/// the sum running over the basis strings `m` of ports 2..N. The summand only
/// depends on the multiset of symbols in `m` up to relabelling, so one
/// representative per partition of `N−1` is evaluated and weighted by its orbit.
/// `K^{-1/2}` (pseudo-inverse) acts through Lanczos.
pub fn pbt_entanglement_fidelity(params: PBTParams) -> Result<f64> {
    let dim = params.povm_dim();
    if dim > VECTOR_CAP {
        return Err(Error::CapExceeded { what: "PBT fidelity vector".into(), dim, cap: VECTOR_CAP });
    }
    let (da, n, dim) = (params.d_a(), params.n_ports, dim as usize);
    let st = strides(da, n);
    let bases: Vec<Vec<usize>> = (1..=n).map(|i| pair_bases(da, n, i)).collect();
    let inv_sqrt_da = 1.0 / (da as f64).sqrt();
    let apply = |x: &[f64], y: &mut [f64]| {
        for (i, bs) in bases.iter().enumerate() {
            let step = st[0] + st[i + 1];
            for &b in bs {
                let s: f64 = (0..da).map(|j| x[b + j * step]).sum::<f64>() / da as f64;
                for j in 0..da {
                    y[b + j * step] += s;
                }
            }
        }
    };
    let step1 = st[0] + st[1];
    let mut total = 0.0;
    for lambda in partitions(n - 1, da) {
        let mut m0 = 0;
        let mut port = 2;
        for (sym, &count) in lambda.iter().enumerate() {
            for _ in 0..count {
                m0 += sym * st[port];
                port += 1;
            }
        }
        let mut v = vec![0.0; dim];
        for j in 0..da {
            v[m0 + j * step1] = inv_sqrt_da;
        }
        let w = lanczos_fn(&apply, &v, |t| if t > 1e-9 { 1.0 / t.sqrt() } else { 0.0 }, 400);
        let val: f64 = bases[0]
            .iter()
            .map(|&b| {
                let s: f64 = (0..da).map(|j| w[b + j * step1]).sum::<f64>() * inv_sqrt_da;
                s * s
            })
            .sum();
        total += orbit_size(&lambda, da) * val;
    }
    Ok(n as f64 * total / (da as f64).powi(n as i32 + 1))
}

#[derive(Clone, Debug, Serialize)]
pub struct PbtReport {
    pub d_a: usize,
    pub n_ports: usize,
    pub choi_fidelity: f64,
    pub choi_trace_distance: f64,
    pub bound: f64,
    /// "dense" or "matrix-free".
    pub method: String,
}

/// Fidelity and Choi trace distance to the identity channel. Above the dense
/// cap the distance is `1 − F`, exact because the PGM channel is covariant and
/// hence depolarising.
pub fn pbt_report(params: PBTParams) -> Result<PbtReport> {
    let da = params.d_a();
    let (f, td, method) = if params.povm_dim() <= POVM_CAP {
        let j = build_pgm(params)?.choi();
        let phi = identity_choi(da);
        let f = (0..da * da).map(|r| (0..da * da).map(|c| phi[(r, c)] * j[(c, r)]).sum::<C64>()).sum::<C64>().re;
        (f, linalg::half_trace_norm(&(j - phi)), "dense")
    } else {
        let f = pbt_entanglement_fidelity(params)?;
        (f, 1.0 - f, "matrix-free")
    };
    Ok(PbtReport {
        d_a: da,
        n_ports: params.n_ports,
        choi_fidelity: f,
        choi_trace_distance: td,
        bound: params.trace_distance_bound(),
        method: method.into(),
    })
}

/// Keep the registers in `keep` (ascending) of a square matrix over `n`
/// registers of dimension `base`.
fn trace_keep<T: ComplexField + Copy>(m: &DMatrix<T>, base: usize, n: usize, keep: &[usize]) -> DMatrix<T> {
    let st: Vec<usize> = (0..n).map(|p| base.pow((n - 1 - p) as u32)).collect();
    let kdim = base.pow(keep.len() as u32);
    let offset = |mut idx: usize| {
        let mut off = 0;
        for &p in keep.iter().rev() {
            off += (idx % base) * st[p];
            idx /= base;
        }
        off
    };
    let offs: Vec<usize> = (0..kdim).map(offset).collect();
    let rests: Vec<usize> =
        (0..m.nrows()).filter(|&u| keep.iter().all(|&p| (u / st[p]) % base == 0)).collect();
    DMatrix::from_fn(kdim, kdim, |i, j| {
        let mut acc = T::zero();
        for &r in &rests {
            acc += m[(r + offs[i], r + offs[j])];
        }
        acc
    })
}

/// Checks `tr_{R^c}(U^{⊗N} X U^{†⊗N}) = U tr_{R^c}(X) U†` for every port `R`
/// on 10 seeded random density operators `X`.
pub fn trace_commutation_check(u: &CMat, n: usize) -> bool {
    let du = u.nrows();
    if !u.is_square() || n == 0 || linalg::dim_u128(du, n) > 1 << 12 {
        return false;
    }
    let mut big = CMat::identity(1, 1);
    for _ in 0..n {
        big = big.kronecker(u);
    }
    let dim = big.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7c0 + n as u64);
    for _ in 0..10 {
        let g = CMat::from_fn(dim, dim, |_, _| {
            C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        let mut x = &g * g.adjoint();
        let tr = x.trace();
        x /= tr;
        let rotated = &big * &x * big.adjoint();
        for port in 0..n {
            let lhs = trace_keep(&rotated, du, n, &[port]);
            let rhs = u * trace_keep(&x, du, n, &[port]) * u.adjoint();
            if max_abs(&(lhs - rhs)) > 1e-9 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::gates;

    fn qubit(n: usize) -> PBTParams {
        PBTParams::new(2, n).unwrap()
    }

    /// Closed-form PGM entanglement fidelity for qubits (Ishizaka–Hiroshima).
    fn qubit_fidelity_formula(n: usize) -> f64 {
        let nf = n as f64;
        let mut binom = 1.0;
        let mut s = 0.0;
        for k in 0..=n {
            let kf = k as f64;
            let t = (nf - 2.0 * kf - 1.0) / (kf + 1.0).sqrt() + (nf - 2.0 * kf + 1.0) / (nf - kf + 1.0).sqrt();
            s += binom * t * t;
            binom = binom * (nf - kf) / (kf + 1.0);
        }
        s / 2f64.powi(n as i32 + 3)
    }

    #[test]
    fn params_factor_prime_powers() {
        let p = PBTParams::new(4, 3).unwrap();
        assert_eq!((p.d, p.k, p.d_a()), (2, 2, 4));
        assert!(PBTParams::new(6, 2).is_err());
        assert!(PBTParams::new(2, 0).is_err());
    }

    #[test]
    fn single_port_is_identity_povm_and_discards() {
        let inst = build_pgm(qubit(1)).unwrap();
        assert_eq!(inst.povm().len(), 1);
        assert!(inst.completeness_error() < 1e-12);
        let j = inst.choi();
        assert!(max_abs(&(j - CMat::identity(4, 4) * C64::new(0.25, 0.0))) < 1e-12);
        let r = pbt_report(qubit(1)).unwrap();
        assert!((r.choi_trace_distance - 0.75).abs() < 1e-12);
    }

    #[test]
    fn povm_is_complete_and_positive() {
        for (da, n) in [(2, 2), (2, 3), (2, 5), (3, 2), (4, 2)] {
            let inst = build_pgm(PBTParams::new(da, n).unwrap()).unwrap();
            assert!(inst.completeness_error() < 1e-9);
            assert!(inst.min_eigenvalue() > -1e-10);
        }
    }

    #[test]
    fn swapping_ports_permutes_elements() {
        let inst = build_pgm(qubit(3)).unwrap();
        let st = strides(2, 3);
        // swap L₁ and L₃
        let perm = |u: usize| {
            let (l1, l3) = (digit(u, st[1], 2), digit(u, st[3], 2));
            u - l1 * st[1] - l3 * st[3] + l3 * st[1] + l1 * st[3]
        };
        let p = inst.povm();
        for u in 0..16 {
            for v in 0..16 {
                assert!((p[0][(perm(u), perm(v))] - p[2][(u, v)]).abs() < 1e-12);
                assert!((p[1][(perm(u), perm(v))] - p[1][(u, v)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dense_fidelity_matches_closed_form() {
        for n in 1..=6 {
            let f = pbt_fidelity_dense(qubit(n)).unwrap();
            assert!((f - qubit_fidelity_formula(n)).abs() < 1e-9, "N={n}: {f}");
        }
    }

    #[test]
    fn matrix_free_matches_dense() {
        for (da, n) in [(2, 1), (2, 2), (2, 4), (2, 6), (3, 2), (3, 3), (4, 2), (4, 3)] {
            let p = PBTParams::new(da, n).unwrap();
            let a = pbt_entanglement_fidelity(p).unwrap();
            let b = pbt_fidelity_dense(p).unwrap();
            assert!((a - b).abs() < 1e-9, "d_A={da} N={n}: {a} vs {b}");
        }
        for n in [10, 14] {
            assert!((pbt_entanglement_fidelity(qubit(n)).unwrap() - qubit_fidelity_formula(n)).abs() < 1e-9);
        }
    }

    #[test]
    fn orbits_cover_all_strings() {
        for (len, da) in [(0, 2), (3, 2), (5, 3), (7, 4), (4, 6)] {
            let total: f64 = partitions(len, da).iter().map(|l| orbit_size(l, da)).sum();
            assert_eq!(total, (da as f64).powi(len as i32));
        }
    }

    #[test]
    fn fidelity_increases_and_stays_within_bound() {
        let mut last = 0.0;
        for n in 1..=6 {
            let r = pbt_report(qubit(n)).unwrap();
            assert!(r.choi_fidelity > last);
            last = r.choi_fidelity;
            assert!(r.choi_trace_distance <= r.bound + 1e-12);
            // depolarising structure
            assert!((r.choi_trace_distance - (1.0 - r.choi_fidelity)).abs() < 1e-9);
        }
    }

    #[test]
    fn channel_is_trace_preserving() {
        let ch = pbt_channel(PBTParams::new(3, 2).unwrap()).unwrap();
        assert_eq!(ch.n_in(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(build_pgm(qubit(14)), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn trace_commutation() {
        assert!(trace_commutation_check(&CMat::identity(2, 2), 3));
        assert!(trace_commutation_check(&gates::h(2), 2));
        assert!(trace_commutation_check(&gates::h(3), 2));
        let m = CMat::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.0), C64::new(0.7, 0.0)]);
        assert!(!trace_commutation_check(&m, 2));
    }

    #[test]
    fn trace_keep_matches_density_partial_trace() {
        let psi = DenseState::random(3, 3, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let rho = psi.to_density();
        let a = trace_keep(rho.matrix(), 3, 3, &[0, 2]);
        let b = rho.partial_trace(&[0, 2]).unwrap();
        assert!(max_abs(&(a - b.matrix())) < 1e-12);
    }
}
