//! Threshold secret sharing of a qudit and code-routing.
//!
//! A `(k, 2k−1)` scheme over prime `d ≥ n` encodes
//! `|s⟩ ↦ d^{−(k−1)/2} Σ_c |p(1), …, p(n)⟩` with
//! `p(t) = c₀ + c₁t + … + c_{k−2}t^{k−2} + s·t^{k−1}` and points taken mod `d`.
//! Any `k` points fix `p`; any `k−1` of them are uniform for every `s`.
//! Code-routing encodes `Q` on the left and routes each share to a side chosen
//! by one input bit, with a small garden-hose strategy per share.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::garden_hose::{gh_route, schedule, GHStrategy, Matching, Node, RoutingOutcome};
use crate::linalg::{self, CMat, C64};
use crate::qudit::{kernel, measure_generalized_bell, trace_distance, BellOutcome, DenseState, DensityOperator};

/// Cap on `d^k` for the recovery permutation.
const RECOVERY_CAP: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdScheme {
    pub n: usize,
    pub k: usize,
    pub d: usize,
}

impl ThresholdScheme {
    pub fn new(n: usize, k: usize, d: usize) -> Result<Self> {
        if !linalg::is_prime(d) {
            return Err(Error::NotPrime(d));
        }
        if d < n {
            return Err(Error::DimensionTooSmall { d, n });
        }
        if k == 0 || n != 2 * k - 1 {
            return Err(Error::Invalid(format!("a pure threshold scheme needs n = 2k−1, got ({k}, {n})")));
        }
        Ok(Self { n, k, d })
    }

    /// Evaluation point of share `j` (0-based).
    pub fn point(&self, j: usize) -> usize {
        (j + 1) % self.d
    }

    /// Share values `p(1..n)` for secret `s` and low coefficients `c`.
    fn shares_of(&self, s: usize, c: &[usize]) -> Vec<usize> {
        (0..self.n)
            .map(|j| {
                let t = self.point(j);
                // Horner from the top coefficient.
                let mut v = s;
                for &ci in c.iter().rev() {
                    v = (v * t + ci) % self.d;
                }
                v
            })
            .collect()
    }

    /// All `(s, c)` with `c ∈ Z_d^{k−1}`.
    fn polys(&self) -> impl Iterator<Item = (usize, Vec<usize>)> + '_ {
        let (d, k) = (self.d, self.k);
        (0..d.pow(k as u32)).map(move |mut i| {
            let s = i % d;
            i /= d;
            let c = (0..k - 1)
                .map(|_| {
                    let v = i % d;
                    i /= d;
                    v
                })
                .collect();
            (s, c)
        })
    }

    fn index(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &v| acc * self.d + v)
    }

    /// Encoding isometry, `d^n × d`.
    pub fn isometry(&self) -> CMat {
        let amp = C64::new((self.d as f64).powi(-(self.k as i32 - 1)).sqrt(), 0.0);
        let mut v = CMat::zeros(self.d.pow(self.n as u32), self.d);
        for (s, c) in self.polys() {
            v[(self.index(&self.shares_of(s, &c)), s)] += amp;
        }
        v
    }

    pub fn encode(&self, secret: &DenseState) -> Result<DenseState> {
        if secret.d() != self.d || secret.n() != 1 {
            return Err(Error::dim("secret must be one qudit of the scheme's dimension"));
        }
        let out = self.isometry() * secret.column();
        DenseState::from_amplitudes(self.d, self.n, out.column(0).iter().copied().collect())
    }

    /// Permutation on `k` shares sending `|p(T)⟩` to `|s⟩|p(T')⟩`, where `T'`
    /// is the complement of `T`. For fixed `s` the map `c ↦ p(T')` is a
    /// bijection, so the junk register decouples from the secret.
    fn recovery(&self, held: &[usize]) -> Result<CMat> {
        let dim = self.d.pow(self.k as u32);
        if dim > RECOVERY_CAP {
            return Err(Error::CapExceeded { what: "recovery unitary".into(), dim: dim as u128, cap: RECOVERY_CAP as u128 });
        }
        let rest: Vec<usize> = (0..self.n).filter(|j| !held.contains(j)).collect();
        let mut u = CMat::zeros(dim, dim);
        for (s, c) in self.polys() {
            let all = self.shares_of(s, &c);
            let from: Vec<usize> = held.iter().map(|&j| all[j]).collect();
            let to: Vec<usize> = std::iter::once(s).chain(rest.iter().map(|&j| all[j])).collect();
            u[(self.index(&to), self.index(&from))] = linalg::ONE;
        }
        Ok(u)
    }

    /// Runs the recovery in place. `holders` lists `(share, qudit)`; the first
    /// `k` are used. Returns the state and the qudit now holding the secret.
    pub fn recover(&self, state: &DenseState, holders: &[(usize, usize)]) -> Result<(DenseState, usize)> {
        if holders.len() < self.k {
            return Err(Error::InsufficientShares { k: self.k, got: holders.len() });
        }
        let used = &holders[..self.k];
        let shares: Vec<usize> = used.iter().map(|h| h.0).collect();
        let qudits: Vec<usize> = used.iter().map(|h| h.1).collect();
        if shares.iter().any(|&j| j >= self.n) || (1..shares.len()).any(|i| shares[..i].contains(&shares[i])) {
            return Err(Error::range(format!("share list {shares:?}")));
        }
        let u = self.recovery(&shares)?;
        Ok((state.apply_gate(&u, &qudits)?, qudits[0]))
    }

    /// Recovered secret as a pure state (global phase arbitrary).
    pub fn decode(&self, state: &DenseState, holders: &[(usize, usize)]) -> Result<DenseState> {
        let (st, q) = self.recover(state, holders)?;
        top_eigenvector(&st.reduced(&[q])?)
    }
}

fn top_eigenvector(rho: &DensityOperator) -> Result<DenseState> {
    let (vals, vecs) = linalg::hermitian_eig(rho.matrix());
    let top = (0..vals.len()).max_by(|&i, &j| vals[i].total_cmp(&vals[j])).expect("nonempty");
    DenseState::normalized(rho.d(), rho.n(), vecs.column(top).iter().copied().collect())
}

/// Drops qudits that are in a pure state uncorrelated with the rest, keeping
/// the rest in order.
fn discard_product(state: &DenseState, drop: &[usize]) -> Result<DenseState> {
    let keep: Vec<usize> = (0..state.n()).filter(|q| !drop.contains(q)).collect();
    let m = kernel::split_matrix(state.amplitudes(), state.d(), state.n(), &keep)?;
    let col = (0..m.ncols()).max_by(|&i, &j| m.column(i).norm().total_cmp(&m.column(j).norm())).expect("nonempty");
    let psi = m.column(col) / C64::new(m.column(col).norm(), 0.0);
    // Rank one iff projecting every column onto psi keeps all the weight.
    if ((psi.adjoint() * &m).norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Invalid("discarded qudits are entangled with the rest".into()));
    }
    DenseState::from_amplitudes(state.d(), keep.len(), psi.iter().copied().collect())
}

/// Where a share goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Directive {
    Keep,
    Send,
    /// Side given by bit `i` of `x`.
    ByX(usize),
    ByY(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodeRoutingPlan {
    pub scheme: ThresholdScheme,
    pub nx: usize,
    pub ny: usize,
    /// One directive per share.
    pub directives: Vec<Directive>,
}

impl CodeRoutingPlan {
    pub fn new(scheme: ThresholdScheme, nx: usize, ny: usize, directives: Vec<Directive>) -> Result<Self> {
        if directives.len() != scheme.n {
            return Err(Error::Invalid(format!("{} directives for {} shares", directives.len(), scheme.n)));
        }
        for dir in &directives {
            match *dir {
                Directive::ByX(i) if i >= nx => return Err(Error::range(format!("x bit {i} of {nx}"))),
                Directive::ByY(i) if i >= ny => return Err(Error::range(format!("y bit {i} of {ny}"))),
                _ => {}
            }
        }
        Ok(Self { scheme, nx, ny, directives })
    }

    /// Keep share 1, share 2 to side `x`, share 3 to side `y`.
    pub fn and(d: usize) -> Result<Self> {
        Self::new(ThresholdScheme::new(3, 2, d)?, 1, 1, vec![Directive::Keep, Directive::ByX(0), Directive::ByY(0)])
    }

    /// Send share 1, share 2 to side `x`, share 3 to side `y`.
    pub fn or(d: usize) -> Result<Self> {
        Self::new(ThresholdScheme::new(3, 2, d)?, 1, 1, vec![Directive::Send, Directive::ByX(0), Directive::ByY(0)])
    }

    fn share_side(&self, j: usize, x: u64, y: u64) -> usize {
        match self.directives[j] {
            Directive::Keep => 0,
            Directive::Send => 1,
            Directive::ByX(i) => ((x >> i) & 1) as usize,
            Directive::ByY(i) => ((y >> i) & 1) as usize,
        }
    }

    /// Side holding at least `k` shares.
    pub fn side(&self, x: u64, y: u64) -> Result<usize> {
        let right = (0..self.scheme.n).filter(|&j| self.share_side(j, x, y) == 1).count();
        let left = self.scheme.n - right;
        match (left >= self.scheme.k, right >= self.scheme.k) {
            (true, false) => Ok(0),
            (false, true) => Ok(1),
            _ => Err(Error::AmbiguousSide),
        }
    }

    /// Garden-hose strategy moving share `j` with `Q` as the share.
    pub fn share_strategy(&self, j: usize) -> Result<GHStrategy> {
        let q_l1: Matching = vec![(Node::Q, Node::L(1))];
        let xs = 0..1u64 << self.nx;
        let ys = 0..1u64 << self.ny;
        let (e, left, right): (usize, BTreeMap<u64, Matching>, BTreeMap<u64, Matching>) = match self.directives[j] {
            Directive::Keep => (0, BTreeMap::new(), BTreeMap::new()),
            Directive::Send => (1, xs.map(|x| (x, q_l1.clone())).collect(), BTreeMap::new()),
            Directive::ByX(i) => (1, xs.filter(|x| (x >> i) & 1 == 1).map(|x| (x, q_l1.clone())).collect(), BTreeMap::new()),
            Directive::ByY(i) => (
                2,
                xs.map(|x| (x, q_l1.clone())).collect(),
                ys.filter(|y| (y >> i) & 1 == 0).map(|y| (y, vec![(Node::R(1), Node::R(2))])).collect(),
            ),
        };
        GHStrategy::new(e, self.nx, self.ny, left, right)
    }

    /// Total pipes over all shares.
    pub fn pipes(&self) -> Result<usize> {
        (0..self.scheme.n).map(|j| Ok(self.share_strategy(j)?.pipes())).sum()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CodeRouteResult {
    pub side: usize,
    pub share_sides: Vec<usize>,
    /// Fidelity of the decoded secret with the input.
    pub fidelity: f64,
    /// Trace distance of the losing side's shares to the maximally mixed state.
    pub hiding_distance: f64,
    #[serde(skip)]
    pub recovered: DenseState,
    #[serde(skip)]
    pub other_side: Option<DensityOperator>,
    pub pipes: usize,
}

/// Encodes `q`, routes every share through its garden-hose strategy with
/// Born-sampled Bell outcomes and Pauli corrections, then decodes on the
/// winning side.
pub fn code_route(plan: &CodeRoutingPlan, x: u64, y: u64, q: &DenseState, rng: &mut impl Rng) -> Result<CodeRouteResult> {
    let sc = plan.scheme;
    if x >> plan.nx != 0 || y >> plan.ny != 0 {
        return Err(Error::range(format!("inputs ({x}, {y})")));
    }
    let side = plan.side(x, y)?;
    let mut state = sc.encode(q)?;
    let n = sc.n;
    let mut share_sides = Vec::with_capacity(n);
    for j in 0..n {
        let s = plan.share_strategy(j)?;
        let r = route_share(&s, x, y, j, state, rng)?;
        state = r.0;
        share_sides.push(r.1.side);
    }
    let winners: Vec<(usize, usize)> = (0..n).filter(|&j| share_sides[j] == side).map(|j| (j, j)).collect();
    let losers: Vec<usize> = (0..n).filter(|&j| share_sides[j] != side).collect();
    let other = if losers.is_empty() { None } else { Some(state.reduced(&losers)?) };
    let hiding_distance = match &other {
        None => 0.0,
        Some(rho) => trace_distance(rho, &DensityOperator::maximally_mixed(sc.d, losers.len())?)?,
    };
    let recovered = sc.decode(&state, &winners)?;
    let fidelity = recovered.overlap(q)?;
    Ok(CodeRouteResult { side, share_sides, fidelity, hiding_distance, recovered, other_side: other, pipes: plan.pipes()? })
}

/// Moves share `j` along its strategy, corrects the frame and puts the share
/// back at qudit `j`.
fn route_share(
    s: &GHStrategy,
    x: u64,
    y: u64,
    j: usize,
    state: DenseState,
    rng: &mut impl Rng,
) -> Result<(DenseState, RoutingOutcome)> {
    let (d, n, e) = (state.d(), state.n(), s.pipes());
    let mut st = state;
    for _ in 0..e {
        st = st.tensor(&DenseState::max_entangled(d, 1)?)?;
    }
    let at = |node: Node| match node {
        Node::Q => j,
        Node::L(i) => n + 2 * (i - 1),
        Node::R(i) => n + 2 * (i - 1) + 1,
    };
    let mut outs: Vec<BellOutcome> = Vec::new();
    for (a, b) in schedule(s, x, y) {
        let (o, post) = measure_generalized_bell(&st, (at(a), at(b)), rng)?;
        outs.push(o);
        st = post;
    }
    let r = gh_route(s, x, y, d, &outs)?;
    let t = at(r.terminal);
    st = st.apply_gate(&r.correction.dense(), &[t])?;
    if t != j {
        let mut order: Vec<usize> = (0..st.n()).collect();
        order.swap(j, t);
        st = st.permute(&order)?;
    }
    let extra: Vec<usize> = (n..st.n()).collect();
    Ok((discard_product(&st, &extra)?, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::fidelity;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn basis(d: usize, s: usize) -> DenseState {
        DenseState::basis(d, &[s]).unwrap()
    }

    fn plus(d: usize) -> DenseState {
        DenseState::normalized(d, 1, vec![linalg::ONE; d]).unwrap()
    }

    #[test]
    fn qutrit_amplitudes() {
        // Secret s: shares (c + s, c + 2s, c + 3s) mod 3, i.e. |c, c+s, c+2s⟩ up to order.
        let sc = ThresholdScheme::new(3, 2, 3).unwrap();
        let v = sc.isometry();
        let a = 1.0 / 3f64.sqrt();
        for s in 0..3 {
            for c in 0..3 {
                let idx = ((c + s) % 3) * 9 + ((c + 2 * s) % 3) * 3 + c % 3;
                assert!((v[(idx, s)].re - a).abs() < 1e-12);
            }
            assert!((v.column(s).norm() - 1.0).abs() < 1e-12);
        }
        // |0⟩ ↦ (|000⟩ + |111⟩ + |222⟩)/√3
        let z = sc.encode(&basis(3, 0)).unwrap();
        for c in 0..3 {
            assert!((z.amplitudes()[13 * c].re - a).abs() < 1e-12);
        }
    }

    #[test]
    fn isometry_condition() {
        for (n, k, d) in [(3, 2, 3), (3, 2, 5), (5, 3, 5)] {
            let v = ThresholdScheme::new(n, k, d).unwrap().isometry();
            assert!(linalg::frob_dist(&(v.adjoint() * &v), &linalg::identity(d)) < 1e-9);
        }
    }

    fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0..1u32 << n).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|j| m >> j & 1 == 1).collect()).collect()
    }

    /// Recovery on the Choi state: reference ⊗ encoded secret, then decode.
    #[test]
    fn any_k_shares_recover_the_channel() {
        for (n, k, d) in [(3, 2, 3), (3, 2, 5), (5, 3, 5)] {
            let sc = ThresholdScheme::new(n, k, d).unwrap();
            let phi = DenseState::max_entangled(d, 1).unwrap();
            let mut enc = CMat::identity(d, d).kronecker(&sc.isometry());
            enc = &enc * phi.column();
            let st = DenseState::from_amplitudes(d, n + 1, enc.column(0).iter().copied().collect()).unwrap();
            for set in all_subsets(n, k) {
                let holders: Vec<(usize, usize)> = set.iter().map(|&j| (j, j + 1)).collect();
                let (out, q) = sc.recover(&st, &holders).unwrap();
                let f = out.reduced(&[0, q]).unwrap().expectation(&phi).unwrap();
                assert!((1.0 - f) < 1e-9, "({n},{k},{d}) {set:?}: {f}");
            }
        }
    }

    #[test]
    fn fewer_than_k_shares_are_maximally_mixed() {
        for (n, k, d) in [(3, 2, 3), (3, 2, 5), (5, 3, 5)] {
            let sc = ThresholdScheme::new(n, k, d).unwrap();
            let mut inputs: Vec<DenseState> = (0..d).map(|s| basis(d, s)).collect();
            inputs.push(plus(d));
            inputs.push(DenseState::random(d, 1, &mut ChaCha8Rng::seed_from_u64(d as u64)).unwrap());
            for q in &inputs {
                let e = sc.encode(q).unwrap();
                for set in all_subsets(n, k - 1) {
                    let rho = e.reduced(&set).unwrap();
                    let mixed = DensityOperator::maximally_mixed(d, k - 1).unwrap();
                    assert!(trace_distance(&rho, &mixed).unwrap() < 1e-9, "({n},{k},{d}) {set:?}");
                }
            }
        }
    }

    #[test]
    fn decode_examples() {
        let sc = ThresholdScheme::new(3, 2, 3).unwrap();
        let p = plus(3);
        let e = sc.encode(&p).unwrap();
        assert!((sc.decode(&e, &[(0, 0), (1, 1)]).unwrap().overlap(&p).unwrap() - 1.0).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let q = DenseState::random(3, 1, &mut rng).unwrap();
            let e = sc.encode(&q).unwrap();
            let a = sc.decode(&e, &[(0, 0), (2, 2)]).unwrap();
            let b = sc.decode(&e, &[(0, 0), (1, 1)]).unwrap();
            let f = fidelity(&a.to_density(), &b.to_density()).unwrap();
            assert!((1.0 - f) < 1e-9);
            assert!((a.overlap(&q).unwrap() - 1.0).abs() < 1e-9);
        }
        assert!(matches!(sc.decode(&e, &[(0, 0)]), Err(Error::InsufficientShares { k: 2, got: 1 })));
    }

    #[test]
    fn bad_schemes() {
        assert!(matches!(ThresholdScheme::new(3, 2, 2), Err(Error::NotPrime(2)) | Err(Error::DimensionTooSmall { .. })));
        assert!(matches!(ThresholdScheme::new(5, 3, 3), Err(Error::DimensionTooSmall { d: 3, n: 5 })));
        assert!(ThresholdScheme::new(4, 2, 5).is_err());
        assert!(ThresholdScheme::new(3, 2, 4).is_err());
    }

    #[test]
    fn plan_sides() {
        let and = CodeRoutingPlan::and(3).unwrap();
        let or = CodeRoutingPlan::or(3).unwrap();
        let table = |p: &CodeRoutingPlan| [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(x, y)| p.side(x, y).unwrap());
        assert_eq!(table(&and), [0, 0, 0, 1]);
        assert_eq!(table(&or), [0, 1, 1, 1]);
        assert_eq!(and.pipes().unwrap(), 3);
        assert!(CodeRoutingPlan::new(and.scheme, 1, 1, vec![Directive::Keep; 2]).is_err());
        assert!(CodeRoutingPlan::new(and.scheme, 1, 1, vec![Directive::Keep, Directive::ByX(1), Directive::Send]).is_err());
    }

    #[test]
    fn ambiguous_side_is_rejected() {
        // A tie needs n ≠ 2k−1, which new() refuses, so build it by hand.
        let sc = ThresholdScheme { n: 2, k: 2, d: 3 };
        let p = CodeRoutingPlan { scheme: sc, nx: 0, ny: 0, directives: vec![Directive::Keep, Directive::Send] };
        assert!(matches!(p.side(0, 0), Err(Error::AmbiguousSide)));
    }

    #[test]
    fn and_or_routing_all_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for d in [3, 5] {
            for (plan, f) in [(CodeRoutingPlan::and(d).unwrap(), [0, 0, 0, 1]), (CodeRoutingPlan::or(d).unwrap(), [0, 1, 1, 1])] {
                for (i, (x, y)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
                    let q = DenseState::random(d, 1, &mut rng).unwrap();
                    let r = code_route(&plan, x, y, &q, &mut rng).unwrap();
                    assert_eq!(r.side, f[i]);
                    assert!((r.fidelity - 1.0).abs() < 1e-9, "d={d} ({x},{y}) {}", r.fidelity);
                    assert!(r.hiding_distance < 1e-9);
                }
            }
        }
    }

    #[test]
    fn and_example_shares() {
        let plan = CodeRoutingPlan::and(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = code_route(&plan, 1, 0, &plus(3), &mut rng).unwrap();
        assert_eq!(r.share_sides, vec![0, 1, 0]);
        assert_eq!(r.side, 0);
        let r = code_route(&plan, 1, 1, &plus(3), &mut rng).unwrap();
        assert_eq!(r.side, 1);
        let r = code_route(&CodeRoutingPlan::or(3).unwrap(), 0, 0, &plus(3), &mut rng).unwrap();
        assert_eq!((r.side, r.share_sides.clone()), (0, vec![1, 0, 0]));
    }

    /// Routed shares, once corrected, are the encoded state itself for every
    /// sampled outcome sequence.
    #[test]
    fn routing_commutes_with_decoding() {
        let plan = CodeRoutingPlan::or(3).unwrap();
        let q = DenseState::random(3, 1, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let encoded = plan.scheme.encode(&q).unwrap();
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let mut st = encoded.clone();
            for j in 0..3 {
                st = route_share(&plan.share_strategy(j).unwrap(), 1, 0, j, st, &mut rng).unwrap().0;
            }
            assert!((st.overlap(&encoded).unwrap() - 1.0).abs() < 1e-9);
        }
    }
}
