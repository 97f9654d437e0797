//! One function per subcommand, each returning a [`Report`].

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use nlqc_core::circuit::CliffordCircuit;
use nlqc_core::code_routing::{code_route, CodeRoutingPlan};
use nlqc_core::garden_hose::{
    ceil_log2, gh_complexity, gh_evaluate, gh_quantum_sweep, interaction_to_preprocessed, ControlProgram, GHStrategy,
    QuantumRun,
};
use nlqc_core::protocol::{
    bk_report, clifford_protocol, random_sweep, verify_implements, worst_branch_distance, InteractionDecomposition,
    OneRoundProtocol,
};
use nlqc_core::qudit::{gates, DenseState};
use nlqc_core::surgery::{clifford_surgery, pbt_surgery, surgery_report, z_flip_protocol, z_flip_task};
use nlqc_core::tableau::random_clifford;
use nlqc_core::teleport::{build_pgm, pbt_entanglement_fidelity, pbt_report, PBTParams, POVM_CAP};
use nlqc_core::CMat;
use nlqc_geometry::{config_grid, verify_connected_wedge, GeometryReport, ScatteringConfig};

use crate::output::{num, to_value, Report};
use crate::CliError;

const TRACE_DISTANCE: &str = "trace distance";
const EBITS: &str = "ebits";
const NATS: &str = "nats";

/// Options shared by every subcommand.
#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Seed for every random choice; a run is a function of argv and seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for exact identities.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
}

// ---------------------------------------------------------------------------
// clifford-nlqc

#[derive(Args, Clone, Debug)]
pub struct CliffordArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub n0: usize,
    #[arg(long, default_value_t = 1)]
    pub n1: usize,
    /// Random Cliffords with seeds `seed, seed+1, …`.
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    /// Clifford circuit as JSON instead of random ones.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
}

/// The Clifford protocol on one Clifford, checked on every forced outcome.
#[derive(Clone, Debug)]
pub struct CliffordCase {
    pub protocol: OneRoundProtocol,
    pub pairs: usize,
    pub n0_prime: usize,
    pub n1_prime: usize,
    pub choi_distance: f64,
    pub worst_branch_distance: f64,
    pub ebits: f64,
}

impl CliffordCase {
    pub fn run(c: &CliffordCircuit, n0: usize, n1: usize) -> Result<Self, CliError> {
        let dec = InteractionDecomposition::reduce(c.circuit(), n0, n1)?;
        let (a0, a1) = dec.interaction_qudits();
        let protocol = clifford_protocol(c, (n0, n1), Some(dec))?;
        let u = c.unitary()?;
        let acc = protocol.account()?;
        Ok(CliffordCase {
            pairs: acc.ebit_count.unwrap_or(0),
            n0_prime: a0.len(),
            n1_prime: a1.len(),
            choi_distance: verify_implements(&protocol, &u, 0.0)?.choi_distance,
            worst_branch_distance: worst_branch_distance(&protocol, &u)?,
            ebits: acc.mutual_information.ebits,
            protocol,
        })
    }

    pub fn ok(&self, tol: f64) -> bool {
        self.choi_distance < tol && self.worst_branch_distance < tol && self.pairs == self.n0_prime.min(self.n1_prime)
    }
}

pub fn clifford_nlqc(a: &CliffordArgs, common: &Common) -> Result<Report, CliError> {
    let circuits: Vec<(Value, CliffordCircuit)> = match &a.circuit {
        Some(path) => vec![(Value::Null, CliffordCircuit::from_json(&std::fs::read_to_string(path)?)?)],
        None => (0..a.count)
            .map(|k| Ok((Value::from(common.seed + k), random_clifford(a.n0 + a.n1, a.d, common.seed + k)?)))
            .collect::<Result<_, CliError>>()?,
    };
    let mut r = Report::new(
        "clifford-nlqc",
        &["seed", "d", "n0", "n1", "n0_prime", "n1_prime", "pairs", "ebits", "choi_distance", "worst_branch_distance", "pass"],
    )
    .unit("choi_distance", TRACE_DISTANCE)
    .unit("worst_branch_distance", TRACE_DISTANCE)
    .unit("ebits", EBITS)
    .unit("pairs", "maximally entangled pairs");
    for (seed, c) in circuits {
        let case = CliffordCase::run(&c, a.n0, a.n1)?;
        let ok = case.ok(common.tol);
        r.pass &= ok;
        r.row(vec![
            seed,
            c.d().into(),
            a.n0.into(),
            a.n1.into(),
            case.n0_prime.into(),
            case.n1_prime.into(),
            case.pairs.into(),
            num(case.ebits),
            num(case.choi_distance),
            num(case.worst_branch_distance),
            ok.into(),
        ]);
    }
    r.set("tol", common.tol);
    Ok(r)
}

// ---------------------------------------------------------------------------
// bk

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TwoQubit {
    Identity,
    Cnot,
    Swap,
}

impl TwoQubit {
    pub fn matrix(self) -> CMat {
        match self {
            TwoQubit::Identity => CMat::identity(4, 4),
            TwoQubit::Cnot => gates::cnot(2),
            TwoQubit::Swap => gates::swap(2),
        }
    }

    fn name(self) -> &'static str {
        match self {
            TwoQubit::Identity => "identity",
            TwoQubit::Cnot => "cnot",
            TwoQubit::Swap => "swap",
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct BkArgs {
    /// Two-qubit unitary on A₀A₁ (one qubit each side).
    #[arg(long, value_enum, default_value = "cnot")]
    pub unitary: TwoQubit,
    /// Port counts N.
    #[arg(long, value_delimiter = ',', default_value = "2,8")]
    pub ports: Vec<usize>,
}

pub fn bk(a: &BkArgs, common: &Common) -> Result<Report, CliError> {
    let u = a.unitary.matrix();
    let mut r = Report::new(
        "bk",
        &["unitary", "n_ports", "pairs", "choi_distance", "pbt_bound", "quoted_bound", "method", "within_bound"],
    )
    .unit("choi_distance", TRACE_DISTANCE)
    .unit("pbt_bound", TRACE_DISTANCE)
    .unit("quoted_bound", TRACE_DISTANCE)
    .unit("pairs", "maximally entangled pairs");
    for &n in &a.ports {
        let b = bk_report(&u, 2, (1, 1), n)?;
        let ok = b.choi_distance <= b.pbt_bound + common.tol;
        r.pass &= ok;
        r.row(vec![
            a.unitary.name().into(),
            n.into(),
            b.pairs.into(),
            num(b.choi_distance),
            num(b.pbt_bound),
            num(b.quoted_bound),
            b.method.into(),
            ok.into(),
        ]);
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// pbt

#[derive(Args, Clone, Debug)]
pub struct PbtArgs {
    /// Dimension of the teleported system.
    #[arg(long = "d-a", default_value_t = 2)]
    pub d_a: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
    pub ports: Vec<usize>,
}

pub fn pbt(a: &PbtArgs, common: &Common) -> Result<Report, CliError> {
    let mut r = Report::new(
        "pbt",
        &[
            "d_a",
            "n_ports",
            "choi_fidelity",
            "choi_trace_distance",
            "bound",
            "completeness_error",
            "min_povm_eigenvalue",
            "method",
            "pass",
        ],
    )
    .unit("choi_trace_distance", TRACE_DISTANCE)
    .unit("bound", TRACE_DISTANCE)
    .unit("choi_fidelity", "entanglement fidelity");
    let mut last: Option<(usize, f64)> = None;
    let mut increasing = true;
    for &n in &a.ports {
        let params = PBTParams::new(a.d_a, n)?;
        let rep = pbt_report(params)?;
        let (compl, min_eig) = if params.povm_dim() <= POVM_CAP {
            let pgm = build_pgm(params)?;
            (num(pgm.completeness_error()), num(pgm.min_eigenvalue()))
        } else {
            (Value::Null, Value::Null)
        };
        let mut ok = rep.choi_trace_distance <= rep.bound + common.tol;
        ok &= compl.as_f64().map_or(true, |e| e <= common.tol);
        ok &= min_eig.as_f64().map_or(true, |e| e >= -common.tol);
        if let Some((m, f)) = last {
            if m < n {
                increasing &= rep.choi_fidelity > f;
            }
        }
        last = Some((n, rep.choi_fidelity));
        r.pass &= ok;
        r.row(vec![
            a.d_a.into(),
            n.into(),
            num(rep.choi_fidelity),
            num(rep.choi_trace_distance),
            num(rep.bound),
            compl,
            min_eig,
            rep.method.into(),
            ok.into(),
        ]);
    }
    r.pass &= increasing;
    r.set("fidelity_increasing", increasing);
    Ok(r)
}

// ---------------------------------------------------------------------------
// gh

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoolFn {
    And,
    Or,
}

impl BoolFn {
    pub fn eval(self, x: u64, y: u64) -> usize {
        match self {
            BoolFn::And => (x & y & 1) as usize,
            BoolFn::Or => ((x | y) & 1) as usize,
        }
    }

    pub fn strategy(self) -> GHStrategy {
        match self {
            BoolFn::And => GHStrategy::and(),
            BoolFn::Or => GHStrategy::or(),
        }
    }

    pub fn plan(self, d: usize) -> Result<CodeRoutingPlan, CliError> {
        Ok(match self {
            BoolFn::And => CodeRoutingPlan::and(d)?,
            BoolFn::Or => CodeRoutingPlan::or(d)?,
        })
    }

    fn name(self) -> &'static str {
        match self {
            BoolFn::And => "and",
            BoolFn::Or => "or",
        }
    }
}

#[derive(Args, Clone, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["strategy", "file"]))]
pub struct GhArgs {
    /// Preset strategy.
    #[arg(long, value_enum)]
    pub strategy: Option<BoolFn>,
    /// Strategy JSON (`E`, `nx`, `ny`, `left`, `right`).
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Every input pair.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long)]
    pub x: Option<u64>,
    #[arg(long)]
    pub y: Option<u64>,
    /// Qudit dimension for the quantum execution.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Skip the quantum execution.
    #[arg(long)]
    pub classical: bool,
}

/// `|⟨q| C |ψ⟩|²` for the run's terminal state after its Pauli correction.
pub fn corrected_fidelity(run: &QuantumRun, q: &DenseState) -> f64 {
    let v = run.routing.correction.dense() * run.state.column();
    (q.column().adjoint() * v)[(0, 0)].norm_sqr()
}

/// Combinatorial routing, its location-register transform and every forced
/// quantum outcome for one input.
#[derive(Clone, Debug)]
pub struct GhRow {
    pub side: usize,
    pub terminal: String,
    pub path: String,
    pub path_ok: bool,
    pub preprocessed_side: usize,
    pub quantum: Option<(usize, bool, f64)>,
}

pub fn gh_row(
    s: &GHStrategy,
    t: &ControlProgram,
    x: u64,
    y: u64,
    q: Option<&DenseState>,
) -> Result<GhRow, CliError> {
    let comb = gh_evaluate(s, x, y)?;
    let quantum = match q {
        None => None,
        Some(q) => {
            let runs = gh_quantum_sweep(s, x, y, q)?;
            let agree = runs.iter().all(|r| r.routing.terminal == comb.terminal && r.routing.path == comb.path);
            let worst = runs.iter().map(|r| corrected_fidelity(r, q)).fold(f64::INFINITY, f64::min);
            Some((runs.len(), agree, worst))
        }
    };
    Ok(GhRow {
        side: comb.side,
        terminal: comb.terminal.to_string(),
        path: comb.path.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("-"),
        path_ok: comb.path.len() <= 2 * s.pipes() + 1,
        preprocessed_side: t.run(x, y)?,
        quantum,
    })
}

pub fn gh(a: &GhArgs, common: &Common) -> Result<Report, CliError> {
    let s = match (&a.strategy, &a.file) {
        (Some(f), _) => f.strategy(),
        (None, Some(p)) => GHStrategy::from_json(&std::fs::read_to_string(p)?)?,
        (None, None) => return Err(CliError::Usage("--strategy or --file is required".into())),
    };
    let (nx, ny) = s.input_bits();
    let inputs: Vec<(u64, u64)> = if a.exhaustive {
        (0..1u64 << nx).flat_map(|x| (0..1u64 << ny).map(move |y| (x, y))).collect()
    } else {
        match (a.x, a.y) {
            (Some(x), Some(y)) => vec![(x, y)],
            _ => return Err(CliError::Usage("give --x and --y, or --exhaustive".into())),
        }
    };
    let program = ControlProgram::from_strategy(&s);
    let t = interaction_to_preprocessed(&program, s.pipes())?;
    let q = if a.classical {
        None
    } else {
        Some(DenseState::random(a.d, 1, &mut ChaCha8Rng::seed_from_u64(common.seed))?)
    };
    let mut r = Report::new(
        "gh",
        &["x", "y", "side", "terminal", "path", "preprocessed_side", "quantum_runs", "quantum_agrees", "min_corrected_fidelity", "pass"],
    )
    .unit("min_corrected_fidelity", "state fidelity");
    for (x, y) in inputs {
        let g = gh_row(&s, &t, x, y, q.as_ref())?;
        let mut ok = g.path_ok && g.preprocessed_side == g.side;
        let (runs, agree, fid) = match g.quantum {
            Some((n, agree, f)) => {
                ok &= agree && f >= 1.0 - common.tol;
                (n.into(), agree.into(), num(f))
            }
            None => (Value::Null, Value::Null, Value::Null),
        };
        r.pass &= ok;
        r.row(vec![
            x.into(),
            y.into(),
            g.side.into(),
            g.terminal.into(),
            g.path.into(),
            g.preprocessed_side.into(),
            runs,
            agree,
            fid,
            ok.into(),
        ]);
    }
    let reg = t.register.expect("transform adds a register").bits();
    let bound = ceil_log2(s.pipes() + 2) + 2;
    r.pass &= reg <= bound;
    r.set("complexity", gh_complexity(&s));
    r.set("register_bits", reg);
    r.set("register_bound", bound);
    Ok(r.unit("register_bits", "bits").unit("register_bound", "bits"))
}

// ---------------------------------------------------------------------------
// code-route

#[derive(Args, Clone, Debug)]
pub struct CodeRouteArgs {
    /// Routing function.
    #[arg(long = "f", value_enum)]
    pub f: BoolFn,
    /// Prime share dimension.
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long)]
    pub x: Option<u64>,
    #[arg(long)]
    pub y: Option<u64>,
}

pub fn code_route_cmd(a: &CodeRouteArgs, common: &Common) -> Result<Report, CliError> {
    let plan = a.f.plan(a.d)?;
    let inputs: Vec<(u64, u64)> = match (a.x, a.y) {
        (Some(x), Some(y)) => vec![(x, y)],
        (None, None) => vec![(0, 0), (0, 1), (1, 0), (1, 1)],
        _ => return Err(CliError::Usage("give both --x and --y, or neither".into())),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let q = DenseState::random(a.d, 1, &mut rng)?;
    let mut r = Report::new(
        "code-route",
        &["x", "y", "expected_side", "side", "share_sides", "fidelity", "hiding_distance", "pipes", "pass"],
    )
    .unit("fidelity", "state fidelity")
    .unit("hiding_distance", TRACE_DISTANCE);
    for (x, y) in inputs {
        let res = code_route(&plan, x, y, &q, &mut rng)?;
        let want = a.f.eval(x, y);
        let ok = res.side == want && res.fidelity >= 1.0 - common.tol && res.hiding_distance <= common.tol;
        r.pass &= ok;
        r.row(vec![
            x.into(),
            y.into(),
            want.into(),
            res.side.into(),
            to_value(&res.share_sides),
            num(res.fidelity),
            num(res.hiding_distance),
            res.pipes.into(),
            ok.into(),
        ]);
    }
    r.set("f", a.f.name());
    r.set("d", a.d);
    Ok(r)
}

// ---------------------------------------------------------------------------
// surgery

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SurgeryProtocol {
    /// SWAP by teleportation both ways.
    Swap,
    /// The Clifford protocol for a seeded random Clifford.
    Random,
    /// Teleport to the right, apply `Zˣ`, return.
    ZFlip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SurgeryMode {
    Clifford,
    Pbt,
}

#[derive(Args, Clone, Debug)]
pub struct SurgeryArgs {
    #[arg(long, value_enum, default_value = "random")]
    pub protocol: SurgeryProtocol,
    #[arg(long, value_enum, default_value = "clifford")]
    pub mode: SurgeryMode,
    /// Ports per cut pair in PBT mode.
    #[arg(long = "N", default_value_t = 4)]
    pub n_ports: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub n0: usize,
    #[arg(long, default_value_t = 1)]
    pub n1: usize,
    /// The right party's classical input for `z-flip`.
    #[arg(long, default_value_t = 1)]
    pub x: usize,
}

pub fn surgery(a: &SurgeryArgs, common: &Common) -> Result<Report, CliError> {
    let p = match a.protocol {
        SurgeryProtocol::Swap => clifford_protocol(&CliffordCircuit::swap(a.d)?, (1, 1), None)?,
        SurgeryProtocol::Random => clifford_protocol(&random_clifford(a.n0 + a.n1, a.d, common.seed)?, (a.n0, a.n1), None)?,
        SurgeryProtocol::ZFlip => z_flip_protocol(a.x)?,
    };
    let lp = match a.mode {
        SurgeryMode::Clifford => clifford_surgery(&p)?,
        SurgeryMode::Pbt => {
            if a.protocol != SurgeryProtocol::ZFlip {
                return Err(CliError::Usage("PBT surgery needs a one-sided protocol (--protocol z-flip)".into()));
            }
            pbt_surgery(&z_flip_task(), a.x, &p, a.n_ports)?
        }
    };
    let rep = surgery_report(&p, &lp)?;
    let c = &rep.complexity;
    let mut r = Report::new(
        "surgery",
        &[
            "mode",
            "resource_pairs",
            "n_prime",
            "interaction_gate_count",
            "choi_distance",
            "worst_broadcast_distance",
            "reference_distance",
            "pass",
        ],
    )
    .unit("choi_distance", TRACE_DISTANCE)
    .unit("worst_broadcast_distance", TRACE_DISTANCE)
    .unit("reference_distance", TRACE_DISTANCE)
    .unit("n_prime", "qudits");
    let (reference, ok) = match a.mode {
        SurgeryMode::Clifford => (Value::Null, rep.exact && c.clifford_relations == Some(true)),
        SurgeryMode::Pbt => {
            // The cut pair turns into a port-teleportation channel on one qubit.
            let expect = 1.0 - pbt_entanglement_fidelity(PBTParams::new(2, a.n_ports)?)?;
            (num(expect), (rep.choi_distance - expect).abs() <= common.tol)
        }
    };
    r.pass = ok;
    r.row(vec![
        (if a.mode == SurgeryMode::Clifford { "clifford" } else { "pbt" }).into(),
        c.resource_pairs.into(),
        c.n_prime.into(),
        to_value(c.interaction_gate_count),
        num(rep.choi_distance),
        rep.worst_broadcast_distance.map_or(Value::Null, num),
        reference,
        ok.into(),
    ]);
    r.set("complexity", c);
    Ok(r)
}

// ---------------------------------------------------------------------------
// geometry

#[derive(Args, Clone, Debug)]
pub struct GeometryArgs {
    /// `marginal` or `delay-<δ>`, e.g. `delay-0.2`.
    #[arg(long)]
    pub preset: Option<String>,
    /// Input point `t,theta`.
    #[arg(long, allow_hyphen_values = true)]
    pub c0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c1: Option<String>,
    /// Output point `t,theta`.
    #[arg(long, allow_hyphen_values = true)]
    pub r0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub r1: Option<String>,
    /// The twenty-configuration grid.
    #[arg(long)]
    pub grid: bool,
    /// Ridge sampling resolution.
    #[arg(long, default_value_t = 4096)]
    pub resolution: usize,
    /// UV cutoff for geodesic lengths.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
}

fn point(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("point '{s}' is not t,theta"));
    let (t, th) = s.split_once(',').ok_or_else(bad)?;
    Ok((t.trim().parse().map_err(|_| bad())?, th.trim().parse().map_err(|_| bad())?))
}

pub fn geometry(a: &GeometryArgs) -> Result<Report, CliError> {
    let pts = [&a.c0, &a.c1, &a.r0, &a.r1];
    let given = pts.iter().filter(|p| p.is_some()).count();
    let configs: Vec<(String, ScatteringConfig)> = match (&a.preset, a.grid, given) {
        (Some(name), false, 0) => {
            let cfg = ScatteringConfig::preset(name).ok_or_else(|| CliError::Usage(format!("unknown preset '{name}'")))?;
            vec![(name.clone(), cfg)]
        }
        (None, true, 0) => config_grid().into_iter().enumerate().map(|(i, c)| (format!("grid-{i:02}"), c)).collect(),
        (None, false, 4) => {
            let p: Vec<(f64, f64)> = pts.iter().map(|s| point(s.as_deref().unwrap())).collect::<Result<_, _>>()?;
            vec![("custom".into(), ScatteringConfig::new(p[0], p[1], p[2], p[3]))]
        }
        _ => return Err(CliError::Usage("give one of --preset, --grid, or all of --c0 --c1 --r0 --r1".into())),
    };
    if a.resolution < 2 || a.eps <= 0.0 {
        return Err(CliError::Usage("--resolution must be at least 2 and --eps positive".into()));
    }
    let mut r = Report::new(
        "geometry",
        &[
            "config",
            "region_nonempty",
            "region_margin",
            "ridge_length",
            "mutual_information",
            "saturation_residual",
            "wedge_margin",
            "v0_width",
            "v1_width",
            "wedge_holds",
        ],
    )
    .unit("region_margin", "AdS time")
    .unit("ridge_length", "AdS radius")
    .unit("mutual_information", "nats at 4G_N = 1")
    .unit("saturation_residual", "nats at 4G_N = 1")
    .unit("wedge_margin", "nats at 4G_N = 1")
    .unit("v0_width", "rad")
    .unit("v1_width", "rad");
    for (name, cfg) in configs {
        let g: GeometryReport = verify_connected_wedge(&cfg, a.resolution, a.eps)?;
        r.pass &= g.wedge_holds;
        r.row(vec![
            name.into(),
            g.region_nonempty.into(),
            num(g.region_margin),
            num(g.ridge_length),
            num(g.mutual_information),
            num(g.saturation_residual),
            num(g.wedge_margin),
            num(g.decision_intervals[0].width()),
            num(g.decision_intervals[1].width()),
            g.wedge_holds.into(),
        ]);
    }
    r.set("resolution", a.resolution);
    r.set("eps", a.eps);
    Ok(r)
}

// ---------------------------------------------------------------------------
// bound-check

#[derive(Args, Clone, Debug)]
pub struct BoundArgs {
    /// Protocol/task pairs with seeds `seed, seed+1, …`.
    #[arg(long, default_value_t = 100)]
    pub count: u64,
}

pub fn bound_check(a: &BoundArgs, common: &Common) -> Result<Report, CliError> {
    let (reports, summary) = random_sweep(common.seed..common.seed + a.count)?;
    let mut r = Report::new(
        "bound-check",
        &["seed", "i_nats", "p_suc_entangled", "p_suc_product", "half_i", "neg_ln_p_product", "pass", "kl_pass", "dmax_pass"],
    )
    .unit("i_nats", NATS)
    .unit("half_i", NATS)
    .unit("neg_ln_p_product", NATS)
    .unit("p_suc_entangled", "probability")
    .unit("p_suc_product", "probability");
    for (k, b) in reports.iter().enumerate() {
        r.row(vec![
            (common.seed + k as u64).into(),
            num(b.i_nats),
            num(b.p_suc_entangled),
            num(b.p_suc_product),
            num(b.lhs),
            num(b.rhs),
            b.pass.into(),
            b.kl_pass.into(),
            b.dmax_pass.into(),
        ]);
    }
    r.pass = summary.pass == summary.cases;
    r.set("summary", &summary);
    Ok(r)
}
