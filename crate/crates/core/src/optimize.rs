//! Loss evaluation, parameter-shift gradients, normalized gradient descent,
//! and the solve loops for the unary-qubit model and the QAOA baseline.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{ansatz_arity, build_qaoa_with_diagonal, build_workflow};
use crate::error::{Error, Result};
use crate::nelder_mead::{self, NelderMeadConfig};
use crate::problem::{
    brute_force, cut_cost, hamiltonian_diagonal, rescale_k, CutAssignment, IsingInstance,
    ScaledInstance, DEFAULT_LAMBDA,
};
use crate::seeds::{derive, role};
use crate::statevec::{Circuit, Gate, StateVector};

/// Gradient norms at or below this skip the update.
pub const ZERO_GRADIENT_TOL: f64 = 1e-12;

/// Probabilities closer than this count as tied at readout.
const READOUT_TIE_TOL: f64 = 1e-12;

/// How expectations are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    /// Exact marginal probabilities from the amplitudes.
    Exact,
    /// Empirical estimate from this many seeded shots per evaluation.
    Shots(u64),
}

/// Starting angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitAngles {
    /// Zeros for MaxCut instances, `π/2` otherwise.
    Auto,
    Zeros,
    HalfPi,
    Explicit(Vec<f64>),
}

/// What the `n` in the step-size prefactor `sqrt(π n / 2)` counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepDim {
    /// Number of optimized angles.
    Angles,
    /// Number of graph nodes, even when one angle is held fixed.
    Nodes,
}

/// Solver settings shared by both methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub k_max: usize,
    pub mode: EvalMode,
    pub init: InitAngles,
    pub entangle: bool,
    pub readout_shots: u64,
    /// Base seed for shots, readout and jitter.
    pub seed: u64,
    /// Half-width of the uniform perturbation added to the starting angles.
    /// Zeros and `π/2` are exact stationary points of MaxCut losses, so
    /// without it exact-mode descent cannot leave them.
    pub init_jitter: f64,
    pub step_dim: StepDim,
    pub lambda: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            k_max: 100,
            mode: EvalMode::Exact,
            init: InitAngles::Auto,
            entangle: false,
            readout_shots: 1024,
            seed: 0,
            init_jitter: 0.05,
            step_dim: StepDim::Angles,
            lambda: DEFAULT_LAMBDA,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(Error::invalid("k_max must be at least 1"));
        }
        if self.mode == EvalMode::Shots(0) {
            return Err(Error::invalid("shot count must be at least 1"));
        }
        if self.readout_shots == 0 {
            return Err(Error::invalid("readout shots must be at least 1"));
        }
        if !(self.init_jitter >= 0.0 && self.init_jitter.is_finite()) {
            return Err(Error::invalid("init jitter must be a non-negative number"));
        }
        Ok(())
    }
}

/// One optimizer iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    pub loss: f64,
    /// Gradient norm that produced this iterate; empty for record 0 and for
    /// derivative-free methods.
    pub grad_norm: Option<f64>,
    /// Step length applied; 0 when the gradient vanished.
    pub step_size: Option<f64>,
}

/// Optimization history.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace {
    pub records: Vec<TraceRecord>,
    /// Iterations whose update was skipped for a vanishing gradient.
    pub zero_gradient_iterations: Vec<usize>,
    /// Total objective evaluations, including gradient shifts.
    pub evaluations: usize,
}

impl TrainTrace {
    /// Iteration with the lowest recorded loss (earliest on ties).
    pub fn best_iteration(&self) -> usize {
        self.records
            .iter()
            .min_by(|a, b| a.loss.total_cmp(&b.loss).then(a.k.cmp(&b.k)))
            .map_or(0, |r| r.k)
    }

    /// Writes the trace as CSV with columns `k, loss, grad_norm, step_size`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Result of a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub method: String,
    /// Final parameters: node angles, or `γ_1..γ_p, β_1..β_p` for QAOA.
    pub thetas: Vec<f64>,
    pub bits: CutAssignment,
    pub energy: f64,
    pub counts: BTreeMap<String, u64>,
    /// Exact readout distribution, present in exact mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<BTreeMap<String, f64>>,
    pub mode: EvalMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_clamped: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<u8>,
    pub trace: TrainTrace,
}

impl Solution {
    /// Attaches the approximation ratio and index from a brute-force oracle.
    pub fn attach_metrics(&mut self, inst: &IsingInstance) -> Result<()> {
        let report = brute_force(inst)?;
        let r = report.approximation_ratio(self.energy)?;
        self.ratio = Some(r.value);
        self.ratio_clamped = Some(r.clamped);
        self.index = Some(report.approximation_index(inst, &self.bits, inst.is_maxcut())?);
        Ok(())
    }
}

/// Something the optimizers can minimize.
trait Objective: Sync {
    fn dim(&self) -> usize;
    /// Evaluates at `params`; `seed` drives sampling in shot mode.
    fn value(&self, params: &[f64], seed: u64) -> Result<f64>;
    /// Parameter-shift gradient at `params`, evaluations seeded from `seed`.
    fn gradient(&self, params: &[f64], seed: u64) -> Result<Vec<f64>>;
}

fn shot_seed(base: u64, component: usize, sign: u64) -> u64 {
    derive(&[base, component as u64, sign])
}

/// Ancilla expectation of the Hadamard-test circuit.
struct UqObjective<'a> {
    scaled: &'a ScaledInstance,
    entangle: bool,
    mode: EvalMode,
    evals: AtomicUsize,
}

impl Objective for UqObjective<'_> {
    fn dim(&self) -> usize {
        ansatz_arity(self.scaled.n(), self.entangle)
    }

    fn value(&self, params: &[f64], seed: u64) -> Result<f64> {
        self.evals.fetch_add(1, Ordering::Relaxed);
        let c = build_workflow(self.scaled, params, self.entangle)?;
        let mut s = StateVector::zero(c.n_qubits())?;
        s.apply_circuit(&c)?;
        match self.mode {
            EvalMode::Exact => s.ancilla_expectation(0),
            EvalMode::Shots(shots) => {
                let counts = s.sample(&[0], shots, seed)?;
                let zeros = counts.get("0").copied().unwrap_or(0) as f64;
                Ok((2.0 * zeros - shots as f64) / shots as f64)
            }
        }
    }

    fn gradient(&self, params: &[f64], seed: u64) -> Result<Vec<f64>> {
        (0..params.len())
            .into_par_iter()
            .map(|i| {
                let shifted = |sign: f64, tag: u64| {
                    let mut p = params.to_vec();
                    p[i] += sign * FRAC_PI_2;
                    self.value(&p, shot_seed(seed, i, tag))
                };
                Ok(0.5 * (shifted(1.0, 0)? - shifted(-1.0, 1)?))
            })
            .collect()
    }
}

fn check_instance_mode(scaled: &ScaledInstance, thetas: &[f64], entangle: bool) -> Result<()> {
    let arity = ansatz_arity(scaled.n(), entangle);
    if thetas.len() != arity {
        return Err(Error::invalid(format!(
            "expected {arity} angles, got {}",
            thetas.len()
        )));
    }
    Ok(())
}

/// `L(Θ) = p(0) − p(1)` on the ancilla. In shot mode the estimate uses
/// `cfg.seed` directly.
pub fn loss(s: &ScaledInstance, thetas: &[f64], cfg: &OptimizerConfig) -> Result<f64> {
    cfg.validate()?;
    check_instance_mode(s, thetas, cfg.entangle)?;
    uq_objective(s, cfg).value(thetas, cfg.seed)
}

fn uq_objective<'a>(s: &'a ScaledInstance, cfg: &OptimizerConfig) -> UqObjective<'a> {
    UqObjective {
        scaled: s,
        entangle: cfg.entangle,
        mode: cfg.mode,
        evals: AtomicUsize::new(0),
    }
}

/// Gradient plus the number of circuit executions it took.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientEval {
    pub grad: Vec<f64>,
    pub evaluations: usize,
}

/// `½[L(Θ + π/2 e_i) − L(Θ − π/2 e_i)]` for every component, using exactly
/// `2·dim` circuit executions.
pub fn parameter_shift_grad(
    s: &ScaledInstance,
    thetas: &[f64],
    cfg: &OptimizerConfig,
) -> Result<GradientEval> {
    cfg.validate()?;
    check_instance_mode(s, thetas, cfg.entangle)?;
    let obj = uq_objective(s, cfg);
    let grad = obj.gradient(thetas, derive(&[cfg.seed, 0, role::GRADIENT]))?;
    Ok(GradientEval {
        grad,
        evaluations: obj.evals.load(Ordering::Relaxed),
    })
}

/// Step length `sqrt(π·dim/2) · exp(−4k²/k_max²)`.
pub fn ngd_scale(k: usize, k_max: usize, dim: usize) -> f64 {
    let ratio = k as f64 / k_max as f64;
    (PI * dim as f64 / 2.0).sqrt() * (-4.0 * ratio * ratio).exp()
}

/// One normalized descent step. Fails with [`Error::ZeroGradient`] when
/// `‖grad‖ ≤ 1e-12`; callers then keep `Θ` unchanged.
pub fn ngd_step(thetas: &[f64], grad: &[f64], k: usize, k_max: usize, dim: usize) -> Result<Vec<f64>> {
    if thetas.len() != grad.len() {
        return Err(Error::invalid("gradient length differs from parameter length"));
    }
    if k_max == 0 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if norm.is_nan() || norm <= ZERO_GRADIENT_TOL {
        return Err(Error::ZeroGradient(norm));
    }
    let scale = ngd_scale(k, k_max, dim) / norm;
    Ok(thetas.iter().zip(grad).map(|(t, g)| t - scale * g).collect())
}

/// Runs `k_max` descent iterations (`k = 1..=k_max`) with no early stop.
fn run_ngd(
    obj: &dyn Objective,
    start: Vec<f64>,
    k_max: usize,
    step_dim: usize,
    seed: u64,
) -> Result<(Vec<f64>, TrainTrace)> {
    let mut trace = TrainTrace::default();
    let mut params = start;
    trace.records.push(TraceRecord {
        k: 0,
        loss: obj.value(&params, derive(&[seed, 0, role::TRACE]))?,
        grad_norm: None,
        step_size: None,
    });
    for k in 1..=k_max {
        let grad = obj.gradient(&params, derive(&[seed, k as u64, role::GRADIENT]))?;
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        let step = match ngd_step(&params, &grad, k, k_max, step_dim) {
            Ok(next) => {
                params = next;
                ngd_scale(k, k_max, step_dim)
            }
            Err(Error::ZeroGradient(_)) => {
                trace.zero_gradient_iterations.push(k);
                0.0
            }
            Err(e) => return Err(e),
        };
        trace.records.push(TraceRecord {
            k,
            loss: obj.value(&params, derive(&[seed, k as u64, role::TRACE]))?,
            grad_norm: Some(norm),
            step_size: Some(step),
        });
    }
    Ok((params, trace))
}

fn jittered(mut angles: Vec<f64>, jitter: f64, seed: u64) -> Vec<f64> {
    if jitter > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive(&[seed, role::JITTER]));
        for a in &mut angles {
            *a += rng.random_range(-jitter..=jitter);
        }
    }
    angles
}

fn bit_string(index: usize, width: usize) -> String {
    format!("{index:0width$b}")
}

/// Readout of an `n`-qubit register in the computational basis.
struct Readout {
    bits: CutAssignment,
    counts: BTreeMap<String, u64>,
    probabilities: Option<BTreeMap<String, f64>>,
}

fn read_out(state: &StateVector, cfg: &OptimizerConfig) -> Result<Readout> {
    let n = state.n_qubits();
    let qubits: Vec<usize> = (0..n).collect();
    let counts = state.sample(&qubits, cfg.readout_shots, derive(&[cfg.seed, role::READOUT]))?;
    match cfg.mode {
        EvalMode::Exact => {
            let probs = state.probabilities();
            let mut best = 0;
            for (i, &p) in probs.iter().enumerate() {
                if p > probs[best] + READOUT_TIE_TOL {
                    best = i;
                }
            }
            let map = probs
                .iter()
                .enumerate()
                .map(|(i, &p)| (bit_string(i, n), p))
                .collect();
            Ok(Readout {
                bits: CutAssignment::from_index(best, n),
                counts,
                probabilities: Some(map),
            })
        }
        EvalMode::Shots(_) => {
            let mut best: Option<(&String, u64)> = None;
            for (k, &c) in &counts {
                if best.is_none_or(|(_, b)| c > b) {
                    best = Some((k, c));
                }
            }
            let (key, _) = best.expect("at least one shot");
            Ok(Readout {
                bits: key.parse()?,
                counts,
                probabilities: None,
            })
        }
    }
}

/// Ansatz (plus entanglement) on the bare working register. The controlled
/// block encoding only reads the working qubits as controls, so this equals
/// the working-register marginal of the full workflow circuit.
fn prepared_state(s: &ScaledInstance, thetas: &[f64], entangle: bool) -> Result<StateVector> {
    let full = build_workflow(s, thetas, entangle)?;
    let working = &full.roles().working;
    let n = working.len();
    let mut prep = Circuit::new(n);
    for g in full.ops() {
        if matches!(g, Gate::H(0)) {
            break;
        }
        let remap = |q: usize| q - working[0];
        let g = match *g {
            Gate::Ry { target, theta } => Gate::Ry { target: remap(target), theta },
            Gate::Cnot { control, target } => Gate::Cnot {
                control: remap(control),
                target: remap(target),
            },
            Gate::H(q) => Gate::H(remap(q)),
            ref other => unreachable!("unexpected gate {other:?} before the Hadamard test"),
        };
        prep.push(g)?;
    }
    let mut state = StateVector::zero(n)?;
    state.apply_circuit(&prep)?;
    Ok(state)
}

fn initial_angles(inst: &IsingInstance, cfg: &OptimizerConfig, arity: usize) -> Result<Vec<f64>> {
    let base = match &cfg.init {
        InitAngles::Auto if inst.is_maxcut() => vec![0.0; arity],
        InitAngles::Auto | InitAngles::HalfPi => vec![FRAC_PI_2; arity],
        InitAngles::Zeros => vec![0.0; arity],
        InitAngles::Explicit(v) => {
            if v.len() != arity {
                return Err(Error::invalid(format!(
                    "expected {arity} initial angles, got {}",
                    v.len()
                )));
            }
            v.clone()
        }
    };
    Ok(jittered(base, cfg.init_jitter, cfg.seed))
}

/// Trains the unary-qubit model for exactly `k_max` iterations and reads out
/// the most likely assignment.
pub fn solve_uq(inst: &IsingInstance, cfg: &OptimizerConfig) -> Result<Solution> {
    cfg.validate()?;
    let s = rescale_k(inst, cfg.lambda)?;
    if cfg.entangle && inst.n() < 2 {
        return Err(Error::invalid("entangled mode needs at least 2 nodes"));
    }
    let arity = ansatz_arity(inst.n(), cfg.entangle);
    let start = initial_angles(inst, cfg, arity)?;
    let obj = uq_objective(&s, cfg);
    let step_dim = match cfg.step_dim {
        StepDim::Angles => arity,
        StepDim::Nodes => inst.n(),
    };
    let (thetas, mut trace) = run_ngd(&obj, start, cfg.k_max, step_dim, cfg.seed)?;
    trace.evaluations = obj.evals.load(Ordering::Relaxed);

    let readout = read_out(&prepared_state(&s, &thetas, cfg.entangle)?, cfg)?;
    let method = if inst.is_maxcut() { "uqmaxcut" } else { "uqising" };
    Ok(Solution {
        method: method.into(),
        energy: cut_cost(inst, &readout.bits)?,
        thetas,
        bits: readout.bits,
        counts: readout.counts,
        probabilities: readout.probabilities,
        mode: cfg.mode,
        ratio: None,
        ratio_clamped: None,
        index: None,
        trace,
    })
}

/// QAOA classical optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QaoaMethod {
    /// Normalized gradient descent on parameter-shift gradients.
    NgdShift,
    /// Nelder–Mead simplex.
    Simplex,
}

/// Default QAOA depth `⌈n/2⌉`.
pub fn default_depth(n: usize) -> usize {
    n.div_ceil(2).max(1)
}

/// `⟨γ,β|C|γ,β⟩`. Parameters are `γ_1..γ_p` followed by `β_1..β_p`.
struct QaoaObjective {
    n: usize,
    p: usize,
    diag: Vec<f64>,
    /// Pauli-Z terms of the cost: weight and the qubits it acts on.
    terms: Vec<(f64, Vec<usize>)>,
    mode: EvalMode,
    evals: AtomicUsize,
}

/// Extra gate inserted after a layer to shift one constituent rotation.
enum Insert {
    /// `exp(−iφ·P)` for a Z-string `P` on these qubits.
    ZPhase(Vec<usize>, f64),
    /// `RX(θ)` on one qubit.
    Rx(usize, f64),
}

impl QaoaObjective {
    fn new(inst: &IsingInstance, p: usize, mode: EvalMode) -> Result<Self> {
        let terms = inst
            .pairwise_terms()
            .map(|(i, j, w)| (w, vec![i - 1, j - 1]))
            .chain(inst.unary_terms().map(|(i, w)| (w, vec![i - 1])))
            .collect();
        Ok(Self {
            n: inst.n(),
            p,
            diag: hamiltonian_diagonal(inst)?,
            terms,
            mode,
            evals: AtomicUsize::new(0),
        })
    }

    fn circuit(&self, params: &[f64], insert: Option<(usize, &Insert)>) -> Result<Circuit> {
        let (gammas, betas) = params.split_at(self.p);
        let base = build_qaoa_with_diagonal(self.n, &self.diag, gammas, betas)?;
        let Some((layer, extra)) = insert else {
            return Ok(base);
        };
        // Layer k occupies one DIAG_PHASE plus n RX gates after the n
        // initial Hadamards.
        let at_phase = self.n + layer * (self.n + 1) + 1;
        let at_mixer = self.n + (layer + 1) * (self.n + 1);
        let mut ops = base.ops().to_vec();
        match extra {
            Insert::ZPhase(qubits, phi) => {
                let phases = (0..1usize << qubits.len())
                    .map(|k| if k.count_ones() % 2 == 0 { 1.0 } else { -1.0 })
                    .collect();
                ops.insert(
                    at_phase,
                    Gate::DiagPhase { targets: qubits.clone(), gamma: *phi, phases },
                );
            }
            Insert::Rx(q, theta) => {
                ops.insert(at_mixer, Gate::Rx { target: *q, theta: *theta });
            }
        }
        base.with_ops(ops)
    }

    fn energy_of(&self, c: &Circuit, seed: u64) -> Result<f64> {
        self.evals.fetch_add(1, Ordering::Relaxed);
        let mut s = StateVector::zero(self.n)?;
        s.apply_circuit(c)?;
        match self.mode {
            EvalMode::Exact => s.expectation_diagonal(&self.diag),
            EvalMode::Shots(shots) => {
                let qubits: Vec<usize> = (0..self.n).collect();
                let counts = s.sample(&qubits, shots, seed)?;
                let total: f64 = counts
                    .iter()
                    .map(|(k, &c)| {
                        let idx = usize::from_str_radix(k, 2).expect("sampler emits bit-strings");
                        self.diag[idx] * c as f64
                    })
                    .sum();
                Ok(total / shots as f64)
            }
        }
    }
}

impl Objective for QaoaObjective {
    fn dim(&self) -> usize {
        2 * self.p
    }

    fn value(&self, params: &[f64], seed: u64) -> Result<f64> {
        self.energy_of(&self.circuit(params, None)?, seed)
    }

    /// Gate-level parameter shift: each constituent rotation of a layer is
    /// shifted by `±π/2` in its own angle and the chain rule sums the parts.
    /// A cost term `exp(−iγ w P)` is the rotation `exp(−iφP)` at `φ = γw`,
    /// whose shift rule reads `f(φ+π/4) − f(φ−π/4)`; each mixer `RX(2β)`
    /// contributes `f(2β+π/2) − f(2β−π/2)`. The result is exact.
    fn gradient(&self, params: &[f64], seed: u64) -> Result<Vec<f64>> {
        let mut jobs: Vec<(usize, f64, Insert, Insert)> = Vec::new();
        for layer in 0..self.p {
            for (w, qubits) in &self.terms {
                jobs.push((
                    layer,
                    *w,
                    Insert::ZPhase(qubits.clone(), FRAC_PI_4),
                    Insert::ZPhase(qubits.clone(), -FRAC_PI_4),
                ));
            }
            for q in 0..self.n {
                jobs.push((self.p + layer, 1.0, Insert::Rx(q, FRAC_PI_2), Insert::Rx(q, -FRAC_PI_2)));
            }
        }
        let parts: Vec<(usize, f64)> = jobs
            .par_iter()
            .enumerate()
            .map(|(j, (component, w, plus, minus))| {
                let layer = component % self.p;
                let up = self.energy_of(&self.circuit(params, Some((layer, plus)))?, shot_seed(seed, j, 0))?;
                let down =
                    self.energy_of(&self.circuit(params, Some((layer, minus)))?, shot_seed(seed, j, 1))?;
                Ok((*component, w * (up - down)))
            })
            .collect::<Result<_>>()?;
        let mut grad = vec![0.0; self.dim()];
        for (component, v) in parts {
            grad[component] += v;
        }
        Ok(grad)
    }
}

/// Exact QAOA energy `⟨γ,β|C|γ,β⟩`.
pub fn qaoa_energy(inst: &IsingInstance, gammas: &[f64], betas: &[f64]) -> Result<f64> {
    qaoa_energy_with_mode(inst, gammas, betas, EvalMode::Exact, 0)
}

/// QAOA energy, exact or estimated from seeded shots.
pub fn qaoa_energy_with_mode(
    inst: &IsingInstance,
    gammas: &[f64],
    betas: &[f64],
    mode: EvalMode,
    seed: u64,
) -> Result<f64> {
    if gammas.len() != betas.len() || gammas.is_empty() {
        return Err(Error::invalid("gammas and betas need the same non-zero length"));
    }
    let obj = QaoaObjective::new(inst, gammas.len(), mode)?;
    let params: Vec<f64> = gammas.iter().chain(betas).copied().collect();
    obj.value(&params, seed)
}

/// Exact QAOA gradient over `γ_1..γ_p, β_1..β_p`.
pub fn qaoa_gradient(inst: &IsingInstance, gammas: &[f64], betas: &[f64]) -> Result<Vec<f64>> {
    if gammas.len() != betas.len() || gammas.is_empty() {
        return Err(Error::invalid("gammas and betas need the same non-zero length"));
    }
    let obj = QaoaObjective::new(inst, gammas.len(), EvalMode::Exact)?;
    let params: Vec<f64> = gammas.iter().chain(betas).copied().collect();
    obj.gradient(&params, 0)
}

/// Optimizes a depth-`p` QAOA (default `⌈n/2⌉`) from zero parameters, plus
/// the configured jitter, and reads out the most likely assignment.
///
/// `ngd_shift` runs `k_max` descent iterations; `simplex` runs Nelder–Mead
/// with `nm` settings and records one trace entry per simplex iteration.
pub fn solve_qaoa(
    inst: &IsingInstance,
    p: Option<usize>,
    method: QaoaMethod,
    cfg: &OptimizerConfig,
    nm: &NelderMeadConfig,
) -> Result<Solution> {
    cfg.validate()?;
    let p = p.unwrap_or_else(|| default_depth(inst.n()));
    if p == 0 {
        return Err(Error::invalid("QAOA depth must be at least 1"));
    }
    let obj = QaoaObjective::new(inst, p, cfg.mode)?;
    let start = match &cfg.init {
        InitAngles::Explicit(v) if v.len() != 2 * p => {
            return Err(Error::invalid(format!(
                "expected {} initial parameters, got {}",
                2 * p,
                v.len()
            )))
        }
        InitAngles::Explicit(v) => jittered(v.clone(), cfg.init_jitter, cfg.seed),
        InitAngles::HalfPi => jittered(vec![FRAC_PI_2; 2 * p], cfg.init_jitter, cfg.seed),
        InitAngles::Auto | InitAngles::Zeros => jittered(vec![0.0; 2 * p], cfg.init_jitter, cfg.seed),
    };
    let (params, mut trace) = match method {
        QaoaMethod::NgdShift => run_ngd(&obj, start, cfg.k_max, 2 * p, cfg.seed)?,
        QaoaMethod::Simplex => {
            let base = derive(&[cfg.seed, role::SIMPLEX]);
            let r = nelder_mead::minimize(
                |x, eval| obj.value(x, derive(&[base, eval as u64])),
                &start,
                nm,
            )?;
            let records = r
                .history
                .iter()
                .enumerate()
                .map(|(k, &loss)| TraceRecord {
                    k,
                    loss,
                    grad_norm: None,
                    step_size: None,
                })
                .collect();
            (
                r.best,
                TrainTrace {
                    records,
                    ..Default::default()
                },
            )
        }
    };
    trace.evaluations = obj.evals.load(Ordering::Relaxed);

    let (gammas, betas) = params.split_at(p);
    let mut state = StateVector::zero(inst.n())?;
    state.apply_circuit(&build_qaoa_with_diagonal(inst.n(), &obj.diag, gammas, betas)?)?;
    let readout = read_out(&state, cfg)?;
    let method = match method {
        QaoaMethod::NgdShift => "qaoa_ngd",
        QaoaMethod::Simplex => "qaoa_simplex",
    };
    Ok(Solution {
        method: method.into(),
        energy: cut_cost(inst, &readout.bits)?,
        thetas: params,
        bits: readout.bits,
        counts: readout.counts,
        probabilities: readout.probabilities,
        mode: cfg.mode,
        ratio: None,
        ratio_clamped: None,
        index: None,
        trace,
    })
}
