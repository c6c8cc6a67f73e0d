//! Dense statevector simulation over a small fixed gate set.
//!
//! Conventions:
//! - qubit 0 is the most significant bit of the amplitude index;
//! - `RY(θ) = exp(−iθY/2) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]`;
//! - `RX(θ) = exp(−iθX/2)`, so `exp(−iβX) = RX(2β)`;
//! - `CNOT` and `CRY` list the control first;
//! - `DIAG_PHASE(γ, φ)` multiplies the amplitude of sub-index `k` of its
//!   target qubits (first target most significant) by `exp(−iγ·φ[k])`.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 28;

/// Largest register for which [`circuit_unitary`] builds a dense matrix.
pub const MAX_UNITARY_QUBITS: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// One gate application.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X(usize),
    Z(usize),
    H(usize),
    Ry { target: usize, theta: f64 },
    Rx { target: usize, theta: f64 },
    Cnot { control: usize, target: usize },
    Cry { control: usize, target: usize, theta: f64 },
    DiagPhase { targets: Vec<usize>, gamma: f64, phases: Vec<f64> },
}

impl Gate {
    pub fn kind(&self) -> &'static str {
        match self {
            Gate::X(_) => "X",
            Gate::Z(_) => "Z",
            Gate::H(_) => "H",
            Gate::Ry { .. } => "RY",
            Gate::Rx { .. } => "RX",
            Gate::Cnot { .. } => "CNOT",
            Gate::Cry { .. } => "CRY",
            Gate::DiagPhase { .. } => "DIAG_PHASE",
        }
    }

    pub fn targets(&self) -> Vec<usize> {
        match self {
            Gate::X(t) | Gate::Z(t) | Gate::H(t) => vec![*t],
            Gate::Ry { target, .. }
            | Gate::Rx { target, .. }
            | Gate::Cnot { target, .. }
            | Gate::Cry { target, .. } => vec![*target],
            Gate::DiagPhase { targets, .. } => targets.clone(),
        }
    }

    pub fn controls(&self) -> Vec<usize> {
        match self {
            Gate::Cnot { control, .. } | Gate::Cry { control, .. } => vec![*control],
            _ => Vec::new(),
        }
    }

    /// Rotation angle, or `γ` for a phase table.
    pub fn theta(&self) -> Option<f64> {
        match self {
            Gate::Ry { theta, .. } | Gate::Rx { theta, .. } | Gate::Cry { theta, .. } => {
                Some(*theta)
            }
            Gate::DiagPhase { gamma, .. } => Some(*gamma),
            _ => None,
        }
    }

    /// Every qubit the gate acts on, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        let mut q = self.controls();
        q.extend(self.targets());
        q
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let qubits = self.qubits();
        for (k, &q) in qubits.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::invalid(format!(
                    "{} acts on qubit {q}, register has {n_qubits}",
                    self.kind()
                )));
            }
            if qubits[..k].contains(&q) {
                return Err(Error::invalid(format!(
                    "{} uses qubit {q} more than once",
                    self.kind()
                )));
            }
        }
        if let Gate::DiagPhase { targets, phases, .. } = self {
            if targets.is_empty() || targets.len() >= usize::BITS as usize {
                return Err(Error::invalid("DIAG_PHASE needs a non-empty target list"));
            }
            if phases.len() != 1 << targets.len() {
                return Err(Error::invalid(format!(
                    "DIAG_PHASE on {} qubits needs {} phases, got {}",
                    targets.len(),
                    1usize << targets.len(),
                    phases.len()
                )));
            }
        }
        Ok(())
    }
}

/// Named qubit roles inside a circuit.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QubitRoles {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancilla: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<usize>,
    #[serde(default)]
    pub working: Vec<usize>,
}

impl QubitRoles {
    fn all(&self) -> Vec<usize> {
        self.ancilla
            .iter()
            .chain(self.cost.iter())
            .chain(self.working.iter())
            .copied()
            .collect()
    }
}

/// Per-kind gate counts of a circuit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GateCensus {
    pub x: usize,
    pub z: usize,
    pub hadamard: usize,
    pub ry: usize,
    pub rx: usize,
    pub cnot: usize,
    pub cry: usize,
    pub diag_phase: usize,
}

impl GateCensus {
    pub fn single_qubit_rotations(&self) -> usize {
        self.ry + self.rx
    }
}

/// An ordered gate list over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    roles: QubitRoles,
    ops: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            roles: QubitRoles::default(),
            ops: Vec::new(),
        }
    }

    pub fn with_roles(n_qubits: usize, roles: QubitRoles) -> Result<Self> {
        let all = roles.all();
        for (k, &q) in all.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::invalid(format!("role qubit {q} outside register")));
            }
            if all[..k].contains(&q) {
                return Err(Error::invalid(format!("qubit {q} assigned to two roles")));
            }
        }
        Ok(Self {
            n_qubits,
            roles,
            ops: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn roles(&self) -> &QubitRoles {
        &self.roles
    }

    pub fn ops(&self) -> &[Gate] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.ops.push(gate);
        Ok(())
    }

    /// Replaces the gate list, keeping register and roles.
    pub fn with_ops(&self, ops: Vec<Gate>) -> Result<Self> {
        let mut c = Self {
            n_qubits: self.n_qubits,
            roles: self.roles.clone(),
            ops: Vec::with_capacity(ops.len()),
        };
        for g in ops {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn census(&self) -> GateCensus {
        let mut c = GateCensus::default();
        for g in &self.ops {
            match g {
                Gate::X(_) => c.x += 1,
                Gate::Z(_) => c.z += 1,
                Gate::H(_) => c.hadamard += 1,
                Gate::Ry { .. } => c.ry += 1,
                Gate::Rx { .. } => c.rx += 1,
                Gate::Cnot { .. } => c.cnot += 1,
                Gate::Cry { .. } => c.cry += 1,
                Gate::DiagPhase { .. } => c.diag_phase += 1,
            }
        }
        c
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&CircuitFile::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: CircuitFile = serde_json::from_str(s)?;
        file.try_into()
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateRecord {
    kind: String,
    targets: Vec<usize>,
    #[serde(default)]
    controls: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phases: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitFile {
    m: usize,
    #[serde(default)]
    roles: QubitRoles,
    ops: Vec<GateRecord>,
}

impl From<&Gate> for GateRecord {
    fn from(g: &Gate) -> Self {
        GateRecord {
            kind: g.kind().to_string(),
            targets: g.targets(),
            controls: g.controls(),
            theta: g.theta(),
            phases: match g {
                Gate::DiagPhase { phases, .. } => Some(phases.clone()),
                _ => None,
            },
        }
    }
}

impl TryFrom<GateRecord> for Gate {
    type Error = Error;

    fn try_from(r: GateRecord) -> Result<Self> {
        let single = |r: &GateRecord| -> Result<usize> {
            match r.targets.as_slice() {
                [t] => Ok(*t),
                _ => Err(Error::invalid(format!("{} needs exactly one target", r.kind))),
            }
        };
        let control = |r: &GateRecord| -> Result<usize> {
            match r.controls.as_slice() {
                [c] => Ok(*c),
                _ => Err(Error::invalid(format!("{} needs exactly one control", r.kind))),
            }
        };
        let no_controls = |r: &GateRecord| -> Result<()> {
            if r.controls.is_empty() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{} takes no controls", r.kind)))
            }
        };
        let theta = |r: &GateRecord| {
            r.theta
                .ok_or_else(|| Error::invalid(format!("{} needs theta", r.kind)))
        };
        let gate = match r.kind.as_str() {
            "X" => {
                no_controls(&r)?;
                Gate::X(single(&r)?)
            }
            "Z" => {
                no_controls(&r)?;
                Gate::Z(single(&r)?)
            }
            "H" => {
                no_controls(&r)?;
                Gate::H(single(&r)?)
            }
            "RY" => {
                no_controls(&r)?;
                Gate::Ry { target: single(&r)?, theta: theta(&r)? }
            }
            "RX" => {
                no_controls(&r)?;
                Gate::Rx { target: single(&r)?, theta: theta(&r)? }
            }
            "CNOT" => Gate::Cnot { control: control(&r)?, target: single(&r)? },
            "CRY" => Gate::Cry {
                control: control(&r)?,
                target: single(&r)?,
                theta: theta(&r)?,
            },
            "DIAG_PHASE" => {
                no_controls(&r)?;
                Gate::DiagPhase {
                    gamma: theta(&r)?,
                    phases: r
                        .phases
                        .ok_or_else(|| Error::invalid("DIAG_PHASE needs phases"))?,
                    targets: r.targets,
                }
            }
            other => return Err(Error::invalid(format!("unknown gate kind {other:?}"))),
        };
        Ok(gate)
    }
}

impl From<&Circuit> for CircuitFile {
    fn from(c: &Circuit) -> Self {
        CircuitFile {
            m: c.n_qubits,
            roles: c.roles.clone(),
            ops: c.ops.iter().map(GateRecord::from).collect(),
        }
    }
}

impl TryFrom<CircuitFile> for Circuit {
    type Error = Error;

    fn try_from(f: CircuitFile) -> Result<Self> {
        let mut c = Circuit::with_roles(f.m, f.roles)?;
        for r in f.ops {
            c.push(r.try_into()?)?;
        }
        Ok(c)
    }
}

type Mat2 = [[Complex64; 2]; 2];

fn real2(a: f64, b: f64, c: f64, d: f64) -> Mat2 {
    [
        [Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
        [Complex64::new(c, 0.0), Complex64::new(d, 0.0)],
    ]
}

fn ry_matrix(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    real2(c, -s, s, c)
}

fn rx_matrix(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let c = Complex64::new(c, 0.0);
    let ms = Complex64::new(0.0, -s);
    [[c, ms], [ms, c]]
}

/// `2^m` complex amplitudes of an `m`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::Capacity {
            what: "simulated qubits",
            requested: n_qubits,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

impl StateVector {
    /// Basis state `|index⟩` on `n_qubits` qubits.
    pub fn init_basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::invalid(format!(
                "basis index {index} outside 0..{dim}"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { n_qubits, amps })
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::init_basis(n_qubits, 0)
    }

    /// Wraps raw amplitudes; the length must be a power of two. No normalization.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::invalid(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        check_register(n_qubits)?;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::invalid(format!(
                "qubit {qubit} outside register of {}",
                self.n_qubits
            )));
        }
        Ok(())
    }

    fn apply_single(&mut self, target: usize, control: Option<usize>, u: &Mat2) {
        let t = self.mask(target);
        let c = control.map_or(0, |q| self.mask(q));
        for i in 0..self.amps.len() {
            if i & t != 0 || i & c != c {
                continue;
            }
            let j = i | t;
            let (a, b) = (self.amps[i], self.amps[j]);
            self.amps[i] = u[0][0] * a + u[0][1] * b;
            self.amps[j] = u[1][0] * a + u[1][1] * b;
        }
    }

    /// Applies one gate in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match gate {
            Gate::X(t) => {
                let t = self.mask(*t);
                for i in 0..self.amps.len() {
                    if i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            Gate::Z(t) => {
                let t = self.mask(*t);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & t != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::H(t) => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                self.apply_single(*t, None, &real2(h, h, h, -h));
            }
            Gate::Ry { target, theta } => self.apply_single(*target, None, &ry_matrix(*theta)),
            Gate::Rx { target, theta } => self.apply_single(*target, None, &rx_matrix(*theta)),
            Gate::Cnot { control, target } => {
                let (c, t) = (self.mask(*control), self.mask(*target));
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            Gate::Cry {
                control,
                target,
                theta,
            } => self.apply_single(*target, Some(*control), &ry_matrix(*theta)),
            Gate::DiagPhase {
                targets,
                gamma,
                phases,
            } => {
                let factors: Vec<Complex64> = phases
                    .iter()
                    .map(|&p| Complex64::from_polar(1.0, -gamma * p))
                    .collect();
                let masks: Vec<usize> = targets.iter().map(|&q| self.mask(q)).collect();
                for (i, a) in self.amps.iter_mut().enumerate() {
                    let sub = masks
                        .iter()
                        .fold(0, |acc, &m| (acc << 1) | usize::from(i & m != 0));
                    *a *= factors[sub];
                }
            }
        }
        Ok(())
    }

    /// Applies every gate of `circuit` in order.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits != self.n_qubits {
            return Err(Error::invalid(format!(
                "circuit has {} qubits, state has {}",
                circuit.n_qubits, self.n_qubits
            )));
        }
        for g in &circuit.ops {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Probability of reading `outcome` on `qubit`.
    pub fn marginal_probability(&self, qubit: usize, outcome: u8) -> Result<f64> {
        self.check_qubit(qubit)?;
        if outcome > 1 {
            return Err(Error::invalid(format!("outcome {outcome} is not 0 or 1")));
        }
        let m = self.mask(qubit);
        let want = if outcome == 1 { m } else { 0 };
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m == want)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// `p(0) − p(1)` on the given qubit.
    pub fn ancilla_expectation(&self, ancilla: usize) -> Result<f64> {
        Ok(self.marginal_probability(ancilla, 0)? - self.marginal_probability(ancilla, 1)?)
    }

    /// Marginal distribution on `qubits`; the first listed qubit is the most
    /// significant bit of the returned index.
    pub fn marginal_distribution(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        if qubits.is_empty() {
            return Err(Error::invalid("marginal needs at least one qubit"));
        }
        for (k, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..k].contains(&q) {
                return Err(Error::invalid(format!("qubit {q} listed twice")));
            }
        }
        let masks: Vec<usize> = qubits.iter().map(|&q| self.mask(q)).collect();
        let mut dist = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let sub = masks
                .iter()
                .fold(0, |acc, &m| (acc << 1) | usize::from(i & m != 0));
            dist[sub] += a.norm_sqr();
        }
        Ok(dist)
    }

    /// `⟨ψ|D|ψ⟩` for a diagonal observable over the whole register.
    pub fn expectation_diagonal(&self, diag: &[f64]) -> Result<f64> {
        if diag.len() != self.amps.len() {
            return Err(Error::invalid(format!(
                "diagonal has {} entries, state has {}",
                diag.len(),
                self.amps.len()
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(diag)
            .map(|(a, d)| a.norm_sqr() * d)
            .sum())
    }

    /// Draws `shots` measurements of `qubits`, keyed by bit-string.
    pub fn sample(&self, qubits: &[usize], shots: u64, seed: u64) -> Result<BTreeMap<String, u64>> {
        if shots == 0 {
            return Err(Error::invalid("shots must be at least 1"));
        }
        let dist = self.marginal_distribution(qubits)?;
        let index = WeightedIndex::new(&dist)
            .map_err(|e| Error::invalid(format!("cannot sample from state: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tally = vec![0u64; dist.len()];
        for _ in 0..shots {
            tally[index.sample(&mut rng)] += 1;
        }
        let width = qubits.len();
        Ok(tally
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(k, c)| (format!("{k:0width$b}"), c))
            .collect())
    }
}

/// Dense unitary of a circuit: column `j` is the circuit applied to `|j⟩`.
pub fn circuit_unitary(circuit: &Circuit) -> Result<DMatrix<Complex64>> {
    let m = circuit.n_qubits;
    if m > MAX_UNITARY_QUBITS {
        return Err(Error::Capacity {
            what: "qubits for a dense unitary",
            requested: m,
            limit: MAX_UNITARY_QUBITS,
        });
    }
    let dim = 1usize << m;
    let mut u = DMatrix::from_element(dim, dim, ZERO);
    for j in 0..dim {
        let mut s = StateVector::init_basis(m, j)?;
        s.apply_circuit(circuit)?;
        u.set_column(j, &nalgebra::DVector::from_column_slice(&s.amps));
    }
    Ok(u)
}
