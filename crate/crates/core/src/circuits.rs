//! Circuit builders: block encoding, its controlled form, ansatz,
//! entanglement, the full Hadamard-test workflow and the QAOA ansatz.
//!
//! Register layout of the workflow circuit: qubit 0 is the ancilla, qubit 1
//! the cost qubit and qubits `2..n+2` the working register (node `i` on
//! qubit `i + 1`). The bare block encoding drops the ancilla: cost qubit 0,
//! node `i` on qubit `i`.
//!
//! The block encoding realizes
//! `U = [[sin Ĉ, cos Ĉ], [cos Ĉ, −sin Ĉ]]` with the cost qubit as the block
//! index and `Ĉ = diag(C)/K`. It is built as `RY(−2Ĉ)·X` on the cost qubit,
//! where each edge contributes `RY(−2Ĉ_e)` conjugated by CNOTs that flip its
//! sign according to the parity of the edge's nodes. The X is applied first
//! in time; `RY(−2x)·X` equals the target 2×2 block exactly, so no global
//! phase is left over.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::{hamiltonian_diagonal, IsingInstance, ScaledInstance};
use crate::statevec::{Circuit, Gate, GateCensus, QubitRoles};

const ANCILLA: usize = 0;
const COST: usize = 1;

fn add(c: &mut Circuit, g: Gate) {
    c.push(g).expect("builder emitted a gate outside its register");
}

/// Edge rotations in construction order: pairwise edges ascending, then
/// unary edges ascending. Each entry lists the nodes whose parity flips the
/// rotation sign and the rotation angle `−2Ĉ_e`.
fn edge_rotations(s: &ScaledInstance) -> Vec<(Vec<usize>, f64)> {
    let k = s.k_const();
    let base = s.base();
    base.pairwise_terms()
        .map(|(i, j, w)| (vec![j, i], -2.0 * w / k))
        .chain(base.unary_terms().map(|(i, w)| (vec![i], -2.0 * w / k)))
        .collect()
}

/// Emits the edge network onto `cost`, with `node_qubit` mapping 1-based
/// nodes to register qubits. `rotate` emits the (possibly controlled) RY.
fn push_edges(
    c: &mut Circuit,
    s: &ScaledInstance,
    cost: usize,
    node_qubit: impl Fn(usize) -> usize,
    mut rotate: impl FnMut(&mut Circuit, f64),
) {
    for (nodes, theta) in edge_rotations(s) {
        for &v in &nodes {
            add(c, Gate::Cnot { control: node_qubit(v), target: cost });
        }
        rotate(c, theta);
        for &v in nodes.iter().rev() {
            add(c, Gate::Cnot { control: node_qubit(v), target: cost });
        }
    }
}

/// Block encoding of `C/K` on `1 + n` qubits (cost qubit 0).
pub fn build_block_encoding(s: &ScaledInstance) -> Circuit {
    let n = s.n();
    let roles = QubitRoles {
        ancilla: None,
        cost: Some(0),
        working: (1..=n).collect(),
    };
    let mut c = Circuit::with_roles(n + 1, roles).expect("roles are distinct");
    add(&mut c, Gate::X(0));
    push_edges(&mut c, s, 0, |v| v, |c, theta| {
        add(c, Gate::Ry { target: 0, theta });
    });
    c
}

/// Appends the ancilla-controlled block encoding. Every controlled RY is
/// expanded as `RY(θ/2)`, CNOT, `RY(−θ/2)`, CNOT, so no gate carries more than
/// one control; the initial X becomes a CNOT from the ancilla.
fn push_controlled(c: &mut Circuit, s: &ScaledInstance) {
    add(c, Gate::Cnot { control: ANCILLA, target: COST });
    push_edges(c, s, COST, |v| v + 1, |c, theta| {
        add(c, Gate::Ry { target: COST, theta: theta / 2.0 });
        add(c, Gate::Cnot { control: ANCILLA, target: COST });
        add(c, Gate::Ry { target: COST, theta: -theta / 2.0 });
        add(c, Gate::Cnot { control: ANCILLA, target: COST });
    });
}

fn workflow_roles(n: usize) -> QubitRoles {
    QubitRoles {
        ancilla: Some(ANCILLA),
        cost: Some(COST),
        working: (2..n + 2).collect(),
    }
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U` on `2 + n` qubits (ancilla 0, cost 1).
pub fn build_controlled_block_encoding(s: &ScaledInstance) -> Circuit {
    let n = s.n();
    let mut c = Circuit::with_roles(n + 2, workflow_roles(n)).expect("roles are distinct");
    push_controlled(&mut c, s);
    c
}

/// One `RY(θ_i)` per qubit, on `thetas.len()` qubits.
pub fn build_ansatz(thetas: &[f64]) -> Circuit {
    let mut c = Circuit::new(thetas.len());
    for (q, &theta) in thetas.iter().enumerate() {
        add(&mut c, Gate::Ry { target: q, theta });
    }
    c
}

/// CNOT fan from the first qubit to the last..second, H on the first, then
/// the fan back in ascending order. Maps `|0 b⟩` to an equal-weight
/// superposition of `b` and its complement.
fn push_entanglement(c: &mut Circuit, qubits: &[usize]) {
    let (&head, rest) = qubits.split_first().expect("non-empty register");
    for &q in rest.iter().rev() {
        add(c, Gate::Cnot { control: head, target: q });
    }
    add(c, Gate::H(head));
    for &q in rest {
        add(c, Gate::Cnot { control: head, target: q });
    }
}

/// Entanglement circuit on `n ≥ 2` qubits.
pub fn build_entanglement(n: usize) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "entanglement needs at least 2 qubits, got {n}"
        )));
    }
    let mut c = Circuit::new(n);
    push_entanglement(&mut c, &(0..n).collect::<Vec<_>>());
    Ok(c)
}

/// Number of trainable angles for an `n`-node workflow.
pub fn ansatz_arity(n: usize, entangle: bool) -> usize {
    if entangle {
        n - 1
    } else {
        n
    }
}

/// Full Hadamard-test circuit on `2 + n` qubits.
///
/// Without `entangle`, `thetas` has one angle per node. With `entangle`,
/// node 1 stays at `|0⟩`, the `n − 1` angles drive nodes `2..=n`, and the
/// entanglement circuit follows the ansatz.
pub fn build_workflow(s: &ScaledInstance, thetas: &[f64], entangle: bool) -> Result<Circuit> {
    let n = s.n();
    if entangle && n < 2 {
        return Err(Error::invalid("entangled mode needs at least 2 nodes"));
    }
    let arity = ansatz_arity(n, entangle);
    if thetas.len() != arity {
        return Err(Error::invalid(format!(
            "expected {arity} angles, got {}",
            thetas.len()
        )));
    }
    let roles = workflow_roles(n);
    let working = roles.working.clone();
    let mut c = Circuit::with_roles(n + 2, roles).expect("roles are distinct");
    let offset = n - arity;
    for (k, &theta) in thetas.iter().enumerate() {
        add(&mut c, Gate::Ry { target: working[offset + k], theta });
    }
    if entangle {
        push_entanglement(&mut c, &working);
    }
    add(&mut c, Gate::H(ANCILLA));
    push_controlled(&mut c, s);
    add(&mut c, Gate::H(ANCILLA));
    Ok(c)
}

/// QAOA circuit on `n` qubits: `H^⊗n`, then per layer the cost phase
/// `exp(−iγ_k C)` and the mixer `RX(2β_k)` on every qubit.
pub fn build_qaoa(inst: &IsingInstance, gammas: &[f64], betas: &[f64]) -> Result<Circuit> {
    let diag = hamiltonian_diagonal(inst)?;
    build_qaoa_with_diagonal(inst.n(), &diag, gammas, betas)
}

/// As [`build_qaoa`], reusing a precomputed diagonal.
pub fn build_qaoa_with_diagonal(
    n: usize,
    diag: &[f64],
    gammas: &[f64],
    betas: &[f64],
) -> Result<Circuit> {
    if gammas.len() != betas.len() {
        return Err(Error::invalid(format!(
            "{} gammas but {} betas",
            gammas.len(),
            betas.len()
        )));
    }
    if gammas.is_empty() {
        return Err(Error::invalid("QAOA depth must be at least 1"));
    }
    let roles = QubitRoles {
        ancilla: None,
        cost: None,
        working: (0..n).collect(),
    };
    let mut c = Circuit::with_roles(n, roles)?;
    for q in 0..n {
        add(&mut c, Gate::H(q));
    }
    for (&gamma, &beta) in gammas.iter().zip(betas) {
        c.push(Gate::DiagPhase {
            targets: (0..n).collect(),
            gamma,
            phases: diag.to_vec(),
        })?;
        for q in 0..n {
            add(&mut c, Gate::Rx { target: q, theta: 2.0 * beta });
        }
    }
    Ok(c)
}

/// Removes pairs of identical CNOTs with no gate touching either qubit in
/// between. Removal can expose new pairs; those are removed too.
pub fn cancel_adjacent_cnots(c: &Circuit) -> Circuit {
    let mut kept: Vec<Option<Gate>> = Vec::with_capacity(c.len());
    for g in c.ops() {
        if let Gate::Cnot { control, target } = *g {
            let blocker = kept.iter().rposition(|slot| {
                slot.as_ref().is_some_and(|h| {
                    let q = h.qubits();
                    q.contains(&control) || q.contains(&target)
                })
            });
            if let Some(at) = blocker {
                if kept[at] == Some(g.clone()) {
                    kept[at] = None;
                    continue;
                }
            }
        }
        kept.push(Some(g.clone()));
    }
    c.with_ops(kept.into_iter().flatten().collect())
        .expect("subset of a valid circuit")
}

/// Required qubit connectivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "degree", rename_all = "kebab-case")]
pub enum Connectivity {
    /// One qubit coupled to `k` others.
    OneToAll(usize),
    /// Coupling pattern follows the graph with `k` couplings.
    GraphDependent(usize),
}

/// Resource method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResourceMethod {
    UqIsing,
    Qaoa { p: usize },
}

impl ResourceMethod {
    pub fn name(&self) -> String {
        match self {
            ResourceMethod::UqIsing => "uqising".into(),
            ResourceMethod::Qaoa { p } => format!("qaoa(p={p})"),
        }
    }
}

/// Gate and qubit budget of a method on a graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceReport {
    pub method: String,
    pub qubits: usize,
    pub cnot: usize,
    pub rotations: usize,
    pub hadamard: usize,
    pub connectivity: Connectivity,
    pub warnings: Vec<String>,
}

fn floored(value: i64, what: &str, warnings: &mut Vec<String>) -> usize {
    if value < 0 {
        warnings.push(format!("{what} formula gave {value}; floored at 0"));
        0
    } else {
        value as usize
    }
}

/// Closed-form resource counts, with `|E|` counting unary and pairwise edges
/// and `|S|` the node count.
///
/// For the unary-qubit method this counts the controlled block encoding
/// plus the Hadamard sandwich; the ansatz is excluded. For QAOA it counts a
/// ZZ-decomposed cost layer; negative results are floored at 0 and flagged.
pub fn count_resources(inst: &IsingInstance, method: ResourceMethod) -> ResourceReport {
    let e = inst.edge_count() as i64;
    let s = inst.n() as i64;
    let mut warnings = Vec::new();
    if e == 0 {
        warnings.push("instance has no edges".to_string());
    }
    match method {
        ResourceMethod::UqIsing => ResourceReport {
            method: method.name(),
            qubits: inst.n() + 2,
            cnot: floored(1 + 6 * e - 2 * s, "cnot", &mut warnings),
            rotations: 2 * inst.edge_count(),
            hadamard: 2,
            connectivity: Connectivity::OneToAll(inst.n() + 1),
            warnings,
        },
        ResourceMethod::Qaoa { p } => {
            let p = p as i64;
            let cnot = floored(p * (2 * e - 2 * s), "cnot", &mut warnings);
            let couplings = floored(e - s, "connectivity", &mut warnings);
            ResourceReport {
                method: method.name(),
                qubits: inst.n(),
                cnot,
                rotations: floored(p * (e + s), "rotations", &mut warnings),
                hadamard: inst.n(),
                connectivity: Connectivity::GraphDependent(couplings),
                warnings,
            }
        }
    }
}

/// Census of an actually built circuit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuiltCensus {
    pub qubits: usize,
    /// CNOTs as built, before cancellation.
    pub cnot_raw: usize,
    /// CNOTs after [`cancel_adjacent_cnots`].
    pub cnot: usize,
    pub rotations: usize,
    pub hadamard: usize,
    pub x: usize,
    pub multi_controlled: usize,
    /// Largest number of distinct two-qubit partners of any qubit.
    pub max_partners: usize,
}

/// Largest number of distinct qubits any one qubit shares a two-qubit gate with.
pub fn max_partners(c: &Circuit) -> usize {
    let mut partners = vec![BTreeSet::new(); c.n_qubits()];
    for g in c.ops() {
        let q = g.qubits();
        if q.len() == 2 {
            partners[q[0]].insert(q[1]);
            partners[q[1]].insert(q[0]);
        }
    }
    partners.iter().map(BTreeSet::len).max().unwrap_or(0)
}

/// Census of the controlled block encoding plus the two Hadamards of the
/// workflow sandwich. For complete Ising graphs `cnot_raw` equals the
/// closed-form count; cancellation can only lower it.
pub fn built_uq_census(s: &ScaledInstance) -> BuiltCensus {
    let raw = build_controlled_block_encoding(s);
    let cnot_raw = raw.census().cnot;
    let c = cancel_adjacent_cnots(&raw);
    let GateCensus { x, ry, rx, cnot, cry, .. } = c.census();
    BuiltCensus {
        qubits: c.n_qubits(),
        cnot_raw,
        cnot,
        rotations: ry + rx,
        hadamard: 2,
        x,
        multi_controlled: cry + c.ops().iter().filter(|g| g.controls().len() > 1).count(),
        max_partners: max_partners(&c),
    }
}
