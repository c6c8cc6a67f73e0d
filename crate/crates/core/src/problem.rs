//! Ising / weighted MaxCut instances and the classical side of the solver.
//!
//! An instance stores unary weights `C_ii` and pairwise weights `C_ij` over
//! nodes `1..=n`. Its Hamiltonian is diagonal,
//!
//! ```text
//! C = Σ_i C_ii Z_i + Σ_{i<j} C_ij Z_i Z_j
//! ```
//!
//! so the energy of a basis state `q` is
//! `Σ_i (-1)^{q_i} C_ii + Σ_{i<j} (-1)^{q_i+q_j} C_ij`.
//!
//! Bit order: in every index computed by this crate, node 1 is the most
//! significant bit. Index `0b001` on three nodes therefore means `q = 001`,
//! i.e. only node 3 is set. The simulator uses the same convention (qubit 0
//! is the most significant amplitude bit), so diagonals, circuits and
//! sampled bit-strings line up without any reversal.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_2_PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest node count for which a full `2^n` diagonal is enumerated.
pub const DEFAULT_MAX_NODES: usize = 26;

/// Default rescaling factor; the smallest `λ` keeping `C/K` inside `[-π/2, π/2]`.
pub const DEFAULT_LAMBDA: f64 = FRAC_2_PI;

const ENERGY_TOL: f64 = 1e-9;

/// A weighted graph defining an Ising Hamiltonian.
///
/// Absent weights are zero. A MaxCut instance is one whose unary weights are
/// all zero.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingInstance {
    n: usize,
    unary: BTreeMap<usize, f64>,
    pairwise: BTreeMap<(usize, usize), f64>,
}

impl IsingInstance {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("instance needs at least one node"));
        }
        Ok(Self {
            n,
            unary: BTreeMap::new(),
            pairwise: BTreeMap::new(),
        })
    }

    /// Builds an instance from 1-based weight lists, rejecting duplicates.
    pub fn from_weights(
        n: usize,
        unary: &[(usize, f64)],
        pairwise: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut inst = Self::new(n)?;
        for &(i, w) in unary {
            if inst.unary.contains_key(&i) {
                return Err(Error::invalid(format!("duplicate unary weight for node {i}")));
            }
            inst.set_unary(i, w)?;
        }
        for &(i, j, w) in pairwise {
            let key = (i.min(j), i.max(j));
            if inst.pairwise.contains_key(&key) {
                return Err(Error::invalid(format!(
                    "duplicate pairwise weight for ({}, {})",
                    key.0, key.1
                )));
            }
            inst.set_pairwise(i, j, w)?;
        }
        Ok(inst)
    }

    pub fn set_unary(&mut self, i: usize, w: f64) -> Result<()> {
        self.check_node(i)?;
        check_finite(w)?;
        self.unary.insert(i, w);
        Ok(())
    }

    /// Sets `C_ij`; the pair is stored with `i < j` regardless of argument order.
    pub fn set_pairwise(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(Error::invalid(format!("self-pair ({i}, {i}) is not allowed")));
        }
        check_finite(w)?;
        self.pairwise.insert((i.min(j), i.max(j)), w);
        Ok(())
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(Error::invalid(format!(
                "node index {i} outside 1..={}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn unary(&self, i: usize) -> f64 {
        self.unary.get(&i).copied().unwrap_or(0.0)
    }

    pub fn pairwise(&self, i: usize, j: usize) -> f64 {
        self.pairwise
            .get(&(i.min(j), i.max(j)))
            .copied()
            .unwrap_or(0.0)
    }

    /// Stored unary terms in ascending node order.
    pub fn unary_terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.unary.iter().map(|(&i, &w)| (i, w))
    }

    /// Stored pairwise terms in ascending `(i, j)` order.
    pub fn pairwise_terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.pairwise.iter().map(|(&(i, j), &w)| (i, j, w))
    }

    pub fn is_maxcut(&self) -> bool {
        self.unary.values().all(|&w| w == 0.0)
    }

    /// Number of stored edges, unary and pairwise together.
    pub fn edge_count(&self) -> usize {
        self.unary.len() + self.pairwise.len()
    }

    pub fn unary_edge_count(&self) -> usize {
        self.unary.len()
    }

    pub fn pairwise_edge_count(&self) -> usize {
        self.pairwise.len()
    }

    /// `Σ|C_ii| + Σ|C_ij|`, an upper bound on `|C_qq|` for every `q`.
    pub fn weight_bound(&self) -> f64 {
        self.unary.values().map(|w| w.abs()).sum::<f64>()
            + self.pairwise.values().map(|w| w.abs()).sum::<f64>()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&InstanceFile::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(s)?;
        file.try_into()
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut s = self.to_json()?;
        s.push('\n');
        std::fs::write(path, s)?;
        Ok(())
    }
}

fn check_finite(w: f64) -> Result<()> {
    if w.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("weight {w} is not finite")))
    }
}

/// On-disk form: `{"n": 3, "unary": [[i, w], ...], "pairwise": [[i, j, w], ...]}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    #[serde(default)]
    unary: Vec<(usize, f64)>,
    #[serde(default)]
    pairwise: Vec<(usize, usize, f64)>,
}

impl From<&IsingInstance> for InstanceFile {
    fn from(inst: &IsingInstance) -> Self {
        InstanceFile {
            n: inst.n,
            unary: inst.unary_terms().collect(),
            pairwise: inst.pairwise_terms().collect(),
        }
    }
}

impl TryFrom<InstanceFile> for IsingInstance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        IsingInstance::from_weights(file.n, &file.unary, &file.pairwise)
    }
}

/// An instance together with its rescaling constant `K = λ · Σ|weights|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledInstance {
    base: IsingInstance,
    k_const: f64,
    lambda: f64,
}

impl ScaledInstance {
    pub fn base(&self) -> &IsingInstance {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    pub fn k_const(&self) -> f64 {
        self.k_const
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn scaled_unary(&self, i: usize) -> f64 {
        self.base.unary(i) / self.k_const
    }

    pub fn scaled_pairwise(&self, i: usize, j: usize) -> f64 {
        self.base.pairwise(i, j) / self.k_const
    }
}

/// Rescales an instance with `K = λ · (Σ|C_ii| + Σ|C_ij|)`.
pub fn rescale_k(inst: &IsingInstance, lambda: f64) -> Result<ScaledInstance> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
    }
    let bound = inst.weight_bound();
    if bound == 0.0 {
        return Err(Error::DegenerateInstance(
            "all weights are zero; K would be zero".into(),
        ));
    }
    Ok(ScaledInstance {
        base: inst.clone(),
        k_const: lambda * bound,
        lambda,
    })
}

/// A computational-basis assignment `q_1 … q_n`, spin `s_i = (-1)^{q_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CutAssignment(Vec<u8>);

impl CutAssignment {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::invalid(format!("bit value {b} is not 0 or 1")));
        }
        Ok(Self(bits))
    }

    /// Decodes `index` with node 1 as the most significant of `n` bits.
    pub fn from_index(index: usize, n: usize) -> Self {
        Self((0..n).map(|k| ((index >> (n - 1 - k)) & 1) as u8).collect())
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|b| 1 - b).collect())
    }

    pub fn spin(&self, node: usize) -> f64 {
        if self.0[node - 1] == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for CutAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for CutAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::invalid(format!("bad bit-string character {c:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Self)
    }
}

impl Serialize for CutAssignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CutAssignment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Energy of the basis state `q`.
pub fn cut_cost(inst: &IsingInstance, q: &CutAssignment) -> Result<f64> {
    if q.len() != inst.n {
        return Err(Error::invalid(format!(
            "assignment has {} bits, instance has {} nodes",
            q.len(),
            inst.n
        )));
    }
    let unary: f64 = inst.unary_terms().map(|(i, w)| q.spin(i) * w).sum();
    let pairwise: f64 = inst
        .pairwise_terms()
        .map(|(i, j, w)| q.spin(i) * q.spin(j) * w)
        .sum();
    Ok(unary + pairwise)
}

fn check_capacity(n: usize, max_nodes: usize) -> Result<()> {
    if n > max_nodes {
        return Err(Error::Capacity {
            what: "node count for enumeration",
            requested: n,
            limit: max_nodes,
        });
    }
    Ok(())
}

/// Diagonal of the Ising Hamiltonian, guarded at [`DEFAULT_MAX_NODES`].
pub fn hamiltonian_diagonal(inst: &IsingInstance) -> Result<Vec<f64>> {
    hamiltonian_diagonal_with_limit(inst, DEFAULT_MAX_NODES)
}

/// Diagonal of the Ising Hamiltonian; entry `q` equals `cut_cost(inst, q)`.
pub fn hamiltonian_diagonal_with_limit(inst: &IsingInstance, max_nodes: usize) -> Result<Vec<f64>> {
    check_capacity(inst.n, max_nodes)?;
    let n = inst.n;
    let shift = |node: usize| n - node;
    let unary: Vec<(usize, f64)> = inst.unary_terms().map(|(i, w)| (shift(i), w)).collect();
    let pairwise: Vec<(usize, usize, f64)> = inst
        .pairwise_terms()
        .map(|(i, j, w)| (shift(i), shift(j), w))
        .collect();
    let spin = |bit: usize| if bit & 1 == 0 { 1.0 } else { -1.0 };
    Ok((0..1usize << n)
        .into_par_iter()
        .map(|q| {
            let u: f64 = unary.iter().map(|&(s, w)| spin(q >> s) * w).sum();
            let p: f64 = pairwise
                .iter()
                .map(|&(si, sj, w)| spin((q >> si) ^ (q >> sj)) * w)
                .sum();
            u + p
        })
        .collect())
}

/// Exact spectrum of an instance obtained by enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub c_min: f64,
    pub c_max: f64,
    pub argmins: Vec<CutAssignment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<Vec<f64>>,
}

/// Approximation ratio together with its unclamped value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxRatio {
    pub value: f64,
    pub raw: f64,
    /// Set when `raw` fell outside `[0, 1]` and was clamped.
    pub clamped: bool,
}

impl SpectrumReport {
    fn energy_tol(&self) -> f64 {
        ENERGY_TOL * self.c_min.abs().max(self.c_max.abs()).max(1.0)
    }

    pub fn is_ground_energy(&self, energy: f64) -> bool {
        (energy - self.c_min).abs() <= self.energy_tol()
    }

    /// `r = (E − C_max) / (C_min − C_max)`; 1 at the ground energy, 0 at the top.
    pub fn approximation_ratio(&self, energy: f64) -> Result<ApproxRatio> {
        if self.c_min == self.c_max {
            return Err(Error::DegenerateInstance(
                "spectrum is flat (c_min = c_max); ratio undefined".into(),
            ));
        }
        let raw = (energy - self.c_max) / (self.c_min - self.c_max);
        let value = raw.clamp(0.0, 1.0);
        Ok(ApproxRatio {
            value,
            raw,
            clamped: (raw - value).abs() > 1e-12,
        })
    }

    /// 1 iff `most_likely` attains the ground energy. With `symmetric_pair`,
    /// the bit-complement attaining it also counts.
    pub fn approximation_index(
        &self,
        inst: &IsingInstance,
        most_likely: &CutAssignment,
        symmetric_pair: bool,
    ) -> Result<u8> {
        if self.is_ground_energy(cut_cost(inst, most_likely)?) {
            return Ok(1);
        }
        if symmetric_pair && self.is_ground_energy(cut_cost(inst, &most_likely.complement())?) {
            return Ok(1);
        }
        Ok(0)
    }
}

/// Enumerates all `2^n` assignments, guarded at [`DEFAULT_MAX_NODES`].
pub fn brute_force(inst: &IsingInstance) -> Result<SpectrumReport> {
    brute_force_with_limit(inst, DEFAULT_MAX_NODES)
}

pub fn brute_force_with_limit(inst: &IsingInstance, max_nodes: usize) -> Result<SpectrumReport> {
    let diag = hamiltonian_diagonal_with_limit(inst, max_nodes)?;
    let c_min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let c_max = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut report = SpectrumReport {
        c_min,
        c_max,
        argmins: Vec::new(),
        diagonal: None,
    };
    report.argmins = diag
        .iter()
        .enumerate()
        .filter(|&(_, &e)| report.is_ground_energy(e))
        .map(|(q, _)| CutAssignment::from_index(q, inst.n))
        .collect();
    report.diagonal = Some(diag);
    Ok(report)
}

/// Ratio for `energy` on `inst`, computing the spectrum by enumeration.
pub fn approximation_ratio(inst: &IsingInstance, energy: f64) -> Result<ApproxRatio> {
    brute_force(inst)?.approximation_ratio(energy)
}

pub fn approximation_index(
    inst: &IsingInstance,
    most_likely: &CutAssignment,
    symmetric_pair: bool,
) -> Result<u8> {
    brute_force(inst)?.approximation_index(inst, most_likely, symmetric_pair)
}

/// Draws a fully connected instance with weights uniform in `[low, high]`.
///
/// With `signed`, each weight is multiplied by an independent fair sign.
/// With `maxcut_only`, no unary weights are drawn. Unary weights (if any)
/// are drawn first in node order, then pairwise weights in `(i, j)` order.
pub fn random_instance(
    n: usize,
    weight_low: f64,
    weight_high: f64,
    signed: bool,
    maxcut_only: bool,
    seed: u64,
) -> Result<IsingInstance> {
    if n < 2 {
        return Err(Error::invalid(format!("random instances need n >= 2, got {n}")));
    }
    if !(weight_low.is_finite() && weight_high.is_finite() && weight_low < weight_high) {
        return Err(Error::invalid(format!(
            "weight range [{weight_low}, {weight_high}] is empty or not finite"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let w = rng.random_range(weight_low..=weight_high);
        if signed && rng.random_bool(0.5) {
            -w
        } else {
            w
        }
    };
    let mut inst = IsingInstance::new(n)?;
    if !maxcut_only {
        for i in 1..=n {
            let w = draw(&mut rng);
            inst.set_unary(i, w)?;
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let w = draw(&mut rng);
            inst.set_pairwise(i, j, w)?;
        }
    }
    Ok(inst)
}

/// True costs sorted ascending, paired with `sin(cost / K)` in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedProfile {
    pub sorted_costs: Vec<f64>,
    pub transformed: Vec<f64>,
}

/// Sorts the true diagonal and applies the sine transform with `K = λ·bound`.
pub fn transformed_profile(inst: &IsingInstance, lambda: f64) -> Result<TransformedProfile> {
    let scaled = rescale_k(inst, lambda)?;
    let mut diag = hamiltonian_diagonal(inst)?;
    diag.sort_by(f64::total_cmp);
    let k = scaled.k_const();
    let transformed = diag.iter().map(|c| (c / k).sin()).collect();
    Ok(TransformedProfile {
        sorted_costs: diag,
        transformed,
    })
}

/// Fraction of adjacent pairs in the sorted true diagonal whose order survives
/// the transform `sin(C/K)`. Ties in the true costs count as preserved.
pub fn order_agreement(inst: &IsingInstance, lambda: f64) -> Result<f64> {
    let profile = transformed_profile(inst, lambda)?;
    let pairs = profile.sorted_costs.len() - 1;
    let preserved = (0..pairs)
        .filter(|&k| {
            profile.sorted_costs[k] == profile.sorted_costs[k + 1]
                || profile.transformed[k] <= profile.transformed[k + 1]
        })
        .count();
    Ok(preserved as f64 / pairs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn triangle() -> IsingInstance {
        IsingInstance::from_weights(3, &[], &[(1, 2, 1.0), (1, 3, 2.0), (2, 3, 3.0)]).unwrap()
    }

    fn pair() -> IsingInstance {
        IsingInstance::from_weights(2, &[], &[(1, 2, 1.0)]).unwrap()
    }

    fn bits(s: &str) -> CutAssignment {
        s.parse().unwrap()
    }

    #[test]
    fn cut_cost_examples() {
        assert_eq!(cut_cost(&pair(), &bits("00")).unwrap(), 1.0);
        assert_eq!(cut_cost(&pair(), &bits("01")).unwrap(), -1.0);
        // spins (+,+,-): 1·(+1) + 2·(-1) + 3·(-1)
        assert_eq!(cut_cost(&triangle(), &bits("001")).unwrap(), -4.0);
    }

    #[test]
    fn cut_cost_rejects_length_mismatch() {
        assert!(matches!(
            cut_cost(&triangle(), &bits("01")),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn diagonal_examples() {
        let single = IsingInstance::from_weights(1, &[(1, 5.0)], &[]).unwrap();
        assert_eq!(hamiltonian_diagonal(&single).unwrap(), vec![5.0, -5.0]);
        assert_eq!(hamiltonian_diagonal(&pair()).unwrap(), vec![1.0, -1.0, -1.0, 1.0]);

        let diag = hamiltonian_diagonal(&triangle()).unwrap();
        let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(min, -4.0);
        let at: Vec<usize> = (0..8).filter(|&q| diag[q] == min).collect();
        assert_eq!(at, vec![1, 6]);
    }

    #[test]
    fn diagonal_capacity_guard() {
        let inst = IsingInstance::new(5).unwrap();
        assert!(matches!(
            hamiltonian_diagonal_with_limit(&inst, 4),
            Err(Error::Capacity { requested: 5, limit: 4, .. })
        ));
    }

    #[test]
    fn rescale_examples() {
        let k = rescale_k(&pair(), DEFAULT_LAMBDA).unwrap().k_const();
        assert!((k - 2.0 / PI).abs() < 1e-15);

        let k = rescale_k(&triangle(), DEFAULT_LAMBDA).unwrap().k_const();
        assert!((k - 12.0 / PI).abs() < 1e-12);
        assert!((k - 3.819719).abs() < 1e-6);

        assert_eq!(rescale_k(&pair(), 1.0).unwrap().k_const(), 1.0);
    }

    #[test]
    fn rescale_rejects_zero_instance_and_bad_lambda() {
        let empty = IsingInstance::new(3).unwrap();
        assert!(matches!(
            rescale_k(&empty, DEFAULT_LAMBDA),
            Err(Error::DegenerateInstance(_))
        ));
        assert!(rescale_k(&pair(), 0.0).is_err());
        assert!(rescale_k(&pair(), -1.0).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let report = brute_force(&triangle()).unwrap();
        assert_eq!(report.c_min, -4.0);
        assert_eq!(report.c_max, 6.0);
        assert_eq!(report.argmins, vec![bits("001"), bits("110")]);

        let single = IsingInstance::from_weights(1, &[(1, 5.0)], &[]).unwrap();
        let report = brute_force(&single).unwrap();
        assert_eq!(report.c_min, -5.0);
        assert_eq!(report.argmins, vec![bits("1")]);
    }

    #[test]
    fn maxcut_argmins_closed_under_complement() {
        let inst = random_instance(6, 1.0, 10.0, false, true, 3).unwrap();
        let report = brute_force(&inst).unwrap();
        for q in &report.argmins {
            assert!(report.argmins.contains(&q.complement()));
        }
    }

    #[test]
    fn random_instance_contract() {
        let a = random_instance(3, 1.0, 10.0, false, true, 7).unwrap();
        assert_eq!(a.pairwise_edge_count(), 3);
        assert_eq!(a.unary_edge_count(), 0);
        assert!(a.pairwise_terms().all(|(_, _, w)| (1.0..=10.0).contains(&w)));
        assert_eq!(a, random_instance(3, 1.0, 10.0, false, true, 7).unwrap());

        let b = random_instance(5, 1.0, 10.0, false, false, 1).unwrap();
        assert_eq!(b.unary_edge_count(), 5);
        assert_eq!(b.pairwise_edge_count(), 10);
        assert!(b.unary_terms().all(|(_, w)| (1.0..=10.0).contains(&w)));

        let s = random_instance(8, 1.0, 10.0, true, true, 2).unwrap();
        assert!(s.pairwise_terms().any(|(_, _, w)| w < 0.0));
        assert!(s.pairwise_terms().all(|(_, _, w)| (1.0..=10.0).contains(&w.abs())));
    }

    #[test]
    fn random_instance_rejects_bad_range() {
        assert!(random_instance(3, 10.0, 1.0, false, true, 0).is_err());
        assert!(random_instance(3, 1.0, 1.0, false, true, 0).is_err());
        assert!(random_instance(1, 1.0, 10.0, false, true, 0).is_err());
    }

    #[test]
    fn order_agreement_examples() {
        let single = IsingInstance::from_weights(1, &[(1, 5.0)], &[]).unwrap();
        for lambda in [DEFAULT_LAMBDA, 1.0, 3.0] {
            assert_eq!(order_agreement(&single, lambda).unwrap(), 1.0);
        }
        let inst = random_instance(6, 1.0, 10.0, true, false, 11).unwrap();
        assert_eq!(order_agreement(&inst, DEFAULT_LAMBDA).unwrap(), 1.0);
    }

    #[test]
    fn approximation_ratio_examples() {
        let report = brute_force(&triangle()).unwrap();
        assert_eq!(report.approximation_ratio(-4.0).unwrap().value, 1.0);
        assert_eq!(report.approximation_ratio(6.0).unwrap().value, 0.0);
        let r = report.approximation_ratio(0.0).unwrap();
        assert!((r.value - 0.6).abs() < 1e-15);
        assert!(!r.clamped);

        let r = report.approximation_ratio(-5.0).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.clamped);
    }

    #[test]
    fn approximation_ratio_degenerate() {
        let flat = IsingInstance::from_weights(2, &[], &[(1, 2, 0.0)]).unwrap();
        assert!(matches!(
            approximation_ratio(&flat, 0.0),
            Err(Error::DegenerateInstance(_))
        ));
    }

    #[test]
    fn approximation_index_examples() {
        let tri = triangle();
        assert_eq!(approximation_index(&tri, &bits("001"), false).unwrap(), 1);
        assert_eq!(approximation_index(&tri, &bits("000"), false).unwrap(), 0);

        // Asymmetric unary term: 10 is optimal, its complement 01 is not.
        // The pair rule credits 01 anyway, which is why it is MaxCut-only.
        let inst = IsingInstance::from_weights(2, &[(1, 0.5)], &[(1, 2, 1.0)]).unwrap();
        let report = brute_force(&inst).unwrap();
        assert_eq!(report.argmins, vec![bits("10")]);
        assert_eq!(report.approximation_index(&inst, &bits("01"), false).unwrap(), 0);
        assert_eq!(report.approximation_index(&inst, &bits("01"), true).unwrap(), 1);

        let mc = random_instance(5, 1.0, 10.0, false, true, 9).unwrap();
        let report = brute_force(&mc).unwrap();
        let comp = report.argmins[0].complement();
        assert_eq!(report.approximation_index(&mc, &comp, true).unwrap(), 1);
    }

    #[test]
    fn json_round_trip_and_rejections() {
        let inst = IsingInstance::from_weights(3, &[(2, -1.5)], &[(1, 3, 2.25)]).unwrap();
        let json = inst.to_json().unwrap();
        assert_eq!(json, r#"{"n":3,"unary":[[2,-1.5]],"pairwise":[[1,3,2.25]]}"#);
        assert_eq!(IsingInstance::from_json(&json).unwrap(), inst);

        for bad in [
            r#"{"n":2,"unary":[],"pairwise":[[1,1,1.0]]}"#,
            r#"{"n":2,"unary":[],"pairwise":[[1,2,1.0],[2,1,3.0]]}"#,
            r#"{"n":2,"unary":[[1,1.0],[1,2.0]],"pairwise":[]}"#,
            r#"{"n":2,"unary":[[3,1.0]],"pairwise":[]}"#,
            r#"{"n":2,"unary":[[0,1.0]],"pairwise":[]}"#,
        ] {
            assert!(IsingInstance::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn cut_assignment_index_round_trip() {
        let q = bits("0110");
        assert_eq!(q.index(), 6);
        assert_eq!(CutAssignment::from_index(6, 4), q);
        assert_eq!(q.complement().to_string(), "1001");
        assert!(CutAssignment::new(vec![0, 2]).is_err());
    }
}
