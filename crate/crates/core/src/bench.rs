//! Seeded benchmark campaigns, the rescaling sweep, and result persistence.
//!
//! Every instance seed is `derive([master, n, index, INSTANCE])` and every
//! solver seed is `derive([master, n, index, SOLVER, method])`, so adding a
//! method or a size never changes the instances other entries see.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nelder_mead::NelderMeadConfig;
use crate::optimize::{solve_qaoa, solve_uq, OptimizerConfig, QaoaMethod, Solution};
use crate::problem::{
    order_agreement, random_instance, transformed_profile, IsingInstance, DEFAULT_LAMBDA,
};
use crate::seeds::{derive, role};

/// Which family of instances a campaign draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    MaxCut,
    Ising,
}

/// A solver entry in a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchMethod {
    UqMaxCut,
    UqIsing,
    QaoaNgd,
    QaoaSimplex,
}

impl BenchMethod {
    pub const ALL: [BenchMethod; 4] = [
        BenchMethod::UqMaxCut,
        BenchMethod::UqIsing,
        BenchMethod::QaoaNgd,
        BenchMethod::QaoaSimplex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchMethod::UqMaxCut => "uqmaxcut",
            BenchMethod::UqIsing => "uqising",
            BenchMethod::QaoaNgd => "qaoa_ngd",
            BenchMethod::QaoaSimplex => "qaoa_simplex",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method {s:?}")))
    }

    fn tag(self) -> u64 {
        self as u64 + 1
    }
}

/// Full description of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub sizes: Vec<usize>,
    pub instances_per_size: usize,
    pub weight_low: f64,
    pub weight_high: f64,
    pub signed: bool,
    pub problem: ProblemKind,
    pub methods: Vec<BenchMethod>,
    /// Settings for every solve; the seed is replaced per item.
    pub optimizer: OptimizerConfig,
    /// QAOA depth; `⌈n/2⌉` when unset.
    pub qaoa_depth: Option<usize>,
    pub nelder_mead: NelderMeadConfig,
    pub master_seed: u64,
    /// Record wall time per solve. Off by default so outputs are byte-stable.
    pub timing: bool,
}

impl Default for BenchSpec {
    fn default() -> Self {
        Self {
            sizes: vec![3, 5, 8],
            instances_per_size: 20,
            weight_low: 1.0,
            weight_high: 10.0,
            signed: false,
            problem: ProblemKind::MaxCut,
            methods: vec![BenchMethod::UqMaxCut],
            optimizer: OptimizerConfig::default(),
            qaoa_depth: None,
            nelder_mead: NelderMeadConfig::default(),
            master_seed: 0,
            timing: false,
        }
    }
}

impl BenchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < 2) {
            return Err(Error::invalid("sizes must be non-empty and each at least 2"));
        }
        if self.instances_per_size == 0 {
            return Err(Error::invalid("instances_per_size must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("at least one method is required"));
        }
        if self.problem == ProblemKind::Ising && self.methods.contains(&BenchMethod::UqMaxCut) {
            return Err(Error::invalid("uqmaxcut needs a MaxCut campaign"));
        }
        if self.weight_low.is_nan() || self.weight_high.is_nan() || self.weight_low > self.weight_high {
            return Err(Error::invalid("weight range is empty"));
        }
        Ok(())
    }
}

/// A campaign instance with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignInstance {
    pub n: usize,
    pub index: usize,
    pub seed: u64,
    pub instance: IsingInstance,
}

/// The instance set every method of a campaign is run on.
pub fn campaign_instances(spec: &BenchSpec) -> Result<Vec<CampaignInstance>> {
    spec.validate()?;
    let mut out = Vec::new();
    for &n in &spec.sizes {
        for index in 0..spec.instances_per_size {
            let seed = derive(&[spec.master_seed, n as u64, index as u64, role::INSTANCE]);
            let instance = random_instance(
                n,
                spec.weight_low,
                spec.weight_high,
                spec.signed,
                spec.problem == ProblemKind::MaxCut,
                seed,
            )?;
            out.push(CampaignInstance { n, index, seed, instance });
        }
    }
    Ok(out)
}

/// Outcome of one solve in a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub n: usize,
    pub index: usize,
    pub seed: u64,
    pub method: BenchMethod,
    pub r: f64,
    pub r_clamped: bool,
    pub i: u8,
    /// Iteration at which the lowest loss was recorded.
    pub iterations: usize,
    pub wall_ms: Option<f64>,
    pub solution: Solution,
}

/// Runs one method on one instance.
fn run_item(spec: &BenchSpec, item: &CampaignInstance, method: BenchMethod) -> Result<BenchRecord> {
    let mut cfg = spec.optimizer.clone();
    cfg.seed = derive(&[
        spec.master_seed,
        item.n as u64,
        item.index as u64,
        role::SOLVER,
        method.tag(),
    ]);
    if method == BenchMethod::UqIsing {
        cfg.entangle = false;
    }
    let started = Instant::now();
    let mut solution = match method {
        BenchMethod::UqMaxCut | BenchMethod::UqIsing => solve_uq(&item.instance, &cfg)?,
        BenchMethod::QaoaNgd => solve_qaoa(
            &item.instance,
            spec.qaoa_depth,
            QaoaMethod::NgdShift,
            &cfg,
            &spec.nelder_mead,
        )?,
        BenchMethod::QaoaSimplex => solve_qaoa(
            &item.instance,
            spec.qaoa_depth,
            QaoaMethod::Simplex,
            &cfg,
            &spec.nelder_mead,
        )?,
    };
    let elapsed = started.elapsed().as_secs_f64() * 1e3;
    solution.method = method.name().into();
    solution.attach_metrics(&item.instance)?;
    Ok(BenchRecord {
        n: item.n,
        index: item.index,
        seed: item.seed,
        method,
        r: solution.ratio.expect("metrics attached"),
        r_clamped: solution.ratio_clamped.expect("metrics attached"),
        i: solution.index.expect("metrics attached"),
        iterations: solution.trace.best_iteration(),
        wall_ms: spec.timing.then_some(elapsed),
        solution,
    })
}

/// Runs every method on every instance in parallel. Records come back in
/// `(n, index, method)` order regardless of scheduling.
pub fn run_campaign(spec: &BenchSpec) -> Result<Vec<BenchRecord>> {
    let instances = campaign_instances(spec)?;
    let jobs: Vec<(&CampaignInstance, BenchMethod)> = instances
        .iter()
        .flat_map(|item| spec.methods.iter().map(move |&m| (item, m)))
        .collect();
    let mut records = jobs
        .par_iter()
        .map(|&(item, method)| run_item(spec, item, method))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| (r.n, r.index, r.method));
    Ok(records)
}

#[derive(Serialize)]
struct ResultRow<'a> {
    n: usize,
    seed: u64,
    method: &'a str,
    r: f64,
    i: u8,
    iterations: usize,
    wall_ms: Option<f64>,
}

/// Results CSV: `n, seed, method, r, i, iterations, wall_ms`.
pub fn write_results_csv<W: std::io::Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(ResultRow {
            n: r.n,
            seed: r.seed,
            method: r.method.name(),
            r: r.r,
            i: r.i,
            iterations: r.iterations,
            wall_ms: r.wall_ms,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Files written by [`persist_campaign`].
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignFiles {
    pub results: PathBuf,
    pub manifest: PathBuf,
    pub instances: PathBuf,
    pub traces: PathBuf,
}

/// Writes `results.csv`, `manifest.json`, one JSON per instance under
/// `instances/` and one trace CSV per record under `traces/`.
pub fn persist_campaign(spec: &BenchSpec, records: &[BenchRecord], dir: &Path) -> Result<CampaignFiles> {
    let files = CampaignFiles {
        results: dir.join("results.csv"),
        manifest: dir.join("manifest.json"),
        instances: dir.join("instances"),
        traces: dir.join("traces"),
    };
    fs::create_dir_all(&files.instances)?;
    fs::create_dir_all(&files.traces)?;
    write_results_csv(records, fs::File::create(&files.results)?)?;
    fs::write(&files.manifest, serde_json::to_string_pretty(spec)? + "\n")?;
    for item in campaign_instances(spec)? {
        item.instance
            .write_json(files.instances.join(format!("n{}_{}.json", item.n, item.index)))?;
    }
    for r in records {
        let name = format!("n{}_{}_{}.csv", r.n, r.index, r.method.name());
        r.solution.trace.write_csv(fs::File::create(files.traces.join(name))?)?;
    }
    Ok(files)
}

/// Aggregates for one `(n, method)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub method: BenchMethod,
    pub count: usize,
    pub mean_r: f64,
    /// Population standard deviation of `r`.
    pub std_r: f64,
    pub index_fraction: f64,
    pub mean_wall_ms: Option<f64>,
}

fn sorted_mean(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v.iter().sum::<f64>() / v.len() as f64
}

/// Mean and spread per `(n, method)`. Values are sorted before summing, so
/// the result does not depend on record order.
pub fn summarize(records: &[BenchRecord]) -> Result<Vec<Summary>> {
    if records.is_empty() {
        return Err(Error::invalid("no records to summarize"));
    }
    let mut cells: BTreeMap<(usize, BenchMethod), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        cells.entry((r.n, r.method)).or_default().push(r);
    }
    Ok(cells
        .into_iter()
        .map(|((n, method), rs)| {
            let mean_r = sorted_mean(rs.iter().map(|r| r.r).collect());
            let var = sorted_mean(rs.iter().map(|r| (r.r - mean_r).powi(2)).collect());
            let walls: Option<Vec<f64>> = rs.iter().map(|r| r.wall_ms).collect();
            Summary {
                n,
                method,
                count: rs.len(),
                mean_r,
                std_r: var.sqrt(),
                index_fraction: rs.iter().filter(|r| r.i == 1).count() as f64 / rs.len() as f64,
                mean_wall_ms: walls.map(sorted_mean),
            }
        })
        .collect())
}

/// Default sweep grid: `0.1, 0.2, …, 1.0` plus `2/π`, ascending.
pub fn default_lambdas() -> Vec<f64> {
    let mut v: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    v.push(DEFAULT_LAMBDA);
    v.sort_by(f64::total_cmp);
    v
}

/// One instance at one `λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub instance_seed: u64,
    pub agreement: f64,
}

/// Ensemble averages at one `λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepLevel {
    pub lambda: f64,
    /// True for the `λ = 2/π` reference row.
    pub reference: bool,
    pub mean_agreement: f64,
    /// Mean over instances of `sin(C_q/K)` at each rank of the sorted costs.
    pub mean_curve: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub levels: Vec<SweepLevel>,
}

fn is_reference(lambda: f64) -> bool {
    (lambda - DEFAULT_LAMBDA).abs() < 1e-12
}

/// Order agreement of sine-transformed costs across `λ` on fully connected
/// MaxCut instances with weights in `[1, 10]`, optionally with random signs.
pub fn lambda_sweep(n: usize, instances: usize, lambdas: &[f64], signed: bool, seed: u64) -> Result<SweepTable> {
    if instances == 0 {
        return Err(Error::invalid("sweep needs at least one instance"));
    }
    if lambdas.is_empty() || lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::invalid("lambdas must be positive"));
    }
    let ensemble = (0..instances)
        .map(|index| {
            let s = derive(&[seed, n as u64, index as u64, role::INSTANCE]);
            Ok((s, random_instance(n, 1.0, 10.0, signed, true, s)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let per_lambda = lambdas
        .par_iter()
        .map(|&lambda| {
            let mut rows = Vec::with_capacity(ensemble.len());
            let mut curve: Vec<f64> = Vec::new();
            for (s, inst) in &ensemble {
                rows.push(SweepRow {
                    lambda,
                    instance_seed: *s,
                    agreement: order_agreement(inst, lambda)?,
                });
                let profile = transformed_profile(inst, lambda)?;
                if curve.is_empty() {
                    curve = vec![0.0; profile.transformed.len()];
                }
                for (acc, v) in curve.iter_mut().zip(&profile.transformed) {
                    *acc += v / ensemble.len() as f64;
                }
            }
            let level = SweepLevel {
                lambda,
                reference: is_reference(lambda),
                mean_agreement: sorted_mean(rows.iter().map(|r| r.agreement).collect()),
                mean_curve: curve,
            };
            Ok((rows, level))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = SweepTable { rows: Vec::new(), levels: Vec::new() };
    for (rows, level) in per_lambda {
        table.rows.extend(rows);
        table.levels.push(level);
    }
    Ok(table)
}

/// Sweep CSV: `lambda, instance_seed, agreement`.
pub fn write_sweep_csv<W: std::io::Write>(table: &SweepTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &table.rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CurveRow {
    lambda: f64,
    reference: bool,
    rank: usize,
    mean_transformed: f64,
}

/// Curves CSV: `lambda, reference, rank, mean_transformed`.
pub fn write_curves_csv<W: std::io::Write>(table: &SweepTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for level in &table.levels {
        for (rank, &v) in level.mean_curve.iter().enumerate() {
            w.serialize(CurveRow {
                lambda: level.lambda,
                reference: level.reference,
                rank,
                mean_transformed: v,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}
