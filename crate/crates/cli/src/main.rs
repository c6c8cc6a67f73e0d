//! `uqcut` command-line front end. Machine-readable output goes to stdout
//! (or `--out`), human-readable summaries to stderr.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use uqcut::bench::{
    default_lambdas, lambda_sweep, persist_campaign, run_campaign, summarize, write_curves_csv,
    write_results_csv, write_sweep_csv, BenchMethod, BenchSpec, ProblemKind,
};
use uqcut::circuits::{
    build_ansatz, build_block_encoding, build_controlled_block_encoding, build_entanglement,
    build_qaoa, build_workflow, built_uq_census, cancel_adjacent_cnots, count_resources,
    BuiltCensus, ResourceMethod, ResourceReport,
};
use uqcut::nelder_mead::NelderMeadConfig;
use uqcut::optimize::{
    default_depth, qaoa_energy_with_mode, qaoa_gradient, solve_qaoa, solve_uq, EvalMode,
    InitAngles, OptimizerConfig, QaoaMethod, Solution,
};
use uqcut::problem::{
    brute_force_with_limit, random_instance, rescale_k, CutAssignment, IsingInstance,
    DEFAULT_LAMBDA, DEFAULT_MAX_NODES,
};
use uqcut::statevec::Circuit;
use uqcut::Error;

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (", env!("UQCUT_BUILD_HASH"), ")");

#[derive(Parser)]
#[command(name = "uqcut", version = VERSION, about = "Unary-qubit MaxCut and Ising solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a fully connected random instance.
    Gen(GenArgs),
    /// Enumerate the spectrum of an instance.
    Oracle(OracleArgs),
    /// Train a solver on an instance and read out an assignment.
    Solve(SolveArgs),
    /// Evaluate the QAOA energy and gradient at given angles.
    Qaoa(QaoaArgs),
    /// Run a seeded benchmark campaign.
    Bench(BenchArgs),
    /// Sweep the rescaling factor and report order agreement.
    Ksweep(KsweepArgs),
    /// Closed-form gate and qubit counts.
    Resources(ResourcesArgs),
    /// Write a circuit as JSON.
    ExportCircuit(ExportArgs),
}

/// Inclusive weight range written `lo:hi`.
#[derive(Debug, Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
}

fn parse_range(s: &str) -> Result<Range, String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err("bounds must be finite".into());
    }
    if lo > hi {
        return Err(format!("lower bound {lo} exceeds upper bound {hi}"));
    }
    Ok(Range { lo, hi })
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Output {
    fn write(&self, body: &[u8]) -> uqcut::Result<()> {
        match &self.out {
            Some(path) => fs::write(path, body)?,
            None => io::stdout().lock().write_all(body)?,
        }
        Ok(())
    }

    fn json<T: Serialize>(&self, value: &T) -> uqcut::Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(s.as_bytes())
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// Weight magnitudes, drawn uniformly.
    #[arg(long, value_parser = parse_range, default_value = "1:10")]
    range: Range,
    /// Give each weight an independent random sign.
    #[arg(long)]
    signed: bool,
    /// Pairwise weights only.
    #[arg(long)]
    maxcut: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Include the full cost diagonal.
    #[arg(long)]
    diagonal: bool,
    /// Largest node count enumerated.
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveMethod {
    Uq,
    Qaoa,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QaoaOptimizer {
    Ngd,
    Simplex,
}

impl From<QaoaOptimizer> for QaoaMethod {
    fn from(o: QaoaOptimizer) -> Self {
        match o {
            QaoaOptimizer::Ngd => QaoaMethod::NgdShift,
            QaoaOptimizer::Simplex => QaoaMethod::Simplex,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Init {
    Auto,
    Zeros,
    HalfPi,
}

/// Evaluation settings shared by `solve` and `bench`.
#[derive(Args)]
struct EvalArgs {
    /// Exact expectations (the default).
    #[arg(long, conflicts_with = "shots")]
    exact: bool,
    /// Estimate expectations from this many shots per evaluation.
    #[arg(long)]
    shots: Option<u64>,
    /// Shots drawn for the final readout histogram.
    #[arg(long, default_value_t = 1024)]
    readout_shots: u64,
    #[arg(long, default_value_t = 100)]
    kmax: usize,
    /// Prepend the node-pair entanglement circuit (unary-qubit method).
    #[arg(long)]
    entangle: bool,
    #[arg(long, value_enum, default_value_t = Init::Auto)]
    init: Init,
    /// Half-width of the uniform perturbation of the starting angles.
    #[arg(long, default_value_t = 0.05)]
    jitter: f64,
    /// Rescaling factor λ in K = λ·Σ|w|.
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
}

impl EvalArgs {
    fn config(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            k_max: self.kmax,
            mode: self.shots.map_or(EvalMode::Exact, EvalMode::Shots),
            init: match self.init {
                Init::Auto => InitAngles::Auto,
                Init::Zeros => InitAngles::Zeros,
                Init::HalfPi => InitAngles::HalfPi,
            },
            entangle: self.entangle,
            readout_shots: self.readout_shots,
            seed,
            init_jitter: self.jitter,
            lambda: self.lambda,
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = SolveMethod::Uq)]
    method: SolveMethod,
    #[command(flatten)]
    eval: EvalArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// QAOA depth; ⌈n/2⌉ when omitted.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, value_enum, default_value_t = QaoaOptimizer::Simplex)]
    optimizer: QaoaOptimizer,
    /// Require the brute-force ratio and index; fail if the instance is
    /// beyond the enumeration guard.
    #[arg(long)]
    exact_metrics: bool,
    /// Largest node count enumerated for metrics.
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
    /// Also write the training trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

fn parse_list(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|e| format!("{s:?}: {e}"))
}

#[derive(Args)]
struct QaoaArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated cost angles γ_1..γ_p.
    #[arg(long, value_delimiter = ',', value_parser = parse_list, required = true)]
    gammas: Vec<f64>,
    /// Comma-separated mixer angles β_1..β_p.
    #[arg(long, value_delimiter = ',', value_parser = parse_list, required = true)]
    betas: Vec<f64>,
    /// Estimate the energy from shots instead of exactly.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BenchArgs {
    /// Campaign spec as JSON; overrides every other campaign flag.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "3,5,8")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    instances: usize,
    #[arg(long, value_parser = parse_range, default_value = "1:10")]
    range: Range,
    #[arg(long)]
    signed: bool,
    /// Draw Ising instances with unary terms instead of MaxCut graphs.
    #[arg(long)]
    ising: bool,
    /// Comma-separated subset of uqmaxcut, uqising, qaoa_ngd, qaoa_simplex.
    #[arg(long, value_delimiter = ',', default_value = "uqmaxcut")]
    methods: Vec<String>,
    #[command(flatten)]
    eval: EvalArgs,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record wall time per solve; makes the results non-reproducible.
    #[arg(long)]
    timing: bool,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    jobs: Option<usize>,
    /// Directory for results.csv, manifest.json, instances/ and traces/.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl BenchArgs {
    fn spec(&self) -> uqcut::Result<BenchSpec> {
        if let Some(path) = &self.spec {
            return Ok(serde_json::from_str(&fs::read_to_string(path)?)?);
        }
        Ok(BenchSpec {
            sizes: self.sizes.clone(),
            instances_per_size: self.instances,
            weight_low: self.range.lo,
            weight_high: self.range.hi,
            signed: self.signed,
            problem: if self.ising { ProblemKind::Ising } else { ProblemKind::MaxCut },
            methods: self
                .methods
                .iter()
                .map(|m| BenchMethod::parse(m.trim()))
                .collect::<uqcut::Result<_>>()?,
            optimizer: self.eval.config(0),
            qaoa_depth: self.p,
            nelder_mead: NelderMeadConfig::default(),
            master_seed: self.seed,
            timing: self.timing,
        })
    }
}

#[derive(Args)]
struct KsweepArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    instances: usize,
    #[arg(long)]
    signed: bool,
    /// Comma-separated λ values; 0.1..1.0 plus 2/π when omitted.
    #[arg(long, value_delimiter = ',', value_parser = parse_list)]
    lambdas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write mean transformed-cost curves per λ as CSV.
    #[arg(long)]
    curves: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ResourceKind {
    Uqising,
    Qaoa,
}

#[derive(Args)]
struct ResourcesArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = ResourceKind::Uqising)]
    method: ResourceKind,
    /// QAOA depth; ⌈n/2⌉ when omitted.
    #[arg(long)]
    p: Option<usize>,
    /// Add a census of the gates actually built (unary-qubit method).
    #[arg(long)]
    census: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    /// Block encoding U(C, K) on cost plus working qubits.
    Block,
    /// Ancilla-controlled block encoding.
    Controlled,
    /// Product of RY rotations.
    Ansatz,
    /// Node-pair entanglement circuit.
    Entangle,
    /// Full Hadamard-test circuit.
    Workflow,
    /// QAOA state preparation.
    Qaoa,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    which: Which,
    /// Comma-separated ansatz angles; zeros when omitted.
    #[arg(long, value_delimiter = ',', value_parser = parse_list)]
    thetas: Option<Vec<f64>>,
    #[arg(long)]
    entangle: bool,
    #[arg(long, value_delimiter = ',', value_parser = parse_list)]
    gammas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_list)]
    betas: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    /// Remove adjacent CNOT pairs that cancel.
    #[arg(long)]
    cancel: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Serialize)]
struct OracleOutput {
    n: usize,
    c_min: f64,
    c_max: f64,
    argmins: Vec<CutAssignment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagonal: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct QaoaOutput {
    p: usize,
    gammas: Vec<f64>,
    betas: Vec<f64>,
    energy: f64,
    mode: EvalMode,
    /// Exact gradient, `∂/∂γ` entries first.
    gradient: Vec<f64>,
}

#[derive(Serialize)]
struct ResourcesOutput {
    #[serde(flatten)]
    report: ResourceReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    census: Option<BuiltCensus>,
}

fn read_instance(path: &Path) -> uqcut::Result<IsingInstance> {
    IsingInstance::read_json(path)
}

fn gen(a: GenArgs) -> uqcut::Result<()> {
    let inst = random_instance(a.n, a.range.lo, a.range.hi, a.signed, a.maxcut, a.seed)?;
    eprintln!("generated n = {} with {} edges", inst.n(), inst.edge_count());
    a.output.write((inst.to_json()? + "\n").as_bytes())
}

fn oracle(a: OracleArgs) -> uqcut::Result<()> {
    let inst = read_instance(&a.input)?;
    let report = brute_force_with_limit(&inst, a.max_nodes)?;
    eprintln!(
        "c_min {} c_max {} ({} ground states)",
        report.c_min,
        report.c_max,
        report.argmins.len()
    );
    a.output.json(&OracleOutput {
        n: inst.n(),
        c_min: report.c_min,
        c_max: report.c_max,
        argmins: report.argmins,
        diagonal: if a.diagonal { report.diagonal } else { None },
    })
}

fn solve(a: SolveArgs) -> uqcut::Result<()> {
    let inst = read_instance(&a.input)?;
    if a.exact_metrics && inst.n() > a.max_nodes {
        return Err(Error::Capacity {
            what: "node count for exact metrics",
            requested: inst.n(),
            limit: a.max_nodes,
        });
    }
    let cfg = a.eval.config(a.seed);
    let mut sol: Solution = match a.method {
        SolveMethod::Uq => solve_uq(&inst, &cfg)?,
        SolveMethod::Qaoa => {
            solve_qaoa(&inst, a.p, a.optimizer.into(), &cfg, &NelderMeadConfig::default())?
        }
    };
    if inst.n() <= a.max_nodes {
        match sol.attach_metrics(&inst) {
            Ok(()) => {}
            Err(e @ Error::DegenerateInstance(_)) if !a.exact_metrics => {
                eprintln!("metrics skipped: {e}");
            }
            Err(e) => return Err(e),
        }
    } else {
        eprintln!("metrics skipped: n = {} exceeds the enumeration guard", inst.n());
    }
    if let Some(path) = &a.trace {
        sol.trace.write_csv(fs::File::create(path)?)?;
    }
    eprintln!(
        "{}: bits {} energy {}{}",
        sol.method,
        sol.bits,
        sol.energy,
        sol.ratio.map_or(String::new(), |r| format!(" r {r:.6}"))
    );
    a.output.json(&sol)
}

fn qaoa(a: QaoaArgs) -> uqcut::Result<()> {
    let inst = read_instance(&a.input)?;
    if a.gammas.len() != a.betas.len() {
        return Err(Error::InvalidArgument(format!(
            "{} gammas but {} betas",
            a.gammas.len(),
            a.betas.len()
        )));
    }
    let mode = a.shots.map_or(EvalMode::Exact, EvalMode::Shots);
    let energy = qaoa_energy_with_mode(&inst, &a.gammas, &a.betas, mode, a.seed)?;
    let gradient = qaoa_gradient(&inst, &a.gammas, &a.betas)?;
    eprintln!("p = {} energy {energy}", a.gammas.len());
    a.output.json(&QaoaOutput {
        p: a.gammas.len(),
        gammas: a.gammas,
        betas: a.betas,
        energy,
        mode,
        gradient,
    })
}

fn bench(a: BenchArgs) -> uqcut::Result<()> {
    let spec = a.spec()?;
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let records = pool.install(|| run_campaign(&spec))?;
    for s in summarize(&records)? {
        eprintln!(
            "n={:<3} {:<13} count {:>3}  mean r {:.4} ± {:.4}  index {:.2}",
            s.n,
            s.method.name(),
            s.count,
            s.mean_r,
            s.std_r,
            s.index_fraction
        );
    }
    if let Some(dir) = &a.out {
        let files = persist_campaign(&spec, &records, dir)?;
        eprintln!("wrote {}", files.results.display());
    }
    let mut csv = Vec::new();
    write_results_csv(&records, &mut csv)?;
    io::stdout().lock().write_all(&csv)?;
    Ok(())
}

fn ksweep(a: KsweepArgs) -> uqcut::Result<()> {
    let lambdas = a.lambdas.clone().unwrap_or_else(default_lambdas);
    let table = lambda_sweep(a.n, a.instances, &lambdas, a.signed, a.seed)?;
    for level in &table.levels {
        eprintln!(
            "lambda {:.6}{} mean agreement {:.4}",
            level.lambda,
            if level.reference { " (2/pi)" } else { "" },
            level.mean_agreement
        );
    }
    if let Some(path) = &a.curves {
        write_curves_csv(&table, fs::File::create(path)?)?;
    }
    let mut csv = Vec::new();
    write_sweep_csv(&table, &mut csv)?;
    a.output.write(&csv)
}

fn resources(a: ResourcesArgs) -> uqcut::Result<()> {
    let inst = read_instance(&a.input)?;
    let method = match a.method {
        ResourceKind::Uqising => ResourceMethod::UqIsing,
        ResourceKind::Qaoa => ResourceMethod::Qaoa {
            p: a.p.unwrap_or_else(|| default_depth(inst.n())),
        },
    };
    let report = count_resources(&inst, method);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let census = match (a.census, a.method) {
        (true, ResourceKind::Uqising) => Some(built_uq_census(&rescale_k(&inst, DEFAULT_LAMBDA)?)),
        (true, ResourceKind::Qaoa) => {
            return Err(Error::InvalidArgument("--census applies to uqising only".into()))
        }
        (false, _) => None,
    };
    Output { out: None }.json(&ResourcesOutput { report, census })
}

fn export_circuit(a: ExportArgs) -> uqcut::Result<()> {
    let inst = read_instance(&a.input)?;
    let n = inst.n();
    let thetas = |arity: usize| -> uqcut::Result<Vec<f64>> {
        let t = a.thetas.clone().unwrap_or_else(|| vec![0.0; arity]);
        if t.len() != arity {
            return Err(Error::InvalidArgument(format!("expected {arity} angles, got {}", t.len())));
        }
        Ok(t)
    };
    let circuit: Circuit = match a.which {
        Which::Block => build_block_encoding(&rescale_k(&inst, a.lambda)?),
        Which::Controlled => build_controlled_block_encoding(&rescale_k(&inst, a.lambda)?),
        Which::Ansatz => build_ansatz(&thetas(n)?),
        Which::Entangle => build_entanglement(n)?,
        Which::Workflow => {
            let arity = uqcut::circuits::ansatz_arity(n, a.entangle);
            build_workflow(&rescale_k(&inst, a.lambda)?, &thetas(arity)?, a.entangle)?
        }
        Which::Qaoa => {
            let p = default_depth(n);
            let g = a.gammas.clone().unwrap_or_else(|| vec![0.0; p]);
            let b = a.betas.clone().unwrap_or_else(|| vec![0.0; g.len()]);
            build_qaoa(&inst, &g, &b)?
        }
    };
    let circuit = if a.cancel { cancel_adjacent_cnots(&circuit) } else { circuit };
    let census = circuit.census();
    eprintln!(
        "{} qubits, {} gates ({} cnot, {} rotations)",
        circuit.n_qubits(),
        circuit.len(),
        census.cnot,
        census.single_qubit_rotations()
    );
    a.output.write((circuit.to_json()? + "\n").as_bytes())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Csv(_) => 1,
        Error::Json(j) if j.is_io() => 1,
        Error::Capacity { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Oracle(a) => oracle(a),
        Command::Solve(a) => solve(a),
        Command::Qaoa(a) => qaoa(a),
        Command::Bench(a) => bench(a),
        Command::Ksweep(a) => ksweep(a),
        Command::Resources(a) => resources(a),
        Command::ExportCircuit(a) => export_circuit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
