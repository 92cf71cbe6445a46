use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use shiftsdp::bench::{run_table, table_to_csv, table_to_json, Family, MethodSpec, MultistartConfig, TableConfig};
use shiftsdp::extract::ExtractOptions;
use shiftsdp::ipm::{solve, SolverConfig};
use shiftsdp::pipeline::{minimal_order, prepare, report, PipelineOptions, RelaxationSpec};
use shiftsdp::poly::ProblemFile;
use shiftsdp::sdp::{export_sdpa, import_solution_vector, Status};
use shiftsdp::structure::StructureMode;

#[derive(Parser)]
#[command(name = "shiftsdp", version, about = "Moment relaxations with shift-operator strengthening")]
struct Cli {
    /// Worker threads for the parallel kernels (1 = fully sequential).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble a relaxation and print its size.
    Build(RelaxArgs),
    /// Solve a relaxation and print the bound, status and certificate.
    Solve(SolveArgs),
    /// Write the realized relaxation in SDPA sparse format.
    Export(ExportArgs),
    /// Certify atoms from an externally computed solution vector.
    Extract(ExtractArgs),
    /// Run a benchmark table on generated instances.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct RelaxArgs {
    /// Problem file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Relaxation order; defaults to the minimal admissible order.
    #[arg(long)]
    r: Option<usize>,
    /// Shift-block order; omitted means plain LAS.
    #[arg(long)]
    s: Option<usize>,
    /// Structure exploitation; defaults to the problem file's setting or dense.
    #[arg(long)]
    structure: Option<StructureMode>,
    /// Real cs only: order-s shift blocks per clique.
    #[arg(long)]
    clique_local: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverChoice {
    Embedded,
    Export,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    relax: RelaxArgs,
    #[arg(long, value_enum, default_value = "embedded")]
    solver: SolverChoice,
    /// Duality-gap and feasibility tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Seed of the atom-extraction combination.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Numeric rank threshold for extraction.
    #[arg(long, default_value_t = shiftsdp::extract::DEFAULT_RANK_TOL)]
    rank_tol: f64,
    /// Skip atom extraction and certification.
    #[arg(long)]
    no_extract: bool,
    /// Report file (JSON); stdout when absent. With `--solver export`, the .dat-s path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-iteration solver log on stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    relax: RelaxArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    relax: RelaxArgs,
    /// Whitespace-separated decision vector of the exported problem.
    #[arg(long)]
    solution: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = shiftsdp::extract::DEFAULT_RANK_TOL)]
    rank_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// binary-quadratic, unitnorm-complex-quadratic, complex-quartic-sphere, multi-sphere or mordell.
    #[arg(long)]
    family: Family,
    /// Comma-separated sizes (n, or l for multi-sphere).
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Comma-separated methods such as las:1,slas:1:1,cs-las:2.
    #[arg(long, value_delimiter = ',', required = true)]
    methods: Vec<MethodSpec>,
    /// Instances per size, seeded seed, seed+1, ...
    #[arg(long, default_value_t = 3)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Also compute oracle values (enumeration or multistart).
    #[arg(long)]
    oracle: bool,
    /// Output file; `.json` selects JSON, anything else CSV. Stdout (CSV) when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Input(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<ExitCode, Failure>;

fn load(args: &RelaxArgs) -> Result<(ProblemFile, RelaxationSpec), Failure> {
    let file = ProblemFile::read(&args.input)
        .map_err(|e| Failure::Input(format!("{}: {e}", args.input.display())))?;
    let r = match args.r {
        Some(0) => return Err(Failure::Input("--r must be at least 1".into())),
        Some(r) => r,
        None => minimal_order(&file.problem)?,
    };
    let structure = args.structure.or(file.structure).unwrap_or(StructureMode::Dense);
    if args.clique_local && file.problem.is_complex() {
        return Err(Failure::Input(
            "--clique-local applies to real problems; complex cs shift blocks are always per clique".into(),
        ));
    }
    if args.clique_local && !structure.uses_cliques() {
        return Err(Failure::Input("--clique-local needs --structure cs or cs+sign".into()));
    }
    let spec = RelaxationSpec {
        r,
        s: args.s,
        structure,
        cliques: file.cliques.clone(),
        clique_local: args.clique_local,
    };
    Ok((file, spec))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn build(args: &RelaxArgs) -> Outcome {
    let (file, spec) = load(args)?;
    let prepared = prepare(&file.problem, &spec)?;
    let stats = prepared.relaxation.stats();
    let doc = json!({
        "relaxation": stats,
        "variables": prepared.lmi.m,
        "lmi_blocks": prepared.lmi.block_sizes(),
        "lmi_equalities": prepared.lmi.equalities.len(),
    });
    emit(&serde_json::to_string_pretty(&doc)?, None)?;
    Ok(ExitCode::SUCCESS)
}

fn solve_cmd(args: &SolveArgs, parallel: bool) -> Outcome {
    let (file, spec) = load(&args.relax)?;
    let prepared = prepare(&file.problem, &spec)?;
    if let SolverChoice::Export = args.solver {
        let out = args.out.as_ref().ok_or_else(|| Failure::Input("--solver export needs --out".into()))?;
        export_sdpa(&prepared.lmi, out)?;
        return Ok(ExitCode::SUCCESS);
    }
    let opts = PipelineOptions {
        solver: SolverConfig {
            tol: args.tol,
            feastol: args.tol,
            max_iter: args.max_iter,
            verbose: args.verbose,
            parallel,
            ..SolverConfig::default()
        },
        extract: (!args.no_extract).then_some(ExtractOptions { rank_tol: args.rank_tol, seed: args.seed }),
        ..PipelineOptions::default()
    };
    let sol = solve(&prepared.lmi, &opts.solver)?;
    let rep = report(&file.problem, &spec, &prepared, &sol, &opts);
    emit(&serde_json::to_string_pretty(&rep)?, args.out.as_deref())?;
    Ok(if rep.status == Status::Optimal { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn export_cmd(args: &ExportArgs) -> Outcome {
    let (file, spec) = load(&args.relax)?;
    let prepared = prepare(&file.problem, &spec)?;
    export_sdpa(&prepared.lmi, &args.out)?;
    eprintln!(
        "wrote {} ({} variables, blocks {:?})",
        args.out.display(),
        prepared.lmi.m,
        prepared.lmi.block_sizes()
    );
    Ok(ExitCode::SUCCESS)
}

fn extract_cmd(args: &ExtractArgs) -> Outcome {
    let (file, spec) = load(&args.relax)?;
    let prepared = prepare(&file.problem, &spec)?;
    let sol = import_solution_vector(&args.solution, &prepared.lmi, args.tol)?;
    let opts = PipelineOptions {
        extract: Some(ExtractOptions { rank_tol: args.rank_tol, seed: args.seed }),
        ..PipelineOptions::default()
    };
    let rep = report(&file.problem, &spec, &prepared, &sol, &opts);
    emit(&serde_json::to_string_pretty(&rep)?, args.out.as_deref())?;
    Ok(if rep.status == Status::Feasible { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn bench_cmd(args: &BenchArgs, parallel: bool) -> Outcome {
    let seeds: Vec<u64> = (0..args.trials).map(|k| args.seed + k).collect();
    let mut cfg = TableConfig::default();
    cfg.pipeline.solver.tol = args.tol;
    cfg.pipeline.solver.feastol = args.tol;
    cfg.pipeline.solver.parallel = parallel;
    cfg.oracle = args.oracle.then(|| MultistartConfig { seed: args.seed, parallel, ..Default::default() });
    let rows = run_table(args.family, &args.sizes, &seeds, &args.methods, &cfg)?;
    let json_out = args.out.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
    let text = if json_out { table_to_json(&rows)? } else { table_to_csv(&rows) };
    emit(text.trim_end(), args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let parallel = cli.threads != Some(1);
    let outcome = match &cli.command {
        Command::Build(a) => build(a),
        Command::Solve(a) => solve_cmd(a, parallel),
        Command::Export(a) => export_cmd(a),
        Command::Extract(a) => extract_cmd(a),
        Command::Bench(a) => bench_cmd(a, parallel),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
