use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qde_core::benchmarks::{list_functions, Group};
use qde_harness::analysis::{write_analyses, DEFAULT_SIGNIFICANCE};
use qde_harness::config::ListOrText;
use qde_harness::runner::{read_trace, run_cell, trace_ref};
use qde_harness::{
    analyze, export_results, load_runs, parse_config, run_matrix, AlgorithmId, ConfigLayer, ExperimentPlan,
    HarnessError, Hypothesis,
};

#[derive(Parser)]
#[command(name = "qde", version, about = "Quaternion-valued differential evolution experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the experiment matrix and export the results.
    Run(PlanArgs),
    /// Run Friedman/Nemenyi analyses over exported results.
    Analyze {
        #[command(flatten)]
        plan: PlanArgs,
        /// all, per-group, by-mutation, by-initialization, convergence or every.
        #[arg(long, default_value = "every")]
        hypothesis: String,
        /// Nemenyi significance level (0.05 or 0.10).
        #[arg(long, default_value_t = DEFAULT_SIGNIFICANCE)]
        significance: f64,
    },
    /// List benchmark functions or algorithm ids.
    List {
        what: ListKind,
        /// Restrict functions to one group.
        #[arg(long)]
        group: Option<Group>,
    },
    /// Print one run's trace, computing it when no trace file exists.
    Show {
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long)]
        algorithm: String,
        #[arg(long)]
        function: u32,
        #[arg(long, default_value_t = 0)]
        replicate: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ListKind {
    Functions,
    Algorithms,
}

#[derive(Args, Default)]
struct PlanArgs {
    /// TOML file layered between the defaults and these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    master_seed: Option<u64>,
    /// Population size.
    #[arg(long)]
    np: Option<usize>,
    /// Crossover rate.
    #[arg(long)]
    cr: Option<f64>,
    /// ESD scale factor and the baseline's F.
    #[arg(long)]
    alpha: Option<f64>,
    /// Magnitude scale of the polar mutations.
    #[arg(long)]
    polar_alpha: Option<f64>,
    /// Angle scale of the polar mutations.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    generations: Option<usize>,
    /// Problem dimension: 3 or a multiple of 4.
    #[arg(long)]
    dim: Option<usize>,
    /// Function ids, ranges (1-5), group names, `smoke` or `all`.
    #[arg(long)]
    functions: Option<String>,
    /// Algorithm ids (Polar-PM1, Real-DE), bare mutations (PM1), bare
    /// initializations (E4) or `all`.
    #[arg(long)]
    algorithms: Option<String>,
    /// Replicates per cell.
    #[arg(long)]
    seeds: Option<usize>,
    /// smoke or full.
    #[arg(long)]
    tier: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    jobs: Option<usize>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// shifted or canonical optimum placement.
    #[arg(long)]
    placement: Option<String>,
    /// clamp or reflect.
    #[arg(long)]
    bound_policy: Option<String>,
    /// Tolerance for the convergence generation.
    #[arg(long)]
    tolerance: Option<f64>,
}

impl PlanArgs {
    fn resolve(self) -> Result<ExperimentPlan, HarnessError> {
        let flags = ConfigLayer {
            master_seed: self.master_seed,
            seeds: self.seeds,
            dimension: self.dim,
            generations: self.generations,
            np: self.np,
            cr: self.cr,
            alpha: self.alpha,
            polar_alpha: self.polar_alpha,
            beta: self.beta,
            placement: self.placement,
            bound_policy: self.bound_policy,
            tolerance: self.tolerance,
            functions: self.functions.map(ListOrText::Text),
            algorithms: self.algorithms.map(ListOrText::Text),
            tier: self.tier,
            out: self.out,
            jobs: self.jobs,
            format: self.format,
        };
        parse_config(self.config.as_deref(), flags)
    }
}

fn run(plan: PlanArgs) -> Result<ExitCode, HarnessError> {
    let plan = plan.resolve()?;
    eprintln!(
        "running {} cells ({} algorithms × {} functions × {} replicates) into {}",
        plan.cell_count(),
        plan.algorithms.len(),
        plan.functions.len(),
        plan.replicates,
        plan.output_dir.display()
    );
    let outcome = run_matrix(&plan)?;
    let written = export_results(&plan, &outcome.rows)?;
    println!(
        "executed {}, reused {}, failed {}",
        outcome.executed,
        outcome.reused,
        outcome.failures.len()
    );
    for p in written {
        println!("wrote {}", p.display());
    }
    if outcome.failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for f in &outcome.failures {
            eprintln!("failed {}/f{}/r{}: {}", f.algorithm, f.function_id, f.replicate, f.error);
        }
        Ok(ExitCode::from(1))
    }
}

fn analyze_cmd(plan: PlanArgs, hypothesis: &str, significance: f64) -> Result<ExitCode, HarnessError> {
    let plan = plan.resolve()?;
    let hypotheses = if hypothesis == "every" { Hypothesis::ALL.to_vec() } else { vec![hypothesis.parse()?] };
    let rows = load_runs(&plan.output_dir)?;
    let dir = plan.output_dir.join("analysis");
    for h in hypotheses {
        let analyses = analyze(&plan, &rows, h, significance)?;
        for a in &analyses {
            println!("{}", a.document());
        }
        for p in write_analyses(&dir, &analyses)? {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn show(plan: PlanArgs, algorithm: &str, function: u32, replicate: usize) -> Result<ExitCode, HarnessError> {
    let plan = plan.resolve()?;
    let algorithm: AlgorithmId = algorithm.parse()?;
    let path = plan.output_dir.join(trace_ref(&algorithm, function, plan.dimension, replicate));
    let trace = if path.exists() {
        let file = read_trace(&path)?;
        for (k, v) in &file.header {
            println!("# {k} = {v}");
        }
        file.trace
    } else {
        eprintln!("no trace at {}; computing in memory", path.display());
        let (row, trace) = run_cell(&plan, &algorithm, function, replicate)?;
        println!("# algorithm = {}", row.algorithm);
        println!("# function = {}", row.function_id);
        println!("# seed = {}", row.seed);
        trace
    };
    println!("generation,best_fitness");
    for (g, v) in trace.iter().enumerate() {
        println!("{g},{v:e}");
    }
    Ok(ExitCode::SUCCESS)
}

fn list(what: ListKind, group: Option<Group>) {
    match what {
        ListKind::Functions => {
            for f in list_functions(group) {
                println!("{:>2}  {:<36}{}", f.id, f.name, f.group);
            }
        }
        ListKind::Algorithms => {
            for a in AlgorithmId::all() {
                println!("{a}");
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(plan) => run(plan),
        Command::Analyze { plan, hypothesis, significance } => analyze_cmd(plan, &hypothesis, significance),
        Command::List { what, group } => {
            list(what, group);
            Ok(ExitCode::SUCCESS)
        }
        Command::Show { plan, algorithm, function, replicate } => show(plan, &algorithm, function, replicate),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(e.exit_code() as u8)
    })
}
