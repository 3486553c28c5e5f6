use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nhrmt::nlsm::IntegralKind;
use nhrmt::SymmetryClass;
use nhrmt_cli::{
    compare_files, run_experiment, run_nlsm_eval, run_sample, Experiment, ExperimentConfig, GridSpec, PartialConfig,
    Result, Scale,
};

#[derive(Parser)]
#[command(name = "nhrmt", version, about = "Non-Hermitian random-matrix experiments: Monte Carlo, quadrature, comparisons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of sampled matrices.
    Sample(CommonArgs),
    /// Radial density against the circular law.
    Girko(RunArgs),
    /// Radial density near the spectral edge against the edge expansion.
    DosEdge(RunArgs),
    /// Bulk two-point function.
    R2Bulk(RunArgs),
    /// One-point characteristic-polynomial moments against the replica integral.
    Charpoly1(RunArgs),
    /// Two-point characteristic-polynomial moments against the replica integral.
    Charpoly2(RunArgs),
    /// Small-matrix spacing distribution against the surmise.
    Spacing(RunArgs),
    /// Replica integrals on a grid.
    NlsmEval(NlsmArgs),
    /// z-scores of an estimate CSV against a prediction CSV.
    Compare(CompareArgs),
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Symmetry class: A, AIdagger or AIIdagger.
    #[arg(long)]
    class: Option<String>,
    /// N (the matrix is N×N, or 2N×2N for AIIdagger).
    #[arg(long)]
    dim: Option<usize>,
    /// Variance g of the matrix entries.
    #[arg(long)]
    width: Option<f64>,
    /// Realizations.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Replica indices, comma separated.
    #[arg(long, value_delimiter = ',')]
    replicas: Option<Vec<u32>>,
    /// Grid as min:max:count (points for charpoly, bins otherwise).
    #[arg(long)]
    grid: Option<String>,
    /// TOML config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "desk")]
    preset: String,
    /// Print the resolved config as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    OnePoint,
    TwoPoint,
}

#[derive(Args)]
struct NlsmArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    replicas: Vec<u32>,
    #[arg(long, default_value = "0:3:20")]
    grid: String,
    #[arg(long, value_enum, default_value = "one-point")]
    kind: Kind,
}

#[derive(Args)]
struct CompareArgs {
    estimates: PathBuf,
    predictions: PathBuf,
    /// |z| above which a bin counts as a disagreement.
    #[arg(long, default_value_t = 4.0)]
    tolerance: f64,
    /// Also write the per-bin table here.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn class_arg(s: &Option<String>) -> Result<Option<SymmetryClass>> {
    Ok(s.as_deref().map(str::parse).transpose()?)
}

fn init_threads(threads: usize) {
    // only fails if a pool already exists, which cannot happen here
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
}

fn experiment(e: Experiment, args: &RunArgs) -> Result<ExitCode> {
    let c = &args.common;
    let file = match &args.config {
        Some(p) => PartialConfig::load(p)?,
        None => PartialConfig::default(),
    };
    let flags = PartialConfig {
        experiment: None,
        class: class_arg(&c.class)?,
        n_half: c.dim,
        g: c.width,
        n_list: args.replicas.clone(),
        n_samples: c.samples,
        seed: c.seed,
        grid: args.grid.as_deref().map(str::parse).transpose()?,
        output_dir: c.out.clone(),
    };
    let config = ExperimentConfig::resolve(e, args.preset.parse::<Scale>()?, file, flags)?;
    if args.print_config {
        print!("{}", config.to_toml()?);
        return Ok(ExitCode::SUCCESS);
    }
    init_threads(c.threads);
    let m = run_experiment(&config)?;
    for o in &m.outputs {
        println!("{} {}", o.sha256, config.output_dir.join(&o.file).display());
    }
    for f in &m.failures {
        eprintln!("warning: {f}");
    }
    if let Some(cmp) = &m.comparison {
        println!(
            "{}: {} of {} bins with |z| > {} ({} skipped)",
            if cmp.passed { "PASS" } else { "FAIL" },
            cmp.exceeding,
            cmp.compared,
            cmp.tolerance,
            cmp.skipped
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sample(c) => {
            init_threads(c.threads);
            let class = class_arg(&c.class)?.unwrap_or(SymmetryClass::A);
            let out = c.out.unwrap_or_else(|| PathBuf::from("out/sample"));
            let m = run_sample(class, c.dim.unwrap_or(100), c.width.unwrap_or(1.0), c.samples.unwrap_or(10), c.seed.unwrap_or(1), &out)?;
            for o in &m.outputs {
                println!("{} {}", o.sha256, out.join(&o.file).display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Girko(a) => experiment(Experiment::Girko, &a),
        Command::DosEdge(a) => experiment(Experiment::DosEdge, &a),
        Command::R2Bulk(a) => experiment(Experiment::R2Bulk, &a),
        Command::Charpoly1(a) => experiment(Experiment::Charpoly1, &a),
        Command::Charpoly2(a) => experiment(Experiment::Charpoly2, &a),
        Command::Spacing(a) => experiment(Experiment::SpacingSurmise, &a),
        Command::NlsmEval(a) => {
            let c = &a.common;
            init_threads(c.threads);
            let class = class_arg(&c.class)?.unwrap_or(SymmetryClass::AIDagger);
            let kind = match a.kind {
                Kind::OnePoint => IntegralKind::OnePoint,
                Kind::TwoPoint => IntegralKind::TwoPoint,
            };
            let grid: GridSpec = a.grid.parse()?;
            let out = c.out.clone().unwrap_or_else(|| PathBuf::from("out/nlsm"));
            let m = run_nlsm_eval(class, kind, c.dim.unwrap_or(5), c.width.unwrap_or(2.0), &a.replicas, &grid, &out)?;
            for o in &m.outputs {
                println!("{} {}", o.sha256, out.join(&o.file).display());
            }
            for f in &m.failures {
                eprintln!("warning: {f}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare(a) => {
            let report = compare_files(&a.estimates, &a.predictions, a.tolerance)?;
            if let Some(p) = &a.report {
                std::fs::write(p, report.to_table().to_csv())?;
            }
            println!("{}", report.summary());
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
