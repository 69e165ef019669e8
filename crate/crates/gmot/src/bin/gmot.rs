//! Command-line front end: dataset generation, pairwise graph distances,
//! evaluation, and transport-plan export. All heavy lifting lives in the
//! library's `run` module; this binary only parses flags, merges them with
//! an optional JSON config file (flag > GMOT_SEED > config > default), and
//! prints short summaries.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gmot::embed::{EmbeddingConfig, Method};
use gmot::eval::EvalMethod;
use gmot::run::{
    cmd_distance, cmd_eval, cmd_generate, cmd_plan_export, resolve_seed, DistanceSpec, EvalSpec,
    GenerateSpec, PlanExportSpec, RunConfig,
};
use gmot::{Error, Result};

#[derive(Parser)]
#[command(
    name = "gmot",
    version,
    about = "Graph distances from optimal transport between Gaussian mixtures of node embeddings"
)]
struct Cli {
    /// JSON config file supplying defaults for all flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled synthetic dataset of random graphs.
    Generate(GenerateArgs),
    /// Compute the pairwise distance matrix over a set of graphs.
    Distance(DistanceArgs),
    /// Evaluate a stored distance matrix against class labels.
    Eval(EvalArgs),
    /// Export the node transport plan between two graphs.
    PlanExport(PlanExportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Output directory for the edge lists and labels.json.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated graph models (ER,WS,BA,CF).
    #[arg(long)]
    models: Option<String>,
    /// Graphs per model.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    expected_degree: Option<f64>,
    #[arg(long)]
    min_nodes: Option<usize>,
    #[arg(long)]
    max_nodes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

/// Flags shared by the distance-computing subcommands.
#[derive(Args)]
struct EmbedFlags {
    /// Distance method: ccb, cnp, degree or ev.
    #[arg(long)]
    method: Option<String>,
    /// Component distance variant: full, scaled or tied.
    #[arg(long)]
    variant: Option<String>,
    /// Colorings sampled per graph.
    #[arg(long)]
    samples: Option<usize>,
    /// Colors per coloring.
    #[arg(long)]
    colors: Option<usize>,
    /// Propagation depth.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl EmbedFlags {
    /// Merges flags over the config: flag > GMOT_SEED (seed only) > config.
    fn resolve(&self, config: &RunConfig) -> Result<(EvalMethod, EmbeddingConfig, u64)> {
        let method_name = self.method.clone().unwrap_or_else(|| config.method.clone());
        let variant = match &self.variant {
            Some(text) => text.parse()?,
            None => config.variant,
        };
        let method = EvalMethod::from_flags(&method_name, variant)?;
        let seed = resolve_seed(self.seed, config.seed)?;
        let embed_method = match method {
            EvalMethod::Mixture { method, .. } => method,
            _ => Method::Ccb,
        };
        let embed = EmbeddingConfig::new(
            embed_method,
            self.samples.unwrap_or(config.samples),
            self.colors.unwrap_or(config.colors),
            self.depth.unwrap_or(config.depth),
            seed,
        )?;
        Ok((method, embed, seed))
    }
}

#[derive(Args)]
struct DistanceArgs {
    /// Graph files (edge lists or dense CSV matrices).
    inputs: Vec<PathBuf>,
    /// Labels manifest naming the graphs instead of positional inputs.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Distance matrix CSV path; the JSON sidecar goes next to it.
    #[arg(long)]
    out: PathBuf,
    /// Also write one transport-plan CSV per pair.
    #[arg(long)]
    plans: bool,
    #[command(flatten)]
    embed: EmbedFlags,
}

#[derive(Args)]
struct EvalArgs {
    /// Distance matrix CSV produced by `distance`.
    #[arg(long)]
    matrix: PathBuf,
    /// Sidecar JSON; defaults to the matrix path with a .json extension.
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Labels manifest overriding the sidecar labels.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Report JSON path; the leaf order goes next to it as .order.txt.
    #[arg(long)]
    out: PathBuf,
    /// Neighbors for the weighted kNN classifier.
    #[arg(long)]
    knn_k: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    test_frac: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PlanExportArgs {
    graph_a: PathBuf,
    graph_b: PathBuf,
    /// Plan CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Also dump both fitted mixtures next to the plan.
    #[arg(long)]
    dump_mixtures: bool,
    #[command(flatten)]
    embed: EmbedFlags,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not configure {threads} threads: {e}");
            return ExitCode::FAILURE;
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    match &cli.command {
        Command::Generate(args) => {
            let models = match &args.models {
                Some(text) => text
                    .split(',')
                    .map(|m| m.trim().parse())
                    .collect::<Result<Vec<_>>>()?,
                None => config.models.clone(),
            };
            let out = cmd_generate(&GenerateSpec {
                out_dir: args.out.clone(),
                models,
                per_model: args.count.unwrap_or(config.graphs_per_model),
                expected_degree: args.expected_degree.unwrap_or(config.expected_degree),
                min_nodes: args.min_nodes.unwrap_or(config.min_nodes),
                max_nodes: args.max_nodes.unwrap_or(config.max_nodes),
                seed: resolve_seed(args.seed, config.seed)?,
            })?;
            println!(
                "wrote {} graphs and {} to {}",
                out.files.len(),
                out.manifest
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                args.out.display()
            );
        }
        Command::Distance(args) => {
            let (method, embed, _) = args.embed.resolve(&config)?;
            let out = cmd_distance(&DistanceSpec {
                inputs: args.inputs.clone(),
                manifest: args.manifest.clone(),
                method,
                embed,
                out: args.out.clone(),
                write_plans: args.plans,
            })?;
            println!(
                "{} graphs, {} pairs with {} (mean {:.2} ms/pair) -> {}",
                out.matrix.len(),
                out.matrix.meta.pair_ms.len(),
                out.matrix.meta.method,
                out.matrix.meta.mean_pair_ms,
                out.csv.display()
            );
            if !out.plans.is_empty() {
                println!("wrote {} transport plans", out.plans.len());
            }
        }
        Command::Eval(args) => {
            let seed = resolve_seed(args.seed, config.seed)?;
            let out = cmd_eval(&EvalSpec {
                matrix_csv: args.matrix.clone(),
                sidecar: args.sidecar.clone(),
                manifest: args.manifest.clone(),
                knn_k: args.knn_k.unwrap_or(config.knn_k),
                folds: args.folds.unwrap_or(config.folds),
                test_frac: args.test_frac.unwrap_or(config.test_frac),
                seed,
                out: args.out.clone(),
            })?;
            let r = &out.report;
            println!(
                "kNN accuracy {:.3} ± {:.3} (k={}, {} folds), silhouette {:.3} -> {}",
                r.knn_mean,
                r.knn_std,
                r.knn_k,
                r.folds,
                r.silhouette,
                out.report_path.display()
            );
        }
        Command::PlanExport(args) => {
            let (method, embed, _) = args.embed.resolve(&config)?;
            let EvalMethod::Mixture { method, variant } = method else {
                return Err(Error::Domain(
                    "plan export needs an embedding method (ccb or cnp)".into(),
                ));
            };
            let out = cmd_plan_export(&PlanExportSpec {
                graph_a: args.graph_a.clone(),
                graph_b: args.graph_b.clone(),
                method,
                variant,
                embed,
                out: args.out.clone(),
                dump_mixtures: args.dump_mixtures,
            })?;
            println!(
                "distance {:.6} (squared {:.6}) -> {}",
                out.distance,
                out.squared,
                out.plan_path.display()
            );
        }
    }
    Ok(())
}
