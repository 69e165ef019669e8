//! End-to-end commands behind the CLI binary: dataset generation,
//! pairwise-distance computation, evaluation, and transport-plan export.
//!
//! Every command is a plain function over a spec struct so that examples
//! and tests can drive the same code paths as the binary. Outputs are
//! tracked while a command runs; if it fails, files written so far are
//! removed, so a zero exit status means every output named in the result
//! exists and is complete.
//!
//! Reproducibility: one seed governs a whole run. Graph generation derives
//! per-graph seeds from it in a fixed order, and embeddings derive
//! per-sample substreams, so reruns yield byte-identical graphs, matrices
//! and plans. (Recorded wall-clock times in sidecars and reports are the
//! one exception — they reflect the machine, not the computation.)

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::{sample_embeddings, EmbeddingConfig, Method};
use crate::error::{Error, Result};
use crate::eval::{
    knn_cv, pairwise_distances, read_distance_csv, write_distance_csv, DistanceMatrix,
    DistanceMeta, DistanceSidecar, EvalMethod, EvalReport,
};
use crate::gmm::{fit_mixture, write_mixture_csv, DEFAULT_RIDGE};
use crate::graph::{generate, Graph};
use crate::ot::{mixture_w2, Variant};

/// Environment variable that overrides the config-file seed. An explicit
/// `--seed` flag still wins over it.
pub const SEED_ENV: &str = "GMOT_SEED";

/// One config file for every command. All fields have defaults matching
/// the standard protocol: 1000 samples, 10 colors, depth 5, kNN k=5 with
/// 20 folds at 20% test size, expected degree 6, models ER/WS/BA/CF with
/// 20 graphs each on 10–200 nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// `ccb`, `cnp`, `degree` or `ev`.
    pub method: String,
    pub variant: Variant,
    pub samples: usize,
    pub colors: usize,
    pub depth: usize,
    pub seed: u64,
    pub knn_k: usize,
    pub folds: usize,
    pub test_frac: f64,
    pub expected_degree: f64,
    pub models: Vec<crate::graph::Model>,
    pub graphs_per_model: usize,
    pub min_nodes: usize,
    pub max_nodes: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            method: "ccb".into(),
            variant: Variant::Tied,
            samples: 1000,
            colors: 10,
            depth: 5,
            seed: 0,
            knn_k: 5,
            folds: 20,
            test_frac: 0.2,
            expected_degree: 6.0,
            models: crate::graph::Model::ALL.to_vec(),
            graphs_per_model: 20,
            min_nodes: 10,
            max_nodes: 200,
        }
    }
}

impl RunConfig {
    /// Loads a JSON config file; unknown fields are rejected so typos
    /// surface instead of silently falling back to defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.display().to_string(),
            source: e,
        })
    }

    /// The evaluation method named by `method` + `variant`.
    pub fn eval_method(&self) -> Result<EvalMethod> {
        EvalMethod::from_flags(&self.method, self.variant)
    }

    /// The embedding configuration carried by this config, with `seed`
    /// substituted. For the structural baselines (which embed nothing)
    /// the method defaults to CCB and is ignored downstream.
    pub fn embedding(&self, seed: u64) -> Result<EmbeddingConfig> {
        let method = match self.eval_method()? {
            EvalMethod::Mixture { method, .. } => method,
            _ => Method::Ccb,
        };
        EmbeddingConfig::new(method, self.samples, self.colors, self.depth, seed)
    }
}

/// Resolves the effective seed: explicit flag, then the `GMOT_SEED`
/// environment variable, then the config value.
pub fn resolve_seed(flag: Option<u64>, config_seed: u64) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text.trim().parse().map_err(|_| {
            Error::Domain(format!("{SEED_ENV} must be an unsigned integer, got '{text}'"))
        }),
        Err(std::env::VarError::NotPresent) => Ok(config_seed),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(Error::Domain(format!("{SEED_ENV} is not valid unicode")))
        }
    }
}

/// Reads a labels manifest: a JSON object mapping graph file name → class.
pub fn read_manifest(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.display().to_string(),
        source: e,
    })
}

/// Removes every tracked file unless the command committed, so failed
/// commands leave no partial outputs behind.
struct OutputGuard {
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputGuard {
    fn new() -> Self {
        OutputGuard {
            written: Vec::new(),
            committed: false,
        }
    }

    fn track(&mut self, path: &Path) {
        self.written.push(path.to_path_buf());
    }

    fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if !self.committed {
            for path in &self.written {
                let _ = std::fs::remove_file(path);
            }
        }
    }
}

fn create_file(guard: &mut OutputGuard, path: &Path) -> Result<BufWriter<File>> {
    guard.track(path);
    Ok(BufWriter::new(
        File::create(path).map_err(|e| Error::io(path, e))?,
    ))
}

fn write_json<T: Serialize>(guard: &mut OutputGuard, path: &Path, value: &T) -> Result<()> {
    let mut w = create_file(guard, path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Json {
        path: path.display().to_string(),
        source: e,
    })?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Parameters for dataset generation.
#[derive(Debug, Clone)]
pub struct GenerateSpec {
    pub out_dir: PathBuf,
    pub models: Vec<crate::graph::Model>,
    pub per_model: usize,
    pub expected_degree: f64,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct GenerateOutput {
    /// Edge-list files in manifest (sorted) order.
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
}

/// Generates `per_model` random graphs from each model, writes them as
/// edge-list files named `<model>-<index>.txt`, and a `labels.json`
/// manifest mapping file name → model class. Node counts are drawn
/// uniformly from `min_nodes..=max_nodes`; per-graph seeds derive from
/// `seed` in a fixed order, so reruns are byte-identical.
pub fn cmd_generate(spec: &GenerateSpec) -> Result<GenerateOutput> {
    if spec.models.is_empty() || spec.per_model == 0 {
        return Err(Error::Domain(
            "need at least one model and one graph per model".into(),
        ));
    }
    if spec.min_nodes < 2 || spec.min_nodes > spec.max_nodes {
        return Err(Error::Domain(format!(
            "invalid node range {}..={}",
            spec.min_nodes, spec.max_nodes
        )));
    }
    std::fs::create_dir_all(&spec.out_dir).map_err(|e| Error::io(&spec.out_dir, e))?;
    let width = spec.per_model.saturating_sub(1).to_string().len().max(2);
    let mut master = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut guard = OutputGuard::new();
    let mut labels = BTreeMap::new();
    let mut files = Vec::new();
    for model in &spec.models {
        for idx in 0..spec.per_model {
            let nodes = master.gen_range(spec.min_nodes..=spec.max_nodes);
            let graph_seed = master.gen::<u64>();
            let g = generate(&crate::graph::GeneratorSpec {
                model: *model,
                nodes,
                expected_degree: spec.expected_degree,
                seed: graph_seed,
            })?;
            let name = format!("{}-{:0width$}.txt", model.name().to_lowercase(), idx);
            let path = spec.out_dir.join(&name);
            let mut w = create_file(&mut guard, &path)?;
            crate::graph::write_edge_list(&g, &mut w).map_err(|e| Error::io(&path, e))?;
            w.flush().map_err(|e| Error::io(&path, e))?;
            labels.insert(name, model.name().to_string());
            files.push(path);
        }
    }
    let manifest = spec.out_dir.join("labels.json");
    write_json(&mut guard, &manifest, &labels)?;
    guard.commit();
    files.sort();
    Ok(GenerateOutput { files, manifest })
}

/// Parameters for pairwise-distance computation.
#[derive(Debug, Clone)]
pub struct DistanceSpec {
    /// Graph files, given directly. Leave empty when using `manifest`.
    pub inputs: Vec<PathBuf>,
    /// Labels manifest; graphs are its keys (sorted), resolved relative to
    /// the manifest's directory.
    pub manifest: Option<PathBuf>,
    pub method: EvalMethod,
    pub embed: EmbeddingConfig,
    /// Distance CSV path; the sidecar is written next to it as `.json`.
    pub out: PathBuf,
    /// Also write one transport-plan CSV per pair (mixture methods only).
    pub write_plans: bool,
}

#[derive(Debug, Clone)]
pub struct DistanceOutput {
    pub csv: PathBuf,
    pub sidecar: PathBuf,
    pub plans: Vec<PathBuf>,
    pub matrix: DistanceMatrix,
}

fn resolve_inputs(spec: &DistanceSpec) -> Result<(Vec<String>, Vec<PathBuf>, Vec<String>)> {
    match (&spec.manifest, spec.inputs.is_empty()) {
        (Some(manifest), true) => {
            let entries = read_manifest(manifest)?;
            let base = manifest.parent().unwrap_or(Path::new("."));
            let mut names = Vec::new();
            let mut paths = Vec::new();
            let mut labels = Vec::new();
            for (name, class) in entries {
                paths.push(base.join(&name));
                names.push(name);
                labels.push(class);
            }
            Ok((names, paths, labels))
        }
        (None, false) => {
            let names: Vec<String> = spec
                .inputs
                .iter()
                .map(|p| p.display().to_string())
                .collect();
            let labels = vec![String::new(); names.len()];
            Ok((names, spec.inputs.clone(), labels))
        }
        (Some(_), false) => Err(Error::Domain(
            "give graphs either as arguments or via a manifest, not both".into(),
        )),
        (None, true) => Err(Error::Domain(
            "no input graphs: pass files or a labels manifest".into(),
        )),
    }
}

/// Computes the pairwise distance matrix over the input graphs and writes
/// it as CSV plus a JSON sidecar. With `write_plans`, also writes one
/// `<out-stem>.plan-<i>-<j>.csv` per pair (1-based, matching matrix rows).
pub fn cmd_distance(spec: &DistanceSpec) -> Result<DistanceOutput> {
    let (names, paths, labels) = resolve_inputs(spec)?;
    if paths.len() < 2 {
        return Err(Error::Domain(format!(
            "need at least two graphs to compare, got {}",
            paths.len()
        )));
    }
    let graphs: Vec<Graph> = paths
        .iter()
        .map(|p| crate::graph::read_graph(p, crate::graph::GraphFormat::Auto))
        .collect::<Result<Vec<_>>>()?;

    let mut guard = OutputGuard::new();
    let mut plan_paths = Vec::new();
    let mut matrix = if spec.write_plans {
        let EvalMethod::Mixture { method, variant } = spec.method else {
            return Err(Error::Domain(
                "transport plans exist only for mixture methods, not baselines".into(),
            ));
        };
        let cfg = EmbeddingConfig {
            method,
            ..spec.embed
        };
        cfg.validate()?;
        use rayon::prelude::*;
        let mixtures = graphs
            .par_iter()
            .map(|g| fit_mixture(&sample_embeddings(g, &cfg)?, DEFAULT_RIDGE))
            .collect::<Result<Vec<_>>>()?;
        let n = graphs.len();
        let mut d = ndarray::Array2::zeros((n, n));
        let mut pair_ms = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let start = std::time::Instant::now();
                let (cost, plan) = mixture_w2(&mixtures[i], &mixtures[j], variant)?;
                pair_ms.push(start.elapsed().as_secs_f64() * 1e3);
                let dist = cost.max(0.0).sqrt();
                d[(i, j)] = dist;
                d[(j, i)] = dist;
                let plan_path = spec
                    .out
                    .with_extension(format!("plan-{}-{}.csv", i + 1, j + 1));
                let mut w = create_file(&mut guard, &plan_path)?;
                plan.write_csv(&mut w).map_err(|e| Error::io(&plan_path, e))?;
                w.flush().map_err(|e| Error::io(&plan_path, e))?;
                plan_paths.push(plan_path);
            }
        }
        let mean_pair_ms = pair_ms.iter().sum::<f64>() / pair_ms.len() as f64;
        let dm = DistanceMatrix {
            d,
            labels,
            meta: DistanceMeta {
                method: spec.method.name(),
                config: Some(cfg),
                files: Vec::new(),
                pair_ms,
                mean_pair_ms,
            },
        };
        dm.validate()?;
        dm
    } else {
        pairwise_distances(&graphs, &labels, spec.method, &spec.embed)?
    };
    matrix.meta.files = names;

    let mut w = create_file(&mut guard, &spec.out)?;
    write_distance_csv(&matrix.d, &mut w).map_err(|e| Error::io(&spec.out, e))?;
    w.flush().map_err(|e| Error::io(&spec.out, e))?;
    let sidecar_path = spec.out.with_extension("json");
    write_json(&mut guard, &sidecar_path, &DistanceSidecar::of(&matrix))?;
    guard.commit();
    Ok(DistanceOutput {
        csv: spec.out.clone(),
        sidecar: sidecar_path,
        plans: plan_paths,
        matrix,
    })
}

/// Parameters for evaluating a stored distance matrix.
#[derive(Debug, Clone)]
pub struct EvalSpec {
    pub matrix_csv: PathBuf,
    /// Sidecar path; defaults to the matrix path with a `.json` extension.
    pub sidecar: Option<PathBuf>,
    /// Optional labels manifest overriding the sidecar's labels.
    pub manifest: Option<PathBuf>,
    pub knn_k: usize,
    pub folds: usize,
    pub test_frac: f64,
    pub seed: u64,
    /// Report JSON path; the leaf order goes next to it as `.order.txt`.
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct EvalOutput {
    pub report_path: PathBuf,
    pub order_path: PathBuf,
    pub report: EvalReport,
    /// Dendrogram leaf order, 0-based (written 1-based to the file).
    pub order: Vec<usize>,
}

/// Loads a distance matrix (CSV + sidecar), applies manifest labels if
/// given, and writes an evaluation report (weighted kNN cross-validation
/// plus silhouette) and the dendrogram leaf order, one 1-based index per
/// line.
pub fn cmd_eval(spec: &EvalSpec) -> Result<EvalOutput> {
    let file = File::open(&spec.matrix_csv).map_err(|e| Error::io(&spec.matrix_csv, e))?;
    let d = read_distance_csv(
        BufReader::new(file),
        &spec.matrix_csv.display().to_string(),
    )?;
    let sidecar_path = spec
        .sidecar
        .clone()
        .unwrap_or_else(|| spec.matrix_csv.with_extension("json"));
    let text = std::fs::read_to_string(&sidecar_path).map_err(|e| Error::io(&sidecar_path, e))?;
    let mut sidecar: DistanceSidecar =
        serde_json::from_str(&text).map_err(|e| Error::Json {
            path: sidecar_path.display().to_string(),
            source: e,
        })?;

    if let Some(manifest_path) = &spec.manifest {
        let manifest = read_manifest(manifest_path)?;
        if !sidecar.files.is_empty() {
            let mut labels = Vec::with_capacity(sidecar.files.len());
            for file in &sidecar.files {
                match manifest.get(file) {
                    Some(class) => labels.push(class.clone()),
                    None => {
                        return Err(Error::Domain(format!(
                            "manifest {} has no label for '{file}'",
                            manifest_path.display()
                        )))
                    }
                }
            }
            sidecar.labels = labels;
        } else {
            if manifest.len() != d.nrows() {
                return Err(Error::Shape(format!(
                    "manifest lists {} graphs but the matrix is {}×{}",
                    manifest.len(),
                    d.nrows(),
                    d.nrows()
                )));
            }
            sidecar.labels = manifest.values().cloned().collect();
        }
    }
    let dm = sidecar.into_matrix(d)?;
    let report = knn_cv(&dm, spec.knn_k, spec.folds, spec.test_frac, spec.seed)?;
    let order = crate::eval::hierarchical_order(&dm.d)?;

    let mut guard = OutputGuard::new();
    write_json(&mut guard, &spec.out, &report)?;
    let order_path = spec.out.with_extension("order.txt");
    let mut w = create_file(&mut guard, &order_path)?;
    for &leaf in &order {
        writeln!(w, "{}", leaf + 1).map_err(|e| Error::io(&order_path, e))?;
    }
    w.flush().map_err(|e| Error::io(&order_path, e))?;
    guard.commit();
    Ok(EvalOutput {
        report_path: spec.out.clone(),
        order_path,
        report,
        order,
    })
}

/// Parameters for exporting the transport plan between two graphs.
#[derive(Debug, Clone)]
pub struct PlanExportSpec {
    pub graph_a: PathBuf,
    pub graph_b: PathBuf,
    pub method: Method,
    pub variant: Variant,
    pub embed: EmbeddingConfig,
    /// Plan CSV path; mixtures go next to it as `.mix-a.csv`/`.mix-b.csv`.
    pub out: PathBuf,
    /// Also dump both fitted mixtures for inspection.
    pub dump_mixtures: bool,
}

#[derive(Debug, Clone)]
pub struct PlanExportOutput {
    /// √(transport cost) — the graph distance.
    pub distance: f64,
    /// The raw transport cost (squared distance).
    pub squared: f64,
    pub plan_path: PathBuf,
    pub mixture_paths: Vec<PathBuf>,
}

/// Computes the optimal transport plan between two graphs and writes it
/// as CSV (`i,j,mass`, 1-based node ids).
pub fn cmd_plan_export(spec: &PlanExportSpec) -> Result<PlanExportOutput> {
    let cfg = EmbeddingConfig {
        method: spec.method,
        ..spec.embed
    };
    cfg.validate()?;
    let a = crate::graph::read_graph(&spec.graph_a, crate::graph::GraphFormat::Auto)?;
    let b = crate::graph::read_graph(&spec.graph_b, crate::graph::GraphFormat::Auto)?;
    let ma = fit_mixture(&sample_embeddings(&a, &cfg)?, DEFAULT_RIDGE)?;
    let mb = fit_mixture(&sample_embeddings(&b, &cfg)?, DEFAULT_RIDGE)?;
    let (cost, plan) = mixture_w2(&ma, &mb, spec.variant)?;

    let mut guard = OutputGuard::new();
    let mut w = create_file(&mut guard, &spec.out)?;
    plan.write_csv(&mut w).map_err(|e| Error::io(&spec.out, e))?;
    w.flush().map_err(|e| Error::io(&spec.out, e))?;
    let mut mixture_paths = Vec::new();
    if spec.dump_mixtures {
        for (mixture, tag) in [(&ma, "mix-a"), (&mb, "mix-b")] {
            let path = spec.out.with_extension(format!("{tag}.csv"));
            let mut w = create_file(&mut guard, &path)?;
            write_mixture_csv(mixture, &mut w).map_err(|e| Error::io(&path, e))?;
            w.flush().map_err(|e| Error::io(&path, e))?;
            mixture_paths.push(path);
        }
    }
    guard.commit();
    Ok(PlanExportOutput {
        distance: cost.max(0.0).sqrt(),
        squared: cost,
        plan_path: spec.out.clone(),
        mixture_paths,
    })
}
