mod clustering;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sbmconn_core::dl::{compute_dl, DlConfig, DlReport, Model};
use sbmconn_core::graph::{load_edgelist, write_edgelist};
use sbmconn_core::inference::{fit, InferenceConfig, ModelChoice, ModelFit, RestartLog};
use sbmconn_core::metrics::{filtered_eval, ThresholdRow};
use sbmconn_core::synthgen::{gen_cliques, gen_planted, CliqueFixtureSpec, PlantedSpec};
use sbmconn_core::treatments::{profile, treat_cc, treat_wcc_traced, ThresholdRule};
use sbmconn_core::Graph;

use clustering::{renumber, sidecar_path, write_clustering, write_label_map, Clustering, ClusteringFile};
use error::{CliError, CliResult};
use output::{emit, emit_json};

/// Connectivity treatments, SBM description lengths, flat SBM fitting and
/// clustering evaluation.
#[derive(Debug, Parser)]
#[command(name = "sbmconn", version)]
struct Cli {
    /// error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "info")]
    log_level: log::LevelFilter,

    /// Worker threads for per-cluster and per-restart work (default: all cores).
    #[arg(long, global = true, value_parser = positive)]
    num_processors: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Make every cluster connected (cc) or well-connected (wcc).
    Treat(TreatArgs),
    /// Description length of a clustering under a flat SBM, as JSON.
    Dl(DlArgs),
    /// Fit a flat SBM by minimising the description length.
    Infer(InferArgs),
    /// Classify clusters as disconnected, poorly or well connected.
    Profile(ProfileArgs),
    /// Compare an estimated clustering with a ground truth over density thresholds.
    Eval(EvalArgs),
    /// Generate a synthetic graph with a ground-truth clustering.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Args)]
struct GraphInput {
    /// Tab-separated edge list.
    #[arg(long)]
    edgelist: PathBuf,
}

#[derive(Debug, Args)]
struct TreatArgs {
    #[command(flatten)]
    input: GraphInput,
    /// `node<TAB>cluster` file.
    #[arg(long, alias = "clustering")]
    existing_clustering: PathBuf,
    #[arg(long, value_enum)]
    connectedness_criterion: Criterion,
    /// Well-connectedness threshold: log10, none, or a constant.
    #[arg(long, default_value = "log10", value_parser = threshold_rule)]
    threshold: ThresholdRule,
    /// Defaults to stdout.
    #[arg(long)]
    output_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Criterion {
    Cc,
    Wcc,
}

#[derive(Debug, Args)]
struct DlOptions {
    #[arg(long, default_value = "1.0", value_parser = unit_interval)]
    beta: f64,
    /// Leave the edge-count matrix prior out of the total.
    #[arg(long)]
    no_edges_dl: bool,
}

#[derive(Debug, Args)]
struct DlArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, alias = "clustering")]
    existing_clustering: PathBuf,
    /// dc or ndc.
    #[arg(long, default_value = "dc")]
    model: Model,
    #[command(flatten)]
    dl: DlOptions,
    #[arg(long)]
    output_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InferArgs {
    #[command(flatten)]
    input: GraphInput,
    /// dc, ndc, or chosen (fit both, keep the shorter description).
    #[arg(long, default_value = "dc")]
    model: ModelChoice,
    #[command(flatten)]
    dl: DlOptions,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5, value_parser = positive)]
    restarts: usize,
    /// Maximum node-move sweeps after each merge.
    #[arg(long, default_value_t = 10)]
    sweep_limit: usize,
    #[arg(long)]
    output_clustering: Option<PathBuf>,
    #[arg(long)]
    output_report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, alias = "clustering")]
    existing_clustering: PathBuf,
    #[arg(long, default_value = "log10", value_parser = threshold_rule)]
    threshold: ThresholdRule,
    #[arg(long)]
    output_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long)]
    gt_clustering: PathBuf,
    #[arg(long)]
    est_clustering: PathBuf,
    /// Comma-separated ascending density thresholds in [0, 1].
    #[arg(long, default_value = "0.0", value_parser = threshold_list)]
    thresholds: Thresholds,
    /// CSV table; written to stdout when neither output is given.
    #[arg(long)]
    output_csv: Option<PathBuf>,
    #[arg(long)]
    output_json: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct Thresholds(Vec<f64>);

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Disjoint cliques joined by random bridge edges.
    Cliques {
        #[arg(long, value_parser = positive)]
        num_cliques: usize,
        #[arg(long)]
        clique_size: usize,
        #[arg(long, default_value_t = 0)]
        bridges: usize,
        #[command(flatten)]
        out: GenOutput,
    },
    /// Planted partition with independent edges.
    Planted {
        /// Comma-separated block sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        blocks: Vec<usize>,
        #[arg(long, value_parser = unit_interval)]
        p_in: f64,
        #[arg(long, value_parser = unit_interval)]
        p_out: f64,
        #[command(flatten)]
        out: GenOutput,
    },
}

#[derive(Debug, Args)]
struct GenOutput {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output_edgelist: PathBuf,
    #[arg(long)]
    output_clustering: PathBuf,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn threshold_rule(s: &str) -> Result<ThresholdRule, String> {
    s.parse::<ThresholdRule>().map_err(|e| e.to_string())
}

fn threshold_list(s: &str) -> Result<Thresholds, String> {
    let values = s
        .split(',')
        .map(|t| unit_interval(t.trim()))
        .collect::<Result<Vec<f64>, String>>()?;
    if values.windows(2).any(|w| w[1] < w[0]) {
        return Err("thresholds must be ascending".into());
    }
    Ok(Thresholds(values))
}

fn load_graph(input: &GraphInput) -> CliResult<Graph> {
    let start = Instant::now();
    let g = load_edgelist(&input.edgelist).map_err(|e| CliError::input(&input.edgelist, e))?;
    log::info!(
        "loaded {}: {} nodes, {} edges in {:.3}s",
        input.edgelist.display(),
        g.num_nodes(),
        g.num_edges(),
        start.elapsed().as_secs_f64()
    );
    Ok(g)
}

fn load_with_clustering(input: &GraphInput, path: &Path) -> CliResult<(Graph, Clustering)> {
    let mut g = load_graph(input)?;
    let file = ClusteringFile::read(path)?;
    file.extend_graph(&mut g);
    let clustering = file.to_partition(&g)?;
    Ok((g, clustering))
}

fn run_treat(args: &TreatArgs) -> CliResult<()> {
    let (g, input) = load_with_clustering(&args.input, &args.existing_clustering)?;
    let start = Instant::now();
    let treated = match args.connectedness_criterion {
        Criterion::Cc => treat_cc(&g, &input.partition)?,
        Criterion::Wcc => {
            let (treated, records) = treat_wcc_traced(&g, &input.partition, args.threshold)?;
            for r in records.iter().filter(|r| r.pieces > 1) {
                log::debug!(
                    "cluster {} ({} nodes): {} pieces, {} component splits, {} cut splits",
                    r.cluster,
                    r.size,
                    r.pieces,
                    r.component_splits,
                    r.cut_splits
                );
            }
            log::info!(
                "{} of {} clusters split",
                records.iter().filter(|r| r.pieces > 1).count(),
                records.len()
            );
            treated
        }
    };
    log::info!(
        "treatment: {} -> {} clusters in {:.3}s",
        input.partition.num_clusters(),
        treated.num_clusters(),
        start.elapsed().as_secs_f64()
    );
    let out = args.output_file.as_deref();
    emit(out, |w| write_clustering(&g, &treated, &input.order, w))?;
    if input.string_labels {
        if let Some(path) = out {
            let ids = renumber(&treated, &input.order);
            let mut sources = vec![None; treated.num_clusters()];
            for v in 0..g.num_nodes() {
                sources[ids[treated.cluster_of(v)]] = input.original[input.partition.cluster_of(v)].clone();
            }
            emit(Some(&sidecar_path(path)), |w| write_label_map(&sources, w))?;
        }
    }
    Ok(())
}

fn run_dl(args: &DlArgs) -> CliResult<()> {
    let (g, input) = load_with_clustering(&args.input, &args.existing_clustering)?;
    let cfg = DlConfig::new(args.model, args.dl.beta, !args.dl.no_edges_dl)?;
    let report = compute_dl(&g, &input.partition, &cfg)?;
    log::info!("{} description length: {:.6} nats", report.model, report.total);
    emit_json(args.output_file.as_deref(), &report)
}

#[derive(Serialize)]
struct InferReport<'a> {
    model_requested: ModelChoice,
    model_selected: Model,
    candidate_models: Vec<Model>,
    tie: bool,
    seed: u64,
    restarts: usize,
    #[serde(flatten)]
    report: &'a DlReport,
    restart_log: &'a [RestartLog],
    candidates: &'a [ModelFit],
}

fn run_infer(args: &InferArgs) -> CliResult<()> {
    let g = load_graph(&args.input)?;
    let cfg = InferenceConfig {
        model: args.model,
        beta: args.dl.beta,
        edges_dl: !args.dl.no_edges_dl,
        seed: args.seed,
        restarts: args.restarts,
        move_sweep_limit: args.sweep_limit,
    };
    let start = Instant::now();
    let result = fit(&g, &cfg)?;
    log::info!(
        "{} fit: {} blocks, {:.6} nats in {:.3}s",
        result.model_selected,
        result.partition.num_clusters(),
        result.report.total,
        start.elapsed().as_secs_f64()
    );
    let report = InferReport {
        model_requested: args.model,
        model_selected: result.model_selected,
        candidate_models: result.candidates.iter().map(|c| c.model).collect(),
        tie: result.tie,
        seed: args.seed,
        restarts: args.restarts,
        report: &result.report,
        restart_log: &result.restarts_log,
        candidates: &result.candidates,
    };
    if args.output_clustering.is_some() || args.output_report.is_none() {
        let order: Vec<usize> = (0..g.num_nodes()).collect();
        emit(args.output_clustering.as_deref(), |w| write_clustering(&g, &result.partition, &order, w))?;
    }
    if let Some(path) = &args.output_report {
        emit_json(Some(path), &report)?;
    }
    Ok(())
}

fn run_profile(args: &ProfileArgs) -> CliResult<()> {
    let (g, input) = load_with_clustering(&args.input, &args.existing_clustering)?;
    let start = Instant::now();
    let prof = profile(&g, &input.partition, args.threshold)?;
    log::info!(
        "{} clusters: {} disconnected, {} poorly connected, {} well connected, {} singletons ({:.3}s)",
        prof.num_clusters,
        prof.num_disconnected,
        prof.num_poorly_connected,
        prof.num_well_connected,
        prof.num_singletons,
        start.elapsed().as_secs_f64()
    );
    emit_json(args.output_file.as_deref(), &prof)
}

fn write_csv(rows: &[ThresholdRow], w: &mut dyn std::io::Write) -> std::io::Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush()
}

fn run_eval(args: &EvalArgs) -> CliResult<()> {
    let mut g = load_graph(&args.input)?;
    let gt_file = ClusteringFile::read(&args.gt_clustering)?;
    let est_file = ClusteringFile::read(&args.est_clustering)?;
    gt_file.extend_graph(&mut g);
    est_file.extend_graph(&mut g);
    let gt = gt_file.to_partition(&g)?;
    let est = est_file.to_partition(&g)?;
    let rows = filtered_eval(&g, &gt.partition, &est.partition, &args.thresholds.0)?;
    if args.output_csv.is_some() || args.output_json.is_none() {
        emit(args.output_csv.as_deref(), |w| write_csv(&rows, w))?;
    }
    if let Some(path) = &args.output_json {
        emit_json(Some(path), &rows)?;
    }
    Ok(())
}

fn run_gen(cmd: &GenCommand) -> CliResult<()> {
    let ((g, truth), out) = match cmd {
        GenCommand::Cliques {
            num_cliques,
            clique_size,
            bridges,
            out,
        } => {
            let spec = CliqueFixtureSpec {
                num_cliques: *num_cliques,
                clique_size: *clique_size,
                bridges: *bridges,
                seed: out.seed,
            };
            (gen_cliques(&spec)?, out)
        }
        GenCommand::Planted { blocks, p_in, p_out, out } => {
            let spec = PlantedSpec {
                blocks: blocks.clone(),
                p_in: *p_in,
                p_out: *p_out,
                seed: out.seed,
            };
            (gen_planted(&spec)?, out)
        }
    };
    emit(Some(&out.output_edgelist), |w| write_edgelist(&g, w))?;
    let order: Vec<usize> = (0..g.num_nodes()).collect();
    emit(Some(&out.output_clustering), |w| write_clustering(&g, &truth, &order, w))?;
    println!("nodes: {}", g.num_nodes());
    println!("edges: {}", g.num_edges());
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Treat(a) => run_treat(a),
        Command::Dl(a) => run_dl(a),
        Command::Infer(a) => run_infer(a),
        Command::Profile(a) => run_profile(a),
        Command::Eval(a) => run_eval(a),
        Command::Gen(c) => run_gen(c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::new()
        .filter_level(cli.log_level)
        .format_timestamp(None)
        .init();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.num_processors {
        pool = pool.num_threads(n);
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| run(&cli)),
        Err(e) => Err(CliError::Usage(format!("cannot start worker threads: {e}"))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
