//! `gf`: command-line front end for the scholar-profiling pipeline.
//!
//! Every subcommand reads a line-delimited corpus directory (papers,
//! citations, optional contexts/topics, label files) and writes plain
//! JSON/JSONL/CSV/DOT artifacts. Exit code 0 on success, 2 on any
//! validation failure. The `GF_SEED` environment variable overrides the
//! seed of whichever command runs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gf_core::baselines::compute_indicators;
use gf_core::corpus::{
    load_aa_labels, load_award_labels, load_corpus, load_extend_labels, Corpus, CorpusPaths,
};
use gf_core::edge_profile::{
    cross_validate_classifier, feature_vectors_for_labels, score_profile_edges,
    train_extend_classifier, ExtendConfig, ExtendModel, FeatureMask, TextIndex,
};
use gf_core::gfgraph::{build_full_profile, export_dot, extract_core_profile, AttributeMask};
use gf_core::harness::{
    compare_methods, run_award_inference, run_edge_sweep, write_report_json, write_sweep_csv,
    EvalConfig, EvalReport, Method, ReportFile,
};
use gf_core::metrics::CvConfig;
use gf_core::node_profile::{aa_score, fill_contributions, AAConfig, AaCache};
use gf_core::represent::{train_gnn, GnnConfig};
use gf_core::synth::{write_synthetic_corpus, SynthSpec};
use gf_core::topic_embed::{classical_mds, TopicEmbedding, TopicHierarchy};
use gf_core::{GfError, Result};

#[derive(Parser)]
#[command(name = "gf", version, about = "Impact-oriented scholar profiling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate a corpus directory, printing summary counts.
    Ingest(IngestArgs),
    /// Build full profiles and write them as JSON, one file per scholar.
    BuildProfiles(BuildProfilesArgs),
    /// Score advisor-advisee candidate pairs and write aa_scores.jsonl.
    Aa(AaArgs),
    /// Extract citation-link features and train the extend classifier.
    Edges(EdgesArgs),
    /// Train the graph network on award labels and save gnn_model.json.
    Train(TrainArgs),
    /// Run award-inference cross-validation for one method.
    Eval(EvalArgs),
    /// Re-run award inference while removing low-extend edges.
    Sweep(SweepArgs),
    /// Generate a synthetic corpus with planted ground truth.
    Synth(SynthArgs),
    /// Export a scholar's profile as Graphviz DOT.
    ExportDot(ExportDotArgs),
}

#[derive(Args)]
struct DataArg {
    /// Corpus directory (papers.jsonl, citations.jsonl, optional
    /// contexts.jsonl / topics.jsonl and label files).
    #[arg(long)]
    data: PathBuf,
    /// Reject records with unknown paper references instead of skipping.
    #[arg(long)]
    strict: bool,
}

impl DataArg {
    fn load(&self) -> Result<Corpus> {
        load_corpus(&CorpusPaths::in_dir(&self.data), self.strict)
    }

    fn label_path(&self, explicit: &Option<PathBuf>, default_name: &str) -> PathBuf {
        explicit
            .clone()
            .unwrap_or_else(|| self.data.join(default_name))
    }
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    data: DataArg,
}

#[derive(Args)]
struct BuildProfilesArgs {
    #[command(flatten)]
    data: DataArg,
    /// Output directory for <scholar>.profile.json files.
    #[arg(long)]
    out: PathBuf,
    /// Scholars to profile; defaults to every author in labels_award.jsonl.
    #[arg(long = "scholar")]
    scholars: Vec<String>,
    #[arg(long, default_value_t = 8)]
    topic_dim: usize,
    /// Also run advisor-advisee analysis to fill node contributions.
    #[arg(long)]
    with_contributions: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AaArgs {
    #[command(flatten)]
    data: DataArg,
    /// Candidate pairs (advisor_id, advisee_id, year per line); defaults
    /// to labels_aa.jsonl inside the corpus directory.
    #[arg(long)]
    pairs: Option<PathBuf>,
    #[arg(long, default_value = "aa_scores.jsonl")]
    out: PathBuf,
    #[arg(long, default_value_t = 2)]
    s_len: i32,
    #[arg(long, default_value_t = 1.5)]
    s_adr: f64,
    #[arg(long, default_value_t = 0.5)]
    boundary: f64,
}

#[derive(Args)]
struct EdgesArgs {
    #[command(flatten)]
    data: DataArg,
    /// Labeled citation links (citing_id, cited_id, label per line).
    #[arg(long)]
    train: PathBuf,
    /// `full` uses all 20 features; `no-content` masks context features.
    #[arg(long, default_value = "full")]
    mode: String,
    #[arg(long, default_value_t = 500)]
    trees: usize,
    #[arg(long, default_value = "extend_model.json")]
    model_out: PathBuf,
    #[arg(long, default_value = "edge_features.jsonl")]
    features_out: PathBuf,
    /// Also report cross-validated F1/AUC before training on everything.
    #[arg(long)]
    cv: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArg,
    /// Award labels; defaults to labels_award.jsonl inside the corpus.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value_t = 32)]
    hidden: usize,
    #[arg(long, default_value_t = 2)]
    layers: usize,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    learning_rate: f64,
    /// Node attributes to keep, comma-separated subset of
    /// citations,date,order,topic.
    #[arg(long, default_value = "citations,date,order,topic")]
    mask: String,
    #[arg(long, default_value_t = 8)]
    topic_dim: usize,
    #[arg(long, default_value = "gnn_model.json")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EvalKnobs {
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 50)]
    n_positive: usize,
    #[arg(long, default_value_t = 150)]
    n_negative: usize,
    #[arg(long, default_value_t = 8)]
    topic_dim: usize,
    #[arg(long, default_value_t = 16)]
    hidden: usize,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 120)]
    trees: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl EvalKnobs {
    fn to_config(&self, seed: u64) -> EvalConfig {
        let base = EvalConfig::default();
        EvalConfig {
            folds: self.folds,
            repeats: self.repeats,
            n_positive: self.n_positive,
            n_negative: self.n_negative,
            seed,
            topic_dim: self.topic_dim,
            gnn: GnnConfig {
                hidden: self.hidden,
                epochs: self.epochs,
                ..base.gnn
            },
            extend: ExtendConfig {
                n_trees: self.trees,
                ..base.extend
            },
            ..base
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    data: DataArg,
    /// gf-full, gf-core, cc, bc, ca or indicators.
    #[arg(long)]
    method: Method,
    /// Optional second method for a paired fold-level comparison.
    #[arg(long)]
    baseline: Option<Method>,
    #[command(flatten)]
    knobs: EvalKnobs,
    #[arg(long, default_value = "report.json")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArg,
    /// Comma-separated edge fractions in (0, 1].
    #[arg(long, default_value = "1.0,0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.2,0.1")]
    fractions: String,
    #[command(flatten)]
    knobs: EvalKnobs,
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Directory to write the corpus and label files into.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 200)]
    scholars: usize,
    #[arg(long, default_value_t = 0.25)]
    awardee_fraction: f64,
    #[arg(long, default_value_t = 30)]
    aa_pairs: usize,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExportDotArgs {
    #[command(flatten)]
    data: DataArg,
    #[arg(long)]
    scholar: String,
    /// Output path; defaults to <scholar>.dot.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Export the core view instead of the full profile. Requires a
    /// trained extend model for edge probabilities.
    #[arg(long)]
    core: bool,
    /// Extend-classifier model JSON (required with --core).
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    node_threshold: f64,
    #[arg(long, default_value_t = 0.5)]
    edge_fraction: f64,
    #[arg(long, default_value_t = 8)]
    topic_dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

/// `GF_SEED` wins over any `--seed` flag so batch scripts can re-seed a
/// whole pipeline without touching per-command arguments.
fn effective_seed(flag_seed: u64) -> Result<u64> {
    match std::env::var("GF_SEED") {
        Ok(raw) => raw
            .trim()
            .parse::<u64>()
            .map_err(|_| GfError::InvalidArgument(format!("GF_SEED `{raw}` is not a u64"))),
        Err(_) => Ok(flag_seed),
    }
}

fn topic_embedding(corpus: &Corpus, topic_dim: usize, seed: u64) -> Result<TopicEmbedding> {
    if corpus.topics().is_empty() {
        return Ok(TopicEmbedding::empty());
    }
    let hierarchy = TopicHierarchy::from_records(corpus.topics())?;
    let dim = topic_dim.min(hierarchy.len());
    classical_mds(&hierarchy, dim, gf_core::rng::derive_seed(seed, "topic-embed"))
}

fn parse_mask(spec: &str) -> Result<AttributeMask> {
    let mut mask = AttributeMask {
        citations: false,
        date: false,
        order: false,
        topic: false,
    };
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part {
            "citations" => mask.citations = true,
            "date" => mask.date = true,
            "order" => mask.order = true,
            "topic" => mask.topic = true,
            other => {
                return Err(GfError::InvalidArgument(format!(
                    "unknown attribute `{other}` (expected citations,date,order,topic)"
                )))
            }
        }
    }
    Ok(mask)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(args) => ingest(args),
        Command::BuildProfiles(args) => build_profiles(args),
        Command::Aa(args) => aa(args),
        Command::Edges(args) => edges(args),
        Command::Train(args) => train(args),
        Command::Eval(args) => eval(args),
        Command::Sweep(args) => sweep(args),
        Command::Synth(args) => synth(args),
        Command::ExportDot(args) => export_dot_cmd(args),
    }
}

fn ingest(args: IngestArgs) -> Result<()> {
    let corpus = args.data.load()?;
    let authors: std::collections::HashSet<&str> = corpus
        .papers()
        .iter()
        .flat_map(|p| p.authors.iter().map(String::as_str))
        .collect();
    println!("papers: {}", corpus.papers().len());
    println!("citations: {}", corpus.citations().len());
    println!("contexts: {}", corpus.contexts().len());
    println!("topics: {}", corpus.topics().len());
    println!("authors: {}", authors.len());
    Ok(())
}

fn build_profiles(args: BuildProfilesArgs) -> Result<()> {
    let corpus = args.data.load()?;
    let seed = effective_seed(args.seed)?;
    let scholars = if args.scholars.is_empty() {
        let path = args.data.label_path(&None, "labels_award.jsonl");
        load_award_labels(&path)?
            .into_iter()
            .map(|l| l.author_id)
            .collect()
    } else {
        args.scholars.clone()
    };
    if scholars.is_empty() {
        return Err(GfError::InvalidArgument(
            "no scholars given and the award label file is empty".into(),
        ));
    }
    let emb = topic_embedding(&corpus, args.topic_dim, seed)?;
    std::fs::create_dir_all(&args.out).map_err(|e| GfError::io(&args.out, e))?;
    let mut aa_cache = AaCache::new(&corpus, AAConfig::default());
    for scholar in &scholars {
        let mut profile = build_full_profile(&corpus, scholar, &emb)?;
        if args.with_contributions {
            fill_contributions(&corpus, &mut profile, &mut aa_cache)?;
        }
        let path = args.out.join(format!("{scholar}.profile.json"));
        profile.save_json(&path)?;
    }
    println!("wrote {} profiles to {}", scholars.len(), args.out.display());
    Ok(())
}

fn aa(args: AaArgs) -> Result<()> {
    let corpus = args.data.load()?;
    let pairs_path = args.data.label_path(&args.pairs, "labels_aa.jsonl");
    let pairs = load_aa_labels(&pairs_path)?;
    if pairs.is_empty() {
        return Err(GfError::InvalidArgument(format!(
            "no candidate pairs in {}",
            pairs_path.display()
        )));
    }
    let cfg = AAConfig {
        s_len: args.s_len,
        s_adr: args.s_adr,
        decision_boundary: args.boundary,
        ..AAConfig::default()
    };
    let scores = pairs
        .iter()
        .map(|p| aa_score(&corpus, &p.advisor_id, &p.advisee_id, p.year, &cfg))
        .collect::<Result<Vec<_>>>()?;
    gf_core::jsonl::write_jsonl(&args.out, &scores)?;
    let detected = scores.iter().filter(|s| s.p_aa >= args.boundary).count();
    println!(
        "scored {} pairs, {} at or above boundary {}; wrote {}",
        scores.len(),
        detected,
        args.boundary,
        args.out.display()
    );
    Ok(())
}

fn edges(args: EdgesArgs) -> Result<()> {
    let corpus = args.data.load()?;
    let seed = effective_seed(args.seed)?;
    let labels = load_extend_labels(&args.train)?;
    let text = TextIndex::build(&corpus);
    let mask = match args.mode.as_str() {
        "full" => FeatureMask::full(),
        "no-content" => FeatureMask::no_content(),
        other => {
            return Err(GfError::InvalidArgument(format!(
                "unknown mode `{other}` (expected full or no-content)"
            )))
        }
    };
    let data: Vec<_> = feature_vectors_for_labels(&corpus, &text, &labels)?
        .into_iter()
        .map(|(fv, label)| (fv.with_mask(mask), label))
        .collect();

    let records: Vec<serde_json::Value> = labels
        .iter()
        .zip(&data)
        .map(|(l, (fv, label))| {
            serde_json::json!({
                "citing_id": l.citing_id,
                "cited_id": l.cited_id,
                "label": u8::from(*label),
                "features": fv.values.to_vec(),
            })
        })
        .collect();
    gf_core::jsonl::write_jsonl(&args.features_out, &records)?;

    let cfg = ExtendConfig {
        n_trees: args.trees,
        seed,
        ..ExtendConfig::default()
    };
    if args.cv {
        let report = cross_validate_classifier(&data, &cfg, &CvConfig::default(), seed)?;
        println!(
            "cv: F1 {:.3} ± {:.3}, AUC {:.3} ± {:.3}",
            report.f1_mean, report.f1_std, report.auc_mean, report.auc_std
        );
    }
    let model = train_extend_classifier(&data, &cfg)?;
    model.save_json(&args.model_out)?;
    println!(
        "trained {} trees on {} links; wrote {} and {}",
        args.trees,
        data.len(),
        args.model_out.display(),
        args.features_out.display()
    );
    Ok(())
}

fn train(args: TrainArgs) -> Result<()> {
    let corpus = args.data.load()?;
    let seed = effective_seed(args.seed)?;
    let labels_path = args.data.label_path(&args.labels, "labels_award.jsonl");
    let labels = load_award_labels(&labels_path)?;
    if labels.is_empty() {
        return Err(GfError::EmptyTrainingData);
    }
    let mask = parse_mask(&args.mask)?;
    let emb = topic_embedding(&corpus, args.topic_dim, seed)?;
    let mut graphs = Vec::with_capacity(labels.len());
    let mut y = Vec::with_capacity(labels.len());
    for label in &labels {
        let mut profile = build_full_profile(&corpus, &label.author_id, &emb)?;
        profile.attribute_selection = mask;
        graphs.push(gf_core::represent::encode_profile(&profile, args.topic_dim));
        y.push(label.awarded == 1);
    }
    let cfg = GnnConfig {
        hidden: args.hidden,
        layers: args.layers,
        learning_rate: args.learning_rate,
        epochs: args.epochs,
        seed,
    };
    let model = train_gnn(&graphs, &y, &cfg)?;
    let out = std::fs::File::create(&args.out).map_err(|e| GfError::io(&args.out, e))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(out), &model)
        .map_err(|e| GfError::InvalidRecord(format!("model serialization: {e}")))?;
    let final_loss = model.loss_curve.last().copied().unwrap_or(f64::NAN);
    println!(
        "trained on {} scholars, final loss {:.4}; wrote {}",
        y.len(),
        final_loss,
        args.out.display()
    );
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let corpus = args.data.load()?;
    let seed = effective_seed(args.knobs.seed)?;
    let cfg = args.knobs.to_config(seed);
    let award = load_award_labels(&args.data.label_path(&None, "labels_award.jsonl"))?;
    let extend_path = args.data.label_path(&None, "labels_extend.jsonl");
    let extend = if extend_path.exists() {
        load_extend_labels(&extend_path)?
    } else {
        Vec::new()
    };

    let report = run_award_inference(&corpus, &award, &extend, args.method, &cfg)?;
    println!(
        "{}: F1 {:.3} ± {:.3}, AUC {:.3} ± {:.3}",
        args.method, report.f1_mean, report.f1_std, report.auc_mean, report.auc_std
    );
    let mut file = ReportFile {
        reports: vec![EvalReport::new(args.method, &cfg, &report)],
        comparison: None,
    };
    if let Some(baseline) = args.baseline {
        let base = run_award_inference(&corpus, &award, &extend, baseline, &cfg)?;
        println!(
            "{}: F1 {:.3} ± {:.3}, AUC {:.3} ± {:.3}",
            baseline, base.f1_mean, base.f1_std, base.auc_mean, base.auc_std
        );
        let cmp = compare_methods(args.method, &report, baseline, &base)?;
        println!(
            "paired fold-level difference {:+.3}, p = {:.4}",
            cmp.test.mean_diff, cmp.test.p_value
        );
        file.reports.push(EvalReport::new(baseline, &cfg, &base));
        file.comparison = Some(cmp);
    }
    write_report_json(&args.out, &file)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let corpus = args.data.load()?;
    let seed = effective_seed(args.knobs.seed)?;
    let mut cfg = args.knobs.to_config(seed);
    cfg.edge_fractions = args
        .fractions
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| GfError::InvalidArgument(format!("bad fraction `{p}`")))
        })
        .collect::<Result<_>>()?;
    let award = load_award_labels(&args.data.label_path(&None, "labels_award.jsonl"))?;
    let extend = load_extend_labels(&args.data.label_path(&None, "labels_extend.jsonl"))?;
    let rows = run_edge_sweep(&corpus, &award, &extend, &cfg)?;
    for (row, _) in &rows {
        println!(
            "q = {:.2}: F1 {:.3} ± {:.3}, AUC {:.3} ± {:.3}",
            row.edge_fraction, row.f1_mean, row.f1_std, row.auc_mean, row.auc_std
        );
    }
    let table: Vec<_> = rows.iter().map(|(row, _)| row.clone()).collect();
    write_sweep_csv(&args.out, &table)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let seed = effective_seed(args.seed)?;
    let spec = SynthSpec {
        n_scholars: args.scholars,
        awardee_fraction: args.awardee_fraction,
        planted_aa_pairs: args.aa_pairs,
        noise_rate: args.noise,
        seed,
        ..SynthSpec::default()
    };
    write_synthetic_corpus(&spec, &args.out)?;
    println!(
        "wrote synthetic corpus ({} scholars, seed {}) to {}",
        args.scholars,
        seed,
        args.out.display()
    );
    Ok(())
}

fn export_dot_cmd(args: ExportDotArgs) -> Result<()> {
    let corpus = args.data.load()?;
    let seed = effective_seed(args.seed)?;
    let emb = topic_embedding(&corpus, args.topic_dim, seed)?;
    let mut profile = build_full_profile(&corpus, &args.scholar, &emb)?;
    if args.core {
        let model_path = args.model.as_ref().ok_or_else(|| {
            GfError::InvalidArgument("--core requires --model <extend_model.json>".into())
        })?;
        let model = ExtendModel::load_json(model_path)?;
        let mut aa_cache = AaCache::new(&corpus, AAConfig::default());
        fill_contributions(&corpus, &mut profile, &mut aa_cache)?;
        let text = TextIndex::build(&corpus);
        score_profile_edges(&corpus, &text, &model, &mut profile)?;
        profile = extract_core_profile(&profile, args.node_threshold, args.edge_fraction)?;
    }
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.dot", args.scholar)));
    export_dot(&profile, &out)?;
    let h = compute_indicators(&corpus, &args.scholar)?.h_index;
    println!(
        "wrote {} ({} nodes, {} edges, h-index {})",
        out.display(),
        profile.nodes.len(),
        profile.edges.len(),
        h
    );
    Ok(())
}
