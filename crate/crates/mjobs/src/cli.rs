//! `mjobs` command-line interface.

use std::fmt::Write as _;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mjobs_core::artifacts::{self, EmbedderSpec};
use mjobs_core::embedding::builtin_job_synonyms;
use mjobs_core::eval::{self, EvalConfig};
use mjobs_core::ranker::RankerConfig;
use mjobs_core::synthetic::{self, SyntheticConfig};
use mjobs_core::{Engine, Error as CoreError};

use crate::api::{self, ApiError, RecommendRequest, RecommendResponse};
use crate::server::{self, ServeOptions};

#[derive(Debug, Parser)]
#[command(
    name = "mjobs",
    version,
    about = "Metadata-only hybrid job recommender"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean a source CSV into a corpus directory.
    Prepare {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the lexical and dense indexes for a prepared corpus.
    Index(IndexArgs),
    /// Rank postings for a free-text query.
    Recommend(RecommendArgs),
    /// Run the metadata-graded offline evaluation.
    Evaluate(EvaluateArgs),
    /// Evaluate a grid of candidate sizes and fusion weights.
    Sweep(SweepArgs),
    /// Serve the JSON API.
    Serve(ServeArgs),
    /// Write a synthetic source CSV.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 500)]
        size: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Extra rows with unusable titles, for exercising the cleaner.
        #[arg(long, default_value_t = 0)]
        noise_rows: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmbedderKind {
    Hash,
    Provider,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynonymTable {
    Builtin,
    None,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// Directory written by `prepare`.
    #[arg(long)]
    corpus: PathBuf,
    /// Output directory; defaults to the corpus directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "hash")]
    embedder: EmbedderKind,
    #[arg(long, default_value_t = 256)]
    dim: usize,
    /// Synonym table for the hash embedder.
    #[arg(long, value_enum, default_value = "builtin")]
    synonyms: SynonymTable,
    #[arg(long, env = "MJOBS_EMBED_URL")]
    provider_url: Option<String>,
    #[arg(long, default_value = "default")]
    provider_model: String,
}

#[derive(Debug, Args)]
struct ArtifactsArg {
    #[arg(long, env = "MJOBS_ARTIFACTS")]
    artifacts: PathBuf,
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    #[command(flatten)]
    artifacts: ArtifactsArg,
    #[arg(long)]
    query: String,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    rerank: bool,
    #[arg(long, env = "MJOBS_RERANK_URL")]
    rerank_url: Option<String>,
    #[arg(long)]
    w_sem: Option<f64>,
    #[arg(long)]
    w_lex: Option<f64>,
    /// remote, hybrid, onsite or none.
    #[arg(long)]
    work_mode: Option<String>,
    /// internship, entry, mid, senior, lead, director, executive or none.
    #[arg(long)]
    seniority: Option<String>,
    /// full-time, part-time, contract, temporary, internship or none.
    #[arg(long)]
    employment: Option<String>,
    /// Location phrase or none.
    #[arg(long)]
    location: Option<String>,
    /// Print the full JSON response instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    artifacts: ArtifactsArg,
    #[arg(long, default_value_t = 500)]
    seeds: usize,
    #[arg(long, default_value_t = 42)]
    rng_seed: u64,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Compare the hybrid baseline with pair-scorer re-ranking.
    #[arg(long)]
    rerank: bool,
    #[arg(long, env = "MJOBS_RERANK_URL")]
    rerank_url: Option<String>,
    /// Add the metadata bonus for candidates sharing function or industry with the seed.
    #[arg(long)]
    bonus: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Grid {
    Default,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFormat {
    Csv,
    Table,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    artifacts: ArtifactsArg,
    #[arg(long, value_enum)]
    grid: Grid,
    #[arg(long, default_value_t = 500)]
    seeds: usize,
    #[arg(long, default_value_t = 42)]
    rng_seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: SweepFormat,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    artifacts: ArtifactsArg,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: IpAddr,
    #[arg(long, env = "MJOBS_RERANK_URL")]
    rerank_url: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            Self::Data(_) => 2,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::EvalConfig(_) => Self::Usage(e.to_string()),
            other => Self::Data(other.to_string()),
        }
    }
}

impl From<ApiError> for CliError {
    fn from(e: ApiError) -> Self {
        match e {
            ApiError::BadRequest(m) => Self::Usage(m),
            other => Self::Data(other.to_string()),
        }
    }
}

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

/// Runs one command, writing its normal output to `out`.
pub fn run(cli: Cli, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    match cli.command {
        Command::Prepare { input, out: dir } => prepare(&input, &dir, out),
        Command::Index(args) => index(args, out),
        Command::Recommend(args) => recommend(args, out),
        Command::Evaluate(args) => evaluate(args, out),
        Command::Sweep(args) => sweep(args, out),
        Command::Serve(args) => serve(args),
        Command::Synth {
            out: path,
            size,
            seed,
            noise_rows,
        } => {
            let postings = synthetic::generate(&SyntheticConfig {
                size,
                seed,
                ..SyntheticConfig::default()
            });
            let file = std::fs::File::create(&path)
                .map_err(|e| data(format!("{}: {e}", path.display())))?;
            synthetic::write_csv(&postings, noise_rows, std::io::BufWriter::new(file))
                .map_err(data)?;
            writeln!(
                out,
                "wrote {} rows to {}",
                size + noise_rows,
                path.display()
            )
            .map_err(data)
        }
    }
}

fn prepare(input: &Path, dir: &Path, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    let (postings, report) = mjobs_core::ingest::ingest_file(input).map_err(data)?;
    if postings.is_empty() {
        return Err(CliError::Data("no usable records after cleaning".into()));
    }
    artifacts::save_corpus(dir, &postings, &report).map_err(data)?;
    let mut s = format!(
        "raw {}  cleaned {}  removed {}\n",
        report.raw_count, report.cleaned_count, report.removed_count
    );
    for (reason, n) in &report.removal_reasons {
        let _ = writeln!(s, "  {reason}: {n}");
    }
    let _ = writeln!(s, "corpus written to {}", dir.display());
    out.write_all(s.as_bytes()).map_err(data)
}

fn index(args: IndexArgs, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    let spec = match args.embedder {
        EmbedderKind::Hash => {
            if args.dim < 8 {
                return Err(CliError::Usage(
                    "--dim must be at least 8 for the hash embedder".into(),
                ));
            }
            EmbedderSpec::Hash {
                dimension: args.dim,
                synonyms: match args.synonyms {
                    SynonymTable::Builtin => builtin_job_synonyms(),
                    SynonymTable::None => Default::default(),
                },
            }
        }
        EmbedderKind::Provider => EmbedderSpec::Provider {
            url: args.provider_url.ok_or_else(|| {
                CliError::Usage("--provider-url is required with --embedder provider".into())
            })?,
            model: args.provider_model,
            dimension: args.dim,
        },
    };
    let postings = artifacts::load_corpus(&args.corpus).map_err(data)?;
    let embedder = spec.build().map_err(data)?;
    let engine = Engine::build(postings, embedder)?;
    let dir = args.out.unwrap_or(args.corpus);
    let manifest = artifacts::save_artifacts(
        &dir,
        engine.corpus(),
        engine.sparse(),
        engine.dense(),
        &spec,
        &RankerConfig::default(),
    )
    .map_err(data)?;
    writeln!(
        out,
        "indexed {} postings, {} terms, embedder {} (d={}) into {}",
        manifest.record_count,
        engine.sparse().vocabulary().len(),
        manifest.embedder_name,
        manifest.embedding_dimension,
        dir.display()
    )
    .map_err(data)
}

fn recommend(args: RecommendArgs, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    let req = RecommendRequest {
        query: args.query,
        top_k: args.top_k,
        rerank: args.rerank.then_some(true),
        w_sem: args.w_sem,
        w_lex: args.w_lex,
        work_mode: args.work_mode,
        seniority: args.seniority,
        employment: args.employment,
        location: args.location,
    };
    api::resolve(&req, &RankerConfig::default())?;
    let (engine, manifest) = artifacts::open_engine(&args.artifacts.artifacts)?;
    let scorer = server::pair_scorer(args.rerank_url.as_deref()).map_err(CliError::Usage)?;
    let resp = api::recommend(&engine, scorer.as_ref(), &manifest.ranker, &req)?;
    if args.json {
        let s = serde_json::to_string_pretty(&resp).map_err(data)?;
        writeln!(out, "{s}").map_err(data)
    } else {
        out.write_all(results_table(&resp).as_bytes()).map_err(data)
    }
}

fn clip(s: &str, width: usize) -> String {
    if s.chars().count() <= width {
        s.to_string()
    } else {
        let mut t: String = s.chars().take(width.saturating_sub(1)).collect();
        t.push('~');
        t
    }
}

pub fn results_table(resp: &RecommendResponse) -> String {
    let mut s = String::new();
    let filters: Vec<String> = resp
        .applied_filters
        .iter()
        .map(|f| {
            format!(
                "{}={}",
                serde_json::to_value(f.kind)
                    .unwrap()
                    .as_str()
                    .unwrap_or("?"),
                f.value
            )
        })
        .collect();
    let _ = writeln!(s, "query: {}", resp.parsed_query.normalized);
    let _ = writeln!(
        s,
        "filters: {}{}",
        if filters.is_empty() {
            "none".to_string()
        } else {
            filters.join(", ")
        },
        if resp.fallback_used {
            " (relaxed: no posting matched)"
        } else {
            ""
        }
    );
    let _ = writeln!(
        s,
        "{:>3}  {:>6}  {:<32}  {:<22}  {:<20}  matched",
        "#", "score", "title", "company", "location"
    );
    for r in &resp.results {
        let matched = r
            .explanation
            .as_ref()
            .map(|e| e.matched_keywords.join(" "))
            .unwrap_or_default();
        let _ = writeln!(
            s,
            "{:>3}  {:>6.3}  {:<32}  {:<22}  {:<20}  {}",
            r.rank,
            r.breakdown.s_final,
            clip(&r.posting.title, 32),
            clip(&r.posting.company, 22),
            clip(&r.posting.location, 20),
            matched
        );
    }
    if resp.results.is_empty() {
        let _ = writeln!(s, "(no results)");
    }
    s
}

fn eval_config(
    seeds: usize,
    rng_seed: u64,
    k: usize,
    ranker: RankerConfig,
) -> Result<EvalConfig, CliError> {
    if k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    Ok(EvalConfig {
        n_seeds: seeds,
        rng_seed,
        k,
        ranker,
        exclude_seed_itself: true,
    })
}

fn evaluate(args: EvaluateArgs, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    let (engine, manifest) = artifacts::open_engine(&args.artifacts.artifacts)?;
    let ranker = RankerConfig {
        bonus_enabled: args.bonus,
        ..manifest.ranker.clone()
    };
    let cfg = eval_config(args.seeds, args.rng_seed, args.k, ranker)?;
    let text = if args.rerank {
        let scorer = server::pair_scorer(args.rerank_url.as_deref()).map_err(CliError::Usage)?;
        let cmp = eval::compare_rerank(&engine, scorer.as_ref(), &cfg)?;
        if args.json {
            serde_json::to_string_pretty(&cmp).map_err(data)? + "\n"
        } else {
            eval::comparison_table(&cmp)
        }
    } else {
        let report = eval::run_protocol(&engine, None, &cfg)?;
        if args.json {
            serde_json::to_string_pretty(&report).map_err(data)? + "\n"
        } else {
            eval::report_table("hybrid", &report)
        }
    };
    out.write_all(text.as_bytes()).map_err(data)
}

fn sweep(args: SweepArgs, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    let (engine, manifest) = artifacts::open_engine(&args.artifacts.artifacts)?;
    let cfg = eval_config(args.seeds, args.rng_seed, 10, manifest.ranker.clone())?;
    let (sizes, weights) = match args.grid {
        Grid::Default => eval::default_grid(),
    };
    let rows = eval::sweep(&engine, &cfg, &sizes, &weights)?;
    let text = match args.format {
        SweepFormat::Csv => eval::sweep_csv(&rows),
        SweepFormat::Table => eval::sweep_table(&rows),
    };
    out.write_all(text.as_bytes()).map_err(data)
}

fn serve(args: ServeArgs) -> Result<(), CliError> {
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .try_init();
    let runtime = tokio::runtime::Runtime::new().map_err(data)?;
    runtime
        .block_on(server::serve(ServeOptions {
            artifacts: args.artifacts.artifacts,
            addr: SocketAddr::new(args.host, args.port),
            rerank_url: args.rerank_url,
        }))
        .map_err(CliError::Data)
}
