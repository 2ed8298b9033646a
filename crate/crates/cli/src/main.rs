use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use forgekg::corpus::{load_corpus, ArticleFetcher, DEFAULT_SECTION_KEYWORDS, DEFAULT_WIKI_API};
use forgekg::evaluate::{evaluate_run, load_gold, render_tables};
use forgekg::reconcile::{DiskCache, Service};
use forgekg_cli::pipeline::{self, Review, Run};
use forgekg_cli::{CliError, Overrides, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "forgekg", version, about = "Build knowledge graphs of document authenticity debates")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fetch article sections for a seed list and write a corpus file
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value = DEFAULT_WIKI_API)]
        wiki_api: String,
        /// Heading keyword; repeatable. Defaults to the built-in list.
        #[arg(long = "keyword")]
        keywords: Vec<String>,
    },
    /// Run the three extraction tasks over the corpus
    Extract {
        /// Also write every provider response into this replay directory
        #[arg(long)]
        record: Option<PathBuf>,
    },
    Normalize,
    /// Link entities to authority files
    Reconcile {
        #[command(flatten)]
        review: ReviewArgs,
    },
    /// Assemble and serialize the knowledge graph
    BuildKg {
        /// Also write an N-Quads copy
        #[arg(long)]
        nquads: bool,
    },
    /// Summary statistics and the debate timeline
    Analyze,
    /// Score one or two runs against a gold standard
    Evaluate {
        #[arg(long)]
        gold: PathBuf,
        /// Run directories or extraction.json files
        #[arg(required = true, num_args = 1..=2)]
        runs: Vec<PathBuf>,
        /// Write the reports as JSON here as well
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// All stages end to end
    Run {
        #[command(flatten)]
        review: ReviewArgs,
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Inspect or clear the reconciliation cache
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, clap::Args)]
struct ReviewArgs {
    /// Review ambiguous matches at the terminal
    #[arg(long, conflicts_with = "decisions")]
    interactive: bool,
    /// Apply review decisions from a JSON file
    #[arg(long)]
    decisions: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum CacheAction {
    Inspect {
        #[arg(long)]
        service: Option<Service>,
    },
    Clear {
        #[arg(long)]
        service: Option<Service>,
    },
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
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("forgekg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn existing_run(o: &Overrides) -> Result<Run, CliError> {
    let config = o.config()?;
    let id = o
        .run_id
        .clone()
        .ok_or_else(|| CliError::Config("--run-id is required for this stage".into()))?;
    Run::existing(config, &id)
}

fn report(run: &Run, manifest: &RunManifest) {
    println!("run {} in {}", run.run_id, run.dir.display());
    for stage in &manifest.stages {
        for out in &stage.outputs {
            println!("  {:<10} {}  {}", stage.stage, &out.sha256[..12], out.path);
        }
    }
    if manifest.warnings.total > 0 {
        println!("{} warning(s), see {}", manifest.warnings.total, pipeline::WARNINGS);
    }
}

fn with_review<T>(
    args: ReviewArgs,
    f: impl FnOnce(Review<'_>) -> Result<T, CliError>,
) -> Result<T, CliError> {
    if args.interactive {
        let mut input = io::stdin().lock();
        let mut output = io::stdout();
        f(Review::Interactive {
            input: &mut input,
            output: &mut output,
        })
    } else {
        f(args.decisions.map_or(Review::None, Review::Batch))
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let o = &cli.overrides;
    match cli.command {
        Command::Ingest {
            input,
            output,
            wiki_api,
            keywords,
        } => ingest(&input, &output, &wiki_api, &keywords),
        Command::Extract { record } => {
            let run = Run::open(o.config()?, o.run_id.clone())?;
            let manifest = pipeline::stage_extract(&run, record.as_deref())?;
            report(&run, &manifest);
            Ok(())
        }
        Command::Normalize => {
            let run = existing_run(o)?;
            report(&run, &pipeline::stage_normalize(&run)?);
            Ok(())
        }
        Command::Reconcile { review } => {
            let run = existing_run(o)?;
            let review = ReviewArgs {
                decisions: review.decisions.or_else(|| run.config.reconcile.decisions.clone()),
                ..review
            };
            let manifest = with_review(review, |r| pipeline::stage_reconcile(&run, r))?;
            report(&run, &manifest);
            Ok(())
        }
        Command::BuildKg { nquads } => {
            let run = existing_run(o)?;
            report(&run, &pipeline::stage_build_kg(&run, nquads)?);
            Ok(())
        }
        Command::Analyze => {
            let run = existing_run(o)?;
            report(&run, &pipeline::stage_analyze(&run)?);
            Ok(())
        }
        Command::Evaluate { gold, runs, json } => evaluate(&gold, &runs, json.as_deref()),
        Command::Run { review, record } => {
            let config = o.config()?;
            let (run, manifest) = with_review(review, |r| {
                pipeline::run_pipeline(config, o.run_id.clone(), r, record.as_deref())
            })?;
            report(&run, &manifest);
            Ok(())
        }
        Command::Cache { action } => cache(o, action),
    }
}

fn ingest(input: &Path, output: &Path, wiki_api: &str, keywords: &[String]) -> Result<(), CliError> {
    let seeds = load_corpus(input).map_err(|e| CliError::stage("corpus", e))?;
    let keywords: Vec<&str> = if keywords.is_empty() {
        DEFAULT_SECTION_KEYWORDS.to_vec()
    } else {
        keywords.iter().map(String::as_str).collect()
    };
    let fetcher = ArticleFetcher::new(pipeline::http_client(), wiki_api);
    let (corpus, warnings) = pipeline::ingest_corpus(seeds, &fetcher, &keywords);
    fs::write(output, corpus.to_jsonl())
        .map_err(|e| CliError::stage("ingest", format!("cannot write {}: {e}", output.display())))?;
    for w in &warnings {
        eprintln!("warning: {}: {}", w.entry_id, w.message);
    }
    println!("{} entries written to {}", corpus.len(), output.display());
    Ok(())
}

fn evaluate(gold: &Path, runs: &[PathBuf], json: Option<&Path>) -> Result<(), CliError> {
    let gold = load_gold(gold).map_err(|e| CliError::Config(e.to_string()))?;
    let mut reports = Vec::new();
    for run in runs {
        let artifact = pipeline::load_extraction(run)?;
        let report = evaluate_run(&artifact.model_id, &artifact.results, &gold)
            .map_err(|e| CliError::stage("evaluate", e))?;
        reports.push(report);
    }
    print!("{}", render_tables(&reports));
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&reports).map_err(|e| CliError::stage("evaluate", e))?;
        fs::write(path, text + "\n")
            .map_err(|e| CliError::stage("evaluate", format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn cache(o: &Overrides, action: CacheAction) -> Result<(), CliError> {
    let config = forgekg_cli::PipelineConfig::load_or_default(o.config.as_deref())?;
    let root = o.cache_dir.clone().unwrap_or(config.cache_dir);
    let cache = DiskCache::new(&root);
    let io_err = |e: io::Error| CliError::stage("cache", e);
    match action {
        CacheAction::Inspect { service } => {
            let services: Vec<Service> = service.map_or(Service::ALL.to_vec(), |s| vec![s]);
            for s in services {
                let entries = cache.entries(s.namespace()).map_err(io_err)?;
                println!("{s}: {} entr{}", entries.len(), if entries.len() == 1 { "y" } else { "ies" });
                for (_, record) in entries {
                    println!("  {}", record.query);
                }
            }
        }
        CacheAction::Clear { service } => {
            let n = cache.clear(service.map(Service::namespace)).map_err(io_err)?;
            println!("removed {n} cached response(s) from {}", root.display());
        }
    }
    Ok(())
}
