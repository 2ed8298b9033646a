//! Pipeline stages. Each stage reads the previous stage's artifact from the
//! run directory, writes its own, and updates the manifest.

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use chrono::Utc;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use forgekg::analyze::{self, SummaryStats, SkippedClaim};
use forgekg::corpus::{load_corpus, select_sections_for_entry, ArticleFetcher, Corpus};
use forgekg::extract::{
    ExtractionError, ExtractionResult, Extractor, LiveProvider, PromptTemplates, Provider,
    RecordingProvider, ReplayProvider, RuleBasedProvider,
};
use forgekg::http::{HttpClient, UreqClient};
use forgekg::kg;
use forgekg::normalize::{normalize_extraction, NormalizedEntry};
use forgekg::reconcile::{
    load_decisions, reconcile_targets, review_queue, save_decisions, DiskCache, ReconcileReport,
    ReconcileSettings, ReconciledEntity, Reconciler, ReviewDecision, ReviewMode,
};
use forgekg::Warning;

use crate::config::{PipelineConfig, ProviderKind, LLM_BASE_URL_ENV};
use crate::error::CliError;
use crate::manifest::{FileDigest, RunManifest, StageRecord, WarningSummary};

pub const EXTRACTION: &str = "extraction.json";
pub const NORMALIZED: &str = "normalized.json";
pub const RECONCILED: &str = "reconciled.json";
pub const REVIEW_PENDING: &str = "review-pending.json";
pub const DECISIONS: &str = "decisions.json";
pub const KG_TRIG: &str = "kg.trig";
pub const KG_NQUADS: &str = "kg.nq";
pub const TIMELINE_CSV: &str = "timeline.csv";
pub const TIMELINE_SVG: &str = "timeline.svg";
pub const SUMMARY: &str = "summary.json";
pub const WARNINGS: &str = "warnings.json";
pub const MANIFEST: &str = "manifest.json";

const HTTP_TIMEOUT: Duration = Duration::from_secs(30);

/// What `extraction.json` holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionArtifact {
    pub model_id: String,
    pub template_version: String,
    pub results: Vec<ExtractionResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSummary {
    pub stats: SummaryStats,
    pub timeline_points: usize,
    pub skipped: Vec<SkippedClaim>,
}

/// Where review decisions come from.
pub enum Review<'a> {
    /// Ambiguous labels stay unmatched and are written to the pending file.
    None,
    Batch(PathBuf),
    Interactive {
        input: &'a mut dyn BufRead,
        output: &'a mut dyn Write,
    },
}

/// A run directory plus the configuration it was created with.
pub struct Run {
    pub config: PipelineConfig,
    pub run_id: String,
    pub dir: PathBuf,
}

fn default_run_id(output_dir: &Path) -> String {
    let base = Utc::now().format("%Y%m%dT%H%M%SZ").to_string();
    let mut id = base.clone();
    let mut n = 2;
    while output_dir.join(&id).exists() {
        id = format!("{base}-{n}");
        n += 1;
    }
    id
}

fn valid_run_id(id: &str) -> bool {
    !id.is_empty()
        && id != "."
        && id != ".."
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

impl Run {
    /// Creates (or reuses) `<output_dir>/<run_id>`.
    pub fn open(config: PipelineConfig, run_id: Option<String>) -> Result<Self, CliError> {
        let run_id = match run_id {
            Some(id) if valid_run_id(&id) => id,
            Some(id) => return Err(CliError::Config(format!("invalid run id `{id}`"))),
            None => default_run_id(&config.output_dir),
        };
        let dir = config.output_dir.join(&run_id);
        fs::create_dir_all(&dir)
            .map_err(|e| CliError::stage("setup", format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            config,
            run_id,
            dir,
        })
    }

    /// An existing run directory; its id is the last path component.
    pub fn existing(config: PipelineConfig, run_id: &str) -> Result<Self, CliError> {
        let dir = config.output_dir.join(run_id);
        if !dir.is_dir() {
            return Err(CliError::Config(format!("no run directory {}", dir.display())));
        }
        Ok(Self {
            config,
            run_id: run_id.to_string(),
            dir,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write_text(&self, stage: &'static str, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        fs::write(&path, text)
            .map_err(|e| CliError::stage(stage, format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    fn write_json<T: Serialize>(&self, stage: &'static str, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::stage(stage, e))?;
        text.push('\n');
        self.write_text(stage, name, &text)
    }

    fn read_json<T: DeserializeOwned>(&self, stage: &'static str, name: &str) -> Result<T, CliError> {
        let path = self.path(name);
        let text = fs::read_to_string(&path).map_err(|e| {
            CliError::stage(stage, format!("cannot read {} (run the earlier stage first): {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::stage(stage, format!("malformed {}: {e}", path.display())))
    }

    fn manifest(&self) -> Result<RunManifest, CliError> {
        let path = self.path(MANIFEST);
        if path.exists() {
            let mut m = RunManifest::load(&path)?;
            m.config = self.config.clone();
            Ok(m)
        } else {
            Ok(RunManifest::new(&self.run_id, &self.config))
        }
    }

    /// Swaps in this stage's warnings, records digests, rewrites the manifest.
    fn finish_stage(
        &self,
        stage: &'static str,
        inputs: &[PathBuf],
        outputs: &[PathBuf],
        warnings: Vec<Warning>,
    ) -> Result<RunManifest, CliError> {
        let mut all: Vec<Warning> = if self.path(WARNINGS).exists() {
            self.read_json(stage, WARNINGS)?
        } else {
            Vec::new()
        };
        all.retain(|w| w.stage != stage);
        all.extend(warnings);
        let warnings_path = self.write_json(stage, WARNINGS, &all)?;

        let digest = |p: &PathBuf| {
            let label = p
                .strip_prefix(&self.dir)
                .map(|rel| rel.display().to_string())
                .unwrap_or_else(|_| p.display().to_string());
            FileDigest::of(p, label).map_err(|e| CliError::stage(stage, format!("{}: {e}", p.display())))
        };
        let mut manifest = self.manifest()?;
        manifest.record(StageRecord {
            stage: stage.to_string(),
            finished_at: Utc::now(),
            inputs: inputs.iter().map(digest).collect::<Result<_, _>>()?,
            outputs: outputs.iter().map(digest).collect::<Result<_, _>>()?,
        });
        manifest.warnings = WarningSummary::of(&all);
        manifest.warnings_file = Some(digest(&warnings_path)?);
        self.write_json(stage, MANIFEST, &manifest)?;
        Ok(manifest)
    }
}

pub fn http_client() -> Arc<dyn HttpClient> {
    Arc::new(UreqClient::new(HTTP_TIMEOUT))
}

fn build_provider(config: &PipelineConfig, record: Option<&Path>) -> Result<Arc<dyn Provider>, CliError> {
    let p = &config.provider;
    let base: Arc<dyn Provider> = match p.kind {
        ProviderKind::RuleBased => Arc::new(RuleBasedProvider),
        ProviderKind::Replay => {
            let dir = p.fixture_dir.clone().ok_or_else(|| {
                CliError::Config("provider.kind = \"replay\" needs provider.fixture_dir".into())
            })?;
            Arc::new(ReplayProvider::new(dir))
        }
        ProviderKind::Live => {
            let base_url = p
                .base_url
                .clone()
                .or_else(|| std::env::var(LLM_BASE_URL_ENV).ok())
                .ok_or_else(|| CliError::Config(format!("live provider needs {LLM_BASE_URL_ENV}")))?;
            let key = std::env::var("FORGEKG_LLM_API_KEY").ok();
            Arc::new(LiveProvider::new(http_client(), base_url, key))
        }
    };
    Ok(match record {
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::stage("extract", format!("cannot create {}: {e}", dir.display())))?;
            Arc::new(RecordingProvider::new(base, dir))
        }
        None => base,
    })
}

fn templates(config: &PipelineConfig) -> Result<PromptTemplates, CliError> {
    match &config.prompt_template_dir {
        Some(dir) => PromptTemplates::load_dir(dir).map_err(|e| CliError::Config(e.to_string())),
        None => Ok(PromptTemplates::builtin()),
    }
}

pub fn stage_extract(run: &Run, record: Option<&Path>) -> Result<RunManifest, CliError> {
    const STAGE: &str = "extract";
    let corpus = load_corpus(&run.config.corpus_path).map_err(|e| CliError::stage("corpus", e))?;
    let templates = templates(&run.config)?;
    let template_version = templates.version.clone();
    let extractor = Extractor::new(build_provider(&run.config, record)?, &run.config.provider.model_id)
        .with_retries(run.config.provider.retries)
        .with_templates(templates);
    let outcomes = extractor.run_all(&corpus.entries, run.config.provider.concurrency);

    let mut results = Vec::new();
    let mut warnings = Vec::new();
    let mut fatal = None;
    for (entry, outcome) in corpus.entries.iter().zip(outcomes) {
        match outcome {
            Ok(r) => results.push(r),
            Err(ExtractionError::Exhausted { partial }) => {
                for f in &partial.failures {
                    warnings.push(Warning::new(
                        &entry.id,
                        STAGE,
                        format!("{} task gave no usable answer after {} attempts: {}", f.task, f.attempts, f.message),
                    ));
                }
                results.push(*partial);
            }
            Err(e) if fatal.is_none() => {
                fatal = Some(if e.is_replay_miss() {
                    CliError::ReplayMiss {
                        entry: entry.id.clone(),
                        message: e.to_string(),
                    }
                } else {
                    CliError::entry(STAGE, &entry.id, e)
                });
            }
            Err(_) => {}
        }
    }
    let artifact = ExtractionArtifact {
        model_id: run.config.provider.model_id.clone(),
        template_version,
        results,
    };
    let out = run.write_json(STAGE, EXTRACTION, &artifact)?;
    let manifest = run.finish_stage(STAGE, std::slice::from_ref(&run.config.corpus_path), &[out], warnings)?;
    match fatal {
        Some(e) => Err(e),
        None => Ok(manifest),
    }
}

pub fn stage_normalize(run: &Run) -> Result<RunManifest, CliError> {
    const STAGE: &str = "normalize";
    let artifact: ExtractionArtifact = run.read_json(STAGE, EXTRACTION)?;
    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    for result in &artifact.results {
        let (entry, w) = normalize_extraction(result);
        entries.push(entry);
        warnings.extend(w);
    }
    let out = run.write_json(STAGE, NORMALIZED, &entries)?;
    run.finish_stage(STAGE, &[run.path(EXTRACTION)], &[out], warnings)
}

fn reconciler(config: &PipelineConfig) -> Reconciler {
    let settings = ReconcileSettings {
        threshold: config.reconcile.threshold,
        margin: config.reconcile.margin,
        rate_limits: config.reconcile.rate_limits,
        ..ReconcileSettings::default()
    };
    let http = (!config.reconcile.offline).then(http_client);
    Reconciler::new(settings, DiskCache::new(&config.cache_dir), http)
}

pub fn stage_reconcile(run: &Run, review: Review<'_>) -> Result<RunManifest, CliError> {
    const STAGE: &str = "reconcile";
    let entries: Vec<NormalizedEntry> = run.read_json(STAGE, NORMALIZED)?;
    let targets = reconcile_targets(&entries);
    let reconciler = reconciler(&run.config);
    let first = reconciler
        .reconcile_all(&targets, &[])
        .map_err(|e| CliError::stage(STAGE, e))?;
    let mut inputs = vec![run.path(NORMALIZED)];
    let decisions: Vec<ReviewDecision> = match review {
        Review::None => Vec::new(),
        Review::Batch(path) => {
            let file = load_decisions(&path).map_err(|e| CliError::stage(STAGE, e))?;
            inputs.push(path);
            review_queue(&first.pending, ReviewMode::Batch(&file), Utc::now())
                .map_err(|e| CliError::stage(STAGE, e))?
        }
        Review::Interactive { input, output } => {
            review_queue(&first.pending, ReviewMode::Interactive { input, output }, Utc::now())
                .map_err(|e| CliError::stage(STAGE, e))?
        }
    };
    let report = if decisions.is_empty() {
        first
    } else {
        reconciler
            .reconcile_all(&targets, &decisions)
            .map_err(|e| CliError::stage(STAGE, e))?
    };
    let mut outputs = vec![
        run.write_json(STAGE, RECONCILED, &report.entities)?,
        run.write_json(STAGE, REVIEW_PENDING, &report.pending)?,
    ];
    if !decisions.is_empty() {
        let path = run.path(DECISIONS);
        save_decisions(&path, &decisions).map_err(|e| CliError::stage(STAGE, e))?;
        outputs.push(path);
    }
    let warnings = report
        .pending
        .iter()
        .map(|p| {
            Warning::new(
                "-",
                STAGE,
                format!("{} `{}` needs review ({} candidates)", p.kind, p.raw_label, p.candidates.len()),
            )
        })
        .collect();
    run.finish_stage(STAGE, &inputs, &outputs, warnings)
}

fn load_report(run: &Run, stage: &'static str) -> Result<ReconcileReport, CliError> {
    let entities: Vec<ReconciledEntity> = run.read_json(stage, RECONCILED)?;
    Ok(ReconcileReport {
        entities,
        pending: Vec::new(),
    })
}

pub fn stage_build_kg(run: &Run, nquads: bool) -> Result<RunManifest, CliError> {
    const STAGE: &str = "build-kg";
    let entries: Vec<NormalizedEntry> = run.read_json(STAGE, NORMALIZED)?;
    let report = load_report(run, STAGE)?;
    let dataset = kg::build_dataset(&entries, &report).map_err(|e| CliError::stage(STAGE, e))?;
    let trig = kg::serialize_trig(&dataset);
    let reparsed = kg::parse_trig(&trig).map_err(|e| CliError::stage(STAGE, e))?;
    if !reparsed.set_eq(&dataset) {
        return Err(CliError::stage(STAGE, "serialized TriG does not parse back to the same quads"));
    }
    let mut outputs = vec![run.write_text(STAGE, KG_TRIG, &trig)?];
    if nquads {
        outputs.push(run.write_text(STAGE, KG_NQUADS, &kg::serialize_nquads(&dataset))?);
    }
    run.finish_stage(STAGE, &[run.path(NORMALIZED), run.path(RECONCILED)], &outputs, Vec::new())
}

pub fn stage_analyze(run: &Run) -> Result<RunManifest, CliError> {
    const STAGE: &str = "analyze";
    let trig = fs::read_to_string(run.path(KG_TRIG))
        .map_err(|e| CliError::stage(STAGE, format!("cannot read {KG_TRIG}: {e}")))?;
    let dataset = kg::parse_trig(&trig).map_err(|e| CliError::stage(STAGE, e))?;
    let report = load_report(run, STAGE)?;
    let stats = analyze::summary_stats(&dataset);
    let timeline = analyze::timeline(&dataset, &analyze::life_dates_by_iri(&report));
    let (csv, svg) = (run.path(TIMELINE_CSV), run.path(TIMELINE_SVG));
    analyze::emit_scatter(&timeline.points, &csv, &svg).map_err(|e| CliError::stage(STAGE, e))?;
    let warnings = timeline
        .skipped
        .iter()
        .map(|s| {
            Warning::new(
                &s.document_id,
                STAGE,
                format!("`{}` has no life dates; claim left off the timeline", s.claimant_label),
            )
        })
        .collect();
    let summary = AnalysisSummary {
        stats,
        timeline_points: timeline.points.len(),
        skipped: timeline.skipped,
    };
    let summary_path = run.write_json(STAGE, SUMMARY, &summary)?;
    run.finish_stage(
        STAGE,
        &[run.path(KG_TRIG), run.path(RECONCILED)],
        &[csv, svg, summary_path],
        warnings,
    )
}

/// extract → normalize → reconcile → build-kg → analyze in one run directory.
pub fn run_pipeline(
    config: PipelineConfig,
    run_id: Option<String>,
    review: Review<'_>,
    record: Option<&Path>,
) -> Result<(Run, RunManifest), CliError> {
    config.validate()?;
    if !config.corpus_path.is_file() {
        return Err(CliError::stage(
            "corpus",
            format!("corpus file {} not found", config.corpus_path.display()),
        ));
    }
    let review = match review {
        Review::None => match &config.reconcile.decisions {
            Some(path) => Review::Batch(path.clone()),
            None => Review::None,
        },
        other => other,
    };
    let run = Run::open(config, run_id)?;
    stage_extract(&run, record)?;
    stage_normalize(&run)?;
    stage_reconcile(&run, review)?;
    stage_build_kg(&run, false)?;
    let manifest = stage_analyze(&run)?;
    Ok((run, manifest))
}

/// Reads `extraction.json` from a run directory or a direct file path.
pub fn load_extraction(path: &Path) -> Result<ExtractionArtifact, CliError> {
    let file = if path.is_dir() { path.join(EXTRACTION) } else { path.to_path_buf() };
    let text = fs::read_to_string(&file)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", file.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("malformed {}: {e}", file.display())))
}


/// Fills in the sections of every entry that has a source URL and none yet.
///
/// Entries whose article cannot be fetched, or where no heading qualifies,
/// are kept as they are and reported.
pub fn ingest_corpus(
    seeds: Corpus,
    fetcher: &ArticleFetcher,
    keywords: &[&str],
) -> (Corpus, Vec<Warning>) {
    const STAGE: &str = "ingest";
    let mut warnings = Vec::new();
    let mut entries = Vec::with_capacity(seeds.entries.len());
    for mut entry in seeds.entries {
        if entry.sections.is_empty() && !entry.source_url.is_empty() {
            match fetcher.fetch_article(&entry.source_url) {
                Ok(article) => {
                    entry.sections = select_sections_for_entry(
                        &article.sections,
                        keywords,
                        entry.sections_override.as_deref(),
                    );
                    if entry.title_hint.is_none() {
                        entry.title_hint = Some(article.title);
                    }
                    if entry.sections.is_empty() {
                        warnings.push(Warning::new(&entry.id, STAGE, "no assessment section selected"));
                    }
                }
                Err(e) => warnings.push(Warning::new(&entry.id, STAGE, e.to_string())),
            }
        }
        entries.push(entry);
    }
    (Corpus { entries }, warnings)
}
