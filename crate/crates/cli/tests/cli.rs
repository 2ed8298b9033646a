mod common;

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::sync::Arc;

use forgekg::corpus::{ArticleFetcher, Corpus};
use forgekg::http::{HttpClient, HttpError, HttpResponse};
use forgekg::sha256_hex;
use forgekg_cli::pipeline::{self, Review, Run};
use forgekg_cli::{run_pipeline, CliError, RunManifest};

use common::{fixture_config, fixtures};

fn forgekg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forgekg"))
        .args(args)
        .env_remove("FORGEKG_CACHE_DIR")
        .output()
        .unwrap()
}

fn fixture_args(out: &Path) -> Vec<String> {
    vec![
        "-c".into(),
        fixtures().join("config.toml").display().to_string(),
        "--output-dir".into(),
        out.display().to_string(),
    ]
}

fn run_cli(out: &Path, extra: &[&str]) -> Output {
    let mut args = fixture_args(out);
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    forgekg(&refs)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn fixture_run_matches_frozen_outputs() {
    let out = tempfile::tempdir().unwrap();
    let (run, manifest) =
        run_pipeline(fixture_config(out.path()), Some("frozen".into()), Review::None, None).unwrap();
    let listed: HashMap<&str, &str> = manifest
        .stages
        .iter()
        .flat_map(|s| &s.outputs)
        .map(|d| (d.path.as_str(), d.sha256.as_str()))
        .collect();
    for name in ["kg.trig", "timeline.csv", "timeline.svg"] {
        let expected = fs::read(fixtures().join("expected").join(name)).unwrap();
        assert_eq!(fs::read(run.path(name)).unwrap(), expected, "{name}");
        assert_eq!(listed[name], sha256_hex(&expected), "{name}");
    }
    let warnings = manifest.warnings_file.as_ref().unwrap();
    assert_eq!(warnings.path, "warnings.json");
    assert_eq!(manifest.warnings.total, 2);
    assert_eq!(manifest.warnings.by_stage["analyze"], 2);

    let reloaded = RunManifest::load(&run.path(pipeline::MANIFEST)).unwrap();
    assert_eq!(reloaded, manifest);
    assert!(reloaded.stale_outputs(&run.dir).is_empty());
    let stages: Vec<&str> = manifest.stages.iter().map(|s| s.stage.as_str()).collect();
    assert_eq!(stages, ["extract", "normalize", "reconcile", "build-kg", "analyze"]);
}

#[test]
fn every_listed_file_exists() {
    let out = tempfile::tempdir().unwrap();
    let (run, _) =
        run_pipeline(fixture_config(out.path()), Some("layout".into()), Review::None, None).unwrap();
    for name in [
        pipeline::EXTRACTION,
        pipeline::NORMALIZED,
        pipeline::RECONCILED,
        pipeline::REVIEW_PENDING,
        pipeline::KG_TRIG,
        pipeline::TIMELINE_CSV,
        pipeline::TIMELINE_SVG,
        pipeline::WARNINGS,
        pipeline::MANIFEST,
    ] {
        assert!(run.path(name).is_file(), "{name} missing");
    }
    assert_eq!(fs::read_to_string(run.path(pipeline::REVIEW_PENDING)).unwrap(), "[]\n");
}

#[test]
fn tampered_output_is_reported_stale() {
    let out = tempfile::tempdir().unwrap();
    let (run, manifest) =
        run_pipeline(fixture_config(out.path()), Some("tamper".into()), Review::None, None).unwrap();
    fs::write(run.path("timeline.csv"), "edited\n").unwrap();
    assert_eq!(manifest.stale_outputs(&run.dir), ["timeline.csv"]);
}

#[test]
fn without_decisions_ambiguous_labels_stay_pending() {
    let out = tempfile::tempdir().unwrap();
    let mut config = fixture_config(out.path());
    config.reconcile.decisions = None;
    let (run, manifest) = run_pipeline(config, Some("pending".into()), Review::None, None).unwrap();
    let pending: Vec<serde_json::Value> =
        serde_json::from_str(&fs::read_to_string(run.path(pipeline::REVIEW_PENDING)).unwrap()).unwrap();
    let labels: Vec<&str> = pending.iter().map(|p| p["raw_label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["Emperor Constantine I", "Rome", "Reginald Pecock"]);
    assert_eq!(manifest.warnings.by_stage["reconcile"], 3);
    assert!(!run.path(pipeline::DECISIONS).exists());
    let trig = fs::read_to_string(run.path(pipeline::KG_TRIG)).unwrap();
    assert!(trig.contains("fk:allegedAuthor \"Emperor Constantine I\""));
}

#[test]
fn threshold_above_one_is_a_config_error() {
    let out = tempfile::tempdir().unwrap();
    let o = run_cli(out.path(), &["--threshold", "1.5", "run"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("threshold"));

    let mut config = fixture_config(out.path());
    config.reconcile.threshold = 1.5;
    let err = run_pipeline(config, None, Review::None, None).err().unwrap();
    assert!(matches!(err, CliError::Config(_)));
}

#[test]
fn missing_corpus_aborts_at_corpus_stage() {
    let out = tempfile::tempdir().unwrap();
    let o = run_cli(out.path(), &["--corpus", "/nonexistent/corpus.jsonl", "run"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("stage `corpus`"), "{}", stderr(&o));
}

#[test]
fn replay_miss_exits_three_and_keeps_partial_artifact() {
    let out = tempfile::tempdir().unwrap();
    let empty = tempfile::tempdir().unwrap();
    let o = run_cli(
        out.path(),
        &["--fixture-dir", &empty.path().display().to_string(), "--run-id", "miss", "extract"],
    );
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("doc-01"), "{}", stderr(&o));
    assert!(out.path().join("miss").join(pipeline::EXTRACTION).is_file());
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(code(&forgekg(&["--help"])), 0);
    assert_eq!(code(&forgekg(&["--version"])), 0);
    assert_eq!(code(&forgekg(&["frobnicate"])), 1);
    assert_eq!(code(&forgekg(&["normalize"])), 1);
}

#[test]
fn staged_commands_reproduce_the_end_to_end_run() {
    let out = tempfile::tempdir().unwrap();
    for stage in [
        vec!["extract"],
        vec!["normalize"],
        vec!["reconcile"],
        vec!["build-kg", "--nquads"],
        vec!["analyze"],
    ] {
        let mut args = vec!["--run-id", "staged"];
        args.extend(stage);
        let o = run_cli(out.path(), &args);
        assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
    }
    let dir = out.path().join("staged");
    for name in ["kg.trig", "timeline.csv", "timeline.svg"] {
        assert_eq!(
            fs::read(dir.join(name)).unwrap(),
            fs::read(fixtures().join("expected").join(name)).unwrap(),
            "{name}"
        );
    }
    let nq = fs::read_to_string(dir.join(pipeline::KG_NQUADS)).unwrap();
    assert_eq!(nq.lines().count(), 98);
}

#[test]
fn interactive_review_reads_choices_from_stdin() {
    let out = tempfile::tempdir().unwrap();
    for stage in ["extract", "normalize"] {
        assert_eq!(code(&run_cli(out.path(), &["--run-id", "tty", stage])), 0);
    }
    let mut args = fixture_args(out.path());
    args.extend(["--run-id", "tty", "reconcile", "--interactive"].map(String::from));
    let mut child = Command::new(env!("CARGO_BIN_EXE_forgekg"))
        .args(&args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    // Constantine: first candidate; Rome: skip; Pecock: reject all
    child.stdin.take().unwrap().write_all(b"1 the emperor\ns\nr\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let dir = out.path().join("tty");
    let decisions: Vec<serde_json::Value> =
        serde_json::from_str(&fs::read_to_string(dir.join(pipeline::DECISIONS)).unwrap()).unwrap();
    assert_eq!(decisions.len(), 2);
    assert_eq!(decisions[0]["chosen"]["wikidata_id"], "Q8413");
    assert_eq!(decisions[0]["reviewer_note"], "the emperor");
    assert_eq!(decisions[1]["chosen"], "REJECT_ALL");
    let pending: Vec<serde_json::Value> =
        serde_json::from_str(&fs::read_to_string(dir.join(pipeline::REVIEW_PENDING)).unwrap()).unwrap();
    assert_eq!(pending.len(), 1);
    assert_eq!(pending[0]["raw_label"], "Rome");
}

#[test]
fn evaluate_prints_three_tables_for_two_runs() {
    let out = tempfile::tempdir().unwrap();
    let (run, _) =
        run_pipeline(fixture_config(out.path()), Some("eval".into()), Review::None, None).unwrap();
    let json = out.path().join("reports.json");
    let dir = run.dir.display().to_string();
    let extraction = run.path(pipeline::EXTRACTION).display().to_string();
    let o = forgekg(&[
        "evaluate",
        "--gold",
        &fixtures().join("gold.json").display().to_string(),
        &dir,
        &extraction,
        "--json",
        &json.display().to_string(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    for heading in ["Metadata extraction", "Claim identification", "Claim categorisation"] {
        assert!(text.contains(heading), "{heading} missing:\n{text}");
    }
    // 7 of 8 gold claims found; Walter McCrone is absent from the fixture text
    assert!(text.contains("1 (12.5%)"), "{text}");
    let reports: Vec<serde_json::Value> = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0]["claim_id"]["correct"], 7);
}

#[test]
fn cache_inspect_and_clear() {
    let root = tempfile::tempdir().unwrap();
    let cache = root.path().join("cache");
    let src = fixtures().join("cache").join("geonames");
    fs::create_dir_all(cache.join("geonames")).unwrap();
    for entry in fs::read_dir(src).unwrap() {
        let entry = entry.unwrap();
        fs::copy(entry.path(), cache.join("geonames").join(entry.file_name())).unwrap();
    }
    let dir = cache.display().to_string();
    let o = forgekg(&["--cache-dir", &dir, "cache", "inspect", "--service", "geonames"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("GeoNames: 3 entries") && text.contains("basel"), "{text}");

    let o = forgekg(&["--cache-dir", &dir, "cache", "clear"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().contains("removed 3"));
}

struct WikiStub(String);

impl HttpClient for WikiStub {
    fn get(&self, url: &str) -> Result<HttpResponse, HttpError> {
        Ok(if url.contains("Vinland") {
            HttpResponse::ok(self.0.clone())
        } else {
            HttpResponse::with_status(404, "")
        })
    }

    fn post_json(&self, url: &str, _: &[(&str, &str)], _: &serde_json::Value) -> Result<HttpResponse, HttpError> {
        self.get(url)
    }
}

#[test]
fn ingest_fills_sections_and_reports_failures() {
    let body = fs::read_to_string(fixtures().join("wiki/vinland_map.json")).unwrap();
    let fetcher = ArticleFetcher::new(Arc::new(WikiStub(body)), "https://en.wikipedia.org/w/api.php");
    let seeds = Corpus::parse(concat!(
        r#"{"id":"vm","source_url":"https://en.wikipedia.org/wiki/Vinland_Map","description":"A map."}"#,
        "\n",
        r#"{"id":"gone","source_url":"https://en.wikipedia.org/wiki/Gone","description":"Lost."}"#,
        "\n",
    ))
    .unwrap();
    let (corpus, warnings) =
        pipeline::ingest_corpus(seeds, &fetcher, forgekg::corpus::DEFAULT_SECTION_KEYWORDS);
    let vm = corpus.get("vm").unwrap();
    assert_eq!(vm.sections.len(), 1);
    assert_eq!(vm.sections[0].heading, "Authenticity debate");
    assert_eq!(vm.title_hint.as_deref(), Some("Vinland Map"));
    assert!(corpus.get("gone").unwrap().sections.is_empty());
    assert_eq!(warnings.len(), 1);
    assert_eq!(warnings[0].entry_id, "gone");
}

#[test]
fn run_ids_are_timestamped_and_unique() {
    let out = tempfile::tempdir().unwrap();
    let a = Run::open(fixture_config(out.path()), None).unwrap();
    let b = Run::open(fixture_config(out.path()), None).unwrap();
    assert_ne!(a.run_id, b.run_id);
    assert!(a.run_id.ends_with('Z') || a.run_id.contains("Z-"), "{}", a.run_id);
    assert!(Run::open(fixture_config(out.path()), Some("../escape".into())).is_err());
}
