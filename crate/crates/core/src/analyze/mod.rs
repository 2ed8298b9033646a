//! Summary statistics and the claimant-century timeline.

mod svg;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::kg::{category_of, entity_iri, vocab, Dataset, Iri, Term};
use crate::normalize::{century_of_interval, AuthenticityCategory, YearInterval};
use crate::reconcile::{EntityKind, LifeYears, ReconcileReport};

pub use svg::{render_svg, PALETTE};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub claim_count: usize,
    pub document_count: usize,
    pub claimant_count: usize,
}

fn assessment_graphs(dataset: &Dataset) -> Vec<&Iri> {
    let class = Term::Iri(vocab::fk("AssessmentClaim"));
    let rdf_type = vocab::rdf_type();
    let mut seen = HashSet::new();
    dataset
        .iter()
        .filter(|q| q.predicate == rdf_type && q.object == class && q.subject == q.graph)
        .filter(|q| seen.insert(&q.graph))
        .map(|q| &q.graph)
        .collect()
}

/// Counts assessment graphs, distinct documents they are about, and distinct claimants.
pub fn summary_stats(dataset: &Dataset) -> SummaryStats {
    let distinct = |prop: &str| {
        let p = vocab::fk(prop);
        dataset
            .iter()
            .filter(|q| q.predicate == p)
            .map(|q| &q.object)
            .collect::<HashSet<_>>()
            .len()
    };
    SummaryStats {
        claim_count: assessment_graphs(dataset).len(),
        document_count: distinct("aboutDocument"),
        claimant_count: distinct("claimedBy"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelinePoint {
    pub document_id: String,
    pub claimant_label: String,
    pub century: i32,
    pub category: AuthenticityCategory,
}

/// An assessment claim left off the timeline because its claimant has no life dates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedClaim {
    pub graph: String,
    pub document_id: String,
    pub claimant_label: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timeline {
    pub points: Vec<TimelinePoint>,
    pub skipped: Vec<SkippedClaim>,
}

/// Life years per claimant IRI, from reconciled persons.
pub fn life_dates_by_iri(report: &ReconcileReport) -> HashMap<Iri, LifeYears> {
    report
        .entities
        .iter()
        .filter(|e| e.kind == EntityKind::Person)
        .filter_map(|e| Some((entity_iri(e), e.life_years?)))
        .collect()
}

fn last_segment(iri: &Iri) -> String {
    iri.as_str()
        .rsplit(['/', '#'])
        .next()
        .unwrap_or_default()
        .to_string()
}

/// One point per assessment graph whose claimant has life dates, in graph order.
pub fn timeline(dataset: &Dataset, life_dates: &HashMap<Iri, LifeYears>) -> Timeline {
    let about = vocab::fk("aboutDocument");
    let claimed_by = vocab::fk("claimedBy");
    let asserts = vocab::fk("assertsAuthenticity");
    let label = vocab::rdfs_label();
    let mut out = Timeline::default();
    for graph in assessment_graphs(dataset) {
        let object = |subject: &Iri, predicate: &Iri| {
            dataset
                .match_quads(Some(subject), Some(predicate), None, Some(graph))
                .first()
                .map(|q| q.object.clone())
        };
        let Some(claimant) = object(graph, &claimed_by).and_then(|t| t.as_iri().cloned()) else {
            continue;
        };
        let document_id = object(graph, &about)
            .and_then(|t| t.as_iri().map(last_segment))
            .unwrap_or_default();
        let claimant_label = object(&claimant, &label)
            .and_then(|t| t.as_literal().map(|l| l.lexical.clone()))
            .unwrap_or_else(|| last_segment(&claimant));
        let Some(category) = object(graph, &asserts).as_ref().and_then(category_of) else {
            continue;
        };
        let century = life_dates
            .get(&claimant)
            .and_then(|l| YearInterval::new(l.birth, l.death))
            .map(century_of_interval);
        match century {
            Some(century) => out.points.push(TimelinePoint {
                document_id,
                claimant_label,
                century,
                category,
            }),
            None => out.skipped.push(SkippedClaim {
                graph: graph.as_str().to_string(),
                document_id,
                claimant_label,
            }),
        }
    }
    out
}

pub fn render_csv(points: &[TimelinePoint]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["document_id", "claimant", "century", "category"])
        .expect("writing to memory");
    for p in points {
        w.write_record([
            p.document_id.as_str(),
            p.claimant_label.as_str(),
            &p.century.to_string(),
            p.category.label(),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is UTF-8")
}

/// Writes the CSV table and the SVG scatter plot.
pub fn emit_scatter(points: &[TimelinePoint], csv_path: &Path, svg_path: &Path) -> io::Result<()> {
    fs::write(csv_path, render_csv(points))?;
    fs::write(svg_path, render_svg(points))
}

/// Document ids in row order: sorted, deduplicated.
pub(crate) fn document_rows(points: &[TimelinePoint]) -> Vec<&str> {
    points
        .iter()
        .map(|p| p.document_id.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}
