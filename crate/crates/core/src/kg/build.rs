use std::sync::LazyLock;

use regex::Regex;
use thiserror::Error;

use super::dataset::Dataset;
use super::terms::{Iri, Literal, Quad, Term};
use super::vocab::{self, fk, BASE};
use crate::normalize::{AuthenticityCategory, NormalizedClaim, NormalizedEntry, NormalizedMetadata};
use crate::reconcile::{EntityKind, ReconcileReport, ReconciledEntity};
use crate::text::slugify;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KgError {
    #[error("entry id `{0}` may only contain letters, digits, `_` and `-`")]
    InvalidEntryId(String),
}

static ENTRY_ID: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[A-Za-z0-9_-]+$").unwrap());

fn iri(s: String) -> Iri {
    Iri::new(s).expect("minted IRIs are absolute")
}

pub fn document_iri(entry_id: &str) -> Result<Iri, KgError> {
    mint_iris(entry_id, None).map(|(doc, _)| doc)
}

/// Document IRI plus the named graph for the document claim (`None`) or
/// the assessment claim at `claim_index`.
pub fn mint_iris(entry_id: &str, claim_index: Option<usize>) -> Result<(Iri, Iri), KgError> {
    if !ENTRY_ID.is_match(entry_id) {
        return Err(KgError::InvalidEntryId(entry_id.to_string()));
    }
    let doc = iri(format!("{BASE}doc/{entry_id}"));
    let graph = match claim_index {
        Some(i) => format!("{BASE}claim/{entry_id}/{i}"),
        None => format!("{BASE}claim/{entry_id}/document"),
    };
    Ok((doc, iri(graph)))
}

/// Person or place IRI: the authority id when known, otherwise a label slug.
pub fn entity_iri(entity: &ReconciledEntity) -> Iri {
    let local = match entity.kind {
        EntityKind::Person => entity.wikidata_id.clone().or_else(|| entity.viaf_id.clone().map(|v| format!("viaf-{v}"))),
        EntityKind::Place => entity.geonames_id.clone(),
    }
    .unwrap_or_else(|| slugify(&entity.raw_label));
    let segment = match entity.kind {
        EntityKind::Person => "person",
        EntityKind::Place => "place",
    };
    iri(format!("{BASE}{segment}/{local}"))
}

pub fn category_iri(category: AuthenticityCategory) -> Iri {
    fk(match category {
        AuthenticityCategory::Authentic => "authentic",
        AuthenticityCategory::Forgery => "forgery",
        AuthenticityCategory::Suspicious => "suspicious",
    })
}

pub fn category_of(term: &Term) -> Option<AuthenticityCategory> {
    let iri = term.as_iri()?;
    AuthenticityCategory::ALL
        .into_iter()
        .find(|c| category_iri(*c) == *iri)
}

/// Type, label and sameAs links for a resolved entity.
fn entity_quads(entity: &ReconciledEntity, graph: &Iri) -> Vec<Quad> {
    let subject = entity_iri(entity);
    let class = match entity.kind {
        EntityKind::Person => "Person",
        EntityKind::Place => "Place",
    };
    let mut out = vec![
        Quad::new(subject.clone(), vocab::rdf_type(), fk(class), graph.clone()),
        Quad::new(
            subject.clone(),
            vocab::rdfs_label(),
            Literal::string(&entity.canonical_label),
            graph.clone(),
        ),
    ];
    let links = [
        ("sameAsWikidata", entity.wikidata_id.as_ref().map(|id| format!("http://www.wikidata.org/entity/{id}"))),
        ("sameAsVIAF", entity.viaf_id.as_ref().map(|id| format!("http://viaf.org/viaf/{id}"))),
        ("sameAsGeoNames", entity.geonames_id.as_ref().map(|id| format!("https://sws.geonames.org/{id}/"))),
    ];
    for (prop, target) in links {
        if let Some(target) = target.and_then(|t| Iri::new(t).ok()) {
            out.push(Quad::new(subject.clone(), fk(prop), target, graph.clone()));
        }
    }
    out
}

/// Quads for the document claim. Author and place become IRIs when the
/// reconciled entity carries an authority id, plain literals otherwise.
pub fn build_document_graph(
    entry_id: &str,
    metadata: &NormalizedMetadata,
    author: Option<&ReconciledEntity>,
    place: Option<&ReconciledEntity>,
) -> Result<Vec<Quad>, KgError> {
    let (doc, graph) = mint_iris(entry_id, None)?;
    let mut out = vec![Quad::new(doc.clone(), vocab::rdf_type(), fk("Document"), graph.clone())];
    let mut push = |prop: &str, object: Term| {
        out.push(Quad::new(doc.clone(), fk(prop), object, graph.clone()));
    };
    if let Some(title) = &metadata.title {
        push("title", Literal::string(title).into());
    }
    if let Some(doc_type) = &metadata.doc_type {
        push("documentType", Literal::string(doc_type).into());
    }
    let mut linked = Vec::new();
    for (prop, raw, entity) in [
        ("allegedAuthor", &metadata.alleged_author_raw, author),
        ("allegedPlace", &metadata.alleged_place_raw, place),
    ] {
        let Some(raw) = raw else { continue };
        match entity.filter(|e| e.has_authority_id()) {
            Some(e) => {
                push(prop, entity_iri(e).into());
                linked.push(e);
            }
            None => push(prop, Literal::string(raw).into()),
        }
    }
    if let Some(date) = metadata.alleged_date {
        push("allegedDate_start", Literal::integer(date.start_year().into()).into());
        push("allegedDate_end", Literal::integer(date.end_year().into()).into());
    }
    for e in linked {
        out.extend(entity_quads(e, &graph));
    }
    Ok(out)
}

/// Quads for one assessment claim, in its own named graph.
pub fn build_assessment_graph(
    entry_id: &str,
    claim_index: usize,
    claim: &NormalizedClaim,
    claimant: &ReconciledEntity,
) -> Result<Vec<Quad>, KgError> {
    let (doc, graph) = mint_iris(entry_id, Some(claim_index))?;
    let person = entity_iri(claimant);
    let mut out = vec![
        Quad::new(graph.clone(), vocab::rdf_type(), fk("AssessmentClaim"), graph.clone()),
        Quad::new(graph.clone(), fk("aboutDocument"), doc, graph.clone()),
        Quad::new(graph.clone(), fk("claimedBy"), person, graph.clone()),
        Quad::new(graph.clone(), fk("assertsAuthenticity"), category_iri(claim.category), graph.clone()),
        Quad::new(graph.clone(), fk("opinionText"), Literal::string(&claim.opinion_text), graph.clone()),
    ];
    let lists: [(&str, Vec<&String>); 3] = [
        ("hasSource", claim.source_raw.iter().collect()),
        ("observesFeature", claim.features_observed.iter().collect()),
        ("citesEvidence", claim.evidence.iter().collect()),
    ];
    for (prop, values) in lists {
        for v in values {
            out.push(Quad::new(graph.clone(), fk(prop), Literal::string(v), graph.clone()));
        }
    }
    out.extend(entity_quads(claimant, &graph));
    Ok(out)
}

/// The full dataset for a run: one document graph and one graph per claim
/// for every entry, in corpus order.
pub fn build_dataset(entries: &[NormalizedEntry], report: &ReconcileReport) -> Result<Dataset, KgError> {
    let mut dataset = Dataset::new();
    for entry in entries {
        let author = entry
            .metadata
            .alleged_author_raw
            .as_deref()
            .and_then(|a| report.lookup(EntityKind::Person, a));
        let place = entry
            .metadata
            .alleged_place_raw
            .as_deref()
            .and_then(|p| report.lookup(EntityKind::Place, p));
        dataset.extend(build_document_graph(&entry.entry_id, &entry.metadata, author, place)?);
        for (i, claim) in entry.claims.iter().enumerate() {
            let claimant = report
                .lookup(EntityKind::Person, &claim.claimant_raw)
                .cloned()
                .unwrap_or_else(|| ReconciledEntity::unmatched(&claim.claimant_raw, EntityKind::Person));
            dataset.extend(build_assessment_graph(&entry.entry_id, i, claim, &claimant)?);
        }
    }
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::YearInterval;
    use crate::reconcile::{LifeYears, MatchStatus};

    #[test]
    fn minting() {
        let (doc, g) = mint_iris("doc-01", None).unwrap();
        assert_eq!(doc.as_str(), "https://w3id.org/forgekg/doc/doc-01");
        assert_eq!(g.as_str(), "https://w3id.org/forgekg/claim/doc-01/document");
        let (_, g) = mint_iris("doc-01", Some(0)).unwrap();
        assert_eq!(g.as_str(), "https://w3id.org/forgekg/claim/doc-01/0");
        assert_eq!(mint_iris("doc 01", Some(0)), Err(KgError::InvalidEntryId("doc 01".into())));
    }

    #[test]
    fn empty_metadata_is_one_quad() {
        let q = build_document_graph("d", &NormalizedMetadata::default(), None, None).unwrap();
        assert_eq!(q.len(), 1);
        let meta = NormalizedMetadata {
            title: Some("T".into()),
            ..Default::default()
        };
        assert_eq!(build_document_graph("d", &meta, None, None).unwrap().len(), 2);
    }

    #[test]
    fn fourth_century_charter() {
        let meta = NormalizedMetadata {
            doc_type: Some("charter".into()),
            alleged_date: YearInterval::new(300, 399),
            alleged_author_raw: Some("Constantine".into()),
            ..Default::default()
        };
        let author = ReconciledEntity {
            raw_label: "Constantine".into(),
            kind: EntityKind::Person,
            wikidata_id: Some("Q8413".into()),
            viaf_id: None,
            geonames_id: None,
            canonical_label: "Constantine the Great".into(),
            life_years: LifeYears::new(272, 337),
            status: MatchStatus::AutoMatched,
        };
        let quads = build_document_graph("doc-01", &meta, Some(&author), None).unwrap();
        let has = |p: &str, o: Term| quads.iter().any(|q| q.predicate == fk(p) && q.object == o);
        assert!(has("allegedDate_start", Literal::integer(300).into()));
        assert!(has("allegedDate_end", Literal::integer(399).into()));
        assert!(has("documentType", Literal::string("charter").into()));
        assert!(has("allegedAuthor", entity_iri(&author).into()));
        assert!(quads.iter().all(|q| q.graph.as_str().ends_with("/doc-01/document")));
    }

    #[test]
    fn unmatched_claimant_and_evidence() {
        let mut claim = NormalizedClaim::new("Lorenzo Valla", AuthenticityCategory::Forgery, "a forgery");
        claim.evidence = vec!["anachronistic Latin".into(), "satrap".into()];
        let claimant = ReconciledEntity::unmatched("Lorenzo Valla", EntityKind::Person);
        let quads = build_assessment_graph("doc-01", 1, &claim, &claimant).unwrap();
        let count = |p: &str| quads.iter().filter(|q| q.predicate == fk(p)).count();
        assert_eq!(count("citesEvidence"), 2);
        assert_eq!(count("assertsAuthenticity"), 1);
        assert_eq!(count("claimedBy"), 1);
        assert_eq!(count("sameAsWikidata") + count("sameAsVIAF") + count("sameAsGeoNames"), 0);
        let by = quads.iter().find(|q| q.predicate == fk("claimedBy")).unwrap();
        assert_eq!(by.object, Term::Iri(iri(format!("{BASE}person/lorenzo-valla"))));
        let cat = quads.iter().find(|q| q.predicate == fk("assertsAuthenticity")).unwrap();
        assert_eq!(category_of(&cat.object), Some(AuthenticityCategory::Forgery));
    }
}
