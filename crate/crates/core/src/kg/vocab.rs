//! Fixed vocabulary for document and assessment claims.

use super::terms::Iri;

pub const NS: &str = "https://w3id.org/forgekg/vocab#";
pub const BASE: &str = "https://w3id.org/forgekg/";
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

/// Prefixes declared at the top of every serialized document, in order.
pub const PREFIXES: [(&str, &str); 4] = [("fk", NS), ("rdf", RDF), ("rdfs", RDFS), ("xsd", XSD)];

pub const CLASSES: [&str; 6] = [
    "Document",
    "Claim",
    "DocumentClaim",
    "AssessmentClaim",
    "Person",
    "Place",
];

pub const PROPERTIES: [&str; 16] = [
    "assertsAuthenticity",
    "allegedAuthor",
    "allegedDate_start",
    "allegedDate_end",
    "allegedPlace",
    "documentType",
    "title",
    "aboutDocument",
    "claimedBy",
    "hasSource",
    "observesFeature",
    "citesEvidence",
    "opinionText",
    "sameAsWikidata",
    "sameAsVIAF",
    "sameAsGeoNames",
];

pub const CATEGORY_INDIVIDUALS: [&str; 3] = ["authentic", "forgery", "suspicious"];

fn fixed(s: String) -> Iri {
    Iri::new(s).expect("vocabulary IRIs are absolute")
}

/// `fk:{local}`.
pub fn fk(local: &str) -> Iri {
    fixed(format!("{NS}{local}"))
}

pub fn rdf_type() -> Iri {
    fixed(RDF_TYPE.into())
}

pub fn rdfs_label() -> Iri {
    fixed(format!("{RDFS}label"))
}

pub fn xsd_string() -> Iri {
    fixed(XSD_STRING.into())
}

pub fn xsd_integer() -> Iri {
    fixed(XSD_INTEGER.into())
}
