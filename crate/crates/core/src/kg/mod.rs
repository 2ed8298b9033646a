//! Claims as RDF named graphs: IRI minting, graph building, TriG and N-Quads.

mod build;
mod dataset;
mod terms;
mod trig;
pub mod vocab;

pub use build::{
    build_assessment_graph, build_dataset, build_document_graph, category_iri, category_of,
    document_iri, entity_iri, mint_iris, KgError,
};
pub use dataset::Dataset;
pub use terms::{Iri, IriError, Literal, LiteralTag, Quad, Term};
pub use trig::{parse_trig, serialize_nquads, serialize_trig, TrigError};

/// Quads matching every bound position of the pattern, in insertion order.
pub fn match_quads<'a>(
    dataset: &'a Dataset,
    subject: Option<&Iri>,
    predicate: Option<&Iri>,
    object: Option<&Term>,
    graph: Option<&Iri>,
) -> Vec<&'a Quad> {
    dataset.match_quads(subject, predicate, object, graph)
}
