use indexmap::IndexSet;

use super::terms::{Iri, Quad, Term};

/// Duplicate-free quad set that remembers insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    quads: IndexSet<Quad>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when the quad was already present.
    pub fn insert(&mut self, quad: Quad) -> bool {
        self.quads.insert(quad)
    }

    pub fn len(&self) -> usize {
        self.quads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quads.is_empty()
    }

    pub fn contains(&self, quad: &Quad) -> bool {
        self.quads.contains(quad)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Quad> {
        self.quads.iter()
    }

    /// Graph names in first-insertion order.
    pub fn graphs(&self) -> Vec<&Iri> {
        let mut seen = IndexSet::new();
        for q in &self.quads {
            seen.insert(&q.graph);
        }
        seen.into_iter().collect()
    }

    /// Quads matching every bound position, in insertion order.
    pub fn match_quads(
        &self,
        subject: Option<&Iri>,
        predicate: Option<&Iri>,
        object: Option<&Term>,
        graph: Option<&Iri>,
    ) -> Vec<&Quad> {
        self.quads
            .iter()
            .filter(|q| subject.is_none_or(|s| &q.subject == s))
            .filter(|q| predicate.is_none_or(|p| &q.predicate == p))
            .filter(|q| object.is_none_or(|o| &q.object == o))
            .filter(|q| graph.is_none_or(|g| &q.graph == g))
            .collect()
    }

    /// Same quads regardless of order.
    pub fn set_eq(&self, other: &Dataset) -> bool {
        self.len() == other.len() && self.quads.iter().all(|q| other.contains(q))
    }
}

impl Extend<Quad> for Dataset {
    fn extend<T: IntoIterator<Item = Quad>>(&mut self, iter: T) {
        self.quads.extend(iter);
    }
}

impl FromIterator<Quad> for Dataset {
    fn from_iter<T: IntoIterator<Item = Quad>>(iter: T) -> Self {
        Self {
            quads: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Quad;
    type IntoIter = indexmap::set::Iter<'a, Quad>;

    fn into_iter(self) -> Self::IntoIter {
        self.quads.iter()
    }
}
