use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::vocab;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid IRI `{0}`")]
pub struct IriError(pub String);

/// Absolute IRI: a scheme, a colon, and no characters TriG forbids inside `<…>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(s: impl Into<String>) -> Result<Self, IriError> {
        let s = s.into();
        if is_absolute_iri(&s) {
            Ok(Self(s))
        } else {
            Err(IriError(s))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

fn is_absolute_iri(s: &str) -> bool {
    let Some((scheme, rest)) = s.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        && !rest.is_empty()
        && !s
            .chars()
            .any(|c| c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
}

impl TryFrom<String> for Iri {
    type Error = IriError;

    fn try_from(s: String) -> Result<Self, IriError> {
        Iri::new(s)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> String {
        iri.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LiteralTag {
    Datatype(Iri),
    Language(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub lexical: String,
    pub tag: LiteralTag,
}

impl Literal {
    /// Plain literal, typed `xsd:string`.
    pub fn string(lexical: impl Into<String>) -> Self {
        Self::typed(lexical, vocab::xsd_string())
    }

    pub fn integer(value: i64) -> Self {
        Self::typed(value.to_string(), vocab::xsd_integer())
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Self {
            lexical: lexical.into(),
            tag: LiteralTag::Datatype(datatype),
        }
    }

    pub fn lang(lexical: impl Into<String>, tag: impl Into<String>) -> Self {
        Self {
            lexical: lexical.into(),
            tag: LiteralTag::Language(tag.into().to_ascii_lowercase()),
        }
    }

    pub fn datatype(&self) -> Option<&Iri> {
        match &self.tag {
            LiteralTag::Datatype(d) => Some(d),
            LiteralTag::Language(_) => None,
        }
    }

    pub fn is_plain_string(&self) -> bool {
        self.datatype().is_some_and(|d| d.as_str() == vocab::XSD_STRING)
    }

    pub fn as_integer(&self) -> Option<i64> {
        match self.datatype() {
            Some(d) if d.as_str() == vocab::XSD_INTEGER => self.lexical.parse().ok(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            Term::Iri(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Iri(i)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quad {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
    pub graph: Iri,
}

impl Quad {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>, graph: Iri) -> Self {
        Self {
            subject,
            predicate,
            object: object.into(),
            graph,
        }
    }
}
