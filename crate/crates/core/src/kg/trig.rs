//! TriG output and a parser for the subset it produces.

use std::collections::HashMap;
use std::fmt::Write as _;

use indexmap::IndexMap;
use thiserror::Error;

use super::dataset::Dataset;
use super::terms::{Iri, Literal, LiteralTag, Quad, Term};
use super::vocab::{self, PREFIXES};

fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn write_iri(out: &mut String, iri: &Iri) {
    for (prefix, ns) in PREFIXES {
        if let Some(local) = iri.as_str().strip_prefix(ns) {
            if is_safe_local(local) {
                let _ = write!(out, "{prefix}:{local}");
                return;
            }
        }
    }
    let _ = write!(out, "{iri}");
}

fn write_literal(out: &mut String, lit: &Literal) {
    out.push_str(&escape_string(&lit.lexical));
    match &lit.tag {
        LiteralTag::Language(tag) => {
            let _ = write!(out, "@{tag}");
        }
        LiteralTag::Datatype(d) if d.as_str() == vocab::XSD_STRING => {}
        LiteralTag::Datatype(d) => {
            out.push_str("^^");
            write_iri(out, d);
        }
    }
}

fn write_term(out: &mut String, term: &Term) {
    match term {
        Term::Iri(i) => write_iri(out, i),
        Term::Literal(l) => write_literal(out, l),
    }
}

/// Serializes with graphs, subjects and predicates in first-insertion order.
pub fn serialize_trig(dataset: &Dataset) -> String {
    let mut out = String::new();
    for (prefix, ns) in PREFIXES {
        let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
    }
    let mut graphs: IndexMap<&Iri, IndexMap<&Iri, Vec<&Quad>>> = IndexMap::new();
    for q in dataset {
        graphs
            .entry(&q.graph)
            .or_default()
            .entry(&q.subject)
            .or_default()
            .push(q);
    }
    for (graph, subjects) in graphs {
        out.push('\n');
        write_iri(&mut out, graph);
        out.push_str(" {\n");
        for (subject, quads) in subjects {
            out.push_str("    ");
            write_iri(&mut out, subject);
            for (i, q) in quads.iter().enumerate() {
                out.push_str(if i == 0 { " " } else { " ;\n        " });
                if q.predicate.as_str() == vocab::RDF_TYPE {
                    out.push('a');
                } else {
                    write_iri(&mut out, &q.predicate);
                }
                out.push(' ');
                write_term(&mut out, &q.object);
            }
            out.push_str(" .\n");
        }
        out.push_str("}\n");
    }
    out
}

/// One quad per line, full IRIs, graph in fourth position.
pub fn serialize_nquads(dataset: &Dataset) -> String {
    let mut out = String::new();
    for q in dataset {
        let _ = write!(out, "{} {} ", q.subject, q.predicate);
        match &q.object {
            Term::Iri(i) => {
                let _ = write!(out, "{i}");
            }
            Term::Literal(l) => {
                out.push_str(&escape_string(&l.lexical));
                match &l.tag {
                    LiteralTag::Language(t) => {
                        let _ = write!(out, "@{t}");
                    }
                    LiteralTag::Datatype(d) if d.as_str() == vocab::XSD_STRING => {}
                    LiteralTag::Datatype(d) => {
                        let _ = write!(out, "^^{d}");
                    }
                }
            }
        }
        let _ = writeln!(out, " {} .", q.graph);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrigError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undeclared prefix `{prefix}:` at {line}:{column}")]
    UndeclaredPrefix {
        prefix: String,
        line: usize,
        column: usize,
    },
    #[error("unsupported construct at {line}:{column}: {construct}")]
    Unsupported {
        construct: String,
        line: usize,
        column: usize,
    },
    #[error("invalid IRI `{iri}` at {line}:{column}")]
    InvalidIri {
        iri: String,
        line: usize,
        column: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    AtPrefix,
    SparqlPrefix,
    IriRef(String),
    PName(String, String),
    A,
    Str(String),
    LangTag(String),
    Integer(String),
    Caret2,
    LBrace,
    RBrace,
    Dot,
    Semi,
    Comma,
    Graph,
    Eof,
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn syntax(&self, pos: Pos, message: impl Into<String>) -> TrigError {
        TrigError::Syntax {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }

    fn unsupported(pos: Pos, construct: &str) -> TrigError {
        TrigError::Unsupported {
            construct: construct.into(),
            line: pos.line,
            column: pos.column,
        }
    }

    fn skip_ws(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while self.chars.peek().is_some_and(|&c| c != '\n') {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn word(&mut self) -> String {
        let name_char = |c: char| c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '%' | '\\');
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if name_char(c) {
                s.push(c);
                self.bump();
            } else if c == '.' {
                // a dot belongs to the name only when more name follows
                let mut look = self.chars.clone();
                look.next();
                if look.peek().is_some_and(|&n| name_char(n) && n != ':') {
                    s.push(c);
                    self.bump();
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        s
    }

    fn next(&mut self) -> Result<(Tok, Pos), TrigError> {
        self.skip_ws();
        let pos = self.pos();
        let Some(&c) = self.chars.peek() else {
            return Ok((Tok::Eof, pos));
        };
        let tok = match c {
            '<' => {
                self.bump();
                if self.chars.peek() == Some(&'<') {
                    return Err(Self::unsupported(pos, "quoted triple"));
                }
                let mut iri = String::new();
                loop {
                    match self.bump() {
                        Some('>') => break,
                        Some(c) if c != '\n' => iri.push(c),
                        _ => return Err(self.syntax(pos, "unterminated IRI")),
                    }
                }
                Tok::IriRef(iri)
            }
            '"' => {
                self.bump();
                Tok::Str(self.string_body(pos)?)
            }
            '\'' => return Err(Self::unsupported(pos, "single-quoted string")),
            '{' => {
                self.bump();
                Tok::LBrace
            }
            '}' => {
                self.bump();
                Tok::RBrace
            }
            '.' => {
                self.bump();
                Tok::Dot
            }
            ';' => {
                self.bump();
                Tok::Semi
            }
            ',' => {
                self.bump();
                Tok::Comma
            }
            '[' => return Err(Self::unsupported(pos, "blank node")),
            '(' => return Err(Self::unsupported(pos, "collection")),
            '^' => {
                self.bump();
                if self.bump() != Some('^') {
                    return Err(self.syntax(pos, "expected `^^`"));
                }
                Tok::Caret2
            }
            '@' => {
                self.bump();
                let w = self.word();
                match w.as_str() {
                    "prefix" => Tok::AtPrefix,
                    "base" => return Err(Self::unsupported(pos, "@base")),
                    "" => return Err(self.syntax(pos, "expected a directive or language tag")),
                    _ => Tok::LangTag(w.to_ascii_lowercase()),
                }
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' => {
                let mut s = String::new();
                s.push(c);
                self.bump();
                while let Some(&d) = self.chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if s.len() == 1 && !c.is_ascii_digit() {
                    return Err(self.syntax(pos, format!("unexpected `{c}`")));
                }
                if matches!(self.chars.peek(), Some('.' | 'e' | 'E')) {
                    let mut look = self.chars.clone();
                    look.next();
                    if look.peek().is_some_and(char::is_ascii_digit) {
                        return Err(Self::unsupported(pos, "decimal or double shorthand"));
                    }
                }
                Tok::Integer(s.trim_start_matches('+').to_string())
            }
            c if c.is_alphabetic() || c == '_' || c == ':' => {
                let w = self.word();
                if w.starts_with("_:") {
                    return Err(Self::unsupported(pos, "blank node"));
                }
                match w.as_str() {
                    "a" => Tok::A,
                    "PREFIX" | "prefix" => Tok::SparqlPrefix,
                    "GRAPH" | "graph" => Tok::Graph,
                    "true" | "false" => return Err(Self::unsupported(pos, "boolean shorthand")),
                    "BASE" | "base" => return Err(Self::unsupported(pos, "BASE")),
                    _ => match w.split_once(':') {
                        Some((p, l)) => Tok::PName(p.to_string(), l.replace('\\', "")),
                        None => return Err(self.syntax(pos, format!("unexpected word `{w}`"))),
                    },
                }
            }
            other => return Err(self.syntax(pos, format!("unexpected character `{other}`"))),
        };
        Ok((tok, pos))
    }

    fn string_body(&mut self, start: Pos) -> Result<String, TrigError> {
        if self.chars.peek() == Some(&'"') {
            let mut look = self.chars.clone();
            look.next();
            if look.peek() == Some(&'"') {
                return Err(Self::unsupported(start, "long string"));
            }
        }
        let mut s = String::new();
        loop {
            let pos = self.pos();
            match self.bump() {
                None | Some('\n') => return Err(self.syntax(start, "unterminated string")),
                Some('"') => return Ok(s),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('r') => s.push('\r'),
                    Some('t') => s.push('\t'),
                    Some('b') => s.push('\u{8}'),
                    Some('f') => s.push('\u{c}'),
                    Some('"') => s.push('"'),
                    Some('\'') => s.push('\''),
                    Some('\\') => s.push('\\'),
                    Some(u @ ('u' | 'U')) => {
                        let n = if u == 'u' { 4 } else { 8 };
                        let hex: String = (0..n).filter_map(|_| self.bump()).collect();
                        let c = u32::from_str_radix(&hex, 16)
                            .ok()
                            .and_then(char::from_u32)
                            .ok_or_else(|| self.syntax(pos, "bad unicode escape"))?;
                        s.push(c);
                    }
                    _ => return Err(self.syntax(pos, "bad escape")),
                },
                Some(c) => s.push(c),
            }
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<(Tok, Pos)>,
    prefixes: HashMap<String, String>,
    dataset: Dataset,
}

impl Parser<'_> {
    fn peek(&mut self) -> Result<&(Tok, Pos), TrigError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next()?);
        }
        Ok(self.peeked.as_ref().expect("just filled"))
    }

    fn next(&mut self) -> Result<(Tok, Pos), TrigError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Pos, TrigError> {
        let (tok, pos) = self.next()?;
        if tok == want {
            Ok(pos)
        } else {
            Err(self.lexer.syntax(pos, format!("expected {what}, found {}", describe(&tok))))
        }
    }

    fn make_iri(&self, s: String, pos: Pos) -> Result<Iri, TrigError> {
        Iri::new(s).map_err(|e| TrigError::InvalidIri {
            iri: e.0,
            line: pos.line,
            column: pos.column,
        })
    }

    fn resolve(&self, tok: Tok, pos: Pos, role: &str) -> Result<Iri, TrigError> {
        match tok {
            Tok::IriRef(s) => self.make_iri(s, pos),
            Tok::PName(p, l) => {
                let ns = self.prefixes.get(&p).ok_or_else(|| TrigError::UndeclaredPrefix {
                    prefix: p.clone(),
                    line: pos.line,
                    column: pos.column,
                })?;
                self.make_iri(format!("{ns}{l}"), pos)
            }
            other => Err(self
                .lexer
                .syntax(pos, format!("expected {role}, found {}", describe(&other)))),
        }
    }

    fn prefix_directive(&mut self, sparql_style: bool) -> Result<(), TrigError> {
        let (tok, pos) = self.next()?;
        let Tok::PName(prefix, local) = tok else {
            return Err(self.lexer.syntax(pos, "expected a prefix name"));
        };
        if !local.is_empty() {
            return Err(self.lexer.syntax(pos, "prefix name must end with `:`"));
        }
        let (tok, pos) = self.next()?;
        let Tok::IriRef(ns) = tok else {
            return Err(self.lexer.syntax(pos, "expected a namespace IRI"));
        };
        let ns = self.make_iri(ns, pos)?;
        self.prefixes.insert(prefix, ns.as_str().to_string());
        if !sparql_style {
            self.expect(Tok::Dot, "`.` after @prefix")?;
        }
        Ok(())
    }

    fn object(&mut self) -> Result<Term, TrigError> {
        let (tok, pos) = self.next()?;
        match tok {
            Tok::Str(lexical) => {
                let tag = match self.peek()?.0 {
                    Tok::LangTag(_) => {
                        let Tok::LangTag(t) = self.next()?.0 else { unreachable!() };
                        LiteralTag::Language(t)
                    }
                    Tok::Caret2 => {
                        self.next()?;
                        let (tok, pos) = self.next()?;
                        LiteralTag::Datatype(self.resolve(tok, pos, "a datatype IRI")?)
                    }
                    _ => LiteralTag::Datatype(vocab::xsd_string()),
                };
                Ok(Term::Literal(Literal { lexical, tag }))
            }
            Tok::Integer(n) => Ok(Term::Literal(Literal::typed(n, vocab::xsd_integer()))),
            other => Ok(Term::Iri(self.resolve(other, pos, "an object")?)),
        }
    }

    fn triples(&mut self, graph: &Iri, subject: Iri) -> Result<(), TrigError> {
        loop {
            let (tok, pos) = self.next()?;
            let predicate = match tok {
                Tok::A => vocab::rdf_type(),
                other => self.resolve(other, pos, "a predicate")?,
            };
            loop {
                let object = self.object()?;
                self.dataset
                    .insert(Quad::new(subject.clone(), predicate.clone(), object, graph.clone()));
                if self.peek()?.0 == Tok::Comma {
                    self.next()?;
                } else {
                    break;
                }
            }
            match self.peek()?.0 {
                Tok::Semi => {
                    self.next()?;
                    // trailing `;` before the terminator is allowed
                    while self.peek()?.0 == Tok::Semi {
                        self.next()?;
                    }
                    if matches!(self.peek()?.0, Tok::Dot | Tok::RBrace) {
                        break;
                    }
                }
                _ => break,
            }
        }
        Ok(())
    }

    fn graph_block(&mut self, graph: Iri, open: Pos) -> Result<(), TrigError> {
        loop {
            let (tok, pos) = self.next()?;
            match tok {
                Tok::RBrace => return Ok(()),
                Tok::Eof => {
                    return Err(self.lexer.syntax(open, "graph block is never closed"));
                }
                other => {
                    let subject = self.resolve(other, pos, "a subject or `}`")?;
                    self.triples(&graph, subject)?;
                    match self.peek()?.0 {
                        Tok::Dot => {
                            self.next()?;
                        }
                        Tok::RBrace => {}
                        _ => {
                            let (tok, pos) = self.next()?;
                            return Err(self.lexer.syntax(
                                pos,
                                format!("expected `.` or `}}`, found {}", describe(&tok)),
                            ));
                        }
                    }
                }
            }
        }
    }

    fn document(&mut self) -> Result<(), TrigError> {
        loop {
            let (tok, pos) = self.next()?;
            match tok {
                Tok::Eof => return Ok(()),
                Tok::AtPrefix => self.prefix_directive(false)?,
                Tok::SparqlPrefix => self.prefix_directive(true)?,
                Tok::Graph => {
                    let (tok, pos) = self.next()?;
                    let graph = self.resolve(tok, pos, "a graph name")?;
                    let open = self.expect(Tok::LBrace, "`{`")?;
                    self.graph_block(graph, open)?;
                }
                Tok::LBrace => {
                    return Err(Lexer::unsupported(pos, "default graph block"));
                }
                other => {
                    let name = self.resolve(other, pos, "a graph name")?;
                    match self.next()? {
                        (Tok::LBrace, open) => self.graph_block(name, open)?,
                        (_, pos) => {
                            return Err(Lexer::unsupported(pos, "triples outside a named graph"));
                        }
                    }
                }
            }
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Eof => "end of input".into(),
        Tok::IriRef(s) => format!("<{s}>"),
        Tok::PName(p, l) => format!("`{p}:{l}`"),
        Tok::Str(_) => "a string".into(),
        other => format!("{other:?}"),
    }
}

/// Parses TriG written in the subset [`serialize_trig`] emits: prefix
/// directives, named graph blocks, `a`, `;`, `,`, and plain, typed or
/// language-tagged literals.
pub fn parse_trig(text: &str) -> Result<Dataset, TrigError> {
    let mut parser = Parser {
        lexer: Lexer::new(text),
        peeked: None,
        prefixes: HashMap::new(),
        dataset: Dataset::new(),
    };
    parser.document()?;
    Ok(parser.dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::vocab::fk;
    use proptest::prelude::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn sample() -> Dataset {
        let g = iri("https://w3id.org/forgekg/claim/doc-01/0");
        let s = iri("https://w3id.org/forgekg/claim/doc-01/0");
        [
            Quad::new(s.clone(), vocab::rdf_type(), fk("AssessmentClaim"), g.clone()),
            Quad::new(s.clone(), fk("opinionText"), Literal::string("said \"no\"\ntwice\\"), g.clone()),
            Quad::new(s.clone(), fk("allegedDate_start"), Literal::integer(-50), g.clone()),
            Quad::new(s.clone(), vocab::rdfs_label(), Literal::lang("Valla", "en"), g.clone()),
            Quad::new(iri("http://example.org/x.y"), fk("claimedBy"), iri("urn:isbn:1"), g),
        ]
        .into_iter()
        .collect()
    }

    #[test]
    fn empty_dataset_is_prefixes_only() {
        let text = serialize_trig(&Dataset::new());
        assert_eq!(text.lines().count(), PREFIXES.len());
        assert!(text.lines().all(|l| l.starts_with("@prefix ")));
        assert!(parse_trig(&text).unwrap().is_empty());
    }

    #[test]
    fn single_quad_one_block() {
        let g = iri("https://w3id.org/forgekg/claim/d/document");
        let d: Dataset = [Quad::new(
            iri("https://w3id.org/forgekg/doc/d"),
            vocab::rdf_type(),
            fk("Document"),
            g,
        )]
        .into_iter()
        .collect();
        let text = serialize_trig(&d);
        assert!(text.ends_with(
            "\n<https://w3id.org/forgekg/claim/d/document> {\n    <https://w3id.org/forgekg/doc/d> a fk:Document .\n}\n"
        ));
    }

    #[test]
    fn round_trip_and_fixed_point() {
        let d = sample();
        let text = serialize_trig(&d);
        let back = parse_trig(&text).unwrap();
        assert!(back.set_eq(&d));
        assert_eq!(serialize_trig(&back), text);
    }

    #[test]
    fn accepts_hand_written_variants() {
        let text = r#"
            PREFIX fk: <https://w3id.org/forgekg/vocab#>
            # a comment
            GRAPH <urn:g> { <urn:s> fk:p "a", "b" ; fk:q 12 ; . }
            <urn:g2> { <urn:s> a fk:Claim }
        "#;
        let d = parse_trig(text).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d.graphs().len(), 2);
    }

    fn err_pos(e: &TrigError) -> (usize, usize) {
        match e {
            TrigError::Syntax { line, column, .. }
            | TrigError::UndeclaredPrefix { line, column, .. }
            | TrigError::Unsupported { line, column, .. }
            | TrigError::InvalidIri { line, column, .. } => (*line, *column),
        }
    }

    #[test]
    fn unclosed_block_reports_position() {
        let e = parse_trig("@prefix fk: <https://w3id.org/forgekg/vocab#> .\n<urn:g> {\n  <urn:s> a fk:Claim .\n")
            .unwrap_err();
        assert!(matches!(e, TrigError::Syntax { .. }));
        assert_eq!(err_pos(&e), (2, 9));
    }

    #[test]
    fn undeclared_prefix_named() {
        let e = parse_trig("<urn:g> { <urn:s> ex:p <urn:o> . }").unwrap_err();
        assert_eq!(
            e,
            TrigError::UndeclaredPrefix { prefix: "ex".into(), line: 1, column: 19 }
        );
        assert!(e.to_string().contains("ex:"));
    }

    #[test]
    fn unsupported_constructs() {
        for text in [
            "<urn:g> { _:b <urn:p> <urn:o> . }",
            "<urn:g> { <urn:s> <urn:p> [ <urn:q> <urn:o> ] . }",
            "<urn:g> { <urn:s> <urn:p> ( <urn:o> ) . }",
            "<urn:g> { << <urn:a> <urn:b> <urn:c> >> <urn:p> <urn:o> . }",
            "<urn:s> <urn:p> <urn:o> .",
            "{ <urn:s> <urn:p> <urn:o> . }",
        ] {
            assert!(
                matches!(parse_trig(text), Err(TrigError::Unsupported { .. })),
                "{text}"
            );
        }
        assert!(matches!(
            parse_trig("<urn:g> { <rel> <urn:p> <urn:o> . }"),
            Err(TrigError::InvalidIri { .. })
        ));
    }

    #[test]
    fn nquads_lines() {
        let text = serialize_nquads(&sample());
        assert_eq!(text.lines().count(), 5);
        assert!(text.contains("\"-50\"^^<http://www.w3.org/2001/XMLSchema#integer>"));
        assert!(text.contains("\"Valla\"@en"));
    }

    fn arb_iri() -> impl Strategy<Value = Iri> {
        prop_oneof![
            "[a-z]{1,6}".prop_map(|l| fk(&l)),
            "[a-z0-9/._-]{1,12}".prop_map(|p| iri(&format!("https://example.org/{p}"))),
            "[A-Za-z0-9]{1,5}".prop_map(|p| iri(&format!("{}{p}", vocab::NS))),
        ]
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        prop_oneof![
            arb_iri().prop_map(Term::Iri),
            any::<String>().prop_map(|s| Term::Literal(Literal::string(s))),
            any::<i64>().prop_map(|n| Term::Literal(Literal::integer(n))),
            ("\\PC{0,10}", "[a-z]{2}(-[a-z]{2})?").prop_map(|(s, t)| Term::Literal(Literal::lang(s, t))),
        ]
    }

    proptest! {
        #[test]
        fn serialization_fixed_point(quads in prop::collection::vec((arb_iri(), arb_iri(), arb_term(), arb_iri()), 0..25)) {
            let d: Dataset = quads.into_iter().map(|(s, p, o, g)| Quad::new(s, p, o, g)).collect();
            let text = serialize_trig(&d);
            let back = parse_trig(&text).unwrap();
            prop_assert!(back.set_eq(&d));
            prop_assert_eq!(serialize_trig(&back), text);
        }

        #[test]
        fn wildcard_match_is_everything(quads in prop::collection::vec((arb_iri(), arb_iri(), arb_term(), arb_iri()), 0..25)) {
            let d: Dataset = quads.into_iter().map(|(s, p, o, g)| Quad::new(s, p, o, g)).collect();
            prop_assert_eq!(d.match_quads(None, None, None, None).len(), d.len());
            let first = d.iter().next().cloned();
            if let Some(first) = first {
                let hits: Vec<Quad> = d
                    .match_quads(Some(&first.subject), None, None, Some(&first.graph))
                    .into_iter()
                    .cloned()
                    .collect();
                prop_assert!(hits.iter().all(|q| d.contains(q)));
                prop_assert!(!hits.is_empty());
            }
        }
    }
}
