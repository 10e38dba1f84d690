//! Parsing front end.
//!
//! Four small grammars share one lexical profile: `//` line comments,
//! case-sensitive keywords, identifiers `letter (letter | digit | _ | -)*`,
//! decimal integer and float literals with an optional leading minus, and
//! double-quoted strings with `\"` and `\\` escapes. Keywords are matched
//! contextually by the parsers, so a port may be called `state` or `map`.
//!
//! Source unit kinds are keyed by file extension:
//!
//! ```text
//! .arc  component type, optionally with an embedded automaton
//! .cd   class diagram (enums and records)
//! .app  application configuration (generators + bindings)
//! .lib  code library manifest (rte + implementations)
//! ```
//!
//! Parsers stop at the first violation and report it with a stable code:
//! `SYNTAX` for grammar violations, `NAMEMISMATCH` for a declaration whose
//! name contradicts its file name, `DUPLITERAL`, `DUPBINDING` and `DUPIMPL`
//! for in-file duplicates, and `UNSUPPORTED` for constructs that are
//! recognized but deliberately rejected (configuration and generic
//! parameters on component types).

pub mod grammar;
pub mod lexer;
pub mod printer;
pub mod workspace;

use crate::diag::{Diagnostic, Loc};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Architecture,
    ClassDiagram,
    AppConfig,
    LibraryManifest,
}

impl SourceKind {
    pub fn from_extension(ext: &str) -> Option<SourceKind> {
        match ext {
            "arc" => Some(SourceKind::Architecture),
            "cd" => Some(SourceKind::ClassDiagram),
            "app" => Some(SourceKind::AppConfig),
            "lib" => Some(SourceKind::LibraryManifest),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceUnit {
    pub path: String,
    pub kind: SourceKind,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct ParseError {
    pub code: &'static str,
    pub loc: Loc,
    pub message: String,
}

impl ParseError {
    pub fn new(code: &'static str, loc: Loc, message: impl Into<String>) -> Self {
        ParseError {
            code,
            loc,
            message: message.into(),
        }
    }

    pub fn syntax(loc: Loc, message: impl Into<String>) -> Self {
        ParseError::new("SYNTAX", loc, message)
    }

    pub fn to_diagnostic(&self, file: &str) -> Diagnostic {
        Diagnostic::error(self.code, file, self.loc, self.message.clone())
    }
}
