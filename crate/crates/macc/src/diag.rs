//! Source locations and diagnostics.
//!
//! Every diagnostic carries a location inside a loaded source unit and a
//! stable code (`CC1`..`CC12` for the design-time context conditions, plus a
//! small set of parser/loader codes). The rendered form is one line:
//!
//! ```text
//! severity CODE file:line:col message
//! ```
//!
//! Reports sort diagnostics by (file, line, column, code) so golden-file
//! tests are stable across runs and platforms.

use std::fmt;

/// 1-based position inside a source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Loc {
    pub line: u32,
    pub col: u32,
}

impl Loc {
    pub fn new(line: u32, col: u32) -> Self {
        Loc { line, col }
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Warning => write!(f, "warning"),
            Severity::Error => write!(f, "error"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub file: String,
    pub loc: Loc,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: &str, file: &str, loc: Loc, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code: code.to_owned(),
            file: file.to_owned(),
            loc,
            message: message.into(),
        }
    }

    pub fn warning(code: &str, file: &str, loc: Loc, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code: code.to_owned(),
            file: file.to_owned(),
            loc,
            message: message.into(),
        }
    }

    pub fn render(&self) -> String {
        format!(
            "{} {} {}:{} {}",
            self.severity, self.code, self.file, self.loc, self.message
        )
    }
}

/// Outcome of a check pass. `ok` means no errors; warnings do not fail a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckReport {
    pub diagnostics: Vec<Diagnostic>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        !self
            .diagnostics
            .iter()
            .any(|d| d.severity == Severity::Error)
    }

    /// Stable order for rendering: (file, line, column, code).
    pub fn sort(&mut self) {
        self.diagnostics
            .sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for d in &self.diagnostics {
            out.push_str(&d.render());
            out.push('\n');
        }
        out
    }
}

fn sort_key(d: &Diagnostic) -> (&str, u32, u32, &str) {
    (&d.file, d.loc.line, d.loc.col, &d.code)
}

pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));
}
