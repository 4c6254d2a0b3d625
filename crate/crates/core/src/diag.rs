//! Source spans and diagnostics shared by the parser, resolver, validator and
//! analyzer.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// A 1-based source region. Synthetic model elements (built in code rather
/// than parsed) carry [`SourceSpan::default`], whose line numbers are 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SourceSpan {
    pub file: Arc<str>,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn new(file: Arc<str>, start: (u32, u32), end: (u32, u32)) -> Self {
        SourceSpan { file, start_line: start.0, start_col: start.1, end_line: end.0, end_col: end.1 }
    }

    /// Smallest span covering both `self` and `other` (same file assumed).
    pub fn to(&self, other: &SourceSpan) -> SourceSpan {
        let start = (self.start_line, self.start_col).min((other.start_line, other.start_col));
        let end = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        SourceSpan::new(self.file.clone(), start, end)
    }

    pub fn is_synthetic(&self) -> bool {
        self.start_line == 0
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_synthetic() {
            write!(f, "{}", if self.file.is_empty() { "<model>" } else { &self.file })
        } else {
            write!(f, "{}:{}:{}", self.file, self.start_line, self.start_col)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        })
    }
}

macro_rules! codes {
    ($($variant:ident => $text:literal, $sev:ident, $doc:literal;)*) => {
        /// The frozen diagnostic catalog.
        ///
        /// `E1xx` component files, `E2xx` system files and resolution,
        /// `E3xx` validation rules, `W4xx` analysis and wiring warnings.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Code {
            $(#[doc = $doc] $variant,)*
        }

        impl Code {
            pub const ALL: &'static [Code] = &[$(Code::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Code::$variant => $text,)*
                }
            }

            pub fn severity(self) -> Severity {
                match self {
                    $(Code::$variant => Severity::$sev,)*
                }
            }

            pub fn summary(self) -> &'static str {
                match self {
                    $(Code::$variant => $doc,)*
                }
            }
        }
    };
}

codes! {
    E100 => "E100", Error, "syntax error in component file";
    E101 => "E101", Error, "task writes an undeclared OutPort";
    E102 => "E102", Error, "task reads an undeclared InPort or CompoundInPort";
    E103 => "E103", Error, "invalid numeric literal or value in component file";
    E104 => "E104", Error, "invalid character";
    E200 => "E200", Error, "syntax error in system file";
    E201 => "E201", Error, "cause-effect chain needs at least two stages";
    E202 => "E202", Error, "prescaler must be an integer >= 1";
    E203 => "E203", Error, "invalid numeric literal or value in system file";
    E210 => "E210", Error, "unresolved reference";
    E211 => "E211", Error, "component instance has no activation source for a task";
    E212 => "E212", Error, "duplicate name in system configuration or component library";
    E301 => "E301", Error, "OutPort not served by exactly one task";
    E302 => "E302", Error, "duplicate port, task or read name within a component";
    E303 => "E303", Error, "invalid CompoundInPort or read reference";
    E304 => "E304", Error, "invalid activation constraint";
    E305 => "E305", Error, "task bound to more than one activation source";
    E306 => "E306", Error, "data-trigger port is not read by the task";
    E307 => "E307", Error, "connection message types differ";
    E308 => "E308", Error, "InPort has more than one incoming connection";
    E309 => "E309", Error, "timer frequency outside the activation constraint";
    E310 => "E310", Error, "fixed activation constraint overridden";
    E311 => "E311", Error, "chain stage not reachable from the previous stage";
    E312 => "E312", Error, "data-trigger port has no incoming connection";
    W401 => "W401", Warning, "optionally read InPort is unconnected";
    W402 => "W402", Warning, "strictly read InPort is unconnected";
    W403 => "W403", Warning, "equal rates with unsynchronized phases";
    W404 => "W404", Warning, "oversampling";
    W405 => "W405", Warning, "undersampling";
    W406 => "W406", Warning, "propagated frequency outside the activation constraint";
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub span: SourceSpan,
}

impl Diagnostic {
    pub fn new(code: Code, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic { severity: code.severity(), code, message: message.into(), span }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}[{}]: {}", self.span, self.severity, self.code, self.message)
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_codes_are_unique_and_prefixed_by_severity() {
        let mut seen = std::collections::HashSet::new();
        for code in Code::ALL {
            assert!(seen.insert(code.as_str()));
            let expected = match code.severity() {
                Severity::Error => 'E',
                Severity::Warning => 'W',
                Severity::Info => 'I',
            };
            assert!(code.as_str().starts_with(expected), "{code}");
        }
    }

    #[test]
    fn display_uses_file_line_col() {
        let span = SourceSpan::new("a.ccd".into(), (3, 7), (3, 9));
        let d = Diagnostic::new(Code::E101, span, "undeclared OutPort `x`");
        assert_eq!(d.to_string(), "a.ccd:3:7: error[E101]: undeclared OutPort `x`");
    }
}
