use cechain_core::{Diagnostic, Severity};

const RED: &str = "\x1b[1;31m";
const YELLOW: &str = "\x1b[1;33m";
const GREEN: &str = "\x1b[1;32m";
const CYAN: &str = "\x1b[36m";
const RESET: &str = "\x1b[0m";

/// ANSI coloring for human output; a no-op unless enabled.
pub struct Style {
    color: bool,
}

impl Style {
    pub fn new(color: bool) -> Self {
        Style { color }
    }

    fn paint(&self, text: &str, code: &str) -> String {
        if self.color {
            format!("{code}{text}{RESET}")
        } else {
            text.to_string()
        }
    }

    pub fn diagnostic(&self, d: &Diagnostic) -> String {
        let code = match d.severity {
            Severity::Error => RED,
            Severity::Warning => YELLOW,
            Severity::Info => CYAN,
        };
        let label = self.paint(&format!("{}[{}]", d.severity, d.code), code);
        format!("{}: {label}: {}", d.span, d.message)
    }

    /// Colors verdict words wherever they appear in a line of report text.
    pub fn verdicts(&self, text: &str) -> String {
        if !self.color {
            return text.to_string();
        }
        let mut out = text.to_string();
        for (word, code) in [
            ("MEETS_SPEC", GREEN),
            ("CONTAINED", GREEN),
            ("VIOLATES_SPEC", RED),
            ("VIOLATION", RED),
            ("INCONCLUSIVE", YELLOW),
        ] {
            out = out.replace(word, &self.paint(word, code));
        }
        out
    }
}
