//! Parse, resolve and validate a set of model sources in one step.

use crate::diag::{Diagnostic, Severity};
use crate::dsl::{parse_component_definition, parse_system_configuration};
use crate::model::{ComponentDefinition, SystemConfiguration};
use crate::resolve::{resolve, ResolvedSystem};
use crate::validate::{validate_component, validate_system};

/// A named source text, typically a file path and its contents.
#[derive(Clone, Debug)]
pub struct Source {
    pub name: String,
    pub text: String,
}

impl Source {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        Source { name: name.into(), text: text.into() }
    }
}

#[derive(Debug, Default)]
pub struct Checked {
    pub library: Vec<ComponentDefinition>,
    pub system: Option<SystemConfiguration>,
    /// Present when everything parsed and resolved, even if validation failed.
    pub resolved: Option<ResolvedSystem>,
    /// Parser, resolver and validator output, in that order.
    pub diagnostics: Vec<Diagnostic>,
}

impl Checked {
    pub fn ok(&self) -> bool {
        !self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error)
    }
}

/// Components are validated on their own; with a system they are also
/// resolved against it. Validation only runs once every file parsed.
pub fn check(components: &[Source], system: Option<&Source>) -> Checked {
    let mut out = Checked::default();
    let mut parsed = true;
    for src in components {
        let (c, diags) = parse_component_definition(&src.text, &src.name);
        out.diagnostics.extend(diags);
        match c {
            Some(c) => out.library.push(c),
            None => parsed = false,
        }
    }
    if let Some(src) = system {
        let (s, diags) = parse_system_configuration(&src.text, &src.name);
        out.diagnostics.extend(diags);
        parsed &= s.is_some();
        out.system = s;
    }
    if !parsed || !out.ok() {
        return out;
    }
    for c in &out.library {
        out.diagnostics.extend(validate_component(c).diagnostics);
    }
    let Some(cfg) = &out.system else { return out };
    match resolve(&out.library, cfg) {
        Ok(s) => {
            out.diagnostics.extend(validate_system(&s).diagnostics);
            out.resolved = Some(s);
        }
        Err(e) => out.diagnostics.extend(e.diagnostics),
    }
    out
}
