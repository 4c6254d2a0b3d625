//! Canonical text form. Parsing the output yields a structurally equal model.

use std::fmt::Write;

use crate::model::*;
use crate::time::{Nanos, NANOS_PER_MILLI, NANOS_PER_SEC};

const INDENT: &str = "    ";

fn secs(n: Nanos) -> String {
    format!("{} s", n.to_decimal(NANOS_PER_SEC))
}

fn millis(n: Nanos) -> String {
    format!("{} ms", n.to_decimal(NANOS_PER_MILLI))
}

// f64's Display is the shortest text that parses back to the same value and
// never uses exponent notation.
fn hz(f: f64) -> String {
    format!("{f} Hz")
}

pub fn print_component(c: &ComponentDefinition) -> String {
    let mut out = String::new();
    if c.in_ports.is_empty() && c.out_ports.is_empty() && c.compounds.is_empty() && c.tasks.is_empty() {
        let _ = writeln!(out, "component {} {{ }}", c.name);
        return out;
    }
    let _ = writeln!(out, "component {} {{", c.name);
    for p in &c.in_ports {
        let _ = writeln!(out, "{INDENT}inport {} : {};", p.name, p.message_type);
    }
    for p in &c.out_ports {
        let _ = writeln!(out, "{INDENT}outport {} : {};", p.name, p.message_type);
    }
    for cp in &c.compounds {
        let members: Vec<&str> = cp.members.iter().map(Ident::as_str).collect();
        let comb = match cp.combination {
            Combination::And => "AND",
            Combination::Or => "OR",
        };
        let _ = writeln!(out, "{INDENT}compound {} = {comb}({});", cp.name, members.join(", "));
    }
    for t in &c.tasks {
        let kind = match t.kind {
            TaskKind::Preemptive => "preemptive",
            TaskKind::Cooperative => "cooperative",
        };
        let _ = writeln!(out, "{INDENT}{kind} task {} {{", t.name);
        for r in &t.reads {
            let opt = match r.dependency {
                Dependency::Strict => "",
                Dependency::Optional => " optional",
            };
            let _ = writeln!(out, "{INDENT}{INDENT}reads {}{opt};", r.port);
        }
        for w in &t.writes {
            let _ = writeln!(out, "{INDENT}{INDENT}writes {w};");
        }
        if let Some(ac) = &t.constraint {
            let fixed = if ac.changeable { "" } else { " fixed" };
            let _ = writeln!(out, "{INDENT}{INDENT}activation [{}, {}]{fixed};", hz(ac.min_freq), hz(ac.max_freq));
        }
        let _ = writeln!(out, "{INDENT}}}");
    }
    out.push_str("}\n");
    out
}

pub fn print_source(src: &ActivationSource) -> String {
    match src {
        ActivationSource::PeriodicTimer { frequency } => format!("periodic {}", hz(*frequency)),
        ActivationSource::DataTriggered { port, prescaler: 1 } => format!("datatriggered {port}"),
        ActivationSource::DataTriggered { port, prescaler } => format!("datatriggered {port} / {prescaler}"),
        ActivationSource::Sporadic { min_interarrival: Some(lo), max_interarrival: Some(hi) } => {
            format!("sporadic [{}, {}]", secs(*lo), secs(*hi))
        }
        // Half-specified bounds have no surface syntax.
        ActivationSource::Sporadic { .. } => "sporadic".to_string(),
    }
}

pub fn print_system(s: &SystemConfiguration) -> String {
    let mut out = String::new();
    if s.instances.is_empty() && s.connections.is_empty() && s.chains.is_empty() {
        let _ = writeln!(out, "system {} {{ }}", s.name);
        return out;
    }
    let _ = writeln!(out, "system {} {{", s.name);
    for inst in &s.instances {
        if inst.task_configs.is_empty() {
            let _ = writeln!(out, "{INDENT}instance {} : {} {{ }}", inst.name, inst.component);
            continue;
        }
        let _ = writeln!(out, "{INDENT}instance {} : {} {{", inst.name, inst.component);
        for tc in &inst.task_configs {
            let _ = write!(out, "{INDENT}{INDENT}task {} {}", tc.task, print_source(&tc.source));
            if let Some(e) = tc.exec {
                let _ = write!(out, " exec [{}, {}]", secs(e.bcet), secs(e.wcet));
            }
            out.push_str(";\n");
        }
        let _ = writeln!(out, "{INDENT}}}");
    }
    for c in &s.connections {
        let _ = write!(out, "{INDENT}connect {} -> {}", c.from, c.to);
        if c.delay != Nanos::ZERO {
            let _ = write!(out, " delay {}", secs(c.delay));
        }
        out.push_str(";\n");
    }
    for ch in &s.chains {
        let stages: Vec<String> = ch.stages.iter().map(ToString::to_string).collect();
        let _ = write!(out, "{INDENT}chain {} = {}", ch.name, stages.join(" -> "));
        if let Some(spec) = ch.spec {
            let _ = write!(out, " expect [{}, {}]", millis(spec.min), millis(spec.max));
        }
        out.push_str(";\n");
    }
    out.push_str("}\n");
    out
}
