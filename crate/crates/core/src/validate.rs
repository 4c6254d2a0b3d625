//! Semantic rules over component definitions (V1-V4) and resolved systems
//! (V5-V12). Violations are reported as diagnostics, never as failures.

use std::collections::{HashMap, HashSet};

use crate::diag::{Code, Diagnostic, Severity};
use crate::model::*;
use crate::resolve::{InPortId, OutPortId, ResolvedSource, ResolvedSystem, Trigger};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
    pub ok: bool,
}

impl ValidationReport {
    fn new(diagnostics: Vec<Diagnostic>) -> Self {
        let ok = !diagnostics.iter().any(|d| d.severity == Severity::Error);
        ValidationReport { diagnostics, ok }
    }

    pub fn codes(&self) -> Vec<Code> {
        self.diagnostics.iter().map(|d| d.code).collect()
    }

    pub fn merge(mut self, other: ValidationReport) -> Self {
        self.diagnostics.extend(other.diagnostics);
        self.ok &= other.ok;
        self
    }
}

pub fn validate_component(c: &ComponentDefinition) -> ValidationReport {
    let mut d = Vec::new();

    // V2: names
    let mut port_names = HashSet::new();
    let ports = c
        .in_ports
        .iter()
        .map(|p| &p.name)
        .chain(c.out_ports.iter().map(|p| &p.name))
        .chain(c.compounds.iter().map(|p| &p.name));
    for name in ports {
        if !port_names.insert(name.as_str()) {
            d.push(Diagnostic::new(
                Code::E302,
                name.span().clone(),
                format!("port name `{name}` is used more than once in component `{}`", c.name),
            ));
        }
    }
    let mut task_names = HashSet::new();
    for t in &c.tasks {
        if !task_names.insert(t.name.as_str()) {
            d.push(Diagnostic::new(
                Code::E302,
                t.name.span().clone(),
                format!("task name `{}` is used more than once in component `{}`", t.name, c.name),
            ));
        }
        let mut reads = HashSet::new();
        for r in &t.reads {
            if !reads.insert(r.port.as_str()) {
                d.push(Diagnostic::new(
                    Code::E302,
                    r.port.span().clone(),
                    format!("task `{}` reads `{}` more than once", t.name, r.port),
                ));
            }
        }
        let mut writes = HashSet::new();
        for w in &t.writes {
            if !writes.insert(w.as_str()) {
                d.push(Diagnostic::new(
                    Code::E302,
                    w.span().clone(),
                    format!("task `{}` writes `{w}` more than once", t.name),
                ));
            }
        }
    }

    // V1: every OutPort has exactly one writer
    for t in &c.tasks {
        if t.writes.is_empty() {
            d.push(Diagnostic::new(Code::E301, t.name.span().clone(), format!("task `{}` serves no OutPort", t.name)));
        }
        for w in &t.writes {
            if c.out_port(w.as_str()).is_none() {
                d.push(Diagnostic::new(
                    Code::E301,
                    w.span().clone(),
                    format!("task `{}` writes undeclared OutPort `{w}`", t.name),
                ));
            }
        }
    }
    for p in &c.out_ports {
        let writers: Vec<&TaskDef> =
            c.tasks.iter().filter(|t| t.writes.iter().any(|w| w.name == p.name.name)).collect();
        match writers.len() {
            1 => {}
            0 => d.push(Diagnostic::new(
                Code::E301,
                p.name.span().clone(),
                format!("OutPort `{}` is not served by any task", p.name),
            )),
            _ => {
                let names: Vec<&str> = writers.iter().map(|t| t.name.as_str()).collect();
                for t in &writers[1..] {
                    let w = t.writes.iter().find(|w| w.name == p.name.name).unwrap_or(&t.name);
                    d.push(Diagnostic::new(
                        Code::E301,
                        w.span().clone(),
                        format!("OutPort `{}` is served by several tasks: {}", p.name, names.join(", ")),
                    ));
                }
            }
        }
    }

    // V3: compounds and read references
    let mut owner: HashMap<&str, &str> = HashMap::new();
    for cp in &c.compounds {
        if cp.members.len() < 2 {
            d.push(Diagnostic::new(
                Code::E303,
                cp.name.span().clone(),
                format!("compound `{}` needs at least two members", cp.name),
            ));
        }
        let mut seen = HashSet::new();
        for m in &cp.members {
            if c.in_port(m.as_str()).is_none() {
                let what =
                    if c.compound(m.as_str()).is_some() { "is itself a compound" } else { "is not a declared InPort" };
                d.push(Diagnostic::new(
                    Code::E303,
                    m.span().clone(),
                    format!("member `{m}` of compound `{}` {what}", cp.name),
                ));
                continue;
            }
            if !seen.insert(m.as_str()) {
                d.push(Diagnostic::new(
                    Code::E303,
                    m.span().clone(),
                    format!("member `{m}` listed twice in compound `{}`", cp.name),
                ));
                continue;
            }
            if let Some(prev) = owner.insert(m.as_str(), cp.name.as_str()) {
                d.push(Diagnostic::new(
                    Code::E303,
                    m.span().clone(),
                    format!("InPort `{m}` belongs to both `{prev}` and `{}`", cp.name),
                ));
            }
        }
    }
    for t in &c.tasks {
        for r in &t.reads {
            if c.in_port(r.port.as_str()).is_none() && c.compound(r.port.as_str()).is_none() {
                d.push(Diagnostic::new(
                    Code::E303,
                    r.port.span().clone(),
                    format!("task `{}` reads unknown port `{}`", t.name, r.port),
                ));
            }
        }
    }

    // V4: constraints
    for t in &c.tasks {
        if let Some(ac) = &t.constraint {
            let valid = ac.min_freq.is_finite() && ac.max_freq.is_finite() && ac.min_freq > 0.0;
            if !valid || ac.min_freq > ac.max_freq {
                d.push(Diagnostic::new(
                    Code::E304,
                    ac.loc.span().clone(),
                    format!(
                        "activation constraint of task `{}` needs 0 < min <= max (got [{} Hz, {} Hz])",
                        t.name, ac.min_freq, ac.max_freq
                    ),
                ));
            }
        }
    }

    ValidationReport::new(d)
}

pub fn validate_system(s: &ResolvedSystem) -> ValidationReport {
    let mut d = Vec::new();

    for t in s.tasks() {
        let def = s.task_def(t);
        let label = s.task_label(t);
        let bindings = s.bindings(t);

        // V5
        if bindings.len() > 1 {
            let triggers = bindings.iter().filter(|b| matches!(b.source, ResolvedSource::DataTriggered { .. })).count();
            let span = s.task_config(t, &bindings[1]).loc.span().clone();
            d.push(Diagnostic::new(
                Code::E305,
                span,
                format!(
                    "task `{label}` is bound to {} activation sources ({triggers} data triggers); exactly one is allowed",
                    bindings.len()
                ),
            ));
        }

        let binding = s.binding(t);
        let span = s.binding_span(t);
        let reads = s.read_ports(t);
        let mut trigger_ports: Vec<usize> = Vec::new();

        match &binding.source {
            ResolvedSource::DataTriggered { trigger, .. } => {
                let name = s.trigger_name(t.instance, *trigger);
                // V6
                let read = match trigger {
                    Trigger::Port(p) => reads.iter().any(|(q, _)| q == p),
                    Trigger::Compound(_) => def.reads.iter().any(|r| r.port.name == name),
                };
                if !read {
                    d.push(Diagnostic::new(
                        Code::E306,
                        span.clone(),
                        format!("task `{label}` is triggered by `{name}` but does not read it"),
                    ));
                }
                // V12
                trigger_ports = s.trigger_members(t.instance, *trigger);
                let connected: Vec<bool> = trigger_ports
                    .iter()
                    .map(|&port| !s.incoming(InPortId { instance: t.instance, port }).is_empty())
                    .collect();
                let starved = match trigger {
                    Trigger::Port(_) => !connected[0],
                    Trigger::Compound(c) => match s.component(t.instance).compounds[*c].combination {
                        Combination::And => connected.iter().any(|c| !c),
                        Combination::Or => connected.iter().all(|c| !c),
                    },
                };
                if starved {
                    d.push(Diagnostic::new(
                        Code::E312,
                        span.clone(),
                        format!("task `{label}` is triggered by `{name}`, which has no incoming connection"),
                    ));
                }
            }
            ResolvedSource::Periodic { frequency } => {
                // V9; a fixed constraint is left to V10
                if let Some(ac) = def.constraint.as_ref().filter(|ac| ac.fixed_frequency().is_none()) {
                    if *frequency < ac.min_freq || *frequency > ac.max_freq {
                        d.push(Diagnostic::new(
                            Code::E309,
                            span.clone(),
                            format!(
                                "timer frequency {frequency} Hz of task `{label}` is outside its constraint [{} Hz, {} Hz]",
                                ac.min_freq, ac.max_freq
                            ),
                        ));
                    }
                }
            }
            ResolvedSource::Sporadic { .. } => {}
        }

        // V10
        if let Some(fixed) = def.constraint.as_ref().and_then(ActivationConstraint::fixed_frequency) {
            let conforms = match &binding.source {
                ResolvedSource::Periodic { frequency } => *frequency == fixed,
                ResolvedSource::Sporadic { .. } => true,
                ResolvedSource::DataTriggered { .. } => false,
            };
            if !conforms {
                d.push(Diagnostic::new(
                    Code::E310,
                    span.clone(),
                    format!(
                        "task `{label}` has a fixed {fixed} Hz activation; bind it to `periodic {fixed} Hz` or `sporadic`"
                    ),
                ));
            }
        }

        // W401 / W402
        for (port, dep) in reads {
            if trigger_ports.contains(&port) {
                continue;
            }
            let pid = InPortId { instance: t.instance, port };
            if s.incoming(pid).is_empty() {
                let (code, how) = match dep {
                    Dependency::Optional => (Code::W401, "optionally"),
                    Dependency::Strict => (Code::W402, "strictly"),
                };
                d.push(Diagnostic::new(
                    code,
                    s.instance_decl(t.instance).name.span().clone(),
                    format!("InPort `{}` read {how} by task `{label}` is not connected", s.in_port_label(pid)),
                ));
            }
        }
    }

    // V7, V8
    let mut fan_in: HashMap<InPortId, usize> = HashMap::new();
    for (i, c) in s.connections.iter().enumerate() {
        let decl = &s.config.connections[i];
        let from = s.out_port_def(c.from);
        let to = s.in_port_def(c.to);
        if from.message_type.name != to.message_type.name {
            d.push(Diagnostic::new(
                Code::E307,
                decl.loc.span().clone(),
                format!(
                    "cannot connect `{}` ({}) to `{}` ({})",
                    decl.from, from.message_type, decl.to, to.message_type
                ),
            ));
        }
        let n = fan_in.entry(c.to).or_insert(0);
        *n += 1;
        if *n == 2 {
            d.push(Diagnostic::new(
                Code::E308,
                decl.loc.span().clone(),
                format!("InPort `{}` already has an incoming connection", decl.to),
            ));
        }
    }

    // V11
    for (ci, chain) in s.chains.iter().enumerate() {
        let decl = &s.config.chains[ci];
        for (i, pair) in chain.stages.windows(2).enumerate() {
            if hop_links(s, pair[0], pair[1]).is_empty() {
                d.push(Diagnostic::new(
                    Code::E311,
                    decl.stages[i + 1].span(),
                    format!(
                        "chain `{}`: `{}` is not reachable from `{}`",
                        chain.name,
                        decl.stages[i + 1],
                        decl.stages[i]
                    ),
                ));
            }
        }
    }

    ValidationReport::new(d)
}

/// Connections carrying data from `from` into an InPort read by the task
/// that writes `to`. Empty when the hop is unreachable.
pub fn hop_links(s: &ResolvedSystem, from: OutPortId, to: OutPortId) -> Vec<usize> {
    let Some(writer) = s.writer(to) else {
        return Vec::new();
    };
    let reads = s.read_ports(writer);
    s.outgoing(from)
        .iter()
        .copied()
        .filter(|&ci| {
            let c = &s.connections[ci];
            c.to.instance == writer.instance && reads.iter().any(|(p, _)| *p == c.to.port)
        })
        .collect()
}

/// Validate every component in the library plus the resolved system.
pub fn validate_all(s: &ResolvedSystem) -> ValidationReport {
    let mut used: Vec<usize> = s.instances.iter().map(|i| i.component).collect();
    used.sort_unstable();
    used.dedup();
    used.iter()
        .map(|&c| validate_component(&s.library[c]))
        .fold(ValidationReport::new(Vec::new()), ValidationReport::merge)
        .merge(validate_system(s))
}
