//! Linking a system configuration against a component library.
//!
//! Resolution replaces every name in the configuration with an index into the
//! library or the instance table. It never stops at the first dangling name:
//! all of them are reported together.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::diag::{Code, Diagnostic, SourceSpan};
use crate::model::*;
use crate::time::Nanos;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaskId {
    pub instance: usize,
    pub task: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InPortId {
    pub instance: usize,
    pub port: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OutPortId {
    pub instance: usize,
    pub port: usize,
}

/// What a data-triggered task listens to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trigger {
    Port(usize),
    Compound(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ResolvedSource {
    DataTriggered { trigger: Trigger, prescaler: u32 },
    Periodic { frequency: f64 },
    Sporadic { min: Option<Nanos>, max: Option<Nanos> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Binding {
    /// Index into the instance's `task_configs`.
    pub config: usize,
    pub source: ResolvedSource,
    pub exec: ExecTime,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedInstance {
    pub name: String,
    pub component: usize,
    /// One entry per `TaskDef` of the component; each has at least one
    /// binding. More than one binding is a validation error (E305).
    pub bindings: Vec<Vec<Binding>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedConnection {
    pub from: OutPortId,
    pub to: InPortId,
    pub delay: Nanos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedChain {
    pub name: String,
    pub stages: Vec<OutPortId>,
    pub spec: Option<LatencySpec>,
}

/// A configuration with every name reference linked.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedSystem {
    pub library: Vec<ComponentDefinition>,
    pub config: SystemConfiguration,
    pub instances: Vec<ResolvedInstance>,
    pub connections: Vec<ResolvedConnection>,
    pub chains: Vec<ResolvedChain>,
    incoming: HashMap<InPortId, Vec<usize>>,
    outgoing: HashMap<OutPortId, Vec<usize>>,
}

#[derive(Clone, Debug, Error, PartialEq)]
#[error("unresolved references: {}", .diagnostics.iter().map(|d| d.message.as_str()).collect::<Vec<_>>().join("; "))]
pub struct UnresolvedReference {
    pub diagnostics: Vec<Diagnostic>,
}

pub fn resolve(
    library: &[ComponentDefinition],
    config: &SystemConfiguration,
) -> Result<ResolvedSystem, UnresolvedReference> {
    let mut diags = Vec::new();
    let mut by_name: HashMap<&str, usize> = HashMap::new();
    for (i, c) in library.iter().enumerate() {
        if by_name.insert(c.name.as_str(), i).is_some() {
            diags.push(Diagnostic::new(
                Code::E212,
                c.name.span().clone(),
                format!("component `{}` defined more than once", c.name),
            ));
        }
    }

    let mut inst_by_name: HashMap<&str, usize> = HashMap::new();
    for (i, inst) in config.instances.iter().enumerate() {
        if inst_by_name.insert(inst.name.as_str(), i).is_some() {
            diags.push(Diagnostic::new(
                Code::E212,
                inst.name.span().clone(),
                format!("instance `{}` declared more than once", inst.name),
            ));
        }
    }
    let mut chain_names = BTreeSet::new();
    for chain in &config.chains {
        if !chain_names.insert(chain.name.as_str()) {
            diags.push(Diagnostic::new(
                Code::E212,
                chain.name.span().clone(),
                format!("chain `{}` declared more than once", chain.name),
            ));
        }
    }

    // Component of each instance, `None` when dangling.
    let comp_of: Vec<Option<usize>> = config
        .instances
        .iter()
        .map(|inst| {
            let found = by_name.get(inst.component.as_str()).copied();
            if found.is_none() {
                diags.push(unresolved(inst.component.span(), format!("unknown component `{}`", inst.component)));
            }
            found
        })
        .collect();

    let mut instances = Vec::with_capacity(config.instances.len());
    for (inst, comp_idx) in config.instances.iter().zip(&comp_of) {
        let Some(comp_idx) = *comp_idx else {
            instances.push(ResolvedInstance {
                name: inst.name.name.clone(),
                component: usize::MAX,
                bindings: Vec::new(),
            });
            continue;
        };
        let comp = &library[comp_idx];
        let mut bindings: Vec<Vec<Binding>> = vec![Vec::new(); comp.tasks.len()];
        for (ci, tc) in inst.task_configs.iter().enumerate() {
            let Some(ti) = comp.task(tc.task.as_str()) else {
                diags.push(unresolved(tc.task.span(), format!("component `{}` has no task `{}`", comp.name, tc.task)));
                continue;
            };
            let source = match &tc.source {
                ActivationSource::DataTriggered { port, prescaler } => {
                    let trigger = if let Some(p) = comp.in_port(port.as_str()) {
                        Trigger::Port(p)
                    } else if let Some(c) = comp.compound(port.as_str()) {
                        Trigger::Compound(c)
                    } else {
                        diags.push(unresolved(
                            port.span(),
                            format!("component `{}` has no InPort `{}`", comp.name, port),
                        ));
                        continue;
                    };
                    ResolvedSource::DataTriggered { trigger, prescaler: *prescaler }
                }
                ActivationSource::PeriodicTimer { frequency } => ResolvedSource::Periodic { frequency: *frequency },
                ActivationSource::Sporadic { min_interarrival, max_interarrival } => {
                    ResolvedSource::Sporadic { min: *min_interarrival, max: *max_interarrival }
                }
            };
            bindings[ti].push(Binding { config: ci, source, exec: tc.exec.unwrap_or_default() });
        }
        for (ti, b) in bindings.iter().enumerate() {
            if b.is_empty() {
                diags.push(Diagnostic::new(
                    Code::E211,
                    inst.name.span().clone(),
                    format!(
                        "instance `{}` does not bind an activation source for task `{}`",
                        inst.name, comp.tasks[ti].name
                    ),
                ));
            }
        }
        instances.push(ResolvedInstance { name: inst.name.name.clone(), component: comp_idx, bindings });
    }

    let lookup_port = |r: &PortRef, out: bool, diags: &mut Vec<Diagnostic>| -> Option<(usize, usize)> {
        let Some(&ii) = inst_by_name.get(r.instance.as_str()) else {
            diags.push(unresolved(r.instance.span(), format!("unknown instance `{}`", r.instance)));
            return None;
        };
        let comp = &library[comp_of[ii]?];
        let found = if out { comp.out_port(r.port.as_str()) } else { comp.in_port(r.port.as_str()) };
        if found.is_none() {
            diags.push(unresolved(
                r.port.span(),
                format!("component `{}` has no {} `{}`", comp.name, if out { "OutPort" } else { "InPort" }, r.port),
            ));
        }
        found.map(|p| (ii, p))
    };

    let mut connections = Vec::new();
    for conn in &config.connections {
        let from = lookup_port(&conn.from, true, &mut diags);
        let to = lookup_port(&conn.to, false, &mut diags);
        if let (Some(f), Some(t)) = (from, to) {
            connections.push(ResolvedConnection {
                from: OutPortId { instance: f.0, port: f.1 },
                to: InPortId { instance: t.0, port: t.1 },
                delay: conn.delay,
            });
        }
    }

    let mut chains = Vec::new();
    for chain in &config.chains {
        let stages: Vec<_> = chain
            .stages
            .iter()
            .map(|s| lookup_port(s, true, &mut diags).map(|(i, p)| OutPortId { instance: i, port: p }))
            .collect();
        if stages.iter().all(Option::is_some) {
            chains.push(ResolvedChain {
                name: chain.name.name.clone(),
                stages: stages.into_iter().flatten().collect(),
                spec: chain.spec,
            });
        }
    }

    if !diags.is_empty() {
        return Err(UnresolvedReference { diagnostics: diags });
    }

    let mut incoming: HashMap<InPortId, Vec<usize>> = HashMap::new();
    let mut outgoing: HashMap<OutPortId, Vec<usize>> = HashMap::new();
    for (i, c) in connections.iter().enumerate() {
        incoming.entry(c.to).or_default().push(i);
        outgoing.entry(c.from).or_default().push(i);
    }

    Ok(ResolvedSystem {
        library: library.to_vec(),
        config: config.clone(),
        instances,
        connections,
        chains,
        incoming,
        outgoing,
    })
}

fn unresolved(span: &SourceSpan, message: String) -> Diagnostic {
    Diagnostic::new(Code::E210, span.clone(), message)
}

impl ResolvedSystem {
    pub fn name(&self) -> &str {
        self.config.name.as_str()
    }

    pub fn component(&self, instance: usize) -> &ComponentDefinition {
        &self.library[self.instances[instance].component]
    }

    pub fn instance_decl(&self, instance: usize) -> &ComponentInstance {
        &self.config.instances[instance]
    }

    pub fn instance_index(&self, name: &str) -> Option<usize> {
        self.instances.iter().position(|i| i.name == name)
    }

    pub fn task_def(&self, t: TaskId) -> &TaskDef {
        &self.component(t.instance).tasks[t.task]
    }

    /// All tasks in declaration order.
    pub fn tasks(&self) -> impl Iterator<Item = TaskId> + '_ {
        self.instances
            .iter()
            .enumerate()
            .flat_map(|(ii, inst)| (0..inst.bindings.len()).map(move |task| TaskId { instance: ii, task }))
    }

    pub fn task_count(&self) -> usize {
        self.instances.iter().map(|i| i.bindings.len()).sum()
    }

    /// The effective binding of a task: the first one declared.
    pub fn binding(&self, t: TaskId) -> &Binding {
        &self.instances[t.instance].bindings[t.task][0]
    }

    pub fn bindings(&self, t: TaskId) -> &[Binding] {
        &self.instances[t.instance].bindings[t.task]
    }

    pub fn task_config(&self, t: TaskId, b: &Binding) -> &TaskConfig {
        &self.instance_decl(t.instance).task_configs[b.config]
    }

    pub fn task_label(&self, t: TaskId) -> String {
        format!("{}.{}", self.instances[t.instance].name, self.task_def(t).name)
    }

    pub fn in_port_def(&self, p: InPortId) -> &InPortDef {
        &self.component(p.instance).in_ports[p.port]
    }

    pub fn out_port_def(&self, p: OutPortId) -> &OutPortDef {
        &self.component(p.instance).out_ports[p.port]
    }

    pub fn in_port_label(&self, p: InPortId) -> String {
        format!("{}.{}", self.instances[p.instance].name, self.in_port_def(p).name)
    }

    pub fn out_port_label(&self, p: OutPortId) -> String {
        format!("{}.{}", self.instances[p.instance].name, self.out_port_def(p).name)
    }

    /// Connections targeting `p`.
    pub fn incoming(&self, p: InPortId) -> &[usize] {
        self.incoming.get(&p).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Connections leaving `p`.
    pub fn outgoing(&self, p: OutPortId) -> &[usize] {
        self.outgoing.get(&p).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The task that writes `p`, if any.
    pub fn writer(&self, p: OutPortId) -> Option<TaskId> {
        let comp = self.component(p.instance);
        comp.writer_of(comp.out_ports[p.port].name.as_str()).map(|task| TaskId { instance: p.instance, task })
    }

    /// OutPorts written by a task.
    pub fn written_ports(&self, t: TaskId) -> Vec<OutPortId> {
        let comp = self.component(t.instance);
        comp.tasks[t.task]
            .writes
            .iter()
            .filter_map(|w| comp.out_port(w.as_str()))
            .map(|port| OutPortId { instance: t.instance, port })
            .collect()
    }

    /// Plain InPorts a task reads, with compounds expanded to their members.
    /// Each port appears once; a strict mention wins over an optional one.
    pub fn read_ports(&self, t: TaskId) -> Vec<(usize, Dependency)> {
        let comp = self.component(t.instance);
        let mut out: Vec<(usize, Dependency)> = Vec::new();
        let mut add = |p: usize, d: Dependency| match out.iter_mut().find(|(q, _)| *q == p) {
            Some(entry) => {
                if d == Dependency::Strict {
                    entry.1 = Dependency::Strict;
                }
            }
            None => out.push((p, d)),
        };
        for r in &comp.tasks[t.task].reads {
            if let Some(p) = comp.in_port(r.port.as_str()) {
                add(p, r.dependency);
            } else if let Some(c) = comp.compound(r.port.as_str()) {
                for m in &comp.compounds[c].members {
                    if let Some(p) = comp.in_port(m.as_str()) {
                        add(p, r.dependency);
                    }
                }
            }
        }
        out
    }

    /// Plain InPort indices behind a trigger.
    pub fn trigger_members(&self, instance: usize, trigger: Trigger) -> Vec<usize> {
        let comp = self.component(instance);
        match trigger {
            Trigger::Port(p) => vec![p],
            Trigger::Compound(c) => comp.compounds[c].members.iter().filter_map(|m| comp.in_port(m.as_str())).collect(),
        }
    }

    pub fn trigger_name(&self, instance: usize, trigger: Trigger) -> &str {
        let comp = self.component(instance);
        match trigger {
            Trigger::Port(p) => comp.in_ports[p].name.as_str(),
            Trigger::Compound(c) => comp.compounds[c].name.as_str(),
        }
    }

    /// Tasks of the same instance that are cooperative, other than `t`.
    pub fn cooperative_peers(&self, t: TaskId) -> Vec<TaskId> {
        let comp = self.component(t.instance);
        if comp.tasks[t.task].kind != TaskKind::Cooperative {
            return Vec::new();
        }
        comp.tasks
            .iter()
            .enumerate()
            .filter(|(i, d)| *i != t.task && d.kind == TaskKind::Cooperative)
            .map(|(task, _)| TaskId { instance: t.instance, task })
            .collect()
    }

    /// The span of the `task` line that binds `t` in the system file.
    pub fn binding_span(&self, t: TaskId) -> SourceSpan {
        let b = self.binding(t);
        self.task_config(t, b).loc.span().clone()
    }
}
