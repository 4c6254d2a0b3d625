//! In-memory model: component definitions (the robotics-expert view) and
//! system configurations (the application-expert view).
//!
//! Cross references between the two packages are plain names here; see
//! [`crate::resolve`] for the linked form.

use std::fmt;

use crate::diag::SourceSpan;
use crate::time::Nanos;

/// Source location of a model element.
///
/// All `Loc` values compare equal, so deriving `PartialEq` on a model type
/// yields structural equality that ignores where things were written.
#[derive(Clone, Debug, Default)]
pub struct Loc(pub SourceSpan);

impl PartialEq for Loc {
    fn eq(&self, _: &Loc) -> bool {
        true
    }
}

impl Loc {
    pub fn span(&self) -> &SourceSpan {
        &self.0
    }
}

/// A name together with where it was written.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ident {
    pub name: String,
    pub loc: Loc,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident { name: name.into(), loc: Loc::default() }
    }

    pub fn at(name: impl Into<String>, span: SourceSpan) -> Self {
        Ident { name: name.into(), loc: Loc(span) }
    }

    pub fn span(&self) -> &SourceSpan {
        &self.loc.0
    }

    pub fn as_str(&self) -> &str {
        &self.name
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComponentDefinition {
    pub name: Ident,
    pub in_ports: Vec<InPortDef>,
    pub out_ports: Vec<OutPortDef>,
    pub compounds: Vec<CompoundInPortDef>,
    pub tasks: Vec<TaskDef>,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InPortDef {
    pub name: Ident,
    pub message_type: Ident,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutPortDef {
    pub name: Ident,
    pub message_type: Ident,
    pub loc: Loc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Combination {
    And,
    Or,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompoundInPortDef {
    pub name: Ident,
    pub combination: Combination,
    pub members: Vec<Ident>,
    pub loc: Loc,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TaskKind {
    #[default]
    Preemptive,
    Cooperative,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Dependency {
    #[default]
    Strict,
    Optional,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReadDep {
    /// Names an InPort or a CompoundInPort of the same component.
    pub port: Ident,
    pub dependency: Dependency,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaskDef {
    pub name: Ident,
    pub kind: TaskKind,
    pub reads: Vec<ReadDep>,
    pub writes: Vec<Ident>,
    pub constraint: Option<ActivationConstraint>,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActivationConstraint {
    pub min_freq: f64,
    pub max_freq: f64,
    pub changeable: bool,
    pub loc: Loc,
}

impl ActivationConstraint {
    /// Unchangeable and `min == max`: a fixed periodic rate.
    pub fn fixed_frequency(&self) -> Option<f64> {
        (!self.changeable && self.min_freq == self.max_freq).then_some(self.min_freq)
    }
}

impl ComponentDefinition {
    pub fn in_port(&self, name: &str) -> Option<usize> {
        self.in_ports.iter().position(|p| p.name.name == name)
    }

    pub fn out_port(&self, name: &str) -> Option<usize> {
        self.out_ports.iter().position(|p| p.name.name == name)
    }

    pub fn compound(&self, name: &str) -> Option<usize> {
        self.compounds.iter().position(|c| c.name.name == name)
    }

    pub fn task(&self, name: &str) -> Option<usize> {
        self.tasks.iter().position(|t| t.name.name == name)
    }

    /// Index of the first task whose `writes` names `out_port`.
    pub fn writer_of(&self, out_port: &str) -> Option<usize> {
        self.tasks.iter().position(|t| t.writes.iter().any(|w| w.name == out_port))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SystemConfiguration {
    pub name: Ident,
    pub instances: Vec<ComponentInstance>,
    pub connections: Vec<Connection>,
    pub chains: Vec<CauseEffectChain>,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentInstance {
    pub name: Ident,
    pub component: Ident,
    pub task_configs: Vec<TaskConfig>,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaskConfig {
    pub task: Ident,
    pub source: ActivationSource,
    pub exec: Option<ExecTime>,
    pub loc: Loc,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExecTime {
    pub bcet: Nanos,
    pub wcet: Nanos,
}

impl ExecTime {
    pub fn new(bcet: Nanos, wcet: Nanos) -> Self {
        ExecTime { bcet, wcet }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ActivationSource {
    DataTriggered { port: Ident, prescaler: u32 },
    PeriodicTimer { frequency: f64 },
    Sporadic { min_interarrival: Option<Nanos>, max_interarrival: Option<Nanos> },
}

impl ActivationSource {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ActivationSource::DataTriggered { .. } => "datatriggered",
            ActivationSource::PeriodicTimer { .. } => "periodic",
            ActivationSource::Sporadic { .. } => "sporadic",
        }
    }
}

/// `instance.port`
#[derive(Clone, Debug, PartialEq)]
pub struct PortRef {
    pub instance: Ident,
    pub port: Ident,
}

impl PortRef {
    pub fn new(instance: &str, port: &str) -> Self {
        PortRef { instance: Ident::new(instance), port: Ident::new(port) }
    }

    pub fn span(&self) -> SourceSpan {
        self.instance.span().to(self.port.span())
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.instance, self.port)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    pub from: PortRef,
    pub to: PortRef,
    /// Transport delay added to every sample; zero unless declared.
    pub delay: Nanos,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CauseEffectChain {
    pub name: Ident,
    /// OutPort references, head first.
    pub stages: Vec<PortRef>,
    pub spec: Option<LatencySpec>,
    pub loc: Loc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatencySpec {
    pub min: Nanos,
    pub max: Nanos,
}
