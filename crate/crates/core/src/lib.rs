//! Models of component-based robotic systems with explicit activation
//! semantics: a small modeling language for components and systems,
//! structural validation, frequency and end-to-end latency analysis, and a
//! seeded discrete-event simulator that serves as an oracle for the analysis.
//!
//! The usual pipeline is
//! [`dsl::parse_component_definition`] / [`dsl::parse_system_configuration`]
//! → [`resolve::resolve`] → [`validate::validate_all`] →
//! [`analyze::analyze`] or [`sim::simulate`].

pub mod analyze;
pub mod bundled;
pub mod diag;
pub mod dsl;
pub mod generate;
pub mod model;
pub mod project;
pub mod resolve;
pub mod sim;
pub mod table;
pub mod time;
pub mod validate;

pub use diag::{Code, Diagnostic, Severity, SourceSpan};
pub use model::{ComponentDefinition, SystemConfiguration};
pub use resolve::{resolve, ResolvedSystem};
pub use time::Nanos;
