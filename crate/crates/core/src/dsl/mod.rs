//! Textual front end.
//!
//! Two grammars share one lexer: component definitions (`.ccd`) and system
//! configurations (`.csys`). Both use `//` line comments. Keywords are
//! contextual, so any identifier may also be used as a name.
//!
//! ```text
//! component Base {
//!     inport navVelIn : NavigationVelocity;
//!     outport odomOut : BasePose;
//!     preemptive task PoseUpdateTask {
//!         writes odomOut;
//!         activation [50 Hz, 50 Hz] fixed;
//!     }
//! }
//!
//! system Navigation {
//!     instance base : Base {
//!         task PoseUpdateTask periodic 50 Hz exec [0.0002 s, 0.0005 s];
//!     }
//!     connect base.odomOut -> laser.odomIn;
//!     chain Loop = base.odomOut -> laser.scanOut expect [0 ms, 50 ms];
//! }
//! ```

mod lexer;
mod parser;
mod printer;

pub use parser::{parse_component_definition, parse_system_configuration};
pub use printer::{print_component, print_source, print_system};

pub const COMPONENT_EXTENSION: &str = "ccd";
pub const SYSTEM_EXTENSION: &str = "csys";
