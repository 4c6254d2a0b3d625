//! Seeded discrete-event simulation of the activation semantics, and
//! measurement of chain latencies in the resulting traces.

mod engine;
mod event;
mod measure;
mod trace;

pub use engine::{simulate, ExecPolicy, PhasePolicy, SimConfig, SimulationUnsupported};
pub use event::{EventData, EventKind, SimEvent};
pub use measure::{
    compare, latency_stats, measure_chain, ChainLatencySample, ComparisonVerdict, ContainmentVerdict, LatencyStats,
    CONTAINMENT_TOLERANCE,
};
pub use trace::{event_json, exec_name, header_json, phase_name, trace_jsonl, TRACE_VERSION};
