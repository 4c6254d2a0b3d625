//! Frequency propagation, sampling classification and end-to-end latency
//! bounds over a validated system.

mod frequency;
mod latency;
mod report;
mod sampling;
pub mod timing;

pub use frequency::{propagate_frequencies, Frequency, TaskFrequency, UnknownReason};
pub use latency::{
    chain_latency, chain_latency_with, chain_verdict, check_spec, hop_bound, ChainNotAnalyzable, HopBound,
    LatencyInterval, Verdict, Worst, SPEC_TOLERANCE,
};
pub use report::{
    analyze, diagnostic_json, fmt_hz, fmt_ms, interval_json, render_human, report_json, AnalysisReport, ChainAnalysis,
    LATENCY_CONVENTION, REPORT_VERSION,
};
pub use sampling::{classify_sampling, compare_rates, constraint_warnings, fmt_ratio, Sampling, SamplingClass};
pub use timing::{Stream, Timing, UnboundedKind, UnboundedReason};
