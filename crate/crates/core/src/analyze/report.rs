use std::fmt::Write;

use serde_json::{json, Value};

use crate::diag::Diagnostic;
use crate::resolve::ResolvedSystem;

use super::frequency::{propagate_frequencies, Frequency, TaskFrequency};
use super::latency::{chain_latency_with, chain_verdict, ChainNotAnalyzable, LatencyInterval, Verdict, Worst};
use super::sampling::{classify_sampling, constraint_warnings, fmt_ratio, Sampling, SamplingClass};
use super::timing::Timing;

pub const REPORT_VERSION: u32 = 1;
pub const LATENCY_CONVENTION: &str = "first-to-first";

#[derive(Clone, Debug, PartialEq)]
pub struct ChainAnalysis {
    /// Index into `ResolvedSystem::chains`.
    pub chain: usize,
    pub result: Result<LatencyInterval, ChainNotAnalyzable>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisReport {
    pub frequencies: Vec<TaskFrequency>,
    pub sampling: Vec<SamplingClass>,
    pub chains: Vec<ChainAnalysis>,
    /// Sampling and constraint warnings.
    pub diagnostics: Vec<Diagnostic>,
}

impl AnalysisReport {
    pub fn chain_by_name<'a>(&'a self, s: &ResolvedSystem, name: &str) -> Option<&'a ChainAnalysis> {
        self.chains.iter().find(|c| s.chains[c.chain].name == name)
    }

    pub fn frequency_of(&self, s: &ResolvedSystem, instance: &str, task: &str) -> Option<Frequency> {
        self.frequencies
            .iter()
            .find(|f| s.instances[f.task.instance].name == instance && s.task_def(f.task).name.as_str() == task)
            .map(|f| f.value)
    }

    pub fn any_violation(&self) -> bool {
        self.chains.iter().any(|c| c.verdict == Verdict::ViolatesSpec)
    }
}

/// Analyze every chain of a validated system.
pub fn analyze(s: &ResolvedSystem) -> AnalysisReport {
    let frequencies = propagate_frequencies(s);
    let (sampling, mut diagnostics) = classify_sampling(s, &frequencies);
    diagnostics.extend(constraint_warnings(s, &frequencies));
    let timing = Timing::new(s);
    let chains = s
        .chains
        .iter()
        .enumerate()
        .map(|(i, ch)| {
            let result = chain_latency_with(s, &timing, ch);
            let verdict = chain_verdict(&result, ch.spec.as_ref());
            ChainAnalysis { chain: i, result, verdict }
        })
        .collect();
    AnalysisReport { frequencies, sampling, chains, diagnostics }
}

fn frequency_json(f: Frequency) -> (Value, Value) {
    match f {
        Frequency::Known(hz) => (json!(hz), Value::Null),
        Frequency::Unknown(r) => (Value::Null, json!(r)),
    }
}

pub fn diagnostic_json(d: &Diagnostic) -> Value {
    json!({
        "severity": d.severity,
        "code": d.code,
        "message": d.message,
        "file": &*d.span.file,
        "line": d.span.start_line,
        "column": d.span.start_col,
    })
}

pub fn interval_json(i: &LatencyInterval) -> Value {
    let (worst, reason) = match &i.worst {
        Worst::Bounded(w) => (json!(w), Value::Null),
        Worst::Unbounded(r) => (Value::Null, json!({ "kind": r.kind, "task": r.task, "message": r.to_string() })),
    };
    json!({ "best": i.best, "worst": worst, "jitter": i.jitter(), "unboundedReason": reason })
}

/// The report as a JSON document. Times are seconds, frequencies Hz.
pub fn report_json(s: &ResolvedSystem, r: &AnalysisReport) -> Value {
    let frequencies: Vec<Value> = r
        .frequencies
        .iter()
        .map(|f| {
            let (hz, reason) = frequency_json(f.value);
            json!({
                "instance": s.instances[f.task.instance].name,
                "task": s.task_def(f.task).name.as_str(),
                "frequencyHz": hz,
                "unknownReason": reason,
            })
        })
        .collect();
    let sampling: Vec<Value> = r
        .sampling
        .iter()
        .map(|c| {
            let conn = &s.connections[c.connection];
            json!({
                "from": s.out_port_label(conn.from),
                "to": s.in_port_label(conn.to),
                "consumer": s.task_label(c.consumer),
                "class": c.class.name(),
                "ratio": c.class.ratio(),
            })
        })
        .collect();
    let chains: Vec<Value> = r
        .chains
        .iter()
        .map(|c| {
            let ch = &s.chains[c.chain];
            let spec = ch.spec.map(|sp| json!({ "min": sp.min.as_secs_f64(), "max": sp.max.as_secs_f64() }));
            let (interval, error) = match &c.result {
                Ok(i) => (interval_json(i), Value::Null),
                Err(e) => (Value::Null, json!(e.reason)),
            };
            json!({
                "name": ch.name,
                "stages": ch.stages.iter().map(|p| s.out_port_label(*p)).collect::<Vec<_>>(),
                "interval": interval,
                "error": error,
                "spec": spec,
                "verdict": c.verdict,
            })
        })
        .collect();
    json!({
        "reportVersion": REPORT_VERSION,
        "system": s.name(),
        "latencyConvention": LATENCY_CONVENTION,
        "frequencies": frequencies,
        "sampling": sampling,
        "chains": chains,
        "diagnostics": r.diagnostics.iter().map(diagnostic_json).collect::<Vec<_>>(),
    })
}

pub fn fmt_hz(f: Frequency) -> String {
    match f {
        Frequency::Known(hz) => format!("{hz} Hz"),
        Frequency::Unknown(r) => format!("unknown ({})", json!(r).as_str().unwrap_or_default()),
    }
}

pub fn fmt_ms(secs: f64) -> String {
    let ms = secs * 1e3;
    let text = format!("{ms:.3}");
    let text = text.trim_end_matches('0').trim_end_matches('.');
    format!("{text} ms")
}

/// Outline-style text: tasks with frequencies, links with sampling classes,
/// chains with intervals and verdicts.
pub fn render_human(s: &ResolvedSystem, r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "system {}", s.name());
    let _ = writeln!(out, "  tasks");
    for f in &r.frequencies {
        let _ = writeln!(out, "    {:<32} {}", s.task_label(f.task), fmt_hz(f.value));
    }
    let _ = writeln!(out, "  links");
    for c in &r.sampling {
        let conn = &s.connections[c.connection];
        let class = match c.class {
            Sampling::Oversampling(x) | Sampling::Undersampling(x) => format!("{}({})", c.class.name(), fmt_ratio(x)),
            _ => c.class.name().to_string(),
        };
        let _ = writeln!(
            out,
            "    {} -> {} [{}]  {}",
            s.out_port_label(conn.from),
            s.in_port_label(conn.to),
            s.task_def(c.consumer).name,
            class
        );
    }
    let _ = writeln!(out, "  chains ({LATENCY_CONVENTION})");
    for c in &r.chains {
        let ch = &s.chains[c.chain];
        let body = match &c.result {
            Ok(i) => match &i.worst {
                Worst::Bounded(w) => format!("[{}, {}] jitter {}", fmt_ms(i.best), fmt_ms(*w), fmt_ms(w - i.best)),
                Worst::Unbounded(reason) => format!("[{}, unbounded] ({reason})", fmt_ms(i.best)),
            },
            Err(e) => format!("not analyzable: {}", e.reason),
        };
        let spec = ch
            .spec
            .map(|sp| format!(" spec [{}, {}]", fmt_ms(sp.min.as_secs_f64()), fmt_ms(sp.max.as_secs_f64())))
            .unwrap_or_default();
        let _ = writeln!(out, "    {:<32} {body}{spec}  {}", ch.name, c.verdict.as_str());
    }
    for d in &r.diagnostics {
        let _ = writeln!(out, "{d}");
    }
    out
}
