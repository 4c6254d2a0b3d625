//! JSON-lines trace export: a header line, then one object per event.

use serde_json::{json, Map, Value};

use crate::resolve::ResolvedSystem;

use super::engine::{ExecPolicy, PhasePolicy, SimConfig};
use super::event::{EventData, SimEvent};

pub const TRACE_VERSION: u32 = 1;

pub fn phase_name(p: PhasePolicy) -> &'static str {
    match p {
        PhasePolicy::Zero => "ZERO",
        PhasePolicy::Random => "RANDOM",
    }
}

pub fn exec_name(e: ExecPolicy) -> &'static str {
    match e {
        ExecPolicy::Bcet => "BCET",
        ExecPolicy::Wcet => "WCET",
        ExecPolicy::Uniform => "UNIFORM",
    }
}

pub fn header_json(s: &ResolvedSystem, cfg: &SimConfig) -> Value {
    json!({
        "traceVersion": TRACE_VERSION,
        "system": s.name(),
        "durationNs": cfg.duration.0,
        "seed": cfg.seed,
        "phasePolicy": phase_name(cfg.phase_policy),
        "execPolicy": exec_name(cfg.exec_policy),
    })
}

pub fn event_json(s: &ResolvedSystem, e: &SimEvent) -> Value {
    let mut m = Map::new();
    m.insert("timeNs".into(), json!(e.time.0));
    m.insert("kind".into(), json!(e.kind().as_str()));
    if let Some(t) = e.task() {
        m.insert("task".into(), json!(s.task_label(t)));
    }
    match e.data {
        EventData::TaskActivated { job, .. } | EventData::TaskCompleted { job, .. } => {
            m.insert("job".into(), json!(job));
        }
        EventData::ActivationDropped { .. } => {}
        EventData::SamplePublished { port, sample, job, .. } => {
            m.insert("job".into(), json!(job));
            m.insert("port".into(), json!(s.out_port_label(port)));
            m.insert("sample".into(), json!(sample));
        }
        EventData::SampleRead { port, source, sample, job, .. } => {
            m.insert("job".into(), json!(job));
            m.insert("port".into(), json!(s.in_port_label(port)));
            m.insert("source".into(), json!(s.out_port_label(source)));
            m.insert("sample".into(), json!(sample));
        }
        EventData::SampleSkipped { port, source, sample } => {
            m.insert("port".into(), json!(s.in_port_label(port)));
            m.insert("source".into(), json!(s.out_port_label(source)));
            m.insert("sample".into(), json!(sample));
        }
    }
    Value::Object(m)
}

pub fn trace_jsonl(s: &ResolvedSystem, cfg: &SimConfig, events: &[SimEvent]) -> String {
    let mut out = header_json(s, cfg).to_string();
    out.push('\n');
    for e in events {
        out.push_str(&event_json(s, e).to_string());
        out.push('\n');
    }
    out
}
