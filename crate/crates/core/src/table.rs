//! Activation table: one row per (instance, task) with everything a code
//! generator needs to wire the task to its trigger.

use serde::Serialize;

use crate::analyze::{propagate_frequencies, Frequency};
use crate::model::TaskKind;
use crate::resolve::{ResolvedSource, ResolvedSystem};

pub const TABLE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ActivationRow {
    pub instance: String,
    pub component: String,
    pub task: String,
    pub kind: &'static str,
    pub source_kind: &'static str,
    /// Timer rate, or the propagated rate of a data-triggered or fixed-rate
    /// sporadic task; `None` when unknown.
    pub frequency_hz: Option<f64>,
    pub trigger: Option<String>,
    pub prescaler: Option<u32>,
    pub min_interarrival: Option<f64>,
    pub max_interarrival: Option<f64>,
    pub bcet: f64,
    pub wcet: f64,
    pub reads: Vec<String>,
    pub writes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ActivationTable {
    pub table_version: u32,
    pub system: String,
    pub rows: Vec<ActivationRow>,
}

pub fn activation_table(s: &ResolvedSystem) -> ActivationTable {
    let freqs = propagate_frequencies(s);
    let rows = freqs
        .iter()
        .map(|f| {
            let t = f.task;
            let def = s.task_def(t);
            let b = s.binding(t);
            let comp = s.component(t.instance);
            let (trigger, prescaler, min, max) = match &b.source {
                ResolvedSource::DataTriggered { trigger, prescaler } => {
                    (Some(s.trigger_name(t.instance, *trigger).to_string()), Some(*prescaler), None, None)
                }
                ResolvedSource::Sporadic { min, max } => {
                    (None, None, min.map(|m| m.as_secs_f64()), max.map(|m| m.as_secs_f64()))
                }
                ResolvedSource::Periodic { .. } => (None, None, None, None),
            };
            ActivationRow {
                instance: s.instances[t.instance].name.clone(),
                component: comp.name.name.clone(),
                task: def.name.name.clone(),
                kind: match def.kind {
                    TaskKind::Preemptive => "preemptive",
                    TaskKind::Cooperative => "cooperative",
                },
                source_kind: s.instance_decl(t.instance).task_configs[b.config].source.kind_name(),
                frequency_hz: match f.value {
                    Frequency::Known(hz) => Some(hz),
                    Frequency::Unknown(_) => None,
                },
                trigger,
                prescaler,
                min_interarrival: min,
                max_interarrival: max,
                bcet: b.exec.bcet.as_secs_f64(),
                wcet: b.exec.wcet.as_secs_f64(),
                reads: def.reads.iter().map(|r| r.port.name.clone()).collect(),
                writes: def.writes.iter().map(|w| w.name.clone()).collect(),
            }
        })
        .collect();
    ActivationTable { table_version: TABLE_VERSION, system: s.name().to_string(), rows }
}

impl ActivationTable {
    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("table serializes");
        text.push('\n');
        text
    }
}
