use std::collections::{HashMap, HashSet};

use crate::analyze::LatencyInterval;
use crate::resolve::{InPortId, OutPortId, ResolvedChain, ResolvedSource, ResolvedSystem, TaskId};
use crate::time::Nanos;
use crate::validate::hop_links;

use super::event::{EventData, SimEvent};

/// Observed latencies within this distance of a bound still count as inside;
/// simulated timer instants are rounded to whole nanoseconds.
pub const CONTAINMENT_TOLERANCE: Nanos = Nanos(10);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLatencySample {
    pub chain: String,
    pub source_sample: u64,
    pub published: Nanos,
    /// `None` when the run ended before any chain output reflected the sample.
    pub latency: Option<Nanos>,
    /// No chain output was computed from exactly this sample; it was
    /// overwritten somewhere along the chain. Its latency, if any, is that of
    /// the first output reflecting a newer sample.
    pub dropped: bool,
}

/// First-to-first latencies of every stage-1 sample.
///
/// A job carries the newest stage-1 sample among the values it read on the
/// chain's links; its publications carry that on. A sample's latency ends at
/// the first final-stage publication carrying it or a newer one.
///
/// Samples published before the chain has warmed up are skipped: every
/// consuming task must have run once and every data-trigger input of those
/// tasks must have received a sample. Until then a datum can wait for
/// startup rather than for the steady-state schedule.
pub fn measure_chain(s: &ResolvedSystem, events: &[SimEvent], chain: &ResolvedChain) -> Vec<ChainLatencySample> {
    let n = chain.stages.len();
    if n < 2 {
        return Vec::new();
    }
    // Per hop: the consuming task and the InPorts carrying the hop.
    let hops: Vec<(Option<TaskId>, Vec<InPortId>)> = chain
        .stages
        .windows(2)
        .map(|w| {
            let ports = hop_links(s, w[0], w[1]).into_iter().map(|c| s.connections[c].to).collect();
            (s.writer(w[1]), ports)
        })
        .collect();
    let warm = warmup(s, events, &hops);

    // Newest stage-1 sample carried by each sample of each stage.
    let mut carried: Vec<HashMap<u64, u64>> = vec![HashMap::new(); n];
    // Per hop: newest stage-1 sample read by each job of the consumer.
    let mut job_fresh: Vec<HashMap<u64, u64>> = vec![HashMap::new(); n - 1];
    let mut sources: Vec<(u64, Nanos)> = Vec::new();
    let mut finals: Vec<(Nanos, u64)> = Vec::new();

    for e in events {
        match e.data {
            EventData::SampleRead { port, source, sample, task, job } => {
                for (h, (consumer, ports)) in hops.iter().enumerate() {
                    if *consumer == Some(task) && source == chain.stages[h] && ports.contains(&port) {
                        if let Some(&f) = carried[h].get(&sample) {
                            let entry = job_fresh[h].entry(job).or_insert(f);
                            *entry = (*entry).max(f);
                        }
                    }
                }
            }
            EventData::SamplePublished { port, sample, task, job } => {
                for stage in 0..n {
                    if chain.stages[stage] != port {
                        continue;
                    }
                    let value = if stage == 0 {
                        sources.push((sample, e.time));
                        Some(sample)
                    } else if hops[stage - 1].0 == Some(task) {
                        job_fresh[stage - 1].get(&job).copied()
                    } else {
                        None
                    };
                    if let Some(v) = value {
                        carried[stage].insert(sample, v);
                        if stage == n - 1 {
                            finals.push((e.time, v));
                        }
                    }
                }
            }
            _ => {}
        }
    }

    let exact: HashSet<u64> = finals.iter().map(|f| f.1).collect();
    let mut running = Vec::with_capacity(finals.len());
    let mut max = 0;
    for &(_, v) in &finals {
        max = max.max(v);
        running.push(max);
    }
    sources
        .into_iter()
        .filter(|&(_, t)| warm.is_some_and(|w| t >= w))
        .map(|(sample, published)| {
            let first = running.partition_point(|&m| m < sample);
            let latency = finals.get(first).map(|&(t, _)| t - published);
            ChainLatencySample {
                chain: chain.name.clone(),
                source_sample: sample,
                published,
                latency,
                dropped: !exact.contains(&sample),
            }
        })
        .collect()
}

/// Instant after which every consumer along the chain is in steady state;
/// `None` if that never happens within the trace.
fn warmup(s: &ResolvedSystem, events: &[SimEvent], hops: &[(Option<TaskId>, Vec<InPortId>)]) -> Option<Nanos> {
    let mut first_activation: HashMap<TaskId, Nanos> = HashMap::new();
    let mut first_publication: HashMap<OutPortId, Nanos> = HashMap::new();
    for e in events {
        match e.data {
            EventData::TaskActivated { task, .. } => {
                first_activation.entry(task).or_insert(e.time);
            }
            EventData::SamplePublished { port, .. } => {
                first_publication.entry(port).or_insert(e.time);
            }
            _ => {}
        }
    }
    let mut warm = Nanos::ZERO;
    for (consumer, _) in hops {
        let t = (*consumer)?;
        warm = warm.max(*first_activation.get(&t)?);
        if let ResolvedSource::DataTriggered { trigger, .. } = s.binding(t).source {
            for port in s.trigger_members(t.instance, trigger) {
                let p = InPortId { instance: t.instance, port };
                for &c in s.incoming(p) {
                    let conn = &s.connections[c];
                    warm = warm.max(*first_publication.get(&conn.from)? + conn.delay);
                }
            }
        }
    }
    Some(warm)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ContainmentVerdict {
    Contained,
    Violation,
    Inconclusive,
}

impl ContainmentVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ContainmentVerdict::Contained => "CONTAINED",
            ContainmentVerdict::Violation => "VIOLATION",
            ContainmentVerdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Statistics over measured latencies, in seconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatencyStats {
    pub count: usize,
    pub dropped: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub p99: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonVerdict {
    pub verdict: ContainmentVerdict,
    pub stats: Option<LatencyStats>,
}

/// `None` when nothing was measured.
pub fn latency_stats(samples: &[ChainLatencySample]) -> Option<LatencyStats> {
    let mut values: Vec<Nanos> = samples.iter().filter_map(|s| s.latency).collect();
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    let count = values.len();
    let sum: f64 = values.iter().map(|v| v.as_secs_f64()).sum();
    // Nearest-rank percentile.
    let rank = ((0.99 * count as f64).ceil() as usize).clamp(1, count);
    Some(LatencyStats {
        count,
        dropped: samples.iter().filter(|s| s.dropped).count(),
        min: values[0].as_secs_f64(),
        max: values[count - 1].as_secs_f64(),
        mean: sum / count as f64,
        p99: values[rank - 1].as_secs_f64(),
    })
}

/// Check every measured latency, including those of dropped samples,
/// against the analytic interval.
pub fn compare(analysis: &LatencyInterval, samples: &[ChainLatencySample]) -> ComparisonVerdict {
    let Some(stats) = latency_stats(samples) else {
        return ComparisonVerdict { verdict: ContainmentVerdict::Inconclusive, stats: None };
    };
    let tol = CONTAINMENT_TOLERANCE.as_secs_f64();
    let low_ok = stats.min >= analysis.best - tol;
    let high_ok = analysis.worst_secs().is_none_or(|w| stats.max <= w + tol);
    let verdict = if low_ok && high_ok { ContainmentVerdict::Contained } else { ContainmentVerdict::Violation };
    ComparisonVerdict { verdict, stats: Some(stats) }
}
