//! First-to-first end-to-end latency bounds of cause-effect chains.
//!
//! The latency of a datum is measured from its publication at the first
//! stage to the publication, at the last stage, of the first output that
//! reflects it (or a newer value of the same source). Per hop the bound is
//! the sampling delay of the consuming task plus its response time plus the
//! connection delay; hops add up.

use serde::Serialize;
use thiserror::Error;

use crate::model::{Combination, LatencySpec};
use crate::resolve::{InPortId, OutPortId, ResolvedChain, ResolvedSource, ResolvedSystem, TaskId, Trigger};
use crate::validate::hop_links;

use super::timing::{Stream, Timing, UnboundedKind, UnboundedReason};

/// Slack for float round-off when comparing against a latency spec.
pub const SPEC_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Worst {
    Bounded(f64),
    Unbounded(UnboundedReason),
}

/// Bounds in seconds.
#[derive(Clone, Debug, PartialEq)]
pub struct LatencyInterval {
    pub best: f64,
    pub worst: Worst,
}

impl LatencyInterval {
    pub fn bounded(best: f64, worst: f64) -> Self {
        LatencyInterval { best, worst: Worst::Bounded(worst) }
    }

    pub fn worst_secs(&self) -> Option<f64> {
        match self.worst {
            Worst::Bounded(w) => Some(w),
            Worst::Unbounded(_) => None,
        }
    }

    pub fn jitter(&self) -> Option<f64> {
        self.worst_secs().map(|w| w - self.best)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("chain `{chain}` cannot be analyzed: {reason}")]
pub struct ChainNotAnalyzable {
    pub chain: String,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    MeetsSpec,
    ViolatesSpec,
    NoSpec,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::MeetsSpec => "MEETS_SPEC",
            Verdict::ViolatesSpec => "VIOLATES_SPEC",
            Verdict::NoSpec => "NO_SPEC",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

pub fn check_spec(interval: &LatencyInterval, spec: &LatencySpec) -> Verdict {
    let Some(worst) = interval.worst_secs() else {
        return Verdict::Inconclusive;
    };
    let min = spec.min.as_secs_f64();
    let max = spec.max.as_secs_f64();
    if interval.best + SPEC_TOLERANCE >= min && worst <= max + SPEC_TOLERANCE {
        Verdict::MeetsSpec
    } else {
        Verdict::ViolatesSpec
    }
}

/// Verdict for an optional spec and a possibly failed analysis.
pub fn chain_verdict(result: &Result<LatencyInterval, ChainNotAnalyzable>, spec: Option<&LatencySpec>) -> Verdict {
    match (result, spec) {
        (_, None) => Verdict::NoSpec,
        (Err(_), Some(_)) => Verdict::Inconclusive,
        (Ok(i), Some(spec)) => check_spec(i, spec),
    }
}

/// Latency contribution of one hop.
#[derive(Clone, Debug, PartialEq)]
pub struct HopBound {
    pub best: f64,
    pub worst: Result<f64, UnboundedReason>,
}

pub fn chain_latency(s: &ResolvedSystem, chain: &ResolvedChain) -> Result<LatencyInterval, ChainNotAnalyzable> {
    chain_latency_with(s, &Timing::new(s), chain)
}

pub fn chain_latency_with(
    s: &ResolvedSystem,
    timing: &Timing,
    chain: &ResolvedChain,
) -> Result<LatencyInterval, ChainNotAnalyzable> {
    let fail = |reason: String| ChainNotAnalyzable { chain: chain.name.clone(), reason };
    if chain.stages.len() < 2 {
        return Err(fail("a chain needs at least two stages".into()));
    }
    let mut best = 0.0;
    let mut worst: Result<f64, UnboundedReason> = Ok(0.0);
    for pair in chain.stages.windows(2) {
        let hop = hop_bound(s, timing, pair[0], pair[1]).ok_or_else(|| {
            fail(format!("`{}` is not reachable from `{}`", s.out_port_label(pair[1]), s.out_port_label(pair[0])))
        })?;
        best += hop.best;
        worst = match (worst, hop.worst) {
            (Ok(a), Ok(b)) => Ok(a + b),
            (Err(r), _) | (Ok(_), Err(r)) => Err(r),
        };
    }
    Ok(LatencyInterval {
        best,
        worst: match worst {
            Ok(w) => Worst::Bounded(w),
            Err(r) => Worst::Unbounded(r),
        },
    })
}

/// Bound for data published on `from` to show up on `to`; `None` when no
/// connection links the two.
pub fn hop_bound(s: &ResolvedSystem, timing: &Timing, from: OutPortId, to: OutPortId) -> Option<HopBound> {
    let links = hop_links(s, from, to);
    let consumer = s.writer(to)?;
    let ct = timing.task(consumer);
    let mut best = f64::INFINITY;
    let mut worst: Option<f64> = None;
    let mut reason: Option<UnboundedReason> = None;
    for &li in &links {
        let conn = &s.connections[li];
        let delay = conn.delay.as_secs_f64();
        best = best.min(delay + ct.bcet);
        let sampling = if ct.overloaded() {
            Err(UnboundedReason { kind: UnboundedKind::Overload, task: s.task_label(consumer) })
        } else {
            sampling_delay(s, timing, consumer, conn.to, from)
        };
        match sampling {
            Ok(d) => {
                let w = delay + d + ct.response_hi();
                worst = Some(worst.map_or(w, |x: f64| x.min(w)));
            }
            Err(r) => {
                reason.get_or_insert(r);
            }
        }
    }
    if links.is_empty() {
        return None;
    }
    Some(HopBound {
        best,
        worst: match (worst, reason) {
            (Some(w), _) => Ok(w),
            (None, Some(r)) => Err(r),
            (None, None) => unreachable!("at least one link"),
        },
    })
}

/// Longest wait between a datum arriving on `port` and the start of the
/// first job of `consumer` that reads it.
fn sampling_delay(
    s: &ResolvedSystem,
    timing: &Timing,
    consumer: TaskId,
    port: InPortId,
    producer: OutPortId,
) -> Result<f64, UnboundedReason> {
    let register = || -> Result<f64, UnboundedReason> {
        let act = timing.task(consumer).activation.clone()?;
        act.max_gap()
            .ok_or_else(|| UnboundedReason { kind: UnboundedKind::SporadicUnbounded, task: s.task_label(consumer) })
    };
    let (trigger, k) = match &s.binding(consumer).source {
        ResolvedSource::DataTriggered { trigger, prescaler } => (*trigger, *prescaler),
        _ => return register(),
    };
    let members = s.trigger_members(consumer.instance, trigger);
    if !members.contains(&port.port) {
        return register();
    }
    let stream_of = |p: usize| -> Result<Stream, UnboundedReason> {
        match timing.port_input(s, InPortId { instance: consumer.instance, port: p }) {
            Some(r) => r,
            None => Err(UnboundedReason { kind: UnboundedKind::NoInput, task: s.task_label(consumer) }),
        }
    };
    let unbounded = || UnboundedReason { kind: UnboundedKind::SporadicUnbounded, task: s.out_port_label(producer) };
    let own = || -> Result<Stream, UnboundedReason> { timing.port_output(s, producer) };
    let further = k - 1;
    // A plain trigger port behaves like a one-member OR.
    let combination = match trigger {
        Trigger::Port(_) => Combination::Or,
        Trigger::Compound(c) => s.component(consumer.instance).compounds[c].combination,
    };
    match combination {
        Combination::Or => {
            if further == 0 {
                Ok(0.0)
            } else {
                own()?.span_upper(further).ok_or_else(unbounded)
            }
        }
        Combination::And => {
            // Every other member must deliver a fresh sample, then `k − 1`
            // further joins must happen.
            let mut wait: f64 = 0.0;
            let mut join_gap: f64 = 0.0;
            for &m in &members {
                let g = stream_of(m)?.max_gap().ok_or_else(unbounded)?;
                join_gap = join_gap.max(g);
                if m != port.port {
                    wait = wait.max(g);
                }
            }
            Ok(wait + f64::from(further) * join_gap)
        }
    }
}
