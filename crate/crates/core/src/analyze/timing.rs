//! Arrival-stream bounds for task activations and OutPort publications.
//!
//! Every stream is described by bounds on the span of `n` consecutive gaps:
//! at least `n·lo − jitter_lo` and at most `n·hi + jitter_hi`. Timers and
//! sporadic sources seed the bounds; data triggers scale them by the
//! prescaler; a task's output inherits its activation stream widened by its
//! response-time variation.

use std::fmt;

use serde::Serialize;

use crate::model::Combination;
use crate::resolve::{InPortId, OutPortId, ResolvedSource, ResolvedSystem, TaskId, Trigger};

/// Timer phases are quantized to whole nanoseconds by the simulator.
const TIMER_QUANTUM: f64 = 1e-9;

/// Margin on the overload test so that float rounding cannot hide a
/// back-to-back activation.
const OVERLOAD_GUARD: f64 = 2e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stream {
    pub lo: f64,
    pub jitter_lo: f64,
    /// `None` when gaps may be arbitrarily long.
    pub hi: Option<f64>,
    pub jitter_hi: f64,
}

impl Stream {
    pub fn periodic(period: f64) -> Self {
        Stream { lo: period, jitter_lo: 0.0, hi: Some(period), jitter_hi: 0.0 }
    }

    pub fn min_gap(&self) -> f64 {
        (self.lo - self.jitter_lo).max(0.0)
    }

    pub fn max_gap(&self) -> Option<f64> {
        self.span_upper(1)
    }

    /// Longest possible span of `n` consecutive gaps.
    pub fn span_upper(&self, n: u32) -> Option<f64> {
        self.hi.map(|h| f64::from(n) * h + self.jitter_hi)
    }

    /// Upper bound on how many events fit in a closed window of length `w`.
    fn count_in_window(&self, w: f64) -> Option<u64> {
        if self.lo <= 0.0 {
            return None;
        }
        // The epsilon errs towards overcounting, which is the safe side.
        Some(((w + self.jitter_lo) / self.lo + 1e-9).floor().max(0.0) as u64 + 1)
    }

    fn widen(&self, by: f64) -> Stream {
        Stream { jitter_lo: self.jitter_lo + by, jitter_hi: self.jitter_hi + by, ..*self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum UnboundedKind {
    SporadicUnbounded,
    UnresolvedCycle,
    NoInput,
    Overload,
}

/// Why a worst case could not be bounded, and the task responsible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnboundedReason {
    pub kind: UnboundedKind,
    pub task: String,
}

impl fmt::Display for UnboundedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            UnboundedKind::SporadicUnbounded => {
                write!(f, "{} is sporadic without a maximum interarrival time", self.task)
            }
            UnboundedKind::UnresolvedCycle => write!(f, "{} is part of a data-trigger cycle", self.task),
            UnboundedKind::NoInput => write!(f, "{} has a trigger input with no producer", self.task),
            UnboundedKind::Overload => {
                write!(f, "{} can be activated again before it finishes", self.task)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaskTiming {
    pub activation: Result<Stream, UnboundedReason>,
    pub output: Result<Stream, UnboundedReason>,
    pub bcet: f64,
    pub wcet: f64,
    /// Longest wait behind cooperative peers of the same instance.
    pub blocking: f64,
}

impl TaskTiming {
    pub fn response_hi(&self) -> f64 {
        self.wcet + self.blocking
    }

    pub fn overloaded(&self) -> bool {
        matches!(&self.output, Err(r) if r.kind == UnboundedKind::Overload)
    }
}

#[derive(Clone, Debug)]
pub struct Timing {
    tasks: Vec<Vec<TaskTiming>>,
}

#[derive(Clone)]
enum Slot {
    Todo,
    Visiting,
    Done(TaskTiming),
}

impl Timing {
    pub fn new(s: &ResolvedSystem) -> Self {
        let mut slots: Vec<Vec<Slot>> = s.instances.iter().map(|i| vec![Slot::Todo; i.bindings.len()]).collect();
        for t in s.tasks() {
            let _ = task_timing(s, t, &mut slots);
        }
        let tasks = slots
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|slot| match slot {
                        Slot::Done(t) => t,
                        _ => unreachable!("every task is visited"),
                    })
                    .collect()
            })
            .collect();
        Timing { tasks }
    }

    pub fn task(&self, t: TaskId) -> &TaskTiming {
        &self.tasks[t.instance][t.task]
    }

    /// Publication stream of an OutPort, `NoInput` when nothing writes it.
    pub fn port_output(&self, s: &ResolvedSystem, p: OutPortId) -> Result<Stream, UnboundedReason> {
        match s.writer(p) {
            Some(w) => self.task(w).output.clone(),
            None => Err(UnboundedReason { kind: UnboundedKind::NoInput, task: s.out_port_label(p) }),
        }
    }

    /// Arrival stream at an InPort; `None` when unconnected.
    pub fn port_input(&self, s: &ResolvedSystem, p: InPortId) -> Option<Result<Stream, UnboundedReason>> {
        let conn = *s.incoming(p).first()?;
        Some(self.port_output(s, s.connections[conn].from))
    }
}

fn blocking(s: &ResolvedSystem, t: TaskId) -> f64 {
    s.cooperative_peers(t).into_iter().map(|p| s.binding(p).exec.wcet.as_secs_f64()).sum()
}

fn task_timing(s: &ResolvedSystem, t: TaskId, slots: &mut [Vec<Slot>]) -> Result<Stream, UnboundedReason> {
    match &slots[t.instance][t.task] {
        Slot::Done(tt) => return tt.output.clone(),
        Slot::Visiting => return Err(UnboundedReason { kind: UnboundedKind::UnresolvedCycle, task: s.task_label(t) }),
        Slot::Todo => {}
    }
    slots[t.instance][t.task] = Slot::Visiting;
    let b = s.binding(t);
    let bcet = b.exec.bcet.as_secs_f64();
    let wcet = b.exec.wcet.as_secs_f64();
    let block = blocking(s, t);
    let activation = activation_stream(s, t, slots);
    let output = match &activation {
        Err(r) => Err(r.clone()),
        Ok(a) if a.hi.is_none() && a.min_gap() == 0.0 => {
            Err(UnboundedReason { kind: UnboundedKind::SporadicUnbounded, task: s.task_label(t) })
        }
        Ok(a) if wcet + block > 0.0 && wcet + block + OVERLOAD_GUARD >= a.min_gap() => {
            Err(UnboundedReason { kind: UnboundedKind::Overload, task: s.task_label(t) })
        }
        Ok(a) => Ok(a.widen(wcet + block - bcet)),
    };
    let out = output.clone();
    slots[t.instance][t.task] = Slot::Done(TaskTiming { activation, output, bcet, wcet, blocking: block });
    out
}

/// The activation stream the simulator drives a task with.
pub fn source_stream(s: &ResolvedSystem, t: TaskId) -> Option<Stream> {
    match &s.binding(t).source {
        ResolvedSource::Periodic { frequency } => {
            let p = 1.0 / frequency;
            Some(Stream { lo: p, jitter_lo: TIMER_QUANTUM, hi: Some(p), jitter_hi: TIMER_QUANTUM })
        }
        ResolvedSource::Sporadic { min, max } => {
            if min.is_none() && max.is_none() {
                if let Some(f) = s.task_def(t).constraint.as_ref().and_then(|c| c.fixed_frequency()) {
                    let p = 1.0 / f;
                    return Some(Stream { lo: p, jitter_lo: TIMER_QUANTUM, hi: Some(p), jitter_hi: TIMER_QUANTUM });
                }
            }
            Some(Stream {
                lo: min.map_or(0.0, |m| m.as_secs_f64()),
                jitter_lo: 0.0,
                hi: max.map(|m| m.as_secs_f64()),
                jitter_hi: 0.0,
            })
        }
        ResolvedSource::DataTriggered { .. } => None,
    }
}

fn activation_stream(s: &ResolvedSystem, t: TaskId, slots: &mut [Vec<Slot>]) -> Result<Stream, UnboundedReason> {
    let (trigger, k) = match &s.binding(t).source {
        ResolvedSource::DataTriggered { trigger, prescaler } => (*trigger, *prescaler),
        _ => return Ok(source_stream(s, t).expect("not data-triggered")),
    };
    let no_input = || UnboundedReason { kind: UnboundedKind::NoInput, task: s.task_label(t) };
    let mut members: Vec<Option<Stream>> = Vec::new();
    for port in s.trigger_members(t.instance, trigger) {
        let p = InPortId { instance: t.instance, port };
        let Some(&conn) = s.incoming(p).first() else {
            members.push(None);
            continue;
        };
        let from = s.connections[conn].from;
        let stream = match s.writer(from) {
            Some(w) => task_timing(s, w, slots)?,
            None => return Err(no_input()),
        };
        members.push(Some(stream));
    }
    let combination = match trigger {
        Trigger::Port(_) => Combination::And,
        Trigger::Compound(c) => s.component(t.instance).compounds[c].combination,
    };
    let kf = f64::from(k);
    match combination {
        Combination::And => {
            let members: Vec<Stream> = members.into_iter().collect::<Option<_>>().ok_or_else(no_input)?;
            and_stream(&members, kf).ok_or_else(no_input)
        }
        Combination::Or => {
            let members: Vec<Stream> = members.into_iter().flatten().collect();
            or_stream(&members, k).ok_or_else(no_input)
        }
    }
}

/// Firing stream of an AND join (a single plain port is the one-member
/// case) divided by prescaler `k`.
fn and_stream(members: &[Stream], k: f64) -> Option<Stream> {
    let slowest = members.iter().max_by(|a, b| (k * a.lo - a.jitter_lo).total_cmp(&(k * b.lo - b.jitter_lo)))?;
    if let [only] = members {
        return Some(Stream {
            lo: k * only.lo,
            jitter_lo: only.jitter_lo,
            hi: only.hi.map(|h| k * h),
            jitter_hi: only.jitter_hi,
        });
    }
    // After a firing every member delivers a fresh sample within its
    // longest gap, so consecutive firings are at most that far apart.
    let gap = members.iter().map(Stream::max_gap).collect::<Option<Vec<f64>>>();
    let hi = gap.map(|g| k * g.into_iter().fold(0.0, f64::max));
    Some(Stream { lo: k * slowest.lo, jitter_lo: slowest.jitter_lo, hi, jitter_hi: 0.0 })
}

/// Shortest window that can hold `k + 1` events of the merged streams.
pub fn or_min_span(members: &[Stream], k: u32) -> f64 {
    let need = u64::from(k) + 1;
    let enough = |w: f64| -> bool {
        let mut total = 0u64;
        for m in members {
            match m.count_in_window(w) {
                None => return true,
                Some(c) => total += c,
            }
        }
        total >= need
    };
    let mut candidates = vec![0.0];
    for m in members {
        for n in 1..=u64::from(k) {
            let w = n as f64 * m.lo - m.jitter_lo;
            if w > 0.0 {
                candidates.push(w);
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.into_iter().find(|&w| enough(w)).unwrap_or(0.0)
}

fn or_stream(members: &[Stream], k: u32) -> Option<Stream> {
    if members.is_empty() {
        return None;
    }
    let kf = f64::from(k);
    let fastest = members
        .iter()
        .filter_map(|m| m.hi.map(|h| (kf * h, m.jitter_hi)))
        .min_by(|a, b| (a.0 + a.1).total_cmp(&(b.0 + b.1)));
    Some(Stream {
        lo: or_min_span(members, k),
        jitter_lo: 0.0,
        hi: fastest.map(|f| f.0),
        jitter_hi: fastest.map_or(0.0, |f| f.1),
    })
}

/// True when the task may be asked to run while a previous job is unfinished.
pub fn is_overloaded(timing: &Timing, t: TaskId) -> bool {
    timing.task(t).overloaded()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn or_span_of_two_timers() {
        let a = Stream::periodic(0.025);
        let b = Stream::periodic(0.1);
        // Two events can coincide when phases line up.
        assert_eq!(or_min_span(&[a, b], 1), 0.0);
        assert!((or_min_span(&[a, b], 2) - 0.025).abs() < 1e-12);
        assert!((or_min_span(&[a], 3) - 0.075).abs() < 1e-12);
    }

    #[test]
    fn or_span_with_unbounded_rate_is_zero() {
        let s = Stream { lo: 0.0, jitter_lo: 0.0, hi: None, jitter_hi: 0.0 };
        assert_eq!(or_min_span(&[s, Stream::periodic(1.0)], 5), 0.0);
    }

    #[test]
    fn and_of_one_member_is_scaled_by_prescaler() {
        let s = and_stream(&[Stream::periodic(0.025).widen(0.001)], 4.0).unwrap();
        assert!((s.lo - 0.1).abs() < 1e-12);
        assert_eq!(s.span_upper(1), Some(0.1 + 0.001));
    }

    #[test]
    fn and_waits_for_the_slowest_member() {
        let s = and_stream(&[Stream::periodic(0.025), Stream::periodic(0.1)], 1.0).unwrap();
        assert_eq!(s.lo, 0.1);
        assert_eq!(s.hi, Some(0.1));
    }
}
