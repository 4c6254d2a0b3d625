//! Activation-frequency propagation over the data-trigger graph.

use serde::Serialize;

use crate::model::{ActivationConstraint, Combination};
use crate::resolve::{InPortId, ResolvedSource, ResolvedSystem, TaskId, Trigger};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum UnknownReason {
    SporadicUnbounded,
    UnresolvedCycle,
    NoInput,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Frequency {
    Known(f64),
    Unknown(UnknownReason),
}

impl Frequency {
    pub fn hz(self) -> Option<f64> {
        match self {
            Frequency::Known(f) => Some(f),
            Frequency::Unknown(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaskFrequency {
    pub task: TaskId,
    pub value: Frequency,
}

#[derive(Clone, Copy, PartialEq)]
enum Slot {
    Todo,
    Visiting,
    Done(Frequency),
}

/// One entry per task, in declaration order.
///
/// Timers and fixed-rate sporadic tasks seed the propagation; a data-triggered
/// task runs at its trigger's rate divided by its prescaler, where an AND
/// compound runs at its slowest member and an OR compound at the sum of its
/// members.
pub fn propagate_frequencies(s: &ResolvedSystem) -> Vec<TaskFrequency> {
    let mut slots: Vec<Vec<Slot>> = s.instances.iter().map(|i| vec![Slot::Todo; i.bindings.len()]).collect();
    s.tasks().map(|t| TaskFrequency { task: t, value: task_frequency(s, t, &mut slots) }).collect()
}

fn task_frequency(s: &ResolvedSystem, t: TaskId, slots: &mut [Vec<Slot>]) -> Frequency {
    match slots[t.instance][t.task] {
        Slot::Done(f) => return f,
        Slot::Visiting => return Frequency::Unknown(UnknownReason::UnresolvedCycle),
        Slot::Todo => {}
    }
    slots[t.instance][t.task] = Slot::Visiting;
    let value = match &s.binding(t).source {
        ResolvedSource::Periodic { frequency } => Frequency::Known(*frequency),
        ResolvedSource::Sporadic { .. } => s
            .task_def(t)
            .constraint
            .as_ref()
            .and_then(ActivationConstraint::fixed_frequency)
            .map_or(Frequency::Unknown(UnknownReason::SporadicUnbounded), Frequency::Known),
        ResolvedSource::DataTriggered { trigger, prescaler } => {
            let members: Vec<Option<Frequency>> = s
                .trigger_members(t.instance, *trigger)
                .into_iter()
                .map(|port| port_frequency(s, InPortId { instance: t.instance, port }, slots))
                .collect();
            let combination = match trigger {
                Trigger::Port(_) => Combination::And,
                Trigger::Compound(c) => s.component(t.instance).compounds[*c].combination,
            };
            match combine(&members, combination) {
                Frequency::Known(f) => Frequency::Known(f / f64::from(*prescaler)),
                unknown => unknown,
            }
        }
    };
    slots[t.instance][t.task] = Slot::Done(value);
    value
}

/// Rate at which samples arrive at an InPort; `None` when unconnected.
fn port_frequency(s: &ResolvedSystem, p: InPortId, slots: &mut [Vec<Slot>]) -> Option<Frequency> {
    let conn = *s.incoming(p).first()?;
    let producer = s.connections[conn].from;
    Some(match s.writer(producer) {
        Some(w) => task_frequency(s, w, slots),
        None => Frequency::Unknown(UnknownReason::NoInput),
    })
}

fn combine(members: &[Option<Frequency>], combination: Combination) -> Frequency {
    let no_input = Frequency::Unknown(UnknownReason::NoInput);
    match combination {
        Combination::And => {
            let mut min = f64::INFINITY;
            for m in members {
                match m {
                    None => return no_input,
                    Some(Frequency::Unknown(r)) => return Frequency::Unknown(*r),
                    Some(Frequency::Known(f)) => min = min.min(*f),
                }
            }
            if members.is_empty() {
                no_input
            } else {
                Frequency::Known(min)
            }
        }
        Combination::Or => {
            let mut sum = 0.0;
            let mut any = false;
            for m in members.iter().flatten() {
                match m {
                    Frequency::Unknown(r) => return Frequency::Unknown(*r),
                    Frequency::Known(f) => {
                        sum += f;
                        any = true;
                    }
                }
            }
            if any {
                Frequency::Known(sum)
            } else {
                no_input
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn and_takes_the_slowest_member_or_sums() {
        let m = [Some(Frequency::Known(40.0)), Some(Frequency::Known(10.0))];
        assert_eq!(combine(&m, Combination::And), Frequency::Known(10.0));
        assert_eq!(combine(&m, Combination::Or), Frequency::Known(50.0));
    }

    #[test]
    fn unconnected_members() {
        let m = [Some(Frequency::Known(40.0)), None];
        assert_eq!(combine(&m, Combination::And), Frequency::Unknown(UnknownReason::NoInput));
        assert_eq!(combine(&m, Combination::Or), Frequency::Known(40.0));
        assert_eq!(combine(&[None, None], Combination::Or), Frequency::Unknown(UnknownReason::NoInput));
    }

    #[test]
    fn unknown_members_poison_the_result() {
        let m = [Some(Frequency::Known(40.0)), Some(Frequency::Unknown(UnknownReason::SporadicUnbounded))];
        assert_eq!(combine(&m, Combination::Or), Frequency::Unknown(UnknownReason::SporadicUnbounded));
    }
}
