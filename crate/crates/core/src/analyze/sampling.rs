//! Over- and undersampling classification of connections.

use crate::diag::{Code, Diagnostic};
use crate::resolve::{InPortId, ResolvedSource, ResolvedSystem, TaskId, Trigger};

use super::frequency::TaskFrequency;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sampling {
    Synchronous,
    /// Consumer runs this many times faster than the producer.
    Oversampling(f64),
    /// Producer runs this many times faster than the consumer.
    Undersampling(f64),
    Unknown,
}

impl Sampling {
    pub fn name(&self) -> &'static str {
        match self {
            Sampling::Synchronous => "SYNCHRONOUS",
            Sampling::Oversampling(_) => "OVERSAMPLING",
            Sampling::Undersampling(_) => "UNDERSAMPLING",
            Sampling::Unknown => "UNKNOWN",
        }
    }

    pub fn ratio(&self) -> Option<f64> {
        match self {
            Sampling::Oversampling(r) | Sampling::Undersampling(r) => Some(*r),
            Sampling::Synchronous => Some(1.0),
            Sampling::Unknown => None,
        }
    }
}

/// One connection as seen by one task reading its destination port.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingClass {
    pub connection: usize,
    pub consumer: TaskId,
    pub class: Sampling,
}

/// Compare consumer and producer rates. Rates within a relative 1e-9 of each
/// other count as equal.
pub fn compare_rates(consumer: Option<f64>, producer: Option<f64>) -> Sampling {
    let (Some(fc), Some(fp)) = (consumer, producer) else {
        return Sampling::Unknown;
    };
    if fc <= 0.0 || fp <= 0.0 {
        return Sampling::Unknown;
    }
    if (fc - fp).abs() <= 1e-9 * fc.max(fp) {
        Sampling::Synchronous
    } else if fc > fp {
        Sampling::Oversampling(fc / fp)
    } else {
        Sampling::Undersampling(fp / fc)
    }
}

fn frequency_of(freqs: &[TaskFrequency], t: TaskId) -> Option<f64> {
    freqs.iter().find(|f| f.task == t).and_then(|f| f.value.hz())
}

/// Classify every (connection, reading task) pair, in connection order.
///
/// Links into a task's own trigger port are synchronous, or undersampled by
/// the prescaler. Links read with register semantics compare rates and warn:
/// W403 at equal rates (phases are unsynchronized), W404 when oversampled and
/// W405 when undersampled. Links into a member of a trigger compound compare
/// rates without the phase warning.
pub fn classify_sampling(s: &ResolvedSystem, freqs: &[TaskFrequency]) -> (Vec<SamplingClass>, Vec<Diagnostic>) {
    let mut classes = Vec::new();
    let mut diags = Vec::new();
    for (ci, conn) in s.connections.iter().enumerate() {
        let producer = s.writer(conn.from).and_then(|w| frequency_of(freqs, w));
        let span = s.config.connections[ci].loc.span().clone();
        let task_count = s.instances[conn.to.instance].bindings.len();
        for task in 0..task_count {
            let t = TaskId { instance: conn.to.instance, task };
            if !s.read_ports(t).iter().any(|(p, _)| *p == conn.to.port) {
                continue;
            }
            let consumer = frequency_of(freqs, t);
            let (class, warn) = match &s.binding(t).source {
                ResolvedSource::DataTriggered { trigger: Trigger::Port(p), prescaler } if *p == conn.to.port => {
                    let class = if *prescaler == 1 {
                        Sampling::Synchronous
                    } else {
                        Sampling::Undersampling(f64::from(*prescaler))
                    };
                    (class, false)
                }
                ResolvedSource::DataTriggered { trigger, .. }
                    if s.trigger_members(t.instance, *trigger).contains(&conn.to.port) =>
                {
                    (compare_rates(consumer, producer), false)
                }
                _ => (compare_rates(consumer, producer), true),
            };
            let code = match class {
                Sampling::Synchronous if warn => Some(Code::W403),
                Sampling::Oversampling(_) if warn => Some(Code::W404),
                Sampling::Undersampling(_) if warn => Some(Code::W405),
                _ => None,
            };
            if let Some(code) = code {
                diags.push(Diagnostic::new(
                    code,
                    span.clone(),
                    sampling_message(s, t, InPortId { instance: conn.to.instance, port: conn.to.port }, &class),
                ));
            }
            classes.push(SamplingClass { connection: ci, consumer: t, class });
        }
    }
    (classes, diags)
}

fn sampling_message(s: &ResolvedSystem, t: TaskId, p: InPortId, class: &Sampling) -> String {
    let who = format!("{} reading {}", s.task_label(t), s.in_port_label(p));
    match class {
        Sampling::Synchronous => format!("{who}: equal rates but unsynchronized phases"),
        Sampling::Oversampling(r) => format!("{who}: oversampling by {}", fmt_ratio(*r)),
        Sampling::Undersampling(r) => format!("{who}: undersampling by {}", fmt_ratio(*r)),
        Sampling::Unknown => format!("{who}: unknown sampling"),
    }
}

pub fn fmt_ratio(r: f64) -> String {
    if (r - r.round()).abs() < 1e-9 {
        format!("{}", r.round())
    } else {
        format!("{r:.3}").trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// W406 for every task whose propagated frequency lies outside its
/// activation constraint. Timer-driven tasks are covered by E309 instead.
pub fn constraint_warnings(s: &ResolvedSystem, freqs: &[TaskFrequency]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for f in freqs {
        if !matches!(s.binding(f.task).source, ResolvedSource::DataTriggered { .. }) {
            continue;
        }
        let (Some(hz), Some(c)) = (f.value.hz(), s.task_def(f.task).constraint.as_ref()) else {
            continue;
        };
        let tol = 1e-9 * hz.max(1.0);
        if hz + tol < c.min_freq || hz > c.max_freq + tol {
            out.push(Diagnostic::new(
                Code::W406,
                s.binding_span(f.task),
                format!(
                    "{} runs at {hz} Hz, outside its activation constraint [{} Hz, {} Hz]",
                    s.task_label(f.task),
                    c.min_freq,
                    c.max_freq
                ),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_comparison() {
        assert_eq!(compare_rates(Some(10.0), Some(40.0)), Sampling::Undersampling(4.0));
        assert_eq!(compare_rates(Some(50.0), Some(10.0)), Sampling::Oversampling(5.0));
        assert_eq!(compare_rates(Some(10.0), Some(10.0)), Sampling::Synchronous);
        assert_eq!(compare_rates(None, Some(10.0)), Sampling::Unknown);
    }

    #[test]
    fn ratio_text() {
        assert_eq!(fmt_ratio(4.0), "4");
        assert_eq!(fmt_ratio(2.5), "2.5");
        assert_eq!(fmt_ratio(2.0001), "2");
    }
}
