use crate::resolve::{InPortId, OutPortId, TaskId};
use crate::time::Nanos;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    TaskActivated,
    TaskCompleted,
    SamplePublished,
    SampleRead,
    SampleSkipped,
    /// A trigger arrived while the previous job of the task was still
    /// queued or running.
    ActivationDropped,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::TaskActivated => "TASK_ACTIVATED",
            EventKind::TaskCompleted => "TASK_COMPLETED",
            EventKind::SamplePublished => "SAMPLE_PUBLISHED",
            EventKind::SampleRead => "SAMPLE_READ",
            EventKind::SampleSkipped => "SAMPLE_SKIPPED",
            EventKind::ActivationDropped => "ACTIVATION_DROPPED",
        }
    }
}

/// Jobs are numbered per task and samples per OutPort, both from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventData {
    TaskActivated {
        task: TaskId,
        job: u64,
    },
    TaskCompleted {
        task: TaskId,
        job: u64,
    },
    ActivationDropped {
        task: TaskId,
    },
    SamplePublished {
        port: OutPortId,
        sample: u64,
        task: TaskId,
        job: u64,
    },
    /// A job read the register of `port`, which held `sample` of `source`.
    SampleRead {
        port: InPortId,
        source: OutPortId,
        sample: u64,
        task: TaskId,
        job: u64,
    },
    /// `sample` of `source` was overwritten at `port` before any job read it.
    SampleSkipped {
        port: InPortId,
        source: OutPortId,
        sample: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SimEvent {
    pub time: Nanos,
    pub data: EventData,
}

impl SimEvent {
    pub fn kind(&self) -> EventKind {
        match self.data {
            EventData::TaskActivated { .. } => EventKind::TaskActivated,
            EventData::TaskCompleted { .. } => EventKind::TaskCompleted,
            EventData::ActivationDropped { .. } => EventKind::ActivationDropped,
            EventData::SamplePublished { .. } => EventKind::SamplePublished,
            EventData::SampleRead { .. } => EventKind::SampleRead,
            EventData::SampleSkipped { .. } => EventKind::SampleSkipped,
        }
    }

    pub fn task(&self) -> Option<TaskId> {
        match self.data {
            EventData::TaskActivated { task, .. }
            | EventData::TaskCompleted { task, .. }
            | EventData::ActivationDropped { task }
            | EventData::SamplePublished { task, .. }
            | EventData::SampleRead { task, .. } => Some(task),
            EventData::SampleSkipped { .. } => None,
        }
    }
}
