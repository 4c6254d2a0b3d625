use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analyze::{propagate_frequencies, Frequency, UnknownReason};
use crate::model::{Combination, TaskKind};
use crate::resolve::{InPortId, OutPortId, ResolvedSource, ResolvedSystem, TaskId, Trigger};
use crate::time::{Nanos, NANOS_PER_SEC};

use super::event::{EventData, SimEvent};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PhasePolicy {
    Zero,
    #[default]
    Random,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ExecPolicy {
    Bcet,
    Wcet,
    #[default]
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SimConfig {
    pub duration: Nanos,
    pub seed: u64,
    pub phase_policy: PhasePolicy,
    pub exec_policy: ExecPolicy,
}

impl SimConfig {
    pub fn new(duration: Nanos, seed: u64) -> Self {
        SimConfig { duration, seed, phase_policy: PhasePolicy::default(), exec_policy: ExecPolicy::default() }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("simulation unsupported: {reason}")]
pub struct SimulationUnsupported {
    pub reason: String,
}

enum Driver {
    /// Fires at `phase + round(n · 1e9 / frequency)`.
    Timer {
        phase: u64,
        frequency: f64,
        n: u64,
    },
    /// Gaps drawn uniformly from `[min, max]`; the first arrival from `[0, max]`.
    Sporadic {
        min: u64,
        max: u64,
    },
    Data,
}

struct TaskState {
    id: TaskId,
    driver: Driver,
    cooperative: bool,
    exec: (u64, u64),
    reads: Vec<usize>,
    writes: Vec<OutPortId>,
    combination: Combination,
    prescaler: u64,
    /// AND freshness per trigger member.
    fresh: Vec<bool>,
    count: u64,
    busy: bool,
    jobs: u64,
}

#[derive(Clone, Copy)]
struct Register {
    source: OutPortId,
    sample: u64,
    read: bool,
}

#[derive(Default)]
struct Executor {
    running: bool,
    queue: VecDeque<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Action {
    Complete,
    Deliver,
    Fire,
}

#[derive(Clone, Copy)]
enum Pending {
    Complete { task: usize, job: u64 },
    Deliver { conn: usize, sample: u64 },
    Fire { task: usize },
}

/// Heap entry ordered by `(time, instance name, task name, action, seq)`.
struct Entry {
    key: (u64, usize, usize, Action, u64),
    what: Pending,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    // Reversed so the max-heap pops the earliest key.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.cmp(&self.key)
    }
}

struct Sim<'a> {
    s: &'a ResolvedSystem,
    cfg: SimConfig,
    rng: ChaCha8Rng,
    now: u64,
    seq: u64,
    heap: BinaryHeap<Entry>,
    events: Vec<SimEvent>,
    tasks: Vec<TaskState>,
    /// Sort rank of each instance name and, per instance, each task name.
    inst_rank: Vec<usize>,
    task_rank: Vec<Vec<usize>>,
    registers: Vec<Vec<Option<Register>>>,
    /// Tasks triggered by an InPort, with the member position in the trigger.
    triggers: Vec<Vec<Vec<(usize, usize)>>>,
    executors: Vec<Executor>,
    next_sample: Vec<Vec<u64>>,
}

fn ranks<'n>(names: impl Iterator<Item = &'n str>) -> Vec<usize> {
    let names: Vec<&str> = names.collect();
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by_key(|&i| (names[i], i));
    let mut rank = vec![0; names.len()];
    for (r, i) in order.into_iter().enumerate() {
        rank[i] = r;
    }
    rank
}

/// Run the system for `cfg.duration` and return the event trace.
///
/// Timers fire at their phase plus whole periods; data-triggered tasks fire
/// on every `k`-th sample at their trigger; InPorts are single registers.
/// A task never runs two jobs at once: a trigger that arrives while it is
/// queued or running is dropped. Cooperative tasks of one instance run one at
/// a time in request order; preemptive tasks run unconstrained.
pub fn simulate(s: &ResolvedSystem, cfg: &SimConfig) -> Result<Vec<SimEvent>, SimulationUnsupported> {
    if cfg.duration == Nanos::ZERO {
        return Err(SimulationUnsupported { reason: "duration must be positive".into() });
    }
    for f in propagate_frequencies(s) {
        if f.value == Frequency::Unknown(UnknownReason::UnresolvedCycle) {
            return Err(SimulationUnsupported {
                reason: format!("{} is part of a data-trigger cycle", s.task_label(f.task)),
            });
        }
    }
    let mut sim = Sim::new(s, *cfg)?;
    sim.run();
    Ok(sim.events)
}

impl<'a> Sim<'a> {
    fn new(s: &'a ResolvedSystem, cfg: SimConfig) -> Result<Self, SimulationUnsupported> {
        let inst_rank = ranks(s.instances.iter().map(|i| i.name.as_str()));
        let task_rank: Vec<Vec<usize>> =
            (0..s.instances.len()).map(|i| ranks(s.component(i).tasks.iter().map(|t| t.name.as_str()))).collect();
        let mut tasks = Vec::new();
        let mut triggers: Vec<Vec<Vec<(usize, usize)>>> =
            (0..s.instances.len()).map(|i| vec![Vec::new(); s.component(i).in_ports.len()]).collect();
        for (i, inst) in s.instances.iter().enumerate() {
            for task in 0..inst.bindings.len() {
                let id = TaskId { instance: i, task };
                let flat = tasks.len();
                let b = s.binding(id);
                let def = s.task_def(id);
                let mut combination = Combination::Or;
                let mut prescaler = 1;
                let mut members = Vec::new();
                let driver = match &b.source {
                    ResolvedSource::Periodic { frequency } => Driver::Timer { phase: 0, frequency: *frequency, n: 0 },
                    ResolvedSource::Sporadic { min, max } => {
                        match (min, max, def.constraint.as_ref().and_then(|c| c.fixed_frequency())) {
                            (_, Some(max), _) => Driver::Sporadic { min: min.unwrap_or(Nanos::ZERO).0, max: max.0 },
                            (None, None, Some(f)) => Driver::Timer { phase: 0, frequency: f, n: 0 },
                            _ => {
                                return Err(SimulationUnsupported {
                                    reason: format!(
                                        "{} is sporadic without a maximum interarrival time or a fixed rate",
                                        s.task_label(id)
                                    ),
                                })
                            }
                        }
                    }
                    ResolvedSource::DataTriggered { trigger, prescaler: k } => {
                        prescaler = u64::from(*k);
                        members = s.trigger_members(i, *trigger);
                        if let Trigger::Compound(c) = trigger {
                            combination = s.component(i).compounds[*c].combination;
                        }
                        Driver::Data
                    }
                };
                for (pos, &p) in members.iter().enumerate() {
                    triggers[i][p].push((flat, pos));
                }
                tasks.push(TaskState {
                    id,
                    driver,
                    cooperative: def.kind == TaskKind::Cooperative,
                    exec: (b.exec.bcet.0, b.exec.wcet.0),
                    reads: s.read_ports(id).into_iter().map(|(p, _)| p).collect(),
                    writes: s.written_ports(id),
                    combination,
                    prescaler,
                    fresh: vec![false; members.len()],
                    count: 0,
                    busy: false,
                    jobs: 0,
                });
            }
        }
        Ok(Sim {
            s,
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            now: 0,
            seq: 0,
            heap: BinaryHeap::new(),
            events: Vec::new(),
            tasks,
            inst_rank,
            task_rank,
            registers: (0..s.instances.len()).map(|i| vec![None; s.component(i).in_ports.len()]).collect(),
            triggers,
            executors: (0..s.instances.len()).map(|_| Executor::default()).collect(),
            next_sample: (0..s.instances.len()).map(|i| vec![0; s.component(i).out_ports.len()]).collect(),
        })
    }

    fn emit(&mut self, data: EventData) {
        self.events.push(SimEvent { time: Nanos(self.now), data });
    }

    fn schedule(&mut self, time: u64, what: Pending) {
        if time >= self.cfg.duration.0 {
            return;
        }
        let (inst, sub, action) = match what {
            Pending::Complete { task, .. } => {
                let id = self.tasks[task].id;
                (id.instance, self.task_rank[id.instance][id.task], Action::Complete)
            }
            Pending::Fire { task } => {
                let id = self.tasks[task].id;
                (id.instance, self.task_rank[id.instance][id.task], Action::Fire)
            }
            // Deliveries sort after every task of the receiving instance.
            Pending::Deliver { conn, .. } => {
                let to = self.s.connections[conn].to;
                (to.instance, self.task_rank[to.instance].len() + to.port, Action::Deliver)
            }
        };
        self.seq += 1;
        self.heap.push(Entry { key: (time, self.inst_rank[inst], sub, action, self.seq), what });
    }

    /// Phases are drawn once, in instance-name then task-name order.
    fn init_drivers(&mut self) {
        let mut order: Vec<usize> = (0..self.tasks.len()).collect();
        order.sort_by_key(|&t| {
            let id = self.tasks[t].id;
            (self.inst_rank[id.instance], self.task_rank[id.instance][id.task])
        });
        for t in order {
            let first = match &mut self.tasks[t].driver {
                Driver::Timer { phase, frequency, .. } => {
                    if self.cfg.phase_policy == PhasePolicy::Random {
                        let period = ((NANOS_PER_SEC as f64 / *frequency).round() as u64).max(1);
                        *phase = self.rng.gen_range(0..period);
                    }
                    Some(*phase)
                }
                Driver::Sporadic { max, .. } => Some(match self.cfg.phase_policy {
                    PhasePolicy::Random => self.rng.gen_range(0..=*max),
                    PhasePolicy::Zero => 0,
                }),
                Driver::Data => None,
            };
            if let Some(at) = first {
                self.schedule(at, Pending::Fire { task: t });
            }
        }
    }

    fn run(&mut self) {
        self.init_drivers();
        while let Some(e) = self.heap.pop() {
            self.now = e.key.0;
            match e.what {
                Pending::Fire { task } => {
                    self.schedule_next_fire(task);
                    self.request(task);
                }
                Pending::Complete { task, job } => self.complete(task, job),
                Pending::Deliver { conn, sample } => self.deliver(conn, sample),
            }
        }
    }

    fn schedule_next_fire(&mut self, task: usize) {
        let next = match &mut self.tasks[task].driver {
            Driver::Timer { phase, frequency, n } => {
                *n += 1;
                *phase + (*n as f64 * NANOS_PER_SEC as f64 / *frequency).round() as u64
            }
            Driver::Sporadic { min, max } => self.now + self.rng.gen_range(*min..=*max).max(1),
            Driver::Data => return,
        };
        self.schedule(next, Pending::Fire { task });
    }

    fn request(&mut self, task: usize) {
        let t = &mut self.tasks[task];
        if t.busy {
            let id = t.id;
            self.emit(EventData::ActivationDropped { task: id });
            return;
        }
        t.busy = true;
        if t.cooperative {
            let ex = &mut self.executors[t.id.instance];
            if ex.running {
                ex.queue.push_back(task);
                return;
            }
            ex.running = true;
        }
        self.start(task);
    }

    fn start(&mut self, task: usize) {
        self.tasks[task].jobs += 1;
        let id = self.tasks[task].id;
        let job = self.tasks[task].jobs;
        self.emit(EventData::TaskActivated { task: id, job });
        for i in 0..self.tasks[task].reads.len() {
            let p = self.tasks[task].reads[i];
            if let Some(reg) = &mut self.registers[id.instance][p] {
                reg.read = true;
                let (source, sample) = (reg.source, reg.sample);
                self.emit(EventData::SampleRead {
                    port: InPortId { instance: id.instance, port: p },
                    source,
                    sample,
                    task: id,
                    job,
                });
            }
        }
        let (bcet, wcet) = self.tasks[task].exec;
        let d = match self.cfg.exec_policy {
            ExecPolicy::Bcet => bcet,
            ExecPolicy::Wcet => wcet,
            ExecPolicy::Uniform => self.rng.gen_range(bcet..=wcet),
        };
        if d == 0 {
            self.complete(task, job);
        } else {
            self.schedule(self.now + d, Pending::Complete { task, job });
        }
    }

    fn complete(&mut self, task: usize, job: u64) {
        let id = self.tasks[task].id;
        self.emit(EventData::TaskCompleted { task: id, job });
        self.tasks[task].busy = false;
        for i in 0..self.tasks[task].writes.len() {
            let port = self.tasks[task].writes[i];
            self.publish(port, id, job);
        }
        if self.tasks[task].cooperative {
            let ex = &mut self.executors[id.instance];
            match ex.queue.pop_front() {
                Some(next) => self.start(next),
                None => ex.running = false,
            }
        }
    }

    fn publish(&mut self, port: OutPortId, task: TaskId, job: u64) {
        let counter = &mut self.next_sample[port.instance][port.port];
        *counter += 1;
        let sample = *counter;
        self.emit(EventData::SamplePublished { port, sample, task, job });
        for &conn in self.s.outgoing(port) {
            let delay = self.s.connections[conn].delay.0;
            self.schedule(self.now + delay, Pending::Deliver { conn, sample });
        }
    }

    fn deliver(&mut self, conn: usize, sample: u64) {
        let c = &self.s.connections[conn];
        let (to, source) = (c.to, c.from);
        let slot = &mut self.registers[to.instance][to.port];
        let old = slot.replace(Register { source, sample, read: false });
        if let Some(old) = old.filter(|r| !r.read) {
            self.emit(EventData::SampleSkipped { port: to, source: old.source, sample: old.sample });
        }
        for i in 0..self.triggers[to.instance][to.port].len() {
            let (task, pos) = self.triggers[to.instance][to.port][i];
            let t = &mut self.tasks[task];
            let fires = match t.combination {
                Combination::Or => true,
                Combination::And => {
                    t.fresh[pos] = true;
                    let all = t.fresh.iter().all(|f| *f);
                    if all {
                        t.fresh.iter_mut().for_each(|f| *f = false);
                    }
                    all
                }
            };
            if fires {
                t.count += 1;
                if t.count.is_multiple_of(t.prescaler) {
                    self.request(task);
                }
            }
        }
    }
}
