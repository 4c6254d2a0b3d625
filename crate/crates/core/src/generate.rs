//! Random valid models for property tests, benchmarks and oracle runs.
//!
//! Instances form a DAG: every InPort of instance `i` is fed by exactly one
//! OutPort of an earlier instance, so data-trigger cycles cannot occur and
//! every trigger is connected. All generated systems pass validation.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::*;
use crate::time::Nanos;

#[derive(Clone, Debug)]
pub struct GeneratorConfig {
    pub max_tasks: usize,
    /// Inclusive bounds of timer frequencies, whole Hz.
    pub min_hz: u32,
    pub max_hz: u32,
    pub max_prescaler: u32,
    pub max_wcet: Nanos,
    pub max_chain_stages: usize,
    pub max_chains: usize,
    /// Allow cooperative task pairs, sporadic sources, connection delays and
    /// activation constraints.
    pub rich: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_tasks: 6,
            min_hz: 1,
            max_hz: 100,
            max_prescaler: 10,
            max_wcet: Nanos::from_millis(20),
            max_chain_stages: 3,
            max_chains: 2,
            rich: true,
        }
    }
}

const TYPES: [&str; 3] = ["Scan", "Pose", "Cmd"];

struct Out {
    instance: usize,
    port: String,
    ty: &'static str,
}

/// A random component library plus a system instantiating every component once.
pub fn random_system<R: Rng>(rng: &mut R, cfg: &GeneratorConfig) -> (Vec<ComponentDefinition>, SystemConfiguration) {
    let total = rng.gen_range(2..=cfg.max_tasks.max(2));
    let mut library = Vec::new();
    let mut instances = Vec::new();
    let mut connections = Vec::new();
    let mut outs: Vec<Out> = Vec::new();
    let mut placed = 0;
    let mut i = 0;
    while placed < total {
        let tasks_here = if cfg.rich && total - placed >= 2 && rng.gen_bool(0.2) { 2 } else { 1 };
        placed += tasks_here;
        let (comp, inst, conns) = random_instance(rng, cfg, i, tasks_here, &outs);
        for task in &comp.tasks {
            outs.push(Out {
                instance: i,
                port: task.writes[0].name.clone(),
                ty: out_type(&comp, &task.writes[0].name),
            });
        }
        library.push(comp);
        instances.push(inst);
        connections.extend(conns);
        i += 1;
    }
    let mut sys = SystemConfiguration {
        name: Ident::new(format!("Gen{}", rng.gen_range(0..10_000))),
        instances,
        connections,
        chains: Vec::new(),
        loc: Loc::default(),
    };
    sys.chains = random_chains(rng, cfg, &library, &sys);
    (library, sys)
}

fn out_type(c: &ComponentDefinition, port: &str) -> &'static str {
    let ty = &c.out_ports[c.out_port(port).expect("declared")].message_type.name;
    TYPES.iter().find(|t| *t == ty).copied().unwrap_or(TYPES[0])
}

fn random_exec<R: Rng>(rng: &mut R, cfg: &GeneratorConfig) -> ExecTime {
    // Whole microseconds keep the printed text short.
    let max_us = cfg.max_wcet.0 / 1_000;
    let wcet = rng.gen_range(0..=max_us);
    let bcet = rng.gen_range(0..=wcet);
    ExecTime::new(Nanos(bcet * 1_000), Nanos(wcet * 1_000))
}

fn random_instance<R: Rng>(
    rng: &mut R,
    cfg: &GeneratorConfig,
    index: usize,
    task_count: usize,
    outs: &[Out],
) -> (ComponentDefinition, ComponentInstance, Vec<Connection>) {
    let comp_name = format!("Comp{index}");
    let inst_name = format!("i{index}");
    let mut comp = ComponentDefinition { name: Ident::new(&comp_name), ..Default::default() };
    let mut conns = Vec::new();

    let n_in = if outs.is_empty() { 0 } else { rng.gen_range(0..=3.min(outs.len() + 1)) };
    for p in 0..n_in {
        let src = outs.choose(rng).expect("non-empty");
        let name = format!("in{p}");
        comp.in_ports.push(InPortDef {
            name: Ident::new(&name),
            message_type: Ident::new(src.ty),
            loc: Loc::default(),
        });
        let delay = if cfg.rich && rng.gen_bool(0.15) { Nanos(rng.gen_range(1..=2_000) * 1_000) } else { Nanos::ZERO };
        conns.push(Connection {
            from: PortRef::new(&format!("i{}", src.instance), &src.port),
            to: PortRef::new(&inst_name, &name),
            delay,
            loc: Loc::default(),
        });
    }

    // Split InPorts between the tasks; each task reads a random subset.
    let kind = if task_count == 2 && rng.gen_bool(0.7) { TaskKind::Cooperative } else { TaskKind::Preemptive };
    let mut configs = Vec::new();
    for t in 0..task_count {
        let out = format!("out{t}");
        let ty = *TYPES.choose(rng).expect("non-empty");
        comp.out_ports.push(OutPortDef { name: Ident::new(&out), message_type: Ident::new(ty), loc: Loc::default() });
        let mine: Vec<usize> = (0..n_in).filter(|_| task_count == 1 || rng.gen_bool(0.6)).collect();
        // Group two or more ports into a compound when no other compound owns them.
        let mut compound: Option<String> = None;
        let free: Vec<usize> = mine
            .iter()
            .copied()
            .filter(|p| !comp.compounds.iter().any(|c| c.members.iter().any(|m| m.name == format!("in{p}"))))
            .collect();
        if free.len() >= 2 && rng.gen_bool(0.35) {
            let name = format!("join{t}");
            comp.compounds.push(CompoundInPortDef {
                name: Ident::new(&name),
                combination: if rng.gen_bool(0.5) { Combination::And } else { Combination::Or },
                members: free.iter().map(|p| Ident::new(format!("in{p}"))).collect(),
                loc: Loc::default(),
            });
            compound = Some(name);
        }
        let mut reads = Vec::new();
        if let Some(c) = &compound {
            reads.push(ReadDep { port: Ident::new(c), dependency: Dependency::Strict });
        }
        for p in &mine {
            let name = format!("in{p}");
            if compound.is_some() && free.contains(p) {
                continue;
            }
            let dependency = if rng.gen_bool(0.2) { Dependency::Optional } else { Dependency::Strict };
            reads.push(ReadDep { port: Ident::new(name), dependency });
        }

        let timer = |rng: &mut R| f64::from(rng.gen_range(cfg.min_hz..=cfg.max_hz));
        let plain: Vec<&ReadDep> = reads.iter().filter(|r| r.port.name.starts_with("in")).collect();
        let roll = rng.gen_range(0..10);
        let source = if compound.is_some() && roll < 4 {
            ActivationSource::DataTriggered {
                port: Ident::new(compound.clone().expect("set")),
                prescaler: rng.gen_range(1..=cfg.max_prescaler),
            }
        } else if !plain.is_empty() && roll < 7 {
            let p = plain.choose(rng).expect("non-empty");
            ActivationSource::DataTriggered {
                port: Ident::new(&p.port.name),
                prescaler: rng.gen_range(1..=cfg.max_prescaler),
            }
        } else if cfg.rich && roll == 9 {
            let max_ms = rng.gen_range(10..=1_000u64);
            let min_ms = rng.gen_range(1..=max_ms);
            ActivationSource::Sporadic {
                min_interarrival: Some(Nanos::from_millis(min_ms)),
                max_interarrival: Some(Nanos::from_millis(max_ms)),
            }
        } else {
            ActivationSource::PeriodicTimer { frequency: timer(rng) }
        };
        let constraint = match &source {
            ActivationSource::PeriodicTimer { frequency } if cfg.rich && rng.gen_bool(0.3) => {
                let fixed = rng.gen_bool(0.3);
                Some(ActivationConstraint {
                    min_freq: if fixed { *frequency } else { (frequency / 2.0).max(0.5) },
                    max_freq: if fixed { *frequency } else { frequency * 2.0 },
                    changeable: !fixed,
                    loc: Loc::default(),
                })
            }
            _ => None,
        };
        let task_name = format!("Task{t}");
        comp.tasks.push(TaskDef {
            name: Ident::new(&task_name),
            kind,
            reads,
            writes: vec![Ident::new(&out)],
            constraint,
            loc: Loc::default(),
        });
        configs.push(TaskConfig {
            task: Ident::new(&task_name),
            source,
            exec: Some(random_exec(rng, cfg)),
            loc: Loc::default(),
        });
    }
    let inst = ComponentInstance {
        name: Ident::new(&inst_name),
        component: Ident::new(&comp_name),
        task_configs: configs,
        loc: Loc::default(),
    };
    (comp, inst, conns)
}

/// Chains follow connections into tasks that read the receiving port.
fn random_chains<R: Rng>(
    rng: &mut R,
    cfg: &GeneratorConfig,
    library: &[ComponentDefinition],
    sys: &SystemConfiguration,
) -> Vec<CauseEffectChain> {
    let comp_of = |inst: &str| -> &ComponentDefinition {
        let i = sys.instances.iter().position(|x| x.name.name == inst).expect("instance");
        &library[i]
    };
    // Successor OutPorts of an OutPort, one entry per (connection, task).
    let successors = |from: &PortRef| -> Vec<PortRef> {
        let mut next = Vec::new();
        for c in sys.connections.iter().filter(|c| c.from == *from) {
            let comp = comp_of(&c.to.instance.name);
            for t in &comp.tasks {
                let reads_it = t.reads.iter().any(|r| {
                    r.port.name == c.to.port.name
                        || comp
                            .compound(&r.port.name)
                            .is_some_and(|ci| comp.compounds[ci].members.iter().any(|m| m.name == c.to.port.name))
                });
                if reads_it {
                    next.push(PortRef::new(&c.to.instance.name, &t.writes[0].name));
                }
            }
        }
        next
    };
    let mut heads: Vec<PortRef> = Vec::new();
    for c in &sys.connections {
        if !heads.contains(&c.from) {
            heads.push(c.from.clone());
        }
    }
    let mut chains = Vec::new();
    for n in 0..cfg.max_chains {
        let Some(head) = heads.choose(rng) else { break };
        let mut stages = vec![head.clone()];
        let want = rng.gen_range(2..=cfg.max_chain_stages.max(2));
        while stages.len() < want {
            let next = successors(stages.last().expect("non-empty"));
            match next.choose(rng) {
                Some(p) if !stages.contains(p) => stages.push(p.clone()),
                _ => break,
            }
        }
        if stages.len() < 2 {
            continue;
        }
        let spec = rng.gen_bool(0.5).then(|| {
            let max = rng.gen_range(1..=3_000u64);
            LatencySpec { min: Nanos::ZERO, max: Nanos::from_millis(max) }
        });
        chains.push(CauseEffectChain { name: Ident::new(format!("Chain{n}")), stages, spec, loc: Loc::default() });
    }
    chains
}
