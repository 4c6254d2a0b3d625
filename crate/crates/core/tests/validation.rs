//! Validation against an independent re-evaluation of every rule on the raw
//! model, over generated systems and targeted mutations of them.

use cechain_core::generate::{random_system, GeneratorConfig};
use cechain_core::model::*;
use cechain_core::validate::validate_all;
use cechain_core::{resolve, Code, Nanos};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Lib = Vec<ComponentDefinition>;

fn comp<'a>(lib: &'a Lib, sys: &SystemConfiguration, inst: &str) -> &'a ComponentDefinition {
    let i = sys.instances.iter().find(|i| i.name.name == inst).expect("instance");
    lib.iter().find(|c| c.name.name == i.component.name).expect("component")
}

/// Plain InPorts a task reads, with compounds expanded.
fn reads_port(c: &ComponentDefinition, t: &TaskDef, port: &str) -> bool {
    t.reads.iter().any(|r| {
        r.port.name == port
            || c.compounds.iter().any(|k| k.name.name == r.port.name && k.members.iter().any(|m| m.name == port))
    })
}

fn has_incoming(sys: &SystemConfiguration, inst: &str, port: &str) -> bool {
    sys.connections.iter().any(|c| c.to.instance.name == inst && c.to.port.name == port)
}

/// Every rule, evaluated directly on names. Returns the codes that fail.
fn brute_force(lib: &Lib, sys: &SystemConfiguration) -> Vec<Code> {
    let mut bad = Vec::new();
    for c in lib {
        // V1
        for o in &c.out_ports {
            let writers = c.tasks.iter().filter(|t| t.writes.iter().any(|w| w.name == o.name.name)).count();
            if writers != 1 {
                bad.push(Code::E301);
            }
        }
        if c.tasks.iter().any(|t| t.writes.is_empty() || t.writes.iter().any(|w| c.out_port(&w.name).is_none())) {
            bad.push(Code::E301);
        }
        // V2
        let mut names: Vec<&str> = c.in_ports.iter().map(|p| p.name.as_str()).collect();
        names.extend(c.out_ports.iter().map(|p| p.name.as_str()));
        names.extend(c.compounds.iter().map(|p| p.name.as_str()));
        let mut tasks: Vec<&str> = c.tasks.iter().map(|t| t.name.as_str()).collect();
        for list in [&mut names, &mut tasks] {
            let n = list.len();
            list.sort_unstable();
            list.dedup();
            if list.len() != n {
                bad.push(Code::E302);
            }
        }
        // V3
        for k in &c.compounds {
            if k.members.len() < 2 || k.members.iter().any(|m| c.in_port(&m.name).is_none()) {
                bad.push(Code::E303);
            }
        }
        // V4
        if c.tasks.iter().filter_map(|t| t.constraint.as_ref()).any(|a| a.min_freq > a.max_freq) {
            bad.push(Code::E304);
        }
    }
    for inst in &sys.instances {
        let c = comp(lib, sys, &inst.name.name);
        for t in &c.tasks {
            let configs: Vec<&TaskConfig> = inst.task_configs.iter().filter(|tc| tc.task.name == t.name.name).collect();
            // V5
            if configs.len() > 1 {
                bad.push(Code::E305);
            }
            let Some(tc) = configs.first() else { continue };
            match &tc.source {
                ActivationSource::DataTriggered { port, .. } => {
                    // V6
                    let read = if c.in_port(&port.name).is_some() {
                        reads_port(c, t, &port.name)
                    } else {
                        t.reads.iter().any(|r| r.port.name == port.name)
                    };
                    if !read {
                        bad.push(Code::E306);
                    }
                    // V12
                    let starved = match c.compounds.iter().find(|k| k.name.name == port.name) {
                        None => !has_incoming(sys, &inst.name.name, &port.name),
                        Some(k) => {
                            let connected =
                                k.members.iter().filter(|m| has_incoming(sys, &inst.name.name, &m.name)).count();
                            match k.combination {
                                Combination::And => connected < k.members.len(),
                                Combination::Or => connected == 0,
                            }
                        }
                    };
                    if starved {
                        bad.push(Code::E312);
                    }
                }
                ActivationSource::PeriodicTimer { frequency } => {
                    // V9
                    if let Some(a) = t.constraint.as_ref().filter(|a| a.changeable || a.min_freq != a.max_freq) {
                        if *frequency < a.min_freq || *frequency > a.max_freq {
                            bad.push(Code::E309);
                        }
                    }
                }
                ActivationSource::Sporadic { .. } => {}
            }
            // V10
            if let Some(a) = &t.constraint {
                if !a.changeable && a.min_freq == a.max_freq {
                    let conforms = match &tc.source {
                        ActivationSource::PeriodicTimer { frequency } => *frequency == a.min_freq,
                        ActivationSource::Sporadic { .. } => true,
                        ActivationSource::DataTriggered { .. } => false,
                    };
                    if !conforms {
                        bad.push(Code::E310);
                    }
                }
            }
        }
    }
    for (i, conn) in sys.connections.iter().enumerate() {
        // V7
        let from = comp(lib, sys, &conn.from.instance.name);
        let to = comp(lib, sys, &conn.to.instance.name);
        let ft = &from.out_ports[from.out_port(&conn.from.port.name).unwrap()].message_type.name;
        let tt = &to.in_ports[to.in_port(&conn.to.port.name).unwrap()].message_type.name;
        if ft != tt {
            bad.push(Code::E307);
        }
        // V8
        if sys.connections[..i].iter().any(|o| o.to == conn.to) {
            bad.push(Code::E308);
        }
    }
    // V11
    for ch in &sys.chains {
        for w in ch.stages.windows(2) {
            let c = comp(lib, sys, &w[1].instance.name);
            let writer = c.tasks.iter().find(|t| t.writes.iter().any(|x| x.name == w[1].port.name));
            let reachable = writer.is_some_and(|t| {
                sys.connections.iter().any(|conn| {
                    conn.from == w[0]
                        && conn.to.instance.name == w[1].instance.name
                        && reads_port(c, t, &conn.to.port.name)
                })
            });
            if !reachable {
                bad.push(Code::E311);
            }
        }
    }
    bad.sort();
    bad.dedup();
    bad
}

/// Break one rule on purpose; returns the code that must appear.
fn mutate(rng: &mut ChaCha8Rng, lib: &mut Lib, sys: &mut SystemConfiguration) -> Option<Code> {
    let ci = rng.gen_range(0..lib.len());
    let inst_name = sys.instances.iter().find(|i| i.component.name == lib[ci].name.name)?.name.name.clone();
    let ii = sys.instances.iter().position(|i| i.name.name == inst_name)?;
    match rng.gen_range(0..12) {
        0 => {
            // V1: a second writer for an OutPort
            let c = &mut lib[ci];
            let extra = c.out_ports[0].name.clone();
            c.tasks.push(TaskDef {
                name: Ident::new("Extra"),
                kind: TaskKind::Preemptive,
                reads: Vec::new(),
                writes: vec![extra],
                constraint: None,
                loc: Loc::default(),
            });
            sys.instances[ii].task_configs.push(TaskConfig {
                task: Ident::new("Extra"),
                source: ActivationSource::PeriodicTimer { frequency: 5.0 },
                exec: None,
                loc: Loc::default(),
            });
            Some(Code::E301)
        }
        1 => {
            // V2: duplicate port name
            let c = &mut lib[ci];
            let ty = c.out_ports[0].message_type.clone();
            let name = c.out_ports[0].name.clone();
            c.in_ports.push(InPortDef { name, message_type: ty, loc: Loc::default() });
            Some(Code::E302)
        }
        2 => {
            // V3: compound over an OutPort
            let c = &mut lib[ci];
            let k = c.compounds.first_mut()?;
            k.members[0] = c.out_ports[0].name.clone();
            Some(Code::E303)
        }
        3 => {
            // V4
            let t = &mut lib[ci].tasks[0];
            t.constraint =
                Some(ActivationConstraint { min_freq: 20.0, max_freq: 10.0, changeable: true, loc: Loc::default() });
            Some(Code::E304)
        }
        4 => {
            // V5: second binding
            let tc = sys.instances[ii].task_configs[0].clone();
            sys.instances[ii].task_configs.push(tc);
            Some(Code::E305)
        }
        5 => {
            // V6: trigger on a port the task does not read
            let c = &mut lib[ci];
            let t = c.tasks.first_mut()?;
            let p = c.in_ports.iter().find(|p| !t.reads.iter().any(|r| r.port.name == p.name.name))?.name.clone();
            if c.compounds.iter().any(|k| k.members.iter().any(|m| m.name == p.name)) {
                return None;
            }
            let tname = t.name.name.clone();
            let tc = sys.instances[ii].task_configs.iter_mut().find(|tc| tc.task.name == tname)?;
            tc.source = ActivationSource::DataTriggered { port: p, prescaler: 1 };
            Some(Code::E306)
        }
        6 => {
            // V7: type mismatch
            let c = &mut lib[ci];
            let p = c.in_ports.iter_mut().find(|p| has_incoming(sys, &inst_name, &p.name.name))?;
            p.message_type = Ident::new("Other");
            Some(Code::E307)
        }
        7 => {
            // V8: second connection into a port
            let conn = sys.connections.choose(rng)?.clone();
            sys.connections.push(conn);
            Some(Code::E308)
        }
        8 => {
            // V9: timer outside a changeable constraint
            let t = &mut lib[ci].tasks[0];
            t.constraint = Some(ActivationConstraint {
                min_freq: 1000.0,
                max_freq: 2000.0,
                changeable: true,
                loc: Loc::default(),
            });
            let tname = t.name.name.clone();
            let tc = sys.instances[ii].task_configs.iter_mut().find(|tc| tc.task.name == tname)?;
            tc.source = ActivationSource::PeriodicTimer { frequency: 5.0 };
            Some(Code::E309)
        }
        9 => {
            // V10: fixed rate bound to a different timer
            let t = &mut lib[ci].tasks[0];
            t.constraint =
                Some(ActivationConstraint { min_freq: 50.0, max_freq: 50.0, changeable: false, loc: Loc::default() });
            let tname = t.name.name.clone();
            let tc = sys.instances[ii].task_configs.iter_mut().find(|tc| tc.task.name == tname)?;
            tc.source = ActivationSource::PeriodicTimer { frequency: 20.0 };
            Some(Code::E310)
        }
        10 => {
            // V11: chain stage that does not consume the previous one
            let ch = sys.chains.first_mut()?;
            let head = ch.stages[0].clone();
            ch.stages.insert(1, head);
            Some(Code::E311)
        }
        _ => {
            // V12: remove the connection feeding a trigger port
            let c = &lib[ci];
            let inst = &sys.instances[ii];
            let port = inst.task_configs.iter().find_map(|tc| match &tc.source {
                ActivationSource::DataTriggered { port, .. } if c.in_port(&port.name).is_some() => {
                    Some(port.name.clone())
                }
                _ => None,
            })?;
            let before = sys.connections.len();
            sys.connections.retain(|k| !(k.to.instance.name == inst_name && k.to.port.name == port));
            (sys.connections.len() < before).then_some(Code::E312)
        }
    }
}

fn generated(seed: u64) -> (Lib, SystemConfiguration) {
    random_system(&mut ChaCha8Rng::seed_from_u64(seed), &GeneratorConfig::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn generated_systems_are_valid(seed in any::<u64>()) {
        let (lib, sys) = generated(seed);
        let s = resolve(&lib, &sys).unwrap();
        let report = validate_all(&s);
        prop_assert!(report.ok, "{:?}", report.diagnostics);
        prop_assert!(brute_force(&lib, &sys).is_empty());
    }

    #[test]
    fn ok_implies_every_rule_holds(seed in any::<u64>(), rounds in 1usize..3) {
        let (mut lib, mut sys) = generated(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        // A later mutation may undo an earlier one; only the last must show.
        let mut expected = None;
        for _ in 0..rounds {
            if let Some(code) = mutate(&mut rng, &mut lib, &mut sys) {
                expected = Some(code);
            }
        }
        let Ok(s) = resolve(&lib, &sys) else { return Ok(()) };
        let report = validate_all(&s);
        let brute = brute_force(&lib, &sys);
        prop_assert_eq!(report.ok, brute.is_empty(), "validator {:?} vs brute force {:?}", report.codes(), brute);
        if let Some(code) = expected {
            prop_assert!(brute.contains(&code), "mutation {:?} not seen by brute force: {:?}", code, brute);
            prop_assert!(report.codes().contains(&code), "mutation {:?} missed: {:?}", code, report.codes());
        }
    }
}

#[test]
fn unconnected_instance_keeps_system_ok() {
    let (mut lib, mut sys) = generated(7);
    lib.push(ComponentDefinition {
        name: Ident::new("Lonely"),
        in_ports: vec![InPortDef { name: Ident::new("in"), message_type: Ident::new("X"), loc: Loc::default() }],
        out_ports: vec![OutPortDef { name: Ident::new("out"), message_type: Ident::new("X"), loc: Loc::default() }],
        compounds: Vec::new(),
        tasks: vec![TaskDef {
            name: Ident::new("T"),
            kind: TaskKind::Preemptive,
            reads: vec![ReadDep { port: Ident::new("in"), dependency: Dependency::Strict }],
            writes: vec![Ident::new("out")],
            constraint: None,
            loc: Loc::default(),
        }],
        loc: Loc::default(),
    });
    sys.instances.push(ComponentInstance {
        name: Ident::new("lonely"),
        component: Ident::new("Lonely"),
        task_configs: vec![TaskConfig {
            task: Ident::new("T"),
            source: ActivationSource::PeriodicTimer { frequency: 3.0 },
            exec: Some(ExecTime::new(Nanos::ZERO, Nanos::from_millis(1))),
            loc: Loc::default(),
        }],
        loc: Loc::default(),
    });
    let report = validate_all(&resolve(&lib, &sys).unwrap());
    assert!(report.ok);
    assert!(report.codes().contains(&Code::W402));
}
