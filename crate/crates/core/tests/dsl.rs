use cechain_core::bundled::{self, NAVIGATION_COMPONENTS};
use cechain_core::dsl::{parse_component_definition, parse_system_configuration, print_component, print_system};
use cechain_core::generate::{random_system, GeneratorConfig};
use cechain_core::model::*;
use cechain_core::{Code, Nanos, Severity};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn component(text: &str) -> ComponentDefinition {
    let (c, d) = parse_component_definition(text, "c.ccd");
    assert!(d.iter().all(|d| d.severity != Severity::Error), "{d:?}");
    c.unwrap()
}

fn system(text: &str) -> SystemConfiguration {
    let (s, d) = parse_system_configuration(text, "s.csys");
    assert!(d.iter().all(|d| d.severity != Severity::Error), "{d:?}");
    s.unwrap()
}

fn codes_c(text: &str) -> Vec<Code> {
    parse_component_definition(text, "c.ccd").1.iter().map(|d| d.code).collect()
}

fn codes_s(text: &str) -> Vec<Code> {
    parse_system_configuration(text, "s.csys").1.iter().map(|d| d.code).collect()
}

fn round_trip(lib: &[ComponentDefinition], sys: &SystemConfiguration) {
    for c in lib {
        let text = print_component(c);
        let back = component(&text);
        assert_eq!(&back, c, "{text}");
        assert_eq!(print_component(&back), text);
    }
    let text = print_system(sys);
    let back = system(&text);
    assert_eq!(&back, sys, "{text}");
    assert_eq!(print_system(&back), text);
}

#[test]
fn bundled_models_round_trip() {
    let (lib, sys) = bundled::navigation();
    round_trip(&lib, &sys);
    for variant in [bundled::NAVIGATION_SLOW_EXEC, bundled::NAVIGATION_SYNCHRONOUS_OA] {
        round_trip(&[], &bundled::parse_bundled_system(variant));
    }
}

#[test]
fn generated_models_round_trip() {
    for seed in 0..500 {
        let (lib, sys) = random_system(&mut ChaCha8Rng::seed_from_u64(seed), &GeneratorConfig::default());
        round_trip(&lib, &sys);
    }
}

#[test]
fn base_component_declaration() {
    let (_, text) = NAVIGATION_COMPONENTS[0];
    let base = component(text);
    assert_eq!(base.name.name, "Base");
    assert_eq!(base.in_ports[0].name.name, "navVelIn");
    assert_eq!(base.out_ports[0].name.name, "odomOut");
    let pose = &base.tasks[base.task("PoseUpdateTask").unwrap()];
    let c = pose.constraint.as_ref().unwrap();
    assert_eq!((c.min_freq, c.max_freq, c.changeable), (50.0, 50.0, false));
    let motion = &base.tasks[base.task("MotionExecTask").unwrap()];
    assert_eq!(motion.reads[0].port.name, "navVelIn");
}

#[test]
fn empty_component() {
    let (c, d) = parse_component_definition("component C { }", "c.ccd");
    assert!(d.is_empty());
    let c = c.unwrap();
    assert_eq!(print_component(&c), "component C { }\n");
}

#[test]
fn undeclared_write_is_e101_on_the_name() {
    let (c, d) = parse_component_definition("component C {\n  task T { writes nope; }\n}", "c.ccd");
    assert!(c.is_none() || d.iter().any(|d| d.severity == Severity::Error));
    let e = d.iter().find(|d| d.code == Code::E101).expect("E101");
    assert_eq!((e.span.start_line, e.span.start_col, e.span.end_col), (2, 19, 23));
}

#[test]
fn navigation_chain_has_four_stages() {
    let sys = bundled::parse_bundled_system(bundled::NAVIGATION_SYSTEM);
    let fast = sys.chains.iter().find(|c| c.name.name == "FastReactiveNavigationLoop").unwrap();
    assert_eq!(fast.stages.len(), 4);
    assert_eq!(fast.spec.unwrap().max, Nanos::from_millis(200));
}

#[test]
fn single_stage_chain_is_e201() {
    assert!(codes_s("system S { chain H = a.out; }").contains(&Code::E201));
}

#[test]
fn periodic_source() {
    let s = system("system S { instance a : A { task T periodic 10 Hz; } }");
    assert_eq!(s.instances[0].task_configs[0].source, ActivationSource::PeriodicTimer { frequency: 10.0 });
}

#[test]
fn sources_and_units() {
    let s = system(
        "system S { instance a : A {
            task T datatriggered in / 4 exec [0.5 s, 1 s];
            task U sporadic [0.001 s, 0.25 s];
            task V sporadic;
        } connect a.out -> b.in delay 2 ms; }",
    );
    let cfg = &s.instances[0].task_configs;
    assert_eq!(cfg[0].source, ActivationSource::DataTriggered { port: Ident::new("in"), prescaler: 4 });
    assert_eq!(cfg[0].exec, Some(ExecTime::new(Nanos::from_millis(500), Nanos::from_millis(1000))));
    assert_eq!(
        cfg[1].source,
        ActivationSource::Sporadic {
            min_interarrival: Some(Nanos::from_millis(1)),
            max_interarrival: Some(Nanos::from_millis(250)),
        }
    );
    assert_eq!(cfg[2].source, ActivationSource::Sporadic { min_interarrival: None, max_interarrival: None });
    assert_eq!(s.connections[0].delay, Nanos::from_millis(2));
}

#[test]
fn bad_prescaler_and_values() {
    assert!(codes_s("system S { instance a : A { task T datatriggered in / 0; } }").contains(&Code::E202));
    assert!(codes_s("system S { instance a : A { task T periodic 0 Hz; } }").contains(&Code::E203));
    assert!(codes_s("system S { instance a : A { task T periodic 1 Hz exec [2 s, 1 s]; } }").contains(&Code::E203));
}

#[test]
fn keywords_are_contextual() {
    let c = component(
        "component task { inport reads : system; outport writes : D; task task { reads reads; writes writes; } }",
    );
    assert_eq!(c.name.name, "task");
    assert_eq!(c.tasks[0].reads[0].port.name, "reads");
}

#[test]
fn recovers_after_errors() {
    let text = "component C {\n  inport a D;\n  outport b : ;\n  task T { writes b; }\n}";
    let d = codes_c(text);
    assert!(d.len() >= 2, "{d:?}");
    let s = codes_s("system S {\n instance a : { }\n connect a.x -> ;\n chain H = a.x -> b.y;\n}");
    assert!(s.len() >= 2, "{s:?}");
}

#[test]
fn invalid_character_is_e104() {
    assert!(codes_c("component C { $ }").contains(&Code::E104));
}

#[test]
fn diagnostics_are_deterministic() {
    let text = "component C {\n  inport a D;\n  task T { writes x; }\n  outport ; }";
    let a = parse_component_definition(text, "c.ccd").1;
    let b = parse_component_definition(text, "c.ccd").1;
    assert_eq!(a, b);
}

#[test]
fn comments_are_ignored() {
    let c = component("// header\ncomponent C { // trailing\n  outport o : D; // port\n  task T { writes o; }\n}\n");
    assert_eq!(c.out_ports.len(), 1);
}
