//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the verdict lines are always printed; exits non-zero if any fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use cechain_core::analyze::{analyze, Frequency, Sampling, Verdict};
use cechain_core::bundled;
use cechain_core::dsl::{parse_component_definition, parse_system_configuration, print_component, print_system};
use cechain_core::generate::{random_system, GeneratorConfig};
use cechain_core::model::{ComponentDefinition, SystemConfiguration};
use cechain_core::project::{check, Source};
use cechain_core::sim::{compare, measure_chain, simulate, ContainmentVerdict, ExecPolicy, PhasePolicy, SimConfig};
use cechain_core::validate::validate_all;
use cechain_core::{resolve, Code, Nanos, ResolvedSystem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn models() -> PathBuf {
    root().join("crates/core/models/navigation")
}

fn cechain(args: &[&Path]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cechain")).args(args).output().expect("binary runs")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

fn resolved(system: (&str, &str)) -> ResolvedSystem {
    resolve(&bundled::navigation_library(), &bundled::parse_bundled_system(system)).expect("bundled model resolves")
}

fn hz(s: &ResolvedSystem, report: &cechain_core::analyze::AnalysisReport, inst: &str, task: &str) -> Option<f64> {
    match report.frequency_of(s, inst, task) {
        Some(Frequency::Known(f)) => Some(f),
        _ => None,
    }
}

fn link_class(
    s: &ResolvedSystem,
    report: &cechain_core::analyze::AnalysisReport,
    from: &str,
    to: &str,
) -> Option<Sampling> {
    report.sampling.iter().find_map(|c| {
        let conn = &s.connections[c.connection];
        (s.out_port_label(conn.from) == from && s.in_port_label(conn.to) == to).then_some(c.class)
    })
}

fn frequency_reproduction() -> Outcome {
    let start = Instant::now();
    let s = resolved(bundled::NAVIGATION_SYSTEM);
    let report = analyze(&s);
    let mapper = hz(&s, &report, "mapper", "MapperTask");
    let laser = hz(&s, &report, "laser", "LaserTask");
    ensure(mapper == Some(4.0) && laser == Some(40.0), || format!("MapperTask {mapper:?}, LaserTask {laser:?}"))?;
    let took = within(Duration::from_secs(1), start)?;
    Ok(format!("MapperTask = 4 Hz from 40 Hz / 10 in {took:.1?}"))
}

fn alternative_binding() -> Outcome {
    let start = Instant::now();
    let s = resolved(bundled::NAVIGATION_SYNCHRONOUS_OA);
    let report = analyze(&s);
    let oa = hz(&s, &report, "oa", "OATask");
    ensure(oa == Some(10.0), || format!("OATask {oa:?}"))?;
    let warnings: Vec<String> = report
        .diagnostics
        .iter()
        .filter(|d| matches!(d.code, Code::W403 | Code::W404 | Code::W405) && d.message.contains("oa.laserIn"))
        .map(|d| d.to_string())
        .collect();
    ensure(warnings.is_empty(), || format!("laser link warnings: {warnings:?}"))?;
    let took = within(Duration::from_secs(1), start)?;
    Ok(format!("OATask = 10 Hz data-triggered, no laser-link warnings, {took:.1?}"))
}

fn sampling_classification() -> Outcome {
    let s = resolved(bundled::NAVIGATION_SYSTEM);
    let report = analyze(&s);
    let class = link_class(&s, &report, "laser.scanOut", "oa.laserIn");
    ensure(class == Some(Sampling::Undersampling(4.0)), || format!("laser -> OA: {class:?}"))?;

    let lib = [
        "component P { outport out : D; task T { writes out; } }",
        "component C { inport in : D; outport out : D; task T { reads in; writes out; } }",
    ]
    .map(|t| parse_component_definition(t, "c.ccd").0.expect("parses"));
    let cfg = parse_system_configuration(
        "system S {
            instance p : P { task T periodic 10 Hz; }
            instance c : C { task T periodic 50 Hz; }
            connect p.out -> c.in;
        }",
        "s.csys",
    )
    .0
    .expect("parses");
    let s = resolve(&lib, &cfg).expect("resolves");
    let report = analyze(&s);
    let class = link_class(&s, &report, "p.out", "c.in");
    ensure(class == Some(Sampling::Oversampling(5.0)), || format!("10 Hz -> 50 Hz: {class:?}"))?;
    Ok("UNDERSAMPLING(4) on the laser link, OVERSAMPLING(5) for 10 Hz -> 50 Hz".into())
}

fn validation_rules() -> Outcome {
    let rules = [
        Code::E301,
        Code::E302,
        Code::E303,
        Code::E304,
        Code::E305,
        Code::E306,
        Code::E307,
        Code::E308,
        Code::E309,
        Code::E310,
        Code::E311,
        Code::E312,
    ];
    let mut covered = 0;
    for (i, code) in rules.iter().enumerate() {
        let dir = root().join(format!("fixtures/rules/v{:02}", i + 1));
        let bad = run_check(&dir.join("violation"));
        let good = run_check(&dir.join("conforming"));
        let bad_errors: Vec<Code> = bad.errors().map(|d| d.code).collect();
        ensure(bad_errors == [*code], || format!("V{} violation gave {bad_errors:?}", i + 1))?;
        ensure(good.diagnostics.is_empty(), || format!("V{} conforming gave {:?}", i + 1, good.diagnostics))?;
        covered += 1;
    }
    Ok(format!("{covered}/12 rules: violation gives exactly its code, conforming gives none"))
}

fn run_check(dir: &Path) -> cechain_core::project::Checked {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir).expect("fixture dir").map(|e| e.expect("entry").path()).collect();
    paths.sort();
    let source = |p: &PathBuf| Source::new(p.display().to_string(), fs::read_to_string(p).expect("readable"));
    let comps: Vec<Source> = paths.iter().filter(|p| p.extension().is_some_and(|e| e == "ccd")).map(source).collect();
    let sys = paths.iter().find(|p| p.extension().is_some_and(|e| e == "csys")).map(source);
    check(&comps, sys.as_ref())
}

fn oracle_containment() -> Outcome {
    let start = Instant::now();
    let cfg = GeneratorConfig::default();
    let (mut systems, mut runs, mut measured) = (0, 0, 0usize);
    let mut n = 0u64;
    while systems < 20 {
        let (lib, sys) = random_system(&mut ChaCha8Rng::seed_from_u64(n), &cfg);
        n += 1;
        let s = resolve(&lib, &sys).map_err(|e| e.to_string())?;
        ensure(validate_all(&s).ok, || format!("generated system {} is invalid", n - 1))?;
        let report = analyze(&s);
        let chains: Vec<_> = report
            .chains
            .iter()
            .filter_map(|c| c.result.as_ref().ok().filter(|i| i.worst_secs().is_some()).map(|i| (c.chain, i)))
            .collect();
        if chains.is_empty() {
            continue;
        }
        systems += 1;
        for seed in 0..10 {
            let sc = SimConfig::new(Nanos(30_000_000_000), seed);
            let events = simulate(&s, &sc).map_err(|e| e.to_string())?;
            runs += 1;
            for (ci, interval) in &chains {
                let samples = measure_chain(&s, &events, &s.chains[*ci]);
                let v = compare(interval, &samples);
                measured += samples.iter().filter(|x| x.latency.is_some()).count();
                ensure(v.verdict != ContainmentVerdict::Violation, || {
                    format!(
                        "system {} seed {seed} chain {}: {:?} outside {interval:?}",
                        n - 1,
                        s.chains[*ci].name,
                        v.stats
                    )
                })?;
            }
        }
    }
    let took = within(Duration::from_secs(60), start)?;
    Ok(format!("{systems} systems x 10 seeds x 30 s ({runs} runs, {measured} latencies), 0 violations, {took:.1?}"))
}

fn bound_tightness() -> Outcome {
    let lib = [
        "component P { outport out : D; task T { writes out; } }",
        "component C { inport in : D; outport out : D; task T { reads in; writes out; } }",
    ]
    .map(|t| parse_component_definition(t, "c.ccd").0.expect("parses"));
    let cfg = parse_system_configuration(
        "system S {
            instance p : P { task T periodic 40 Hz; }
            instance c : C { task T periodic 10 Hz; }
            connect p.out -> c.in;
            chain H = p.out -> c.out;
        }",
        "s.csys",
    )
    .0
    .expect("parses");
    let s = resolve(&lib, &cfg).expect("resolves");
    let report = analyze(&s);
    let worst = report.chains[0].result.as_ref().ok().and_then(|i| i.worst_secs()).ok_or("hop not bounded")?;
    let mut max = Nanos::ZERO;
    let phases = 100;
    for seed in 0..phases {
        let sc = SimConfig {
            duration: Nanos(5_000_000_000),
            seed,
            phase_policy: PhasePolicy::Random,
            exec_policy: ExecPolicy::Wcet,
        };
        let events = simulate(&s, &sc).map_err(|e| e.to_string())?;
        for x in measure_chain(&s, &events, &s.chains[0]) {
            max = max.max(x.latency.unwrap_or(Nanos::ZERO));
        }
    }
    let observed = max.as_secs_f64();
    ensure(observed > 0.9 * worst, || format!("observed max {observed} s, 0.9 x worst = {}", 0.9 * worst))?;
    ensure(max <= Nanos::from_millis(100), || format!("observed max {max} exceeds 100 ms"))?;
    Ok(format!("analytic worst {:.3} ms, observed max {:.3} ms over {phases} phases", worst * 1e3, observed * 1e3))
}

fn analyze_variant(system: &str) -> Result<(i32, Value), String> {
    let mut args: Vec<PathBuf> = fs::read_dir(models())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "ccd"))
        .collect();
    args.sort();
    args.insert(0, "analyze".into());
    args.push(models().join("variants").join(system));
    args.extend(["--chain".into(), "FastReactiveNavigationLoop".into(), "--format".into(), "json".into()]);
    let refs: Vec<&Path> = args.iter().map(PathBuf::as_path).collect();
    let o = cechain(&refs);
    let v: Value = serde_json::from_slice(&o.stdout).map_err(|e| e.to_string())?;
    Ok((o.status.code().unwrap_or(-1), v["chains"][0].clone()))
}

fn spec_verdicts() -> Outcome {
    let (slow_code, slow) = analyze_variant("navigation_slow_exec.csys")?;
    let slow_worst = slow["interval"]["worst"].as_f64().unwrap_or(f64::NAN);
    ensure((slow_worst - 0.25).abs() < 1e-6, || format!("slow worst {slow_worst}"))?;
    ensure(slow_code == 2 && slow["verdict"] == Verdict::ViolatesSpec.as_str(), || {
        format!("slow variant: exit {slow_code}, {}", slow["verdict"])
    })?;
    let (tight_code, tight) = analyze_variant("navigation_tight_exec.csys")?;
    let tight_worst = tight["interval"]["worst"].as_f64().unwrap_or(f64::NAN);
    ensure(tight_worst <= 0.2, || format!("tightened worst {tight_worst}"))?;
    ensure(tight_code == 0 && tight["verdict"] == Verdict::MeetsSpec.as_str(), || {
        format!("tightened variant: exit {tight_code}, {}", tight["verdict"])
    })?;
    Ok(format!(
        "worst {:.0} ms -> VIOLATES_SPEC, exit 2; tightened {:.0} ms -> MEETS_SPEC, exit 0",
        slow_worst * 1e3,
        tight_worst * 1e3
    ))
}

fn round_trips(lib: &[ComponentDefinition], sys: &SystemConfiguration) -> bool {
    let comps_ok = lib.iter().all(|c| {
        let (back, diags) = parse_component_definition(&print_component(c), "c.ccd");
        diags.iter().all(|d| !d.is_error()) && back.as_ref() == Some(c)
    });
    let (back, diags) = parse_system_configuration(&print_system(sys), "s.csys");
    comps_ok && diags.iter().all(|d| !d.is_error()) && back.as_ref() == Some(sys)
}

fn dsl_round_trip() -> Outcome {
    let (lib, sys) = bundled::navigation();
    let mut failures = Vec::new();
    if !round_trips(&lib, &sys) {
        failures.push("navigation".to_string());
    }
    for variant in [bundled::NAVIGATION_SLOW_EXEC, bundled::NAVIGATION_TIGHT_EXEC, bundled::NAVIGATION_SYNCHRONOUS_OA] {
        if !round_trips(&[], &bundled::parse_bundled_system(variant)) {
            failures.push(variant.0.to_string());
        }
    }
    let generated = 500;
    for seed in 0..generated {
        let (lib, sys) = random_system(&mut ChaCha8Rng::seed_from_u64(seed), &GeneratorConfig::default());
        if !round_trips(&lib, &sys) {
            failures.push(format!("generated #{seed}"));
        }
    }
    ensure(failures.is_empty(), || format!("failed: {failures:?}"))?;
    Ok(format!("bundled models and {generated} generated models, 0 failures"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for i in 0..2 {
        let trace = dir.path().join(format!("trace{i}.jsonl"));
        let o = cechain(&[
            Path::new("simulate"),
            &models(),
            Path::new("--seed"),
            Path::new("42"),
            Path::new("--duration"),
            Path::new("60"),
            Path::new("--compare"),
            Path::new("--trace"),
            &trace,
        ]);
        ensure(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
        runs.push((o.stdout, fs::read(&trace).map_err(|e| e.to_string())?));
    }
    ensure(runs[0].1 == runs[1].1, || "traces differ".into())?;
    ensure(runs[0].0 == runs[1].0, || "stats differ".into())?;
    Ok(format!("two runs of seed 42: identical {}-byte traces and stats", runs[0].1.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("frequency reproduction", frequency_reproduction),
        ("alternative binding", alternative_binding),
        ("sampling classification", sampling_classification),
        ("validation rules", validation_rules),
        ("oracle containment", oracle_containment),
        ("bound tightness", bound_tightness),
        ("spec verdicts", spec_verdicts),
        ("DSL round-trip", dsl_round_trip),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
