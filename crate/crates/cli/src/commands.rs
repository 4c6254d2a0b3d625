use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use cechain_core::analyze::{analyze as run_analysis, fmt_ms, interval_json, render_human, report_json};
use cechain_core::project::{check as check_sources, Checked};
use cechain_core::sim::{
    compare, exec_name, latency_stats, measure_chain, phase_name, simulate as run_simulation, trace_jsonl,
    ContainmentVerdict, LatencyStats, SimConfig,
};
use cechain_core::table::activation_table;
use cechain_core::time::NANOS_PER_SEC;
use cechain_core::{ResolvedSystem, Severity};
use serde_json::{json, Value};

use crate::input::load;
use crate::style::Style;
use crate::{Failure, EXIT_VALIDATION, EXIT_VIOLATION};

pub const SIMULATION_VERSION: u32 = 1;

fn summary(c: &Checked) -> String {
    let count = |sev| c.diagnostics.iter().filter(|d| d.severity == sev).count();
    let (e, w) = (count(Severity::Error), count(Severity::Warning));
    format!("{e} error{}, {w} warning{}", if e == 1 { "" } else { "s" }, if w == 1 { "" } else { "s" })
}

pub fn check(paths: &[PathBuf], style: &Style) -> Result<u8, Failure> {
    let inputs = load(paths, false)?;
    let checked = check_sources(&inputs.components, inputs.system.as_ref());
    for d in &checked.diagnostics {
        println!("{}", style.diagnostic(d));
    }
    println!("{}", summary(&checked));
    Ok(if checked.ok() { 0 } else { EXIT_VALIDATION })
}

/// Loads and checks a full model. Diagnostics go to standard error; `Err`
/// carries the exit status when the model cannot be used.
fn model(paths: &[PathBuf], style: &Style) -> Result<Result<ResolvedSystem, u8>, Failure> {
    let inputs = load(paths, true)?;
    let checked = check_sources(&inputs.components, inputs.system.as_ref());
    for d in &checked.diagnostics {
        eprintln!("{}", style.diagnostic(d));
    }
    match checked.resolved {
        Some(s) if checked.diagnostics.iter().all(|d| d.severity != Severity::Error) => Ok(Ok(s)),
        _ => {
            eprintln!("{}", summary(&checked));
            Ok(Err(EXIT_VALIDATION))
        }
    }
}

fn chain_index(s: &ResolvedSystem, name: &str) -> Result<usize, Failure> {
    s.chains.iter().position(|c| c.name == name).ok_or_else(|| {
        let known: Vec<&str> = s.chains.iter().map(|c| c.name.as_str()).collect();
        Failure::usage(format!("unknown chain `{name}` (known: {})", known.join(", ")))
    })
}

pub fn analyze(paths: &[PathBuf], chain: Option<&str>, json: bool, style: &Style) -> Result<u8, Failure> {
    let s = match model(paths, style)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let mut report = run_analysis(&s);
    if let Some(name) = chain {
        let i = chain_index(&s, name)?;
        report.chains.retain(|c| c.chain == i);
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&report_json(&s, &report)).expect("report serializes"));
    } else {
        print!("{}", style.verdicts(&render_human(&s, &report)));
    }
    Ok(if report.any_violation() { EXIT_VIOLATION } else { 0 })
}

pub struct SimulateOptions<'a> {
    pub chain: Option<&'a str>,
    pub compare: bool,
    pub trace: Option<&'a Path>,
    pub json: bool,
}

struct ChainResult {
    name: String,
    samples: usize,
    stats: Option<LatencyStats>,
    dropped: usize,
    /// Analytic interval as JSON and text, with the containment verdict.
    comparison: Option<(Value, String, ContainmentVerdict)>,
}

pub fn simulate(paths: &[PathBuf], cfg: &SimConfig, opts: &SimulateOptions, style: &Style) -> Result<u8, Failure> {
    let s = match model(paths, style)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let selected: Vec<usize> = match opts.chain {
        Some(name) => vec![chain_index(&s, name)?],
        None => (0..s.chains.len()).collect(),
    };
    let events = run_simulation(&s, cfg).map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(path) = opts.trace {
        fs::write(path, trace_jsonl(&s, cfg, &events)).map_err(|e| Failure::io(path, &e))?;
    }
    let analysis = opts.compare.then(|| run_analysis(&s));
    let mut results = Vec::new();
    for &ci in &selected {
        let chain = &s.chains[ci];
        let samples = measure_chain(&s, &events, chain);
        let comparison =
            analysis.as_ref().and_then(|a| a.chains.iter().find(|c| c.chain == ci)).map(|c| match &c.result {
                Ok(interval) => {
                    let text = match interval.worst_secs() {
                        Some(w) => format!("[{}, {}]", fmt_ms(interval.best), fmt_ms(w)),
                        None => format!("[{}, unbounded]", fmt_ms(interval.best)),
                    };
                    (interval_json(interval), text, compare(interval, &samples).verdict)
                }
                Err(e) => (Value::Null, format!("not analyzable: {}", e.reason), ContainmentVerdict::Inconclusive),
            });
        results.push(ChainResult {
            name: chain.name.clone(),
            samples: samples.len(),
            stats: latency_stats(&samples),
            dropped: samples.iter().filter(|x| x.dropped).count(),
            comparison,
        });
    }
    if opts.json {
        let v = simulation_json(&s, cfg, &results);
        println!("{}", serde_json::to_string_pretty(&v).expect("stats serialize"));
    } else {
        print!("{}", style.verdicts(&simulation_human(&s, cfg, &results)));
    }
    let violated = results.iter().any(|r| matches!(r.comparison, Some((_, _, ContainmentVerdict::Violation))));
    Ok(if violated { EXIT_VIOLATION } else { 0 })
}

fn simulation_json(s: &ResolvedSystem, cfg: &SimConfig, results: &[ChainResult]) -> Value {
    let chains: Vec<Value> = results
        .iter()
        .map(|r| {
            let mut v = json!({
                "name": r.name,
                "samples": r.samples,
                "measured": r.stats.map_or(0, |st| st.count),
                "dropped": r.dropped,
                "latency": r.stats.map(|st| json!({
                    "min": st.min,
                    "mean": st.mean,
                    "p99": st.p99,
                    "max": st.max,
                })),
            });
            if let Some((interval, _, verdict)) = &r.comparison {
                v["analysis"] = interval.clone();
                v["containment"] = json!(verdict.as_str());
            }
            v
        })
        .collect();
    json!({
        "simulationVersion": SIMULATION_VERSION,
        "system": s.name(),
        "durationNs": cfg.duration.0,
        "seed": cfg.seed,
        "phasePolicy": phase_name(cfg.phase_policy),
        "execPolicy": exec_name(cfg.exec_policy),
        "chains": chains,
    })
}

fn simulation_human(s: &ResolvedSystem, cfg: &SimConfig, results: &[ChainResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "system {}  duration {} s  seed {}  phase {}  exec {}",
        s.name(),
        cfg.duration.to_decimal(NANOS_PER_SEC),
        cfg.seed,
        phase_name(cfg.phase_policy),
        exec_name(cfg.exec_policy)
    );
    for r in results {
        let _ = writeln!(out, "  {}", r.name);
        let measured = r.stats.map_or(0, |st| st.count);
        let _ = writeln!(out, "    samples {}  measured {measured}  dropped {}", r.samples, r.dropped);
        match r.stats {
            Some(st) => {
                let _ = writeln!(
                    out,
                    "    latency min {}  mean {}  p99 {}  max {}",
                    fmt_ms(st.min),
                    fmt_ms(st.mean),
                    fmt_ms(st.p99),
                    fmt_ms(st.max)
                );
            }
            None => {
                let _ = writeln!(out, "    latency none observed");
            }
        }
        if let Some((_, text, verdict)) = &r.comparison {
            let _ = writeln!(out, "    analytic {text}  {}", verdict.as_str());
        }
    }
    out
}

pub fn export_table(paths: &[PathBuf], out: Option<&Path>, style: &Style) -> Result<u8, Failure> {
    let s = match model(paths, style)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let text = activation_table(&s).to_json();
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(path, &e))?,
        None => print!("{text}"),
    }
    Ok(0)
}
