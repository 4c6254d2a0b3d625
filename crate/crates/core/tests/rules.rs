//! One violating and one conforming fixture per validation rule.

use std::fs;
use std::path::{Path, PathBuf};

use cechain_core::project::{check, Checked, Source};
use cechain_core::Code;

const RULES: [(&str, Code); 12] = [
    ("v01", Code::E301),
    ("v02", Code::E302),
    ("v03", Code::E303),
    ("v04", Code::E304),
    ("v05", Code::E305),
    ("v06", Code::E306),
    ("v07", Code::E307),
    ("v08", Code::E308),
    ("v09", Code::E309),
    ("v10", Code::E310),
    ("v11", Code::E311),
    ("v12", Code::E312),
];

fn fixture(rule: &str, case: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/rules").join(rule).join(case)
}

fn load(dir: &Path) -> Checked {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    let source = |p: &PathBuf| Source::new(p.display().to_string(), fs::read_to_string(p).unwrap());
    let comps: Vec<Source> = paths.iter().filter(|p| p.extension().is_some_and(|e| e == "ccd")).map(source).collect();
    let sys = paths.iter().find(|p| p.extension().is_some_and(|e| e == "csys")).map(source);
    check(&comps, sys.as_ref())
}

fn errors(c: &Checked) -> Vec<Code> {
    c.errors().map(|d| d.code).collect()
}

#[test]
fn every_violation_reports_exactly_its_code() {
    for (rule, code) in RULES {
        assert_eq!(errors(&load(&fixture(rule, "violation"))), vec![code], "{rule}");
    }
}

#[test]
fn every_conforming_fixture_is_clean() {
    for (rule, _) in RULES {
        let c = load(&fixture(rule, "conforming"));
        assert!(c.diagnostics.is_empty(), "{rule}: {:?}", c.diagnostics);
        assert!(c.resolved.is_some());
    }
}

#[test]
fn diagnostics_point_into_the_sources() {
    for (rule, _) in RULES {
        for d in load(&fixture(rule, "violation")).errors() {
            assert!(!d.span.is_synthetic(), "{rule}: {d:?}");
        }
    }
}
