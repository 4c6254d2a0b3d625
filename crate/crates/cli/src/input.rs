//! Turning command-line paths into model sources.

use std::fs;
use std::path::{Path, PathBuf};

use cechain_core::dsl::{COMPONENT_EXTENSION, SYSTEM_EXTENSION};
use cechain_core::project::Source;

use crate::Failure;

pub struct Inputs {
    pub components: Vec<Source>,
    pub system: Option<Source>,
}

fn extension(p: &Path) -> Option<&str> {
    p.extension().and_then(|e| e.to_str())
}

/// Directories contribute their `.ccd` and `.csys` files (not recursively),
/// in name order. Plain files must carry one of the two extensions.
pub fn expand(paths: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = fs::read_dir(p).map_err(|e| Failure::io(p, &e))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && matches!(extension(f), Some(COMPONENT_EXTENSION | SYSTEM_EXTENSION)))
                .collect();
            found.sort();
            out.extend(found);
        } else if matches!(extension(p), Some(COMPONENT_EXTENSION | SYSTEM_EXTENSION)) {
            out.push(p.clone());
        } else if !p.exists() {
            return Err(Failure::usage(format!("{}: no such file or directory", p.display())));
        } else {
            return Err(Failure::usage(format!(
                "{}: expected a .{COMPONENT_EXTENSION} or .{SYSTEM_EXTENSION} file",
                p.display()
            )));
        }
    }
    Ok(out)
}

/// Reads every file; `need_system` demands exactly one system file.
pub fn load(paths: &[PathBuf], need_system: bool) -> Result<Inputs, Failure> {
    let files = expand(paths)?;
    let mut components = Vec::new();
    let mut systems = Vec::new();
    for f in &files {
        let text = fs::read_to_string(f).map_err(|e| Failure::io(f, &e))?;
        let src = Source::new(f.display().to_string(), text);
        if extension(f) == Some(SYSTEM_EXTENSION) {
            systems.push(src);
        } else {
            components.push(src);
        }
    }
    if components.is_empty() && systems.is_empty() {
        return Err(Failure::usage("no model files given"));
    }
    if systems.len() > 1 {
        let names: Vec<&str> = systems.iter().map(|s| s.name.as_str()).collect();
        return Err(Failure::usage(format!("expected one .{SYSTEM_EXTENSION} file, got {}", names.join(", "))));
    }
    if need_system && systems.is_empty() {
        return Err(Failure::usage(format!("a .{SYSTEM_EXTENSION} file is required")));
    }
    Ok(Inputs { components, system: systems.pop() })
}
