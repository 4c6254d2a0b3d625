//! Shared fixtures for the benchmarks.

use cechain_core::bundled;
use cechain_core::generate::{random_system, GeneratorConfig};
use cechain_core::project::Source;
use cechain_core::{resolve, ResolvedSystem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The bundled navigation model as source texts: components then the system.
pub fn navigation_sources() -> (Vec<Source>, Source) {
    let comps = bundled::NAVIGATION_COMPONENTS.iter().map(|(n, t)| Source::new(*n, *t)).collect();
    let (n, t) = bundled::NAVIGATION_SYSTEM;
    (comps, Source::new(n, t))
}

pub fn navigation() -> ResolvedSystem {
    let (lib, sys) = bundled::navigation();
    resolve(&lib, &sys).expect("bundled model resolves")
}

/// `count` generated systems, with the given task budget, from fixed seeds.
pub fn generated(count: u64, max_tasks: usize) -> Vec<ResolvedSystem> {
    let cfg = GeneratorConfig { max_tasks, ..GeneratorConfig::default() };
    (0..count)
        .map(|seed| {
            let (lib, sys) = random_system(&mut ChaCha8Rng::seed_from_u64(seed), &cfg);
            resolve(&lib, &sys).expect("generated systems resolve")
        })
        .collect()
}
