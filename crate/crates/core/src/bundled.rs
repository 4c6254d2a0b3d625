//! The navigation scenario shipped with the crate: Base, Laser,
//! ObstacleAvoidance, Mapper and Planner with two cause-effect chains.

use crate::dsl::{parse_component_definition, parse_system_configuration};
use crate::model::{ComponentDefinition, SystemConfiguration};

/// `(file name, contents)` of every component definition.
pub const NAVIGATION_COMPONENTS: &[(&str, &str)] = &[
    ("Base.ccd", include_str!("../models/navigation/Base.ccd")),
    ("Laser.ccd", include_str!("../models/navigation/Laser.ccd")),
    ("ObstacleAvoidance.ccd", include_str!("../models/navigation/ObstacleAvoidance.ccd")),
    ("Mapper.ccd", include_str!("../models/navigation/Mapper.ccd")),
    ("Planner.ccd", include_str!("../models/navigation/Planner.ccd")),
];

pub const NAVIGATION_SYSTEM: (&str, &str) = ("navigation.csys", include_str!("../models/navigation/navigation.csys"));

/// Reactive loop with execution times that push it to a 250 ms worst case.
pub const NAVIGATION_SLOW_EXEC: (&str, &str) =
    ("variants/navigation_slow_exec.csys", include_str!("../models/navigation/variants/navigation_slow_exec.csys"));

/// The slow variant with a faster OATask, back under the 200 ms budget.
pub const NAVIGATION_TIGHT_EXEC: (&str, &str) =
    ("variants/navigation_tight_exec.csys", include_str!("../models/navigation/variants/navigation_tight_exec.csys"));

/// OATask data-triggered on every fourth scan instead of a 10 Hz timer.
pub const NAVIGATION_SYNCHRONOUS_OA: (&str, &str) = (
    "variants/navigation_synchronous_oa.csys",
    include_str!("../models/navigation/variants/navigation_synchronous_oa.csys"),
);

pub fn navigation_library() -> Vec<ComponentDefinition> {
    NAVIGATION_COMPONENTS
        .iter()
        .map(|(file, text)| {
            let (c, diags) = parse_component_definition(text, file);
            c.unwrap_or_else(|| panic!("bundled {file} does not parse: {diags:?}"))
        })
        .collect()
}

pub fn parse_bundled_system((file, text): (&str, &str)) -> SystemConfiguration {
    let (s, diags) = parse_system_configuration(text, file);
    s.unwrap_or_else(|| panic!("bundled {file} does not parse: {diags:?}"))
}

pub fn navigation() -> (Vec<ComponentDefinition>, SystemConfiguration) {
    (navigation_library(), parse_bundled_system(NAVIGATION_SYSTEM))
}
