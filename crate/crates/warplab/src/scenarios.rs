//! Canned scenarios shipped with the binary.

use crate::config::{parse_config, Scenario};
use crate::error::{Error, Result};

/// `(name, description, text)` of every canned scenario.
pub const BUILTIN: &[(&str, &str, &str)] = &[
    (
        "flat_gaussian",
        "flat plane, V = -r², every condition holds",
        include_str!("../scenarios/flat_gaussian.toml"),
    ),
    (
        "paper_example",
        "exponentially warped plane at the threshold; moments and LSI fail",
        include_str!("../scenarios/paper_example.toml"),
    ),
    (
        "power_surface",
        "Ricci -ε r^6 with cubic potential; ultracontractive",
        include_str!("../scenarios/power_surface.toml"),
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    BUILTIN.iter().map(|b| b.0)
}

pub fn text(name: &str) -> Result<&'static str> {
    BUILTIN
        .iter()
        .find(|b| b.0 == name)
        .map(|b| b.2)
        .ok_or_else(|| Error::UnknownScenario(name.into()))
}

pub fn load(name: &str) -> Result<Scenario> {
    parse_config(text(name)?)
}
