//! Built-in run configurations, compiled into the binary so preset runs
//! need no files on disk.

pub const NAMES: [&str; 4] = ["paper", "paper-coherent", "paper-squeezed", "paper-vacuum"];

/// TOML text for a named preset, if it exists.
pub fn lookup(name: &str) -> Option<&'static str> {
    match name {
        "paper" => Some(include_str!("../presets/paper.toml")),
        "paper-coherent" => Some(include_str!("../presets/paper-coherent.toml")),
        "paper-squeezed" => Some(include_str!("../presets/paper-squeezed.toml")),
        "paper-vacuum" => Some(include_str!("../presets/paper-vacuum.toml")),
        _ => None,
    }
}
