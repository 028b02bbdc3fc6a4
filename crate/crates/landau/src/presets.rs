//! Bundled scenario files. Each benchmark scenario has a full-scale preset
//! and a `_desk` variant that runs in minutes on a laptop.

pub const PRESET_NAMES: &[&str] = &[
    "bkw_example1",
    "bkw_example1_desk",
    "bkw_example2",
    "bkw_example2_desk",
    "bkw_example3",
    "bkw_example3_desk",
    "coulomb_example1",
    "coulomb_example1_desk",
    "coulomb_example2",
    "coulomb_example2_desk",
    "coulomb_example2_same_domain",
    "coulomb_example2_same_domain_desk",
];

/// TOML text of a bundled preset, by name.
pub fn bundled(name: &str) -> Option<&'static str> {
    Some(match name {
        "bkw_example1" => include_str!("../presets/bkw_example1.toml"),
        "bkw_example1_desk" => include_str!("../presets/bkw_example1_desk.toml"),
        "bkw_example2" => include_str!("../presets/bkw_example2.toml"),
        "bkw_example2_desk" => include_str!("../presets/bkw_example2_desk.toml"),
        "bkw_example3" => include_str!("../presets/bkw_example3.toml"),
        "bkw_example3_desk" => include_str!("../presets/bkw_example3_desk.toml"),
        "coulomb_example1" => include_str!("../presets/coulomb_example1.toml"),
        "coulomb_example1_desk" => include_str!("../presets/coulomb_example1_desk.toml"),
        "coulomb_example2" => include_str!("../presets/coulomb_example2.toml"),
        "coulomb_example2_desk" => include_str!("../presets/coulomb_example2_desk.toml"),
        "coulomb_example2_same_domain" => {
            include_str!("../presets/coulomb_example2_same_domain.toml")
        }
        "coulomb_example2_same_domain_desk" => {
            include_str!("../presets/coulomb_example2_same_domain_desk.toml")
        }
        _ => return None,
    })
}
