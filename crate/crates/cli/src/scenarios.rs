//! Scenario files shipped with the binary.

use crate::config::{parse, Config};
use crate::error::{CliError, CliResult};

pub struct Bundled {
    pub name: &'static str,
    pub source: &'static str,
}

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(Bundled { name: $name, source: include_str!(concat!("../scenarios/", $name, ".toml")) }),*]
    };
}

pub const BUNDLED: &[Bundled] = bundled![
    "fig2a_coupling_vs_flux",
    "fig2b_contour",
    "fig2c_joint_excitation",
    "fig3_collapse_revival",
    "figS5d_quantum_switch",
    "figS8_dissipative_redistribution",
    "figS9_jc_comparison",
];

pub fn find(name: &str) -> CliResult<&'static Bundled> {
    BUNDLED.iter().find(|b| b.name == name).ok_or_else(|| {
        let names: Vec<&str> = BUNDLED.iter().map(|b| b.name).collect();
        CliError::Config(format!("unknown scenario `{name}`; available: {}", names.join(", ")))
    })
}

pub fn load(name: &str) -> CliResult<Config> {
    parse(find(name)?.source)
}
