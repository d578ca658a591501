//! Named parameter sets for the standard figure scenarios.

use super::config::{
    default_workers, Config, InitialCovariance, ScenarioConfig, SweepAxis, SweepConfig,
};
use crate::model::SystemParams;

pub const PRESET_NAMES: [&str; 10] = [
    "fig2a",
    "fig2c",
    "fig3a",
    "fig3b",
    "fig4",
    "fig5",
    "fig6",
    "fig7",
    "fig8sweep",
    "vacuum-null",
];

fn with(f: impl FnOnce(&mut SystemParams)) -> Config {
    let mut c = ScenarioConfig::default();
    f(&mut c.params);
    Config::Scenario(c)
}

/// Looks up a preset by name. All presets start from the blue-detuned base
/// set ([`SystemParams::default`]) and change only the listed couplings.
pub fn preset(name: &str) -> Option<Config> {
    Some(match name {
        "fig2a" | "fig3a" => with(|p| p.chi_c = 0.4),
        "fig2c" | "fig3b" => with(|p| p.chi_c = 0.0),
        "fig4" => with(|p| {
            p.tunnel_j = 0.0;
            p.chi_c = 0.6;
        }),
        "fig5" | "fig7" => with(|p| {
            p.tunnel_j = 0.02;
            p.chi_c = 0.6;
        }),
        "fig6" => with(|p| {
            p.tunnel_j = 0.02;
            p.chi_c = 0.0;
        }),
        "fig8sweep" => Config::Sweep(SweepConfig {
            base: ScenarioConfig::default(),
            axes: vec![SweepAxis {
                param: "chi_c".into(),
                values: vec![0.0, 0.2, 0.4, 0.6],
            }],
            workers: default_workers(),
        }),
        "vacuum-null" => {
            let mut c = ScenarioConfig::default();
            c.params.g1 = 0.0;
            c.params.g2 = 0.0;
            c.params.tunnel_j = 0.0;
            c.params.chi_c = 0.0;
            c.params.drive1 = 0.0;
            c.params.drive2 = 0.0;
            c.initial_covariance = InitialCovariance::Vacuum;
            Config::Scenario(c)
        }
        _ => return None,
    })
}
