//! Canned configurations for the plotted cases and the single-soliton
//! reductions. Each is plain config text, so it goes through the same parser
//! as user files.

use crate::config::{parse_config, ConfigError, ScenarioConfig};

pub const CANNED: &[(&str, &str)] = &[
    // knocking down the slow soliton
    ("fig2", "scenario = two_soliton\n"),
    // reading stored polarization at zero background; the standing peak
    // sits at zeta = 0 for c2 = c3, so the window starts before it
    (
        "fig3",
        "scenario = zero_background\nomega0 = 0\nzeta_min = -4\nzeta_max = 8\nsubsteps_tau = 30\n",
    ),
    // knocking down the fast signal at omega0 = eps0; both this and fig3
    // need a finer numeric tau step than the default to reach 1e-3
    (
        "fig4",
        "scenario = exulton\nomega0 = 1\neps0 = 1\ntol_oracle = 1e-8\nsubsteps_tau = 30\n",
    ),
    ("slow", "scenario = slow\n"),
    ("fast", "scenario = fast\n"),
    (
        "exulton-k",
        "scenario = exulton_k\nomega0 = 1\neps0 = 1\nk = 0.2\ntol_oracle = 1e-8\n",
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    CANNED.iter().map(|(n, _)| *n)
}

pub fn canned_text(name: &str) -> Option<&'static str> {
    CANNED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn canned(name: &str) -> Option<Result<ScenarioConfig, ConfigError>> {
    canned_text(name).map(parse_config)
}
