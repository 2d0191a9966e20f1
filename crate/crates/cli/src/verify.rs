//! Runs every registered experiment at its defaults with reduced sample sizes.

use crate::config::ExperimentConfig;
use crate::experiments::{run_experiment, REGISTRY};
use crate::report::Report;
use crate::CliError;

/// Sample size used for the Monte Carlo experiments during verification.
pub const VERIFY_N: usize = 20_000;

fn uses_samples(name: &str) -> bool {
    matches!(name, "hv-chsh" | "tandem" | "poll")
}

pub fn verify_all(seed: u64) -> Result<Vec<Report>, CliError> {
    REGISTRY
        .iter()
        .map(|e| {
            let mut cfg = ExperimentConfig {
                experiment: Some(e.name.to_string()),
                ..ExperimentConfig::default()
            };
            cfg.params.seed = Some(seed);
            if uses_samples(e.name) {
                cfg.params.n = Some(VERIFY_N);
            }
            run_experiment(&cfg)
        })
        .collect()
}

/// One `PASS name` or `FAIL name: check, ...` line per experiment.
pub fn summary(reports: &[Report]) -> String {
    let mut out = String::new();
    for r in reports {
        let failed: Vec<&str> = r
            .checks
            .iter()
            .filter(|(_, c)| !c.pass)
            .map(|(k, _)| k.as_str())
            .collect();
        if failed.is_empty() {
            out.push_str(&format!("PASS {} ({} checks)\n", r.experiment, r.checks.len()));
        } else {
            out.push_str(&format!("FAIL {}: {}\n", r.experiment, failed.join(", ")));
        }
    }
    out
}
