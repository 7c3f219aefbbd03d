//! Detecting a change in a trapped molecule's magnetic moment.

use iongradim::constants;
use iongradim::scenarios::{run, ScenarioConfig, ScenarioKind};

fn main() -> iongradim::Result<()> {
    let mu_b = constants().bohr_magneton;
    for after in [1.0, 0.5, 0.1, 0.0] {
        let kind = ScenarioKind::MolecularStateChange {
            moment_before: mu_b,
            moment_after: after * mu_b,
        };
        let report = run(&ScenarioConfig::new(kind))?;
        let est = report.estimation.as_ref().unwrap();
        let shots = est.required_shots.map_or("never".to_string(), |n| format!("{n} shots"));
        println!(
            "1 muB -> {after:.1} muB: parity swing {:.3}, SNR 2 after {shots}",
            est.swing
        );
    }
    Ok(())
}
