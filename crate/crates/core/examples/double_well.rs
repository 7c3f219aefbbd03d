//! Sensing an atom-number imbalance between two neutral-atom wells.

use iongradim::scenarios::{run, ScenarioConfig, ScenarioKind, ValueMode};

fn main() -> iongradim::Result<()> {
    for mode in [ValueMode::Computed, ValueMode::Paper] {
        let report = run(&ScenarioConfig::new(ScenarioKind::double_well()).with_mode(mode))?;
        println!("{}:", mode.label());
        for name in [
            "delta_b",
            "phase_at_t",
            "parity_modulation",
            "min_detectable_imbalance",
            "axial_frequency_for_spacing",
        ] {
            if let Some(v) = report.value(name) {
                println!("  {name:<28} {v:.4e}");
            }
        }
        for note in &report.annotations {
            println!("  note: {note}");
        }
    }
    Ok(())
}
