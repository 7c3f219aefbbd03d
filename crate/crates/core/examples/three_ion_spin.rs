//! Reading a single electron spin with two neighbouring ions.
//!
//! Pass `paper` to inject the quoted field values instead of computing them.

use iongradim::scenarios::{run, ScenarioConfig, ScenarioKind, ValueMode};

fn main() -> iongradim::Result<()> {
    let mode = match std::env::args().nth(1).as_deref() {
        Some("paper") => ValueMode::Paper,
        _ => ValueMode::Computed,
    };
    let report = run(&ScenarioConfig::new(ScenarioKind::three_ion_spin()).with_mode(mode))?;
    println!("three-ion spin readout ({})", mode.label());
    for q in &report.quantities {
        println!(
            "  {:<28} {:>14.6e} {:<5} [{}]",
            q.name,
            q.value,
            q.unit,
            q.source.label()
        );
    }
    for note in &report.annotations {
        println!("note: {note}");
    }
    Ok(())
}
