//! Four GHZ probe ions around a central spin versus a single Bell pair.

use iongradim::scenarios::{run, ScenarioConfig, ScenarioKind};

fn main() -> iongradim::Result<()> {
    let report = run(&ScenarioConfig::new(ScenarioKind::ghz_chain()))?;
    for name in [
        "inner_spacing",
        "outer_spacing",
        "ghz_phase_rate",
        "bell_phase_rate",
        "rate_ratio",
    ] {
        println!("{name:<16} {:.6e}", report.value(name).unwrap());
    }
    let bell = report.trajectory("bell_reference").unwrap();
    let ghz = report.trajectory("ghz_spin_up").unwrap();
    println!("\n{:>8} {:>8} {:>8}", "t (s)", "P_bell", "P_ghz");
    for (b, g) in bell.records.iter().zip(&ghz.records).step_by(10) {
        println!("{:>8.2} {:>+8.3} {:>+8.3}", b.time, b.parity, g.parity);
    }
    Ok(())
}
