//! Equilibrium positions of a linear ion crystal.
//!
//! ```text
//! cargo run --example crystal_geometry -- 5 10e6
//! ```

use iongradim::crystal::{equilibrium_positions, TrapConfig};

fn main() -> iongradim::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(3, |a| a.parse().expect("ion count"));
    let hz: f64 = args.next().map_or(10e6, |a| a.parse().expect("axial frequency in Hz"));

    let geometry = equilibrium_positions(n, &TrapConfig::ca40(hz)?)?;
    println!(
        "{n} Ca+ ions at {:.3} MHz, length scale {:.4} um",
        hz / 1e6,
        geometry.length_scale * 1e6
    );
    for (i, (z, u)) in geometry.positions.iter().zip(&geometry.dimensionless).enumerate() {
        println!("  ion {i}: z = {:+.4} um  (u = {u:+.6})", z * 1e6);
    }
    for (i, s) in geometry.adjacent_spacings().iter().enumerate() {
        println!("  d({i},{}) = {:.4} um", i + 1, s * 1e6);
    }
    Ok(())
}
