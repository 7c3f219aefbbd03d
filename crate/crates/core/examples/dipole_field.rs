//! Field of a single electron spin along the trap axis, and the gradient
//! that cancels it across a probe pair.

use iongradim::magnetostatics::{axial_bz, compensation_gradient, differential_field, DipoleSource, SpinState};
use iongradim::Vec3;

fn main() -> iongradim::Result<()> {
    let spin = DipoleSource::electron_spin(Vec3::ZERO, SpinState::Up)?;
    println!("{:>10}  {:>14}", "z (um)", "Bz (T)");
    for z in [0.5e-6, 1e-6, 2e-6, 4e-6, 8e-6] {
        println!("{:>10.2}  {:>14.6e}", z * 1e6, axial_bz(&spin, z)?);
    }

    let (near, far) = (Vec3::on_axis(-1.03e-6), Vec3::on_axis(-2.06e-6));
    let delta = differential_field(&spin, far, near)?;
    let gradient = compensation_gradient(&spin, far, near)?;
    println!("\nprobe pair at -2.06 and -1.03 um: dB = {delta:.4e} T");
    println!("cancelling gradient: {:.4e} T/m", gradient.dbz_dz);
    Ok(())
}
