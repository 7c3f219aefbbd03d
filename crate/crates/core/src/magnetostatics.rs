//! Point-dipole magnetostatics on and around the trap axis.
//!
//! The field of a dipole `m` at displacement `r` is
//! `B = (μ₀/4π) (3 r̂ (m·r̂) − m) / r³`. The trap axis is `z`, which is also
//! the quantization axis, so probe ions only see the `B_z` component.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::foundation::{constants, Vec3};

/// Evaluations closer than this to a point source are rejected.
pub const SINGULARITY_GUARD: f64 = 1e-9;

/// Spin projection of a target along the quantization axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinState {
    Up,
    Down,
}

impl SpinState {
    pub fn sign(self) -> f64 {
        match self {
            SpinState::Up => 1.0,
            SpinState::Down => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SpinState::Up => SpinState::Down,
            SpinState::Down => SpinState::Up,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleSource {
    /// m
    pub position: Vec3,
    /// J/T
    pub moment: Vec3,
}

impl DipoleSource {
    pub fn new(position: Vec3, moment: Vec3) -> Result<Self> {
        if !position.is_finite() {
            return Err(Error::config("position", "must be finite"));
        }
        if !moment.is_finite() {
            return Err(Error::config("moment", "must be finite"));
        }
        Ok(Self { position, moment })
    }

    /// A spin on the quantization axis with moment `±|magnitude| ẑ`.
    pub fn spin(position: Vec3, state: SpinState, magnitude: f64) -> Result<Self> {
        Self::new(position, Vec3::Z * (state.sign() * magnitude.abs()))
    }

    /// A single electron spin (|μ_e|) at `position`.
    pub fn electron_spin(position: Vec3, state: SpinState) -> Result<Self> {
        Self::spin(position, state, constants().electron_magnetic_moment)
    }

    pub fn with_moment_scaled(&self, factor: f64) -> Self {
        Self {
            position: self.position,
            moment: self.moment * factor,
        }
    }

    pub fn is_null(&self) -> bool {
        self.moment == Vec3::ZERO
    }
}

/// A uniform axial gradient `dB_z/dz`, zero at `reference_point`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGradient {
    /// T/m
    pub dbz_dz: f64,
    pub reference_point: Vec3,
}

impl UniformGradient {
    pub const NONE: UniformGradient = UniformGradient {
        dbz_dz: 0.0,
        reference_point: Vec3::ZERO,
    };

    pub fn bz_at(&self, point: Vec3) -> f64 {
        self.dbz_dz * (point.z - self.reference_point.z)
    }

    /// `B_z(p2) − B_z(p1)` produced by this gradient alone.
    pub fn field_difference(&self, p1: Vec3, p2: Vec3) -> f64 {
        self.bz_at(p2) - self.bz_at(p1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub point: Vec3,
    /// T
    pub b_field: Vec3,
}

fn dipole_prefactor() -> f64 {
    constants().vacuum_permeability / (4.0 * PI)
}

fn guarded_distance(source: &DipoleSource, point: Vec3) -> Result<f64> {
    let distance = (point - source.position).norm();
    if distance.is_nan() || distance < SINGULARITY_GUARD {
        return Err(Error::Singularity {
            distance,
            guard: SINGULARITY_GUARD,
        });
    }
    Ok(distance)
}

pub fn dipole_field(source: &DipoleSource, point: Vec3) -> Result<Vec3> {
    let r = guarded_distance(source, point)?;
    let r_hat = (point - source.position) * (1.0 / r);
    let m = source.moment;
    let shape = r_hat * (3.0 * m.dot(r_hat)) - m;
    Ok(shape * (dipole_prefactor() / (r * r * r)))
}

/// `B_z` on the trap axis for an axially aligned dipole sitting on the axis.
///
/// On the axis the general dipole law collapses to `(μ₀/4π) 2 m_z / |Δz|³`.
pub fn axial_bz(source: &DipoleSource, z: f64) -> Result<f64> {
    let p = source.position;
    if p.x != 0.0 || p.y != 0.0 {
        return Err(Error::config(
            "source.position",
            "axial_bz needs a source on the trap axis",
        ));
    }
    let m = source.moment;
    if m.x != 0.0 || m.y != 0.0 {
        return Err(Error::config("source.moment", "axial_bz needs a moment along z"));
    }
    let dz = guarded_distance(source, Vec3::on_axis(z))?;
    Ok(dipole_prefactor() * 2.0 * m.z / (dz * dz * dz))
}

pub fn sample_field(source: &DipoleSource, point: Vec3) -> Result<FieldSample> {
    Ok(FieldSample {
        point,
        b_field: dipole_field(source, point)?,
    })
}

/// Signed `B_z(p2) − B_z(p1)` of one source.
pub fn differential_field(source: &DipoleSource, p1: Vec3, p2: Vec3) -> Result<f64> {
    let b1 = dipole_field(source, p1)?.z;
    let b2 = dipole_field(source, p2)?.z;
    Ok(b2 - b1)
}

/// The external gradient that cancels the source's differential field across
/// `(p1, p2)` for the source as given (taken to be the spin-up reference).
pub fn compensation_gradient(source: &DipoleSource, p1: Vec3, p2: Vec3) -> Result<UniformGradient> {
    let dz = p2.z - p1.z;
    if dz == 0.0 || !dz.is_finite() {
        return Err(Error::config(
            "probe_pair",
            "probe ions must be separated along the trap axis",
        ));
    }
    let delta_b = differential_field(source, p1, p2)?;
    Ok(UniformGradient {
        dbz_dz: -delta_b / dz,
        reference_point: (p1 + p2) * 0.5,
    })
}

/// Total `B_z` at `point` from several sources plus an applied gradient.
pub fn total_bz(sources: &[DipoleSource], gradient: &UniformGradient, point: Vec3) -> Result<f64> {
    let mut bz = gradient.bz_at(point);
    for s in sources {
        bz += dipole_field(s, point)?.z;
    }
    Ok(bz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn z_dipole(m: f64) -> DipoleSource {
        DipoleSource::new(Vec3::ZERO, Vec3::new(0.0, 0.0, m)).unwrap()
    }

    #[test]
    fn on_axis_bohr_magneton_at_one_micron() {
        let s = z_dipole(constants().bohr_magneton);
        let b = dipole_field(&s, Vec3::on_axis(1e-6)).unwrap();
        // 2e-7 · μ_B / (1e-6)³
        assert_relative_eq!(b.z, 1.85480201566e-12, max_relative = 1e-10);
        assert_eq!(b.x, 0.0);
        assert_eq!(b.y, 0.0);
    }

    #[test]
    fn null_source_gives_zero() {
        let s = z_dipole(0.0);
        assert!(s.is_null());
        for p in [Vec3::new(1e-6, 0.0, 0.0), Vec3::new(-3e-6, 2e-6, 5e-7)] {
            assert_eq!(dipole_field(&s, p).unwrap().norm(), 0.0);
        }
        let g = compensation_gradient(&s, Vec3::on_axis(1e-6), Vec3::on_axis(2e-6)).unwrap();
        assert_eq!(g.dbz_dz, 0.0);
    }

    #[test]
    fn equatorial_field_is_half_and_antiparallel() {
        let s = z_dipole(1e-23);
        let axial = dipole_field(&s, Vec3::on_axis(2e-6)).unwrap();
        let equatorial = dipole_field(&s, Vec3::new(2e-6, 0.0, 0.0)).unwrap();
        assert_relative_eq!(equatorial.z, -0.5 * axial.z, max_relative = 1e-14);
        assert!(equatorial.z < 0.0);
    }

    #[test]
    fn singularity_guard() {
        let s = z_dipole(1e-23);
        assert!(matches!(dipole_field(&s, Vec3::ZERO), Err(Error::Singularity { .. })));
        assert!(matches!(
            dipole_field(&s, Vec3::on_axis(0.5e-9)),
            Err(Error::Singularity { .. })
        ));
        assert!(axial_bz(&s, 0.0).is_err());
        assert!(differential_field(&s, Vec3::on_axis(1e-6), Vec3::ZERO).is_err());
        assert!(dipole_field(&s, Vec3::on_axis(100e-9)).is_ok());
    }

    #[test]
    fn axial_bz_matches_general_formula() {
        let s = DipoleSource::new(Vec3::on_axis(1.7e-6), Vec3::new(0.0, 0.0, -9.28e-24)).unwrap();
        for z in [-4e-6, -1e-6, 0.3e-6, 2.5e-6, 9e-6] {
            let a = axial_bz(&s, z).unwrap();
            let g = dipole_field(&s, Vec3::on_axis(z)).unwrap().z;
            assert!((a - g).abs() <= 1e-15 * a.abs(), "{a} vs {g}");
        }
    }

    #[test]
    fn axial_bz_requires_axial_source() {
        let off = DipoleSource::new(Vec3::new(1e-6, 0.0, 0.0), Vec3::Z * 1e-23).unwrap();
        assert!(axial_bz(&off, 2e-6).is_err());
        let tilted = DipoleSource::new(Vec3::ZERO, Vec3::new(1e-23, 0.0, 1e-23)).unwrap();
        assert!(axial_bz(&tilted, 2e-6).is_err());
    }

    #[test]
    fn inverse_cube_ratio_and_decay() {
        let s = z_dipole(constants().electron_magnetic_moment);
        let d = 1.03e-6;
        let ratio = axial_bz(&s, d).unwrap() / axial_bz(&s, 2.0 * d).unwrap();
        assert!((ratio - 8.0).abs() < 8.0 * 1e-12);
        let mut last = f64::INFINITY;
        for k in 1..40 {
            let b = axial_bz(&s, d * 1.5f64.powi(k)).unwrap().abs();
            assert!(b < last);
            last = b;
        }
        assert!(last < 1e-19);
    }

    #[test]
    fn differential_field_examples() {
        let s = DipoleSource::electron_spin(Vec3::on_axis(1.03e-6), SpinState::Up).unwrap();
        let p1 = Vec3::on_axis(-1.03e-6);
        let p2 = Vec3::ZERO;
        assert_eq!(differential_field(&s, p2, p2).unwrap(), 0.0);
        let d = differential_field(&s, p1, p2).unwrap();
        assert_eq!(differential_field(&s, p2, p1).unwrap(), -d);
        let near = dipole_field(&s, p2).unwrap().z;
        let far = dipole_field(&s, p1).unwrap().z;
        assert_relative_eq!(near / far, 8.0, max_relative = 1e-12);
        assert_relative_eq!(d, near - far, max_relative = 1e-15);
    }

    #[test]
    fn compensation_cancels_up_and_doubles_down() {
        let up = DipoleSource::electron_spin(Vec3::on_axis(1.03e-6), SpinState::Up).unwrap();
        let down = DipoleSource::electron_spin(Vec3::on_axis(1.03e-6), SpinState::Down).unwrap();
        let p1 = Vec3::on_axis(-1.03e-6);
        let p2 = Vec3::ZERO;
        let g = compensation_gradient(&up, p1, p2).unwrap();
        let bare = differential_field(&up, p1, p2).unwrap();

        let total_up = bare + g.field_difference(p1, p2);
        assert!(total_up.abs() <= 1e-12 * bare.abs());
        let total_down = differential_field(&down, p1, p2).unwrap() + g.field_difference(p1, p2);
        assert_relative_eq!(total_down.abs(), 2.0 * bare.abs(), max_relative = 1e-12);

        let up_field = total_bz(&[up], &g, p2).unwrap() - total_bz(&[up], &g, p1).unwrap();
        assert!(up_field.abs() <= 1e-12 * bare.abs());
    }

    #[test]
    fn compensation_rejects_degenerate_pair() {
        let s = z_dipole(1e-23);
        let p = Vec3::on_axis(1e-6);
        assert!(matches!(compensation_gradient(&s, p, p), Err(Error::Config { .. })));
        let sideways = Vec3::new(1e-6, 0.0, 1e-6);
        assert!(compensation_gradient(&s, p, sideways).is_err());
    }

    fn divergence(s: &DipoleSource, p: Vec3, h: f64) -> f64 {
        let d = |e: Vec3| {
            let plus = dipole_field(s, p + e * h).unwrap();
            let minus = dipole_field(s, p - e * h).unwrap();
            (plus - minus) * (1.0 / (2.0 * h))
        };
        d(Vec3::new(1.0, 0.0, 0.0)).x + d(Vec3::new(0.0, 1.0, 0.0)).y + d(Vec3::Z).z
    }

    proptest! {
        #[test]
        fn field_is_divergence_free(
            x in 0.5f64..5.0, y in -5.0f64..5.0, z in -5.0f64..5.0,
            mx in -1.0f64..1.0, my in -1.0f64..1.0, mz in -1.0f64..1.0,
        ) {
            let s = DipoleSource::new(Vec3::ZERO, Vec3::new(mx, my, mz) * 1e-23).unwrap();
            let p = Vec3::new(x, y, z) * 1e-6;
            let r = p.norm();
            let scale = dipole_field(&s, p).unwrap().norm() / r;
            prop_assume!(scale > 0.0);
            let div = divergence(&s, p, r * 1e-4);
            prop_assert!(div.abs() < 1e-6 * scale, "div {} scale {}", div, scale);
        }

        #[test]
        fn field_is_linear_in_moment(
            x in -5.0f64..5.0, y in -5.0f64..5.0, z in 0.5f64..5.0,
            mx in -1.0f64..1.0, my in -1.0f64..1.0, mz in -1.0f64..1.0,
        ) {
            let m = Vec3::new(mx, my, mz) * 1e-23;
            let p = Vec3::new(x, y, z) * 1e-6;
            let one = dipole_field(&DipoleSource::new(Vec3::ZERO, m).unwrap(), p).unwrap();
            let two = dipole_field(&DipoleSource::new(Vec3::ZERO, m * 2.0).unwrap(), p).unwrap();
            prop_assert_eq!(two, one * 2.0);
        }

        #[test]
        fn on_axis_slope_is_minus_three(r1 in 0.1f64..10.0, factor in 1.1f64..10.0) {
            let s = z_dipole(-9.28e-24);
            let a = axial_bz(&s, r1 * 1e-6).unwrap().abs();
            let b = axial_bz(&s, r1 * factor * 1e-6).unwrap().abs();
            let slope = (b.ln() - a.ln()) / factor.ln();
            prop_assert!((slope + 3.0).abs() < 1e-10, "slope {}", slope);
        }

        #[test]
        fn differential_field_antisymmetric(z1 in -8.0f64..-0.5, z2 in 0.5f64..8.0) {
            let s = z_dipole(1e-23);
            let p1 = Vec3::on_axis(z1 * 1e-6);
            let p2 = Vec3::on_axis(z2 * 1e-6);
            prop_assert_eq!(differential_field(&s, p1, p2).unwrap(), -differential_field(&s, p2, p1).unwrap());
        }
    }
}
