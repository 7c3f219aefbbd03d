//! Physical constants and a small 3-vector type.
//!
//! Everything in the crate works in SI units. Constants are CODATA 2018
//! values, except the vacuum permeability which is fixed at 4π×10⁻⁷ H/m.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// The constant set used throughout the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// C
    pub elementary_charge: f64,
    /// F/m
    pub vacuum_permittivity: f64,
    /// H/m
    pub vacuum_permeability: f64,
    /// J/T
    pub bohr_magneton: f64,
    /// J/T, signed (negative: moment antiparallel to spin).
    pub electron_magnetic_moment: f64,
    /// J·s
    pub reduced_planck: f64,
    /// kg
    pub atomic_mass_unit: f64,
    /// Landé factor of the Ca⁺ S₁/₂ ground state.
    pub ca40_g_factor: f64,
}

const CONSTANTS: PhysicalConstants = PhysicalConstants {
    elementary_charge: 1.602_176_634e-19,
    vacuum_permittivity: 8.854_187_812_8e-12,
    vacuum_permeability: 4.0 * PI * 1e-7,
    bohr_magneton: 9.274_010_078_3e-24,
    electron_magnetic_moment: -9.284_764_704_3e-24,
    reduced_planck: 1.054_571_817e-34,
    atomic_mass_unit: 1.660_539_066_60e-27,
    ca40_g_factor: 2.00225,
};

/// Returns the authoritative constant set.
pub fn constants() -> PhysicalConstants {
    CONSTANTS
}

/// Mass of a ⁴⁰Ca⁺ ion, taken as 40 u.
pub fn ca40_mass() -> f64 {
    40.0 * CONSTANTS.atomic_mass_unit
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    pub const Z: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// A point on the trap axis.
    pub const fn on_axis(z: f64) -> Self {
        Self { x: 0.0, y: 0.0, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        // hypot keeps tiny (sub-µm, sub-pT) magnitudes away from underflow.
        self.x.hypot(self.y).hypot(self.z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a.dot(b)
}

pub fn norm(a: Vec3) -> f64 {
    a.norm()
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, rhs: Vec3) {
        *self = *self + rhs;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, rhs: f64) -> Vec3 {
        Vec3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        rhs * self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dot_examples() {
        assert_eq!(dot(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)), 0.0);
        assert_eq!(dot(Vec3::new(1.0, 2.0, 3.0), Vec3::new(1.0, 2.0, 3.0)), 14.0);
        assert_eq!(dot(Vec3::new(2.0, 0.0, 0.0), Vec3::new(3.0, 0.0, 0.0)), 6.0);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(Vec3::ZERO), 0.0);
        assert_eq!(norm(Vec3::new(3.0, 4.0, 0.0)), 5.0);
        assert_eq!(norm(Vec3::new(0.0, 0.0, -2.0)), 2.0);
    }

    #[test]
    fn constant_values() {
        let c = constants();
        assert_eq!(c.vacuum_permeability, 4.0 * PI * 1e-7);
        assert_eq!(c.electron_magnetic_moment, -9.2847647043e-24);
        assert_eq!(c.ca40_g_factor, 2.00225);
        assert_eq!(constants(), constants());
    }

    #[test]
    fn constant_signs() {
        let c = constants();
        for v in [
            c.elementary_charge,
            c.vacuum_permittivity,
            c.vacuum_permeability,
            c.bohr_magneton,
            c.reduced_planck,
            c.atomic_mass_unit,
            c.ca40_g_factor,
        ] {
            assert!(v > 0.0);
        }
        assert!(c.electron_magnetic_moment < 0.0);
    }

    proptest! {
        #[test]
        fn dot_self_is_norm_squared(x in -1e6f64..1e6, y in -1e6f64..1e6, z in -1e6f64..1e6) {
            let a = Vec3::new(x, y, z);
            let n = a.norm();
            let d = a.dot(a);
            prop_assert!((d - n * n).abs() <= 1e-12 * d.max(f64::MIN_POSITIVE));
            prop_assert!(d.is_finite());
        }
    }
}
