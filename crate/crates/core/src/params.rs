//! Shared domain types: the cluster species, the grating configuration and
//! the collapse-model parameters.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{ATOMIC_MASS_UNIT, PLANCK, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// Bulk gold density, kg/m³.
pub const GOLD_DENSITY: f64 = 19_300.0;
/// Bulk gold relative permittivity at 157 nm.
pub const GOLD_PERMITTIVITY_157NM: Complex64 = Complex64::new(0.9, 3.2);
/// Gold atomic mass, amu.
pub const GOLD_ATOMIC_MASS_AMU: f64 = 196.966_570;

/// A homogeneous spherical cluster of a given material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpecies {
    pub label: String,
    /// Total mass, kg.
    pub mass: f64,
    /// Bulk mass density, kg/m³.
    pub bulk_density: f64,
    /// Relative permittivity at the grating wavelength.
    pub permittivity: Complex64,
}

impl ClusterSpecies {
    pub fn new(
        label: impl Into<String>,
        mass: f64,
        bulk_density: f64,
        permittivity: Complex64,
    ) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::domain(format!(
                "cluster mass must be positive, got {mass}"
            )));
        }
        if !(bulk_density.is_finite() && bulk_density > 0.0) {
            return Err(Error::domain(format!(
                "bulk density must be positive, got {bulk_density}"
            )));
        }
        if !(permittivity.re.is_finite() && permittivity.im.is_finite()) {
            return Err(Error::domain("permittivity must be finite"));
        }
        if permittivity.im < 0.0 {
            return Err(Error::domain(format!(
                "Im(permittivity) must be >= 0 for a passive medium, got {}",
                permittivity.im
            )));
        }
        Ok(Self {
            label: label.into(),
            mass,
            bulk_density,
            permittivity,
        })
    }

    /// Gold with bulk density and the 157 nm bulk permittivity.
    pub fn gold(mass: f64) -> Result<Self> {
        Self::new("Au", mass, GOLD_DENSITY, GOLD_PERMITTIVITY_157NM)
    }

    /// Gold cluster of `atoms` atoms.
    pub fn gold_atoms(atoms: u64) -> Result<Self> {
        Self::gold(atoms as f64 * GOLD_ATOMIC_MASS_AMU * ATOMIC_MASS_UNIT)
    }

    /// Same material, different mass.
    pub fn with_mass(&self, mass: f64) -> Result<Self> {
        Self::new(
            self.label.clone(),
            mass,
            self.bulk_density,
            self.permittivity,
        )
    }

    pub fn mass_amu(&self) -> f64 {
        self.mass / ATOMIC_MASS_UNIT
    }

    pub fn radius(&self) -> f64 {
        cluster_radius(self)
    }
}

/// Radius of a homogeneous sphere with the species' mass and bulk density.
pub fn cluster_radius(species: &ClusterSpecies) -> f64 {
    (3.0 * species.mass / (4.0 * PI * species.bulk_density)).cbrt()
}

/// Standing-wave grating setup shared by all three pulses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GratingConfig {
    /// Laser wavelength, m.
    pub laser_wavelength: f64,
    pub talbot_order: u32,
    /// Energy per area of the running-wave input pulse, J/m².
    pub laser_flux: f64,
}

impl GratingConfig {
    pub fn new(laser_wavelength: f64, talbot_order: u32, laser_flux: f64) -> Result<Self> {
        if !(laser_wavelength.is_finite() && laser_wavelength > 0.0) {
            return Err(Error::domain(format!(
                "laser wavelength must be positive, got {laser_wavelength}"
            )));
        }
        if talbot_order == 0 {
            return Err(Error::domain("Talbot order must be a positive integer"));
        }
        if !(laser_flux.is_finite() && laser_flux >= 0.0) {
            return Err(Error::domain(format!(
                "laser flux must be >= 0, got {laser_flux}"
            )));
        }
        Ok(Self {
            laser_wavelength,
            talbot_order,
            laser_flux,
        })
    }

    /// F2 laser at 157 nm, second Talbot order, unit flux.
    pub fn otima_default() -> Self {
        Self {
            laser_wavelength: 157e-9,
            talbot_order: 2,
            laser_flux: 1.0,
        }
    }

    pub fn with_flux(&self, laser_flux: f64) -> Result<Self> {
        Self::new(self.laser_wavelength, self.talbot_order, laser_flux)
    }

    pub fn with_talbot_order(&self, talbot_order: u32) -> Result<Self> {
        Self::new(self.laser_wavelength, talbot_order, self.laser_flux)
    }

    /// Grating period d = λ_L / 2.
    pub fn period(&self) -> f64 {
        self.laser_wavelength / 2.0
    }

    pub fn laser_frequency(&self) -> f64 {
        SPEED_OF_LIGHT / self.laser_wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.laser_wavelength
    }

    pub fn photon_energy(&self) -> f64 {
        PLANCK * self.laser_frequency()
    }

    /// Talbot time m d²/h for a particle of mass `mass` (kg).
    pub fn talbot_time_for_mass(&self, mass: f64) -> f64 {
        let d = self.period();
        mass * d * d / PLANCK
    }

    /// Talbot time per atomic mass unit.
    pub fn talbot_time_per_amu(&self) -> f64 {
        self.talbot_time_for_mass(ATOMIC_MASS_UNIT)
    }

    /// Path separation N d reached at the central grating.
    pub fn path_separation(&self) -> f64 {
        self.talbot_order as f64 * self.period()
    }

    /// Pulse-to-pulse delay N T_T for the given mass.
    pub fn pulse_delay(&self, mass: f64) -> f64 {
        self.talbot_order as f64 * self.talbot_time_for_mass(mass)
    }

    /// Total interference time 2 N T_T for the given mass.
    pub fn interference_time(&self, mass: f64) -> f64 {
        2.0 * self.pulse_delay(mass)
    }
}

pub fn talbot_time(species: &ClusterSpecies, grating: &GratingConfig) -> f64 {
    grating.talbot_time_for_mass(species.mass)
}

pub fn total_interference_time(species: &ClusterSpecies, grating: &GratingConfig) -> f64 {
    grating.interference_time(species.mass)
}

/// Parameters of the collapse model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CslParams {
    /// Localization length, m.
    pub r_c: f64,
    /// Localization rate at the reference mass, Hz.
    pub lambda0: f64,
    /// Reference mass, kg.
    pub m0: f64,
}

impl CslParams {
    pub const DEFAULT_R_C: f64 = 100e-9;

    pub fn new(r_c: f64, lambda0: f64, m0: f64) -> Result<Self> {
        if !(r_c.is_finite() && r_c > 0.0) {
            return Err(Error::domain(format!("r_c must be positive, got {r_c}")));
        }
        if !(lambda0.is_finite() && lambda0 >= 0.0) {
            return Err(Error::domain(format!(
                "lambda0 must be >= 0, got {lambda0}"
            )));
        }
        if !(m0.is_finite() && m0 > 0.0) {
            return Err(Error::domain(format!("m0 must be positive, got {m0}")));
        }
        Ok(Self { r_c, lambda0, m0 })
    }

    /// r_c = 100 nm, m0 = 1 amu.
    pub fn with_rate(lambda0: f64) -> Result<Self> {
        Self::new(Self::DEFAULT_R_C, lambda0, ATOMIC_MASS_UNIT)
    }

    pub fn with_lambda0(&self, lambda0: f64) -> Result<Self> {
        Self::new(self.r_c, lambda0, self.m0)
    }

    /// Mass-amplified localization rate λ0 (m/m0)².
    pub fn effective_rate(&self, mass: f64) -> f64 {
        let ratio = mass / self.m0;
        self.lambda0 * ratio * ratio
    }
}

impl Default for CslParams {
    fn default() -> Self {
        Self {
            r_c: Self::DEFAULT_R_C,
            lambda0: 0.0,
            m0: ATOMIC_MASS_UNIT,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_sphere_radius() {
        let s = ClusterSpecies::new("unit", 4.0 * PI / 3.0, 1.0, Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(s.radius(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn au1000_radius() {
        // (3 * 1.9697e5 * 1.66054e-27 / (4 pi 19300))^(1/3), worked by hand: 1.5934 nm
        let s = ClusterSpecies::gold(1.9697e5 * ATOMIC_MASS_UNIT).unwrap();
        assert_relative_eq!(s.radius(), 1.5934e-9, max_relative = 1e-4);
    }

    #[test]
    fn radius_scales_with_cube_root() {
        let a = ClusterSpecies::gold(1e-21).unwrap();
        let b = a.with_mass(1e-18).unwrap();
        assert_relative_eq!(b.radius() / a.radius(), 10.0, max_relative = 1e-14);
    }

    #[test]
    fn rejects_invalid_species() {
        let eps = Complex64::new(1.0, 0.1);
        assert!(ClusterSpecies::new("x", 0.0, 1.0, eps).is_err());
        assert!(ClusterSpecies::new("x", 1.0, -1.0, eps).is_err());
        assert!(ClusterSpecies::new("x", 1.0, 1.0, Complex64::new(1.0, -0.1)).is_err());
        assert!(ClusterSpecies::new("x", f64::NAN, 1.0, eps).is_err());
    }

    #[test]
    fn talbot_time_per_amu() {
        let g = GratingConfig::new(157e-9, 2, 1.0).unwrap();
        assert_eq!(g.period(), 78.5e-9);
        // 1.66053906660e-27 * (78.5e-9)^2 / 6.62607015e-34
        let expected = 1.660_539_066_60e-27 * 78.5e-9 * 78.5e-9 / 6.626_070_15e-34;
        assert_relative_eq!(g.talbot_time_per_amu(), expected, max_relative = 1e-15);
        assert_relative_eq!(g.talbot_time_per_amu(), 1.544e-8, max_relative = 1e-3);
    }

    #[test]
    fn interference_time_at_a_million_amu() {
        let g = GratingConfig::otima_default();
        let t = g.interference_time(1e6 * ATOMIC_MASS_UNIT);
        assert!((t - 0.0618).abs() < 1e-3, "2 N T_T = {t}");
    }

    #[test]
    fn effective_rate_is_quadratic() {
        let csl = CslParams::with_rate(1e-10).unwrap();
        let m = 1e6 * ATOMIC_MASS_UNIT;
        assert_relative_eq!(
            csl.effective_rate(2.0 * m),
            4.0 * csl.effective_rate(m),
            max_relative = 1e-15
        );
        assert!(CslParams::new(0.0, 1.0, 1.0).is_err());
        assert!(CslParams::new(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn grating_rejects_zero_order() {
        assert!(GratingConfig::new(157e-9, 0, 1.0).is_err());
        assert!(GratingConfig::new(-1.0, 1, 1.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn talbot_time_is_linear(m in 1e-27f64..1e-15) {
            let g = GratingConfig::otima_default();
            let lhs = g.talbot_time_for_mass(2.0 * m);
            let rhs = 2.0 * g.talbot_time_for_mass(m);
            let ulp = f64::EPSILON * rhs.abs();
            proptest::prop_assert!((lhs - rhs).abs() <= 4.0 * ulp);
        }

        #[test]
        fn radius_reproduces_mass(m in 1e-24f64..1e-16, rho in 1e2f64..3e4) {
            let s = ClusterSpecies::new("p", m, rho, Complex64::new(2.0, 1.0)).unwrap();
            let r = s.radius();
            let back = 4.0 * PI / 3.0 * r * r * r * rho;
            proptest::prop_assert!(((back - m) / m).abs() <= 1e-12);
        }

        #[test]
        fn radius_is_monotone(m in 1e-24f64..1e-16, f in 1.0001f64..10.0) {
            let s = ClusterSpecies::gold(m).unwrap();
            proptest::prop_assert!(s.with_mass(m * f).unwrap().radius() > s.radius());
        }
    }
}
