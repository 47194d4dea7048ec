//! Physical constants (SI 2019 exact values where defined, CODATA 2018
//! otherwise) and the unit conversions used at the I/O boundary.
//!
//! Everything inside the library is SI. The `units` helpers exist only so
//! that front ends can convert amu, nm, mbar and percentages exactly once.

use serde::Serialize;

/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Elementary charge, C (used for eV conversions).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// The constant set as one serializable record, for run manifests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    pub planck_h: f64,
    pub boltzmann_kb: f64,
    pub speed_of_light_c: f64,
    pub atomic_mass_unit: f64,
    pub vacuum_permittivity: f64,
}

impl PhysicalConstants {
    pub const SI: PhysicalConstants = PhysicalConstants {
        planck_h: PLANCK,
        boltzmann_kb: BOLTZMANN,
        speed_of_light_c: SPEED_OF_LIGHT,
        atomic_mass_unit: ATOMIC_MASS_UNIT,
        vacuum_permittivity: VACUUM_PERMITTIVITY,
    };
}

pub mod units {
    use super::{ATOMIC_MASS_UNIT, ELEMENTARY_CHARGE, VACUUM_PERMITTIVITY};

    /// Pascal per millibar.
    pub const PA_PER_MBAR: f64 = 100.0;

    pub fn amu_to_kg(m: f64) -> f64 {
        m * ATOMIC_MASS_UNIT
    }

    pub fn kg_to_amu(m: f64) -> f64 {
        m / ATOMIC_MASS_UNIT
    }

    pub fn nm_to_m(x: f64) -> f64 {
        x / 1e9
    }

    pub fn m_to_nm(x: f64) -> f64 {
        x * 1e9
    }

    pub fn mbar_to_pa(p: f64) -> f64 {
        p * PA_PER_MBAR
    }

    pub fn pa_to_mbar(p: f64) -> f64 {
        p / PA_PER_MBAR
    }

    pub fn percent_to_fraction(x: f64) -> f64 {
        x / 100.0
    }

    pub fn fraction_to_percent(x: f64) -> f64 {
        x * 100.0
    }

    pub fn ev_to_joule(e: f64) -> f64 {
        e * ELEMENTARY_CHARGE
    }

    /// Polarizability volume (Å³) to SI polarizability (C m²/V).
    pub fn polarizability_volume_a3_to_si(a3: f64) -> f64 {
        4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY * a3 * 1e-30
    }

    pub fn polarizability_si_to_volume_a3(alpha: f64) -> f64 {
        alpha / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY) * 1e30
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_positive() {
        let c = PhysicalConstants::SI;
        for v in [
            c.planck_h,
            c.boltzmann_kb,
            c.speed_of_light_c,
            c.atomic_mass_unit,
            c.vacuum_permittivity,
        ] {
            assert!(v > 0.0);
        }
    }

    fn ulp_close(a: f64, b: f64) -> bool {
        a == b || (a.to_bits() as i64 - b.to_bits() as i64).abs() <= 1
    }

    proptest::proptest! {
        #[test]
        fn unit_round_trips(x in 1e-20f64..1e20) {
            proptest::prop_assert!(ulp_close(units::kg_to_amu(units::amu_to_kg(x)), x));
            proptest::prop_assert!(ulp_close(units::m_to_nm(units::nm_to_m(x)), x));
            proptest::prop_assert!(ulp_close(units::pa_to_mbar(units::mbar_to_pa(x)), x));
            proptest::prop_assert!(ulp_close(units::fraction_to_percent(units::percent_to_fraction(x)), x));
        }
    }
}
