//! Fringe visibility and transmissivity of the three-pulse interferometer,
//! and the inverse problem of choosing the laser flux for a target
//! visibility.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mie::{absorption_profile, AbsorptionProfile};
use crate::params::{ClusterSpecies, GratingConfig};
use crate::roots::bisect_secant;
use crate::specfun::{bessel_i_scaled, BesselOrder};

/// Upper end of the monotone branch used for visibility inversion.
pub const MODULATION_BRANCH_MAX: f64 = 20.0;
/// Absolute tolerance on n1 in the visibility inversion.
pub const MODULATION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeObservables {
    pub visibility: f64,
    pub transmissivity: f64,
    pub n0: f64,
    pub n1: f64,
}

/// Sinusoidal visibility `2 I1²(n1) I2(n1) / I0³(n1)`.
pub fn visibility(n1: f64) -> Result<f64> {
    if !(n1.is_finite() && n1 >= 0.0) {
        return Err(Error::Domain(format!(
            "n1 must be finite and >= 0, got {n1}"
        )));
    }
    let i0 = bessel_i_scaled(BesselOrder::Zero, n1)?;
    let i1 = bessel_i_scaled(BesselOrder::One, n1)?;
    let i2 = bessel_i_scaled(BesselOrder::Two, n1)?;
    let r1 = i1 / i0;
    Ok(2.0 * r1 * r1 * (i2 / i0))
}

/// Fraction of clusters left neutral after three pulses, `e^{-3 n0} I0³(n1)`.
pub fn transmissivity(n0: f64, n1: f64) -> Result<f64> {
    if !(n0.is_finite() && n1.is_finite() && n1 >= 0.0) {
        return Err(Error::Domain(format!(
            "need finite n0 and n1 >= 0, got ({n0}, {n1})"
        )));
    }
    if n1 > n0 {
        return Err(Error::Domain(format!(
            "n1 = {n1} exceeds n0 = {n0}: absorbed photon number would turn negative"
        )));
    }
    let log_i0 = bessel_i_scaled(BesselOrder::Zero, n1)?.ln() + n1;
    Ok((3.0 * (log_i0 - n0)).exp())
}

/// Visibility and transmissivity for a profile. A negative modulation
/// amplitude only shifts the fringes by half a period, so `|n1|` is used.
pub fn observables(profile: &AbsorptionProfile) -> Result<FringeObservables> {
    let n1 = profile.n1.abs();
    Ok(FringeObservables {
        visibility: visibility(n1)?,
        transmissivity: transmissivity(profile.n0, n1)?,
        n0: profile.n0,
        n1: profile.n1,
    })
}

pub fn observables_for(
    species: &ClusterSpecies,
    grating: &GratingConfig,
) -> Result<FringeObservables> {
    observables(&absorption_profile(species, grating)?)
}

/// The modulation amplitude `n1 ∈ [0, 20]` giving visibility `target`.
pub fn modulation_for_visibility(target: f64) -> Result<f64> {
    if !target.is_finite() || target < 0.0 {
        return Err(Error::Domain(format!(
            "target visibility must be >= 0, got {target}"
        )));
    }
    if target >= 2.0 {
        return Err(Error::Unachievable {
            target,
            reason: "visibility is bounded by 2".into(),
        });
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    let branch_top = visibility(MODULATION_BRANCH_MAX)?;
    if target > branch_top {
        return Err(Error::Unachievable {
            target,
            reason: format!("above V(n1 = {MODULATION_BRANCH_MAX}) = {branch_top}"),
        });
    }
    bisect_secant(
        |n1| Ok(visibility(n1)? - target),
        0.0,
        MODULATION_BRANCH_MAX,
        MODULATION_TOLERANCE,
    )
}

/// Result of a fixed-visibility flux inversion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxSolution {
    pub flux: f64,
    pub profile: AbsorptionProfile,
    pub observables: FringeObservables,
}

/// Laser flux that yields visibility `target` for this species.
///
/// `n1` is linear in the flux, so the profile is evaluated once at unit
/// flux and rescaled after solving for the required `n1`.
pub fn flux_for_target_visibility(
    species: &ClusterSpecies,
    grating: &GratingConfig,
    target: f64,
) -> Result<FluxSolution> {
    let n1_target = modulation_for_visibility(target)?;
    let unit = absorption_profile(species, &grating.with_flux(1.0)?)?;
    if unit.n1 <= 0.0 {
        return Err(Error::Unachievable {
            target,
            reason: format!(
                "modulation per unit flux is {} (cluster too large)",
                unit.n1
            ),
        });
    }
    let flux = n1_target / unit.n1;
    let profile = unit.rescaled(flux);
    let observables = observables(&profile)?;
    Ok(FluxSolution {
        flux,
        profile,
        observables,
    })
}
