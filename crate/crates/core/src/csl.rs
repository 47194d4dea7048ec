//! Center-of-mass collapse (CSL) effects on the interferometer.
//!
//! In position representation the localization term damps a coherence
//! between positions `x` and `x'` at the rate
//! `λ(m) [1 − exp(−(x − x')²/4r_c²)]`, with `λ(m) = λ0 (m/m0)²`. Over the
//! two-path geometry of the interferometer this integrates to the
//! visibility reduction
//!
//! ```text
//! V_CSL / V = exp{ −2 λ0 T0 N (m/m0)³ [1 − √π r_c/(N d) erf(N d / 2 r_c)] }
//! ```
//!
//! with `T0 = m0 d²/h`. The bracket is the geometry factor.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::PLANCK;
use crate::error::{Error, Result};
use crate::params::{ClusterSpecies, CslParams, GratingConfig};
use crate::roots::bisect;
use crate::specfun::erf;

/// Default visibility-reduction threshold defining the critical mass.
pub const DEFAULT_THRESHOLD: f64 = 0.5;
/// Minimum number of Simpson panels accepted by the quadrature oracle.
pub const ORACLE_MIN_STEPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CslReduction {
    /// `V_CSL / V`.
    pub ratio: f64,
    pub exponent: f64,
    pub geometry_factor: f64,
}

/// Coherence decay rate for a superposition with the given separation.
pub fn csl_decay_rate(separation: f64, csl: &CslParams, mass: f64) -> f64 {
    let u = separation / (2.0 * csl.r_c);
    -csl.effective_rate(mass) * (-u * u).exp_m1()
}

/// `1 − √π r_c/s · erf(s/2r_c)` for path separation `s`.
pub fn geometry_factor(separation: f64, r_c: f64) -> f64 {
    let u = separation / (2.0 * r_c);
    if u < 0.05 {
        // u²/3 − u⁴/10 + u⁶/42 − u⁸/216 + u¹⁰/1320
        let u2 = u * u;
        let mut term = 1.0;
        let mut factorial = 1.0;
        let mut sum = 0.0;
        for n in 1..=5u32 {
            term *= -u2;
            factorial *= n as f64;
            sum -= term / (factorial * (2 * n + 1) as f64);
        }
        sum
    } else {
        1.0 - PI.sqrt() / (2.0 * u) * erf(u)
    }
}

/// Talbot time of the reference mass, `T0 = m0 d²/h`.
pub fn reference_talbot_time(grating: &GratingConfig, csl: &CslParams) -> f64 {
    let d = grating.period();
    csl.m0 * d * d / PLANCK
}

pub fn csl_visibility_ratio_for_mass(
    mass: f64,
    grating: &GratingConfig,
    csl: &CslParams,
) -> CslReduction {
    let g = geometry_factor(grating.path_separation(), csl.r_c);
    let mu = mass / csl.m0;
    let exponent = 2.0
        * csl.lambda0
        * reference_talbot_time(grating, csl)
        * grating.talbot_order as f64
        * mu
        * mu
        * mu
        * g;
    CslReduction {
        ratio: (-exponent).exp(),
        exponent,
        geometry_factor: g,
    }
}

/// Closed-form CSL visibility reduction.
pub fn csl_visibility_ratio(
    species: &ClusterSpecies,
    grating: &GratingConfig,
    csl: &CslParams,
) -> CslReduction {
    csl_visibility_ratio_for_mass(species.mass, grating, csl)
}

/// Exponent obtained by integrating [`csl_decay_rate`] over the path
/// separation history: a linear ramp from 0 to `N d` during the first
/// `N T_T`, and back to 0 during the second. Composite Simpson rule; the
/// number of panels is rounded up to a multiple of 4 so the ramp apex is
/// a node.
pub fn csl_exponent_oracle(
    mass: f64,
    grating: &GratingConfig,
    csl: &CslParams,
    time_steps: usize,
) -> Result<f64> {
    if time_steps < ORACLE_MIN_STEPS {
        return Err(Error::Domain(format!(
            "oracle needs at least {ORACLE_MIN_STEPS} time steps, got {time_steps}"
        )));
    }
    let steps = time_steps.div_ceil(4) * 4;
    let delay = grating.pulse_delay(mass);
    let total = 2.0 * delay;
    let apex = grating.path_separation();
    let separation = |t: f64| {
        if t <= delay {
            apex * t / delay
        } else {
            apex * (total - t) / delay
        }
    };
    let h = total / steps as f64;
    let mut acc = 0.0;
    for i in 0..=steps {
        let w = if i == 0 || i == steps {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * csl_decay_rate(separation(i as f64 * h), csl, mass);
    }
    Ok(acc * h / 3.0)
}

/// Quadrature counterpart of [`csl_visibility_ratio`].
pub fn csl_visibility_ratio_oracle(
    species: &ClusterSpecies,
    grating: &GratingConfig,
    csl: &CslParams,
    time_steps: usize,
) -> Result<f64> {
    if csl.lambda0 == 0.0 {
        return Ok(1.0);
    }
    Ok((-csl_exponent_oracle(species.mass, grating, csl, time_steps)?).exp())
}

fn check_critical_inputs(csl: &CslParams, threshold: f64) -> Result<()> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Domain(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    if !(csl.lambda0 > 0.0) {
        return Err(Error::Domain("critical mass needs lambda0 > 0".into()));
    }
    Ok(())
}

/// Mass at which the CSL visibility ratio drops to `threshold`.
pub fn critical_mass(csl: &CslParams, grating: &GratingConfig, threshold: f64) -> Result<f64> {
    check_critical_inputs(csl, threshold)?;
    let g = geometry_factor(grating.path_separation(), csl.r_c);
    if g <= 0.0 {
        return Err(Error::Degenerate("geometry factor vanishes".into()));
    }
    let rate =
        2.0 * csl.lambda0 * reference_talbot_time(grating, csl) * grating.talbot_order as f64 * g;
    Ok(csl.m0 * ((1.0 / threshold).ln() / rate).cbrt())
}

/// Critical mass by bisection on `ln m`, independent of the cube-root
/// inversion.
pub fn critical_mass_bisection(
    csl: &CslParams,
    grating: &GratingConfig,
    threshold: f64,
) -> Result<f64> {
    check_critical_inputs(csl, threshold)?;
    let target = (1.0 / threshold).ln();
    let f =
        |log_m: f64| Ok(csl_visibility_ratio_for_mass(log_m.exp(), grating, csl).exponent - target);
    let (lo, hi) = ((csl.m0 * 1e-12).ln(), (csl.m0 * 1e40).ln());
    let log_m = bisect(f, lo, hi, 1e-14)?;
    Ok(log_m.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub lambda0: f64,
    pub critical_mass: f64,
    pub geometry_factor: f64,
}

/// Critical mass along a grid of localization rates.
pub fn exclusion_boundary(
    grating: &GratingConfig,
    csl_template: &CslParams,
    lambda0_grid: &[f64],
    threshold: f64,
) -> Result<Vec<BoundaryPoint>> {
    let g = geometry_factor(grating.path_separation(), csl_template.r_c);
    lambda0_grid
        .iter()
        .map(|&lambda0| {
            let csl = csl_template.with_lambda0(lambda0)?;
            Ok(BoundaryPoint {
                lambda0,
                critical_mass: critical_mass(&csl, grating, threshold)?,
                geometry_factor: g,
            })
        })
        .collect()
}
