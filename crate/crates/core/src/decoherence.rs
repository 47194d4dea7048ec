//! Environmental decoherence budget: residual-gas collisions and thermal
//! radiation (absorption, emission, elastic scattering).
//!
//! Every tunable number of the model lives in [`DecoherenceModel`] so that
//! a run can record exactly what was assumed.
//!
//! * Collisions: each collision with a gas molecule is fully decohering.
//!   The total cross section is the van der Waals (eikonal) result
//!   `σ(v) = 7.57 (3π C6 / 8ħv)^{2/5}`, with `C6` from the London formula
//!   for the cluster's static (perfect-conductor) polarizability volume
//!   `R³` and the gas polarizability. The Maxwell–Boltzmann average of
//!   `σ(v) v` is evaluated in closed form.
//! * Thermal photons: dipole absorption `4πk Im α` and Rayleigh scattering
//!   `(8π/3) k⁴ |α|²` with `α = R³ (ε−1)/(ε+2)` and a Drude permittivity
//!   whose damping includes surface scattering `A v_F / R`. Absorption and
//!   emission events decohere with weight `1 − sinc(k Δx)`; scattering with
//!   `min(1, (k Δx)²/3)`, where `Δx = N d`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{units, ATOMIC_MASS_UNIT, BOLTZMANN, HBAR, SPEED_OF_LIGHT};
use crate::contour::{trace_with_values, LevelSet};
use crate::error::{Error, Result};
use crate::params::{ClusterSpecies, GratingConfig};

/// Visibility factor that defines the critical contour.
pub const CRITICAL_FACTOR: f64 = 0.5;

/// Residual gas and radiation environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentConfig {
    /// Pa.
    pub gas_pressure: f64,
    /// K.
    pub gas_temperature: f64,
    /// kg.
    pub gas_mass: f64,
    /// Static polarizability, C m²/V.
    pub gas_polarizability: f64,
    /// Temperature of the radiation field, K.
    pub environment_temperature: f64,
    /// Internal temperature of the cluster, K.
    pub cluster_temperature: f64,
}

impl EnvironmentConfig {
    /// N₂ mass, amu.
    pub const NITROGEN_MASS_AMU: f64 = 28.0134;
    /// N₂ polarizability volume, Å³.
    pub const NITROGEN_POLARIZABILITY_A3: f64 = 1.74;

    /// Nitrogen background with gas, radiation and cluster all at `temperature`.
    pub fn nitrogen(pressure: f64, temperature: f64) -> Result<Self> {
        Self {
            gas_pressure: pressure,
            gas_temperature: temperature,
            gas_mass: Self::NITROGEN_MASS_AMU * ATOMIC_MASS_UNIT,
            gas_polarizability: units::polarizability_volume_a3_to_si(
                Self::NITROGEN_POLARIZABILITY_A3,
            ),
            environment_temperature: temperature,
            cluster_temperature: temperature,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        for (name, t) in [
            ("gas temperature", self.gas_temperature),
            ("environment temperature", self.environment_temperature),
            ("cluster temperature", self.cluster_temperature),
        ] {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Domain(format!("{name} must be > 0, got {t}")));
            }
        }
        if !(self.gas_pressure.is_finite() && self.gas_pressure >= 0.0) {
            return Err(Error::Domain(format!(
                "pressure must be >= 0, got {}",
                self.gas_pressure
            )));
        }
        if !(self.gas_mass > 0.0 && self.gas_polarizability >= 0.0) {
            return Err(Error::Domain(
                "gas mass must be > 0 and polarizability >= 0".into(),
            ));
        }
        Ok(self)
    }

    /// Same gas, new pressure and a common temperature for gas, radiation
    /// and cluster.
    pub fn at(&self, pressure: f64, temperature: f64) -> Result<Self> {
        Self {
            gas_pressure: pressure,
            gas_temperature: temperature,
            environment_temperature: temperature,
            cluster_temperature: temperature,
            ..*self
        }
        .validated()
    }

    /// Same gas temperature, new pressure and ambient (radiation and
    /// cluster) temperature.
    pub fn at_ambient(&self, pressure: f64, ambient: f64) -> Result<Self> {
        Self {
            gas_pressure: pressure,
            environment_temperature: ambient,
            cluster_temperature: ambient,
            ..*self
        }
        .validated()
    }

    pub fn gas_density(&self) -> f64 {
        self.gas_pressure / (BOLTZMANN * self.gas_temperature)
    }
}

/// Per-channel weights; zero switches a channel off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelCouplings {
    pub collisions: f64,
    pub absorption: f64,
    pub emission: f64,
    pub scattering: f64,
}

impl Default for ChannelCouplings {
    fn default() -> Self {
        Self {
            collisions: 1.0,
            absorption: 1.0,
            emission: 1.0,
            scattering: 1.0,
        }
    }
}

/// Every constant of the decoherence model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceModel {
    /// Ionization energy (work function) of the cluster material, J.
    pub cluster_ionization_energy: f64,
    /// Ionization energy of the gas, J.
    pub gas_ionization_energy: f64,
    /// Drude plasma frequency, rad/s.
    pub plasma_frequency: f64,
    /// Bulk Drude damping rate, rad/s.
    pub bulk_damping: f64,
    /// Fermi velocity, m/s.
    pub fermi_velocity: f64,
    /// Surface-scattering coefficient `A` in `γ = γ_bulk + A v_F / R`.
    pub surface_scattering: f64,
    /// Spectral integration range in `x = ħω / k_B T`.
    pub spectral_min: f64,
    pub spectral_max: f64,
    /// Relative accuracy requested from the spectral quadrature.
    pub quadrature_tolerance: f64,
    pub couplings: ChannelCouplings,
}

impl DecoherenceModel {
    /// Gold clusters in nitrogen: work function 5.1 eV, N₂ ionization
    /// 15.58 eV, Drude ħω_p = 9.03 eV and γ = 215 cm⁻¹, v_F = 1.40e6 m/s,
    /// surface-scattering coefficient 1.
    pub fn gold_in_nitrogen() -> Self {
        Self {
            cluster_ionization_energy: units::ev_to_joule(5.1),
            gas_ionization_energy: units::ev_to_joule(15.58),
            plasma_frequency: 1.37e16,
            bulk_damping: 4.05e13,
            fermi_velocity: 1.40e6,
            surface_scattering: 1.0,
            spectral_min: 1e-3,
            spectral_max: 50.0,
            quadrature_tolerance: 1e-10,
            couplings: ChannelCouplings::default(),
        }
    }

    pub fn with_couplings(self, couplings: ChannelCouplings) -> Self {
        Self { couplings, ..self }
    }

    /// Drude permittivity at angular frequency `omega` for a sphere of radius `radius`.
    pub fn permittivity(&self, omega: f64, radius: f64) -> Complex64 {
        let gamma = self.bulk_damping + self.surface_scattering * self.fermi_velocity / radius;
        let wp2 = self.plasma_frequency * self.plasma_frequency;
        Complex64::new(1.0, 0.0) - wp2 / Complex64::new(omega * omega, gamma * omega)
    }
}

impl Default for DecoherenceModel {
    fn default() -> Self {
        Self::gold_in_nitrogen()
    }
}

/// Decoherence rates (Hz, already weighted by their path-distinguishing
/// effectiveness) and the resulting visibility factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceBudget {
    pub rate_collision: f64,
    pub rate_bb_absorption: f64,
    pub rate_bb_emission: f64,
    pub rate_bb_scattering: f64,
    /// Time over which the rates act, s.
    pub interference_time: f64,
    pub exposure_collision: f64,
    pub exposure_bb_absorption: f64,
    pub exposure_bb_emission: f64,
    pub exposure_bb_scattering: f64,
    pub visibility_factor: f64,
}

impl DecoherenceBudget {
    pub fn total_exposure(&self) -> f64 {
        self.exposure_collision
            + self.exposure_bb_absorption
            + self.exposure_bb_emission
            + self.exposure_bb_scattering
    }
}

/// `C6` coefficient (J m⁶) of the cluster–gas van der Waals interaction.
pub fn c6_coefficient(
    species: &ClusterSpecies,
    env: &EnvironmentConfig,
    model: &DecoherenceModel,
) -> f64 {
    let r = species.radius();
    let cluster_volume = r * r * r;
    let gas_volume = env.gas_polarizability / (4.0 * PI * crate::constants::VACUUM_PERMITTIVITY);
    let (i1, i2) = (model.cluster_ionization_energy, model.gas_ionization_energy);
    1.5 * i1 * i2 / (i1 + i2) * cluster_volume * gas_volume
}

/// `4π (−Γ(−2/5) cos(π/5)) / 5 ≈ 7.57`: prefactor of the eikonal total
/// cross section for a `−C6/r⁶` potential.
pub fn van_der_waals_prefactor() -> f64 {
    let a = 0.4;
    4.0 * PI * (-libm::tgamma(-a) * (PI * a / 2.0).cos()) / 5.0
}

/// Total cross section (m²) at relative speed `speed`.
pub fn collision_cross_section(c6: f64, speed: f64) -> f64 {
    van_der_waals_prefactor() * (3.0 * PI * c6 / (8.0 * HBAR * speed)).powf(0.4)
}

/// Maxwell–Boltzmann mean of `v^a` for particles of mass `mass` at `temperature`.
pub fn maxwell_boltzmann_moment(a: f64, mass: f64, temperature: f64) -> f64 {
    let scale = (2.0 * BOLTZMANN * temperature / mass).sqrt();
    scale.powf(a) * 2.0 * libm::tgamma((3.0 + a) / 2.0) / PI.sqrt()
}

/// Collision rate `n_gas ⟨σ(v) v⟩` (Hz). The cluster is taken at rest.
pub fn collision_rate(
    species: &ClusterSpecies,
    env: &EnvironmentConfig,
    model: &DecoherenceModel,
) -> f64 {
    if env.gas_pressure == 0.0 {
        return 0.0;
    }
    let c6 = c6_coefficient(species, env, model);
    // σ(v) v = σ(1 m/s) v^{3/5}
    let sigma_unit = collision_cross_section(c6, 1.0);
    env.gas_density()
        * sigma_unit
        * maxwell_boltzmann_moment(0.6, env.gas_mass, env.gas_temperature)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Photon {
    Absorbed,
    Scattered,
}

fn absorption_effectiveness(k: f64, separation: f64) -> f64 {
    let s = k * separation;
    if s < 1e-3 {
        s * s / 6.0 * (1.0 - s * s / 20.0)
    } else {
        1.0 - s.sin() / s
    }
}

fn scattering_effectiveness(k: f64, separation: f64) -> f64 {
    let s = k * separation;
    (s * s / 3.0).min(1.0)
}

/// Effective thermal-photon rate for one channel at temperature `t`.
fn thermal_rate(
    species: &ClusterSpecies,
    separation: f64,
    temperature: f64,
    model: &DecoherenceModel,
    kind: Photon,
) -> Result<f64> {
    let radius = species.radius();
    let omega_scale = BOLTZMANN * temperature / HBAR;
    // rate = ∫ dω c σ(ω) ω²/(π² c³) / (e^x − 1) · effectiveness
    let integrand = |x: f64| {
        let omega = x * omega_scale;
        let k = omega / SPEED_OF_LIGHT;
        let eps = model.permittivity(omega, radius);
        let alpha = radius.powi(3) * (eps - 1.0) / (eps + 2.0);
        let (sigma, weight) = match kind {
            Photon::Absorbed => (
                4.0 * PI * k * alpha.im,
                absorption_effectiveness(k, separation),
            ),
            Photon::Scattered => (
                8.0 * PI / 3.0 * k.powi(4) * alpha.norm_sqr(),
                scattering_effectiveness(k, separation),
            ),
        };
        let density = omega * omega / (PI * PI * SPEED_OF_LIGHT.powi(2)) / x.exp_m1();
        sigma * density * weight * omega_scale
    };
    let (a, b) = (model.spectral_min, model.spectral_max);
    // coarse pass fixes the absolute error target
    let coarse = quadrature::integrate(integrand, a, b, f64::MIN_POSITIVE.sqrt())
        .integral
        .abs();
    if coarse == 0.0 {
        return Ok(0.0);
    }
    let target = model.quadrature_tolerance * coarse;
    let out = quadrature::integrate(integrand, a, b, target);
    if !out.integral.is_finite() || out.error_estimate > 1e3 * target {
        return Err(Error::NonConvergence {
            max_order: out.num_function_evaluations as usize,
            rho: out.error_estimate / coarse,
        });
    }
    Ok(out.integral.max(0.0))
}

/// Effective thermal absorption, emission and scattering rates (Hz).
pub fn blackbody_rates(
    species: &ClusterSpecies,
    grating: &GratingConfig,
    env: &EnvironmentConfig,
    model: &DecoherenceModel,
) -> Result<(f64, f64, f64)> {
    let sep = grating.path_separation();
    let absorption = thermal_rate(
        species,
        sep,
        env.environment_temperature,
        model,
        Photon::Absorbed,
    )?;
    // Kirchhoff: emission is the absorption spectrum weighted at the
    // cluster temperature; equal to absorption only in equilibrium.
    let emission = thermal_rate(
        species,
        sep,
        env.cluster_temperature,
        model,
        Photon::Absorbed,
    )?;
    let scattering = thermal_rate(
        species,
        sep,
        env.environment_temperature,
        model,
        Photon::Scattered,
    )?;
    Ok((absorption, emission, scattering))
}

/// Full budget over the interference time `2 N T_T`.
pub fn decoherence_budget(
    species: &ClusterSpecies,
    grating: &GratingConfig,
    env: &EnvironmentConfig,
    model: &DecoherenceModel,
) -> Result<DecoherenceBudget> {
    let c = model.couplings;
    let time = grating.interference_time(species.mass);
    let rate_collision = c.collisions * collision_rate(species, env, model);
    let (abs, emi, sca) = blackbody_rates(species, grating, env, model)?;
    let (rate_abs, rate_emi, rate_sca) = (c.absorption * abs, c.emission * emi, c.scattering * sca);
    let mut budget = DecoherenceBudget {
        rate_collision,
        rate_bb_absorption: rate_abs,
        rate_bb_emission: rate_emi,
        rate_bb_scattering: rate_sca,
        interference_time: time,
        exposure_collision: rate_collision * time,
        exposure_bb_absorption: rate_abs * time,
        exposure_bb_emission: rate_emi * time,
        exposure_bb_scattering: rate_sca * time,
        visibility_factor: 1.0,
    };
    budget.visibility_factor = (-budget.total_exposure()).exp();
    Ok(budget)
}

/// Environmental visibility reduction factor in `(0, 1]`.
pub fn visibility_factor_env(
    species: &ClusterSpecies,
    grating: &GratingConfig,
    env: &EnvironmentConfig,
    model: &DecoherenceModel,
) -> Result<f64> {
    Ok(decoherence_budget(species, grating, env, model)?.visibility_factor)
}

/// Exposure split at one temperature: `exposure(p) = per_pascal · p + thermal`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExposureLine {
    pub per_pascal: f64,
    pub thermal: f64,
}

/// Collision exposure per pascal and thermal-photon exposure at the given
/// ambient temperature. The gas keeps `env.gas_temperature`.
pub fn exposure_line(
    species: &ClusterSpecies,
    grating: &GratingConfig,
    env: &EnvironmentConfig,
    model: &DecoherenceModel,
    temperature: f64,
) -> Result<ExposureLine> {
    let env = env.at_ambient(1.0, temperature)?;
    let budget = decoherence_budget(species, grating, &env, model)?;
    Ok(ExposureLine {
        per_pascal: budget.exposure_collision,
        thermal: budget.total_exposure() - budget.exposure_collision,
    })
}

/// Pressure (Pa) at which the environment halves the visibility at the
/// given ambient temperature; `None` if thermal radiation alone already does.
pub fn critical_pressure(
    species: &ClusterSpecies,
    grating: &GratingConfig,
    env: &EnvironmentConfig,
    model: &DecoherenceModel,
    temperature: f64,
) -> Result<Option<f64>> {
    let line = exposure_line(species, grating, env, model, temperature)?;
    let budget = (1.0 / CRITICAL_FACTOR).ln() - line.thermal;
    if budget <= 0.0 {
        return Ok(None);
    }
    if line.per_pascal == 0.0 {
        return Ok(Some(f64::INFINITY));
    }
    Ok(Some(budget / line.per_pascal))
}

/// Visibility-halving contour in the (pressure, temperature) plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalContour {
    /// Each polyline is a list of `(pressure Pa, temperature K)` ordered by
    /// increasing temperature.
    pub polylines: Vec<Vec<(f64, f64)>>,
}

impl CriticalContour {
    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }
}

/// Bisection tolerance along grid edges, relative to the edge length.
pub const CONTOUR_TOLERANCE: f64 = 1e-3;

/// Traces `visibility_factor_env = 0.5` over a log-pressure × temperature grid.
///
/// `pressures` (Pa) and `temperatures` (K) must be strictly increasing.
/// The temperature axis is the ambient temperature seen by radiation and
/// cluster; the gas stays at `env.gas_temperature`. With the gas density
/// held at fixed gas temperature, both channels grow along either axis.
pub fn critical_contour(
    species: &ClusterSpecies,
    grating: &GratingConfig,
    env: &EnvironmentConfig,
    model: &DecoherenceModel,
    pressures: &[f64],
    temperatures: &[f64],
) -> Result<CriticalContour> {
    if pressures.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::Domain(
            "pressure grid must be positive for log spacing".into(),
        ));
    }
    let log_p: Vec<f64> = pressures.iter().map(|p| p.log10()).collect();
    let threshold = (1.0 / CRITICAL_FACTOR).ln();

    // the pressure dependence is linear, so one line per temperature row
    // gives every node value
    let lines = temperatures
        .iter()
        .map(|&t| exposure_line(species, grating, env, model, t))
        .collect::<Result<Vec<_>>>()?;
    let mut values = Vec::with_capacity(pressures.len() * temperatures.len());
    for line in &lines {
        for &p in pressures {
            values.push(p * line.per_pascal + line.thermal - threshold);
        }
    }
    let field = |lp: f64, t: f64| {
        let line = exposure_line(species, grating, env, model, t)?;
        Ok(10f64.powf(lp) * line.per_pascal + line.thermal - threshold)
    };
    let LevelSet { polylines } =
        trace_with_values(&log_p, temperatures, &values, CONTOUR_TOLERANCE, field)?;
    let mut polylines: Vec<Vec<(f64, f64)>> = polylines
        .into_iter()
        .map(|line| {
            let mut pts: Vec<(f64, f64)> = line
                .into_iter()
                .map(|(lp, t)| (10f64.powf(lp), t))
                .collect();
            let (first, last) = (pts[0], pts[pts.len() - 1]);
            if (last.1, -last.0) < (first.1, -first.0) {
                pts.reverse();
            }
            pts
        })
        .collect();
    polylines.sort_by(|a, b| a[0].1.total_cmp(&b[0].1).then(a[0].0.total_cmp(&b[0].0)));
    Ok(CriticalContour { polylines })
}
