//! TOML run configuration. Every key is optional; unknown keys are errors.
//!
//! ```toml
//! [species]
//! label = "Au"
//! mass_amu = 1e6
//! density_kg_m3 = 19300
//! eps_re = 0.9
//! eps_im = 3.2
//!
//! [grating]
//! wavelength_nm = 157
//! talbot_order = 2
//! flux_J_m2 = 1.0
//!
//! [csl]
//! r_c_nm = 100
//! lambda0_Hz = 1e-16
//! m0_amu = 1
//! threshold = 0.5
//!
//! [environment]
//! pressure_mbar = 1e-10
//! temperature_K = 300        # gas, radiation and cluster
//! gas_temperature_K = 300    # overrides
//! ambient_temperature_K = 300
//! cluster_temperature_K = 300
//! gas_mass_amu = 28.0134
//! gas_polarizability_A3 = 1.74
//!
//! [model]
//! cluster_ionization_eV = 5.1
//! gas_ionization_eV = 15.58
//! plasma_frequency_rad_s = 1.37e16
//! bulk_damping_rad_s = 4.05e13
//! fermi_velocity_m_s = 1.4e6
//! surface_scattering = 1.0
//! spectral_min = 1e-3
//! spectral_max = 50
//! quadrature_tolerance = 1e-10
//! coupling_collisions = 1
//! coupling_absorption = 1
//! coupling_emission = 1
//! coupling_scattering = 1
//! ```

use std::path::Path;

use num_complex::Complex64;
use otima_core::constants::units;
use otima_core::decoherence::{ChannelCouplings, DecoherenceModel, EnvironmentConfig};
use otima_core::params::{GOLD_DENSITY, GOLD_PERMITTIVITY_157NM};
use otima_core::{ClusterSpecies, CslParams, GratingConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesSection {
    pub label: Option<String>,
    pub mass_amu: Option<f64>,
    pub density_kg_m3: Option<f64>,
    pub eps_re: Option<f64>,
    pub eps_im: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GratingSection {
    pub wavelength_nm: Option<f64>,
    pub talbot_order: Option<u32>,
    #[serde(rename = "flux_J_m2")]
    pub flux_j_m2: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CslSection {
    pub r_c_nm: Option<f64>,
    #[serde(rename = "lambda0_Hz")]
    pub lambda0_hz: Option<f64>,
    pub m0_amu: Option<f64>,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSection {
    pub pressure_mbar: Option<f64>,
    #[serde(rename = "temperature_K")]
    pub temperature_k: Option<f64>,
    #[serde(rename = "gas_temperature_K")]
    pub gas_temperature_k: Option<f64>,
    #[serde(rename = "ambient_temperature_K")]
    pub ambient_temperature_k: Option<f64>,
    #[serde(rename = "cluster_temperature_K")]
    pub cluster_temperature_k: Option<f64>,
    pub gas_mass_amu: Option<f64>,
    #[serde(rename = "gas_polarizability_A3")]
    pub gas_polarizability_a3: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(rename = "cluster_ionization_eV")]
    pub cluster_ionization_ev: Option<f64>,
    #[serde(rename = "gas_ionization_eV")]
    pub gas_ionization_ev: Option<f64>,
    pub plasma_frequency_rad_s: Option<f64>,
    pub bulk_damping_rad_s: Option<f64>,
    pub fermi_velocity_m_s: Option<f64>,
    pub surface_scattering: Option<f64>,
    pub spectral_min: Option<f64>,
    pub spectral_max: Option<f64>,
    pub quadrature_tolerance: Option<f64>,
    pub coupling_collisions: Option<f64>,
    pub coupling_absorption: Option<f64>,
    pub coupling_emission: Option<f64>,
    pub coupling_scattering: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub species: SpeciesSection,
    #[serde(default)]
    pub grating: GratingSection,
    #[serde(default)]
    pub csl: CslSection,
    #[serde(default)]
    pub environment: EnvironmentSection,
    #[serde(default)]
    pub model: ModelSection,
}

/// Default cluster mass when neither config nor command line gives one, amu.
pub const DEFAULT_MASS_AMU: f64 = 1e6;
/// Default localization rate, Hz.
pub const DEFAULT_LAMBDA0: f64 = 1e-16;
pub const DEFAULT_PRESSURE_MBAR: f64 = 1e-10;
pub const DEFAULT_TEMPERATURE_K: f64 = 300.0;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read(path)?).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Replaces the species section with a stand-alone species file
    /// (the `[species]` keys at top level).
    pub fn with_species_file(mut self, path: &Path) -> Result<Self> {
        let section: SpeciesSection = toml::from_str(&read(path)?)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        self.species = section;
        Ok(self)
    }

    pub fn resolve(&self) -> Result<Setup> {
        let s = &self.species;
        let species = ClusterSpecies::new(
            s.label.clone().unwrap_or_else(|| "Au".into()),
            units::amu_to_kg(s.mass_amu.unwrap_or(DEFAULT_MASS_AMU)),
            s.density_kg_m3.unwrap_or(GOLD_DENSITY),
            Complex64::new(
                s.eps_re.unwrap_or(GOLD_PERMITTIVITY_157NM.re),
                s.eps_im.unwrap_or(GOLD_PERMITTIVITY_157NM.im),
            ),
        )?;

        let g = &self.grating;
        let default_grating = GratingConfig::otima_default();
        let grating = GratingConfig::new(
            g.wavelength_nm
                .map(units::nm_to_m)
                .unwrap_or(default_grating.laser_wavelength),
            g.talbot_order.unwrap_or(default_grating.talbot_order),
            g.flux_j_m2.unwrap_or(default_grating.laser_flux),
        )?;

        let c = &self.csl;
        let csl = CslParams::new(
            c.r_c_nm
                .map(units::nm_to_m)
                .unwrap_or(CslParams::DEFAULT_R_C),
            c.lambda0_hz.unwrap_or(DEFAULT_LAMBDA0),
            units::amu_to_kg(c.m0_amu.unwrap_or(1.0)),
        )?;
        let threshold = c.threshold.unwrap_or(otima_core::csl::DEFAULT_THRESHOLD);

        let e = &self.environment;
        let t = e.temperature_k.unwrap_or(DEFAULT_TEMPERATURE_K);
        let ambient = e.ambient_temperature_k.unwrap_or(t);
        let mut env = EnvironmentConfig::nitrogen(
            units::mbar_to_pa(e.pressure_mbar.unwrap_or(DEFAULT_PRESSURE_MBAR)),
            t,
        )?;
        env.gas_temperature = e.gas_temperature_k.unwrap_or(t);
        env.environment_temperature = ambient;
        env.cluster_temperature = e.cluster_temperature_k.unwrap_or(ambient);
        if let Some(m) = e.gas_mass_amu {
            env.gas_mass = units::amu_to_kg(m);
        }
        if let Some(a) = e.gas_polarizability_a3 {
            env.gas_polarizability = units::polarizability_volume_a3_to_si(a);
        }
        let env = env.validated()?;

        let m = &self.model;
        let d = DecoherenceModel::default();
        let model = DecoherenceModel {
            cluster_ionization_energy: m
                .cluster_ionization_ev
                .map(units::ev_to_joule)
                .unwrap_or(d.cluster_ionization_energy),
            gas_ionization_energy: m
                .gas_ionization_ev
                .map(units::ev_to_joule)
                .unwrap_or(d.gas_ionization_energy),
            plasma_frequency: m.plasma_frequency_rad_s.unwrap_or(d.plasma_frequency),
            bulk_damping: m.bulk_damping_rad_s.unwrap_or(d.bulk_damping),
            fermi_velocity: m.fermi_velocity_m_s.unwrap_or(d.fermi_velocity),
            surface_scattering: m.surface_scattering.unwrap_or(d.surface_scattering),
            spectral_min: m.spectral_min.unwrap_or(d.spectral_min),
            spectral_max: m.spectral_max.unwrap_or(d.spectral_max),
            quadrature_tolerance: m.quadrature_tolerance.unwrap_or(d.quadrature_tolerance),
            couplings: ChannelCouplings {
                collisions: m.coupling_collisions.unwrap_or(1.0),
                absorption: m.coupling_absorption.unwrap_or(1.0),
                emission: m.coupling_emission.unwrap_or(1.0),
                scattering: m.coupling_scattering.unwrap_or(1.0),
            },
        };
        check_model(&model)?;

        Ok(Setup {
            species,
            grating,
            csl,
            threshold,
            environment: env,
            model,
        })
    }
}

fn check_model(m: &DecoherenceModel) -> Result<()> {
    let positive = [
        ("cluster_ionization_eV", m.cluster_ionization_energy),
        ("gas_ionization_eV", m.gas_ionization_energy),
        ("plasma_frequency_rad_s", m.plasma_frequency),
        ("spectral_min", m.spectral_min),
        ("quadrature_tolerance", m.quadrature_tolerance),
    ];
    for (name, v) in positive {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Config(format!(
                "[model] {name} must be > 0, got {v}"
            )));
        }
    }
    let c = m.couplings;
    let non_negative = [
        ("bulk_damping_rad_s", m.bulk_damping),
        ("fermi_velocity_m_s", m.fermi_velocity),
        ("surface_scattering", m.surface_scattering),
        ("coupling_collisions", c.collisions),
        ("coupling_absorption", c.absorption),
        ("coupling_emission", c.emission),
        ("coupling_scattering", c.scattering),
    ];
    for (name, v) in non_negative {
        if !(v.is_finite() && v >= 0.0) {
            return Err(CliError::Config(format!(
                "[model] {name} must be >= 0, got {v}"
            )));
        }
    }
    if !(m.spectral_max > m.spectral_min) {
        return Err(CliError::Config(
            "[model] spectral_max must exceed spectral_min".into(),
        ));
    }
    Ok(())
}

/// Fully resolved inputs, all SI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Setup {
    pub species: ClusterSpecies,
    pub grating: GratingConfig,
    pub csl: CslParams,
    pub threshold: f64,
    pub environment: EnvironmentConfig,
    pub model: DecoherenceModel,
}
