//! Fully resolved jobs and their execution.
//!
//! A [`Job`] holds every input in SI, including the expanded sweep grids,
//! so that executing it is a pure function of its serialized form. This is
//! what makes manifest replay byte-identical.

use num_complex::Complex64;
use otima_core::constants::{units, PhysicalConstants};
use otima_core::csl::{
    critical_mass, csl_visibility_ratio, csl_visibility_ratio_oracle, exclusion_boundary,
};
use otima_core::decoherence::{
    critical_contour, decoherence_budget, DecoherenceModel, EnvironmentConfig,
};
use otima_core::interferometer::{flux_for_target_visibility, observables};
use otima_core::mie::{absorption_profile, multipole_terms};
use otima_core::specfun::{self, BesselOrder};
use otima_core::{ClusterSpecies, CslParams, Error as CoreError, GratingConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::render::{Cell, Format, Table};

/// Version tag of the CSV layouts; bump when a header changes.
pub const SCHEMA_VERSION: u32 = 1;

pub const FIG1_HEADER: [&str; 5] = [
    "kind",
    "lambda0_Hz",
    "critical_mass_amu",
    "critical_mass_kg",
    "geometry_factor",
];
pub const FIG2_HEADER: [&str; 9] = [
    "mass_amu",
    "radius_nm",
    "flux_J_m2",
    "n0",
    "n1",
    "visibility",
    "transmissivity",
    "truncation_order",
    "status",
];
pub const FIG3_HEADER: [&str; 4] = ["mass_amu", "polyline", "pressure_mbar", "temperature_K"];
pub const TERMS_HEADER: [&str; 5] = ["ell", "sigma_e", "sigma_h", "mean_term", "modulation_term"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SpecialFunction {
    /// Spherical Bessel j_l(z), complex z.
    J,
    /// Spherical Bessel y_l(x), real x > 0.
    Y,
    /// Spherical Hankel h1_l(x), real x > 0.
    H1,
    /// Modified Bessel I_n(x), n = 0, 1, 2.
    I,
    Erf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    Fig1 {
        grating: GratingConfig,
        csl: CslParams,
        threshold: f64,
        lambda0_grid: Vec<f64>,
        markers: Vec<f64>,
        format: Format,
    },
    Fig2 {
        species: ClusterSpecies,
        grating: GratingConfig,
        visibility: f64,
        masses: Vec<f64>,
        format: Format,
    },
    Fig3 {
        species: ClusterSpecies,
        grating: GratingConfig,
        environment: EnvironmentConfig,
        model: DecoherenceModel,
        masses: Vec<f64>,
        pressures: Vec<f64>,
        temperatures: Vec<f64>,
        format: Format,
    },
    Budget {
        species: ClusterSpecies,
        grating: GratingConfig,
        csl: CslParams,
        environment: EnvironmentConfig,
        model: DecoherenceModel,
        format: Format,
    },
    Observables {
        species: ClusterSpecies,
        grating: GratingConfig,
        target_visibility: Option<f64>,
        format: Format,
    },
    Absorption {
        species: ClusterSpecies,
        grating: GratingConfig,
        terms: bool,
        format: Format,
    },
    CslRatio {
        species: ClusterSpecies,
        grating: GratingConfig,
        csl: CslParams,
        oracle_steps: Option<usize>,
        format: Format,
    },
    SpecfunEval {
        function: SpecialFunction,
        order: usize,
        re: f64,
        im: f64,
        format: Format,
    },
}

/// Rendered results. `primary` goes to `--out` or stdout; `extra` files
/// are only written when the output is a directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub primary: String,
    pub extra: Vec<(String, String)>,
}

impl Output {
    fn single(primary: String) -> Self {
        Self {
            primary,
            extra: Vec::new(),
        }
    }
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::Fig1 { .. } => "fig1",
            Job::Fig2 { .. } => "fig2",
            Job::Fig3 { .. } => "fig3",
            Job::Budget { .. } => "budget",
            Job::Observables { .. } => "observables",
            Job::Absorption { .. } => "absorption",
            Job::CslRatio { .. } => "csl-ratio",
            Job::SpecfunEval { .. } => "specfun-eval",
        }
    }

    /// Whether the output is a file set (written into a directory).
    pub fn writes_directory(&self) -> bool {
        matches!(self, Job::Fig3 { .. })
    }

    /// Runs the job; `jobs` worker threads evaluate independent grid points.
    pub fn execute(&self, jobs: usize) -> Result<Output> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
        pool.install(|| self.execute_in_pool())
    }

    fn execute_in_pool(&self) -> Result<Output> {
        match self {
            Job::Fig1 {
                grating,
                csl,
                threshold,
                lambda0_grid,
                markers,
                format,
            } => fig1(grating, csl, *threshold, lambda0_grid, markers)
                .map(|t| Output::single(t.render(*format))),
            Job::Fig2 {
                species,
                grating,
                visibility,
                masses,
                format,
            } => fig2(species, grating, *visibility, masses)
                .map(|t| Output::single(t.render(*format))),
            Job::Fig3 {
                species,
                grating,
                environment,
                model,
                masses,
                pressures,
                temperatures,
                format,
            } => fig3(
                species,
                grating,
                environment,
                model,
                masses,
                pressures,
                temperatures,
                *format,
            ),
            Job::Budget {
                species,
                grating,
                csl,
                environment,
                model,
                format,
            } => budget(species, grating, csl, environment, model)
                .map(|t| Output::single(t.render_record(*format))),
            Job::Observables {
                species,
                grating,
                target_visibility,
                format,
            } => observables_report(species, grating, *target_visibility)
                .map(|t| Output::single(t.render_record(*format))),
            Job::Absorption {
                species,
                grating,
                terms,
                format,
            } => absorption_report(species, grating, *terms).map(|t| {
                Output::single(if *terms {
                    t.render(*format)
                } else {
                    t.render_record(*format)
                })
            }),
            Job::CslRatio {
                species,
                grating,
                csl,
                oracle_steps,
                format,
            } => csl_ratio_report(species, grating, csl, *oracle_steps)
                .map(|t| Output::single(t.render_record(*format))),
            Job::SpecfunEval {
                function,
                order,
                re,
                im,
                format,
            } => specfun_eval(*function, *order, *re, *im)
                .map(|t| Output::single(t.render_record(*format))),
        }
    }
}

fn fig1(
    grating: &GratingConfig,
    csl: &CslParams,
    threshold: f64,
    grid: &[f64],
    markers: &[f64],
) -> Result<Table> {
    let mut table = Table::new(FIG1_HEADER.to_vec());
    for (kind, lambdas) in [("grid", grid), ("marker", markers)] {
        for p in exclusion_boundary(grating, csl, lambdas, threshold)? {
            table.push(vec![
                kind.into(),
                p.lambda0.into(),
                units::kg_to_amu(p.critical_mass).into(),
                p.critical_mass.into(),
                p.geometry_factor.into(),
            ]);
        }
    }
    Ok(table)
}

fn fig2(
    species: &ClusterSpecies,
    grating: &GratingConfig,
    target: f64,
    masses: &[f64],
) -> Result<Table> {
    let rows = masses
        .par_iter()
        .map(|&m| -> Result<Vec<Cell>> {
            let s = species.with_mass(m)?;
            let lead: Vec<Cell> = vec![
                units::kg_to_amu(m).into(),
                units::m_to_nm(s.radius()).into(),
            ];
            let tail = match flux_for_target_visibility(&s, grating, target) {
                Ok(sol) => vec![
                    sol.flux.into(),
                    sol.profile.n0.into(),
                    sol.profile.n1.into(),
                    sol.observables.visibility.into(),
                    sol.observables.transmissivity.into(),
                    sol.profile.truncation_order.into(),
                    "ok".into(),
                ],
                Err(e @ (CoreError::Geometry { .. } | CoreError::Unachievable { .. })) => {
                    let status = if matches!(e, CoreError::Geometry { .. }) {
                        "geometry"
                    } else {
                        "unachievable"
                    };
                    let mut row: Vec<Cell> = vec![f64::NAN.into(); 5];
                    row.push(0usize.into());
                    row.push(status.into());
                    row
                }
                Err(e) => return Err(e.into()),
            };
            Ok(lead.into_iter().chain(tail).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(FIG2_HEADER.to_vec());
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

/// File name of the per-mass contour CSV.
pub fn contour_file_name(mass_kg: f64) -> String {
    format!("contour_{:e}amu.csv", units::kg_to_amu(mass_kg))
}

#[allow(clippy::too_many_arguments)]
fn fig3(
    species: &ClusterSpecies,
    grating: &GratingConfig,
    env: &EnvironmentConfig,
    model: &DecoherenceModel,
    masses: &[f64],
    pressures: &[f64],
    temperatures: &[f64],
    format: Format,
) -> Result<Output> {
    if masses.is_empty() || pressures.len() < 2 || temperatures.len() < 2 {
        return Err(CliError::usage(
            "fig3 needs at least one mass and at least 2 points on each grid axis",
        ));
    }
    let contours = masses
        .par_iter()
        .map(|&m| {
            let s = species.with_mass(m)?;
            Ok(critical_contour(
                &s,
                grating,
                env,
                model,
                pressures,
                temperatures,
            )?)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut combined = Table::new(FIG3_HEADER.to_vec());
    let mut extra = Vec::new();
    for (&m, contour) in masses.iter().zip(&contours) {
        let mut table = Table::new(FIG3_HEADER.to_vec());
        for (k, line) in contour.polylines.iter().enumerate() {
            for &(p, t) in line {
                let row: Vec<Cell> = vec![
                    units::kg_to_amu(m).into(),
                    k.into(),
                    units::pa_to_mbar(p).into(),
                    t.into(),
                ];
                table.push(row.clone());
                combined.push(row);
            }
        }
        extra.push((contour_file_name(m), table.render(format)));
    }
    let sidecar = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "environment": env,
        "model": model,
        "species": species,
        "grating": grating,
        "constants": PhysicalConstants::SI,
        "contour_tolerance": otima_core::decoherence::CONTOUR_TOLERANCE,
        "critical_factor": otima_core::decoherence::CRITICAL_FACTOR,
    });
    let mut model_json = serde_json::to_string_pretty(&sidecar).expect("model serializes");
    model_json.push('\n');
    extra.push(("model.json".into(), model_json));
    Ok(Output {
        primary: combined.render(format),
        extra,
    })
}

fn record(pairs: Vec<(&'static str, Cell)>) -> Table {
    let (header, row): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let mut t = Table::new(header);
    t.push(row);
    t
}

fn budget(
    species: &ClusterSpecies,
    grating: &GratingConfig,
    csl: &CslParams,
    env: &EnvironmentConfig,
    model: &DecoherenceModel,
) -> Result<Table> {
    let reduction = csl_visibility_ratio(species, grating, csl);
    let b = decoherence_budget(species, grating, env, model)?;
    Ok(record(vec![
        ("mass_amu", species.mass_amu().into()),
        ("lambda0_Hz", csl.lambda0.into()),
        ("pressure_mbar", units::pa_to_mbar(env.gas_pressure).into()),
        ("gas_temperature_K", env.gas_temperature.into()),
        ("ambient_temperature_K", env.environment_temperature.into()),
        ("cluster_temperature_K", env.cluster_temperature.into()),
        ("interference_time_s", b.interference_time.into()),
        ("csl_factor", reduction.ratio.into()),
        ("csl_exponent", reduction.exponent.into()),
        ("env_factor", b.visibility_factor.into()),
        (
            "combined_factor",
            (reduction.ratio * b.visibility_factor).into(),
        ),
        ("rate_collision_Hz", b.rate_collision.into()),
        ("rate_bb_absorption_Hz", b.rate_bb_absorption.into()),
        ("rate_bb_emission_Hz", b.rate_bb_emission.into()),
        ("rate_bb_scattering_Hz", b.rate_bb_scattering.into()),
        ("exposure_collision", b.exposure_collision.into()),
        ("exposure_bb_absorption", b.exposure_bb_absorption.into()),
        ("exposure_bb_emission", b.exposure_bb_emission.into()),
        ("exposure_bb_scattering", b.exposure_bb_scattering.into()),
    ]))
}

fn observables_report(
    species: &ClusterSpecies,
    grating: &GratingConfig,
    target: Option<f64>,
) -> Result<Table> {
    let (profile, obs) = match target {
        Some(v) => {
            let sol = flux_for_target_visibility(species, grating, v)?;
            (sol.profile, sol.observables)
        }
        None => {
            let p = absorption_profile(species, grating)?;
            let o = observables(&p)?;
            (p, o)
        }
    };
    Ok(record(vec![
        ("mass_amu", species.mass_amu().into()),
        ("radius_nm", units::m_to_nm(species.radius()).into()),
        ("flux_J_m2", profile.flux.into()),
        ("n0", profile.n0.into()),
        ("n1", profile.n1.into()),
        ("visibility", obs.visibility.into()),
        ("transmissivity", obs.transmissivity.into()),
        ("truncation_order", profile.truncation_order.into()),
        (
            "talbot_time_s",
            grating.talbot_time_for_mass(species.mass).into(),
        ),
        (
            "interference_time_s",
            grating.interference_time(species.mass).into(),
        ),
    ]))
}

fn absorption_report(
    species: &ClusterSpecies,
    grating: &GratingConfig,
    terms: bool,
) -> Result<Table> {
    let profile = absorption_profile(species, grating)?;
    let rho = grating.wavenumber() * species.radius();
    if terms {
        let t = multipole_terms(rho, species.permittivity)?;
        let mut table = Table::new(TERMS_HEADER.to_vec());
        for ell in 1..=t.truncation_order() {
            table.push(vec![
                ell.into(),
                t.sigma_e[ell - 1].into(),
                t.sigma_h[ell - 1].into(),
                t.mean_term(ell).into(),
                t.modulation_term(ell).into(),
            ]);
        }
        return Ok(table);
    }
    Ok(record(vec![
        ("mass_amu", species.mass_amu().into()),
        ("radius_nm", units::m_to_nm(species.radius()).into()),
        ("rho", rho.into()),
        ("flux_J_m2", profile.flux.into()),
        ("n0", profile.n0.into()),
        ("n1", profile.n1.into()),
        ("n1_over_n0", (profile.n1 / profile.n0).into()),
        ("truncation_order", profile.truncation_order.into()),
        ("converged", profile.converged.into()),
    ]))
}

fn csl_ratio_report(
    species: &ClusterSpecies,
    grating: &GratingConfig,
    csl: &CslParams,
    oracle_steps: Option<usize>,
) -> Result<Table> {
    let r = csl_visibility_ratio(species, grating, csl);
    let mut pairs: Vec<(&'static str, Cell)> = vec![
        ("mass_amu", species.mass_amu().into()),
        ("lambda0_Hz", csl.lambda0.into()),
        ("r_c_nm", units::m_to_nm(csl.r_c).into()),
        ("ratio", r.ratio.into()),
        ("exponent", r.exponent.into()),
        ("geometry_factor", r.geometry_factor.into()),
    ];
    if csl.lambda0 > 0.0 {
        let mc = critical_mass(csl, grating, otima_core::csl::DEFAULT_THRESHOLD)?;
        pairs.push(("critical_mass_amu", units::kg_to_amu(mc).into()));
    }
    if let Some(steps) = oracle_steps {
        pairs.push((
            "oracle_ratio",
            csl_visibility_ratio_oracle(species, grating, csl, steps)?.into(),
        ));
    }
    Ok(record(pairs))
}

fn specfun_eval(function: SpecialFunction, order: usize, re: f64, im: f64) -> Result<Table> {
    let real_only = |name: &str| -> Result<()> {
        if im != 0.0 {
            return Err(CliError::usage(format!("{name} takes a real argument")));
        }
        Ok(())
    };
    let value = match function {
        SpecialFunction::J => specfun::spherical_bessel_j(order, Complex64::new(re, im))?,
        SpecialFunction::Y => {
            real_only("y")?;
            Complex64::new(specfun::spherical_bessel_y(order, re)?, 0.0)
        }
        SpecialFunction::H1 => {
            real_only("h1")?;
            specfun::spherical_hankel_h1(order, re)?
        }
        SpecialFunction::I => {
            real_only("I")?;
            Complex64::new(specfun::bessel_i(BesselOrder::from_usize(order)?, re)?, 0.0)
        }
        SpecialFunction::Erf => {
            real_only("erf")?;
            Complex64::new(specfun::erf(re), 0.0)
        }
    };
    Ok(record(vec![
        ("order", order.into()),
        ("arg_re", re.into()),
        ("arg_im", im.into()),
        ("value_re", value.re.into()),
        ("value_im", value.im.into()),
    ]))
}
