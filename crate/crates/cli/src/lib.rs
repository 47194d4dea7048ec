//! Command-line front end: parses arguments and config, resolves them into
//! a [`job::Job`], runs it and writes the output plus a replayable manifest.

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod grid;
pub mod job;
pub mod manifest;
pub mod render;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use otima_core::constants::units;

use config::{ConfigFile, Setup};
use error::{exit, CliError, Result};
use grid::{Range, Spacing};
use job::{Job, Output, SpecialFunction};
use manifest::Manifest;
use render::Format;

#[derive(Debug, Parser)]
#[command(
    name = "otima",
    version,
    about = "Collapse-model test feasibility sweeps"
)]
pub struct Cli {
    /// TOML configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output file (directory for fig3); stdout when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for sweeps
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical mass versus localization rate
    Fig1 {
        /// lambda0 range in Hz, log-spaced
        #[arg(long, default_value = "1e-18:1e-6:121")]
        lambda0_range: Range,
        /// Extra marker rates in Hz, or "none"
        #[arg(long, default_value = "1e-10,1e-16")]
        markers: String,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Transmissivity at fixed visibility versus cluster mass
    Fig2 {
        /// Species file (flat [species] keys)
        #[arg(long)]
        species: Option<PathBuf>,
        /// Mass range in amu, log-spaced
        #[arg(long, default_value = "1e4:1e9:101")]
        mass_range: Range,
        /// Target visibility, fraction or percent ("85%")
        #[arg(long, default_value = "0.85")]
        visibility: String,
    },
    /// Critical pressure/temperature contours
    Fig3 {
        #[arg(long)]
        species: Option<PathBuf>,
        /// Cluster masses in amu
        #[arg(long, default_value = "1e6,1e7,1e8", value_delimiter = ',')]
        masses: Vec<f64>,
        /// Pressure range in mbar, log-spaced
        #[arg(long = "p-range", default_value = "1e-14:1e-6:81")]
        p_range: Range,
        /// Ambient temperature range in K, linear
        #[arg(long = "T-range", default_value = "4:400:100")]
        t_range: Range,
    },
    /// Combined CSL and environmental visibility budget
    Budget {
        /// amu
        #[arg(long)]
        mass: Option<f64>,
        /// Hz
        #[arg(long)]
        lambda0: Option<f64>,
        /// mbar
        #[arg(long)]
        pressure: Option<f64>,
        /// K, applied to gas, radiation and cluster
        #[arg(long)]
        temperature: Option<f64>,
    },
    /// Visibility and transmissivity for one cluster
    Observables {
        /// amu
        #[arg(long)]
        mass: Option<f64>,
        /// J/m²
        #[arg(long, conflicts_with = "visibility")]
        flux: Option<f64>,
        /// Solve for the flux giving this visibility
        #[arg(long)]
        visibility: Option<String>,
    },
    /// Standing-wave absorption coefficients n0, n1
    Absorption {
        /// amu
        #[arg(long)]
        mass: Option<f64>,
        /// J/m²
        #[arg(long)]
        flux: Option<f64>,
        /// List the per-multipole terms instead
        #[arg(long)]
        terms: bool,
    },
    /// CSL visibility reduction for one cluster
    CslRatio {
        /// amu
        #[arg(long)]
        mass: Option<f64>,
        /// Hz
        #[arg(long)]
        lambda0: Option<f64>,
        /// Also evaluate the time-domain quadrature with this many steps
        #[arg(long)]
        oracle_steps: Option<usize>,
    },
    #[command(hide = true)]
    SpecfunEval {
        #[arg(long, value_enum)]
        function: SpecialFunction,
        #[arg(long, default_value_t = 0)]
        order: usize,
        #[arg(long, allow_hyphen_values = true)]
        re: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        im: f64,
    },
    /// Re-run the job recorded in a manifest
    Replay { manifest: PathBuf },
}

/// Parses `"0.85"` or `"85%"`.
pub fn parse_visibility(s: &str) -> Result<f64> {
    let bad = |e: std::num::ParseFloatError| CliError::usage(format!("visibility '{s}': {e}"));
    match s.trim().strip_suffix('%') {
        Some(p) => Ok(units::percent_to_fraction(p.trim().parse().map_err(bad)?)),
        None => s.trim().parse().map_err(bad),
    }
}

fn parse_markers(s: &str) -> Result<Vec<f64>> {
    if s.trim().eq_ignore_ascii_case("none") || s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| CliError::usage(format!("marker '{p}': {e}")))
        })
        .collect()
}

fn load_config(cli: &Cli, species_file: Option<&Path>) -> Result<Setup> {
    let mut cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(path) = species_file {
        cfg = cfg.with_species_file(path)?;
    }
    cfg.resolve()
}

fn with_mass(setup: &Setup, mass_amu: Option<f64>) -> Result<otima_core::ClusterSpecies> {
    match mass_amu {
        Some(m) => Ok(setup.species.with_mass(units::amu_to_kg(m))?),
        None => Ok(setup.species.clone()),
    }
}

/// Resolves arguments and config into a job. `None` for `replay`.
pub fn resolve(cli: &Cli) -> Result<Option<Job>> {
    let job = match &cli.command {
        Command::Fig1 {
            lambda0_range,
            markers,
            threshold,
        } => {
            let s = load_config(cli, None)?;
            Job::Fig1 {
                grating: s.grating,
                csl: s.csl,
                threshold: threshold.unwrap_or(s.threshold),
                lambda0_grid: lambda0_range.points(Spacing::Log10)?,
                markers: parse_markers(markers)?,
                format: cli.format.unwrap_or(Format::Csv),
            }
        }
        Command::Fig2 {
            species,
            mass_range,
            visibility,
        } => {
            let s = load_config(cli, species.as_deref())?;
            Job::Fig2 {
                species: s.species,
                grating: s.grating,
                visibility: parse_visibility(visibility)?,
                masses: mass_range
                    .points(Spacing::Log10)?
                    .into_iter()
                    .map(units::amu_to_kg)
                    .collect(),
                format: cli.format.unwrap_or(Format::Csv),
            }
        }
        Command::Fig3 {
            species,
            masses,
            p_range,
            t_range,
        } => {
            let s = load_config(cli, species.as_deref())?;
            if masses.is_empty() || masses.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
                return Err(CliError::usage("fig3 needs positive masses"));
            }
            Job::Fig3 {
                species: s.species,
                grating: s.grating,
                environment: s.environment,
                model: s.model,
                masses: masses.iter().map(|&m| units::amu_to_kg(m)).collect(),
                pressures: p_range
                    .points(Spacing::Log10)?
                    .into_iter()
                    .map(units::mbar_to_pa)
                    .collect(),
                temperatures: t_range.points(Spacing::Linear)?,
                format: cli.format.unwrap_or(Format::Csv),
            }
        }
        Command::Budget {
            mass,
            lambda0,
            pressure,
            temperature,
        } => {
            let s = load_config(cli, None)?;
            let mut env = s.environment;
            if let Some(p) = pressure {
                env.gas_pressure = units::mbar_to_pa(*p);
            }
            if let Some(t) = temperature {
                env = env.at(env.gas_pressure, *t)?;
            }
            Job::Budget {
                species: with_mass(&s, *mass)?,
                grating: s.grating,
                csl: match lambda0 {
                    Some(l) => s.csl.with_lambda0(*l)?,
                    None => s.csl,
                },
                environment: env.validated()?,
                model: s.model,
                format: cli.format.unwrap_or(Format::Json),
            }
        }
        Command::Observables {
            mass,
            flux,
            visibility,
        } => {
            let s = load_config(cli, None)?;
            let grating = match flux {
                Some(f) => s.grating.with_flux(*f)?,
                None => s.grating.clone(),
            };
            Job::Observables {
                species: with_mass(&s, *mass)?,
                grating,
                target_visibility: visibility.as_deref().map(parse_visibility).transpose()?,
                format: cli.format.unwrap_or(Format::Json),
            }
        }
        Command::Absorption { mass, flux, terms } => {
            let s = load_config(cli, None)?;
            let grating = match flux {
                Some(f) => s.grating.with_flux(*f)?,
                None => s.grating.clone(),
            };
            Job::Absorption {
                species: with_mass(&s, *mass)?,
                grating,
                terms: *terms,
                format: cli
                    .format
                    .unwrap_or(if *terms { Format::Csv } else { Format::Json }),
            }
        }
        Command::CslRatio {
            mass,
            lambda0,
            oracle_steps,
        } => {
            let s = load_config(cli, None)?;
            Job::CslRatio {
                species: with_mass(&s, *mass)?,
                grating: s.grating,
                csl: match lambda0 {
                    Some(l) => s.csl.with_lambda0(*l)?,
                    None => s.csl,
                },
                oracle_steps: *oracle_steps,
                format: cli.format.unwrap_or(Format::Json),
            }
        }
        Command::SpecfunEval {
            function,
            order,
            re,
            im,
        } => Job::SpecfunEval {
            function: *function,
            order: *order,
            re: *re,
            im: *im,
            format: cli.format.unwrap_or(Format::Json),
        },
        Command::Replay { .. } => return Ok(None),
    };
    Ok(Some(job))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path.display(), e))
}

/// Name of the primary file inside a fig3 output directory.
pub fn primary_file_name(format: Format) -> &'static str {
    match format {
        Format::Csv => "contours.csv",
        Format::Json => "contours.json",
    }
}

fn job_format(job: &Job) -> Format {
    match job {
        Job::Fig1 { format, .. }
        | Job::Fig2 { format, .. }
        | Job::Fig3 { format, .. }
        | Job::Budget { format, .. }
        | Job::Observables { format, .. }
        | Job::Absorption { format, .. }
        | Job::CslRatio { format, .. }
        | Job::SpecfunEval { format, .. } => *format,
    }
}

/// Writes the output and its manifest. Data goes to `out` or stdout; the
/// manifest goes next to the data, or to stderr when the data is on stdout.
fn emit(job: &Job, output: &Output, manifest: &Manifest, out: Option<&Path>) -> Result<()> {
    match out {
        Some(dir) if job.writes_directory() => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
            write_file(
                &dir.join(primary_file_name(job_format(job))),
                &output.primary,
            )?;
            for (name, contents) in &output.extra {
                write_file(&dir.join(name), contents)?;
            }
            write_file(&dir.join("manifest.json"), &manifest.to_json())?;
        }
        Some(path) => {
            write_file(path, &output.primary)?;
            let mut m = path.as_os_str().to_owned();
            m.push(".manifest.json");
            write_file(Path::new(&m), &manifest.to_json())?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.primary.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("stdout", e))?;
            eprint!("{}", manifest.to_json());
        }
    }
    Ok(())
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
        }
    };
    let argv: Vec<String> = argv
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match run_cli(&cli, argv) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_cli(cli: &Cli, argv: Vec<String>) -> Result<()> {
    if cli.jobs == 0 {
        return Err(CliError::usage("--jobs must be at least 1"));
    }
    let job = match resolve(cli)? {
        Some(job) => job,
        None => {
            let Command::Replay { manifest } = &cli.command else {
                unreachable!("only replay resolves to no job")
            };
            Manifest::load(manifest)?.job
        }
    };
    let output = job.execute(cli.jobs)?;
    let manifest = Manifest::new(job.clone(), argv);
    emit(&job, &output, &manifest, cli.out.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visibility_percent() {
        assert_eq!(parse_visibility("85%").unwrap(), 0.85);
        assert_eq!(parse_visibility("0.85").unwrap(), 0.85);
        assert!(parse_visibility("x").is_err());
    }

    #[test]
    fn markers() {
        assert_eq!(parse_markers("none").unwrap(), Vec::<f64>::new());
        assert_eq!(parse_markers("1e-10, 1e-16").unwrap(), vec![1e-10, 1e-16]);
        assert!(parse_markers("1e-10,x").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
