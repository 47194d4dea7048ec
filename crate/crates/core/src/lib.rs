//! Feasibility model for testing continuous spontaneous localization (CSL)
//! with an optical time-domain ionizing matter-wave (OTIMA) interferometer.
//!
//! The crate covers the collapse-induced visibility loss and the resulting
//! critical masses, the finite-size (Mie) interaction of clusters with
//! standing-wave ionization gratings, the interferometer visibility and
//! transmissivity, and the environmental decoherence budget.
//!
//! All quantities are SI internally. See [`constants::units`] for the
//! conversions used by front ends.

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod contour;
pub mod csl;
pub mod decoherence;
pub mod error;
pub mod interferometer;
pub mod mie;
pub mod params;
pub mod roots;
pub mod specfun;

pub use error::{Error, Result};
pub use params::{ClusterSpecies, CslParams, GratingConfig};
