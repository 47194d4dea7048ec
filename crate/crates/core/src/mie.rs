//! Photon absorption of a dielectric sphere in a standing light wave.
//!
//! A cluster at transverse position `x` in the standing wave absorbs on
//! average `n(x) = n0 + n1 cos(2πx/d)` photons per pulse. Both coefficients
//! are partial-wave sums over electric and magnetic multipoles:
//!
//! ```text
//! n0 = 4F/(hν) Σ_ℓ (2ℓ+1)π/(k²ρ) (σ_ℓ^E − σ_ℓ^H)
//! n1 = 4F/(hν) Σ_ℓ (2ℓ+1)π/(k²ρ) (−1)^(ℓ−1) (σ_ℓ^E + σ_ℓ^H)
//! ```
//!
//! with `ρ = k R`. The `σ_ℓ` use `j_ℓ(√ε ρ)` inside the sphere and
//! `h_ℓ^(1)(ρ)` outside. With this sign convention `σ_ℓ^H ≤ 0` for
//! absorbing media, so every term of the `n0` series is non-negative.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ClusterSpecies, GratingConfig};
use crate::specfun::{spherical_bessel_j_seq, spherical_hankel_h1_seq};

/// Hard cap on the partial-wave order.
pub const ELL_HARD_CAP: usize = 200;
/// Terms below this fraction of the dipole term count as converged.
pub const TERM_TOLERANCE: f64 = 1e-12;
/// Consecutive sub-tolerance terms required before stopping.
pub const TAIL_TERMS: usize = 5;
/// Denominators below this magnitude are treated as resonances.
pub const DENOMINATOR_FLOOR: f64 = 1e-30;

/// Per-order multipole components for one `(ρ, ε)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultipoleTerms {
    pub rho: f64,
    /// `sigma_e[i]` belongs to order `ℓ = i + 1`.
    pub sigma_e: Vec<f64>,
    pub sigma_h: Vec<f64>,
}

impl MultipoleTerms {
    pub fn truncation_order(&self) -> usize {
        self.sigma_e.len()
    }

    /// Contribution of order `ℓ` to the mean series, in units of 4F/(hν k²).
    pub fn mean_term(&self, ell: usize) -> f64 {
        let w = weight(ell, self.rho);
        w * (self.sigma_e[ell - 1] - self.sigma_h[ell - 1])
    }

    /// Contribution of order `ℓ` to the modulation series, same units.
    pub fn modulation_term(&self, ell: usize) -> f64 {
        let w = weight(ell, self.rho);
        let sign = if ell % 2 == 1 { 1.0 } else { -1.0 };
        w * sign * (self.sigma_e[ell - 1] + self.sigma_h[ell - 1])
    }

    /// Dimensionless sums `(Σ mean, Σ modulation)`, ascending in `ℓ`.
    pub fn sums(&self) -> (f64, f64) {
        let order = self.truncation_order();
        let mean = (1..=order).map(|l| self.mean_term(l)).sum();
        let modulation = (1..=order).map(|l| self.modulation_term(l)).sum();
        (mean, modulation)
    }
}

fn weight(ell: usize, rho: f64) -> f64 {
    (2 * ell + 1) as f64 * PI / rho
}

/// Mean and modulation of the absorbed photon number per pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionProfile {
    pub n0: f64,
    pub n1: f64,
    /// Laser flux the profile was evaluated at, J/m².
    pub flux: f64,
    pub truncation_order: usize,
    pub converged: bool,
}

impl AbsorptionProfile {
    /// Absorbed photons at transverse position `x` for grating period `d`.
    pub fn photons_at(&self, x: f64, period: f64) -> f64 {
        self.n0 + self.n1 * (2.0 * PI * x / period).cos()
    }

    /// Same profile at a different flux (both coefficients are linear in F).
    pub fn rescaled(&self, flux: f64) -> Self {
        let factor = if self.flux == 0.0 {
            0.0
        } else {
            flux / self.flux
        };
        Self {
            n0: self.n0 * factor,
            n1: self.n1 * factor,
            flux,
            ..self.clone()
        }
    }
}

struct Bessels {
    sqrt_eps: Complex64,
    j: Vec<Complex64>,
    h: Vec<Complex64>,
}

impl Bessels {
    fn new(lmax: usize, rho: f64, eps: Complex64) -> Result<Self> {
        let sqrt_eps = principal_sqrt(eps);
        // one extra order for the ℓ+1 terms of σ^H
        let j = spherical_bessel_j_seq(lmax + 1, sqrt_eps * rho)?;
        let h = spherical_hankel_h1_seq(lmax + 1, rho)?;
        Ok(Self { sqrt_eps, j, h })
    }

    fn components(&self, ell: usize, rho: f64, eps: Complex64) -> Result<(f64, f64)> {
        let s = self.sqrt_eps;
        let (jm, jl, jp) = (self.j[ell - 1], self.j[ell], self.j[ell + 1]);
        let (hm, hl, hp) = (self.h[ell - 1], self.h[ell], self.h[ell + 1]);
        let l = ell as f64;

        let num_e = (eps * jl * (s * rho * jm - l * jl).conj()).im;
        let den_e = l * (eps - 1.0) * jl * hl + s * rho * (jm * hl - s * jl * hm);
        let num_h = (s * jl.conj() * jm).im;
        let den_h = jl * hp - s * jp * hl;

        for d in [den_e, den_h] {
            let magnitude = d.norm();
            if magnitude < DENOMINATOR_FLOOR {
                return Err(Error::DegenerateDenominator { ell, magnitude });
            }
        }
        let sigma_e = num_e / den_e.norm_sqr();
        let sigma_h = num_h / (rho * den_h.norm_sqr());
        if !(sigma_e.is_finite() && sigma_h.is_finite()) {
            return Err(Error::AccuracyLoss {
                routine: "multipole_components",
                detail: format!("non-finite component at ell = {ell}, rho = {rho}"),
            });
        }
        Ok((sigma_e, sigma_h))
    }
}

/// √ε on the branch with non-negative imaginary part.
pub fn principal_sqrt(eps: Complex64) -> Complex64 {
    let s = eps.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

fn validate(rho: f64, eps: Complex64) -> Result<()> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Domain(format!(
            "scaled radius must be > 0, got {rho}"
        )));
    }
    if !(eps.re.is_finite() && eps.im.is_finite()) || eps.im < 0.0 {
        return Err(Error::Domain(format!(
            "permittivity must be finite with Im >= 0, got {eps}"
        )));
    }
    Ok(())
}

/// `(σ_ℓ^E, σ_ℓ^H)` for a single order `ℓ ≥ 1`.
pub fn multipole_components(ell: usize, rho: f64, eps: Complex64) -> Result<(f64, f64)> {
    if ell == 0 {
        return Err(Error::Domain("multipole order starts at 1".into()));
    }
    validate(rho, eps)?;
    Bessels::new(ell, rho, eps)?.components(ell, rho, eps)
}

/// Wiscombe-style starting estimate for the number of partial waves.
pub fn wiscombe_order(rho: f64) -> usize {
    (rho + 4.0 * rho.cbrt() + 2.0).ceil() as usize
}

/// Order beyond which a non-converged series is reported as an error.
pub fn max_order(rho: f64) -> usize {
    let heuristic = (rho + 4.0 * rho.cbrt() + 10.0).ceil() as usize;
    heuristic.clamp(50, ELL_HARD_CAP)
}

/// Multipole components up to an adaptively chosen truncation order.
///
/// Stops once at least the Wiscombe number of orders has been summed and
/// the last [`TAIL_TERMS`] terms of both series are each below
/// [`TERM_TOLERANCE`] relative to the dipole term.
pub fn multipole_terms(rho: f64, eps: Complex64) -> Result<MultipoleTerms> {
    validate(rho, eps)?;
    let cap = max_order(rho);
    let min_order = wiscombe_order(rho).min(cap);
    let bessels = Bessels::new(cap, rho, eps)?;

    let mut terms = MultipoleTerms {
        rho,
        sigma_e: Vec::new(),
        sigma_h: Vec::new(),
    };
    let mut quiet = 0usize;
    let (mut ref_mean, mut ref_mod) = (0.0f64, 0.0f64);
    for ell in 1..=cap {
        let (se, sh) = bessels.components(ell, rho, eps)?;
        terms.sigma_e.push(se);
        terms.sigma_h.push(sh);
        let (tm, t1) = (terms.mean_term(ell), terms.modulation_term(ell));
        if ell == 1 {
            ref_mean = tm.abs();
            ref_mod = t1.abs();
        }
        let small = |t: f64, reference: f64| t.abs() <= TERM_TOLERANCE * reference;
        if ell > 1 && small(tm, ref_mean) && small(t1, ref_mod.max(ref_mean)) {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if ell >= min_order && quiet >= TAIL_TERMS {
            return Ok(terms);
        }
        // A lossless sphere gives identically zero terms; nothing to converge.
        if ell >= min_order && ref_mean == 0.0 && ref_mod == 0.0 && quiet >= TAIL_TERMS - 1 {
            return Ok(terms);
        }
    }
    Err(Error::NonConvergence {
        max_order: cap,
        rho,
    })
}

/// Standing-wave absorption coefficients for a species in a grating pulse.
pub fn absorption_profile(
    species: &ClusterSpecies,
    grating: &GratingConfig,
) -> Result<AbsorptionProfile> {
    let radius = species.radius();
    let period = grating.period();
    if radius >= period {
        return Err(Error::Geometry { radius, period });
    }
    let k = grating.wavenumber();
    let rho = k * radius;
    let terms = multipole_terms(rho, species.permittivity)?;
    let (mean, modulation) = terms.sums();
    let prefactor = 4.0 * grating.laser_flux / (grating.photon_energy() * k * k);
    Ok(AbsorptionProfile {
        n0: prefactor * mean,
        n1: prefactor * modulation,
        flux: grating.laser_flux,
        truncation_order: terms.truncation_order(),
        converged: true,
    })
}

/// Dipole-limit absorption cross section `4π k R³ Im[(ε−1)/(ε+2)]`, m².
pub fn point_particle_cross_section(radius: f64, wavelength: f64, eps: Complex64) -> f64 {
    let k = 2.0 * PI / wavelength;
    let clausius_mossotti = (eps - 1.0) / (eps + 2.0);
    4.0 * PI * k * radius.powi(3) * clausius_mossotti.im
}

/// Point-particle profile `n0 = n1 = 2 F σ_abs / (h ν)`.
pub fn point_particle_profile(
    species: &ClusterSpecies,
    grating: &GratingConfig,
) -> AbsorptionProfile {
    let sigma = point_particle_cross_section(
        species.radius(),
        grating.laser_wavelength,
        species.permittivity,
    );
    let n = 2.0 * grating.laser_flux * sigma / grating.photon_energy();
    AbsorptionProfile {
        n0: n,
        n1: n,
        flux: grating.laser_flux,
        truncation_order: 1,
        converged: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ATOMIC_MASS_UNIT;
    use approx::assert_relative_eq;

    const GOLD: Complex64 = Complex64::new(0.9, 3.2);

    fn dipole_mean(rho: f64, eps: Complex64) -> f64 {
        // n0 / (4F/(hν k²)) in the dipole limit: 2 σ_abs k² / 4
        let cm = (eps - 1.0) / (eps + 2.0);
        2.0 * 4.0 * PI * rho.powi(3) * cm.im / 4.0
    }

    #[test]
    fn lossless_sphere_absorbs_nothing() {
        let terms = multipole_terms(0.5, Complex64::new(2.25, 0.0)).unwrap();
        let (mean, modulation) = terms.sums();
        assert_eq!(mean, 0.0);
        assert_eq!(modulation, 0.0);
    }

    #[test]
    fn dipole_limit() {
        let terms = multipole_terms(0.01, GOLD).unwrap();
        let (mean, modulation) = terms.sums();
        let oracle = dipole_mean(0.01, GOLD);
        assert_relative_eq!(mean, oracle, max_relative = 1e-2);
        assert_relative_eq!(modulation, mean, max_relative = 1e-3);
    }

    #[test]
    fn quadrupole_suppressed_for_small_spheres() {
        let rho = 0.05;
        let (e1, _) = multipole_components(1, rho, GOLD).unwrap();
        let (e2, _) = multipole_components(2, rho, GOLD).unwrap();
        assert!((e2 / e1).abs() < 10.0 * rho * rho, "ratio {}", e2 / e1);
    }

    #[test]
    fn magnetic_components_are_non_positive() {
        for &rho in &[0.01, 0.1, 0.64, 2.0] {
            let terms = multipole_terms(rho, GOLD).unwrap();
            for ell in 1..=terms.truncation_order() {
                assert!(terms.sigma_h[ell - 1] <= 0.0);
                assert!(terms.mean_term(ell) >= 0.0);
            }
        }
    }

    #[test]
    fn single_order_matches_sequence() {
        let terms = multipole_terms(0.64, GOLD).unwrap();
        for ell in 1..=4 {
            let (e, h) = multipole_components(ell, 0.64, GOLD).unwrap();
            assert_relative_eq!(e, terms.sigma_e[ell - 1], max_relative = 1e-12);
            assert_relative_eq!(h, terms.sigma_h[ell - 1], max_relative = 1e-12);
        }
    }

    #[test]
    fn au1000_is_point_like() {
        let species = ClusterSpecies::gold(1.9697e5 * ATOMIC_MASS_UNIT).unwrap();
        let p = absorption_profile(&species, &GratingConfig::otima_default()).unwrap();
        assert!((p.n1 / p.n0 - 1.0).abs() < 0.02);
        assert!(p.converged);
    }

    #[test]
    fn geometry_guard() {
        let grating = GratingConfig::otima_default();
        // radius larger than 78.5 nm
        let species = ClusterSpecies::gold(1e-16).unwrap();
        assert!(species.radius() > grating.period());
        assert!(matches!(
            absorption_profile(&species, &grating),
            Err(Error::Geometry { .. })
        ));
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(multipole_components(0, 0.1, GOLD).is_err());
        assert!(multipole_components(1, 0.0, GOLD).is_err());
        assert!(multipole_components(1, 0.1, Complex64::new(1.0, -0.1)).is_err());
    }

    #[test]
    fn truncation_grows_with_size() {
        let small = multipole_terms(0.05, GOLD).unwrap().truncation_order();
        let large = multipole_terms(5.0, GOLD).unwrap().truncation_order();
        assert!(large > small);
        assert!(large >= wiscombe_order(5.0));
        assert!(large <= max_order(5.0));
    }

    #[test]
    fn partial_sums_settle() {
        for &rho in &[0.02, 0.3, 0.9, 3.0] {
            let terms = multipole_terms(rho, GOLD).unwrap();
            let order = terms.truncation_order();
            let partial = |upto: usize| (1..=upto).map(|l| terms.mean_term(l)).sum::<f64>();
            let full = partial(order);
            let earlier = partial(order - TAIL_TERMS);
            assert!(((full - earlier) / full).abs() < 1e-10);
        }
    }

    #[test]
    fn modulation_ratio_decreases_with_size() {
        let mut last = f64::INFINITY;
        for i in 0..=40 {
            let rho = 0.01 + (1.0 - 0.01) * i as f64 / 40.0;
            let (mean, modulation) = multipole_terms(rho, GOLD).unwrap().sums();
            let ratio = modulation / mean;
            assert!(ratio < last, "rho {rho}: {ratio} >= {last}");
            assert!(mean >= modulation.abs());
            last = ratio;
        }
    }

    proptest::proptest! {
        #[test]
        fn linear_in_flux(mass_amu in 1e4f64..1e8, flux in 1e-3f64..1e2) {
            let species = ClusterSpecies::gold(mass_amu * ATOMIC_MASS_UNIT).unwrap();
            let g1 = GratingConfig::otima_default().with_flux(flux).unwrap();
            let g2 = g1.with_flux(2.0 * flux).unwrap();
            let a = absorption_profile(&species, &g1).unwrap();
            let b = absorption_profile(&species, &g2).unwrap();
            proptest::prop_assert!(((b.n0 - 2.0 * a.n0) / b.n0).abs() < 1e-14);
            proptest::prop_assert!(((b.n1 - 2.0 * a.n1) / b.n1).abs() < 1e-14);
            proptest::prop_assert!(a.n0 >= a.n1.abs());
        }

        #[test]
        fn mean_series_positive_for_absorbers(rho in 0.005f64..4.0, re in -5.0f64..10.0, im in 0.01f64..10.0) {
            let terms = multipole_terms(rho, Complex64::new(re, im)).unwrap();
            for ell in 1..=terms.truncation_order() {
                proptest::prop_assert!(terms.mean_term(ell) >= 0.0);
            }
            let (mean, modulation) = terms.sums();
            proptest::prop_assert!(mean > 0.0);
            proptest::prop_assert!(mean >= modulation.abs());
        }
    }
}
