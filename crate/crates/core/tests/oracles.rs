//! Independent oracles for the Mie absorption sums and erf.

use num_complex::Complex64;
use otima_core::constants::ATOMIC_MASS_UNIT;
use otima_core::mie::absorption_profile;
use otima_core::specfun::erf;
use otima_core::{ClusterSpecies, GratingConfig};
use proptest::prelude::*;

/// Running-wave absorption efficiency of a sphere, classic Bohren–Huffman
/// recursion: logarithmic derivative downward, Riccati–Bessel upward.
#[allow(clippy::needless_range_loop)]
fn bh_absorption_efficiency(x: f64, m: Complex64) -> f64 {
    let y = m * x;
    let nstop = (x + 4.0 * x.cbrt() + 2.0).ceil() as usize + 10;
    let nmx = nstop.max(y.norm().ceil() as usize) + 15;
    let mut d = vec![Complex64::new(0.0, 0.0); nmx + 1];
    for n in (1..=nmx).rev() {
        let r = n as f64 / y;
        d[n - 1] = r - 1.0 / (d[n] + r);
    }
    let (mut psi0, mut psi1) = (x.cos(), x.sin());
    let (mut chi0, mut chi1) = (-x.sin(), x.cos());
    let mut xi1 = Complex64::new(psi1, -chi1);
    let (mut qext, mut qsca) = (0.0, 0.0);
    for n in 1..=nstop {
        let nf = n as f64;
        let psi = (2.0 * nf - 1.0) * psi1 / x - psi0;
        let chi = (2.0 * nf - 1.0) * chi1 / x - chi0;
        let xi = Complex64::new(psi, -chi);
        let da = d[n] / m + nf / x;
        let db = d[n] * m + nf / x;
        let an = (da * psi - psi1) / (da * xi - xi1);
        let bn = (db * psi - psi1) / (db * xi - xi1);
        qext += (2.0 * nf + 1.0) * (an + bn).re;
        qsca += (2.0 * nf + 1.0) * (an.norm_sqr() + bn.norm_sqr());
        psi0 = psi1;
        psi1 = psi;
        chi0 = chi1;
        chi1 = chi;
        xi1 = Complex64::new(psi1, -chi1);
    }
    2.0 / (x * x) * (qext - qsca)
}

#[test]
fn mean_absorption_is_twice_running_wave() {
    let grating = GratingConfig::otima_default();
    let k = grating.wavenumber();
    for &amu in &[1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 3e8] {
        let species = ClusterSpecies::gold(amu * ATOMIC_MASS_UNIT).unwrap();
        let r = species.radius();
        let m = species.permittivity.sqrt();
        let sigma = bh_absorption_efficiency(k * r, m) * std::f64::consts::PI * r * r;
        let expected = 2.0 * grating.laser_flux * sigma / grating.photon_energy();
        let got = absorption_profile(&species, &grating).unwrap().n0;
        assert!(
            ((got - expected) / expected).abs() < 1e-8,
            "{amu} amu: {got} vs {expected}"
        );
    }
}

fn erf_quadrature(x: f64) -> f64 {
    let f = |t: f64| 2.0 / std::f64::consts::PI.sqrt() * (-t * t).exp();
    quadrature::double_exponential::integrate(f, 0.0, x, 1e-14).integral
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn erf_matches_quadrature(x in -6.0f64..6.0) {
        prop_assert!((erf(x) - erf_quadrature(x)).abs() < 1e-10);
    }
}
