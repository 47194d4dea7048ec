//! Special functions consumed by the grating and collapse models.
//!
//! * spherical Bessel `j_ℓ(z)` for complex `z` (Miller downward recurrence,
//!   normalized against the closed forms of `j_0` or `j_1`),
//! * spherical Bessel `y_ℓ(x)` and Hankel `h_ℓ^(1)(x)` for real `x > 0`,
//! * modified Bessel `I_0, I_1, I_2` for real `x ≥ 0`, plain and
//!   exponentially scaled,
//! * `erf`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest order accepted by the spherical Bessel routines.
pub const ELL_MAX_SUPPORTED: usize = 1000;

/// |Im z| beyond which sin z / cos z overflow.
const IMAG_OVERFLOW_GUARD: f64 = 700.0;

/// Magnitude at which the downward recurrence is renormalized.
const RESCALE_THRESHOLD: f64 = 1e100;

/// Crossover from the ascending series to the asymptotic expansion of I_n.
const BESSEL_I_SERIES_LIMIT: f64 = 15.0;

fn check_complex_arg(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain(format!("non-finite argument {z}")));
    }
    if z.im.abs() > IMAG_OVERFLOW_GUARD {
        return Err(Error::domain(format!(
            "|Im z| = {} exceeds the overflow guard {IMAG_OVERFLOW_GUARD}",
            z.im.abs()
        )));
    }
    Ok(())
}

/// `a / b` without forming `|b|²`, which over- or underflows for large
/// or tiny `b`.
fn safe_div(a: Complex64, b: Complex64) -> Complex64 {
    let m = b.norm();
    (a * (b.conj() / m)) / m
}

/// `j_0(z), …, j_lmax(z)` for complex `z`.
pub fn spherical_bessel_j_seq(lmax: usize, z: Complex64) -> Result<Vec<Complex64>> {
    if lmax > ELL_MAX_SUPPORTED {
        return Err(Error::domain(format!(
            "order {lmax} exceeds the supported maximum {ELL_MAX_SUPPORTED}"
        )));
    }
    check_complex_arg(z)?;

    let mut out = vec![Complex64::new(0.0, 0.0); lmax + 1];
    if z.re == 0.0 && z.im == 0.0 {
        out[0] = Complex64::new(1.0, 0.0);
        return Ok(out);
    }

    let modulus = z.norm();
    // Start far enough above both lmax and |z| that the minimal solution
    // dominates; starting only above lmax fails for low orders at large |z|.
    let start = lmax.max(modulus.ceil() as usize) + 20usize.max((1.5 * modulus).ceil() as usize);

    // f_{l+1}, f_l
    let inv_z = safe_div(Complex64::new(1.0, 0.0), z);
    let mut upper = Complex64::new(0.0, 0.0);
    let mut current = Complex64::new(1e-30, 0.0);
    for l in (1..=start).rev() {
        let lower = inv_z * ((2 * l + 1) as f64) * current - upper;
        upper = current;
        current = lower;
        if l - 1 <= lmax {
            out[l - 1] = current;
        }
        if current.norm() > RESCALE_THRESHOLD {
            let s = 1.0 / current.norm();
            upper *= s;
            current *= s;
            for v in out.iter_mut().skip(l.saturating_sub(1)) {
                *v *= s;
            }
        }
    }
    // after the loop `upper` holds f_1 and `current` holds f_0
    let (f0, f1) = (current, upper);

    let (sin, cos) = (z.sin(), z.cos());
    let j0 = sin / z;
    let j1 = sin / (z * z) - cos / z;

    let use_j0 = j0.norm() >= j1.norm();
    let scale = if use_j0 {
        safe_div(j0, f0)
    } else {
        safe_div(j1, f1)
    };
    if !(scale.re.is_finite() && scale.im.is_finite()) {
        return Err(Error::AccuracyLoss {
            routine: "spherical_bessel_j",
            detail: format!("normalization failed at z = {z}"),
        });
    }

    // Closed-form j1 cancels badly for small |z|; only cross-check above 0.5.
    if modulus >= 0.5 {
        let (rec, exact) = if use_j0 {
            (f1 * scale, j1)
        } else {
            (f0 * scale, j0)
        };
        let reference = j0.norm().max(j1.norm());
        if (rec - exact).norm() > 1e-8 * reference {
            return Err(Error::AccuracyLoss {
                routine: "spherical_bessel_j",
                detail: format!("normalization cross-check failed at z = {z}"),
            });
        }
    }

    for v in out.iter_mut() {
        *v *= scale;
    }
    Ok(out)
}

/// `j_ℓ(z)` for complex `z`.
pub fn spherical_bessel_j(ell: usize, z: Complex64) -> Result<Complex64> {
    Ok(spherical_bessel_j_seq(ell, z)?[ell])
}

/// `j_ℓ(x)` for real `x`, evaluated through the complex routine.
pub fn spherical_bessel_j_real(ell: usize, x: f64) -> Result<f64> {
    Ok(spherical_bessel_j(ell, Complex64::new(x, 0.0))?.re)
}

fn check_positive_real(x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(format!(
            "argument must be finite and > 0, got {x}"
        )));
    }
    Ok(())
}

/// `y_0(x), …, y_lmax(x)` by upward recurrence. Large orders at small `x`
/// overflow to `-inf`, which is the correct limit.
pub fn spherical_bessel_y_seq(lmax: usize, x: f64) -> Result<Vec<f64>> {
    check_positive_real(x)?;
    if lmax > ELL_MAX_SUPPORTED {
        return Err(Error::domain(format!(
            "order {lmax} exceeds the supported maximum {ELL_MAX_SUPPORTED}"
        )));
    }
    let (s, c) = x.sin_cos();
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(-c / x);
    if lmax >= 1 {
        out.push(-c / (x * x) - s / x);
    }
    for l in 1..lmax {
        let next = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
        out.push(next);
    }
    Ok(out)
}

pub fn spherical_bessel_y(ell: usize, x: f64) -> Result<f64> {
    Ok(spherical_bessel_y_seq(ell, x)?[ell])
}

/// `h_0^(1)(x), …, h_lmax^(1)(x)` for real `x > 0`.
pub fn spherical_hankel_h1_seq(lmax: usize, x: f64) -> Result<Vec<Complex64>> {
    check_positive_real(x)?;
    let j = spherical_bessel_j_seq(lmax, Complex64::new(x, 0.0))?;
    let y = spherical_bessel_y_seq(lmax, x)?;
    Ok(j.iter()
        .zip(&y)
        .map(|(j, &y)| Complex64::new(j.re, y))
        .collect())
}

pub fn spherical_hankel_h1(ell: usize, x: f64) -> Result<Complex64> {
    Ok(spherical_hankel_h1_seq(ell, x)?[ell])
}

/// Orders of the modified Bessel function supported here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    One,
    Two,
}

impl BesselOrder {
    pub fn as_usize(self) -> usize {
        match self {
            BesselOrder::Zero => 0,
            BesselOrder::One => 1,
            BesselOrder::Two => 2,
        }
    }

    pub fn from_usize(n: usize) -> Result<Self> {
        match n {
            0 => Ok(BesselOrder::Zero),
            1 => Ok(BesselOrder::One),
            2 => Ok(BesselOrder::Two),
            _ => Err(Error::domain(format!(
                "modified Bessel order {n} not supported"
            ))),
        }
    }
}

fn check_nonneg(x: f64) -> Result<()> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::domain(format!(
            "argument must be finite and >= 0, got {x}"
        )));
    }
    Ok(())
}

fn bessel_i_series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut lead = 1.0;
    for k in 1..=n {
        lead *= half / k as f64;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    lead * sum
}

fn bessel_i_scaled_asymptotic(n: usize, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let mut term: f64 = 1.0;
    let mut sum: f64 = 1.0;
    let mut k = 1usize;
    loop {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= term.abs() || next.abs() < 1e-17 * sum.abs() {
            if next.abs() < term.abs() {
                sum += next;
            }
            break;
        }
        sum += next;
        term = next;
        k += 1;
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

/// `e^{-x} I_n(x)`, finite for every `x ≥ 0`.
pub fn bessel_i_scaled(order: BesselOrder, x: f64) -> Result<f64> {
    check_nonneg(x)?;
    let n = order.as_usize();
    if x < BESSEL_I_SERIES_LIMIT {
        Ok((-x).exp() * bessel_i_series(n, x))
    } else {
        Ok(bessel_i_scaled_asymptotic(n, x))
    }
}

/// `I_n(x)` for `0 ≤ x ≤ 700`.
pub fn bessel_i(order: BesselOrder, x: f64) -> Result<f64> {
    check_nonneg(x)?;
    if x > IMAG_OVERFLOW_GUARD {
        return Err(Error::domain(format!(
            "I_n({x}) overflows; use bessel_i_scaled"
        )));
    }
    let n = order.as_usize();
    if x < BESSEL_I_SERIES_LIMIT {
        Ok(bessel_i_series(n, x))
    } else {
        Ok(bessel_i_scaled_asymptotic(n, x) * x.exp())
    }
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Ascending series for j_ℓ, independent of the recurrence.
    fn j_series(ell: usize, z: Complex64) -> Complex64 {
        let mut lead = c(1.0, 0.0);
        for k in 0..ell {
            lead = lead * z / (2 * k + 3) as f64;
        }
        // lead = z^ℓ / (2ℓ+1)!!
        let q = -z * z / 2.0;
        let mut term = c(1.0, 0.0);
        let mut sum = c(1.0, 0.0);
        for k in 1..200 {
            term = term * q / (k as f64 * (2 * ell + 2 * k + 1) as f64);
            sum += term;
            if term.norm() < 1e-20 * sum.norm() {
                break;
            }
        }
        lead * sum
    }

    #[test]
    fn j0_closed_form() {
        let z = c(1.0, 1.0);
        let v = spherical_bessel_j(0, z).unwrap();
        let exact = z.sin() / z;
        assert_relative_eq!(v.re, exact.re, max_relative = 1e-12);
        assert_relative_eq!(v.im, exact.im, max_relative = 1e-12);
        assert!((v.re - 0.96671).abs() < 1e-5 && (v.im + 0.33175).abs() < 1e-5);
    }

    #[test]
    fn limiting_values_at_zero() {
        let seq = spherical_bessel_j_seq(5, c(0.0, 0.0)).unwrap();
        assert_eq!(seq[0], c(1.0, 0.0));
        for v in &seq[1..] {
            assert_eq!(*v, c(0.0, 0.0));
        }
    }

    #[test]
    fn j2_real_matches_series() {
        let v = spherical_bessel_j_real(2, 5.0).unwrap();
        let s = j_series(2, c(5.0, 0.0)).re;
        assert_relative_eq!(v, s, max_relative = 1e-10);
    }

    #[test]
    fn small_argument_leading_order() {
        // j_ℓ(z) → z^ℓ/(2ℓ+1)!!
        let z = c(1e-6, 2e-7);
        for ell in 0..8usize {
            let v = spherical_bessel_j(ell, z).unwrap();
            let mut lead = c(1.0, 0.0);
            for k in 0..ell {
                lead = lead * z / (2 * k + 3) as f64;
            }
            assert!((v - lead).norm() <= 1e-10 * lead.norm(), "ell {ell}");
        }
        // deep underflow is a clean zero, not NaN
        let v = spherical_bessel_j(200, c(1e-3, 0.0)).unwrap();
        assert!(v.re.is_finite() && v.im.is_finite());
    }

    #[test]
    fn complex_values_match_series() {
        for &z in &[
            c(0.3, 0.1),
            c(2.0, 1.5),
            c(1.76, 1.6),
            c(6.0, 4.0),
            c(0.9, 3.2),
        ] {
            let seq = spherical_bessel_j_seq(12, z).unwrap();
            for (ell, v) in seq.iter().enumerate() {
                let s = j_series(ell, z);
                assert!(
                    (v - s).norm() <= 1e-10 * s.norm(),
                    "z {z} ell {ell}: {v} vs {s}"
                );
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(spherical_bessel_j(1, c(f64::NAN, 0.0)).is_err());
        assert!(spherical_bessel_j(1, c(1.0, 1e4)).is_err());
        assert!(spherical_bessel_j(ELL_MAX_SUPPORTED + 1, c(1.0, 0.0)).is_err());
        assert!(spherical_hankel_h1(1, 0.0).is_err());
        assert!(spherical_hankel_h1(1, -1.0).is_err());
        assert!(bessel_i(BesselOrder::Zero, -1.0).is_err());
        assert!(BesselOrder::from_usize(3).is_err());
    }

    #[test]
    fn hankel_h0_closed_form() {
        let x = 1.0;
        let h = spherical_hankel_h1(0, x).unwrap();
        let exact = -Complex64::i() * Complex64::new(0.0, x).exp() / x;
        assert_relative_eq!(h.re, exact.re, max_relative = 1e-14);
        assert_relative_eq!(h.im, exact.im, max_relative = 1e-14);
    }

    #[test]
    fn y0_diverges_negative() {
        for &x in &[1e-2, 1e-4, 1e-6] {
            let y = spherical_hankel_h1(0, x).unwrap().im;
            assert!(y < 0.0);
            assert_relative_eq!(y, -x.cos() / x, max_relative = 1e-14);
        }
    }

    #[test]
    fn wronskian() {
        for &x in &[0.5, 2.0, 10.0] {
            let h = spherical_hankel_h1_seq(20, x).unwrap();
            for ell in 1..=20 {
                let w = h[ell].re * h[ell - 1].im - h[ell - 1].re * h[ell].im;
                assert_relative_eq!(w, 1.0 / (x * x), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn bessel_i_at_zero() {
        assert_eq!(bessel_i(BesselOrder::Zero, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(BesselOrder::One, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i(BesselOrder::Two, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn bessel_i1_at_two() {
        // Σ_k 1/(k!(k+1)!) at x = 2
        let mut oracle = 0.0;
        let mut fk = 1.0;
        for k in 0..30 {
            if k > 0 {
                fk *= k as f64;
            }
            oracle += 1.0 / (fk * fk * (k + 1) as f64);
        }
        let v = bessel_i(BesselOrder::One, 2.0).unwrap();
        assert_relative_eq!(v, oracle, max_relative = 1e-12);
        assert!((v - 1.590_636_854_6).abs() < 1e-10);
    }

    #[test]
    fn bessel_i_recurrence() {
        for &x in &[0.1, 1.0, 10.0, 20.0, 80.0] {
            let i0 = bessel_i_scaled(BesselOrder::Zero, x).unwrap();
            let i1 = bessel_i_scaled(BesselOrder::One, x).unwrap();
            let i2 = bessel_i_scaled(BesselOrder::Two, x).unwrap();
            assert_relative_eq!(i0 - i2, 2.0 * i1 / x, max_relative = 1e-11);
        }
    }

    #[test]
    fn bessel_i_continuous_across_crossover() {
        for order in [BesselOrder::Zero, BesselOrder::One, BesselOrder::Two] {
            let below = (-15.0f64).exp() * bessel_i_series(order.as_usize(), 15.0);
            let above = bessel_i_scaled_asymptotic(order.as_usize(), 15.0);
            assert_relative_eq!(below, above, max_relative = 1e-12);
        }
    }

    #[test]
    fn erf_basics() {
        assert_eq!(erf(0.0), 0.0);
        assert_eq!(erf(-0.7), -erf(0.7));
        // midpoint-rule quadrature of 2/√π e^{-t²}
        let n = 200_000;
        let h = 0.785 / n as f64;
        let q: f64 = (0..n)
            .map(|k| (-((k as f64 + 0.5) * h).powi(2)).exp())
            .sum::<f64>()
            * h
            * 2.0
            / std::f64::consts::PI.sqrt();
        assert!((erf(0.785) - q).abs() < 1e-10);
        assert!((erf(0.785) - 0.7330689).abs() < 1e-6);
        assert!((erf(6.0) - 1.0).abs() <= 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn bessel_i_monotone(x in 0.0f64..200.0, dx in 1e-3f64..5.0) {
            for order in [BesselOrder::Zero, BesselOrder::One, BesselOrder::Two] {
                let a = bessel_i_scaled(order, x).unwrap().ln() + x;
                let b = bessel_i_scaled(order, x + dx).unwrap().ln() + x + dx;
                proptest::prop_assert!(b > a || (order != BesselOrder::Zero && x == 0.0 && b.is_finite()));
            }
        }

        #[test]
        fn three_term_recurrence(r in 0.01f64..50.0, phase in 0.0f64..std::f64::consts::FRAC_PI_2) {
            let z = Complex64::from_polar(r, phase * 0.6);
            let seq = spherical_bessel_j_seq(40, z).unwrap();
            for ell in 1..39 {
                let lhs = seq[ell - 1] + seq[ell + 1];
                let rhs = seq[ell] * (2 * ell + 1) as f64 / z;
                let scale = lhs.norm().max(seq[ell - 1].norm()).max(seq[ell + 1].norm());
                if scale > 1e-280 {
                    proptest::prop_assert!((lhs - rhs).norm() <= 1e-10 * scale,
                        "z {} ell {}: {} vs {}", z, ell, lhs, rhs);
                }
            }
        }

        #[test]
        fn real_path_is_bit_identical(x in -50.0f64..50.0, ell in 0usize..30) {
            let a = spherical_bessel_j_real(ell, x).unwrap();
            let b = spherical_bessel_j(ell, Complex64::new(x, 0.0)).unwrap().re;
            proptest::prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
