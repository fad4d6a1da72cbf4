//! Complex exponential integral E₁(z).
//!
//! Two regimes: the alternating power series with the Euler–Mascheroni
//! logarithmic term for |z| ≤ 4, and the continued fraction
//! E₁(z) = e^{−z} / (z + 1/(1 + 1/(z + 2/(1 + 2/(z + …))))) evaluated by the
//! modified Lentz algorithm for |z| > 4. Target accuracy 1e-12 away from the
//! negative real axis (arguments here always have nonzero imaginary part or
//! positive real part).

use crate::error::{Error, Result};
use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// E₁(z) = ∫_z^∞ e^{−t}/t dt (principal branch).
pub fn e1(z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::Argument("E1 is singular at z = 0".into()));
    }
    if z.re <= 0.0 && z.im == 0.0 {
        return Err(Error::Argument(
            "E1 on the negative real axis (branch cut) is not supported".into(),
        ));
    }
    if z.norm() <= 4.0 {
        Ok(e1_series(z))
    } else {
        Ok(e1_continued_fraction(z))
    }
}

/// E₁(z) = −γ − log z − Σ_{k≥1} (−z)^k / (k·k!).
fn e1_series(z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for k in 1..200 {
        term *= -z / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.norm() < 1e-18 * sum.norm().max(1.0) {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

/// Modified Lentz evaluation of the standard continued fraction.
fn e1_continued_fraction(z: Complex64) -> Complex64 {
    let tiny = Complex64::new(1e-300, 0.0);
    let mut f = z + 1.0; // b0
    if f.norm() == 0.0 {
        f = tiny;
    }
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..300 {
        let a = Complex64::new(-((k * k) as f64), 0.0);
        let b = z + (2 * k + 1) as f64;
        d = b + a * d;
        if d.norm() == 0.0 {
            d = tiny;
        }
        c = b + a / c;
        if c.norm() == 0.0 {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    (-z).exp() / f
}

#[cfg(test)]
mod tests {
    use super::*;

    /// High-order Gauss–Legendre-free oracle: composite Simpson on the line
    /// from z out to z + 60 (plus the analytically negligible remainder).
    fn e1_quadrature(z: Complex64) -> Complex64 {
        let far = 60.0;
        let n = 400_000;
        let h = far / n as f64;
        let f = |t: f64| {
            let w = z + t;
            (-w).exp() / w
        };
        let mut s = f(0.0) + f(far);
        for i in 1..n {
            let v = f(i as f64 * h);
            s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        s * h / 3.0
    }

    #[test]
    fn known_real_values() {
        // E1(1) = 0.21938393439552027... (standard tables).
        let v = e1(Complex64::new(1.0, 0.0)).unwrap();
        approx::assert_relative_eq!(v.re, 0.219_383_934_395_520_27, max_relative = 1e-13);
        assert!(v.im.abs() < 1e-16);
        // E1(10) = 4.15696892968532438e-6.
        let v = e1(Complex64::new(10.0, 0.0)).unwrap();
        approx::assert_relative_eq!(v.re, 4.156_968_929_685_324_4e-6, max_relative = 1e-12);
    }

    #[test]
    fn grid_matches_quadrature() {
        for &re in &[0.3, 1.5, 3.0, 6.0, 12.0] {
            for &im in &[-8.0, -2.0, -0.5, 0.5, 2.0, 8.0] {
                let z = Complex64::new(re, im);
                let ours = e1(z).unwrap();
                let oracle = e1_quadrature(z);
                assert!(
                    (ours - oracle).norm() <= 1e-12 * oracle.norm().max(1e-12),
                    "z={z}: {ours} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn regime_boundary_is_continuous() {
        // Series and continued fraction agree where the switch happens.
        for &im in &[-3.9, -2.0, 2.0, 3.9] {
            let re = (16.0 - im * im as f64).sqrt();
            let z = Complex64::new(re, im);
            let a = e1_series(z);
            let b = e1_continued_fraction(z);
            assert!((a - b).norm() < 1e-12 * a.norm().max(1e-12), "z={z}");
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let z = Complex64::new(2.0, 5.0);
        let a = e1(z).unwrap();
        let b = e1(z.conj()).unwrap();
        assert!((a.conj() - b).norm() < 1e-15);
    }

    #[test]
    fn rejects_branch_cut() {
        assert!(e1(Complex64::new(0.0, 0.0)).is_err());
        assert!(e1(Complex64::new(-1.0, 0.0)).is_err());
        assert!(e1(Complex64::new(-1.0, 0.1)).is_ok());
    }
}
