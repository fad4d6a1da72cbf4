//! Riemann zeta on the half-plane Re s > 0 via Euler–Maclaurin:
//! ζ(s) = Σ_{n<N} n^{−s} + N^{1−s}/(s−1) + N^{−s}/2
//!        + Σ_k B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}.

use crate::error::{Error, Result};
use num_complex::Complex64;

// B_2, B_4, …, B_20.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// ζ(s) for Re s > 0, s ≠ 1; roughly 1e-12 accuracy for |Im s| ≲ 100.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    if s.re <= 0.0 {
        return Err(Error::Argument(format!(
            "zeta evaluation restricted to Re s > 0, got {s}"
        )));
    }
    if (s - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
        return Err(Error::PoleProximity {
            rho: Complex64::new(1.0, 0.0),
            dist: (s - Complex64::new(1.0, 0.0)).norm(),
        });
    }
    let n = 50usize;
    let nf = n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        sum += (-s * (k as f64).ln()).exp();
    }
    let npow = (-s * nf.ln()).exp(); // N^{-s}
    sum += npow * nf / (s - 1.0); // N^{1-s}/(s-1)
    sum += npow * 0.5;
    // Correction terms: B_{2k}/(2k)! · (Π_{j=0}^{2k-2}(s+j)) · N^{-s-2k+1}.
    let mut rising = s; // s(s+1)...(s+2k-2), built incrementally
    let mut fact = 2.0f64; // (2k)!
    let mut npow_shift = npow / nf; // N^{-s-2k+1}
    for (k, &b2k) in BERNOULLI.iter().enumerate() {
        if k > 0 {
            let m = 2.0 * k as f64;
            rising *= (s + (m - 1.0)) * (s + m);
            fact *= (m + 1.0) * (m + 2.0);
            npow_shift /= nf * nf;
        }
        sum += b2k / fact * rising * npow_shift;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_values() {
        let pi = std::f64::consts::PI;
        let z2 = zeta(Complex64::new(2.0, 0.0)).unwrap();
        approx::assert_relative_eq!(z2.re, pi * pi / 6.0, max_relative = 1e-13);
        assert!(z2.im.abs() < 1e-14);
        let z4 = zeta(Complex64::new(4.0, 0.0)).unwrap();
        approx::assert_relative_eq!(z4.re, pi.powi(4) / 90.0, max_relative = 1e-13);
        // ζ(1/2) = -1.4603545088095868...
        let zh = zeta(Complex64::new(0.5, 0.0)).unwrap();
        approx::assert_relative_eq!(zh.re, -1.460_354_508_809_586_8, max_relative = 1e-12);
        // ζ(3) = 1.2020569031595943 (Apéry's constant).
        let z3 = zeta(Complex64::new(3.0, 0.0)).unwrap();
        approx::assert_relative_eq!(z3.re, 1.202_056_903_159_594_3, max_relative = 1e-13);
    }

    #[test]
    fn matches_dirichlet_series_far_right() {
        // At Re s = 12 the raw Dirichlet series converges fast enough to be
        // its own oracle.
        for &t in &[0.0, 3.0, 17.0, 60.0] {
            let s = Complex64::new(12.0, t);
            let oracle: Complex64 = (1..200_000)
                .map(|n| (-s * (n as f64).ln()).exp())
                .sum();
            let v = zeta(s).unwrap();
            assert!((v - oracle).norm() < 1e-12 * oracle.norm(), "t={t}");
        }
    }

    #[test]
    fn first_nontrivial_zero_neighborhood() {
        // |ζ(1/2 + 14.134725141734695i)| should be ~0 (first zero).
        let s = Complex64::new(0.5, 14.134_725_141_734_695);
        assert!(zeta(s).unwrap().norm() < 1e-9);
    }

    #[test]
    fn rejects_pole_and_left_half() {
        assert!(zeta(Complex64::new(1.0, 0.0)).is_err());
        assert!(zeta(Complex64::new(-0.5, 3.0)).is_err());
    }
}
