//! Half-plane Blaschke machinery: atoms, the summability condition,
//! truncated products, and the Poisson-integral outer function.
//!
//! The atom for a point ρ in the half-plane Re s > α is
//!     b(s) = (s−ρ)/(s−2α+conj ρ) · (1−α+conj ρ)/(1+α−ρ) · |(1+α−ρ)/(1−α+conj ρ)|,
//! a conformal map of the half-plane onto the unit disc vanishing at ρ. The
//! product over a signed multiset raises each atom to its multiplicity, with
//! a plain linear factor (s−1−α)/(s+1−α) replacing the atom at the special
//! point 1+α.

use crate::continuation::ContinuedValue;
use crate::error::{Error, Result};
use crate::multiset::SignedMultiset;
use num_complex::Complex64;

const POLE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlaschkeAtom {
    pub rho: Complex64,
    pub alpha: f64,
}

impl BlaschkeAtom {
    pub fn new(rho: Complex64, alpha: f64) -> Result<BlaschkeAtom> {
        if !(rho.re > alpha) {
            return Err(Error::Argument(format!(
                "atom point {rho} must satisfy Re rho > alpha = {alpha}"
            )));
        }
        if (rho - Complex64::new(1.0 + alpha, 0.0)).norm() < POLE_EPS {
            return Err(Error::Argument(
                "the point 1+alpha is carried by the linear factor, not an atom".into(),
            ));
        }
        Ok(BlaschkeAtom { rho, alpha })
    }

    /// Mirror point 2α − conj ρ, the atom's only pole.
    pub fn reflected(&self) -> Complex64 {
        2.0 * self.alpha - self.rho.conj()
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let refl = self.reflected();
        let dist = (s - refl).norm();
        if dist < POLE_EPS {
            return Err(Error::PoleProximity { rho: refl, dist });
        }
        let num = Complex64::new(1.0 - self.alpha, 0.0) + self.rho.conj();
        let den = Complex64::new(1.0 + self.alpha, 0.0) - self.rho;
        Ok((s - self.rho) / (s - refl) * (num / den) * (den.norm() / num.norm()))
    }
}

/// Σ |m|(β−α)/(1+γ²) over the multiset, plus an optional externally supplied
/// tail estimate for mass outside the finite set. The verdict records
/// whether the combined value is finite.
pub fn blaschke_condition(
    z: &SignedMultiset,
    alpha: f64,
    tail: Option<f64>,
) -> Result<(f64, bool)> {
    let mut sum = 0.0f64;
    for p in z.points() {
        if !(p.beta > alpha) {
            return Err(Error::Argument(format!(
                "point ({}, {}) is not in the half-plane Re s > {alpha}",
                p.beta, p.gamma
            )));
        }
        sum += p.mult.abs() as f64 * (p.beta - alpha) / (1.0 + p.gamma * p.gamma);
    }
    sum += tail.unwrap_or(0.0);
    Ok((sum, sum.is_finite()))
}

/// Log-derivative of the full product: Σ m (1/(s−ρ) − 1/(s−2α+conj ρ)),
/// with the linear-factor analog at 1+α. Exact, so contour winding around a
/// prescribed point recovers its multiplicity.
pub fn blaschke_dlog(z: &SignedMultiset, alpha: f64, s: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for p in z.points() {
        let rho = Complex64::new(p.beta, p.gamma);
        let m = p.mult as f64;
        let refl = if (rho - Complex64::new(1.0 + alpha, 0.0)).norm() < POLE_EPS {
            Complex64::new(alpha - 1.0, 0.0)
        } else {
            2.0 * alpha - rho.conj()
        };
        for pole in [rho, refl] {
            let dist = (s - pole).norm();
            if dist < POLE_EPS {
                return Err(Error::PoleProximity { rho: pole, dist });
            }
        }
        acc += m * (1.0 / (s - rho) - 1.0 / (s - refl));
    }
    Ok(acc)
}

/// Truncated product over the points with |γ| ≤ trunc_T, multiplicities as
/// exponents. Evaluated as exp of summed logarithms; integer powers make
/// the per-factor branch choice immaterial. The skipped points' exact log
/// magnitudes form the tail bound.
pub fn blaschke_product(
    z: &SignedMultiset,
    alpha: f64,
    s: Complex64,
    trunc_t: f64,
) -> Result<ContinuedValue> {
    let mut log_acc = Complex64::new(0.0, 0.0);
    let mut tail = 0.0f64;
    for p in z.points() {
        let rho = Complex64::new(p.beta, p.gamma);
        let m = p.mult as f64;
        let factor = if (rho - Complex64::new(1.0 + alpha, 0.0)).norm() < POLE_EPS {
            let pole = Complex64::new(alpha - 1.0, 0.0);
            let dist = (s - pole).norm();
            if dist < POLE_EPS {
                return Err(Error::PoleProximity { rho: pole, dist });
            }
            (s - Complex64::new(1.0 + alpha, 0.0)) / (s - pole)
        } else {
            let atom = BlaschkeAtom::new(rho, alpha)?;
            atom.eval(s)?
        };
        if p.mult < 0 && factor.norm() < POLE_EPS {
            return Err(Error::PoleProximity {
                rho,
                dist: (s - rho).norm(),
            });
        }
        let lf = m * factor.ln();
        if p.gamma.abs() <= trunc_t {
            log_acc += lf;
        } else {
            tail += lf.norm();
        }
    }
    let value = log_acc.exp();
    Ok(ContinuedValue {
        value,
        // A missing factor of modulus e^{±τ} moves the product by at most
        // |value|(e^τ − 1).
        tail_bound: value.norm() * tail.exp_m1(),
    })
}

/// Sampled boundary log-modulus on the line Re s = α, with a declared decay
/// exponent for the analytic tails outside the sampled range:
/// |g(x)| ≤ |g(±X)|(|x|/X)^{−decay} for |x| beyond the last sample X.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySamples {
    pub alpha: f64,
    /// (x, log|h(α+ix)|) sorted by x.
    pub samples: Vec<(f64, f64)>,
    pub decay: f64,
}

impl BoundarySamples {
    /// Symmetric geometric grid on ±[x_lo, x_hi] (plus 0) with `per_decade`
    /// points per decade.
    pub fn geometric<F: Fn(f64) -> f64>(
        alpha: f64,
        decay: f64,
        x_lo: f64,
        x_hi: f64,
        per_decade: usize,
        g: F,
    ) -> BoundarySamples {
        let mut xs = vec![0.0f64];
        let decades = (x_hi / x_lo).log10();
        let n = ((decades * per_decade as f64).ceil() as usize).max(1);
        for i in 0..=n {
            let x = x_lo * 10f64.powf(decades * i as f64 / n as f64);
            xs.push(x);
            xs.push(-x);
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        BoundarySamples {
            alpha,
            samples: xs.into_iter().map(|x| (x, g(x))).collect(),
            decay,
        }
    }
}

/// Outer function U(s) = exp((1/π)∫ [1/(s−α−ix) − ix/(1+x²)] g(x) dx) by
/// trapezoid over the samples, with the out-of-range tail bounded via the
/// declared decay exponent.
pub fn outer_eval(data: &BoundarySamples, s: Complex64) -> Result<Complex64> {
    if !(s.re > data.alpha) {
        return Err(Error::Argument(format!(
            "outer function evaluated at Re s = {} but needs Re s > {}",
            s.re, data.alpha
        )));
    }
    if data.samples.is_empty() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let kernel = |x: f64| -> Complex64 {
        1.0 / (s - Complex64::new(data.alpha, x)) - Complex64::new(0.0, x / (1.0 + x * x))
    };
    let mut integral = Complex64::new(0.0, 0.0);
    for w in data.samples.windows(2) {
        let (x0, g0) = w[0];
        let (x1, g1) = w[1];
        integral += 0.5 * (x1 - x0) * (kernel(x0) * g0 + kernel(x1) * g1);
    }
    // Tail beyond the sampled range: the combined kernel is O((1+|s−α|)/x²),
    // and |g| decays like (x/X)^{−d}, so each side contributes at most
    // (1+|s−α|)·|g(±X)|/((1+d)·X).
    let (x_hi, g_hi) = *data.samples.last().unwrap();
    let (x_lo, g_lo) = data.samples[0];
    let scale = 1.0 + (s - Complex64::new(data.alpha, 0.0)).norm();
    let mut tail = 0.0f64;
    if x_hi > 0.0 {
        tail += scale * g_hi.abs() / ((1.0 + data.decay) * x_hi);
    }
    if x_lo < 0.0 {
        tail += scale * g_lo.abs() / ((1.0 + data.decay) * x_lo.abs());
    }
    if tail > 0.1 * integral.norm().max(1e-300) {
        return Err(Error::Precision(format!(
            "boundary tail estimate {tail} exceeds 10% of the kernel integral {}",
            integral.norm()
        )));
    }
    Ok((integral / std::f64::consts::PI).exp())
}
