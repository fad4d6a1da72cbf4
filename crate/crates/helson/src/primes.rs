//! Prime generation, window counting, and prime-gap scanning.
//!
//! Everything downstream (block selection, separation floors) leans on the
//! empirical availability of primes in short windows [x, x + x^θ], so this
//! module also ships the gap scan used to certify that availability.

use crate::error::{Error, Result};

/// Default desk-scale cap; override with HELSON_CAP.
pub const DEFAULT_CAP: u64 = 1_000_000_000;

const SEGMENT: usize = 1 << 20;

/// Sieve cap from the environment, falling back to the default.
pub fn cap() -> u64 {
    std::env::var("HELSON_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

/// Exact rational exponent θ = num/den; block boundaries must be
/// reproducible integers, so θ is never carried as a float.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Theta {
    pub num: u32,
    pub den: u32,
}

impl Theta {
    pub const STANDARD: Theta = Theta { num: 21, den: 40 };

    pub fn new(num: u32, den: u32) -> Result<Theta> {
        if den == 0 || num == 0 || num > den {
            return Err(Error::Argument(format!(
                "theta must satisfy 0 < num/den <= 1, got {num}/{den}"
            )));
        }
        Ok(Theta { num, den })
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// ⌈x^θ⌉ computed in floating point then ceiled.
    pub fn pow_ceil(self, x: f64) -> u64 {
        x.powf(self.as_f64()).ceil() as u64
    }
}

#[derive(Debug, Clone)]
pub struct PrimeTable {
    pub segment_lo: u64,
    pub segment_hi: u64,
    pub primes: Vec<u64>,
}

impl PrimeTable {
    /// Number of listed primes in (a, b].
    pub fn count_in(&self, a: u64, b: u64) -> usize {
        let lo = self.primes.partition_point(|&p| p <= a);
        let hi = self.primes.partition_point(|&p| p <= b);
        hi - lo
    }

    /// Slice of primes in [a, b].
    pub fn range(&self, a: u64, b: u64) -> &[u64] {
        let lo = self.primes.partition_point(|&p| p < a);
        let hi = self.primes.partition_point(|&p| p <= b);
        &self.primes[lo..hi]
    }
}

/// Simple sieve used for the base primes up to sqrt(hi).
fn small_primes(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut is_prime = vec![true; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if is_prime[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                is_prime[j] = false;
                j += i;
            }
        }
    }
    primes
}

/// Segmented sieve over [lo, hi] with fixed 2^20-element segments.
pub fn sieve_range(lo: u64, hi: u64) -> Result<PrimeTable> {
    if lo < 2 || lo > hi {
        return Err(Error::Argument(format!(
            "need 2 <= lo <= hi, got lo={lo} hi={hi}"
        )));
    }
    let limit = cap();
    if hi > limit {
        return Err(Error::Resource(format!(
            "hi={hi} exceeds the configured sieve cap {limit}"
        )));
    }
    let root = (hi as f64).sqrt() as u64 + 1;
    let base = small_primes(root);
    let mut primes = Vec::new();
    let mut seg_lo = lo;
    let mut flags = vec![true; SEGMENT];
    while seg_lo <= hi {
        let seg_hi = (seg_lo + SEGMENT as u64 - 1).min(hi);
        let len = (seg_hi - seg_lo + 1) as usize;
        flags[..len].fill(true);
        for &p in &base {
            if p * p > seg_hi {
                break;
            }
            let start = p.max(seg_lo.div_ceil(p)) * p;
            let mut j = start;
            while j <= seg_hi {
                flags[(j - seg_lo) as usize] = false;
                j += p;
            }
        }
        for i in 0..len {
            let n = seg_lo + i as u64;
            if n >= 2 && flags[i] {
                primes.push(n);
            }
        }
        seg_lo = seg_hi + 1;
        if seg_lo == 0 {
            break; // overflow guard
        }
    }
    Ok(PrimeTable {
        segment_lo: lo,
        segment_hi: hi,
        primes,
    })
}

/// π(x + ⌈x^θ⌉) − π(x): primes available in the next block window.
pub fn count_window(x: u64, theta: Theta) -> Result<u64> {
    if x < 2 {
        return Err(Error::Argument(format!("need x >= 2, got {x}")));
    }
    let w = theta.pow_ceil(x as f64);
    let hi = x
        .checked_add(w)
        .ok_or_else(|| Error::Resource("window overflows u64".into()))?;
    if hi > cap() {
        return Err(Error::Resource(format!(
            "window endpoint {hi} exceeds the sieve cap"
        )));
    }
    let table = sieve_range(2.min(x), hi)?;
    Ok(table.count_in(x, hi) as u64)
}

/// Largest gap between consecutive primes lying fully below X.
pub fn max_gap_below(x: u64) -> Result<u64> {
    if x < 3 {
        return Err(Error::Argument(format!("need X >= 3, got {x}")));
    }
    let table = sieve_range(2, x)?;
    let mut best = 0;
    for w in table.primes.windows(2) {
        if w[1] < x {
            best = best.max(w[1] - w[0]);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct GapReport {
    pub x_grid: Vec<u64>,
    pub gap_at_x: Vec<u64>,
    pub window_counts: Vec<u64>,
}

/// Scan log-spaced x up to xmax: distance from x to the next prime, and the
/// count of primes in (x, x + ⌈x^θ⌉].
pub fn gap_scan(xmax: u64, theta: Theta, points: usize) -> Result<GapReport> {
    if xmax < 10 {
        return Err(Error::Argument("xmax too small for a scan".into()));
    }
    let span = theta.pow_ceil(xmax as f64);
    let table = sieve_range(2, xmax + 2 * span.max(200))?;
    let mut x_grid = Vec::with_capacity(points);
    let lo = 10f64.ln();
    let hi = (xmax as f64).ln();
    for i in 0..points {
        let t = if points == 1 { 0.0 } else { i as f64 / (points - 1) as f64 };
        let x = (lo + t * (hi - lo)).exp().round() as u64;
        if x_grid.last() != Some(&x) {
            x_grid.push(x);
        }
    }
    let mut gap_at_x = Vec::with_capacity(x_grid.len());
    let mut window_counts = Vec::with_capacity(x_grid.len());
    for &x in &x_grid {
        let idx = table.primes.partition_point(|&p| p <= x);
        let next = table.primes.get(idx).copied().ok_or_else(|| {
            Error::Resource(format!("no prime above {x} within the sieved range"))
        })?;
        gap_at_x.push(next - x);
        let w = theta.pow_ceil(x as f64);
        window_counts.push(table.count_in(x, x + w) as u64);
    }
    Ok(GapReport {
        x_grid,
        gap_at_x,
        window_counts,
    })
}

/// Deterministic Miller–Rabin, correct for all 64-bit inputs with the fixed
/// witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(lo: u64, hi: u64) -> Vec<u64> {
        (lo..=hi)
            .filter(|&n| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect()
    }

    #[test]
    fn sieve_small() {
        assert_eq!(sieve_range(2, 10).unwrap().primes, vec![2, 3, 5, 7]);
        assert_eq!(sieve_range(14, 16).unwrap().primes, Vec::<u64>::new());
    }

    #[test]
    fn sieve_matches_trial_division() {
        let t = sieve_range(100, 120).unwrap();
        assert_eq!(t.primes, trial_division(100, 120));
        assert_eq!(t.primes, vec![101, 103, 107, 109, 113]);
        let t = sieve_range(9_999_900, 10_000_100).unwrap();
        assert_eq!(t.primes, trial_division(9_999_900, 10_000_100));
    }

    #[test]
    fn sieve_rejects_bad_args() {
        assert!(matches!(sieve_range(10, 5), Err(Error::Argument(_))));
        assert!(matches!(
            sieve_range(2, 10_000_000_000),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn window_counts() {
        // x=2, θ=1: primes in (2, 4] is just 3.
        assert_eq!(count_window(2, Theta::new(1, 1).unwrap()).unwrap(), 1);
        // x=10, θ=21/40: window (10, 10+⌈10^0.525⌉] = (10, 14]; primes 11, 13.
        let w = Theta::STANDARD.pow_ceil(10.0);
        let oracle = trial_division(11, 10 + w).len() as u64;
        assert_eq!(count_window(10, Theta::STANDARD).unwrap(), oracle);
    }

    #[test]
    fn window_never_empty_on_scan() {
        let report = gap_scan(1_000_000, Theta::STANDARD, 60).unwrap();
        let mut min_norm = f64::INFINITY;
        for (i, &x) in report.x_grid.iter().enumerate() {
            assert!(report.window_counts[i] >= 1, "empty window at x={x}");
            let norm = report.window_counts[i] as f64 * (x as f64).ln()
                / (x as f64).powf(21.0 / 40.0);
            min_norm = min_norm.min(norm);
        }
        assert!(min_norm > 0.0);
    }

    #[test]
    fn gaps() {
        assert_eq!(max_gap_below(10).unwrap(), 2);
        assert_eq!(max_gap_below(100).unwrap(), 8);
    }

    #[test]
    fn sieve_union_property() {
        // Random split points via the crate RNG; union of adjacent ranges
        // equals the full range.
        let mut rng = crate::rng::SplitMix64::new(99);
        for _ in 0..5 {
            let a = 2 + (rng.next_u64() % 1000);
            let b = a + 1 + (rng.next_u64() % 10_000);
            let c = b + 1 + (rng.next_u64() % 10_000);
            let mut union = sieve_range(a, b).unwrap().primes;
            union.extend(sieve_range(b + 1, c).unwrap().primes);
            assert_eq!(union, sieve_range(a, c).unwrap().primes);
        }
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let t = sieve_range(2, 50_000).unwrap();
        let set: std::collections::HashSet<u64> = t.primes.iter().copied().collect();
        for n in 2..50_000 {
            assert_eq!(is_prime_u64(n), set.contains(&n), "n={n}");
        }
    }
}
