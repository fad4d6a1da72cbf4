//! Signed multisets of prescribed zeros/poles and the admissibility gates
//! for the three construction regimes (strip density, Cramér-gap, and
//! zeros-only), plus the dyadic strip partition used by the zeros-only
//! construction.

use crate::error::{Error, Result};
use crate::report::fmt17;
use crate::rng::SplitMix64;
use std::io::{BufRead, Write};
use std::path::Path;

/// A prescribed zero/pole β+iγ with nonzero integer multiplicity
/// (positive = zero, negative = pole).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub beta: f64,
    pub gamma: f64,
    pub mult: i64,
}

/// Finite signed multiset in the half-plane Re s > 1/2, stored sorted by
/// |γ| then β for reproducible iteration order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignedMultiset {
    points: Vec<Point>,
}

impl SignedMultiset {
    pub fn new(mut points: Vec<Point>) -> Result<SignedMultiset> {
        for p in &points {
            if !(p.beta > 0.5) || !p.beta.is_finite() || !p.gamma.is_finite() {
                return Err(Error::Argument(format!(
                    "point ({}, {}) outside the open half-plane beta > 1/2",
                    p.beta, p.gamma
                )));
            }
            if p.mult == 0 {
                return Err(Error::Argument(format!(
                    "zero multiplicity at ({}, {})",
                    p.beta, p.gamma
                )));
            }
        }
        points.sort_by(|a, b| {
            (a.gamma.abs(), a.beta, a.gamma)
                .partial_cmp(&(b.gamma.abs(), b.beta, b.gamma))
                .unwrap()
        });
        for w in points.windows(2) {
            if w[0].beta == w[1].beta && w[0].gamma == w[1].gamma {
                return Err(Error::Argument(format!(
                    "duplicate point ({}, {})",
                    w[0].beta, w[0].gamma
                )));
            }
        }
        Ok(SignedMultiset { points })
    }

    pub fn empty() -> SignedMultiset {
        SignedMultiset { points: Vec::new() }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// True when for each point the mirror point (β, −γ) is present with the
    /// same multiplicity (so q and all continuations are real on the reals).
    pub fn is_conjugate_symmetric(&self) -> bool {
        self.points.iter().all(|p| {
            self.points
                .iter()
                .any(|q| q.beta == p.beta && q.gamma == -p.gamma && q.mult == p.mult)
        })
    }

    /// N_Z(σ,T) = Σ_{β>σ, |γ|≤T} |m_Z(ρ)|.
    pub fn counting(&self, sigma: f64, t: f64) -> u64 {
        self.points
            .iter()
            .filter(|p| p.beta > sigma && p.gamma.abs() <= t)
            .map(|p| p.mult.unsigned_abs() as u64)
            .sum()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "# signed-multiset v1")?;
        for p in &self.points {
            writeln!(f, "{},{},{}", fmt17(p.beta), fmt17(p.gamma), p.mult)?;
        }
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<SignedMultiset> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut points = Vec::new();
        for (i, line) in f.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    reason: format!("line {}: expected beta,gamma,mult", i + 1),
                });
            }
            let bad = |e: &dyn std::fmt::Display| Error::Parse {
                path: path.display().to_string(),
                reason: format!("line {}: {e}", i + 1),
            };
            let beta: f64 = cols[0].trim().parse().map_err(|e| bad(&e))?;
            let gamma: f64 = cols[1].trim().parse().map_err(|e| bad(&e))?;
            let mult: i64 = cols[2].trim().parse().map_err(|e| bad(&e))?;
            points.push(Point { beta, gamma, mult });
        }
        SignedMultiset::new(points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionId {
    MainStrip,       // Theorem gate (a): 1/2 < β ≤ α
    MainUnitWindow,  // (b): N(σ,T+1) − N(σ,T) ≤ C_b T^ε
    MainDensity,     // (c): N(σ,T) ≤ C_c T^{(α−σ)/(α+σ−1)}
    CramerHeight,    // low-density gate (a): |γ| ≥ e^e and β ≤ 1 − λ loglog|γ|/log|γ|
    CramerCount,     // low-density gate (b): N(1/2,T) ≤ C (log T)^{κ−1}
    ZerosOnlyStrip,  // zeros-only (i)/(ii): β ≤ 39/40, resp. β < 1
}

impl ConditionId {
    pub fn as_str(self) -> &'static str {
        match self {
            ConditionId::MainStrip => "strip",
            ConditionId::MainUnitWindow => "unit_window",
            ConditionId::MainDensity => "density",
            ConditionId::CramerHeight => "height",
            ConditionId::CramerCount => "count",
            ConditionId::ZerosOnlyStrip => "zeros_strip",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DensityReport {
    pub condition_id: ConditionId,
    pub passed: bool,
    pub witness: Option<String>,
    pub margin: f64,
}

impl DensityReport {
    fn pass(condition_id: ConditionId, margin: f64) -> DensityReport {
        DensityReport {
            condition_id,
            passed: true,
            witness: None,
            margin,
        }
    }

    fn fail(condition_id: ConditionId, witness: String, margin: f64) -> DensityReport {
        DensityReport {
            condition_id,
            passed: false,
            witness: Some(witness),
            margin,
        }
    }
}

pub const ALPHA_MAX: f64 = 59.0 / 80.0;

fn sigma_grid(alpha: f64) -> Vec<f64> {
    (1..64).map(|i| 0.5 + (alpha - 0.5) * i as f64 / 64.0).collect()
}

fn t_grid(z: &SignedMultiset) -> Vec<f64> {
    let mut ts: Vec<f64> = z
        .points()
        .iter()
        .map(|p| p.gamma.abs().max(1e-6))
        .collect();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup();
    ts
}

/// Gate for the main strip theorem: all points in 1/2 < β ≤ α, unit-window
/// counts bounded by C_b T^ε, and density bounded by C_c T^{(α−σ)/(α+σ−1)},
/// checked over the data's T-range on a σ grid.
pub fn gate_thm_main(
    z: &SignedMultiset,
    alpha: f64,
    c_b: f64,
    c_c: f64,
    eps: f64,
) -> Result<DensityReport> {
    if !(alpha > 0.5 && alpha < ALPHA_MAX) {
        return Err(Error::Argument(format!(
            "alpha must lie in (1/2, 59/80) = (0.5, {ALPHA_MAX}), got {alpha}"
        )));
    }
    let mut worst = DensityReport::pass(ConditionId::MainStrip, f64::INFINITY);
    for p in z.points() {
        let margin = alpha - p.beta;
        if p.beta > alpha {
            return Ok(DensityReport::fail(
                ConditionId::MainStrip,
                format!("point ({}, {}) has beta > alpha", p.beta, p.gamma),
                margin,
            ));
        }
        if margin < worst.margin {
            worst = DensityReport::pass(ConditionId::MainStrip, margin);
        }
    }
    let ts = t_grid(z);
    for sigma in sigma_grid(alpha) {
        for &t in &ts {
            let window = z.counting(sigma, t + 1.0) as f64 - z.counting(sigma, t) as f64;
            let bound_b = c_b * t.max(1.0).powf(eps);
            if window > bound_b {
                return Ok(DensityReport::fail(
                    ConditionId::MainUnitWindow,
                    format!("window (T, T+1] at T={t}, sigma={sigma}: count {window} > {bound_b}"),
                    bound_b - window,
                ));
            }
            let n = z.counting(sigma, t) as f64;
            let bound_c = c_c * t.powf((alpha - sigma) / (alpha + sigma - 1.0));
            if n > bound_c {
                return Ok(DensityReport::fail(
                    ConditionId::MainDensity,
                    format!("N({sigma}, {t}) = {n} > {bound_c}"),
                    bound_c - n,
                ));
            }
            let margin = (bound_c - n).min(bound_b - window);
            if margin < worst.margin {
                let id = if bound_c - n <= bound_b - window {
                    ConditionId::MainDensity
                } else {
                    ConditionId::MainUnitWindow
                };
                worst = DensityReport::pass(id, margin);
            }
        }
    }
    Ok(worst)
}

/// Gate for the Cramér-gap theorem: every point satisfies |γ| ≥ e^e and
/// β ≤ 1 − λ loglog|γ|/log|γ|, and N(1/2,T) ≤ C (log T)^{κ−1}.
pub fn gate_thm_main3(
    z: &SignedMultiset,
    lambda: f64,
    kappa: f64,
    c: f64,
) -> Result<DensityReport> {
    if !(lambda > kappa && kappa > 1.0) {
        return Err(Error::Argument(format!(
            "need lambda > kappa > 1, got lambda={lambda}, kappa={kappa}"
        )));
    }
    let ee = std::f64::consts::E.exp();
    let mut worst = DensityReport::pass(ConditionId::CramerHeight, f64::INFINITY);
    for p in z.points() {
        let g = p.gamma.abs();
        if g < ee {
            return Ok(DensityReport::fail(
                ConditionId::CramerHeight,
                format!("point ({}, {}) has |gamma| < e^e", p.beta, p.gamma),
                g - ee,
            ));
        }
        let bound = 1.0 - lambda * g.ln().ln() / g.ln();
        let margin = bound - p.beta;
        if p.beta > bound {
            return Ok(DensityReport::fail(
                ConditionId::CramerHeight,
                format!(
                    "point ({}, {}) exceeds the height bound {bound}",
                    p.beta, p.gamma
                ),
                margin,
            ));
        }
        if margin < worst.margin {
            worst = DensityReport::pass(ConditionId::CramerHeight, margin);
        }
    }
    for &t in &t_grid(z) {
        let n = z.counting(0.5, t) as f64;
        let bound = c * t.max(std::f64::consts::E).ln().powf(kappa - 1.0);
        let margin = bound - n;
        if n > bound {
            return Ok(DensityReport::fail(
                ConditionId::CramerCount,
                format!("N(1/2, {t}) = {n} > {bound}"),
                margin,
            ));
        }
        if margin < worst.margin {
            worst = DensityReport::pass(ConditionId::CramerCount, margin);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZerosOnlyMode {
    Unconditional,
    Rh,
}

pub const BETA_MAX_UNCONDITIONAL: f64 = 39.0 / 40.0;

/// Gate for the zeros-only construction: all multiplicities positive; betas
/// within 39/40 (unconditional) or strictly below 1 (RH mode).
pub fn gate_thm_nonuniversal(
    zplus: &SignedMultiset,
    mode: ZerosOnlyMode,
) -> Result<DensityReport> {
    let mut worst = DensityReport::pass(ConditionId::ZerosOnlyStrip, f64::INFINITY);
    for p in zplus.points() {
        if p.mult < 0 {
            return Err(Error::Argument(format!(
                "zeros-only construction requires positive multiplicities; ({}, {}) has {}",
                p.beta, p.gamma, p.mult
            )));
        }
        let (ok, margin) = match mode {
            ZerosOnlyMode::Unconditional => {
                (p.beta <= BETA_MAX_UNCONDITIONAL, BETA_MAX_UNCONDITIONAL - p.beta)
            }
            ZerosOnlyMode::Rh => (p.beta < 1.0, 1.0 - p.beta),
        };
        if !ok {
            return Ok(DensityReport::fail(
                ConditionId::ZerosOnlyStrip,
                format!("point ({}, {}) outside the admissible strip", p.beta, p.gamma),
                margin,
            ));
        }
        if margin < worst.margin {
            worst = DensityReport::pass(ConditionId::ZerosOnlyStrip, margin);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    U,
    V,
}

#[derive(Debug, Clone, Copy)]
pub struct DyadicTag {
    pub region: Region,
    pub j: u32,
    /// Companion zero β′+iγ with β′ < β, set for V-region points only.
    pub paired_beta: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct DyadicAssignment {
    /// Tag per point, in multiset iteration order.
    pub tags: Vec<DyadicTag>,
    /// (j, δ_j) for every V-level that received points.
    pub delta_j: Vec<(u32, f64)>,
    pub mode: ZerosOnlyMode,
    pub beta_gap_budget: f64,
}

/// Dyadic level of β: 1/2 + 2^{−(j+1)} ≤ β < 1/2 + 2^{−j}.
fn beta_level(beta: f64) -> u32 {
    let mut j = (-(beta - 0.5).log2()).floor() as u32;
    // Guard against floating rounding at exact dyadic boundaries.
    while beta - 0.5 >= 2f64.powi(-(j as i32)) {
        j -= 1;
    }
    while beta - 0.5 < 2f64.powi(-(j as i32 + 1)) {
        j += 1;
    }
    j.max(1)
}

/// Dyadic level of |γ| > 2: 2^j < |γ| ≤ 2^{j+1}, ties to the lower level.
fn gamma_level(g: f64) -> u32 {
    let mut j = (g.log2().ceil() - 1.0) as u32;
    while g > 2f64.powi(j as i32 + 1) {
        j += 1;
    }
    while j > 0 && g <= 2f64.powi(j as i32) {
        j -= 1;
    }
    j.max(1)
}

/// Partition points between the bounded boxes U_j (|γ| ≤ 2^j) and the tall
/// boxes V_j (2^j < |γ| ≤ 2^{j+1}), and pair every V-point with a companion
/// zero ρ′ = β′+iγ at distance β−β′ = min(budget, δ_j).
pub fn assign_dyadic(
    zplus: &SignedMultiset,
    mode: ZerosOnlyMode,
    beta_gap_budget: f64,
) -> Result<DyadicAssignment> {
    gate_thm_nonuniversal(zplus, mode)?;
    if !(beta_gap_budget > 0.0) {
        return Err(Error::Argument("beta_gap_budget must be positive".into()));
    }
    // First pass: region tags and per-level V sums.
    let mut raw: Vec<(Region, u32)> = Vec::with_capacity(zplus.len());
    let mut v_sum: std::collections::BTreeMap<u32, (i64, f64)> = std::collections::BTreeMap::new();
    for p in zplus.points() {
        let g = p.gamma.abs();
        let tag = if g > 2.0 {
            let jt = gamma_level(g);
            if p.beta - 0.5 >= 2f64.powi(-(jt as i32 + 1)) {
                (Region::V, jt)
            } else {
                (Region::U, beta_level(p.beta))
            }
        } else {
            (Region::U, beta_level(p.beta))
        };
        if tag.0 == Region::V {
            let e = v_sum.entry(tag.1).or_insert((0, 0.0));
            e.0 += p.mult;
            e.1 = e.1.max(p.beta);
        }
        raw.push(tag);
    }
    let delta_j: Vec<(u32, f64)> = v_sum
        .iter()
        .map(|(&j, &(sum, beta_max))| {
            let mut d = 1.0 / sum as f64;
            if mode == ZerosOnlyMode::Rh {
                d = d.min((1.0 - beta_max) / ((j as f64).powi(2) * sum as f64));
            }
            (j, d)
        })
        .collect();
    // Second pass: companions, nudged away from any existing point.
    let mut occupied: Vec<(f64, f64)> = zplus.points().iter().map(|p| (p.beta, p.gamma)).collect();
    let mut tags = Vec::with_capacity(zplus.len());
    for (p, &(region, j)) in zplus.points().iter().zip(&raw) {
        let paired_beta = if region == Region::V {
            let delta = delta_j.iter().find(|&&(jj, _)| jj == j).unwrap().1;
            let mut gap = beta_gap_budget.min(delta);
            let mut tries = 0;
            while occupied
                .iter()
                .any(|&(b, g)| g == p.gamma && (b - (p.beta - gap)).abs() < 1e-12)
            {
                gap *= 0.5;
                tries += 1;
                if tries > 60 {
                    return Err(Error::Argument(format!(
                        "cannot place a companion zero for ({}, {})",
                        p.beta, p.gamma
                    )));
                }
            }
            occupied.push((p.beta - gap, p.gamma));
            Some(p.beta - gap)
        } else {
            None
        };
        tags.push(DyadicTag {
            region,
            j,
            paired_beta,
        });
    }
    Ok(DyadicAssignment {
        tags,
        delta_j,
        mode,
        beta_gap_budget,
    })
}

/// Deterministic admissible test fixture: n points with log-uniform heights
/// in [2, Tmax] and betas spread through (1/2, α], pairwise separated by at
/// least 0.1 so verification contours stay clean.
pub fn sample_admissible(
    seed: u64,
    n: usize,
    alpha: f64,
    t_max: f64,
) -> Result<SignedMultiset> {
    if !(alpha > 0.5 && alpha < ALPHA_MAX) {
        return Err(Error::Argument(format!(
            "alpha must lie in (1/2, 59/80), got {alpha}"
        )));
    }
    if n == 0 {
        return SignedMultiset::new(Vec::new());
    }
    if !(t_max >= 4.0) || n as f64 > t_max {
        return Err(Error::Argument(format!(
            "cannot place {n} separated points below height {t_max}"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut pts: Vec<Point> = Vec::with_capacity(n);
    let beta_lo = 0.5 + 0.05 * (alpha - 0.5);
    let mut attempts = 0usize;
    while pts.len() < n {
        attempts += 1;
        if attempts > 500 * n {
            return Err(Error::Argument(format!(
                "cannot place {n} separated points below height {t_max}"
            )));
        }
        let gamma = (2f64.ln() + (t_max.ln() - 2f64.ln()) * rng.next_f64()).exp();
        let beta = rng.next_range(beta_lo, alpha);
        if pts
            .iter()
            .all(|p| ((p.beta - beta).powi(2) + (p.gamma - gamma).powi(2)).sqrt() >= 0.1)
        {
            pts.push(Point {
                beta,
                gamma,
                mult: 1,
            });
        }
    }
    SignedMultiset::new(pts)
}

/// Smallest C_c for which the density gate accepts this multiset, measured
/// on the same σ/T grid the gate uses.
pub fn measured_density_constant(z: &SignedMultiset, alpha: f64) -> f64 {
    let mut c = 0.0f64;
    for sigma in sigma_grid(alpha) {
        for &t in &t_grid(z) {
            let n = z.counting(sigma, t) as f64;
            let denom = t.powf((alpha - sigma) / (alpha + sigma - 1.0));
            if denom > 0.0 {
                c = c.max(n / denom);
            }
        }
    }
    c
}
