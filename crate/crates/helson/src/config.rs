//! Keyed-text run configuration: `key = value` lines, `#` comments, unknown
//! keys rejected, and every parameter gate re-validated at load time.

use crate::error::{Error, Result};
use crate::primes::Theta;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremKind {
    /// Strip construction for a general signed multiset (density gates).
    Main,
    /// Cramér-gap construction (λ > κ > 1).
    Main3,
    /// Zeros-only construction (positive multiplicities).
    ZerosOnly,
    /// Single real zero of prescribed multiplicity at ν.
    PNu,
}

impl TheoremKind {
    pub fn parse(s: &str) -> Result<TheoremKind> {
        match s {
            "main" => Ok(TheoremKind::Main),
            "main3" => Ok(TheoremKind::Main3),
            "zeros" => Ok(TheoremKind::ZerosOnly),
            "pnu" => Ok(TheoremKind::PNu),
            other => Err(Error::Argument(format!(
                "unknown theorem selector {other:?}; expected main, main3, zeros or pnu"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremKind::Main => "main",
            TheoremKind::Main3 => "main3",
            TheoremKind::ZerosOnly => "zeros",
            TheoremKind::PNu => "pnu",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub theorem: TheoremKind,
    pub multiset: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub x_max: u64,
    pub theta: Theta,
    pub seed: u64,
    // Regime parameters; which ones are required depends on the theorem.
    pub nu: f64,
    pub m: u64,
    pub alpha: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub block_c: f64,
    pub rh: bool,
    pub beta_gap_budget: f64,
    // Verification and diagnostics.
    pub contour_radius: f64,
    pub contour_nodes: usize,
    pub sigma_grid: Vec<f64>,
    pub ms_sigma: f64,
    pub ms_xcut: f64,
    pub ms_t: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            theorem: TheoremKind::Main,
            multiset: None,
            out_dir: PathBuf::from("out"),
            x_max: 1_000_000,
            theta: Theta::STANDARD,
            seed: 0,
            nu: 0.7,
            m: 1,
            alpha: 0.73,
            lambda: 1.5,
            kappa: 1.2,
            block_c: 10.0,
            rh: false,
            beta_gap_budget: 0.05,
            contour_radius: 0.02,
            contour_nodes: 1024,
            sigma_grid: vec![0.6, 0.7, 0.8],
            ms_sigma: 0.8,
            ms_xcut: 1000.0,
            ms_t: vec![1000.0, 2000.0, 4000.0],
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse()
        .map_err(|_| Error::Argument(format!("{key}: not a number: {v:?}")))
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.parse()
        .map_err(|_| Error::Argument(format!("{key}: not an integer: {v:?}")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|s| parse_f64(key, s.trim()))
        .collect::<Result<Vec<f64>>>()
        .and_then(|xs| {
            if xs.is_empty() {
                Err(Error::Argument(format!("{key}: empty list")))
            } else {
                Ok(xs)
            }
        })
}

impl RunConfig {
    pub fn parse_str(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let mut theta_num = cfg.theta.num;
        let mut theta_den = cfg.theta.den;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Argument(format!("config line {}: expected key = value", i + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "theorem" => cfg.theorem = TheoremKind::parse(value)?,
                "multiset" => cfg.multiset = Some(PathBuf::from(value)),
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                "x_max" => cfg.x_max = parse_u64(key, value)?,
                "theta_num" => theta_num = parse_u64(key, value)? as u32,
                "theta_den" => theta_den = parse_u64(key, value)? as u32,
                "seed" => cfg.seed = parse_u64(key, value)?,
                "nu" => cfg.nu = parse_f64(key, value)?,
                "m" => cfg.m = parse_u64(key, value)?,
                "alpha" => cfg.alpha = parse_f64(key, value)?,
                "lambda" => cfg.lambda = parse_f64(key, value)?,
                "kappa" => cfg.kappa = parse_f64(key, value)?,
                "block_c" => cfg.block_c = parse_f64(key, value)?,
                "rh" => {
                    cfg.rh = match value {
                        "true" => true,
                        "false" => false,
                        _ => {
                            return Err(Error::Argument(format!(
                                "rh: expected true or false, got {value:?}"
                            )))
                        }
                    }
                }
                "beta_gap_budget" => cfg.beta_gap_budget = parse_f64(key, value)?,
                "contour_radius" => cfg.contour_radius = parse_f64(key, value)?,
                "contour_nodes" => cfg.contour_nodes = parse_u64(key, value)? as usize,
                "sigma_grid" => cfg.sigma_grid = parse_list(key, value)?,
                "ms_sigma" => cfg.ms_sigma = parse_f64(key, value)?,
                "ms_xcut" => cfg.ms_xcut = parse_f64(key, value)?,
                "ms_t" => cfg.ms_t = parse_list(key, value)?,
                unknown => {
                    return Err(Error::Argument(format!(
                        "config line {}: unknown key {unknown:?}",
                        i + 1
                    )))
                }
            }
        }
        cfg.theta = Theta::new(theta_num, theta_den)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        RunConfig::parse_str(&text)
    }

    fn validate(&self) -> Result<()> {
        if self.x_max < 4 {
            return Err(Error::Argument("x_max must be at least 4".into()));
        }
        if !(self.contour_radius > 0.0) || self.contour_nodes < 8 {
            return Err(Error::Argument(
                "contour_radius must be positive and contour_nodes at least 8".into(),
            ));
        }
        match self.theorem {
            TheoremKind::PNu => {
                let nu_max = 1.0 - self.theta.as_f64() / 2.0;
                if !(self.nu > 0.5 && self.nu <= nu_max) {
                    return Err(Error::Argument(format!(
                        "nu = {} outside (1/2, {nu_max}]",
                        self.nu
                    )));
                }
                if self.m == 0 {
                    return Err(Error::Argument("m must be positive".into()));
                }
            }
            TheoremKind::Main => {
                if !(self.alpha > 0.5 && self.alpha < crate::multiset::ALPHA_MAX) {
                    return Err(Error::Argument(format!(
                        "alpha = {} outside (1/2, 59/80)",
                        self.alpha
                    )));
                }
            }
            TheoremKind::Main3 => {
                if !(self.lambda > self.kappa && self.kappa > 1.0) {
                    return Err(Error::Argument(format!(
                        "need lambda > kappa > 1, got lambda = {}, kappa = {}",
                        self.lambda, self.kappa
                    )));
                }
            }
            TheoremKind::ZerosOnly => {
                if !(self.beta_gap_budget > 0.0) {
                    return Err(Error::Argument("beta_gap_budget must be positive".into()));
                }
            }
        }
        Ok(())
    }
}
