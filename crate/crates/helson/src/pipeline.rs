//! Pipeline orchestration: gate → construct → residue verification → ledger
//! replay → mean-square suite, with every artifact persisted to the output
//! directory and a flat key:value report. Reports are reproducible from
//! config + inputs alone, byte-identical across reruns and thread counts.

use crate::config::{RunConfig, TheoremKind};
use crate::construct::{
    self, build_p_chi, build_p_nu, build_zeros_only, q_from_assignment, q_from_multiset,
    ConstructionLedger, EulerSupport, PChiMode, QFunction, QTerm, SupportMode,
};
use crate::continuation::{log_zeta_chi, residue_winding, Contour, ErrorProfile};
use crate::error::{Error, Result};
use crate::meansquare::approx_meansquare;
use crate::multiset::{
    assign_dyadic, gate_thm_main, gate_thm_main3, gate_thm_nonuniversal, DensityReport,
    SignedMultiset, ZerosOnlyMode,
};
use crate::report::{fmt17, VerificationReport};
use num_complex::Complex64;
use rayon::prelude::*;
use std::path::Path;

/// Worker count from HELSON_THREADS (default 1). Parallelism only ever
/// distributes independent whole computations, so the count never changes
/// numerical output.
pub fn thread_count() -> usize {
    std::env::var("HELSON_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

fn stage_err(stage: &str, artifacts: &[String], e: Error) -> Error {
    let done = if artifacts.is_empty() {
        String::new()
    } else {
        format!("; completed artifacts: {}", artifacts.join(", "))
    };
    let tag = |m: String| format!("stage {stage}: {m}{done}");
    match e {
        Error::Argument(m) => Error::Argument(tag(m)),
        Error::Resource(m) => Error::Resource(tag(m)),
        Error::Precision(m) => Error::Precision(tag(m)),
        Error::Inconclusive(m) => Error::Inconclusive(tag(m)),
        // These variants already carry their own context.
        other => other,
    }
}

fn need(support: &EulerSupport, key: &str) -> Result<f64> {
    support
        .param_f64(key)
        .ok_or_else(|| Error::Argument(format!("support header is missing {key}")))
}

/// Reconstruct the power-sum density q from a support header (and, for the
/// multiset-driven modes, the prescribed multiset): the headers are
/// self-describing, so evaluation needs no state beyond the artifacts.
pub fn rebuild_q(support: &EulerSupport, z: Option<&SignedMultiset>) -> Result<QFunction> {
    match support.mode {
        SupportMode::PNu => {
            let nu = need(support, "nu")?;
            let m = need(support, "m")? as i64;
            Ok(QFunction {
                terms: vec![QTerm {
                    rho: Complex64::new(nu, 0.0),
                    mult: m,
                    cutoff: 1.0,
                    paired_rho: None,
                }],
                conjugate_symmetric: true,
            })
        }
        SupportMode::PChi => {
            let z = z.ok_or_else(|| {
                Error::Argument("this support mode needs the prescribed multiset file".into())
            })?;
            let mode = match support.param("regime") {
                Some("main") => PChiMode::ThmMain {
                    alpha: need(support, "alpha")?,
                },
                Some("main3") => PChiMode::ThmMain3 {
                    lambda: need(support, "lambda")?,
                    kappa: need(support, "kappa")?,
                    c: need(support, "block_c")?,
                },
                other => {
                    return Err(Error::Argument(format!(
                        "unknown regime {other:?} in support header"
                    )))
                }
            };
            Ok(q_from_multiset(z, &mode))
        }
        SupportMode::ZerosOnly => {
            let z = z.ok_or_else(|| {
                Error::Argument("this support mode needs the prescribed multiset file".into())
            })?;
            let mode = match support.param("zeros_mode") {
                Some("unconditional") => ZerosOnlyMode::Unconditional,
                Some("rh") => ZerosOnlyMode::Rh,
                other => {
                    return Err(Error::Argument(format!(
                        "unknown zeros_mode {other:?} in support header"
                    )))
                }
            };
            let budget = need(support, "beta_gap_budget")?;
            let asg = assign_dyadic(z, mode, budget)?;
            Ok(q_from_assignment(z, &asg))
        }
    }
}

fn record_gate(report: &mut VerificationReport, gate: &DensityReport) {
    report.put("gate.condition", gate.condition_id.as_str());
    report.put_f64("gate.margin", gate.margin);
    report.check(
        "gate",
        gate.passed,
        gate.margin,
        0.0,
        gate.witness.as_deref().unwrap_or("admissible"),
    );
}

/// Prescribed (point, multiplicity) targets for residue verification.
fn prescribed_points(config: &RunConfig, z: Option<&SignedMultiset>) -> Vec<(Complex64, f64)> {
    match config.theorem {
        TheoremKind::PNu => vec![(Complex64::new(config.nu, 0.0), config.m as f64)],
        _ => z
            .map(|z| {
                z.points()
                    .iter()
                    .map(|p| (Complex64::new(p.beta, p.gamma), p.mult as f64))
                    .collect()
            })
            .unwrap_or_default(),
    }
}

/// Same targets, derived from persisted artifacts instead of a config.
pub fn support_targets(
    support: &EulerSupport,
    z: Option<&SignedMultiset>,
) -> Result<Vec<(Complex64, f64)>> {
    if let Some(z) = z {
        return Ok(z
            .points()
            .iter()
            .map(|p| (Complex64::new(p.beta, p.gamma), p.mult as f64))
            .collect());
    }
    if support.mode == SupportMode::PNu {
        return Ok(vec![(
            Complex64::new(need(support, "nu")?, 0.0),
            need(support, "m")?,
        )]);
    }
    Err(Error::Argument(
        "this support mode needs the prescribed multiset file".into(),
    ))
}

/// Winding numbers of the continued series around each target point, one
/// isolation-checked contour per point. Contours are distributed over
/// HELSON_THREADS workers; results keep target order, so the worker count
/// never changes output.
pub fn residue_suite(
    profile: &ErrorProfile,
    targets: &[(Complex64, f64)],
    radius: f64,
    nodes: usize,
) -> Result<Vec<f64>> {
    let poles: Vec<Complex64> = profile
        .q
        .terms
        .iter()
        .flat_map(|t| std::iter::once(t.rho).chain(t.paired_rho))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    let windings: Vec<Result<f64>> = pool.install(|| {
        targets
            .par_iter()
            .map(|&(rho, _)| {
                let contour = Contour::new(rho, radius, nodes)?;
                contour.check_isolation(&poles, &[rho])?;
                residue_winding(profile, &contour)
            })
            .collect()
    });
    windings.into_iter().collect()
}

/// Render the residue suite as pass/fail checks against the ±0.05 band.
pub fn residue_report(
    profile: &ErrorProfile,
    targets: &[(Complex64, f64)],
    radius: f64,
    nodes: usize,
) -> Result<VerificationReport> {
    let windings = residue_suite(profile, targets, radius, nodes)?;
    let mut report = VerificationReport::new();
    report.put_f64("contour.radius", radius);
    report.put("contour.nodes", nodes.to_string());
    for ((rho, mult), w) in targets.iter().zip(windings) {
        let id = format!("winding.{}+{}i", fmt17(rho.re), fmt17(rho.im));
        report.check(&id, (w - mult).abs() <= 0.05, w, *mult, "argument-principle count");
    }
    Ok(report)
}

/// Full verification pipeline. Gate failure is a reported (not raised)
/// verification failure; any other stage error aborts with the stage name.
pub fn run_pipeline(config: &RunConfig) -> Result<VerificationReport> {
    std::fs::create_dir_all(&config.out_dir)?;
    let mut artifacts: Vec<String> = Vec::new();
    let mut report = VerificationReport::new();
    report.put("config.theorem", config.theorem.as_str());
    report.put("config.x_max", config.x_max.to_string());
    report.put("config.seed", config.seed.to_string());
    report.put_f64("config.contour_radius", config.contour_radius);
    report.put("config.contour_nodes", config.contour_nodes.to_string());

    let finish = |report: &VerificationReport, config: &RunConfig| -> Result<()> {
        std::fs::write(config.out_dir.join("report.txt"), report.render())?;
        Ok(())
    };

    // Stage: gate.
    let z: Option<SignedMultiset> = match &config.multiset {
        Some(path) => Some(SignedMultiset::read_csv(path).map_err(|e| stage_err("gate", &artifacts, e))?),
        None => None,
    };
    let need_z = |z: &Option<SignedMultiset>| -> Result<SignedMultiset> {
        z.clone().ok_or_else(|| {
            Error::Argument("this theorem needs a multiset file in the config".into())
        })
    };
    let gate = (|| -> Result<Option<DensityReport>> {
        match config.theorem {
            TheoremKind::PNu => Ok(None),
            TheoremKind::Main => Ok(Some(gate_thm_main(
                &need_z(&z)?,
                config.alpha,
                1e12,
                1e12,
                0.5,
            )?)),
            TheoremKind::Main3 => Ok(Some(gate_thm_main3(
                &need_z(&z)?,
                config.lambda,
                config.kappa,
                config.block_c,
            )?)),
            TheoremKind::ZerosOnly => {
                let mode = if config.rh {
                    ZerosOnlyMode::Rh
                } else {
                    ZerosOnlyMode::Unconditional
                };
                Ok(Some(gate_thm_nonuniversal(&need_z(&z)?, mode)?))
            }
        }
    })()
    .map_err(|e| stage_err("gate", &artifacts, e))?;
    match &gate {
        Some(g) => {
            record_gate(&mut report, g);
            if !g.passed {
                finish(&report, config)?;
                return Ok(report);
            }
        }
        None => {
            // P_ν admissibility was already enforced when the config loaded.
            let margin = 1.0 - config.theta.as_f64() / 2.0 - config.nu;
            report.check("gate", true, margin, 0.0, "admissible");
        }
    }
    if config.theorem != TheoremKind::PNu && z.as_ref().map_or(true, |z| z.is_empty()) {
        report.check("pipeline.vacuous", true, 0.0, 0.0, "empty multiset; nothing to construct");
        finish(&report, config)?;
        return Ok(report);
    }

    // Stage: construct.
    let (support, ledger, q) = (|| -> Result<(EulerSupport, ConstructionLedger, QFunction)> {
        match config.theorem {
            TheoremKind::PNu => build_p_nu(config.nu, config.m, config.theta, config.x_max),
            TheoremKind::Main => build_p_chi(
                z.as_ref().unwrap(),
                PChiMode::ThmMain {
                    alpha: config.alpha,
                },
                config.theta,
                config.x_max,
                None,
            ),
            TheoremKind::Main3 => build_p_chi(
                z.as_ref().unwrap(),
                PChiMode::ThmMain3 {
                    lambda: config.lambda,
                    kappa: config.kappa,
                    c: config.block_c,
                },
                config.theta,
                config.x_max,
                None,
            ),
            TheoremKind::ZerosOnly => {
                let mode = if config.rh {
                    ZerosOnlyMode::Rh
                } else {
                    ZerosOnlyMode::Unconditional
                };
                let asg = assign_dyadic(z.as_ref().unwrap(), mode, config.beta_gap_budget)?;
                build_zeros_only(z.as_ref().unwrap(), &asg, mode, config.x_max)
            }
        }
    })()
    .map_err(|e| stage_err("construct", &artifacts, e))?;
    support
        .write(&config.out_dir.join("support.txt"))
        .map_err(|e| stage_err("construct", &artifacts, e))?;
    artifacts.push("support.txt".into());
    ledger
        .write_csv(&config.out_dir.join("ledger.csv"))
        .map_err(|e| stage_err("construct", &artifacts, e))?;
    artifacts.push("ledger.csv".into());
    report.put("construct.primes", support.entries.len().to_string());
    report.put("construct.blocks", ledger.blocks.len().to_string());
    report.put("construct.x_last", ledger.last_boundary().to_string());
    for key in ["c_sep", "c_led", "c_qp", "growth_c", "growth_g"] {
        if let Some(v) = support.param_f64(key) {
            report.put_f64(&format!("construct.{key}"), v);
        }
    }

    let profile = ErrorProfile::new(&support, &q, &ledger)
        .map_err(|e| stage_err("verify", &artifacts, e))?;

    // Stage: verify (winding number at every prescribed point).
    let targets = prescribed_points(config, z.as_ref());
    let windings = residue_suite(
        &profile,
        &targets,
        config.contour_radius,
        config.contour_nodes,
    )
    .map_err(|e| stage_err("verify", &artifacts, e))?;
    for ((rho, mult), w) in targets.iter().zip(windings) {
        let id = format!("winding.{}+{}i", fmt17(rho.re), fmt17(rho.im));
        report.check(&id, (w - mult).abs() <= 0.05, w, *mult, "argument-principle count");
    }

    // Stage: replay.
    let replayed =
        construct::replay(&support, &ledger).map_err(|e| stage_err("replay", &artifacts, e))?;
    report.entries.extend(replayed.entries);
    report.checks.extend(replayed.checks);

    // Stage: meansquare.
    for &t_max in &config.ms_t {
        let ms = approx_meansquare(&profile, config.ms_sigma, config.ms_xcut, t_max)
            .map_err(|e| stage_err("meansquare", &artifacts, e))?;
        let id = format!("meansquare.t{t_max}");
        report.put_f64(&format!("{id}.empirical"), ms.empirical);
        report.put_f64(&format!("{id}.target"), ms.target);
        report.check(
            &id,
            ms.ratio >= 0.5 && ms.ratio <= 2.0,
            ms.ratio,
            2.0,
            "empirical/target mean square",
        );
    }

    finish(&report, config)?;
    Ok(report)
}

/// Evaluate log ζ_{χ;P} on a list of (σ, t) points and write values.csv rows
/// `sigma,t,re,im,tail_bound`. Per-point failures become flagged rows with
/// nan values and the error appended as a comment, never aborts.
pub fn export_grid(
    support: &EulerSupport,
    q: &QFunction,
    ledger: &ConstructionLedger,
    points: &[(f64, f64)],
    out: &Path,
) -> Result<()> {
    let profile = ErrorProfile::new(support, q, ledger)?;
    let mut text = String::from("# values sigma,t,re,im,tail_bound\n");
    for &(sigma, t) in points {
        let s = Complex64::new(sigma, t);
        match log_zeta_chi(&profile, s, profile.x_top) {
            Ok(v) => text.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt17(sigma),
                fmt17(t),
                fmt17(v.value.re),
                fmt17(v.value.im),
                fmt17(v.tail_bound)
            )),
            Err(e) => text.push_str(&format!(
                "{},{},nan,nan,nan # {e}\n",
                fmt17(sigma),
                fmt17(t)
            )),
        }
    }
    std::fs::write(out, text)?;
    Ok(())
}

/// Parse a grid file of `sigma,t` lines ('#' comments allowed).
pub fn read_grid(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)?;
    let bad = |reason: String| Error::Parse {
        path: path.display().to_string(),
        reason,
    };
    let mut points = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split(',').map(str::trim);
        let sigma: f64 = it
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(format!("expected sigma,t in {line:?}")))?;
        let t: f64 = it
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(format!("expected sigma,t in {line:?}")))?;
        points.push((sigma, t));
    }
    Ok(points)
}

/// Parse a target file of `sigma,t,re,im` lines into (s, value) samples.
pub fn read_target(path: &Path) -> Result<Vec<(Complex64, Complex64)>> {
    let text = std::fs::read_to_string(path)?;
    let bad = |reason: String| Error::Parse {
        path: path.display().to_string(),
        reason,
    };
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad(format!("expected sigma,t,re,im in {line:?}")))?;
        if vals.len() != 4 {
            return Err(bad(format!("expected 4 fields in {line:?}")));
        }
        rows.push((
            Complex64::new(vals[0], vals[1]),
            Complex64::new(vals[2], vals[3]),
        ));
    }
    Ok(rows)
}

/// Re-run the ledger verification from persisted artifacts.
pub fn replay_ledger(support_path: &Path, ledger_path: &Path) -> Result<VerificationReport> {
    let support = EulerSupport::read(support_path)?;
    let ledger = ConstructionLedger::read_csv(ledger_path)?;
    construct::replay(&support, &ledger)
}
