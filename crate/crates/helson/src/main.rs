//! Command-line front end. Exit codes: 0 all-pass, 1 verification failure,
//! 2 usage/config error, 3 resource/precision error. All numeric output is
//! printed with 17 significant digits. Environment: HELSON_THREADS (worker
//! count), HELSON_CAP (sieve cap).

use clap::{Args, Parser, Subcommand, ValueEnum};
use helson::config::RunConfig;
use helson::construct::{
    build_p_chi, build_p_nu, build_zeros_only, ConstructionLedger, EulerSupport, PChiMode,
};
use helson::continuation::ErrorProfile;
use helson::error::{Error, Result};
use helson::meansquare::{
    approx_meansquare, steinhaus_tail, translate_search, MeanSquareResult, SteinhausTail,
};
use helson::multiset::{
    assign_dyadic, gate_thm_main, gate_thm_main3, gate_thm_nonuniversal, SignedMultiset,
    ZerosOnlyMode,
};
use helson::pipeline::{self, rebuild_q, residue_report, run_pipeline, support_targets};
use helson::primes::{gap_scan, sieve_range, Theta};
use helson::report::{fmt17, fmt17c};
use num_complex::Complex64;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "helson", version, about = "Numerical laboratory for Helson zeta functions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Prime tables and block-window diagnostics.
    Primes {
        #[command(subcommand)]
        cmd: PrimesCmd,
    },
    /// Admissibility gates for prescribed zero/pole multisets.
    Multiset {
        #[command(subcommand)]
        cmd: MultisetCmd,
    },
    /// Build a prime support and character by inductive block chasing.
    Construct {
        #[command(subcommand)]
        cmd: ConstructCmd,
    },
    /// Evaluate the continued log zeta on points or a grid.
    Eval(EvalArgs),
    /// Verification suites over persisted artifacts.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Mean-square diagnostics of the continued prime series.
    Meansquare(MeansquareArgs),
    /// Budgeted searches.
    Search {
        #[command(subcommand)]
        cmd: SearchCmd,
    },
    /// Blaschke products over the prescribed multiset.
    Blaschke {
        #[command(subcommand)]
        cmd: BlaschkeCmd,
    },
    /// Full pipeline from a keyed config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Recompute a construction ledger from its support.
    Replay {
        #[arg(long)]
        support: PathBuf,
        #[arg(long)]
        ledger: PathBuf,
    },
}

#[derive(Subcommand)]
enum PrimesCmd {
    /// Sieve the primes in [lo, hi] and write one per line.
    Sieve {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Scan prime gaps and block-window counts on a log-spaced grid.
    Gapscan {
        #[arg(long)]
        xmax: u64,
        #[arg(long, default_value_t = 21)]
        theta_num: u32,
        #[arg(long, default_value_t = 40)]
        theta_den: u32,
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GateTheorem {
    Main,
    Main3,
    Nonuniversal,
}

#[derive(Subcommand)]
enum MultisetCmd {
    /// Check a multiset against one theorem's admissibility gate.
    Gate {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum)]
        theorem: GateTheorem,
        #[arg(long, default_value_t = 0.73)]
        alpha: f64,
        #[arg(long, default_value_t = 1.5)]
        lambda: f64,
        #[arg(long, default_value_t = 1.2)]
        kappa: f64,
        /// Count constant C for the Cramér-gap gate.
        #[arg(long, default_value_t = 10.0)]
        c: f64,
        /// Unit-window constant for the strip gate.
        #[arg(long, default_value_t = 1e12)]
        cb: f64,
        /// Density constant for the strip gate.
        #[arg(long, default_value_t = 1e12)]
        cc: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Use the conditional β < 1 strip for the zeros-only gate.
        #[arg(long)]
        rh: bool,
    },
}

#[derive(Args)]
struct ConstructCommon {
    #[arg(long, default_value_t = 21)]
    theta_num: u32,
    #[arg(long, default_value_t = 40)]
    theta_den: u32,
    #[arg(long)]
    x_max: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    ledger: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Regime {
    Main,
    Main3,
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Single prescribed real zero: support P_ν with χ ≡ 1.
    Pnu {
        #[arg(long)]
        nu: f64,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[command(flatten)]
        common: ConstructCommon,
    },
    /// General signed multiset in the strip or Cramér-gap regime.
    Pchi {
        #[arg(long)]
        multiset: PathBuf,
        #[arg(long, value_enum, default_value_t = Regime::Main)]
        regime: Regime,
        #[arg(long, default_value_t = 0.73)]
        alpha: f64,
        #[arg(long, default_value_t = 1.5)]
        lambda: f64,
        #[arg(long, default_value_t = 1.2)]
        kappa: f64,
        #[arg(long, default_value_t = 10.0)]
        block_c: f64,
        /// Draw primes from this base support instead of the sieve.
        #[arg(long)]
        base: Option<PathBuf>,
        #[command(flatten)]
        common: ConstructCommon,
    },
    /// Zeros-only construction (positive multiplicities).
    Zeros {
        #[arg(long)]
        multiset: PathBuf,
        #[arg(long)]
        rh: bool,
        #[arg(long, default_value_t = 0.05)]
        beta_gap_budget: f64,
        #[command(flatten)]
        common: ConstructCommon,
    },
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    support: PathBuf,
    /// Construction ledger; defaults to ledger.csv next to the support.
    #[arg(long)]
    ledger: Option<PathBuf>,
    #[arg(long)]
    multiset: Option<PathBuf>,
    /// Evaluation point sigma,t (repeatable).
    #[arg(long, value_parser = parse_at)]
    at: Vec<(f64, f64)>,
    /// File of sigma,t lines to evaluate in bulk.
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Winding numbers around every prescribed point.
    Residues {
        #[arg(long)]
        support: PathBuf,
        #[arg(long)]
        ledger: Option<PathBuf>,
        #[arg(long)]
        multiset: Option<PathBuf>,
        #[arg(long, default_value_t = 0.02)]
        radius: f64,
        #[arg(long, default_value_t = 1024)]
        nodes: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct MeansquareArgs {
    #[arg(long)]
    support: PathBuf,
    #[arg(long)]
    ledger: Option<PathBuf>,
    #[arg(long)]
    multiset: Option<PathBuf>,
    #[arg(long)]
    sigma: f64,
    #[arg(long)]
    xcut: f64,
    /// Sweep height T (repeatable).
    #[arg(long = "T", required = true)]
    t: Vec<f64>,
    /// Sample Steinhaus angles on the slice instead of the built character.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum SearchCmd {
    /// Vertical-translate approximation of a sampled zero-free target.
    Translate {
        #[arg(long)]
        support: PathBuf,
        /// Target file of sigma,t,re,im rows.
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        tau_max: f64,
        #[arg(long)]
        budget: usize,
    },
}

#[derive(Subcommand)]
enum BlaschkeCmd {
    /// Evaluate each atom of the product at one point.
    Eval {
        #[arg(long)]
        multiset: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_parser = parse_at)]
        at: (f64, f64),
    },
    /// Convergence condition Σ |m|(β−α)/(1+γ²).
    Condition {
        #[arg(long)]
        multiset: PathBuf,
        #[arg(long)]
        alpha: f64,
        /// Tail estimate for mass outside the finite set.
        #[arg(long)]
        tail: Option<f64>,
    },
    /// Evaluate the (optionally truncated) full product at one point.
    Product {
        #[arg(long)]
        multiset: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_parser = parse_at)]
        at: (f64, f64),
        /// Keep only the points with |γ| ≤ this height.
        #[arg(long, default_value_t = f64::INFINITY)]
        trunc_t: f64,
    },
}

fn parse_at(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected sigma,t, got {s:?}"))?;
    let sigma = a.trim().parse().map_err(|_| format!("bad sigma in {s:?}"))?;
    let t = b.trim().parse().map_err(|_| format!("bad t in {s:?}"))?;
    Ok((sigma, t))
}

fn sibling_ledger(support: &Path, explicit: Option<PathBuf>) -> PathBuf {
    explicit.unwrap_or_else(|| support.with_file_name("ledger.csv"))
}

fn load_artifacts(
    support: &Path,
    ledger: Option<PathBuf>,
    multiset: &Option<PathBuf>,
) -> Result<(EulerSupport, ConstructionLedger, Option<SignedMultiset>)> {
    let sup = EulerSupport::read(support)?;
    let led = ConstructionLedger::read_csv(&sibling_ledger(support, ledger))?;
    let z = match multiset {
        Some(p) => Some(SignedMultiset::read_csv(p)?),
        None => None,
    };
    Ok((sup, led, z))
}

fn print_construct_summary(support: &EulerSupport, ledger: &ConstructionLedger) {
    println!("mode: {}", support.mode.as_str());
    println!("primes: {}", support.entries.len());
    println!("blocks: {}", ledger.blocks.len());
    for (k, v) in &support.params {
        println!("param.{k}: {v}");
    }
}

fn write_meansquare_csv(out: &Path, rows: &[MeanSquareResult]) -> Result<()> {
    let mut text = String::from("# meansquare sigma,x_cut,t_max,samples,empirical,target,ratio\n");
    for r in rows {
        text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt17(r.sigma),
            fmt17(r.x_cut),
            fmt17(r.t_max),
            r.samples,
            fmt17(r.empirical),
            fmt17(r.target),
            fmt17(r.ratio)
        ));
    }
    std::fs::write(out, text)?;
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Primes { cmd } => match cmd {
            PrimesCmd::Sieve { lo, hi, out } => {
                let table = sieve_range(lo, hi)?;
                let mut text = format!("# primes lo={lo} hi={hi}\n");
                for &p in table.range(lo.saturating_sub(1), hi) {
                    text.push_str(&format!("{p}\n"));
                }
                std::fs::write(&out, text)?;
                println!("count: {}", table.count_in(lo.saturating_sub(1), hi));
                Ok(0)
            }
            PrimesCmd::Gapscan {
                xmax,
                theta_num,
                theta_den,
                points,
                out,
            } => {
                let theta = Theta::new(theta_num, theta_den)?;
                let scan = gap_scan(xmax, theta, points)?;
                let mut text =
                    format!("# gapscan xmax={xmax} theta={theta_num}/{theta_den} x,gap,window_count\n");
                for i in 0..scan.x_grid.len() {
                    text.push_str(&format!(
                        "{},{},{}\n",
                        scan.x_grid[i], scan.gap_at_x[i], scan.window_counts[i]
                    ));
                }
                std::fs::write(&out, text)?;
                println!("points: {}", scan.x_grid.len());
                Ok(0)
            }
        },
        Cmd::Multiset { cmd } => match cmd {
            MultisetCmd::Gate {
                file,
                theorem,
                alpha,
                lambda,
                kappa,
                c,
                cb,
                cc,
                eps,
                rh,
            } => {
                let z = SignedMultiset::read_csv(&file)?;
                let gate = match theorem {
                    GateTheorem::Main => gate_thm_main(&z, alpha, cb, cc, eps)?,
                    GateTheorem::Main3 => gate_thm_main3(&z, lambda, kappa, c)?,
                    GateTheorem::Nonuniversal => {
                        let mode = if rh {
                            ZerosOnlyMode::Rh
                        } else {
                            ZerosOnlyMode::Unconditional
                        };
                        gate_thm_nonuniversal(&z, mode)?
                    }
                };
                println!("condition: {}", gate.condition_id.as_str());
                println!("passed: {}", gate.passed);
                println!("margin: {}", fmt17(gate.margin));
                if let Some(w) = &gate.witness {
                    println!("witness: {w}");
                }
                Ok(if gate.passed { 0 } else { 1 })
            }
        },
        Cmd::Construct { cmd } => {
            let (support, ledger, common) = match cmd {
                ConstructCmd::Pnu { nu, m, common } => {
                    let theta = Theta::new(common.theta_num, common.theta_den)?;
                    let (s, l, _) = build_p_nu(nu, m, theta, common.x_max)?;
                    (s, l, common)
                }
                ConstructCmd::Pchi {
                    multiset,
                    regime,
                    alpha,
                    lambda,
                    kappa,
                    block_c,
                    base,
                    common,
                } => {
                    let z = SignedMultiset::read_csv(&multiset)?;
                    let theta = Theta::new(common.theta_num, common.theta_den)?;
                    let mode = match regime {
                        Regime::Main => PChiMode::ThmMain { alpha },
                        Regime::Main3 => PChiMode::ThmMain3 {
                            lambda,
                            kappa,
                            c: block_c,
                        },
                    };
                    let base_support = match base {
                        Some(p) => Some(EulerSupport::read(&p)?),
                        None => None,
                    };
                    let (s, l, _) = build_p_chi(&z, mode, theta, common.x_max, base_support.as_ref())?;
                    (s, l, common)
                }
                ConstructCmd::Zeros {
                    multiset,
                    rh,
                    beta_gap_budget,
                    common,
                } => {
                    let z = SignedMultiset::read_csv(&multiset)?;
                    let mode = if rh {
                        ZerosOnlyMode::Rh
                    } else {
                        ZerosOnlyMode::Unconditional
                    };
                    let asg = assign_dyadic(&z, mode, beta_gap_budget)?;
                    let (s, l, _) = build_zeros_only(&z, &asg, mode, common.x_max)?;
                    (s, l, common)
                }
            };
            support.write(&common.out)?;
            ledger.write_csv(&common.ledger)?;
            print_construct_summary(&support, &ledger);
            Ok(0)
        }
        Cmd::Eval(args) => {
            let (support, ledger, z) = load_artifacts(&args.support, args.ledger, &args.multiset)?;
            let q = rebuild_q(&support, z.as_ref())?;
            let mut points = args.at.clone();
            if let Some(grid) = &args.grid {
                points.extend(pipeline::read_grid(grid)?);
            }
            if points.is_empty() {
                return Err(Error::Argument(
                    "nothing to evaluate: give --at and/or --grid".into(),
                ));
            }
            pipeline::export_grid(&support, &q, &ledger, &points, &args.out)?;
            println!("rows: {}", points.len());
            Ok(0)
        }
        Cmd::Verify { cmd } => match cmd {
            VerifyCmd::Residues {
                support,
                ledger,
                multiset,
                radius,
                nodes,
                out,
            } => {
                let (support, ledger, z) = load_artifacts(&support, ledger, &multiset)?;
                let q = rebuild_q(&support, z.as_ref())?;
                let profile = ErrorProfile::new(&support, &q, &ledger)?;
                let targets = support_targets(&support, z.as_ref())?;
                let report = residue_report(&profile, &targets, radius, nodes)?;
                std::fs::write(&out, report.render())?;
                print!("{}", report.render());
                Ok(if report.all_passed() { 0 } else { 1 })
            }
        },
        Cmd::Meansquare(args) => {
            let (support, ledger, z) = load_artifacts(&args.support, args.ledger, &args.multiset)?;
            let mut rows = Vec::new();
            match args.seed {
                Some(seed) => {
                    let primes: Vec<u64> = support
                        .entries
                        .iter()
                        .map(|e| e.p)
                        .filter(|&p| (p as f64) > args.xcut)
                        .collect();
                    let tail = SteinhausTail::new(seed, &primes);
                    for &t_max in &args.t {
                        rows.push(steinhaus_tail(&tail, args.sigma, t_max)?);
                    }
                }
                None => {
                    let q = rebuild_q(&support, z.as_ref())?;
                    let profile = ErrorProfile::new(&support, &q, &ledger)?;
                    for &t_max in &args.t {
                        rows.push(approx_meansquare(&profile, args.sigma, args.xcut, t_max)?);
                    }
                }
            }
            write_meansquare_csv(&args.out, &rows)?;
            for r in &rows {
                println!("ratio.t{}: {}", r.t_max, fmt17(r.ratio));
            }
            Ok(0)
        }
        Cmd::Search { cmd } => match cmd {
            SearchCmd::Translate {
                support,
                target,
                tau_max,
                budget,
            } => {
                let sup = EulerSupport::read(&support)?;
                let rows = pipeline::read_target(&target)?;
                let x = sup.max_prime() as f64;
                let (best_tau, best, trace) = translate_search(&sup, x, &rows, tau_max, budget)?;
                println!("best_tau: {}", fmt17(best_tau));
                println!("best_distance: {}", fmt17(best));
                println!("evaluations: {}", trace.len());
                Ok(0)
            }
        },
        Cmd::Blaschke { cmd } => match cmd {
            BlaschkeCmd::Eval { multiset, alpha, at } => {
                let z = SignedMultiset::read_csv(&multiset)?;
                let s = Complex64::new(at.0, at.1);
                for p in z.points() {
                    let atom =
                        helson::blaschke::BlaschkeAtom::new(Complex64::new(p.beta, p.gamma), alpha)?;
                    println!(
                        "atom.{}+{}i: {}",
                        fmt17(p.beta),
                        fmt17(p.gamma),
                        fmt17c(atom.eval(s)?)
                    );
                }
                Ok(0)
            }
            BlaschkeCmd::Condition {
                multiset,
                alpha,
                tail,
            } => {
                let z = SignedMultiset::read_csv(&multiset)?;
                let (sum, converges) = helson::blaschke::blaschke_condition(&z, alpha, tail)?;
                println!("sum: {}", fmt17(sum));
                println!("converges: {converges}");
                Ok(0)
            }
            BlaschkeCmd::Product {
                multiset,
                alpha,
                at,
                trunc_t,
            } => {
                let z = SignedMultiset::read_csv(&multiset)?;
                let s = Complex64::new(at.0, at.1);
                let v = helson::blaschke::blaschke_product(&z, alpha, s, trunc_t)?;
                println!("value: {}", fmt17c(v.value));
                println!("tail_bound: {}", fmt17(v.tail_bound));
                Ok(0)
            }
        },
        Cmd::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let report = run_pipeline(&cfg)?;
            print!("{}", report.render());
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Cmd::Replay { support, ledger } => {
            let report = pipeline::replay_ledger(&support, &ledger)?;
            print!("{}", report.render());
            Ok(if report.all_passed() { 0 } else { 1 })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
