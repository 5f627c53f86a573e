//! `tdq` subcommands. Each returns a process exit code:
//! 0 ok, 1 io, 2 config, 3 no intersections, 4 unknown label,
//! 5 not transparent, 6 oracle validation failure.

use std::f64::consts::PI;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::entanglement::{
    big_theta, build_rho_f, negativity_closed_form, negativity_numeric, negativity_vs_r_sweep, write_sweep_csv,
};
use crate::fmt::g17;
use crate::oracle::validate_perturbative;
use crate::phase_integrals::{compute_m, layout_integrals, DetectorLayout, BOUNDARY_TOL};
use crate::search::{pair, search, SearchOutcome, TwoIntervalTrajectory};
use crate::tradeoff::{evaluate, TradeoffInputs};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NO_INTERSECTIONS: i32 = 3;
pub const EXIT_UNKNOWN_LABEL: i32 = 4;
pub const EXIT_NOT_TRANSPARENT: i32 = 5;
pub const EXIT_VALIDATION: i32 = 6;

/// Slope and per-halving shrink the oracle check demands.
pub const MIN_SLOPE: f64 = 2.7;
pub const MIN_SHRINK: f64 = 8.0;

#[derive(Debug, Parser)]
#[command(name = "tdq", about = "Transparent detector trajectories, gates and harvested entanglement")]
pub struct Cli {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads, 0 for automatic.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan for transparent cycles and write scan.csv, intersections.csv.
    Search,
    /// Chain labelled cycles and write trajectory.csv, cycle.json.
    Trajectory {
        #[arg(default_values_t = ["P1".to_string(), "P2".to_string()])]
        labels: Vec<String>,
    },
    /// Negativity of the configured field plus the squeezing sweep.
    Negativity,
    /// Gate time against decoherence time over a grid of |M| and r.
    Tradeoff,
    /// Compare exact evolution with second-order results.
    OracleCheck,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::InvalidGrid(_)
        | Error::InvalidFieldState(_)
        | Error::InvalidInputs(_)
        | Error::InadmissibleParams(_) => EXIT_CONFIG,
        Error::InsufficientIntersections(_) => EXIT_NO_INTERSECTIONS,
        Error::TransparencyRequired(_) | Error::TransparencyAssertionFailed(_) => EXIT_NOT_TRANSPARENT,
        Error::TruncationLeakage(_)
        | Error::StepNonConvergence(_)
        | Error::InitialStateFidelity(_)
        | Error::ValidationFailed(_) => EXIT_VALIDATION,
        _ => EXIT_IO,
    }
}

/// Parse `args` and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    std::fs::create_dir_all(&cli.out)?;
    pool.install(|| match &cli.command {
        Command::Search => cmd_search(&cfg, &cli.out),
        Command::Trajectory { labels } => cmd_trajectory(&cfg, &cli.out, labels),
        Command::Negativity => cmd_negativity(&cfg, &cli.out),
        Command::Tradeoff => cmd_tradeoff(&cfg, &cli.out),
        Command::OracleCheck => cmd_oracle_check(&cfg, &cli.out),
    })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn run_search(cfg: &RunConfig) -> Result<SearchOutcome> {
    let (_, _, outcome) = search(&cfg.grid(), cfg.search.polish_tol)?;
    Ok(outcome)
}

pub fn cmd_search(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let (field, _, outcome) = search(&cfg.grid(), cfg.search.polish_tol)?;
    field.write_csv(create(out, "scan.csv")?)?;
    outcome.write_csv(create(out, "intersections.csv")?)?;
    for x in &outcome.intersections {
        println!("{} v_c={} T_a={} residual={}", x.label, g17(x.v_c), g17(x.t_a), g17(x.residual));
    }
    for d in &outcome.diagnostics {
        eprintln!("polish: {d:?}");
    }
    if outcome.intersections.is_empty() {
        eprintln!("no transparent cycles in the window");
        return Ok(EXIT_NO_INTERSECTIONS);
    }
    Ok(EXIT_OK)
}

/// Resolve labels to a chained trajectory, or the exit code explaining why not.
fn resolve(cfg: &RunConfig, labels: &[String]) -> Result<std::result::Result<TwoIntervalTrajectory, i32>> {
    let outcome = run_search(cfg)?;
    if outcome.intersections.len() < 2 {
        eprintln!("need two intersections, found {}", outcome.intersections.len());
        return Ok(Err(EXIT_NO_INTERSECTIONS));
    }
    if labels.len() != 2 {
        return Err(Error::Config(format!("expected two labels, got {labels:?}")));
    }
    let mut picked = Vec::new();
    for l in labels {
        match outcome.by_label(l) {
            Some(x) => picked.push(x),
            None => {
                eprintln!("unknown label {l}");
                return Ok(Err(EXIT_UNKNOWN_LABEL));
            }
        }
    }
    let traj = pair(picked[0], picked[1])?;
    if traj.integrals.pm.norm() >= BOUNDARY_TOL {
        eprintln!("combined |I_pm| = {} is not transparent", g17(traj.integrals.pm.norm()));
        return Ok(Err(EXIT_NOT_TRANSPARENT));
    }
    Ok(Ok(traj))
}

pub fn cmd_trajectory(cfg: &RunConfig, out: &Path, labels: &[String]) -> Result<i32> {
    let traj = match resolve(cfg, labels)? {
        Ok(t) => t,
        Err(code) => return Ok(code),
    };
    let mut w = create(out, "trajectory.csv")?;
    use std::io::Write;
    writeln!(w, "tau,t,x")?;
    for [tau, t, x] in traj.cycle.sample_worldline(1000) {
        writeln!(w, "{},{},{}", g17(tau), g17(t), g17(x))?;
    }
    std::fs::write(out.join("cycle.json"), traj.cycle.to_json())?;
    let i = traj.integrals;
    println!("{} + {}: I_pp = {} {}i, |I_pm| = {}", traj.first, traj.second, g17(i.pp.re), g17(i.pp.im), g17(i.pm.norm()));
    if traj.trivially_cancelling {
        eprintln!("warning: signal integral cancels on this pairing");
    }
    Ok(EXIT_OK)
}

struct Resolved {
    traj: TwoIntervalTrajectory,
    m: crate::Complex64,
    layout: DetectorLayout,
}

fn resolve_with_m(cfg: &RunConfig) -> Result<std::result::Result<Resolved, i32>> {
    let traj = match resolve(cfg, &["P1".into(), "P2".into()])? {
        Ok(t) => t,
        Err(code) => return Ok(Err(code)),
    };
    let t = &cfg.trajectory;
    let layout = DetectorLayout::pair(cfg.coupling.offset);
    let m = compute_m(&traj.cycle, t.omega, t.k, &layout, true)?;
    Ok(Ok(Resolved { traj, m, layout }))
}

pub fn cmd_negativity(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let r = match resolve_with_m(cfg)? {
        Ok(r) => r,
        Err(code) => return Ok(code),
    };
    let t = &cfg.trajectory;
    let field = cfg.field.state()?;
    let lambda = cfg.coupling.lambda;
    let ints = layout_integrals(&r.traj.cycle, t.omega, t.k, &r.layout);
    let rho = build_rho_f(&ints[0], &ints[1], &field, lambda, r.m)?;
    std::fs::write(out.join("rho.json"), rho.to_json())?;
    let num = negativity_numeric(&rho);
    let ka = t.k * cfg.coupling.offset;
    let closed = negativity_closed_form(r.m, ints[0].pp, &field, lambda, ka)?;
    println!(
        "M = {} {}i, Theta = {}, negativity numeric = {}, closed form = {}",
        g17(r.m.re),
        g17(r.m.im),
        g17(closed.theta.unwrap_or(f64::NAN)),
        g17(num.negativity),
        g17(closed.negativity)
    );
    let thetas: Vec<f64> = (0..=8).map(|i| PI * i as f64 / 8.0).collect();
    let rs: Vec<f64> = (0..=200).map(|i| i as f64 * 0.01).collect();
    let rows = negativity_vs_r_sweep(r.m.norm(), ints[0].pp.norm(), &thetas, &rs, lambda);
    write_sweep_csv(&rows, create(out, "sweep.csv")?)?;
    Ok(EXIT_OK)
}

pub fn cmd_tradeoff(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let r = match resolve_with_m(cfg)? {
        Ok(r) => r,
        Err(code) => return Ok(code),
    };
    let t = &cfg.trajectory;
    let ip = r.traj.integrals.pp;
    let i2 = ip.norm_sqr();
    let theta = big_theta(r.m, ip, cfg.field.phi, t.k * cfg.coupling.offset);
    let mut ratios = vec![1.0, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0, 20.0, 50.0, 100.0, r.m.norm() / i2];
    ratios.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for ratio in ratios {
        for sq in [0.0, 0.25, 0.5, 1.0, 1.5, 2.0] {
            rows.push(evaluate(&TradeoffInputs {
                m_abs: ratio * i2,
                i_plus_abs: ip.norm(),
                r: sq,
                theta,
                lambda: cfg.coupling.lambda,
                t_cycle: r.traj.cycle.proper_duration(),
                n_star: cfg.tradeoff.n_star,
            })?);
        }
    }
    crate::tradeoff::write_csv(&rows, create(out, "tradeoff.csv")?)?;
    if let Some(row) = rows.iter().find(|x| x.inputs.m_abs == r.m.norm() && x.inputs.r == 0.0) {
        println!(
            "trajectory: |M|/I^2 = {}, ratio = {}, {}",
            g17(r.m.norm() / i2),
            g17(row.ratio),
            row.regime.as_str()
        );
    }
    Ok(EXIT_OK)
}

pub fn cmd_oracle_check(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let r = match resolve_with_m(cfg)? {
        Ok(r) => r,
        Err(code) => return Ok(code),
    };
    let t = &cfg.trajectory;
    let field = cfg.field.state()?;
    let report =
        validate_perturbative(&r.traj.cycle, t.omega, t.k, &r.layout, &field, &cfg.oracle.lambdas, &cfg.oracle.fock())?;
    std::fs::write(out.join("oracle.json"), report.to_json())?;
    println!("fit slope {}", g17(report.fit_slope));
    report.check(MIN_SLOPE, MIN_SHRINK)?;
    Ok(EXIT_OK)
}
