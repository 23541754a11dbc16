use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use heatlab::{commands, write_artifacts, CliError, RunConfig, EXIT_INVALID};

/// Numerical laboratory for u_t - Δu = h(t) g(u) with singular radial data.
#[derive(Parser)]
#[command(name = "heatlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predict existence and uniqueness from the analytic criteria.
    Classify(Common),
    /// Classify, solve and probe across a list of rho values.
    SweepRho(Common),
    /// Monotone iteration (or a direct sweep) for one problem.
    Solve(Common),
    /// Evaluate the non-existence probe Phi(tau).
    Probe(Common),
    /// Run the semigroup estimate battery.
    Verify(Common),
    /// Print critical values and hypothesis checks.
    Criteria(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// key=value config file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "N")]
    dimension: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long = "K")]
    k: Option<String>,
    #[arg(long)]
    a: Option<String>,
    /// nonlinearity, e.g. power:q=3, exp:alpha=1, oddpow:p=2, logpow:q=3,s=1
    #[arg(long)]
    f: Option<String>,
    /// time weight: one, t, weight:beta=<b>
    #[arg(long)]
    h: Option<String>,
    /// upper or lower
    #[arg(long)]
    side: Option<String>,
    /// whole or ball:R=<radius>
    #[arg(long)]
    domain: Option<String>,
    #[arg(long = "A")]
    amplification: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long = "max-iter")]
    max_iter: Option<String>,
    #[arg(long = "grid-M")]
    grid_m: Option<String>,
    #[arg(long = "T")]
    horizon: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    /// monotone or direct
    #[arg(long)]
    method: Option<String>,
    /// comma-separated rho values for sweep-rho
    #[arg(long = "rho-list")]
    rho_list: Option<String>,
    /// comma-separated probe times
    #[arg(long)]
    taus: Option<String>,
    #[arg(long)]
    c0: Option<String>,
    #[arg(long)]
    c1: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    cases: Option<String>,
    /// comma-separated subset of verify checks
    #[arg(long)]
    only: Option<String>,
    /// directory for report.json and CSV artifacts
    #[arg(long)]
    out: Option<PathBuf>,
    /// print the resolved configuration and exit
    #[arg(long)]
    print_config: bool,
    /// print one line per decision step to stderr
    #[arg(long)]
    explain: bool,
    /// add wall-clock seconds to the timings block
    #[arg(long)]
    wall_clock: bool,
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let flags = [
            ("N", &self.dimension),
            ("r", &self.r),
            ("rho", &self.rho),
            ("K", &self.k),
            ("a", &self.a),
            ("f", &self.f),
            ("h", &self.h),
            ("side", &self.side),
            ("domain", &self.domain),
            ("A", &self.amplification),
            ("tol", &self.tol),
            ("max_iter", &self.max_iter),
            ("grid_M", &self.grid_m),
            ("T", &self.horizon),
            ("steps", &self.steps),
            ("method", &self.method),
            ("rho_list", &self.rho_list),
            ("taus", &self.taus),
            ("c0", &self.c0),
            ("c1", &self.c1),
            ("seed", &self.seed),
            ("cases", &self.cases),
            ("only", &self.only),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                cfg.set(key, value)?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (common, name) = match &cli.command {
        Command::Classify(c) => (c, "classify"),
        Command::SweepRho(c) => (c, "sweep-rho"),
        Command::Solve(c) => (c, "solve"),
        Command::Probe(c) => (c, "probe"),
        Command::Verify(c) => (c, "verify"),
        Command::Criteria(c) => (c, "criteria"),
    };
    let cfg = common.resolve()?;
    if common.print_config {
        print!("{}", cfg.to_text());
        return Ok(0);
    }
    let wall = common.wall_clock;
    let outcome = match name {
        "classify" => commands::classify(&cfg, wall)?,
        "sweep-rho" => commands::sweep_rho(&cfg, wall)?,
        "solve" => commands::solve(&cfg, wall)?,
        "probe" => commands::probe(&cfg, wall)?,
        "verify" => commands::verify(&cfg, common.inject_fault.as_deref(), wall)?,
        _ => commands::criteria_report(&cfg, wall)?,
    };
    if common.explain {
        for line in &outcome.explanation {
            eprintln!("{line}");
        }
    }
    match &cfg.out {
        Some(dir) => write_artifacts(&outcome, dir)?,
        None => print!("{}", outcome.stdout),
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("heatlab: {e}");
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}
