//! qmzi: config-driven runner for the q-deformed interferometer experiments.
//!
//! Every subcommand accepts `--config <file.json>` plus flag overrides whose
//! names mirror the config fields. Success prints the written artifact paths
//! (or the requested JSON) on stdout; failures print one machine-readable
//! JSON object on stderr and exit nonzero.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use qmzi_core::harness::{
    default_bayes_sweep, default_mean_grid, default_q_grid, emit_bayes_outputs,
    emit_qfi_outputs, run_bayes_experiment, run_qfi_sweep, selftest, ExperimentConfig,
    SplitRule, SweepSpec,
};
use qmzi_core::{
    build_state, q_cat_with, q_coherent_with, solve_amplitude, CatParity,
    DeformationParameter, Error, StateKind, TruncationPolicy,
};

#[derive(Parser, Debug)]
#[command(
    name = "qmzi",
    about = "Phase estimation in a Mach-Zehnder interferometer with q-deformed probe states",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quantum/classical Fisher information over a (q, per-mode mean) grid.
    QfiSweep {
        #[command(flatten)]
        overrides: Overrides,
        /// Per-mode mean photon numbers to sweep (comma separated).
        #[arg(long, value_delimiter = ',')]
        means: Vec<f64>,
        /// Deformation values to sweep (comma separated).
        #[arg(long, value_delimiter = ',')]
        qs: Vec<f64>,
    },
    /// QFI against the deformation parameter at a fixed total mean.
    QfiVsQ {
        #[command(flatten)]
        overrides: Overrides,
        /// Deformation values to sweep (comma separated).
        #[arg(long, value_delimiter = ',')]
        qs: Vec<f64>,
    },
    /// Bayesian Monte-Carlo phase estimation at each total mean.
    BayesSim {
        #[command(flatten)]
        overrides: Overrides,
        /// Total mean photon numbers to simulate (comma separated).
        #[arg(long, value_delimiter = ',')]
        mean_totals: Vec<f64>,
    },
    /// Print one probe state as a JSON record.
    StateInspect {
        /// State family: q_coherent, q_cat_even, or q_cat_odd.
        #[arg(long)]
        kind: String,
        /// Deformation parameter.
        #[arg(long, default_value_t = 0.9)]
        q: f64,
        /// Real part of the generator amplitude.
        #[arg(long, conflicts_with = "mean")]
        alpha: Option<f64>,
        /// Imaginary part of the generator amplitude.
        #[arg(long, default_value_t = 0.0, requires = "alpha")]
        alpha_im: f64,
        /// Solve for the amplitude reaching this photon mean instead.
        #[arg(long)]
        mean: Option<f64>,
        /// Fock cutoff.
        #[arg(long, default_value_t = 30)]
        n_max: usize,
    },
    /// Run the built-in oracle-equivalence suite.
    Selftest,
}

/// Flag overrides mirroring the config fields; unset flags keep the config
/// file value (or the default).
#[derive(Args, Debug, Default)]
struct Overrides {
    /// JSON config document; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Deformation parameter.
    #[arg(long)]
    q: Option<f64>,
    /// Cat parity: even or odd.
    #[arg(long)]
    parity: Option<String>,
    #[arg(long)]
    mean_a: Option<f64>,
    #[arg(long)]
    mean_b: Option<f64>,
    #[arg(long)]
    mean_total: Option<f64>,
    /// equal_split (each mode gets half) or per_mode (each mode gets the
    /// quoted value).
    #[arg(long)]
    split_rule: Option<String>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    phi_true: Option<f64>,
    /// Shots per estimation run.
    #[arg(long)]
    nu: Option<u32>,
    /// Estimation runs per operating point.
    #[arg(long)]
    runs: Option<u32>,
    /// Posterior grid size.
    #[arg(long)]
    grid_g: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long = "out")]
    out: Option<PathBuf>,
    /// Worker thread count (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Also render SVG plots.
    #[arg(long)]
    svg: bool,
}

fn parse_parity(s: &str) -> Result<CatParity, Error> {
    match s {
        "even" => Ok(CatParity::Even),
        "odd" => Ok(CatParity::Odd),
        other => Err(Error::InvalidConfig(format!(
            "parity must be even or odd, got {other:?}"
        ))),
    }
}

fn parse_split_rule(s: &str) -> Result<SplitRule, Error> {
    match s {
        "equal_split" => Ok(SplitRule::EqualSplit),
        "per_mode" => Ok(SplitRule::PerMode),
        other => Err(Error::InvalidConfig(format!(
            "split_rule must be equal_split or per_mode, got {other:?}"
        ))),
    }
}

fn parse_kind(s: &str) -> Result<(StateKind, Option<CatParity>), Error> {
    match s {
        "q_coherent" => Ok((StateKind::QCoherent, None)),
        "q_cat_even" => Ok((StateKind::QCatEven, Some(CatParity::Even))),
        "q_cat_odd" => Ok((StateKind::QCatOdd, Some(CatParity::Odd))),
        other => Err(Error::InvalidConfig(format!(
            "kind must be q_coherent, q_cat_even, or q_cat_odd, got {other:?}"
        ))),
    }
}

impl Overrides {
    fn into_config(self) -> Result<ExperimentConfig, Error> {
        if let Some(t) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        }
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.q {
            cfg.q = v;
        }
        if let Some(v) = &self.parity {
            cfg.parity = parse_parity(v)?;
        }
        if let Some(v) = self.mean_a {
            cfg.mean_a = Some(v);
        }
        if let Some(v) = self.mean_b {
            cfg.mean_b = Some(v);
        }
        if let Some(v) = self.mean_total {
            cfg.mean_total = Some(v);
        }
        if let Some(v) = &self.split_rule {
            cfg.split_rule = parse_split_rule(v)?;
        }
        if let Some(v) = self.n_max {
            cfg.n_max = v;
        }
        if let Some(v) = self.phi_true {
            cfg.phi_true = v;
        }
        if let Some(v) = self.nu {
            cfg.nu = v;
        }
        if let Some(v) = self.runs {
            cfg.runs = v;
        }
        if let Some(v) = self.grid_g {
            cfg.grid_g = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.out {
            cfg.output_dir = Some(v);
        }
        Ok(cfg)
    }
}

fn print_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn cmd_qfi_sweep(overrides: Overrides, means: Vec<f64>, qs: Vec<f64>) -> Result<(), Error> {
    let svg = overrides.svg;
    let mut cfg = overrides.into_config()?;
    let (mut sweep_means, mut sweep_qs) = match cfg.sweep.take() {
        Some(SweepSpec::QfiVsN { means, qs }) => (means, qs),
        _ => (default_mean_grid(), vec![0.5, 0.8, 0.9, 1.0]),
    };
    if !means.is_empty() {
        sweep_means = means;
    }
    if !qs.is_empty() {
        sweep_qs = qs;
    }
    cfg.sweep = Some(SweepSpec::QfiVsN { means: sweep_means, qs: sweep_qs });
    let rows = run_qfi_sweep(&cfg)?;
    print_paths(&emit_qfi_outputs(&rows, &cfg, "qfi_sweep", svg)?);
    Ok(())
}

fn cmd_qfi_vs_q(overrides: Overrides, qs: Vec<f64>) -> Result<(), Error> {
    let svg = overrides.svg;
    let mut cfg = overrides.into_config()?;
    let (mut sweep_qs, mut total) = match cfg.sweep.take() {
        Some(SweepSpec::QfiVsQ { qs, mean_total }) => (qs, mean_total),
        _ => (default_q_grid(), cfg.mean_total.unwrap_or(20.0)),
    };
    if !qs.is_empty() {
        sweep_qs = qs;
    }
    if let Some(t) = cfg.mean_total {
        total = t;
    }
    cfg.sweep = Some(SweepSpec::QfiVsQ { qs: sweep_qs, mean_total: total });
    let rows = run_qfi_sweep(&cfg)?;
    print_paths(&emit_qfi_outputs(&rows, &cfg, "qfi_vs_q", svg)?);
    Ok(())
}

fn cmd_bayes_sim(overrides: Overrides, mean_totals: Vec<f64>) -> Result<(), Error> {
    let svg = overrides.svg;
    let mut cfg = overrides.into_config()?;
    let mut totals = match cfg.sweep.take() {
        Some(SweepSpec::Bayes { mean_totals }) => mean_totals,
        _ => match cfg.mean_total {
            Some(t) => vec![t],
            None => match default_bayes_sweep() {
                SweepSpec::Bayes { mean_totals } => mean_totals,
                _ => unreachable!("bayes default sweep"),
            },
        },
    };
    if !mean_totals.is_empty() {
        totals = mean_totals;
    }
    cfg.sweep = Some(SweepSpec::Bayes { mean_totals: totals });
    let groups = run_bayes_experiment(&cfg)?;
    print_paths(&emit_bayes_outputs(&groups, &cfg, "bayes", svg)?);
    Ok(())
}

fn cmd_state_inspect(
    kind: String,
    q: f64,
    alpha: Option<f64>,
    alpha_im: f64,
    mean: Option<f64>,
    n_max: usize,
) -> Result<(), Error> {
    let (state_kind, parity) = parse_kind(&kind)?;
    let qp = DeformationParameter::new(q)?;
    let state = match (alpha, mean) {
        (Some(re), None) => {
            let a = Complex64::new(re, alpha_im);
            match parity {
                None => q_coherent_with(a, qp, n_max, TruncationPolicy::permissive())?,
                Some(p) => q_cat_with(a, qp, p, n_max, TruncationPolicy::permissive())?,
            }
        }
        (None, Some(target)) => {
            let a = solve_amplitude(target, qp, state_kind, n_max)?;
            build_state(state_kind, a, qp, n_max)?
        }
        (None, None) => {
            return Err(Error::InvalidConfig(
                "state-inspect needs --alpha or --mean".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    println!("{}", serde_json::to_string_pretty(&state)?);
    Ok(())
}

fn cmd_selftest() -> Result<bool, Error> {
    let results = selftest();
    let mut all_passed = true;
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", r.name, r.detail);
        all_passed &= r.passed;
    }
    Ok(all_passed)
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::QfiSweep { overrides, means, qs } => {
            cmd_qfi_sweep(overrides, means, qs)?;
            Ok(true)
        }
        Command::QfiVsQ { overrides, qs } => {
            cmd_qfi_vs_q(overrides, qs)?;
            Ok(true)
        }
        Command::BayesSim { overrides, mean_totals } => {
            cmd_bayes_sim(overrides, mean_totals)?;
            Ok(true)
        }
        Command::StateInspect { kind, q, alpha, alpha_im, mean, n_max } => {
            cmd_state_inspect(kind, q, alpha, alpha_im, mean, n_max)?;
            Ok(true)
        }
        Command::Selftest => cmd_selftest(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            let payload = serde_json::json!({
                "error": { "kind": e.kind(), "message": e.to_string() }
            });
            eprintln!("{payload}");
            ExitCode::FAILURE
        }
    }
}
