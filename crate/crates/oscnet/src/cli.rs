//! Scenario-driven command-line frontend.
//!
//! Subcommands: `eigen`, `simulate`, `msf`, `floquet`, `experiment`.
//! Values resolve as flag > config file > built-in default. Exit codes:
//! 0 success, 1 configuration/usage error, 2 numerical failure.

use std::fmt;
use std::fs;
use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use crate::config::{parse_config, GraphSection, ScenarioConfig};
use crate::error::{Error, Result};
use crate::floquet::{
    build_transform, msf_scan, multipliers, state_transition, stability_verdict,
};
use crate::graph::{paper_network, Graph, DEFAULT_SPECTRUM_TOL};
use crate::integrate::{find_limit_cycle, simulate_network, IntegratorConfig, LimitCycleOptions};
use crate::models::{CouplingSpec, KappaSchedule, VdpParams};
use crate::output::{
    write_msf_csv, write_spectrum_csv, write_svg_polyline, write_sync_csv, write_trajectory_csv,
};
use crate::sync::{run_remote_sync_experiment, sync_error, RemoteSyncExperiment};

#[derive(Parser, Debug)]
#[command(
    name = "oscnet",
    version,
    about = "Coupled-oscillator network simulation and synchronization stability analysis"
)]
pub struct Cli {
    /// Scenario config file (INI-style: [section] headers, key = value lines)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Primary CSV output path (overrides the config [outputs] entry)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also write a single-curve SVG plot to this path
    #[arg(long, global = true, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// Seed for reproducible initial conditions
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Laplacian eigenvalues of the configured graph
    Eigen(EigenArgs),
    /// Integrate the coupled network and write the trajectory
    Simulate(SimulateArgs),
    /// Master-stability scan over a coupling-gain grid
    Msf(MsfArgs),
    /// Monodromy, Floquet spectrum, and periodic-transform report
    Floquet(FloquetArgs),
    /// Remote-synchronization activation experiment on the preset network
    Experiment(ExperimentArgs),
}

#[derive(clap::Args, Debug, Default)]
pub struct EigenArgs {
    /// Named preset graph (`paper-network`), bypassing the config graph
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
}

#[derive(clap::Args, Debug, Default)]
pub struct SimulateArgs {
    /// Named preset graph (`paper-network`), bypassing the config graph
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Node damping coefficient (> 0)
    #[arg(long)]
    pub mu: Option<f64>,
    /// Integration step
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time
    #[arg(long)]
    pub t_end: Option<f64>,
}

#[derive(clap::Args, Debug, Default)]
pub struct MsfArgs {
    /// Node damping coefficient (> 0)
    #[arg(long)]
    pub mu: Option<f64>,
    /// Laplacian eigenvalue entering the shift -kappa*lambda
    /// (default: the largest eigenvalue of the configured graph)
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Gain grid as start:end:step, e.g. 0:1:0.05
    #[arg(long, value_name = "A:B:STEP")]
    pub kappa: Option<String>,
    /// Integration step
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(clap::Args, Debug, Default)]
pub struct FloquetArgs {
    /// Node damping coefficient (> 0)
    #[arg(long)]
    pub mu: Option<f64>,
    /// Constant diagonal shift added to the variational matrix (default 0)
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// With --lambda: use the shift -kappa*lambda instead of --gamma
    #[arg(long)]
    pub kappa: Option<f64>,
    /// With --kappa: use the shift -kappa*lambda instead of --gamma
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Integration step
    #[arg(long)]
    pub dt: Option<f64>,
    /// Also report the mode-by-mode network verdict at this gain
    #[arg(long)]
    pub verdict_kappa: Option<f64>,
}

#[derive(clap::Args, Debug, Default)]
pub struct ExperimentArgs {
    /// Named preset graph; the experiment always runs on `paper-network`
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Gain applied from t_switch onwards
    #[arg(long)]
    pub kappa_on: Option<f64>,
    /// Activation time of the coupling gain
    #[arg(long)]
    pub t_switch: Option<f64>,
    /// Final time
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Integration step
    #[arg(long)]
    pub dt: Option<f64>,
    /// Synchronization threshold for the sync-time readout
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Node damping coefficient (> 0)
    #[arg(long)]
    pub mu: Option<f64>,
}

/// What a command ran, what it wrote, and the key numbers, printed as
/// aligned key-value text.
#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub command: String,
    pub wall_seconds: f64,
    pub outputs: Vec<PathBuf>,
    pub entries: Vec<(String, String)>,
}

impl RunSummary {
    fn new(command: &str) -> Self {
        RunSummary { command: command.to_string(), ..RunSummary::default() }
    }

    fn push(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.entries.push((key.into(), value.to_string()));
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .entries
            .iter()
            .map(|(k, _)| k.len())
            .chain(["command".len(), "wall_time_s".len(), "output".len()])
            .max()
            .unwrap_or(8);
        writeln!(f, "{:<width$}  {}", "command", self.command)?;
        for (key, value) in &self.entries {
            writeln!(f, "{key:<width$}  {value}")?;
        }
        for path in &self.outputs {
            writeln!(f, "{:<width$}  {}", "output", path.display())?;
        }
        writeln!(f, "{:<width$}  {:.3}", "wall_time_s", self.wall_seconds)
    }
}

/// Parse the config (when given), apply global overrides, dispatch.
pub fn run(cli: &Cli) -> Result<RunSummary> {
    let start = Instant::now();
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            parse_config(&text)?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let mut summary = match &cli.command {
        Command::Eigen(args) => cmd_eigen(&cfg, args, cli)?,
        Command::Simulate(args) => cmd_simulate(&cfg, args, cli)?,
        Command::Msf(args) => cmd_msf(&cfg, args, cli)?,
        Command::Floquet(args) => cmd_floquet(&cfg, args, cli)?,
        Command::Experiment(args) => cmd_experiment(&cfg, args, cli)?,
    };
    summary.wall_seconds = start.elapsed().as_secs_f64();
    Ok(summary)
}

fn resolve_graph(cfg: &ScenarioConfig, preset: &Option<String>) -> Result<Graph> {
    match preset.as_deref() {
        Some("paper-network") => Ok(paper_network()),
        Some(other) => Err(Error::Config(format!(
            "unknown preset `{other}` (expected `paper-network`)"
        ))),
        None => cfg.graph.build(),
    }
}

fn create_file(path: &Path) -> Result<File> {
    File::create(path)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn write_svg_if_requested(
    cli: &Cli,
    summary: &mut RunSummary,
    title: &str,
    x_label: &str,
    y_label: &str,
    points: &[(f64, f64)],
) -> Result<()> {
    if let Some(path) = &cli.svg {
        let mut file = create_file(path)?;
        write_svg_polyline(&mut file, title, x_label, y_label, points)?;
        summary.outputs.push(path.clone());
    }
    Ok(())
}

fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im < 0.0 {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

pub fn cmd_eigen(cfg: &ScenarioConfig, args: &EigenArgs, cli: &Cli) -> Result<RunSummary> {
    let graph = resolve_graph(cfg, &args.preset)?;
    let report = graph.spectrum(DEFAULT_SPECTRUM_TOL)?;
    let mut summary = RunSummary::new("eigen");
    summary.push("nodes", graph.n());
    summary.push("edges", graph.edges().len());
    summary.push("connected", graph.is_connected());
    for (i, lambda) in report.eigenvalues.iter().enumerate() {
        summary.push(format!("lambda_{}", i + 1), lambda);
    }
    summary.push("algebraic_connectivity", report.algebraic_connectivity);

    let out_path = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.out_spectrum));
    let mut file = create_file(&out_path)?;
    write_spectrum_csv(&mut file, &report)?;
    summary.outputs.push(out_path);

    let points: Vec<(f64, f64)> = report
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| (i as f64, l))
        .collect();
    write_svg_if_requested(cli, &mut summary, "Laplacian spectrum", "index", "eigenvalue", &points)?;
    Ok(summary)
}

pub fn cmd_simulate(cfg: &ScenarioConfig, args: &SimulateArgs, cli: &Cli) -> Result<RunSummary> {
    let graph = resolve_graph(cfg, &args.preset)?;
    let p = VdpParams::new(args.mu.unwrap_or(cfg.mu))?;
    let schedule = KappaSchedule::new(cfg.kappa_segments.clone())?;
    let coupling = CouplingSpec::identity(schedule);
    let int_cfg = IntegratorConfig::new(
        args.dt.unwrap_or(cfg.dt),
        args.t_end.unwrap_or(cfg.t_end),
        cfg.record_stride,
    )?;
    let x0 = crate::sync::seeded_initial_states(graph.n(), cfg.seed);
    let traj = simulate_network(&graph, &coupling, p, &x0, &int_cfg)?;

    let mut summary = RunSummary::new("simulate");
    summary.push("nodes", graph.n());
    summary.push("mu", p.mu());
    summary.push("dt", int_cfg.dt);
    summary.push("t_end", int_cfg.t_end);
    summary.push("seed", cfg.seed);
    summary.push("records", traj.len());
    if graph.n() >= 2 {
        let series = sync_error(&traj);
        summary.push("final_sync_error", series.last().map(|&(_, e)| e).unwrap_or(0.0));
    }

    let out_path = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.out_trajectory));
    let mut file = create_file(&out_path)?;
    write_trajectory_csv(&mut file, &traj)?;
    summary.outputs.push(out_path);

    let points: Vec<(f64, f64)> =
        traj.times.iter().zip(&traj.states).map(|(&t, s)| (t, s[0])).collect();
    write_svg_if_requested(cli, &mut summary, "node 1 position", "t", "x1_1", &points)?;
    Ok(summary)
}

/// `start:end:step`, inclusive of the end point (within a relative 1e-9).
fn parse_kappa_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "kappa grid `{text}` must look like start:end:step"
        )));
    }
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("kappa grid component `{s}` is not a number")))
    };
    let (start, end, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    if !(step > 0.0) {
        return Err(Error::Config(format!("kappa grid step must be > 0, got {step}")));
    }
    if end < start {
        return Err(Error::Config(format!(
            "kappa grid end {end} must not be below start {start}"
        )));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

pub fn cmd_msf(cfg: &ScenarioConfig, args: &MsfArgs, cli: &Cli) -> Result<RunSummary> {
    let p = VdpParams::new(args.mu.unwrap_or(cfg.mu))?;
    let dt = args.dt.unwrap_or(cfg.dt);
    let lambda = match args.lambda {
        Some(l) => l,
        None => {
            let graph = cfg.graph.build()?;
            let report = graph.spectrum(DEFAULT_SPECTRUM_TOL)?;
            *report
                .eigenvalues
                .last()
                .expect("graph has at least one eigenvalue")
        }
    };
    let grid = parse_kappa_grid(args.kappa.as_deref().unwrap_or("0:1:0.05"))?;
    let orbit = find_limit_cycle(p, &LimitCycleOptions { dt, ..LimitCycleOptions::default() })?;
    let curve = msf_scan(&orbit, p, lambda, &grid, dt)?;

    let mut summary = RunSummary::new("msf");
    summary.push("mu", p.mu());
    summary.push("period_T", orbit.period);
    summary.push("lambda", lambda);
    summary.push("grid_points", curve.points.len());
    if let (Some(first), Some(last)) = (curve.points.first(), curve.points.last()) {
        summary.push("max_multiplier_at_start", first.max_multiplier);
        summary.push("max_multiplier_at_end", last.max_multiplier);
        summary.push("max_exponent_at_end", last.max_exponent);
    }

    let out_path = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.out_msf));
    let mut file = create_file(&out_path)?;
    write_msf_csv(&mut file, &curve)?;
    summary.outputs.push(out_path);

    let points: Vec<(f64, f64)> =
        curve.points.iter().map(|pt| (pt.kappa, pt.max_multiplier)).collect();
    write_svg_if_requested(
        cli,
        &mut summary,
        "master stability: max Floquet multiplier vs coupling gain",
        "kappa",
        "max |multiplier|",
        &points,
    )?;
    Ok(summary)
}

pub fn cmd_floquet(cfg: &ScenarioConfig, args: &FloquetArgs, cli: &Cli) -> Result<RunSummary> {
    let p = VdpParams::new(args.mu.unwrap_or(cfg.mu))?;
    let dt = args.dt.unwrap_or(cfg.dt);
    let gamma = match (args.gamma, args.kappa, args.lambda) {
        (Some(g), None, None) => g,
        (None, Some(k), Some(l)) => -k * l,
        (None, None, None) => 0.0,
        _ => {
            return Err(Error::Config(
                "give either --gamma or both --kappa and --lambda, not a mixture".into(),
            ))
        }
    };
    let orbit = find_limit_cycle(p, &LimitCycleOptions { dt, ..LimitCycleOptions::default() })?;
    let monodromy = state_transition(&orbit, p, gamma, dt)?;
    let spectrum = multipliers(&monodromy);
    let transform = build_transform(&monodromy, &spectrum)?;
    let (det, exp_integral) = monodromy.liouville();

    let mut summary = RunSummary::new("floquet");
    summary.push("mu", p.mu());
    summary.push("gamma", gamma);
    summary.push("period_T", orbit.period);
    summary.push("multiplier_1", format_complex(spectrum.multipliers[0]));
    summary.push("multiplier_2", format_complex(spectrum.multipliers[1]));
    summary.push("exponent_1", format_complex(spectrum.exponents[0]));
    summary.push("exponent_2", format_complex(spectrum.exponents[1]));
    summary.push("max_multiplier", spectrum.max_multiplier_magnitude());
    summary.push("max_exponent", spectrum.max_exponent_real());
    summary.push("liouville_det", det);
    summary.push("liouville_exp_integral", exp_integral);
    summary.push("liouville_rel_error", ((det - exp_integral) / exp_integral).abs());
    summary.push("j_11", format_complex(transform.j_matrix[(0, 0)]));
    summary.push("j_12", format_complex(transform.j_matrix[(0, 1)]));
    summary.push("j_21", format_complex(transform.j_matrix[(1, 0)]));
    summary.push("j_22", format_complex(transform.j_matrix[(1, 1)]));
    summary.push("p_periodicity_error", transform.p_periodicity_error());

    if let Some(kappa) = args.verdict_kappa {
        let graph = cfg.graph.build()?;
        let report = stability_verdict(&graph, p, kappa, &orbit, dt)?;
        summary.push("verdict_kappa", kappa);
        summary.push("verdict_stable", report.stable);
        for mode in &report.modes {
            summary.push(
                format!("mode_{}_lambda_{}", mode.mode, mode.lambda),
                format!(
                    "max_exponent {} max_multiplier {}",
                    mode.max_exponent, mode.max_multiplier
                ),
            );
        }
        if let Some(worst) = report.worst_mode() {
            summary.push("worst_mode_lambda", worst.lambda);
            summary.push("worst_mode_exponent", worst.max_exponent);
        }
        if let Some(note) = &report.note {
            summary.push("note", note);
        }
    }

    if let Some(out_path) = &cli.out {
        let mut file = create_file(out_path)?;
        write!(file, "{summary}")?;
        summary.outputs.push(out_path.clone());
    }
    Ok(summary)
}

pub fn cmd_experiment(
    cfg: &ScenarioConfig,
    args: &ExperimentArgs,
    cli: &Cli,
) -> Result<RunSummary> {
    if let Some(name) = args.preset.as_deref() {
        if name != "paper-network" {
            return Err(Error::Config(format!(
                "the experiment runs on the `paper-network` preset, got `{name}`"
            )));
        }
    }
    if cfg.graph != GraphSection::PaperNetwork {
        return Err(Error::Config(
            "the experiment always runs on the paper-network preset; \
             remove the explicit [graph] section"
                .into(),
        ));
    }
    let t_switch = args.t_switch.unwrap_or(cfg.t_switch);
    let schedule = KappaSchedule::new(cfg.kappa_segments.clone())?;
    let experiment = RemoteSyncExperiment {
        kappa_on: args.kappa_on.unwrap_or_else(|| schedule.kappa_at(t_switch)),
        t_switch,
        t_end: args.t_end.unwrap_or(cfg.t_end),
        seed: cfg.seed,
        mu: args.mu.unwrap_or(cfg.mu),
        dt: args.dt.unwrap_or(cfg.dt),
        record_stride: cfg.record_stride,
        threshold: args.threshold.unwrap_or(cfg.threshold),
    };
    let (_, report) = run_remote_sync_experiment(&experiment)?;

    let mut summary = RunSummary::new("experiment");
    summary.push("kappa_on", experiment.kappa_on);
    summary.push("t_switch", experiment.t_switch);
    summary.push("t_end", experiment.t_end);
    summary.push("seed", experiment.seed);
    summary.push("mu", experiment.mu);
    summary.push("dt", experiment.dt);
    summary.push("threshold", experiment.threshold);
    match report.sync_time {
        Some(t) => summary.push("sync_time", t),
        None => summary.push("sync_time", "none"),
    }
    for pair in &report.pair_errors {
        summary.push(format!("pair_{}_final_error", pair.label), pair.final_error);
    }

    let out_path = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.out_sync));
    let mut file = create_file(&out_path)?;
    write_sync_csv(&mut file, &report.error_series)?;
    summary.outputs.push(out_path);

    write_svg_if_requested(
        cli,
        &mut summary,
        "synchronization error",
        "t",
        "e(t)",
        &report.error_series,
    )?;
    Ok(summary)
}
