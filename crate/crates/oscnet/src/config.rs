//! Scenario configuration: a line-oriented INI-style grammar with
//! `[section]` headers, `key = value` pairs, and `#` comments. Unknown
//! sections and keys are hard errors so typos never pass silently.
//!
//! ```text
//! [graph]
//! preset = paper-network        # or: n = 8 / edges = 0-1, 1-2, ...
//!
//! [model]
//! mu = 1
//!
//! [coupling]
//! kappa = 0@0, 0.5@15           # value@time segments, ascending times
//! h = identity
//!
//! [integrator]
//! dt = 0.001
//! t_end = 60
//! record_stride = 10
//!
//! [experiment]
//! t_switch = 15
//! threshold = 0.01
//! seed = 1
//!
//! [outputs]
//! trajectory = trajectory.csv
//! spectrum = spectrum.csv
//! msf = msf.csv
//! sync = sync.csv
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{paper_network, Graph};

/// Graph selection: a named preset or an explicit node count and edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphSection {
    PaperNetwork,
    Explicit { n: usize, edges: Vec<(usize, usize)> },
}

impl GraphSection {
    pub fn build(&self) -> Result<Graph> {
        match self {
            GraphSection::PaperNetwork => Ok(paper_network()),
            GraphSection::Explicit { n, edges } => Graph::from_edge_list(*n, edges),
        }
    }
}

/// Fully resolved scenario: every field carries its default when the source
/// text omits the section.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub graph: GraphSection,
    pub mu: f64,
    /// κ schedule as (t_from, value) pairs, ascending, starting at 0.
    pub kappa_segments: Vec<(f64, f64)>,
    pub h_identity: bool,
    pub dt: f64,
    pub t_end: f64,
    pub record_stride: usize,
    pub t_switch: f64,
    pub threshold: f64,
    pub seed: u64,
    pub out_trajectory: String,
    pub out_spectrum: String,
    pub out_msf: String,
    pub out_sync: String,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            graph: GraphSection::PaperNetwork,
            mu: 1.0,
            kappa_segments: vec![(0.0, 0.0), (15.0, 0.5)],
            h_identity: true,
            dt: 1e-3,
            t_end: 60.0,
            record_stride: 10,
            t_switch: 15.0,
            threshold: 0.01,
            seed: 1,
            out_trajectory: "trajectory.csv".into(),
            out_spectrum: "spectrum.csv".into(),
            out_msf: "msf.csv".into(),
            out_sync: "sync.csv".into(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Graph,
    Model,
    Coupling,
    Integrator,
    Experiment,
    Outputs,
}

fn err_at(line: usize, msg: impl AsRef<str>) -> Error {
    Error::Config(format!("line {line}: {}", msg.as_ref()))
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| err_at(line, format!("{key} must be a number, got `{value}`")))
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| err_at(line, format!("{key} must be a non-negative integer, got `{value}`")))
}

/// Parse the scenario grammar. Missing sections fall back to defaults;
/// unknown sections or keys are errors carrying the line number.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    let mut graph_n: Option<usize> = None;
    let mut graph_edges: Option<Vec<(usize, usize)>> = None;
    let mut graph_preset = false;
    let mut section = Section::None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err_at(lineno, "unterminated section header"))?
                .trim();
            section = match name {
                "graph" => Section::Graph,
                "model" => Section::Model,
                "coupling" => Section::Coupling,
                "integrator" => Section::Integrator,
                "experiment" => Section::Experiment,
                "outputs" => Section::Outputs,
                other => return Err(err_at(lineno, format!("unknown section `[{other}]`"))),
            };
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err_at(lineno, format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        let value = value.trim();
        match section {
            Section::None => {
                return Err(err_at(lineno, format!("key `{key}` appears before any [section]")))
            }
            Section::Graph => match key {
                "preset" => {
                    if value != "paper-network" {
                        return Err(err_at(
                            lineno,
                            format!("unknown preset `{value}` (expected `paper-network`)"),
                        ));
                    }
                    graph_preset = true;
                }
                "n" => graph_n = Some(parse_usize(lineno, "n", value)?),
                "edges" => graph_edges = Some(parse_edges(lineno, value)?),
                other => return Err(err_at(lineno, format!("unknown key `{other}` in [graph]"))),
            },
            Section::Model => match key {
                "mu" => {
                    let mu = parse_f64(lineno, "mu", value)?;
                    if !(mu > 0.0) {
                        return Err(err_at(lineno, "mu must be > 0"));
                    }
                    cfg.mu = mu;
                }
                other => return Err(err_at(lineno, format!("unknown key `{other}` in [model]"))),
            },
            Section::Coupling => match key {
                "kappa" => cfg.kappa_segments = parse_kappa_segments(lineno, value)?,
                "h" => {
                    if value != "identity" {
                        return Err(err_at(
                            lineno,
                            format!("only `h = identity` is supported, got `{value}`"),
                        ));
                    }
                    cfg.h_identity = true;
                }
                other => {
                    return Err(err_at(lineno, format!("unknown key `{other}` in [coupling]")))
                }
            },
            Section::Integrator => match key {
                "dt" => {
                    cfg.dt = parse_f64(lineno, "dt", value)?;
                    if !(cfg.dt > 0.0) {
                        return Err(err_at(lineno, "dt must be > 0"));
                    }
                }
                "t_end" => {
                    cfg.t_end = parse_f64(lineno, "t_end", value)?;
                    if !(cfg.t_end > 0.0) {
                        return Err(err_at(lineno, "t_end must be > 0"));
                    }
                }
                "record_stride" => {
                    cfg.record_stride = parse_usize(lineno, "record_stride", value)?;
                    if cfg.record_stride == 0 {
                        return Err(err_at(lineno, "record_stride must be >= 1"));
                    }
                }
                other => {
                    return Err(err_at(lineno, format!("unknown key `{other}` in [integrator]")))
                }
            },
            Section::Experiment => match key {
                "t_switch" => {
                    cfg.t_switch = parse_f64(lineno, "t_switch", value)?;
                    if cfg.t_switch < 0.0 {
                        return Err(err_at(lineno, "t_switch must be >= 0"));
                    }
                }
                "threshold" => {
                    cfg.threshold = parse_f64(lineno, "threshold", value)?;
                    if !(cfg.threshold > 0.0) {
                        return Err(err_at(lineno, "threshold must be > 0"));
                    }
                }
                "seed" => {
                    cfg.seed = value.parse::<u64>().map_err(|_| {
                        err_at(lineno, format!("seed must be a non-negative integer, got `{value}`"))
                    })?;
                }
                other => {
                    return Err(err_at(lineno, format!("unknown key `{other}` in [experiment]")))
                }
            },
            Section::Outputs => match key {
                "trajectory" => cfg.out_trajectory = value.to_string(),
                "spectrum" => cfg.out_spectrum = value.to_string(),
                "msf" => cfg.out_msf = value.to_string(),
                "sync" => cfg.out_sync = value.to_string(),
                other => {
                    return Err(err_at(lineno, format!("unknown key `{other}` in [outputs]")))
                }
            },
        }
    }

    cfg.graph = match (graph_preset, graph_n, graph_edges) {
        (true, None, None) => GraphSection::PaperNetwork,
        (true, _, _) => {
            return Err(Error::Config(
                "[graph] must give either `preset` or `n`/`edges`, not both".into(),
            ))
        }
        (false, Some(n), Some(edges)) => GraphSection::Explicit { n, edges },
        (false, None, None) => GraphSection::PaperNetwork,
        (false, _, _) => {
            return Err(Error::Config(
                "[graph] with an explicit graph needs both `n` and `edges`".into(),
            ))
        }
    };
    // every parsed value must satisfy downstream preconditions
    cfg.graph.build()?;
    crate::models::KappaSchedule::new(cfg.kappa_segments.clone())?;
    Ok(cfg)
}

/// `0-1, 1-2, ...`
fn parse_edges(line: usize, value: &str) -> Result<Vec<(usize, usize)>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|item| {
            let item = item.trim();
            let (a, b) = item
                .split_once('-')
                .ok_or_else(|| err_at(line, format!("edge `{item}` must look like `0-1`")))?;
            let a = parse_usize(line, "edge endpoint", a.trim())?;
            let b = parse_usize(line, "edge endpoint", b.trim())?;
            Ok((a, b))
        })
        .collect()
}

/// `0@0, 0.5@15` — value@time pairs with ascending times.
fn parse_kappa_segments(line: usize, value: &str) -> Result<Vec<(f64, f64)>> {
    let segments: Vec<(f64, f64)> = value
        .split(',')
        .map(|item| {
            let item = item.trim();
            let (k, t) = item
                .split_once('@')
                .ok_or_else(|| err_at(line, format!("kappa segment `{item}` must look like `0.5@15`")))?;
            let k = parse_f64(line, "kappa value", k.trim())?;
            let t = parse_f64(line, "kappa time", t.trim())?;
            Ok((t, k))
        })
        .collect::<Result<_>>()?;
    if segments.is_empty() {
        return Err(err_at(line, "kappa schedule must have at least one segment"));
    }
    if segments[0].0 != 0.0 {
        return Err(err_at(line, "kappa schedule must start at time 0 (e.g. `0@0, 0.5@15`)"));
    }
    for w in segments.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(err_at(line, "kappa schedule times must be strictly ascending"));
        }
    }
    for &(t, k) in &segments {
        if k < 0.0 {
            return Err(err_at(line, format!("kappa must be >= 0, got {k}@{t}")));
        }
    }
    Ok(segments)
}

/// Canonical text form; `parse_config(serialize_config(c)) == c`.
pub fn serialize_config(cfg: &ScenarioConfig) -> String {
    let mut out = String::new();
    out.push_str("[graph]\n");
    match &cfg.graph {
        GraphSection::PaperNetwork => out.push_str("preset = paper-network\n"),
        GraphSection::Explicit { n, edges } => {
            let _ = writeln!(out, "n = {n}");
            let edges: Vec<String> = edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
            let _ = writeln!(out, "edges = {}", edges.join(", "));
        }
    }
    out.push_str("\n[model]\n");
    let _ = writeln!(out, "mu = {}", cfg.mu);
    out.push_str("\n[coupling]\n");
    let segments: Vec<String> =
        cfg.kappa_segments.iter().map(|(t, k)| format!("{k}@{t}")).collect();
    let _ = writeln!(out, "kappa = {}", segments.join(", "));
    out.push_str("h = identity\n");
    out.push_str("\n[integrator]\n");
    let _ = writeln!(out, "dt = {}", cfg.dt);
    let _ = writeln!(out, "t_end = {}", cfg.t_end);
    let _ = writeln!(out, "record_stride = {}", cfg.record_stride);
    out.push_str("\n[experiment]\n");
    let _ = writeln!(out, "t_switch = {}", cfg.t_switch);
    let _ = writeln!(out, "threshold = {}", cfg.threshold);
    let _ = writeln!(out, "seed = {}", cfg.seed);
    out.push_str("\n[outputs]\n");
    let _ = writeln!(out, "trajectory = {}", cfg.out_trajectory);
    let _ = writeln!(out, "spectrum = {}", cfg.out_spectrum);
    let _ = writeln!(out, "msf = {}", cfg.out_msf);
    let _ = writeln!(out, "sync = {}", cfg.out_sync);
    out
}
