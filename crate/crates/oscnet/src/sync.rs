//! Synchronization metrics and the two-cluster remote-synchronization
//! experiment: all nodes oscillate freely until the coupling gain switches
//! on at t_switch, after which the whole network is expected to lock.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{paper_network, PAPER_NODE_LABELS};
use crate::integrate::{simulate_network, IntegratorConfig, Trajectory};
use crate::models::{node_state, CouplingSpec, KappaSchedule, VdpParams};

/// Non-adjacent probe pairs on the benchmark network, as node indices:
/// (x1, y1) across clusters, (x1, x3) and (y1, y3) within clusters.
pub const PROBE_PAIRS: [(usize, usize); 3] = [(0, 4), (0, 2), (4, 6)];

/// Final-state distance for one probe pair.
#[derive(Clone, Debug)]
pub struct PairError {
    pub node_a: usize,
    pub node_b: usize,
    pub label: String,
    pub final_error: f64,
}

/// Synchronization summary of one trajectory.
#[derive(Clone, Debug)]
pub struct SyncReport {
    /// (t, e(t)) with e the max over nodes of the max-norm deviation from
    /// the node-mean state.
    pub error_series: Vec<(f64, f64)>,
    /// First time after which e stays below the threshold through t_end.
    pub sync_time: Option<f64>,
    pub threshold: f64,
    pub pair_errors: Vec<PairError>,
}

/// Deviation-from-mean synchronization error over a network trajectory:
/// e(t) = max_i ‖x_i(t) - x̄(t)‖_∞. Requires at least two planar nodes.
pub fn sync_error(traj: &Trajectory) -> Vec<(f64, f64)> {
    let dim = traj.dim();
    assert!(dim >= 4 && dim % 2 == 0, "need at least two planar nodes, got dim {dim}");
    let n = dim / 2;
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, x)| {
            let mut mean1 = 0.0;
            let mut mean2 = 0.0;
            for i in 0..n {
                mean1 += x[2 * i];
                mean2 += x[2 * i + 1];
            }
            mean1 /= n as f64;
            mean2 /= n as f64;
            let e = (0..n)
                .map(|i| (x[2 * i] - mean1).abs().max((x[2 * i + 1] - mean2).abs()))
                .fold(0.0f64, f64::max);
            (t, e)
        })
        .collect()
}

/// Earliest t* such that e(t) < threshold for every recorded t in
/// [t*, t_end]. Absence (the series ends above the threshold, or re-exceeds
/// it) is a valid result.
pub fn sync_time(series: &[(f64, f64)], threshold: f64, t_end: f64) -> Option<f64> {
    let mut result = None;
    for &(t, e) in series.iter().filter(|(t, _)| *t <= t_end) {
        if e < threshold {
            result.get_or_insert(t);
        } else {
            result = None;
        }
    }
    result
}

/// Parameters of the remote-synchronization experiment. The network is the
/// two-cluster benchmark; the gain is 0 until `t_switch` and `kappa_on`
/// afterwards.
#[derive(Clone, Copy, Debug)]
pub struct RemoteSyncExperiment {
    pub kappa_on: f64,
    pub t_switch: f64,
    pub t_end: f64,
    pub seed: u64,
    pub mu: f64,
    pub dt: f64,
    pub record_stride: usize,
    pub threshold: f64,
}

impl Default for RemoteSyncExperiment {
    fn default() -> Self {
        RemoteSyncExperiment {
            kappa_on: 0.5,
            t_switch: 15.0,
            t_end: 60.0,
            seed: 1,
            mu: 1.0,
            dt: 1e-3,
            record_stride: 10,
            threshold: 1e-2,
        }
    }
}

/// Reproducible uniform draw in [-2, 2]^2 per node (the cycle's bounding
/// box), filled in node-major order.
pub fn seeded_initial_states(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..2 * n).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

/// Run the activation protocol end to end and measure synchronization.
pub fn run_remote_sync_experiment(
    cfg: &RemoteSyncExperiment,
) -> Result<(Trajectory, SyncReport)> {
    if !(cfg.t_switch < cfg.t_end) {
        return Err(Error::Config(format!(
            "t_switch = {} must be below t_end = {}",
            cfg.t_switch, cfg.t_end
        )));
    }
    if cfg.t_switch < 0.0 {
        return Err(Error::Config(format!("t_switch must be >= 0, got {}", cfg.t_switch)));
    }
    if !(cfg.threshold > 0.0) {
        return Err(Error::Config(format!("threshold must be > 0, got {}", cfg.threshold)));
    }
    let g = paper_network();
    let p = VdpParams::new(cfg.mu)?;
    let schedule = if cfg.t_switch > 0.0 {
        KappaSchedule::new(vec![(0.0, 0.0), (cfg.t_switch, cfg.kappa_on)])?
    } else {
        KappaSchedule::constant(cfg.kappa_on)?
    };
    let coupling = CouplingSpec::identity(schedule);
    let x0 = seeded_initial_states(g.n(), cfg.seed);
    let int_cfg = IntegratorConfig::new(cfg.dt, cfg.t_end, cfg.record_stride)?;
    let traj = simulate_network(&g, &coupling, p, &x0, &int_cfg)?;

    let error_series = sync_error(&traj);
    let sync_at = sync_time(&error_series, cfg.threshold, cfg.t_end);
    let last = traj.last_state();
    let pair_errors = PROBE_PAIRS
        .iter()
        .map(|&(a, b)| PairError {
            node_a: a,
            node_b: b,
            label: format!("{}-{}", PAPER_NODE_LABELS[a], PAPER_NODE_LABELS[b]),
            final_error: node_state(last, a).inf_distance(node_state(last, b)),
        })
        .collect();
    let report = SyncReport {
        error_series,
        sync_time: sync_at,
        threshold: cfg.threshold,
        pair_errors,
    };
    Ok((traj, report))
}
