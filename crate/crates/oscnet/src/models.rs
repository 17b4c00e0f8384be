//! Node dynamics, diffusive coupling, and assembly of the network vector field.
//!
//! Nodes are planar Van der Pol oscillators. The network couples them
//! diffusively through the graph: every node feels κ(t) · Σ_j H (x_j - x_i)
//! over its neighbors j, which is the row-wise form of -κ (L ⊗ H) x and
//! vanishes identically on the synchronization manifold.

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Node model parameters. `mu` is the nonlinear damping coefficient; the
/// limit cycle only exists for mu > 0, so non-positive values are rejected.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VdpParams {
    mu: f64,
}

impl VdpParams {
    pub fn new(mu: f64) -> Result<Self> {
        if !mu.is_finite() || mu <= 0.0 {
            return Err(Error::Config(format!("mu must be > 0, got {mu}")));
        }
        Ok(VdpParams { mu })
    }

    pub fn mu(self) -> f64 {
        self.mu
    }
}

/// Planar state of one node: position-like x1 and velocity-like x2.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct NodeState {
    pub x1: f64,
    pub x2: f64,
}

impl NodeState {
    pub fn new(x1: f64, x2: f64) -> Self {
        NodeState { x1, x2 }
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    /// Component-wise max-magnitude distance.
    pub fn inf_distance(self, other: NodeState) -> f64 {
        (self.x1 - other.x1).abs().max((self.x2 - other.x2).abs())
    }
}

/// ẋ1 = x2, ẋ2 = mu (1 - x1²) x2 - x1.
pub fn vdp_rhs(s: NodeState, p: VdpParams) -> NodeState {
    NodeState {
        x1: s.x2,
        x2: p.mu() * (1.0 - s.x1 * s.x1) * s.x2 - s.x1,
    }
}

/// Jacobian of [`vdp_rhs`]: [[0, 1], [-2 mu x1 x2 - 1, mu (1 - x1²)]].
pub fn vdp_jacobian(s: NodeState, p: VdpParams) -> Matrix2<f64> {
    Matrix2::new(
        0.0,
        1.0,
        -2.0 * p.mu() * s.x1 * s.x2 - 1.0,
        p.mu() * (1.0 - s.x1 * s.x1),
    )
}

/// Piecewise-constant coupling gain κ(t), right-continuous at switch times.
#[derive(Clone, Debug, PartialEq)]
pub struct KappaSchedule {
    /// (t_from, value) segments with strictly ascending times, first at t = 0.
    segments: Vec<(f64, f64)>,
}

impl KappaSchedule {
    pub fn constant(kappa: f64) -> Result<Self> {
        KappaSchedule::new(vec![(0.0, kappa)])
    }

    /// Segments as (t_from, value). Times must be finite, strictly ascending,
    /// and start at 0; every value must be finite and >= 0.
    pub fn new(segments: Vec<(f64, f64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Config("kappa schedule must have at least one segment".into()));
        }
        if segments[0].0 != 0.0 {
            return Err(Error::Config(format!(
                "kappa schedule must start at time 0, got {}",
                segments[0].0
            )));
        }
        for window in segments.windows(2) {
            if !(window[1].0 > window[0].0) {
                return Err(Error::Config(format!(
                    "kappa schedule times must be strictly ascending: {} then {}",
                    window[0].0, window[1].0
                )));
            }
        }
        for &(t, k) in &segments {
            if !t.is_finite() || !k.is_finite() || k < 0.0 {
                return Err(Error::Config(format!(
                    "kappa schedule entries must be finite with kappa >= 0, got {k}@{t}"
                )));
            }
        }
        Ok(KappaSchedule { segments })
    }

    /// Right-continuous evaluation: the last segment whose start time is <= t.
    pub fn kappa_at(&self, t: f64) -> f64 {
        self.segments
            .iter()
            .rev()
            .find(|(t0, _)| *t0 <= t)
            .map(|&(_, k)| k)
            .unwrap_or(self.segments[0].1)
    }

    /// Switch instants after t = 0.
    pub fn switch_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.segments.iter().skip(1).map(|&(t, _)| t)
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segments
    }
}

/// Coupling gain schedule plus the inner coupling matrix H applied to
/// neighbor state differences. H defaults to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSpec {
    pub schedule: KappaSchedule,
    pub h: Matrix2<f64>,
}

impl CouplingSpec {
    /// Identity inner coupling: both state components coupled with gain κ(t).
    pub fn identity(schedule: KappaSchedule) -> Self {
        CouplingSpec { schedule, h: Matrix2::identity() }
    }

    pub fn kappa_at(&self, t: f64) -> f64 {
        self.schedule.kappa_at(t)
    }
}

/// Node-major flat layout: state of node i occupies slots 2i and 2i+1.
pub fn node_state(x: &[f64], i: usize) -> NodeState {
    NodeState::new(x[2 * i], x[2 * i + 1])
}

/// Flatten per-node states into the node-major network layout.
pub fn flatten(nodes: &[NodeState]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * nodes.len());
    for s in nodes {
        out.push(s.x1);
        out.push(s.x2);
    }
    out
}

/// Full network vector field: ẋ_i = ψ(x_i) + κ(t) Σ_{j ~ i} H (x_j - x_i).
///
/// Errors if the state length does not match the graph.
pub fn network_rhs(
    x: &[f64],
    g: &Graph,
    c: &CouplingSpec,
    t: f64,
    p: VdpParams,
) -> Result<Vec<f64>> {
    if x.len() != 2 * g.n() {
        return Err(Error::Config(format!(
            "network state has length {}, expected {} for {} nodes",
            x.len(),
            2 * g.n(),
            g.n()
        )));
    }
    let mut out = vec![0.0; x.len()];
    network_rhs_into(x, g, c.kappa_at(t), &c.h, p, &mut out);
    Ok(out)
}

/// Dimension-checked kernel shared with the integrators. Accumulating
/// neighbor differences keeps the coupling term exactly zero whenever all
/// node states coincide.
pub(crate) fn network_rhs_into(
    x: &[f64],
    g: &Graph,
    kappa: f64,
    h: &Matrix2<f64>,
    p: VdpParams,
    out: &mut [f64],
) {
    for i in 0..g.n() {
        let si = node_state(x, i);
        let d = vdp_rhs(si, p);
        let mut c1 = 0.0;
        let mut c2 = 0.0;
        for &j in g.neighbors(i) {
            c1 += x[2 * j] - x[2 * i];
            c2 += x[2 * j + 1] - x[2 * i + 1];
        }
        out[2 * i] = d.x1 + kappa * (h[(0, 0)] * c1 + h[(0, 1)] * c2);
        out[2 * i + 1] = d.x2 + kappa * (h[(1, 0)] * c1 + h[(1, 1)] * c2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::paper_network;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn mu1() -> VdpParams {
        VdpParams::new(1.0).unwrap()
    }

    #[test]
    fn rhs_at_origin_is_zero() {
        let d = vdp_rhs(NodeState::new(0.0, 0.0), mu1());
        assert_eq!((d.x1, d.x2), (0.0, 0.0));
    }

    #[test]
    fn rhs_substitution_cases() {
        let d = vdp_rhs(NodeState::new(1.0, 1.0), mu1());
        assert_eq!((d.x1, d.x2), (1.0, -1.0));
        let d = vdp_rhs(NodeState::new(2.0, 0.0), mu1());
        assert_eq!((d.x1, d.x2), (0.0, -2.0));
    }

    #[test]
    fn jacobian_substitution_cases() {
        let j = vdp_jacobian(NodeState::new(0.0, 0.0), mu1());
        assert_eq!(j, Matrix2::new(0.0, 1.0, -1.0, 1.0));
        let j = vdp_jacobian(NodeState::new(1.0, 1.0), mu1());
        assert_eq!(j, Matrix2::new(0.0, 1.0, -3.0, 0.0));
    }

    /// Central-difference Jacobian of vdp_rhs, independent of vdp_jacobian.
    fn numeric_jacobian(s: NodeState, p: VdpParams, step: f64) -> Matrix2<f64> {
        let col = |dx1: f64, dx2: f64| {
            let plus = vdp_rhs(NodeState::new(s.x1 + dx1, s.x2 + dx2), p);
            let minus = vdp_rhs(NodeState::new(s.x1 - dx1, s.x2 - dx2), p);
            ((plus.x1 - minus.x1) / (2.0 * step), (plus.x2 - minus.x2) / (2.0 * step))
        };
        let (a11, a21) = col(step, 0.0);
        let (a12, a22) = col(0.0, step);
        Matrix2::new(a11, a12, a21, a22)
    }

    #[test]
    fn jacobian_matches_central_differences_at_reference_point() {
        let s = NodeState::new(0.7, -1.3);
        let exact = vdp_jacobian(s, mu1());
        let approx = numeric_jacobian(s, mu1(), 1e-5);
        let err = (exact - approx).abs().max();
        assert!(err < 1e-6, "max entry error {err}");
    }

    #[test]
    fn jacobian_matches_central_differences_at_random_states() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let s = NodeState::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let err = (vdp_jacobian(s, mu1()) - numeric_jacobian(s, mu1(), 1e-5))
                .abs()
                .max();
            assert!(err < 1e-6, "max entry error {err} at {s:?}");
        }
    }

    #[test]
    fn mu_must_be_positive() {
        assert!(VdpParams::new(-1.0).is_err());
        assert!(VdpParams::new(0.0).is_err());
        assert!(VdpParams::new(f64::NAN).is_err());
    }

    #[test]
    fn kappa_schedule_is_right_continuous() {
        let sched = KappaSchedule::new(vec![(0.0, 0.0), (15.0, 0.5)]).unwrap();
        assert_eq!(sched.kappa_at(14.999), 0.0);
        assert_eq!(sched.kappa_at(15.0), 0.5);
        assert_eq!(sched.kappa_at(100.0), 0.5);
        let constant = KappaSchedule::constant(0.3).unwrap();
        assert_eq!(constant.kappa_at(0.0), 0.3);
        assert_eq!(constant.kappa_at(1234.5), 0.3);
    }

    #[test]
    fn kappa_schedule_rejects_bad_input() {
        assert!(KappaSchedule::new(vec![]).is_err());
        assert!(KappaSchedule::new(vec![(1.0, 0.5)]).is_err());
        assert!(KappaSchedule::new(vec![(0.0, 0.5), (0.0, 0.7)]).is_err());
        assert!(KappaSchedule::new(vec![(0.0, -0.1)]).is_err());
    }

    #[test]
    fn synchronized_input_replicates_node_dynamics_exactly() {
        let g = paper_network();
        let c = CouplingSpec::identity(KappaSchedule::constant(0.7).unwrap());
        let nodes = vec![NodeState::new(1.0, 1.0); 8];
        let x = flatten(&nodes);
        let dx = network_rhs(&x, &g, &c, 3.0, mu1()).unwrap();
        let d = vdp_rhs(NodeState::new(1.0, 1.0), mu1());
        for i in 0..8 {
            assert_eq!(dx[2 * i], d.x1);
            assert_eq!(dx[2 * i + 1], d.x2);
        }
    }

    #[test]
    fn zero_gain_decouples_nodes() {
        let g = paper_network();
        let c = CouplingSpec::identity(KappaSchedule::constant(0.0).unwrap());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let nodes: Vec<NodeState> = (0..8)
            .map(|_| NodeState::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let x = flatten(&nodes);
        let dx = network_rhs(&x, &g, &c, 0.0, mu1()).unwrap();
        for (i, s) in nodes.iter().enumerate() {
            let d = vdp_rhs(*s, mu1());
            assert_eq!(dx[2 * i], d.x1);
            assert_eq!(dx[2 * i + 1], d.x2);
        }
    }

    #[test]
    fn coupling_arithmetic_on_first_node() {
        // node x1 at (1,0) with ring neighbors x2 at (0,0) and x4 at (2,0):
        // the neighbor differences cancel, so the coupling adds nothing.
        let g = paper_network();
        let c = CouplingSpec::identity(KappaSchedule::constant(1.0).unwrap());
        let mut nodes = vec![NodeState::default(); 8];
        nodes[0] = NodeState::new(1.0, 0.0);
        nodes[1] = NodeState::new(0.0, 0.0);
        nodes[3] = NodeState::new(2.0, 0.0);
        let x = flatten(&nodes);
        let dx = network_rhs(&x, &g, &c, 0.0, mu1()).unwrap();
        let free = vdp_rhs(nodes[0], mu1());
        assert_eq!(dx[0], free.x1);
        assert_eq!(dx[1], free.x2);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let g = paper_network();
        let c = CouplingSpec::identity(KappaSchedule::constant(0.0).unwrap());
        let x = vec![0.0; 7];
        assert!(network_rhs(&x, &g, &c, 0.0, mu1()).is_err());
    }

    /// The sixteen coupled equations written out one by one, with every
    /// coupling row taken from the Laplacian (degree times self state).
    fn handwritten_network_rhs(x: &[f64], k: f64, mu: f64) -> Vec<f64> {
        let s = |i: usize, c: usize| x[2 * i + c]; // node i, component c (0 or 1)
        let vdp2 = |i: usize| mu * (1.0 - s(i, 0) * s(i, 0)) * s(i, 1) - s(i, 0);
        vec![
            // x1 (node 0): neighbors x2, x4
            s(0, 1) + k * (s(1, 0) + s(3, 0) - 2.0 * s(0, 0)),
            vdp2(0) + k * (s(1, 1) + s(3, 1) - 2.0 * s(0, 1)),
            // x2 (node 1): neighbors y2, x3, x1
            s(1, 1) + k * (s(5, 0) + s(2, 0) + s(0, 0) - 3.0 * s(1, 0)),
            vdp2(1) + k * (s(5, 1) + s(2, 1) + s(0, 1) - 3.0 * s(1, 1)),
            // x3 (node 2): neighbors x2, x4
            s(2, 1) + k * (s(1, 0) + s(3, 0) - 2.0 * s(2, 0)),
            vdp2(2) + k * (s(1, 1) + s(3, 1) - 2.0 * s(2, 1)),
            // x4 (node 3): neighbors x3, x1
            s(3, 1) + k * (s(2, 0) + s(0, 0) - 2.0 * s(3, 0)),
            vdp2(3) + k * (s(2, 1) + s(0, 1) - 2.0 * s(3, 1)),
            // y1 (node 4): neighbors y2, y4
            s(4, 1) + k * (s(5, 0) + s(7, 0) - 2.0 * s(4, 0)),
            vdp2(4) + k * (s(5, 1) + s(7, 1) - 2.0 * s(4, 1)),
            // y2 (node 5): neighbors x2, y3, y1
            s(5, 1) + k * (s(1, 0) + s(6, 0) + s(4, 0) - 3.0 * s(5, 0)),
            vdp2(5) + k * (s(1, 1) + s(6, 1) + s(4, 1) - 3.0 * s(5, 1)),
            // y3 (node 6): neighbors y2, y4
            s(6, 1) + k * (s(5, 0) + s(7, 0) - 2.0 * s(6, 0)),
            vdp2(6) + k * (s(5, 1) + s(7, 1) - 2.0 * s(6, 1)),
            // y4 (node 7): neighbors y3, y1
            s(7, 1) + k * (s(6, 0) + s(4, 0) - 2.0 * s(7, 0)),
            vdp2(7) + k * (s(6, 1) + s(4, 1) - 2.0 * s(7, 1)),
        ]
    }

    #[test]
    fn network_rhs_matches_handwritten_equations() {
        let g = paper_network();
        let c = CouplingSpec::identity(KappaSchedule::constant(0.8).unwrap());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x: Vec<f64> = (0..16).map(|_| rng.gen_range(-2.5..2.5)).collect();
            let got = network_rhs(&x, &g, &c, 0.0, mu1()).unwrap();
            let want = handwritten_network_rhs(&x, 0.8, 1.0);
            for (a, b) in got.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    proptest! {
        #[test]
        fn sync_manifold_is_exactly_invariant(
            x1 in -3.0f64..3.0,
            x2 in -3.0f64..3.0,
            kappa in 0.0f64..5.0,
        ) {
            let g = paper_network();
            let c = CouplingSpec::identity(KappaSchedule::constant(kappa).unwrap());
            let x = flatten(&vec![NodeState::new(x1, x2); 8]);
            let dx = network_rhs(&x, &g, &c, 0.0, mu1()).unwrap();
            let d = vdp_rhs(NodeState::new(x1, x2), mu1());
            for i in 0..8 {
                prop_assert_eq!(dx[2 * i], d.x1);
                prop_assert_eq!(dx[2 * i + 1], d.x2);
            }
        }

        #[test]
        fn rhs_is_linear_in_kappa(
            seed in any::<u64>(),
            kappa in 0.0f64..4.0,
        ) {
            let g = paper_network();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..16).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let at = |k: f64| {
                let c = CouplingSpec::identity(KappaSchedule::constant(k).unwrap());
                network_rhs(&x, &g, &c, 0.0, mu1()).unwrap()
            };
            let base = at(0.0);
            let unit = at(1.0);
            let scaled = at(kappa);
            for i in 0..16 {
                let coupling_unit = unit[i] - base[i];
                let coupling_scaled = scaled[i] - base[i];
                let err = (coupling_scaled - kappa * coupling_unit).abs();
                prop_assert!(err < 1e-12 * (1.0 + coupling_unit.abs() * kappa.abs()),
                    "nonlinearity {} at slot {}", err, i);
            }
        }
    }
}
