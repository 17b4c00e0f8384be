//! Monodromy matrices, Floquet spectra, the periodic-to-constant coordinate
//! transform, and the master stability function.
//!
//! The variational block along the orbit is 2x2 by construction (planar
//! nodes, identity inner coupling), so every eigenproblem here is solved in
//! closed form from the trace and determinant. The time-invariant matrix J
//! is built as the matrix logarithm of the monodromy via eigendecomposition,
//! J = V diag(log λ_i / T) V⁻¹, which makes e^{JT} equal the monodromy
//! exactly and P(t) = Φ(t) e^{-Jt} periodic.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::integrate::LimitCycle;
use crate::models::{self, NodeState, VdpParams};

type CMat2 = Matrix2<Complex64>;
type CVec2 = Vector2<Complex64>;

/// Eigenvector-matrix condition number above which the monodromy is treated
/// as defective.
const EIGENVECTOR_COND_CAP: f64 = 1e8;
/// Condition number above which a P(t) sample is treated as singular.
const P_SAMPLE_COND_CAP: f64 = 1e10;

fn complexify(m: &Matrix2<f64>) -> CMat2 {
    m.map(|v| Complex64::new(v, 0.0))
}

fn max_entry_c(m: &CMat2) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// 2x2 inverse by the adjugate formula.
fn inverse_c(m: &CMat2) -> Option<CMat2> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if det.norm() == 0.0 {
        return None;
    }
    Some(CMat2::new(m[(1, 1)] / det, -m[(0, 1)] / det, -m[(1, 0)] / det, m[(0, 0)] / det))
}

/// Spectral condition number σ1/σ2 of a 2x2 complex matrix, from the
/// Frobenius norm and determinant (σ1 σ2 = |det|, σ1² + σ2² = ‖M‖_F²).
fn condition_c(m: &CMat2) -> f64 {
    let fro2: f64 = m.iter().map(|v| v.norm_sqr()).sum();
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).norm();
    if det == 0.0 {
        return f64::INFINITY;
    }
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0);
    let sigma1_sq = 0.5 * (fro2 + disc.sqrt());
    sigma1_sq / det
}

/// State-transition matrix over one period, with intermediate samples.
#[derive(Clone, Debug)]
pub struct Monodromy {
    /// Φ(T).
    pub phi_t: Matrix2<f64>,
    pub period: f64,
    /// Φ at times k T / m for k = 0..=m.
    pub phi_samples: Vec<Matrix2<f64>>,
    /// Times k T / m matching `phi_samples`.
    pub phase_times: Vec<f64>,
    /// trace A at the sample times, for the Liouville determinant identity.
    trace_samples: Vec<f64>,
}

impl Monodromy {
    /// Both sides of Liouville's identity: det Φ(T) and exp(∫ trace A dt),
    /// the integral taken by composite Simpson over the stored samples.
    pub fn liouville(&self) -> (f64, f64) {
        let integral = simpson(&self.trace_samples, self.period);
        (self.phi_t.determinant(), integral.exp())
    }
}

/// Composite Simpson over an even number of equal intervals spanning
/// `length`; `values` holds both endpoints.
fn simpson(values: &[f64], length: f64) -> f64 {
    let m = values.len() - 1;
    debug_assert!(m >= 2 && m % 2 == 0);
    let h = length / m as f64;
    let mut acc = values[0] + values[m];
    for (k, v) in values.iter().enumerate().take(m).skip(1) {
        acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

pub(crate) struct TransitionRecord {
    pub phi_final: Matrix2<f64>,
    pub phi_samples: Vec<Matrix2<f64>>,
    pub trace_samples: Vec<f64>,
    pub phase_times: Vec<f64>,
}

/// Jointly integrate `ẋ = field(x)` and `Φ̇ = A(x) Φ` from (x0, I) with RK4,
/// so A is evaluated on exactly the grid states of the orbit re-integration.
/// Records Φ and trace A every `record_every` steps (both endpoints
/// included); `n_steps` must be a multiple of `record_every`.
pub(crate) fn integrate_transition<Fx, Fa>(
    x0: NodeState,
    field: &Fx,
    a_of: &Fa,
    t_total: f64,
    n_steps: usize,
    record_every: usize,
) -> Result<TransitionRecord>
where
    Fx: Fn(NodeState) -> NodeState,
    Fa: Fn(NodeState) -> Matrix2<f64>,
{
    assert!(n_steps > 0 && record_every > 0 && n_steps % record_every == 0);
    let h = t_total / n_steps as f64;
    let samples = n_steps / record_every + 1;
    let mut phi_samples = Vec::with_capacity(samples);
    let mut trace_samples = Vec::with_capacity(samples);
    let mut phase_times = Vec::with_capacity(samples);

    let deriv = |x: NodeState, phi: &Matrix2<f64>| -> (NodeState, Matrix2<f64>) {
        (field(x), a_of(x) * phi)
    };
    let shift = |x: NodeState, phi: &Matrix2<f64>, dx: &NodeState, dphi: &Matrix2<f64>, s: f64| {
        (NodeState::new(x.x1 + s * dx.x1, x.x2 + s * dx.x2), phi + dphi * s)
    };

    let mut x = x0;
    let mut phi = Matrix2::identity();
    for k in 0..n_steps {
        if k % record_every == 0 {
            phi_samples.push(phi);
            trace_samples.push(a_of(x).trace());
            phase_times.push(t_total * k as f64 / n_steps as f64);
        }
        let (k1x, k1p) = deriv(x, &phi);
        let (x2, p2) = shift(x, &phi, &k1x, &k1p, 0.5 * h);
        let (k2x, k2p) = deriv(x2, &p2);
        let (x3, p3) = shift(x, &phi, &k2x, &k2p, 0.5 * h);
        let (k3x, k3p) = deriv(x3, &p3);
        let (x4, p4) = shift(x, &phi, &k3x, &k3p, h);
        let (k4x, k4p) = deriv(x4, &p4);
        x = NodeState::new(
            x.x1 + h / 6.0 * (k1x.x1 + 2.0 * k2x.x1 + 2.0 * k3x.x1 + k4x.x1),
            x.x2 + h / 6.0 * (k1x.x2 + 2.0 * k2x.x2 + 2.0 * k3x.x2 + k4x.x2),
        );
        phi += (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0);
        if !x.is_finite() || phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "state-transition integration became non-finite at t = {}",
                (k + 1) as f64 * h
            )));
        }
    }
    phi_samples.push(phi);
    trace_samples.push(a_of(x).trace());
    phase_times.push(t_total);
    Ok(TransitionRecord { phi_final: phi, phi_samples, trace_samples, phase_times })
}

/// Integrate Φ̇ = A(t) Φ, Φ(0) = I over one period of the orbit, with
/// A(t) = Dψ(x_s(t)) + shift · I evaluated along the re-integrated orbit.
///
/// The step is rescaled internally so that it divides the period exactly and
/// the orbit's sample phases land on the grid.
pub fn state_transition(
    orbit: &LimitCycle,
    p: VdpParams,
    shift: f64,
    dt: f64,
) -> Result<Monodromy> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Config(format!("dt must be > 0, got {dt}")));
    }
    if !shift.is_finite() {
        return Err(Error::Config(format!("shift must be finite, got {shift}")));
    }
    let m = orbit.samples.len();
    if m < 2 || m % 2 != 0 {
        return Err(Error::Config(format!(
            "orbit must carry an even number of samples >= 2, got {m}"
        )));
    }
    let sub = ((orbit.period / (m as f64 * dt)).ceil() as usize).max(1);
    let n_steps = m * sub;

    let field = |s: NodeState| models::vdp_rhs(s, p);
    let shift_mat = Matrix2::identity() * shift;
    let a_of = |s: NodeState| models::vdp_jacobian(s, p) + shift_mat;
    let record = integrate_transition(orbit.anchor, &field, &a_of, orbit.period, n_steps, sub)?;

    let det = record.phi_final.determinant();
    if !(det > 0.0) {
        return Err(Error::Numerical(format!(
            "monodromy determinant must be positive, got {det}"
        )));
    }
    Ok(Monodromy {
        phi_t: record.phi_final,
        period: orbit.period,
        phi_samples: record.phi_samples,
        phase_times: record.phase_times,
        trace_samples: record.trace_samples,
    })
}

/// Floquet multipliers (eigenvalues of the monodromy) and exponents
/// (principal-branch logarithms over the period).
#[derive(Clone, Copy, Debug)]
pub struct FloquetSpectrum {
    pub multipliers: [Complex64; 2],
    pub exponents: [Complex64; 2],
    pub period: f64,
}

impl FloquetSpectrum {
    pub fn max_multiplier_magnitude(&self) -> f64 {
        self.multipliers[0].norm().max(self.multipliers[1].norm())
    }

    pub fn max_exponent_real(&self) -> f64 {
        self.exponents[0].re.max(self.exponents[1].re)
    }
}

/// Eigenvalues of a 2x2 real matrix by the quadratic characteristic formula.
fn eigenvalues_2x2(m: &Matrix2<f64>) -> [Complex64; 2] {
    let tr = m.trace();
    let det = m.determinant();
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let root = disc.sqrt();
        [
            Complex64::new(0.5 * (tr + root), 0.0),
            Complex64::new(0.5 * (tr - root), 0.0),
        ]
    } else {
        let root = (-disc).sqrt();
        [
            Complex64::new(0.5 * tr, 0.5 * root),
            Complex64::new(0.5 * tr, -0.5 * root),
        ]
    }
}

/// Multipliers and exponents of a monodromy matrix. Exponents are
/// log(λ) / T on the principal branch; a complex-conjugate pair is allowed.
pub fn multipliers(m: &Monodromy) -> FloquetSpectrum {
    let lambda = eigenvalues_2x2(&m.phi_t);
    let exponents = [lambda[0].ln() / m.period, lambda[1].ln() / m.period];
    FloquetSpectrum { multipliers: lambda, exponents, period: m.period }
}

/// Time-invariant matrix J and samples of the periodic transform P(t).
#[derive(Clone, Debug)]
pub struct LyaFloTransform {
    /// J = V diag(exponents) V⁻¹; real exactly when all multipliers are
    /// positive reals, complex otherwise.
    pub j_matrix: CMat2,
    /// P(t) = Φ(t) e^{-Jt} at the monodromy's sample times.
    pub p_samples: Vec<CMat2>,
    pub phase_times: Vec<f64>,
    pub period: f64,
    eigenvectors: CMat2,
    eigenvectors_inv: CMat2,
    exponents: [Complex64; 2],
}

impl LyaFloTransform {
    /// e^{J t} through the stored eigendecomposition.
    pub fn exp_j(&self, t: f64) -> CMat2 {
        let d = CMat2::new(
            (self.exponents[0] * t).exp(),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            (self.exponents[1] * t).exp(),
        );
        self.eigenvectors * d * self.eigenvectors_inv
    }

    /// ‖P(T) - P(0)‖ in the max-entry norm.
    pub fn p_periodicity_error(&self) -> f64 {
        let last = self.p_samples.last().expect("at least two samples");
        max_entry_c(&(last - self.p_samples[0]))
    }
}

/// Unit eigenvectors of a 2x2 real matrix for the given eigenvalues.
fn eigenvectors_2x2(m: &Matrix2<f64>, lambda: &[Complex64; 2]) -> CMat2 {
    let a = Complex64::new(m[(0, 0)], 0.0);
    let b = m[(0, 1)];
    let c = m[(1, 0)];
    let d = Complex64::new(m[(1, 1)], 0.0);
    let column = |i: usize| -> CVec2 {
        let l = lambda[i];
        if b != 0.0 {
            CVec2::new(Complex64::new(b, 0.0), l - a)
        } else if c != 0.0 {
            CVec2::new(l - d, Complex64::new(c, 0.0))
        } else {
            // diagonal matrix: pick the basis vector whose diagonal entry
            // matches; break ties by position so repeated eigenvalues still
            // produce independent vectors
            let to_a = (l - a).norm();
            let to_d = (l - d).norm();
            let pick_first = if to_a == to_d { i == 0 } else { to_a < to_d };
            if pick_first {
                CVec2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            } else {
                CVec2::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
            }
        }
    };
    let normalize = |v: CVec2| -> CVec2 {
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        CVec2::new(v[0] / n, v[1] / n)
    };
    let v0 = normalize(column(0));
    let v1 = normalize(column(1));
    CMat2::new(v0[0], v1[0], v0[1], v1[1])
}

/// Build J and the periodic transform samples from a monodromy and its
/// spectrum.
///
/// Negative real multipliers (which need a 2T-periodic real form) and
/// near-defective monodromies are reported as unsupported rather than
/// silently mishandled.
pub fn build_transform(m: &Monodromy, s: &FloquetSpectrum) -> Result<LyaFloTransform> {
    for lambda in &s.multipliers {
        if lambda.norm() == 0.0 {
            return Err(Error::Numerical("monodromy has a zero multiplier".into()));
        }
        if lambda.im == 0.0 && lambda.re < 0.0 {
            return Err(Error::Unsupported(format!(
                "negative real multiplier {} requires a 2T-periodic real transform",
                lambda.re
            )));
        }
    }
    let v = eigenvectors_2x2(&m.phi_t, &s.multipliers);
    let cond = condition_c(&v);
    if cond > EIGENVECTOR_COND_CAP {
        return Err(Error::Unsupported(format!(
            "monodromy is defective or near-defective (eigenvector condition {cond:.3e})"
        )));
    }
    let v_inv = inverse_c(&v).expect("conditioned matrix is invertible");
    let diag_exp = CMat2::new(
        s.exponents[0],
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        s.exponents[1],
    );
    let j_matrix = v * diag_exp * v_inv;

    let mut transform = LyaFloTransform {
        j_matrix,
        p_samples: Vec::with_capacity(m.phi_samples.len()),
        phase_times: m.phase_times.clone(),
        period: m.period,
        eigenvectors: v,
        eigenvectors_inv: v_inv,
        exponents: s.exponents,
    };
    for (phi, &t) in m.phi_samples.iter().zip(&m.phase_times) {
        let p = complexify(phi) * transform.exp_j(-t);
        transform.p_samples.push(p);
    }

    let p0_error = max_entry_c(&(transform.p_samples[0] - CMat2::identity()));
    if p0_error > 1e-9 {
        return Err(Error::Numerical(format!("P(0) deviates from identity by {p0_error:.3e}")));
    }
    let periodicity = transform.p_periodicity_error();
    if periodicity > 1e-6 {
        return Err(Error::Numerical(format!(
            "P(t) failed the periodicity check: |P(T) - P(0)| = {periodicity:.3e}"
        )));
    }
    let reconstruction = max_entry_c(&(transform.exp_j(m.period) - complexify(&m.phi_t)));
    if reconstruction > 1e-6 {
        return Err(Error::Numerical(format!(
            "e^(JT) fails to reproduce the monodromy: max entry error {reconstruction:.3e}"
        )));
    }
    Ok(transform)
}

/// One evaluation of the master stability function: the variational block
/// along the orbit with shift γ = -κλ. Returns (Λ, ρ_max): the largest
/// exponent real part and the largest multiplier magnitude.
pub fn msf_value(
    orbit: &LimitCycle,
    p: VdpParams,
    kappa: f64,
    lambda: f64,
    dt: f64,
) -> Result<(f64, f64)> {
    if kappa < 0.0 || !kappa.is_finite() {
        return Err(Error::Config(format!("kappa must be >= 0, got {kappa}")));
    }
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::Config(format!("lambda must be >= 0, got {lambda}")));
    }
    let monodromy = state_transition(orbit, p, -kappa * lambda, dt)?;
    let spectrum = multipliers(&monodromy);
    Ok((spectrum.max_exponent_real(), spectrum.max_multiplier_magnitude()))
}

/// One grid point of a master-stability scan.
#[derive(Clone, Copy, Debug)]
pub struct MsfPoint {
    pub kappa: f64,
    /// α = -κ λ.
    pub alpha: f64,
    pub max_multiplier: f64,
    pub max_exponent: f64,
}

/// Sampled master-stability curve over a κ grid at a fixed Laplacian
/// eigenvalue.
#[derive(Clone, Debug)]
pub struct MsfCurve {
    pub lambda: f64,
    pub points: Vec<MsfPoint>,
}

/// Evaluate [`msf_value`] over an ascending κ grid.
pub fn msf_scan(
    orbit: &LimitCycle,
    p: VdpParams,
    lambda: f64,
    kappa_grid: &[f64],
    dt: f64,
) -> Result<MsfCurve> {
    if kappa_grid.is_empty() {
        return Err(Error::Config("kappa grid must be non-empty".into()));
    }
    for w in kappa_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Config(format!(
                "kappa grid must be strictly ascending: {} then {}",
                w[0], w[1]
            )));
        }
    }
    let mut points = Vec::with_capacity(kappa_grid.len());
    for &kappa in kappa_grid {
        let (max_exponent, max_multiplier) = msf_value(orbit, p, kappa, lambda, dt)?;
        points.push(MsfPoint { kappa, alpha: -kappa * lambda, max_multiplier, max_exponent });
    }
    Ok(MsfCurve { lambda, points })
}

/// Stability of one non-trivial Laplacian mode.
#[derive(Clone, Copy, Debug)]
pub struct ModeReport {
    /// 1-based eigenvalue index (2..=n); mode 1 is the synchronized mode and
    /// is excluded.
    pub mode: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub max_exponent: f64,
    pub max_multiplier: f64,
}

/// Verdict over all non-trivial modes of a graph at one coupling gain.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub connected: bool,
    pub stable: bool,
    pub modes: Vec<ModeReport>,
    pub note: Option<String>,
}

impl StabilityReport {
    /// Mode with the largest exponent real part (least stable).
    pub fn worst_mode(&self) -> Option<&ModeReport> {
        self.modes
            .iter()
            .max_by(|a, b| a.max_exponent.total_cmp(&b.max_exponent))
    }
}

/// Evaluate Λ(-κ λ_i) for every non-trivial Laplacian mode i = 2..N.
/// The synchronized λ_1 = 0 mode is excluded. The verdict is true iff the
/// graph is connected and every mode has a strictly negative exponent.
pub fn stability_verdict(
    g: &Graph,
    p: VdpParams,
    kappa: f64,
    orbit: &LimitCycle,
    dt: f64,
) -> Result<StabilityReport> {
    let connected = g.is_connected();
    let spectrum = g.spectrum(crate::graph::DEFAULT_SPECTRUM_TOL)?;
    let mut modes = Vec::with_capacity(g.n().saturating_sub(1));
    for (idx, &lambda_raw) in spectrum.eigenvalues.iter().enumerate().skip(1) {
        // eigenvalues are >= 0 up to solver roundoff
        let lambda = lambda_raw.max(0.0);
        let (max_exponent, max_multiplier) = msf_value(orbit, p, kappa, lambda, dt)?;
        modes.push(ModeReport {
            mode: idx + 1,
            lambda,
            alpha: -kappa * lambda,
            max_exponent,
            max_multiplier,
        });
    }
    let all_negative = modes.iter().all(|m| m.max_exponent < 0.0);
    let note = if !connected {
        Some(
            "graph is disconnected: the lambda_2 = 0 mode is marginal (max exponent 0), \
             so the clusters cannot synchronize globally"
                .to_string(),
        )
    } else {
        None
    };
    Ok(StabilityReport { connected, stable: connected && all_negative, modes, note })
}

/// Transform a perturbation trajectory sampled on the stored phase grid:
/// z(t_k) = P(t_k)⁻¹ x(t_k). In these coordinates z evolves as ż = J z.
pub fn apply_transform(t: &LyaFloTransform, states: &[NodeState]) -> Result<Vec<CVec2>> {
    if states.len() != t.p_samples.len() {
        return Err(Error::Config(format!(
            "trajectory has {} samples but the transform stores {} phases",
            states.len(),
            t.p_samples.len()
        )));
    }
    let mut out = Vec::with_capacity(states.len());
    for (k, (p, x)) in t.p_samples.iter().zip(states).enumerate() {
        let cond = condition_c(p);
        if cond > P_SAMPLE_COND_CAP {
            return Err(Error::Numerical(format!(
                "P sample {k} (t = {}) is singular to working precision (condition {cond:.3e})",
                t.phase_times[k]
            )));
        }
        let p_inv = inverse_c(p).expect("conditioned matrix is invertible");
        let xc = CVec2::new(Complex64::new(x.x1, 0.0), Complex64::new(x.x2, 0.0));
        out.push(p_inv * xc);
    }
    Ok(out)
}
