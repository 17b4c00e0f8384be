//! Undirected graphs, the combinatorial Laplacian, and its real spectrum.
//!
//! The Laplacian L = D - A is symmetric positive semidefinite; its eigenvalues
//! 0 = λ_1 ≤ λ_2 ≤ ... ≤ λ_n drive the mode-wise stability analysis in
//! [`crate::floquet`]. Eigenvalues are computed with cyclic Jacobi rotations,
//! which are robust and self-contained for the dense, small matrices this
//! crate targets (n up to a few hundred).

use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Maximum number of cyclic Jacobi sweeps before reporting non-convergence.
const JACOBI_SWEEP_CAP: usize = 100;
/// Required symmetry of `spectrum` inputs, as max |L_ij - L_ji|.
const SYMMETRY_TOL: f64 = 1e-12;
/// Default Jacobi convergence threshold on the largest off-diagonal magnitude.
pub const DEFAULT_SPECTRUM_TOL: f64 = 1e-12;

/// Undirected, unweighted graph on nodes `0..n` with no self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Canonical edge list: pairs (i, j) with i < j, sorted, deduplicated.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Build a graph from an edge list, deduplicating under (i,j) ~ (j,i).
    ///
    /// Rejects `n = 0`, out-of-range endpoints, and self-loops.
    pub fn from_edge_list(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("graph must have at least one node".into()));
        }
        let mut edges = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::Config(format!(
                    "edge ({a}, {b}) references a node outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::Config(format!("self-loop on node {a} is not allowed")));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        edges.dedup();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        Ok(Graph { n, edges, adjacency })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Combinatorial Laplacian L = D - A: degree on the diagonal, -1 per edge.
    /// Every row sums to zero.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            l[(i, i)] = self.degree(i) as f64;
        }
        for &(a, b) in &self.edges {
            l[(a, b)] = -1.0;
            l[(b, a)] = -1.0;
        }
        l
    }

    /// Breadth-first reachability from node 0.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for &j in &self.adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == self.n
    }

    /// Laplacian spectrum at the given Jacobi tolerance.
    pub fn spectrum(&self, tol: f64) -> Result<SpectrumReport> {
        spectrum(&self.laplacian(), tol)
    }
}

/// The eight-node benchmark network: two 4-cycles bridged by a single
/// mediator edge. Node order is x1, x2, x3, x4, y1, y2, y3, y4 (indices 0..8),
/// with the bridge between x2 and y2.
pub fn paper_network() -> Graph {
    let edges = [
        (0, 1), // x1-x2
        (1, 2), // x2-x3
        (2, 3), // x3-x4
        (3, 0), // x4-x1
        (4, 5), // y1-y2
        (5, 6), // y2-y3
        (6, 7), // y3-y4
        (7, 4), // y4-y1
        (1, 5), // x2-y2 mediator bridge
    ];
    Graph::from_edge_list(8, &edges).expect("preset edge list is valid")
}

/// Node labels matching the row order of [`paper_network`].
pub const PAPER_NODE_LABELS: [&str; 8] = ["x1", "x2", "x3", "x4", "y1", "y2", "y3", "y4"];

/// Full real spectrum of a symmetric matrix, sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    /// Second-smallest eigenvalue; positive iff the graph is connected.
    pub algebraic_connectivity: f64,
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
///
/// The input must be symmetric to within 1e-12. Iteration stops once the
/// largest off-diagonal magnitude drops below `tol`; failing to converge
/// within 100 sweeps is a numerical error.
pub fn spectrum(l: &DMatrix<f64>, tol: f64) -> Result<SpectrumReport> {
    let n = l.nrows();
    if n == 0 || l.ncols() != n {
        return Err(Error::Config(format!(
            "spectrum requires a non-empty square matrix, got {}x{}",
            l.nrows(),
            l.ncols()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!("spectrum tolerance must be > 0, got {tol}")));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (l[(i, j)] - l[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::Config(format!(
                    "matrix is not symmetric: |A[{i},{j}] - A[{j},{i}]| = {}",
                    (l[(i, j)] - l[(j, i)]).abs()
                )));
            }
        }
    }
    let mut eigenvalues = jacobi_eigenvalues(l.clone(), tol)?;
    eigenvalues.sort_by(f64::total_cmp);
    let algebraic_connectivity = if n >= 2 { eigenvalues[1] } else { 0.0 };
    Ok(SpectrumReport { eigenvalues, algebraic_connectivity })
}

fn max_off_diagonal(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut max = 0.0f64;
    for p in 0..n {
        for q in (p + 1)..n {
            max = max.max(a[(p, q)].abs());
        }
    }
    max
}

/// Cyclic Jacobi sweeps: rotate away each upper-triangle entry in turn until
/// the off-diagonal mass is below `tol`.
fn jacobi_eigenvalues(mut a: DMatrix<f64>, tol: f64) -> Result<Vec<f64>> {
    let n = a.nrows();
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    for _ in 0..JACOBI_SWEEP_CAP {
        if max_off_diagonal(&a) < tol {
            return Ok((0..n).map(|i| a[(i, i)]).collect());
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                // Rotation angle zeroing a[p][q]; t is tan(theta) with the
                // smaller-magnitude root for numerical stability.
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = c * aip - s * aiq;
                        a[(p, i)] = a[(i, p)];
                        a[(i, q)] = s * aip + c * aiq;
                        a[(q, i)] = a[(i, q)];
                    }
                }
                a[(p, p)] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a[(q, q)] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
            }
        }
    }
    Err(Error::Numerical(format!(
        "Jacobi eigensolver did not converge within {JACOBI_SWEEP_CAP} sweeps (residual {})",
        max_off_diagonal(&a)
    )))
}
