//! Linearized alignment analysis: builds the interaction graph of a frozen
//! configuration and reports the spectrum of the reduced consensus operator
//!
//! ```text
//! M = -phi * (I + theta * phi * t_ph * A)^-1 * L
//! ```
//!
//! The full velocity dynamics act on R^(n*m) through `A (x) I_m` and
//! `L (x) I_m`, but the Kronecker structure means the big operator's
//! spectrum is exactly this n x n matrix's spectrum with multiplicity m, so
//! only the reduction is ever materialized. On a connected graph with a
//! well-conditioned preconditioner, one eigenvalue is zero (the consensus
//! direction) and the rest have negative real part; the least negative of
//! those is the slowest alignment decay rate.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::vec::VecM;

/// Margin below which the preconditioner is treated as singular.
const SINGULAR_MARGIN: f64 = 1e-10;

/// Relative tolerance separating structural zero modes from decaying ones.
const TOL_ZERO: f64 = 1e-9;

/// Adjacency and Laplacian of an interaction graph.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphMatrices {
    /// Symmetric 0/1 adjacency with zero diagonal.
    pub adjacency: DMatrix<f64>,
    /// L = D - A.
    pub laplacian: DMatrix<f64>,
}

impl GraphMatrices {
    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n())
            .map(|i| self.adjacency.row(i).iter().sum())
            .collect()
    }

    /// Connected components via depth-first search on the adjacency.
    #[allow(clippy::needless_range_loop)]
    pub fn component_count(&self) -> usize {
        let n = self.n();
        let mut visited = vec![false; n];
        let mut components = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            components += 1;
            visited[start] = true;
            stack.push(start);
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    if !visited[j] && self.adjacency[(i, j)] != 0.0 {
                        visited[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        components
    }
}

/// Build the r-ball interaction graph of a frozen configuration.
pub fn build_graph(positions: &[VecM], r: f64) -> GraphMatrices {
    let n = positions.len();
    let mut adjacency = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            if (&positions[j] - &positions[i]).norm() <= r {
                adjacency[(i, j)] = 1.0;
                adjacency[(j, i)] = 1.0;
            }
        }
    }
    graph_from_adjacency(adjacency)
}

/// Build a graph from an explicit undirected edge list.
pub fn graph_from_edges(n: usize, edges: &[(usize, usize)]) -> GraphMatrices {
    let mut adjacency = DMatrix::zeros(n, n);
    for &(i, j) in edges {
        assert!(i != j && i < n && j < n, "invalid edge ({i}, {j})");
        adjacency[(i, j)] = 1.0;
        adjacency[(j, i)] = 1.0;
    }
    graph_from_adjacency(adjacency)
}

fn graph_from_adjacency(adjacency: DMatrix<f64>) -> GraphMatrices {
    let n = adjacency.nrows();
    let mut laplacian = DMatrix::zeros(n, n);
    for i in 0..n {
        let degree: f64 = adjacency.row(i).iter().sum();
        laplacian[(i, i)] = degree;
        for j in 0..n {
            if i != j {
                laplacian[(i, j)] = -adjacency[(i, j)];
            }
        }
    }
    GraphMatrices {
        adjacency,
        laplacian,
    }
}

/// Alignment weight entering the linearized operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhiWeights {
    /// One uniform weight for every agent (the default analysis mode).
    Scalar(f64),
    /// Per-agent weights 1/deg_i assembled as a diagonal scaling; agents of
    /// degree zero get weight zero.
    PerAgent,
}

/// The reduced consensus operator together with the invertibility margin
/// (smallest singular value of the preconditioner) and its condition
/// estimate.
pub fn reduced_operator(
    graph: &GraphMatrices,
    theta: f64,
    phi: PhiWeights,
    t_ph: f64,
) -> Result<(DMatrix<f64>, f64, f64)> {
    let n = graph.n();
    let identity = DMatrix::<f64>::identity(n, n);

    // Phi A and Phi L with either the scalar or the diagonal weighting.
    let (weighted_a, weighted_l) = match phi {
        PhiWeights::Scalar(value) => (&graph.adjacency * value, &graph.laplacian * value),
        PhiWeights::PerAgent => {
            let mut a = graph.adjacency.clone();
            let mut l = graph.laplacian.clone();
            for (i, degree) in graph.degrees().iter().enumerate() {
                let w = if *degree > 0.0 { 1.0 / degree } else { 0.0 };
                for j in 0..n {
                    a[(i, j)] *= w;
                    l[(i, j)] *= w;
                }
            }
            (a, l)
        }
    };

    let coupling = theta * t_ph;
    if coupling == 0.0 {
        // Preconditioner collapses to the identity.
        return Ok((-weighted_l, 1.0, 1.0));
    }

    let preconditioner = &identity + &weighted_a * coupling;
    let singular_values = preconditioner.clone().svd(false, false).singular_values;
    let margin = singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let largest = singular_values.iter().cloned().fold(0.0f64, f64::max);
    let condition = if margin > 0.0 { largest / margin } else { f64::INFINITY };
    if margin < SINGULAR_MARGIN {
        return Err(Error::SingularPreconditioner { margin, condition });
    }
    let inverse = preconditioner
        .try_inverse()
        .ok_or(Error::SingularPreconditioner { margin, condition })?;
    Ok((-(inverse * weighted_l), margin, condition))
}

/// Eigen-decomposition of the reduced operator with stability
/// classification.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    /// Eigenvalues sorted by (real, imaginary) part.
    pub eigenvalues: Vec<Complex<f64>>,
    /// Modes with |lambda| below the scaled zero tolerance.
    pub zero_modes: usize,
    /// Most positive real part among nonzero modes; `None` when every mode
    /// is a zero mode.
    pub slowest_decay: Option<f64>,
    /// Smallest singular value of the preconditioner.
    pub margin: f64,
    /// Condition estimate of the preconditioner.
    pub condition: f64,
    /// Stable iff the zero modes match the component count and every other
    /// mode decays.
    pub stable: bool,
    pub note: Option<String>,
}

/// Classify the spectrum of a reduced operator. `component_count` is the
/// number of connected components of the underlying graph (the expected
/// dimension of the consensus subspace).
pub fn spectral_report(
    matrix: &DMatrix<f64>,
    component_count: usize,
    margin: f64,
    condition: f64,
) -> Result<SpectralReport> {
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigensolverFailure);
    }
    // The Schur iteration does not accept the all-zero matrix; its spectrum
    // is trivial anyway.
    let max_entry = matrix.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let mut eigenvalues: Vec<Complex<f64>> = if max_entry == 0.0 {
        vec![Complex::new(0.0, 0.0); matrix.nrows()]
    } else {
        let schur = nalgebra::linalg::Schur::try_new(matrix.clone(), f64::EPSILON, 100_000)
            .ok_or(Error::EigensolverFailure)?;
        schur.complex_eigenvalues().iter().cloned().collect()
    };
    if eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigensolverFailure);
    }
    eigenvalues.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());

    let max_abs = eigenvalues.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if max_abs < 1e-12 {
        // Edgeless graph: the operator is the zero matrix. Every mode is
        // marginal, which is not consensus stability.
        let n = eigenvalues.len();
        return Ok(SpectralReport {
            eigenvalues,
            zero_modes: n,
            slowest_decay: None,
            margin,
            condition,
            stable: false,
            note: Some("trivially marginal: zero operator (no edges)".to_string()),
        });
    }

    let tol = TOL_ZERO * max_abs;
    let zero_modes = eigenvalues.iter().filter(|z| z.norm() < tol).count();
    let slowest_decay = eigenvalues
        .iter()
        .filter(|z| z.norm() >= tol)
        .map(|z| z.re)
        .fold(None, |acc: Option<f64>, re| {
            Some(acc.map_or(re, |a| a.max(re)))
        });
    let decaying = slowest_decay.is_none_or(|re| re < 0.0);
    let stable = zero_modes == component_count && decaying;
    let note = if !decaying {
        Some("non-decaying mode: prediction coupling pushed the spectrum across zero".to_string())
    } else if zero_modes != component_count {
        Some(format!(
            "zero-mode count {zero_modes} does not match component count {component_count}"
        ))
    } else {
        None
    };

    Ok(SpectralReport {
        eigenvalues,
        zero_modes,
        slowest_decay,
        margin,
        condition,
        stable,
        note,
    })
}

/// Convenience: operator plus report in one call.
pub fn analyze_graph(
    graph: &GraphMatrices,
    theta: f64,
    phi: PhiWeights,
    t_ph: f64,
) -> Result<SpectralReport> {
    let (matrix, margin, condition) = reduced_operator(graph, theta, phi, t_ph)?;
    spectral_report(&matrix, graph.component_count(), margin, condition)
}
