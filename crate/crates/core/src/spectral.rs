//! Perron eigenpairs of strongly connected components.
//!
//! The adjacency convention is `A[v][u] = c(u, v)`, so `(A x)_v` sums the
//! incoming edges of `v`. Right vectors satisfy `A x = λ x` and left vectors
//! `yᵀ A = λ yᵀ`; both are entrywise non-negative with unit 1-norm.

use crate::components::{strongly_connected_components, ComponentPartition};
use crate::error::CentralityError;
use crate::graph::{FloatGraph, Graph, NodeId};
use crate::linalg::{solve, Matrix, DENSE_LIMIT};
use crate::scalar::Scalar;

pub const MAX_ITERATIONS: usize = 200_000;
pub const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSpectrum {
    /// Member positions in the parent graph, ascending.
    pub nodes: Vec<usize>,
    pub strongly_connected: bool,
    pub lambda: f64,
    /// Indexed like `nodes`.
    pub right: Vec<f64>,
    pub left: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub ids: Vec<NodeId>,
    pub components: Vec<ComponentSpectrum>,
    /// Largest component value; the spectral radius of `A`.
    pub lambda: f64,
}

impl SpectralData {
    pub fn component_lambdas(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.lambda).collect()
    }
}

/// Spectral radius of `A` (the maximum over components).
pub fn principal_eigenvalue<W: Scalar>(g: &Graph<W>) -> Result<f64, CentralityError> {
    Ok(spectral_data(g)?.lambda)
}

pub fn spectral_data<W: Scalar>(g: &Graph<W>) -> Result<SpectralData, CentralityError> {
    let fg = g.to_float();
    let partition = strongly_connected_components(&fg);
    spectral_data_with(&fg, &partition)
}

pub(crate) fn spectral_data_with(
    g: &FloatGraph,
    partition: &ComponentPartition,
) -> Result<SpectralData, CentralityError> {
    let mut components = Vec::with_capacity(partition.len());
    let mut lambda = 0f64;
    for comp in &partition.components {
        let spectrum = if comp.strongly_connected {
            let sub = g.induced(&comp.nodes);
            let (l, right) = perron_right(&sub)?;
            let (_, left) = perron_right(&sub.opposite())?;
            ComponentSpectrum {
                nodes: comp.nodes.clone(),
                strongly_connected: true,
                lambda: l,
                right,
                left,
            }
        } else {
            // A loop-free singleton.
            ComponentSpectrum {
                nodes: comp.nodes.clone(),
                strongly_connected: false,
                lambda: 0.0,
                right: vec![1.0],
                left: vec![1.0],
            }
        };
        lambda = lambda.max(spectrum.lambda);
        components.push(spectrum);
    }
    Ok(SpectralData {
        ids: g.ids().to_vec(),
        components,
        lambda,
    })
}

fn apply(g: &FloatGraph, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for (u, v, c) in g.edges() {
        out[v] += c * x[u];
    }
    out
}

fn normalize(x: &mut [f64]) -> f64 {
    let s: f64 = x.iter().sum();
    if s > 0.0 {
        x.iter_mut().for_each(|v| *v /= s);
    }
    s
}

/// Perron value and right vector of a strongly connected graph.
///
/// Power iteration runs on `A + σI` with `σ` near the mean in-degree, which is
/// aperiodic even when the component is periodic. The result is then
/// polished by a few steps of shifted inverse iteration.
pub fn perron_right(g: &FloatGraph) -> Result<(f64, Vec<f64>), CentralityError> {
    let n = g.node_count();
    if n == 1 {
        return Ok((g.edge_weight(0, 0).copied().unwrap_or(0.0), vec![1.0]));
    }
    let sigma = g.edges().map(|(_, _, c)| *c).sum::<f64>() / n as f64;
    let mut x = vec![1.0 / n as f64; n];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let ax = apply(g, &x);
        let mut next: Vec<f64> = ax.iter().zip(&x).map(|(a, xi)| a + sigma * xi).collect();
        normalize(&mut next);
        let change: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if change <= TOLERANCE {
            converged = true;
            break;
        }
    }
    let lambda = rayleigh(g, &x);
    if n <= DENSE_LIMIT {
        if let Some((l, polished)) = polish(g, lambda, &x) {
            return Ok((l, polished));
        }
    }
    let res = residual(g, lambda, &x);
    if converged || res <= 1e-10 * lambda.max(1.0) {
        Ok((lambda, x))
    } else {
        Err(CentralityError::NonConvergence {
            iterations,
            residual: res,
        })
    }
}

fn rayleigh(g: &FloatGraph, x: &[f64]) -> f64 {
    apply(g, x).iter().sum::<f64>() / x.iter().sum::<f64>()
}

fn residual(g: &FloatGraph, lambda: f64, x: &[f64]) -> f64 {
    apply(g, x)
        .iter()
        .zip(x)
        .map(|(a, b)| (a - lambda * b).abs())
        .sum()
}

fn polish(g: &FloatGraph, lambda: f64, x0: &[f64]) -> Option<(f64, Vec<f64>)> {
    let n = x0.len();
    let mu = lambda * (1.0 + 1e-9) + 1e-12;
    let mut m = Matrix::<f64>::zeros(n);
    for (u, v, c) in g.edges() {
        m.add_to(v, u, *c);
    }
    for i in 0..n {
        m.add_to(i, i, -mu);
    }
    let mut x = x0.to_vec();
    for _ in 0..3 {
        let mut z = solve(&m, &x).ok()?;
        let sum: f64 = z.iter().sum();
        if !sum.is_finite() || sum == 0.0 {
            return None;
        }
        z.iter_mut().for_each(|v| *v /= sum);
        if z.iter().any(|v| *v < -1e-12) {
            return None;
        }
        z.iter_mut().for_each(|v| *v = v.max(0.0));
        x = z;
    }
    normalize(&mut x);
    let l = rayleigh(g, &x);
    let before = residual(g, lambda, x0);
    let after = residual(g, l, &x);
    (after <= before.max(1e-15 * l.max(1.0))).then_some((l, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> FloatGraph {
        let mut g = FloatGraph::new();
        for i in 0..n {
            g.add_node(&format!("n{i}"), 1.0).unwrap();
        }
        for &(u, v, c) in edges {
            g.add_edge(u, v, c).unwrap();
        }
        g
    }

    #[test]
    fn two_cycle_with_unequal_weights() {
        let g = graph(2, &[(0, 1, 2.0), (1, 0, 8.0)]);
        let (l, x) = perron_right(&g).unwrap();
        assert!((l - 4.0).abs() < 1e-12);
        // x_1 = 2 x_0 / 4
        assert!((x[1] / x[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn loop_singleton() {
        let g = graph(1, &[(0, 0, 3.0)]);
        assert_eq!(principal_eigenvalue(&g).unwrap(), 3.0);
        assert_eq!(principal_eigenvalue(&graph(1, &[])).unwrap(), 0.0);
    }

    #[test]
    fn periodic_cycle_converges() {
        let n = 7;
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.5)).collect();
        let (l, x) = perron_right(&graph(n, &edges)).unwrap();
        assert!((l - 1.5).abs() < 1e-12);
        assert!(x.iter().all(|v| (v - 1.0 / n as f64).abs() < 1e-14));
    }

    #[test]
    fn left_and_right_vectors() {
        let g = graph(3, &[(0, 1, 1.0), (1, 2, 2.0), (2, 0, 1.0), (1, 0, 1.0)]);
        let d = spectral_data(&g).unwrap();
        let c = &d.components[0];
        let ax = apply(&g, &c.right);
        for (a, x) in ax.iter().zip(&c.right) {
            assert!((a - c.lambda * x).abs() < 1e-12);
        }
        let ay = apply(&g.opposite(), &c.left);
        for (a, y) in ay.iter().zip(&c.left) {
            assert!((a - c.lambda * y).abs() < 1e-12);
        }
    }

    #[test]
    fn global_lambda_is_max_over_components() {
        let g = graph(4, &[(0, 1, 1.0), (1, 0, 1.0), (2, 3, 2.0), (3, 2, 2.0), (1, 2, 5.0)]);
        let d = spectral_data(&g).unwrap();
        let mut ls = d.component_lambdas();
        ls.sort_by(f64::total_cmp);
        assert!((ls[0] - 1.0).abs() < 1e-12 && (ls[1] - 2.0).abs() < 1e-12);
        assert!((d.lambda - 2.0).abs() < 1e-12);
    }
}
