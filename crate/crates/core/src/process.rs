//! Distributed and parallel spread processes.
//!
//! At `t = 0` every node holds its weight `b(v)`. In one step each node sends
//! `alpha · factor(u, v) · amount(u)` along every outgoing edge, where the
//! factor is `c(u,v)/deg⁺_u` (distributed) or `c(u,v)` (parallel). Whatever a
//! sink holds is dropped in the next step.

use crate::error::ProcessError;
use crate::graph::Graph;
use crate::linalg::{solve, Matrix};
use crate::scalar::Scalar;
use crate::spectral::principal_eigenvalue;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spread {
    Distributed,
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessKind<W> {
    pub spread: Spread,
    pub alpha: W,
}

impl<W: Scalar> ProcessKind<W> {
    pub fn distributed(alpha: W) -> Self {
        ProcessKind {
            spread: Spread::Distributed,
            alpha,
        }
    }

    pub fn parallel(alpha: W) -> Self {
        ProcessKind {
            spread: Spread::Parallel,
            alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessState<W> {
    pub t: usize,
    /// Indexed by node position.
    pub amounts: Vec<W>,
}

impl<W: Scalar> ProcessState<W> {
    pub fn initial(g: &Graph<W>) -> Self {
        ProcessState {
            t: 0,
            amounts: g.node_weights().to_vec(),
        }
    }

    pub fn total(&self) -> W {
        self.amounts.iter().fold(W::zero(), |a, v| a + v.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesAccumulator<W> {
    /// Number of steps taken; `partial_sum` covers `t = 0..=steps`.
    pub steps: usize,
    pub partial_sum: Vec<W>,
    pub last: ProcessState<W>,
}

impl<W: Scalar> SeriesAccumulator<W> {
    /// `partial_sum / steps`: the sum over `steps + 1` terms divided by
    /// `steps`. Undefined at zero steps.
    pub fn cesaro(&self) -> Option<Vec<W>> {
        if self.steps == 0 {
            return None;
        }
        let t = W::from_ratio(self.steps as i64, 1);
        Some(self.partial_sum.iter().map(|s| s.clone() / t.clone()).collect())
    }
}

/// Per-edge transfer coefficients `(u, v, alpha · factor)`.
struct Transfer<W> {
    n: usize,
    edges: Vec<(usize, usize, W)>,
}

impl<W: Scalar> Transfer<W> {
    fn new(g: &Graph<W>, kind: &ProcessKind<W>) -> Self {
        let degrees = g.out_degrees();
        let edges = g
            .edges()
            .map(|(u, v, c)| {
                let f = match kind.spread {
                    Spread::Distributed => c.clone() / degrees[u].clone(),
                    Spread::Parallel => c.clone(),
                };
                (u, v, kind.alpha.clone() * f)
            })
            .collect();
        Transfer {
            n: g.node_count(),
            edges,
        }
    }

    fn apply(&self, x: &[W]) -> Vec<W> {
        let mut out = vec![W::zero(); self.n];
        for (u, v, f) in &self.edges {
            if !x[*u].is_zero() {
                out[*v] = out[*v].clone() + f.clone() * x[*u].clone();
            }
        }
        out
    }
}

fn advance<W: Scalar>(tr: &Transfer<W>, s: &ProcessState<W>) -> Result<ProcessState<W>, ProcessError> {
    let amounts = tr.apply(&s.amounts);
    if !W::EXACT && amounts.iter().any(|a| !a.is_finite_value()) {
        return Err(ProcessError::Divergence { step: s.t + 1 });
    }
    Ok(ProcessState {
        t: s.t + 1,
        amounts,
    })
}

fn check_kind<W: Scalar>(kind: &ProcessKind<W>) -> Result<(), ProcessError> {
    if kind.alpha.lt_zero() || !kind.alpha.is_finite_value() {
        return Err(ProcessError::Precondition(format!(
            "alpha must be non-negative, got {}",
            kind.alpha.to_text()
        )));
    }
    Ok(())
}

pub fn step<W: Scalar>(
    g: &Graph<W>,
    kind: &ProcessKind<W>,
    s: &ProcessState<W>,
) -> Result<ProcessState<W>, ProcessError> {
    check_kind(kind)?;
    if s.amounts.len() != g.node_count() {
        return Err(ProcessError::Precondition("state does not match graph".into()));
    }
    advance(&Transfer::new(g, kind), s)
}

/// Runs `steps` steps and accumulates the amounts of `t = 0..=steps`.
pub fn sum_series<W: Scalar>(
    g: &Graph<W>,
    kind: &ProcessKind<W>,
    steps: usize,
) -> Result<SeriesAccumulator<W>, ProcessError> {
    check_kind(kind)?;
    let tr = Transfer::new(g, kind);
    let mut state = ProcessState::initial(g);
    let mut partial_sum = state.amounts.clone();
    for _ in 0..steps {
        state = advance(&tr, &state)?;
        for (p, a) in partial_sum.iter_mut().zip(&state.amounts) {
            *p = p.clone() + a.clone();
        }
    }
    Ok(SeriesAccumulator {
        steps,
        partial_sum,
        last: state,
    })
}

/// Trajectory of states `t = 0..=steps`.
pub fn trajectory<W: Scalar>(
    g: &Graph<W>,
    kind: &ProcessKind<W>,
    steps: usize,
) -> Result<Vec<ProcessState<W>>, ProcessError> {
    check_kind(kind)?;
    let tr = Transfer::new(g, kind);
    let mut out = vec![ProcessState::initial(g)];
    for _ in 0..steps {
        let next = advance(&tr, out.last().expect("non-empty"))?;
        out.push(next);
    }
    Ok(out)
}

/// Upper bound on `Σ_{t > steps} amount_v(t)` for every node.
///
/// Distributed processes lose no mass except at sinks, so the total at step
/// `t` is at most `alphaᵗ Σb`. For parallel processes a positive weighting
/// `y` with `α·Cy ≤ ρ·y` (`C[u][v] = c(u,v)`, `ρ < 1`) gives
/// `amount_v(t) ≤ ρᵗ · yᵀb / y_v`.
pub fn geometric_tail_bound<W: Scalar>(
    g: &Graph<W>,
    kind: &ProcessKind<W>,
    steps: usize,
) -> Result<Vec<f64>, ProcessError> {
    check_kind(kind)?;
    let alpha = kind.alpha.to_f64();
    let n = g.node_count();
    let b: Vec<f64> = g.node_weights().iter().map(Scalar::to_f64).collect();
    let exponent = steps as i32 + 1;
    match kind.spread {
        Spread::Distributed => {
            if alpha >= 1.0 {
                return Err(ProcessError::Precondition(format!(
                    "distributed tail bound needs alpha < 1, got {alpha}"
                )));
            }
            let total: f64 = b.iter().sum();
            let bound = alpha.powi(exponent) / (1.0 - alpha) * total;
            Ok(vec![bound * (1.0 + 1e-12); n])
        }
        Spread::Parallel => {
            let lambda = principal_eigenvalue(g)?;
            if alpha * lambda >= 1.0 {
                return Err(ProcessError::Precondition(format!(
                    "parallel tail bound needs alpha*lambda < 1, got {}",
                    alpha * lambda
                )));
            }
            if alpha == 0.0 {
                return Ok(vec![0.0; n]);
            }
            let fg = g.to_float();
            let shifted = if lambda > 0.0 {
                (alpha + 1.0 / lambda) / 2.0
            } else {
                2.0 * alpha + 1.0
            };
            // y = (I − shifted·C)⁻¹ 1
            let mut m = Matrix::<f64>::identity(n);
            for (u, v, c) in fg.edges() {
                m.add_to(u, v, -shifted * c);
            }
            let y = solve(&m, &vec![1.0; n])?;
            if y.iter().any(|v| !(*v >= 1.0 - 1e-9)) {
                return Err(ProcessError::Precondition("tail weighting is not positive".into()));
            }
            let mut cy = vec![0.0; n];
            for (u, v, c) in fg.edges() {
                cy[u] += c * y[v];
            }
            let rho = (0..n).map(|u| alpha * cy[u] / y[u]).fold(0.0, f64::max);
            if rho >= 1.0 {
                return Err(ProcessError::Precondition(format!(
                    "tail contraction factor {rho} is not below 1"
                )));
            }
            let yb: f64 = y.iter().zip(&b).map(|(a, c)| a * c).sum();
            let scale = rho.powi(exponent) / (1.0 - rho) * yb;
            Ok(y.iter().map(|yv| scale / yv * (1.0 + 1e-9)).collect())
        }
    }
}

/// Which recursion a vector is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recursion {
    /// `x = b + α·F x`, satisfied by the infinite series.
    Series,
    /// `x = α·F x`, satisfied by the Cesàro limit.
    Cesaro,
}

/// `max_v |x_v − rhs_v|` for the chosen recursion.
pub fn recursion_deviation<W: Scalar>(
    g: &Graph<W>,
    kind: &ProcessKind<W>,
    x: &[W],
    recursion: Recursion,
) -> W {
    let tr = Transfer::new(g, kind);
    let fx = tr.apply(x);
    let mut worst = W::zero();
    for v in 0..g.node_count() {
        let rhs = match recursion {
            Recursion::Series => g.node_weight(v).clone() + fx[v].clone(),
            Recursion::Cesaro => fx[v].clone(),
        };
        worst = worst.max_of((x[v].clone() - rhs).abs());
    }
    worst
}

/// Runs `steps` steps and reports how far the partial sum (or Cesàro
/// average) is from satisfying its recursion.
pub fn verify_recursion<W: Scalar>(
    g: &Graph<W>,
    kind: &ProcessKind<W>,
    steps: usize,
    recursion: Recursion,
) -> Result<W, ProcessError> {
    let acc = sum_series(g, kind, steps)?;
    let x = match recursion {
        Recursion::Series => acc.partial_sum,
        Recursion::Cesaro => acc
            .cesaro()
            .ok_or_else(|| ProcessError::Precondition("Cesàro average needs at least one step".into()))?,
    };
    Ok(recursion_deviation(g, kind, &x, recursion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ExactGraph, FloatGraph};
    use crate::scalar::Rational;

    fn two_cycle() -> FloatGraph {
        let mut g = FloatGraph::new();
        g.add_node("a", 1.0).unwrap();
        g.add_node("b", 0.0).unwrap();
        g.add_edge(0, 1, 1.0).unwrap();
        g.add_edge(1, 0, 1.0).unwrap();
        g
    }

    #[test]
    fn permutation_step() {
        let g = two_cycle();
        let s = step(&g, &ProcessKind::distributed(1.0), &ProcessState::initial(&g)).unwrap();
        assert_eq!(s.amounts, vec![0.0, 1.0]);
        assert_eq!(s.t, 1);
    }

    #[test]
    fn loop_with_matching_decay_is_stationary() {
        let mut g = ExactGraph::new();
        g.add_node("s", Rational::from_ratio(1, 1)).unwrap();
        g.add_edge(0, 0, Rational::from_ratio(3, 1)).unwrap();
        let kind = ProcessKind::parallel(Rational::from_ratio(1, 3));
        let states = trajectory(&g, &kind, 10).unwrap();
        assert!(states.iter().all(|s| s.amounts[0] == Rational::from_ratio(1, 1)));
    }

    #[test]
    fn zero_steps_is_node_weights() {
        let g = two_cycle();
        let acc = sum_series(&g, &ProcessKind::distributed(0.5), 0).unwrap();
        assert_eq!(acc.partial_sum, g.node_weights());
        assert!(acc.cesaro().is_none());
    }

    #[test]
    fn source_target_partial_sum() {
        let mut g = FloatGraph::new();
        g.add_node("u", 2.0).unwrap();
        g.add_node("v", 0.0).unwrap();
        g.add_edge(0, 1, 1.0).unwrap();
        for t in [1, 5, 40] {
            let acc = sum_series(&g, &ProcessKind::distributed(0.3), t).unwrap();
            assert!((acc.partial_sum[1] - 0.6).abs() < 1e-15);
        }
    }

    #[test]
    fn distributed_tail_bound_formula() {
        let mut g = two_cycle();
        g.set_node_weight(0, 1.0).unwrap();
        let b = geometric_tail_bound(&g, &ProcessKind::distributed(0.5), 20).unwrap();
        assert!((b[0] - 0.5f64.powi(21) / 0.5).abs() < 1e-18);
        let b = geometric_tail_bound(&g, &ProcessKind::distributed(0.0), 0).unwrap();
        assert_eq!(b, vec![0.0, 0.0]);
        assert!(geometric_tail_bound(&g, &ProcessKind::distributed(1.0), 3).is_err());
    }

    #[test]
    fn parallel_tail_bound_dominates_tail() {
        let mut g = two_cycle();
        g.add_edge(0, 0, 1.0).unwrap();
        let kind = ProcessKind::parallel(0.4);
        let long = sum_series(&g, &kind, 4000).unwrap();
        for t in [0, 3, 10] {
            let short = sum_series(&g, &kind, t).unwrap();
            let bound = geometric_tail_bound(&g, &kind, t).unwrap();
            for v in 0..2 {
                assert!(long.partial_sum[v] - short.partial_sum[v] <= bound[v]);
            }
        }
        assert!(geometric_tail_bound(&g, &ProcessKind::parallel(1.0), 3).is_err());
    }

    #[test]
    fn cesaro_recursion_on_cycle() {
        let g = two_cycle();
        let d = verify_recursion(&g, &ProcessKind::distributed(1.0), 1000, Recursion::Cesaro).unwrap();
        assert!(d <= 2e-3, "{d}");
        let exact = recursion_deviation(&g, &ProcessKind::distributed(1.0), &[0.5, 0.5], Recursion::Cesaro);
        assert_eq!(exact, 0.0);
    }

    #[test]
    fn overflow_is_reported() {
        let mut g = FloatGraph::new();
        g.add_node("s", 1.0).unwrap();
        g.add_edge(0, 0, 1e200).unwrap();
        let e = sum_series(&g, &ProcessKind::parallel(1e200), 5).unwrap_err();
        assert!(matches!(e, ProcessError::Divergence { step: 1 | 2 }));
    }
}
