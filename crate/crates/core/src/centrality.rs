//! Closed-form solvers for the four feedback centralities.

use std::fmt;

use crate::classes::{classify, GraphClass};
use crate::components::strongly_connected_components;
use crate::error::CentralityError;
use crate::graph::{Graph, NodeId};
use crate::linalg::{solve, Matrix};
use crate::scalar::Scalar;
use crate::spectral::spectral_data_with;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    Eigenvector,
    Katz(f64),
    KatzPrestige,
    PageRank(f64),
}

impl Measure {
    pub fn alpha(&self) -> Option<f64> {
        match self {
            Measure::Katz(a) | Measure::PageRank(a) => Some(*a),
            _ => None,
        }
    }

    pub fn class(&self) -> GraphClass {
        match self {
            Measure::Eigenvector => GraphClass::Eigenvector,
            Measure::KatzPrestige => GraphClass::KatzPrestige,
            Measure::Katz(a) => GraphClass::Katz(*a),
            Measure::PageRank(_) => GraphClass::All,
        }
    }

    /// Short tag used on the command line: `ev`, `katz`, `kp`, `pr`.
    pub fn short_name(&self) -> &'static str {
        match self {
            Measure::Eigenvector => "ev",
            Measure::Katz(_) => "katz",
            Measure::KatzPrestige => "kp",
            Measure::PageRank(_) => "pr",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Eigenvector => write!(f, "EIGENVECTOR"),
            Measure::Katz(a) => write!(f, "KATZ({a})"),
            Measure::KatzPrestige => write!(f, "KATZ_PRESTIGE"),
            Measure::PageRank(a) => write!(f, "PAGERANK({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector<W> {
    pub measure: Measure,
    pub ids: Vec<NodeId>,
    /// Indexed by node position.
    pub values: Vec<W>,
    /// Principal eigenvalue, for eigenvector centrality.
    pub lambda: Option<f64>,
}

impl<W: Scalar> CentralityVector<W> {
    pub fn get(&self, id: &str) -> Option<&W> {
        self.ids
            .iter()
            .position(|n| n.as_str() == id)
            .map(|i| &self.values[i])
    }

    pub fn total(&self) -> W {
        self.values.iter().fold(W::zero(), |a, v| a + v.clone())
    }

    pub fn to_float(&self) -> CentralityVector<f64> {
        CentralityVector {
            measure: self.measure,
            ids: self.ids.clone(),
            values: self.values.iter().map(Scalar::to_f64).collect(),
            lambda: self.lambda,
        }
    }
}

fn check_alpha<W: Scalar>(alpha: &W, below_one: bool) -> Result<(), CentralityError> {
    let bad = alpha.lt_zero() || !alpha.is_finite_value() || (below_one && alpha >= &W::one());
    if bad {
        Err(CentralityError::InvalidAlpha(alpha.to_text()))
    } else {
        Ok(())
    }
}

fn require_class<W: Scalar>(
    g: &Graph<W>,
    measure: &Measure,
) -> Result<Option<f64>, CentralityError> {
    let verdict = classify(g, measure.class())?;
    if verdict.member {
        Ok(verdict.lambda)
    } else {
        Err(CentralityError::ClassViolation {
            measure: measure.to_string(),
            reason: verdict.diagnostic,
        })
    }
}

fn clamp_nonnegative<W: Scalar>(values: Vec<W>) -> Vec<W> {
    if W::EXACT {
        return values;
    }
    values
        .into_iter()
        .map(|v| if v.lt_zero() { W::zero() } else { v })
        .collect()
}

/// Solves `x = alpha · M x + b` where `M[v][u] = factor(u, v)`.
fn solve_linear_recursion<W: Scalar>(
    g: &Graph<W>,
    alpha: &W,
    factor: impl Fn(usize, &W) -> W,
) -> Result<Vec<W>, CentralityError> {
    let n = g.node_count();
    let mut m = Matrix::<W>::identity(n);
    for (u, v, c) in g.edges() {
        m.add_to(v, u, -(alpha.clone() * factor(u, c)));
    }
    solve(&m, g.node_weights()).map(clamp_nonnegative)
}

/// PageRank without teleportation: `PR = a · Σ c/deg⁺ · PR_u + b`.
pub fn pagerank<W: Scalar>(g: &Graph<W>, alpha: &W) -> Result<CentralityVector<W>, CentralityError> {
    check_alpha(alpha, true)?;
    let degrees = g.out_degrees();
    let values = solve_linear_recursion(g, alpha, |u, c| c.clone() / degrees[u].clone())?;
    Ok(CentralityVector {
        measure: Measure::PageRank(alpha.to_f64()),
        ids: g.ids().to_vec(),
        values,
        lambda: None,
    })
}

/// Katz centrality `K = a · Σ c · K_u + b`, defined when `a·λ < 1`.
pub fn katz_centrality<W: Scalar>(
    g: &Graph<W>,
    alpha: &W,
) -> Result<CentralityVector<W>, CentralityError> {
    check_alpha(alpha, false)?;
    let measure = Measure::Katz(alpha.to_f64());
    require_class(g, &measure)?;
    let values = solve_linear_recursion(g, alpha, |_, c| c.clone())?;
    Ok(CentralityVector {
        measure,
        ids: g.ids().to_vec(),
        values,
        lambda: None,
    })
}

/// Katz prestige: per component, the stationary distribution of the
/// out-degree-normalized chain scaled by the component's total node weight.
pub fn katz_prestige<W: Scalar>(g: &Graph<W>) -> Result<CentralityVector<W>, CentralityError> {
    let measure = Measure::KatzPrestige;
    require_class(g, &measure)?;
    let degrees = g.out_degrees();
    let partition = strongly_connected_components(g);
    let mut values = vec![W::zero(); g.node_count()];
    for comp in &partition.components {
        let total = comp
            .nodes
            .iter()
            .fold(W::zero(), |a, &v| a + g.node_weight(v).clone());
        if total.is_zero() {
            continue;
        }
        let pi = stationary(g, &comp.nodes, &degrees)?;
        for (&v, p) in comp.nodes.iter().zip(pi) {
            values[v] = total.clone() * p;
        }
    }
    Ok(CentralityVector {
        measure,
        ids: g.ids().to_vec(),
        values: clamp_nonnegative(values),
        lambda: None,
    })
}

/// Stationary distribution of the chain `u → v` with probability
/// `c(u,v)/deg⁺_u`, restricted to the strongly connected `nodes`.
fn stationary<W: Scalar>(g: &Graph<W>, nodes: &[usize], degrees: &[W]) -> Result<Vec<W>, CentralityError> {
    let k = nodes.len();
    let mut local = vec![usize::MAX; g.node_count()];
    for (i, &v) in nodes.iter().enumerate() {
        local[v] = i;
    }
    let mut m = Matrix::<W>::identity(k);
    for &u in nodes {
        for (v, c) in g.out_edges(u) {
            let p = c.clone() / degrees[u].clone();
            m.add_to(local[v], local[u], -p);
        }
    }
    // One balance equation is redundant; replace it with Σπ = 1.
    for j in 0..k {
        m.set(k - 1, j, W::one());
    }
    let mut rhs = vec![W::zero(); k];
    rhs[k - 1] = W::one();
    solve(&m, &rhs)
}

/// Eigenvector centrality, normalized as the Cesàro limit of `(A/λ)ᵗ b`:
/// per component `x · (yᵀb)/(yᵀx)` with right and left Perron vectors.
/// Float only; exact weight types are rejected.
pub fn eigenvector_centrality<W: Scalar>(g: &Graph<W>) -> Result<CentralityVector<W>, CentralityError> {
    if W::EXACT {
        return Err(CentralityError::Unsupported("eigenvector centrality".into()));
    }
    let measure = Measure::Eigenvector;
    require_class(g, &measure)?;
    let fg = g.to_float();
    let partition = strongly_connected_components(&fg);
    let spectral = spectral_data_with(&fg, &partition)?;
    let mut values = vec![0f64; fg.node_count()];
    for comp in &spectral.components {
        let yb: f64 = comp
            .nodes
            .iter()
            .zip(&comp.left)
            .map(|(&v, y)| y * fg.node_weight(v))
            .sum();
        let yx: f64 = comp.left.iter().zip(&comp.right).map(|(y, x)| y * x).sum();
        for (&v, x) in comp.nodes.iter().zip(&comp.right) {
            values[v] = x * yb / yx;
        }
    }
    Ok(CentralityVector {
        measure,
        ids: g.ids().to_vec(),
        values: values
            .into_iter()
            .map(|v| W::from_f64(v.max(0.0)).expect("finite centrality"))
            .collect(),
        lambda: Some(spectral.lambda),
    })
}

/// Dispatches on `measure`; decay parameters convert exactly from `f64`.
pub fn compute_measure<W: Scalar>(
    g: &Graph<W>,
    measure: &Measure,
) -> Result<CentralityVector<W>, CentralityError> {
    let alpha = |a: f64| W::from_f64(a).ok_or_else(|| CentralityError::InvalidAlpha(a.to_string()));
    match measure {
        Measure::Eigenvector => eigenvector_centrality(g),
        Measure::KatzPrestige => katz_prestige(g),
        Measure::Katz(a) => katz_centrality(g, &alpha(*a)?),
        Measure::PageRank(a) => pagerank(g, &alpha(*a)?),
    }
    .map(|mut cv| {
        cv.measure = *measure;
        cv
    })
}

/// Maximum over nodes of `|lhs − rhs|` in the measure's recursive equation.
pub fn residual<W: Scalar>(g: &Graph<W>, cv: &CentralityVector<W>) -> W {
    let degrees = g.out_degrees();
    let x = &cv.values;
    let n = g.node_count();
    let (alpha, normalized, with_b) = match cv.measure {
        Measure::PageRank(a) => (W::from_f64(a).unwrap_or_else(W::zero), true, true),
        Measure::Katz(a) => (W::from_f64(a).unwrap_or_else(W::zero), false, true),
        Measure::KatzPrestige => (W::one(), true, false),
        Measure::Eigenvector => {
            let l = cv.lambda.unwrap_or(0.0);
            let inv = if l > 0.0 { 1.0 / l } else { 0.0 };
            (W::from_f64(inv).unwrap_or_else(W::zero), false, false)
        }
    };
    let mut rhs: Vec<W> = if with_b {
        g.node_weights().to_vec()
    } else {
        vec![W::zero(); n]
    };
    for (u, v, c) in g.edges() {
        let f = if normalized {
            c.clone() / degrees[u].clone()
        } else {
            c.clone()
        };
        rhs[v] = rhs[v].clone() + alpha.clone() * f * x[u].clone();
    }
    rhs.into_iter()
        .zip(x)
        .fold(W::zero(), |m, (r, xv)| m.max_of((xv.clone() - r).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ExactGraph, FloatGraph};
    use crate::scalar::Rational;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    fn two_node(x: f64) -> FloatGraph {
        let mut g = FloatGraph::new();
        g.add_node("u", x).unwrap();
        g.add_node("v", 0.0).unwrap();
        g.add_edge(0, 1, 1.0).unwrap();
        g
    }

    #[test]
    fn source_target_pair() {
        let g = two_node(0.7);
        let pr = pagerank(&g, &0.85).unwrap();
        assert!((pr.values[0] - 0.7).abs() < 1e-15);
        assert!((pr.values[1] - 0.85 * 0.7).abs() < 1e-15);
        let k = katz_centrality(&g, &0.3).unwrap();
        assert!((k.values[1] - 0.3 * 0.7).abs() < 1e-15);
    }

    #[test]
    fn zero_decay_returns_node_weights() {
        let mut g = two_node(0.4);
        g.add_edge(1, 0, 2.0).unwrap();
        assert_eq!(pagerank(&g, &0.0).unwrap().values, g.node_weights());
        assert_eq!(katz_centrality(&g, &0.0).unwrap().values, g.node_weights());
    }

    #[test]
    fn pagerank_rejects_bad_alpha() {
        let g = two_node(1.0);
        assert!(pagerank(&g, &1.0).is_err());
        assert!(pagerank(&g, &-0.1).is_err());
    }

    #[test]
    fn katz_refuses_outside_class() {
        let mut g = two_node(1.0);
        g.add_edge(1, 0, 1.0).unwrap();
        let e = katz_centrality(&g, &1.0).unwrap_err();
        assert!(matches!(e, CentralityError::ClassViolation { .. }), "{e}");
    }

    #[test]
    fn kp_exact_on_three_cycle_with_chord() {
        let mut g = ExactGraph::new();
        for id in ["a", "b", "c"] {
            g.add_node(id, q(1, 3)).unwrap();
        }
        g.add_edge(0, 1, q(1, 1)).unwrap();
        g.add_edge(1, 2, q(1, 1)).unwrap();
        g.add_edge(2, 0, q(1, 1)).unwrap();
        g.add_edge(0, 2, q(1, 1)).unwrap();
        let kp = katz_prestige(&g).unwrap();
        assert_eq!(kp.total(), q(1, 1));
        assert_eq!(kp.values, vec![q(2, 5), q(1, 5), q(2, 5)]);
        assert_eq!(residual(&g, &kp), q(0, 1));
        assert!(eigenvector_centrality(&g).is_err());
    }

    #[test]
    fn zero_weight_component_is_zero() {
        let mut g = FloatGraph::new();
        for (id, b) in [("a", 0.0), ("b", 0.0), ("c", 1.0)] {
            g.add_node(id, b).unwrap();
        }
        g.add_edge(0, 1, 1.0).unwrap();
        g.add_edge(1, 0, 1.0).unwrap();
        g.add_edge(2, 2, 1.0).unwrap();
        let kp = katz_prestige(&g).unwrap();
        assert_eq!(kp.values, vec![0.0, 0.0, 1.0]);
        let ev = eigenvector_centrality(&g).unwrap();
        assert_eq!(ev.values[0], 0.0);
        assert!((ev.values[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn residual_detects_perturbation() {
        let mut g = two_node(1.0);
        g.add_edge(1, 0, 1.0).unwrap();
        let mut pr = pagerank(&g, &0.5).unwrap();
        assert!(residual(&g, &pr) < 1e-14);
        pr.values[0] += 1.0;
        assert!(residual(&g, &pr) >= 0.5);
    }
}
