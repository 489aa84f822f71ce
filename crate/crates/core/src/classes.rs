//! Admissible graph classes of the four measures.

use std::fmt;

use crate::components::strongly_connected_components;
use crate::error::CentralityError;
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::spectral::spectral_data_with;

/// Required slack in `a·λ ≤ 1 − KATZ_MARGIN`.
pub const KATZ_MARGIN: f64 = 1e-6;
/// Relative tolerance for equal component eigenvalues.
pub const EIGENVALUE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphClass {
    All,
    /// Sums of strongly connected graphs.
    KatzPrestige,
    /// Sums of strongly connected graphs with equal principal eigenvalues.
    Eigenvector,
    /// Graphs with `alpha·λ < 1`.
    Katz(f64),
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphClass::All => write!(f, "ALL"),
            GraphClass::KatzPrestige => write!(f, "KP_CLASS"),
            GraphClass::Eigenvector => write!(f, "EV_CLASS"),
            GraphClass::Katz(a) => write!(f, "KATZ_CLASS({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassVerdict {
    pub member: bool,
    pub diagnostic: String,
    /// Spectral radius, when it was needed for the decision.
    pub lambda: Option<f64>,
}

impl ClassVerdict {
    fn yes(diagnostic: impl Into<String>, lambda: Option<f64>) -> Self {
        ClassVerdict {
            member: true,
            diagnostic: diagnostic.into(),
            lambda,
        }
    }

    fn no(diagnostic: impl Into<String>, lambda: Option<f64>) -> Self {
        ClassVerdict {
            member: false,
            diagnostic: diagnostic.into(),
            lambda,
        }
    }
}

pub fn classify<W: Scalar>(g: &Graph<W>, cls: GraphClass) -> Result<ClassVerdict, CentralityError> {
    match cls {
        GraphClass::All => Ok(ClassVerdict::yes("every graph is admissible", None)),
        GraphClass::KatzPrestige => Ok(kp_class(g)),
        GraphClass::Eigenvector => {
            let base = kp_class(g);
            if !base.member {
                return Ok(base);
            }
            let fg = g.to_float();
            let partition = strongly_connected_components(&fg);
            let spectral = spectral_data_with(&fg, &partition)?;
            let lambda = spectral.lambda;
            for c in &spectral.components {
                if (c.lambda - lambda).abs() > EIGENVALUE_TOLERANCE * lambda.max(1.0) {
                    return Ok(ClassVerdict::no(
                        format!(
                            "component containing `{}` has principal eigenvalue {} but another has {}",
                            g.id(c.nodes[0]),
                            c.lambda,
                            lambda
                        ),
                        Some(lambda),
                    ));
                }
            }
            Ok(ClassVerdict::yes(
                format!(
                    "{} strongly connected component(s) with principal eigenvalue {}",
                    spectral.components.len(),
                    lambda
                ),
                Some(lambda),
            ))
        }
        GraphClass::Katz(alpha) => {
            if !(alpha >= 0.0) || !alpha.is_finite() {
                return Err(CentralityError::InvalidAlpha(alpha.to_string()));
            }
            let lambda = crate::spectral::principal_eigenvalue(g)?;
            if alpha * lambda <= 1.0 - KATZ_MARGIN {
                Ok(ClassVerdict::yes(
                    format!("alpha*lambda = {} < 1", alpha * lambda),
                    Some(lambda),
                ))
            } else {
                Ok(ClassVerdict::no(
                    format!(
                        "alpha*lambda = {}*{} = {} is not below 1 - {KATZ_MARGIN}",
                        alpha,
                        lambda,
                        alpha * lambda
                    ),
                    Some(lambda),
                ))
            }
        }
    }
}

fn kp_class<W: Scalar>(g: &Graph<W>) -> ClassVerdict {
    let partition = strongly_connected_components(g);
    for c in &partition.components {
        if !c.strongly_connected {
            return ClassVerdict::no(
                format!("node `{}` is not on any cycle", g.id(c.nodes[0])),
                None,
            );
        }
    }
    for (u, v, _) in g.edges() {
        if !partition.same_component(u, v) {
            return ClassVerdict::no(
                format!("edge {} -> {} crosses components", g.id(u), g.id(v)),
                None,
            );
        }
    }
    ClassVerdict::yes(
        format!("{} strongly connected component(s)", partition.len()),
        None,
    )
}

/// `classify(..).member`, treating solver failures as non-membership.
pub fn in_class<W: Scalar>(g: &Graph<W>, cls: GraphClass) -> bool {
    classify(g, cls).map(|v| v.member).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::FloatGraph;

    fn cycles(w1: f64, w2: f64) -> FloatGraph {
        let mut g = FloatGraph::new();
        for id in ["a", "b", "c", "d"] {
            g.add_node(id, 1.0).unwrap();
        }
        g.add_edge(0, 1, w1).unwrap();
        g.add_edge(1, 0, w1).unwrap();
        g.add_edge(2, 3, w2).unwrap();
        g.add_edge(3, 2, w2).unwrap();
        g
    }

    #[test]
    fn unequal_cycles_are_kp_but_not_ev() {
        let g = cycles(1.0, 2.0);
        assert!(classify(&g, GraphClass::KatzPrestige).unwrap().member);
        let v = classify(&g, GraphClass::Eigenvector).unwrap();
        assert!(!v.member, "{}", v.diagnostic);
        assert!(classify(&cycles(2.0, 2.0), GraphClass::Eigenvector).unwrap().member);
    }

    #[test]
    fn cross_edge_and_isolated_node_leave_kp_class() {
        let mut g = cycles(1.0, 1.0);
        g.add_edge(1, 2, 1.0).unwrap();
        let v = classify(&g, GraphClass::KatzPrestige).unwrap();
        assert!(!v.member && v.diagnostic.contains("b -> c"));
        let mut h = cycles(1.0, 1.0);
        h.add_node("iso", 0.0).unwrap();
        let v = classify(&h, GraphClass::KatzPrestige).unwrap();
        assert!(!v.member && v.diagnostic.contains("iso"));
    }

    #[test]
    fn katz_class_uses_spectral_radius() {
        let g = cycles(1.0, 1.0);
        assert!(classify(&g, GraphClass::Katz(0.5)).unwrap().member);
        assert!(!classify(&g, GraphClass::Katz(1.0)).unwrap().member);
        assert!(classify(&g, GraphClass::Katz(-1.0)).is_err());
        assert!(classify(&g, GraphClass::All).unwrap().member);
    }
}
