//! The `.dg` text format.
//!
//! ```text
//! # comment
//! node <id> <weight>
//! edge <src> <dst> <weight>
//! ```
//!
//! Weights are decimals (`0.2`) or rationals (`1/5`) and are read exactly.
//! Nodes must be declared before any edge that references them.

use crate::error::{GraphError, ParseError, ParseErrorKind};
use crate::graph::{ExactGraph, Graph};
use crate::scalar::{parse_rational, Scalar};

/// Parses `.dg` text into an exact graph.
pub fn parse_graph(text: &str) -> Result<ExactGraph, ParseError> {
    let mut g = ExactGraph::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let err = |kind: ParseErrorKind| ParseError { line, kind };
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields.as_slice() {
            ["node", id, weight] => {
                let w = parse_rational(weight).map_err(|e| err(e.into()))?;
                g.add_node(id, w).map_err(|e| err(e.into()))?;
            }
            ["edge", src, dst, weight] => {
                let w = parse_rational(weight).map_err(|e| err(e.into()))?;
                let s = g.require(src).map_err(|e| err(e.into()))?;
                let d = g.require(dst).map_err(|e| err(e.into()))?;
                g.add_edge(s, d, w).map_err(|e| err(e.into()))?;
            }
            _ => return Err(err(ParseErrorKind::Malformed(content.to_string()))),
        }
    }
    Ok(g)
}

/// Parses `.dg` text directly into weight type `W`.
pub fn parse_graph_as<W: Scalar>(text: &str) -> Result<Graph<W>, ParseError> {
    parse_graph(text).map(|g| Graph::from_exact(&g))
}

/// Sidecar grouping file for cycle synthesis: one `group <cycle-node> <original-node>` per line.
pub fn format_groups(pairs: &[(String, String)]) -> String {
    pairs
        .iter()
        .map(|(c, o)| format!("group {c} {o}\n"))
        .collect()
}

pub fn parse_groups(text: &str) -> Result<Vec<(String, String)>, ParseError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        match content.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["group", c, o] => out.push((c.to_string(), o.to_string())),
            _ => {
                return Err(ParseError {
                    line: k + 1,
                    kind: ParseErrorKind::Malformed(content.to_string()),
                })
            }
        }
    }
    Ok(out)
}

impl From<GraphError> for ParseError {
    fn from(e: GraphError) -> Self {
        ParseError {
            line: 0,
            kind: e.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn minimal_file() {
        let g = parse_graph("node u 1\nnode v 0\nedge u v 1").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight(0, 1), Some(&Rational::from_ratio(1, 1)));
    }

    #[test]
    fn comments_blank_lines_and_rationals() {
        let text = "# header\n\nnode a 1/5\n  node b 0.4  \nedge a b 2/4\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.node_weight(0), &Rational::from_ratio(1, 5));
        assert_eq!(g.node_weight(1), &Rational::from_ratio(2, 5));
        assert_eq!(g.to_dg(), "node a 1/5\nnode b 2/5\nedge a b 1/2\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("node u 1\nnode u 2", 2, "duplicate node"),
            ("node u 1\nnode v 1\nedge u v 1\nedge u v 2", 4, "duplicate edge"),
            ("node u 1\nedge u v 1", 2, "unknown node"),
            ("node u -1", 1, "negative"),
            ("node u 1\nnode v 1\nedge u v 0", 3, "non-positive"),
            ("node u 1\nnode v 1\nedge u v -2", 3, "non-positive"),
            ("node u 1\nvertex v 2", 2, "malformed"),
            ("node u", 1, "malformed"),
            ("node u one", 1, "invalid number"),
        ];
        for (text, line, needle) in cases {
            let e = parse_graph(text).unwrap_err();
            assert_eq!(e.line, line, "{text}");
            assert!(e.to_string().contains(needle), "{e} should mention {needle}");
        }
    }

    #[test]
    fn edge_before_node_is_rejected() {
        let e = parse_graph("edge u v 1\nnode u 1\nnode v 1").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn float_parse_rounds_once() {
        let g: Graph<f64> = parse_graph_as("node u 1/3\n").unwrap();
        assert_eq!(*g.node_weight(0), 1.0 / 3.0);
    }

    #[test]
    fn groups_round_trip() {
        let pairs = vec![("v1".to_string(), "v1".to_string()), ("v1'2".to_string(), "v1".to_string())];
        assert_eq!(parse_groups(&format_groups(&pairs)).unwrap(), pairs);
        assert!(parse_groups("grp a b").is_err());
    }
}
