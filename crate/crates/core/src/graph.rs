//! Directed graphs with node weights, positive edge weights and self-loops.

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexMap;

use crate::error::GraphError;
use crate::scalar::{Rational, Scalar};

/// Node identifier: a non-empty token without whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Result<Self, GraphError> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(GraphError::InvalidNodeId(id));
        }
        Ok(NodeId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A graph `(V, E, b, c)`.
///
/// Nodes keep their insertion order, and every operation that produces a new
/// graph preserves it. Edges are keyed by node position and also keep
/// insertion order, so serialization is deterministic.
#[derive(Debug, Clone)]
pub struct Graph<W> {
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    node_weights: Vec<W>,
    edges: IndexMap<(usize, usize), W>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

pub type FloatGraph = Graph<f64>;
pub type ExactGraph = Graph<Rational>;

impl<W: Scalar> Default for Graph<W> {
    fn default() -> Self {
        Self::new()
    }
}

impl<W: Scalar> Graph<W> {
    pub fn new() -> Self {
        Graph {
            ids: Vec::new(),
            index: HashMap::new(),
            node_weights: Vec::new(),
            edges: IndexMap::new(),
            out_adj: Vec::new(),
            in_adj: Vec::new(),
        }
    }

    /// Adds a node and returns its position.
    pub fn add_node(&mut self, id: &str, weight: W) -> Result<usize, GraphError> {
        let id = NodeId::new(id)?;
        if self.index.contains_key(&id) {
            return Err(GraphError::DuplicateNode(id.0));
        }
        if !weight.is_finite_value() {
            return Err(GraphError::NonFiniteWeight(id.0));
        }
        if weight.lt_zero() {
            return Err(GraphError::NegativeNodeWeight(id.0));
        }
        let i = self.ids.len();
        self.index.insert(id.clone(), i);
        self.ids.push(id);
        self.node_weights.push(weight);
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        Ok(i)
    }

    pub fn add_edge(&mut self, src: usize, dst: usize, weight: W) -> Result<(), GraphError> {
        let n = self.ids.len();
        if src >= n || dst >= n {
            return Err(GraphError::UnknownNode(format!("#{}", src.max(dst))));
        }
        if self.edges.contains_key(&(src, dst)) {
            return Err(GraphError::DuplicateEdge(
                self.ids[src].0.clone(),
                self.ids[dst].0.clone(),
            ));
        }
        if !weight.is_finite_value() {
            return Err(GraphError::NonFiniteWeight(format!(
                "{}->{}",
                self.ids[src], self.ids[dst]
            )));
        }
        if !weight.gt_zero() {
            return Err(GraphError::NonPositiveEdgeWeight(
                self.ids[src].0.clone(),
                self.ids[dst].0.clone(),
            ));
        }
        self.edges.insert((src, dst), weight);
        self.out_adj[src].push(dst);
        self.in_adj[dst].push(src);
        Ok(())
    }

    pub fn add_edge_by_id(&mut self, src: &str, dst: &str, weight: W) -> Result<(), GraphError> {
        let s = self.require(src)?;
        let d = self.require(dst)?;
        self.add_edge(s, d, weight)
    }

    /// Adds `weight` to edge `(src, dst)`, creating it when absent.
    /// A resulting zero weight removes the edge.
    pub(crate) fn accumulate_edge(&mut self, src: usize, dst: usize, weight: W) {
        if weight.is_zero() {
            return;
        }
        match self.edges.get_mut(&(src, dst)) {
            Some(w) => {
                *w = w.clone() + weight;
            }
            None => {
                self.edges.insert((src, dst), weight);
                self.out_adj[src].push(dst);
                self.in_adj[dst].push(src);
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &NodeId {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        NodeId::new(id).ok().and_then(|id| self.index.get(&id).copied())
    }

    pub fn require(&self, id: &str) -> Result<usize, GraphError> {
        self.index_of(id)
            .ok_or_else(|| GraphError::UnknownNode(id.to_string()))
    }

    pub fn node_weight(&self, i: usize) -> &W {
        &self.node_weights[i]
    }

    pub fn node_weights(&self) -> &[W] {
        &self.node_weights
    }

    pub fn set_node_weight(&mut self, i: usize, weight: W) -> Result<(), GraphError> {
        if weight.lt_zero() || !weight.is_finite_value() {
            return Err(GraphError::NegativeNodeWeight(self.ids[i].0.clone()));
        }
        self.node_weights[i] = weight;
        Ok(())
    }

    pub fn total_node_weight(&self) -> W {
        self.node_weights
            .iter()
            .fold(W::zero(), |acc, w| acc + w.clone())
    }

    /// Edges in insertion order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &W)> + '_ {
        self.edges.iter().map(|(&(u, v), w)| (u, v, w))
    }

    pub fn edge_weight(&self, src: usize, dst: usize) -> Option<&W> {
        self.edges.get(&(src, dst))
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.edges.contains_key(&(src, dst))
    }

    /// Direct successors of `v`, in edge insertion order.
    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    /// Direct predecessors of `v`, in edge insertion order.
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = (usize, &W)> + '_ {
        self.out_adj[v].iter().map(move |&t| (t, &self.edges[&(v, t)]))
    }

    pub fn in_edges(&self, v: usize) -> impl Iterator<Item = (usize, &W)> + '_ {
        self.in_adj[v].iter().map(move |&s| (s, &self.edges[&(s, v)]))
    }

    /// Total weight of outgoing edges, self-loop included.
    pub fn out_degree(&self, v: usize) -> W {
        self.out_edges(v).fold(W::zero(), |acc, (_, w)| acc + w.clone())
    }

    pub fn in_degree(&self, v: usize) -> W {
        self.in_edges(v).fold(W::zero(), |acc, (_, w)| acc + w.clone())
    }

    pub fn out_degree_of(&self, id: &str) -> Result<W, GraphError> {
        Ok(self.out_degree(self.require(id)?))
    }

    pub fn out_degrees(&self) -> Vec<W> {
        (0..self.node_count()).map(|v| self.out_degree(v)).collect()
    }

    /// A node is isolated when it has no incident edge, self-loops included.
    pub fn is_isolated(&self, v: usize) -> bool {
        self.out_adj[v].is_empty() && self.in_adj[v].is_empty()
    }

    /// `x` when every node has out-degree `x > 0`.
    pub fn is_out_regular(&self) -> Option<W> {
        const REL: f64 = 1e-9;
        let degrees = self.out_degrees();
        let first = degrees.first()?.clone();
        if !first.gt_zero() {
            return None;
        }
        degrees
            .iter()
            .all(|d| d.near(&first, REL))
            .then_some(first)
    }

    /// `x` when every node has out-degree `x > 0` or `0`, with at least one
    /// non-sink.
    pub fn is_semi_out_regular(&self) -> Option<W> {
        const REL: f64 = 1e-9;
        let degrees = self.out_degrees();
        let first = degrees.iter().find(|d| d.gt_zero())?.clone();
        degrees
            .iter()
            .all(|d| d.is_zero() || d.near(&first, REL))
            .then_some(first)
    }

    /// Disjoint sum `G + H`; nodes of `self` first.
    pub fn graph_sum(&self, other: &Graph<W>) -> Result<Graph<W>, GraphError> {
        let mut out = self.clone();
        let offset = self.node_count();
        for (i, id) in other.ids.iter().enumerate() {
            if self.index.contains_key(id) {
                return Err(GraphError::Collision(id.0.clone()));
            }
            out.add_node(id.as_str(), other.node_weights[i].clone())?;
        }
        for (u, v, w) in other.edges() {
            out.add_edge(u + offset, v + offset, w.clone())?;
        }
        Ok(out)
    }

    /// Every edge reversed; weights preserved.
    pub fn opposite(&self) -> Graph<W> {
        let mut out = self.without_edges();
        for (u, v, w) in self.edges() {
            out.add_edge(v, u, w.clone()).expect("reversed edge set is valid");
        }
        out
    }

    /// Same nodes and node weights, no edges.
    pub fn without_edges(&self) -> Graph<W> {
        let n = self.node_count();
        Graph {
            ids: self.ids.clone(),
            index: self.index.clone(),
            node_weights: self.node_weights.clone(),
            edges: IndexMap::new(),
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
        }
    }

    pub fn delete_edge(&self, src: usize, dst: usize) -> Result<Graph<W>, GraphError> {
        if !self.has_edge(src, dst) {
            return Err(GraphError::UnknownEdge(
                self.id_or_index(src),
                self.id_or_index(dst),
            ));
        }
        let mut out = self.without_edges();
        for (u, v, w) in self.edges() {
            if (u, v) != (src, dst) {
                out.add_edge(u, v, w.clone()).expect("subset of a valid edge set");
            }
        }
        Ok(out)
    }

    fn id_or_index(&self, i: usize) -> String {
        self.ids
            .get(i)
            .map(|id| id.0.clone())
            .unwrap_or_else(|| format!("#{i}"))
    }

    /// Graph with node `v` and its incident edges removed; other nodes keep
    /// their relative order.
    pub fn without_node(&self, v: usize) -> Graph<W> {
        let keep: Vec<usize> = (0..self.node_count()).filter(|&i| i != v).collect();
        self.induced(&keep)
    }

    /// Induced subgraph on `nodes`, in the given order.
    pub fn induced(&self, nodes: &[usize]) -> Graph<W> {
        let mut pos = vec![usize::MAX; self.node_count()];
        let mut out = Graph::new();
        for (k, &i) in nodes.iter().enumerate() {
            pos[i] = k;
            out.add_node(self.ids[i].as_str(), self.node_weights[i].clone())
                .expect("distinct ids");
        }
        for (u, v, w) in self.edges() {
            if pos[u] != usize::MAX && pos[v] != usize::MAX {
                out.add_edge(pos[u], pos[v], w.clone()).expect("valid edge");
            }
        }
        out
    }

    /// Nodes reachable from `v` by a walk of length at least one.
    /// `v` itself is included only when it lies on a cycle.
    pub fn successors(&self, v: usize) -> Vec<bool> {
        self.reach(v, &self.out_adj)
    }

    /// Nodes from which `v` is reachable by a walk of length at least one.
    pub fn predecessors(&self, v: usize) -> Vec<bool> {
        self.reach(v, &self.in_adj)
    }

    fn reach(&self, v: usize, adj: &[Vec<usize>]) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack: Vec<usize> = adj[v].clone();
        while let Some(x) = stack.pop() {
            if !seen[x] {
                seen[x] = true;
                stack.extend(adj[x].iter().copied().filter(|&y| !seen[y]));
            }
        }
        seen
    }

    pub fn successor_ids(&self, v: usize) -> Vec<&NodeId> {
        mask_ids(&self.ids, &self.successors(v))
    }

    pub fn predecessor_ids(&self, v: usize) -> Vec<&NodeId> {
        mask_ids(&self.ids, &self.predecessors(v))
    }

    /// Same nodes, edges reordered by (source position, target position).
    /// Two graphs that compare equal have identical canonical serializations.
    pub fn canonical(&self) -> Graph<W> {
        let mut keys: Vec<(usize, usize)> = self.edges.keys().copied().collect();
        keys.sort_unstable();
        let mut out = self.without_edges();
        for (u, v) in keys {
            out.add_edge(u, v, self.edges[&(u, v)].clone()).expect("valid edge");
        }
        out
    }

    /// Reorders nodes so that `order[k]` becomes position `k`.
    pub fn permuted(&self, order: &[usize]) -> Graph<W> {
        assert_eq!(order.len(), self.node_count(), "permutation length");
        self.induced(order)
    }

    pub fn map_weights<U: Scalar>(&self, f: impl Fn(&W) -> U) -> Graph<U> {
        let n = self.node_count();
        Graph {
            ids: self.ids.clone(),
            index: self.index.clone(),
            node_weights: self.node_weights.iter().map(&f).collect(),
            edges: self.edges.iter().map(|(&k, w)| (k, f(w))).collect(),
            out_adj: self.out_adj.clone(),
            in_adj: self.in_adj.clone(),
        }
        .debug_checked(n)
    }

    fn debug_checked(self, n: usize) -> Self {
        debug_assert_eq!(self.node_count(), n);
        self
    }

    /// Same graph with every id passed through `f`.
    pub fn relabeled(&self, f: impl Fn(&str) -> String) -> Result<Graph<W>, GraphError> {
        let mut out = Graph::new();
        for (i, id) in self.ids.iter().enumerate() {
            out.add_node(&f(id.as_str()), self.node_weights[i].clone())?;
        }
        for (u, v, w) in self.edges() {
            out.add_edge(u, v, w.clone())?;
        }
        Ok(out)
    }

    /// Every edge weight multiplied by `factor > 0`.
    pub fn with_scaled_edges(&self, factor: &W) -> Graph<W> {
        let mut out = self.clone();
        for w in out.edges.values_mut() {
            *w = w.clone() * factor.clone();
        }
        out
    }

    pub fn to_float(&self) -> FloatGraph {
        self.map_weights(Scalar::to_f64)
    }

    /// Scales every outgoing edge of `v` by `factor` (not validated).
    pub(crate) fn scale_out_edges(&mut self, v: usize, factor: &W) {
        for &t in &self.out_adj[v] {
            let w = self.edges.get_mut(&(v, t)).expect("adjacency in sync");
            *w = w.clone() * factor.clone();
        }
    }

    pub(crate) fn edge_weight_mut(&mut self, src: usize, dst: usize) -> Option<&mut W> {
        self.edges.get_mut(&(src, dst))
    }

    /// `.dg` text: nodes then edges, in insertion order.
    pub fn to_dg(&self) -> String {
        let mut out = String::new();
        for (i, id) in self.ids.iter().enumerate() {
            out.push_str(&format!("node {} {}\n", id, self.node_weights[i].to_text()));
        }
        for (u, v, w) in self.edges() {
            out.push_str(&format!("edge {} {} {}\n", self.ids[u], self.ids[v], w.to_text()));
        }
        out
    }
}

impl ExactGraph {
    pub fn from_float(g: &FloatGraph) -> ExactGraph {
        g.map_weights(|w| Rational::from_f64(*w).expect("graph weights are finite"))
    }
}

impl<W: Scalar> Graph<W> {
    /// Converts an exact graph into this weight type.
    pub fn from_exact(g: &ExactGraph) -> Graph<W> {
        g.map_weights(W::from_rational)
    }
}

fn mask_ids<'a>(ids: &'a [NodeId], mask: &[bool]) -> Vec<&'a NodeId> {
    ids.iter()
        .zip(mask)
        .filter_map(|(id, &m)| m.then_some(id))
        .collect()
}

/// Equality of nodes (in order), node weights, and the edge map.
/// Edge insertion order is ignored.
impl<W: PartialEq> PartialEq for Graph<W> {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids
            && self.node_weights == other.node_weights
            && self.edges.len() == other.edges.len()
            && self
                .edges
                .iter()
                .all(|(k, w)| other.edges.get(k) == Some(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2() -> FloatGraph {
        let mut g = FloatGraph::new();
        g.add_node("u", 1.0).unwrap();
        g.add_node("v", 0.0).unwrap();
        g.add_edge_by_id("u", "v", 1.0).unwrap();
        g
    }

    #[test]
    fn rejects_invalid_construction() {
        let mut g = g2();
        assert!(matches!(g.add_node("u", 1.0), Err(GraphError::DuplicateNode(_))));
        assert!(matches!(g.add_node("w", -1.0), Err(GraphError::NegativeNodeWeight(_))));
        assert!(matches!(g.add_node("a b", 1.0), Err(GraphError::InvalidNodeId(_))));
        assert!(matches!(g.add_node("", 1.0), Err(GraphError::InvalidNodeId(_))));
        assert!(matches!(g.add_edge_by_id("u", "v", 2.0), Err(GraphError::DuplicateEdge(..))));
        assert!(matches!(g.add_edge_by_id("v", "u", 0.0), Err(GraphError::NonPositiveEdgeWeight(..))));
        assert!(matches!(g.add_edge_by_id("v", "x", 1.0), Err(GraphError::UnknownNode(_))));
        assert!(matches!(g.add_edge_by_id("v", "u", f64::NAN), Err(GraphError::NonFiniteWeight(_))));
    }

    #[test]
    fn out_degree_counts_self_loop() {
        let mut g = FloatGraph::new();
        g.add_node("s", 1.0).unwrap();
        g.add_node("iso", 1.0).unwrap();
        g.add_edge(0, 0, 3.0).unwrap();
        assert_eq!(g.out_degree(0), 3.0);
        assert_eq!(g.out_degree_of("iso").unwrap(), 0.0);
        assert!(g.out_degree_of("nope").is_err());
        assert!(g.is_isolated(1));
        assert!(!g.is_isolated(0));
    }

    #[test]
    fn sum_is_disjoint_union() {
        let g = g2();
        let mut h = FloatGraph::new();
        for id in ["a", "b", "c"] {
            h.add_node(id, 0.5).unwrap();
        }
        h.add_edge(0, 1, 1.0).unwrap();
        h.add_edge(1, 2, 2.0).unwrap();
        let s = g.graph_sum(&h).unwrap();
        assert_eq!(s.node_count(), 5);
        assert_eq!(s.edge_count(), 3);
        assert_eq!(s.edge_weight(3, 4), Some(&2.0));
        assert_eq!(g.graph_sum(&FloatGraph::new()).unwrap(), g);
        assert!(matches!(g.graph_sum(&g), Err(GraphError::Collision(_))));
    }

    #[test]
    fn opposite_is_involution() {
        let g = g2();
        let o = g.opposite();
        assert!(o.has_edge(1, 0) && !o.has_edge(0, 1));
        assert_eq!(o.opposite(), g);
    }

    #[test]
    fn delete_and_reach() {
        let g = g2();
        let d = g.delete_edge(0, 1).unwrap();
        assert_eq!(d.edge_count(), 0);
        assert_eq!(d.node_count(), 2);
        assert!(g.delete_edge(1, 0).is_err());
        assert_eq!(g.successors(0), vec![false, true]);
        assert_eq!(g.successors(1), vec![false, false]);
        assert_eq!(g.predecessors(0), vec![false, false]);
    }

    #[test]
    fn node_is_own_successor_only_on_a_cycle() {
        let mut g = FloatGraph::new();
        g.add_node("a", 1.0).unwrap();
        g.add_node("b", 1.0).unwrap();
        g.add_edge(0, 1, 1.0).unwrap();
        assert!(!g.successors(0)[0]);
        g.add_edge(1, 0, 1.0).unwrap();
        assert!(g.successors(0)[0]);
    }

    #[test]
    fn out_regularity() {
        let mut g = FloatGraph::new();
        for id in ["a", "b", "c"] {
            g.add_node(id, 1.0).unwrap();
        }
        g.add_edge(0, 1, 1.0).unwrap();
        g.add_edge(1, 2, 1.0).unwrap();
        assert_eq!(g.is_out_regular(), None);
        assert_eq!(g.is_semi_out_regular(), Some(1.0));
        g.add_edge(2, 0, 1.0 + 1e-12).unwrap();
        assert_eq!(g.is_out_regular(), Some(1.0));
        assert_eq!(FloatGraph::new().is_out_regular(), None);
    }

    #[test]
    fn equality_ignores_edge_order() {
        let mut a = FloatGraph::new();
        let mut b = FloatGraph::new();
        for g in [&mut a, &mut b] {
            g.add_node("x", 1.0).unwrap();
            g.add_node("y", 1.0).unwrap();
        }
        a.add_edge(0, 1, 1.0).unwrap();
        a.add_edge(1, 0, 2.0).unwrap();
        b.add_edge(1, 0, 2.0).unwrap();
        b.add_edge(0, 1, 1.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.to_dg(), b.to_dg());
        assert_eq!(a.canonical().to_dg(), b.canonical().to_dg());
    }

    #[test]
    fn accumulate_drops_zero_and_merges() {
        let mut g = g2();
        g.accumulate_edge(0, 1, 2.0);
        assert_eq!(g.edge_weight(0, 1), Some(&3.0));
        g.accumulate_edge(1, 1, 0.0);
        assert!(!g.has_edge(1, 1));
    }
}
