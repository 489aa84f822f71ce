//! Axiom transformations and the cycle-graph construction.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::centrality::{compute_measure, katz_prestige, CentralityVector, Measure};
use crate::components::is_strongly_connected;
use crate::error::TransformError;
use crate::graph::{ExactGraph, FloatGraph, Graph, NodeId};
use crate::scalar::{lcm_of_denominators, Rational, Scalar};
use crate::spectral::perron_right;

/// Default cap on the number of cycle-graph nodes.
pub const DEFAULT_CYCLE_CAP: u64 = 1_000_000;

/// `C^F_{u→w}` with explicit values `fu`, `fw`.
///
/// Outgoing edges of `u` are scaled by `fu/(fu+fw)` and those of `w` by
/// `fw/(fu+fw)`; then `u` is merged into `w`. Edges between `u` and `w`, and
/// loops at either, become loops at `w`. Parallel edges add up, zero weights
/// are dropped, and `b(w)` absorbs `b(u)`.
pub fn combine_with_values<W: Scalar>(
    g: &Graph<W>,
    u: usize,
    w: usize,
    fu: &W,
    fw: &W,
) -> Result<Graph<W>, TransformError> {
    if u == w {
        return Err(TransformError::SelfCombine(g.id(u).to_string()));
    }
    let total = fu.clone() + fw.clone();
    if total.is_zero() {
        return Err(TransformError::ZeroCombinedValue(
            g.id(u).to_string(),
            g.id(w).to_string(),
        ));
    }
    let su = fu.clone() / total.clone();
    let sw = fw.clone() / total;
    let mut out = Graph::new();
    let mut pos = vec![usize::MAX; g.node_count()];
    for v in 0..g.node_count() {
        if v == u {
            continue;
        }
        let mut b = g.node_weight(v).clone();
        if v == w {
            b = b + g.node_weight(u).clone();
        }
        pos[v] = out.add_node(g.id(v).as_str(), b)?;
    }
    pos[u] = pos[w];
    for (x, y, c) in g.edges() {
        let weight = if x == u {
            c.clone() * su.clone()
        } else if x == w {
            c.clone() * sw.clone()
        } else {
            c.clone()
        };
        out.accumulate_edge(pos[x], pos[y], weight);
    }
    Ok(out)
}

/// `C^F_{u→w}(G)` using the values in `values`.
pub fn proportional_combine<W: Scalar>(
    g: &Graph<W>,
    values: &CentralityVector<W>,
    u: &str,
    w: &str,
) -> Result<Graph<W>, TransformError> {
    if values.values.len() != g.node_count() {
        return Err(TransformError::ValueMismatch);
    }
    let ui = g.require(u)?;
    let wi = g.require(w)?;
    combine_with_values(g, ui, wi, &values.values[ui], &values.values[wi])
}

fn positive_factor<W: Scalar>(x: &W) -> Result<(), TransformError> {
    if x.gt_zero() && x.is_finite_value() {
        Ok(())
    } else {
        Err(TransformError::NonPositiveFactor(x.to_text()))
    }
}

/// Multiplies every outgoing edge of `u`, its self-loop included, by `x`.
pub fn edge_multiplication<W: Scalar>(g: &Graph<W>, u: usize, x: &W) -> Result<Graph<W>, TransformError> {
    positive_factor(x)?;
    let mut out = g.clone();
    out.scale_out_edges(u, x);
    Ok(out)
}

/// Divides `b(u)` and the non-loop incoming edges of `u` by `x` and
/// multiplies its non-loop outgoing edges by `x`. The loop is untouched.
pub fn edge_compensation<W: Scalar>(g: &Graph<W>, u: usize, x: &W) -> Result<Graph<W>, TransformError> {
    positive_factor(x)?;
    let mut out = g.clone();
    out.set_node_weight(u, g.node_weight(u).clone() / x.clone())?;
    for (s, t, c) in g.edges() {
        if s == t {
            continue;
        }
        let scaled = if s == u {
            c.clone() * x.clone()
        } else if t == u {
            c.clone() / x.clone()
        } else {
            continue;
        };
        *out.edge_weight_mut(s, t).expect("edge exists") = scaled;
    }
    Ok(out)
}

/// Every weight divided by its source's out-degree; sinks have nothing to scale.
pub fn out_degree_normalize<W: Scalar>(g: &Graph<W>) -> Graph<W> {
    let mut out = g.clone();
    for v in 0..g.node_count() {
        let d = g.out_degree(v);
        if d.gt_zero() {
            out.scale_out_edges(v, &(W::one() / d));
        }
    }
    out
}

/// Rescales a strongly connected graph into a `λ`-out-regular one.
///
/// With `s` the Perron vector of the opposite graph (unit 1-norm), returns
/// `b''(v) = b(v)·s_v`, `c'(u,v) = c(u,v)·s_v/s_u`, and `s`.
pub fn ec_regularize(g: &FloatGraph) -> Result<(FloatGraph, Vec<f64>), TransformError> {
    if !is_strongly_connected(g) {
        return Err(TransformError::NotStronglyConnected);
    }
    let (_, s) = perron_right(&g.opposite())?;
    let mut out = g.clone();
    for v in 0..g.node_count() {
        out.set_node_weight(v, g.node_weight(v) * s[v])?;
    }
    for (u, v, c) in g.edges() {
        *out.edge_weight_mut(u, v).expect("edge exists") = c * s[v] / s[u];
    }
    Ok((out, s))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Impact {
    pub src: usize,
    pub dst: usize,
    pub value: Rational,
}

/// `I(u,v) = KP_u · c(u,v)/deg⁺_u` for every edge, in edge order.
pub fn compute_impacts(g: &ExactGraph) -> Result<Vec<Impact>, TransformError> {
    let kp = katz_prestige(g)?;
    Ok(impacts_from_values(g, &kp.values))
}

fn impacts_from_values(g: &ExactGraph, values: &[Rational]) -> Vec<Impact> {
    let degrees = g.out_degrees();
    g.edges()
        .map(|(u, v, c)| Impact {
            src: u,
            dst: v,
            value: values[u].clone() * c.clone() / degrees[u].clone(),
        })
        .collect()
}

/// Checks `Σ in-impacts = value = Σ out-impacts` at every node.
pub fn impact_balance(g: &ExactGraph, impacts: &[Impact], values: &[Rational]) -> Result<(), TransformError> {
    let n = g.node_count();
    let mut inflow = vec![Rational::zero(); n];
    let mut outflow = vec![Rational::zero(); n];
    for i in impacts {
        inflow[i.dst] += &i.value;
        outflow[i.src] += &i.value;
    }
    for v in 0..n {
        if inflow[v] != values[v] || outflow[v] != values[v] {
            return Err(TransformError::Unbalanced(g.id(v).to_string()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpactMultigraph {
    pub base: ExactGraph,
    /// Common denominator of the normalized impacts; also the edge count.
    pub n: u64,
    /// `(src, dst, multiplicity)` in the base graph's edge order.
    pub multiplicity: Vec<(usize, usize, u64)>,
}

impl ImpactMultigraph {
    pub fn total_multiplicity(&self) -> u64 {
        self.multiplicity.iter().map(|m| m.2).sum()
    }

    pub fn out_multiplicity(&self, v: usize) -> u64 {
        self.multiplicity.iter().filter(|m| m.0 == v).map(|m| m.2).sum()
    }

    pub fn in_multiplicity(&self, v: usize) -> u64 {
        self.multiplicity.iter().filter(|m| m.1 == v).map(|m| m.2).sum()
    }
}

/// Multigraph with `N · I(e) / Σb` copies of each edge, `N` the least
/// common denominator. Impacts are normalized by the total node weight so
/// that the multiplicities sum to `N`.
pub fn build_impact_multigraph(g: &ExactGraph, cap: u64) -> Result<ImpactMultigraph, TransformError> {
    let total = g.total_node_weight();
    if total.is_zero() {
        return Err(TransformError::ZeroCombinedValue(
            "all nodes".into(),
            "the impact multigraph".into(),
        ));
    }
    let kp = katz_prestige(g)?;
    let impacts = compute_impacts(g)?;
    impact_balance(g, &impacts, &kp.values)?;
    let normalized: Vec<Rational> = impacts.iter().map(|i| i.value.clone() / total.clone()).collect();
    let n = lcm_of_denominators(normalized.iter());
    if n > BigInt::from(cap) {
        return Err(TransformError::TooManyCycleNodes {
            n: n.to_string(),
            cap,
        });
    }
    let scale = Rational::from_integer(n.clone());
    let mut multiplicity = Vec::with_capacity(impacts.len());
    for (i, r) in impacts.iter().zip(&normalized) {
        let m = r.clone() * scale.clone();
        debug_assert!(m.is_integer());
        let count = m.to_integer().to_u64().expect("bounded by cap");
        multiplicity.push((i.src, i.dst, count));
    }
    let mg = ImpactMultigraph {
        base: g.clone(),
        n: n.to_u64().expect("bounded by cap"),
        multiplicity,
    };
    for v in 0..g.node_count() {
        if mg.in_multiplicity(v) != mg.out_multiplicity(v) {
            return Err(TransformError::Unbalanced(g.id(v).to_string()));
        }
    }
    Ok(mg)
}

/// Closed walk using every multigraph edge exactly once (Hierholzer).
/// Successors are taken in node order, so the walk is deterministic.
pub fn euler_circuit(m: &ImpactMultigraph, start: usize) -> Result<Vec<usize>, TransformError> {
    let nodes = m.base.node_count();
    if start >= nodes {
        return Err(TransformError::Graph(crate::error::GraphError::UnknownNode(format!("#{start}"))));
    }
    let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); nodes];
    for &(u, v, k) in &m.multiplicity {
        if k > 0 {
            adj[u].push((v, k));
        }
    }
    for list in &mut adj {
        list.sort_unstable_by_key(|e| e.0);
    }
    for v in 0..nodes {
        if m.in_multiplicity(v) != m.out_multiplicity(v) {
            return Err(TransformError::Unbalanced(m.base.id(v).to_string()));
        }
    }
    if adj[start].is_empty() {
        return Err(TransformError::Disconnected);
    }
    let mut ptr = vec![0usize; nodes];
    let mut stack = vec![start];
    let mut circuit = Vec::with_capacity(m.n as usize + 1);
    while let Some(&v) = stack.last() {
        while ptr[v] < adj[v].len() && adj[v][ptr[v]].1 == 0 {
            ptr[v] += 1;
        }
        if ptr[v] < adj[v].len() {
            let slot = &mut adj[v][ptr[v]];
            slot.1 -= 1;
            stack.push(slot.0);
        } else {
            circuit.push(v);
            stack.pop();
        }
    }
    circuit.reverse();
    if circuit.len() as u64 != m.total_multiplicity() + 1 {
        return Err(TransformError::Disconnected);
    }
    Ok(circuit)
}

/// One original node and the cycle-graph nodes standing for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub original: NodeId,
    /// Cycle-graph positions; the first one is the representative.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleSynthesis<W> {
    pub cycle_graph: Graph<W>,
    /// `grouping[i]`: original position of cycle node `i`.
    pub grouping: Vec<usize>,
    pub original_ids: Vec<NodeId>,
    /// Closed walk over original positions; first equals last.
    pub euler_walk: Vec<usize>,
}

impl<W: Scalar> CycleSynthesis<W> {
    /// Groups in original node order; members in cycle order.
    pub fn groups(&self) -> Vec<Group> {
        let mut groups: Vec<Group> = self
            .original_ids
            .iter()
            .map(|id| Group {
                original: id.clone(),
                members: Vec::new(),
            })
            .collect();
        for (i, &o) in self.grouping.iter().enumerate() {
            groups[o].members.push(i);
        }
        groups
    }

    /// `(cycle node, original node)` pairs for the sidecar file.
    pub fn sidecar_pairs(&self) -> Vec<(String, String)> {
        self.groups()
            .iter()
            .flat_map(|grp| {
                grp.members.iter().map(move |&m| {
                    (
                        self.cycle_graph.id(m).to_string(),
                        grp.original.to_string(),
                    )
                })
            })
            .collect()
    }
}

/// Builds the cycle graph of an out-regular graph from an Euler walk of its
/// impact multigraph: one node per step of the walk, consecutive steps joined
/// by an edge of weight `x` (the common out-degree), and node weight
/// `b(v)/|visits of v|`.
///
/// The first visit of every node keeps its id; later visits are named
/// `id'k` for the `k`-th visit.
pub fn synthesize_cycle_graph(g: &ExactGraph, walk: &[usize]) -> Result<CycleSynthesis<Rational>, TransformError> {
    let x = g.is_out_regular().ok_or(TransformError::NotOutRegular)?;
    if walk.len() < 2 || walk.first() != walk.last() {
        return Err(TransformError::WalkMismatch("walk is not closed".into()));
    }
    let steps = walk.len() - 1;
    let mg = build_impact_multigraph(g, steps as u64)?;
    if mg.n as usize != steps {
        return Err(TransformError::WalkMismatch(format!(
            "walk has {steps} steps but the multigraph has {} edges",
            mg.n
        )));
    }
    let mut used: HashMap<(usize, usize), u64> = HashMap::new();
    for pair in walk.windows(2) {
        if pair[0] >= g.node_count() || pair[1] >= g.node_count() {
            return Err(TransformError::WalkMismatch("walk leaves the graph".into()));
        }
        *used.entry((pair[0], pair[1])).or_default() += 1;
    }
    for &(u, v, k) in &mg.multiplicity {
        if used.remove(&(u, v)).unwrap_or(0) != k {
            return Err(TransformError::WalkMismatch(format!(
                "edge {} -> {} is not traversed {k} time(s)",
                g.id(u),
                g.id(v)
            )));
        }
    }
    if !used.is_empty() {
        return Err(TransformError::WalkMismatch("walk uses an edge outside the multigraph".into()));
    }

    let visits = &walk[..steps];
    let mut count = vec![0i64; g.node_count()];
    for &v in visits {
        count[v] += 1;
    }
    if let Some(v) = (0..g.node_count()).find(|&v| count[v] == 0) {
        return Err(TransformError::EmptyGroup(g.id(v).to_string()));
    }
    let mut taken: HashSet<String> = HashSet::new();
    // Copies avoid every original id and every earlier copy.
    let mut seen = vec![0usize; g.node_count()];
    let mut ids = Vec::with_capacity(steps);
    let all_original: HashSet<&str> = g.ids().iter().map(NodeId::as_str).collect();
    for &v in visits {
        seen[v] += 1;
        if seen[v] == 1 {
            ids.push(g.id(v).to_string());
            continue;
        }
        let mut name = format!("{}'{}", g.id(v), seen[v]);
        while all_original.contains(name.as_str()) || taken.contains(&name) {
            name.push('\'');
        }
        taken.insert(name.clone());
        ids.push(name);
    }

    let mut cycle = ExactGraph::new();
    for (i, &v) in visits.iter().enumerate() {
        let b = g.node_weight(v).clone() / Rational::from_integer(BigInt::from(count[v]));
        cycle.add_node(&ids[i], b)?;
    }
    for i in 0..steps {
        cycle.add_edge(i, (i + 1) % steps, x.clone())?;
    }
    Ok(CycleSynthesis {
        cycle_graph: cycle,
        grouping: visits.to_vec(),
        original_ids: g.ids().to_vec(),
        euler_walk: walk.to_vec(),
    })
}

/// Cycle graph of `g` using the Euler walk that starts at its first node.
pub fn euler_construct(g: &ExactGraph, cap: u64) -> Result<CycleSynthesis<Rational>, TransformError> {
    if !is_strongly_connected(g) {
        return Err(TransformError::NotStronglyConnected);
    }
    let mg = build_impact_multigraph(g, cap)?;
    let walk = euler_circuit(&mg, 0)?;
    synthesize_cycle_graph(g, &walk)
}

/// Rebuilds groups from sidecar pairs. Groups appear in order of first
/// mention; unknown cycle nodes are an error.
pub fn groups_from_pairs<W: Scalar>(
    cycle_graph: &Graph<W>,
    pairs: &[(String, String)],
) -> Result<Vec<Group>, TransformError> {
    let mut groups: Vec<Group> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (c, o) in pairs {
        let ci = cycle_graph.require(c)?;
        let gi = *index.entry(o.clone()).or_insert_with(|| {
            groups.push(Group {
                original: NodeId::new(o.clone()).expect("parsed token"),
                members: Vec::new(),
            });
            groups.len() - 1
        });
        groups[gi].members.push(ci);
    }
    Ok(groups)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recombined<W> {
    pub graph: Graph<W>,
    /// Combined value of each group, in group order: the sum of its members'
    /// values.
    pub values: Vec<W>,
}

/// Combines every group into its representative, in sequence, using
/// `values` (centralities of `cycle_graph`) and the combined-value rule
/// `F_w ← F_u + F_w`. The result lists the groups' original ids in group
/// order.
pub fn recombine<W: Scalar>(
    cycle_graph: &Graph<W>,
    groups: &[Group],
    values: &CentralityVector<W>,
) -> Result<Recombined<W>, TransformError> {
    if values.values.len() != cycle_graph.node_count() {
        return Err(TransformError::ValueMismatch);
    }
    let mut covered = vec![false; cycle_graph.node_count()];
    for grp in groups {
        if grp.members.is_empty() {
            return Err(TransformError::EmptyGroup(grp.original.to_string()));
        }
        for &m in &grp.members {
            if m >= covered.len() || std::mem::replace(&mut covered[m], true) {
                return Err(TransformError::ValueMismatch);
            }
        }
    }
    if covered.iter().any(|c| !c) {
        return Err(TransformError::ValueMismatch);
    }

    let mut g = cycle_graph.clone();
    let mut value: HashMap<String, W> = cycle_graph
        .ids()
        .iter()
        .zip(&values.values)
        .map(|(id, v)| (id.to_string(), v.clone()))
        .collect();
    let mut combined = Vec::with_capacity(groups.len());
    for grp in groups {
        let rep = cycle_graph.id(grp.members[0]).to_string();
        for &m in &grp.members[1..] {
            let other = cycle_graph.id(m).to_string();
            let ui = g.require(&other)?;
            let wi = g.require(&rep)?;
            let fu = value[&other].clone();
            let fw = value[&rep].clone();
            g = combine_with_values(&g, ui, wi, &fu, &fw)?;
            value.insert(rep.clone(), fu + fw);
        }
        combined.push(value[&rep].clone());
    }

    // Rename representatives and put them in group order.
    let mut out = Graph::new();
    let mut pos = vec![usize::MAX; g.node_count()];
    for grp in groups {
        let rep = g.require(cycle_graph.id(grp.members[0]).as_str())?;
        pos[rep] = out.add_node(grp.original.as_str(), g.node_weight(rep).clone())?;
    }
    for (u, v, c) in g.edges() {
        out.add_edge(pos[u], pos[v], c.clone())?;
    }
    Ok(Recombined {
        graph: out,
        values: combined,
    })
}

/// Target value on the graph `u → v` (weight `y`), `u → w` (weight `z − y`,
/// omitted when `z = y`), with `b(u) = x` and zero elsewhere.
pub fn profit_value<W: Scalar>(measure: &Measure, x: &W, y: &W, z: &W) -> Result<W, TransformError> {
    if x.lt_zero() || !y.gt_zero() || y > z {
        return Err(TransformError::InvalidProfit(format!(
            "need x >= 0 and 0 < y <= z, got x={}, y={}, z={}",
            x.to_text(),
            y.to_text(),
            z.to_text()
        )));
    }
    let mut g = Graph::<W>::new();
    let u = g.add_node("u", x.clone())?;
    let v = g.add_node("v", W::zero())?;
    g.add_edge(u, v, y.clone())?;
    if z > y {
        let w = g.add_node("w", W::zero())?;
        g.add_edge(u, w, z.clone() - y.clone())?;
    }
    let cv = compute_measure(&g, measure)?;
    Ok(cv.values[v].clone())
}

/// `b(v) + Σ_{(u,v)} p(F_u, c(u,v), deg⁺_u)` for every node `v`, self-loops
/// included.
pub fn profit_decomposition<W: Scalar>(
    g: &Graph<W>,
    measure: &Measure,
    values: &[W],
) -> Result<Vec<W>, TransformError> {
    if values.len() != g.node_count() {
        return Err(TransformError::ValueMismatch);
    }
    let degrees = g.out_degrees();
    let mut out = g.node_weights().to_vec();
    for (u, v, c) in g.edges() {
        let p = profit_value(measure, &values[u], c, &degrees[u])?;
        out[v] = out[v].clone() + p;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_graph;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    const FIG4: &str = "node v1 1/5\nnode v2 1/5\nnode v3 1/5\nnode v4 1/5\nnode v5 1/5\n\
        edge v4 v1 1\nedge v4 v2 1\nedge v1 v2 1\nedge v1 v5 1\n\
        edge v2 v3 2\nedge v5 v4 2\nedge v3 v4 2\n";

    #[test]
    fn combine_two_node_cycle() {
        let g = parse_graph("node u 1\nnode w 2\nedge u w 1\nedge w u 1").unwrap();
        let c = combine_with_values(&g, 0, 1, &q(1, 1), &q(1, 1)).unwrap();
        assert_eq!(c.node_count(), 1);
        assert_eq!(c.node_weight(0), &q(3, 1));
        assert_eq!(c.edge_weight(0, 0), Some(&q(1, 1)));
        assert!(matches!(
            combine_with_values(&g, 0, 1, &q(0, 1), &q(0, 1)),
            Err(TransformError::ZeroCombinedValue(..))
        ));
        assert!(matches!(
            combine_with_values(&g, 0, 0, &q(1, 1), &q(1, 1)),
            Err(TransformError::SelfCombine(_))
        ));
    }

    #[test]
    fn edgeless_node_only_moves_weight() {
        let g = parse_graph("node u 1/2\nnode w 1\nnode t 0\nedge w t 3").unwrap();
        let c = combine_with_values(&g, 0, 1, &q(5, 1), &q(0, 1)).unwrap();
        assert_eq!(c.node_weight(0), &q(3, 2));
        // w's share is zero, so its edge disappears.
        assert_eq!(c.edge_count(), 0);
        let c = combine_with_values(&g, 0, 1, &q(0, 1), &q(2, 1)).unwrap();
        assert_eq!(c.edge_weight(0, 1), Some(&q(3, 1)));
    }

    #[test]
    fn em_and_ec_inverse_pairs() {
        let g = parse_graph(FIG4).unwrap();
        let two = q(2, 1);
        let half = q(1, 2);
        let em = edge_multiplication(&g, 0, &two).unwrap();
        assert_eq!(edge_multiplication(&em, 0, &half).unwrap(), g);
        let ec = edge_compensation(&g, 3, &two).unwrap();
        assert_eq!(ec.edge_weight(2, 3), Some(&q(1, 1)));
        assert_eq!(ec.edge_weight(3, 0), Some(&q(2, 1)));
        assert_eq!(ec.node_weight(3), &q(1, 10));
        assert_eq!(edge_compensation(&ec, 3, &half).unwrap(), g);
        assert!(edge_compensation(&g, 0, &q(0, 1)).is_err());
        assert_eq!(edge_multiplication(&g, 1, &q(1, 1)).unwrap(), g);
    }

    #[test]
    fn ec_leaves_loop_alone() {
        let g = parse_graph("node u 1\nnode v 1\nedge u u 5\nedge u v 1\nedge v u 1").unwrap();
        let ec = edge_compensation(&g, 0, &q(3, 1)).unwrap();
        assert_eq!(ec.edge_weight(0, 0), Some(&q(5, 1)));
        assert_eq!(ec.edge_weight(0, 1), Some(&q(3, 1)));
        assert_eq!(ec.edge_weight(1, 0), Some(&q(1, 3)));
        let em = edge_multiplication(&g, 0, &q(3, 1)).unwrap();
        assert_eq!(em.edge_weight(0, 0), Some(&q(15, 1)));
    }

    #[test]
    fn fig4_impacts_and_multigraph() {
        let g = parse_graph(FIG4).unwrap();
        let impacts = compute_impacts(&g).unwrap();
        let i41 = impacts.iter().find(|i| (i.src, i.dst) == (3, 0)).unwrap();
        assert_eq!(i41.value, q(2, 13));
        let m = build_impact_multigraph(&g, DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(m.n, 13);
        assert_eq!(m.total_multiplicity(), 13);
        let walk = euler_circuit(&m, 0).unwrap();
        assert_eq!(walk.len(), 14);
        assert_eq!(walk.iter().skip(1).filter(|&&v| v == 3).count(), 4);
        assert!(matches!(
            build_impact_multigraph(&g, 12),
            Err(TransformError::TooManyCycleNodes { .. })
        ));
    }

    #[test]
    fn single_loop_circuit() {
        let g = parse_graph("node v 1\nedge v v 1").unwrap();
        let m = build_impact_multigraph(&g, 10).unwrap();
        assert_eq!(euler_circuit(&m, 0).unwrap(), vec![0, 0]);
    }

    #[test]
    fn fig4_round_trip() {
        let g = parse_graph(FIG4).unwrap();
        let s = euler_construct(&g, DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(s.cycle_graph.node_count(), 13);
        let sizes: Vec<usize> = s.groups().iter().map(|g| g.members.len()).collect();
        assert_eq!(sizes, vec![2, 3, 3, 4, 1]);
        assert_eq!(s.cycle_graph.is_out_regular(), Some(q(2, 1)));
        let kp = katz_prestige(&s.cycle_graph).unwrap();
        assert!(kp.values.iter().all(|v| *v == q(1, 13)));
        let r = recombine(&s.cycle_graph, &s.groups(), &kp).unwrap();
        assert_eq!(r.graph, g);
        assert_eq!(r.graph.canonical().to_dg(), g.canonical().to_dg());
        assert_eq!(r.values, katz_prestige(&g).unwrap().values);
        let pairs = s.sidecar_pairs();
        let groups = groups_from_pairs(&s.cycle_graph, &pairs).unwrap();
        assert_eq!(groups, s.groups());
    }

    #[test]
    fn three_cycle_is_its_own_cycle_graph() {
        let g = parse_graph("node a 1/6\nnode b 1/3\nnode c 1/2\nedge a b 1\nedge b c 1\nedge c a 1").unwrap();
        let s = euler_construct(&g, 100).unwrap();
        assert_eq!(s.cycle_graph, g);
        assert_eq!(s.grouping, vec![0, 1, 2]);
    }

    #[test]
    fn normalize_fig4_halves() {
        let g = parse_graph(FIG4).unwrap();
        let n = out_degree_normalize(&g);
        assert_eq!(n.edge_weight(1, 2), Some(&q(1, 1)));
        assert_eq!(n.edge_weight(3, 0), Some(&q(1, 2)));
        assert_eq!(out_degree_normalize(&n), n);
    }

    #[test]
    fn profit_closed_forms() {
        let pr = profit_value(&Measure::PageRank(0.5), &2.0, &1.0, &4.0).unwrap();
        assert!((pr - 0.25).abs() < 1e-15);
        let k = profit_value(&Measure::Katz(0.5), &2.0, &1.0, &4.0).unwrap();
        assert!((k - 1.0).abs() < 1e-15);
        assert_eq!(profit_value(&Measure::Katz(0.5), &0.0, &1.0, &1.0).unwrap(), 0.0);
        assert!(profit_value(&Measure::Katz(0.5), &1.0, &2.0, &1.0).is_err());
        assert!(profit_value(&Measure::KatzPrestige, &1.0, &1.0, &1.0).is_err());
    }
}
