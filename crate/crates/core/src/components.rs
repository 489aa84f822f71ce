//! Strongly connected components (iterative Tarjan).

use crate::graph::Graph;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Member positions, ascending.
    pub nodes: Vec<usize>,
    /// A walk of length >= 1 exists between every ordered pair of members.
    /// A single node is strongly connected only if it carries a self-loop.
    pub strongly_connected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    /// Components in topological order of the condensation: every edge
    /// between components goes from an earlier to a later one.
    pub components: Vec<Component>,
    /// `component_of[v]` indexes `components`.
    pub component_of: Vec<usize>,
}

impl ComponentPartition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn same_component(&self, u: usize, v: usize) -> bool {
        self.component_of[u] == self.component_of[v]
    }
}

pub fn strongly_connected_components<W: Scalar>(g: &Graph<W>) -> ComponentPartition {
    let n = g.node_count();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut found: Vec<Vec<usize>> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (node, next neighbour offset)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut k)) = call.last_mut() {
            let nbrs = g.out_neighbors(v);
            if *k < nbrs.len() {
                let w = nbrs[*k];
                *k += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                found.push(comp);
            }
        }
    }

    // Tarjan emits components in reverse topological order.
    found.reverse();
    let mut component_of = vec![0usize; n];
    let components = found
        .into_iter()
        .enumerate()
        .map(|(c, nodes)| {
            for &v in &nodes {
                component_of[v] = c;
            }
            let strongly_connected = nodes.len() > 1 || g.has_edge(nodes[0], nodes[0]);
            Component {
                nodes,
                strongly_connected,
            }
        })
        .collect();
    ComponentPartition {
        components,
        component_of,
    }
}

pub fn is_strongly_connected<W: Scalar>(g: &Graph<W>) -> bool {
    let p = strongly_connected_components(g);
    p.len() == 1 && p.components[0].strongly_connected
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::FloatGraph;

    fn graph(n: usize, edges: &[(usize, usize)]) -> FloatGraph {
        let mut g = FloatGraph::new();
        for i in 0..n {
            g.add_node(&format!("n{i}"), 1.0).unwrap();
        }
        for &(u, v) in edges {
            g.add_edge(u, v, 1.0).unwrap();
        }
        g
    }

    #[test]
    fn two_disjoint_cycles() {
        let g = graph(5, &[(0, 1), (1, 0), (2, 3), (3, 4), (4, 2)]);
        let p = strongly_connected_components(&g);
        assert_eq!(p.len(), 2);
        assert!(p.components.iter().all(|c| c.strongly_connected));
    }

    #[test]
    fn lone_node_is_not_strongly_connected() {
        let p = strongly_connected_components(&graph(1, &[]));
        assert_eq!(p.len(), 1);
        assert!(!p.components[0].strongly_connected);
        let p = strongly_connected_components(&graph(1, &[(0, 0)]));
        assert!(p.components[0].strongly_connected);
    }

    #[test]
    fn topological_order_of_condensation() {
        // 0 -> {1,2 cycle} -> 3
        let g = graph(4, &[(0, 1), (1, 2), (2, 1), (2, 3)]);
        let p = strongly_connected_components(&g);
        assert_eq!(p.len(), 3);
        for (u, v, _) in g.edges() {
            assert!(p.component_of[u] <= p.component_of[v]);
        }
        assert_eq!(p.components[p.component_of[1]].nodes, vec![1, 2]);
    }

    #[test]
    fn long_path_does_not_overflow_stack() {
        let n = 100_000;
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).chain([(n - 1, 0)]).collect();
        let g = graph(n, &edges);
        assert!(is_strongly_connected(&g));
    }
}
