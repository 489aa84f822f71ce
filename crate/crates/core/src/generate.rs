//! Seeded random graph families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classes::{classify, GraphClass};
use crate::components::is_strongly_connected;
use crate::error::AxiomError;
use crate::graph::Graph;
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    StronglyConnected,
    /// Every node has the same positive out-degree.
    OutRegular { strongly_connected: bool },
    /// Every node has out-degree `x` or `0`.
    SemiOutRegular,
    General,
    /// One directed cycle through all nodes, every edge the same weight.
    Cycle,
    /// Disjoint strongly connected pieces.
    SumOfSccs { components: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightDist {
    /// Weights drawn uniformly from a fixed list of positive rationals.
    Grid(Vec<Rational>),
    /// Uniform floats in `[lo, hi)`, `0 < lo < hi`.
    FloatRange(f64, f64),
}

impl WeightDist {
    /// `{1/2, 1, 3/2, 2, 3}`.
    pub fn default_grid() -> Self {
        WeightDist::Grid(
            [(1, 2), (1, 1), (3, 2), (2, 1), (3, 1)]
                .iter()
                .map(|&(p, q)| Rational::from_ratio(p, q))
                .collect(),
        )
    }

    fn sample<W: Scalar>(&self, rng: &mut ChaCha8Rng) -> W {
        match self {
            WeightDist::Grid(values) => W::from_rational(values.choose(rng).expect("non-empty grid")),
            WeightDist::FloatRange(lo, hi) => {
                W::from_f64(rng.gen_range(*lo..*hi)).expect("finite range")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub weights: WeightDist,
    /// Extra edges per node beyond what the family needs, on average.
    pub density: f64,
    /// Chance that a node gets weight 0.
    pub zero_weight_chance: f64,
    /// Chance that a node gets a self-loop, where the family allows one.
    pub loop_chance: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, min_nodes: usize, max_nodes: usize, seed: u64) -> Self {
        GeneratorSpec {
            family,
            min_nodes,
            max_nodes,
            weights: WeightDist::default_grid(),
            density: 1.0,
            zero_weight_chance: 0.15,
            loop_chance: 0.1,
            seed,
        }
    }

    pub fn with_weights(mut self, weights: WeightDist) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// An independent stream for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn generate<W: Scalar>(spec: &GeneratorSpec) -> Result<Graph<W>, AxiomError> {
    if spec.min_nodes == 0 || spec.min_nodes > spec.max_nodes {
        return Err(AxiomError::Generator(format!(
            "invalid size range {}..={}",
            spec.min_nodes, spec.max_nodes
        )));
    }
    if let WeightDist::Grid(v) = &spec.weights {
        if v.is_empty() || v.iter().any(|w| !w.gt_zero()) {
            return Err(AxiomError::Generator("weight grid must be non-empty and positive".into()));
        }
    }
    if let WeightDist::FloatRange(lo, hi) = spec.weights {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(AxiomError::Generator(format!("invalid float range [{lo}, {hi})")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = rng.gen_range(spec.min_nodes..=spec.max_nodes);
    let g = match spec.family {
        Family::StronglyConnected => strongly_connected(spec, &mut rng, n, "n", 0)?,
        Family::OutRegular { strongly_connected } => out_regular(spec, &mut rng, n, strongly_connected, false),
        Family::SemiOutRegular => out_regular(spec, &mut rng, n, false, true),
        Family::General => general(spec, &mut rng, n),
        Family::Cycle => cycle(spec, &mut rng, n),
        Family::SumOfSccs { components } => {
            if components == 0 || components > n {
                return Err(AxiomError::Generator(format!(
                    "cannot split {n} nodes into {components} components"
                )));
            }
            let mut sizes = vec![1usize; components];
            for _ in components..n {
                let i = rng.gen_range(0..components);
                sizes[i] += 1;
            }
            let mut g = Graph::new();
            let mut offset = 0;
            for size in sizes {
                let part = strongly_connected(spec, &mut rng, size, "n", offset)?;
                g = g.graph_sum(&part)?;
                offset += size;
            }
            g
        }
    };
    check_family(&g, spec.family)?;
    Ok(g)
}

fn check_family<W: Scalar>(g: &Graph<W>, family: Family) -> Result<(), AxiomError> {
    let ok = match family {
        Family::StronglyConnected => is_strongly_connected(g),
        Family::OutRegular { strongly_connected } => {
            g.is_out_regular().is_some() && (!strongly_connected || is_strongly_connected(g))
        }
        Family::SemiOutRegular => g.is_semi_out_regular().is_some(),
        Family::General => true,
        Family::Cycle => {
            is_strongly_connected(g)
                && g.is_out_regular().is_some()
                && (0..g.node_count()).all(|v| g.out_neighbors(v).len() == 1)
        }
        Family::SumOfSccs { .. } => classify(g, GraphClass::KatzPrestige)
            .map(|v| v.member)
            .unwrap_or(false),
    };
    if ok {
        Ok(())
    } else {
        Err(AxiomError::Generator(format!("generated graph is not in family {family:?}")))
    }
}

fn node_weight<W: Scalar>(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> W {
    if rng.gen_bool(spec.zero_weight_chance.clamp(0.0, 1.0)) {
        W::zero()
    } else {
        spec.weights.sample(rng)
    }
}

fn add_nodes<W: Scalar>(spec: &GeneratorSpec, rng: &mut ChaCha8Rng, g: &mut Graph<W>, n: usize, prefix: &str, offset: usize) {
    for i in 0..n {
        let b = node_weight(spec, rng);
        g.add_node(&format!("{prefix}{}", offset + i), b).expect("fresh id");
    }
}

fn extra_edge_count(spec: &GeneratorSpec, rng: &mut ChaCha8Rng, n: usize) -> usize {
    let mean = spec.density.max(0.0) * n as f64;
    rng.gen_range(0.0..=2.0 * mean).round() as usize
}

fn strongly_connected<W: Scalar>(
    spec: &GeneratorSpec,
    rng: &mut ChaCha8Rng,
    n: usize,
    prefix: &str,
    offset: usize,
) -> Result<Graph<W>, AxiomError> {
    let mut g = Graph::new();
    add_nodes(spec, rng, &mut g, n, prefix, offset);
    if n == 1 {
        let w = spec.weights.sample(rng);
        g.add_edge(0, 0, w)?;
        return Ok(g);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for k in 0..n {
        let w = spec.weights.sample(rng);
        g.add_edge(order[k], order[(k + 1) % n], w)?;
    }
    for _ in 0..extra_edge_count(spec, rng, n) {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v && !rng.gen_bool(spec.loop_chance.clamp(0.0, 1.0)) {
            continue;
        }
        if !g.has_edge(u, v) {
            let w = spec.weights.sample(rng);
            g.add_edge(u, v, w)?;
        }
    }
    Ok(g)
}

/// Out-degree `x` everywhere (or `x`/`0` for the semi variant). Each node
/// picks its targets, then raw grid weights are rescaled to sum to `x`.
fn out_regular<W: Scalar>(
    spec: &GeneratorSpec,
    rng: &mut ChaCha8Rng,
    n: usize,
    strongly_connected: bool,
    semi: bool,
) -> Graph<W> {
    let mut g = Graph::new();
    add_nodes(spec, rng, &mut g, n, "n", 0);
    let x: W = spec.weights.sample(rng);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut successor = vec![usize::MAX; n];
    if strongly_connected {
        for k in 0..n {
            successor[order[k]] = order[(k + 1) % n];
        }
    }
    let sinks: Vec<bool> = if semi {
        let mut s: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.3)).collect();
        let keep = rng.gen_range(0..n);
        s[keep] = false;
        s
    } else {
        vec![false; n]
    };
    for u in 0..n {
        if sinks[u] {
            continue;
        }
        let mut targets: Vec<usize> = Vec::new();
        if successor[u] != usize::MAX {
            targets.push(successor[u]);
        }
        let extra = 1 + extra_edge_count(spec, rng, 1);
        for _ in 0..extra {
            let v = rng.gen_range(0..n);
            if v == u && !rng.gen_bool(spec.loop_chance.clamp(0.0, 1.0)) {
                continue;
            }
            if !targets.contains(&v) {
                targets.push(v);
            }
        }
        if targets.is_empty() {
            targets.push(if n > 1 { (u + 1) % n } else { u });
        }
        let raw: Vec<W> = targets.iter().map(|_| spec.weights.sample(rng)).collect();
        let total = raw.iter().fold(W::zero(), |a, w| a + w.clone());
        for (v, w) in targets.into_iter().zip(raw) {
            g.add_edge(u, v, w * x.clone() / total.clone()).expect("fresh edge");
        }
    }
    g
}

fn general<W: Scalar>(spec: &GeneratorSpec, rng: &mut ChaCha8Rng, n: usize) -> Graph<W> {
    let mut g = Graph::new();
    add_nodes(spec, rng, &mut g, n, "n", 0);
    for _ in 0..extra_edge_count(spec, rng, n) + n / 2 {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v && !rng.gen_bool(spec.loop_chance.clamp(0.0, 1.0)) {
            continue;
        }
        if !g.has_edge(u, v) {
            let w = spec.weights.sample(rng);
            g.add_edge(u, v, w).expect("fresh edge");
        }
    }
    g
}

fn cycle<W: Scalar>(spec: &GeneratorSpec, rng: &mut ChaCha8Rng, n: usize) -> Graph<W> {
    let mut g = Graph::new();
    add_nodes(spec, rng, &mut g, n, "n", 0);
    let x: W = spec.weights.sample(rng);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for k in 0..n {
        g.add_edge(order[k], order[(k + 1) % n], x.clone()).expect("fresh edge");
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ExactGraph, FloatGraph};

    #[test]
    fn families_satisfy_their_predicates() {
        let families = [
            Family::StronglyConnected,
            Family::OutRegular { strongly_connected: true },
            Family::OutRegular { strongly_connected: false },
            Family::SemiOutRegular,
            Family::General,
            Family::Cycle,
            Family::SumOfSccs { components: 2 },
        ];
        for family in families {
            for seed in 0..30 {
                let spec = GeneratorSpec::new(family, 2, 12, seed);
                let g: ExactGraph = generate(&spec).unwrap();
                assert!(g.node_count() >= 2 && g.node_count() <= 12);
                let f: FloatGraph = generate(&spec.clone().with_weights(WeightDist::FloatRange(0.1, 2.0))).unwrap();
                assert!(f.node_count() >= 2);
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = GeneratorSpec::new(Family::General, 3, 20, 7);
        let a: FloatGraph = generate(&spec).unwrap();
        let b: FloatGraph = generate(&spec).unwrap();
        assert_eq!(a.to_dg(), b.to_dg());
        let c: FloatGraph = generate(&spec.with_seed(8)).unwrap();
        assert_ne!(a.to_dg(), c.to_dg());
    }

    #[test]
    fn cycle_of_five() {
        let spec = GeneratorSpec::new(Family::Cycle, 5, 5, 1);
        let g: ExactGraph = generate(&spec).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edge_count(), 5);
        assert!(g.is_out_regular().is_some());
    }

    #[test]
    fn rejects_bad_specs() {
        let spec = GeneratorSpec::new(Family::SumOfSccs { components: 4 }, 2, 3, 0);
        assert!(generate::<f64>(&spec).is_err());
        let spec = GeneratorSpec::new(Family::General, 0, 3, 0);
        assert!(generate::<f64>(&spec).is_err());
    }
}
