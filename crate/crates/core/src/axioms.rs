//! Executable axiom checks and the measure-by-axiom satisfaction matrix.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::centrality::{compute_measure, Measure};
use crate::classes::in_class;
use crate::components::is_strongly_connected;
use crate::error::{AxiomError, CentralityError};
use crate::generate::{generate, trial_rng, Family, GeneratorSpec, WeightDist};
use crate::graph::{Graph, NodeId};
use crate::scalar::Scalar;
use crate::spectral::principal_eigenvalue;
use crate::transforms::{combine_with_values, edge_compensation, edge_multiplication};

/// Default relative tolerance for float-mode comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// Cap on accepted shrinking steps.
pub const SHRINK_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NcVariant {
    /// `deg⁺_u = deg⁺_w = deg⁺_s` for every successor `s` of `u` or `w`.
    Plain,
    /// The graph is semi-out-regular and `deg⁺_u = deg⁺_w`.
    SemiOutRegular,
    /// No hypothesis. Experimental.
    Unconstrained,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxiomId {
    Locality,
    EdgeDeletion,
    NodeCombination(NcVariant),
    EdgeMultiplication,
    EdgeCompensation,
    Baseline,
    Cycle,
}

impl AxiomId {
    /// The seven axioms in report order, NC in its plain form.
    pub const ALL: [AxiomId; 7] = [
        AxiomId::Locality,
        AxiomId::EdgeDeletion,
        AxiomId::NodeCombination(NcVariant::Plain),
        AxiomId::EdgeMultiplication,
        AxiomId::EdgeCompensation,
        AxiomId::Baseline,
        AxiomId::Cycle,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            AxiomId::Locality => "LOC",
            AxiomId::EdgeDeletion => "ED",
            AxiomId::NodeCombination(NcVariant::Plain) => "NC",
            AxiomId::NodeCombination(NcVariant::SemiOutRegular) => "NC-SOR",
            AxiomId::NodeCombination(NcVariant::Unconstrained) => "NC-ANY",
            AxiomId::EdgeMultiplication => "EM",
            AxiomId::EdgeCompensation => "EC",
            AxiomId::Baseline => "BL",
            AxiomId::Cycle => "CY",
        }
    }

    pub fn from_tag(tag: &str) -> Option<AxiomId> {
        let all = [
            AxiomId::Locality,
            AxiomId::EdgeDeletion,
            AxiomId::NodeCombination(NcVariant::Plain),
            AxiomId::NodeCombination(NcVariant::SemiOutRegular),
            AxiomId::NodeCombination(NcVariant::Unconstrained),
            AxiomId::EdgeMultiplication,
            AxiomId::EdgeCompensation,
            AxiomId::Baseline,
            AxiomId::Cycle,
        ];
        all.into_iter().find(|a| a.tag().eq_ignore_ascii_case(tag))
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Everything an axiom quantifies over.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance<W> {
    Locality { g: Graph<W>, h: Graph<W> },
    EdgeDeletion { g: Graph<W>, src: NodeId, dst: NodeId },
    NodeCombination { g: Graph<W>, u: NodeId, w: NodeId },
    EdgeMultiplication { g: Graph<W>, u: NodeId, x: W },
    EdgeCompensation { g: Graph<W>, u: NodeId, x: W },
    Baseline { g: Graph<W>, v: NodeId },
    Cycle { g: Graph<W> },
}

impl<W: Scalar> Instance<W> {
    pub fn graph(&self) -> &Graph<W> {
        match self {
            Instance::Locality { g, .. }
            | Instance::EdgeDeletion { g, .. }
            | Instance::NodeCombination { g, .. }
            | Instance::EdgeMultiplication { g, .. }
            | Instance::EdgeCompensation { g, .. }
            | Instance::Baseline { g, .. }
            | Instance::Cycle { g } => g,
        }
    }

    fn with_graph(&self, g: Graph<W>) -> Instance<W> {
        let mut out = self.clone();
        match &mut out {
            Instance::Locality { g: slot, .. }
            | Instance::EdgeDeletion { g: slot, .. }
            | Instance::NodeCombination { g: slot, .. }
            | Instance::EdgeMultiplication { g: slot, .. }
            | Instance::EdgeCompensation { g: slot, .. }
            | Instance::Baseline { g: slot, .. }
            | Instance::Cycle { g: slot } => *slot = g,
        }
        out
    }

    fn referenced(&self) -> Vec<&NodeId> {
        match self {
            Instance::Locality { .. } | Instance::Cycle { .. } => Vec::new(),
            Instance::EdgeDeletion { src, dst, .. } => vec![src, dst],
            Instance::NodeCombination { u, w, .. } => vec![u, w],
            Instance::EdgeMultiplication { u, .. } | Instance::EdgeCompensation { u, .. } => vec![u],
            Instance::Baseline { v, .. } => vec![v],
        }
    }

    /// Human-readable parameters followed by the graph(s) in `.dg` form.
    pub fn describe(&self) -> String {
        let header = match self {
            Instance::Locality { .. } => "# LOC: G then H".to_string(),
            Instance::EdgeDeletion { src, dst, .. } => format!("# ED: delete {src} -> {dst}"),
            Instance::NodeCombination { u, w, .. } => format!("# NC: combine {u} into {w}"),
            Instance::EdgeMultiplication { u, x, .. } => format!("# EM: node {u}, x = {}", x.to_text()),
            Instance::EdgeCompensation { u, x, .. } => format!("# EC: node {u}, x = {}", x.to_text()),
            Instance::Baseline { v, .. } => format!("# BL: isolated node {v}"),
            Instance::Cycle { .. } => "# CY".to_string(),
        };
        match self {
            Instance::Locality { g, h } => format!("{header}\n{}# H\n{}", g.to_dg(), h.to_dg()),
            other => format!("{header}\n{}", other.graph().to_dg()),
        }
    }

    fn matches(&self, axiom: AxiomId) -> bool {
        matches!(
            (self, axiom),
            (Instance::Locality { .. }, AxiomId::Locality)
                | (Instance::EdgeDeletion { .. }, AxiomId::EdgeDeletion)
                | (Instance::NodeCombination { .. }, AxiomId::NodeCombination(_))
                | (Instance::EdgeMultiplication { .. }, AxiomId::EdgeMultiplication)
                | (Instance::EdgeCompensation { .. }, AxiomId::EdgeCompensation)
                | (Instance::Baseline { .. }, AxiomId::Baseline)
                | (Instance::Cycle { .. }, AxiomId::Cycle)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomVerdict {
    pub axiom: AxiomId,
    pub measure: Measure,
    pub instance: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub skipped_reason: Option<String>,
}

impl AxiomVerdict {
    pub fn skipped(&self) -> bool {
        self.skipped_reason.is_some()
    }

    pub fn failed(&self) -> bool {
        !self.skipped() && !self.passed
    }
}

enum Eval<W> {
    Values(Vec<W>),
    Outside(String),
}

fn evaluate<W: Scalar>(g: &Graph<W>, measure: &Measure) -> Result<Eval<W>, AxiomError> {
    if !in_class(g, measure.class()) {
        return Ok(Eval::Outside(format!("graph is outside the class of {measure}")));
    }
    match compute_measure(g, measure) {
        Ok(cv) => Ok(Eval::Values(cv.values)),
        Err(CentralityError::ClassViolation { reason, .. }) => Ok(Eval::Outside(reason)),
        Err(e) => Err(e.into()),
    }
}

macro_rules! values_or_skip {
    ($eval:expr, $skip:expr) => {
        match $eval {
            Eval::Values(v) => v,
            Eval::Outside(reason) => return Ok($skip(reason)),
        }
    };
}

/// `max |a − b| / max(|a|, |b|)` over all pairs; exact zero deviations stay
/// zero, and an all-zero reference gives zero.
fn relative_deviation<W: Scalar>(pairs: &[(W, W)]) -> f64 {
    let mut diff = W::zero();
    let mut scale = W::zero();
    for (a, b) in pairs {
        diff = diff.max_of((a.clone() - b.clone()).abs());
        scale = scale.max_of(a.abs()).max_of(b.abs());
    }
    if diff.is_zero() {
        0.0
    } else if scale.is_zero() {
        f64::INFINITY
    } else {
        (diff / scale).to_f64()
    }
}

fn near<W: Scalar>(a: &W, b: &W) -> bool {
    a.near(b, 1e-9)
}

/// Checks one axiom on one instance.
///
/// Exact weight types compare exactly (tolerance 0). Instances whose source
/// or transformed graph lies outside the measure's class are skipped.
/// Instances that do not satisfy the axiom's own hypothesis are errors.
pub fn check_axiom<W: Scalar>(
    axiom: AxiomId,
    measure: &Measure,
    instance: &Instance<W>,
    tolerance: f64,
) -> Result<AxiomVerdict, AxiomError> {
    if !instance.matches(axiom) {
        return Err(AxiomError::Precondition(format!("instance does not fit axiom {axiom}")));
    }
    let tolerance = if W::EXACT { 0.0 } else { tolerance };
    let description = instance.describe();
    let verdict = |pairs: Vec<(W, W)>| {
        let dev = relative_deviation(&pairs);
        AxiomVerdict {
            axiom,
            measure: *measure,
            instance: description.clone(),
            max_deviation: dev,
            tolerance,
            passed: dev <= tolerance,
            skipped_reason: None,
        }
    };
    let skip = |reason: String| AxiomVerdict {
        axiom,
        measure: *measure,
        instance: description.clone(),
        max_deviation: 0.0,
        tolerance,
        passed: false,
        skipped_reason: Some(reason),
    };

    match instance {
        Instance::Locality { g, h } => {
            let sum = g.graph_sum(h)?;
            let fg = values_or_skip!(evaluate(g, measure)?, skip);
            let fs = values_or_skip!(evaluate(&sum, measure)?, skip);
            let pairs = (0..g.node_count()).map(|v| (fs[v].clone(), fg[v].clone())).collect();
            Ok(verdict(pairs))
        }
        Instance::EdgeDeletion { g, src, dst } => {
            let u = g.require(src.as_str())?;
            let w = g.require(dst.as_str())?;
            let deleted = g.delete_edge(u, w)?;
            let successors = g.successors(u);
            let fg = values_or_skip!(evaluate(g, measure)?, skip);
            let fd = values_or_skip!(evaluate(&deleted, measure)?, skip);
            let pairs = (0..g.node_count())
                .filter(|&v| !successors[v])
                .map(|v| (fd[v].clone(), fg[v].clone()))
                .collect();
            Ok(verdict(pairs))
        }
        Instance::NodeCombination { g, u, w } => {
            let variant = match axiom {
                AxiomId::NodeCombination(v) => v,
                _ => unreachable!("checked by matches"),
            };
            let ui = g.require(u.as_str())?;
            let wi = g.require(w.as_str())?;
            if ui == wi {
                return Err(AxiomError::Precondition("NC needs two distinct nodes".into()));
            }
            nc_hypothesis(g, ui, wi, variant)?;
            let fg = values_or_skip!(evaluate(g, measure)?, skip);
            let total = fg[ui].clone() + fg[wi].clone();
            if total.is_zero() {
                return Ok(skip("combined centrality is zero".into()));
            }
            let combined = combine_with_values(g, ui, wi, &fg[ui], &fg[wi])?;
            let fc = values_or_skip!(evaluate(&combined, measure)?, skip);
            let mut pairs = Vec::with_capacity(g.node_count());
            for v in 0..g.node_count() {
                if v == ui {
                    continue;
                }
                let cv = combined.require(g.id(v).as_str())?;
                let expected = if v == wi { total.clone() } else { fg[v].clone() };
                pairs.push((fc[cv].clone(), expected));
            }
            Ok(verdict(pairs))
        }
        Instance::EdgeMultiplication { g, u, x } => {
            let ui = g.require(u.as_str())?;
            let scaled = edge_multiplication(g, ui, x)?;
            let fg = values_or_skip!(evaluate(g, measure)?, skip);
            let fs = values_or_skip!(evaluate(&scaled, measure)?, skip);
            Ok(verdict(fs.into_iter().zip(fg).collect()))
        }
        Instance::EdgeCompensation { g, u, x } => {
            let ui = g.require(u.as_str())?;
            let comp = edge_compensation(g, ui, x)?;
            let fg = values_or_skip!(evaluate(g, measure)?, skip);
            let fc = values_or_skip!(evaluate(&comp, measure)?, skip);
            let pairs = (0..g.node_count())
                .map(|v| {
                    if v == ui {
                        (fc[v].clone() * x.clone(), fg[v].clone())
                    } else {
                        (fc[v].clone(), fg[v].clone())
                    }
                })
                .collect();
            Ok(verdict(pairs))
        }
        Instance::Baseline { g, v } => {
            let vi = g.require(v.as_str())?;
            if !g.is_isolated(vi) {
                return Err(AxiomError::Precondition(format!("node {v} is not isolated")));
            }
            let fg = values_or_skip!(evaluate(g, measure)?, skip);
            Ok(verdict(vec![(fg[vi].clone(), g.node_weight(vi).clone())]))
        }
        Instance::Cycle { g } => {
            if !is_cycle_graph(g) {
                return Err(AxiomError::Precondition("graph is not an out-regular cycle graph".into()));
            }
            let fg = values_or_skip!(evaluate(g, measure)?, skip);
            let share = g.total_node_weight() / W::from_ratio(g.node_count() as i64, 1);
            Ok(verdict(fg.into_iter().map(|f| (f, share.clone())).collect()))
        }
    }
}

/// A strongly connected graph in which every node has exactly one outgoing
/// edge, all of the same weight.
pub fn is_cycle_graph<W: Scalar>(g: &Graph<W>) -> bool {
    !g.is_empty()
        && is_strongly_connected(g)
        && (0..g.node_count()).all(|v| g.out_neighbors(v).len() == 1)
        && g.is_out_regular().is_some()
}

fn nc_hypothesis<W: Scalar>(g: &Graph<W>, u: usize, w: usize, variant: NcVariant) -> Result<(), AxiomError> {
    let du = g.out_degree(u);
    let dw = g.out_degree(w);
    match variant {
        NcVariant::Unconstrained => Ok(()),
        NcVariant::SemiOutRegular => {
            let degrees = g.out_degrees();
            let positive: Vec<&W> = degrees.iter().filter(|d| d.gt_zero()).collect();
            let regular = positive.windows(2).all(|p| near(p[0], p[1]));
            if regular && near(&du, &dw) {
                Ok(())
            } else {
                Err(AxiomError::Precondition(
                    "graph is not semi-out-regular or the pair has unequal out-degrees".into(),
                ))
            }
        }
        NcVariant::Plain => {
            if !near(&du, &dw) {
                return Err(AxiomError::Precondition(format!(
                    "out-degrees of {} and {} differ",
                    g.id(u),
                    g.id(w)
                )));
            }
            let su = g.successors(u);
            let sw = g.successors(w);
            for s in 0..g.node_count() {
                if (su[s] || sw[s]) && !near(&g.out_degree(s), &du) {
                    return Err(AxiomError::Precondition(format!(
                        "successor {} has a different out-degree",
                        g.id(s)
                    )));
                }
            }
            Ok(())
        }
    }
}

/// Greedily removes nodes and edges while the instance keeps failing.
pub fn shrink<W: Scalar>(
    axiom: AxiomId,
    measure: &Measure,
    instance: &Instance<W>,
    tolerance: f64,
) -> Instance<W> {
    let still_fails = |cand: &Instance<W>| {
        check_axiom(axiom, measure, cand, tolerance)
            .map(|v| v.failed())
            .unwrap_or(false)
    };
    let mut current = instance.clone();
    let mut steps = 0;
    'outer: while steps < SHRINK_STEPS {
        for cand in reductions(&current) {
            if still_fails(&cand) {
                current = cand;
                steps += 1;
                continue 'outer;
            }
        }
        break;
    }
    current
}

fn reductions<W: Scalar>(inst: &Instance<W>) -> Vec<Instance<W>> {
    let mut out = Vec::new();
    if let Instance::Locality { g, h } = inst {
        for r in graph_reductions(g, &[]) {
            out.push(Instance::Locality { g: r, h: h.clone() });
        }
        for r in graph_reductions(h, &[]) {
            out.push(Instance::Locality { g: g.clone(), h: r });
        }
        return out;
    }
    let keep: Vec<&NodeId> = inst.referenced();
    let protected_edge = match inst {
        Instance::EdgeDeletion { src, dst, .. } => Some((src.clone(), dst.clone())),
        _ => None,
    };
    let g = inst.graph();
    for r in graph_reductions(g, &keep) {
        if let Some((s, d)) = &protected_edge {
            let (Some(si), Some(di)) = (r.index_of(s.as_str()), r.index_of(d.as_str())) else {
                continue;
            };
            if !r.has_edge(si, di) {
                continue;
            }
        }
        out.push(inst.with_graph(r));
    }
    out
}

fn graph_reductions<W: Scalar>(g: &Graph<W>, keep: &[&NodeId]) -> Vec<Graph<W>> {
    let mut out = Vec::new();
    if g.node_count() > 1 {
        for v in 0..g.node_count() {
            if !keep.contains(&g.id(v)) {
                out.push(g.without_node(v));
            }
        }
    }
    let edges: Vec<(usize, usize)> = g.edges().map(|(u, v, _)| (u, v)).collect();
    for (u, v) in edges {
        out.push(g.delete_edge(u, v).expect("edge exists"));
    }
    out
}

/// Outcome for one (measure, axiom) cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellStatus::Pass => "PASS",
            CellStatus::Fail => "FAIL",
            CellStatus::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub instance: String,
    pub shrunk: String,
    pub max_deviation: f64,
    /// Seed of the trial that produced it.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub measure: Measure,
    pub axiom: AxiomId,
    pub status: CellStatus,
    pub admissible: usize,
    pub skipped: usize,
    pub failures: usize,
    pub max_deviation: f64,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixConfig {
    pub seed: u64,
    /// Admissible instances wanted per cell.
    pub trials: usize,
    /// Instances attempted per cell before giving up on reaching `trials`.
    pub max_attempts: usize,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub tolerance: f64,
}

impl Default for MatrixConfig {
    fn default() -> Self {
        MatrixConfig {
            seed: 2024,
            trials: 200,
            max_attempts: 2000,
            min_nodes: 3,
            max_nodes: 25,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixReport {
    pub config: MatrixConfig,
    pub cells: Vec<CellReport>,
}

impl MatrixReport {
    pub fn cell(&self, measure: &Measure, axiom: AxiomId) -> Option<&CellReport> {
        self.cells
            .iter()
            .find(|c| c.measure.short_name() == measure.short_name() && c.axiom == axiom)
    }

    /// Cells whose status differs from [`reference_pattern`].
    pub fn mismatches(&self) -> Vec<&CellReport> {
        self.cells
            .iter()
            .filter(|c| reference_pattern(&c.measure, c.axiom) != Some(c.status))
            .collect()
    }
}

/// Expected status of each cell.
pub fn reference_pattern(measure: &Measure, axiom: AxiomId) -> Option<CellStatus> {
    use AxiomId::*;
    use CellStatus::*;
    let status = match (measure, axiom) {
        (_, Locality | EdgeDeletion | NodeCombination(NcVariant::Plain)) => Pass,
        (_, NodeCombination(_)) => return None,
        (Measure::Eigenvector, EdgeMultiplication) => Fail,
        (Measure::Eigenvector, EdgeCompensation) => Pass,
        (Measure::Eigenvector, Baseline) => Skipped,
        (Measure::Eigenvector, Cycle) => Pass,
        (Measure::Katz(_), EdgeMultiplication) => Fail,
        (Measure::Katz(_), EdgeCompensation) => Pass,
        (Measure::Katz(_), Baseline) => Pass,
        (Measure::Katz(_), Cycle) => Fail,
        (Measure::KatzPrestige, EdgeMultiplication) => Pass,
        (Measure::KatzPrestige, EdgeCompensation) => Fail,
        (Measure::KatzPrestige, Baseline) => Skipped,
        (Measure::KatzPrestige, Cycle) => Pass,
        (Measure::PageRank(_), EdgeMultiplication) => Pass,
        (Measure::PageRank(_), EdgeCompensation) => Fail,
        (Measure::PageRank(_), Baseline) => Pass,
        (Measure::PageRank(_), Cycle) => Fail,
    };
    Some(status)
}

/// The four measures as used in the default matrix.
pub fn default_measures() -> Vec<Measure> {
    vec![
        Measure::Eigenvector,
        Measure::Katz(0.1),
        Measure::KatzPrestige,
        Measure::PageRank(0.85),
    ]
}

const FACTORS: [(i64, i64); 4] = [(1, 2), (2, 1), (3, 1), (1, 3)];

fn cell_seed(seed: u64, measure: &Measure, axiom: AxiomId) -> u64 {
    // FNV-1a over the cell name, mixed with the run seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in measure.short_name().bytes().chain(axiom.tag().bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

struct Builder<'a> {
    rng: ChaCha8Rng,
    config: &'a MatrixConfig,
}

impl Builder<'_> {
    fn spec(&mut self, family: Family, min: usize, max: usize) -> GeneratorSpec {
        let mut spec = GeneratorSpec::new(family, min.max(1), max.max(min.max(1)), self.rng.gen());
        spec.density = *[0.3, 0.7, 1.2].choose(&mut self.rng).expect("non-empty");
        spec.weights = WeightDist::default_grid();
        spec
    }

    fn graph<W: Scalar>(&mut self, family: Family, min: usize, max: usize) -> Result<Graph<W>, AxiomError> {
        let spec = self.spec(family, min, max);
        generate(&spec)
    }

    fn size(&self) -> (usize, usize) {
        (self.config.min_nodes, self.config.max_nodes)
    }

    fn factor<W: Scalar>(&mut self) -> W {
        let (p, q) = *FACTORS.choose(&mut self.rng).expect("non-empty");
        W::from_ratio(p, q)
    }

    /// A graph in the measure's class (when the class allows it), mixing
    /// several families.
    fn class_graph<W: Scalar>(&mut self, measure: &Measure, min: usize, max: usize) -> Result<Graph<W>, AxiomError> {
        match measure {
            Measure::PageRank(_) | Measure::Katz(_) => {
                let family = *[
                    Family::General,
                    Family::SemiOutRegular,
                    Family::StronglyConnected,
                    Family::OutRegular { strongly_connected: false },
                ]
                .choose(&mut self.rng)
                .expect("non-empty");
                self.graph(family, min, max)
            }
            Measure::KatzPrestige => {
                let k = self.rng.gen_range(1..=3).min(min.max(1));
                self.graph(Family::SumOfSccs { components: k }, min, max)
            }
            Measure::Eigenvector => {
                let k = self.rng.gen_range(1..=3).min(min.max(1));
                self.equal_lambda_sum(k, min, max)
            }
        }
    }

    /// Sum of `k` strongly connected pieces rescaled to a common principal
    /// eigenvalue.
    fn equal_lambda_sum<W: Scalar>(&mut self, k: usize, min: usize, max: usize) -> Result<Graph<W>, AxiomError> {
        let total = self.rng.gen_range(min.max(k)..=max.max(min.max(k)));
        let mut sizes = vec![1usize; k];
        for _ in k..total {
            let i = self.rng.gen_range(0..k);
            sizes[i] += 1;
        }
        let mut g = Graph::<W>::new();
        let mut target = None;
        for (i, size) in sizes.into_iter().enumerate() {
            let piece: Graph<W> = self.graph(Family::StronglyConnected, size, size)?;
            let piece = piece.relabeled(|id| format!("c{i}{id}"))?;
            let lambda = principal_eigenvalue(&piece)?;
            let piece = match target {
                None => {
                    target = Some(lambda);
                    piece
                }
                Some(t) => {
                    let f = W::from_f64(t / lambda).expect("finite ratio");
                    piece.with_scaled_edges(&f)
                }
            };
            g = g.graph_sum(&piece)?;
        }
        Ok(g)
    }

    fn instance<W: Scalar>(&mut self, axiom: AxiomId, measure: &Measure) -> Result<Instance<W>, AxiomError> {
        let (min, max) = self.size();
        match axiom {
            AxiomId::Locality => {
                let split = max / 2 + 1;
                let g = self.class_graph::<W>(measure, (min - 1).max(1), split)?;
                let h_max = (max - g.node_count()).max(1);
                let mut h = self.class_graph::<W>(measure, 1, h_max)?;
                if matches!(measure, Measure::Eigenvector) {
                    let lg = principal_eigenvalue(&g)?;
                    let lh = principal_eigenvalue(&h)?;
                    if lh > 0.0 {
                        h = h.with_scaled_edges(&W::from_f64(lg / lh).expect("finite ratio"));
                    }
                }
                let h = h.relabeled(|id| format!("h{id}"))?;
                Ok(Instance::Locality { g, h })
            }
            AxiomId::EdgeDeletion => {
                let g = match measure {
                    Measure::KatzPrestige => {
                        let k = self.rng.gen_range(2..=3);
                        self.graph::<W>(Family::SumOfSccs { components: k }, min.max(k), max)?
                    }
                    Measure::Eigenvector => self.graph::<W>(Family::StronglyConnected, min, max)?,
                    _ => self.class_graph::<W>(measure, min, max)?,
                };
                let mut edges: Vec<(usize, usize)> = g.edges().map(|(u, v, _)| (u, v)).collect();
                edges.shuffle(&mut self.rng);
                let keeps_class = |e: &(usize, usize)| {
                    g.delete_edge(e.0, e.1)
                        .map(|d| in_class(&d, measure.class()))
                        .unwrap_or(false)
                };
                let e = edges
                    .iter()
                    .find(|e| keeps_class(e))
                    .or(edges.first())
                    .copied()
                    .ok_or_else(|| AxiomError::Generator("graph has no edges".into()))?;
                Ok(Instance::EdgeDeletion {
                    src: g.id(e.0).clone(),
                    dst: g.id(e.1).clone(),
                    g,
                })
            }
            AxiomId::NodeCombination(variant) => self.nc_instance(measure, variant, min, max),
            AxiomId::EdgeMultiplication => {
                let g = match measure {
                    Measure::Eigenvector => self.graph::<W>(Family::StronglyConnected, min, max)?,
                    _ => self.class_graph::<W>(measure, min, max)?,
                };
                let u = self.emitting_node(&g);
                let x = self.factor();
                Ok(Instance::EdgeMultiplication { u: g.id(u).clone(), g, x })
            }
            AxiomId::EdgeCompensation => {
                let g = self.class_graph::<W>(measure, min, max)?;
                let u = self.emitting_node(&g);
                let x = self.factor();
                Ok(Instance::EdgeCompensation { u: g.id(u).clone(), g, x })
            }
            AxiomId::Baseline => {
                let mut g = self.class_graph::<W>(measure, min.saturating_sub(1).max(1), max - 1)?;
                let isolated: Vec<usize> = (0..g.node_count()).filter(|&v| g.is_isolated(v)).collect();
                let v = match isolated.choose(&mut self.rng) {
                    Some(&v) => v,
                    None => {
                        let b = W::from_ratio(self.rng.gen_range(0..=4), 2);
                        let mut name = "iso".to_string();
                        while g.index_of(&name).is_some() {
                            name.push('_');
                        }
                        g.add_node(&name, b)?
                    }
                };
                Ok(Instance::Baseline { v: g.id(v).clone(), g })
            }
            AxiomId::Cycle => {
                let g = self.graph::<W>(Family::Cycle, min, max)?;
                Ok(Instance::Cycle { g })
            }
        }
    }

    fn emitting_node<W: Scalar>(&mut self, g: &Graph<W>) -> usize {
        let emitting: Vec<usize> = (0..g.node_count())
            .filter(|&v| !g.out_neighbors(v).is_empty())
            .collect();
        match emitting.choose(&mut self.rng) {
            Some(&v) => v,
            None => self.rng.gen_range(0..g.node_count()),
        }
    }

    /// Out-regular pieces sharing one out-degree `x`, plus an optional part
    /// that only the measure's class constrains. The pair is drawn from the
    /// out-regular pieces, so every successor has out-degree `x`.
    fn nc_instance<W: Scalar>(
        &mut self,
        measure: &Measure,
        variant: NcVariant,
        min: usize,
        max: usize,
    ) -> Result<Instance<W>, AxiomError> {
        if variant == NcVariant::SemiOutRegular {
            let g = self.graph::<W>(Family::SemiOutRegular, min, max)?;
            let degrees = g.out_degrees();
            let n = g.node_count();
            let u = self.rng.gen_range(0..n);
            let partners: Vec<usize> = (0..n)
                .filter(|&w| w != u && near(&degrees[w], &degrees[u]))
                .collect();
            let w = *partners
                .choose(&mut self.rng)
                .ok_or_else(|| AxiomError::Generator("no partner with equal out-degree".into()))?;
            return Ok(Instance::NodeCombination { u: g.id(u).clone(), w: g.id(w).clone(), g });
        }
        if variant == NcVariant::Unconstrained {
            let g = self.class_graph::<W>(measure, min.max(2), max.max(2))?;
            let n = g.node_count();
            if n < 2 {
                return Err(AxiomError::Generator("need two nodes".into()));
            }
            let u = self.rng.gen_range(0..n);
            let mut w = self.rng.gen_range(0..n - 1);
            if w >= u {
                w += 1;
            }
            return Ok(Instance::NodeCombination { u: g.id(u).clone(), w: g.id(w).clone(), g });
        }
        let total = self.rng.gen_range(min.max(2)..=max.max(2));
        let extra = match measure {
            Measure::PageRank(_) | Measure::Katz(_) | Measure::Eigenvector => self.rng.gen_range(0..=total / 2),
            Measure::KatzPrestige => self.rng.gen_range(0..=total / 3),
        };
        let regular = (total - extra).max(2);
        let pieces = self.rng.gen_range(1..=2).min(regular / 2).max(1);
        let strongly = !matches!(measure, Measure::PageRank(_) | Measure::Katz(_)) || self.rng.gen_bool(0.5);
        let mut spec = self.spec(Family::OutRegular { strongly_connected: strongly }, 1, 1);
        let x: W = W::from_rational(match &spec.weights {
            WeightDist::Grid(v) => v.choose(&mut self.rng).expect("non-empty"),
            WeightDist::FloatRange(..) => unreachable!("grid weights"),
        });
        let mut g = Graph::<W>::new();
        let mut base_sizes = vec![regular / pieces; pieces];
        base_sizes[0] += regular % pieces;
        for (i, size) in base_sizes.iter().enumerate() {
            spec.min_nodes = *size;
            spec.max_nodes = *size;
            spec.seed = self.rng.gen();
            let piece: Graph<W> = generate(&spec)?;
            // Rescale to out-degree x.
            let d = piece.out_degree(0);
            let piece = piece.with_scaled_edges(&(x.clone() / d)).relabeled(|id| format!("r{i}{id}"))?;
            g = g.graph_sum(&piece)?;
        }
        let regular_nodes = g.node_count();
        if extra > 0 {
            let other: Graph<W> = match measure {
                Measure::PageRank(_) | Measure::Katz(_) => self.graph(Family::General, extra, extra)?,
                Measure::KatzPrestige => self.graph(Family::SumOfSccs { components: 1 }, extra, extra)?,
                Measure::Eigenvector => {
                    let piece: Graph<W> = self.graph(Family::StronglyConnected, extra, extra)?;
                    let lambda = principal_eigenvalue(&piece)?;
                    piece.with_scaled_edges(&W::from_f64(x.to_f64() / lambda).expect("finite"))
                }
            };
            let other = other.relabeled(|id| format!("o{id}"))?;
            g = g.graph_sum(&other)?;
            if matches!(measure, Measure::PageRank(_) | Measure::Katz(_)) {
                // Feed the out-regular part from the rest.
                for _ in 0..self.rng.gen_range(0..=extra) {
                    let s = self.rng.gen_range(regular_nodes..g.node_count());
                    let t = self.rng.gen_range(0..regular_nodes);
                    if !g.has_edge(s, t) {
                        let w: W = spec.weights_sample(&mut self.rng);
                        g.add_edge(s, t, w)?;
                    }
                }
            }
        }
        let u = self.rng.gen_range(0..regular_nodes);
        let mut w = self.rng.gen_range(0..regular_nodes - 1);
        if w >= u {
            w += 1;
        }
        Ok(Instance::NodeCombination { u: g.id(u).clone(), w: g.id(w).clone(), g })
    }
}

trait SampleWeight {
    fn weights_sample<W: Scalar>(&self, rng: &mut ChaCha8Rng) -> W;
}

impl SampleWeight for GeneratorSpec {
    fn weights_sample<W: Scalar>(&self, rng: &mut ChaCha8Rng) -> W {
        match &self.weights {
            WeightDist::Grid(v) => W::from_rational(v.choose(rng).expect("non-empty")),
            WeightDist::FloatRange(lo, hi) => W::from_f64(rng.gen_range(*lo..*hi)).expect("finite"),
        }
    }
}

/// Generates the instance for trial `trial` of a cell.
pub fn build_instance<W: Scalar>(
    axiom: AxiomId,
    measure: &Measure,
    config: &MatrixConfig,
    trial: u64,
) -> Result<Instance<W>, AxiomError> {
    let mut builder = Builder {
        rng: trial_rng(cell_seed(config.seed, measure, axiom), trial),
        config,
    };
    builder.instance(axiom, measure)
}

/// Runs one cell of the matrix in float mode.
pub fn run_cell(measure: &Measure, axiom: AxiomId, config: &MatrixConfig) -> Result<CellReport, AxiomError> {
    let mut report = CellReport {
        measure: *measure,
        axiom,
        status: CellStatus::Skipped,
        admissible: 0,
        skipped: 0,
        failures: 0,
        max_deviation: 0.0,
        witness: None,
    };
    let mut first_failure: Option<(Instance<f64>, u64)> = None;
    for trial in 0..config.max_attempts as u64 {
        if report.admissible >= config.trials {
            break;
        }
        let instance = match build_instance::<f64>(axiom, measure, config, trial) {
            Ok(i) => i,
            Err(AxiomError::Generator(_)) => continue,
            Err(e) => return Err(e),
        };
        let verdict = match check_axiom(axiom, measure, &instance, config.tolerance) {
            Ok(v) => v,
            Err(AxiomError::Precondition(_)) => continue,
            Err(e) => return Err(e),
        };
        if verdict.skipped() {
            report.skipped += 1;
            continue;
        }
        report.admissible += 1;
        report.max_deviation = report.max_deviation.max(verdict.max_deviation);
        if verdict.failed() {
            report.failures += 1;
            if first_failure.is_none() {
                first_failure = Some((instance, trial));
            }
        }
    }
    if report.admissible > 0 {
        report.status = if report.failures == 0 {
            CellStatus::Pass
        } else {
            CellStatus::Fail
        };
    }
    if let Some((instance, trial)) = first_failure {
        let small = shrink(axiom, measure, &instance, config.tolerance);
        let verdict = check_axiom(axiom, measure, &small, config.tolerance)?;
        debug_assert!(verdict.failed());
        report.witness = Some(Witness {
            instance: instance.describe(),
            shrunk: small.describe(),
            max_deviation: verdict.max_deviation,
            seed: trial,
        });
    }
    Ok(report)
}

/// Every (measure, axiom) cell, computed in parallel and reported in
/// measure-major order.
pub fn satisfaction_matrix(
    measures: &[Measure],
    axioms: &[AxiomId],
    config: &MatrixConfig,
) -> Result<MatrixReport, AxiomError> {
    let cells: Vec<(Measure, AxiomId)> = measures
        .iter()
        .flat_map(|m| axioms.iter().map(move |a| (*m, *a)))
        .collect();
    let results: Vec<Result<CellReport, AxiomError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .iter()
            .map(|(m, a)| scope.spawn(move || run_cell(m, *a, config)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("cell thread panicked"))
            .collect()
    });
    Ok(MatrixReport {
        config: config.clone(),
        cells: results.into_iter().collect::<Result<_, _>>()?,
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PositivityReport {
    pub graphs: usize,
    pub sources_checked: usize,
    pub positive_checked: usize,
    pub violations: Vec<String>,
}

/// Nodes without incoming edges must have `F = b(v)`; nodes with `b(v) > 0`
/// must have `F ≥ b(v) > 0`. Exact types compare exactly; floats use
/// `tolerance` relative to `b(v)`.
pub fn check_positivity_and_source<W: Scalar>(
    measure: &Measure,
    corpus: &[Graph<W>],
    tolerance: f64,
) -> Result<PositivityReport, AxiomError> {
    let mut report = PositivityReport::default();
    for (k, g) in corpus.iter().enumerate() {
        let cv = compute_measure(g, measure)?;
        report.graphs += 1;
        for v in 0..g.node_count() {
            let f = &cv.values[v];
            let b = g.node_weight(v);
            if g.in_neighbors(v).is_empty() {
                report.sources_checked += 1;
                let ok = if W::EXACT { f == b } else { f.near(b, tolerance) };
                if !ok {
                    report.violations.push(format!(
                        "graph {k}: source {} has value {} but weight {}",
                        g.id(v),
                        f.to_text(),
                        b.to_text()
                    ));
                }
            }
            if b.gt_zero() {
                report.positive_checked += 1;
                let slack = if W::EXACT { W::zero() } else { W::from_f64(tolerance).unwrap_or_else(W::zero) * b.clone() };
                if !f.gt_zero() || f.clone() + slack < b.clone() {
                    report.violations.push(format!(
                        "graph {k}: node {} has weight {} but value {}",
                        g.id(v),
                        b.to_text(),
                        f.to_text()
                    ));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_graph_as;
    use crate::graph::FloatGraph;

    fn unit_cycle() -> FloatGraph {
        parse_graph_as(
            "node a 0.1\nnode b 0.2\nnode c 0.3\nnode d 0.4\n\
             edge a b 1\nedge b c 1\nedge c d 1\nedge d a 1\n",
        )
        .unwrap()
    }

    #[test]
    fn cycle_axiom_on_four_cycle() {
        let inst = Instance::Cycle { g: unit_cycle() };
        let kp = check_axiom(AxiomId::Cycle, &Measure::KatzPrestige, &inst, 1e-8).unwrap();
        assert!(kp.passed && kp.max_deviation < 1e-15);
        let pr = check_axiom(AxiomId::Cycle, &Measure::PageRank(0.85), &inst, 1e-8).unwrap();
        assert!(pr.failed());
    }

    #[test]
    fn baseline_on_isolated_node() {
        let mut g = unit_cycle();
        g.add_node("iso", 0.7).unwrap();
        let inst = Instance::Baseline { g, v: NodeId::new("iso").unwrap() };
        let v = check_axiom(AxiomId::Baseline, &Measure::PageRank(0.5), &inst, 1e-8).unwrap();
        assert!(v.passed);
        let v = check_axiom(AxiomId::Baseline, &Measure::KatzPrestige, &inst, 1e-8).unwrap();
        assert!(v.skipped());
        let bad = Instance::Baseline { g: unit_cycle(), v: NodeId::new("a").unwrap() };
        assert!(matches!(
            check_axiom(AxiomId::Baseline, &Measure::PageRank(0.5), &bad, 1e-8),
            Err(AxiomError::Precondition(_))
        ));
    }

    #[test]
    fn nc_hypothesis_is_enforced() {
        let g: FloatGraph = parse_graph_as("node u 1\nnode w 1\nnode t 0\nedge u t 1\nedge w t 2\nedge t u 1").unwrap();
        let inst = Instance::NodeCombination {
            g,
            u: NodeId::new("u").unwrap(),
            w: NodeId::new("w").unwrap(),
        };
        let plain = AxiomId::NodeCombination(NcVariant::Plain);
        assert!(matches!(
            check_axiom(plain, &Measure::PageRank(0.5), &inst, 1e-8),
            Err(AxiomError::Precondition(_))
        ));
        let any = AxiomId::NodeCombination(NcVariant::Unconstrained);
        let v = check_axiom(any, &Measure::Katz(0.2), &inst, 1e-8).unwrap();
        assert!(v.passed, "{v:?}");
    }

    #[test]
    fn em_witness_for_katz_shrinks() {
        let g: FloatGraph = parse_graph_as(
            "node a 1\nnode b 1\nnode c 1\nnode d 0\nedge a b 1\nedge b c 1\nedge c a 1\nedge d a 1\n",
        )
        .unwrap();
        let inst = Instance::EdgeMultiplication { g, u: NodeId::new("a").unwrap(), x: 2.0 };
        let m = Measure::Katz(0.1);
        assert!(check_axiom(AxiomId::EdgeMultiplication, &m, &inst, 1e-8).unwrap().failed());
        let small = shrink(AxiomId::EdgeMultiplication, &m, &inst, 1e-8);
        assert!(small.graph().node_count() <= 2);
        assert!(check_axiom(AxiomId::EdgeMultiplication, &m, &small, 1e-8).unwrap().failed());
    }

    #[test]
    fn builders_produce_valid_instances() {
        let config = MatrixConfig::default();
        for m in default_measures() {
            for a in AxiomId::ALL {
                let mut ok = 0;
                for t in 0..20 {
                    if let Ok(inst) = build_instance::<f64>(a, &m, &config, t) {
                        assert!(inst.matches(a));
                        if check_axiom(a, &m, &inst, 1e-8).is_ok() {
                            ok += 1;
                        }
                    }
                }
                assert!(ok > 10, "{m} {a}: {ok}");
            }
        }
    }

    #[test]
    fn reference_pattern_rows() {
        let passes = |m: Measure| {
            AxiomId::ALL
                .iter()
                .filter(|a| reference_pattern(&m, **a) == Some(CellStatus::Pass))
                .count()
        };
        for m in default_measures() {
            assert_eq!(passes(m), 5, "{m}");
        }
    }
}
