//! Auditor for non-adaptive two-probe bit schemes.
//!
//! Viewing cells as graph nodes and queries as edges labelled by the
//! boolean function they compute over the two bits read, any scheme with
//! fewer cells than queries exhibits one of a handful of refutable shapes:
//! a constant query, three parallel edges, a hub of copy edges, or a short
//! single-type cycle. Each shape comes with a query set that the
//! adversarial input distribution turns into a concrete wrong answer.

use crate::adversary::realize_subset;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::tsum::TsumInstance;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::collections::BTreeSet;

/// Instance-to-bits preprocessing map handed to [`empirical_refute`].
pub type PreprocessingMap<'a> = &'a dyn Fn(&TsumInstance) -> Result<Vec<bool>>;

/// Truth table of a two-bit boolean function; entry `2*b_u + b_v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruthTable(u8);

impl TruthTable {
    pub const fn raw(bits: u8) -> Self {
        TruthTable(bits & 0xf)
    }

    pub fn new(bits: u8) -> Self {
        Self::raw(bits)
    }

    pub fn from_outputs(f00: bool, f01: bool, f10: bool, f11: bool) -> Self {
        let mut v = 0u8;
        for (i, b) in [f00, f01, f10, f11].into_iter().enumerate() {
            if b {
                v |= 1 << i;
            }
        }
        TruthTable(v)
    }

    pub fn eval(&self, b_u: bool, b_v: bool) -> bool {
        let idx = (b_u as u8) * 2 + b_v as u8;
        self.0 >> idx & 1 == 1
    }

    fn ones(&self) -> u32 {
        self.0.count_ones()
    }

    /// All sixteen tables.
    pub fn all() -> impl Iterator<Item = TruthTable> {
        (0u8..16).map(TruthTable)
    }
}

impl Serialize for TruthTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let text: String = (0..4).map(|i| if self.0 >> i & 1 == 1 { '1' } else { '0' }).collect();
        s.serialize_str(&text)
    }
}

impl<'de> Deserialize<'de> for TruthTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        if text.len() != 4 || !text.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(D::Error::custom("truth table must be 4 bits, e.g. \"0110\""));
        }
        let mut v = 0u8;
        for (i, b) in text.bytes().enumerate() {
            if b == b'1' {
                v |= 1 << i;
            }
        }
        Ok(TruthTable(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FunctionType {
    Const,
    Copy,
    And,
    Xor,
}

/// Partition of the sixteen two-bit functions: 2 constant, 4 copy, 8
/// and-like (one odd output), 2 xor-like.
pub fn classify_truth_table(t: TruthTable) -> FunctionType {
    match t.ones() {
        0 | 4 => FunctionType::Const,
        1 | 3 => FunctionType::And,
        _ => {
            let b = [t.eval(false, false), t.eval(false, true), t.eval(true, false), t.eval(true, true)];
            if (b[0] == b[1] && b[2] == b[3]) || (b[0] == b[2] && b[1] == b[3]) {
                FunctionType::Copy
            } else {
                FunctionType::Xor
            }
        }
    }
}

/// One query's probe pair and output function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryProbes {
    pub u: usize,
    pub v: usize,
    pub table: TruthTable,
}

/// A non-adaptive scheme with T = 2 and w = 1: per group element, two cell
/// indices and a truth table over the bits read.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoProbeScheme {
    pub cells: usize,
    pub group: GroupSpec,
    pub queries: Vec<QueryProbes>,
}

impl TwoProbeScheme {
    pub fn new(cells: usize, group: GroupSpec, queries: Vec<QueryProbes>) -> Result<Self> {
        let scheme = TwoProbeScheme { cells, group, queries };
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn validate(&self) -> Result<()> {
        let order = self.group.order_u64().ok_or_else(|| {
            Error::ParameterOverflow("scheme group too large to enumerate".into())
        })?;
        if self.queries.len() as u64 != order {
            return Err(Error::InvalidParameters(format!(
                "scheme must define all {} queries, got {}",
                order,
                self.queries.len()
            )));
        }
        for (g, q) in self.queries.iter().enumerate() {
            if q.u >= self.cells || q.v >= self.cells {
                return Err(Error::OutOfBoundsProbe {
                    index: q.u.max(q.v),
                    cells: self.cells,
                });
            }
            let _ = g;
        }
        Ok(())
    }

    pub fn probes_for(&self, q: &GroupElement) -> Result<QueryProbes> {
        let idx = q
            .to_u64()
            .and_then(|g| usize::try_from(g).ok())
            .filter(|&g| g < self.queries.len())
            .ok_or_else(|| Error::InvalidElement { id: q.id().clone(), order: self.group.order() })?;
        Ok(self.queries[idx])
    }

    /// Evaluate one query against explicit memory contents.
    pub fn answer(&self, bits: &[bool], q: &GroupElement) -> Result<bool> {
        if bits.len() != self.cells {
            return Err(Error::InvalidParameters(format!(
                "memory has {} bits, scheme declares {} cells",
                bits.len(),
                self.cells
            )));
        }
        let p = self.probes_for(q)?;
        Ok(p.table.eval(bits[p.u], bits[p.v]))
    }

    /// The trivial scheme: one cell per group element, each query copying
    /// its own cell. The honest preprocessing stores the sumset bitmap.
    pub fn trivial_bitmap(group: GroupSpec) -> Result<Self> {
        let order = group.order_u64().ok_or_else(|| {
            Error::ParameterOverflow("scheme group too large to enumerate".into())
        })?;
        let copy_u = TruthTable::from_outputs(false, false, true, true);
        let queries = (0..order)
            .map(|g| QueryProbes { u: g as usize, v: g as usize, table: copy_u })
            .collect();
        TwoProbeScheme::new(order as usize, group, queries)
    }

    /// Memory the trivial scheme expects: bit `g` set iff `g` is a sum.
    pub fn bitmap_preprocessing(instance: &TsumInstance) -> Result<Vec<bool>> {
        let order = instance.group.order_u64().ok_or_else(|| {
            Error::ParameterOverflow("group too large to enumerate".into())
        })?;
        let sumset = instance.sumset()?;
        Ok((0..order).map(|g| sumset.contains(&GroupElement::from_u64(g))).collect())
    }
}

// ---------------------------------------------------------------------------
// Multigraphs and girth
// ---------------------------------------------------------------------------

/// Undirected multigraph; parallel edges and self-loops allowed.
#[derive(Debug, Clone)]
pub struct MultiGraph {
    nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl MultiGraph {
    pub fn new(nodes: usize) -> Self {
        MultiGraph { nodes, edges: Vec::new() }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.nodes && v < self.nodes);
        self.edges.push((u, v));
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.nodes];
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            adj[u].push((v, id));
            if u != v {
                adj[v].push((u, id));
            }
        }
        adj
    }

    /// Length of the shortest cycle: 1 for a self-loop, 2 for parallel
    /// edges, BFS otherwise. None for forests.
    pub fn girth(&self) -> Option<usize> {
        self.shortest_cycle().map(|c| c.len())
    }

    /// Edge ids of one shortest cycle. For every edge, finds the shortest
    /// path between its endpoints that avoids the edge itself.
    pub fn shortest_cycle(&self) -> Option<Vec<usize>> {
        if let Some(id) = self.edges.iter().position(|&(u, v)| u == v) {
            return Some(vec![id]);
        }
        let adj = self.adjacency();
        let mut best: Option<Vec<usize>> = None;
        for (skip, &(src, dst)) in self.edges.iter().enumerate() {
            // BFS from src to dst avoiding edge `skip`.
            let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.nodes];
            let mut dist = vec![usize::MAX; self.nodes];
            let mut queue = std::collections::VecDeque::new();
            dist[src] = 0;
            queue.push_back(src);
            'bfs: while let Some(x) = queue.pop_front() {
                if let Some(b) = &best {
                    if dist[x] + 1 >= b.len() {
                        break;
                    }
                }
                for &(y, id) in &adj[x] {
                    if id == skip || dist[y] != usize::MAX {
                        continue;
                    }
                    dist[y] = dist[x] + 1;
                    parent[y] = Some((x, id));
                    if y == dst {
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
            if dist[dst] != usize::MAX {
                let mut cycle = vec![skip];
                let mut cur = dst;
                while let Some((prev, id)) = parent[cur] {
                    cycle.push(id);
                    cur = prev;
                }
                if best.as_ref().is_none_or(|b| cycle.len() < b.len()) {
                    best = Some(cycle);
                }
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GirthBound {
    /// Largest girth consistent with `nodes >= 2 (d-2)^(r/2 - 2)`.
    Bounded(u64),
    /// Average degree between 2 and 3: the inequality never bites.
    Vacuous,
}

/// Analytic girth ceiling from the node count and average degree.
pub fn analytic_girth_bound(nodes: usize, edges: usize) -> Result<GirthBound> {
    if nodes == 0 || 2 * edges <= 2 * nodes {
        return Err(Error::DegreeTooSmall { edges, nodes });
    }
    let d = 2.0 * edges as f64 / nodes as f64;
    if d <= 3.0 {
        return Ok(GirthBound::Vacuous);
    }
    let r = 2.0 * ((nodes as f64 / 2.0).ln() / (d - 2.0).ln() + 2.0);
    Ok(GirthBound::Bounded(r.floor().max(0.0) as u64))
}

#[derive(Debug, Clone, Serialize)]
pub struct GirthReport {
    pub nodes: usize,
    pub edges: usize,
    pub bfs_girth: Option<usize>,
    pub analytic: Option<GirthBound>,
    /// BFS girth stays within the analytic ceiling whenever it applies.
    pub consistent: bool,
}

pub fn girth_bound_check(graph: &MultiGraph) -> GirthReport {
    let bfs = graph.girth();
    let analytic = analytic_girth_bound(graph.nodes(), graph.num_edges()).ok();
    let consistent = match (bfs, analytic) {
        (Some(g), Some(GirthBound::Bounded(r))) => g as u64 <= r,
        _ => true,
    };
    GirthReport { nodes: graph.nodes(), edges: graph.num_edges(), bfs_girth: bfs, analytic, consistent }
}

/// Cells-as-nodes, queries-as-edges view of a scheme.
pub fn query_graph(scheme: &TwoProbeScheme) -> MultiGraph {
    let mut g = MultiGraph::new(scheme.cells);
    for q in &scheme.queries {
        g.add_edge(q.u, q.v);
    }
    g
}

// ---------------------------------------------------------------------------
// Refutation search
// ---------------------------------------------------------------------------

/// A shape that dooms the scheme, carrying the query set to hand to the
/// adversarial distribution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RefutationWitness {
    /// Answer ignores memory entirely.
    ConstantQuery { query: GroupElement },
    /// Three queries on one cell pair: three independent bits from two.
    ParallelTriple { cells: (usize, usize), queries: [GroupElement; 3] },
    /// Two copy queries effectively reading one cell.
    CopyHub { cell: usize, queries: [GroupElement; 2] },
    /// Short cycle of and-like queries; fixing one output pins two bits.
    AndCycle { queries: Vec<GroupElement>, fixing_output: bool },
    /// Short cycle of xor-like queries; answers satisfy a parity identity.
    XorCycle { queries: Vec<GroupElement> },
    NotRefuted,
}

impl RefutationWitness {
    pub fn queries(&self) -> Vec<GroupElement> {
        match self {
            RefutationWitness::ConstantQuery { query } => vec![query.clone()],
            RefutationWitness::ParallelTriple { queries, .. } => queries.to_vec(),
            RefutationWitness::CopyHub { queries, .. } => queries.to_vec(),
            RefutationWitness::AndCycle { queries, .. } => queries.clone(),
            RefutationWitness::XorCycle { queries } => queries.clone(),
            RefutationWitness::NotRefuted => Vec::new(),
        }
    }
}

/// Effective behavior of one query once self-loops are collapsed.
enum Effective {
    Constant,
    CopyOf(usize),
    Edge(FunctionType),
}

fn effective_type(q: &QueryProbes) -> Effective {
    if q.u == q.v {
        // Only the diagonal of the table is reachable.
        let d0 = q.table.eval(false, false);
        let d1 = q.table.eval(true, true);
        if d0 == d1 {
            Effective::Constant
        } else {
            Effective::CopyOf(q.u)
        }
    } else {
        match classify_truth_table(q.table) {
            FunctionType::Const => Effective::Constant,
            FunctionType::Copy => {
                let t = q.table;
                // Depends on u iff fixing u fixes the output.
                if t.eval(false, false) == t.eval(false, true) {
                    Effective::CopyOf(q.u)
                } else {
                    Effective::CopyOf(q.v)
                }
            }
            other => Effective::Edge(other),
        }
    }
}

/// Search the scheme for a refutable shape, in the order the case analysis
/// treats them: constants, parallel triples, copy hubs, then short cycles
/// of a single type.
pub fn find_refutation_witness(scheme: &TwoProbeScheme, _n_param: usize) -> Result<RefutationWitness> {
    scheme.validate()?;
    let element = |g: usize| GroupElement::from_u64(g as u64);

    for (g, q) in scheme.queries.iter().enumerate() {
        if matches!(effective_type(q), Effective::Constant) {
            return Ok(RefutationWitness::ConstantQuery { query: element(g) });
        }
    }

    let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (g, q) in scheme.queries.iter().enumerate() {
        let key = (q.u.min(q.v), q.u.max(q.v));
        by_pair.entry(key).or_default().push(g);
    }
    for (&cells, members) in &by_pair {
        if members.len() >= 3 {
            return Ok(RefutationWitness::ParallelTriple {
                cells,
                queries: [element(members[0]), element(members[1]), element(members[2])],
            });
        }
    }

    let mut hubs: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (g, q) in scheme.queries.iter().enumerate() {
        if let Effective::CopyOf(cell) = effective_type(q) {
            hubs.entry(cell).or_default().push(g);
        }
    }
    for (&cell, members) in &hubs {
        if members.len() >= 2 {
            return Ok(RefutationWitness::CopyHub {
                cell,
                queries: [element(members[0]), element(members[1])],
            });
        }
    }

    for wanted in [FunctionType::And, FunctionType::Xor] {
        let mut graph = MultiGraph::new(scheme.cells);
        let mut edge_to_query = Vec::new();
        for (g, q) in scheme.queries.iter().enumerate() {
            if q.u != q.v && matches!(effective_type(q), Effective::Edge(t) if t == wanted) {
                graph.add_edge(q.u, q.v);
                edge_to_query.push(g);
            }
        }
        if let Some(cycle) = graph.shortest_cycle() {
            let queries: Vec<GroupElement> =
                cycle.iter().map(|&e| element(edge_to_query[e])).collect();
            return Ok(match wanted {
                FunctionType::And => {
                    let first = &scheme.queries[edge_to_query[cycle[0]]];
                    RefutationWitness::AndCycle {
                        queries,
                        fixing_output: first.table.ones() == 1,
                    }
                }
                _ => RefutationWitness::XorCycle { queries },
            });
        }
    }

    Ok(RefutationWitness::NotRefuted)
}

// ---------------------------------------------------------------------------
// Empirical refutation
// ---------------------------------------------------------------------------

/// A concrete instance on which the scheme must answer some query wrongly.
#[derive(Debug, Clone, Serialize)]
pub struct RefutationExample {
    /// Which subset of the witness queries the instance realizes.
    pub subset_mask: u64,
    pub instance: TsumInstance,
    /// A query the all-zeros (or supplied) memory gets wrong.
    pub failing_query: GroupElement,
    pub expected: bool,
    pub got: bool,
}

#[derive(Debug)]
pub enum RefuteOutcome {
    Refuted(Box<RefutationExample>),
    /// Every subset admitted a consistent memory. On a refuted verdict this
    /// indicates an auditor bug.
    Consistent,
}

impl RefuteOutcome {
    pub fn is_refuted(&self) -> bool {
        matches!(self, RefuteOutcome::Refuted(_))
    }
}

/// Enumerate all subsets `P` of the witness queries, realize each, and
/// hunt for an instance the scheme cannot answer.
///
/// With a preprocessing map, the map's memory is played against every
/// realization. Without one, the search is universal: it reports the first
/// realization for which no assignment of the probed cells answers all
/// witness queries correctly, so any preprocessing whatsoever fails there.
pub fn empirical_refute(
    scheme: &TwoProbeScheme,
    n_param: usize,
    witness_queries: &[GroupElement],
    preprocessing: Option<PreprocessingMap<'_>>,
) -> Result<RefuteOutcome> {
    scheme.validate()?;
    let k = witness_queries.len();
    if k == 0 || k >= 32 {
        return Err(Error::InvalidParameters("witness query set must have 1..=31 elements".into()));
    }
    let n = n_param.max(k);
    let relevant: Vec<usize> = {
        let mut cells = BTreeSet::new();
        for q in witness_queries {
            let p = scheme.probes_for(q)?;
            cells.insert(p.u);
            cells.insert(p.v);
        }
        cells.into_iter().collect()
    };

    for mask in 0u64..(1 << k) {
        let subset: BTreeSet<GroupElement> = witness_queries
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, q)| q.clone())
            .collect();
        let realization = realize_subset(&scheme.group, witness_queries, &subset, n)?;
        let instance = realization.into_instance(scheme.group.clone())?;

        match preprocessing {
            Some(map) => {
                let bits = map(&instance)?;
                for (i, q) in witness_queries.iter().enumerate() {
                    let expected = mask >> i & 1 == 1;
                    let got = scheme.answer(&bits, q)?;
                    if got != expected {
                        return Ok(RefuteOutcome::Refuted(Box::new(RefutationExample {
                            subset_mask: mask,
                            instance,
                            failing_query: q.clone(),
                            expected,
                            got,
                        })));
                    }
                }
            }
            None => {
                // Only the probed cells matter; exhaust their assignments.
                let mut some_assignment_works = false;
                'assignments: for assignment in 0u64..(1 << relevant.len()) {
                    let mut bits = vec![false; scheme.cells];
                    for (bit, &cell) in relevant.iter().enumerate() {
                        bits[cell] = assignment >> bit & 1 == 1;
                    }
                    for (i, q) in witness_queries.iter().enumerate() {
                        let expected = mask >> i & 1 == 1;
                        if scheme.answer(&bits, q)? != expected {
                            continue 'assignments;
                        }
                    }
                    some_assignment_works = true;
                    break;
                }
                if !some_assignment_works {
                    let zeros = vec![false; scheme.cells];
                    let (mut failing, mut expected, mut got) = (witness_queries[0].clone(), false, false);
                    for (i, q) in witness_queries.iter().enumerate() {
                        let e = mask >> i & 1 == 1;
                        let g = scheme.answer(&zeros, q)?;
                        if g != e {
                            failing = q.clone();
                            expected = e;
                            got = g;
                            break;
                        }
                    }
                    return Ok(RefuteOutcome::Refuted(Box::new(RefutationExample {
                        subset_mask: mask,
                        instance,
                        failing_query: failing,
                        expected,
                        got,
                    })));
                }
            }
        }
    }
    Ok(RefuteOutcome::Consistent)
}
