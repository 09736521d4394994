//! Undirected multigraphs, Fleury's Euler-path construction and the
//! decomposition of a connected graph with `2k` odd nodes into exactly `k`
//! edge-disjoint paths.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("edge {edge} references node {node}, graph has {count} nodes")]
    NodeOutOfRange { edge: usize, node: usize, count: usize },
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has no edges")]
    Empty,
    #[error("no Euler path: graph has {0} odd nodes")]
    NotSemiEulerian(usize),
    #[error("node {0} cannot start an Euler path here")]
    BadStart(usize),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

/// Nodes `0..node_count`, edges addressed by their index. Parallel edges are
/// allowed, self-loops are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
}

impl MultiGraph {
    pub fn new(node_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut incident = vec![Vec::new(); node_count];
        for (i, &(a, b)) in edges.iter().enumerate() {
            for n in [a, b] {
                if n >= node_count {
                    return Err(GraphError::NodeOutOfRange {
                        edge: i,
                        node: n,
                        count: node_count,
                    });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(i));
            }
            incident[a].push(i);
            incident[b].push(i);
        }
        Ok(MultiGraph {
            node_count,
            edges: edges.to_vec(),
            incident,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn incident(&self, node: usize) -> &[usize] {
        &self.incident[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.incident[node].len()
    }

    /// Edge multiplicity matrix; the 0/1 adjacency matrix generalised to
    /// parallel edges. Row sums are node degrees.
    pub fn adjacency_counts(&self) -> Vec<Vec<u32>> {
        let mut m = vec![vec![0u32; self.node_count]; self.node_count];
        for &(a, b) in &self.edges {
            m[a][b] += 1;
            m[b][a] += 1;
        }
        m
    }

    /// Every node reachable from node 0. A single node counts as connected.
    pub fn is_connected(&self) -> bool {
        if self.node_count == 0 {
            return true;
        }
        let all = vec![true; self.edges.len()];
        let seen = reach(&self.incident, &self.edges, &all, 0, None);
        seen.iter().all(|&s| s)
    }
}

/// Alternating node/edge sequence `v0 e0 v1 e1 ... vq`. Nodes may repeat,
/// edges may not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    nodes: Vec<usize>,
    edges: Vec<usize>,
}

impl Path {
    pub fn new(nodes: Vec<usize>, edges: Vec<usize>) -> Result<Self> {
        if edges.is_empty() || nodes.len() != edges.len() + 1 {
            return Err(GraphError::InvalidPath(format!(
                "{} nodes for {} edges",
                nodes.len(),
                edges.len()
            )));
        }
        let mut sorted = edges.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(GraphError::InvalidPath("edge used twice".into()));
        }
        Ok(Path { nodes, edges })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn start(&self) -> usize {
        self.nodes[0]
    }

    pub fn end(&self) -> usize {
        *self.nodes.last().unwrap()
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    /// Every edge joins the nodes on either side of it in the sequence.
    pub fn is_linked_in(&self, g: &MultiGraph) -> bool {
        self.edges.iter().enumerate().all(|(k, &e)| {
            let Some(&(a, b)) = g.edges().get(e) else {
                return false;
            };
            let (x, y) = (self.nodes[k], self.nodes[k + 1]);
            (a == x && b == y) || (a == y && b == x)
        })
    }
}

/// Edge-disjoint paths covering every edge of a graph exactly once, with the
/// minimal path count `max(1, odd_nodes / 2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDecomposition {
    paths: Vec<Path>,
}

impl PathDecomposition {
    pub fn new(g: &MultiGraph, paths: Vec<Path>) -> Result<Self> {
        let mut uses = vec![0usize; g.edge_count()];
        for (i, p) in paths.iter().enumerate() {
            if !p.is_linked_in(g) {
                return Err(GraphError::InvalidDecomposition(format!(
                    "path {i} is not a walk in the graph"
                )));
            }
            for &e in p.edges() {
                uses[e] += 1;
            }
        }
        if let Some(e) = uses.iter().position(|&u| u != 1) {
            return Err(GraphError::InvalidDecomposition(format!(
                "edge {e} covered {} times",
                uses[e]
            )));
        }
        let expected = minimal_path_count(g);
        if paths.len() != expected {
            return Err(GraphError::InvalidDecomposition(format!(
                "{} paths, minimum is {expected}",
                paths.len()
            )));
        }
        Ok(PathDecomposition { paths })
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// One line per path, nodes separated by spaces.
    pub fn to_text(&self, label: impl Fn(usize) -> String) -> String {
        let mut out = String::new();
        for p in &self.paths {
            let labels: Vec<String> = p.nodes().iter().map(|&n| label(n)).collect();
            writeln!(out, "{}", labels.join(" ")).unwrap();
        }
        out
    }
}

/// `max(1, odd / 2)` for a connected graph with at least one edge.
pub fn minimal_path_count(g: &MultiGraph) -> usize {
    (odd_nodes(g).len() / 2).max(1)
}

/// Nodes of odd degree, ascending. The count is always even.
pub fn odd_nodes(g: &MultiGraph) -> Vec<usize> {
    (0..g.node_count()).filter(|&v| g.degree(v) % 2 == 1).collect()
}

/// Whether deleting edge `e` disconnects its endpoints.
pub fn is_bridge(g: &MultiGraph, e: usize) -> Result<bool> {
    if e >= g.edge_count() {
        return Err(GraphError::UnknownEdge(e));
    }
    let alive = vec![true; g.edge_count()];
    Ok(bridge_in(&g.incident, &g.edges, &alive, e))
}

/// Euler path (or circuit) from `start` using Fleury's rule: never cross a
/// bridge of the remaining graph while another edge is available.
pub fn fleury_euler_path(g: &MultiGraph, start: usize) -> Result<Path> {
    if g.edge_count() == 0 {
        return Err(GraphError::Empty);
    }
    if start >= g.node_count() {
        return Err(GraphError::BadStart(start));
    }
    let odd = odd_nodes(g);
    match odd.len() {
        0 => {
            if g.degree(start) == 0 {
                return Err(GraphError::BadStart(start));
            }
        }
        2 => {
            if !odd.contains(&start) {
                return Err(GraphError::BadStart(start));
            }
        }
        n => return Err(GraphError::NotSemiEulerian(n)),
    }
    if !edges_connected(g) {
        return Err(GraphError::Disconnected);
    }
    let mut work = Work::new(g, &[]);
    let (nodes, edges) = work.walk(start, false);
    Path::new(nodes, edges)
}

/// Decomposes `g` with a seeded generator; identical seeds give identical
/// output.
pub fn decompose_with_seed(g: &MultiGraph, seed: u64) -> Result<PathDecomposition> {
    decompose_into_paths(g, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Splits a connected graph into the minimal number of edge-disjoint paths.
///
/// Repeatedly strips a path joining two odd nodes of a residual component.
/// The stripped path is the prefix of a Fleury walk over the component
/// augmented with virtual edges that pair up its other odd nodes, cut at the
/// first virtual edge. That choice guarantees every remaining component with
/// edges still has odd nodes, so no component ever needs an extra closed
/// path. Components left with exactly two odd nodes are finished with one
/// Fleury walk, and an Eulerian input becomes a single closed path.
pub fn decompose_into_paths<R: Rng + ?Sized>(g: &MultiGraph, rng: &mut R) -> Result<PathDecomposition> {
    if g.edge_count() == 0 {
        return Err(GraphError::Empty);
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let mut alive = vec![true; g.edge_count()];
    let mut paths = Vec::new();

    while let Some(seed_edge) = alive.iter().position(|&a| a) {
        let comp = component_edges(g, &alive, g.edges[seed_edge].0);
        let mut degree = vec![0usize; g.node_count()];
        for &e in &comp {
            let (a, b) = g.edges[e];
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut odd: Vec<usize> = (0..g.node_count()).filter(|&v| degree[v] % 2 == 1).collect();

        let sub: Vec<(usize, usize)> = comp.iter().map(|&e| g.edges[e]).collect();
        let (start, virtual_pairs) = if odd.is_empty() {
            let touched: Vec<usize> = (0..g.node_count()).filter(|&v| degree[v] > 0).collect();
            (*touched.choose(rng).unwrap(), Vec::new())
        } else {
            odd.shuffle(rng);
            let start = odd[0];
            // odd[1] stays unpaired and becomes the far end of the walk
            let pairs: Vec<(usize, usize)> = odd[2..].chunks(2).map(|c| (c[0], c[1])).collect();
            (start, pairs)
        };

        let sub_graph = MultiGraph::new(g.node_count(), &sub).expect("subgraph of a valid graph");
        let mut work = Work::new(&sub_graph, &virtual_pairs);
        let (nodes, local_edges) = work.walk(start, true);
        let edges: Vec<usize> = local_edges.iter().map(|&le| comp[le]).collect();
        for &e in &edges {
            alive[e] = false;
        }
        paths.push(Path::new(nodes, edges)?);
    }
    PathDecomposition::new(g, paths)
}

/// Residual multigraph used by the walks; edges past `real` are virtual.
struct Work {
    ends: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
    alive: Vec<bool>,
    real: usize,
}

impl Work {
    fn new(g: &MultiGraph, virtual_pairs: &[(usize, usize)]) -> Self {
        let mut ends = g.edges.clone();
        let mut incident = g.incident.clone();
        for &(a, b) in virtual_pairs {
            let id = ends.len();
            ends.push((a, b));
            incident[a].push(id);
            incident[b].push(id);
        }
        let alive = vec![true; ends.len()];
        Work {
            ends,
            incident,
            alive,
            real: g.edge_count(),
        }
    }

    /// Fleury walk from `start`. With `stop_at_virtual` the walk ends just
    /// before the first virtual edge it would cross.
    fn walk(&mut self, start: usize, stop_at_virtual: bool) -> (Vec<usize>, Vec<usize>) {
        let mut nodes = vec![start];
        let mut edges = Vec::new();
        let mut at = start;
        loop {
            let candidates: Vec<usize> = self.incident[at]
                .iter()
                .copied()
                .filter(|&e| self.alive[e])
                .collect();
            let Some(&first) = candidates.first() else {
                break;
            };
            let next = if candidates.len() == 1 {
                first
            } else {
                candidates
                    .iter()
                    .copied()
                    .find(|&e| !bridge_in(&self.incident, &self.ends, &self.alive, e))
                    .unwrap_or(first)
            };
            if stop_at_virtual && next >= self.real {
                break;
            }
            self.alive[next] = false;
            let (a, b) = self.ends[next];
            at = if a == at { b } else { a };
            nodes.push(at);
            edges.push(next);
        }
        (nodes, edges)
    }
}

fn reach(
    incident: &[Vec<usize>],
    ends: &[(usize, usize)],
    alive: &[bool],
    from: usize,
    skip: Option<usize>,
) -> Vec<bool> {
    let mut seen = vec![false; incident.len()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(u) = queue.pop_front() {
        for &e in &incident[u] {
            if !alive[e] || Some(e) == skip {
                continue;
            }
            let (a, b) = ends[e];
            let v = if a == u { b } else { a };
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

fn bridge_in(incident: &[Vec<usize>], ends: &[(usize, usize)], alive: &[bool], e: usize) -> bool {
    let (a, b) = ends[e];
    !reach(incident, ends, alive, a, Some(e))[b]
}

fn component_edges(g: &MultiGraph, alive: &[bool], from: usize) -> Vec<usize> {
    let seen = reach(&g.incident, &g.edges, alive, from, None);
    (0..g.edge_count())
        .filter(|&e| alive[e] && seen[g.edges[e].0])
        .collect()
}

/// All edges lie in one connected component (isolated nodes allowed).
fn edges_connected(g: &MultiGraph) -> bool {
    let alive = vec![true; g.edge_count()];
    let from = g.edges[0].0;
    let seen = reach(&g.incident, &g.edges, &alive, from, None);
    g.edges.iter().all(|&(a, _)| seen[a])
}
