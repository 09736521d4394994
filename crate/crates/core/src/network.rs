//! Branched line network: topology, per-unit-length parameters, terminations,
//! the power-frequency source and the text config format.
//!
//! Config grammar (one directive per line, `#` starts a comment):
//!
//! ```text
//! params <name> L=<H/m> C=<F/m> R=<ohm/m>
//! node <id>
//! edge <id> <nodeA> <nodeB> length=<value><m|km> params=<name>
//! termination <node> R=<ohm>
//! source <node> amplitude=<V> frequency=<Hz> series_R=<ohm>
//! observe <node>
//! path <node> <node> [<node> ...]        # optional, pins the search paths
//! ```
//!
//! `params` must precede the edges that use it; nodes may be declared in any
//! order relative to edges.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::graph::{self, MultiGraph, Path, PathDecomposition};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("disconnected graph")]
    Disconnected,
    #[error("degree-1 node `{0}` has no termination")]
    MissingTermination(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("edge `{0}` is a self-loop")]
    SelfLoop(String),
    #[error("invalid line parameters: {0}")]
    InvalidParams(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("position {position} m is outside [0, {length}] m")]
    OutOfRange { position: f64, length: f64 },
    #[error("pinned paths are not a minimal decomposition: {0}")]
    InvalidPaths(String),
}

pub type Result<T, E = NetworkError> = std::result::Result<T, E>;

/// Per-unit-length series inductance, shunt capacitance and series resistance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineParams {
    pub inductance_per_m: f64,
    pub capacitance_per_m: f64,
    pub resistance_per_m: f64,
}

impl LineParams {
    /// 1.60 uH/m, 10.54 pF/m, 0.036 mOhm/m.
    pub const OVERHEAD: LineParams = LineParams {
        inductance_per_m: 1.60e-6,
        capacitance_per_m: 10.54e-12,
        resistance_per_m: 0.036e-3,
    };

    /// 0.583 uH/m, 201 pF/m, 0.008 Ohm/m.
    pub const CABLE: LineParams = LineParams {
        inductance_per_m: 0.583e-6,
        capacitance_per_m: 201e-12,
        resistance_per_m: 0.008,
    };

    pub fn new(inductance_per_m: f64, capacitance_per_m: f64, resistance_per_m: f64) -> Result<Self> {
        let p = LineParams {
            inductance_per_m,
            capacitance_per_m,
            resistance_per_m,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inductance_per_m > 0.0 && self.inductance_per_m.is_finite()) {
            return Err(NetworkError::InvalidParams(format!(
                "inductance must be positive, got {}",
                self.inductance_per_m
            )));
        }
        if !(self.capacitance_per_m > 0.0 && self.capacitance_per_m.is_finite()) {
            return Err(NetworkError::InvalidParams(format!(
                "capacitance must be positive, got {}",
                self.capacitance_per_m
            )));
        }
        if !(self.resistance_per_m >= 0.0 && self.resistance_per_m.is_finite()) {
            return Err(NetworkError::InvalidParams(format!(
                "resistance must be non-negative, got {}",
                self.resistance_per_m
            )));
        }
        Ok(())
    }

    /// Same line with the series resistance removed.
    pub fn lossless(self) -> Self {
        LineParams {
            resistance_per_m: 0.0,
            ..self
        }
    }

    pub fn characteristic_impedance(&self) -> f64 {
        characteristic_impedance(self)
    }

    pub fn propagation_speed(&self) -> f64 {
        propagation_speed(self)
    }
}

/// Lossless surge impedance `sqrt(L/C)` in ohms.
pub fn characteristic_impedance(params: &LineParams) -> f64 {
    (params.inductance_per_m / params.capacitance_per_m).sqrt()
}

/// Lossless wave speed `1/sqrt(LC)` in m/s.
pub fn propagation_speed(params: &LineParams) -> f64 {
    1.0 / (params.inductance_per_m * params.capacitance_per_m).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub label: String,
    pub endpoints: (NodeId, NodeId),
    /// Metres.
    pub length: f64,
    pub params: LineParams,
    pub params_name: String,
}

/// Resistive load to ground at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Termination {
    pub node: NodeId,
    pub impedance: f64,
}

/// Sinusoidal EMF `amplitude * sin(2 pi f t + phase)` behind a series resistance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub node: NodeId,
    pub amplitude: f64,
    pub frequency: f64,
    pub series_resistance: f64,
}

/// A point on the network: `offset` metres from the edge's first endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePosition {
    pub edge: EdgeId,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTopology {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    terminations: Vec<Termination>,
    source: SourceSpec,
    observation: NodeId,
    param_sets: Vec<(String, LineParams)>,
    pinned_paths: Option<Vec<Vec<NodeId>>>,
}

impl NetworkTopology {
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_label(&self, id: NodeId) -> &str {
        &self.nodes[id.0]
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n == label).map(NodeId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn edge_id(&self, label: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.label == label).map(EdgeId)
    }

    pub fn terminations(&self) -> &[Termination] {
        &self.terminations
    }

    pub fn termination_at(&self, node: NodeId) -> Option<&Termination> {
        self.terminations.iter().find(|t| t.node == node)
    }

    pub fn source(&self) -> &SourceSpec {
        &self.source
    }

    pub fn observation_node(&self) -> NodeId {
        self.observation
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.edges
            .iter()
            .map(|e| (e.endpoints.0 == node) as usize + (e.endpoints.1 == node) as usize)
            .sum()
    }

    /// Graph view with node and edge indices matching this topology.
    pub fn graph(&self) -> MultiGraph {
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|e| (e.endpoints.0 .0, e.endpoints.1 .0))
            .collect();
        MultiGraph::new(self.nodes.len(), &edges).expect("topology invariants exclude self-loops")
    }

    /// Edge multiplicity matrix: entry (i, j) counts edges between nodes i and j.
    pub fn adjacency_counts(&self) -> Vec<Vec<u32>> {
        self.graph().adjacency_counts()
    }

    /// Search paths pinned in the config, converted to a validated decomposition.
    pub fn pinned_decomposition(&self) -> Option<PathDecomposition> {
        let pinned = self.pinned_paths.as_ref()?;
        Some(
            pinned_to_decomposition(&self.graph(), pinned)
                .expect("pinned paths are validated at construction"),
        )
    }

    pub fn path_length(&self, path: &Path) -> f64 {
        path.edges().iter().map(|&e| self.edges[e].length).sum()
    }

    /// Converts a 1-D coordinate along `path` to a physical position.
    ///
    /// The returned offset is always measured from the edge's first endpoint,
    /// so a path that traverses an edge backwards yields `length - d` for a
    /// distance `d` travelled along that edge.
    pub fn path_to_edge_position(&self, path: &Path, s: f64) -> Result<EdgePosition> {
        let total = self.path_length(path);
        if !(s >= 0.0 && s <= total) {
            return Err(NetworkError::OutOfRange {
                position: s,
                length: total,
            });
        }
        let mut start = 0.0;
        let last = path.edges().len() - 1;
        for (k, &e) in path.edges().iter().enumerate() {
            let edge = &self.edges[e];
            let end = start + edge.length;
            if s <= end || k == last {
                let along = (s - start).clamp(0.0, edge.length);
                let forward = edge.endpoints.0 .0 == path.nodes()[k];
                let offset = if forward { along } else { edge.length - along };
                return Ok(EdgePosition {
                    edge: EdgeId(e),
                    offset,
                });
            }
            start = end;
        }
        unreachable!("paths have at least one edge")
    }

    /// Inverse of [`path_to_edge_position`](Self::path_to_edge_position) for
    /// an edge on the path; `None` if the edge is not on it.
    pub fn edge_position_to_path(&self, path: &Path, pos: &EdgePosition) -> Option<f64> {
        let mut start = 0.0;
        for (k, &e) in path.edges().iter().enumerate() {
            let edge = &self.edges[e];
            if e == pos.edge.0 {
                let forward = edge.endpoints.0 .0 == path.nodes()[k];
                let along = if forward {
                    pos.offset
                } else {
                    edge.length - pos.offset
                };
                return Some(start + along);
            }
            start += edge.length;
        }
        None
    }

    /// Shortest distances (metres) from `from` to every node.
    pub fn node_distances(&self, from: NodeId) -> Vec<f64> {
        self.dijkstra(from, |e| e.length)
    }

    /// Shortest travel times (seconds) from `from` to every node.
    pub fn node_travel_times(&self, from: NodeId) -> Vec<f64> {
        self.dijkstra(from, |e| e.length / e.params.propagation_speed())
    }

    /// Largest shortest-path travel time between any two nodes.
    pub fn longest_one_way_time(&self) -> f64 {
        (0..self.nodes.len())
            .flat_map(|n| self.node_travel_times(NodeId(n)))
            .fold(0.0, f64::max)
    }

    /// Travel time from a point on an edge to a node.
    pub fn travel_time_to_node(&self, pos: &EdgePosition, node: NodeId) -> f64 {
        let edge = &self.edges[pos.edge.0];
        let c = edge.params.propagation_speed();
        let times = self.node_travel_times(node);
        let via_a = times[edge.endpoints.0 .0] + pos.offset / c;
        let via_b = times[edge.endpoints.1 .0] + (edge.length - pos.offset) / c;
        via_a.min(via_b)
    }

    /// Along-the-network distance between two positions.
    pub fn distance(&self, a: &EdgePosition, b: &EdgePosition) -> f64 {
        let ea = &self.edges[a.edge.0];
        let eb = &self.edges[b.edge.0];
        let mut best = f64::INFINITY;
        if a.edge == b.edge {
            best = (a.offset - b.offset).abs();
        }
        let ends_a = [
            (ea.endpoints.0, a.offset),
            (ea.endpoints.1, ea.length - a.offset),
        ];
        let ends_b = [
            (eb.endpoints.0, b.offset),
            (eb.endpoints.1, eb.length - b.offset),
        ];
        for (na, da) in ends_a {
            let dist = self.node_distances(na);
            for (nb, db) in ends_b {
                best = best.min(da + dist[nb.0] + db);
            }
        }
        best
    }

    /// Position of a node expressed on one of its incident edges.
    pub fn node_position(&self, node: NodeId) -> Option<EdgePosition> {
        self.edges.iter().enumerate().find_map(|(i, e)| {
            if e.endpoints.0 == node {
                Some(EdgePosition {
                    edge: EdgeId(i),
                    offset: 0.0,
                })
            } else if e.endpoints.1 == node {
                Some(EdgePosition {
                    edge: EdgeId(i),
                    offset: e.length,
                })
            } else {
                None
            }
        })
    }

    pub fn describe_position(&self, pos: &EdgePosition) -> String {
        let e = &self.edges[pos.edge.0];
        format!(
            "edge {} ({}-{}) at {} m from node {}",
            e.label,
            self.nodes[e.endpoints.0 .0],
            self.nodes[e.endpoints.1 .0],
            fmt_num(pos.offset),
            self.nodes[e.endpoints.0 .0]
        )
    }

    pub fn path_labels(&self, path: &Path) -> Vec<&str> {
        path.nodes().iter().map(|&n| self.nodes[n].as_str()).collect()
    }

    /// Serializes to the config format; `parse_network` of the output
    /// reproduces `self`.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for (name, p) in &self.param_sets {
            writeln!(
                out,
                "params {} L={} C={} R={}",
                name, p.inductance_per_m, p.capacitance_per_m, p.resistance_per_m
            )
            .unwrap();
        }
        for n in &self.nodes {
            writeln!(out, "node {n}").unwrap();
        }
        for e in &self.edges {
            writeln!(
                out,
                "edge {} {} {} length={}m params={}",
                e.label,
                self.nodes[e.endpoints.0 .0],
                self.nodes[e.endpoints.1 .0],
                e.length,
                e.params_name
            )
            .unwrap();
        }
        for t in &self.terminations {
            writeln!(out, "termination {} R={}", self.nodes[t.node.0], t.impedance).unwrap();
        }
        let s = &self.source;
        writeln!(
            out,
            "source {} amplitude={} frequency={} series_R={}",
            self.nodes[s.node.0], s.amplitude, s.frequency, s.series_resistance
        )
        .unwrap();
        writeln!(out, "observe {}", self.nodes[self.observation.0]).unwrap();
        if let Some(paths) = &self.pinned_paths {
            for p in paths {
                let labels: Vec<&str> = p.iter().map(|n| self.nodes[n.0].as_str()).collect();
                writeln!(out, "path {}", labels.join(" ")).unwrap();
            }
        }
        out
    }

    fn dijkstra(&self, from: NodeId, weight: impl Fn(&Edge) -> f64) -> Vec<f64> {
        let n = self.nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        dist[from.0] = 0.0;
        // O(n^2) is plenty for networks of tens of nodes.
        for _ in 0..n {
            let Some(u) = (0..n)
                .filter(|&i| !done[i] && dist[i].is_finite())
                .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            else {
                break;
            };
            done[u] = true;
            for e in &self.edges {
                let (a, b) = (e.endpoints.0 .0, e.endpoints.1 .0);
                let other = if a == u {
                    b
                } else if b == u {
                    a
                } else {
                    continue;
                };
                let d = dist[u] + weight(e);
                if d < dist[other] {
                    dist[other] = d;
                }
            }
        }
        dist
    }
}

impl fmt::Display for EdgePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "edge #{} @ {} m", self.edge.0, fmt_num(self.offset))
    }
}

fn fmt_num(x: f64) -> String {
    if (x - x.round()).abs() < 1e-9 {
        format!("{}", x.round())
    } else {
        format!("{x:.3}")
    }
}

/// Builder used by the parser and by tests that assemble networks in code.
#[derive(Debug, Default, Clone)]
pub struct NetworkBuilder {
    nodes: Vec<String>,
    edges: Vec<(String, String, String, f64, String)>,
    params: Vec<(String, LineParams)>,
    terminations: Vec<(String, f64)>,
    source: Option<(String, f64, f64, f64)>,
    observe: Option<String>,
    paths: Vec<Vec<String>>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn params(mut self, name: &str, params: LineParams) -> Self {
        self.params.push((name.to_string(), params));
        self
    }

    pub fn node(mut self, id: &str) -> Self {
        self.nodes.push(id.to_string());
        self
    }

    /// Adds an edge; `length` in metres. Endpoints are declared implicitly.
    pub fn edge(mut self, id: &str, a: &str, b: &str, length: f64, params: &str) -> Self {
        for n in [a, b] {
            if !self.nodes.iter().any(|x| x == n) {
                self.nodes.push(n.to_string());
            }
        }
        self.edges
            .push((id.to_string(), a.to_string(), b.to_string(), length, params.to_string()));
        self
    }

    pub fn termination(mut self, node: &str, impedance: f64) -> Self {
        self.terminations.push((node.to_string(), impedance));
        self
    }

    pub fn source(mut self, node: &str, amplitude: f64, frequency: f64, series_resistance: f64) -> Self {
        self.source = Some((node.to_string(), amplitude, frequency, series_resistance));
        self
    }

    pub fn observe(mut self, node: &str) -> Self {
        self.observe = Some(node.to_string());
        self
    }

    pub fn path(mut self, nodes: &[&str]) -> Self {
        self.paths.push(nodes.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn build(self) -> Result<NetworkTopology> {
        let mut node_index: HashMap<&str, usize> = HashMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if node_index.insert(n.as_str(), i).is_some() {
                return Err(NetworkError::InvalidValue(format!("duplicate node `{n}`")));
            }
        }
        let lookup = |label: &str| -> Result<NodeId> {
            node_index
                .get(label)
                .map(|&i| NodeId(i))
                .ok_or_else(|| NetworkError::UnknownNode(label.to_string()))
        };

        let mut param_map: BTreeMap<&str, LineParams> = BTreeMap::new();
        for (name, p) in &self.params {
            p.validate()?;
            param_map.insert(name.as_str(), *p);
        }

        let mut edges = Vec::with_capacity(self.edges.len());
        let mut edge_labels: HashMap<&str, ()> = HashMap::new();
        for (id, a, b, length, pname) in &self.edges {
            if edge_labels.insert(id.as_str(), ()).is_some() {
                return Err(NetworkError::InvalidValue(format!("duplicate edge `{id}`")));
            }
            let na = lookup(a)?;
            let nb = lookup(b)?;
            if na == nb {
                return Err(NetworkError::SelfLoop(id.clone()));
            }
            if !(*length > 0.0 && length.is_finite()) {
                return Err(NetworkError::InvalidValue(format!(
                    "edge `{id}` length must be positive"
                )));
            }
            let params = *param_map.get(pname.as_str()).ok_or_else(|| {
                NetworkError::InvalidValue(format!("edge `{id}` uses unknown params `{pname}`"))
            })?;
            edges.push(Edge {
                label: id.clone(),
                endpoints: (na, nb),
                length: *length,
                params,
                params_name: pname.clone(),
            });
        }

        let mut terminations: Vec<Termination> = Vec::new();
        for (node, z) in &self.terminations {
            let id = lookup(node)?;
            if !(*z > 0.0 && z.is_finite()) {
                return Err(NetworkError::InvalidValue(format!(
                    "termination at `{node}` must have positive impedance"
                )));
            }
            if terminations.iter().any(|t| t.node == id) {
                return Err(NetworkError::InvalidValue(format!(
                    "duplicate termination at `{node}`"
                )));
            }
            terminations.push(Termination {
                node: id,
                impedance: *z,
            });
        }

        let (snode, amplitude, frequency, series) = self
            .source
            .clone()
            .ok_or_else(|| NetworkError::InvalidValue("missing `source` directive".into()))?;
        let source_node = lookup(&snode)?;
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(NetworkError::InvalidValue("source amplitude must be >= 0".into()));
        }
        if !(frequency > 0.0 && frequency.is_finite()) {
            return Err(NetworkError::InvalidValue("source frequency must be > 0".into()));
        }
        if !(series > 0.0 && series.is_finite()) {
            return Err(NetworkError::InvalidValue("source series_R must be > 0".into()));
        }
        let observe = self
            .observe
            .clone()
            .ok_or_else(|| NetworkError::InvalidValue("missing `observe` directive".into()))?;
        let observation = lookup(&observe)?;

        let graph_edges: Vec<(usize, usize)> = edges
            .iter()
            .map(|e| (e.endpoints.0 .0, e.endpoints.1 .0))
            .collect();
        if edges.is_empty() {
            return Err(NetworkError::Disconnected);
        }
        let g = MultiGraph::new(self.nodes.len(), &graph_edges)
            .map_err(|e| NetworkError::InvalidValue(e.to_string()))?;
        if !g.is_connected() {
            return Err(NetworkError::Disconnected);
        }
        for (i, label) in self.nodes.iter().enumerate() {
            if g.degree(i) == 1 && !terminations.iter().any(|t| t.node.0 == i) {
                return Err(NetworkError::MissingTermination(label.clone()));
            }
        }

        let pinned_paths = if self.paths.is_empty() {
            None
        } else {
            let mut paths = Vec::new();
            for p in &self.paths {
                paths.push(p.iter().map(|l| lookup(l)).collect::<Result<Vec<_>>>()?);
            }
            pinned_to_decomposition(&g, &paths)?;
            Some(paths)
        };

        Ok(NetworkTopology {
            nodes: self.nodes,
            edges,
            terminations,
            source: SourceSpec {
                node: source_node,
                amplitude,
                frequency,
                series_resistance: series,
            },
            observation,
            param_sets: self.params,
            pinned_paths,
        })
    }
}

fn pinned_to_decomposition(g: &MultiGraph, paths: &[Vec<NodeId>]) -> Result<PathDecomposition> {
    let mut used = vec![false; g.edge_count()];
    let mut out = Vec::new();
    for p in paths {
        if p.len() < 2 {
            return Err(NetworkError::InvalidPaths("a path needs at least two nodes".into()));
        }
        let mut edges = Vec::new();
        for w in p.windows(2) {
            let (a, b) = (w[0].0, w[1].0);
            let e = g
                .edges()
                .iter()
                .enumerate()
                .find(|(i, &(x, y))| !used[*i] && ((x == a && y == b) || (x == b && y == a)))
                .map(|(i, _)| i)
                .ok_or_else(|| {
                    NetworkError::InvalidPaths(format!("no unused edge between nodes #{a} and #{b}"))
                })?;
            used[e] = true;
            edges.push(e);
        }
        let nodes = p.iter().map(|n| n.0).collect();
        out.push(Path::new(nodes, edges).map_err(|e| NetworkError::InvalidPaths(e.to_string()))?);
    }
    PathDecomposition::new(g, out).map_err(|e| NetworkError::InvalidPaths(e.to_string()))
}

/// Parses the network config format documented at module level.
pub fn parse_network(text: &str) -> Result<NetworkTopology> {
    let mut b = NetworkBuilder::new();
    let mut declared_params: Vec<String> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let tokens = tokenize(content);
        let Some(&(kw_col, kw)) = tokens.first() else {
            continue;
        };
        let syntax = |column: usize, message: String| NetworkError::Syntax {
            line: line_no,
            column,
            message,
        };
        let args = &tokens[1..];
        let positional = |idx: usize, what: &str| -> Result<(usize, &str)> {
            match args.get(idx) {
                Some(&(c, t)) if !t.contains('=') => Ok((c, t)),
                Some(&(c, _)) => Err(syntax(c, format!("expected {what}"))),
                None => Err(syntax(content.trim_end().len() + 1, format!("missing {what}"))),
            }
        };
        let keyed = |from: usize, keys: &[&str]| -> Result<HashMap<String, (usize, String)>> {
            let mut map = HashMap::new();
            for &(c, t) in &args[from..] {
                let Some((k, v)) = t.split_once('=') else {
                    return Err(syntax(c, format!("expected key=value, found `{t}`")));
                };
                if !keys.contains(&k) {
                    return Err(syntax(c, format!("unknown key `{k}`")));
                }
                if map.insert(k.to_string(), (c + k.len() + 1, v.to_string())).is_some() {
                    return Err(syntax(c, format!("duplicate key `{k}`")));
                }
            }
            for k in keys {
                if !map.contains_key(*k) {
                    return Err(syntax(kw_col, format!("`{kw}` requires `{k}=`")));
                }
            }
            Ok(map)
        };
        let number = |(c, v): &(usize, String)| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| syntax(*c, format!("invalid number `{v}`")))
        };

        match kw {
            "params" => {
                let (_, name) = positional(0, "parameter set name")?;
                let kv = keyed(1, &["L", "C", "R"])?;
                let p = LineParams {
                    inductance_per_m: number(&kv["L"])?,
                    capacitance_per_m: number(&kv["C"])?,
                    resistance_per_m: number(&kv["R"])?,
                };
                p.validate().map_err(|e| syntax(kw_col, e.to_string()))?;
                declared_params.push(name.to_string());
                b = b.params(name, p);
            }
            "node" => {
                let (_, id) = positional(0, "node id")?;
                if args.len() > 1 {
                    return Err(syntax(args[1].0, "unexpected token".into()));
                }
                if b.nodes.iter().any(|n| n == id) {
                    return Err(syntax(args[0].0, format!("duplicate node `{id}`")));
                }
                b = b.node(id);
            }
            "edge" => {
                let (_, id) = positional(0, "edge id")?;
                let (_, na) = positional(1, "first node")?;
                let (_, nb) = positional(2, "second node")?;
                let kv = keyed(3, &["length", "params"])?;
                let (lc, lv) = &kv["length"];
                let length = parse_length(lv).map_err(|m| syntax(*lc, m))?;
                let (pc, pname) = &kv["params"];
                if !declared_params.iter().any(|p| p == pname) {
                    return Err(syntax(*pc, format!("unknown params `{pname}`")));
                }
                b.edges
                    .push((id.to_string(), na.to_string(), nb.to_string(), length, pname.clone()));
            }
            "termination" => {
                let (_, node) = positional(0, "node id")?;
                let kv = keyed(1, &["R"])?;
                b = b.termination(node, number(&kv["R"])?);
            }
            "source" => {
                let (_, node) = positional(0, "node id")?;
                let kv = keyed(1, &["amplitude", "frequency", "series_R"])?;
                if b.source.is_some() {
                    return Err(syntax(kw_col, "only one source is supported".into()));
                }
                b = b.source(
                    node,
                    number(&kv["amplitude"])?,
                    number(&kv["frequency"])?,
                    number(&kv["series_R"])?,
                );
            }
            "observe" => {
                let (_, node) = positional(0, "node id")?;
                if b.observe.is_some() {
                    return Err(syntax(kw_col, "only one observation node is supported".into()));
                }
                b = b.observe(node);
            }
            "path" => {
                if args.len() < 2 {
                    return Err(syntax(kw_col, "a path needs at least two nodes".into()));
                }
                let mut nodes = Vec::new();
                for i in 0..args.len() {
                    nodes.push(positional(i, "node id")?.1.to_string());
                }
                b.paths.push(nodes);
            }
            other => return Err(syntax(kw_col, format!("unknown directive `{other}`"))),
        }
    }
    // Edges may reference nodes declared later in the file, so node lookup
    // happens in `build`.
    b.build()
}

fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_length(v: &str) -> std::result::Result<f64, String> {
    let (num, scale) = if let Some(n) = v.strip_suffix("km") {
        (n, 1000.0)
    } else if let Some(n) = v.strip_suffix('m') {
        (n, 1.0)
    } else {
        return Err(format!("length `{v}` needs a unit suffix (m or km)"));
    };
    let x: f64 = num
        .parse()
        .map_err(|_| format!("invalid length `{v}`"))?;
    Ok(x * scale)
}

/// Builds a graph for `node_labels` order; used by the decompose tooling.
pub fn decomposition_labels(net: &NetworkTopology, d: &PathDecomposition) -> Vec<Vec<String>> {
    d.paths()
        .iter()
        .map(|p| net.path_labels(p).into_iter().map(String::from).collect())
        .collect()
}

/// Odd-degree node labels of the network graph.
pub fn odd_node_labels(net: &NetworkTopology) -> Vec<String> {
    graph::odd_nodes(&net.graph())
        .into_iter()
        .map(|n| net.nodes[n].clone())
        .collect()
}
