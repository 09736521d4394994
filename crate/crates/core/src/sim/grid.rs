use crate::network::{EdgeId, EdgePosition, NetworkTopology, NodeId};

use super::{Result, SimError};

/// Fraction of the tightest per-edge CFL bound used as the global step.
pub const CFL_SAFETY: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeGrid {
    pub cells: usize,
    pub dx: f64,
    /// Current update: `i = decay * i - drive * (v[k+1] - v[k])`.
    pub(crate) decay: f64,
    pub(crate) drive: f64,
    /// Interior voltage update: `v += gain * (i[k-1] - i[k])`.
    pub(crate) gain: f64,
}

/// A voltage point of the grid: a network node or an interior cell boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    Node(NodeId),
    Interior { edge: EdgeId, index: usize },
}

/// A position moved onto the nearest cell boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapped {
    pub site: Site,
    pub position: EdgePosition,
    /// How far the requested position moved, metres.
    pub distance: f64,
}

/// Per-edge cell grids and the global time step for one network.
#[derive(Debug, Clone)]
pub struct DiscretizedNetwork {
    net: NetworkTopology,
    grids: Vec<EdgeGrid>,
    node_capacitance: Vec<f64>,
    dt: f64,
    target_dx: f64,
    longest_one_way: f64,
}

/// Splits every edge into cells no longer than `target_dx` and picks the
/// largest stable global step.
pub fn discretize(net: &NetworkTopology, target_dx: f64) -> Result<DiscretizedNetwork> {
    let shortest = net.edges().iter().map(|e| e.length).fold(f64::INFINITY, f64::min);
    if !(target_dx > 0.0 && target_dx.is_finite()) {
        return Err(SimError::InvalidResolution(format!("target dx must be positive, got {target_dx}")));
    }
    if target_dx > shortest * (1.0 + 1e-12) {
        return Err(SimError::InvalidResolution(format!(
            "target dx {target_dx} m exceeds the shortest edge ({shortest} m)"
        )));
    }
    let mut cells = Vec::with_capacity(net.edges().len());
    let mut dt = f64::INFINITY;
    for e in net.edges() {
        let ratio = e.length / target_dx;
        let n = if (ratio - ratio.round()).abs() < 1e-9 {
            ratio.round()
        } else {
            ratio.ceil()
        }
        .max(1.0) as usize;
        let dx = e.length / n as f64;
        dt = dt.min(dx / e.params.propagation_speed());
        cells.push((n, dx));
    }
    let dt = CFL_SAFETY * dt;

    let grids = net
        .edges()
        .iter()
        .zip(&cells)
        .map(|(e, &(n, dx))| {
            let l = e.params.inductance_per_m;
            let r = e.params.resistance_per_m;
            let c = e.params.capacitance_per_m;
            let denom = l / dt + r / 2.0;
            EdgeGrid {
                cells: n,
                dx,
                decay: (l / dt - r / 2.0) / denom,
                drive: 1.0 / (dx * denom),
                gain: dt / (c * dx),
            }
        })
        .collect::<Vec<_>>();

    let mut node_capacitance = vec![0.0; net.node_count()];
    for (e, g) in net.edges().iter().zip(&grids) {
        let half = e.params.capacitance_per_m * g.dx / 2.0;
        node_capacitance[e.endpoints.0 .0] += half;
        node_capacitance[e.endpoints.1 .0] += half;
    }

    Ok(DiscretizedNetwork {
        longest_one_way: net.longest_one_way_time(),
        net: net.clone(),
        grids,
        node_capacitance,
        dt,
        target_dx,
    })
}

impl DiscretizedNetwork {
    pub fn network(&self) -> &NetworkTopology {
        &self.net
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn target_dx(&self) -> f64 {
        self.target_dx
    }

    pub fn grid(&self, edge: EdgeId) -> &EdgeGrid {
        &self.grids[edge.0]
    }

    pub fn grids(&self) -> &[EdgeGrid] {
        &self.grids
    }

    pub fn total_cells(&self) -> usize {
        self.grids.iter().map(|g| g.cells).sum()
    }

    pub(crate) fn node_capacitance(&self, node: NodeId) -> f64 {
        self.node_capacitance[node.0]
    }

    pub fn longest_one_way_time(&self) -> f64 {
        self.longest_one_way
    }

    /// Default fault record window: 20 longest one-way travel times.
    pub fn default_record_window(&self) -> f64 {
        20.0 * self.longest_one_way
    }

    /// Extra steps appended after a back-injected drive: 5 longest round trips.
    pub fn injection_tail_steps(&self) -> usize {
        (5.0 * 2.0 * self.longest_one_way / self.dt).ceil() as usize
    }

    /// Site for cell boundary `index` of `edge`; the two ends map to nodes.
    pub fn site(&self, edge: EdgeId, index: usize) -> Site {
        let g = &self.grids[edge.0];
        let e = self.net.edge(edge);
        match index {
            0 => Site::Node(e.endpoints.0),
            i if i >= g.cells => Site::Node(e.endpoints.1),
            i => Site::Interior { edge, index: i },
        }
    }

    /// Moves `pos` to the nearest cell boundary of its edge.
    pub fn snap(&self, pos: &EdgePosition) -> Result<Snapped> {
        let Some(edge) = self.net.edges().get(pos.edge.0) else {
            return Err(SimError::InvalidPosition(format!("unknown edge #{}", pos.edge.0)));
        };
        if !(pos.offset >= -1e-9 && pos.offset <= edge.length + 1e-9) {
            return Err(SimError::InvalidPosition(format!(
                "offset {} m outside edge {} (0..{} m)",
                pos.offset, edge.label, edge.length
            )));
        }
        let g = &self.grids[pos.edge.0];
        let index = ((pos.offset / g.dx).round() as usize).min(g.cells);
        let offset = if index == g.cells { edge.length } else { index as f64 * g.dx };
        let distance = (offset - pos.offset).abs();
        if distance > 1e-6 * g.dx {
            log::warn!(
                "position {} m on edge {} snapped to {} m",
                pos.offset,
                edge.label,
                offset
            );
        }
        Ok(Snapped {
            site: self.site(pos.edge, index),
            position: EdgePosition {
                edge: pos.edge,
                offset,
            },
            distance,
        })
    }
}
