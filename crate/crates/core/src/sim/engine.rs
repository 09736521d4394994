//! Leapfrog time stepping of the lumped-cell line network.
//!
//! Voltages live on cell boundaries (network nodes included), currents on
//! cell centres half a step later. Series resistance is averaged over the
//! half steps; lumped conductances and shunts are implicit so an ideal short
//! is just the infinite-conductance limit.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::network::{EdgeId, NodeId};

use super::grid::{DiscretizedNetwork, Site};
use super::steady::steady_state;
use super::{Result, SimError};

#[derive(Debug, Clone)]
struct Shunt {
    site: Site,
    /// `None` is an ideal short.
    conductance: Option<f64>,
    current: f64,
}

#[derive(Debug, Clone)]
struct NodeTable {
    /// `(edge, true)` when the node is the edge's first endpoint.
    ends: Vec<(usize, bool)>,
    cap_over_dt: f64,
    conductance: f64,
}

/// One transient run over a shared [`DiscretizedNetwork`].
#[derive(Debug, Clone)]
pub struct Simulation<'a> {
    dnet: &'a DiscretizedNetwork,
    /// Per edge, `cells + 1` boundary voltages; both ends mirror node voltages.
    v: Vec<Vec<f64>>,
    /// Per edge, `cells` currents flowing from the first endpoint to the second.
    i: Vec<Vec<f64>>,
    node_v: Vec<f64>,
    nodes: Vec<NodeTable>,
    shunts: Vec<Shunt>,
    ac: Option<(f64, f64, f64)>,
    drive: Option<Vec<f64>>,
    drive_node: Option<(NodeId, f64)>,
    step: usize,
}

impl<'a> Simulation<'a> {
    /// Zero initial state with the source EMF switched off; its series
    /// resistance stays connected to ground.
    pub fn new(dnet: &'a DiscretizedNetwork) -> Self {
        let net = dnet.network();
        let mut nodes: Vec<NodeTable> = (0..net.node_count())
            .map(|n| NodeTable {
                ends: Vec::new(),
                cap_over_dt: dnet.node_capacitance(NodeId(n)) / dnet.dt(),
                conductance: 0.0,
            })
            .collect();
        for (k, e) in net.edges().iter().enumerate() {
            nodes[e.endpoints.0 .0].ends.push((k, true));
            nodes[e.endpoints.1 .0].ends.push((k, false));
        }
        for t in net.terminations() {
            nodes[t.node.0].conductance += 1.0 / t.impedance;
        }
        let src = net.source();
        nodes[src.node.0].conductance += 1.0 / src.series_resistance;

        let v = dnet.grids().iter().map(|g| vec![0.0; g.cells + 1]).collect();
        let i = dnet.grids().iter().map(|g| vec![0.0; g.cells]).collect();
        Simulation {
            dnet,
            v,
            i,
            node_v: vec![0.0; net.node_count()],
            nodes,
            shunts: Vec::new(),
            ac: None,
            drive: None,
            drive_node: None,
            step: 0,
        }
    }

    /// Switches the source on and loads the sinusoidal steady state in which
    /// the source node's voltage is `A sin(w t + phase)`, `t = 0` being the
    /// current step. The EMF behind the series resistance is scaled and
    /// shifted to achieve that.
    pub fn with_ac_steady_state(mut self, phase_deg: f64) -> Self {
        let src = *self.dnet.network().source();
        let omega = 2.0 * PI * src.frequency;
        let unit = steady_state(self.dnet, omega, Complex64::new(1.0, 0.0));
        let at_node = unit.node_phasor[src.node.0];
        let emf = Complex64::from_polar(src.amplitude, phase_deg.to_radians()) / at_node;
        self.ac = Some((emf.norm(), omega, emf.arg()));
        let st = steady_state(self.dnet, omega, emf);
        self.v = st.v;
        self.i = st.i;
        self.node_v = st.node_v;
        self
    }

    /// Drives `samples` as an EMF behind the termination at `node`, one
    /// sample per step, zero afterwards.
    pub fn with_drive(mut self, node: NodeId, samples: Vec<f64>) -> Result<Self> {
        let term = self
            .dnet
            .network()
            .termination_at(node)
            .ok_or_else(|| SimError::NoTermination(self.dnet.network().node_label(node).to_string()))?;
        self.drive_node = Some((node, 1.0 / term.impedance));
        self.drive = Some(samples);
        Ok(self)
    }

    /// Connects a resistance to ground at `site`; zero ohms is an ideal
    /// short. Returns the shunt's index for [`shunt_current`](Self::shunt_current).
    pub fn add_shunt(&mut self, site: Site, resistance: f64) -> usize {
        let conductance = (resistance > 0.0).then(|| 1.0 / resistance);
        if let (Site::Node(n), Some(g)) = (site, conductance) {
            self.nodes[n.0].conductance += g;
        }
        self.shunts.push(Shunt {
            site,
            conductance,
            current: 0.0,
        });
        self.shunts.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.dnet.dt()
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn voltage(&self, site: Site) -> f64 {
        match site {
            Site::Node(n) => self.node_v[n.0],
            Site::Interior { edge, index } => self.v[edge.0][index],
        }
    }

    /// Current from `site` to ground through the shunt, at the latest step.
    pub fn shunt_current(&self, shunt: usize) -> f64 {
        self.shunts[shunt].current
    }

    /// Current flowing along `edge` in cell `cell`, first endpoint to second.
    pub fn edge_current(&self, edge: EdgeId, cell: usize) -> f64 {
        self.i[edge.0][cell]
    }

    /// Advances one time step.
    pub fn step(&mut self) {
        let n_next = self.step + 1;
        let t_next = n_next as f64 * self.dnet.dt();

        for ((g, v), i) in self.dnet.grids().iter().zip(&self.v).zip(&mut self.i) {
            let (decay, drive) = (g.decay, g.drive);
            for ((ik, va), vb) in i.iter_mut().zip(&v[..g.cells]).zip(&v[1..]) {
                *ik = decay * *ik - drive * (vb - va);
            }
        }
        for ((g, v), i) in self.dnet.grids().iter().zip(&mut self.v).zip(&self.i) {
            if g.cells < 2 {
                continue;
            }
            let gain = g.gain;
            let interior = &mut v[1..g.cells];
            for ((vk, il), ir) in interior.iter_mut().zip(&i[..g.cells - 1]).zip(&i[1..]) {
                *vk += gain * (il - ir);
            }
        }
        for s in &mut self.shunts {
            if let Site::Interior { edge, index } = s.site {
                let gain = self.dnet.grid(edge).gain;
                let pre = self.v[edge.0][index];
                match s.conductance {
                    Some(cond) => {
                        let v = pre / (1.0 + gain * cond);
                        self.v[edge.0][index] = v;
                        s.current = cond * v;
                    }
                    None => {
                        self.v[edge.0][index] = 0.0;
                        s.current = pre / gain;
                    }
                }
            }
        }

        let src_node = self.dnet.network().source().node;
        let ac_emf = self
            .ac
            .map(|(a, w, ph)| a * (w * t_next + ph).sin())
            .unwrap_or(0.0);
        let drive_emf = self
            .drive
            .as_ref()
            .map(|d| d.get(self.step).copied().unwrap_or(0.0))
            .unwrap_or(0.0);
        let series_g = 1.0 / self.dnet.network().source().series_resistance;

        for (n, table) in self.nodes.iter().enumerate() {
            let mut inflow = table.cap_over_dt * self.node_v[n];
            for &(e, first) in &table.ends {
                let cur = &self.i[e];
                inflow += if first { -cur[0] } else { cur[cur.len() - 1] };
            }
            if n == src_node.0 {
                inflow += series_g * ac_emf;
            }
            if let Some((dn, g)) = self.drive_node {
                if dn.0 == n {
                    inflow += g * drive_emf;
                }
            }
            let short = self
                .shunts
                .iter()
                .position(|s| s.site == Site::Node(NodeId(n)) && s.conductance.is_none());
            let v_new = match short {
                Some(k) => {
                    self.shunts[k].current = inflow;
                    0.0
                }
                None => inflow / (table.cap_over_dt + table.conductance),
            };
            self.node_v[n] = v_new;
        }
        for s in &mut self.shunts {
            if let (Site::Node(n), Some(g)) = (s.site, s.conductance) {
                s.current = g * self.node_v[n.0];
            }
        }
        for (n, table) in self.nodes.iter().enumerate() {
            for &(e, first) in &table.ends {
                let v = &mut self.v[e];
                let k = if first { 0 } else { v.len() - 1 };
                v[k] = self.node_v[n];
            }
        }
        self.step = n_next;
    }

    /// Runs `steps` steps, calling `observe` after each.
    pub fn run(&mut self, steps: usize, mut observe: impl FnMut(&Self)) {
        for _ in 0..steps {
            self.step();
            observe(self);
        }
    }
}
