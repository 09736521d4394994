//! Sinusoidal steady state of the discrete scheme itself, so a run started
//! from it continues the sinusoid without a start-up transient.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::grid::DiscretizedNetwork;

pub(crate) struct SteadyState {
    pub v: Vec<Vec<f64>>,
    pub i: Vec<Vec<f64>>,
    pub node_v: Vec<f64>,
    pub node_phasor: Vec<Complex64>,
}

/// Each edge is reduced to a two-port by chaining its cells, the node
/// equations are solved densely, then the chains are replayed to fill in the
/// interior. Phasors follow `x[n] = Im(X z^n)` with `z = exp(j w dt)`; currents
/// are sampled half a step after voltages, so `I^(n-1/2) = Im(I z^-1)`.
pub(crate) fn steady_state(dnet: &DiscretizedNetwork, omega: f64, emf: Complex64) -> SteadyState {
    let net = dnet.network();
    let dt = dnet.dt();
    let z = Complex64::from_polar(1.0, omega * dt);
    let one = Complex64::new(1.0, 0.0);
    let n_nodes = net.node_count();

    // per edge: series factor (V drop per unit current) and shunt factor
    let factors: Vec<(Complex64, Complex64)> = dnet
        .grids()
        .iter()
        .map(|g| ((one - g.decay / z) / g.drive, (z - one) / g.gain))
        .collect();

    let chain = |edge: usize, v0: Complex64, i0: Complex64, mut visit: Option<&mut dyn FnMut(usize, Complex64, Complex64)>| {
        let g = &dnet.grids()[edge];
        let (series, shunt) = factors[edge];
        let mut v = v0;
        let mut i = i0;
        for k in 0..g.cells {
            if let Some(f) = visit.as_deref_mut() {
                f(k, v, i);
            }
            v -= i * series;
            if k + 1 < g.cells {
                i -= shunt * v;
            }
        }
        (v, i)
    };

    let mut m = DMatrix::<Complex64>::zeros(n_nodes, n_nodes);
    let mut rhs = DVector::<Complex64>::zeros(n_nodes);
    let mut conductance = vec![0.0; n_nodes];
    for t in net.terminations() {
        conductance[t.node.0] += 1.0 / t.impedance;
    }
    let src = net.source();
    conductance[src.node.0] += 1.0 / src.series_resistance;
    for n in 0..n_nodes {
        let cdt = dnet.node_capacitance(crate::network::NodeId(n)) / dt;
        m[(n, n)] += z * (cdt + conductance[n]) - cdt;
    }
    rhs[src.node.0] = z * emf / src.series_resistance;

    let mut two_ports = Vec::with_capacity(net.edges().len());
    for (k, e) in net.edges().iter().enumerate() {
        let (a, b) = (e.endpoints.0 .0, e.endpoints.1 .0);
        let (alpha1, gamma1) = chain(k, one, Complex64::new(0.0, 0.0), None);
        let (alpha2, gamma2) = chain(k, Complex64::new(0.0, 0.0), one, None);
        let y11 = -alpha1 / alpha2;
        let y12 = one / alpha2;
        let y21 = gamma1 - gamma2 * alpha1 / alpha2;
        let y22 = gamma2 / alpha2;
        m[(a, a)] += y11;
        m[(a, b)] += y12;
        m[(b, a)] -= y21;
        m[(b, b)] -= y22;
        two_ports.push((y11, y12));
    }

    let node_phasor = m
        .lu()
        .solve(&rhs)
        .expect("nodal matrix of a terminated network is nonsingular");

    let z_inv = one / z;
    let mut v_out = Vec::with_capacity(net.edges().len());
    let mut i_out = Vec::with_capacity(net.edges().len());
    for (k, e) in net.edges().iter().enumerate() {
        let g = &dnet.grids()[k];
        let (a, b) = (e.endpoints.0 .0, e.endpoints.1 .0);
        let (y11, y12) = two_ports[k];
        let i0 = y11 * node_phasor[a] + y12 * node_phasor[b];
        let mut v = vec![0.0; g.cells + 1];
        let mut i = vec![0.0; g.cells];
        chain(
            k,
            node_phasor[a],
            i0,
            Some(&mut |idx, vp: Complex64, ip: Complex64| {
                v[idx] = vp.im;
                i[idx] = (ip * z_inv).im;
            }),
        );
        v[0] = node_phasor[a].im;
        v[g.cells] = node_phasor[b].im;
        v_out.push(v);
        i_out.push(i);
    }
    SteadyState {
        v: v_out,
        i: i_out,
        node_v: node_phasor.iter().map(|p| p.im).collect(),
        node_phasor: node_phasor.iter().copied().collect(),
    }
}
