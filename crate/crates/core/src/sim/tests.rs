use std::f64::consts::PI;

use num_complex::Complex64;

use super::steady::steady_state;
use super::*;
use crate::network::{parse_network, EdgeId, LineParams, NetworkBuilder, NetworkTopology, NodeId};

const SINGLE_LINE: &str = include_str!("../../../../networks/single_line.net");
const CANONICAL: &str = include_str!("../../../../networks/canonical_11.net");

fn at(edge: usize, offset: f64) -> EdgePosition {
    EdgePosition {
        edge: EdgeId(edge),
        offset,
    }
}

/// Two-port test bench: `a` --- `b` with the drive behind `za` at `a`.
fn bench(segments: &[(f64, LineParams)], za: f64, zb: f64) -> NetworkTopology {
    let mut b = NetworkBuilder::new();
    for (k, (len, p)) in segments.iter().enumerate() {
        let name = format!("p{k}");
        b = b
            .params(&name, *p)
            .edge(&format!("e{k}"), &k.to_string(), &(k + 1).to_string(), *len, &name);
    }
    b.termination("0", za)
        .termination(&segments.len().to_string(), zb)
        .source("0", 0.0, 50.0, 1e15)
        .observe("0")
        .build()
        .unwrap()
}

fn gaussian(dt: f64, width: f64, steps: usize) -> Vec<f64> {
    let t0 = 4.0 * width;
    (0..steps)
        .map(|k| {
            let t = k as f64 * dt - t0;
            (-(t / width).powi(2)).exp()
        })
        .collect()
}

/// Runs a drive at node 0 and records the voltages at the given nodes.
fn drive_and_record(d: &DiscretizedNetwork, drive: Vec<f64>, steps: usize, nodes: &[usize]) -> Vec<Vec<f64>> {
    let mut sim = Simulation::new(d).with_drive(NodeId(0), drive).unwrap();
    let mut out = vec![Vec::with_capacity(steps); nodes.len()];
    sim.run(steps, |s| {
        for (o, &n) in out.iter_mut().zip(nodes) {
            o.push(s.voltage(Site::Node(NodeId(n))));
        }
    });
    out
}

fn peak_in(v: &[f64], dt: f64, from: f64, to: f64) -> f64 {
    let (a, b) = ((from / dt) as usize, ((to / dt) as usize).min(v.len()));
    v[a..b].iter().copied().fold(0.0, |m, x| if x.abs() > m.abs() { x } else { m })
}

#[test]
fn no_fault_gives_null_transient() {
    let net = parse_network(SINGLE_LINE).unwrap();
    let d = discretize(&net, 50.0).unwrap();
    let s = FaultScenario::with_default_window(&d, at(0, 4000.0), 1e9, 90.0).unwrap();
    assert!(simulate_fault(&d, &s).unwrap().is_all_zero());
}

#[test]
fn first_wavefront_arrives_after_travel_time() {
    let net = parse_network(SINGLE_LINE).unwrap();
    let d = discretize(&net, 5.0).unwrap();
    let s = FaultScenario::with_default_window(&d, at(0, 4000.0), 0.0, 90.0).unwrap();
    let w = simulate_fault(&d, &s).unwrap();
    let first = w
        .samples()
        .iter()
        .position(|x| x.abs() > 0.01 * w.max_abs())
        .unwrap();
    let expected = 4000.0 / LineParams::OVERHEAD.propagation_speed();
    assert!((expected - 16.4e-6).abs() < 0.05e-6);
    assert!((w.time(first) - expected).abs() < 0.3e-6, "arrival {}", w.time(first));
}

#[test]
fn zero_crossing_inception_gives_small_wavefront() {
    let net = parse_network(SINGLE_LINE).unwrap();
    let d = discretize(&net, 20.0).unwrap();
    let early = |angle: f64| {
        let s = FaultScenario::with_default_window(&d, at(0, 4000.0), 0.0, angle).unwrap();
        let w = simulate_fault(&d, &s).unwrap();
        peak_in(w.samples(), w.dt(), 0.0, 25e-6).abs()
    };
    let peak = early(90.0);
    let zero = early(0.0);
    assert!(peak > 1000.0, "{peak}");
    assert!(zero < 0.01 * peak, "{zero} vs {peak}");
}

#[test]
fn record_window_must_cover_travel_time() {
    let net = parse_network(SINGLE_LINE).unwrap();
    let d = discretize(&net, 50.0).unwrap();
    let s = FaultScenario::new(at(0, 4000.0), 0.0, 90.0, 10e-6).unwrap();
    assert!(matches!(simulate_fault(&d, &s), Err(SimError::WindowTooShort { .. })));
    assert!(FaultScenario::new(at(0, 4000.0), -1.0, 90.0, 1e-3).is_err());
    assert!(FaultScenario::new(at(0, 4000.0), 0.0, 360.0, 1e-3).is_err());
    assert!(FaultScenario::new(at(0, 4000.0), 0.0, 90.0, 0.0).is_err());
}

#[test]
fn steady_state_continues_without_start_up_transient() {
    let net = parse_network(CANONICAL).unwrap();
    let d = discretize(&net, 50.0).unwrap();
    let src = *net.source();
    let omega = 2.0 * PI * src.frequency;
    let far = net.node_id("11").unwrap();
    let unit = steady_state(&d, omega, Complex64::new(1.0, 0.0));
    let scale = Complex64::from_polar(src.amplitude, 30f64.to_radians()) / unit.node_phasor[src.node.0];
    let far_phasor = unit.node_phasor[far.0] * scale;

    let mut sim = Simulation::new(&d).with_ac_steady_state(30.0);
    let mut worst: f64 = 0.0;
    sim.run(5000, |s| {
        let n = s.steps_taken() as f64;
        let t = n * s.dt();
        let want_src = src.amplitude * (omega * t + 30f64.to_radians()).sin();
        let want_far = (far_phasor * Complex64::from_polar(1.0, omega * t)).im;
        worst = worst
            .max((s.voltage(Site::Node(src.node)) - want_src).abs())
            .max((s.voltage(Site::Node(far)) - want_far).abs());
    });
    assert!(worst < 1e-6 * src.amplitude, "drift {worst}");
}

#[test]
fn zero_drive_gives_zero_current() {
    let net = parse_network(SINGLE_LINE).unwrap();
    let d = discretize(&net, 50.0).unwrap();
    let w = Waveform::new(vec![0.0; 500], d.dt(), 0.0).unwrap();
    let i = back_inject(&d, &w, &at(0, 4000.0), 20.0).unwrap();
    assert!(i.is_all_zero());
    let empty = Waveform::new(vec![0.0], d.dt(), 0.0).unwrap();
    assert!(back_inject(&d, &empty, &at(0, 4000.0), -1.0).is_err());
}

#[test]
fn back_injection_is_linear() {
    let net = parse_network(CANONICAL).unwrap();
    let d = discretize(&net, 50.0).unwrap();
    let e = net.edge_id("e4-9").unwrap();
    let s = FaultScenario::with_default_window(&d, at(e.0, 1200.0), 1.0, 90.0).unwrap();
    let r = time_reverse(&simulate_fault(&d, &s).unwrap());
    let guess = at(net.edge_id("e2-3").unwrap().0, 800.0);
    let base = back_inject(&d, &r, &guess, 20.0).unwrap();
    for alpha in [-3.0, 0.25, 7.5] {
        let scaled = back_inject(&d, &r.scaled(alpha), &guess, 20.0).unwrap();
        for (a, b) in scaled.samples().iter().zip(base.samples()) {
            assert!((a - alpha * b).abs() <= 1e-9 * (alpha * b).abs().max(1e-12 * base.max_abs()));
        }
        let ratio = signal_energy(&scaled) / signal_energy(&base);
        assert!((ratio / (alpha * alpha) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn mismatched_drive_step_is_resampled() {
    let net = parse_network(SINGLE_LINE).unwrap();
    let d = discretize(&net, 50.0).unwrap();
    let s = FaultScenario::with_default_window(&d, at(0, 4000.0), 0.0, 90.0).unwrap();
    let w = time_reverse(&simulate_fault(&d, &s).unwrap());
    let coarse = w.resampled(2.0 * d.dt()).unwrap();
    let a = signal_energy(&back_inject(&d, &w, &at(0, 4000.0), 0.0).unwrap());
    let b = signal_energy(&back_inject(&d, &coarse, &at(0, 4000.0), 0.0).unwrap());
    assert!((a / b - 1.0).abs() < 0.05, "{a} vs {b}");
}

#[test]
fn single_line_energy_peaks_at_fault() {
    let net = parse_network(SINGLE_LINE).unwrap();
    let d = discretize(&net, 10.0).unwrap();
    let s = FaultScenario::with_default_window(&d, at(0, 4000.0), 0.0, 90.0).unwrap();
    let r = time_reverse(&simulate_fault(&d, &s).unwrap());
    let energy = |x: f64| signal_energy(&back_inject(&d, &r, &at(0, x), 20.0).unwrap());
    let truth = energy(4000.0);
    assert!(truth > energy(2000.0));
    assert!(truth > energy(6000.0));
    assert!(truth > energy(3990.0));
    assert!(truth > energy(4010.0));
}

#[test]
fn reflection_from_termination_matches_coefficient() {
    let p = LineParams::OVERHEAD.lossless();
    let zc = p.characteristic_impedance();
    for (zb, rho) in [(1e5, (1e5 - zc) / (1e5 + zc)), (3.0 * zc, 0.5)] {
        let net = bench(&[(3000.0, p)], zc, zb);
        let d = discretize(&net, 10.0).unwrap();
        let width = 0.5e-6;
        let round_trip = 2.0 * 3000.0 / p.propagation_speed();
        let steps = ((round_trip + 12.0 * width) / d.dt()) as usize;
        let v = &drive_and_record(&d, gaussian(d.dt(), width, steps), steps, &[0])[0];
        let incident = peak_in(v, d.dt(), 0.0, 8.0 * width);
        let reflected = peak_in(v, d.dt(), round_trip, round_trip + 8.0 * width);
        assert!((incident - 0.5).abs() < 0.01, "{incident}");
        let got = reflected / incident;
        assert!((got / rho - 1.0).abs() < 0.02, "rho {got} vs {rho}");
    }
}

#[test]
fn lossless_matched_line_preserves_pulse_energy() {
    let p = LineParams::OVERHEAD.lossless();
    let zc = p.characteristic_impedance();
    let net = bench(&[(3000.0, p)], zc, zc);
    let d = discretize(&net, 10.0).unwrap();
    let width = 0.5e-6;
    let steps = ((3000.0 / p.propagation_speed() + 12.0 * width) / d.dt()) as usize;
    let v = drive_and_record(&d, gaussian(d.dt(), width, steps), steps, &[0, 1]);
    let sent: f64 = v[0].iter().map(|x| x * x).sum();
    let arrived: f64 = v[1].iter().map(|x| x * x).sum();
    assert!((arrived / sent - 1.0).abs() < 0.01, "{}", arrived / sent);
}

#[test]
fn junction_transmission_matches_impedance_step() {
    let (p1, p2) = (LineParams::OVERHEAD.lossless(), LineParams::CABLE.lossless());
    let (z1, z2) = (p1.characteristic_impedance(), p2.characteristic_impedance());
    let net = bench(&[(3000.0, p1), (3000.0, p2)], z1, z2);
    let d = discretize(&net, 10.0).unwrap();
    // Wide enough to stay clear of grid dispersion on the slower cable side.
    let width = 2e-6;
    let travel = 3000.0 / p1.propagation_speed() + 3000.0 / p2.propagation_speed();
    let steps = ((travel + 12.0 * width) / d.dt()) as usize;
    let v = drive_and_record(&d, gaussian(d.dt(), width, steps), steps, &[0, 2]);
    let incident = peak_in(&v[0], d.dt(), 0.0, 8.0 * width);
    let through = peak_in(&v[1], d.dt(), travel - 4.0 * width, travel + 8.0 * width);
    let expected = 2.0 * z2 / (z1 + z2);
    assert!((through / incident / expected - 1.0).abs() < 0.02, "{} vs {expected}", through / incident);
}

#[test]
fn shunt_reflection_matches_divider() {
    let p = LineParams::CABLE.lossless();
    let zc = p.characteristic_impedance();
    let net = bench(&[(6000.0, p)], zc, zc);
    let d = discretize(&net, 10.0).unwrap();
    let width = 1e-6;
    let round_trip = 2.0 * 3000.0 / p.propagation_speed();
    let steps = ((round_trip + 12.0 * width) / d.dt()) as usize;
    let snapped = d.snap(&at(0, 3000.0)).unwrap();
    for r in [0.0, 20.0] {
        let mut sim = Simulation::new(&d)
            .with_drive(NodeId(0), gaussian(d.dt(), width, steps))
            .unwrap();
        sim.add_shunt(snapped.site, r);
        let mut v = Vec::with_capacity(steps);
        sim.run(steps, |s| v.push(s.voltage(Site::Node(NodeId(0)))));
        let incident = peak_in(&v, d.dt(), 0.0, 8.0 * width);
        let reflected = peak_in(&v, d.dt(), round_trip, round_trip + 8.0 * width);
        let expected = -zc / (zc + 2.0 * r);
        assert!((reflected / incident / expected - 1.0).abs() < 0.02, "{r} ohm: {}", reflected / incident);
    }
}

#[test]
fn long_runs_stay_bounded() {
    let net = parse_network(CANONICAL).unwrap();
    let d = discretize(&net, 20.0).unwrap();
    let e = net.edge_id("e9-10").unwrap();
    let window = 10.0 * d.default_record_window();
    let s = FaultScenario::new(at(e.0, 2000.0), 0.0, 90.0, window).unwrap();
    let w = simulate_fault(&d, &s).unwrap();
    let n = w.len();
    let head = w.samples()[..n / 10].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tail = w.samples()[9 * n / 10..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(w.samples().iter().all(|x| x.is_finite()));
    assert!(tail <= 2.0 * head, "head {head} tail {tail}");
}
