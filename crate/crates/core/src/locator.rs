//! End-to-end fault location.
//!
//! The measured transient is reversed in time and re-injected into a healthy
//! model of the network while a trial shunt sits at a candidate position;
//! the shunt's current energy is largest when the candidate is the fault.
//! The network is split into edge-disjoint paths, each searched on its own
//! 1-D grid, and the best path wins.
//!
//! Energies are memoized per [`Locator`], so repeated searches of the same
//! record (several seeds, or an exhaustive sweep followed by annealing) only
//! simulate each grid point once. Evaluation counts reported here are
//! objective calls, cached or not.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::anneal::{self, exhaustive_maximize, grid_count, sa_maximize, AnnealError, OptimizationTrace, SaParams};
use crate::graph::{decompose_with_seed, GraphError, Path, PathDecomposition};
use crate::network::{EdgePosition, NetworkError, NetworkTopology};
use crate::oracle::EnergyCurve;
use crate::sim::{
    back_inject, discretize, signal_energy, simulate_fault, time_reverse, DiscretizedNetwork, FaultScenario,
    SimError, Waveform,
};

#[derive(Debug, Error)]
pub enum LocateError {
    #[error("no transient detected in the measured waveform")]
    NoTransient,
    #[error("invalid locator configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Anneal(#[from] AnnealError),
}

pub type Result<T, E = LocateError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    #[default]
    Anneal,
    Exhaustive,
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMode::Anneal => "sa",
            SearchMode::Exhaustive => "exhaustive",
        })
    }
}

impl FromStr for SearchMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sa" => Ok(SearchMode::Anneal),
            "exhaustive" => Ok(SearchMode::Exhaustive),
            other => Err(format!("unknown search mode {other:?} (expected sa or exhaustive)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocatorConfig {
    /// Annealing parameters; their `accuracy` is overridden by `accuracy`.
    pub sa: SaParams,
    /// Search grid spacing, metres.
    pub accuracy: f64,
    /// Trial shunt resistance, ohms.
    pub guess_impedance: f64,
    pub mode: SearchMode,
    /// Simulation cell size; defaults to `accuracy` so every grid point is a
    /// cell boundary.
    pub grid_dx: Option<f64>,
    /// Seed for the random decomposition used when the network file pins no
    /// search paths.
    pub decomposition_seed: u64,
}

impl Default for LocatorConfig {
    fn default() -> Self {
        LocatorConfig {
            sa: SaParams {
                t0: 1.0,
                cooling: 0.8,
                n_term: 10,
                accuracy: 10.0,
                initial_point: None,
                seed: 0,
            },
            accuracy: 10.0,
            guess_impedance: 20.0,
            mode: SearchMode::Anneal,
            grid_dx: None,
            decomposition_seed: 0,
        }
    }
}

impl LocatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.guess_impedance > 0.0 && self.guess_impedance.is_finite()) {
            return Err(LocateError::InvalidConfig(format!(
                "guess impedance must be > 0, got {}",
                self.guess_impedance
            )));
        }
        if !(self.accuracy > 0.0 && self.accuracy.is_finite()) {
            return Err(LocateError::InvalidConfig(format!(
                "accuracy must be > 0, got {}",
                self.accuracy
            )));
        }
        if let Some(dx) = self.grid_dx {
            if !(dx > 0.0 && dx.is_finite()) {
                return Err(LocateError::InvalidConfig(format!("grid dx must be > 0, got {dx}")));
            }
        }
        self.sa_params().validate()?;
        Ok(())
    }

    pub fn sa_params(&self) -> SaParams {
        SaParams {
            accuracy: self.accuracy,
            ..self.sa
        }
    }

    pub fn grid_dx(&self) -> f64 {
        self.grid_dx.unwrap_or(self.accuracy)
    }

    pub fn discretize(&self, net: &NetworkTopology) -> Result<DiscretizedNetwork> {
        Ok(discretize(net, self.grid_dx())?)
    }
}

/// Outcome of searching one path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSearch {
    pub path: usize,
    /// Metres from the path's first node.
    pub position: f64,
    pub energy: f64,
    pub evaluations: usize,
    /// Present in annealing mode.
    pub trace: Option<OptimizationTrace>,
    /// Present in exhaustive mode.
    pub curve: Option<EnergyCurve>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocationResult {
    pub path: usize,
    pub position: f64,
    pub edge_position: EdgePosition,
    /// A²·µs.
    pub energy: f64,
    pub per_path: Vec<PathSearch>,
    pub evaluations: usize,
    /// Seconds.
    pub wall_time: f64,
}

/// Search paths for `net`: the pinned ones if the file lists any, otherwise
/// a seeded random decomposition whose open paths are turned to start at the
/// end nearer the observation node.
pub fn search_paths(net: &NetworkTopology, seed: u64) -> Result<PathDecomposition> {
    if let Some(d) = net.pinned_decomposition() {
        return Ok(d);
    }
    let g = net.graph();
    let d = decompose_with_seed(&g, seed)?;
    let dist = net.node_distances(net.observation_node());
    let paths = d
        .paths()
        .iter()
        .map(|p| {
            if !p.is_closed() && dist[p.end()] < dist[p.start()] {
                let nodes = p.nodes().iter().rev().copied().collect();
                let edges = p.edges().iter().rev().copied().collect();
                Path::new(nodes, edges)
            } else {
                Ok(p.clone())
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PathDecomposition::new(&g, paths)?)
}

/// Candidate positions on a path of `length`: `accuracy, 2 accuracy, ...`,
/// or just the far end when the path is shorter than one step.
fn candidate_count(length: f64, accuracy: f64) -> usize {
    grid_count(length, accuracy).max(1)
}

/// Objective calls an exhaustive search of `paths` makes.
pub fn exhaustive_evaluations(net: &NetworkTopology, paths: &PathDecomposition, accuracy: f64) -> usize {
    paths
        .paths()
        .iter()
        .map(|p| candidate_count(net.path_length(p), accuracy))
        .sum()
}

/// A reversed record bound to a discretized network, with an energy cache.
pub struct Locator {
    dnet: DiscretizedNetwork,
    paths: PathDecomposition,
    reversed: Waveform,
    guess_impedance: f64,
    accuracy: f64,
    cache: Mutex<HashMap<(usize, usize), f64>>,
}

impl Locator {
    /// Fails with [`LocateError::NoTransient`] when `measured` is silent.
    pub fn new(dnet: DiscretizedNetwork, measured: &Waveform, cfg: &LocatorConfig) -> Result<Self> {
        if measured.is_empty() || measured.is_all_zero() {
            return Err(LocateError::NoTransient);
        }
        Self::accepting_silence(dnet, measured, cfg)
    }

    /// Like [`new`](Self::new) but keeps an all-zero record, whose energies
    /// are then all zero. Useful for charting a healthy network.
    pub fn accepting_silence(dnet: DiscretizedNetwork, measured: &Waveform, cfg: &LocatorConfig) -> Result<Self> {
        cfg.validate()?;
        if measured.is_empty() {
            return Err(LocateError::NoTransient);
        }
        let paths = search_paths(dnet.network(), cfg.decomposition_seed)?;
        Ok(Locator {
            reversed: time_reverse(measured),
            dnet,
            paths,
            guess_impedance: cfg.guess_impedance,
            accuracy: cfg.accuracy,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn network(&self) -> &NetworkTopology {
        self.dnet.network()
    }

    pub fn discretized(&self) -> &DiscretizedNetwork {
        &self.dnet
    }

    pub fn paths(&self) -> &PathDecomposition {
        &self.paths
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    /// Distinct grid points simulated so far.
    pub fn simulations(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }

    fn path(&self, k: usize) -> &Path {
        &self.paths.paths()[k]
    }

    fn path_length(&self, k: usize) -> f64 {
        self.network().path_length(self.path(k))
    }

    fn grid_index(&self, k: usize, s: f64) -> usize {
        if grid_count(self.path_length(k), self.accuracy) == 0 {
            0
        } else {
            (s / self.accuracy).round() as usize
        }
    }

    /// Refocused energy with the trial shunt at `s` metres along path `k`.
    pub fn energy(&self, k: usize, s: f64) -> Result<f64> {
        let key = (k, self.grid_index(k, s));
        if let Some(&e) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(e);
        }
        let pos = self.network().path_to_edge_position(self.path(k), s)?;
        let current = back_inject(&self.dnet, &self.reversed, &pos, self.guess_impedance)?;
        let e = signal_energy(&current);
        self.cache.lock().expect("cache lock").insert(key, e);
        Ok(e)
    }

    fn search_path(&self, k: usize, mode: SearchMode, sa: &SaParams) -> Result<PathSearch> {
        let length = self.path_length(k);
        let mut failure = None;
        let mut objective = |s: f64| match self.energy(k, s) {
            Ok(e) => e,
            Err(err) => {
                failure.get_or_insert(err);
                f64::NEG_INFINITY
            }
        };

        let search = if grid_count(length, self.accuracy) == 0 {
            let e = objective(length);
            let curve = (mode == SearchMode::Exhaustive).then(|| EnergyCurve {
                positions: vec![length],
                energies: vec![e],
                excluded_bins: 0,
            });
            let trace = (mode == SearchMode::Anneal).then(|| OptimizationTrace {
                points: vec![anneal::TracePoint {
                    position: length,
                    value: e,
                    accepted: true,
                    temperature: sa.t0,
                }],
                final_position: length,
                final_value: e,
            });
            PathSearch {
                path: k,
                position: length,
                energy: e,
                evaluations: 1,
                trace,
                curve,
            }
        } else {
            match mode {
                SearchMode::Exhaustive => {
                    let r = exhaustive_maximize(&mut objective, length, self.accuracy)?;
                    let (positions, energies) = r.curve.into_iter().unzip();
                    PathSearch {
                        path: k,
                        position: r.position,
                        energy: r.value,
                        evaluations: r.evaluations,
                        trace: None,
                        curve: Some(EnergyCurve {
                            positions,
                            energies,
                            excluded_bins: 0,
                        }),
                    }
                }
                SearchMode::Anneal => {
                    let params = SaParams {
                        seed: path_seed(sa.seed, k),
                        accuracy: self.accuracy,
                        ..*sa
                    };
                    let t = sa_maximize(&mut objective, length, &params)?;
                    PathSearch {
                        path: k,
                        position: t.final_position,
                        energy: t.final_value,
                        evaluations: t.evaluations(),
                        trace: Some(t),
                        curve: None,
                    }
                }
            }
        };
        match failure {
            Some(err) => Err(err),
            None => Ok(search),
        }
    }

    /// Searches every path independently and returns the best position.
    /// Ties between paths go to the lower path index.
    pub fn locate(&self, mode: SearchMode, sa: &SaParams) -> Result<LocationResult> {
        let started = Instant::now();
        let per_path: Vec<PathSearch> = (0..self.paths.len())
            .into_par_iter()
            .map(|k| self.search_path(k, mode, sa))
            .collect::<Result<_>>()?;
        let best = per_path
            .iter()
            .reduce(|a, b| if b.energy > a.energy { b } else { a })
            .expect("decompositions have at least one path");
        let edge_position = self.network().path_to_edge_position(self.path(best.path), best.position)?;
        Ok(LocationResult {
            path: best.path,
            position: best.position,
            edge_position,
            energy: best.energy,
            evaluations: per_path.iter().map(|p| p.evaluations).sum(),
            wall_time: started.elapsed().as_secs_f64(),
            per_path,
        })
    }
}

/// Seed for path `k`'s annealing run, so paths explore independently.
fn path_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Locates the fault that produced `measured` at `net`'s observation node.
pub fn locate_fault(net: &NetworkTopology, measured: &Waveform, cfg: &LocatorConfig) -> Result<LocationResult> {
    cfg.validate()?;
    let locator = Locator::new(cfg.discretize(net)?, measured, cfg)?;
    locator.locate(cfg.mode, &cfg.sa_params())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignRow {
    /// 1-based scenario number.
    pub scenario: usize,
    pub repeat: usize,
    pub seed: u64,
    /// Node labels of the winning path joined by `-`; `None` when no
    /// transient was seen.
    pub located_path: Option<String>,
    pub located_pos_m: Option<f64>,
    /// True position along the winning path (or the first path holding the
    /// faulted edge).
    pub true_pos_m: f64,
    /// Network distance between the located and true positions.
    pub error_m: Option<f64>,
    pub energy: Option<f64>,
    pub evaluations: usize,
    pub mode: SearchMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSummary {
    pub scenario: usize,
    pub success_rate: f64,
    pub mean_evaluations: f64,
    pub min_evaluations: usize,
    pub max_evaluations: usize,
    pub exhaustive_evaluations: usize,
    /// Set when the scenario could not be run; its rows are then absent.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CampaignReport {
    pub rows: Vec<CampaignRow>,
    pub summaries: Vec<ScenarioSummary>,
}

impl CampaignReport {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let opt = |v: Option<f64>, f: fn(f64) -> String| v.map(f).unwrap_or_default();
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "scenario",
            "repeat",
            "seed",
            "located_path",
            "located_pos_m",
            "true_pos_m",
            "error_m",
            "energy",
            "evaluations",
            "mode",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.scenario.to_string(),
                r.repeat.to_string(),
                r.seed.to_string(),
                r.located_path.clone().unwrap_or_default(),
                opt(r.located_pos_m, |v| format!("{v}")),
                format!("{}", r.true_pos_m),
                opt(r.error_m, |v| format!("{v:.3}")),
                opt(r.energy, |v| format!("{v:.8e}")),
                r.evaluations.to_string(),
                r.mode.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Simulates each scenario once and locates it `repeats` times with seeds
/// `cfg.sa.seed, cfg.sa.seed + 1, ...`. A failing scenario is reported in
/// its summary and does not stop the others. Scenarios run concurrently on
/// the current rayon pool.
pub fn locate_campaign(
    net: &NetworkTopology,
    scenarios: &[FaultScenario],
    cfg: &LocatorConfig,
    repeats: usize,
) -> Result<CampaignReport> {
    cfg.validate()?;
    if repeats == 0 {
        return Err(LocateError::InvalidConfig("repeats must be >= 1".into()));
    }
    let dnet = cfg.discretize(net)?;
    let outcomes: Vec<(Vec<CampaignRow>, ScenarioSummary)> = scenarios
        .par_iter()
        .enumerate()
        .map(|(i, sc)| run_scenario(&dnet, i + 1, sc, cfg, repeats))
        .collect();
    let mut report = CampaignReport::default();
    for (rows, summary) in outcomes {
        report.rows.extend(rows);
        report.summaries.push(summary);
    }
    Ok(report)
}

fn run_scenario(
    dnet: &DiscretizedNetwork,
    number: usize,
    sc: &FaultScenario,
    cfg: &LocatorConfig,
    repeats: usize,
) -> (Vec<CampaignRow>, ScenarioSummary) {
    let net = dnet.network();
    let paths = search_paths(net, cfg.decomposition_seed);
    let exhaustive = paths
        .as_ref()
        .map(|p| exhaustive_evaluations(net, p, cfg.accuracy))
        .unwrap_or(0);
    let failed = |err: String| {
        (
            Vec::new(),
            ScenarioSummary {
                scenario: number,
                success_rate: 0.0,
                mean_evaluations: 0.0,
                min_evaluations: 0,
                max_evaluations: 0,
                exhaustive_evaluations: exhaustive,
                error: Some(err),
            },
        )
    };
    let paths = match paths {
        Ok(p) => p,
        Err(e) => return failed(e.to_string()),
    };
    let measured = match simulate_fault(dnet, sc) {
        Ok(w) => w,
        Err(e) => return failed(e.to_string()),
    };
    let locator = match Locator::new(dnet.clone(), &measured, cfg) {
        Ok(l) => Some(l),
        Err(LocateError::NoTransient) => None,
        Err(e) => return failed(e.to_string()),
    };

    let mut rows = Vec::with_capacity(repeats);
    for repeat in 0..repeats {
        let seed = cfg.sa.seed.wrapping_add(repeat as u64);
        let sa = SaParams {
            seed,
            ..cfg.sa_params()
        };
        let located = match &locator {
            Some(l) => match l.locate(cfg.mode, &sa) {
                Ok(r) => Some(r),
                Err(e) => return failed(e.to_string()),
            },
            None => None,
        };
        let home = located.as_ref().map(|r| &paths.paths()[r.path]);
        let true_pos_m = true_path_position(net, &paths, home, &sc.position);
        rows.push(CampaignRow {
            scenario: number,
            repeat,
            seed,
            located_path: home.map(|p| net.path_labels(p).join("-")),
            located_pos_m: located.as_ref().map(|r| r.position),
            true_pos_m,
            error_m: located.as_ref().map(|r| net.distance(&r.edge_position, &sc.position)),
            energy: located.as_ref().map(|r| r.energy),
            evaluations: located.as_ref().map_or(0, |r| r.evaluations),
            mode: cfg.mode,
        });
    }

    let evals: Vec<usize> = rows.iter().map(|r| r.evaluations).collect();
    let hits = rows
        .iter()
        .filter(|r| r.error_m.is_some_and(|e| e <= cfg.accuracy + 1e-6))
        .count();
    let summary = ScenarioSummary {
        scenario: number,
        success_rate: hits as f64 / repeats as f64,
        mean_evaluations: evals.iter().sum::<usize>() as f64 / repeats as f64,
        min_evaluations: evals.iter().copied().min().unwrap_or(0),
        max_evaluations: evals.iter().copied().max().unwrap_or(0),
        exhaustive_evaluations: exhaustive,
        error: None,
    };
    (rows, summary)
}

fn true_path_position(
    net: &NetworkTopology,
    paths: &PathDecomposition,
    preferred: Option<&Path>,
    truth: &EdgePosition,
) -> f64 {
    preferred
        .into_iter()
        .chain(paths.paths())
        .find_map(|p| net.edge_position_to_path(p, truth))
        .unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_network;

    const SHORT_LINE: &str = "\
params overhead L=1.60e-6 C=10.54e-12 R=0.036e-3
node 1
node 2
edge e1 1 2 length=1km params=overhead
termination 1 R=100000
termination 2 R=100000
source 1 amplitude=10000 frequency=50 series_R=100000
observe 1
";

    fn short_line() -> NetworkTopology {
        parse_network(SHORT_LINE).unwrap()
    }

    fn cfg(mode: SearchMode) -> LocatorConfig {
        LocatorConfig {
            accuracy: 20.0,
            guess_impedance: 20.0,
            mode,
            ..LocatorConfig::default()
        }
    }

    fn measured(net: &NetworkTopology, c: &LocatorConfig, offset: f64) -> Waveform {
        let dnet = c.discretize(net).unwrap();
        let pos = EdgePosition {
            edge: net.edge_id("e1").unwrap(),
            offset,
        };
        let sc = FaultScenario::with_default_window(&dnet, pos, 0.0, 90.0).unwrap();
        simulate_fault(&dnet, &sc).unwrap()
    }

    #[test]
    fn mode_parses_and_prints() {
        assert_eq!("sa".parse::<SearchMode>().unwrap(), SearchMode::Anneal);
        assert_eq!("exhaustive".parse::<SearchMode>().unwrap(), SearchMode::Exhaustive);
        assert!("greedy".parse::<SearchMode>().is_err());
        assert_eq!(SearchMode::Exhaustive.to_string(), "exhaustive");
    }

    #[test]
    fn config_rejects_nonpositive_values() {
        let base = LocatorConfig::default();
        assert!(base.validate().is_ok());
        for bad in [
            LocatorConfig { guess_impedance: 0.0, ..base },
            LocatorConfig { accuracy: -1.0, ..base },
            LocatorConfig { grid_dx: Some(0.0), ..base },
        ] {
            assert!(matches!(bad.validate(), Err(LocateError::InvalidConfig(_))));
        }
    }

    #[test]
    fn silent_record_is_not_a_location() {
        let net = short_line();
        let c = cfg(SearchMode::Anneal);
        let zeros = Waveform::new(vec![0.0; 100], 1e-8, 0.0).unwrap();
        assert!(matches!(locate_fault(&net, &zeros, &c), Err(LocateError::NoTransient)));
    }

    #[test]
    fn exhaustive_finds_fault_on_short_line() {
        let net = short_line();
        let c = cfg(SearchMode::Exhaustive);
        let r = locate_fault(&net, &measured(&net, &c, 400.0), &c).unwrap();
        assert_eq!(r.evaluations, 50);
        assert_eq!(r.position, 400.0);
        assert_eq!(r.edge_position.offset, 400.0);
        let curve = r.per_path[0].curve.as_ref().unwrap();
        assert_eq!(curve.argmax().unwrap(), (r.position, r.energy));
    }

    #[test]
    fn annealing_reports_trace_lengths_as_evaluations() {
        let net = short_line();
        let c = cfg(SearchMode::Anneal);
        let r = locate_fault(&net, &measured(&net, &c, 400.0), &c).unwrap();
        let traced: usize = r.per_path.iter().map(|p| p.trace.as_ref().unwrap().points.len()).sum();
        assert_eq!(r.evaluations, traced);
        assert_eq!(r.energy, r.per_path.iter().map(|p| p.energy).fold(f64::MIN, f64::max));
    }

    #[test]
    fn cache_is_shared_between_modes() {
        let net = short_line();
        let c = cfg(SearchMode::Exhaustive);
        let l = Locator::new(c.discretize(&net).unwrap(), &measured(&net, &c, 600.0), &c).unwrap();
        let ex = l.locate(SearchMode::Exhaustive, &c.sa_params()).unwrap();
        assert_eq!(l.simulations(), 50);
        let sa = l.locate(SearchMode::Anneal, &c.sa_params()).unwrap();
        assert_eq!(l.simulations(), 50);
        assert!(sa.energy <= ex.energy);
    }

    #[test]
    fn path_shorter_than_step_is_one_candidate() {
        let net = short_line();
        let c = LocatorConfig {
            accuracy: 2000.0,
            grid_dx: Some(20.0),
            ..cfg(SearchMode::Exhaustive)
        };
        let r = locate_fault(&net, &measured(&net, &c, 400.0), &c).unwrap();
        assert_eq!(r.evaluations, 1);
        assert_eq!(r.position, 1000.0);
        assert_eq!(r.per_path[0].curve.as_ref().unwrap().positions, vec![1000.0]);
    }

    #[test]
    fn campaign_isolates_bad_scenarios() {
        let net = short_line();
        let c = cfg(SearchMode::Exhaustive);
        let e1 = net.edge_id("e1").unwrap();
        let good = FaultScenario::new(EdgePosition { edge: e1, offset: 400.0 }, 0.0, 90.0, 1e-4).unwrap();
        let too_short = FaultScenario { record_window: 1e-7, ..good };
        let healthy = FaultScenario { impedance: 1e12, ..good };
        let report = locate_campaign(&net, &[too_short, good, healthy], &c, 2).unwrap();

        assert!(report.summaries[0].error.is_some());
        assert_eq!(report.summaries[1].success_rate, 1.0);
        assert_eq!(report.summaries[1].exhaustive_evaluations, 50);
        assert_eq!(report.summaries[2].error, None);
        assert_eq!(report.summaries[2].success_rate, 0.0);
        assert_eq!(report.rows.len(), 4);
        assert!(report.rows.iter().filter(|r| r.scenario == 3).all(|r| r.located_path.is_none()));

        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "scenario,repeat,seed,located_path,located_pos_m,true_pos_m,error_m,energy,evaluations,mode"
        );
        assert!(lines.next().unwrap().starts_with("2,0,0,1-2,400,400,0.000,"));
        assert_eq!(lines.nth(1).unwrap(), "3,0,0,,,400,,,0,exhaustive");
    }
}
