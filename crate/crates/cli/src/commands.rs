use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use emtr_core::anneal::SaParams;
use emtr_core::graph::decompose_with_seed;
use emtr_core::locator::{
    exhaustive_evaluations, locate_campaign, LocateError, LocationResult, Locator, LocatorConfig, SearchMode,
};
use emtr_core::network::{parse_network, EdgePosition, NetworkTopology};
use emtr_core::sim::{simulate_fault, DiscretizedNetwork, FaultScenario};

use crate::args::{AnnealArgs, CampaignArgs, DecomposeArgs, FaultSpec, LocateArgs, SearchArgs, SweepArgs};

pub enum Outcome {
    Done,
    NoTransient,
}

fn load_network(path: &Path) -> Result<NetworkTopology> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read network file {}", path.display()))?;
    parse_network(&text).with_context(|| format!("invalid network file {}", path.display()))
}

fn scenario(net: &NetworkTopology, dnet: &DiscretizedNetwork, f: &FaultSpec) -> Result<FaultScenario> {
    let edge = net
        .edge_id(&f.edge)
        .with_context(|| format!("fault edge {:?} is not in the network", f.edge))?;
    let position = EdgePosition { edge, offset: f.offset };
    let length = net.edge(edge).length;
    if !(0.0..=length).contains(&f.offset) {
        bail!("fault offset {} m is outside edge {} (0..{} m)", f.offset, f.edge, length);
    }
    Ok(FaultScenario::with_default_window(dnet, position, f.resistance, f.angle)?)
}

fn config(search: &SearchArgs, anneal: Option<&AnnealArgs>, accuracy: f64, seed: u64) -> Result<LocatorConfig> {
    let defaults = LocatorConfig::default();
    let sa = match anneal {
        Some(a) => SaParams {
            t0: a.t0,
            cooling: a.cooling,
            n_term: a.n_term,
            accuracy,
            initial_point: a.start,
            seed,
        },
        None => SaParams {
            accuracy,
            seed,
            ..defaults.sa
        },
    };
    let cfg = LocatorConfig {
        sa,
        accuracy,
        guess_impedance: search.guess_r,
        mode: anneal.map_or(SearchMode::Exhaustive, |a| a.mode),
        grid_dx: search.dx,
        decomposition_seed: seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn create(path: PathBuf) -> Result<BufWriter<File>> {
    let f = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn path_name(net: &NetworkTopology, locator: &Locator, k: usize) -> String {
    net.path_labels(&locator.paths().paths()[k]).join("-")
}

fn summary(net: &NetworkTopology, locator: &Locator, cfg: &LocatorConfig, r: &LocationResult) -> String {
    let mut s = String::new();
    let exhaustive = exhaustive_evaluations(net, locator.paths(), cfg.accuracy);
    writeln!(s, "mode: {}", cfg.mode).unwrap();
    writeln!(s, "seed: {}", cfg.sa.seed).unwrap();
    writeln!(s, "accuracy_m: {}", cfg.accuracy).unwrap();
    writeln!(s, "guess_r_ohm: {}", cfg.guess_impedance).unwrap();
    writeln!(s, "paths: {}", locator.paths().len()).unwrap();
    for p in &r.per_path {
        writeln!(
            s,
            "  path {} ({}): max at {} m, energy {:.6e} A2us, {} evaluations",
            p.path + 1,
            path_name(net, locator, p.path),
            p.position,
            p.energy,
            p.evaluations
        )
        .unwrap();
    }
    writeln!(
        s,
        "located: path {} ({}) at {} m",
        r.path + 1,
        path_name(net, locator, r.path),
        r.position
    )
    .unwrap();
    writeln!(s, "position: {}", net.describe_position(&r.edge_position)).unwrap();
    writeln!(s, "energy_A2us: {:.6e}", r.energy).unwrap();
    writeln!(s, "evaluations: {} (exhaustive: {exhaustive})", r.evaluations).unwrap();
    s
}

pub fn locate(a: LocateArgs) -> Result<Outcome> {
    let net = load_network(&a.search.network)?;
    let seed = a.search.seed.resolve();
    let cfg = config(&a.search, Some(&a.anneal), a.accuracy, seed)?;
    let dnet = cfg.discretize(&net)?;
    let sc = scenario(&net, &dnet, &a.fault)?;
    let measured = simulate_fault(&dnet, &sc)?;
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        measured.write_csv(create(dir.join("measured.csv"))?)?;
    }
    let locator = match Locator::new(dnet, &measured, &cfg) {
        Ok(l) => l,
        Err(LocateError::NoTransient) => return Ok(Outcome::NoTransient),
        Err(e) => return Err(e.into()),
    };
    let r = locator.locate(cfg.mode, &cfg.sa_params())?;
    log::info!("located in {:.2} s, {} distinct simulations", r.wall_time, locator.simulations());

    let text = summary(&net, &locator, &cfg, &r);
    print!("{text}");
    if let Some(dir) = &a.out {
        fs::write(dir.join("summary.txt"), &text).context("cannot write summary.txt")?;
        for p in &r.per_path {
            if let Some(t) = &p.trace {
                t.write_csv(create(dir.join(format!("trace_path{}.csv", p.path + 1)))?)?;
            }
            if let Some(c) = &p.curve {
                c.write_csv(create(dir.join(format!("sweep_path{}.csv", p.path + 1)))?)?;
            }
        }
    }
    Ok(Outcome::Done)
}

pub fn sweep(a: SweepArgs) -> Result<Outcome> {
    let net = load_network(&a.search.network)?;
    let seed = a.search.seed.resolve();
    let cfg = config(&a.search, None, a.step, seed)?;
    let dnet = cfg.discretize(&net)?;
    let sc = scenario(&net, &dnet, &a.fault)?;
    let measured = simulate_fault(&dnet, &sc)?;
    let locator = Locator::accepting_silence(dnet, &measured, &cfg)?;
    let r = locator.locate(SearchMode::Exhaustive, &cfg.sa_params())?;

    out_dir(&a.out)?;
    for p in &r.per_path {
        let curve = p.curve.as_ref().expect("exhaustive mode keeps curves");
        curve.write_csv(create(a.out.join(format!("sweep_path{}.csv", p.path + 1)))?)?;
        println!(
            "path {} ({}): {} points, max at {} m, energy {:.6e} A2us",
            p.path + 1,
            path_name(&net, &locator, p.path),
            curve.positions.len(),
            p.position,
            p.energy
        );
    }
    println!("evaluations: {}", r.evaluations);
    Ok(Outcome::Done)
}

pub fn decompose(a: DecomposeArgs) -> Result<Outcome> {
    let net = load_network(&a.network)?;
    let d = match net.pinned_decomposition() {
        Some(d) if !a.unpinned => d,
        _ => decompose_with_seed(&net.graph(), a.seed.resolve())?,
    };
    println!("k={}", d.len());
    for p in d.paths() {
        // Open paths read from the lower-numbered end; direction is arbitrary.
        let mut nodes = p.nodes().to_vec();
        if !p.is_closed() && p.end() < p.start() {
            nodes.reverse();
        }
        let labels: Vec<&str> = nodes.iter().map(|&n| net.nodes()[n].as_str()).collect();
        println!("{}", labels.join(" "));
    }
    Ok(Outcome::Done)
}

fn read_scenarios(path: &Path) -> Result<Vec<FaultSpec>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read scenario file {}", path.display()))?;
    let mut specs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let spec = line
            .parse()
            .map_err(|e: String| anyhow::anyhow!("{}:{}: {e}", path.display(), n + 1))?;
        specs.push(spec);
    }
    Ok(specs)
}

pub fn campaign(a: CampaignArgs) -> Result<Outcome> {
    let net = load_network(&a.search.network)?;
    let seed = a.search.seed.resolve();
    let cfg = config(&a.search, Some(&a.anneal), a.accuracy, seed)?;
    let dnet = cfg.discretize(&net)?;
    let mut specs = a.fault.clone();
    if let Some(file) = &a.scenarios {
        specs.extend(read_scenarios(file)?);
    }
    if specs.is_empty() {
        bail!("no scenarios: give --fault or --scenarios");
    }
    let scenarios = specs
        .iter()
        .map(|f| scenario(&net, &dnet, f))
        .collect::<Result<Vec<_>>>()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .context("cannot start worker threads")?;
    let report = pool.install(|| locate_campaign(&net, &scenarios, &cfg, a.repeats))?;

    if let Some(dir) = &a.out {
        out_dir(dir)?;
        report.write_csv(create(dir.join("campaign.csv"))?)?;
    }
    println!("mode: {}  seed: {seed}  repeats: {}", cfg.mode, a.repeats);
    for (s, spec) in report.summaries.iter().zip(&specs) {
        let fault = format!(
            "edge={},offset={},R={},angle={}",
            spec.edge, spec.offset, spec.resistance, spec.angle
        );
        match &s.error {
            Some(e) => println!("scenario {} [{fault}]: error: {e}", s.scenario),
            None => println!(
                "scenario {} [{fault}]: success {:.0}%, evaluations mean {:.1} min {} max {} (exhaustive {})",
                s.scenario,
                100.0 * s.success_rate,
                s.mean_evaluations,
                s.min_evaluations,
                s.max_evaluations,
                s.exhaustive_evaluations
            ),
        }
    }
    Ok(Outcome::Done)
}
