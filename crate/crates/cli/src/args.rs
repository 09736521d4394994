use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use emtr_core::locator::SearchMode;

#[derive(Debug, Parser)]
#[command(name = "emtr", version, about = "Time-reversal fault location on branched line networks")]
pub struct Cli {
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a fault and locate it.
    Locate(LocateArgs),
    /// Simulate a fault and write the energy at every grid point of every path.
    Sweep(SweepArgs),
    /// Print the search-path decomposition of a network.
    Decompose(DecomposeArgs),
    /// Simulate several faults and locate each one repeatedly.
    Campaign(CampaignArgs),
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Network description file.
    #[arg(long)]
    pub network: PathBuf,
    /// Trial shunt resistance in ohms.
    #[arg(long = "guess-r", default_value_t = 20.0)]
    pub guess_r: f64,
    /// Simulation cell size in metres (defaults to the search step).
    #[arg(long)]
    pub dx: Option<f64>,
    /// Seed for annealing and for unpinned decompositions: an integer or `random`.
    #[arg(long, default_value = "0")]
    pub seed: SeedArg,
}

#[derive(Debug, Args)]
pub struct AnnealArgs {
    /// Starting temperature.
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
    /// Cooling coefficient applied on each acceptance.
    #[arg(long, default_value_t = 0.8)]
    pub cooling: f64,
    /// Consecutive rejections that stop a run.
    #[arg(long = "n-term", default_value_t = 10)]
    pub n_term: u32,
    /// Starting position along each path in metres (random when omitted).
    #[arg(long)]
    pub start: Option<f64>,
    /// `sa` or `exhaustive`.
    #[arg(long, default_value = "sa")]
    pub mode: SearchMode,
}

#[derive(Debug, Args)]
pub struct LocateArgs {
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub anneal: AnnealArgs,
    /// `edge=<id>,offset=<m>,R=<ohm>,angle=<deg>`.
    #[arg(long)]
    pub fault: FaultSpec,
    /// Search grid step in metres.
    #[arg(long, default_value_t = 10.0)]
    pub accuracy: f64,
    /// Directory for the waveform and trace/sweep CSVs.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub fault: FaultSpec,
    /// Grid step in metres.
    #[arg(long, alias = "accuracy", default_value_t = 10.0)]
    pub step: f64,
    /// Directory for the per-path CSVs.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub network: PathBuf,
    /// Seed for the decomposition when the file pins no search paths.
    #[arg(long, default_value = "0")]
    pub seed: SeedArg,
    /// Ignore search paths pinned in the file.
    #[arg(long)]
    pub unpinned: bool,
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub anneal: AnnealArgs,
    /// Fault to simulate; repeat the flag for several scenarios.
    #[arg(long)]
    pub fault: Vec<FaultSpec>,
    /// File with one fault spec per line (`#` starts a comment).
    #[arg(long)]
    pub scenarios: Option<PathBuf>,
    #[arg(long, default_value_t = 10.0)]
    pub accuracy: f64,
    /// Locations per scenario, with consecutive seeds.
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Directory for `campaign.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedArg {
    Fixed(u64),
    Random,
}

impl SeedArg {
    pub fn resolve(self) -> u64 {
        match self {
            SeedArg::Fixed(s) => s,
            SeedArg::Random => rand::random(),
        }
    }
}

impl FromStr for SeedArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "random" {
            return Ok(SeedArg::Random);
        }
        s.parse()
            .map(SeedArg::Fixed)
            .map_err(|_| format!("seed must be an integer or `random`, got {s:?}"))
    }
}

/// A fault as given on the command line; the edge is resolved against the
/// network later. `R` defaults to 0 and `angle` to 90.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultSpec {
    pub edge: String,
    pub offset: f64,
    pub resistance: f64,
    pub angle: f64,
}

impl FromStr for FaultSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (mut edge, mut offset) = (None, None);
        let (mut resistance, mut angle) = (0.0, 90.0);
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value in fault spec, got {part:?}"))?;
            let number = || {
                value
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| format!("{key} must be a number, got {value:?}"))
            };
            match key.trim() {
                "edge" => edge = Some(value.trim().to_string()),
                "offset" => offset = Some(number()?),
                "R" => resistance = number()?,
                "angle" => angle = number()?,
                other => return Err(format!("unknown fault field {other:?}")),
            }
        }
        Ok(FaultSpec {
            edge: edge.ok_or("fault spec needs edge=<id>")?,
            offset: offset.ok_or("fault spec needs offset=<m>")?,
            resistance,
            angle,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_and_partial_fault_specs() {
        let f: FaultSpec = "edge=e1,offset=4000,R=0,angle=90".parse().unwrap();
        assert_eq!(
            f,
            FaultSpec {
                edge: "e1".into(),
                offset: 4000.0,
                resistance: 0.0,
                angle: 90.0
            }
        );
        let g: FaultSpec = "offset=1200, edge=e4-9, R=inf".parse().unwrap();
        assert_eq!((g.edge.as_str(), g.resistance, g.angle), ("e4-9", f64::INFINITY, 90.0));
        assert!("edge=e1".parse::<FaultSpec>().is_err());
        assert!("edge=e1,offset=x".parse::<FaultSpec>().is_err());
        assert!("edge=e1,offset=1,phase=3".parse::<FaultSpec>().is_err());
    }

    #[test]
    fn seeds() {
        assert_eq!("7".parse::<SeedArg>().unwrap(), SeedArg::Fixed(7));
        assert_eq!("random".parse::<SeedArg>().unwrap(), SeedArg::Random);
        assert!("-1".parse::<SeedArg>().is_err());
    }
}
