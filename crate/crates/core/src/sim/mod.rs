//! Transient simulation of the line network: fault transients seen at the
//! measurement node, time reversal, and back-injection against a guessed
//! shunt fault.

mod engine;
mod grid;
mod steady;
mod waveform;

use thiserror::Error;

use crate::network::EdgePosition;

pub use engine::Simulation;
pub use grid::{discretize, DiscretizedNetwork, EdgeGrid, Site, Snapped, CFL_SAFETY};
pub use waveform::{signal_energy, time_reverse, Waveform};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid waveform: {0}")]
    InvalidWaveform(String),
    #[error("invalid grid resolution: {0}")]
    InvalidResolution(String),
    #[error("invalid position: {0}")]
    InvalidPosition(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("record window {window:.3e} s is shorter than the {needed:.3e} s travel time to the measurement node")]
    WindowTooShort { window: f64, needed: f64 },
    #[error("node `{0}` has no termination to inject behind")]
    NoTermination(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;

/// Faults at or above this impedance are treated as absent.
pub const OPEN_CIRCUIT_OHMS: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultScenario {
    pub position: EdgePosition,
    /// Ohms; 0 is a bolted fault.
    pub impedance: f64,
    /// Source phase at the closing instant, degrees in `[0, 360)`.
    pub inception_angle: f64,
    /// Seconds.
    pub record_window: f64,
}

impl FaultScenario {
    pub fn new(position: EdgePosition, impedance: f64, inception_angle: f64, record_window: f64) -> Result<Self> {
        let s = FaultScenario {
            position,
            impedance,
            inception_angle,
            record_window,
        };
        s.validate()?;
        Ok(s)
    }

    /// Scenario using the network's default record window.
    pub fn with_default_window(
        dnet: &DiscretizedNetwork,
        position: EdgePosition,
        impedance: f64,
        inception_angle: f64,
    ) -> Result<Self> {
        Self::new(position, impedance, inception_angle, dnet.default_record_window())
    }

    fn validate(&self) -> Result<()> {
        if !(self.impedance >= 0.0) {
            return Err(SimError::InvalidScenario(format!(
                "fault impedance must be >= 0, got {}",
                self.impedance
            )));
        }
        if !(0.0..360.0).contains(&self.inception_angle) {
            return Err(SimError::InvalidScenario(format!(
                "inception angle must be in [0, 360), got {}",
                self.inception_angle
            )));
        }
        if !(self.record_window > 0.0 && self.record_window.is_finite()) {
            return Err(SimError::InvalidScenario(format!(
                "record window must be positive, got {}",
                self.record_window
            )));
        }
        Ok(())
    }
}

/// Fault-generated voltage at the observation node: the faulted run minus an
/// identical healthy run, both started from the sinusoidal steady state with
/// the fault closing at `t = 0`.
pub fn simulate_fault(dnet: &DiscretizedNetwork, scenario: &FaultScenario) -> Result<Waveform> {
    scenario.validate()?;
    let net = dnet.network();
    let snapped = dnet.snap(&scenario.position)?;
    let obs = net.observation_node();
    let travel = net.travel_time_to_node(&snapped.position, obs);
    if scenario.record_window < travel {
        return Err(SimError::WindowTooShort {
            window: scenario.record_window,
            needed: travel,
        });
    }
    let steps = (scenario.record_window / dnet.dt()).ceil() as usize;
    let obs_site = Site::Node(obs);

    let record = |fault: Option<f64>| {
        let mut sim = Simulation::new(dnet).with_ac_steady_state(scenario.inception_angle);
        if let Some(r) = fault {
            sim.add_shunt(snapped.site, r);
        }
        let mut out = Vec::with_capacity(steps + 1);
        out.push(sim.voltage(obs_site));
        sim.run(steps, |s| out.push(s.voltage(obs_site)));
        out
    };

    let healthy = record(None);
    let samples = if scenario.impedance >= OPEN_CIRCUIT_OHMS {
        vec![0.0; healthy.len()]
    } else {
        let faulted = record(Some(scenario.impedance));
        faulted.iter().zip(&healthy).map(|(f, h)| f - h).collect()
    };
    Waveform::new(samples, dnet.dt(), 0.0)
}

/// Pre-fault voltage at `position` over `window` seconds, sampled at the
/// grid step from `t = 0`.
pub fn prefault_voltage(
    dnet: &DiscretizedNetwork,
    position: &EdgePosition,
    inception_angle: f64,
    window: f64,
) -> Result<Waveform> {
    let snapped = dnet.snap(position)?;
    let steps = (window / dnet.dt()).ceil() as usize;
    let mut sim = Simulation::new(dnet).with_ac_steady_state(inception_angle);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(sim.voltage(snapped.site));
    sim.run(steps, |s| out.push(s.voltage(snapped.site)));
    Waveform::new(out, dnet.dt(), 0.0)
}

/// Current through a shunt of `guess_impedance` at `guess` while `reversed`
/// drives the observation node from behind its termination. The network is
/// the healthy one with the source EMF at zero. The run lasts the drive
/// length plus five longest round-trip times.
pub fn back_inject(
    dnet: &DiscretizedNetwork,
    reversed: &Waveform,
    guess: &EdgePosition,
    guess_impedance: f64,
) -> Result<Waveform> {
    if !(guess_impedance >= 0.0) {
        return Err(SimError::InvalidScenario(format!(
            "guess impedance must be >= 0, got {guess_impedance}"
        )));
    }
    let snapped = dnet.snap(guess)?;
    let drive = aligned_drive(dnet, reversed)?;
    let steps = drive.len() + dnet.injection_tail_steps();
    let obs = dnet.network().observation_node();
    let mut sim = Simulation::new(dnet).with_drive(obs, drive)?;
    let shunt = sim.add_shunt(snapped.site, guess_impedance);
    let mut out = Vec::with_capacity(steps);
    sim.run(steps, |s| out.push(s.shunt_current(shunt)));
    Waveform::new(out, dnet.dt(), dnet.dt())
}

/// Drive samples on the grid step, resampled linearly when the steps differ.
pub(crate) fn aligned_drive(dnet: &DiscretizedNetwork, w: &Waveform) -> Result<Vec<f64>> {
    if w.is_empty() {
        return Err(SimError::InvalidWaveform("empty drive waveform".into()));
    }
    if (w.dt() - dnet.dt()).abs() <= 1e-9 * dnet.dt() {
        Ok(w.samples().to_vec())
    } else {
        Ok(w.resampled(dnet.dt())?.into_samples())
    }
}

#[cfg(test)]
mod tests;
