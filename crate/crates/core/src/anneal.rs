//! Modified simulated annealing over a 1-D grid, plus the exhaustive sweep it
//! is measured against.
//!
//! The annealer cools only when it accepts a move, stops after `n_term`
//! consecutive rejections, and narrows its proposal width while it is
//! stuck. One objective call is one iteration; the trace records them all.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnnealError {
    #[error("invalid annealing parameters: {0}")]
    InvalidParams(String),
    #[error("domain length {length} m holds no grid point at step {step} m")]
    EmptyDomain { length: f64, step: f64 },
}

pub type Result<T, E = AnnealError> = std::result::Result<T, E>;

/// Starting proposal width as a fraction of the domain length.
pub const INITIAL_WIDTH_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaParams {
    /// Starting temperature, in objective units.
    pub t0: f64,
    /// Multiplier applied to the temperature on each acceptance.
    pub cooling: f64,
    /// Consecutive rejections that end the run.
    pub n_term: u32,
    /// Grid spacing of candidate positions, metres.
    pub accuracy: f64,
    /// Starting position; uniform over the grid when `None`.
    pub initial_point: Option<f64>,
    pub seed: u64,
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(AnnealError::InvalidParams(format!("t0 must be > 0, got {}", self.t0)));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(AnnealError::InvalidParams(format!(
                "cooling must be in (0, 1), got {}",
                self.cooling
            )));
        }
        if self.n_term == 0 {
            return Err(AnnealError::InvalidParams("n_term must be >= 1".into()));
        }
        if !(self.accuracy > 0.0 && self.accuracy.is_finite()) {
            return Err(AnnealError::InvalidParams(format!(
                "accuracy must be > 0, got {}",
                self.accuracy
            )));
        }
        Ok(())
    }
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            t0: 1.0,
            cooling: 0.8,
            n_term: 10,
            accuracy: 10.0,
            initial_point: None,
            seed: 0,
        }
    }
}

/// Always accepts an improvement (or a tie); accepts a worse value with
/// probability `exp(-(e_old - e_new) / t)`.
pub fn metropolis_accept<R: Rng + ?Sized>(e_new: f64, e_old: f64, t: f64, rng: &mut R) -> bool {
    if e_new >= e_old {
        return true;
    }
    rng.gen::<f64>() < (-(e_old - e_new) / t).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub position: f64,
    pub value: f64,
    pub accepted: bool,
    /// Temperature after this iteration's decision.
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace {
    pub points: Vec<TracePoint>,
    pub final_position: f64,
    pub final_value: f64,
}

impl OptimizationTrace {
    pub fn evaluations(&self) -> usize {
        self.points.len()
    }

    /// Best point evaluated anywhere in the run.
    pub fn best_seen(&self) -> TracePoint {
        *self
            .points
            .iter()
            .reduce(|a, b| if b.value > a.value { b } else { a })
            .expect("a trace holds at least the starting point")
    }

    /// `iteration,position_m,energy,accepted,temperature` rows.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "position_m", "energy", "accepted", "temperature"])?;
        for (k, p) in self.points.iter().enumerate() {
            w.write_record([
                k.to_string(),
                format!("{}", p.position),
                format!("{:.8e}", p.value),
                p.accepted.to_string(),
                format!("{:.8e}", p.temperature),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Number of grid points `step, 2 step, ..., <= length`.
pub fn grid_count(length: f64, step: f64) -> usize {
    // Tolerate lengths like 20100.000000000004 that are a multiple in intent.
    (length / step + 1e-9).floor() as usize
}

fn grid_point(j: usize, step: f64) -> f64 {
    j as f64 * step
}

/// Maximizes `objective` over `{accuracy, 2 accuracy, ..., <= length}`.
///
/// A proposal moves the current grid index by a nonzero integer drawn
/// uniformly from `[-m, m]`, `m = max(1, floor(w / accuracy))`, and is redrawn
/// until it lands inside the domain.
///
/// The width starts at a fifth of the domain and halves on every rejection
/// once at least half of `n_term` consecutive rejections have piled up. It is
/// *not* restored when a proposal is later accepted: resetting it made the
/// final few proposals far too coarse to settle on a single grid point.
pub fn sa_maximize(mut objective: impl FnMut(f64) -> f64, length: f64, params: &SaParams) -> Result<OptimizationTrace> {
    params.validate()?;
    let m = grid_count(length, params.accuracy);
    if m == 0 {
        return Err(AnnealError::EmptyDomain {
            length,
            step: params.accuracy,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let half = params.n_term.div_ceil(2);

    let mut current = match params.initial_point {
        Some(x) => ((x / params.accuracy).round() as usize).clamp(1, m),
        None => rng.gen_range(1..=m),
    };
    let mut value = objective(grid_point(current, params.accuracy));
    let mut temperature = params.t0;
    let mut points = vec![TracePoint {
        position: grid_point(current, params.accuracy),
        value,
        accepted: true,
        temperature,
    }];

    let mut rejections = 0;
    let mut width = INITIAL_WIDTH_FRACTION * length;
    while m > 1 && rejections < params.n_term {
        let span = ((width / params.accuracy).floor() as i64).max(1);
        let candidate = loop {
            let step = rng.gen_range(-span..=span);
            let c = current as i64 + step;
            if step != 0 && c >= 1 && c <= m as i64 {
                break c as usize;
            }
        };
        let x = grid_point(candidate, params.accuracy);
        let e = objective(x);
        let accepted = metropolis_accept(e, value, temperature, &mut rng);
        if accepted {
            current = candidate;
            value = e;
            temperature *= params.cooling;
            rejections = 0;
        } else {
            rejections += 1;
            if rejections >= half {
                width /= 2.0;
            }
        }
        points.push(TracePoint {
            position: x,
            value: e,
            accepted,
            temperature,
        });
    }

    Ok(OptimizationTrace {
        points,
        final_position: grid_point(current, params.accuracy),
        final_value: value,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult {
    pub position: f64,
    pub value: f64,
    pub evaluations: usize,
    /// Every `(position, value)` in grid order.
    pub curve: Vec<(f64, f64)>,
}

/// Evaluates `step, 2 step, ..., <= length`; ties go to the smaller position.
pub fn exhaustive_maximize(mut objective: impl FnMut(f64) -> f64, length: f64, step: f64) -> Result<ExhaustiveResult> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(AnnealError::InvalidParams(format!("step must be > 0, got {step}")));
    }
    let m = grid_count(length, step);
    if m == 0 {
        return Err(AnnealError::EmptyDomain { length, step });
    }
    let curve: Vec<(f64, f64)> = (1..=m)
        .map(|j| {
            let x = grid_point(j, step);
            (x, objective(x))
        })
        .collect();
    let (position, value) = curve
        .iter()
        .copied()
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .expect("nonempty grid");
    Ok(ExhaustiveResult {
        position,
        value,
        evaluations: m,
        curve,
    })
}
