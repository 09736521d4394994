use std::io::{Read, Write};

use super::{Result, SimError};

/// Uniformly sampled signal. `dt` and `start_time` are in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    dt: f64,
    start_time: f64,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, dt: f64, start_time: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SimError::InvalidWaveform(format!("dt must be positive, got {dt}")));
        }
        if samples.is_empty() {
            return Err(SimError::InvalidWaveform("waveform has no samples".into()));
        }
        Ok(Waveform {
            samples,
            dt,
            start_time,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Span covered by the samples, `len * dt`.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }

    pub fn time(&self, index: usize) -> f64 {
        self.start_time + index as f64 * self.dt
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_all_zero(&self) -> bool {
        self.samples.iter().all(|&x| x == 0.0)
    }

    pub fn scaled(&self, alpha: f64) -> Waveform {
        Waveform {
            samples: self.samples.iter().map(|x| x * alpha).collect(),
            ..*self
        }
    }

    /// Linear interpolation onto a grid with step `dt`, same start time.
    pub fn resampled(&self, dt: f64) -> Result<Waveform> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SimError::InvalidWaveform(format!("dt must be positive, got {dt}")));
        }
        let last = (self.samples.len() - 1) as f64 * self.dt;
        let count = (last / dt + 1e-9).floor() as usize + 1;
        let samples = (0..count)
            .map(|j| {
                let x = j as f64 * dt / self.dt;
                let k = (x.floor() as usize).min(self.samples.len() - 1);
                let frac = x - k as f64;
                match self.samples.get(k + 1) {
                    Some(&next) => self.samples[k] * (1.0 - frac) + next * frac,
                    None => self.samples[k],
                }
            })
            .collect();
        Waveform::new(samples, dt, self.start_time)
    }

    /// Writes `time_us,value` rows with 9 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time_us", "value"])?;
        for (k, &x) in self.samples.iter().enumerate() {
            w.write_record([format!("{:.8e}", self.time(k) * 1e6), format!("{x:.8e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format produced by [`write_csv`](Self::write_csv). The time
    /// column must be uniformly spaced.
    pub fn read_csv<R: Read>(input: R) -> Result<Waveform> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "time_us" || &headers[1] != "value" {
            return Err(SimError::InvalidWaveform(format!(
                "expected header `time_us,value`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| SimError::InvalidWaveform(format!("bad number on data row {}", row + 1)))
            };
            times.push(parse(0)? * 1e-6);
            values.push(parse(1)?);
        }
        if times.len() < 2 {
            return Err(SimError::InvalidWaveform(
                "need at least two samples to infer the time step".into(),
            ));
        }
        let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
        for (k, t) in times.iter().enumerate() {
            let expected = times[0] + k as f64 * dt;
            if (t - expected).abs() > 1e-6 * dt.max(t.abs()) + 1e-3 * dt {
                return Err(SimError::InvalidWaveform(format!(
                    "non-uniform time step at data row {}",
                    k + 1
                )));
            }
        }
        Waveform::new(values, dt, times[0])
    }
}

/// Samples in reverse order, same `dt`.
pub fn time_reverse(w: &Waveform) -> Waveform {
    let mut samples = w.samples.clone();
    samples.reverse();
    Waveform {
        samples,
        dt: w.dt,
        start_time: w.start_time,
    }
}

/// `sum(x^2) * dt`, reported in A^2 us for a current waveform.
pub fn signal_energy(w: &Waveform) -> f64 {
    w.samples.iter().map(|x| x * x).sum::<f64>() * w.dt * 1e6
}
