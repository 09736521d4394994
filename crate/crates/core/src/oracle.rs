//! Closed-form frequency-domain model of a single uniform lossless line,
//! used to check the time-domain simulator and the energy-argmax principle.
//!
//! Geometry: the measurement end sits at `x = 0` behind a resistive
//! terminal impedance `Z0`; the fault at `x_f` acts as a voltage source
//! `U_f(w)`. With `gamma = jw/c`,
//!
//! ```text
//! U0(w)  = (1 + rho) e^{-gamma x_f} / (1 + rho e^{-2 gamma x_f}) * U_f(w)
//! I(x',w) = (1 + rho)^2 e^{-gamma (x' - x_f)}
//!           / [Z0 (1 + rho e^{-2 gamma x'}) (1 + rho e^{2 gamma x_f})] * conj(U_f(w))
//! ```
//!
//! where `rho = (Z0 - Zc) / (Z0 + Zc)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::network::LineParams;

/// Denominators smaller than this are treated as exact resonances.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid setup: {0}")]
    InvalidSetup(String),
    #[error("transfer function is singular at omega = {omega} rad/s")]
    Singular { omega: f64 },
}

pub type Result<T, E = OracleError> = std::result::Result<T, E>;

/// `(Z0 - Zc) / (Z0 + Zc)`.
pub fn reflection_coefficient(z0: f64, zc: f64) -> f64 {
    (z0 - zc) / (z0 + zc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleLineSetup {
    params: LineParams,
    length: f64,
    z0: f64,
    fault_position: f64,
}

impl SingleLineSetup {
    /// The line's series resistance is dropped: the closed forms are lossless.
    pub fn new(params: LineParams, length: f64, z0: f64, fault_position: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(OracleError::InvalidSetup(format!("length must be positive, got {length}")));
        }
        if !(z0 > 0.0) {
            return Err(OracleError::InvalidSetup(format!("Z0 must be positive, got {z0}")));
        }
        if !(fault_position > 0.0 && fault_position < length) {
            return Err(OracleError::InvalidSetup(format!(
                "fault position {fault_position} m must lie strictly inside (0, {length})"
            )));
        }
        Ok(SingleLineSetup {
            params: params.lossless(),
            length,
            z0,
            fault_position,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn fault_position(&self) -> f64 {
        self.fault_position
    }

    pub fn zc(&self) -> f64 {
        self.params.characteristic_impedance()
    }

    pub fn speed(&self) -> f64 {
        self.params.propagation_speed()
    }

    pub fn rho(&self) -> f64 {
        reflection_coefficient(self.z0, self.zc())
    }

    fn gamma(&self, omega: f64) -> Complex64 {
        Complex64::new(0.0, omega / self.speed())
    }

    /// `U0 / U_f` at `omega`.
    pub fn transfer(&self, omega: f64) -> Result<Complex64> {
        let g = self.gamma(omega);
        let rho = self.rho();
        let denom = 1.0 + rho * (-2.0 * g * self.fault_position).exp();
        if denom.norm() < SINGULAR_THRESHOLD {
            return Err(OracleError::Singular { omega });
        }
        Ok((1.0 + rho) * (-g * self.fault_position).exp() / denom)
    }

    /// `I(x') / conj(U_f)` at `omega`.
    pub fn guess_transfer(&self, x_guess: f64, omega: f64) -> Result<Complex64> {
        let g = self.gamma(omega);
        let rho = self.rho();
        let xf = self.fault_position;
        let d1 = 1.0 + rho * (-2.0 * g * x_guess).exp();
        let d2 = 1.0 + rho * (2.0 * g * xf).exp();
        let denom = self.z0 * d1 * d2;
        if d1.norm() < SINGULAR_THRESHOLD || d2.norm() < SINGULAR_THRESHOLD {
            return Err(OracleError::Singular { omega });
        }
        Ok((1.0 + rho).powi(2) * (-g * (x_guess - xf)).exp() / denom)
    }
}

/// Voltage spectrum at the measurement end for a fault spectrum `uf`.
pub fn observed_voltage_spectrum(setup: &SingleLineSetup, omega: f64, uf: Complex64) -> Result<Complex64> {
    if !(omega >= 0.0) {
        return Err(OracleError::InvalidSetup(format!("omega must be >= 0, got {omega}")));
    }
    Ok(setup.transfer(omega)? * uf)
}

/// Current spectrum in a guessed short at `x_guess` when the conjugated fault
/// spectrum is re-injected from the measurement end.
pub fn guess_current_spectrum(
    setup: &SingleLineSetup,
    x_guess: f64,
    omega: f64,
    uf_conj: Complex64,
) -> Result<Complex64> {
    if !(x_guess > 0.0 && x_guess < setup.length) {
        return Err(OracleError::InvalidSetup(format!(
            "guess {x_guess} m must lie strictly inside (0, {})",
            setup.length
        )));
    }
    Ok(setup.guess_transfer(x_guess, omega)? * uf_conj)
}

/// Angular frequency of DFT bin `k` of an `n`-point transform at step `dt`;
/// bins above `n/2` map to negative frequencies.
pub fn bin_omega(k: usize, n: usize, dt: f64) -> f64 {
    let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
    2.0 * PI * signed / (n as f64 * dt)
}

/// Forward DFT of a real sequence, unnormalized.
pub fn spectrum(samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Inverse DFT normalized by `1/n`; returns the real parts.
pub fn inverse_spectrum(spec: &[Complex64]) -> Vec<f64> {
    let mut buf = spec.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    let n = buf.len() as f64;
    buf.iter().map(|c| c.re / n).collect()
}

/// Guess-current energy for each position, A²·µs.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyCurve {
    pub positions: Vec<f64>,
    pub energies: Vec<f64>,
    /// Bins dropped as singular, summed over all positions.
    pub excluded_bins: usize,
}

impl EnergyCurve {
    /// Position of the largest energy; ties go to the smaller position.
    pub fn argmax(&self) -> Option<(f64, f64)> {
        let mut best: Option<(f64, f64)> = None;
        for (&x, &e) in self.positions.iter().zip(&self.energies) {
            if best.is_none_or(|(_, b)| e > b) {
                best = Some((x, e));
            }
        }
        best
    }

    /// `position_m,energy` rows.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["position_m", "energy"])?;
        for (x, e) in self.positions.iter().zip(&self.energies) {
            w.write_record([format!("{x}"), format!("{e:.8e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Guess-current spectrum on every DFT bin for `fault_spectrum` (an
/// `n`-point transform at step `dt`). Singular bins are zeroed and counted.
pub fn guess_current_bins(
    setup: &SingleLineSetup,
    fault_spectrum: &[Complex64],
    dt: f64,
    x_guess: f64,
) -> (Vec<Complex64>, usize) {
    let n = fault_spectrum.len();
    let mut excluded = 0;
    let bins = fault_spectrum
        .iter()
        .enumerate()
        .map(|(k, uf)| match setup.guess_transfer(x_guess, bin_omega(k, n, dt)) {
            Ok(h) => h * uf.conj(),
            Err(_) => {
                excluded += 1;
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    (bins, excluded)
}

/// Energy of the guess current at each `x_grid` position via Parseval:
/// `sum_n i[n]^2 dt = (dt / n) sum_k |I_k|^2`, reported in A²·µs.
pub fn analytic_energy_curve(
    setup: &SingleLineSetup,
    fault_spectrum: &[Complex64],
    dt: f64,
    x_grid: &[f64],
) -> EnergyCurve {
    let n = fault_spectrum.len();
    let rho = setup.rho();
    let omegas: Vec<f64> = (0..n).map(|k| bin_omega(k, n, dt)).collect();
    // |I_k|^2 = w_k / |1 + rho e^{-2 gamma x'}|^2: the fault-side factor is shared.
    let mut singular_fault_side = 0;
    let weights: Vec<f64> = omegas
        .iter()
        .zip(fault_spectrum)
        .map(|(&w, uf)| {
            let d2 = 1.0 + rho * (2.0 * setup.gamma(w) * setup.fault_position).exp();
            if d2.norm() < SINGULAR_THRESHOLD {
                singular_fault_side += 1;
                return 0.0;
            }
            ((1.0 + rho).powi(4) * uf.norm_sqr()) / (setup.z0 * setup.z0 * d2.norm_sqr())
        })
        .collect();
    let mut excluded_bins = singular_fault_side * x_grid.len();
    let energies = x_grid
        .iter()
        .map(|&x| {
            let mut sum = 0.0;
            for (&w, &weight) in omegas.iter().zip(&weights) {
                let d1 = 1.0 + rho * (-2.0 * setup.gamma(w) * x).exp();
                if d1.norm() < SINGULAR_THRESHOLD {
                    excluded_bins += 1;
                    continue;
                }
                sum += weight / d1.norm_sqr();
            }
            sum * dt / n as f64 * 1e6
        })
        .collect();
    if excluded_bins > 0 {
        log::warn!("{excluded_bins} singular bins excluded from the energy curve");
    }
    EnergyCurve {
        positions: x_grid.to_vec(),
        energies,
        excluded_bins,
    }
}

/// A step of height `amplitude` switched on at `t = 0` and decaying as a
/// damped sinusoid; broadband and free of wrap-around for long windows.
pub fn synthetic_fault_transient(n: usize, dt: f64, amplitude: f64, ring_hz: f64, decay_s: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let t = k as f64 * dt;
            amplitude * (-t / decay_s).exp() * (1.0 + 0.3 * (2.0 * PI * ring_hz * t).sin())
        })
        .collect()
}
