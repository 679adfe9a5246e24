//! Single-memristor model under voltage drive.
//!
//! The device follows the linear ion-drift picture: the doped region of
//! normalized width `x` moves with the current, and the memristance
//! interpolates linearly between `r_on` (fully doped) and `r_off` (undoped).
//! An optional Joglekar window `f(x) = 1 - (2x - 1)^(2p)` slows the drift
//! near the boundaries; `p = 0` disables it.
//!
//! Integration is explicit Euler with the state clamped to `[0, 1]` after
//! every step. Charge and flux are the running sums of the applied current
//! and voltage samples, so `dPhi = M dq` can be checked against the trace.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MemristorParams {
    /// Resistance of the fully doped device (ohms).
    pub r_on: f64,
    /// Resistance of the undoped device (ohms).
    pub r_off: f64,
    /// Device thickness (meters).
    pub d: f64,
    /// Dopant mobility (m^2 / (V s)).
    pub mu_v: f64,
    /// Window exponent `p`; 0 means no window.
    pub window_exponent: u32,
}

impl Default for MemristorParams {
    fn default() -> Self {
        Self {
            r_on: 100.0,
            r_off: 16e3,
            d: 10e-9,
            mu_v: 1e-14,
            window_exponent: 0,
        }
    }
}

impl MemristorParams {
    pub fn validate(&self) -> Result<()> {
        let ok = |c: bool, msg: &str| {
            if c {
                Ok(())
            } else {
                Err(Error::InvalidDeviceParams(msg.to_string()))
            }
        };
        ok(self.r_on.is_finite() && self.r_on > 0.0, "r_on must be positive")?;
        ok(
            self.r_off.is_finite() && self.r_off > self.r_on,
            "r_off must exceed r_on",
        )?;
        ok(self.d.is_finite() && self.d > 0.0, "d must be positive")?;
        ok(self.mu_v.is_finite() && self.mu_v > 0.0, "mu_v must be positive")
    }

    /// Drift coefficient `mu_v * r_on / d^2` (1 / coulomb).
    pub fn drift_coefficient(&self) -> f64 {
        self.mu_v * self.r_on / (self.d * self.d)
    }

    fn window(&self, x: f64) -> f64 {
        match self.window_exponent {
            0 => 1.0,
            p => 1.0 - (2.0 * x - 1.0).powi(2 * p as i32),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MemristorState {
    /// Normalized doped width, always within `[0, 1]`.
    pub x: f64,
    /// Accumulated charge (coulombs).
    pub q: f64,
    /// Accumulated flux (webers).
    pub phi: f64,
    /// Elapsed time (seconds).
    pub t: f64,
}

impl MemristorState {
    pub fn new(x: f64) -> Self {
        Self {
            x,
            ..Default::default()
        }
    }
}

/// `M(x) = r_on * x + r_off * (1 - x)`.
pub fn memristance(state: &MemristorState, params: &MemristorParams) -> f64 {
    memristance_at(state.x, params)
}

fn memristance_at(x: f64, params: &MemristorParams) -> f64 {
    params.r_on * x + params.r_off * (1.0 - x)
}

/// Advances the device by one Euler step of length `dt` under voltage `v`.
///
/// `dt` must be positive; callers that cannot guarantee it should go through
/// [`simulate_waveform`], which validates its inputs.
pub fn step_voltage(
    state: &MemristorState,
    params: &MemristorParams,
    v: f64,
    dt: f64,
) -> MemristorState {
    let m = memristance(state, params);
    let i = v / m;
    advance(state, params, v, i, dt)
}

/// Euler step under a forced current `i`; the terminal voltage is `i * M(x)`.
pub fn step_current(
    state: &MemristorState,
    params: &MemristorParams,
    i: f64,
    dt: f64,
) -> MemristorState {
    let v = i * memristance(state, params);
    advance(state, params, v, i, dt)
}

fn advance(s: &MemristorState, params: &MemristorParams, v: f64, i: f64, dt: f64) -> MemristorState {
    let dx = params.drift_coefficient() * i * params.window(s.x) * dt;
    MemristorState {
        x: (s.x + dx).clamp(0.0, 1.0),
        q: s.q + i * dt,
        phi: s.phi + v * dt,
        t: s.t + dt,
    }
}

/// One integration step of a simulated waveform.
///
/// `v`, `i`, `x` and `m` describe the step itself (`m = M(x)` set the current
/// during it, so `i = v / m` exactly); `t`, `q` and `phi` are taken at the end
/// of the step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    pub v: f64,
    pub i: f64,
    pub q: f64,
    pub phi: f64,
    pub x: f64,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub dt: f64,
    pub samples: Vec<TraceSample>,
    /// State after the last step.
    pub final_state: MemristorState,
}

impl SimTrace {
    pub const CSV_HEADER: &'static str = "t,v,i,q,phi,x,m";

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for s in &self.samples {
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                s.t, s.v, s.i, s.q, s.phi, s.x, s.m
            )?;
        }
        Ok(())
    }
}

/// Drives a device from `x0` with one voltage sample per step.
///
/// `q` and `phi` are recorded as `dt * sum(i)` and `dt * sum(v)` over the
/// samples so far, which keeps the recorded integrals bit-exact with respect
/// to the recorded drive.
pub fn simulate_waveform(
    params: &MemristorParams,
    waveform: &[f64],
    dt: f64,
    x0: f64,
) -> Result<SimTrace> {
    params.validate()?;
    if waveform.is_empty() {
        return Err(Error::EmptyWaveform);
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::NonPositiveStep(dt));
    }
    if !(0.0..=1.0).contains(&x0) {
        return Err(Error::StateOutOfRange(x0));
    }

    let mut state = MemristorState::new(x0);
    let mut sum_i = 0.0;
    let mut sum_v = 0.0;
    let mut samples = Vec::with_capacity(waveform.len());
    for (k, &v) in waveform.iter().enumerate() {
        let x = state.x;
        let m = memristance_at(x, params);
        let i = v / m;
        state = advance(&state, params, v, i, dt);
        sum_i += i;
        sum_v += v;
        state.q = dt * sum_i;
        state.phi = dt * sum_v;
        state.t = (k + 1) as f64 * dt;
        samples.push(TraceSample {
            t: state.t,
            v,
            i,
            q: state.q,
            phi: state.phi,
            x,
            m,
        });
    }
    Ok(SimTrace {
        dt,
        samples,
        final_state: state,
    })
}

/// Discrete check of `dPhi = M dq` along a trace.
///
/// For each pair of consecutive samples the flux increment is compared with
/// the charge increment scaled by the mean memristance of the two samples.
/// The largest mismatch is normalized by the flux range of the trace; a trace
/// with no flux excursion has residual 0.
pub fn verify_flux_charge(trace: &SimTrace) -> Result<f64> {
    let s = &trace.samples;
    if s.len() < 2 {
        return Err(Error::TooFewSamples(s.len()));
    }
    let (lo, hi) = s
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.phi), hi.max(p.phi))
        });
    let range = hi - lo;
    if range == 0.0 {
        return Ok(0.0);
    }
    let worst = s
        .windows(2)
        .map(|w| {
            let dphi = w[1].phi - w[0].phi;
            let dq = w[1].q - w[0].q;
            let m = 0.5 * (w[0].m + w[1].m);
            (dphi - m * dq).abs()
        })
        .fold(0.0, f64::max);
    Ok(worst / range)
}

/// Samples `amplitude * sin(2 pi f t)` at `t = k * dt` for `k = 0..steps`.
pub fn sine_waveform(amplitude: f64, frequency: f64, dt: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|k| amplitude * (std::f64::consts::TAU * frequency * k as f64 * dt).sin())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> MemristorParams {
        MemristorParams::default()
    }

    #[test]
    fn memristance_boundaries_and_midpoint() {
        let p = params();
        assert_eq!(memristance(&MemristorState::new(0.0), &p), p.r_off);
        assert_eq!(memristance(&MemristorState::new(1.0), &p), p.r_on);
        assert_eq!(
            memristance(&MemristorState::new(0.5), &p),
            (p.r_on + p.r_off) / 2.0
        );
    }

    #[test]
    fn zero_drive_only_advances_time() {
        let p = params();
        let s0 = MemristorState::new(0.3);
        let s1 = step_voltage(&s0, &p, 0.0, 1e-3);
        assert_eq!(s1.x, s0.x);
        assert_eq!(s1.q, 0.0);
        assert_eq!(s1.phi, 0.0);
        assert_eq!(s1.t, 1e-3);
    }

    #[test]
    fn strong_drive_saturates_at_one() {
        let p = params();
        let mut s = MemristorState::new(0.1);
        for _ in 0..10_000 {
            s = step_voltage(&s, &p, 5.0, 1e-3);
        }
        assert_eq!(s.x, 1.0);
        let s2 = step_voltage(&s, &p, 5.0, 1e-3);
        assert_eq!(s2.x, 1.0);
    }

    #[test]
    fn constant_current_is_exact_without_window() {
        // Closed form of dx/dt = k I: dx = k I T.
        let p = params();
        let (i, t_total, steps) = (1e-5, 2.0, 1000);
        let dt = t_total / steps as f64;
        let mut s = MemristorState::new(0.2);
        for _ in 0..steps {
            s = step_current(&s, &p, i, dt);
        }
        let expected = p.drift_coefficient() * i * t_total;
        assert!(((s.x - 0.2) - expected).abs() < 1e-12);
    }

    #[test]
    fn window_pins_boundaries() {
        let p = MemristorParams {
            window_exponent: 2,
            ..params()
        };
        let s = step_voltage(&MemristorState::new(1.0), &p, 1.0, 1e-3);
        assert_eq!(s.x, 1.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = params();
        assert_eq!(simulate_waveform(&p, &[], 1e-3, 0.5), Err(Error::EmptyWaveform));
        assert_eq!(
            simulate_waveform(&p, &[1.0], 0.0, 0.5),
            Err(Error::NonPositiveStep(0.0))
        );
        assert_eq!(
            simulate_waveform(&p, &[1.0], 1e-3, 1.5),
            Err(Error::StateOutOfRange(1.5))
        );
        let bad = MemristorParams {
            r_off: 50.0,
            ..p
        };
        assert!(matches!(
            simulate_waveform(&bad, &[1.0], 1e-3, 0.5),
            Err(Error::InvalidDeviceParams(_))
        ));
    }

    #[test]
    fn zero_waveform_trace() {
        let tr = simulate_waveform(&params(), &[0.0; 50], 1e-3, 0.4).unwrap();
        assert_eq!(tr.samples.len(), 50);
        assert!(tr.samples.iter().all(|s| s.x == 0.4 && s.q == 0.0 && s.phi == 0.0));
        assert_eq!(verify_flux_charge(&tr).unwrap(), 0.0);
    }

    #[test]
    fn residual_needs_two_samples() {
        let tr = simulate_waveform(&params(), &[1.0], 1e-3, 0.4).unwrap();
        assert_eq!(verify_flux_charge(&tr), Err(Error::TooFewSamples(1)));
    }

    #[test]
    fn csv_header() {
        let tr = simulate_waveform(&params(), &[0.5, -0.5], 1e-3, 0.4).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,v,i,q,phi,x,m"));
        assert_eq!(lines.count(), 2);
    }
}
