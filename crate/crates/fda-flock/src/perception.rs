//! Each agent's view of its neighbors: exact under nominal conditions,
//! delayed and noise-corrupted under the perturbed model.
//!
//! Perception never mutates shared state: the step loop writes one snapshot
//! per step into the [`HistoryBuffer`], and every noise value is drawn from
//! a stream keyed by `(seed, step, observer, neighbor, channel)`, so views
//! for different agents can be computed in any order, or in parallel, with
//! identical results.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{tag, KeyedStream};
use crate::state::FlockState;
use crate::vec::VecM;

/// A neighbor's state as seen by one observer. Under nominal perception the
/// fields equal the neighbor's current true state; under delay and noise
/// they are the delayed snapshot plus a per-(observer, neighbor) Gaussian
/// perturbation.
#[derive(Clone, Debug, PartialEq)]
pub struct PerceivedNeighbor {
    pub index: usize,
    pub p: VecM,
    pub v: VecM,
    pub u: VecM,
}

/// Fixed-lag ring of flock snapshots, newest last. Capacity is
/// `lag_steps + 1` so the delayed snapshot is always retained.
#[derive(Clone, Debug)]
pub struct HistoryBuffer {
    capacity: usize,
    snapshots: VecDeque<FlockState>,
}

impl HistoryBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1);
        HistoryBuffer {
            capacity,
            snapshots: VecDeque::with_capacity(capacity + 1),
        }
    }

    pub fn with_lag(lag_steps: usize) -> Self {
        Self::new(lag_steps + 1)
    }

    pub fn push(&mut self, state: FlockState) {
        if let Some(newest) = self.snapshots.back() {
            debug_assert_eq!(state.step, newest.step + 1, "snapshots must be consecutive");
        }
        self.snapshots.push_back(state);
        while self.snapshots.len() > self.capacity {
            self.snapshots.pop_front();
        }
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// The current step's snapshot. Panics on an empty buffer; the stepper
    /// seeds the buffer with the initial state before any read.
    pub fn newest(&self) -> &FlockState {
        self.snapshots.back().expect("history buffer is empty")
    }
}

/// The snapshot `lag_steps` behind the newest, clamped to the oldest
/// retained snapshot during warm-up (before `lag_steps` steps have
/// elapsed, the initial state stands in for the delayed one).
pub fn delayed_state(buffer: &HistoryBuffer, lag_steps: usize) -> &FlockState {
    let len = buffer.snapshots.len();
    assert!(len >= 1, "history buffer is empty");
    let back = lag_steps.min(len - 1);
    &buffer.snapshots[len - 1 - back]
}

/// Sinusoidal standard-deviation schedules for the three perception
/// channels: `sigma_c(t) = base_c + amp_c * sin(omega * t + phase_c)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSchedule {
    pub base_p: f64,
    pub amp_p: f64,
    pub base_v: f64,
    pub amp_v: f64,
    pub base_u: f64,
    pub amp_u: f64,
    pub omega: f64,
    pub phase_p: f64,
    pub phase_v: f64,
    pub phase_u: f64,
}

impl Default for NoiseSchedule {
    /// The shipped perturbation scenario: position, velocity, and control
    /// noise oscillating at 5 rad/s with staggered phases.
    fn default() -> Self {
        NoiseSchedule {
            base_p: 0.5,
            amp_p: 0.10,
            base_v: 0.2,
            amp_v: 0.05,
            base_u: 0.1,
            amp_u: 0.02,
            omega: 5.0,
            phase_p: 0.0,
            phase_v: std::f64::consts::FRAC_PI_4,
            phase_u: std::f64::consts::FRAC_PI_2,
        }
    }
}

impl NoiseSchedule {
    /// All-zero schedule: perturbed-mode plumbing with no actual noise.
    pub fn zero() -> Self {
        NoiseSchedule {
            base_p: 0.0,
            amp_p: 0.0,
            base_v: 0.0,
            amp_v: 0.0,
            base_u: 0.0,
            amp_u: 0.0,
            omega: 0.0,
            phase_p: 0.0,
            phase_v: 0.0,
            phase_u: 0.0,
        }
    }

    /// The three channel standard deviations at time `t`.
    pub fn sigma_at(&self, t: f64) -> (f64, f64, f64) {
        (
            self.base_p + self.amp_p * (self.omega * t + self.phase_p).sin(),
            self.base_v + self.amp_v * (self.omega * t + self.phase_v).sin(),
            self.base_u + self.amp_u * (self.omega * t + self.phase_u).sin(),
        )
    }

    /// Every channel must stay nonnegative over the whole run. Zero is
    /// allowed (it disables the channel); a negative standard deviation is
    /// meaningless.
    pub fn validate(&self, t_final: f64) -> Result<()> {
        for (field, base, amp, phase) in [
            ("noise.sigma_p", self.base_p, self.amp_p, self.phase_p),
            ("noise.sigma_v", self.base_v, self.amp_v, self.phase_v),
            ("noise.sigma_u", self.base_u, self.amp_u, self.phase_u),
        ] {
            let min = sinusoid_min(base, amp, self.omega, phase, t_final);
            if min < 0.0 {
                return Err(Error::invalid_config(
                    field,
                    format!("schedule dips to {min:.6} (< 0) within [0, {t_final}] s"),
                ));
            }
        }
        Ok(())
    }
}

/// Exact minimum of `base + amp * sin(omega t + phase)` over `[0, t_final]`:
/// endpoints plus interior critical points.
fn sinusoid_min(base: f64, amp: f64, omega: f64, phase: f64, t_final: f64) -> f64 {
    use std::f64::consts::PI;
    // sin(w t + p) with w < 0 equals -sin(|w| t - p); fold to w >= 0.
    let (amp, omega, phase) = if omega < 0.0 {
        (-amp, -omega, -phase)
    } else {
        (amp, omega, phase)
    };
    let value = |t: f64| base + amp * (omega * t + phase).sin();
    let mut min = value(0.0).min(value(t_final));
    if omega > 0.0 {
        // Critical points at omega t + phase = pi/2 + k pi for integer k.
        let k_lo = (phase / PI - 0.5).ceil();
        let k_hi = ((omega * t_final + phase) / PI - 0.5).floor();
        if k_hi - k_lo > 10_000.0 {
            // Enough oscillations that the full swing is attained.
            return min.min(base - amp.abs());
        }
        let mut k = k_lo;
        while k <= k_hi {
            let t = ((0.5 + k) * PI - phase) / omega;
            if (0.0..=t_final).contains(&t) {
                min = min.min(value(t));
            }
            k += 1.0;
        }
    }
    min
}

/// Perception channels; part of the noise stream key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    Position = 0,
    Velocity = 1,
    Control = 2,
}

/// One isotropic Gaussian perturbation, fully determined by its key. A
/// fresh, independent draw exists per (step, observer, neighbor, channel);
/// two observers of the same neighbor see different noise.
pub fn noise_draw(
    seed: u64,
    step: u64,
    observer: usize,
    neighbor: usize,
    channel: Channel,
    m: usize,
    sigma: f64,
) -> VecM {
    let mut stream = KeyedStream::from_key(&[
        seed,
        tag::NOISE,
        step,
        observer as u64,
        neighbor as u64,
        channel as u64,
    ]);
    stream.next_normal_vec(m, sigma)
}

/// How neighbor states are observed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Perturbation {
    /// Exact current states; delay and noise bypassed entirely.
    Nominal,
    /// Fixed-lag delayed states plus per-link Gaussian noise.
    DelayNoise(NoiseSchedule),
}

/// Resolve one observer's views of its neighbors from the state history.
///
/// Under delay and noise, the neighbor states come from the snapshot
/// `lag_steps` back (clamped during warm-up) and the noise standard
/// deviations are evaluated at the *current* time.
pub fn perceive(
    buffer: &HistoryBuffer,
    observer: usize,
    neighbors: &[usize],
    perturbation: &Perturbation,
    lag_steps: usize,
    seed: u64,
) -> Vec<PerceivedNeighbor> {
    let now = buffer.newest();
    match perturbation {
        Perturbation::Nominal => neighbors
            .iter()
            .map(|&j| PerceivedNeighbor {
                index: j,
                p: now.agents[j].position.clone(),
                v: now.agents[j].velocity.clone(),
                u: now.agents[j].control.clone(),
            })
            .collect(),
        Perturbation::DelayNoise(schedule) => {
            let delayed = delayed_state(buffer, lag_steps);
            let (sigma_p, sigma_v, sigma_u) = schedule.sigma_at(now.time);
            neighbors
                .iter()
                .map(|&j| {
                    let a = &delayed.agents[j];
                    let m = a.position.dim();
                    PerceivedNeighbor {
                        index: j,
                        p: &a.position
                            + &noise_draw(seed, now.step, observer, j, Channel::Position, m, sigma_p),
                        v: &a.velocity
                            + &noise_draw(seed, now.step, observer, j, Channel::Velocity, m, sigma_v),
                        u: &a.control
                            + &noise_draw(seed, now.step, observer, j, Channel::Control, m, sigma_u),
                    }
                })
                .collect()
        }
    }
}
