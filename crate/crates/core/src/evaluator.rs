//! Aligned objectives and penalized fitness.
//!
//! The ship transmits from `t = 0` until the data volume is delivered. Rates
//! are piecewise constant over sub-timeslots, with the channel gain sampled
//! at each sub-timeslot's start position. The transmission objective is the
//! exact (fractional) time at which the cumulative data crosses `D`, in
//! timeslots; the sailing objective is the fractional arrival slot.

use serde::{Deserialize, Serialize};

use crate::cgm::ChannelGainMap;
use crate::error::Result;
use crate::geom::Point3;
use crate::kinematics::{integrate_trajectory, steering_penalty, Trajectory};
use crate::radio::{free_space_gain, los_range, shannon_rate};
use crate::scenario::Scenario;

/// Default penalty coefficient for steering violations.
pub const DEFAULT_IOTA: f64 = 1e3;

/// Linear channel gain as a function of ship position.
pub trait GainModel: Sync {
    fn gain(&self, pos: Point3) -> f64;
}

impl<G: GainModel + ?Sized> GainModel for &G {
    fn gain(&self, pos: Point3) -> f64 {
        (**self).gain(pos)
    }
}

/// Same gain everywhere.
#[derive(Debug, Clone, Copy)]
pub struct ConstantGain(pub f64);

impl GainModel for ConstantGain {
    fn gain(&self, _pos: Point3) -> f64 {
        self.0
    }
}

fn slant_distance(pos: Point3, bs_height: f64) -> f64 {
    pos.distance(&Point3::new(0.0, 0.0, bs_height)).max(f64::MIN_POSITIVE)
}

/// Map lookup with a free-space fallback beyond the map extent.
#[derive(Debug, Clone, Copy)]
pub struct MapGain<'a> {
    pub map: &'a ChannelGainMap,
    pub bs_height: f64,
}

impl<'a> MapGain<'a> {
    pub fn new(map: &'a ChannelGainMap, scenario: &Scenario) -> Self {
        Self { map, bs_height: scenario.radio.z_rx }
    }
}

impl GainModel for MapGain<'_> {
    fn gain(&self, pos: Point3) -> f64 {
        self.map.gain_at(pos).unwrap_or_else(|_| {
            free_space_gain(slant_distance(pos, self.bs_height), self.map.metadata().f).unwrap_or(0.0)
        })
    }
}

/// Planning model that ignores the duct: free-space gain inside the radio
/// horizon, nothing outside it.
#[derive(Debug, Clone, Copy)]
pub struct LosFreeSpace {
    pub f: f64,
    pub bs_height: f64,
    pub range: f64,
}

impl LosFreeSpace {
    pub fn new(scenario: &Scenario) -> Self {
        let r = &scenario.radio;
        Self { f: r.f, bs_height: r.z_rx, range: los_range(r.z_tx, r.z_rx) }
    }
}

impl GainModel for LosFreeSpace {
    fn gain(&self, pos: Point3) -> f64 {
        let d = slant_distance(pos, self.bs_height);
        if d <= self.range {
            free_space_gain(d, self.f).unwrap_or(0.0)
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    /// Fractional timeslots until the data volume is delivered.
    pub m1_tilde: f64,
    /// Fractional timeslots until arrival.
    pub m2_tilde: f64,
    /// Summed steering violation over the sailed horizon (rad).
    pub steering_violation: f64,
    /// Cumulative bits at the end of each sub-timeslot. Empty when the
    /// evaluation was run without a curve.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub data_curve: Vec<f64>,
    /// Bits still undelivered on arrival (0 when the transfer completed).
    pub shortfall_bits: f64,
    pub arrived: bool,
    pub feasible: bool,
}

/// Full evaluation including the cumulative data curve.
pub fn evaluate<G: GainModel + ?Sized>(phi: &[f64], scenario: &Scenario, gain: &G) -> Result<EvalResult> {
    let traj = integrate_trajectory(phi, scenario)?;
    Ok(evaluate_trajectory(phi, &traj, scenario, gain, true))
}

/// Objectives only; stops sampling the channel once the data is delivered.
pub fn evaluate_objectives<G: GainModel + ?Sized>(
    phi: &[f64],
    scenario: &Scenario,
    gain: &G,
) -> Result<EvalResult> {
    let traj = integrate_trajectory(phi, scenario)?;
    Ok(evaluate_trajectory(phi, &traj, scenario, gain, false))
}

pub fn evaluate_trajectory<G: GainModel + ?Sized>(
    phi: &[f64],
    traj: &Trajectory,
    scenario: &Scenario,
    gain: &G,
    keep_curve: bool,
) -> EvalResult {
    let m2_tilde = traj.sailing_slots(scenario);
    let d = scenario.d_bits;
    let mut data_curve = Vec::with_capacity(if keep_curve { traj.durations.len() } else { 0 });
    let mut cum = 0.0;
    let mut elapsed = 0.0;
    let mut max_rate = 0.0f64;
    let mut completion: Option<f64> = (d <= 0.0).then_some(0.0);

    for (k, &dur) in traj.durations.iter().enumerate() {
        let rate = shannon_rate(gain.gain(traj.positions[k]), &scenario.radio);
        max_rate = max_rate.max(rate);
        let next = cum + rate * dur;
        if completion.is_none() && next >= d && rate > 0.0 {
            completion = Some(elapsed + (d - cum) / rate);
            if !keep_curve {
                cum = next;
                break;
            }
        }
        cum = next;
        elapsed += dur;
        if keep_curve {
            data_curve.push(cum);
        }
    }

    let horizon = m2_tilde.ceil() as usize + 1;
    let steering_violation = steering_penalty(phi, scenario.dphi_max, horizon);
    let (m1_tilde, shortfall_bits) = match completion {
        Some(t) => (t / scenario.delta_t, 0.0),
        None => {
            let shortfall = d - cum;
            // 1 bit/s/Hz stands in for the best rate when nothing was received
            let per_second = if max_rate > 0.0 { max_rate } else { scenario.radio.bandwidth };
            (m2_tilde + shortfall / (per_second * scenario.delta_t), shortfall)
        }
    };
    let arrived = traj.arrival_slot.is_some();
    let feasible = completion.is_some()
        && arrived
        && m1_tilde <= m2_tilde
        && m2_tilde <= scenario.t_max / scenario.delta_t
        && steering_violation == 0.0;
    EvalResult { m1_tilde, m2_tilde, steering_violation, data_curve, shortfall_bits, arrived, feasible }
}

/// Penalized objective pair `(f1, f2)`.
pub fn fitness(res: &EvalResult, scenario: &Scenario, iota: f64) -> (f64, f64) {
    let steer = iota * res.steering_violation;
    let f1 = res.m1_tilde + (res.m1_tilde - res.m2_tilde).max(0.0) + steer;
    let f2 = res.m2_tilde + (res.m2_tilde - scenario.t_max / scenario.delta_t).max(0.0) + steer;
    (f1, f2)
}
