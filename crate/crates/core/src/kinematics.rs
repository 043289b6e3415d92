//! Heading vectors to trajectories.
//!
//! Timeslots are numbered from 1. Slot `k` starts at `positions[(k-1)*m]`
//! and is sailed along heading `phi[k-1]`, where `m` is the number of
//! sub-timeslots per slot. At the start of each slot the ship checks whether
//! the destination is within one slot's sailing distance; if so it sails the
//! remaining straight leg and stops.

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geom::Point3;
use crate::scenario::Scenario;

/// Heading angles (rad, measured from the x axis), one per timeslot.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HeadingVector(pub Vec<f64>);

impl HeadingVector {
    pub fn new(phi: Vec<f64>) -> Self {
        Self(phi)
    }

    pub fn constant(phi: f64, len: usize) -> Self {
        Self(vec![phi; len])
    }

    pub fn clamp_to(&mut self, [lo, hi]: [f64; 2]) {
        for p in &mut self.0 {
            *p = p.clamp(lo, hi);
        }
    }
}

impl Deref for HeadingVector {
    type Target = Vec<f64>;
    fn deref(&self) -> &Vec<f64> {
        &self.0
    }
}

impl DerefMut for HeadingVector {
    fn deref_mut(&mut self) -> &mut Vec<f64> {
        &mut self.0
    }
}

/// Sub-timeslot resolution path.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `positions[k]` is the start of sub-timeslot `k`; the final entry is
    /// the end point, so there is one more position than durations.
    pub positions: Vec<Point3>,
    /// Length of each sub-timeslot (s): `delta_small_t`, except for a
    /// shorter last one on the arrival leg.
    pub durations: Vec<f64>,
    /// Sub-timeslots per timeslot.
    pub sub_per_slot: usize,
    /// Timeslot in which the destination was reached, if it was.
    pub arrival_slot: Option<usize>,
    /// Distance to the destination at the start of the arrival slot, or
    /// at the end of the last slot when the ship never arrives.
    pub arrival_residual: f64,
    /// Number of timeslots sailed (including the arrival slot).
    pub slots_sailed: usize,
}

impl Trajectory {
    /// Fractional sailing timeslots `M2 - 1 + residual / (v dt)`. Without an
    /// arrival the slot count is `len(phi) + 1`.
    pub fn sailing_slots(&self, scenario: &Scenario) -> f64 {
        let m2 = self.arrival_slot.unwrap_or(self.slots_sailed + 1) as f64;
        m2 - 1.0 + self.arrival_residual / scenario.slot_distance()
    }

    /// (timeslot, sub-timeslot) labels of sub-timeslot `k`, 1-based slot.
    pub fn slot_of(&self, k: usize) -> (usize, usize) {
        (k / self.sub_per_slot + 1, k % self.sub_per_slot)
    }
}

fn planar(p: Point3, z: f64) -> Point3 {
    Point3::new(p.x, p.y, z)
}

/// Integrates `phi` from `scenario.a` toward `scenario.b` at constant speed.
pub fn integrate_trajectory(phi: &[f64], scenario: &Scenario) -> Result<Trajectory> {
    let m = scenario.sub_slots()?;
    let z = scenario.radio.z_tx;
    let dest = planar(scenario.b, z);
    let step = scenario.v * scenario.delta_small_t;
    let capture = scenario.slot_distance();

    let mut positions = Vec::with_capacity(phi.len() * m + 1);
    let mut durations = Vec::with_capacity(phi.len() * m);
    let mut pos = planar(scenario.a, z);
    positions.push(pos);

    for (i, &heading) in phi.iter().enumerate() {
        let to_dest = dest - pos;
        let dist = to_dest.norm();
        if dist <= capture * (1.0 + 1e-12) {
            if dist > 0.0 {
                let dir = to_dest * (1.0 / dist);
                let full = ((dist / step) * (1.0 + 1e-12)).floor().min(m as f64) as usize;
                for n in 1..=full {
                    durations.push(scenario.delta_small_t);
                    positions.push(pos + dir * (step * n as f64));
                }
                let rest = dist - step * full as f64;
                if rest > 1e-9 {
                    durations.push(rest / scenario.v);
                    positions.push(dest);
                } else if let Some(last) = positions.last_mut() {
                    *last = dest;
                }
            }
            return Ok(Trajectory {
                positions,
                durations,
                sub_per_slot: m,
                arrival_slot: Some(i + 1),
                arrival_residual: dist,
                slots_sailed: i + 1,
            });
        }
        let dir = Point3::new(heading.cos(), heading.sin(), 0.0);
        for n in 1..=m {
            durations.push(scenario.delta_small_t);
            positions.push(pos + dir * (step * n as f64));
        }
        pos = pos + dir * capture;
        *positions.last_mut().expect("non-empty") = pos;
    }

    Ok(Trajectory {
        arrival_residual: dest.distance(&pos),
        positions,
        durations,
        sub_per_slot: m,
        arrival_slot: None,
        slots_sailed: phi.len(),
    })
}

/// Sum of steering violations `max(|phi[i+1] - phi[i]| - dphi_max, 0)` over
/// the first `horizon` adjacent pairs.
pub fn steering_penalty(phi: &[f64], dphi_max: f64, horizon: usize) -> f64 {
    phi.windows(2)
        .take(horizon)
        .map(|w| ((w[1] - w[0]).abs() - dphi_max).max(0.0))
        .sum()
}

/// One left-to-right pass replacing every interior heading that takes part
/// in a violating adjacent pair with the mean of its neighbors. Endpoints are
/// left alone.
pub fn smooth(phi: &mut [f64], dphi_max: f64, [lo, hi]: [f64; 2]) {
    if phi.len() < 3 {
        return;
    }
    for i in 1..phi.len() - 1 {
        let before = (phi[i] - phi[i - 1]).abs() > dphi_max;
        let after = (phi[i + 1] - phi[i]).abs() > dphi_max;
        if before || after {
            phi[i] = (0.5 * (phi[i - 1] + phi[i + 1])).clamp(lo, hi);
        }
    }
}
