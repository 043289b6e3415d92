//! Planning scenarios and experiment orchestration.

mod config;
mod runs;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use config::{PlannerConfig, ScenarioFile};
pub use runs::{
    compose_segments, plan_multi_waypoint, reevaluate, run_baseline, run_dppi, run_nsga2_only,
    run_with_gain, equal_budget_moea, CompositePlan, PlanOutput, SegmentPlan,
};

use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::radio::RadioParams;

/// Bits in the 40 GB transfer of the built-in cases.
pub const DEFAULT_DATA_BITS: f64 = 40.0 * 8e9;

/// Everything that defines one planning problem.
///
/// Endpoints are given in meters relative to the base station; their `z`
/// coordinate is ignored and the ship antenna stays at `radio.z_tx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Scenario {
    pub a: Point3,
    pub b: Point3,
    pub waypoints: Vec<Point3>,
    /// Ship speed (m/s).
    pub v: f64,
    /// Timeslot length (s).
    pub delta_t: f64,
    /// Sub-timeslot length (s); must divide `delta_t`.
    pub delta_small_t: f64,
    /// Maximum sailing time (s).
    pub t_max: f64,
    /// Data volume to offload (bits).
    pub d_bits: f64,
    pub radio: RadioParams,
    /// Heading bounds `[lower, upper]` (rad).
    pub phi_bounds: [f64; 2],
    /// Maximum heading change per timeslot (rad).
    pub dphi_max: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            a: Point3::default(),
            b: Point3::default(),
            waypoints: Vec::new(),
            v: 20.0,
            delta_t: 20.0,
            delta_small_t: 1.0,
            t_max: 12_000.0,
            d_bits: DEFAULT_DATA_BITS,
            radio: RadioParams::default(),
            phi_bounds: [-PI, PI],
            dphi_max: PI / 4.0,
        }
    }
}

impl Scenario {
    /// Built-in cases 1-3 with the standard link and ship parameters.
    ///
    /// 1: far end point, 2: far start point, 3: both far.
    pub fn case(n: u8) -> Result<Self> {
        let km = |x: f64, y: f64| Point3::new(x * 1e3, y * 1e3, 0.0);
        let (a, b) = match n {
            1 => (km(-50.0, 50.0), km(70.0, 70.0)),
            2 => (km(-70.0, 70.0), km(50.0, 50.0)),
            3 => (km(-70.0, 70.0), km(70.0, 70.0)),
            _ => return Err(Error::Config(format!("unknown case {n}, expected 1..=3"))),
        };
        Ok(Self { a, b, ..Self::default() })
    }

    /// Case 1 endpoints routed through the two intermediate buoys.
    pub fn multi_waypoint_case() -> Self {
        let mut s = Self::case(1).expect("case 1 exists");
        s.waypoints = vec![Point3::new(-10e3, 70e3, 0.0), Point3::new(30e3, 50e3, 0.0)];
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.radio.validate()?;
        let positive = [("v", self.v), ("delta_t", self.delta_t), ("delta_small_t", self.delta_small_t), ("t_max", self.t_max)];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.delta_small_t > self.delta_t {
            return Err(Error::Config("sub-timeslot longer than the timeslot".into()));
        }
        self.sub_slots()?;
        if !(self.d_bits >= 0.0 && self.d_bits.is_finite()) {
            return Err(Error::Config(format!("data volume must be >= 0, got {}", self.d_bits)));
        }
        let [lo, hi] = self.phi_bounds;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!("invalid heading bounds [{lo}, {hi}]")));
        }
        if self.dphi_max.is_nan() || self.dphi_max < 0.0 {
            return Err(Error::Config("dphi_max must be >= 0".into()));
        }
        Ok(())
    }

    /// Number of timeslots `M = ceil(T / delta_t)`.
    pub fn slots(&self) -> usize {
        (self.t_max / self.delta_t - 1e-9).ceil().max(1.0) as usize
    }

    /// Sub-timeslots per timeslot; errors unless `delta_t / delta_small_t` is
    /// an integer.
    pub fn sub_slots(&self) -> Result<usize> {
        let ratio = self.delta_t / self.delta_small_t;
        let m = ratio.round();
        if m < 1.0 || (ratio - m).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Config(format!(
                "timeslot {} s is not an integer multiple of sub-timeslot {} s",
                self.delta_t, self.delta_small_t
            )));
        }
        Ok(m as usize)
    }

    /// Distance covered in one timeslot.
    pub fn slot_distance(&self) -> f64 {
        self.v * self.delta_t
    }

    pub fn with_sub_slot(&self, delta_small_t: f64) -> Self {
        Self { delta_small_t, ..self.clone() }
    }

    /// Consecutive (start, end) legs through the waypoints.
    pub fn segments(&self) -> Vec<(Point3, Point3)> {
        let mut stops = Vec::with_capacity(self.waypoints.len() + 2);
        stops.push(self.a);
        stops.extend(self.waypoints.iter().copied());
        stops.push(self.b);
        stops.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_cases() {
        let c1 = Scenario::case(1).unwrap();
        assert_eq!(c1.a, Point3::new(-50e3, 50e3, 0.0));
        assert_eq!(c1.b, Point3::new(70e3, 70e3, 0.0));
        assert_eq!(c1.slots(), 600);
        assert_eq!(c1.sub_slots().unwrap(), 20);
        assert!(Scenario::case(4).is_err());
        c1.validate().unwrap();
    }

    #[test]
    fn non_integer_sub_slot_rejected() {
        let s = Scenario::case(1).unwrap().with_sub_slot(3.0);
        assert!(matches!(s.sub_slots(), Err(Error::Config(_))));
        assert!(s.validate().is_err());
        assert_eq!(Scenario::case(1).unwrap().with_sub_slot(0.02).sub_slots().unwrap(), 1000);
    }

    #[test]
    fn segments_follow_waypoints() {
        let s = Scenario::multi_waypoint_case();
        let segs = s.segments();
        assert_eq!(segs.len(), 3);
        assert_eq!(segs[0].0, s.a);
        assert_eq!(segs[0].1, s.waypoints[0]);
        assert_eq!(segs[2].1, s.b);
        assert_eq!(Scenario::case(2).unwrap().segments().len(), 1);
    }
}
