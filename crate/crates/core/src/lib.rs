//! Ship trajectory planning over evaporation-duct channel gain maps.
//!
//! A ship sails from a start point to a destination while offloading a fixed
//! data volume to a shore base station at the origin. Propagation inside an
//! evaporation duct is far from free space: path loss oscillates with range
//! and stays well below the free-space value beyond the radio horizon. This
//! crate plans heading sequences that trade off the time to finish the
//! transfer against the time to arrive, using a pre-computed channel gain map
//! (CGM) instead of an online propagation model.
//!
//! The pieces, bottom up:
//!
//! * [`cgm`] stores the gridded path-loss map, synthesizes a parameterized
//!   duct map, perturbs it with noise and reads/writes the `CGM1` file format.
//! * [`radio`] holds the link budget: Shannon rate, free-space gain and the
//!   radio-horizon (line-of-sight) range.
//! * [`kinematics`] integrates heading vectors into sub-timeslot trajectories
//!   and handles steering limits.
//! * [`evaluator`] computes the fractional transmission and sailing timeslot
//!   counts and the penalized fitness pair.
//! * [`moea`] is the NSGA-II stage with constraint-aware initialization and
//!   dimension truncation; [`pso`] is the swarm refinement stage that maintains
//!   the non-dominated archive.
//! * [`metrics`] provides the 2-objective hypervolume and line distribution.
//! * [`scenario`] wires everything into the built-in cases, the line-of-sight
//!   baseline, the multi-waypoint extension and JSON configuration.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod cgm;
pub mod cli;
pub mod error;
pub mod evaluator;
pub mod export;
pub mod geom;
pub mod kinematics;
pub mod metrics;
pub mod moea;
pub mod pso;
pub mod radio;
pub mod rng;
pub mod scenario;

pub use cgm::{ChannelGainMap, DuctModelParams, GridMode, GridSpec};
pub use error::{Error, Result};
pub use evaluator::{EvalResult, GainModel};
pub use geom::Point3;
pub use kinematics::{HeadingVector, Trajectory};
pub use moea::{Individual, MoeaConfig};
pub use pso::{Archive, PsoConfig};
pub use radio::RadioParams;
pub use scenario::Scenario;
