//! Plans a route through intermediate waypoints leg by leg and joins the
//! fastest feasible member of every leg.

use duct_planner::cgm::{synthesize_duct_map, DuctModelParams, GridSpec};
use duct_planner::evaluator::{GainModel, MapGain};
use duct_planner::scenario::{compose_segments, plan_multi_waypoint, PlannerConfig};
use duct_planner::{Point3, Scenario};

fn main() -> duct_planner::Result<()> {
    let scenario = Scenario {
        a: Point3::new(0.0, 0.0, 0.0),
        b: Point3::new(1800.0, 0.0, 0.0),
        waypoints: vec![Point3::new(600.0, 200.0, 0.0), Point3::new(1200.0, -200.0, 0.0)],
        t_max: 600.0,
        d_bits: 3e9,
        delta_small_t: 5.0,
        ..Scenario::default()
    };
    let config = PlannerConfig::with_budget(20, 15, 10).with_seed(3);
    let map = synthesize_duct_map(&DuctModelParams::default(), GridSpec::default(), scenario.radio.f)?;
    let gain_for = |s: &Scenario| Box::new(MapGain::new(&map, s)) as Box<dyn GainModel + '_>;

    let segments = plan_multi_waypoint(&scenario, &config, gain_for)?;
    for (k, seg) in segments.iter().enumerate() {
        println!("leg {}: archive={} feasible={}", k + 1, seg.plan.archive.len(), seg.feasible_count());
    }
    let route = compose_segments(&segments, gain_for)?;
    println!("selected {:?}, m2 per leg {:?}, total {:.2} timeslots", route.selection, route.m2_tilde, route.total_m2_tilde);
    println!(
        "{} positions, {:.2} Gbit of link capacity along the route for {:.2} Gbit of data",
        route.positions.len(),
        route.cumulative_bits.last().copied().unwrap_or(0.0) / 1e9,
        scenario.d_bits / 1e9
    );
    Ok(())
}
