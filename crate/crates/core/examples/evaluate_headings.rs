//! Evaluates the straight course of case 1 at several sub-timeslot lengths
//! and shows how the fractional timeslot counts settle as it shrinks.

use duct_planner::cgm::{synthesize_duct_map, DuctModelParams, GridSpec};
use duct_planner::evaluator::{evaluate, fitness, MapGain, DEFAULT_IOTA};
use duct_planner::kinematics::HeadingVector;
use duct_planner::Scenario;

fn main() -> duct_planner::Result<()> {
    let mut scenario = Scenario::case(1)?;
    // a lighter transfer so the straight course completes it
    scenario.d_bits = 2e11;
    let map = synthesize_duct_map(&DuctModelParams::default(), GridSpec::default(), scenario.radio.f)?;

    let (dx, dy) = (scenario.b.x - scenario.a.x, scenario.b.y - scenario.a.y);
    let phi = HeadingVector::constant(dy.atan2(dx), scenario.slots());

    println!("{:>6} {:>10} {:>10} {:>10} {:>10} feasible", "dt_s", "m1", "m2", "f1", "f2");
    for dt in [20.0, 10.0, 5.0, 4.0, 2.0, 1.0] {
        let s = scenario.with_sub_slot(dt);
        let res = evaluate(&phi.0, &s, &MapGain::new(&map, &s))?;
        let (f1, f2) = fitness(&res, &s, DEFAULT_IOTA);
        println!("{dt:>6} {:>10.4} {:>10.4} {f1:>10.4} {f2:>10.4} {}", res.m1_tilde, res.m2_tilde, res.feasible);
    }
    Ok(())
}
