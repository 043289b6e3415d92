//! Plans case 1 on the synthetic duct map and prints the archive.
//!
//! ```text
//! cargo run --release --example plan_case1 -- [seed] [n_p] [g_max] [pso_g_max]
//! ```

use std::time::Instant;

use duct_planner::cgm::{synthesize_duct_map, DuctModelParams, GridSpec};
use duct_planner::scenario::{run_dppi, PlannerConfig, Scenario};

fn main() -> duct_planner::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let arg = |i: usize, default: u64| args.get(i).copied().unwrap_or(default);
    let config = PlannerConfig::with_budget(arg(1, 60) as usize, arg(2, 80) as usize, arg(3, 40) as usize).with_seed(arg(0, 1));

    let scenario = Scenario::case(1)?;
    let map = synthesize_duct_map(&DuctModelParams::default(), GridSpec::default(), scenario.radio.f)?;

    let started = Instant::now();
    let plan = run_dppi(&scenario, &map, &config)?;
    println!("{} evaluations in {:.1?}", plan.evaluations, started.elapsed());

    if let (Some(first), Some(last)) = (plan.moea_log.first(), plan.moea_log.last()) {
        println!("nsga2 best f1 {:.2} -> {:.2}, best f2 {:.2} -> {:.2}", first.best_f1, last.best_f1, first.best_f2, last.best_f2);
    }
    println!("{:>10} {:>10} {:>10} {:>10} feasible", "f1", "f2", "m1", "m2");
    for m in plan.archive.members() {
        println!(
            "{:>10.3} {:>10.3} {:>10.3} {:>10.3} {}",
            m.fitness[0], m.fitness[1], m.eval.m1_tilde, m.eval.m2_tilde, m.eval.feasible
        );
    }
    Ok(())
}
