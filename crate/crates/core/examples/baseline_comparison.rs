//! Map-aware planning against the line-of-sight baseline. The baseline
//! archive is planned under free space and then scored on the duct map.
//!
//! ```text
//! cargo run --release --example baseline_comparison -- [case] [seed]
//! ```

use duct_planner::cgm::{synthesize_duct_map, DuctModelParams, GridSpec};
use duct_planner::evaluator::MapGain;
use duct_planner::metrics::{comparison_reference, dominated_count, line_distribution};
use duct_planner::scenario::{reevaluate, run_baseline, run_dppi, PlannerConfig};
use duct_planner::Scenario;

fn main() -> duct_planner::Result<()> {
    let mut args = std::env::args().skip(1);
    let case: u8 = args.next().map(|s| s.parse().expect("case number")).unwrap_or(1);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(1);
    let scenario = Scenario::case(case)?;
    let config = PlannerConfig::with_budget(60, 80, 40).with_seed(seed);
    let map = synthesize_duct_map(&DuctModelParams::default(), GridSpec::default(), scenario.radio.f)?;

    let dppi = run_dppi(&scenario, &map, &config)?;
    let planned = run_baseline(&scenario, &config)?;
    let baseline = reevaluate(&planned.archive, &scenario, &MapGain::new(&map, &scenario), config.moea.iota)?;

    let (a, b) = (dppi.archive.fitnesses(), baseline.fitnesses());
    let reference = comparison_reference(&[&a, &b]).expect("non-empty archives");
    for (name, archive, front) in [("map-aware", &dppi.archive, &a), ("baseline", &baseline, &b)] {
        let min = |k: usize| front.iter().map(|f| f[k]).fold(f64::INFINITY, f64::min);
        println!(
            "{name:>10}: size={} feasible={} min f1={:.2} min f2={:.2} hv={:.1} line={:.3}",
            front.len(),
            archive.feasible().count(),
            min(0),
            min(1),
            archive.hypervolume(reference),
            line_distribution(front)
        );
    }
    println!("baseline members dominated by map-aware: {}", dominated_count(&b, &a));
    Ok(())
}
