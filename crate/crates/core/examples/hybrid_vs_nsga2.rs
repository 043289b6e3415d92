//! NSGA-II followed by the swarm stage, against NSGA-II alone with the
//! same number of evaluations, over a few seeds.

use duct_planner::cgm::{synthesize_duct_map, DuctModelParams, GridSpec};
use duct_planner::evaluator::MapGain;
use duct_planner::metrics::{bounds_of, normalized_hypervolume};
use duct_planner::scenario::{run_dppi, run_nsga2_only, PlannerConfig};
use duct_planner::Scenario;

fn main() -> duct_planner::Result<()> {
    let seeds: u64 = std::env::args().nth(1).map(|s| s.parse().expect("seed count")).unwrap_or(3);
    let scenario = Scenario::case(1)?;
    let map = synthesize_duct_map(&DuctModelParams::default(), GridSpec::default(), scenario.radio.f)?;
    let gain = MapGain::new(&map, &scenario);

    println!("{:>4} {:>12} {:>12} {:>8} {:>8}", "seed", "hybrid_nhv", "nsga2_nhv", "evals_h", "evals_n");
    for seed in 1..=seeds {
        let config = PlannerConfig::with_budget(40, 50, 25).with_seed(seed);
        let hybrid = run_dppi(&scenario, &map, &config)?;
        let alone = run_nsga2_only(&scenario, &gain, &config)?;
        let (h, n) = (hybrid.archive.fitnesses(), alone.archive.fitnesses());
        let (ideal, hi) = bounds_of([h.as_slice(), n.as_slice()]).expect("non-empty archives");
        let reference = [hi[0] * 1.1, hi[1] * 1.1];
        println!(
            "{seed:>4} {:>12.4} {:>12.4} {:>8} {:>8}",
            normalized_hypervolume(&h, reference, ideal)?,
            normalized_hypervolume(&n, reference, ideal)?,
            hybrid.evaluations,
            alone.evaluations
        );
    }
    Ok(())
}
