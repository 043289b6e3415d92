//! Plans on a map perturbed with Gaussian noise and scores the result on
//! the clean map, for a range of noise levels.

use duct_planner::cgm::{synthesize_duct_map, DuctModelParams, GridSpec};
use duct_planner::evaluator::MapGain;
use duct_planner::scenario::{reevaluate, run_dppi, PlannerConfig};
use duct_planner::Scenario;

fn main() -> duct_planner::Result<()> {
    let scenario = Scenario::case(1)?;
    let config = PlannerConfig::with_budget(40, 50, 25).with_seed(5);
    let clean = synthesize_duct_map(&DuctModelParams::default(), GridSpec::default(), scenario.radio.f)?;
    let truth = MapGain::new(&clean, &scenario);

    let runs = [0.0, 1.0, 3.0, 6.0]
        .into_iter()
        .map(|sigma| {
            let map = clean.perturb(sigma, config.seed())?;
            let plan = run_dppi(&scenario, &map, &config)?;
            Ok((sigma, reevaluate(&plan.archive, &scenario, &truth, config.moea.iota)?))
        })
        .collect::<duct_planner::Result<Vec<_>>>()?;

    let worst = runs.iter().flat_map(|(_, a)| a.fitnesses()).fold([0.0f64; 2], |m, f| [m[0].max(f[0]), m[1].max(f[1])]);
    let reference = [worst[0] * 1.1, worst[1] * 1.1];
    for (sigma, archive) in &runs {
        let best = archive.fitnesses().iter().map(|f| f[0]).fold(f64::INFINITY, f64::min);
        println!("sigma={sigma:>3} dB: size={:>3} min f1 on clean map={best:>9.2} hv={:.1}", archive.len(), archive.hypervolume(reference));
    }
    Ok(())
}
