use std::sync::Arc;

use serde::Serialize;

use super::{PlannerConfig, Scenario};
use crate::cgm::ChannelGainMap;
use crate::error::{Error, Result};
use crate::evaluator::{evaluate, GainModel, LosFreeSpace, MapGain};
use crate::geom::Point3;
use crate::kinematics::integrate_trajectory;
use crate::moea::{evolve, GenerationLog, MoeaConfig, Problem};
use crate::pso::{refine, Archive};
use crate::rng::{stream, DOMAIN_MOEA};

/// Result of one planning run.
#[derive(Debug, Clone)]
pub struct PlanOutput {
    pub archive: Archive,
    pub moea_log: Vec<GenerationLog>,
    /// Empty when refinement was skipped.
    pub pso_log: Vec<GenerationLog>,
    pub evaluations: usize,
}

fn build_pool(threads: Option<usize>) -> Result<Option<Arc<rayon::ThreadPool>>> {
    threads
        .map(|n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map(Arc::new)
                .map_err(|e| Error::Config(e.to_string()))
        })
        .transpose()
}

fn run_pipeline(
    scenario: &Scenario,
    gain: &dyn GainModel,
    moea: &MoeaConfig,
    config: &PlannerConfig,
    with_pso: bool,
) -> Result<PlanOutput> {
    config.validate()?;
    let problem = Problem::new(scenario, gain, moea.iota)?.with_pool(build_pool(config.threads)?);
    let mut rng = stream(moea.seed, DOMAIN_MOEA, 0);
    let evolved = evolve(moea, &problem, &mut rng)?;
    if !with_pso {
        return Ok(PlanOutput {
            archive: Archive::from_population(&evolved.population),
            moea_log: evolved.log,
            pso_log: Vec::new(),
            evaluations: evolved.evaluations,
        });
    }
    let refined = refine(&evolved.population, &config.pso, &problem, moea.seed)?;
    Ok(PlanOutput {
        archive: refined.archive,
        moea_log: evolved.log,
        pso_log: refined.log,
        evaluations: evolved.evaluations + refined.evaluations,
    })
}

/// NSGA-II followed by swarm refinement under an arbitrary channel model.
pub fn run_with_gain(scenario: &Scenario, gain: &dyn GainModel, config: &PlannerConfig) -> Result<PlanOutput> {
    run_pipeline(scenario, gain, &config.moea, config, true)
}

/// The hybrid planner on a channel gain map.
pub fn run_dppi(scenario: &Scenario, map: &ChannelGainMap, config: &PlannerConfig) -> Result<PlanOutput> {
    run_with_gain(scenario, &MapGain::new(map, scenario), config)
}

/// The hybrid planner assuming free-space propagation inside the radio
/// horizon and no link beyond it.
pub fn run_baseline(scenario: &Scenario, config: &PlannerConfig) -> Result<PlanOutput> {
    run_with_gain(scenario, &LosFreeSpace::new(scenario), config)
}

/// NSGA-II alone, with extra generations so that it spends at least as many
/// evaluations as the hybrid run with the same settings.
pub fn run_nsga2_only(scenario: &Scenario, gain: &dyn GainModel, config: &PlannerConfig) -> Result<PlanOutput> {
    let moea = equal_budget_moea(config);
    run_pipeline(scenario, gain, &moea, config, false)
}

/// NSGA-II settings whose generation count absorbs the refinement budget.
pub fn equal_budget_moea(config: &PlannerConfig) -> MoeaConfig {
    let per_gen = config.moea.evaluations_per_generation().max(1);
    let extra = (config.pso.g_max * config.moea.n_p).div_ceil(per_gen);
    MoeaConfig { g_max: config.moea.g_max + extra, ..config.moea }
}

/// Re-scores archive members under another channel model, keeping the first
/// front of the result.
pub fn reevaluate(archive: &Archive, scenario: &Scenario, gain: &dyn GainModel, iota: f64) -> Result<Archive> {
    let problem = Problem::new(scenario, gain, iota)?;
    let members = problem.evaluate_all(archive.members().iter().map(|m| m.genes.clone()).collect());
    Ok(Archive::from_population(&members))
}

/// One optimized leg of a multi-waypoint route.
#[derive(Debug, Clone)]
pub struct SegmentPlan {
    pub scenario: Scenario,
    pub plan: PlanOutput,
}

impl SegmentPlan {
    pub fn feasible_count(&self) -> usize {
        self.plan.archive.feasible().count()
    }
}

/// The selected member of every segment joined into one route.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositePlan {
    /// Archive index chosen in each segment.
    pub selection: Vec<usize>,
    pub m1_tilde: Vec<f64>,
    pub m2_tilde: Vec<f64>,
    pub total_m2_tilde: f64,
    /// Sub-timeslot positions of the whole route.
    pub positions: Vec<Point3>,
    /// Cumulative bits at each position, counting all earlier segments.
    pub cumulative_bits: Vec<f64>,
}

/// Plans every leg independently with an equal share of the data volume.
/// Leg `k` uses seed `seed + k`; without waypoints this is a single run.
pub fn plan_multi_waypoint<'g, F>(scenario: &Scenario, config: &PlannerConfig, gain_for: F) -> Result<Vec<SegmentPlan>>
where
    F: Fn(&Scenario) -> Box<dyn GainModel + 'g>,
{
    let segments = scenario.segments();
    let share = scenario.d_bits / segments.len() as f64;
    segments
        .into_iter()
        .enumerate()
        .map(|(k, (a, b))| {
            let leg = Scenario { a, b, waypoints: Vec::new(), d_bits: share, ..scenario.clone() };
            let cfg = config.with_seed(config.seed().wrapping_add(k as u64));
            let plan = run_with_gain(&leg, gain_for(&leg).as_ref(), &cfg)?;
            Ok(SegmentPlan { scenario: leg, plan })
        })
        .collect()
}

/// Picks the feasible member with the smallest sailing time in every segment
/// and concatenates the trajectories. Errors name the segments without a
/// feasible member.
pub fn compose_segments<'g, F>(segments: &[SegmentPlan], gain_for: F) -> Result<CompositePlan>
where
    F: Fn(&Scenario) -> Box<dyn GainModel + 'g>,
{
    let empty: Vec<String> = segments
        .iter()
        .enumerate()
        .filter(|(_, s)| s.feasible_count() == 0)
        .map(|(k, _)| (k + 1).to_string())
        .collect();
    if !empty.is_empty() {
        return Err(Error::Domain(format!("no feasible plan for segment(s) {}", empty.join(", "))));
    }
    let mut out = CompositePlan {
        selection: Vec::new(),
        m1_tilde: Vec::new(),
        m2_tilde: Vec::new(),
        total_m2_tilde: 0.0,
        positions: Vec::new(),
        cumulative_bits: Vec::new(),
    };
    let mut delivered = 0.0;
    for seg in segments {
        let (idx, best) = seg
            .plan
            .archive
            .members()
            .iter()
            .enumerate()
            .filter(|(_, m)| m.eval.feasible)
            .min_by(|a, b| a.1.eval.m2_tilde.total_cmp(&b.1.eval.m2_tilde))
            .expect("checked above");
        let traj = integrate_trajectory(&best.genes, &seg.scenario)?;
        let gain = gain_for(&seg.scenario);
        let eval = evaluate(&best.genes, &seg.scenario, gain.as_ref())?;
        // the first point of later legs repeats the previous end point
        let skip = usize::from(!out.positions.is_empty());
        out.positions.extend(traj.positions.iter().skip(skip).copied());
        if skip == 0 {
            out.cumulative_bits.push(delivered);
        }
        out.cumulative_bits.extend(eval.data_curve.iter().map(|c| delivered + c));
        delivered += eval.data_curve.last().copied().unwrap_or(0.0);
        out.selection.push(idx);
        out.m1_tilde.push(best.eval.m1_tilde);
        out.m2_tilde.push(best.eval.m2_tilde);
        out.total_m2_tilde += best.eval.m2_tilde;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::ConstantGain;

    fn short_route() -> Scenario {
        Scenario {
            a: Point3::new(0.0, 0.0, 0.0),
            b: Point3::new(1200.0, 0.0, 0.0),
            waypoints: vec![Point3::new(600.0, 0.0, 0.0)],
            t_max: 400.0,
            d_bits: 2e9,
            ..Scenario::default()
        }
        .with_sub_slot(10.0)
    }

    fn constant(_: &Scenario) -> Box<dyn GainModel> {
        Box::new(ConstantGain(1e-13))
    }

    #[test]
    fn equal_budget_adds_generations() {
        let cfg = PlannerConfig::with_budget(60, 80, 40);
        let m = equal_budget_moea(&cfg);
        // 40 * 60 = 2400 evaluations at 72 per generation
        assert_eq!(m.g_max, 80 + 34);
        assert!(m.g_max * 72 >= 80 * 72 + 40 * 60);
    }

    #[test]
    fn hybrid_and_plain_spend_comparable_budgets() {
        let s = Scenario { waypoints: Vec::new(), ..short_route() };
        let cfg = PlannerConfig::with_budget(12, 4, 3).with_seed(5);
        let gain = ConstantGain(1e-13);
        let hybrid = run_with_gain(&s, &gain, &cfg).unwrap();
        let plain = run_nsga2_only(&s, &gain, &cfg).unwrap();
        assert_eq!(hybrid.evaluations, 12 + 4 * 14 + 3 * 12);
        assert!(plain.evaluations >= hybrid.evaluations);
        assert!(plain.pso_log.is_empty());
    }

    #[test]
    fn no_waypoints_matches_single_run() {
        let s = Scenario { waypoints: Vec::new(), ..short_route() };
        let cfg = PlannerConfig::with_budget(10, 3, 2).with_seed(1);
        let segs = plan_multi_waypoint(&s, &cfg, constant).unwrap();
        let single = run_with_gain(&s, &ConstantGain(1e-13), &cfg).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].plan.archive, single.archive);
    }

    #[test]
    fn composition_sums_segment_times() {
        let s = short_route();
        let cfg = PlannerConfig::with_budget(16, 10, 4);
        let segs = plan_multi_waypoint(&s, &cfg, constant).unwrap();
        assert_eq!(segs.len(), 2);
        for seg in &segs {
            assert_eq!(seg.scenario.d_bits, 1e9);
            let m = seg.plan.archive.members();
            assert!(m.iter().all(|a| m.iter().all(|b| !crate::moea::dominates(&a.fitness, &b.fitness))));
        }
        let plan = compose_segments(&segs, constant).unwrap();
        let sum: f64 = plan.m2_tilde.iter().sum();
        assert!((plan.total_m2_tilde - sum).abs() < 1e-12);
        assert_eq!(plan.positions.len(), plan.cumulative_bits.len());
        let end = plan.positions.last().unwrap();
        assert!((end.x - 1200.0).abs() < 1e-6 && end.y.abs() < 1e-6);
        assert!(plan.cumulative_bits.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn infeasible_segment_is_reported() {
        let s = Scenario { d_bits: 1e15, ..short_route() };
        let cfg = PlannerConfig::with_budget(8, 1, 1);
        let segs = plan_multi_waypoint(&s, &cfg, constant).unwrap();
        let err = compose_segments(&segs, constant).unwrap_err();
        assert!(err.to_string().contains("1, 2"), "{err}");
    }
}
