//! Command-line front end. [`run`] parses arguments and returns the process
//! exit code: 0 on success, 1 on usage or I/O errors, 2 when a plan has no
//! feasible member.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cgm::{read_cgm, read_csv, synthesize_duct_map, write_cgm, ChannelGainMap, DuctModelParams, GridSpec, MapMetadata};
use crate::error::{Error, Result};
use crate::evaluator::{GainModel, LosFreeSpace, MapGain};
use crate::export::{read_archive_json, write_archive_json, write_log_csv, write_trajectories_csv, ArchiveRecord};
use crate::metrics::{bounds_of, comparison_reference, dominated_count, line_distribution, normalized_hypervolume};
use crate::scenario::{
    compose_segments, plan_multi_waypoint, run_nsga2_only, run_with_gain, PlanOutput, PlannerConfig, Scenario,
    ScenarioFile,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "duct-planner", version, about = "Trajectory planning over evaporation-duct channel gain maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a duct channel gain map and write it as a CGM1 file.
    GenCgm(GenCgmArgs),
    /// Plan trajectories and write the archive, trajectories and log.
    Plan(PlanArgs),
    /// Compare two archive files.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MapMode {
    Radial,
    Grid3d,
}

#[derive(Args, Debug)]
struct GenCgmArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "radial")]
    mode: MapMode,
    /// Carrier frequency (Hz).
    #[arg(long, default_value_t = 10e9)]
    f: f64,
    #[arg(long, default_value_t = 35.0)]
    edh: f64,
    #[arg(long, default_value_t = 10.07)]
    delta_max: f64,
    #[arg(long, default_value_t = 120e3)]
    r_sat: f64,
    #[arg(long, default_value_t = 5.0)]
    a_osc: f64,
    /// Oscillation period in range (m).
    #[arg(long, default_value_t = 8e3)]
    lambda: f64,
    #[arg(long, default_value_t = 2.0)]
    beta_leak: f64,
    /// Horizontal extent (m): maximum range, or the half-width and depth of a
    /// 3-D grid.
    #[arg(long, default_value_t = 200e3)]
    extent: f64,
    /// Height extent (m).
    #[arg(long, default_value_t = 64.0)]
    height: f64,
    #[arg(long, default_value_t = 50.0)]
    dd: f64,
    #[arg(long, default_value_t = 1.0)]
    dh: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CaseArg {
    Numbered(u8),
    Multi,
}

fn parse_case(s: &str) -> std::result::Result<CaseArg, String> {
    match s {
        "multi" => Ok(CaseArg::Multi),
        "1" | "2" | "3" => Ok(CaseArg::Numbered(s.parse().expect("digit"))),
        _ => Err(format!("expected 1, 2, 3 or multi, got {s:?}")),
    }
}

#[derive(Args, Debug)]
struct PlanArgs {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "case")]
    scenario: Option<PathBuf>,
    /// Built-in case: 1, 2, 3 or multi.
    #[arg(long, value_parser = parse_case)]
    case: Option<CaseArg>,
    /// CGM1 file, or a CSV table of samples.
    #[arg(long, conflicts_with = "synthetic")]
    cgm: Option<PathBuf>,
    /// Use the default synthetic duct map (the default without --cgm).
    #[arg(long)]
    synthetic: bool,
    /// Cell sizes used when importing a CSV map (m).
    #[arg(long, default_value_t = 50.0)]
    dd: f64,
    #[arg(long, default_value_t = 1.0)]
    dh: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Plan with free-space propagation inside the radio horizon only.
    #[arg(long)]
    baseline: bool,
    /// Skip the swarm stage; NSGA-II gets the same evaluation budget.
    #[arg(long)]
    no_pso: bool,
    /// Gaussian noise added to every map cell (dB).
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    /// Sub-timeslot lengths (s); several values run a sweep.
    #[arg(long, value_delimiter = ',')]
    dt_sub: Vec<f64>,
    #[arg(long, env = "DUCT_PLANNER_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    n_p: Option<usize>,
    #[arg(long)]
    g_max: Option<usize>,
    #[arg(long)]
    pso_g_max: Option<usize>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Reference point `r1,r2`, or `auto` for 1.1 times the worst values.
    #[arg(long = "ref", default_value = "auto")]
    reference: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::GenCgm(a) => gen_cgm(&a, &mut out).map(|_| EXIT_OK),
        Command::Plan(a) => plan(&a, &mut out),
        Command::Compare(a) => compare(&a, &mut out).map(|_| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn cells(extent: f64, step: f64) -> usize {
    (extent / step - 1e-9).ceil().max(1.0) as usize
}

fn gen_cgm(a: &GenCgmArgs, out: &mut dyn Write) -> Result<()> {
    if !(a.extent > 0.0 && a.height > 0.0 && a.dd > 0.0 && a.dh > 0.0) {
        return Err(Error::Config("--extent, --height, --dd and --dh must be > 0".into()));
    }
    let n_h = cells(a.height, a.dh);
    let spec = match a.mode {
        MapMode::Radial => GridSpec::radial(a.dd, a.dh, cells(a.extent, a.dd), n_h),
        MapMode::Grid3d => GridSpec::grid3d(a.dd, a.dh, 2 * cells(a.extent, a.dd), cells(a.extent, a.dd), n_h),
    };
    let params = DuctModelParams {
        edh: a.edh,
        delta_max: a.delta_max,
        r_sat: a.r_sat,
        a_osc: a.a_osc,
        lambda_osc: a.lambda,
        beta_leak: a.beta_leak,
    };
    let map = synthesize_duct_map(&params, spec, a.f)?;
    write_cgm(&map, BufWriter::new(File::create(&a.out)?))?;
    let (lo, hi) = map.min_max_loss();
    writeln!(out, "wrote {}", a.out.display())?;
    writeln!(out, "mode={:?} dd={} m dh={} m cells={}", spec.mode, spec.delta_d, spec.delta_h, spec.cell_count())?;
    writeln!(out, "loss_db min={lo:.2} max={hi:.2}")?;
    Ok(())
}

fn load_map(a: &PlanArgs, scenario: &Scenario) -> Result<ChannelGainMap> {
    match &a.cgm {
        None => synthesize_duct_map(&DuctModelParams::default(), GridSpec::default(), scenario.radio.f),
        Some(path) if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => {
            let meta = MapMetadata { f: scenario.radio.f, edh: f64::NAN, provenance: format!("csv import {}", path.display()) };
            read_csv(BufReader::new(File::open(path)?), a.dd, a.dh, meta)
        }
        Some(path) => read_cgm(BufReader::new(File::open(path)?)),
    }
}

fn resolve(a: &PlanArgs) -> Result<(Scenario, PlannerConfig)> {
    let (scenario, mut planner) = match (&a.scenario, a.case) {
        (Some(path), _) => {
            let file = ScenarioFile::load(path)?;
            (file.scenario, file.planner)
        }
        (None, Some(CaseArg::Multi)) => (Scenario::multi_waypoint_case(), PlannerConfig::default()),
        (None, Some(CaseArg::Numbered(n))) => (Scenario::case(n)?, PlannerConfig::default()),
        (None, None) => return Err(Error::Config("one of --scenario or --case is required".into())),
    };
    if let Some(n_p) = a.n_p {
        let keep = planner.moea;
        planner.moea = crate::moea::MoeaConfig { g_max: keep.g_max, seed: keep.seed, ..crate::moea::MoeaConfig::with_population(n_p, keep.g_max) };
    }
    if let Some(g) = a.g_max {
        planner.moea.g_max = g;
    }
    if let Some(g) = a.pso_g_max {
        planner.pso.g_max = g;
    }
    if let Some(seed) = a.seed {
        planner.moea.seed = seed;
    }
    if a.threads.is_some() {
        planner.threads = a.threads;
    }
    planner.validate()?;
    Ok((scenario, planner))
}

struct Outputs<'a> {
    dir: &'a Path,
    suffix: String,
}

impl Outputs<'_> {
    fn path(&self, stem: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{stem}{}.{ext}", self.suffix))
    }
}

fn write_plan(plan: &PlanOutput, scenario: &Scenario, gain: &dyn GainModel, files: &Outputs<'_>, stem: &str) -> Result<()> {
    write_archive_json(&plan.archive, BufWriter::new(File::create(files.path(&format!("{stem}archive"), "json"))?))?;
    write_trajectories_csv(&plan.archive, scenario, gain, BufWriter::new(File::create(files.path(&format!("{stem}trajectories"), "csv"))?))?;
    write_log_csv(&plan.moea_log, &plan.pso_log, BufWriter::new(File::create(files.path(&format!("{stem}log"), "csv"))?))?;
    Ok(())
}

fn summarize(out: &mut dyn Write, label: &str, plan: &PlanOutput) -> Result<usize> {
    let feasible: Vec<_> = plan.archive.feasible().collect();
    let best_m1 = feasible.iter().map(|m| m.eval.m1_tilde).fold(f64::INFINITY, f64::min);
    let best_m2 = feasible.iter().map(|m| m.eval.m2_tilde).fold(f64::INFINITY, f64::min);
    writeln!(
        out,
        "{label}archive={} feasible={} min_m1={best_m1:.3} min_m2={best_m2:.3} evaluations={}",
        plan.archive.len(),
        feasible.len(),
        plan.evaluations
    )?;
    Ok(feasible.len())
}

fn gain_model<'m>(map: Option<&'m ChannelGainMap>, s: &Scenario) -> Box<dyn GainModel + 'm> {
    match map {
        Some(m) => Box::new(MapGain::new(m, s)),
        None => Box::new(LosFreeSpace::new(s)),
    }
}

fn plan(a: &PlanArgs, out: &mut dyn Write) -> Result<i32> {
    let (base, config) = resolve(a)?;
    std::fs::create_dir_all(&a.out_dir)?;
    let map = if a.baseline { None } else { Some(load_map(a, &base)?.perturb(a.noise_sigma, config.seed())?) };
    let gain_for = |s: &Scenario| gain_model(map.as_ref(), s);
    let sweep = if a.dt_sub.is_empty() { vec![base.delta_small_t] } else { a.dt_sub.clone() };
    let mut code = EXIT_OK;
    for &dt in &sweep {
        let scenario = base.with_sub_slot(dt);
        scenario.validate()?;
        let files = Outputs { dir: &a.out_dir, suffix: if sweep.len() > 1 { format!("_dt{dt}") } else { String::new() } };
        let label = if sweep.len() > 1 { format!("dt_sub={dt} ") } else { String::new() };
        if scenario.waypoints.is_empty() {
            let gain = gain_for(&scenario);
            let result = if a.no_pso {
                run_nsga2_only(&scenario, gain.as_ref(), &config)?
            } else {
                run_with_gain(&scenario, gain.as_ref(), &config)?
            };
            write_plan(&result, &scenario, gain.as_ref(), &files, "")?;
            if summarize(out, &label, &result)? == 0 {
                eprintln!("no feasible trajectory {label}(data volume, time budget or steering limit not met)");
                code = EXIT_INFEASIBLE;
            }
        } else {
            if a.no_pso {
                return Err(Error::Config("--no-pso is not supported with waypoints".into()));
            }
            let segments = plan_multi_waypoint(&scenario, &config, gain_for)?;
            for (k, seg) in segments.iter().enumerate() {
                let stem = format!("segment{}_", k + 1);
                write_plan(&seg.plan, &seg.scenario, gain_for(&seg.scenario).as_ref(), &files, &stem)?;
                summarize(out, &format!("{label}segment {}: ", k + 1), &seg.plan)?;
            }
            match compose_segments(&segments, gain_for) {
                Ok(composite) => {
                    writeln!(out, "{label}composed total_m2={:.3} selection={:?}", composite.total_m2_tilde, composite.selection)?;
                    let f = BufWriter::new(File::create(files.path("composite", "json"))?);
                    serde_json::to_writer_pretty(f, &composite)?;
                }
                Err(e) => {
                    eprintln!("{label}{e}");
                    code = EXIT_INFEASIBLE;
                }
            }
        }
    }
    Ok(code)
}

fn parse_reference(s: &str) -> Result<Option<[f64; 2]>> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Config(format!("bad --ref {s:?}: {e}")))?;
    match parts[..] {
        [r1, r2] => Ok(Some([r1, r2])),
        _ => Err(Error::Config(format!("--ref needs two values, got {s:?}"))),
    }
}

fn load_front(path: &Path) -> Result<Vec<[f64; 2]>> {
    let records = read_archive_json(BufReader::new(File::open(path)?))
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    Ok(records.iter().map(ArchiveRecord::fitness).collect())
}

fn compare(a: &CompareArgs, out: &mut dyn Write) -> Result<()> {
    let fa = load_front(&a.a)?;
    let fb = load_front(&a.b)?;
    let (ideal, _) = bounds_of([fa.as_slice(), fb.as_slice()])
        .ok_or_else(|| Error::Metric("both archives are empty".into()))?;
    let reference = match parse_reference(&a.reference)? {
        Some(r) => r,
        None => comparison_reference(&[&fa, &fb]).expect("non-empty"),
    };
    writeln!(out, "reference={},{} ideal={},{}", reference[0], reference[1], ideal[0], ideal[1])?;
    for (name, front) in [("A", &fa), ("B", &fb)] {
        let hv = normalized_hypervolume(front, reference, ideal)?;
        writeln!(out, "{name}: size={} normalized_hv={hv:.6} line_distribution={:.6}", front.len(), line_distribution(front))?;
    }
    writeln!(out, "A dominated by B: {}", dominated_count(&fa, &fb))?;
    writeln!(out, "B dominated by A: {}", dominated_count(&fb, &fa))?;
    Ok(())
}
