//! JSON and CSV output for archives, trajectories and logs.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{evaluate, GainModel};
use crate::kinematics::integrate_trajectory;
use crate::moea::GenerationLog;
use crate::pso::Archive;
use crate::scenario::Scenario;

/// One archive member as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveRecord {
    pub f1: f64,
    pub f2: f64,
    pub m1_tilde: f64,
    pub m2_tilde: f64,
    #[serde(default)]
    pub feasible: bool,
    pub genes: Vec<f64>,
}

impl ArchiveRecord {
    pub fn fitness(&self) -> [f64; 2] {
        [self.f1, self.f2]
    }
}

pub fn archive_records(archive: &Archive) -> Vec<ArchiveRecord> {
    archive
        .members()
        .iter()
        .map(|m| ArchiveRecord {
            f1: m.fitness[0],
            f2: m.fitness[1],
            m1_tilde: m.eval.m1_tilde,
            m2_tilde: m.eval.m2_tilde,
            feasible: m.eval.feasible,
            genes: m.genes.0.clone(),
        })
        .collect()
}

pub fn archive_json(archive: &Archive) -> Result<String> {
    Ok(serde_json::to_string_pretty(&archive_records(archive))?)
}

pub fn write_archive_json<W: Write>(archive: &Archive, mut w: W) -> Result<()> {
    w.write_all(archive_json(archive)?.as_bytes())?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read_archive_json<R: Read>(r: R) -> Result<Vec<ArchiveRecord>> {
    let records: Vec<ArchiveRecord> = serde_json::from_reader(r)?;
    if let Some(bad) = records.iter().position(|r| !(r.f1.is_finite() && r.f2.is_finite())) {
        return Err(Error::Format(format!("archive entry {bad} has non-finite objectives")));
    }
    Ok(records)
}

#[derive(Serialize)]
struct TrajectoryRow {
    member: usize,
    slot: usize,
    sub_slot: usize,
    t_s: f64,
    x_m: f64,
    y_m: f64,
    z_m: f64,
    cumulative_bits: f64,
}

/// Sub-timeslot positions of every archive member with the bits delivered
/// up to each position.
pub fn write_trajectories_csv<W: Write, G: GainModel + ?Sized>(
    archive: &Archive,
    scenario: &Scenario,
    gain: &G,
    w: W,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (member, m) in archive.members().iter().enumerate() {
        let traj = integrate_trajectory(&m.genes, scenario)?;
        let eval = evaluate(&m.genes, scenario, gain)?;
        let mut t = 0.0;
        for (k, p) in traj.positions.iter().enumerate() {
            let (slot, sub_slot) = traj.slot_of(k);
            out.serialize(TrajectoryRow {
                member,
                slot,
                sub_slot,
                t_s: t,
                x_m: p.x,
                y_m: p.y,
                z_m: p.z,
                cumulative_bits: if k == 0 { 0.0 } else { eval.data_curve[k - 1] },
            })?;
            t += traj.durations.get(k).copied().unwrap_or(0.0);
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct LogRow<'a> {
    stage: &'a str,
    generation: usize,
    best_f1: f64,
    best_f2: f64,
    front_size: usize,
    hypervolume: f64,
}

/// Generation log of both stages. The two stages use their own reference
/// points, so their hypervolume columns are not comparable.
pub fn write_log_csv<W: Write>(moea: &[GenerationLog], pso: &[GenerationLog], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (stage, log) in [("nsga2", moea), ("pso", pso)] {
        for g in log {
            out.serialize(LogRow {
                stage,
                generation: g.generation,
                best_f1: g.best_f1,
                best_f2: g.best_f2,
                front_size: g.front_size,
                hypervolume: g.hypervolume,
            })?;
        }
    }
    out.flush()?;
    Ok(())
}
