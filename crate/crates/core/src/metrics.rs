//! Pareto-front quality indicators for two minimized objectives.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::moea::dominates;

/// Non-dominated subset sorted by the first objective.
fn staircase(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut stairs: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    for p in pts {
        match stairs.last() {
            Some(last) if p[1] >= last[1] => {}
            _ => stairs.push(p),
        }
    }
    stairs
}

/// Area dominated by `front` and bounded by `reference`. Points that do not
/// strictly improve on the reference in both objectives contribute nothing.
pub fn hypervolume2d(front: &[[f64; 2]], reference: [f64; 2]) -> f64 {
    let inside: Vec<[f64; 2]> =
        front.iter().copied().filter(|p| p[0] < reference[0] && p[1] < reference[1]).collect();
    let stairs = staircase(&inside);
    let mut area = 0.0;
    for (i, p) in stairs.iter().enumerate() {
        let next_f1 = stairs.get(i + 1).map_or(reference[0], |q| q[0]);
        area += (next_f1 - p[0]) * (reference[1] - p[1]);
    }
    area
}

/// Hypervolume divided by the area of the box spanned by `ideal` and
/// `reference`.
pub fn normalized_hypervolume(front: &[[f64; 2]], reference: [f64; 2], ideal: [f64; 2]) -> Result<f64> {
    let unit = (reference[0] - ideal[0]) * (reference[1] - ideal[1]);
    if !(reference[0] > ideal[0] && reference[1] > ideal[1]) || !unit.is_finite() {
        return Err(Error::Metric(format!(
            "reference {reference:?} must be strictly worse than ideal {ideal:?}"
        )));
    }
    Ok(hypervolume2d(front, reference) / unit)
}

/// Componentwise minimum and maximum over several fronts.
pub fn bounds_of<'a, I>(fronts: I) -> Option<([f64; 2], [f64; 2])>
where
    I: IntoIterator<Item = &'a [[f64; 2]]>,
{
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    let mut any = false;
    for p in fronts.into_iter().flatten() {
        any = true;
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    any.then_some((lo, hi))
}

/// Reference point for comparing fronts: componentwise worst value times 1.1.
pub fn comparison_reference(fronts: &[&[[f64; 2]]]) -> Option<[f64; 2]> {
    bounds_of(fronts.iter().copied()).map(|(_, hi)| hi.map(|v| 1.1 * v))
}

fn line_distribution_1d(values: &[f64], intervals: usize) -> f64 {
    let n = intervals.max(1);
    (0..n)
        .map(|j| {
            let mid = (j as f64 + 0.5) / n as f64;
            values.iter().map(|v| (mid - v).abs()).fold(f64::INFINITY, f64::min)
        })
        .sum::<f64>()
        / n as f64
}

/// Line distribution with each objective normalized over a given target
/// interval `[lower, upper]`. Values outside the interval are clamped.
pub fn line_distribution_in(front: &[[f64; 2]], lower: [f64; 2], upper: [f64; 2], intervals: usize) -> f64 {
    if front.is_empty() {
        return f64::NAN;
    }
    (0..2)
        .map(|k| {
            let span = upper[k] - lower[k];
            let norm: Vec<f64> = front
                .iter()
                .map(|p| if span > 0.0 { ((p[k] - lower[k]) / span).clamp(0.0, 1.0) } else { 0.0 })
                .collect();
            line_distribution_1d(&norm, intervals)
        })
        .sum::<f64>()
        / 2.0
}

/// Line distribution normalized over the front's own range, with as many
/// intervals as members. Lower is more uniform.
pub fn line_distribution(front: &[[f64; 2]]) -> f64 {
    match bounds_of([front]) {
        Some((lo, hi)) => line_distribution_in(front, lo, hi, front.len()),
        None => f64::NAN,
    }
}

/// Number of points in `a` dominated by at least one point in `b`.
pub fn dominated_count(a: &[[f64; 2]], b: &[[f64; 2]]) -> usize {
    a.iter().filter(|p| b.iter().any(|q| dominates(q, p))).count()
}

pub(crate) fn lexicographic(a: &[f64; 2], b: &[f64; 2]) -> Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
}
