use std::cmp::Ordering;

use super::Individual;

/// `a` dominates `b` under minimization.
pub fn dominates(a: &[f64; 2], b: &[f64; 2]) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1])
}

/// Fast non-dominated sorting; returns the front index of every point.
pub fn nondominated_sort(points: &[[f64; 2]]) -> Vec<usize> {
    let n = points.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates(&points[i], &points[j]) {
                dominates_list[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominates_list[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut rank = vec![0usize; n];
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    let mut level = 0;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            rank[i] = level;
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        level += 1;
        current = next;
    }
    rank
}

/// Crowding distance of each member of one front. Boundary members of each
/// objective get `+inf`; an objective with zero spread adds nothing else.
#[allow(clippy::needless_range_loop)]
pub fn crowding(front: &[[f64; 2]]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n == 0 {
        return dist;
    }
    for obj in 0..2 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| front[a][obj].partial_cmp(&front[b][obj]).unwrap_or(Ordering::Equal));
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let span = front[order[n - 1]][obj] - front[order[0]][obj];
        if span <= 0.0 {
            continue;
        }
        for w in 1..n.saturating_sub(1) {
            let (lo, mid, hi) = (order[w - 1], order[w], order[w + 1]);
            dist[mid] += (front[hi][obj] - front[lo][obj]) / span;
        }
    }
    dist
}

/// Assigns `rank` and per-front `crowding` to every individual.
pub fn rank_and_crowd(pop: &mut [Individual]) {
    let points: Vec<[f64; 2]> = pop.iter().map(|i| i.fitness).collect();
    let ranks = nondominated_sort(&points);
    let levels = ranks.iter().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); levels];
    for (i, &r) in ranks.iter().enumerate() {
        members[r].push(i);
    }
    for idx in members {
        let front: Vec<[f64; 2]> = idx.iter().map(|&i| points[i]).collect();
        for (&i, d) in idx.iter().zip(crowding(&front)) {
            pop[i].rank = ranks[i];
            pop[i].crowding = d;
        }
    }
}

/// Ranks, crowds and stably sorts by (rank ascending, crowding descending).
pub fn sort_population(pop: &mut [Individual]) {
    rank_and_crowd(pop);
    pop.sort_by(|a, b| {
        a.rank.cmp(&b.rank).then_with(|| b.crowding.partial_cmp(&a.crowding).unwrap_or(Ordering::Equal))
    });
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    /// Peel fronts by brute force: a point is in the current front when no
    /// remaining point dominates it.
    fn brute_force_ranks(points: &[[f64; 2]]) -> Vec<usize> {
        let mut rank = vec![usize::MAX; points.len()];
        let mut level = 0;
        while rank.contains(&usize::MAX) {
            let remaining: Vec<usize> = (0..points.len()).filter(|&i| rank[i] == usize::MAX).collect();
            let front: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| !remaining.iter().any(|&j| dominates(&points[j], &points[i])))
                .collect();
            for i in front {
                rank[i] = level;
            }
            level += 1;
        }
        rank
    }

    #[test]
    fn small_examples() {
        assert_eq!(nondominated_sort(&[[1.0, 2.0], [2.0, 1.0], [2.0, 2.0]]), vec![0, 0, 1]);
        assert_eq!(nondominated_sort(&[[3.0, 3.0]; 5]), vec![0; 5]);
        assert!(nondominated_sort(&[]).is_empty());
    }

    #[test]
    fn crowding_examples() {
        assert_eq!(crowding(&[[0.0, 1.0], [1.0, 0.0]]), vec![f64::INFINITY; 2]);
        let d = crowding(&[[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]]);
        assert_eq!(d[1], 2.0);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        // a duplicate sitting next to its twin gets no gap from the tied objective
        let d = crowding(&[[0.0, 4.0], [1.0, 3.0], [1.0, 3.0], [4.0, 0.0]]);
        assert_eq!(d[1], 0.25 + 0.75);
        assert_eq!(d[2], 0.75 + 0.25);
        assert_eq!(crowding(&[[1.0, 1.0]]), vec![f64::INFINITY]);
    }

    #[test]
    fn degenerate_objective_contributes_nothing() {
        let d = crowding(&[[0.0, 5.0], [1.0, 5.0], [2.0, 5.0], [4.0, 5.0]]);
        assert_eq!(d[1], 2.0 / 4.0);
        assert_eq!(d[2], 3.0 / 4.0);
    }

    proptest! {
        #[test]
        fn matches_brute_force(points in prop::collection::vec((0u8..20, 0u8..20), 0..120)) {
            // a coarse integer grid produces many ties and duplicates
            let pts: Vec<[f64; 2]> = points.iter().map(|&(a, b)| [a as f64, b as f64]).collect();
            prop_assert_eq!(nondominated_sort(&pts), brute_force_ranks(&pts));
        }
    }
}
