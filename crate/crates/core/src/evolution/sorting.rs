//! Fast non-dominated sorting, crowding distance and elitist survival.

use crate::objectives::ObjectivePair;
use crate::scalar::Scalar;

/// Pareto fronts of a population with per-member rank and crowding.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontPartition<T> {
    /// Member indices per front, best front first, ascending within a front.
    pub fronts: Vec<Vec<usize>>,
    /// Front index of each member.
    pub rank: Vec<usize>,
    /// Crowding distance of each member within its front; infinite at the
    /// extremes of each objective.
    pub crowding: Vec<T>,
}

/// Deb's O(M N^2) non-dominated sort followed by crowding assignment.
pub fn fast_nondominated_sort<T: Scalar>(points: &[ObjectivePair<T>]) -> FrontPartition<T> {
    let n = points.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if points[i].dominates(&points[j]) {
                dominated_by_me[i].push(j);
                domination_count[j] += 1;
            } else if points[j].dominates(&points[i]) {
                dominated_by_me[j].push(i);
                domination_count[i] += 1;
            }
        }
    }

    let mut rank = vec![0usize; n];
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by_me[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    rank[j] = fronts.len() + 1;
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }

    let mut crowding = vec![T::zero(); n];
    for front in &fronts {
        assign_crowding(points, front, &mut crowding);
    }
    FrontPartition {
        fronts,
        rank,
        crowding,
    }
}

fn assign_crowding<T: Scalar>(points: &[ObjectivePair<T>], front: &[usize], crowding: &mut [T]) {
    if front.len() <= 2 {
        for &i in front {
            crowding[i] = T::infinity();
        }
        return;
    }
    let objectives: [fn(&ObjectivePair<T>) -> T; 2] = [|p| p.f1, |p| p.f2];
    for value in objectives {
        let mut order = front.to_vec();
        order.sort_by(|&a, &b| {
            value(&points[a])
                .partial_cmp(&value(&points[b]))
                .expect("finite objectives")
        });
        let first = order[0];
        let last = order[order.len() - 1];
        crowding[first] = T::infinity();
        crowding[last] = T::infinity();
        let range = value(&points[last]) - value(&points[first]);
        if range <= T::zero() {
            continue;
        }
        for w in order.windows(3) {
            let gap = value(&points[w[2]]) - value(&points[w[0]]);
            crowding[w[1]] = crowding[w[1]] + gap / range;
        }
    }
}

/// Indices of the `n` survivors: whole fronts in rank order, then the
/// front that does not fit entirely by descending crowding (ties by index).
pub fn select_survivors<T: Scalar>(partition: &FrontPartition<T>, n: usize) -> Vec<usize> {
    let mut chosen = Vec::with_capacity(n);
    for front in &partition.fronts {
        if chosen.len() + front.len() <= n {
            chosen.extend_from_slice(front);
            continue;
        }
        let mut rest = front.clone();
        rest.sort_by(|&a, &b| {
            partition.crowding[b]
                .partial_cmp(&partition.crowding[a])
                .expect("crowding is never NaN")
                .then(a.cmp(&b))
        });
        chosen.extend(rest.into_iter().take(n - chosen.len()));
        break;
    }
    chosen
}
