//! Stochastic inputs: Steiner tree with i.i.d. requests, and the prophet
//! setting reached through one sample per distribution.

mod prophet;
mod steiner;

pub use prophet::{
    order_oblivious_by_id, AdversaryOrder, ProphetFromSamples, ProphetProblem, ProphetPublic,
    ProphetTrace,
};
pub use steiner::{
    augmented_greedy, AugmentedGreedy, Buy, GreedySteiner, SampleTree, SteinerOracle,
    SteinerProblem, SteinerSetting, SteinerState,
};

use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::online::OfflineOptimum;

/// Metrics the exact Steiner oracle accepts.
pub const STEINER_EXACT_LIMIT: usize = 12;

/// A spanning tree over a point multiset. Edges are positions in the input
/// slice, not metric points, so repeated points stay distinct members.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    pub edges: Vec<(usize, usize)>,
    pub cost: f64,
}

/// Minimum spanning tree of `points` (a multiset of metric points) by Prim's
/// algorithm. Repeated points join at distance zero.
pub fn mst(metric: &MetricSpace, points: &[usize]) -> SpanningTree {
    let m = points.len();
    let mut edges = Vec::with_capacity(m.saturating_sub(1));
    let mut cost = 0.0;
    if m <= 1 {
        return SpanningTree { edges, cost };
    }
    let mut in_tree = vec![false; m];
    let mut best = vec![f64::INFINITY; m];
    let mut parent = vec![0usize; m];
    in_tree[0] = true;
    for j in 1..m {
        best[j] = metric.d(points[0], points[j]);
    }
    for _ in 1..m {
        let mut next = usize::MAX;
        for j in 0..m {
            if !in_tree[j] && (next == usize::MAX || best[j] < best[next]) {
                next = j;
            }
        }
        in_tree[next] = true;
        cost += best[next];
        edges.push((parent[next], next));
        for j in 0..m {
            if !in_tree[j] {
                let d = metric.d(points[next], points[j]);
                if d < best[j] {
                    best[j] = d;
                    parent[j] = next;
                }
            }
        }
    }
    SpanningTree { edges, cost }
}

/// Exact minimum Steiner tree connecting `terminals`: the cheapest MST over
/// the terminals plus any subset of the other points. The witness lists the
/// Steiner points used.
pub fn steiner_opt_small(
    metric: &MetricSpace,
    terminals: &[usize],
) -> Result<OfflineOptimum<Vec<usize>>> {
    let n = metric.len();
    if n > STEINER_EXACT_LIMIT {
        return Err(Error::SizeLimit {
            what: "Steiner metric points",
            got: n,
            limit: STEINER_EXACT_LIMIT,
        });
    }
    if terminals.is_empty() {
        return Err(Error::instance(
            "Steiner instance needs at least one terminal",
        ));
    }
    let mut is_terminal = vec![false; n];
    for &t in terminals {
        metric.check_point(t)?;
        is_terminal[t] = true;
    }
    let base: Vec<usize> = (0..n).filter(|&p| is_terminal[p]).collect();
    let others: Vec<usize> = (0..n).filter(|&p| !is_terminal[p]).collect();

    let mut best = mst(metric, &base).cost;
    let mut best_mask = 0u32;
    if base.len() > 1 {
        let mut pts = base.clone();
        for mask in 1u32..(1u32 << others.len()) {
            pts.truncate(base.len());
            pts.extend(
                others
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &p)| p),
            );
            let c = mst(metric, &pts).cost;
            if c < best {
                best = c;
                best_mask = mask;
            }
        }
    }
    let witness = others
        .iter()
        .enumerate()
        .filter(|(b, _)| best_mask >> b & 1 == 1)
        .map(|(_, &p)| p)
        .collect();
    Ok(OfflineOptimum {
        value: best,
        witness,
        exact: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Center 0 plus three leaves at distance 1 from it and 2 from each other.
    fn unit_star() -> MetricSpace {
        MetricSpace::new(vec![
            vec![0.0, 1.0, 1.0, 1.0],
            vec![1.0, 0.0, 2.0, 2.0],
            vec![1.0, 2.0, 0.0, 2.0],
            vec![1.0, 2.0, 2.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn star_leaves() {
        let m = unit_star();
        assert_eq!(mst(&m, &[1, 2, 3]).cost, 4.0);
        let opt = steiner_opt_small(&m, &[1, 2, 3]).unwrap();
        assert_eq!(opt.value, 3.0);
        assert_eq!(opt.witness, vec![0]);
    }

    #[test]
    fn trivial_trees() {
        let m = unit_star();
        assert_eq!(mst(&m, &[2]).cost, 0.0);
        assert_eq!(mst(&m, &[2, 2, 2]).cost, 0.0);
        assert_eq!(steiner_opt_small(&m, &[1]).unwrap().value, 0.0);
    }

    #[test]
    fn size_limit() {
        let m = MetricSpace::random_euclidean(13, 0).unwrap();
        assert!(matches!(
            steiner_opt_small(&m, &[0, 1]),
            Err(Error::SizeLimit { .. })
        ));
    }
}
