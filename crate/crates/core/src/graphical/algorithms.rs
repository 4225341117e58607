use rand::seq::SliceRandom;
use rand::Rng;

use super::{Edge, Forest, ForestProblem};
use crate::arrival::TrialRng;
use crate::error::Result;
use crate::numeric::Ranked;
use crate::online::{OnlineAlgorithm, Session};
use crate::secretary::Pick;

/// Observes the first half, then keeps every later edge weighing at least
/// `max_first_half / 2^r` that does not close a cycle, with `r` uniform on
/// `0..=floor(log2 n)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RandomThreshold {
    /// Fixes `r` instead of drawing it.
    pub forced_r: Option<u32>,
}

impl RandomThreshold {
    pub fn with_r(r: u32) -> Self {
        Self { forced_r: Some(r) }
    }
}

impl OnlineAlgorithm<ForestProblem> for RandomThreshold {
    fn id(&self) -> String {
        match self.forced_r {
            None => "graph-randthresh".into(),
            Some(r) => format!("graph-randthresh:r={r}"),
        }
    }

    fn randomized(&self) -> bool {
        self.forced_r.is_none()
    }

    fn run(
        &self,
        _vertices: &usize,
        session: &mut Session<'_, Edge, Forest>,
        rng: &mut TrialRng,
    ) -> Result<()> {
        let n = session.len();
        if n == 0 {
            return Ok(());
        }
        let half = n / 2;
        // An empty first half leaves the threshold at minus infinity.
        let mut v_hat = f64::NEG_INFINITY;
        for _ in 0..half {
            if let Some(a) = session.next_arrival()? {
                v_hat = v_hat.max(a.request.weight);
            }
        }
        let r = match self.forced_r {
            Some(r) => r,
            None => rng.random_range(0..=n.ilog2()),
        };
        let tau = v_hat / 2f64.powi(r as i32);
        while let Some(a) = session.next_arrival()? {
            if a.request.weight >= tau && session.admits(&Pick) {
                session.act(Pick)?;
            }
        }
        Ok(())
    }
}

/// Orients every edge toward the endpoint that comes later in a random
/// vertex priority order, then runs the 50% rule separately on each vertex's
/// incoming edges. All vertices share the global split: the first
/// `floor(n/2)` arrivals are observed only.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VertexPermutation;

impl VertexPermutation {
    /// Draws the priority of each vertex (a uniform permutation).
    pub fn priorities(vertices: usize, rng: &mut TrialRng) -> Vec<usize> {
        let mut p: Vec<usize> = (0..vertices).collect();
        p.shuffle(rng);
        p
    }

    pub fn head(priority: &[usize], e: &Edge) -> usize {
        if priority[e.u] > priority[e.v] {
            e.u
        } else {
            e.v
        }
    }
}

impl OnlineAlgorithm<ForestProblem> for VertexPermutation {
    fn id(&self) -> String {
        "graph-vperm".into()
    }

    fn randomized(&self) -> bool {
        true
    }

    fn run(
        &self,
        &vertices: &usize,
        session: &mut Session<'_, Edge, Forest>,
        rng: &mut TrialRng,
    ) -> Result<()> {
        let priority = Self::priorities(vertices, rng);
        let half = session.len() / 2;
        // Best incoming key seen so far per vertex, and whether it has picked.
        let mut best: Vec<Option<Ranked>> = vec![None; vertices];
        let mut done = vec![false; vertices];
        while let Some(a) = session.next_arrival()? {
            let h = Self::head(&priority, a.request);
            let key = Ranked::new(a.request.weight, a.index);
            let beats = best[h].is_none_or(|b| key > b);
            if beats {
                best[h] = Some(key);
            }
            if a.position >= half && beats && !done[h] {
                session.act(Pick)?;
                done[h] = true;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::WeightedGraph;
    use super::*;
    use crate::arrival::{rng_for, Stream};
    use crate::online::execute;

    #[test]
    fn empty_first_half_leaves_threshold_open() {
        let g = WeightedGraph::new(
            2,
            vec![Edge {
                u: 0,
                v: 1,
                weight: 1.0,
            }],
        )
        .unwrap();
        let p = ForestProblem::new(g);
        let mut rng = rng_for(0, Stream::Algorithm);
        let s = execute(&RandomThreshold::default(), &p, &[0], &mut rng).unwrap();
        assert_eq!(s.picked(), &[0]);
    }

    #[test]
    fn head_is_higher_priority_endpoint() {
        let prio = vec![2, 0, 1];
        assert_eq!(
            VertexPermutation::head(
                &prio,
                &Edge {
                    u: 0,
                    v: 1,
                    weight: 0.0
                }
            ),
            0
        );
        assert_eq!(
            VertexPermutation::head(
                &prio,
                &Edge {
                    u: 1,
                    v: 2,
                    weight: 0.0
                }
            ),
            2
        );
    }
}
