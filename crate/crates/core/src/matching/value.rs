use std::f64::consts::E;

use super::{max_value_matching, Allocation, Assign, MatchingProblem};
use crate::arrival::TrialRng;
use crate::error::Result;
use crate::online::{OnlineAlgorithm, Session};

/// Skips the first `floor(n/e)` agents. Each later agent computes a
/// max-value matching of all agents seen so far (itself included) and takes
/// its partner there if that item is still free.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OnlineValueMatching;

impl OnlineValueMatching {
    pub fn prefix(n: usize) -> usize {
        (n as f64 / E).floor() as usize
    }
}

impl OnlineAlgorithm<MatchingProblem> for OnlineValueMatching {
    fn id(&self) -> String {
        "match-value".into()
    }

    fn run(
        &self,
        &items: &usize,
        session: &mut Session<'_, Vec<f64>, Allocation>,
        _rng: &mut TrialRng,
    ) -> Result<()> {
        let prefix = Self::prefix(session.len());
        let mut seen: Vec<(usize, &[f64])> = Vec::with_capacity(session.len());
        while let Some(a) = session.next_arrival()? {
            seen.push((a.index, a.request.as_slice()));
            if a.position < prefix {
                continue;
            }
            let m = max_value_matching(&seen, items);
            if let Some(item) = m.partner(a.index) {
                if session.admits(&Assign(item)) {
                    session.act(Assign(item))?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::BipartiteValueMatrix;
    use super::*;
    use crate::arrival::{rng_for, Stream};
    use crate::online::{execute, Problem};

    #[test]
    fn identity_preferences_serve_every_late_agent() {
        let n = 10;
        let rows = (0..n)
            .map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect())
            .collect();
        let p = MatchingProblem::new(BipartiteValueMatrix::new(rows).unwrap());
        let order: Vec<usize> = (0..n).rev().collect();
        let mut rng = rng_for(0, Stream::Algorithm);
        let s = execute(&OnlineValueMatching, &p, &order, &mut rng).unwrap();
        assert_eq!(p.objective(&s), (n - OnlineValueMatching::prefix(n)) as f64);
    }
}
