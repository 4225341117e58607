//! The two-phase order-oblivious contract.
//!
//! Phase one shows the algorithm a random sample of the items, none of which
//! may be picked. Phase two presents the remaining items in any order, and the
//! algorithm picks by a fixed rule learned from the sample. Algorithms that
//! fit this shape can be driven by the prophet-from-samples wrapper as well as
//! by a random arrival order.

use super::Pick;
use crate::error::{Error, Result};
use crate::numeric::{Ranked, Threshold};
use crate::online::{Constraint, Session};

/// What phase one hands to phase two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseTwoRule {
    pub threshold: Threshold,
    /// Maximum number of phase-two picks.
    pub budget: usize,
}

pub trait OrderOblivious: Send + Sync {
    fn id(&self) -> String;

    /// Probability that an item is routed to phase one, given `n` items and
    /// budget `k`.
    fn sample_probability(&self, n: usize, k: usize) -> Result<f64>;

    /// Turns the phase-one keys into a phase-two rule.
    fn learn(&self, sample: &[Ranked], n: usize, k: usize) -> Result<PhaseTwoRule>;
}

/// Phase two: picks the first `budget` arrivals strictly above the threshold.
/// Returns the number of picks.
pub fn run_two_phase<R, S>(
    rule: PhaseTwoRule,
    session: &mut Session<'_, R, S>,
    value: impl Fn(&R) -> f64,
) -> Result<usize>
where
    S: Constraint<R, Action = Pick>,
{
    let mut picks = 0;
    while picks < rule.budget {
        let Some(arrival) = session.next_arrival()? else {
            break;
        };
        if rule
            .threshold
            .admits(Ranked::new(value(arrival.request), arrival.index))
        {
            session.act(Pick)?;
            picks += 1;
        }
    }
    Ok(picks)
}

/// The single-item 50% algorithm in two-phase form: a fair coin per item, and
/// phase two takes the first item beating the whole sample.
#[derive(Debug, Clone, Copy, Default)]
pub struct FiftyPercentOblivious;

impl OrderOblivious for FiftyPercentOblivious {
    fn id(&self) -> String {
        "secretary-50".into()
    }

    fn sample_probability(&self, _n: usize, _k: usize) -> Result<f64> {
        Ok(0.5)
    }

    fn learn(&self, sample: &[Ranked], _n: usize, _k: usize) -> Result<PhaseTwoRule> {
        Ok(PhaseTwoRule {
            threshold: Threshold::rank_of(sample, 1),
            budget: 1,
        })
    }
}

pub(crate) fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!(
            "{name}={x} must lie strictly between 0 and 1"
        )))
    }
}
