use std::f64::consts::E;

use super::{Pick, SelectionProblem};
use crate::arrival::TrialRng;
use crate::error::{Error, Result};
use crate::numeric::{harmonic, Ranked};
use crate::online::{OnlineAlgorithm, Problem, Session};

/// How long a wait-and-pick strategy waits before it may pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefixRule {
    /// `floor(n/2)`: the 50% algorithm.
    Half,
    /// `floor(n/e)`: the 37% algorithm.
    InverseE,
    Fixed(usize),
}

impl PrefixRule {
    pub fn length(&self, n: usize) -> usize {
        match *self {
            PrefixRule::Half => n / 2,
            PrefixRule::InverseE => (n as f64 / E).floor() as usize,
            PrefixRule::Fixed(m) => m,
        }
    }
}

/// Rejects the first `m` arrivals, then picks the first prefix-maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaitAndPick {
    pub rule: PrefixRule,
}

impl WaitAndPick {
    pub fn fifty_percent() -> Self {
        Self {
            rule: PrefixRule::Half,
        }
    }

    pub fn thirty_seven_percent() -> Self {
        Self {
            rule: PrefixRule::InverseE,
        }
    }

    pub fn with_prefix(m: usize) -> Self {
        Self {
            rule: PrefixRule::Fixed(m),
        }
    }
}

/// Runs one wait-and-pick pass over the next `len` arrivals of `session`.
/// Returns whether an item was picked. Used directly and by the segmented
/// k-secretary baseline.
pub(crate) fn wait_and_pick_segment<R, S>(
    session: &mut Session<'_, R, S>,
    len: usize,
    m: usize,
    value: impl Fn(&R) -> f64,
) -> Result<bool>
where
    S: crate::online::Constraint<R, Action = Pick>,
{
    let mut best: Option<Ranked> = None;
    for step in 0..len {
        let Some(arrival) = session.next_arrival()? else {
            break;
        };
        let key = Ranked::new(value(arrival.request), arrival.index);
        let is_prefix_max = best.is_none_or(|b| key > b);
        if is_prefix_max {
            best = Some(key);
        }
        if step >= m && is_prefix_max {
            session.act(Pick)?;
            // The rest of the segment is passed over.
            for _ in step + 1..len {
                if session.next_arrival()?.is_none() {
                    break;
                }
            }
            return Ok(true);
        }
    }
    Ok(false)
}

impl OnlineAlgorithm<SelectionProblem> for WaitAndPick {
    fn id(&self) -> String {
        match self.rule {
            PrefixRule::Half => "secretary-50".into(),
            PrefixRule::InverseE => "secretary-37".into(),
            PrefixRule::Fixed(m) => format!("waitpick:m={m}"),
        }
    }

    fn run(
        &self,
        _public: &usize,
        session: &mut Session<'_, f64, <SelectionProblem as Problem>::State>,
        _rng: &mut TrialRng,
    ) -> Result<()> {
        let n = session.len();
        let m = self.rule.length(n);
        if m >= n {
            return Err(Error::param(format!(
                "rejection prefix m={m} must be smaller than n={n}"
            )));
        }
        wait_and_pick_segment(session, n, m, |v| *v)?;
        Ok(())
    }
}

/// Probability that wait-and-pick with prefix `m` selects the maximum of `n`
/// distinct values: `(m/n)(H_{n-1} - H_{m-1})`, and `1/n` for `m = 0`.
pub fn success_probability_formula(n: usize, m: usize) -> Result<f64> {
    if m >= n {
        return Err(Error::param(format!(
            "prefix m={m} must be smaller than n={n}"
        )));
    }
    if m == 0 {
        return Ok(1.0 / n as f64);
    }
    Ok(m as f64 / n as f64 * (harmonic(n - 1) - harmonic(m - 1)))
}

/// The prefix length in `1..n` with the highest success probability; ties go
/// to the smaller prefix.
pub fn best_wait_threshold(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::param(format!("need n >= 2, got {n}")));
    }
    let mut best = (1, success_probability_formula(n, 1)?);
    for m in 2..n {
        let p = success_probability_formula(n, m)?;
        if p > best.1 {
            best = (m, p);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrival::{rng_for, Stream};
    use crate::online::execute;
    use crate::values::ValueInstance;

    fn picked(values: &[f64], order: &[usize], alg: WaitAndPick) -> Vec<usize> {
        let p = SelectionProblem::single(ValueInstance::new(values.to_vec()).unwrap());
        let mut rng = rng_for(0, Stream::Algorithm);
        execute(&alg, &p, order, &mut rng)
            .unwrap()
            .picked()
            .to_vec()
    }

    #[test]
    fn fifty_percent_traces() {
        assert_eq!(
            picked(&[1.0, 5.0], &[0, 1], WaitAndPick::fifty_percent()),
            vec![1]
        );
        assert!(picked(&[1.0, 5.0], &[1, 0], WaitAndPick::fifty_percent()).is_empty());
    }

    #[test]
    fn empty_prefix_picks_first() {
        assert_eq!(
            picked(&[1.0, 5.0, 3.0], &[2, 1, 0], WaitAndPick::with_prefix(0)),
            vec![2]
        );
    }

    #[test]
    fn formula_values() {
        assert!((success_probability_formula(2, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((success_probability_formula(4, 1).unwrap() - 11.0 / 24.0).abs() < 1e-15);
        assert!((success_probability_formula(4, 2).unwrap() - 5.0 / 12.0).abs() < 1e-15);
        assert!(success_probability_formula(3, 3).is_err());
    }

    #[test]
    fn best_thresholds() {
        assert_eq!(best_wait_threshold(3).unwrap(), 1);
        assert_eq!(best_wait_threshold(4).unwrap(), 1);
        let n = 2000;
        let m = best_wait_threshold(n).unwrap();
        assert!((m as f64 / n as f64 - 1.0 / E).abs() < 1e-3);
    }

    #[test]
    fn prefix_too_long_is_rejected() {
        let p = SelectionProblem::single(ValueInstance::new(vec![1.0, 2.0]).unwrap());
        let mut rng = rng_for(0, Stream::Algorithm);
        let err = execute(&WaitAndPick::with_prefix(2), &p, &[0, 1], &mut rng).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)));
    }
}
