//! Trial records, summaries, and exact enumeration over all arrival orders.

use itertools::Itertools;

use crate::arrival::{rng_for, ArrivalSchedule, Stream};
use crate::error::{Error, Result};
use crate::numeric::{mean_and_stderr, TOL};
use crate::online::{
    execute, execute_with_counters, Counters, OnlineAlgorithm, Oracle, Problem, Sense,
};

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub algorithm_id: String,
    pub instance_id: String,
    pub seed: u64,
    pub n: usize,
    pub sense: Sense,
    pub alg_objective: f64,
    pub oracle_objective: f64,
    /// `oracle / alg` when maximizing, `alg / oracle` when minimizing.
    pub ratio: f64,
    pub counters: Counters,
}

fn ratio_of(num: f64, den: f64) -> f64 {
    if den.abs() <= TOL {
        if num.abs() <= TOL {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

impl TrialRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        algorithm_id: impl Into<String>,
        instance_id: impl Into<String>,
        seed: u64,
        n: usize,
        sense: Sense,
        alg_objective: f64,
        oracle_objective: f64,
        counters: Counters,
    ) -> Result<Self> {
        let ratio = match sense {
            Sense::Maximize => {
                if alg_objective > oracle_objective + TOL {
                    return Err(Error::contract(format!(
                        "objective {alg_objective} exceeds the offline optimum {oracle_objective}"
                    )));
                }
                ratio_of(oracle_objective, alg_objective)
            }
            Sense::Minimize => {
                if alg_objective < oracle_objective - TOL {
                    return Err(Error::contract(format!(
                        "cost {alg_objective} is below the offline optimum {oracle_objective}"
                    )));
                }
                ratio_of(alg_objective, oracle_objective)
            }
        };
        Ok(Self {
            algorithm_id: algorithm_id.into(),
            instance_id: instance_id.into(),
            seed,
            n,
            sense,
            alg_objective,
            oracle_objective,
            ratio,
            counters,
        })
    }
}

/// Runs one trial: the algorithm sees `problem`'s requests in schedule order,
/// drawing any coins from the algorithm stream of `trial_seed`.
pub fn run_trial<P, A, O>(
    algorithm: &A,
    problem: &P,
    schedule: &ArrivalSchedule,
    oracle: &O,
    trial_seed: u64,
) -> Result<TrialRecord>
where
    P: Problem,
    A: OnlineAlgorithm<P> + ?Sized,
    O: Oracle<P> + ?Sized,
{
    if schedule.len() != problem.len() {
        return Err(Error::instance(format!(
            "schedule has {} arrivals but the instance has {} requests",
            schedule.len(),
            problem.len()
        )));
    }
    let mut rng = rng_for(trial_seed, Stream::Algorithm);
    let (state, mut counters) =
        execute_with_counters(algorithm, problem, schedule.order(), &mut rng)?;
    let oracle_objective = oracle.optimum(problem)?;
    counters.extend(problem.counters(&state, oracle_objective));
    TrialRecord::new(
        algorithm.id(),
        "inline",
        trial_seed,
        problem.len(),
        problem.sense(),
        problem.objective(&state),
        oracle_objective,
        counters,
    )
}

/// Aggregate over a batch of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub trials: usize,
    pub mean_ratio: f64,
    pub std_error: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub mean_alg: f64,
    pub alg_std_error: f64,
    pub mean_oracle: f64,
    pub counter_means: std::collections::BTreeMap<String, f64>,
}

impl RunSummary {
    pub fn from_records(records: &[TrialRecord]) -> Option<Self> {
        if records.is_empty() {
            return None;
        }
        let ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
        let (mean_ratio, se) = mean_and_stderr(&ratios);
        let std_error = if se.is_nan() { f64::INFINITY } else { se };
        let algs: Vec<f64> = records.iter().map(|r| r.alg_objective).collect();
        let (mean_alg, alg_std_error) = mean_and_stderr(&algs);
        let mean_oracle =
            records.iter().map(|r| r.oracle_objective).sum::<f64>() / records.len() as f64;
        let mut counter_means = std::collections::BTreeMap::new();
        for r in records {
            for (k, &v) in &r.counters {
                *counter_means.entry(k.clone()).or_insert(0.0) += v as f64;
            }
        }
        for v in counter_means.values_mut() {
            *v /= records.len() as f64;
        }
        Some(Self {
            trials: records.len(),
            mean_ratio,
            std_error,
            min_ratio: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
            max_ratio: ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            mean_alg,
            alg_std_error,
            mean_oracle,
            counter_means,
        })
    }

    /// Relative gap `|mean_oracle - mean_alg| / mean_oracle` (regret for
    /// maximization, excess cost for minimization).
    pub fn relative_gap(&self) -> f64 {
        (self.mean_oracle - self.mean_alg).abs() / self.mean_oracle
    }
}

/// Exact expectation over all `n!` arrival orders.
#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub orders: u64,
    pub mean_objective: f64,
    /// Orders on which the algorithm matched the offline optimum.
    pub successes: u64,
    pub success_probability: f64,
}

pub const MAX_ENUMERATION: usize = 10;

/// Averages a deterministic algorithm over every permutation of the requests.
pub fn enumerate_expectation<P, A, O>(algorithm: &A, problem: &P, oracle: &O) -> Result<Expectation>
where
    P: Problem,
    A: OnlineAlgorithm<P> + ?Sized,
    O: Oracle<P> + ?Sized,
{
    let n = problem.len();
    if n > MAX_ENUMERATION {
        return Err(Error::SizeLimit {
            what: "request count for enumeration",
            got: n,
            limit: MAX_ENUMERATION,
        });
    }
    if algorithm.randomized() {
        return Err(Error::Unsupported(format!(
            "{} is randomized; exact enumeration needs a deterministic algorithm",
            algorithm.id()
        )));
    }
    let opt = oracle.optimum(problem)?;
    let mut rng = rng_for(0, Stream::Algorithm);
    let mut orders = 0u64;
    let mut successes = 0u64;
    let mut total = 0.0;
    for perm in (0..n).permutations(n) {
        let state = execute(algorithm, problem, &perm, &mut rng)?;
        let obj = problem.objective(&state);
        let hit = match problem.sense() {
            Sense::Maximize => obj >= opt - TOL,
            Sense::Minimize => obj <= opt + TOL,
        };
        successes += hit as u64;
        total += obj;
        orders += 1;
    }
    Ok(Expectation {
        orders,
        mean_objective: total / orders as f64,
        successes,
        success_probability: successes as f64 / orders as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(sense: Sense, alg: f64, opt: f64) -> Result<TrialRecord> {
        TrialRecord::new("a", "i", 0, 1, sense, alg, opt, Counters::new())
    }

    #[test]
    fn ratios_follow_sense() {
        assert_eq!(rec(Sense::Maximize, 2.0, 4.0).unwrap().ratio, 2.0);
        assert_eq!(rec(Sense::Minimize, 6.0, 4.0).unwrap().ratio, 1.5);
        assert_eq!(rec(Sense::Maximize, 0.0, 4.0).unwrap().ratio, f64::INFINITY);
        assert_eq!(rec(Sense::Maximize, 0.0, 0.0).unwrap().ratio, 1.0);
    }

    #[test]
    fn records_reject_beating_the_oracle() {
        assert!(rec(Sense::Maximize, 5.0, 4.0).is_err());
        assert!(rec(Sense::Minimize, 3.0, 4.0).is_err());
        assert!(rec(Sense::Maximize, 4.0 + 1e-12, 4.0).is_ok());
    }

    #[test]
    fn summary_of_single_record_echoes_it() {
        let r = rec(Sense::Minimize, 6.0, 4.0).unwrap();
        let s = RunSummary::from_records(&[r]).unwrap();
        assert_eq!(s.mean_ratio, 1.5);
        assert_eq!(s.std_error, 0.0);
        assert!(s.min_ratio <= s.mean_ratio && s.mean_ratio <= s.max_ratio);
    }
}
