//! Prophet model from one sample per item.
//!
//! Each item `i` has a sample `s_i` and a real value `v_i`, independent draws
//! from the same distribution. A coin per item decides which one the wrapped
//! order-oblivious algorithm sees: heads sends `s_i` to phase one, tails sends
//! `v_i` to phase two. Phase-two items then arrive in the adversary's order.

use std::sync::Arc;

use rand::Rng;

use crate::arrival::{rng_for, Stream, TrialRng};
use crate::error::{Error, Result};
use crate::numeric::Ranked;
use crate::online::{Counters, OnlineAlgorithm, Oracle, Problem, Sense, Session};
use crate::secretary::{
    top_k, Cardinality, FiftyPercentOblivious, KHalves, KOblivious, OrderOblivious, Pick, TopK,
};
use crate::values::ValueInstance;

/// The samples and the budget are known before the first arrival.
#[derive(Debug, Clone, PartialEq)]
pub struct ProphetPublic {
    pub samples: Vec<f64>,
    pub k: usize,
}

/// Real values (requests) plus one sample per item.
#[derive(Debug, Clone)]
pub struct ProphetProblem {
    values: ValueInstance,
    public: ProphetPublic,
}

impl ProphetProblem {
    pub fn new(samples: Vec<f64>, values: ValueInstance, k: usize) -> Result<Self> {
        if samples.len() != values.len() {
            return Err(Error::instance(format!(
                "{} samples for {} items",
                samples.len(),
                values.len()
            )));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::instance("samples must be finite"));
        }
        if k == 0 || k > values.len() {
            return Err(Error::param(format!(
                "budget k={k} must lie in 1..={}",
                values.len()
            )));
        }
        Ok(Self {
            values,
            public: ProphetPublic { samples, k },
        })
    }

    /// `n` items with i.i.d. U[0,1) samples and values, drawn per item
    /// (sample first) on the instance stream of `seed`.
    pub fn uniform(n: usize, k: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_for(seed, Stream::Instance);
        let (samples, values): (Vec<f64>, Vec<f64>) = (0..n)
            .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
            .unzip();
        Self::new(samples, ValueInstance::new(values)?, k)
    }

    pub fn values(&self) -> &ValueInstance {
        &self.values
    }

    pub fn samples(&self) -> &[f64] {
        &self.public.samples
    }

    pub fn k(&self) -> usize {
        self.public.k
    }
}

impl Problem for ProphetProblem {
    type Request = f64;
    type Public = ProphetPublic;
    type State = Cardinality;

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn requests(&self) -> &[f64] {
        self.values.values()
    }

    fn public(&self) -> &ProphetPublic {
        &self.public
    }

    fn initial_state(&self) -> Cardinality {
        Cardinality::new(self.public.k)
    }

    fn objective(&self, state: &Cardinality) -> f64 {
        state
            .picked()
            .iter()
            .map(|&i| self.values.values()[i])
            .sum()
    }

    fn counters(&self, state: &Cardinality, _oracle_objective: f64) -> Counters {
        let mut c = Counters::new();
        c.insert("items_picked".into(), state.picked().len() as i64);
        c
    }
}

/// The prophet benchmark on realized values: the best `k` of them.
impl Oracle<ProphetProblem> for TopK {
    fn optimum(&self, problem: &ProphetProblem) -> Result<f64> {
        Ok(top_k(problem.values(), problem.k()).value)
    }
}

/// Fixed adversarial orders over the realized values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryOrder {
    Ascending,
    Descending,
    /// The maximum first, the rest by index.
    MaxFirst,
    /// The rest by index, the maximum last.
    MaxLast,
}

impl AdversaryOrder {
    pub const ALL: [AdversaryOrder; 4] = [
        AdversaryOrder::Ascending,
        AdversaryOrder::Descending,
        AdversaryOrder::MaxFirst,
        AdversaryOrder::MaxLast,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            AdversaryOrder::Ascending => "asc",
            AdversaryOrder::Descending => "desc",
            AdversaryOrder::MaxFirst => "maxfirst",
            AdversaryOrder::MaxLast => "maxlast",
        }
    }

    pub fn parse(tag: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.tag() == tag)
            .ok_or_else(|| {
                Error::param(format!(
                    "unknown adversary order '{tag}' (asc|desc|maxfirst|maxlast)"
                ))
            })
    }

    pub fn order(self, values: &ValueInstance) -> Vec<usize> {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        match self {
            AdversaryOrder::Ascending => order.sort_by_key(|&i| values.key(i)),
            AdversaryOrder::Descending => order.sort_by_key(|&i| std::cmp::Reverse(values.key(i))),
            AdversaryOrder::MaxFirst => {
                let m = values.argmax();
                order.retain(|&i| i != m);
                order.insert(0, m);
            }
            AdversaryOrder::MaxLast => {
                let m = values.argmax();
                order.retain(|&i| i != m);
                order.push(m);
            }
        }
        order
    }
}

/// Which items went to phase one, by item index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProphetTrace {
    pub phase_one: Vec<bool>,
}

/// Runs an order-oblivious algorithm on the prophet model.
#[derive(Clone)]
pub struct ProphetFromSamples {
    inner: Arc<dyn OrderOblivious>,
}

impl std::fmt::Debug for ProphetFromSamples {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProphetFromSamples")
            .field("inner", &self.inner.id())
            .finish()
    }
}

impl ProphetFromSamples {
    pub fn new(inner: Arc<dyn OrderOblivious>) -> Self {
        Self { inner }
    }

    /// Wraps the algorithm registered under `id`.
    pub fn by_id(id: &str) -> Result<Self> {
        Ok(Self::new(order_oblivious_by_id(id)?))
    }

    pub fn inner_id(&self) -> String {
        self.inner.id()
    }

    pub fn run_traced(
        &self,
        public: &ProphetPublic,
        session: &mut Session<'_, f64, Cardinality>,
        rng: &mut TrialRng,
    ) -> Result<ProphetTrace> {
        let n = public.samples.len();
        let k = public.k;
        let p = self.inner.sample_probability(n, k)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param(format!(
                "sample probability {p} is not in [0, 1]"
            )));
        }
        let phase_one: Vec<bool> = (0..n).map(|_| rng.random_bool(p)).collect();
        let sample: Vec<Ranked> = (0..n)
            .filter(|&i| phase_one[i])
            .map(|i| Ranked::new(public.samples[i], i))
            .collect();
        let rule = self.inner.learn(&sample, n, k)?;
        let mut picks = 0;
        while let Some(a) = session.next_arrival()? {
            if phase_one[a.index] || picks >= rule.budget {
                continue;
            }
            if rule.threshold.admits(Ranked::new(*a.request, a.index)) && session.admits(&Pick) {
                session.act(Pick)?;
                picks += 1;
            }
        }
        Ok(ProphetTrace { phase_one })
    }
}

impl OnlineAlgorithm<ProphetProblem> for ProphetFromSamples {
    fn id(&self) -> String {
        format!("prophet-sample:inner={}", self.inner.id())
    }

    fn randomized(&self) -> bool {
        true
    }

    fn run(
        &self,
        public: &ProphetPublic,
        session: &mut Session<'_, f64, Cardinality>,
        rng: &mut TrialRng,
    ) -> Result<()> {
        self.run_traced(public, session, rng).map(drop)
    }
}

/// Selection algorithms that exist but pick from a fixed prefix rather than
/// a coin-split sample.
const PREFIX_ONLY: [&str; 4] = ["secretary-37", "waitpick", "ksec-seg", "ksec-adapt"];

/// Order-oblivious algorithm registered under `id` (default parameters).
pub fn order_oblivious_by_id(id: &str) -> Result<Arc<dyn OrderOblivious>> {
    match id {
        "secretary-50" => Ok(Arc::new(FiftyPercentOblivious)),
        "ksec-halves" => Ok(Arc::new(KHalves)),
        "ksec-obliv" => Ok(Arc::new(KOblivious::default())),
        other
            if PREFIX_ONLY
                .iter()
                .any(|p| other == *p || other.starts_with(&format!("{p}:"))) =>
        {
            Err(Error::contract(format!(
                "'{other}' has no two-phase order-oblivious form and cannot be wrapped"
            )))
        }
        other => Err(Error::param(format!(
            "unknown order-oblivious algorithm '{other}'"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::online::execute;

    #[test]
    fn prefix_algorithms_cannot_be_wrapped() {
        assert!(matches!(
            ProphetFromSamples::by_id("secretary-37"),
            Err(Error::ContractViolation(_))
        ));
        assert!(matches!(
            ProphetFromSamples::by_id("bogus"),
            Err(Error::Parameter(_))
        ));
        assert!(ProphetFromSamples::by_id("secretary-50").is_ok());
    }

    #[test]
    fn adversary_orders() {
        let v = ValueInstance::new(vec![0.2, 0.9, 0.5]).unwrap();
        assert_eq!(AdversaryOrder::Ascending.order(&v), vec![0, 2, 1]);
        assert_eq!(AdversaryOrder::Descending.order(&v), vec![1, 2, 0]);
        assert_eq!(AdversaryOrder::MaxFirst.order(&v), vec![1, 0, 2]);
        assert_eq!(AdversaryOrder::MaxLast.order(&v), vec![0, 2, 1]);
    }

    #[test]
    fn single_item_picks_iff_sent_to_phase_two() {
        let alg = ProphetFromSamples::by_id("secretary-50").unwrap();
        for seed in 0..64 {
            let p = ProphetProblem::uniform(1, 1, seed).unwrap();
            let mut rng = rng_for(seed, Stream::Algorithm);
            let mut session = Session::new(p.requests(), &[0], p.initial_state()).unwrap();
            let trace = alg.run_traced(p.public(), &mut session, &mut rng).unwrap();
            let state = session.finish().unwrap();
            assert_eq!(state.picked().is_empty(), trace.phase_one[0]);
        }
        let p = ProphetProblem::uniform(1, 1, 0).unwrap();
        assert!(execute(&alg, &p, &[0], &mut rng_for(0, Stream::Algorithm)).is_ok());
    }
}
