//! The online execution contract.
//!
//! A [`Problem`] owns the request data. An [`OnlineAlgorithm`] never sees it
//! directly: it receives the problem's public part (what is known before the
//! first arrival, e.g. the graph topology) and a [`Session`] that reveals one
//! arrival at a time. Decisions go through [`Session::act`], which applies
//! them to the problem's [`Constraint`] state. The constraint rejects
//! infeasible actions, and an arrival can be acted upon only while it is the
//! current one, so decisions are irrevocable.

use std::collections::BTreeMap;

use crate::arrival::TrialRng;
use crate::error::{Error, Result};

/// Named integer counters attached to a trial (items picked, bins opened, ...).
pub type Counters = BTreeMap<String, i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Feasibility state of one run: the constraint family plus everything
/// decided so far.
pub trait Constraint<R> {
    type Action;

    /// Would `action` on arrival `index` be accepted?
    fn admits(&self, index: usize, request: &R, action: &Self::Action) -> bool;

    /// Applies `action`; on error the state is left unchanged.
    fn apply(&mut self, index: usize, request: &R, action: Self::Action) -> Result<()>;

    /// Whether every arrival must receive an action (covering problems) or
    /// may be passed over (selection problems).
    fn must_serve(&self) -> bool {
        false
    }
}

/// A problem input together with its constraint family and objective.
pub trait Problem {
    type Request;
    type Public: ?Sized;
    type State: Constraint<Self::Request>;

    fn sense(&self) -> Sense;
    fn requests(&self) -> &[Self::Request];
    /// Information available to the algorithm before any arrival.
    fn public(&self) -> &Self::Public;
    fn initial_state(&self) -> Self::State;
    fn objective(&self, state: &Self::State) -> f64;

    fn counters(&self, _state: &Self::State, _oracle_objective: f64) -> Counters {
        Counters::new()
    }

    fn len(&self) -> usize {
        self.requests().len()
    }

    fn is_empty(&self) -> bool {
        self.requests().is_empty()
    }
}

/// An offline optimum: objective value plus the solution attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineOptimum<W> {
    pub value: f64,
    pub witness: W,
    /// False when `value` is only a bound (e.g. large bin-packing instances).
    pub exact: bool,
}

pub trait Oracle<P: Problem + ?Sized> {
    fn optimum(&self, problem: &P) -> Result<f64>;
}

/// An optimum computed ahead of time, reused across trials of one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnownOptimum(pub f64);

impl<P: Problem + ?Sized> Oracle<P> for KnownOptimum {
    fn optimum(&self, _problem: &P) -> Result<f64> {
        Ok(self.0)
    }
}

/// One revealed request.
#[derive(Debug)]
pub struct Arrival<'a, R> {
    /// 0-based position in the arrival sequence.
    pub position: usize,
    /// Index of the request in the instance.
    pub index: usize,
    pub request: &'a R,
}

impl<R> Clone for Arrival<'_, R> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<R> Copy for Arrival<'_, R> {}

/// Sequential view of an arrival order.
pub struct Session<'a, R, S> {
    requests: &'a [R],
    order: &'a [usize],
    next_pos: usize,
    current: Option<(usize, usize)>,
    acted: bool,
    state: S,
    counters: Counters,
}

impl<'a, R, S: Constraint<R>> Session<'a, R, S> {
    /// `order` lists distinct request indices; it may cover only part of
    /// `requests` (the rest never arrive).
    pub fn new(requests: &'a [R], order: &'a [usize], state: S) -> Result<Self> {
        let mut seen = vec![false; requests.len()];
        for &i in order {
            if i >= requests.len() || seen[i] {
                return Err(Error::instance(
                    "arrival sequence repeats or overruns indices",
                ));
            }
            seen[i] = true;
        }
        Ok(Self {
            requests,
            order,
            next_pos: 0,
            current: None,
            acted: false,
            state,
            counters: Counters::new(),
        })
    }

    /// Number of arrivals in this session.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Arrivals revealed so far.
    pub fn revealed(&self) -> usize {
        self.next_pos
    }

    fn check_served(&self) -> Result<()> {
        if let Some((pos, idx)) = self.current {
            if !self.acted && self.state.must_serve() {
                return Err(Error::contract(format!(
                    "request {idx} at position {pos} was left unserved"
                )));
            }
        }
        Ok(())
    }

    /// Reveals the next arrival. The previous arrival can no longer be acted on.
    pub fn next_arrival(&mut self) -> Result<Option<Arrival<'a, R>>> {
        self.check_served()?;
        if self.next_pos >= self.order.len() {
            self.current = None;
            return Ok(None);
        }
        let position = self.next_pos;
        let index = self.order[position];
        self.next_pos += 1;
        self.current = Some((position, index));
        self.acted = false;
        Ok(Some(Arrival {
            position,
            index,
            request: &self.requests[index],
        }))
    }

    pub fn admits(&self, action: &S::Action) -> bool {
        match self.current {
            Some((_, idx)) if !self.acted => self.state.admits(idx, &self.requests[idx], action),
            _ => false,
        }
    }

    /// Applies an action to the current arrival. At most one action per arrival.
    pub fn act(&mut self, action: S::Action) -> Result<()> {
        let (pos, idx) = self
            .current
            .ok_or_else(|| Error::contract("no current arrival to act on"))?;
        if self.acted {
            return Err(Error::contract(format!(
                "arrival at position {pos} already has a decision"
            )));
        }
        self.state.apply(idx, &self.requests[idx], action)?;
        self.acted = true;
        Ok(())
    }

    pub fn state(&self) -> &S {
        &self.state
    }

    /// Adds to an algorithm-side counter reported with the trial.
    pub fn bump(&mut self, name: &str, by: i64) {
        *self.counters.entry(name.to_string()).or_insert(0) += by;
    }

    /// Ends the run. Arrivals the algorithm never asked for are passed over,
    /// which is an error for covering problems.
    pub fn finish(self) -> Result<S> {
        self.finish_with_counters().map(|(s, _)| s)
    }

    /// As [`Session::finish`], also returning the algorithm's counters.
    pub fn finish_with_counters(mut self) -> Result<(S, Counters)> {
        self.check_served()?;
        if self.next_pos < self.order.len() && self.state.must_serve() {
            let idx = self.order[self.next_pos];
            return Err(Error::contract(format!(
                "request {idx} at position {} was never served",
                self.next_pos
            )));
        }
        self.current = None;
        Ok((self.state, self.counters))
    }
}

/// An online algorithm for problem family `P`.
pub trait OnlineAlgorithm<P: Problem> {
    fn id(&self) -> String;

    /// Randomized algorithms consume `rng`; deterministic ones must not.
    fn randomized(&self) -> bool {
        false
    }

    fn run(
        &self,
        public: &P::Public,
        session: &mut Session<'_, P::Request, P::State>,
        rng: &mut TrialRng,
    ) -> Result<()>;
}

/// Runs `algorithm` against `problem` in the given order and returns the
/// final constraint state.
pub fn execute<P, A>(
    algorithm: &A,
    problem: &P,
    order: &[usize],
    rng: &mut TrialRng,
) -> Result<P::State>
where
    P: Problem,
    A: OnlineAlgorithm<P> + ?Sized,
{
    execute_with_counters(algorithm, problem, order, rng).map(|(s, _)| s)
}

/// As [`execute`], also returning the counters the algorithm bumped.
pub fn execute_with_counters<P, A>(
    algorithm: &A,
    problem: &P,
    order: &[usize],
    rng: &mut TrialRng,
) -> Result<(P::State, Counters)>
where
    P: Problem,
    A: OnlineAlgorithm<P> + ?Sized,
{
    let mut session = Session::new(problem.requests(), order, problem.initial_state())?;
    algorithm.run(problem.public(), &mut session, rng)?;
    session.finish_with_counters()
}
