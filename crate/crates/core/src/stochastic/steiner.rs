use std::sync::Arc;

use rand::Rng;

use super::{mst, steiner_opt_small};
use crate::arrival::{rng_for, Stream, TrialRng};
use crate::error::{Error, Result};
use crate::graphical::DisjointSets;
use crate::metric::{MetricSpace, RequestDistribution};
use crate::online::{
    execute, Constraint, Counters, OnlineAlgorithm, Oracle, Problem, Sense, Session,
};

/// Known upfront: the metric and the request distribution.
#[derive(Debug, Clone)]
pub struct SteinerSetting {
    pub metric: Arc<MetricSpace>,
    pub distribution: RequestDistribution,
}

/// Buy these edges (pairs of metric points) while serving the current
/// request. After the purchase the request must be connected to the first one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Buy(pub Vec<(usize, usize)>);

#[derive(Debug, Clone)]
pub struct SteinerState {
    metric: Arc<MetricSpace>,
    components: DisjointSets,
    root: Option<usize>,
    bought: Vec<(usize, usize)>,
    cost: f64,
}

impl SteinerState {
    pub fn new(metric: Arc<MetricSpace>) -> Self {
        let n = metric.len();
        Self {
            metric,
            components: DisjointSets::new(n),
            root: None,
            bought: Vec::new(),
            cost: 0.0,
        }
    }

    /// Every edge bought, in purchase order (repeats included).
    pub fn bought(&self) -> &[(usize, usize)] {
        &self.bought
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// Whether `p` is connected to the first request.
    pub fn reaches_root(&self, p: usize) -> bool {
        self.root.is_some_and(|r| {
            p < self.metric.len() && self.components.root(p) == self.components.root(r)
        })
    }
}

impl Constraint<usize> for SteinerState {
    type Action = Buy;

    fn admits(&self, _index: usize, &p: &usize, action: &Buy) -> bool {
        let n = self.metric.len();
        if p >= n || action.0.iter().any(|&(u, v)| u >= n || v >= n) {
            return false;
        }
        let Some(root) = self.root else {
            return true;
        };
        let mut c = self.components.clone();
        for &(u, v) in &action.0 {
            c.union(u, v);
        }
        c.connected(p, root)
    }

    fn apply(&mut self, index: usize, &p: &usize, action: Buy) -> Result<()> {
        if !self.admits(index, &p, &action) {
            return Err(Error::contract(format!(
                "steiner: edges bought for request {index} leave point {p} disconnected"
            )));
        }
        self.root.get_or_insert(p);
        for &(u, v) in &action.0 {
            self.components.union(u, v);
            self.cost += self.metric.d(u, v);
        }
        self.bought.extend(action.0);
        Ok(())
    }

    fn must_serve(&self) -> bool {
        true
    }
}

/// Requests (metric points) over a metric with a known distribution.
#[derive(Debug, Clone)]
pub struct SteinerProblem {
    setting: SteinerSetting,
    requests: Vec<usize>,
}

impl SteinerProblem {
    pub fn new(
        metric: Arc<MetricSpace>,
        distribution: RequestDistribution,
        requests: Vec<usize>,
    ) -> Result<Self> {
        if distribution.len() != metric.len() {
            return Err(Error::instance(format!(
                "distribution has {} points but the metric has {}",
                distribution.len(),
                metric.len()
            )));
        }
        if requests.is_empty() {
            return Err(Error::instance(
                "Steiner instance needs at least one request",
            ));
        }
        for &p in &requests {
            metric.check_point(p)?;
        }
        Ok(Self {
            setting: SteinerSetting {
                metric,
                distribution,
            },
            requests,
        })
    }

    /// `n` requests drawn i.i.d. from `distribution` on the instance stream
    /// of `seed`.
    pub fn iid(
        metric: Arc<MetricSpace>,
        distribution: RequestDistribution,
        n: usize,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n must be at least 1"));
        }
        let requests = distribution.sample(n, &mut rng_for(seed, Stream::Instance))?;
        Self::new(metric, distribution, requests)
    }

    pub fn metric(&self) -> &MetricSpace {
        &self.setting.metric
    }

    pub fn request_points(&self) -> &[usize] {
        &self.requests
    }
}

impl Problem for SteinerProblem {
    type Request = usize;
    type Public = SteinerSetting;
    type State = SteinerState;

    fn sense(&self) -> Sense {
        Sense::Minimize
    }

    fn requests(&self) -> &[usize] {
        &self.requests
    }

    fn public(&self) -> &SteinerSetting {
        &self.setting
    }

    fn initial_state(&self) -> SteinerState {
        SteinerState::new(Arc::clone(&self.setting.metric))
    }

    fn objective(&self, state: &SteinerState) -> f64 {
        state.cost()
    }

    fn counters(&self, state: &SteinerState, _oracle_objective: f64) -> Counters {
        let mut c = Counters::new();
        c.insert("edges_bought".into(), state.bought().len() as i64);
        c
    }
}

/// The stand-in set built at the first request: `A` holds the first request
/// followed by `n - 1` samples, and `edges` (positions in `A`) is its MST.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTree {
    pub points: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub cost: f64,
}

impl SampleTree {
    pub fn build<R: Rng + ?Sized>(
        metric: &MetricSpace,
        distribution: &RequestDistribution,
        first: usize,
        n: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let mut points = Vec::with_capacity(n);
        points.push(first);
        points.extend(distribution.sample(n.saturating_sub(1), rng)?);
        let tree = mst(metric, &points);
        Ok(Self {
            points,
            edges: tree.edges,
            cost: tree.cost,
        })
    }

    /// Index of `A`'s first member, the first real request.
    pub fn root(&self) -> usize {
        0
    }
}

/// Nearest point of `anchors` to `p`; ties go to the earliest anchor.
fn nearest(metric: &MetricSpace, anchors: &[usize], p: usize) -> usize {
    let mut best = anchors[0];
    for &q in &anchors[1..] {
        if metric.d(p, q) < metric.d(p, best) {
            best = q;
        }
    }
    best
}

/// At the first request, draws `n - 1` samples and buys the MST of the
/// samples plus that request. Every later request buys one edge to the
/// nearest sample or earlier request.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AugmentedGreedy;

impl OnlineAlgorithm<SteinerProblem> for AugmentedGreedy {
    fn id(&self) -> String {
        "steiner-iid".into()
    }

    fn randomized(&self) -> bool {
        true
    }

    fn run(
        &self,
        setting: &SteinerSetting,
        session: &mut Session<'_, usize, SteinerState>,
        rng: &mut TrialRng,
    ) -> Result<()> {
        let metric = &*setting.metric;
        let Some(first) = session.next_arrival()? else {
            return Ok(());
        };
        let tree = SampleTree::build(
            metric,
            &setting.distribution,
            *first.request,
            session.len(),
            rng,
        )?;
        let edges = tree
            .edges
            .iter()
            .map(|&(a, b)| (tree.points[a], tree.points[b]))
            .collect();
        session.act(Buy(edges))?;
        let mut anchors = tree.points;
        while let Some(a) = session.next_arrival()? {
            let p = *a.request;
            let q = nearest(metric, &anchors, p);
            session.act(Buy(vec![(p, q)]))?;
            anchors.push(p);
        }
        Ok(())
    }
}

/// Baseline: each request buys one edge to the closest earlier request.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GreedySteiner;

impl OnlineAlgorithm<SteinerProblem> for GreedySteiner {
    fn id(&self) -> String {
        "steiner-greedy".into()
    }

    fn run(
        &self,
        setting: &SteinerSetting,
        session: &mut Session<'_, usize, SteinerState>,
        _rng: &mut TrialRng,
    ) -> Result<()> {
        let metric = &*setting.metric;
        let mut seen: Vec<usize> = Vec::with_capacity(session.len());
        while let Some(a) = session.next_arrival()? {
            let p = *a.request;
            let edges = if seen.is_empty() {
                Vec::new()
            } else {
                vec![(p, nearest(metric, &seen, p))]
            };
            session.act(Buy(edges))?;
            seen.push(p);
        }
        Ok(())
    }
}

/// Exact Steiner tree over the distinct requested points.
#[derive(Debug, Clone, Copy, Default)]
pub struct SteinerOracle;

impl Oracle<SteinerProblem> for SteinerOracle {
    fn optimum(&self, problem: &SteinerProblem) -> Result<f64> {
        Ok(steiner_opt_small(problem.metric(), problem.request_points())?.value)
    }
}

/// Total cost of the augmented greedy algorithm on `n` i.i.d. requests. The
/// requests come from the instance stream of `seed`, the samples from its
/// algorithm stream.
pub fn augmented_greedy(
    metric: Arc<MetricSpace>,
    distribution: RequestDistribution,
    n: usize,
    seed: u64,
) -> Result<f64> {
    let problem = SteinerProblem::iid(metric, distribution, n, seed)?;
    let order: Vec<usize> = (0..n).collect();
    let state = execute(
        &AugmentedGreedy,
        &problem,
        &order,
        &mut rng_for(seed, Stream::Algorithm),
    )?;
    Ok(state.cost())
}
