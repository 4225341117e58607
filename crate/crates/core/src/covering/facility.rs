use std::sync::Arc;

use rand::Rng;

use crate::arrival::TrialRng;
use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::online::{
    Constraint, Counters, OfflineOptimum, OnlineAlgorithm, Oracle, Problem, Sense, Session,
};

/// Sites the exact oracle accepts.
pub const FACILITY_EXACT_LIMIT: usize = 32;

/// What is known upfront: the metric and the opening cost.
#[derive(Debug, Clone)]
pub struct FacilitySetting {
    pub metric: Arc<MetricSpace>,
    pub f: f64,
}

/// Serve the current request, optionally opening a facility at its point
/// first. The connection is then charged to the nearest open facility.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Serve {
    pub open: bool,
}

#[derive(Debug, Clone)]
pub struct FacilityState {
    metric: Arc<MetricSpace>,
    f: f64,
    open: Vec<usize>,
    is_open: Vec<bool>,
    connections: Vec<f64>,
    /// `|F_t|` after each request.
    open_trace: Vec<usize>,
}

impl FacilityState {
    pub fn new(setting: &FacilitySetting) -> Self {
        Self {
            metric: Arc::clone(&setting.metric),
            f: setting.f,
            open: Vec::new(),
            is_open: vec![false; setting.metric.len()],
            connections: Vec::new(),
            open_trace: Vec::new(),
        }
    }

    /// Open facilities in opening order.
    pub fn open(&self) -> &[usize] {
        &self.open
    }

    pub fn connections(&self) -> &[f64] {
        &self.connections
    }

    pub fn open_trace(&self) -> &[usize] {
        &self.open_trace
    }

    /// Distance from `p` to the nearest open facility, infinite if none.
    pub fn distance_to_open(&self, p: usize) -> f64 {
        self.open
            .iter()
            .map(|&q| self.metric.d(p, q))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn opening_cost(&self) -> f64 {
        self.f * self.open.len() as f64
    }

    pub fn connection_cost(&self) -> f64 {
        self.connections.iter().sum()
    }

    pub fn total_cost(&self) -> f64 {
        self.opening_cost() + self.connection_cost()
    }
}

impl Constraint<usize> for FacilityState {
    type Action = Serve;

    fn admits(&self, _index: usize, &p: &usize, _action: &Serve) -> bool {
        p < self.is_open.len()
    }

    fn apply(&mut self, index: usize, &p: &usize, action: Serve) -> Result<()> {
        self.metric.check_point(p).map_err(|_| {
            Error::instance(format!(
                "request {index} names point {p} outside the metric"
            ))
        })?;
        if action.open && !self.is_open[p] {
            self.is_open[p] = true;
            self.open.push(p);
        }
        let d = self.distance_to_open(p);
        if d.is_infinite() {
            return Err(Error::contract(format!(
                "facility: request {index} served with no facility open"
            )));
        }
        self.connections.push(d);
        self.open_trace.push(self.open.len());
        Ok(())
    }

    fn must_serve(&self) -> bool {
        true
    }
}

/// A request sequence (point indices) over a metric with opening cost `f`.
#[derive(Debug, Clone)]
pub struct FacilityProblem {
    setting: FacilitySetting,
    requests: Vec<usize>,
}

impl FacilityProblem {
    pub fn new(metric: MetricSpace, requests: Vec<usize>, f: f64) -> Result<Self> {
        Self::shared(Arc::new(metric), requests, f)
    }

    pub fn shared(metric: Arc<MetricSpace>, requests: Vec<usize>, f: f64) -> Result<Self> {
        if !(f > 0.0 && f.is_finite()) {
            return Err(Error::param(format!("opening cost f={f} must be positive")));
        }
        if requests.is_empty() {
            return Err(Error::instance(
                "facility instance needs at least one request",
            ));
        }
        for (i, &p) in requests.iter().enumerate() {
            if p >= metric.len() {
                return Err(Error::instance(format!(
                    "request {i} names point {p} outside the metric"
                )));
            }
        }
        Ok(Self {
            setting: FacilitySetting { metric, f },
            requests,
        })
    }

    pub fn metric(&self) -> &MetricSpace {
        &self.setting.metric
    }

    pub fn f(&self) -> f64 {
        self.setting.f
    }

    pub fn request_points(&self) -> &[usize] {
        &self.requests
    }
}

impl Problem for FacilityProblem {
    type Request = usize;
    type Public = FacilitySetting;
    type State = FacilityState;

    fn sense(&self) -> Sense {
        Sense::Minimize
    }

    fn requests(&self) -> &[usize] {
        &self.requests
    }

    fn public(&self) -> &FacilitySetting {
        &self.setting
    }

    fn initial_state(&self) -> FacilityState {
        FacilityState::new(&self.setting)
    }

    fn objective(&self, state: &FacilityState) -> f64 {
        state.total_cost()
    }

    fn counters(&self, state: &FacilityState, _oracle_objective: f64) -> Counters {
        let mut c = Counters::new();
        c.insert("facilities_opened".into(), state.open.len() as i64);
        c
    }
}

/// Opens a facility at request `t` with probability `min(1, d_t / f)`, where
/// `d_t` is the distance to the nearest open facility (infinite before the
/// first opening, so the first request always opens).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RandomizedFacility;

impl OnlineAlgorithm<FacilityProblem> for RandomizedFacility {
    fn id(&self) -> String {
        "facloc".into()
    }

    fn randomized(&self) -> bool {
        true
    }

    fn run(
        &self,
        setting: &FacilitySetting,
        session: &mut Session<'_, usize, FacilityState>,
        rng: &mut TrialRng,
    ) -> Result<()> {
        while let Some(a) = session.next_arrival()? {
            let d = session.state().distance_to_open(*a.request);
            let p = (d / setting.f).min(1.0);
            let open = p >= 1.0 || rng.random_bool(p);
            session.act(Serve { open })?;
        }
        Ok(())
    }
}

/// Per-point request counts, skipping points never requested.
fn demand(metric: &MetricSpace, requests: &[usize]) -> Vec<(usize, f64)> {
    let mut w = vec![0.0; metric.len()];
    for &p in requests {
        w[p] += 1.0;
    }
    w.into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0.0)
        .collect()
}

/// Exact `min_F f|F| + sum_j min_{i in F} d(j, i)` over non-empty sets `F` of
/// metric points, by depth-first branch and bound over the sites.
pub fn facility_location_opt(
    metric: &MetricSpace,
    requests: &[usize],
    f: f64,
) -> Result<OfflineOptimum<Vec<usize>>> {
    let sites = metric.len();
    if sites > FACILITY_EXACT_LIMIT {
        return Err(Error::SizeLimit {
            what: "facility sites",
            got: sites,
            limit: FACILITY_EXACT_LIMIT,
        });
    }
    if requests.is_empty() {
        return Err(Error::instance(
            "facility instance needs at least one request",
        ));
    }
    if let Some(&p) = requests.iter().find(|&&p| p >= sites) {
        return Err(Error::instance(format!(
            "request point {p} is outside the metric"
        )));
    }
    let dem = demand(metric, requests);
    let cost_of = |open: &[usize]| -> f64 {
        f * open.len() as f64
            + dem
                .iter()
                .map(|&(j, w)| {
                    w * open
                        .iter()
                        .map(|&i| metric.d(j, i))
                        .fold(f64::INFINITY, f64::min)
                })
                .sum::<f64>()
    };

    // Incumbent: greedy additions from the best single site.
    let mut incumbent: Vec<usize> = (0..sites)
        .map(|i| vec![i])
        .min_by(|a, b| cost_of(a).total_cmp(&cost_of(b)))
        .expect("at least one site");
    let mut best = cost_of(&incumbent);
    loop {
        let step = (0..sites)
            .filter(|i| !incumbent.contains(i))
            .map(|i| {
                let mut c = incumbent.clone();
                c.push(i);
                (cost_of(&c), c)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match step {
            Some((c, set)) if c < best - 1e-12 => {
                best = c;
                incumbent = set;
            }
            _ => break,
        }
    }

    // suffix_min[k][j]: distance from demand point j to the nearest site >= k.
    let mut suffix_min = vec![vec![f64::INFINITY; dem.len()]; sites + 1];
    for k in (0..sites).rev() {
        for (jj, &(j, _)) in dem.iter().enumerate() {
            suffix_min[k][jj] = suffix_min[k + 1][jj].min(metric.d(j, k));
        }
    }

    struct Search<'a> {
        metric: &'a MetricSpace,
        dem: &'a [(usize, f64)],
        suffix_min: &'a [Vec<f64>],
        f: f64,
        best: f64,
        best_set: Vec<usize>,
        open: Vec<usize>,
    }

    impl Search<'_> {
        /// `near[j]` is the distance from demand point `j` to the open set.
        fn go(&mut self, k: usize, near: &[f64]) {
            let sites = self.metric.len();
            let opening = self.f * self.open.len() as f64;
            if k == sites {
                if self.open.is_empty() {
                    return;
                }
                let cost = opening
                    + self
                        .dem
                        .iter()
                        .zip(near)
                        .map(|(&(_, w), &d)| w * d)
                        .sum::<f64>();
                if cost < self.best - 1e-12 {
                    self.best = cost;
                    self.best_set = self.open.clone();
                }
                return;
            }
            // Lower bound: every demand point reaches the open set or some
            // undecided site, and any new site costs at least f.
            let mut bound = opening;
            for (jj, &(_, w)) in self.dem.iter().enumerate() {
                bound += w * near[jj].min(self.suffix_min[k][jj]);
            }
            if self.open.is_empty() {
                bound += self.f;
            }
            if bound >= self.best - 1e-12 {
                return;
            }
            // Open site k first: good solutions are found early.
            let with: Vec<f64> = self
                .dem
                .iter()
                .zip(near)
                .map(|(&(j, _), &d)| d.min(self.metric.d(j, k)))
                .collect();
            self.open.push(k);
            self.go(k + 1, &with);
            self.open.pop();
            self.go(k + 1, near);
        }
    }

    let mut search = Search {
        metric,
        dem: &dem,
        suffix_min: &suffix_min,
        f,
        best,
        best_set: incumbent,
        open: Vec::new(),
    };
    search.go(0, &vec![f64::INFINITY; dem.len()]);
    let mut witness = search.best_set;
    witness.sort_unstable();
    Ok(OfflineOptimum {
        value: search.best,
        witness,
        exact: true,
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FacilityOracle;

impl Oracle<FacilityProblem> for FacilityOracle {
    fn optimum(&self, problem: &FacilityProblem) -> Result<f64> {
        Ok(facility_location_opt(problem.metric(), problem.request_points(), problem.f())?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_request_costs_f() {
        let m = MetricSpace::random_euclidean(5, 1).unwrap();
        let o = facility_location_opt(&m, &[3], 0.7).unwrap();
        assert!((o.value - 0.7).abs() < 1e-12);
        let o = facility_location_opt(&m, &[2, 2], 0.7).unwrap();
        assert!((o.value - 0.7).abs() < 1e-12);
    }

    #[test]
    fn too_many_sites() {
        let m = MetricSpace::random_euclidean(33, 1).unwrap();
        assert!(matches!(
            facility_location_opt(&m, &[0], 1.0),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn first_request_always_opens() {
        let m = MetricSpace::euclidean(&[(0.0, 0.0), (0.5, 0.0)]).unwrap();
        let p = FacilityProblem::new(m, vec![0, 0, 0], 1.0).unwrap();
        let mut rng = crate::arrival::rng_for(0, crate::arrival::Stream::Algorithm);
        let s = crate::online::execute(&RandomizedFacility, &p, &[0, 1, 2], &mut rng).unwrap();
        assert_eq!(s.open(), &[0]);
        assert_eq!(s.total_cost(), 1.0);
    }
}
