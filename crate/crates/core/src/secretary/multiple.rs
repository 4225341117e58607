use std::f64::consts::E;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::oblivious::check_unit_interval;
use super::single::wait_and_pick_segment;
use super::{Cardinality, OrderOblivious, PhaseTwoRule, Pick, SelectionProblem};
use crate::arrival::{rng_for, Stream, TrialRng};
use crate::error::{Error, Result};
use crate::numeric::{ceil_tol, Ranked, Threshold};
use crate::online::{OnlineAlgorithm, Session};
use crate::values::ValueInstance;

/// Below this budget the order-oblivious and adaptive defaults fall back to
/// the halves baseline: their parameter formulas are meaningless for tiny k.
pub const SMALL_K: usize = 8;

/// One window `(start, end]` of the adaptive schedule, in 1-based arrival
/// positions. Its threshold is computed from the first `start` arrivals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub j: usize,
    /// `n_j`, the prefix length the threshold is learned from.
    pub start: usize,
    /// `n_{j+1}`, clamped to `n` for the last window.
    pub end: usize,
    /// `k_j = k n_j / n`.
    pub k_j: f64,
    /// `eps_j = sqrt(delta / 2^j)`.
    pub eps_j: f64,
    /// `ceil((1 - eps_j) k_j)`: rank of the threshold item within the prefix.
    pub rank: usize,
}

impl Window {
    /// Discounted per-window budget `(1 - eps_j) k_j`.
    pub fn scaled_budget(&self) -> f64 {
        (1.0 - self.eps_j) * self.k_j
    }
}

/// Derived quantities of the adaptive multiple-secretary schedule, shared with
/// the online packing algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct KSecretaryParams {
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    /// `eps_0 = sqrt(delta)`.
    pub epsilon: f64,
    pub windows: Vec<Window>,
}

impl KSecretaryParams {
    /// Windows `n_j = ceil(2^j delta n)` for `j = 0..ceil(log2(1/delta))`,
    /// with the last window ending at `n`.
    pub fn new(n: usize, k: usize, delta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("schedule needs n >= 1"));
        }
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::param(format!("delta={delta} must lie in (0, 1/2]")));
        }
        let count = ((1.0 / delta).log2() - 1e-12).ceil().max(1.0) as usize;
        let prefix = |j: usize| (ceil_tol(2f64.powi(j as i32) * delta * n as f64)).min(n);
        let windows = (0..count)
            .map(|j| {
                let start = prefix(j);
                let end = if j + 1 == count { n } else { prefix(j + 1) };
                let k_j = k as f64 * start as f64 / n as f64;
                let eps_j = (delta / 2f64.powi(j as i32)).sqrt();
                Window {
                    j,
                    start,
                    end,
                    k_j,
                    eps_j,
                    rank: ceil_tol((1.0 - eps_j) * k_j),
                }
            })
            .collect();
        Ok(Self {
            n,
            k,
            delta,
            epsilon: delta.sqrt(),
            windows,
        })
    }

    /// `n_0`, the number of arrivals that are only observed.
    pub fn observed_prefix(&self) -> usize {
        self.windows[0].start
    }
}

/// One pick together with the threshold in force when it was made.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PickEvent {
    pub position: usize,
    pub index: usize,
    pub value: f64,
    pub threshold: f64,
}

pub type PickLog = Vec<PickEvent>;

type SelectionSession<'a> = Session<'a, f64, Cardinality>;

fn observe(session: &mut SelectionSession<'_>, count: usize, keys: &mut Vec<Ranked>) -> Result<()> {
    for _ in 0..count {
        match session.next_arrival()? {
            Some(a) => keys.push(Ranked::new(*a.request, a.index)),
            None => break,
        }
    }
    Ok(())
}

/// Picks arrivals strictly above `threshold` while budget remains, for at
/// most `count` arrivals; every arrival's key is appended to `keys`.
fn pick_above(
    session: &mut SelectionSession<'_>,
    count: usize,
    threshold: Threshold,
    keys: &mut Vec<Ranked>,
    log: &mut PickLog,
) -> Result<()> {
    for _ in 0..count {
        let Some(a) = session.next_arrival()? else {
            break;
        };
        let key = Ranked::new(*a.request, a.index);
        keys.push(key);
        if session.state().remaining() > 0 && threshold.admits(key) {
            session.act(Pick)?;
            log.push(PickEvent {
                position: a.position,
                index: a.index,
                value: *a.request,
                threshold: threshold.value(),
            });
        }
    }
    Ok(())
}

fn check_budget(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::param(format!("budget k={k} must lie in 1..={n}")));
    }
    Ok(())
}

/// Splits the arrivals into `k` near-equal segments and runs the 37%
/// algorithm in each.
#[derive(Debug, Clone, Copy, Default)]
pub struct KSegmented;

impl OnlineAlgorithm<SelectionProblem> for KSegmented {
    fn id(&self) -> String {
        "ksec-seg".into()
    }

    fn run(
        &self,
        &k: &usize,
        session: &mut SelectionSession<'_>,
        _rng: &mut TrialRng,
    ) -> Result<()> {
        let n = session.len();
        check_budget(k, n)?;
        for s in 0..k {
            let len = (s + 1) * n / k - s * n / k;
            let m = (len as f64 / E).floor() as usize;
            wait_and_pick_segment(session, len, m, |v| *v)?;
        }
        Ok(())
    }
}

/// Learns the `ceil(k/3)`-th highest value of the first half, then takes the
/// first `k` later arrivals above it.
#[derive(Debug, Clone, Copy, Default)]
pub struct KHalves;

impl KHalves {
    pub fn run_logged(&self, k: usize, session: &mut SelectionSession<'_>) -> Result<PickLog> {
        let n = session.len();
        check_budget(k, n)?;
        let mut keys = Vec::new();
        observe(session, n / 2, &mut keys)?;
        let rule = self.learn(&keys, n, k)?;
        let mut log = PickLog::new();
        pick_above(session, n - n / 2, rule.threshold, &mut keys, &mut log)?;
        Ok(log)
    }
}

impl OrderOblivious for KHalves {
    fn id(&self) -> String {
        "ksec-halves".into()
    }

    fn sample_probability(&self, _n: usize, _k: usize) -> Result<f64> {
        Ok(0.5)
    }

    fn learn(&self, sample: &[Ranked], _n: usize, k: usize) -> Result<PhaseTwoRule> {
        Ok(PhaseTwoRule {
            threshold: Threshold::rank_of(sample, k.div_ceil(3)),
            budget: k,
        })
    }
}

impl OnlineAlgorithm<SelectionProblem> for KHalves {
    fn id(&self) -> String {
        OrderOblivious::id(self)
    }

    fn run(
        &self,
        &k: &usize,
        session: &mut SelectionSession<'_>,
        _rng: &mut TrialRng,
    ) -> Result<()> {
        self.run_logged(k, session).map(drop)
    }
}

/// Order-oblivious threshold algorithm: a `Binomial(n, delta)` sample, then
/// the first `k` arrivals above its `ceil((1-eps) delta k)`-th highest value.
///
/// Without explicit parameters, `delta = eps = min(1/2, (ln k / k)^(1/3))`,
/// and budgets below [`SMALL_K`] use [`KHalves`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KOblivious {
    pub params: Option<(f64, f64)>,
}

impl KOblivious {
    pub fn new(delta: f64, epsilon: f64) -> Result<Self> {
        check_unit_interval("delta", delta)?;
        check_unit_interval("epsilon", epsilon)?;
        Ok(Self {
            params: Some((delta, epsilon)),
        })
    }

    pub fn default_parameter(k: usize) -> f64 {
        let k = k as f64;
        (k.ln() / k).cbrt().min(0.5)
    }

    /// `(delta, eps)` for budget `k`, or `None` when the halves fallback applies.
    pub fn resolve(&self, k: usize) -> Option<(f64, f64)> {
        match self.params {
            Some(p) => Some(p),
            None if k < SMALL_K => None,
            None => {
                let d = Self::default_parameter(k);
                Some((d, d))
            }
        }
    }

    pub fn run_logged(
        &self,
        k: usize,
        session: &mut SelectionSession<'_>,
        rng: &mut TrialRng,
    ) -> Result<PickLog> {
        let n = session.len();
        check_budget(k, n)?;
        let Some((delta, _)) = self.resolve(k) else {
            return KHalves.run_logged(k, session);
        };
        // Per-item coins with probability delta, realized in a random order
        // as a prefix of Binomial(n, delta) arrivals.
        let sample_len = Binomial::new(n as u64, delta)
            .map_err(|e| Error::param(e.to_string()))?
            .sample(rng) as usize;
        let mut keys = Vec::new();
        observe(session, sample_len, &mut keys)?;
        let rule = self.learn(&keys, n, k)?;
        let mut log = PickLog::new();
        pick_above(session, n - sample_len, rule.threshold, &mut keys, &mut log)?;
        Ok(log)
    }
}

impl OrderOblivious for KOblivious {
    fn id(&self) -> String {
        "ksec-obliv".into()
    }

    fn sample_probability(&self, _n: usize, k: usize) -> Result<f64> {
        Ok(self.resolve(k).map_or(0.5, |(d, _)| d))
    }

    fn learn(&self, sample: &[Ranked], n: usize, k: usize) -> Result<PhaseTwoRule> {
        match self.resolve(k) {
            None => KHalves.learn(sample, n, k),
            Some((delta, eps)) => Ok(PhaseTwoRule {
                threshold: Threshold::rank_of(sample, ceil_tol((1.0 - eps) * delta * k as f64)),
                budget: k,
            }),
        }
    }
}

impl OnlineAlgorithm<SelectionProblem> for KOblivious {
    fn id(&self) -> String {
        OrderOblivious::id(self)
    }

    fn randomized(&self) -> bool {
        true
    }

    fn run(
        &self,
        &k: &usize,
        session: &mut SelectionSession<'_>,
        rng: &mut TrialRng,
    ) -> Result<()> {
        self.run_logged(k, session, rng).map(drop)
    }
}

/// Adaptive-window algorithm: the threshold is relearned at each `n_j` from
/// everything seen so far. `delta` defaults to `min(1/2, sqrt(ln k / k))`,
/// and budgets below [`SMALL_K`] use [`KHalves`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KAdaptive {
    pub delta: Option<f64>,
}

impl KAdaptive {
    pub fn with_delta(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::param(format!("delta={delta} must lie in (0, 1/2]")));
        }
        Ok(Self { delta: Some(delta) })
    }

    pub fn default_delta(k: usize) -> f64 {
        let k = k as f64;
        (k.ln() / k).sqrt().min(0.5)
    }

    pub fn params(&self, n: usize, k: usize) -> Option<Result<KSecretaryParams>> {
        let delta = match self.delta {
            Some(d) => d,
            None if k < SMALL_K => return None,
            None => Self::default_delta(k),
        };
        Some(KSecretaryParams::new(n, k, delta))
    }

    pub fn run_logged(&self, k: usize, session: &mut SelectionSession<'_>) -> Result<PickLog> {
        let n = session.len();
        check_budget(k, n)?;
        let params = match self.params(n, k) {
            None => return KHalves.run_logged(k, session),
            Some(p) => p?,
        };
        let mut keys = Vec::with_capacity(n);
        let mut log = PickLog::new();
        observe(session, params.observed_prefix(), &mut keys)?;
        for w in &params.windows {
            let threshold = Threshold::rank_of(&keys[..w.start.min(keys.len())], w.rank);
            pick_above(session, w.end - w.start, threshold, &mut keys, &mut log)?;
        }
        Ok(log)
    }
}

impl OnlineAlgorithm<SelectionProblem> for KAdaptive {
    fn id(&self) -> String {
        "ksec-adapt".into()
    }

    fn run(
        &self,
        &k: &usize,
        session: &mut SelectionSession<'_>,
        _rng: &mut TrialRng,
    ) -> Result<()> {
        self.run_logged(k, session).map(drop)
    }
}

/// Hard instance for multiple-secretary algorithms: each value is 0 with
/// probability `1 - k/n`, otherwise 1 or 2 with equal probability.
pub fn gen_lb_instance(n: usize, k: usize, seed: u64) -> Result<ValueInstance> {
    check_budget(k, n)?;
    let mut rng = rng_for(seed, Stream::Instance);
    let p = k as f64 / n as f64;
    let values = (0..n)
        .map(|_| {
            if rng.random::<f64>() < p {
                if rng.random_bool(0.5) {
                    2.0
                } else {
                    1.0
                }
            } else {
                0.0
            }
        })
        .collect();
    ValueInstance::new(values)
}
