use crate::arrival::TrialRng;
use crate::error::{Error, Result};
use crate::numeric::ceil_tol;
use crate::online::{
    Constraint, Counters, OfflineOptimum, OnlineAlgorithm, Oracle, Problem, Sense, Session,
};

/// Slack allowed on a bin's unit capacity.
pub const FIT_TOL: f64 = 1e-12;

/// Item sizes in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinPackingInstance {
    sizes: Vec<f64>,
}

impl BinPackingInstance {
    pub fn new(sizes: Vec<f64>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::instance(
                "bin packing instance needs at least one item",
            ));
        }
        if let Some((i, s)) = sizes
            .iter()
            .enumerate()
            .find(|(_, s)| !(**s > 0.0 && **s <= 1.0))
        {
            return Err(Error::instance(format!(
                "item {i} has size {s} outside (0, 1]"
            )));
        }
        Ok(Self { sizes })
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn total_size(&self) -> f64 {
        self.sizes.iter().sum()
    }
}

/// `n/2` items of size `1/2 - eps` followed by `n/2` of size `1/2 + eps`.
pub fn gen_halves(n: usize, eps: f64) -> Result<BinPackingInstance> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::param(format!(
            "halves instance needs a positive even n, got {n}"
        )));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::param(format!("eps={eps} must lie in (0, 1/2)")));
    }
    let mut sizes = vec![0.5 - eps; n / 2];
    sizes.extend(std::iter::repeat_n(0.5 + eps, n / 2));
    BinPackingInstance::new(sizes)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bin {
    pub load: f64,
    pub items: Vec<usize>,
}

/// Where the current item goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Place {
    Into(usize),
    NewBin,
}

/// Bins so far plus the imbalance trace: `I_t` is the number of items above
/// 1/2 minus the number below 1/2 among the first `t` items (`I_0 = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct BinState {
    bins: Vec<Bin>,
    imbalance: Vec<i64>,
    peak_lonely: usize,
}

impl Default for BinState {
    fn default() -> Self {
        Self {
            bins: Vec::new(),
            imbalance: vec![0],
            peak_lonely: 0,
        }
    }
}

impl BinState {
    pub fn bins(&self) -> &[Bin] {
        &self.bins
    }

    pub fn imbalance(&self) -> &[i64] {
        &self.imbalance
    }

    pub fn fits(&self, b: usize, size: f64) -> bool {
        self.bins
            .get(b)
            .is_some_and(|bin| bin.load + size <= 1.0 + FIT_TOL)
    }

    /// Bins currently holding exactly one item.
    pub fn lonely(&self) -> usize {
        self.bins.iter().filter(|b| b.items.len() == 1).count()
    }
}

impl Constraint<f64> for BinState {
    type Action = Place;

    fn admits(&self, _index: usize, &size: &f64, place: &Place) -> bool {
        match *place {
            Place::NewBin => true,
            Place::Into(b) => self.fits(b, size),
        }
    }

    fn apply(&mut self, index: usize, &size: &f64, place: Place) -> Result<()> {
        match place {
            Place::NewBin => self.bins.push(Bin {
                load: size,
                items: vec![index],
            }),
            Place::Into(b) => {
                if !self.fits(b, size) {
                    return Err(Error::contract(format!(
                        "bin capacity: item {index} of size {size} does not fit bin {b}"
                    )));
                }
                let bin = &mut self.bins[b];
                bin.load += size;
                bin.items.push(index);
            }
        }
        let last = *self.imbalance.last().unwrap_or(&0);
        let step = if size > 0.5 {
            1
        } else if size < 0.5 {
            -1
        } else {
            0
        };
        self.imbalance.push(last + step);
        self.peak_lonely = self.peak_lonely.max(self.lonely());
        Ok(())
    }

    fn must_serve(&self) -> bool {
        true
    }
}

/// Summary of the imbalance trace against single-item bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImbalanceReport {
    pub max_imbalance: i64,
    pub min_imbalance: i64,
    /// Single-item bins at the end.
    pub lonely: usize,
    /// Largest number of single-item bins at any time.
    pub peak_lonely: usize,
}

impl ImbalanceReport {
    pub fn range(&self) -> i64 {
        self.max_imbalance - self.min_imbalance
    }

    /// Whether the single-item bins stay within the imbalance range.
    pub fn bound_holds(&self) -> bool {
        (self.lonely as i64) <= self.range() && (self.peak_lonely as i64) <= self.range()
    }
}

pub fn imbalance_report(state: &BinState) -> ImbalanceReport {
    ImbalanceReport {
        max_imbalance: state.imbalance.iter().copied().max().unwrap_or(0),
        min_imbalance: state.imbalance.iter().copied().min().unwrap_or(0),
        lonely: state.lonely(),
        peak_lonely: state.peak_lonely,
    }
}

#[derive(Debug, Clone)]
pub struct BinPackingProblem {
    instance: BinPackingInstance,
}

impl BinPackingProblem {
    pub fn new(instance: BinPackingInstance) -> Self {
        Self { instance }
    }

    pub fn instance(&self) -> &BinPackingInstance {
        &self.instance
    }
}

impl Problem for BinPackingProblem {
    type Request = f64;
    type Public = ();
    type State = BinState;

    fn sense(&self) -> Sense {
        Sense::Minimize
    }

    fn requests(&self) -> &[f64] {
        self.instance.sizes()
    }

    fn public(&self) -> &() {
        &()
    }

    fn initial_state(&self) -> BinState {
        BinState::default()
    }

    fn objective(&self, state: &BinState) -> f64 {
        state.bins.len() as f64
    }

    fn counters(&self, state: &BinState, _oracle_objective: f64) -> Counters {
        let r = imbalance_report(state);
        let mut c = Counters::new();
        c.insert("bins_opened".into(), state.bins.len() as i64);
        c.insert("lonely_bins".into(), r.lonely as i64);
        c.insert("peak_lonely_bins".into(), r.peak_lonely as i64);
        c.insert("imbalance_range".into(), r.range());
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitRule {
    Best,
    First,
    Next,
}

/// The classic online bin-packing heuristics. Best Fit breaks residual ties
/// toward the lowest bin index; Next Fit only ever considers the newest bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fit(pub FitRule);

impl Fit {
    pub fn choose(rule: FitRule, state: &BinState, size: f64) -> Place {
        let bins = state.bins();
        let chosen = match rule {
            FitRule::First => (0..bins.len()).find(|&b| state.fits(b, size)),
            FitRule::Next => bins.len().checked_sub(1).filter(|&b| state.fits(b, size)),
            FitRule::Best => (0..bins.len())
                .filter(|&b| state.fits(b, size))
                .min_by(|&a, &b| {
                    let ra = 1.0 - bins[a].load - size;
                    let rb = 1.0 - bins[b].load - size;
                    ra.total_cmp(&rb).then(a.cmp(&b))
                }),
        };
        chosen.map_or(Place::NewBin, Place::Into)
    }
}

impl OnlineAlgorithm<BinPackingProblem> for Fit {
    fn id(&self) -> String {
        match self.0 {
            FitRule::Best => "bp-best",
            FitRule::First => "bp-first",
            FitRule::Next => "bp-next",
        }
        .into()
    }

    fn run(
        &self,
        _: &(),
        session: &mut Session<'_, f64, BinState>,
        _rng: &mut TrialRng,
    ) -> Result<()> {
        while let Some(a) = session.next_arrival()? {
            let place = Self::choose(self.0, session.state(), *a.request);
            session.act(place)?;
        }
        Ok(())
    }
}

pub const BP_EXACT_LIMIT: usize = 16;

/// First Fit on sizes sorted in decreasing order; returns the bins.
fn first_fit_decreasing(sizes: &[f64]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| sizes[b].total_cmp(&sizes[a]).then(a.cmp(&b)));
    let mut loads: Vec<f64> = Vec::new();
    let mut bins: Vec<Vec<usize>> = Vec::new();
    for i in order {
        match loads.iter().position(|&l| l + sizes[i] <= 1.0 + FIT_TOL) {
            Some(b) => {
                loads[b] += sizes[i];
                bins[b].push(i);
            }
            None => {
                loads.push(sizes[i]);
                bins.push(vec![i]);
            }
        }
    }
    bins
}

/// Minimum number of bins. Exact by subset dynamic programming for up to
/// [`BP_EXACT_LIMIT`] items. Larger instances get the `ceil(sum)` lower bound,
/// which is flagged exact only when a First-Fit-Decreasing packing meets it.
pub fn bp_opt(instance: &BinPackingInstance) -> OfflineOptimum<Vec<Vec<usize>>> {
    let sizes = instance.sizes();
    if sizes.len() > BP_EXACT_LIMIT {
        let bound = ceil_tol(instance.total_size()).max(1);
        let ffd = first_fit_decreasing(sizes);
        let exact = ffd.len() == bound;
        return OfflineOptimum {
            value: bound as f64,
            witness: if exact { ffd } else { Vec::new() },
            exact,
        };
    }
    let n = sizes.len();
    let full = (1usize << n) - 1;
    // best[mask] = (bins used, load of the last bin) packing `mask` in some order.
    let mut best: Vec<(usize, f64)> = vec![(usize::MAX, f64::INFINITY); full + 1];
    let mut via: Vec<(usize, usize)> = vec![(0, 0); full + 1];
    best[0] = (0, 1.0 + 1.0);
    for mask in 0..full {
        let (bins, load) = best[mask];
        if bins == usize::MAX {
            continue;
        }
        for (i, &s) in sizes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                continue;
            }
            let cand = if load + s <= 1.0 + FIT_TOL {
                (bins, load + s)
            } else {
                (bins + 1, s)
            };
            let next = mask | (1 << i);
            if cand.0 < best[next].0 || (cand.0 == best[next].0 && cand.1 < best[next].1 - 1e-15) {
                best[next] = cand;
                via[next] = (mask, i);
            }
        }
    }
    // Replay the insertion order to recover the bins.
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    while mask != 0 {
        let (prev, i) = via[mask];
        order.push(i);
        mask = prev;
    }
    order.reverse();
    let mut bins: Vec<Vec<usize>> = Vec::new();
    let mut load = f64::INFINITY;
    for i in order {
        if load + sizes[i] <= 1.0 + FIT_TOL {
            load += sizes[i];
            bins.last_mut().expect("open bin").push(i);
        } else {
            load = sizes[i];
            bins.push(vec![i]);
        }
    }
    OfflineOptimum {
        value: best[full].0 as f64,
        witness: bins,
        exact: true,
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BinOracle;

impl Oracle<BinPackingProblem> for BinOracle {
    fn optimum(&self, problem: &BinPackingProblem) -> Result<f64> {
        Ok(bp_opt(problem.instance()).value)
    }
}
