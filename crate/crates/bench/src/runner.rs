//! Experiment configuration and the trial loop.

use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Deserialize;

use ro_arena::arrival::{rng_for, trial_seed, ArrivalSchedule, Stream};
use ro_arena::covering::{
    BinOracle, BinPackingProblem, FacilityOracle, FacilityProblem, Fit, RandomizedFacility,
};
use ro_arena::graphical::{ForestProblem, Kruskal};
use ro_arena::matching::{
    HungarianOracle, MatchingProblem, OnlineValueMatching, SapProblem, ShortestAugmentingPath,
    UnitStepBound,
};
use ro_arena::metric::{MetricSpace, RequestDistribution};
use ro_arena::online::{KnownOptimum, OnlineAlgorithm, Oracle, Problem};
use ro_arena::packing::{FractionalOracle, PackingProblem};
use ro_arena::secretary::{SelectionProblem, TopK};
use ro_arena::stochastic::{
    AdversaryOrder, AugmentedGreedy, GreedySteiner, ProphetProblem, SteinerOracle, SteinerProblem,
};
use ro_arena::{run_trial, TrialRecord, ValueInstance};

use crate::error::{BenchError, Result};
use crate::instance::{load_distribution, Instance, Source};
use crate::registry::{self, Algorithm, Registered};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKind {
    /// Instance order, or one of the value-sorted adversaries.
    Adversarial(Option<AdversaryOrder>),
    Random,
    Iid,
}

impl OrderKind {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "ro" => Ok(OrderKind::Random),
            "iid" => Ok(OrderKind::Iid),
            "adv" => Ok(OrderKind::Adversarial(None)),
            _ => match text.strip_prefix("adv:") {
                Some(tag) => AdversaryOrder::parse(tag)
                    .map(|a| OrderKind::Adversarial(Some(a)))
                    .map_err(|_| BenchError::usage(format!("unknown adversary order '{tag}'"))),
                None => Err(BenchError::usage(format!(
                    "order must be adv, adv:<tag>, ro or iid, got '{text}'"
                ))),
            },
        }
    }
}

/// Settings of one run, as read from a JSON config file. Command-line flags
/// override any field set here.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub alg: Option<String>,
    pub instance: Option<String>,
    pub order: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    /// Distinct instances to cycle through; defaults to one per trial for
    /// generators and one for files.
    pub instances: Option<u64>,
    /// Request distribution file for metric problems; uniform if absent.
    pub dist: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| BenchError::usage(format!("{}: {e}", path.display())))
    }

    /// Fields of `over` win where set.
    pub fn merged(self, over: ExperimentConfig) -> Self {
        Self {
            alg: over.alg.or(self.alg),
            instance: over.instance.or(self.instance),
            order: over.order.or(self.order),
            trials: over.trials.or(self.trials),
            seed: over.seed.or(self.seed),
            jobs: over.jobs.or(self.jobs),
            out: over.out.or(self.out),
            instances: over.instances.or(self.instances),
            dist: over.dist.or(self.dist),
        }
    }
}

/// A validated configuration.
#[derive(Debug)]
pub struct Experiment {
    pub algorithm: Registered,
    pub source: Source,
    pub order: OrderKind,
    pub trials: u64,
    pub seed: u64,
    pub instances: u64,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub distribution: Option<RequestDistribution>,
}

impl Experiment {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let alg = cfg
            .alg
            .as_deref()
            .ok_or_else(|| BenchError::usage("--alg is required"))?;
        let inst = cfg
            .instance
            .as_deref()
            .ok_or_else(|| BenchError::usage("--instance is required"))?;
        let algorithm = registry::parse(alg)?;
        let source = Source::parse(inst)?;
        let order = OrderKind::parse(cfg.order.as_deref().unwrap_or("ro"))?;
        let trials = cfg.trials.unwrap_or(1);
        if trials == 0 {
            return Err(BenchError::usage("--trials must be at least 1"));
        }
        if order == OrderKind::Iid && !algorithm.algorithm.takes_point_requests() {
            return Err(BenchError::usage(format!(
                "i.i.d. arrivals need metric requests; {} takes a fixed request set",
                algorithm.spec
            )));
        }
        if let OrderKind::Adversarial(Some(_)) = order {
            if !matches!(
                algorithm.algorithm,
                Algorithm::Selection { .. } | Algorithm::Prophet { .. }
            ) {
                return Err(BenchError::usage(
                    "value-sorted adversary orders need a value instance",
                ));
            }
        }
        if cfg.jobs == Some(0) {
            return Err(BenchError::usage("--jobs must be at least 1"));
        }
        let instances = match cfg.instances {
            Some(0) => return Err(BenchError::usage("--instances must be at least 1")),
            Some(i) => i.min(trials),
            None if source.is_file() => 1,
            None => trials,
        };
        let distribution = cfg.dist.as_deref().map(load_distribution).transpose()?;
        Ok(Self {
            algorithm,
            source,
            order,
            trials,
            seed: cfg.seed.unwrap_or(0),
            instances,
            jobs: cfg.jobs,
            out: cfg.out.clone(),
            distribution,
        })
    }

    pub fn instance_seed(&self, index: u64) -> u64 {
        trial_seed(self.seed, index)
    }

    /// Runs every trial and returns the records in trial order.
    pub fn run(&self) -> Result<Vec<TrialRecord>> {
        match self.jobs {
            None => self.run_all(),
            Some(j) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(j)
                    .build()
                    .map_err(|e| {
                        BenchError::usage(format!("cannot start {j} worker threads: {e}"))
                    })?;
                pool.install(|| self.run_all())
            }
        }
    }

    fn run_all(&self) -> Result<Vec<TrialRecord>> {
        let dist = |m: &MetricSpace| -> Result<RequestDistribution> {
            match &self.distribution {
                Some(d) if d.len() != m.len() => Err(BenchError::usage(format!(
                    "distribution has {} points, metric has {}",
                    d.len(),
                    m.len()
                ))),
                Some(d) => Ok(d.clone()),
                None => Ok(RequestDistribution::uniform(m.len())?),
            }
        };
        match &self.algorithm.algorithm {
            Algorithm::Selection { alg, k } => {
                let k = *k;
                self.drive(
                    alg.as_ref(),
                    &TopK,
                    |inst, _| match inst {
                        Instance::Values(v) => Ok(SelectionProblem::new(v.clone(), k)?),
                        _ => unreachable!(),
                    },
                    selection_values,
                )
            }
            Algorithm::Forest(alg) => self.drive(
                alg.as_ref(),
                &Kruskal,
                |inst, _| match inst {
                    Instance::Graph(g) => Ok(ForestProblem::new(g.clone())),
                    _ => unreachable!(),
                },
                no_values,
            ),
            Algorithm::Packing(alg) => self.drive(
                alg,
                &FractionalOracle,
                |inst, _| match inst {
                    Instance::Packing(p) => Ok(PackingProblem::new(p.clone())),
                    _ => unreachable!(),
                },
                no_values,
            ),
            Algorithm::Matching => self.drive(
                &OnlineValueMatching,
                &HungarianOracle,
                |inst, _| match inst {
                    Instance::Matrix(m) => Ok(MatchingProblem::new(m.clone())),
                    _ => unreachable!(),
                },
                no_values,
            ),
            Algorithm::Sap => self.drive(
                &ShortestAugmentingPath,
                &UnitStepBound,
                |inst, _| match inst {
                    Instance::Bipartite(g) => Ok(SapProblem::new(g.clone())),
                    _ => unreachable!(),
                },
                no_values,
            ),
            Algorithm::Bins(rule) => self.drive(
                &Fit(*rule),
                &BinOracle,
                |inst, _| match inst {
                    Instance::Sizes(s) => Ok(BinPackingProblem::new(s.clone())),
                    _ => unreachable!(),
                },
                no_values,
            ),
            Algorithm::Facility { f, requests } => {
                let f = *f;
                self.drive(
                    &RandomizedFacility,
                    &FacilityOracle,
                    |inst, req_seed| match inst {
                        Instance::Metric(m) => {
                            let count = requests.unwrap_or(m.len());
                            let points =
                                dist(m)?.sample(count, &mut rng_for(req_seed, Stream::Instance))?;
                            Ok(FacilityProblem::new(m.clone(), points, f)?)
                        }
                        _ => unreachable!(),
                    },
                    no_values,
                )
            }
            Algorithm::Steiner { greedy, requests } => {
                let build = |inst: &Instance, req_seed: u64| match inst {
                    Instance::Metric(m) => {
                        let count = requests.unwrap_or(m.len());
                        Ok(SteinerProblem::iid(
                            Arc::new(m.clone()),
                            dist(m)?,
                            count,
                            req_seed,
                        )?)
                    }
                    _ => unreachable!(),
                };
                if *greedy {
                    self.drive(&GreedySteiner, &SteinerOracle, build, no_values)
                } else {
                    self.drive(&AugmentedGreedy, &SteinerOracle, build, no_values)
                }
            }
            Algorithm::Prophet { alg, k } => {
                let k = *k;
                self.drive(
                    alg,
                    &TopK,
                    |inst, _| match inst {
                        Instance::Prophet { samples, values } => {
                            Ok(ProphetProblem::new(samples.clone(), values.clone(), k)?)
                        }
                        _ => unreachable!(),
                    },
                    prophet_values,
                )
            }
        }
    }

    /// The trial loop shared by every family.
    ///
    /// Instance `i` comes from seed `trial_seed(master, i)` and trial `t` uses
    /// instance `t mod instances`. Request points are drawn from a seed
    /// derived from the instance seed, or from the trial seed under i.i.d.
    /// arrivals. When instances repeat, problems and their optima are built
    /// once up front.
    fn drive<P, A, O, B, V>(
        &self,
        alg: &A,
        oracle: &O,
        build: B,
        values: V,
    ) -> Result<Vec<TrialRecord>>
    where
        P: Problem + Send + Sync,
        A: OnlineAlgorithm<P> + Sync + ?Sized,
        O: Oracle<P> + Sync,
        B: Fn(&Instance, u64) -> Result<P> + Sync,
        V: Fn(&P) -> Option<&ValueInstance> + Sync,
    {
        let kind = self.algorithm.algorithm.kind();
        let iid = self.order == OrderKind::Iid;
        let base = |i: u64| self.source.instance(kind, self.instance_seed(i));

        let shared_base = if self.source.is_file() {
            Some(base(0)?)
        } else {
            None
        };
        let reuse = self.instances < self.trials || self.source.is_file();
        let cached_bases: Vec<Instance> = if reuse && shared_base.is_none() {
            (0..self.instances)
                .into_par_iter()
                .map(base)
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let base_of = |i: u64| -> Result<std::borrow::Cow<'_, Instance>> {
            if let Some(b) = &shared_base {
                Ok(std::borrow::Cow::Borrowed(b))
            } else if reuse {
                Ok(std::borrow::Cow::Borrowed(&cached_bases[i as usize]))
            } else {
                Ok(std::borrow::Cow::Owned(base(i)?))
            }
        };
        // With fixed requests, problems and optima are per instance.
        let cached: Vec<(P, f64)> = if reuse && !iid {
            (0..self.instances)
                .into_par_iter()
                .map(|i| {
                    let p = build(&*base_of(i)?, request_seed(self.instance_seed(i)))?;
                    let opt = oracle.optimum(&p)?;
                    Ok((p, opt))
                })
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };

        let label = self.source.label();
        let alg_label = self.algorithm.spec.to_string();
        (0..self.trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(self.seed, t);
                let i = t % self.instances;
                let mut rec = if let Some((p, opt)) = cached.get(i as usize) {
                    let schedule = self.schedule(p, seed, &values)?;
                    run_trial(alg, p, &schedule, &KnownOptimum(*opt), seed)?
                } else {
                    let req = if iid {
                        request_seed(seed)
                    } else {
                        request_seed(self.instance_seed(i))
                    };
                    let p = build(&*base_of(i)?, req)?;
                    let schedule = self.schedule(&p, seed, &values)?;
                    run_trial(alg, &p, &schedule, oracle, seed)?
                };
                rec.algorithm_id = alg_label.clone();
                rec.instance_id = label.clone();
                Ok(rec)
            })
            .collect()
    }

    fn schedule<P: Problem>(
        &self,
        problem: &P,
        seed: u64,
        values: &impl Fn(&P) -> Option<&ValueInstance>,
    ) -> Result<ArrivalSchedule> {
        let n = problem.len();
        Ok(match self.order {
            OrderKind::Random => ArrivalSchedule::shuffle(n, seed)?,
            // The requests were drawn i.i.d. already; present them in draw order.
            OrderKind::Iid | OrderKind::Adversarial(None) => ArrivalSchedule::identity(n)?,
            OrderKind::Adversarial(Some(a)) => {
                let v = values(problem)
                    .ok_or_else(|| BenchError::usage("adversary order needs values"))?;
                ArrivalSchedule::adversarial(a.order(v))?
            }
        })
    }
}

const REQUEST_SALT: u64 = 0x0005_EED0_F2E9;

/// Seed of the request points drawn for a metric instance (or, under i.i.d.
/// arrivals, for a trial) with the given seed.
pub fn request_seed(seed: u64) -> u64 {
    trial_seed(seed, REQUEST_SALT)
}

fn no_values<P>(_: &P) -> Option<&ValueInstance> {
    None
}

fn selection_values(p: &SelectionProblem) -> Option<&ValueInstance> {
    Some(p.values())
}

fn prophet_values(p: &ProphetProblem) -> Option<&ValueInstance> {
    Some(p.values())
}
