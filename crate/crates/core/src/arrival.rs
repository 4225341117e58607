//! Arrival orders and seeded randomness.
//!
//! Every random choice in a trial is drawn from a ChaCha8 stream keyed by the
//! trial seed. The trial seed itself is a hash of the master seed and the
//! trial index, so trials can run in any order or in parallel and still
//! reproduce bit for bit.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Random number generator handed to every randomized component.
pub type TrialRng = ChaCha8Rng;

/// Independent sub-streams carved out of one trial seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Drawing the arrival permutation.
    Order = 0,
    /// Coin flips made by the online algorithm.
    Algorithm = 1,
    /// Sampling of per-trial instance data (i.i.d. requests, prophet draws).
    Instance = 2,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Generator for one sub-stream of a seed.
pub fn rng_for(seed: u64, stream: Stream) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// How the arrival order of a request set is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum OrderModel {
    /// A fixed order chosen by the adversary.
    Adversarial(Vec<usize>),
    /// A uniformly random permutation.
    UniformRandom,
    /// Requests are independent draws from this distribution.
    Iid(Vec<f64>),
}

impl OrderModel {
    pub fn tag(&self) -> &'static str {
        match self {
            OrderModel::Adversarial(_) => "adv",
            OrderModel::UniformRandom => "ro",
            OrderModel::Iid(_) => "iid",
        }
    }
}

/// A permutation of request indices plus the model and seed that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalSchedule {
    order: Vec<usize>,
    model: OrderModel,
    seed: u64,
}

fn check_bijection(order: &[usize]) -> Result<()> {
    let mut seen = vec![false; order.len()];
    for &i in order {
        if i >= order.len() || seen[i] {
            return Err(Error::instance(format!(
                "arrival order is not a permutation of 0..{}",
                order.len()
            )));
        }
        seen[i] = true;
    }
    Ok(())
}

impl ArrivalSchedule {
    /// Uniformly random order of `n` requests (Fisher-Yates).
    pub fn shuffle(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::instance("cannot order an empty request set"));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng_for(seed, Stream::Order));
        debug_assert!(check_bijection(&order).is_ok());
        Ok(Self {
            order,
            model: OrderModel::UniformRandom,
            seed,
        })
    }

    pub fn adversarial(order: Vec<usize>) -> Result<Self> {
        if order.is_empty() {
            return Err(Error::instance("cannot order an empty request set"));
        }
        check_bijection(&order)?;
        Ok(Self {
            model: OrderModel::Adversarial(order.clone()),
            order,
            seed: 0,
        })
    }

    /// Requests presented in index order.
    pub fn identity(n: usize) -> Result<Self> {
        Self::adversarial((0..n).collect())
    }

    /// Order tag for requests that were themselves drawn i.i.d.; the draws
    /// already carry the randomness so they are presented in draw order.
    pub fn iid(n: usize, distribution: Vec<f64>, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::instance("cannot order an empty request set"));
        }
        if distribution.iter().any(|&p| p.is_nan() || p < 0.0)
            || (distribution.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::instance(
                "i.i.d. distribution must be non-negative and sum to 1",
            ));
        }
        Ok(Self {
            order: (0..n).collect(),
            model: OrderModel::Iid(distribution),
            seed,
        })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn model(&self) -> &OrderModel {
        &self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}
