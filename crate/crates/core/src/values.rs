use rand::Rng;

use crate::arrival::{rng_for, Stream};
use crate::error::{Error, Result};
use crate::numeric::Ranked;

/// Non-negative item values, fixed once created.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueInstance {
    values: Vec<f64>,
}

impl ValueInstance {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::instance("value instance needs at least one item"));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| v.is_nan() || **v < 0.0 || !v.is_finite())
        {
            return Err(Error::instance(format!(
                "value {v} at index {i} is not a finite non-negative number"
            )));
        }
        Ok(Self { values })
    }

    /// `n` values drawn independently from U[0,1).
    pub fn uniform(n: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_for(seed, Stream::Instance);
        Self::new((0..n).map(|_| rng.random::<f64>()).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn key(&self, index: usize) -> Ranked {
        Ranked::new(self.values[index], index)
    }

    /// Index of the maximum under index tie-breaking.
    pub fn argmax(&self) -> usize {
        (0..self.len()).max_by_key(|&i| self.key(i)).unwrap_or(0)
    }
}
