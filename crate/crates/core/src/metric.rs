//! Finite metric spaces and request distributions over their points.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::arrival::{rng_for, Stream};
use crate::error::{Error, Result};
use crate::numeric::TOL;

/// Metrics up to this size are checked for the triangle inequality on load.
pub const TRIANGLE_CHECK_LIMIT: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    n: usize,
    dist: Vec<f64>,
}

impl MetricSpace {
    /// Validates symmetry, the zero diagonal, non-negativity and (for up to
    /// [`TRIANGLE_CHECK_LIMIT`] points) the triangle inequality.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::instance("metric needs at least one point"));
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::instance(format!(
                    "distance row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            dist.extend_from_slice(row);
        }
        let m = Self { n, dist };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.d(i, i).abs() > TOL {
                return Err(Error::instance(format!(
                    "d({i},{i}) = {} is not zero",
                    self.d(i, i)
                )));
            }
            for j in 0..n {
                let x = self.d(i, j);
                if !(x >= 0.0 && x.is_finite()) {
                    return Err(Error::instance(format!(
                        "d({i},{j}) = {x} is not a finite distance"
                    )));
                }
                if (x - self.d(j, i)).abs() > TOL {
                    return Err(Error::instance(format!("d({i},{j}) != d({j},{i})")));
                }
            }
        }
        if n <= TRIANGLE_CHECK_LIMIT {
            for u in 0..n {
                for v in 0..n {
                    for w in 0..n {
                        if self.d(u, w) > self.d(u, v) + self.d(v, w) + TOL {
                            return Err(Error::instance(format!(
                                "triangle inequality fails for points {u}, {v}, {w}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Euclidean distances between planar points.
    pub fn euclidean(points: &[(f64, f64)]) -> Result<Self> {
        let rows = points
            .iter()
            .map(|a| {
                points
                    .iter()
                    .map(|b| (a.0 - b.0).hypot(a.1 - b.1))
                    .collect()
            })
            .collect();
        Self::new(rows)
    }

    /// `n` points drawn uniformly from the unit square.
    pub fn random_euclidean(n: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_for(seed, Stream::Instance);
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
        Self::euclidean(&pts)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, u: usize, v: usize) -> f64 {
        self.dist[u * self.n + v]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.dist.chunks(self.n)
    }

    pub fn check_point(&self, p: usize) -> Result<()> {
        if p >= self.n {
            return Err(Error::instance(format!(
                "point {p} is outside 0..{}",
                self.n
            )));
        }
        Ok(())
    }
}

/// Probability of requesting each point.
#[derive(Debug, Clone, PartialEq)]
pub struct RequestDistribution {
    p: Vec<f64>,
}

impl RequestDistribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::instance("distribution needs at least one point"));
        }
        if p.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::instance(
                "probabilities must be finite and non-negative",
            ));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > TOL {
            return Err(Error::instance(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { p })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::instance("distribution needs at least one point"));
        }
        Ok(Self {
            p: vec![1.0 / n as f64; n],
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// `count` independent draws.
    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<usize>> {
        let dist = WeightedIndex::new(&self.p).map_err(|e| Error::instance(e.to_string()))?;
        Ok((0..count).map(|_| dist.sample(rng)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_broken_triangle() {
        let rows = vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ];
        assert!(MetricSpace::new(rows).is_err());
    }

    #[test]
    fn rejects_asymmetry() {
        let rows = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(MetricSpace::new(rows).is_err());
    }

    #[test]
    fn euclidean_is_a_metric() {
        let m = MetricSpace::random_euclidean(30, 4).unwrap();
        assert_eq!(m.len(), 30);
        assert!((m.d(3, 7) - m.d(7, 3)).abs() < 1e-15);
    }

    #[test]
    fn distribution_must_sum_to_one() {
        assert!(RequestDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(RequestDistribution::new(vec![0.5, 0.5]).is_ok());
        assert!(RequestDistribution::uniform(10).is_ok());
    }
}
