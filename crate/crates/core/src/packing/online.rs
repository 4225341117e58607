use rand::Rng;

use super::{Column, PackingInstance, PackingProblem, PackingShape, RowUsage};
use crate::arrival::{rng_for, Stream, TrialRng};
use crate::error::{Error, Result};
use crate::online::{OfflineOptimum, OnlineAlgorithm, Session};
use crate::secretary::{KSecretaryParams, Pick, PickEvent, PickLog};

pub type FractionalOpt = OfflineOptimum<Vec<f64>>;

/// `V* = max { v.x : A x <= k 1, 0 <= x <= 1 }` with its optimal `x`.
pub fn offline_fractional_opt(instance: &PackingInstance) -> Result<FractionalOpt> {
    let all: Vec<usize> = (0..instance.len()).collect();
    let sol = instance.lp_solve(&all, instance.k() as f64)?;
    Ok(OfflineOptimum {
        value: sol.objective,
        witness: sol.x,
        exact: true,
    })
}

/// Keeps column `i` with probability `(1 - theta) x_i`,
/// `theta = sqrt(3 ln(d+1) / k)`, scanning in index order and dropping any
/// column that would overfill a row.
pub fn round_fractional(x: &[f64], instance: &PackingInstance, seed: u64) -> Result<Vec<usize>> {
    if x.len() != instance.len() {
        return Err(Error::instance(format!(
            "fractional solution has {} entries for {} columns",
            x.len(),
            instance.len()
        )));
    }
    let theta = (3.0 * ((instance.d() + 1) as f64).ln() / instance.k() as f64)
        .sqrt()
        .min(1.0);
    let mut rng = rng_for(seed, Stream::Algorithm);
    let mut rows = RowUsage::new(instance.d(), instance.k() as f64);
    let mut picked = Vec::new();
    for (i, (&xi, col)) in x.iter().zip(instance.columns()).enumerate() {
        let p = ((1.0 - theta) * xi).clamp(0.0, 1.0);
        if rng.random_bool(p) && rows.fits(&col.a) {
            crate::online::Constraint::apply(&mut rows, i, col, Pick)?;
            picked.push(i);
        }
    }
    Ok(picked)
}

/// Window-dual online packing: at each `n_j` the dual prices of the prefix
/// LP with row budget `(1 - eps_j) k_j` become the prices for window `j`,
/// and an arrival is taken when its value covers its priced consumption.
///
/// Zero-value columns are never taken. A capacity guard skips columns that
/// would overfill a row even though their price test passes; the skips are
/// counted as `guard_skips`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OnlinePacking {
    pub delta: Option<f64>,
}

impl OnlinePacking {
    pub fn with_delta(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::param(format!("delta={delta} must lie in (0, 1/2]")));
        }
        Ok(Self { delta: Some(delta) })
    }

    /// `min(1/2, sqrt(d ln n / k))`.
    pub fn default_delta(shape: PackingShape) -> f64 {
        (shape.d as f64 * (shape.n as f64).ln() / shape.k as f64)
            .sqrt()
            .clamp(f64::MIN_POSITIVE, 0.5)
    }

    pub fn params(&self, shape: PackingShape) -> Result<KSecretaryParams> {
        let delta = self.delta.unwrap_or_else(|| Self::default_delta(shape));
        KSecretaryParams::new(shape.n, shape.k, delta)
    }

    pub fn run_logged(
        &self,
        shape: PackingShape,
        session: &mut Session<'_, Column, RowUsage>,
    ) -> Result<PickLog> {
        if shape.k < 2 {
            return Err(Error::param(format!(
                "online packing needs k >= 2, got {}",
                shape.k
            )));
        }
        let params = self.params(shape)?;
        let mut cols: Vec<&Column> = Vec::with_capacity(shape.n);
        let mut log = PickLog::new();
        let mut skips = 0;
        for _ in 0..params.observed_prefix() {
            if let Some(a) = session.next_arrival()? {
                cols.push(a.request);
            }
        }
        for w in &params.windows {
            let prefix = w.start.min(cols.len());
            let prices =
                solve_prefix(&cols[..prefix], shape.d, w.scaled_budget()).map_err(|e| match e {
                    Error::Solver { iterations, reason } => Error::Solver {
                        iterations,
                        reason: format!("window {}: {reason}", w.j),
                    },
                    other => other,
                })?;
            for _ in w.start..w.end {
                let Some(a) = session.next_arrival()? else {
                    break;
                };
                cols.push(a.request);
                let price: f64 = prices.iter().zip(&a.request.a).map(|(y, x)| y * x).sum();
                // Zero-value columns add nothing, so they are never taken.
                if a.request.v > 0.0 && a.request.v >= price {
                    if session.admits(&Pick) {
                        session.act(Pick)?;
                        log.push(PickEvent {
                            position: a.position,
                            index: a.index,
                            value: a.request.v,
                            threshold: price,
                        });
                    } else {
                        skips += 1;
                    }
                }
            }
        }
        session.bump("guard_skips", skips);
        Ok(log)
    }
}

fn solve_prefix(cols: &[&Column], d: usize, budget: f64) -> Result<Vec<f64>> {
    let c: Vec<f64> = cols.iter().map(|c| c.v).collect();
    let a: Vec<&[f64]> = cols.iter().map(|c| c.a.as_slice()).collect();
    Ok(super::solve_boxed_packing(&c, &a, &vec![budget; d])?.duals)
}

impl OnlineAlgorithm<PackingProblem> for OnlinePacking {
    fn id(&self) -> String {
        "packlp-adapt".into()
    }

    fn run(
        &self,
        shape: &PackingShape,
        session: &mut Session<'_, Column, RowUsage>,
        _rng: &mut TrialRng,
    ) -> Result<()> {
        self.run_logged(*shape, session).map(drop)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::online::execute;

    #[test]
    fn zero_values_pick_nothing() {
        let inst = PackingInstance::from_values(&[0.0; 40], 4).unwrap();
        let p = PackingProblem::new(inst);
        let order: Vec<usize> = (0..40).collect();
        let mut rng = rng_for(0, Stream::Algorithm);
        let s = execute(&OnlinePacking::default(), &p, &order, &mut rng).unwrap();
        assert!(s.picked().is_empty());
    }

    #[test]
    fn budget_covers_everything() {
        let inst = PackingInstance::from_values(&[1.0, 2.0, 3.0], 5).unwrap();
        let opt = offline_fractional_opt(&inst).unwrap();
        assert!((opt.value - 6.0).abs() < 1e-12);
    }

    #[test]
    fn rounding_zero_is_empty() {
        let inst = PackingInstance::from_values(&[1.0, 2.0, 3.0], 2).unwrap();
        assert!(round_fractional(&[0.0; 3], &inst, 1).unwrap().is_empty());
    }
}
