//! Bounded-variable dense simplex for boxed packing LPs
//! `max c.x  s.t.  A x <= b,  0 <= x <= 1` with `A >= 0`, `b >= 0`.
//!
//! The slack basis is feasible, so no phase one is needed. Entering and
//! leaving variables follow Bland's rule over an internal ordering of the
//! columns by value density, which keeps anti-cycling while letting the
//! first sweep of bound flips act like the greedy fill.

use crate::error::{Error, Result};

const EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    /// Primal values, parallel to the input columns.
    pub x: Vec<f64>,
    /// Row multipliers, non-negative.
    pub duals: Vec<f64>,
    pub objective: f64,
    /// Pivots plus bound flips.
    pub iterations: usize,
}

impl LpSolution {
    /// `b.y + sum_i max(0, c_i - y.a_i) - c.x`: the gap between the boxed
    /// dual objective at `duals` and the primal objective.
    pub fn duality_gap(&self, c: &[f64], cols: &[&[f64]], b: &[f64]) -> f64 {
        let dual_rows: f64 = b.iter().zip(&self.duals).map(|(b, y)| b * y).sum();
        let dual_box: f64 = c
            .iter()
            .zip(cols)
            .map(|(ci, a)| (ci - dot(&self.duals, a)).max(0.0))
            .sum();
        dual_rows + dual_box - dot(c, &self.x)
    }

    /// Largest violation of `A x <= b` and of the box.
    pub fn primal_violation(&self, cols: &[&[f64]], b: &[f64]) -> f64 {
        let mut usage = vec![0.0; b.len()];
        let mut worst: f64 = 0.0;
        for (x, a) in self.x.iter().zip(cols) {
            worst = worst.max(-x).max(x - 1.0);
            for (u, ar) in usage.iter_mut().zip(a.iter()) {
                *u += x * ar;
            }
        }
        usage.iter().zip(b).fold(worst, |w, (u, b)| w.max(u - b))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves the boxed packing LP. `cols[i]` is column `i` of `A` (length
/// `b.len()`); `c[i]` its objective coefficient.
pub fn solve_boxed_packing(c: &[f64], cols: &[&[f64]], b: &[f64]) -> Result<LpSolution> {
    let n = c.len();
    let d = b.len();
    if cols.len() != n {
        return Err(Error::instance("objective and column counts differ"));
    }
    if let Some(i) = cols.iter().position(|a| a.len() != d) {
        return Err(Error::instance(format!(
            "column {i} does not have {d} rows"
        )));
    }
    if b.iter().any(|&x| x.is_nan() || x < 0.0) {
        return Err(Error::instance("right-hand sides must be non-negative"));
    }

    // Internal column order: densest value per unit of resource first.
    let mut order: Vec<usize> = (0..n).collect();
    let density = |i: usize| {
        let s: f64 = cols[i].iter().sum();
        if s <= 0.0 {
            f64::INFINITY
        } else {
            c[i] / s
        }
    };
    order.sort_by(|&p, &q| density(q).total_cmp(&density(p)).then(p.cmp(&q)));

    let m = n + d;
    let width = m;
    // Row-major tableau B^{-1} [A I].
    let mut t = vec![0.0; d * width];
    for (j, &orig) in order.iter().enumerate() {
        for r in 0..d {
            t[r * width + j] = cols[orig][r];
        }
    }
    for r in 0..d {
        t[r * width + n + r] = 1.0;
    }
    let mut rc: Vec<f64> = order
        .iter()
        .map(|&i| c[i])
        .chain(std::iter::repeat_n(0.0, d))
        .collect();
    let mut basis: Vec<usize> = (n..m).collect();
    let mut is_basic = vec![false; m];
    for &j in &basis {
        is_basic[j] = true;
    }
    let mut at_upper = vec![false; m];
    let mut beta: Vec<f64> = b.to_vec();
    let upper = |j: usize| if j < n { 1.0 } else { f64::INFINITY };

    let cap = 50 * (n + d);
    let mut iterations = 0;
    let mut scan_from = 0;
    loop {
        // Bland: smallest eligible index. Bound flips leave the reduced costs
        // unchanged, so the scan resumes where it stopped; pivots restart it.
        let entering = (scan_from..m).find(|&j| {
            !is_basic[j] && ((!at_upper[j] && rc[j] > EPS) || (at_upper[j] && rc[j] < -EPS))
        });
        let Some(j) = entering else {
            if scan_from == 0 {
                break;
            }
            scan_from = 0;
            continue;
        };
        if iterations >= cap {
            return Err(Error::Solver {
                iterations,
                reason: "iteration cap reached".into(),
            });
        }
        iterations += 1;
        let sigma = if at_upper[j] { -1.0 } else { 1.0 };

        let mut step = upper(j);
        let mut leave: Option<(usize, bool)> = None;
        for r in 0..d {
            let alpha = sigma * t[r * width + j];
            let (limit, to_upper) = if alpha > EPS {
                (beta[r] / alpha, false)
            } else if alpha < -EPS {
                let u = upper(basis[r]);
                if u.is_infinite() {
                    continue;
                }
                ((u - beta[r]) / -alpha, true)
            } else {
                continue;
            };
            let limit = limit.max(0.0);
            // Ties: a bound flip beats any pivot; among rows, Bland's rule.
            let better = if limit < step - EPS {
                true
            } else if limit <= step + EPS {
                leave.is_some_and(|(lr, _)| basis[r] < basis[lr])
            } else {
                false
            };
            if better {
                step = limit;
                leave = Some((r, to_upper));
            }
        }
        if step.is_infinite() {
            return Err(Error::Solver {
                iterations,
                reason: "objective unbounded".into(),
            });
        }
        for r in 0..d {
            beta[r] -= sigma * step * t[r * width + j];
        }
        match leave {
            None => {
                at_upper[j] = !at_upper[j];
                scan_from = j + 1;
            }
            Some((r, to_upper)) => {
                let entering_value = if at_upper[j] { 1.0 - step } else { step };
                let old = basis[r];
                pivot(&mut t, &mut rc, width, d, r, j);
                is_basic[old] = false;
                at_upper[old] = to_upper;
                is_basic[j] = true;
                at_upper[j] = false;
                basis[r] = j;
                beta[r] = entering_value;
                scan_from = 0;
            }
        }
    }

    // Recompute the basic solution and duals from the original data so that
    // rounding accumulated in the tableau does not leak into the answer.
    let column = |j: usize| -> Vec<f64> {
        if j < n {
            cols[order[j]].to_vec()
        } else {
            let mut e = vec![0.0; d];
            e[j - n] = 1.0;
            e
        }
    };
    let cost = |j: usize| if j < n { c[order[j]] } else { 0.0 };
    let mut residual = b.to_vec();
    for j in 0..n {
        if !is_basic[j] && at_upper[j] {
            for (res, a) in residual.iter_mut().zip(cols[order[j]].iter()) {
                *res -= a;
            }
        }
    }
    let bmat: Vec<Vec<f64>> = basis.iter().map(|&j| column(j)).collect();
    let xb = solve_dense(&bmat, &residual, false).unwrap_or_else(|| beta.clone());
    let cb: Vec<f64> = basis.iter().map(|&j| cost(j)).collect();
    let y = solve_dense(&bmat, &cb, true).unwrap_or_else(|| (0..d).map(|r| -rc[n + r]).collect());

    let mut x = vec![0.0; n];
    for j in 0..n {
        if !is_basic[j] && at_upper[j] {
            x[order[j]] = 1.0;
        }
    }
    for (r, &j) in basis.iter().enumerate() {
        if j < n {
            x[order[j]] = xb[r].clamp(0.0, 1.0);
        }
    }
    let duals: Vec<f64> = y.into_iter().map(|v| v.max(0.0)).collect();
    let objective = dot(c, &x);
    Ok(LpSolution {
        x,
        duals,
        objective,
        iterations,
    })
}

fn pivot(t: &mut [f64], rc: &mut [f64], width: usize, d: usize, r: usize, j: usize) {
    let p = t[r * width + j];
    for v in &mut t[r * width..(r + 1) * width] {
        *v /= p;
    }
    let (before, rest) = t.split_at_mut(r * width);
    let (row, after) = rest.split_at_mut(width);
    for other in before.chunks_mut(width).chain(after.chunks_mut(width)) {
        let f = other[j];
        if f != 0.0 {
            for (o, pr) in other.iter_mut().zip(row.iter()) {
                *o -= f * pr;
            }
        }
    }
    let f = rc[j];
    if f != 0.0 {
        for (o, pr) in rc.iter_mut().zip(row.iter()) {
            *o -= f * pr;
        }
    }
    debug_assert_eq!(t.len(), d * width);
}

/// Solves `M z = rhs` (or `M^T z = rhs`) where `cols[k]` is column `k` of
/// `M`, by Gaussian elimination with partial pivoting.
fn solve_dense(cols: &[Vec<f64>], rhs: &[f64], transpose: bool) -> Option<Vec<f64>> {
    let d = rhs.len();
    let mut a: Vec<Vec<f64>> = (0..d)
        .map(|row| {
            (0..d)
                .map(|col| {
                    if transpose {
                        cols[row][col]
                    } else {
                        cols[col][row]
                    }
                })
                .collect()
        })
        .collect();
    let mut z = rhs.to_vec();
    for k in 0..d {
        let p = (k..d).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-14 {
            return None;
        }
        a.swap(k, p);
        z.swap(k, p);
        let zk = z[k];
        let (top, bottom) = a[..d].split_at_mut(k + 1);
        let pivot = &top[k];
        for (row, zi) in bottom.iter_mut().zip(&mut z[k + 1..d]) {
            let f = row[k] / pivot[k];
            if f != 0.0 {
                for (x, &p) in row[k..d].iter_mut().zip(&pivot[k..d]) {
                    *x -= f * p;
                }
                *zi -= f * zk;
            }
        }
    }
    for k in (0..d).rev() {
        let s: f64 = (k + 1..d).map(|c| a[k][c] * z[c]).sum();
        z[k] = (z[k] - s) / a[k][k];
    }
    Some(z)
}
