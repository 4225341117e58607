use itertools::Itertools;
use rand::Rng;

use ro_arena::arrival::{rng_for, trial_seed, ArrivalSchedule, Stream};
use ro_arena::online::{execute_with_counters, Problem, Session};
use ro_arena::packing::*;
use ro_arena::secretary::{top_k, KAdaptive, SelectionProblem};
use ro_arena::ValueInstance;

/// Solves the square system `m x = r` by Gaussian elimination with partial
/// pivoting; `None` when singular.
fn solve_square(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let s = r.len();
    for col in 0..s {
        let piv = (col..s).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        r.swap(col, piv);
        let pivot = m[col].clone();
        for row in 0..s {
            if row != col {
                let f = m[row][col] / pivot[col];
                for (x, p) in m[row][col..s].iter_mut().zip(&pivot[col..s]) {
                    *x -= f * p;
                }
                r[row] -= f * r[col];
            }
        }
    }
    Some((0..s).map(|i| r[i] / m[i][i]).collect())
}

/// Best objective over all basic solutions of
/// `{ A x <= b, 0 <= x <= 1 }`: choose the tight rows, as many basic columns,
/// and put every other column at a bound.
fn vertex_enumeration(c: &[f64], cols: &[Vec<f64>], b: &[f64]) -> f64 {
    let n = c.len();
    let d = b.len();
    let mut best = f64::NEG_INFINITY;
    for rows in 0u32..(1 << d) {
        let tight: Vec<usize> = (0..d).filter(|r| rows >> r & 1 == 1).collect();
        let s = tight.len();
        for basic in (0..n).combinations(s) {
            let nonbasic: Vec<usize> = (0..n).filter(|i| !basic.contains(i)).collect();
            for bounds in 0u32..(1 << nonbasic.len()) {
                let mut x = vec![0.0; n];
                for (t, &i) in nonbasic.iter().enumerate() {
                    x[i] = (bounds >> t & 1) as f64;
                }
                if s > 0 {
                    let m: Vec<Vec<f64>> = tight
                        .iter()
                        .map(|&r| basic.iter().map(|&i| cols[i][r]).collect())
                        .collect();
                    let rhs: Vec<f64> = tight
                        .iter()
                        .map(|&r| b[r] - nonbasic.iter().map(|&i| cols[i][r] * x[i]).sum::<f64>())
                        .collect();
                    let Some(xb) = solve_square(m, rhs) else {
                        continue;
                    };
                    for (&i, v) in basic.iter().zip(xb) {
                        x[i] = v;
                    }
                }
                let feasible = x.iter().all(|&v| (-1e-9..=1.0 + 1e-9).contains(&v))
                    && (0..d)
                        .all(|r| (0..n).map(|i| cols[i][r] * x[i]).sum::<f64>() <= b[r] + 1e-9);
                if feasible {
                    best = best.max(c.iter().zip(&x).map(|(a, b)| a * b).sum());
                }
            }
        }
    }
    best
}

fn random_lp(seed: u64, n: usize, d: usize) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = rng_for(seed, Stream::Instance);
    let c = (0..n).map(|_| rng.random::<f64>()).collect();
    let cols = (0..n)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect();
    let b = (0..d).map(|_| rng.random_range(0.5..3.5)).collect();
    (c, cols, b)
}

#[test]
fn simplex_matches_vertex_enumeration() {
    for seed in 0..60 {
        let (c, cols, b) = random_lp(seed, 8, 3);
        let refs: Vec<&[f64]> = cols.iter().map(|a| a.as_slice()).collect();
        let sol = solve_boxed_packing(&c, &refs, &b).unwrap();
        let want = vertex_enumeration(&c, &cols, &b);
        assert!(
            (sol.objective - want).abs() < 1e-9,
            "seed {seed}: {} vs {want}",
            sol.objective
        );
        assert!(sol.primal_violation(&refs, &b) < 1e-9);
    }
}

#[test]
fn duality_gap_closes_on_small_lps() {
    for seed in 0..1000 {
        let mut rng = rng_for(seed, Stream::Instance);
        let n = rng.random_range(1..=12);
        let d = rng.random_range(1..=4);
        let (c, cols, b) = random_lp(seed + 1_000_000, n, d);
        let refs: Vec<&[f64]> = cols.iter().map(|a| a.as_slice()).collect();
        let sol = solve_boxed_packing(&c, &refs, &b).unwrap();
        assert!(sol.duals.iter().all(|&y| y >= 0.0));
        let gap = sol.duality_gap(&c, &refs, &b);
        assert!(gap.abs() <= 1e-6, "seed {seed}: gap {gap}");
    }
}

#[test]
fn one_row_lp_is_top_k() {
    for seed in 0..50 {
        let v = ValueInstance::uniform(30, seed).unwrap();
        let inst = PackingInstance::from_values(v.values(), 7).unwrap();
        let opt = offline_fractional_opt(&inst).unwrap();
        assert!((opt.value - top_k(&v, 7).value).abs() < 1e-9);
    }
    let v = [0.3, 0.9, 0.1];
    let inst = PackingInstance::from_values(&v, 5).unwrap();
    assert!((offline_fractional_opt(&inst).unwrap().value - 1.3).abs() < 1e-12);
    let sol = inst.lp_solve(&[0, 1, 2], 2.0).unwrap();
    assert!((sol.objective - 1.2).abs() < 1e-12);
}

#[test]
fn rounding_keeps_support_and_feasibility() {
    let inst = PackingInstance::random(40, 3, 5, 8).unwrap();
    let mut x = vec![0.0; 40];
    for i in (0..40).step_by(3) {
        x[i] = 1.0;
    }
    for seed in 0..100 {
        let picked = round_fractional(&x, &inst, seed).unwrap();
        assert!(picked.iter().all(|&i| x[i] == 1.0));
        assert!(inst.is_feasible(&picked));
    }
}

#[test]
fn rounding_keeps_most_of_the_mass() {
    let k = 100;
    let inst = PackingInstance::from_values(&vec![1.0; 400], k).unwrap();
    let x = vec![0.25; 400];
    let theta = (3.0 * 2f64.ln() / k as f64).sqrt();
    let trials = 400;
    let total: usize = (0..trials)
        .map(|s| round_fractional(&x, &inst, s).unwrap().len())
        .sum();
    let mean = total as f64 / trials as f64;
    assert!(
        mean >= 100.0 * (1.0 - theta) - 30.0 && mean <= 100.0,
        "mean {mean}"
    );
}

#[test]
fn one_row_packing_follows_the_adaptive_secretary() {
    for t in 0..20 {
        let seed = trial_seed(5, t);
        let (n, k) = (2000, 60);
        let v = ValueInstance::uniform(n, seed).unwrap();
        let sel = SelectionProblem::new(v.clone(), k).unwrap();
        let pack = PackingProblem::new(PackingInstance::from_values(v.values(), k).unwrap());
        let order = ArrivalSchedule::shuffle(n, seed).unwrap();
        let delta = KAdaptive::default_delta(k);

        let mut s1 = Session::new(sel.requests(), order.order(), sel.initial_state()).unwrap();
        let a = KAdaptive::with_delta(delta)
            .unwrap()
            .run_logged(k, &mut s1)
            .unwrap();
        let mut s2 = Session::new(pack.requests(), order.order(), pack.initial_state()).unwrap();
        let shape = PackingShape { n, d: 1, k };
        let b = OnlinePacking::with_delta(delta)
            .unwrap()
            .run_logged(shape, &mut s2)
            .unwrap();

        let pa: Vec<(usize, usize)> = a.iter().map(|e| (e.position, e.index)).collect();
        let pb: Vec<(usize, usize)> = b.iter().map(|e| (e.position, e.index)).collect();
        assert_eq!(pa, pb, "trial {t}");
        for (x, y) in a.iter().zip(&b) {
            assert!((x.threshold.max(0.0) - y.threshold).abs() < 1e-9);
        }
    }
}

#[test]
fn row_usage_stays_within_budget() {
    for t in 0..30 {
        let seed = trial_seed(6, t);
        let inst = PackingInstance::random(3000, 3, 40, seed).unwrap();
        let p = PackingProblem::new(inst.clone());
        let order = ArrivalSchedule::shuffle(3000, seed).unwrap();
        let mut rng = rng_for(seed, Stream::Algorithm);
        let (state, counters) =
            execute_with_counters(&OnlinePacking::default(), &p, order.order(), &mut rng).unwrap();
        assert!(inst.is_feasible(state.picked()));
        assert!(state.usage().iter().all(|&u| u <= 40.0 + ROW_TOL));
        assert!(p.objective(&state) <= offline_fractional_opt(&inst).unwrap().value + 1e-9);
        assert!(counters.contains_key("guard_skips"));
    }
}
