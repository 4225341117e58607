use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use ro_arena::arrival::{rng_for, trial_seed, ArrivalSchedule, Stream};
use ro_arena::graphical::DisjointSets;
use ro_arena::metric::{MetricSpace, RequestDistribution};
use ro_arena::online::{execute, Oracle, Problem, Session};
use ro_arena::secretary::{KHalves, OrderOblivious, TopK};
use ro_arena::stochastic::*;
use ro_arena::ValueInstance;

/// Decodes a Prüfer sequence over `m` labels into its tree edges.
fn prufer_tree(seq: &[usize], m: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1; m];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(m - 1);
    for &s in seq {
        let leaf = (0..m).find(|&i| degree[i] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..m).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Cheapest spanning tree over every labelled tree on the positions.
fn cayley_min(metric: &MetricSpace, points: &[usize]) -> f64 {
    let m = points.len();
    if m <= 1 {
        return 0.0;
    }
    let len = m - 2;
    let mut seq = vec![0; len];
    let mut best = f64::INFINITY;
    loop {
        let cost: f64 = prufer_tree(&seq, m)
            .iter()
            .map(|&(a, b)| metric.d(points[a], points[b]))
            .sum();
        best = best.min(cost);
        // Odometer step.
        let mut i = 0;
        while i < len && seq[i] == m - 1 {
            seq[i] = 0;
            i += 1;
        }
        if i == len {
            return best;
        }
        seq[i] += 1;
    }
}

/// Steiner tree cost by the subset dynamic program over terminals.
fn dreyfus_wagner(metric: &MetricSpace, terminals: &[usize]) -> f64 {
    let mut t = terminals.to_vec();
    t.sort_unstable();
    t.dedup();
    if t.len() <= 1 {
        return 0.0;
    }
    let (root, rest) = (t[0], &t[1..]);
    let n = metric.len();
    let full = 1usize << rest.len();
    let mut dp = vec![vec![f64::INFINITY; n]; full];
    for (i, &ti) in rest.iter().enumerate() {
        for (v, cell) in dp[1 << i].iter_mut().enumerate() {
            *cell = metric.d(ti, v);
        }
    }
    for s in 1..full {
        if s.count_ones() < 2 {
            continue;
        }
        let mut join = vec![f64::INFINITY; n];
        for u in 0..n {
            let mut sub = (s - 1) & s;
            while sub > 0 {
                join[u] = join[u].min(dp[sub][u] + dp[s ^ sub][u]);
                sub = (sub - 1) & s;
            }
        }
        for (v, cell) in dp[s].iter_mut().enumerate() {
            *cell = (0..n)
                .map(|u| join[u] + metric.d(u, v))
                .fold(f64::INFINITY, f64::min);
        }
    }
    dp[full - 1][root]
}

fn random_points(rng: &mut impl Rng, n: usize, count: usize) -> Vec<usize> {
    (0..count).map(|_| rng.random_range(0..n)).collect()
}

#[test]
fn mst_matches_cayley_enumeration() {
    for seed in 0..200 {
        let mut rng = rng_for(seed, Stream::Instance);
        let n = rng.random_range(2..=9);
        let m = MetricSpace::random_euclidean(n, seed).unwrap();
        let count = rng.random_range(1..=7);
        let points = random_points(&mut rng, n, count);
        let tree = mst(&m, &points);
        assert_eq!(tree.edges.len(), count - 1);
        let want = cayley_min(&m, &points);
        assert!(
            (tree.cost - want).abs() < 1e-9,
            "seed {seed}: {} vs {want}",
            tree.cost
        );
        let mut sets = DisjointSets::new(count);
        for &(a, b) in &tree.edges {
            assert!(sets.union(a, b));
        }
    }
}

#[test]
fn exact_steiner_matches_dynamic_program() {
    for seed in 0..150 {
        let mut rng = rng_for(seed, Stream::Instance);
        let n = rng.random_range(2..=10);
        let m = MetricSpace::random_euclidean(n, seed + 500).unwrap();
        let count = rng.random_range(1..=n.min(6));
        let terminals = random_points(&mut rng, n, count);
        let opt = steiner_opt_small(&m, &terminals).unwrap();
        let want = dreyfus_wagner(&m, &terminals);
        assert!(
            (opt.value - want).abs() < 1e-9,
            "seed {seed}: {} vs {want}",
            opt.value
        );
        let mut spanned = terminals.clone();
        spanned.extend(&opt.witness);
        spanned.sort_unstable();
        spanned.dedup();
        assert!((mst(&m, &spanned).cost - opt.value).abs() < 1e-9);
    }
    let big = MetricSpace::random_euclidean(13, 0).unwrap();
    assert!(steiner_opt_small(&big, &[0, 1]).is_err());
}

#[test]
fn mst_is_within_twice_the_steiner_optimum() {
    for seed in 0..100 {
        let m = MetricSpace::random_euclidean(8, seed).unwrap();
        let mut pts: Vec<usize> = (0..8).collect();
        pts.shuffle(&mut rng_for(seed, Stream::Order));
        let terminals = &pts[..4];
        let opt = steiner_opt_small(&m, terminals).unwrap().value;
        let tree = mst(&m, terminals).cost;
        assert!(opt <= tree + 1e-12);
        assert!(tree <= 2.0 * opt + 1e-9);
    }
}

#[test]
fn sample_tree_spans_its_points() {
    let m = MetricSpace::random_euclidean(10, 4).unwrap();
    let dist = RequestDistribution::uniform(10).unwrap();
    for (seed, n) in (0..50).zip([1, 2, 5, 17, 40].into_iter().cycle()) {
        let tree =
            SampleTree::build(&m, &dist, 3, n, &mut rng_for(seed, Stream::Algorithm)).unwrap();
        assert_eq!(tree.points.len(), n);
        assert_eq!(tree.points[tree.root()], 3);
        assert_eq!(tree.edges.len(), n - 1);
        let mut sets = DisjointSets::new(n);
        for &(a, b) in &tree.edges {
            assert!(sets.union(a, b));
        }
        let cost: f64 = tree
            .edges
            .iter()
            .map(|&(a, b)| m.d(tree.points[a], tree.points[b]))
            .sum();
        assert!((cost - tree.cost).abs() < 1e-12);
    }
}

#[test]
fn online_steiner_connects_everything_and_pays_at_least_opt() {
    for t in 0..60 {
        let seed = trial_seed(8, t);
        let metric = Arc::new(MetricSpace::random_euclidean(10, seed).unwrap());
        let mut rng = rng_for(seed, Stream::Instance);
        let weights: Vec<f64> = (0..10).map(|_| rng.random::<f64>() + 0.01).collect();
        let total: f64 = weights.iter().sum();
        let dist = RequestDistribution::new(weights.iter().map(|w| w / total).collect()).unwrap();
        let p = SteinerProblem::iid(metric.clone(), dist.clone(), 20, seed).unwrap();
        let opt = SteinerOracle.optimum(&p).unwrap();
        let order = ArrivalSchedule::identity(20).unwrap();
        for alg in [
            &AugmentedGreedy as &dyn ro_arena::online::OnlineAlgorithm<SteinerProblem>,
            &GreedySteiner,
        ] {
            let s = execute(
                alg,
                &p,
                order.order(),
                &mut rng_for(seed, Stream::Algorithm),
            )
            .unwrap();
            assert!(p.request_points().iter().all(|&q| s.reaches_root(q)));
            assert!(s.cost() >= opt - 1e-9, "{}: {} < {opt}", alg.id(), s.cost());
            let paid: f64 = s.bought().iter().map(|&(a, b)| metric.d(a, b)).sum();
            assert!((paid - s.cost()).abs() < 1e-9);
        }
        let direct = augmented_greedy(metric, dist, 20, seed).unwrap();
        let s = execute(
            &AugmentedGreedy,
            &p,
            order.order(),
            &mut rng_for(seed, Stream::Algorithm),
        )
        .unwrap();
        assert_eq!(direct, s.cost());
    }
}

#[test]
fn deterministic_samples_reduce_to_two_phase_selection() {
    let alg = ProphetFromSamples::new(Arc::new(KHalves));
    for seed in 0..300 {
        let v = ValueInstance::uniform(40, seed).unwrap();
        let k = 1 + seed as usize % 8;
        let p = ProphetProblem::new(v.values().to_vec(), v.clone(), k).unwrap();
        let order = ArrivalSchedule::shuffle(40, seed).unwrap();
        let mut session = Session::new(p.requests(), order.order(), p.initial_state()).unwrap();
        let trace = alg
            .run_traced(
                p.public(),
                &mut session,
                &mut rng_for(seed, Stream::Algorithm),
            )
            .unwrap();
        let state = session.finish().unwrap();

        let sample: Vec<_> = (0..40)
            .filter(|&i| trace.phase_one[i])
            .map(|i| ro_arena::numeric::Ranked::new(v.values()[i], i))
            .collect();
        let rule = KHalves.learn(&sample, 40, k).unwrap();
        let want: Vec<usize> = order
            .order()
            .iter()
            .copied()
            .filter(|&i| {
                !trace.phase_one[i]
                    && rule
                        .threshold
                        .admits(ro_arena::numeric::Ranked::new(v.values()[i], i))
            })
            .take(rule.budget.min(k))
            .collect();
        let mut got = state.picked().to_vec();
        let mut want_sorted = want.clone();
        got.sort_unstable();
        want_sorted.sort_unstable();
        assert_eq!(got, want_sorted, "seed {seed}");
        assert!(got.len() <= k);
        assert!(p.objective(&state) <= TopK.optimum(&p).unwrap() + 1e-12);
    }
}

#[test]
fn wrapper_never_picks_a_sampled_item() {
    for id in ["secretary-50", "ksec-halves", "ksec-obliv"] {
        let alg = ProphetFromSamples::by_id(id).unwrap();
        for seed in 0..100 {
            let p = ProphetProblem::uniform(60, 5, seed).unwrap();
            for adv in AdversaryOrder::ALL {
                let order = adv.order(p.values());
                let mut session = Session::new(p.requests(), &order, p.initial_state()).unwrap();
                let trace = alg
                    .run_traced(
                        p.public(),
                        &mut session,
                        &mut rng_for(seed, Stream::Algorithm),
                    )
                    .unwrap();
                let state = session.finish().unwrap();
                assert!(
                    state.picked().iter().all(|&i| !trace.phase_one[i]),
                    "{id} {}",
                    adv.tag()
                );
                assert!(state.picked().len() <= 5);
            }
        }
    }
}

#[test]
fn adversary_tags_round_trip() {
    for adv in AdversaryOrder::ALL {
        assert_eq!(AdversaryOrder::parse(adv.tag()).unwrap(), adv);
    }
    assert!(AdversaryOrder::parse("sideways").is_err());
    assert!(ProphetFromSamples::by_id("ksec-adapt:delta=0.1").is_err());
}
