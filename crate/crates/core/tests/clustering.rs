use fairgroup_core::clustering::{kmedians_rows, l1_distance, optimal_two_medians_1d, weighted_l1};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimal L1 cost over every split of `values` into two nonempty sets,
/// each at its best single center.
fn brute_force_two(values: &[f64]) -> f64 {
    let n = values.len();
    let best_center = |s: &[f64]| {
        s.iter()
            .map(|c| s.iter().map(|v| (v - c).abs()).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    };
    (1..(1u32 << n) - 1)
        .map(|mask| {
            let (a, b): (Vec<f64>, Vec<f64>) = {
                let mut a = Vec::new();
                let mut b = Vec::new();
                for (j, v) in values.iter().enumerate() {
                    if mask >> j & 1 == 1 { a.push(*v) } else { b.push(*v) }
                }
                (a, b)
            };
            best_center(&a) + best_center(&b)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn two_medians_against_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut hits = 0;
    let trials = 200;
    for t in 0..trials {
        let n = rng.random_range(2..=10);
        let v: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..40))).collect();
        let c = kmedians_rows(&v, 1, 2, t, 100).unwrap();
        let best = brute_force_two(&v);
        assert_eq!(optimal_two_medians_1d(&v), best);
        assert!(c.cost >= best);
        if c.cost == best {
            hits += 1;
        }
    }
    assert!(hits * 10 >= trials * 9, "{hits}/{trials}");
}

#[test]
fn random_triples_are_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let mut v = || -> Vec<f64> { (0..4).map(|_| rng.random_range(-10.0..10.0)).collect() };
        let (p, q, m) = (v(), v(), v());
        let pq = l1_distance(&p, &q).unwrap();
        assert_eq!(pq, l1_distance(&q, &p).unwrap());
        assert!(pq <= l1_distance(&p, &m).unwrap() + l1_distance(&m, &q).unwrap() + 1e-12);
        assert!(pq > 0.0);
    }
}

#[test]
fn weighted_form_matches_importance_vectors() {
    let w = [3u64, 1, 2];
    let (rp, rq) = ([4u64, 1, 7], [2u64, 5, 7]);
    let ip: Vec<f64> = w.iter().zip(&rp).map(|(a, b)| (a * b) as f64).collect();
    let iq: Vec<f64> = w.iter().zip(&rq).map(|(a, b)| (a * b) as f64).collect();
    assert_eq!(weighted_l1(&w, &rp, &rq).unwrap() as f64, l1_distance(&ip, &iq).unwrap());
}

fn lattice_points() -> impl Strategy<Value = (Vec<f64>, usize)> {
    (1usize..4).prop_flat_map(|dim| {
        (prop::collection::vec(0u32..30, dim * 2..dim * 40), Just(dim)).prop_map(|(v, dim)| {
            let len = v.len() / dim * dim;
            (v[..len].iter().map(|&x| f64::from(x)).collect(), dim)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cost_never_increases((flat, dim) in lattice_points(), k in 1usize..6, seed in 0u64..1000) {
        let n = flat.len() / dim;
        prop_assume!(k <= n);
        let c = kmedians_rows(&flat, dim, k, seed, 100).unwrap();
        for w in c.cost_history.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        let recomputed: f64 = (0..n)
            .map(|j| l1_distance(&flat[j * dim..(j + 1) * dim], &c.centers[c.assignment[j]]).unwrap())
            .sum();
        prop_assert!((recomputed - c.cost).abs() < 1e-9);
        prop_assert_eq!(c.assignment.len(), n);
        prop_assert!(c.assignment.iter().all(|&a| a < k));
        prop_assert_eq!(c.cluster_sizes().iter().filter(|&&s| s == 0).count(), 0);
        prop_assert_eq!(&c, &kmedians_rows(&flat, dim, k, seed, 100).unwrap());
    }

    #[test]
    fn converged_assignment_is_a_fixed_point(v in prop::collection::hash_set(0u32..500, 3..40), k in 1usize..5, seed in 0u64..1000) {
        let flat: Vec<f64> = v.into_iter().map(f64::from).collect();
        prop_assume!(k <= flat.len());
        let c = kmedians_rows(&flat, 1, k, seed, 1000).unwrap();
        prop_assume!(c.iterations < 1000);
        for (j, x) in flat.iter().enumerate() {
            prop_assert_eq!(c.nearest(&[*x]), c.assignment[j]);
        }
    }

    #[test]
    fn single_center_is_a_true_median(v in prop::collection::vec(-100i32..100, 1..30)) {
        let flat: Vec<f64> = v.into_iter().map(f64::from).collect();
        let c = kmedians_rows(&flat, 1, 1, 0, 100).unwrap();
        for cand in &flat {
            let cost: f64 = flat.iter().map(|x| (x - cand).abs()).sum();
            prop_assert!(c.cost <= cost);
        }
    }
}
