use fairgroup_core::importance::{
    build_importance, build_importance_from, pearson, rank_column, weights_from_correlations, Sign,
};
use fairgroup_core::synth::{synth_acs, SynthConfig};
use fairgroup_core::{Dataset, FeatureSpec, Kind};
use proptest::prelude::*;

/// `(E[XY] - E[X]E[Y]) / sqrt(Var X Var Y)` evaluated literally.
fn formula(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let e = |v: &dyn Fn(usize) -> f64| (0..x.len()).map(v).sum::<f64>() / n;
    let (ex, ey) = (e(&|i| x[i]), e(&|i| y[i]));
    let exy = e(&|i| x[i] * y[i]);
    let vx = e(&|i| (x[i] - ex).powi(2));
    let vy = e(&|i| (y[i] - ey).powi(2));
    (exy - ex * ey) / (vx * vy).sqrt()
}

fn is_permutation(v: &[u64]) -> bool {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.iter().enumerate().all(|(i, &r)| r == i as u64 + 1)
}

fn table(cols: Vec<Vec<f64>>, y: Vec<f64>) -> Dataset {
    let mut specs: Vec<FeatureSpec> = (0..cols.len())
        .map(|i| FeatureSpec::unprotected(format!("f{i}"), Kind::Numeric))
        .collect();
    specs.push(FeatureSpec::target("y"));
    let mut all = cols;
    all.push(y);
    Dataset::new(specs, all).unwrap()
}

#[test]
fn population_formula_example() {
    let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[0.0, 0.0, 1.0, 1.0]).unwrap();
    assert!((r - formula(&[1.0, 2.0, 3.0, 4.0], &[0.0, 0.0, 1.0, 1.0])).abs() < 1e-15);
    assert!((r - 0.894_427_190_999_915_9).abs() < 1e-12);
}

#[test]
fn importance_recomputed_step_by_step() {
    let d = synth_acs(400, 21, &SynthConfig::default())
        .unwrap()
        .binarize_protected("household_income", 20_000.0)
        .unwrap();
    let m = build_importance(&d).unwrap();
    let names = d.unprotected_names();
    assert_eq!(m.features, names);
    assert!(!names.contains(&"household_income".to_string()));
    assert!(!names.contains(&"medicaid".to_string()));

    let y: Vec<f64> = d.labels().iter().map(|&l| f64::from(u8::from(l))).collect();
    let corrs: Vec<f64> = names
        .iter()
        .map(|f| {
            let x = d.column(f).unwrap();
            if x.iter().all(|v| *v == x[0]) { 0.0 } else { formula(x, &y) }
        })
        .collect();
    for (a, b) in m.correlations.iter().zip(&corrs) {
        assert!((a - b).abs() < 1e-12);
    }
    // weights: count features with strictly smaller |corr|, or equal and earlier
    for (i, w) in m.weights.iter().enumerate() {
        let below = (0..corrs.len())
            .filter(|&k| {
                let (a, b) = (m.correlations[k].abs(), m.correlations[i].abs());
                a < b || (a == b && k < i)
            })
            .count();
        assert_eq!(*w, below as u64 + 1);
    }
    // ranks: count points ahead in the correlation direction
    for (i, f) in names.iter().enumerate() {
        let x = d.column(f).unwrap();
        let positive = m.correlations[i] >= 0.0;
        for j in 0..d.len() {
            let ahead = (0..d.len())
                .filter(|&o| {
                    let better = if positive { x[o] > x[j] } else { x[o] < x[j] };
                    better || (x[o] == x[j] && o < j)
                })
                .count();
            assert_eq!(m.rank_row(j)[i], ahead as u64 + 1);
            assert_eq!(m.importance_row(j)[i], m.weights[i] * m.rank_row(j)[i]);
        }
    }
}

#[test]
fn reference_set_sets_direction_points_set_ranks() {
    let reference = table(vec![vec![1.0, 2.0, 3.0]], vec![1.0, 1.0, 0.0]);
    let points = table(vec![vec![10.0, 30.0, 20.0, 40.0]], vec![0.0, 1.0, 0.0, 1.0]);
    let m = build_importance_from(&reference, &points).unwrap();
    assert!(m.correlations[0] < 0.0);
    assert_eq!(m.ranks, vec![1, 3, 2, 4]);
    assert_eq!(m.n(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pearson_matches_formula(v in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 2..50)) {
        let (x, y): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
        let r = pearson(&x, &y).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r));
        let constant = x.iter().all(|a| *a == x[0]) || y.iter().all(|b| *b == y[0]);
        if !constant {
            prop_assert!((r - formula(&x, &y)).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_pairs_are_extreme(x in prop::collection::vec(-50.0f64..50.0, 3..40), a in 0.1f64..10.0, b in -5.0f64..5.0) {
        prop_assume!(x.iter().any(|v| *v != x[0]));
        let up: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let down: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
        prop_assert!((pearson(&x, &up).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!((pearson(&x, &down).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn outputs_are_permutations(
        cols in prop::collection::vec(prop::collection::vec(0i32..6, 12), 1..6),
        y in prop::collection::vec(0u8..2, 12),
    ) {
        let cols: Vec<Vec<f64>> = cols.into_iter().map(|c| c.into_iter().map(f64::from).collect()).collect();
        let dim = cols.len();
        let d = table(cols, y.into_iter().map(f64::from).collect());
        let m = build_importance(&d).unwrap();
        prop_assert!(is_permutation(&m.weights));
        for i in 0..dim {
            let col: Vec<u64> = (0..d.len()).map(|j| m.rank_row(j)[i]).collect();
            prop_assert!(is_permutation(&col));
        }
        for k in 0..m.importance.len() {
            prop_assert_eq!(m.importance[k], m.weights[k % dim] * m.ranks[k]);
        }
    }

    #[test]
    fn weights_are_a_permutation(c in prop::collection::vec(-1.0f64..1.0, 1..20)) {
        prop_assert!(is_permutation(&weights_from_correlations(&c)));
    }

    #[test]
    fn positive_affine_map_keeps_ranks(x in prop::collection::vec(-50i32..50, 1..30), a in 0.5f64..4.0, b in -3.0f64..3.0) {
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        let mapped: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        for sign in [Sign::Positive, Sign::Negative] {
            prop_assert_eq!(rank_column(&x, sign), rank_column(&mapped, sign));
        }
    }

    #[test]
    fn maximum_ranks_first_when_positive(x in prop::collection::hash_set(-1000i32..1000, 2..30)) {
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        let y: Vec<f64> = x.clone();
        let d = table(vec![x.clone()], y.iter().map(|v| if *v > 0.0 { 1.0 } else { 0.0 }).collect());
        let m = build_importance(&d).unwrap();
        prop_assume!(m.correlations[0] > 0.0);
        let argmax = (0..x.len()).max_by(|&a, &b| x[a].total_cmp(&x[b])).unwrap();
        prop_assert_eq!(m.rank_row(argmax)[0], 1);
    }
}
