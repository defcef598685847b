use fairgroup_core::{Dataset, FeatureSpec, Kind};
use proptest::prelude::*;

fn incomes(values: Vec<f64>) -> Dataset {
    let n = values.len();
    Dataset::new(
        vec![
            FeatureSpec::unprotected("household_income", Kind::Numeric),
            FeatureSpec::target("y"),
        ],
        vec![values, (0..n).map(|j| (j % 2) as f64).collect()],
    )
    .unwrap()
}

#[test]
fn threshold_boundary_goes_unprotected() {
    let d = incomes(vec![19_999.0, 20_000.0, 20_001.0, 0.0])
        .binarize_protected("household_income", 20_000.0)
        .unwrap();
    assert_eq!(d.protected_flags().unwrap(), vec![true, false, false, true]);
    assert_eq!(d.protected_name(), Some("household_income"));
}

proptest! {
    #[test]
    fn split_partitions_rows(n in 2usize..300, frac in 0.05f64..0.95, seed in 0u64..1000) {
        let d = incomes((0..n).map(|j| j as f64).collect());
        let n_train = (frac * n as f64).round() as usize;
        if n_train == 0 || n_train == n {
            prop_assert!(d.split_indices(frac, seed).is_err());
            return Ok(());
        }
        let (train, test) = d.split_indices(frac, seed).unwrap();
        prop_assert_eq!(train.len(), n_train);
        prop_assert!(train.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(test.windows(2).all(|w| w[0] < w[1]));
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(d.split_indices(frac, seed).unwrap(), (train, test));
    }

    #[test]
    fn select_rows_keeps_values(v in prop::collection::vec(0.0f64..1e6, 1..50)) {
        let d = incomes(v.clone());
        let rows: Vec<usize> = (0..v.len()).rev().collect();
        let s = d.select_rows(&rows).unwrap();
        let col = s.column("household_income").unwrap();
        for (k, &r) in rows.iter().enumerate() {
            prop_assert_eq!(col[k], v[r]);
        }
    }
}
