//! Feature importance: Pearson correlation against the target, integer
//! weights from the order of `|corr|`, per-point ranks, and the importance
//! index `r'_ij = w_i * r_ij`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::dataset::Dataset;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImportanceError {
    #[error("vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("correlation needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("dataset has no unprotected features")]
    NoFeatures,
    #[error("reference and point sets have different unprotected features")]
    SchemaMismatch,
}

/// Direction in which a feature's values are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    /// Largest value ranks first.
    Positive,
    /// Smallest value ranks first.
    Negative,
}

impl Sign {
    /// Zero correlation counts as positive.
    pub fn of(corr: f64) -> Sign {
        if corr < 0.0 {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }
}

/// Population-moment Pearson correlation. Exactly 0 when either input is
/// constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, ImportanceError> {
    if x.len() != y.len() {
        return Err(ImportanceError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return Err(ImportanceError::TooFewPoints(n));
    }
    if x.iter().all(|v| *v == x[0]) || y.iter().all(|v| *v == y[0]) {
        return Ok(0.0);
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(0.0);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Weight `1..=N` by ascending `|corr|`; ties go to the earlier feature.
pub fn weights_from_correlations(corrs: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..corrs.len()).collect();
    order.sort_by(|&a, &b| {
        libm::fabs(corrs[a])
            .total_cmp(&libm::fabs(corrs[b]))
            .then(a.cmp(&b))
    });
    let mut weights = vec![0u64; corrs.len()];
    for (rank, &i) in order.iter().enumerate() {
        weights[i] = rank as u64 + 1;
    }
    weights
}

/// Rank `1..=n` of each value in the direction of `sign`; ties go to the
/// lower index.
pub fn rank_column(x: &[f64], sign: Sign) -> Vec<u64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| {
        let by_value = match sign {
            Sign::Positive => x[b].total_cmp(&x[a]),
            Sign::Negative => x[a].total_cmp(&x[b]),
        };
        by_value.then(a.cmp(&b))
    });
    let mut ranks = vec![0u64; x.len()];
    for (rank, &j) in order.iter().enumerate() {
        ranks[j] = rank as u64 + 1;
    }
    ranks
}

/// Correlations, weights, ranks and importance indices over the unprotected
/// features. `ranks` and `importance` are row-major `n x dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceMatrix {
    pub features: Vec<String>,
    pub correlations: Vec<f64>,
    pub weights: Vec<u64>,
    pub ranks: Vec<u64>,
    pub importance: Vec<u64>,
    n: usize,
}

impl ImportanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }

    pub fn rank_row(&self, j: usize) -> &[u64] {
        &self.ranks[j * self.dim()..(j + 1) * self.dim()]
    }

    /// The feature importance vector `r'_j`.
    pub fn importance_row(&self, j: usize) -> &[u64] {
        &self.importance[j * self.dim()..(j + 1) * self.dim()]
    }

    /// Importance vectors as reals, row-major, for clustering.
    pub fn importance_f64(&self) -> Vec<f64> {
        self.importance.iter().map(|&v| v as f64).collect()
    }
}

/// Correlations and ranks both taken from `d`.
pub fn build_importance(d: &Dataset) -> Result<ImportanceMatrix, ImportanceError> {
    build_importance_from(d, d)
}

/// Correlations (and so weights and rank directions) from `reference`,
/// ranks over the points of `points`.
pub fn build_importance_from(
    reference: &Dataset,
    points: &Dataset,
) -> Result<ImportanceMatrix, ImportanceError> {
    let features = reference.unprotected_names();
    if features.is_empty() {
        return Err(ImportanceError::NoFeatures);
    }
    if points.unprotected_names() != features {
        return Err(ImportanceError::SchemaMismatch);
    }
    let y: Vec<f64> = reference
        .labels()
        .into_iter()
        .map(|l| if l { 1.0 } else { 0.0 })
        .collect();
    let ref_cols = reference.unprotected_positions();
    let correlations = ref_cols
        .iter()
        .map(|&c| pearson(&reference.columns()[c], &y))
        .collect::<Result<Vec<_>, _>>()?;
    let weights = weights_from_correlations(&correlations);

    let n = points.len();
    let dim = features.len();
    let mut ranks = vec![0u64; n * dim];
    for (i, &c) in points.unprotected_positions().iter().enumerate() {
        let col = rank_column(&points.columns()[c], Sign::of(correlations[i]));
        for (j, r) in col.into_iter().enumerate() {
            ranks[j * dim + i] = r;
        }
    }
    let importance = ranks
        .iter()
        .enumerate()
        .map(|(k, r)| weights[k % dim] * r)
        .collect();
    Ok(ImportanceMatrix {
        features,
        correlations,
        weights,
        ranks,
        importance,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{FeatureSpec, Kind};

    #[test]
    fn pearson_basics() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_eq!(pearson(&[4.0, 4.0, 4.0], &[3.0, 2.0, 1.0]).unwrap(), 0.0);
        let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert!((r - 0.894_427_191).abs() < 1e-9);
        assert_eq!(pearson(&[1.0], &[1.0]), Err(ImportanceError::TooFewPoints(1)));
        assert_eq!(pearson(&[1.0, 2.0], &[1.0]), Err(ImportanceError::LengthMismatch(2, 1)));
    }

    #[test]
    fn weights_follow_abs_correlation() {
        // household income, age, region
        assert_eq!(weights_from_correlations(&[0.398, 0.0783, 0.00132]), vec![3, 2, 1]);
        assert_eq!(weights_from_correlations(&[-0.9, 0.1]), vec![2, 1]);
        assert_eq!(weights_from_correlations(&[0.5, 0.5]), vec![1, 2]);
        assert_eq!(weights_from_correlations(&[0.2]), vec![1]);
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_column(&[5.0, 2.0, 9.0], Sign::Positive), vec![2, 3, 1]);
        assert_eq!(rank_column(&[5.0, 2.0, 9.0], Sign::Negative), vec![2, 1, 3]);
        assert_eq!(rank_column(&[4.0, 4.0, 1.0], Sign::Positive), vec![1, 2, 3]);
        assert_eq!(Sign::of(0.0), Sign::Positive);
    }

    #[test]
    fn smallest_case() {
        let d = Dataset::new(
            vec![FeatureSpec::unprotected("x", Kind::Numeric), FeatureSpec::target("y")],
            vec![vec![10.0, 20.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let m = build_importance(&d).unwrap();
        assert_eq!(m.correlations, vec![1.0]);
        assert_eq!(m.weights, vec![1]);
        assert_eq!(m.ranks, vec![2, 1]);
        assert_eq!(m.importance, vec![2, 1]);
    }

    #[test]
    fn stronger_feature_doubles() {
        let d = Dataset::new(
            vec![
                FeatureSpec::unprotected("a", Kind::Numeric),
                FeatureSpec::unprotected("b", Kind::Numeric),
                FeatureSpec::target("y"),
            ],
            vec![
                vec![1.0, 2.0, 3.0, 4.0],
                vec![3.0, 1.0, 4.0, 2.0],
                vec![0.0, 0.0, 1.0, 1.0],
            ],
        )
        .unwrap();
        let m = build_importance(&d).unwrap();
        assert!(m.correlations[0].abs() > m.correlations[1].abs());
        assert_eq!(m.weights, vec![2, 1]);
        for j in 0..4 {
            assert_eq!(m.importance_row(j)[0], 2 * m.rank_row(j)[0]);
            assert_eq!(m.importance_row(j)[1], m.rank_row(j)[1]);
        }
    }
}
