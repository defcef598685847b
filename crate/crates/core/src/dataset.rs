//! Column-oriented tabular data with one target and at most one protected
//! feature.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Unprotected,
    Protected,
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Numeric,
    Binary,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Unprotected => "unprotected",
            Role::Protected => "protected",
            Role::Target => "target",
        })
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Numeric => "numeric",
            Kind::Binary => "binary",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpec {
    pub name: String,
    pub role: Role,
    pub kind: Kind,
}

impl FeatureSpec {
    pub fn new(name: impl Into<String>, role: Role, kind: Kind) -> Self {
        Self {
            name: name.into(),
            role,
            kind,
        }
    }

    pub fn unprotected(name: impl Into<String>, kind: Kind) -> Self {
        Self::new(name, Role::Unprotected, kind)
    }

    pub fn target(name: impl Into<String>) -> Self {
        Self::new(name, Role::Target, Kind::Binary)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("dataset has no rows")]
    Empty,
    #[error("expected {expected} columns for {expected} feature specs, got {actual}")]
    ColumnCount { expected: usize, actual: usize },
    #[error("column `{column}` has {actual} values, expected {expected}")]
    RaggedColumn {
        column: String,
        expected: usize,
        actual: usize,
    },
    #[error("column `{column}` has a missing or non-finite value at row {row}")]
    MissingValue { column: String, row: usize },
    #[error("binary column `{column}` holds a value other than 0/1 at row {row}")]
    NonBinaryValue { column: String, row: usize },
    #[error("feature name `{0}` appears more than once")]
    DuplicateFeature(String),
    #[error("dataset needs exactly one target feature, found {0}")]
    TargetCount(usize),
    #[error("the target feature `{0}` must be binary")]
    NonBinaryTarget(String),
    #[error("dataset allows at most one protected feature, found {0}")]
    ProtectedCount(usize),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("feature `{0}` is already binary")]
    AlreadyBinary(String),
    #[error("feature `{0}` must be binary to be marked protected")]
    NotBinary(String),
    #[error("feature `{0}` is the target")]
    IsTarget(String),
    #[error("row index {row} out of range for {n} rows")]
    RowOutOfRange { row: usize, n: usize },
    #[error("split fraction {0} leaves an empty side")]
    BadSplit(f64),
}

/// Immutable column-oriented table.
///
/// Invariants checked at construction: every column has the same length
/// `n >= 1`, all values are finite, binary columns hold only 0 and 1, there is
/// exactly one (binary) target and at most one protected feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    specs: Vec<FeatureSpec>,
    columns: Vec<Vec<f64>>,
    n: usize,
}

impl Dataset {
    pub fn new(specs: Vec<FeatureSpec>, columns: Vec<Vec<f64>>) -> Result<Self, DatasetError> {
        if specs.len() != columns.len() {
            return Err(DatasetError::ColumnCount {
                expected: specs.len(),
                actual: columns.len(),
            });
        }
        let n = columns.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(DatasetError::Empty);
        }
        for (i, spec) in specs.iter().enumerate() {
            if specs[..i].iter().any(|s| s.name == spec.name) {
                return Err(DatasetError::DuplicateFeature(spec.name.clone()));
            }
        }
        for (spec, col) in specs.iter().zip(&columns) {
            if col.len() != n {
                return Err(DatasetError::RaggedColumn {
                    column: spec.name.clone(),
                    expected: n,
                    actual: col.len(),
                });
            }
            for (row, v) in col.iter().enumerate() {
                if !v.is_finite() {
                    return Err(DatasetError::MissingValue {
                        column: spec.name.clone(),
                        row,
                    });
                }
                if spec.kind == Kind::Binary && *v != 0.0 && *v != 1.0 {
                    return Err(DatasetError::NonBinaryValue {
                        column: spec.name.clone(),
                        row,
                    });
                }
            }
        }
        let targets: Vec<&FeatureSpec> = specs.iter().filter(|s| s.role == Role::Target).collect();
        if targets.len() != 1 {
            return Err(DatasetError::TargetCount(targets.len()));
        }
        if targets[0].kind != Kind::Binary {
            return Err(DatasetError::NonBinaryTarget(targets[0].name.clone()));
        }
        let protected = specs.iter().filter(|s| s.role == Role::Protected).count();
        if protected > 1 {
            return Err(DatasetError::ProtectedCount(protected));
        }
        Ok(Self { specs, columns, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn specs(&self) -> &[FeatureSpec] {
        &self.specs
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.specs.iter().position(|s| s.name == name)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.position(name).map(|i| self.columns[i].as_slice())
    }

    fn role_position(&self, role: Role) -> Option<usize> {
        self.specs.iter().position(|s| s.role == role)
    }

    pub fn target_name(&self) -> &str {
        &self.specs[self.role_position(Role::Target).expect("validated")].name
    }

    /// Target labels, `true` for the positive class.
    pub fn labels(&self) -> Vec<bool> {
        let i = self.role_position(Role::Target).expect("validated");
        self.columns[i].iter().map(|&v| v == 1.0).collect()
    }

    pub fn protected_name(&self) -> Option<&str> {
        self.role_position(Role::Protected)
            .map(|i| self.specs[i].name.as_str())
    }

    /// Protected flags (`true` = protected), if a protected feature is set.
    pub fn protected_flags(&self) -> Option<Vec<bool>> {
        self.role_position(Role::Protected)
            .map(|i| self.columns[i].iter().map(|&v| v == 1.0).collect())
    }

    /// Indices (into `specs`) of the unprotected features, in schema order.
    pub fn unprotected_positions(&self) -> Vec<usize> {
        self.specs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.role == Role::Unprotected)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn unprotected_names(&self) -> Vec<String> {
        self.unprotected_positions()
            .into_iter()
            .map(|i| self.specs[i].name.clone())
            .collect()
    }

    /// Replaces a numeric feature by the binary indicator `value < threshold`
    /// and makes it the protected feature. Ties go to the unprotected side.
    pub fn binarize_protected(&self, feature: &str, threshold: f64) -> Result<Self, DatasetError> {
        let i = self
            .position(feature)
            .ok_or_else(|| DatasetError::UnknownFeature(feature.to_string()))?;
        let spec = &self.specs[i];
        if spec.role == Role::Target {
            return Err(DatasetError::IsTarget(feature.to_string()));
        }
        if spec.kind == Kind::Binary {
            return Err(DatasetError::AlreadyBinary(feature.to_string()));
        }
        let column = self.columns[i]
            .iter()
            .map(|&v| if v < threshold { 1.0 } else { 0.0 })
            .collect();
        self.with_protected_column(i, column)
    }

    /// Makes an existing binary feature the protected feature.
    pub fn mark_protected(&self, feature: &str) -> Result<Self, DatasetError> {
        let i = self
            .position(feature)
            .ok_or_else(|| DatasetError::UnknownFeature(feature.to_string()))?;
        let spec = &self.specs[i];
        if spec.role == Role::Target {
            return Err(DatasetError::IsTarget(feature.to_string()));
        }
        if spec.kind != Kind::Binary {
            return Err(DatasetError::NotBinary(feature.to_string()));
        }
        self.with_protected_column(i, self.columns[i].clone())
    }

    fn with_protected_column(&self, i: usize, column: Vec<f64>) -> Result<Self, DatasetError> {
        let mut specs = self.specs.clone();
        for s in specs.iter_mut() {
            if s.role == Role::Protected {
                s.role = Role::Unprotected;
            }
        }
        specs[i].role = Role::Protected;
        specs[i].kind = Kind::Binary;
        let mut columns = self.columns.clone();
        columns[i] = column;
        Self::new(specs, columns)
    }

    /// Sets the role of a non-target feature.
    pub fn with_role(&self, feature: &str, role: Role) -> Result<Self, DatasetError> {
        let i = self
            .position(feature)
            .ok_or_else(|| DatasetError::UnknownFeature(feature.to_string()))?;
        if self.specs[i].role == Role::Target || role == Role::Target {
            return Err(DatasetError::IsTarget(feature.to_string()));
        }
        let mut specs = self.specs.clone();
        specs[i].role = role;
        Self::new(specs, self.columns.clone())
    }

    /// Removes features from the table; the target cannot be dropped.
    pub fn drop_features(&self, names: &[&str]) -> Result<Self, DatasetError> {
        for name in names {
            let i = self
                .position(name)
                .ok_or_else(|| DatasetError::UnknownFeature(name.to_string()))?;
            if self.specs[i].role == Role::Target {
                return Err(DatasetError::IsTarget(name.to_string()));
            }
        }
        let (specs, columns) = self
            .specs
            .iter()
            .zip(&self.columns)
            .filter(|(s, _)| !names.contains(&s.name.as_str()))
            .map(|(s, c)| (s.clone(), c.clone()))
            .unzip();
        Self::new(specs, columns)
    }

    /// New dataset holding the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self, DatasetError> {
        if let Some(&row) = rows.iter().find(|&&r| r >= self.n) {
            return Err(DatasetError::RowOutOfRange { row, n: self.n });
        }
        let columns = self
            .columns
            .iter()
            .map(|c| rows.iter().map(|&r| c[r]).collect())
            .collect();
        Self::new(self.specs.clone(), columns)
    }

    /// Row values of the given feature positions.
    pub fn row(&self, row: usize, positions: &[usize]) -> Vec<f64> {
        positions.iter().map(|&p| self.columns[p][row]).collect()
    }

    /// Seeded uniform split of row indices into `(train, test)`, each sorted
    /// ascending. `train_fraction` of the rows (rounded) go to training.
    pub fn split_indices(
        &self,
        train_fraction: f64,
        seed: u64,
    ) -> Result<(Vec<usize>, Vec<usize>), DatasetError> {
        let n_train = libm::round(train_fraction * self.n as f64);
        if !(n_train >= 1.0 && n_train < self.n as f64) {
            return Err(DatasetError::BadSplit(train_fraction));
        }
        let n_train = n_train as usize;
        let mut order: Vec<usize> = (0..self.n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut train = order[..n_train].to_vec();
        let mut test = order[n_train..].to_vec();
        train.sort_unstable();
        test.sort_unstable();
        Ok((train, test))
    }
}
