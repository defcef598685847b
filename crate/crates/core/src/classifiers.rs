//! Linear baseline classifiers: ridge regression, logistic regression and a
//! linear SVM, all trained on standardized unprotected features.
//!
//! Training is full-batch and deterministic. Rows are put into a canonical
//! order before any accumulation, so permuting the training rows yields a
//! bit-identical model.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::dataset::Dataset;
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Linear,
    Logistic,
    Svm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Linear, ModelKind::Logistic, ModelKind::Svm];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Linear => "linear",
            ModelKind::Logistic => "logistic",
            ModelKind::Svm => "svm",
        }
    }

    /// Score at or above which a point is labeled positive.
    pub fn threshold(self) -> f64 {
        match self {
            ModelKind::Linear | ModelKind::Logistic => 0.5,
            ModelKind::Svm => 0.0,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = ClassifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(ModelKind::Linear),
            "logistic" => Ok(ModelKind::Logistic),
            "svm" => Ok(ModelKind::Svm),
            other => Err(ClassifierError::UnknownKind(other.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifierError {
    #[error("all training targets are identical; refusing to train")]
    DegenerateData,
    #[error("training needs at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("training loss became non-finite at epoch {epoch}; lower the learning rate")]
    NonFiniteLoss { epoch: usize },
    #[error("normal equations are singular; add l2 regularization")]
    Singular,
    #[error("dataset features {found:?} do not match the model schema {expected:?}")]
    SchemaMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("invalid training config: {0}")]
    InvalidConfig(&'static str),
    #[error("unknown classifier kind `{0}`")]
    UnknownKind(String),
    #[error("inconsistent model parameters: {0}")]
    InvalidModel(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub kind: ModelKind,
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    /// Weight of the mean hinge loss; only read by the SVM trainer.
    pub svm_cost: f64,
    /// Recorded with the model. The shipped trainers are full-batch and draw
    /// no randomness.
    pub seed: u64,
}

impl TrainConfig {
    /// Shipped defaults for `kind`.
    pub fn new(kind: ModelKind) -> Self {
        let (learning_rate, epochs, l2) = match kind {
            ModelKind::Linear => (1.0, 1, 1e-6),
            ModelKind::Logistic => (1.0, 1000, 1e-4),
            ModelKind::Svm => (5.0, 1000, 1e-4),
        };
        Self {
            kind,
            learning_rate,
            epochs,
            l2,
            svm_cost: 1.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(ClassifierError::InvalidConfig("learning rate must be positive"));
        }
        if self.epochs == 0 {
            return Err(ClassifierError::InvalidConfig("epochs must be at least 1"));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(ClassifierError::InvalidConfig("l2 must be nonnegative"));
        }
        if !(self.svm_cost > 0.0 && self.svm_cost.is_finite()) {
            return Err(ClassifierError::InvalidConfig("svm margin cost must be positive"));
        }
        Ok(())
    }
}

/// Per-feature `(x - mean) / scale` captured at training time.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

/// A trained linear model over the unprotected features named in `features`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub kind: ModelKind,
    pub features: Vec<String>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub standardization: Standardization,
}

/// Standardized design matrix (row-major) with 0/1 targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub dim: usize,
    pub rows: Vec<f64>,
    pub targets: Vec<f64>,
}

impl Design {
    pub fn n(&self) -> usize {
        self.targets.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + libm::log1p(libm::exp(-libm::fabs(z)))
}

/// Training objectives and their (sub)gradients. `params` holds the weights
/// followed by the bias; the bias is never regularized.
pub mod objective {
    use super::*;

    /// Mean log-loss plus `l2/2 * |w|^2`.
    pub fn logistic(design: &Design, params: &[f64], l2: f64) -> (f64, Vec<f64>) {
        let dim = design.dim;
        let (w, b) = (&params[..dim], params[dim]);
        let n = design.n() as f64;
        let mut loss = 0.0;
        let mut grad = vec![0.0; dim + 1];
        for i in 0..design.n() {
            let x = design.row(i);
            let y = design.targets[i];
            let z = dot(w, x) + b;
            loss += softplus(z) - y * z;
            let r = sigmoid(z) - y;
            for (g, xi) in grad[..dim].iter_mut().zip(x) {
                *g += r * xi;
            }
            grad[dim] += r;
        }
        loss /= n;
        for g in grad.iter_mut() {
            *g /= n;
        }
        loss += 0.5 * l2 * dot(w, w);
        for (g, wi) in grad[..dim].iter_mut().zip(w) {
            *g += l2 * wi;
        }
        (loss, grad)
    }

    /// `l2/2 * |w|^2 + cost * mean(max(0, 1 - s (w.x + b)))` with `s = ±1`.
    /// Examples sitting exactly on the margin contribute a zero subgradient.
    pub fn svm(design: &Design, params: &[f64], l2: f64, cost: f64) -> (f64, Vec<f64>) {
        let dim = design.dim;
        let (w, b) = (&params[..dim], params[dim]);
        let n = design.n() as f64;
        let mut hinge = 0.0;
        let mut grad = vec![0.0; dim + 1];
        for i in 0..design.n() {
            let x = design.row(i);
            let s = if design.targets[i] == 1.0 { 1.0 } else { -1.0 };
            let margin = s * (dot(w, x) + b);
            if margin < 1.0 {
                hinge += 1.0 - margin;
                for (g, xi) in grad[..dim].iter_mut().zip(x) {
                    *g -= s * xi;
                }
                grad[dim] -= s;
            }
        }
        let scale = cost / n;
        for g in grad.iter_mut() {
            *g *= scale;
        }
        for (g, wi) in grad[..dim].iter_mut().zip(w) {
            *g += l2 * wi;
        }
        (0.5 * l2 * dot(w, w) + scale * hinge, grad)
    }
}

struct Prepared {
    design: Design,
    standardization: Standardization,
    constant: Vec<bool>,
}

fn prepare(d: &Dataset) -> Result<Prepared, ClassifierError> {
    let n = d.len();
    if n < 2 {
        return Err(ClassifierError::TooFewRows(n));
    }
    let labels = d.labels();
    if labels.iter().all(|&l| l == labels[0]) {
        return Err(ClassifierError::DegenerateData);
    }
    let positions = d.unprotected_positions();
    let dim = positions.len();

    // canonical row order: lexicographic on (features, target)
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|r| {
            let mut row = d.row(r, &positions);
            row.push(if labels[r] { 1.0 } else { 0.0 });
            row
        })
        .collect();
    rows.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    });

    let nf = n as f64;
    let mut mean = vec![0.0; dim];
    let mut scale = vec![1.0; dim];
    let mut constant = vec![false; dim];
    for j in 0..dim {
        let first = rows[0][j];
        if rows.iter().all(|r| r[j] == first) {
            mean[j] = first;
            constant[j] = true;
            continue;
        }
        let m = rows.iter().map(|r| r[j]).sum::<f64>() / nf;
        let var = rows.iter().map(|r| (r[j] - m) * (r[j] - m)).sum::<f64>() / nf;
        mean[j] = m;
        scale[j] = libm::sqrt(var);
    }

    let mut flat = Vec::with_capacity(n * dim);
    let mut targets = Vec::with_capacity(n);
    for r in &rows {
        for j in 0..dim {
            flat.push(if constant[j] { 0.0 } else { (r[j] - mean[j]) / scale[j] });
        }
        targets.push(r[dim]);
    }
    Ok(Prepared {
        design: Design {
            dim,
            rows: flat,
            targets,
        },
        standardization: Standardization { mean, scale },
        constant,
    })
}

fn fit_linear(p: &Prepared, l2: f64) -> Result<Vec<f64>, ClassifierError> {
    // normal equations over the active columns plus an unpenalized intercept
    let active: Vec<usize> = (0..p.design.dim).filter(|&j| !p.constant[j]).collect();
    let m = active.len() + 1;
    let n = p.design.n() as f64;
    let mut a = vec![0.0; m * m];
    let mut b = vec![0.0; m];
    let mut z = vec![0.0; m];
    for i in 0..p.design.n() {
        let row = p.design.row(i);
        for (k, &j) in active.iter().enumerate() {
            z[k] = row[j];
        }
        z[m - 1] = 1.0;
        let y = p.design.targets[i];
        for r in 0..m {
            b[r] += z[r] * y;
            for c in 0..m {
                a[r * m + c] += z[r] * z[c];
            }
        }
    }
    for v in a.iter_mut().chain(b.iter_mut()) {
        *v /= n;
    }
    for k in 0..active.len() {
        a[k * m + k] += l2;
    }
    let solution = linalg::solve(a, b, m).ok_or(ClassifierError::Singular)?;
    let mut params = vec![0.0; p.design.dim + 1];
    for (k, &j) in active.iter().enumerate() {
        params[j] = solution[k];
    }
    params[p.design.dim] = solution[m - 1];
    Ok(params)
}

fn fit_logistic(p: &Prepared, cfg: &TrainConfig, history: &mut Vec<f64>) -> Result<Vec<f64>, ClassifierError> {
    let dim = p.design.dim;
    let mut params = vec![0.0; dim + 1];
    for epoch in 0..cfg.epochs {
        let (loss, grad) = objective::logistic(&p.design, &params, cfg.l2);
        if !loss.is_finite() {
            return Err(ClassifierError::NonFiniteLoss { epoch });
        }
        history.push(loss);
        for (w, g) in params.iter_mut().zip(&grad) {
            *w -= cfg.learning_rate * g;
        }
        for j in (0..dim).filter(|&j| p.constant[j]) {
            params[j] = 0.0;
        }
    }
    let (loss, _) = objective::logistic(&p.design, &params, cfg.l2);
    if !loss.is_finite() {
        return Err(ClassifierError::NonFiniteLoss { epoch: cfg.epochs });
    }
    history.push(loss);
    Ok(params)
}

fn fit_svm(p: &Prepared, cfg: &TrainConfig, history: &mut Vec<f64>) -> Result<Vec<f64>, ClassifierError> {
    let dim = p.design.dim;
    let mut params = vec![0.0; dim + 1];
    let mut best = (f64::INFINITY, params.clone());
    for epoch in 0..=cfg.epochs {
        let (obj, grad) = objective::svm(&p.design, &params, cfg.l2, cfg.svm_cost);
        if !obj.is_finite() {
            return Err(ClassifierError::NonFiniteLoss { epoch });
        }
        history.push(obj);
        if obj < best.0 {
            best = (obj, params.clone());
        }
        if epoch == cfg.epochs {
            break;
        }
        // subgradient steps are not monotone; the best iterate is kept
        let step = cfg.learning_rate / libm::sqrt((epoch + 1) as f64);
        for (w, g) in params.iter_mut().zip(&grad) {
            *w -= step * g;
        }
        for j in (0..dim).filter(|&j| p.constant[j]) {
            params[j] = 0.0;
        }
    }
    Ok(best.1)
}

/// Trains on the unprotected features of `d` against its target.
pub fn train(d: &Dataset, cfg: &TrainConfig) -> Result<LinearModel, ClassifierError> {
    train_with_history(d, cfg).map(|(m, _)| m)
}

/// Like [`train`], also returning the objective value per epoch (empty for
/// the closed-form linear kind).
pub fn train_with_history(
    d: &Dataset,
    cfg: &TrainConfig,
) -> Result<(LinearModel, Vec<f64>), ClassifierError> {
    cfg.validate()?;
    let prepared = prepare(d)?;
    let mut history = Vec::new();
    let params = match cfg.kind {
        ModelKind::Linear => fit_linear(&prepared, cfg.l2)?,
        ModelKind::Logistic => fit_logistic(&prepared, cfg, &mut history)?,
        ModelKind::Svm => fit_svm(&prepared, cfg, &mut history)?,
    };
    let dim = prepared.design.dim;
    let model = LinearModel {
        kind: cfg.kind,
        features: d.unprotected_names(),
        weights: params[..dim].to_vec(),
        bias: params[dim],
        standardization: prepared.standardization,
    };
    Ok((model, history))
}

/// Standardized design of `d` in canonical row order, as seen by the
/// trainers. Exposed for gradient checks and diagnostics.
pub fn design(d: &Dataset) -> Result<Design, ClassifierError> {
    prepare(d).map(|p| p.design)
}

impl LinearModel {
    pub fn from_parts(
        kind: ModelKind,
        features: Vec<String>,
        weights: Vec<f64>,
        bias: f64,
        standardization: Standardization,
    ) -> Result<Self, ClassifierError> {
        let dim = features.len();
        if weights.len() != dim
            || standardization.mean.len() != dim
            || standardization.scale.len() != dim
        {
            return Err(ClassifierError::InvalidModel("parameter lengths differ"));
        }
        if standardization.scale.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(ClassifierError::InvalidModel("scale entries must be positive"));
        }
        if weights.iter().chain(&standardization.mean).any(|v| !v.is_finite()) || !bias.is_finite() {
            return Err(ClassifierError::InvalidModel("non-finite parameter"));
        }
        Ok(Self {
            kind,
            features,
            weights,
            bias,
            standardization,
        })
    }

    /// Pre-threshold score of one raw feature row (schema order).
    pub fn score_row(&self, raw: &[f64]) -> f64 {
        let Standardization { mean, scale } = &self.standardization;
        let z = self
            .weights
            .iter()
            .zip(raw)
            .zip(mean.iter().zip(scale))
            .map(|((w, x), (m, s))| w * (x - m) / s)
            .sum::<f64>()
            + self.bias;
        match self.kind {
            ModelKind::Logistic => sigmoid(z),
            ModelKind::Linear | ModelKind::Svm => z,
        }
    }

    pub fn label_of(&self, score: f64) -> bool {
        score >= self.kind.threshold()
    }

    fn check_schema(&self, d: &Dataset) -> Result<Vec<usize>, ClassifierError> {
        let found = d.unprotected_names();
        if found != self.features {
            return Err(ClassifierError::SchemaMismatch {
                expected: self.features.clone(),
                found,
            });
        }
        Ok(d.unprotected_positions())
    }

    /// Raw scores: regression output, probability, or SVM margin.
    pub fn score(&self, d: &Dataset) -> Result<Vec<f64>, ClassifierError> {
        let positions = self.check_schema(d)?;
        Ok((0..d.len())
            .map(|r| self.score_row(&d.row(r, &positions)))
            .collect())
    }

    /// Labels; scores exactly at the threshold go to the positive class.
    pub fn predict(&self, d: &Dataset) -> Result<Vec<bool>, ClassifierError> {
        Ok(self.score(d)?.into_iter().map(|s| self.label_of(s)).collect())
    }
}
