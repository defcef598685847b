//! Versioned plain-text model files.
//!
//! ```text
//! fairgroup-model 1
//! kind=logistic
//! features=age,household_size
//! weights=0.5,-1.25
//! bias=0.125
//! mean=45.5,2.25
//! scale=15.1,1.2
//! ```
//!
//! Numbers are written in shortest round-trip form, so save then load is
//! exact.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use fairgroup_core::classifiers::Standardization;
use fairgroup_core::{ClassifierError, LinearModel, ModelKind};
use thiserror::Error;

pub const MAGIC: &str = "fairgroup-model";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("not a model file (expected `{MAGIC} {VERSION}` on the first line)")]
    BadHeader,
    #[error("unsupported model file version {0}")]
    Version(u32),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("key `{key}`: cannot parse `{value}` as a number")]
    Number { key: &'static str, value: String },
    #[error(transparent)]
    Model(#[from] ClassifierError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

pub fn to_text(m: &LinearModel) -> String {
    format!(
        "{MAGIC} {VERSION}\nkind={}\nfeatures={}\nweights={}\nbias={}\nmean={}\nscale={}\n",
        m.kind,
        m.features.join(","),
        join(&m.weights),
        m.bias,
        join(&m.standardization.mean),
        join(&m.standardization.scale),
    )
}

fn numbers(key: &'static str, raw: &str) -> Result<Vec<f64>, ModelFileError> {
    if raw.is_empty() {
        return Ok(Vec::new());
    }
    raw.split(',')
        .map(|v| {
            v.parse().map_err(|_| ModelFileError::Number {
                key,
                value: v.to_string(),
            })
        })
        .collect()
}

pub fn from_text(text: &str) -> Result<LinearModel, ModelFileError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(ModelFileError::BadHeader)?;
    let version = header
        .strip_prefix(MAGIC)
        .and_then(|v| v.trim().parse::<u32>().ok())
        .ok_or(ModelFileError::BadHeader)?;
    if version != VERSION {
        return Err(ModelFileError::Version(version));
    }
    let mut kv = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ModelFileError::Syntax {
            line: i + 2,
            msg: "expected key=value".into(),
        })?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &'static str| kv.get(k).map(String::as_str).ok_or(ModelFileError::MissingKey(k));
    let kind: ModelKind = get("kind")?.parse()?;
    let features_raw = get("features")?;
    let features = if features_raw.is_empty() {
        Vec::new()
    } else {
        features_raw.split(',').map(str::to_string).collect()
    };
    let bias = numbers("bias", get("bias")?)?;
    if bias.len() != 1 {
        return Err(ModelFileError::Number {
            key: "bias",
            value: get("bias")?.to_string(),
        });
    }
    Ok(LinearModel::from_parts(
        kind,
        features,
        numbers("weights", get("weights")?)?,
        bias[0],
        Standardization {
            mean: numbers("mean", get("mean")?)?,
            scale: numbers("scale", get("scale")?)?,
        },
    )?)
}

pub fn save_model(m: &LinearModel, path: &Path) -> Result<(), ModelFileError> {
    Ok(fs::write(path, to_text(m))?)
}

pub fn load_model(path: &Path) -> Result<LinearModel, ModelFileError> {
    from_text(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> LinearModel {
        LinearModel::from_parts(
            ModelKind::Svm,
            vec!["a".into(), "b".into()],
            vec![0.1 + 0.2, -1e-300],
            1.0 / 3.0,
            Standardization {
                mean: vec![45.123456789, 0.0],
                scale: vec![1.0, 7e10],
            },
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let m = model();
        assert_eq!(from_text(&to_text(&m)).unwrap(), m);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(from_text("hello"), Err(ModelFileError::BadHeader)));
        assert!(matches!(
            from_text("fairgroup-model 9\n"),
            Err(ModelFileError::Version(9))
        ));
        let text = to_text(&model()).replace("scale=1,70000000000", "scale=1");
        assert!(matches!(from_text(&text), Err(ModelFileError::Model(_))));
        let text = to_text(&model()).replace("kind=svm\n", "");
        assert!(matches!(from_text(&text), Err(ModelFileError::MissingKey("kind"))));
    }
}
