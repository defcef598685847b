//! Run artifacts and the diagnostic CSVs derived from them.
//!
//! `run` stores everything needed for an audit in `artifacts.json`;
//! `inspect` turns that file into four CSVs: per-feature correlations and
//! weights, per-point importance vectors, the clustering, and the fairgroup
//! plan.

use std::fs;
use std::path::{Path, PathBuf};

use fairgroup_core::{ExperimentOutcome, Provenance};
use serde_json::{json, Value};
use thiserror::Error;

pub const ARTIFACT_FILE: &str = "artifacts.json";

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("no run artifacts at {0}; run `fairgroup run --out <dir>` first")]
    MissingArtifact(PathBuf),
    #[error("corrupt artifact file: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn provenance(p: &Provenance) -> String {
    match p {
        Provenance::Representative(g) => format!("representative:{g}"),
        Provenance::Propagated(g) => format!("propagated:{g}"),
        Provenance::Individual => "individual".into(),
    }
}

/// JSON document describing the fairgroup branch of a run.
pub fn to_json(o: &ExperimentOutcome, protected: &[bool]) -> Value {
    let m = &o.importance;
    json!({
        "features": m.features,
        "correlations": m.correlations,
        "weights": m.weights,
        "test_rows": o.test_rows,
        "ranks": m.ranks,
        "importance": m.importance,
        "k": o.clustering.k,
        "assignment": o.clustering.assignment,
        "point_costs": o.clustering.point_costs,
        "centers": o.clustering.centers,
        "ratio": [o.plan.ratio.p(), o.plan.ratio.q()],
        "groups": o.plan.groups.iter().map(|g| json!({"cluster": g.cluster, "members": g.members})).collect::<Vec<_>>(),
        "unmatched": o.plan.unmatched,
        "protected": protected,
        "baseline_labels": o.baseline_labels,
        "fair_labels": o.prediction.labels,
        "provenance": o.prediction.provenance.iter().map(provenance).collect::<Vec<_>>(),
    })
}

pub fn write(dir: &Path, o: &ExperimentOutcome, protected: &[bool]) -> Result<(), ArtifactError> {
    fs::write(dir.join(ARTIFACT_FILE), to_json(o, protected).to_string())?;
    Ok(())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>, ArtifactError> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| ArtifactError::Corrupt(format!("missing array `{key}`")))
}

fn uints(v: &Value, key: &str) -> Result<Vec<u64>, ArtifactError> {
    field(v, key)?
        .iter()
        .map(|x| x.as_u64().ok_or_else(|| ArtifactError::Corrupt(format!("`{key}` holds a non-integer"))))
        .collect()
}

fn floats(v: &Value, key: &str) -> Result<Vec<f64>, ArtifactError> {
    field(v, key)?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| ArtifactError::Corrupt(format!("`{key}` holds a non-number"))))
        .collect()
}

fn bools(v: &Value, key: &str) -> Result<Vec<bool>, ArtifactError> {
    field(v, key)?
        .iter()
        .map(|x| x.as_bool().ok_or_else(|| ArtifactError::Corrupt(format!("`{key}` holds a non-boolean"))))
        .collect()
}

fn strings(v: &Value, key: &str) -> Result<Vec<String>, ArtifactError> {
    field(v, key)?
        .iter()
        .map(|x| {
            x.as_str()
                .map(String::from)
                .ok_or_else(|| ArtifactError::Corrupt(format!("`{key}` holds a non-string")))
        })
        .collect()
}

/// Names of the CSVs written by [`inspect`].
pub const CSV_FILES: [&str; 4] = [
    "features.csv",
    "importance.csv",
    "clustering.csv",
    "fairgroups.csv",
];

/// Reads `run_dir/artifacts.json` and writes the diagnostic CSVs into
/// `dest`. Returns the written paths.
pub fn inspect(run_dir: &Path, dest: &Path) -> Result<Vec<PathBuf>, ArtifactError> {
    let path = run_dir.join(ARTIFACT_FILE);
    if !path.is_file() {
        return Err(ArtifactError::MissingArtifact(path));
    }
    let v: Value = serde_json::from_str(&fs::read_to_string(&path)?)?;
    let features = strings(&v, "features")?;
    let correlations = floats(&v, "correlations")?;
    let weights = uints(&v, "weights")?;
    let test_rows = uints(&v, "test_rows")?;
    let ranks = uints(&v, "ranks")?;
    let importance = uints(&v, "importance")?;
    let assignment = uints(&v, "assignment")?;
    let costs = floats(&v, "point_costs")?;
    let unmatched = uints(&v, "unmatched")?;
    let protected = bools(&v, "protected")?;
    let baseline = bools(&v, "baseline_labels")?;
    let fair = bools(&v, "fair_labels")?;
    let prov = strings(&v, "provenance")?;
    let n = test_rows.len();
    let dim = features.len();
    let consistent = correlations.len() == dim
        && weights.len() == dim
        && ranks.len() == n * dim
        && importance.len() == n * dim
        && [assignment.len(), costs.len(), protected.len(), baseline.len(), fair.len(), prov.len()]
            .iter()
            .all(|&l| l == n);
    if !consistent {
        return Err(ArtifactError::Corrupt("array lengths disagree".into()));
    }

    let mut group_of: Vec<Option<usize>> = vec![None; n];
    for (g, group) in field(&v, "groups")?.iter().enumerate() {
        for m in uints(group, "members")? {
            let m = m as usize;
            if m >= n || group_of[m].is_some() {
                return Err(ArtifactError::Corrupt(format!("bad member {m} in group {g}")));
            }
            group_of[m] = Some(g);
        }
    }
    for &u in &unmatched {
        let u = u as usize;
        if u >= n || group_of[u].is_some() {
            return Err(ArtifactError::Corrupt(format!("bad unmatched point {u}")));
        }
    }

    fs::create_dir_all(dest)?;
    let mut written = Vec::new();
    let mut open = |name: &str| -> Result<csv::Writer<fs::File>, ArtifactError> {
        let p = dest.join(name);
        written.push(p.clone());
        Ok(csv::Writer::from_path(p)?)
    };

    let mut w = open(CSV_FILES[0])?;
    w.write_record(["feature", "correlation", "weight"])?;
    for i in 0..dim {
        w.write_record([features[i].clone(), correlations[i].to_string(), weights[i].to_string()])?;
    }
    w.flush()?;

    let mut w = open(CSV_FILES[1])?;
    let mut header = vec!["point".to_string(), "row".to_string()];
    header.extend(features.iter().map(|f| format!("rank_{f}")));
    header.extend(features.iter().map(|f| format!("importance_{f}")));
    w.write_record(&header)?;
    for j in 0..n {
        let mut rec = vec![j.to_string(), test_rows[j].to_string()];
        rec.extend(ranks[j * dim..(j + 1) * dim].iter().map(u64::to_string));
        rec.extend(importance[j * dim..(j + 1) * dim].iter().map(u64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;

    let mut w = open(CSV_FILES[2])?;
    w.write_record(["point", "cluster", "distance"])?;
    for j in 0..n {
        w.write_record([j.to_string(), assignment[j].to_string(), costs[j].to_string()])?;
    }
    w.flush()?;

    let mut w = open(CSV_FILES[3])?;
    w.write_record([
        "point",
        "cluster",
        "fairgroup",
        "protected",
        "baseline_label",
        "fair_label",
        "provenance",
    ])?;
    for j in 0..n {
        w.write_record([
            j.to_string(),
            assignment[j].to_string(),
            group_of[j].map_or_else(|| "unmatched".to_string(), |g| g.to_string()),
            u8::from(protected[j]).to_string(),
            u8::from(baseline[j]).to_string(),
            u8::from(fair[j]).to_string(),
            prov[j].clone(),
        ])?;
    }
    w.flush()?;
    Ok(written)
}
