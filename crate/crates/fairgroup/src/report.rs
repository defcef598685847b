//! Human- and machine-readable experiment reports.

use std::fmt::Write as _;

use fairgroup_core::{ExperimentOutcome, FairnessReport, ModelKind};
use serde_json::json;
use sha2::{Digest, Sha256};

/// SHA-256 of the rendered effective config, hex encoded.
pub fn config_hash(rendered: &str) -> String {
    hex::encode(Sha256::digest(rendered.as_bytes()))
}

pub fn method_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Linear => "Linear Regression",
        ModelKind::Logistic => "Logistic Regression",
        ModelKind::Svm => "SVM",
    }
}

pub fn fair_method_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Linear => "Linear + Fairgroup",
        ModelKind::Logistic => "Logistic + Fairgroup",
        ModelKind::Svm => "SVM + Fairgroup",
    }
}

/// Two-row comparison table. "% of Poverty" is the protected share among
/// predicted positives on the test split.
pub fn table(kind: ModelKind, o: &ExperimentOutcome) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<22} {:>12} {:>9}", "Method", "% of Poverty", "Accuracy");
    for (name, r) in [
        (method_name(kind), &o.baseline),
        (fair_method_name(kind), &o.fair),
    ] {
        let _ = writeln!(
            s,
            "{:<22} {:>12.1} {:>9.1}",
            name, r.protected_share_positive, r.accuracy
        );
    }
    s
}

fn kv(s: &mut String, prefix: &str, r: &FairnessReport) {
    let _ = writeln!(s, "{prefix}.n={}", r.n);
    let _ = writeln!(s, "{prefix}.positives={}", r.positives);
    let _ = writeln!(s, "{prefix}.accuracy={}", r.accuracy);
    let _ = writeln!(s, "{prefix}.protected_share_positive={}", r.protected_share_positive);
    let _ = writeln!(s, "{prefix}.positive_class_balance={}", r.positive_class_balance);
    let _ = writeln!(s, "{prefix}.negative_class_balance={}", r.negative_class_balance);
    let _ = writeln!(s, "{prefix}.alpha_fair_negative={}", r.alpha_fair[0]);
    let _ = writeln!(s, "{prefix}.alpha_fair_positive={}", r.alpha_fair[1]);
    let _ = writeln!(s, "{prefix}.degenerate={}", r.degenerate);
}

/// Flat `key=value` report followed by the effective config and the table.
pub fn text(kind: ModelKind, o: &ExperimentOutcome, rendered_config: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# fairgroup report (test split)");
    let _ = writeln!(s, "config_hash={}", config_hash(rendered_config));
    let _ = writeln!(s, "ratio={}", o.plan.ratio);
    let _ = writeln!(s, "alpha={}", o.fair.alpha);
    let _ = writeln!(s, "train_n={}", o.train_rows.len());
    let _ = writeln!(s, "test_n={}", o.test_rows.len());
    let _ = writeln!(s, "groups={}", o.plan.groups.len());
    let _ = writeln!(s, "unmatched={}", o.plan.unmatched.len());
    let _ = writeln!(s, "clustering.iterations={}", o.clustering.iterations);
    let _ = writeln!(s, "clustering.cost={}", o.clustering.cost);
    kv(&mut s, "baseline", &o.baseline);
    kv(&mut s, "fairgroup", &o.fair);
    let _ = writeln!(s, "\n# effective config");
    s.push_str(rendered_config);
    let _ = writeln!(s);
    s.push_str(&table(kind, o));
    s
}

fn report_json(r: &FairnessReport) -> serde_json::Value {
    json!({
        "n": r.n,
        "positives": r.positives,
        "accuracy": r.accuracy,
        "protected_share_positive": r.protected_share_positive,
        "positive_class_balance": r.positive_class_balance,
        "negative_class_balance": r.negative_class_balance,
        "alpha_fair_negative": r.alpha_fair[0],
        "alpha_fair_positive": r.alpha_fair[1],
        "degenerate": r.degenerate,
    })
}

/// One-line JSON record with sorted keys.
pub fn record(kind: ModelKind, o: &ExperimentOutcome, rendered_config: &str) -> String {
    json!({
        "config_hash": config_hash(rendered_config),
        "classifier": kind.as_str(),
        "ratio": o.plan.ratio.to_string(),
        "alpha": o.fair.alpha,
        "train_n": o.train_rows.len(),
        "test_n": o.test_rows.len(),
        "groups": o.plan.groups.len(),
        "unmatched": o.plan.unmatched.len(),
        "baseline": report_json(&o.baseline),
        "fairgroup": report_json(&o.fair),
        "share_gain": o.fair.protected_share_positive - o.baseline.protected_share_positive,
        "accuracy_drop": o.baseline.accuracy - o.fair.accuracy,
    })
    .to_string()
}
