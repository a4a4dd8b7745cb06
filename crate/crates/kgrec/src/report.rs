//! CSV and JSON renderings of a cohort experiment.

use kgrec_core::diagnosis::CohortReport;
use serde_json::json;

fn labels(removed: &std::collections::BTreeSet<kgrec_core::recommender::ConstraintLabel>) -> String {
    removed.iter().map(|l| l.name()).collect::<Vec<_>>().join("+")
}

/// One row per diagnosis set: its name, the removed labels, one user
/// count per bucket, then the consistency rate.
pub fn report_csv(r: &CohortReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["set".to_string(), "removed".to_string()];
    header.extend(r.buckets.buckets().iter().map(|b| b.to_string()));
    header.extend(["consistent".to_string(), "rate".to_string()]);
    w.write_record(&header).expect("in-memory csv");
    for row in &r.rows {
        let mut rec = vec![row.name.clone(), labels(&row.removed)];
        rec.extend(row.histogram.iter().map(|n| n.to_string()));
        rec.push(row.consistent.to_string());
        rec.push(format!("{:.4}", row.rate()));
        w.write_record(&rec).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
}

/// Per-user solution counts, one column per diagnosis set.
pub fn user_counts_csv(r: &CohortReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["user_id".to_string()];
    header.extend(r.rows.iter().map(|row| row.name.clone()));
    w.write_record(&header).expect("in-memory csv");
    for u in &r.users {
        let mut rec = vec![u.user_id.clone()];
        rec.extend(u.counts.iter().map(|n| n.to_string()));
        w.write_record(&rec).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
}

pub fn report_json(r: &CohortReport) -> String {
    let rows: Vec<_> = r
        .rows
        .iter()
        .map(|row| {
            json!({
                "set": row.name,
                "removed": row.removed.iter().map(|l| l.name()).collect::<Vec<_>>(),
                "histogram": row.histogram,
                "consistent": row.consistent,
                "users": row.users(),
                "rate": (row.rate() * 10_000.0).round() / 10_000.0,
            })
        })
        .collect();
    let users: Vec<_> = r.users.iter().map(|u| json!({ "user_id": u.user_id, "counts": u.counts })).collect();
    let doc = json!({
        "buckets": r.buckets.buckets().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "rows": rows,
        "users": users,
        "filter_errors": r.filter_errors,
    });
    serde_json::to_string_pretty(&doc).expect("json values serialize") + "\n"
}
