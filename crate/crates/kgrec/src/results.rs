//! JSON and CSV renderings of query results and recommendations.

use kgrec_core::query::QueryResults;
use kgrec_core::recommender::Recommendation;
use kgrec_core::Node;
use serde::Serialize;
use serde_json::{json, Map, Value};

/// Terms are written in N-Triples form, so IRIs keep their angle brackets
/// and typed literals their datatype.
fn term(n: &Node) -> String {
    n.to_string()
}

pub fn results_json(r: &QueryResults) -> String {
    let rows: Vec<Value> = r
        .solutions
        .iter()
        .map(|s| {
            let mut m = Map::new();
            for v in &r.variables {
                if let Some(n) = s.get(v) {
                    m.insert(v.name().to_string(), Value::String(term(n)));
                }
            }
            Value::Object(m)
        })
        .collect();
    let doc = json!({
        "variables": r.variables.iter().map(|v| v.name()).collect::<Vec<_>>(),
        "solutions": rows,
        "filter_errors": r.diagnostics.filter_errors,
    });
    serde_json::to_string_pretty(&doc).expect("json values serialize") + "\n"
}

/// One column per selected variable; unbound cells are empty.
pub fn results_csv(r: &QueryResults) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(r.variables.iter().map(|v| v.name())).expect("in-memory csv");
    for s in &r.solutions {
        w.write_record(r.variables.iter().map(|v| s.get(v).map(term).unwrap_or_default())).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
}

#[derive(Serialize)]
struct RecommendationRecord<'a> {
    user_id: &'a str,
    items: Vec<&'a str>,
    count: usize,
}

/// `{user_id, items, count}` with bare item IRIs.
pub fn recommendation_json(r: &Recommendation) -> String {
    let rec = RecommendationRecord {
        user_id: &r.user_id,
        items: r.items.iter().map(|i| i.as_str()).collect(),
        count: r.count,
    };
    serde_json::to_string_pretty(&rec).expect("records serialize") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use kgrec_core::query::{execute, parse_query};
    use kgrec_core::Graph;

    #[test]
    fn csv_and_json_agree_on_rows() {
        let g: Graph =
            crate::ntriples::load_ntriples("<u:a> <u:p> \"x, y\" .\n<u:b> <u:p> \"2\"^^<xsd:integer> .\n").unwrap();
        let r = execute(&g, &parse_query("SELECT ?s ?o WHERE { ?s <u:p> ?o }").unwrap());
        let csv = results_csv(&r);
        assert_eq!(
            csv,
            "s,o\n<u:b>,\"\"\"2\"\"^^<http://www.w3.org/2001/XMLSchema#integer>\"\n<u:a>,\"\"\"x, y\"\"\"\n"
        );
        let v: Value = serde_json::from_str(&results_json(&r)).unwrap();
        assert_eq!(v["solutions"].as_array().unwrap().len(), 2);
        assert_eq!(v["solutions"][1]["s"], "<u:a>");
    }
}
