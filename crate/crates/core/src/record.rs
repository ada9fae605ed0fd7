//! JSON output records.
//!
//! Every record has `"schema": 1` and a `"kind"`. Big integers are decimal
//! strings. Objects are `serde_json` maps, which keep keys sorted, so equal
//! inputs give byte-identical output.

use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::abelian::ledger::{DerivationReport, Outcome};
use crate::classifier::{case_row, citation, CaseRow, Status, Verdict};
use crate::invariants::{sullivan_data, wu_profile, Multidegree, SullivanData};
use crate::search::{CollisionReport, SearchError, SearchSpec, SearchStats, COMPLETENESS_NOTE};

pub const SCHEMA: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("missing or malformed field {0:?}")]
    Field(&'static str),
    #[error("unsupported schema version {0}")]
    Schema(Value),
}

fn record(kind: &str, mut body: Map<String, Value>) -> Value {
    body.insert("schema".into(), json!(SCHEMA));
    body.insert("kind".into(), json!(kind));
    Value::Object(body)
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("json! object literal"),
    }
}

fn big(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

fn bigs(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(big).collect())
}

fn bit(b: bool) -> Value {
    json!(u8::from(b))
}

pub fn sullivan_data_value(sd: &SullivanData) -> Value {
    json!({
        "n": sd.n,
        "total_degree": big(&sd.total_degree),
        "pontryagin": bigs(&sd.pontryagin),
        "euler": big(&sd.euler),
    })
}

/// Record for `sd`. For `n = 4` it includes the Wu profile.
pub fn sd_record(n: u32, md: &Multidegree, classical_signs: bool) -> Value {
    let sd = sullivan_data(n, md);
    let mut body = object(json!({
        "multidegree": md.to_string(),
        "k": md.k(),
        "sullivan_data": sullivan_data_value(&sd),
    }));
    if classical_signs {
        body.insert("classical_pontryagin".into(), bigs(&sd.classical_pontryagin()));
    }
    if n == 4 {
        let wu = wu_profile(md);
        body.insert(
            "wu".into(),
            json!({
                "even_degrees": wu.p_count,
                "w2_nu": bit(wu.w2_nu),
                "w4_nu": bit(wu.w4_nu),
                "w4": bit(wu.w4_x),
                "v2": bit(wu.v2),
                "v4": bit(wu.v4),
                "spin": wu.is_spin(),
                "citation": citation::WU,
            }),
        );
    }
    record("sd", body)
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Diffeomorphic => "Diffeomorphic",
        Status::NotDiffeomorphic => "NotDiffeomorphic",
        Status::HomeomorphicOnly => "HomeomorphicOnly",
        Status::SDEqualConjectural => "SDEqualConjectural",
        Status::Unsupported => "Unsupported",
    }
}

fn case_row_value(row: &CaseRow) -> Value {
    let mut m = object(json!({
        "v2": bit(row.v2),
        "v4": bit(row.v4),
        "d_odd": row.d_odd,
        "p1_mod8": row.p1_mod8,
        "rigidity": format!("{:?}", row.rigidity),
        "rigidity_citation": row.rigidity_source,
        "treated_in": row.treated_in,
    }));
    if row.is_conjecture {
        m.insert("conjecture".into(), json!(true));
    }
    Value::Object(m)
}

pub fn classify_record(n: u32, a: &Multidegree, b: &Multidegree, verdict: &Verdict) -> Value {
    let status = status_name(verdict.status);
    let mut body = object(json!({
        "n": n,
        "a": a.to_string(),
        "b": b.to_string(),
        "status": status,
        "citation": verdict.justification,
        "verdict": format!("{status} ({})", verdict.justification),
        "sd_equal": verdict.sd_equal,
        "sd_a": sullivan_data_value(&sullivan_data(n, a)),
        "sd_b": sullivan_data_value(&sullivan_data(n, b)),
    }));
    if verdict.status == Status::SDEqualConjectural {
        body.insert("conjecture".into(), json!(true));
    }
    if let Some(row) = &verdict.case_row {
        body.insert("case_row".into(), case_row_value(row));
    }
    if let Some(note) = verdict.note {
        body.insert("note".into(), json!(note));
    }
    record("classify", body)
}

pub fn rigidity_record(md: &Multidegree) -> Value {
    let row = case_row(md);
    let mut body = object(case_row_value(&row));
    body.insert("multidegree".into(), json!(md.to_string()));
    body.insert("status".into(), json!(format!("{:?}", row.rigidity)));
    body.insert("citation".into(), json!(row.rigidity_source));
    record("rigidity", body)
}

/// The spec without the shard count, which must not affect output.
fn spec_value(spec: &SearchSpec) -> Value {
    json!({
        "n": spec.n,
        "max_degree": spec.max_degree,
        "max_k": spec.max_k,
        "total_degree_target": spec.total_degree_target.as_ref().map(big),
        "limit": spec.limit,
    })
}

fn stats_value(stats: &SearchStats) -> Value {
    serde_json::to_value(stats).expect("plain struct")
}

/// Search record; `list` adds the enumerated multidegrees.
pub fn search_record(report: &CollisionReport, list: bool) -> Value {
    let pairs: Vec<Value> = report
        .pairs
        .iter()
        .map(|c| {
            json!({
                "a": c.a.to_string(),
                "b": c.b.to_string(),
                "sullivan_data": sullivan_data_value(&c.data),
            })
        })
        .collect();
    let mut body = object(json!({
        "spec": spec_value(&report.spec),
        "stats": stats_value(&report.stats),
        "pairs": pairs,
        "completeness": COMPLETENESS_NOTE,
    }));
    if list {
        let all: Vec<String> = report.enumerated.iter().map(ToString::to_string).collect();
        body.insert("multidegrees".into(), json!(all));
    }
    record("search", body)
}

/// Record for a search that stopped early.
pub fn search_error_record(spec: &SearchSpec, error: &SearchError) -> Value {
    let mut body = object(json!({
        "spec": spec_value(spec),
        "error": error.to_string(),
    }));
    if let SearchError::GuardExceeded { limit, reached, partial } = error {
        body.insert("limit".into(), json!(limit));
        body.insert("reached".into(), big(reached));
        body.insert("partial_stats".into(), stats_value(partial));
    }
    record("search", body)
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "pass",
        Outcome::Fail => "fail",
        Outcome::Inconclusive => "inconclusive",
    }
}

pub fn ledger_record(report: &DerivationReport) -> Value {
    let steps: Vec<Value> = report
        .steps
        .iter()
        .map(|s| {
            json!({
                "id": s.id,
                "claim": s.claim,
                "citation": s.citation,
                "outcome": outcome_name(s.outcome),
                "detail": s.detail,
            })
        })
        .collect();
    let mut body = object(json!({
        "steps": steps,
        "all_passed": report.all_passed(),
        "c_eta": report.c_eta.as_ref().map(ToString::to_string),
        "torsion": report.torsion_cp1.as_ref().map(ToString::to_string),
        "citation": "Lemma Omega_8(CP1)",
    }));
    if let Some(label) = report.counterfactual {
        body.insert("counterfactual".into(), json!(label));
        body.insert(
            "note".into(),
            json!("counterfactual input: the recorded bracket was replaced, the result is not a theorem"),
        );
    }
    record("ledger", body)
}

fn field<'a>(v: &'a Value, name: &'static str) -> Result<&'a Value, RecordError> {
    v.get(name).ok_or(RecordError::Field(name))
}

fn parse_big(v: &Value, name: &'static str) -> Result<BigInt, RecordError> {
    v.as_str()
        .and_then(|s| s.parse().ok())
        .ok_or(RecordError::Field(name))
}

/// Reads Sullivan data back from [`sullivan_data_value`] output.
pub fn parse_sullivan_data(v: &Value) -> Result<SullivanData, RecordError> {
    let n = field(v, "n")?
        .as_u64()
        .and_then(|n| u32::try_from(n).ok())
        .ok_or(RecordError::Field("n"))?;
    let pontryagin = field(v, "pontryagin")?
        .as_array()
        .ok_or(RecordError::Field("pontryagin"))?
        .iter()
        .map(|p| parse_big(p, "pontryagin"))
        .collect::<Result<_, _>>()?;
    Ok(SullivanData {
        n,
        total_degree: parse_big(field(v, "total_degree")?, "total_degree")?,
        pontryagin,
        euler: parse_big(field(v, "euler")?, "euler")?,
    })
}

pub fn check_schema(v: &Value) -> Result<(), RecordError> {
    match v.get("schema") {
        Some(s) if s.as_u64() == Some(SCHEMA) => Ok(()),
        Some(s) => Err(RecordError::Schema(s.clone())),
        None => Err(RecordError::Field("schema")),
    }
}
