//! File formats: the JSON body document consumed by `--body`, and the
//! versioned JSON / fixed-column CSV report emissions.
//!
//! Body document shape (constraint polynomials are exponent/coefficient
//! term lists; the bounding ball is appended on load, never stored):
//!
//! ```json
//! {"n":3,"radius":2.0,"slater":[0.0,0.0,1.0],
//!  "constraints":[{"terms":[{"exps":[2,0,0],"coef":1.0}]}]}
//! ```

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tame_opt_core::body::ConvexBody;
use tame_opt_core::harness::{signature_string, DiagnosisReport, PathProbe, SurveyStats};
use tame_opt_core::poly::{Polynomial, Term};
use tame_opt_core::solver::SolveResult;

#[derive(Debug, Serialize, Deserialize)]
struct TermDoc {
    exps: Vec<u32>,
    coef: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct PolyDoc {
    terms: Vec<TermDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BodyDoc {
    n: usize,
    radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slater: Option<Vec<f64>>,
    constraints: Vec<PolyDoc>,
}

/// Parses and validates a body document (convexity probe, Slater check,
/// ball appended).
pub fn parse_body(text: &str) -> Result<ConvexBody> {
    let doc: BodyDoc = serde_json::from_str(text).context("malformed body document")?;
    if doc.n == 0 {
        bail!("body dimension must be ≥ 1");
    }
    let mut constraints = Vec::with_capacity(doc.constraints.len());
    for (i, p) in doc.constraints.into_iter().enumerate() {
        let terms: Vec<Term> = p
            .terms
            .into_iter()
            .map(|t| Term {
                exps: t.exps,
                coef: t.coef,
            })
            .collect();
        constraints.push(
            Polynomial::new(doc.n, terms)
                .with_context(|| format!("constraint {i} is inconsistent with n = {}", doc.n))?,
        );
    }
    ConvexBody::new(doc.n, constraints, doc.radius, doc.slater).context("body failed validation")
}

pub fn parse_body_file(path: &std::path::Path) -> Result<ConvexBody> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read body file {}", path.display()))?;
    parse_body(&text)
}

/// The body as a document (user constraints only; the ball is implicit).
pub fn body_document(body: &ConvexBody) -> Value {
    let constraints: Vec<Value> = body
        .user_constraints()
        .iter()
        .map(|p| {
            json!({
                "terms": p
                    .terms()
                    .iter()
                    .map(|t| json!({"exps": t.exps, "coef": t.coef}))
                    .collect::<Vec<_>>()
            })
        })
        .collect();
    json!({
        "n": body.n(),
        "radius": body.radius(),
        "slater": body.slater(),
        "constraints": constraints,
    })
}

pub fn solve_document(result: &SolveResult) -> Value {
    json!({
        "schema": crate::SCHEMA,
        "kind": "solve",
        "value": result.value,
        "active_signature": signature_string(&result.active),
        "report": serde_json::to_value(result).expect("solve result serializes"),
    })
}

pub fn diagnosis_document(rep: &DiagnosisReport) -> Value {
    json!({
        "schema": crate::SCHEMA,
        "kind": "diagnosis",
        "overall": rep.overall.name(),
        "failing_condition": rep.failing.map(|f| f.name()),
        "dim_M": rep.dim(),
        "t_star": rep.t_star(),
        "delta_hat": rep.delta_global(),
        "active_signature": signature_string(&rep.signature()),
        "report": serde_json::to_value(rep).expect("diagnosis serializes"),
    })
}

pub fn survey_document(stats: &SurveyStats) -> Value {
    json!({
        "schema": crate::SCHEMA,
        "kind": "survey",
        "total": stats.total,
        "identifiable": stats.identifiable,
        "inconclusive": stats.inconclusive,
        "report": serde_json::to_value(stats).expect("survey serializes"),
    })
}

/// Reads a survey document back; inverse of [`survey_document`].
pub fn parse_survey_document(text: &str) -> Result<SurveyStats> {
    let doc: Value = serde_json::from_str(text).context("malformed survey document")?;
    let schema = doc.get("schema").and_then(Value::as_str).unwrap_or("");
    if schema != crate::SCHEMA {
        bail!("unknown schema `{schema}`");
    }
    let report = doc
        .get("report")
        .context("survey document has no report field")?;
    serde_json::from_value(report.clone()).context("survey report does not match the schema")
}

pub fn path_document(probe: &PathProbe) -> Value {
    json!({
        "schema": crate::SCHEMA,
        "kind": "path_probe",
        "transitions": probe.transitions.len(),
        "jump_threshold": probe.jump_threshold,
        "report": serde_json::to_value(probe).expect("path probe serializes"),
    })
}

/// Fixed-column CSV: one row per survey sample. `None` fields are empty.
/// Float values use Rust's shortest round-trip formatting, so equal inputs
/// produce byte-identical files.
pub fn survey_csv(stats: &SurveyStats, n: usize) -> String {
    let mut out = String::from("index");
    for j in 1..=n {
        out.push_str(&format!(",c{j}"));
    }
    out.push_str(",verdict,failing_condition,active_signature,delta_hat,t_star,dim_M\n");
    for s in &stats.samples {
        out.push_str(&format!("{}", s.index));
        for v in &s.c {
            out.push_str(&format!(",{v}"));
        }
        out.push(',');
        out.push_str(s.verdict.name());
        out.push(',');
        if let Some(f) = s.failing {
            out.push_str(f.name());
        }
        out.push(',');
        out.push_str(&signature_string(&s.signature));
        out.push(',');
        if let Some(d) = s.delta_hat {
            out.push_str(&format!("{d}"));
        }
        out.push(',');
        if let Some(t) = s.t_star {
            out.push_str(&format!("{t}"));
        }
        out.push(',');
        if let Some(d) = s.dim {
            out.push_str(&format!("{d}"));
        }
        out.push('\n');
    }
    out
}
