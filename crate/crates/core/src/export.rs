//! JSON and CSV documents. Rationals are strings (`"248"`, `"-1/3"`),
//! exponents are `{num, den}` objects, and object keys are sorted, so the same
//! input always gives byte-identical output.

use serde_json::{json, Map, Value};

use crate::classify::{CandidateRecord, LeadingData};
use crate::exactq::{Exp, LogQSeries, QSeries, Rational};
use crate::lattice::CharacterTriple;
use crate::mlde::{FreeRule, FrobeniusSolution, IndicialData, SolutionStatus};
use crate::verify::Check;

pub const SCHEMA: &str = "mlde-lab/1";

pub fn rational(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn rationals(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational).collect())
}

pub fn exponent(e: Exp) -> Value {
    json!({ "num": e.numer(), "den": e.denom() })
}

/// Nonzero terms as `[exponent, coefficient]` pairs, with the truncation.
pub fn series(f: &QSeries) -> Value {
    let terms: Vec<Value> = f
        .terms()
        .map(|(e, c)| json!([exponent(e), rational(c)]))
        .collect();
    json!({ "terms": terms, "trunc": exponent(f.trunc()) })
}

/// Parts by power of `log q`, lowest first.
pub fn log_series(f: &LogQSeries) -> Value {
    Value::Array(f.parts().iter().map(series).collect())
}

pub fn indicial(d: &IndicialData) -> Value {
    json!({
        "roots": rationals(&d.roots),
        "resonance_steps": d.resonance_steps,
        "differences": d.differences.iter().map(|(i, j, n)| json!([i, j, n])).collect::<Vec<_>>(),
    })
}

pub fn status(s: &SolutionStatus) -> Value {
    match s {
        SolutionStatus::Generic => json!({ "kind": "generic" }),
        SolutionStatus::ResonantFree { step, value, rule } => json!({
            "kind": "resonant_free",
            "step": step,
            "value": rational(value),
            "rule": match rule {
                FreeRule::Zero => "zero",
                FreeRule::Fixed => "fixed",
                FreeRule::Continued => "continued",
            },
        }),
        SolutionStatus::Logarithmic {
            step,
            partner_root,
            log_coeff,
        } => json!({
            "kind": "logarithmic",
            "step": step,
            "partner_root": rational(partner_root),
            "log_coeff": rational(log_coeff),
        }),
    }
}

pub fn solution(s: &FrobeniusSolution, terms: usize) -> Value {
    json!({
        "root": rational(&s.root),
        "status": status(&s.status),
        "coefficients": rationals(&s.coefficients(terms)),
        "series": log_series(&s.series),
    })
}

pub fn leading(d: &LeadingData) -> Value {
    json!({
        "label": d.label,
        "root": rational(&d.root),
        "scale": rational(&d.scale),
        "coefficients": rationals(&d.coefficients),
        "logarithmic": d.logarithmic,
        "verdict": d.verdict().name(),
    })
}

fn params(p: &std::collections::BTreeMap<String, Rational>) -> Value {
    Value::Object(
        p.iter()
            .map(|(k, v)| (k.clone(), rational(v)))
            .collect::<Map<_, _>>(),
    )
}

pub fn record(r: &CandidateRecord) -> Value {
    json!({
        "pipeline": r.pipeline.name(),
        "label": r.label,
        "params": params(&r.params),
        "indicial": r.indicial.as_ref().map(indicial),
        "leading_data": r.leading_data.iter().map(leading).collect::<Vec<_>>(),
        "verdict": r.verdict.name(),
        "notes": r.notes,
    })
}

/// Members as leading data plus coefficient arrays.
pub fn triple(t: &CharacterTriple, terms: usize) -> Value {
    let members: Vec<Value> = t
        .members
        .iter()
        .zip(&t.weights)
        .map(|(f, w)| {
            let d = LeadingData::from_series(format!("{}:{w}", t.label), f, terms);
            json!({
                "weight": rational(w),
                "root": rational(&d.root),
                "leading": rational(&d.scale),
                "coefficients": rationals(&d.coefficients),
            })
        })
        .collect();
    json!({ "label": t.label, "c": rational(&t.c), "members": members })
}

pub fn check(c: &Check) -> Value {
    json!({ "name": c.name, "passed": c.passed, "detail": c.detail })
}

/// `{schema, kind, …body}`; `body` must be an object.
pub fn document(kind: &str, body: Value) -> Value {
    let mut m = match body {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("data".into(), other);
            m
        }
    };
    m.insert("schema".into(), Value::String(SCHEMA.into()));
    m.insert("kind".into(), Value::String(kind.into()));
    Value::Object(m)
}

/// `{schema, kind: "search", pipeline, parameters, records}`.
pub fn pipeline_document(pipeline: &str, parameters: Value, records: &[CandidateRecord]) -> Value {
    document(
        "search",
        json!({
            "pipeline": pipeline,
            "parameters": parameters,
            "records": records.iter().map(record).collect::<Vec<_>>(),
        }),
    )
}

pub fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values built here always serialise");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per record: label, every parameter seen in any record, verdict.
pub fn records_csv(records: &[CandidateRecord]) -> String {
    let mut keys: Vec<&String> = records.iter().flat_map(|r| r.params.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut out = String::new();
    let header: Vec<String> = std::iter::once("label".to_string())
        .chain(keys.iter().map(|k| k.to_string()))
        .chain(["verdict".into()])
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for r in records {
        let mut row = vec![csv_field(&r.label)];
        for k in &keys {
            row.push(
                r.params
                    .get(*k)
                    .map(|v| csv_field(&v.to_string()))
                    .unwrap_or_default(),
            );
        }
        row.push(r.verdict.name().to_string());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{Pipeline, Verdict};
    use crate::exactq::{exp, int, rat};

    #[test]
    fn scalars() {
        assert_eq!(rational(&rat(-1, 3)), json!("-1/3"));
        assert_eq!(rational(&int(248)), json!("248"));
        assert_eq!(exponent(exp(-2, 6)), json!({"num": -1, "den": 3}));
    }

    #[test]
    fn series_terms() {
        let f = QSeries::from_head(exp(-1, 3), vec![int(1), int(0), int(248)]);
        let v = series(&f);
        assert_eq!(v["terms"].as_array().unwrap().len(), 2);
        assert_eq!(v["terms"][1], json!([{"num": 5, "den": 3}, "248"]));
    }

    #[test]
    fn document_is_sorted_and_stable() {
        let r = CandidateRecord::new(
            Pipeline::C16,
            "h=1",
            &[("y", int(16)), ("h", int(1))],
            None,
            vec![LeadingData::new(
                "f",
                rat(1, 3),
                int(1),
                vec![int(1), int(136)],
            )],
        );
        assert_eq!(r.verdict, Verdict::RejectedNonrationalRoots);
        let d = pipeline_document("c16", json!({"y": "16"}), std::slice::from_ref(&r));
        let s = to_string(&d);
        assert_eq!(
            s,
            to_string(&pipeline_document(
                "c16",
                json!({"y": "16"}),
                std::slice::from_ref(&r)
            ))
        );
        assert!(s.find("\"kind\"").unwrap() < s.find("\"pipeline\"").unwrap());
        let recs = &s[s.find("\"records\"").unwrap()..];
        assert!(recs.find("\"h\"").unwrap() < recs.find("\"y\"").unwrap());
        assert_eq!(d["schema"], json!(SCHEMA));
        assert!(!s.contains('.'), "no floating point: {s}");
    }

    #[test]
    fn csv_projection() {
        let mk = |h: Rational| {
            CandidateRecord::new(Pipeline::C16, format!("h={h}"), &[("h", h)], None, vec![])
        };
        let csv = records_csv(&[mk(int(1)), mk(rat(-1, 2))]);
        assert_eq!(csv, "label,h,verdict\nh=1,1,rejected_nonrational_roots\nh=-1/2,-1/2,rejected_nonrational_roots\n");
    }
}
