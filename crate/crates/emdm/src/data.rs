//! JSON import and export of instance populations.
//!
//! A data document is one JSON object keyed by object-set name. Each set
//! holds an array of element records: an `id` plus one field per stored
//! mapping value, absent fields meaning null. References are written
//! `{"ref": "SET", "id": n}`. Loading is two-pass — elements first, values
//! second — so records may freely reference elements defined later in the
//! document.
//!
//! Export is canonical: sets in declaration order, elements in insertion
//! order, fields in mapping-declaration order, numbers at full precision.
//! Loading an exported document reproduces the instance, and re-exporting
//! reproduces the document byte for byte.

use serde_json::{Map, Number, Value as Json};

use crate::ids::ElemId;
use crate::model::{BaseType, MappingDecl, MapKind, Scheme};
use crate::store::{Instance, StoreError};
use crate::value::{Date, Value};

fn fail<T>(locus: impl Into<String>, message: impl Into<String>) -> Result<T, StoreError> {
    Err(StoreError {
        locus: locus.into(),
        message: message.into(),
    })
}

/// Serialize an instance as a canonical JSON document.
pub fn dump(inst: &Instance) -> String {
    let scheme = inst.scheme();
    let mut doc = Map::new();
    for (sid, sd) in scheme.sets() {
        if !sd.is_object() {
            continue;
        }
        let mut rows = Vec::new();
        for &e in inst.members(sid) {
            let mut row = Map::new();
            row.insert("id".into(), Json::Number(Number::from(e.0)));
            for (m, md) in scheme.stored_mappings_on(sid) {
                if let Some(v) = inst.get(m, e) {
                    row.insert(md.name.clone(), value_to_json(scheme, md, v));
                }
            }
            rows.push(Json::Object(row));
        }
        doc.insert(sd.name.clone(), Json::Array(rows));
    }
    let mut text =
        serde_json::to_string_pretty(&Json::Object(doc)).expect("instance data serializes");
    text.push('\n');
    text
}

fn value_to_json(scheme: &Scheme, md: &MappingDecl, v: &Value) -> Json {
    match v {
        Value::Int(i) => Json::Number(
            i.to_string()
                .parse()
                .expect("integers are valid JSON numbers"),
        ),
        Value::Dec(d) => Json::Number(
            d.to_string()
                .parse()
                .expect("decimals are valid JSON numbers"),
        ),
        Value::Text(t) => Json::String(t.clone()),
        Value::Date(d) => Json::String(d.to_string()),
        Value::Bool(b) => Json::Bool(*b),
        Value::Elem(_, id) => {
            let c = scheme
                .object_codomain(&md.codomain)
                .expect("stored references have object codomains");
            let mut r = Map::new();
            r.insert("ref".into(), Json::String(scheme.set(c).name.clone()));
            r.insert("id".into(), Json::Number(Number::from(id.0)));
            Json::Object(r)
        }
        Value::Null => unreachable!("nulls are never stored"),
    }
}

/// Parse a data document into a fresh instance over `scheme`.
pub fn load<'s>(scheme: &'s Scheme, today: Date, text: &str) -> Result<Instance<'s>, StoreError> {
    let doc: Json = serde_json::from_str(text).map_err(|e| StoreError {
        locus: "data".into(),
        message: format!("invalid JSON: {e}"),
    })?;
    let Json::Object(doc) = doc else {
        return fail("data", "the top level must be an object keyed by set name");
    };
    let mut inst = Instance::new(scheme, today);

    // Pass 1: create every element so later values can reference any of
    // them regardless of document order.
    for (set_name, rows) in &doc {
        let sid = match scheme.set_id(set_name) {
            Some(s) if scheme.set(s).is_object() => s,
            Some(_) => return fail(set_name, "not an entity or relationship set"),
            None => return fail(set_name, "unknown set"),
        };
        let Json::Array(rows) = rows else {
            return fail(set_name, "expected an array of element records");
        };
        for row in rows {
            let Json::Object(row) = row else {
                return fail(set_name, "each element record must be an object");
            };
            inst.insert_with_id(sid, record_id(set_name, row)?)?;
        }
    }

    // Pass 2: stored mapping values.
    for (set_name, rows) in &doc {
        let sid = scheme.set_id(set_name).expect("checked in pass 1");
        let Json::Array(rows) = rows else {
            unreachable!("checked in pass 1")
        };
        for row in rows {
            let Json::Object(row) = row else {
                unreachable!("checked in pass 1")
            };
            let id = record_id(set_name, row)?;
            for (key, jv) in row {
                if key == "id" {
                    continue;
                }
                let locus = format!("{set_name}[{id}].{key}");
                let m = match scheme.map_id(key) {
                    Some(m) => m,
                    None => return fail(locus, "unknown mapping"),
                };
                let md = scheme.mapping(m);
                if md.domain != sid || md.kind == MapKind::Computed {
                    return fail(locus, format!("{key} is not stored on {set_name}"));
                }
                let v = json_to_value(scheme, md, jv, &locus)?;
                inst.set_value(id, m, v)?;
            }
        }
    }

    let missing = inst.missing_component_values();
    if let Some(&(s, e, m)) = missing.first() {
        return fail(
            format!("{}[{e}]", scheme.set(s).name),
            format!(
                "missing component value {}{}",
                scheme.mapping(m).name,
                if missing.len() > 1 {
                    format!(" (and {} more)", missing.len() - 1)
                } else {
                    String::new()
                }
            ),
        );
    }
    Ok(inst)
}

fn record_id(set_name: &str, row: &Map<String, Json>) -> Result<ElemId, StoreError> {
    match row.get("id") {
        Some(Json::Number(n)) => match n.as_u64() {
            Some(id) => Ok(ElemId(id)),
            None => fail(set_name, format!("id {n} is not an unsigned integer")),
        },
        Some(other) => fail(
            set_name,
            format!("id must be a number, got {}", json_kind(other)),
        ),
        None => fail(set_name, "element record lacks an id"),
    }
}

fn json_to_value(
    scheme: &Scheme,
    md: &MappingDecl,
    jv: &Json,
    locus: &str,
) -> Result<Value, StoreError> {
    match jv {
        Json::Null => Ok(Value::Null),
        Json::Bool(b) => Ok(Value::Bool(*b)),
        Json::Number(n) => number_to_value(n, locus),
        Json::String(s) => {
            // The mapping's base type decides whether the text is a date.
            match scheme.value_domain(&md.codomain).map(|d| d.base) {
                Some(BaseType::Datetime) => match Date::parse(s) {
                    Some(d) => Ok(Value::Date(d)),
                    None => fail(locus, format!("{s:?} is not a calendar date")),
                },
                _ => Ok(Value::Text(s.clone())),
            }
        }
        Json::Object(r) => {
            let Some(Json::String(set_name)) = r.get("ref") else {
                return fail(locus, "references need a \"ref\" field naming a set");
            };
            let Some(sid) = scheme.set_id(set_name) else {
                return fail(locus, format!("unknown set {set_name}"));
            };
            if !scheme.set(sid).is_object() {
                return fail(locus, format!("{set_name} has no stored elements"));
            }
            if r.len() != 2 {
                return fail(locus, "references carry exactly \"ref\" and \"id\"");
            }
            Ok(Value::Elem(sid, record_id(set_name, r)?))
        }
        Json::Array(_) => fail(locus, "unexpected array"),
    }
}

fn number_to_value(n: &Number, locus: &str) -> Result<Value, StoreError> {
    let text = n.to_string();
    if text.contains(['.', 'e', 'E']) {
        match text.parse() {
            Ok(d) => Ok(Value::Dec(d)),
            Err(_) => fail(
                locus,
                format!("{text} is not a plain decimal (exponents are not supported)"),
            ),
        }
    } else {
        match text.parse() {
            Ok(i) => Ok(Value::Int(i)),
            Err(_) => fail(locus, format!("{text} is out of integer range")),
        }
    }
}

fn json_kind(j: &Json) -> &'static str {
    match j {
        Json::Null => "null",
        Json::Bool(_) => "a boolean",
        Json::Number(_) => "a number",
        Json::String(_) => "a string",
        Json::Array(_) => "an array",
        Json::Object(_) => "an object",
    }
}
