//! Constraint validation over a populated instance.
//!
//! [`validate_all`] runs every constraint of the scheme — declared ones and
//! the system-attached range, reference and component constraints — against
//! the instance and returns the falsifying cases in scheme declaration
//! order. Validation never mutates the instance and two runs over equal
//! instances produce equal reports.
//!
//! Checking is split across submodules: [`eval`] evaluates mappings, terms
//! and formulas; [`checks`] holds the per-constraint-kind checks; [`deps`]
//! computes which constraints can see which sets and mappings; and
//! [`session`] layers incremental (eager) revalidation over mutations.

pub mod checks;
pub mod deps;
pub mod eval;
pub mod session;

use serde_json::{json, Map, Value as Json};

use crate::ids::{ElemId, SetId};
use crate::model::{ConstraintBody, MapGeneralOp, Scheme};
use crate::registry::ConstraintKind;
use crate::store::Instance;
use crate::value::Value;

pub use checks::{key_advisories, KeyAdvisory};
pub use session::{Session, ValidationMode};

/// A concrete way the instance falsifies one constraint. The witnesses are
/// the elements (and, where needed, offending values) that re-demonstrate
/// the failure when looked up in the instance.
#[derive(Clone, PartialEq, Debug)]
pub struct Violation {
    /// Identifier of the violated constraint.
    pub constraint: String,
    pub kind: ConstraintKind,
    pub witnesses: Vec<Witness>,
    /// Human-readable account of this particular failure.
    pub message: String,
}

/// One item of evidence inside a violation.
#[derive(Clone, PartialEq, Debug)]
pub enum Witness {
    /// An element of an object set.
    Elem(SetId, ElemId),
    /// A plain value involved in the failure.
    Value(Value),
}

/// Check every constraint against the instance. Violations come out grouped
/// by constraint, in scheme declaration order, each group in population
/// scan order.
pub fn validate_all(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    for c in inst.scheme().constraints() {
        out.extend(checks::check(inst, c));
    }
    out
}

/// Check the single constraint at `index` in the scheme's constraint list.
pub fn check_constraint(inst: &Instance, index: usize) -> Vec<Violation> {
    checks::check(inst, &inst.scheme().constraints()[index])
}

/// A constraint that is enforced by machinery other than the data checks:
/// declared defaults are applied by the store, non-primeness is a judgement
/// on the scheme itself. Surfaced so that a validation report can account
/// for every declared constraint.
#[derive(Clone, PartialEq, Debug)]
pub struct EnforcementNote {
    pub constraint: String,
    pub message: String,
}

/// Notes for the constraints that have no instance-level check.
pub fn enforcement_notes(scheme: &Scheme) -> Vec<EnforcementNote> {
    let mut out = Vec::new();
    for c in scheme.constraints() {
        let message = match &c.body {
            ConstraintBody::MapGeneral {
                op: MapGeneralOp::NonPrimeness,
                mapping,
            } => format!(
                "{} is declared non-prime; the scheme analyzer keeps it out of \
                 keys and uniqueness conditions, so there is nothing to check \
                 on the data",
                scheme.mapping(*mapping).name
            ),
            ConstraintBody::Default { mapping } => format!(
                "{} carries a default; the store fills it in when an insert \
                 omits the mapping, so there is nothing to check on the data",
                scheme.mapping(*mapping).name
            ),
            _ => continue,
        };
        out.push(EnforcementNote {
            constraint: c.id.clone(),
            message,
        });
    }
    out
}

/// Serialize a violation list as a JSON array, one object per violation.
pub fn report_json(scheme: &Scheme, violations: &[Violation]) -> String {
    let rows: Vec<Json> = violations
        .iter()
        .map(|v| {
            json!({
                "constraint": v.constraint,
                "kind": v.kind.name(),
                "witnesses": v.witnesses.iter().map(|w| witness_json(scheme, w)).collect::<Vec<_>>(),
                "message": v.message,
            })
        })
        .collect();
    let mut text =
        serde_json::to_string_pretty(&Json::Array(rows)).expect("violation reports serialize");
    text.push('\n');
    text
}

fn witness_json(scheme: &Scheme, w: &Witness) -> Json {
    match w {
        Witness::Elem(set, id) => elem_json(scheme, *set, *id),
        Witness::Value(v) => match v {
            Value::Null => Json::Null,
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
            Value::Elem(set, id) => elem_json(scheme, *set, *id),
        },
    }
}

fn elem_json(scheme: &Scheme, set: SetId, id: ElemId) -> Json {
    let mut row = Map::new();
    row.insert("set".into(), Json::String(scheme.set(set).name.clone()));
    row.insert("id".into(), json!(id.0));
    Json::Object(row)
}
