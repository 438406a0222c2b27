//! Evaluation of terms, boolean bodies, and populations over an instance.
//!
//! Evaluation is strict in nulls: a null anywhere under a mapping
//! application, composition, arithmetic operation, or text function makes
//! the whole term null. Comparison atoms involving a null are never
//! satisfied; only the explicit null-status atoms observe nulls. The only
//! hard failure is arithmetic that cannot produce a value at all (overflow
//! past the representation bounds), which callers surface as a violation.

use crate::ids::{ElemId, MapId, SetId};
use crate::model::{BoolExpr, CmpOp, MapExpr, Scheme, SetKind, Term};
use crate::store::Instance;
use crate::value::{ArithError, Value};

/// A term that failed to produce a value (as opposed to producing null).
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("{message}")]
pub struct EvalError {
    pub message: String,
}

fn err<T>(message: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError {
        message: message.into(),
    })
}

/// Apply a mapping to a value. Null arguments and missing stored values
/// yield null; computed mappings evaluate their definition.
pub fn apply_mapping(inst: &Instance, map: MapId, arg: &Value) -> Result<Value, EvalError> {
    let md = inst.scheme().mapping(map);
    let id = match arg {
        Value::Null => return Ok(Value::Null),
        Value::Elem(_, id) => *id,
        other => return err(format!("{} cannot be applied to {other}", md.name)),
    };
    match &md.definition {
        None => Ok(inst.value(map, id)),
        Some(MapExpr::Chain(path)) => apply_path(inst, path, arg),
        Some(MapExpr::Expr(term)) => eval_term(inst, term, std::slice::from_ref(arg)),
    }
}

/// Apply a composition path (outermost first): `[f, g]` computes `f(g(x))`.
pub fn apply_path(inst: &Instance, path: &[MapId], arg: &Value) -> Result<Value, EvalError> {
    let mut v = arg.clone();
    for &m in path.iter().rev() {
        if v.is_null() {
            return Ok(Value::Null);
        }
        v = apply_mapping(inst, m, &v)?;
    }
    Ok(v)
}

/// Evaluate a term under a binding of quantified variables.
pub fn eval_term(inst: &Instance, term: &Term, binding: &[Value]) -> Result<Value, EvalError> {
    Ok(match term {
        Term::Var(i) => binding[*i as usize].clone(),
        Term::Lit(v) => v.clone(),
        Term::Today => Value::Date(inst.today()),
        Term::Apply(m, t) => {
            let v = eval_term(inst, t, binding)?;
            apply_mapping(inst, *m, &v)?
        }
        Term::Arith(op, a, b) => {
            let va = eval_term(inst, a, binding)?;
            let vb = eval_term(inst, b, binding)?;
            match Value::arith(*op, &va, &vb) {
                Ok(v) => v,
                Err(ArithError::Overflow) => {
                    return err(format!("{va} {op} {vb} overflows the value range"))
                }
                Err(ArithError::TypeMismatch) => {
                    return err(format!("{va} {op} {vb} is not defined"))
                }
            }
        }
        Term::Len(t) => match eval_term(inst, t, binding)? {
            Value::Null => Value::Null,
            Value::Text(s) => Value::Int(s.chars().count() as i128),
            other => return err(format!("len({other}) is not defined")),
        },
        Term::Left(t, n) => text_slice(inst, t, None, n, binding, false)?,
        Term::Right(t, n) => text_slice(inst, t, None, n, binding, true)?,
        Term::Mid(t, i, n) => text_slice(inst, t, Some(i), n, binding, false)?,
    })
}

/// Shared evaluation of the text-slicing functions. Counts are clamped to
/// the text (negative counts take nothing, oversized counts take all), so
/// slicing is total on non-null text.
fn text_slice(
    inst: &Instance,
    t: &Term,
    start: Option<&Term>,
    n: &Term,
    binding: &[Value],
    from_end: bool,
) -> Result<Value, EvalError> {
    let s = match eval_term(inst, t, binding)? {
        Value::Null => return Ok(Value::Null),
        Value::Text(s) => s,
        other => return err(format!("{other} is not text")),
    };
    let count = match int_arg(&eval_term(inst, n, binding)?)? {
        None => return Ok(Value::Null),
        Some(c) => c.max(0) as usize,
    };
    let chars: Vec<char> = s.chars().collect();
    let from = match start {
        None if from_end => chars.len().saturating_sub(count),
        None => 0,
        Some(i) => match int_arg(&eval_term(inst, i, binding)?)? {
            None => return Ok(Value::Null),
            // Positions are 1-based; anything below the start clamps to it.
            Some(i) => (i.max(1) as usize) - 1,
        },
    };
    let to = chars.len().min(from.saturating_add(count));
    if from >= to {
        return Ok(Value::Text(String::new()));
    }
    Ok(Value::Text(chars[from..to].iter().collect()))
}

/// Read a numeric value as a whole number, truncating any fraction.
fn int_arg(v: &Value) -> Result<Option<i128>, EvalError> {
    match v {
        Value::Null => Ok(None),
        Value::Int(i) => Ok(Some(*i)),
        Value::Dec(d) => Ok(Some(d.units() / 10i128.pow(d.scale() as u32))),
        other => err(format!("{other} is not a number")),
    }
}

/// Evaluate a boolean body under a binding. Two-valued: a comparison with a
/// null operand is false, whichever way it points.
pub fn eval_bool(inst: &Instance, expr: &BoolExpr, binding: &[Value]) -> Result<bool, EvalError> {
    Ok(match expr {
        BoolExpr::And(xs) => {
            for x in xs {
                if !eval_bool(inst, x, binding)? {
                    return Ok(false);
                }
            }
            true
        }
        BoolExpr::Or(xs) => {
            for x in xs {
                if eval_bool(inst, x, binding)? {
                    return Ok(true);
                }
            }
            false
        }
        BoolExpr::Not(x) => !eval_bool(inst, x, binding)?,
        BoolExpr::Implies(a, b) => !eval_bool(inst, a, binding)? || eval_bool(inst, b, binding)?,
        BoolExpr::Cmp(op, l, r) => {
            let a = eval_term(inst, l, binding)?;
            let b = eval_term(inst, r, binding)?;
            match op {
                CmpOp::Eq => a.equals(&b) == Some(true),
                CmpOp::Ne => a.equals(&b) == Some(false),
                _ => a.compare(&b).is_some_and(|o| op.holds(o)),
            }
        }
        BoolExpr::NullCheck(t, wants_null) => {
            eval_term(inst, t, binding)?.is_null() == *wants_null
        }
    })
}

/// The element population of an object or computed set, in population
/// order. Computed sets filter their base by the membership predicate; sets
/// without elements (value and system sets) are empty.
pub fn population(inst: &Instance, set: SetId) -> Result<Vec<ElemId>, EvalError> {
    let scheme = inst.scheme();
    match &scheme.set(set).kind {
        SetKind::Entity | SetKind::Relationship { .. } => Ok(inst.members(set).to_vec()),
        SetKind::Computed { base, predicate } => {
            let mut out = Vec::new();
            for id in population(inst, *base)? {
                let binding = [scheme.elem_value(*base, id)];
                match eval_bool(inst, predicate, &binding) {
                    Ok(true) => out.push(id),
                    Ok(false) => {}
                    Err(e) => {
                        return err(format!(
                            "the membership predicate of {} fails at {}: {}",
                            scheme.set(set).name,
                            elem_label(scheme, *base, id),
                            e.message,
                        ))
                    }
                }
            }
            Ok(out)
        }
        SetKind::Value { .. } | SetKind::System(_) => Ok(Vec::new()),
    }
}

/// Human-readable element handle, `SET[id]`.
pub fn elem_label(scheme: &Scheme, set: SetId, id: ElemId) -> String {
    format!("{}[{}]", scheme.set(set).name, id)
}

/// Human-readable value, labelling element references through their
/// id-scope representative set.
pub fn value_label(scheme: &Scheme, v: &Value) -> String {
    match v {
        Value::Elem(s, id) => elem_label(scheme, *s, *id),
        other => other.to_string(),
    }
}
