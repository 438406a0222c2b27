//! Canonical text form of a resolved scheme.
//!
//! The output parses back to an equal scheme: system sets, canonical
//! projections, and system constraints are omitted (the builder recreates
//! them), and annotation-derived constraints are folded back into their
//! mapping declarations. Printing is deterministic, so `print ∘ parse` is
//! idempotent on any valid source.

use crate::ids::MapId;
use crate::model::{
    Bound, Codomain, ConstraintBody, ConstraintOrigin, DomainShape, Formula, MapExpr,
    MapGeneralOp, PathPairMode, Scheme, SetKind, SetRelOp, Term, ValueDomain,
};
use crate::model::BoolExpr;
use crate::value::Value;
use std::fmt::Write as _;

pub fn print(scheme: &Scheme) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scheme {};", scheme.name);

    let mut wrote_sets = false;
    for (_, s) in scheme.sets() {
        let line = match &s.kind {
            SetKind::System(_) => continue,
            SetKind::Entity => format!("set {} : entity;", s.name),
            SetKind::Relationship { components } => {
                let comps: Vec<String> = components
                    .iter()
                    .map(|c| format!("{}: {}", c.role, scheme.set(c.target).name))
                    .collect();
                format!("set {} : relationship({});", s.name, comps.join(", "))
            }
            SetKind::Value { domain } => {
                format!("valueset {} = {};", s.name, domain_text(domain))
            }
            SetKind::Computed { base, predicate } => format!(
                "set {} : computed = {} where ({});",
                s.name,
                scheme.set(*base).name,
                bool_text(scheme, predicate, &[], 0),
            ),
        };
        if !wrote_sets {
            out.push('\n');
            wrote_sets = true;
        }
        out.push_str(&line);
        out.push('\n');
    }

    let mut wrote_maps = false;
    for (id, m) in scheme.mappings() {
        if m.is_projection {
            continue;
        }
        let codomain = match &m.codomain {
            Codomain::Set(s) => scheme.set(*s).name.clone(),
            Codomain::Inline(d) => domain_text(d),
        };
        let mut annots = Vec::new();
        if let Some(def) = &m.definition {
            annots.push(match def {
                MapExpr::Chain(ms) => format!("= {}", chain_text(scheme, ms)),
                MapExpr::Expr(t) => format!("= {}", term_text(scheme, t, &[], 0)),
            });
        }
        for c in scheme.constraints() {
            if c.origin != ConstraintOrigin::Annotation || annot_mapping(&c.body) != Some(id) {
                continue;
            }
            annots.push(match &c.body {
                ConstraintBody::MapGeneral { op, .. } => match op {
                    MapGeneralOp::Totality => "total".into(),
                    MapGeneralOp::SingleKey => "key".into(),
                    MapGeneralOp::NonPrimeness => "nonprime".into(),
                    MapGeneralOp::Surjectivity => "surjective".into(),
                    MapGeneralOp::Bijectivity => "bijective".into(),
                },
                ConstraintBody::Default { .. } => format!(
                    "default = {}",
                    literal_text(m.default.as_ref().expect("default annotation has a value")),
                ),
                ConstraintBody::SelfMapProperty { property, .. } => property.name().into(),
                b => unreachable!("not an annotation body: {b:?}"),
            });
        }
        let annots = annots
            .iter()
            .map(|a| format!(", {a}"))
            .collect::<String>();
        if !wrote_maps {
            out.push('\n');
            wrote_maps = true;
        }
        let _ = writeln!(
            out,
            "map {} : {} -> {codomain}{annots};",
            m.name,
            scheme.set(m.domain).name,
        );
    }

    let mut wrote_constraints = false;
    for c in scheme.constraints() {
        if c.origin != ConstraintOrigin::Explicit {
            continue;
        }
        if !wrote_constraints {
            out.push('\n');
            wrote_constraints = true;
        }
        let _ = writeln!(
            out,
            "constraint {} : {};",
            c.id,
            constraint_text(scheme, &c.body)
        );
    }

    if !scheme.advisories().is_empty() {
        out.push('\n');
        for a in scheme.advisories() {
            let _ = writeln!(
                out,
                "advisory {} : {};",
                a.constraints.join(", "),
                dsl_string(&a.note)
            );
        }
    }
    out
}

/// The mapping an annotation-origin constraint belongs to.
fn annot_mapping(body: &ConstraintBody) -> Option<MapId> {
    match body {
        ConstraintBody::MapGeneral { mapping, .. } | ConstraintBody::Default { mapping } => {
            Some(*mapping)
        }
        ConstraintBody::SelfMapProperty { path, .. } if path.len() == 1 => Some(path[0]),
        _ => None,
    }
}

fn constraint_text(scheme: &Scheme, body: &ConstraintBody) -> String {
    match body {
        ConstraintBody::SetRelation { op, left, right } => {
            let l = &scheme.set(*left).name;
            let names: Vec<&str> = right.iter().map(|r| scheme.set(*r).name.as_str()).collect();
            match op {
                SetRelOp::Inclusion => format!("{l} subset {}", names[0]),
                SetRelOp::Equality => format!("{l} = {}", names[0]),
                SetRelOp::Disjointness => format!("{l} disjoint {}", names[0]),
                SetRelOp::Union => format!("{l} = union({})", names.join(", ")),
                SetRelOp::DirectSum => format!("{l} = dsum({})", names.join(", ")),
            }
        }
        ConstraintBody::PairProperty { target, property } => match target {
            crate::model::PairTarget::DyadicSet(s) => {
                format!("{} is {}", scheme.set(*s).name, property.name())
            }
            crate::model::PairTarget::Product { left, right, .. } => format!(
                "{} . {} is {}",
                scheme.mapping(*left).name,
                scheme.mapping(*right).name,
                property.name()
            ),
        },
        ConstraintBody::SelfMapProperty { path, property } => {
            if path.len() == 1 {
                format!("{} is {}", scheme.mapping(path[0]).name, property.name())
            } else {
                format!("path {} is {}", chain_text(scheme, path), property.name())
            }
        }
        ConstraintBody::Key { set, components } => format!(
            "key ({}) on {}",
            map_names(scheme, components),
            scheme.set(*set).name
        ),
        ConstraintBody::Subkey { set, sub, full } => format!(
            "subkey ({}) of ({}) on {}",
            map_names(scheme, sub),
            map_names(scheme, full),
            scheme.set(*set).name
        ),
        ConstraintBody::ExistencePattern {
            antecedent,
            consequent,
            ..
        } => {
            let side = |lits: &[(MapId, bool)]| {
                lits.iter()
                    .map(|(m, positive)| {
                        let name = &scheme.mapping(*m).name;
                        if *positive {
                            format!("{name} exists")
                        } else {
                            format!("not {name} exists")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" and ")
            };
            format!("{} => {}", side(antecedent), side(consequent))
        }
        ConstraintBody::PathPair { mode, left, right } => {
            let kw = match mode {
                PathPairMode::Equal => "commutes",
                PathPairMode::NullEqual => "nullcommutes",
                PathPairMode::Anti => "anticommutes",
            };
            format!(
                "path {} {kw} with {}",
                chain_text(scheme, left),
                chain_text(scheme, right)
            )
        }
        ConstraintBody::GeneralDiagram { formula } => {
            format!("diagram {}", formula_text(scheme, formula))
        }
        ConstraintBody::Object { formula } => format!("formula {}", formula_text(scheme, formula)),
        b => unreachable!("system constraints are not printed: {b:?}"),
    }
}

fn map_names(scheme: &Scheme, ids: &[MapId]) -> String {
    ids.iter()
        .map(|m| scheme.mapping(*m).name.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

fn chain_text(scheme: &Scheme, ids: &[MapId]) -> String {
    ids.iter()
        .map(|m| scheme.mapping(*m).name.as_str())
        .collect::<Vec<_>>()
        .join(" o ")
}

fn formula_text(scheme: &Scheme, f: &Formula) -> String {
    let binders: Vec<String> = f
        .binders
        .iter()
        .map(|b| format!("{} in {}", b.var, scheme.set(b.set).name))
        .collect();
    let vars: Vec<&str> = f.binders.iter().map(|b| b.var.as_str()).collect();
    format!(
        "forall {} ({})",
        binders.join(", "),
        bool_text(scheme, &f.body, &vars, 0)
    )
}

// Binding powers mirror the parser; a child is parenthesized when its
// operator binds no tighter than its context requires.
fn bool_text(scheme: &Scheme, b: &BoolExpr, vars: &[&str], min_bp: u8) -> String {
    let (bp, text) = match b {
        BoolExpr::Implies(l, r) => (
            2,
            format!(
                "{} => {}",
                bool_text(scheme, l, vars, 3),
                bool_text(scheme, r, vars, 2)
            ),
        ),
        BoolExpr::Or(vs) => (
            3,
            vs.iter()
                .map(|v| bool_text(scheme, v, vars, 4))
                .collect::<Vec<_>>()
                .join(" or "),
        ),
        BoolExpr::And(vs) => (
            5,
            vs.iter()
                .map(|v| bool_text(scheme, v, vars, 6))
                .collect::<Vec<_>>()
                .join(" and "),
        ),
        BoolExpr::Not(inner) => (7, format!("not {}", bool_text(scheme, inner, vars, 8))),
        BoolExpr::Cmp(op, l, r) => (
            9,
            format!(
                "{} {} {}",
                term_text(scheme, l, vars, 10),
                op.symbol(),
                term_text(scheme, r, vars, 10)
            ),
        ),
        BoolExpr::NullCheck(t, must_be_null) => (
            8,
            format!(
                "{} is {}null",
                term_text(scheme, t, vars, 9),
                if *must_be_null { "" } else { "not " }
            ),
        ),
    };
    if bp < min_bp {
        format!("({text})")
    } else {
        text
    }
}

fn term_text(scheme: &Scheme, t: &Term, vars: &[&str], min_bp: u8) -> String {
    let (bp, text) = match t {
        Term::Var(i) => {
            // In point-free positions (no binders) the row is implicit and
            // only ever applied to; a bare row variable cannot be printed.
            let name = vars
                .get(*i as usize)
                .unwrap_or_else(|| panic!("unprintable row variable {i}"));
            (100, (*name).to_string())
        }
        Term::Lit(v) => (100, literal_text(v)),
        Term::Apply(m, inner) => {
            let name = &scheme.mapping(*m).name;
            if vars.is_empty() && matches!(**inner, Term::Var(0)) {
                (100, name.clone())
            } else {
                (100, format!("{name}({})", term_text(scheme, inner, vars, 0)))
            }
        }
        Term::Arith(op, l, r) => {
            use crate::value::ArithOp;
            let (lbp, sym) = match op {
                ArithOp::Add => (11, "+"),
                ArithOp::Sub => (11, "-"),
                ArithOp::Mul => (13, "*"),
            };
            (
                lbp,
                format!(
                    "{} {sym} {}",
                    term_text(scheme, l, vars, lbp),
                    term_text(scheme, r, vars, lbp + 1)
                ),
            )
        }
        Term::Today => (100, "Today()".into()),
        Term::Len(t) => (100, format!("len({})", term_text(scheme, t, vars, 0))),
        Term::Left(t, n) => (
            100,
            format!(
                "left({}, {})",
                term_text(scheme, t, vars, 0),
                term_text(scheme, n, vars, 0)
            ),
        ),
        Term::Right(t, n) => (
            100,
            format!(
                "right({}, {})",
                term_text(scheme, t, vars, 0),
                term_text(scheme, n, vars, 0)
            ),
        ),
        Term::Mid(t, i, n) => (
            100,
            format!(
                "mid({}, {}, {})",
                term_text(scheme, t, vars, 0),
                term_text(scheme, i, vars, 0),
                term_text(scheme, n, vars, 0)
            ),
        ),
    };
    if bp < min_bp {
        format!("({text})")
    } else {
        text
    }
}

fn domain_text(d: &ValueDomain) -> String {
    match &d.shape {
        DomainShape::Full => d.base.to_string(),
        DomainShape::Interval {
            lo,
            hi,
            lo_open,
            hi_open,
        } => format!(
            "{} {}{} .. {}{}",
            d.base,
            if *lo_open { '(' } else { '[' },
            bound_text(lo),
            bound_text(hi),
            if *hi_open { ')' } else { ']' },
        ),
        DomainShape::Enum(values) => format!(
            "{} {{{}}}",
            d.base,
            values
                .iter()
                .map(literal_text)
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

fn bound_text(b: &Bound) -> String {
    match b {
        Bound::Lit(v) => literal_text(v),
        Bound::Today => "Today()".into(),
    }
}

fn literal_text(v: &Value) -> String {
    match v {
        Value::Text(s) => dsl_string(s),
        Value::Int(_) | Value::Dec(_) | Value::Date(_) | Value::Bool(_) => v.to_string(),
        v => unreachable!("not a scheme literal: {v:?}"),
    }
}

/// Quote a string with exactly the escapes the tokenizer understands.
fn dsl_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
