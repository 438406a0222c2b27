//! The per-constraint checks behind validation.
//!
//! Every check walks populations in stored order and reports violations
//! deterministically; nothing is emitted from hash-map iteration. Checks
//! never fail: when evaluation of a computed value breaks down (arithmetic
//! overflow), the breakdown itself is reported as a violation of the
//! constraint under check, carrying the element where it happened.

use std::collections::{HashMap, HashSet};

use crate::ids::{ElemId, MapId, SetId};
use crate::model::{
    BaseType, Codomain, ConstraintBody, ConstraintDecl, DomainShape, MapGeneralOp, PairProperty,
    PairTarget, PathPairMode, Scheme, SelfMapProperty, SetKind, SetRelOp, ValueDomain,
};
use crate::pairs::{PairSet, PairWitness, Side};
use crate::store::Instance;
use crate::value::{Decimal, Value};

use super::eval::{
    apply_mapping, apply_path, elem_label, eval_bool, population, value_label, EvalError,
};
use super::{Violation, Witness};

/// What a relation view is read from.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ViewTarget<'a> {
    /// A binary relationship set whose components share one target set.
    Dyadic(SetId),
    /// A pair of mappings over a common domain into a common object set.
    Product { left: MapId, right: MapId },
    /// A composition path from a set back to itself, outermost first.
    SelfMap(&'a [MapId]),
}

/// Read a constraint target as a null-aware pair population, together with
/// the set whose elements name the pair sides.
pub fn relation_view(inst: &Instance, target: ViewTarget) -> Result<(PairSet, SetId), EvalError> {
    let scheme = inst.scheme();
    let err = |message: String| Err(EvalError { message });
    match target {
        ViewTarget::Dyadic(set) => {
            let sd = scheme.set(set);
            let SetKind::Relationship { components } = &sd.kind else {
                return err(format!("{} is not a relationship set", sd.name));
            };
            if components.len() != 2 {
                return err(format!("{} is not binary", sd.name));
            }
            let (a, b) = (&components[0], &components[1]);
            if a.target != b.target {
                return err(format!(
                    "{} is not homogeneous: {} and {} differ",
                    sd.name,
                    scheme.set(a.target).name,
                    scheme.set(b.target).name
                ));
            }
            let universe = population(inst, a.target)?;
            let pairs: Vec<(Side, Side)> = inst
                .members(set)
                .iter()
                .map(|&r| (side(inst.get(a.mapping, r)), side(inst.get(b.mapping, r))))
                .collect();
            Ok((
                PairSet::new(universe.iter().map(|id| id.0), pairs),
                a.target,
            ))
        }
        ViewTarget::Product { left, right } => {
            let (lm, rm) = (scheme.mapping(left), scheme.mapping(right));
            if lm.domain != rm.domain {
                return err(format!("{} and {} have different domains", lm.name, rm.name));
            }
            let (Some(lc), Some(rc)) = (
                scheme.object_codomain(&lm.codomain),
                scheme.object_codomain(&rm.codomain),
            ) else {
                return err(format!(
                    "{} . {} does not map into object sets",
                    lm.name, rm.name
                ));
            };
            if lc != rc {
                return err(format!(
                    "{} . {} is not homogeneous: {} and {} differ",
                    lm.name,
                    rm.name,
                    scheme.set(lc).name,
                    scheme.set(rc).name
                ));
            }
            let universe = population(inst, lc)?;
            let mut pairs = Vec::new();
            for x in population(inst, lm.domain)? {
                let xv = scheme.elem_value(lm.domain, x);
                let l = apply_mapping(inst, left, &xv)?;
                let r = apply_mapping(inst, right, &xv)?;
                pairs.push((side(Some(&l)), side(Some(&r))));
            }
            Ok((PairSet::new(universe.iter().map(|id| id.0), pairs), lc))
        }
        ViewTarget::SelfMap(path) => {
            let src = scheme.chain_source(path);
            let universe = population(inst, src)?;
            let mut pairs = Vec::new();
            for &x in &universe {
                let fx = apply_path(inst, path, &scheme.elem_value(src, x))?;
                pairs.push((Some(x.0), side(Some(&fx))));
            }
            Ok((PairSet::new(universe.iter().map(|id| id.0), pairs), src))
        }
    }
}

fn side(v: Option<&Value>) -> Side {
    match v {
        Some(Value::Elem(_, id)) => Some(id.0),
        _ => None,
    }
}

/// Run one constraint against the instance.
pub fn check(inst: &Instance, c: &ConstraintDecl) -> Vec<Violation> {
    let mut cx = Cx {
        inst,
        scheme: inst.scheme(),
        c,
        out: Vec::new(),
    };
    match &c.body {
        ConstraintBody::SetRelation { op, left, right } => cx.set_relation(*op, *left, right),
        ConstraintBody::PairProperty { target, property } => cx.pair_property(target, *property),
        ConstraintBody::SelfMapProperty { path, property } => cx.self_map(path, *property),
        ConstraintBody::MapGeneral { op, mapping } => cx.map_general(*op, *mapping),
        // Defaults are applied by the store at insert time and non-primeness
        // is a scheme-level judgement; neither has an instance-level check.
        ConstraintBody::Default { .. } => {}
        ConstraintBody::Key { set, components } => cx.key(*set, components),
        ConstraintBody::Subkey { set, sub, full } => cx.subkey(*set, sub, full),
        ConstraintBody::ExistencePattern {
            set,
            antecedent,
            consequent,
        } => cx.existence(*set, antecedent, consequent),
        ConstraintBody::PathPair { mode, left, right } => cx.path_pair(*mode, left, right),
        ConstraintBody::GeneralDiagram { formula } | ConstraintBody::Object { formula } => {
            cx.formula(formula)
        }
        ConstraintBody::Range { mapping } => cx.range(*mapping),
        ConstraintBody::RefIntegrity { mapping } => cx.ref_integrity(*mapping),
    }
    cx.out
}

/// One check run: the constraint under evaluation plus its violation sink.
struct Cx<'a, 's> {
    inst: &'a Instance<'s>,
    scheme: &'s Scheme,
    c: &'a ConstraintDecl,
    out: Vec<Violation>,
}

impl Cx<'_, '_> {
    fn emit(&mut self, witnesses: Vec<Witness>, message: String) {
        self.out.push(Violation {
            constraint: self.c.id.clone(),
            kind: self.c.kind,
            witnesses,
            message,
        });
    }

    fn emit_eval(&mut self, witnesses: Vec<Witness>, e: EvalError) {
        self.emit(witnesses, format!("cannot be checked: {}", e.message));
    }

    /// A set population, or `None` after reporting why it is unavailable.
    fn pop(&mut self, set: SetId) -> Option<Vec<ElemId>> {
        match population(self.inst, set) {
            Ok(p) => Some(p),
            Err(e) => {
                self.emit_eval(Vec::new(), e);
                None
            }
        }
    }

    fn label(&self, set: SetId, id: ElemId) -> String {
        elem_label(self.scheme, set, id)
    }

    // ---- set constraints ---------------------------------------------------

    fn set_relation(&mut self, op: SetRelOp, left: SetId, right: &[SetId]) {
        let Some(lp) = self.pop(left) else { return };
        let mut rps = Vec::new();
        for &r in right {
            match self.pop(r) {
                Some(p) => rps.push(p),
                None => return,
            }
        }
        let l_name = self.scheme.set(left).name.clone();
        let as_index = |p: &[ElemId]| -> HashSet<ElemId> { p.iter().copied().collect() };
        match op {
            SetRelOp::Inclusion | SetRelOp::Equality => {
                let ri = as_index(&rps[0]);
                let r_name = &self.scheme.set(right[0]).name.clone();
                for &x in &lp {
                    if !ri.contains(&x) {
                        let msg = format!("{} is not a member of {r_name}", self.label(left, x));
                        self.emit(vec![Witness::Elem(left, x)], msg);
                    }
                }
                if op == SetRelOp::Equality {
                    let li = as_index(&lp);
                    for &x in &rps[0] {
                        if !li.contains(&x) {
                            let msg =
                                format!("{} is not a member of {l_name}", self.label(right[0], x));
                            self.emit(vec![Witness::Elem(right[0], x)], msg);
                        }
                    }
                }
            }
            SetRelOp::Disjointness => {
                let ri = as_index(&rps[0]);
                for &x in &lp {
                    if ri.contains(&x) {
                        let msg = format!(
                            "{} is also a member of {}",
                            self.label(left, x),
                            self.scheme.set(right[0]).name
                        );
                        self.emit(vec![Witness::Elem(left, x)], msg);
                    }
                }
            }
            SetRelOp::Union | SetRelOp::DirectSum => {
                let li = as_index(&lp);
                let part_index: Vec<HashSet<ElemId>> =
                    rps.iter().map(|p| as_index(p)).collect();
                for &x in &lp {
                    if !part_index.iter().any(|p| p.contains(&x)) {
                        let msg = format!("{} is in none of the parts", self.label(left, x));
                        self.emit(vec![Witness::Elem(left, x)], msg);
                    }
                }
                for (i, part) in rps.iter().enumerate() {
                    let part_name = self.scheme.set(right[i]).name.clone();
                    for &x in part {
                        if !li.contains(&x) {
                            let msg = format!(
                                "{} is not a member of {l_name}",
                                elem_label(self.scheme, right[i], x)
                            );
                            self.emit(vec![Witness::Elem(right[i], x)], msg);
                        }
                        if op == SetRelOp::DirectSum {
                            for (j, other) in part_index.iter().enumerate().skip(i + 1) {
                                if other.contains(&x) {
                                    let msg = format!(
                                        "{} is in both {part_name} and {}",
                                        elem_label(self.scheme, right[i], x),
                                        self.scheme.set(right[j]).name
                                    );
                                    self.emit(vec![Witness::Elem(right[i], x)], msg);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    // ---- relation properties ------------------------------------------------

    fn pair_property(&mut self, target: &PairTarget, property: PairProperty) {
        let view = match target {
            PairTarget::DyadicSet(set) => ViewTarget::Dyadic(*set),
            PairTarget::Product { left, right, .. } => ViewTarget::Product {
                left: *left,
                right: *right,
            },
        };
        let (pairs, universe_set) = match relation_view(self.inst, view) {
            Ok(v) => v,
            Err(e) => return self.emit_eval(Vec::new(), e),
        };
        self.pair_violations(&pairs, universe_set, property);
    }

    fn pair_violations(&mut self, pairs: &PairSet, universe_set: SetId, property: PairProperty) {
        for pv in pairs.check(property) {
            let message = pv.describe(|id| self.label(universe_set, ElemId(id)));
            let ids: Vec<u64> = match &pv.witness {
                PairWitness::Elem(x) => vec![*x],
                PairWitness::Pair(x, y) => vec![*x, *y],
                PairWitness::Triple(x, y, z) => vec![*x, *y, *z],
                PairWitness::Cycle(c) => c.clone(),
            };
            let witnesses = ids
                .into_iter()
                .map(|id| Witness::Elem(universe_set, ElemId(id)))
                .collect();
            self.emit(witnesses, message);
        }
    }

    // ---- self-map properties -------------------------------------------------

    fn self_map(&mut self, path: &[MapId], property: SelfMapProperty) {
        use SelfMapProperty as P;

        // Equivalence properties are judged on the graph of the mapping.
        if matches!(property, P::Equivalence | P::NullEquivalence) {
            let pp = match property {
                P::Equivalence => PairProperty::Equivalence,
                _ => PairProperty::NullEquivalence,
            };
            match relation_view(self.inst, ViewTarget::SelfMap(path)) {
                Ok((pairs, set)) => self.pair_violations(&pairs, set, pp),
                Err(e) => self.emit_eval(Vec::new(), e),
            }
            return;
        }
        if property == P::Acyclicity {
            return self.self_map_acyclic(path);
        }

        let src = self.scheme.chain_source(path);
        let Some(universe) = self.pop(src) else { return };
        let f = self.path_name(path);
        for &x in &universe {
            let xv = self.scheme.elem_value(src, x);
            let fx = match apply_path(self.inst, path, &xv) {
                Ok(v) => v,
                Err(e) => {
                    self.emit_eval(vec![Witness::Elem(src, x)], e);
                    continue;
                }
            };
            let lx = self.label(src, x);
            let w1 = || vec![Witness::Elem(src, x)];
            let w2 = |v: &Value| vec![Witness::Elem(src, x), result_witness(Some(src), v)];

            // Properties that constrain f(x) alone.
            match property {
                P::Reflexivity => {
                    if fx.is_null() {
                        self.emit(w1(), format!("{f}({lx}) is null but must equal {lx}"));
                    } else if fx != xv {
                        let msg = format!(
                            "{f}({lx}) = {} but must equal {lx}",
                            result_label(self.scheme, Some(src), &fx)
                        );
                        self.emit(w2(&fx), msg);
                    }
                    continue;
                }
                P::NullReflexivity => {
                    if !fx.is_null() && fx != xv {
                        let msg = format!(
                            "{f}({lx}) = {} but must equal {lx} or be null",
                            result_label(self.scheme, Some(src), &fx)
                        );
                        self.emit(w2(&fx), msg);
                    }
                    continue;
                }
                P::Irreflexivity => {
                    if fx == xv {
                        self.emit(w1(), format!("{f}({lx}) = {lx}"));
                    }
                    continue;
                }
                _ => {}
            }

            // The rest look one application further.
            if fx.is_null() {
                if matches!(property, P::Symmetry | P::Idempotency | P::RepSystem) {
                    self.emit(w1(), format!("{f}({lx}) is null but the mapping must be total"));
                }
                continue;
            }
            let ffx = match apply_path(self.inst, path, &fx) {
                Ok(v) => v,
                Err(e) => {
                    self.emit_eval(w2(&fx), e);
                    continue;
                }
            };
            let lfx = result_label(self.scheme, Some(src), &fx);
            match property {
                P::Symmetry => {
                    if ffx != xv {
                        let msg = format!(
                            "{f}({lx}) = {lfx} but {f}({lfx}) = {} instead of {lx}",
                            result_label(self.scheme, Some(src), &ffx)
                        );
                        self.emit(w2(&fx), msg);
                    }
                }
                P::NullSymmetry => {
                    if !ffx.is_null() && ffx != xv {
                        let msg = format!(
                            "{f}({lx}) = {lfx} but {f}({lfx}) = {} instead of {lx} or null",
                            result_label(self.scheme, Some(src), &ffx)
                        );
                        self.emit(w2(&fx), msg);
                    }
                }
                P::Asymmetry => {
                    if ffx == xv {
                        let msg = format!("{f}({lx}) = {lfx} and {f}({lfx}) = {lx}");
                        self.emit(w2(&fx), msg);
                    }
                }
                P::Idempotency | P::RepSystem => {
                    if ffx != fx {
                        let msg = format!(
                            "{f}({lx}) = {lfx} is not a fixed point: {f}({lfx}) = {}",
                            result_label(self.scheme, Some(src), &ffx)
                        );
                        self.emit(w2(&fx), msg);
                    }
                }
                P::NullIdempotency | P::NullRepSystem => {
                    if !ffx.is_null() && ffx != fx {
                        let msg = format!(
                            "{f}({lx}) = {lfx} but {f}({lfx}) = {} instead of {lfx} or null",
                            result_label(self.scheme, Some(src), &ffx)
                        );
                        self.emit(w2(&fx), msg);
                    }
                }
                P::AntiIdempotency => {
                    if ffx == fx {
                        let msg = format!("{f}({lx}) = {lfx} and {f}({lfx}) = {lfx}");
                        self.emit(w2(&fx), msg);
                    }
                }
                P::Reflexivity
                | P::NullReflexivity
                | P::Irreflexivity
                | P::Equivalence
                | P::NullEquivalence
                | P::Acyclicity => unreachable!("handled above"),
            }
        }
    }

    /// Functional-graph cycle detection: follow `f` from every element,
    /// coloring the path; hitting the open path closes a cycle. Linear in
    /// the population since every element is traversed once.
    fn self_map_acyclic(&mut self, path: &[MapId]) {
        const OPEN: u8 = 1;
        const DONE: u8 = 2;
        let src = self.scheme.chain_source(path);
        let Some(universe) = self.pop(src) else { return };
        let f = self.path_name(path);
        let mut state: HashMap<u64, u8> = HashMap::new();
        for &x in &universe {
            if state.contains_key(&x.0) {
                continue;
            }
            let mut trail: Vec<u64> = Vec::new();
            let mut cur = x.0;
            loop {
                match state.get(&cur).copied() {
                    Some(DONE) => break,
                    Some(OPEN) => {
                        let at = trail.iter().position(|&t| t == cur).unwrap();
                        let cycle: Vec<u64> = trail[at..].to_vec();
                        let mut steps: Vec<String> = cycle
                            .iter()
                            .map(|&t| self.label(src, ElemId(t)))
                            .collect();
                        steps.push(self.label(src, ElemId(cycle[0])));
                        let witnesses = cycle
                            .iter()
                            .map(|&t| Witness::Elem(src, ElemId(t)))
                            .collect();
                        self.emit(
                            witnesses,
                            format!("applying {f} loops: {}", steps.join(" -> ")),
                        );
                        break;
                    }
                    Some(_) => unreachable!(),
                    None => {
                        state.insert(cur, OPEN);
                        trail.push(cur);
                        let cv = self.scheme.elem_value(src, ElemId(cur));
                        match apply_path(self.inst, path, &cv) {
                            Ok(Value::Elem(_, next)) => cur = next.0,
                            Ok(_) => break,
                            Err(e) => {
                                self.emit_eval(vec![Witness::Elem(src, ElemId(cur))], e);
                                break;
                            }
                        }
                    }
                }
            }
            for t in trail {
                state.insert(t, DONE);
            }
        }
    }

    fn path_name(&self, path: &[MapId]) -> String {
        path.iter()
            .map(|&m| self.scheme.mapping(m).name.as_str())
            .collect::<Vec<_>>()
            .join(" o ")
    }

    // ---- single-mapping constraints -------------------------------------------

    fn map_general(&mut self, op: MapGeneralOp, mapping: MapId) {
        match op {
            MapGeneralOp::Totality => self.totality(mapping),
            MapGeneralOp::SingleKey => self.key(self.scheme.mapping(mapping).domain, &[mapping]),
            // Non-primeness is judged by the scheme analyzer, not on data.
            MapGeneralOp::NonPrimeness => {}
            MapGeneralOp::Surjectivity => self.surjectivity(mapping),
            MapGeneralOp::Bijectivity => {
                self.totality(mapping);
                self.key(self.scheme.mapping(mapping).domain, &[mapping]);
                self.surjectivity(mapping);
            }
        }
    }

    fn totality(&mut self, mapping: MapId) {
        let md = self.scheme.mapping(mapping);
        let Some(universe) = self.pop(md.domain) else { return };
        for &x in &universe {
            let xv = self.scheme.elem_value(md.domain, x);
            match apply_mapping(self.inst, mapping, &xv) {
                Ok(v) if v.is_null() => {
                    let msg = format!("{}({}) is null", md.name, self.label(md.domain, x));
                    self.emit(vec![Witness::Elem(md.domain, x)], msg);
                }
                Ok(_) => {}
                Err(e) => self.emit_eval(vec![Witness::Elem(md.domain, x)], e),
            }
        }
    }

    fn surjectivity(&mut self, mapping: MapId) {
        let md = self.scheme.mapping(mapping);
        let Some(universe) = self.pop(md.domain) else { return };
        let mut values = Vec::new();
        for &x in &universe {
            let xv = self.scheme.elem_value(md.domain, x);
            match apply_mapping(self.inst, mapping, &xv) {
                Ok(v) if !v.is_null() => values.push(v),
                Ok(_) => {}
                Err(e) => self.emit_eval(vec![Witness::Elem(md.domain, x)], e),
            }
        }
        let name = md.name.clone();
        if let Some(cod) = self.scheme.object_codomain(&md.codomain) {
            let covered: HashSet<ElemId> = values
                .iter()
                .filter_map(|v| match v {
                    Value::Elem(_, id) => Some(*id),
                    _ => None,
                })
                .collect();
            let Some(targets) = self.pop(cod) else { return };
            for t in targets {
                if !covered.contains(&t) {
                    let msg = format!("no {name} value reaches {}", self.label(cod, t));
                    self.emit(vec![Witness::Elem(cod, t)], msg);
                }
            }
        } else {
            // Value codomains must be enumerable for surjectivity; the
            // builder enforces that, so the population is the enumeration.
            let expected: Vec<Value> = match &md.codomain {
                Codomain::Set(s) => match &self.scheme.set(*s).kind {
                    SetKind::Value { domain } => enumerate_domain(domain),
                    SetKind::System(sys) => sys.population(),
                    _ => Vec::new(),
                },
                Codomain::Inline(d) => enumerate_domain(d),
            };
            let covered: HashSet<Value> = values.into_iter().map(key_part).collect();
            for v in expected {
                if !covered.contains(&key_part(v.clone())) {
                    let msg = format!("no {name} value equals {v}");
                    self.emit(vec![Witness::Value(v)], msg);
                }
            }
        }
    }

    // ---- keys -------------------------------------------------------------

    /// The key tuple of an element, or `None` when a component is null
    /// (null components never collide with anything).
    fn key_tuple(
        &mut self,
        components: &[MapId],
        set: SetId,
        x: ElemId,
    ) -> Option<Option<Vec<Value>>> {
        let xv = self.scheme.elem_value(set, x);
        let mut tuple = Vec::with_capacity(components.len());
        for &m in components {
            match apply_mapping(self.inst, m, &xv) {
                Ok(Value::Null) => return Some(None),
                Ok(v) => tuple.push(key_part(v)),
                Err(e) => {
                    self.emit_eval(vec![Witness::Elem(set, x)], e);
                    return None;
                }
            }
        }
        Some(Some(tuple))
    }

    fn key(&mut self, set: SetId, components: &[MapId]) {
        let Some(universe) = self.pop(set) else { return };
        let names = self.component_names(components);
        let mut groups: HashMap<Vec<Value>, Vec<ElemId>> = HashMap::new();
        for &x in &universe {
            let Some(tuple) = self.key_tuple(components, set, x) else {
                continue;
            };
            let Some(tuple) = tuple else { continue };
            let group = groups.entry(tuple).or_default();
            for &prior in group.iter() {
                let msg = format!(
                    "{} and {} agree on {names}",
                    self.label(set, prior),
                    self.label(set, x)
                );
                self.emit(vec![Witness::Elem(set, prior), Witness::Elem(set, x)], msg);
            }
            group.push(x);
        }
    }

    fn subkey(&mut self, set: SetId, sub: &[MapId], full: &[MapId]) {
        let guards: Vec<MapId> = full.iter().copied().filter(|m| !sub.contains(m)).collect();
        let Some(universe) = self.pop(set) else { return };
        let names = self.component_names(sub);
        let guard_names = self.component_names(&guards);
        let mut groups: HashMap<Vec<Value>, Vec<ElemId>> = HashMap::new();
        'rows: for &x in &universe {
            let xv = self.scheme.elem_value(set, x);
            for &g in &guards {
                match apply_mapping(self.inst, g, &xv) {
                    Ok(v) if v.is_null() => {}
                    Ok(_) => continue 'rows,
                    Err(e) => {
                        self.emit_eval(vec![Witness::Elem(set, x)], e);
                        continue 'rows;
                    }
                }
            }
            let Some(tuple) = self.key_tuple(sub, set, x) else {
                continue;
            };
            let Some(tuple) = tuple else { continue };
            let group = groups.entry(tuple).or_default();
            for &prior in group.iter() {
                let msg = format!(
                    "{} and {} have null {guard_names} and agree on {names}",
                    self.label(set, prior),
                    self.label(set, x)
                );
                self.emit(vec![Witness::Elem(set, prior), Witness::Elem(set, x)], msg);
            }
            group.push(x);
        }
    }

    fn component_names(&self, components: &[MapId]) -> String {
        components
            .iter()
            .map(|&m| self.scheme.mapping(m).name.as_str())
            .collect::<Vec<_>>()
            .join(" . ")
    }

    // ---- existence patterns -------------------------------------------------

    fn existence(&mut self, set: SetId, antecedent: &[(MapId, bool)], consequent: &[(MapId, bool)]) {
        let Some(universe) = self.pop(set) else { return };
        'rows: for &x in &universe {
            let xv = self.scheme.elem_value(set, x);
            let read = |cx: &mut Self, m: MapId| -> Option<bool> {
                match apply_mapping(cx.inst, m, &xv) {
                    Ok(v) => Some(!v.is_null()),
                    Err(e) => {
                        cx.emit_eval(vec![Witness::Elem(set, x)], e);
                        None
                    }
                }
            };
            for &(m, wants_value) in antecedent {
                match read(self, m) {
                    Some(has) if has == wants_value => {}
                    Some(_) => continue 'rows,
                    None => continue 'rows,
                }
            }
            for &(m, wants_value) in consequent {
                match read(self, m) {
                    Some(has) if has != wants_value => {
                        let name = &self.scheme.mapping(m).name;
                        let state = if wants_value { "null" } else { "set" };
                        let msg = format!(
                            "{}: {} holds but {name} is {state}",
                            self.label(set, x),
                            self.pattern_text(antecedent),
                        );
                        self.emit(vec![Witness::Elem(set, x)], msg);
                    }
                    Some(_) => {}
                    None => continue 'rows,
                }
            }
        }
    }

    fn pattern_text(&self, side: &[(MapId, bool)]) -> String {
        side.iter()
            .map(|&(m, positive)| {
                let name = &self.scheme.mapping(m).name;
                if positive {
                    format!("{name} exists")
                } else {
                    format!("not {name} exists")
                }
            })
            .collect::<Vec<_>>()
            .join(" and ")
    }

    // ---- diagrams ------------------------------------------------------------

    fn path_pair(&mut self, mode: PathPairMode, left: &[MapId], right: &[MapId]) {
        let src = self.scheme.chain_source(left);
        let Some(universe) = self.pop(src) else { return };
        let (lname, rname) = (self.path_name(left), self.path_name(right));
        let scheme = self.scheme;
        let lh = scheme.object_codomain(&scheme.mapping(left[0]).codomain);
        let rh = scheme.object_codomain(&scheme.mapping(right[0]).codomain);
        for &x in &universe {
            let xv = scheme.elem_value(src, x);
            let (l, r) = match (
                apply_path(self.inst, left, &xv),
                apply_path(self.inst, right, &xv),
            ) {
                (Ok(l), Ok(r)) => (l, r),
                (Err(e), _) | (_, Err(e)) => {
                    self.emit_eval(vec![Witness::Elem(src, x)], e);
                    continue;
                }
            };
            let lx = self.label(src, x);
            match mode {
                PathPairMode::Equal => {
                    if l.is_null() || r.is_null() || l.equals(&r) != Some(true) {
                        let msg = format!(
                            "{lname}({lx}) = {} but {rname}({lx}) = {}",
                            result_label(scheme, lh, &l),
                            result_label(scheme, rh, &r)
                        );
                        self.emit(
                            vec![
                                Witness::Elem(src, x),
                                result_witness(lh, &l),
                                result_witness(rh, &r),
                            ],
                            msg,
                        );
                    }
                }
                PathPairMode::NullEqual => {
                    if !l.is_null() && !r.is_null() && l.equals(&r) != Some(true) {
                        let msg = format!(
                            "{lname}({lx}) = {} but {rname}({lx}) = {}",
                            result_label(scheme, lh, &l),
                            result_label(scheme, rh, &r)
                        );
                        self.emit(
                            vec![
                                Witness::Elem(src, x),
                                result_witness(lh, &l),
                                result_witness(rh, &r),
                            ],
                            msg,
                        );
                    }
                }
                PathPairMode::Anti => {
                    if !l.is_null() && !r.is_null() && l.equals(&r) == Some(true) {
                        let msg = format!(
                            "{lname}({lx}) and {rname}({lx}) are both {}",
                            result_label(scheme, lh, &l)
                        );
                        self.emit(vec![Witness::Elem(src, x), result_witness(lh, &l)], msg);
                    }
                }
            }
        }
    }

    // ---- closed formulas -------------------------------------------------------

    fn formula(&mut self, f: &crate::model::Formula) {
        if f.binders.is_empty() {
            match eval_bool(self.inst, &f.body, &[]) {
                Ok(true) => {}
                Ok(false) => self.emit(Vec::new(), "does not hold".to_string()),
                Err(e) => self.emit_eval(Vec::new(), e),
            }
            return;
        }
        let mut pops = Vec::with_capacity(f.binders.len());
        for b in &f.binders {
            match self.pop(b.set) {
                Some(p) if p.is_empty() => return, // vacuously true
                Some(p) => pops.push(p),
                None => return,
            }
        }
        let n = f.binders.len();
        let mut idx = vec![0usize; n];
        let mut binding: Vec<Value> = (0..n)
            .map(|k| self.scheme.elem_value(f.binders[k].set, pops[k][0]))
            .collect();
        loop {
            match eval_bool(self.inst, &f.body, &binding) {
                Ok(true) => {}
                Ok(false) => {
                    let (witnesses, msg) = self.binding_report(f, &pops, &idx, None);
                    self.emit(witnesses, msg);
                }
                Err(e) => {
                    let (witnesses, msg) = self.binding_report(f, &pops, &idx, Some(&e));
                    self.emit(witnesses, msg);
                }
            }
            // Advance the rightmost binder; on wrap, carry leftwards.
            let mut k = n - 1;
            loop {
                idx[k] += 1;
                if idx[k] < pops[k].len() {
                    binding[k] = self.scheme.elem_value(f.binders[k].set, pops[k][idx[k]]);
                    break;
                }
                idx[k] = 0;
                binding[k] = self.scheme.elem_value(f.binders[k].set, pops[k][0]);
                if k == 0 {
                    return;
                }
                k -= 1;
            }
        }
    }

    fn binding_report(
        &self,
        f: &crate::model::Formula,
        pops: &[Vec<ElemId>],
        idx: &[usize],
        error: Option<&EvalError>,
    ) -> (Vec<Witness>, String) {
        let mut witnesses = Vec::with_capacity(idx.len());
        let mut parts = Vec::with_capacity(idx.len());
        for (k, b) in f.binders.iter().enumerate() {
            let id = pops[k][idx[k]];
            witnesses.push(Witness::Elem(b.set, id));
            parts.push(format!("{} = {}", b.var, self.label(b.set, id)));
        }
        let at = parts.join(", ");
        let msg = match error {
            None => format!("does not hold at {at}"),
            Some(e) => format!("cannot be checked at {at}: {}", e.message),
        };
        (witnesses, msg)
    }

    // ---- system constraints -----------------------------------------------------

    fn range(&mut self, mapping: MapId) {
        let md = self.scheme.mapping(mapping);
        let Some(domain) = self.scheme.value_domain(&md.codomain) else {
            return;
        };
        let Some(universe) = self.pop(md.domain) else { return };
        let today = self.inst.today();
        for &x in &universe {
            let xv = self.scheme.elem_value(md.domain, x);
            let v = match apply_mapping(self.inst, mapping, &xv) {
                Ok(v) if v.is_null() => continue,
                Ok(v) => v,
                Err(e) => {
                    self.emit_eval(vec![Witness::Elem(md.domain, x)], e);
                    continue;
                }
            };
            if let Err(dv) = domain.admit(&v, today) {
                let msg = format!(
                    "{}({}) = {}: {}",
                    md.name,
                    self.label(md.domain, x),
                    dv.value,
                    dv.reason
                );
                self.emit(vec![Witness::Elem(md.domain, x), Witness::Value(v)], msg);
            }
        }
    }

    fn ref_integrity(&mut self, mapping: MapId) {
        let md = self.scheme.mapping(mapping);
        let Some(cod) = self.scheme.object_codomain(&md.codomain) else {
            return;
        };
        let Some(universe) = self.pop(md.domain) else { return };
        for &x in &universe {
            let xv = self.scheme.elem_value(md.domain, x);
            match apply_mapping(self.inst, mapping, &xv) {
                Ok(Value::Elem(_, id)) => {
                    if !self.inst.contains(cod, id) {
                        let msg = format!(
                            "{}({}) = {} is not a member of {}",
                            md.name,
                            self.label(md.domain, x),
                            self.label(cod, id),
                            self.scheme.set(cod).name
                        );
                        self.emit(vec![Witness::Elem(md.domain, x)], msg);
                    }
                }
                Ok(_) => {}
                Err(e) => self.emit_eval(vec![Witness::Elem(md.domain, x)], e),
            }
        }
    }
}

/// Canonical key image of a value: integers fold into decimals so that
/// numerically equal key components collide regardless of representation.
fn key_part(v: Value) -> Value {
    match v {
        Value::Int(i) => Value::Dec(Decimal::from_int(i)),
        other => other,
    }
}

/// Label a path result for messages. Elements are named through the set the
/// path maps into, so messages speak in the constraint's own terms rather
/// than through the canonical tag of a shared id scope.
fn result_label(scheme: &Scheme, hint: Option<SetId>, v: &Value) -> String {
    match (hint, v) {
        (Some(h), Value::Elem(_, id)) => elem_label(scheme, h, *id),
        _ => value_label(scheme, v),
    }
}

/// Witness for a path result: elements point into the set the path maps
/// into, scalar results are carried as plain values.
fn result_witness(hint: Option<SetId>, v: &Value) -> Witness {
    match (hint, v) {
        (Some(h), Value::Elem(_, id)) => Witness::Elem(h, *id),
        _ => Witness::Value(v.clone()),
    }
}

/// The admitted values of an enumerable domain, in declaration order.
/// Explicit enumerations list themselves; booleans admit false and true;
/// anything else is unbounded and yields nothing.
fn enumerate_domain(d: &ValueDomain) -> Vec<Value> {
    match &d.shape {
        DomainShape::Enum(vs) => vs.clone(),
        _ if d.base == BaseType::Boole => vec![Value::Bool(false), Value::Bool(true)],
        _ => Vec::new(),
    }
}

/// An observation that a concatenated key may be wider than the data needs:
/// a proper sub-product of its components is itself collision-free on the
/// current population. Not a violation — the data satisfies the key — but
/// worth a look when reviewing the scheme.
#[derive(Clone, PartialEq, Debug)]
pub struct KeyAdvisory {
    pub constraint: String,
    pub components: Vec<String>,
    pub message: String,
}

/// Check every concatenated key for sub-products that would already be
/// collision-free. Only the one-component-removed sub-products need
/// checking: collision-freedom is inherited upward, so a smaller
/// collision-free sub-product implies a collision-free one of these.
pub fn key_advisories(inst: &Instance) -> Vec<KeyAdvisory> {
    let scheme = inst.scheme();
    let mut out = Vec::new();
    for c in scheme.constraints() {
        let ConstraintBody::Key { set, components } = &c.body else {
            continue;
        };
        if components.len() < 2 {
            continue;
        }
        for dropped in 0..components.len() {
            let sub: Vec<MapId> = components
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != dropped)
                .map(|(_, &m)| m)
                .collect();
            if collision_free(inst, *set, &sub) == Some(true) {
                let names: Vec<String> = sub
                    .iter()
                    .map(|&m| scheme.mapping(m).name.clone())
                    .collect();
                let message = format!(
                    "{} would already be collision-free on the current data; \
                     the key {} may be wider than necessary",
                    names.join(" . "),
                    c.id
                );
                out.push(KeyAdvisory {
                    constraint: c.id.clone(),
                    components: names,
                    message,
                });
            }
        }
    }
    out
}

/// Whether the component product has no collisions on the current data.
/// `None` when a component cannot be evaluated.
fn collision_free(inst: &Instance, set: SetId, components: &[MapId]) -> Option<bool> {
    let scheme = inst.scheme();
    let mut seen: HashSet<Vec<Value>> = HashSet::new();
    for x in population(inst, set).ok()? {
        let xv = scheme.elem_value(set, x);
        let mut tuple = Vec::with_capacity(components.len());
        let mut null = false;
        for &m in components {
            match apply_mapping(inst, m, &xv).ok()? {
                Value::Null => {
                    null = true;
                    break;
                }
                v => tuple.push(key_part(v)),
            }
        }
        if !null && !seen.insert(tuple) {
            return Some(false);
        }
    }
    Some(true)
}
