//! Resolution of a raw scheme into a [`Scheme`]: name binding, type
//! checking, annotation materialization, and attachment of the implicit
//! system constraints.

use super::domain::DomainShape;
use super::formula::{Binder, BoolExpr, Formula, Term};
use super::raw::*;
use super::*;
use crate::ids::{MapId, SetId};
use crate::value::ArithOp;
use std::collections::{HashMap, HashSet};

/// A semantic error in a scheme, tagged with the declaration it arose in.
#[derive(thiserror::Error, Clone, PartialEq, Eq, Debug)]
#[error("{locus}: {message}")]
pub struct ModelError {
    pub locus: String,
    pub message: String,
}

fn fail<T>(locus: impl Into<String>, message: impl Into<String>) -> Result<T, ModelError> {
    Err(ModelError {
        locus: locus.into(),
        message: message.into(),
    })
}

/// Resolve a raw scheme. Declarations may reference sets and mappings
/// declared later in the text; every name lives in one shared namespace.
pub fn build_scheme(raw: &RawScheme) -> Result<Scheme, ModelError> {
    Builder::new(raw)?.run()
}

/// The value category of a term during type checking.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Ty {
    Elem(SetId),
    Num,
    Text,
    Date,
    Bool,
}

impl Ty {
    fn describe(self, b: &Builder) -> String {
        match self {
            Ty::Elem(s) => format!("element of {}", b.sets[s.0 as usize].name),
            Ty::Num => "number".into(),
            Ty::Text => "text".into(),
            Ty::Date => "date".into(),
            Ty::Bool => "boolean".into(),
        }
    }
}

/// How bare names in a term resolve.
enum Ctx {
    /// Bare mapping names apply to the implicit row (`Var(0)`).
    PointFree(SetId),
    /// Names are quantified variables.
    Binders(Vec<(String, SetId)>),
}

struct Builder<'a> {
    raw: &'a RawScheme,
    set_ids: HashMap<String, SetId>,
    map_ids: HashMap<String, MapId>,
    sets: Vec<SetDecl>,
    mappings: Vec<Option<MappingDecl>>,
    constraints: Vec<ConstraintDecl>,
    advisories: Vec<CuratedAdvisory>,
    /// Union-find parents over set ids; related object sets share an
    /// element-id scope.
    uf: Vec<u32>,
    pending_defs: Vec<(MapId, &'a RawMapExpr)>,
    pending_preds: Vec<(SetId, &'a RawBool)>,
}

impl<'a> Builder<'a> {
    /// Pass 0: pre-register every set and mapping name (including the
    /// canonical projections of relationship sets) so later passes can
    /// freely resolve forward references.
    fn new(raw: &'a RawScheme) -> Result<Builder<'a>, ModelError> {
        let mut b = Builder {
            raw,
            set_ids: HashMap::new(),
            map_ids: HashMap::new(),
            sets: Vec::new(),
            mappings: Vec::new(),
            constraints: Vec::new(),
            advisories: Vec::new(),
            uf: Vec::new(),
            pending_defs: Vec::new(),
            pending_preds: Vec::new(),
        };
        for sys in [SystemSet::Boole, SystemSet::Empty] {
            let id = SetId(b.set_ids.len() as u32);
            b.set_ids.insert(sys.name().into(), id);
            b.sets.push(SetDecl {
                name: sys.name().into(),
                kind: SetKind::System(sys),
            });
        }
        let mut map_count = 0u32;
        for decl in &raw.decls {
            match decl {
                RawDecl::Set(s) => {
                    let locus = format!("set {}", s.name);
                    b.claim_name(&s.name, &locus)?;
                    b.set_ids.insert(s.name.clone(), SetId(b.set_ids.len() as u32));
                    if let RawSetKind::Relationship(comps) = &s.kind {
                        for c in comps {
                            let role = c.role.clone().unwrap_or_else(|| c.target.clone());
                            b.claim_name(&role, &locus)?;
                            b.map_ids.insert(role, MapId(map_count));
                            map_count += 1;
                        }
                    }
                }
                RawDecl::Map(m) => {
                    let locus = format!("map {}", m.name);
                    b.claim_name(&m.name, &locus)?;
                    b.map_ids.insert(m.name.clone(), MapId(map_count));
                    map_count += 1;
                }
                _ => {}
            }
        }
        b.mappings.resize(map_count as usize, None);
        Ok(b)
    }

    fn claim_name(&self, name: &str, locus: &str) -> Result<(), ModelError> {
        if name.is_empty() {
            return fail(locus, "names must not be empty");
        }
        if self.set_ids.contains_key(name) || self.map_ids.contains_key(name) {
            return fail(locus, format!("the name {name} is already declared"));
        }
        Ok(())
    }

    fn run(mut self) -> Result<Scheme, ModelError> {
        self.resolve_set_kinds()?;
        self.check_set_kinds()?;
        self.resolve_mappings()?;
        self.seed_scopes();
        self.resolve_definitions()?;
        self.resolve_predicates()?;
        self.resolve_constraints()?;
        self.attach_system_constraints();
        self.finish()
    }

    // ---- sets ----------------------------------------------------------

    fn resolve_set_kinds(&mut self) -> Result<(), ModelError> {
        for decl in &self.raw.decls {
            let RawDecl::Set(s) = decl else { continue };
            let locus = format!("set {}", s.name);
            let kind = match &s.kind {
                RawSetKind::Entity => SetKind::Entity,
                RawSetKind::Value(rd) => SetKind::Value {
                    domain: self.resolve_domain(rd, &locus)?,
                },
                RawSetKind::Relationship(comps) => {
                    if comps.len() < 2 {
                        return fail(&locus, "a relationship needs at least two components");
                    }
                    let mut seen = HashSet::new();
                    let mut components = Vec::new();
                    for c in comps {
                        let role = c.role.clone().unwrap_or_else(|| c.target.clone());
                        if !seen.insert(role.clone()) {
                            return fail(&locus, format!("duplicate component role {role}"));
                        }
                        let target = self.set_named(&c.target, &locus)?;
                        let mapping = self.map_ids[&role];
                        components.push(Component {
                            role,
                            target,
                            mapping,
                        });
                    }
                    SetKind::Relationship { components }
                }
                RawSetKind::Computed { base, predicate } => {
                    let base = self.set_named(base, &locus)?;
                    self.pending_preds
                        .push((self.set_ids[&s.name], predicate));
                    SetKind::Computed {
                        base,
                        predicate: BoolExpr::And(Vec::new()),
                    }
                }
            };
            self.sets.push(SetDecl {
                name: s.name.clone(),
                kind,
            });
        }
        Ok(())
    }

    /// Cross-checks that need every set kind known: relationship component
    /// targets, computed bases, and base-chain cycles.
    fn check_set_kinds(&mut self) -> Result<(), ModelError> {
        for i in 0..self.sets.len() {
            let locus = format!("set {}", self.sets[i].name);
            match &self.sets[i].kind {
                SetKind::Relationship { components } => {
                    for c in components {
                        if !self.sets[c.target.0 as usize].is_object() {
                            return fail(
                                &locus,
                                format!(
                                    "component {} must target an entity or relationship set",
                                    c.role
                                ),
                            );
                        }
                    }
                }
                SetKind::Computed { base, .. } => {
                    let kind = &self.sets[base.0 as usize].kind;
                    if !matches!(
                        kind,
                        SetKind::Entity | SetKind::Relationship { .. } | SetKind::Computed { .. }
                    ) {
                        return fail(&locus, "a computed set's base must hold elements");
                    }
                }
                _ => {}
            }
        }
        // Base chains must reach an object set without looping.
        for (i, s) in self.sets.iter().enumerate() {
            if !matches!(s.kind, SetKind::Computed { .. }) {
                continue;
            }
            let mut seen = HashSet::from([i]);
            let mut cur = i;
            while let SetKind::Computed { base, .. } = self.sets[cur].kind {
                cur = base.0 as usize;
                if !seen.insert(cur) {
                    return fail(
                        format!("set {}", s.name),
                        "computed sets form a base cycle",
                    );
                }
            }
        }
        Ok(())
    }

    /// The object set a computed set ultimately restricts.
    fn root_set(&self, set: SetId) -> SetId {
        let mut cur = set;
        while let SetKind::Computed { base, .. } = self.sets[cur.0 as usize].kind {
            cur = base;
        }
        cur
    }

    fn resolve_domain(&self, rd: &RawDomain, locus: &str) -> Result<ValueDomain, ModelError> {
        let lift = |r: Result<ValueDomain, String>| r.map_err(|m| ModelError {
            locus: locus.into(),
            message: m,
        });
        let mut domain = match rd {
            RawDomain::Base(b) => {
                b.well_formed().map_err(|m| ModelError {
                    locus: locus.into(),
                    message: m,
                })?;
                ValueDomain::full(*b)
            }
            RawDomain::Interval {
                base: Some(b),
                lo,
                hi,
                lo_open,
                hi_open,
            } => {
                let d = ValueDomain {
                    base: *b,
                    shape: DomainShape::Interval {
                        lo: lo.clone(),
                        hi: hi.clone(),
                        lo_open: *lo_open,
                        hi_open: *hi_open,
                    },
                };
                lift(d.well_formed().map(|_| d))?
            }
            RawDomain::Interval {
                base: None,
                lo,
                hi,
                lo_open,
                hi_open,
            } => lift(ValueDomain::infer_interval(
                lo.clone(),
                hi.clone(),
                *lo_open,
                *hi_open,
            ))?,
            RawDomain::Enum { base: Some(b), values } => {
                let d = ValueDomain {
                    base: *b,
                    shape: DomainShape::Enum(values.clone()),
                };
                lift(d.well_formed().map(|_| d))?
            }
            RawDomain::Enum { base: None, values } => {
                lift(ValueDomain::infer_enum(values.clone()))?
            }
        };
        // Canonicalize enumeration members (integer literals coerce to
        // decimals under decimal bases) so membership tests can compare
        // canonical forms directly.
        if let DomainShape::Enum(vs) = &domain.shape {
            let base = ValueDomain::full(domain.base);
            let canon: Result<Vec<_>, _> = vs.iter().map(|v| base.conform_base(v)).collect();
            domain.shape = DomainShape::Enum(canon.map_err(|e| ModelError {
                locus: locus.into(),
                message: e.reason,
            })?);
        }
        Ok(domain)
    }

    // ---- mappings ------------------------------------------------------

    fn resolve_mappings(&mut self) -> Result<(), ModelError> {
        let mut next = 0usize;
        for decl in &self.raw.decls {
            match decl {
                RawDecl::Set(s) => {
                    let set = self.set_ids[&s.name];
                    let SetKind::Relationship { components } = self.sets[set.0 as usize].kind.clone()
                    else {
                        continue;
                    };
                    for c in &components {
                        debug_assert_eq!(c.mapping.0 as usize, next);
                        self.mappings[next] = Some(MappingDecl {
                            name: c.role.clone(),
                            domain: set,
                            codomain: Codomain::Set(c.target),
                            kind: MapKind::Structural,
                            nullable: false,
                            is_projection: true,
                            default: None,
                            definition: None,
                        });
                        next += 1;
                    }
                }
                RawDecl::Map(m) => {
                    debug_assert_eq!(self.map_ids[&m.name].0 as usize, next);
                    let built = self.resolve_mapping(m)?;
                    self.mappings[next] = Some(built);
                    next += 1;
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn resolve_mapping(&mut self, m: &'a RawMap) -> Result<MappingDecl, ModelError> {
        let locus = format!("map {}", m.name);
        let domain = self.set_named(&m.domain, &locus)?;
        if !self.sets[domain.0 as usize].is_object() {
            return fail(&locus, "mappings are defined on entity or relationship sets");
        }
        let codomain = match &m.codomain {
            RawCodomain::Named(n) => {
                let id = self.set_named(n, &locus)?;
                match &self.sets[id.0 as usize].kind {
                    SetKind::System(SystemSet::Empty) => {
                        return fail(&locus, "EMPTY cannot be a codomain")
                    }
                    // A mapping into a subset is a mapping into its base
                    // plus a range condition; requiring the base keeps
                    // stored references checkable without evaluating
                    // predicates.
                    SetKind::Computed { .. } => {
                        return fail(
                            &locus,
                            format!("{n} is a computed set; map into its base set instead"),
                        )
                    }
                    _ => Codomain::Set(id),
                }
            }
            RawCodomain::Inline(rd) => Codomain::Inline(self.resolve_domain(rd, &locus)?),
        };
        let structural = self.object_codomain(&codomain).is_some();
        let mut out = MappingDecl {
            name: m.name.clone(),
            domain,
            codomain,
            kind: if structural {
                MapKind::Structural
            } else {
                MapKind::Attribute
            },
            nullable: true,
            is_projection: false,
            default: None,
            definition: None,
        };
        let mut seen = HashSet::new();
        for a in &m.annots {
            let tag = match a {
                RawAnnot::Total => "total",
                RawAnnot::Key => "key",
                RawAnnot::NonPrime => "nonprime",
                RawAnnot::Surjective => "surjective",
                RawAnnot::Bijective => "bijective",
                RawAnnot::Default(_) => "default",
                RawAnnot::Property(p) => p.name(),
                RawAnnot::Definition(_) => "definition",
            };
            if !seen.insert(tag) {
                return fail(&locus, format!("duplicate {tag} annotation"));
            }
            match a {
                RawAnnot::Total | RawAnnot::Bijective => out.nullable = false,
                RawAnnot::Default(v) => {
                    let Some(vd) = self.value_domain_of(&out.codomain) else {
                        return fail(&locus, "defaults apply to attribute mappings");
                    };
                    let canon = vd.conform_base(v).map_err(|e| ModelError {
                        locus: locus.clone(),
                        message: format!("default value: {}", e.reason),
                    })?;
                    out.default = Some(canon);
                }
                RawAnnot::Definition(d) => {
                    out.kind = MapKind::Computed;
                    self.pending_defs.push((self.map_ids[&m.name], d));
                }
                RawAnnot::Property(p) => {
                    if p.as_self_map().is_none() {
                        return fail(
                            &locus,
                            format!("{} is not a mapping property", p.name()),
                        );
                    }
                }
                _ => {}
            }
        }
        if out.default.is_some() && out.kind == MapKind::Computed {
            return fail(&locus, "computed mappings cannot carry defaults");
        }
        if (seen.contains("surjective") || seen.contains("bijective"))
            && !self.enumerable_codomain(&out.codomain)
        {
            return fail(
                &locus,
                "surjectivity needs an object, enumerated, or boolean codomain",
            );
        }
        Ok(out)
    }

    // ---- scopes --------------------------------------------------------

    /// Object sets connected by set constraints or computed-set bases share
    /// one element-id scope; the store draws ids per scope, and the type
    /// checker treats same-scope element values as interchangeable.
    fn seed_scopes(&mut self) {
        self.uf = (0..self.sets.len() as u32).collect();
        for (i, s) in self.sets.iter().enumerate() {
            if let SetKind::Computed { base, .. } = s.kind {
                union(&mut self.uf, i as u32, base.0);
            }
        }
        for decl in &self.raw.decls {
            let RawDecl::Constraint(c) = decl else { continue };
            let RawConstraintBody::SetRelation { left, right, .. } = &c.body else {
                continue;
            };
            let Some(l) = self.set_ids.get(left.as_str()) else { continue };
            for r in right {
                if let Some(r) = self.set_ids.get(r.as_str()) {
                    union(&mut self.uf, l.0, r.0);
                }
            }
        }
    }

    fn scope(&self, set: SetId) -> u32 {
        find(&self.uf, set.0)
    }

    fn assignable(&self, sub: SetId, sup: SetId) -> bool {
        sub == sup || self.scope(sub) == self.scope(sup)
    }

    // ---- computed definitions ------------------------------------------

    fn resolve_definitions(&mut self) -> Result<(), ModelError> {
        for (id, raw_def) in std::mem::take(&mut self.pending_defs) {
            let me = self.mappings[id.0 as usize].as_ref().unwrap();
            let locus = format!("map {}", me.name);
            let (domain, codomain) = (me.domain, me.codomain.clone());
            let def = match raw_def {
                RawMapExpr::Chain(names) => {
                    let chain = self.resolve_chain(names, &locus)?;
                    let src = self.map_ref(*chain.last().unwrap()).domain;
                    if !self.assignable(domain, src) {
                        return fail(
                            &locus,
                            "the composition does not start at the mapping's domain",
                        );
                    }
                    let target = self.map_ref(chain[0]).codomain.clone();
                    self.check_codomain_fit(&codomain, &target, &locus)?;
                    MapExpr::Chain(chain)
                }
                RawMapExpr::Expr(t) => {
                    let (term, ty) = self.resolve_term(t, &Ctx::PointFree(domain), &locus)?;
                    let want = self.codomain_ty(&codomain);
                    if ty != want {
                        return fail(
                            &locus,
                            format!(
                                "the definition produces a {} but the codomain holds a {}",
                                ty.describe(self),
                                want.describe(self)
                            ),
                        );
                    }
                    MapExpr::Expr(term)
                }
            };
            self.mappings[id.0 as usize].as_mut().unwrap().definition = Some(def);
        }
        // Definitions may reference other computed mappings; reject cycles.
        let mut state = vec![0u8; self.mappings.len()]; // 0 fresh, 1 active, 2 done
        for i in 0..self.mappings.len() {
            self.definition_dfs(i, &mut state)?;
        }
        Ok(())
    }

    fn definition_dfs(&self, i: usize, state: &mut Vec<u8>) -> Result<(), ModelError> {
        match state[i] {
            1 => {
                return fail(
                    format!("map {}", self.map_ref(MapId(i as u32)).name),
                    "computed mappings form a definition cycle",
                )
            }
            2 => return Ok(()),
            _ => {}
        }
        state[i] = 1;
        let mut deps = Vec::new();
        match &self.map_ref(MapId(i as u32)).definition {
            Some(MapExpr::Chain(ms)) => deps.extend(ms.iter().copied()),
            Some(MapExpr::Expr(t)) => t.walk(&mut |t| {
                if let Term::Apply(m, _) = t {
                    deps.push(*m);
                }
            }),
            None => {}
        }
        for d in deps {
            self.definition_dfs(d.0 as usize, state)?;
        }
        state[i] = 2;
        Ok(())
    }

    fn resolve_predicates(&mut self) -> Result<(), ModelError> {
        for (set, raw_pred) in std::mem::take(&mut self.pending_preds) {
            let locus = format!("set {}", self.sets[set.0 as usize].name);
            let root = self.root_set(set);
            let body = self.resolve_bool(raw_pred, &Ctx::PointFree(root), &locus)?;
            let SetKind::Computed { predicate, .. } = &mut self.sets[set.0 as usize].kind else {
                unreachable!()
            };
            *predicate = body;
        }
        Ok(())
    }

    // ---- constraints -----------------------------------------------------

    fn resolve_constraints(&mut self) -> Result<(), ModelError> {
        for decl in &self.raw.decls {
            match decl {
                RawDecl::Map(m) => self.materialize_annotations(m)?,
                RawDecl::Constraint(c) => {
                    let locus = format!("constraint {}", c.id);
                    let body = self.resolve_constraint_body(&c.body, &locus)?;
                    self.push_constraint(c.id.clone(), ConstraintOrigin::Explicit, body);
                }
                RawDecl::Advisory { constraints, note } => {
                    self.advisories.push(CuratedAdvisory {
                        constraints: constraints.clone(),
                        note: note.clone(),
                    });
                }
                RawDecl::Set(_) => {}
            }
        }
        Ok(())
    }

    fn materialize_annotations(&mut self, m: &RawMap) -> Result<(), ModelError> {
        let id = self.map_ids[&m.name];
        let locus = format!("map {}", m.name);
        for a in &m.annots {
            let (suffix, body) = match a {
                RawAnnot::Total => (
                    "total",
                    ConstraintBody::MapGeneral {
                        op: MapGeneralOp::Totality,
                        mapping: id,
                    },
                ),
                RawAnnot::Key => (
                    "key",
                    ConstraintBody::MapGeneral {
                        op: MapGeneralOp::SingleKey,
                        mapping: id,
                    },
                ),
                RawAnnot::NonPrime => (
                    "nonprime",
                    ConstraintBody::MapGeneral {
                        op: MapGeneralOp::NonPrimeness,
                        mapping: id,
                    },
                ),
                RawAnnot::Surjective => (
                    "surjective",
                    ConstraintBody::MapGeneral {
                        op: MapGeneralOp::Surjectivity,
                        mapping: id,
                    },
                ),
                RawAnnot::Bijective => (
                    "bijective",
                    ConstraintBody::MapGeneral {
                        op: MapGeneralOp::Bijectivity,
                        mapping: id,
                    },
                ),
                RawAnnot::Default(_) => ("default", ConstraintBody::Default { mapping: id }),
                RawAnnot::Property(p) => {
                    let property = p.as_self_map().unwrap();
                    self.check_self_map_path(&[id], &locus)?;
                    (
                        p.name(),
                        ConstraintBody::SelfMapProperty {
                            path: vec![id],
                            property,
                        },
                    )
                }
                RawAnnot::Definition(_) => continue,
            };
            self.push_constraint(
                format!("{}.{suffix}", m.name),
                ConstraintOrigin::Annotation,
                body,
            );
        }
        Ok(())
    }

    fn resolve_constraint_body(
        &self,
        body: &RawConstraintBody,
        locus: &str,
    ) -> Result<ConstraintBody, ModelError> {
        match body {
            RawConstraintBody::Property { target, property } => {
                self.resolve_property(target, *property, locus)
            }
            RawConstraintBody::Key { set, components } => {
                let set = self.object_set_named(set, locus)?;
                if components.len() < 2 {
                    return fail(locus, "concatenated keys need at least two components");
                }
                let components = self.key_components(set, components, locus)?;
                Ok(ConstraintBody::Key { set, components })
            }
            RawConstraintBody::Subkey { set, sub, full } => {
                let set = self.object_set_named(set, locus)?;
                let sub_ids = self.key_components(set, sub, locus)?;
                let full_ids = self.key_components(set, full, locus)?;
                if sub_ids.is_empty() {
                    return fail(locus, "the subkey must name at least one component");
                }
                if !sub_ids.iter().all(|m| full_ids.contains(m)) {
                    return fail(locus, "the subkey must be part of the full key");
                }
                if sub_ids.len() == full_ids.len() {
                    return fail(locus, "the subkey must be a proper part of the full key");
                }
                Ok(ConstraintBody::Subkey {
                    set,
                    sub: sub_ids,
                    full: full_ids,
                })
            }
            RawConstraintBody::Existence {
                antecedent,
                consequent,
            } => {
                if antecedent.is_empty() || consequent.is_empty() {
                    return fail(locus, "both sides of => must name mappings");
                }
                let mut common: Option<SetId> = None;
                let resolve = |side: &[(String, bool)],
                                   common: &mut Option<SetId>|
                 -> Result<Vec<(MapId, bool)>, ModelError> {
                    side.iter()
                        .map(|(name, positive)| {
                            let m = self.map_named(name, locus)?;
                            let d = self.map_ref(m).domain;
                            match common {
                                None => *common = Some(d),
                                Some(c) if *c == d => {}
                                Some(_) => {
                                    return fail(
                                        locus,
                                        "all mappings must share one domain set",
                                    )
                                }
                            }
                            Ok((m, *positive))
                        })
                        .collect()
                };
                let antecedent = resolve(antecedent, &mut common)?;
                let consequent = resolve(consequent, &mut common)?;
                Ok(ConstraintBody::ExistencePattern {
                    set: common.unwrap(),
                    antecedent,
                    consequent,
                })
            }
            RawConstraintBody::SetRelation { op, left, right } => {
                let expect = match op {
                    SetRelOp::Union | SetRelOp::DirectSum => right.len() >= 2,
                    _ => right.len() == 1,
                };
                if !expect {
                    return fail(locus, "wrong number of sets on the right-hand side");
                }
                let left = self.object_set_named(left, locus)?;
                let right = right
                    .iter()
                    .map(|r| self.object_set_named(r, locus))
                    .collect::<Result<Vec<_>, _>>()?;
                for r in &right {
                    self.check_relatable(left, *r, locus)?;
                }
                Ok(ConstraintBody::SetRelation {
                    op: *op,
                    left,
                    right,
                })
            }
            RawConstraintBody::PathPair { mode, left, right } => {
                let left = self.resolve_chain(left, locus)?;
                let right = self.resolve_chain(right, locus)?;
                let src_l = self.map_ref(*left.last().unwrap()).domain;
                let src_r = self.map_ref(*right.last().unwrap()).domain;
                if src_l != src_r {
                    return fail(locus, "both paths must start at the same set");
                }
                let tl = self.map_ref(left[0]).codomain.clone();
                let tr = self.map_ref(right[0]).codomain.clone();
                let compatible = match (self.object_codomain(&tl), self.object_codomain(&tr)) {
                    (Some(a), Some(b)) => self.assignable(a, b),
                    (None, None) => self.codomain_ty(&tl) == self.codomain_ty(&tr),
                    _ => false,
                };
                if !compatible {
                    return fail(locus, "the paths' end values cannot be compared");
                }
                Ok(ConstraintBody::PathPair {
                    mode: *mode,
                    left,
                    right,
                })
            }
            RawConstraintBody::GeneralDiagram(f) => Ok(ConstraintBody::GeneralDiagram {
                formula: self.resolve_formula(f, locus)?,
            }),
            RawConstraintBody::Object(f) => Ok(ConstraintBody::Object {
                formula: self.resolve_formula(f, locus)?,
            }),
        }
    }

    fn resolve_property(
        &self,
        target: &RawPropTarget,
        property: PropertyName,
        locus: &str,
    ) -> Result<ConstraintBody, ModelError> {
        match target {
            RawPropTarget::Name(n) => {
                if let Some(&set) = self.set_ids.get(n.as_str()) {
                    let SetKind::Relationship { components } = &self.sets[set.0 as usize].kind
                    else {
                        return fail(locus, format!("{n} is not a relationship set"));
                    };
                    if components.len() != 2 || components[0].target != components[1].target {
                        return fail(
                            locus,
                            format!("{n} is not a dyadic relationship over one set"),
                        );
                    }
                    let Some(p) = property.as_pair() else {
                        return fail(
                            locus,
                            format!("{} is not a relation property", property.name()),
                        );
                    };
                    if !PairProperty::NON_NULL.contains(&p) {
                        return fail(
                            locus,
                            "null-tolerant properties apply to mapping products, \
                             not relationship sets",
                        );
                    }
                    Ok(ConstraintBody::PairProperty {
                        target: PairTarget::DyadicSet(set),
                        property: p,
                    })
                } else if self.map_ids.contains_key(n.as_str()) {
                    self.self_map_property(vec![self.map_ids[n.as_str()]], property, locus)
                } else {
                    fail(locus, format!("unknown set or mapping {n}"))
                }
            }
            RawPropTarget::Product(l, r) => {
                let left = self.map_named(l, locus)?;
                let right = self.map_named(r, locus)?;
                let (lm, rm) = (self.map_ref(left), self.map_ref(right));
                if lm.domain != rm.domain {
                    return fail(locus, "product factors must share a domain");
                }
                let (Some(a), Some(b)) = (
                    self.object_codomain(&lm.codomain),
                    self.object_codomain(&rm.codomain),
                ) else {
                    return fail(locus, "product factors must map into object sets");
                };
                if a != b {
                    return fail(locus, "product factors must share a target set");
                }
                let Some(p) = property.as_pair() else {
                    return fail(
                        locus,
                        format!("{} is not a relation property", property.name()),
                    );
                };
                Ok(ConstraintBody::PairProperty {
                    target: PairTarget::Product {
                        set: lm.domain,
                        left,
                        right,
                    },
                    property: p,
                })
            }
            RawPropTarget::Chain(names) => {
                let path = self.resolve_chain(names, locus)?;
                self.self_map_property(path, property, locus)
            }
        }
    }

    fn self_map_property(
        &self,
        path: Vec<MapId>,
        property: PropertyName,
        locus: &str,
    ) -> Result<ConstraintBody, ModelError> {
        let Some(p) = property.as_self_map() else {
            return fail(
                locus,
                format!("{} is not a mapping property", property.name()),
            );
        };
        self.check_self_map_path(&path, locus)?;
        Ok(ConstraintBody::SelfMapProperty { path, property: p })
    }

    fn check_self_map_path(&self, path: &[MapId], locus: &str) -> Result<(), ModelError> {
        let src = self.map_ref(*path.last().unwrap()).domain;
        let cod = &self.map_ref(path[0]).codomain;
        match self.object_codomain(cod) {
            Some(t) if self.assignable(t, src) => Ok(()),
            _ => fail(locus, "the path must lead back to its own starting set"),
        }
    }

    fn key_components(
        &self,
        set: SetId,
        names: &[String],
        locus: &str,
    ) -> Result<Vec<MapId>, ModelError> {
        let mut out = Vec::new();
        for n in names {
            let m = self.map_named(n, locus)?;
            if self.map_ref(m).domain != set {
                return fail(locus, format!("{n} is not a mapping on the keyed set"));
            }
            if out.contains(&m) {
                return fail(locus, format!("{n} appears twice"));
            }
            out.push(m);
        }
        Ok(out)
    }

    /// Light structural compatibility for set relations: relationship sets
    /// only relate to relationship sets with the same component targets.
    fn check_relatable(&self, a: SetId, b: SetId, locus: &str) -> Result<(), ModelError> {
        let sig = |s: SetId| -> Option<Vec<SetId>> {
            match &self.sets[self.root_set(s).0 as usize].kind {
                SetKind::Relationship { components } => {
                    Some(components.iter().map(|c| c.target).collect())
                }
                _ => None,
            }
        };
        if sig(a) != sig(b) {
            return fail(
                locus,
                "related sets must hold elements of the same structure",
            );
        }
        Ok(())
    }

    fn resolve_chain(&self, names: &[String], locus: &str) -> Result<Vec<MapId>, ModelError> {
        if names.is_empty() {
            return fail(locus, "a path needs at least one mapping");
        }
        let chain = names
            .iter()
            .map(|n| self.map_named(n, locus))
            .collect::<Result<Vec<_>, _>>()?;
        for w in chain.windows(2) {
            let inner = self.map_ref(w[1]);
            let outer = self.map_ref(w[0]);
            let ok = match self.object_codomain(&inner.codomain) {
                Some(t) => self.assignable(t, outer.domain),
                None => false,
            };
            if !ok {
                return fail(
                    locus,
                    format!(
                        "{} does not produce elements {} accepts",
                        inner.name, outer.name
                    ),
                );
            }
        }
        Ok(chain)
    }

    fn resolve_formula(&self, f: &RawFormula, locus: &str) -> Result<Formula, ModelError> {
        if f.binders.is_empty() {
            return fail(locus, "a formula must quantify at least one variable");
        }
        let mut binders = Vec::new();
        let mut ctx = Vec::new();
        for (var, set_name) in &f.binders {
            if ctx.iter().any(|(v, _)| v == var) {
                return fail(locus, format!("variable {var} is bound twice"));
            }
            let set = self.set_named(set_name, locus)?;
            if !matches!(
                self.sets[set.0 as usize].kind,
                SetKind::Entity | SetKind::Relationship { .. } | SetKind::Computed { .. }
            ) {
                return fail(locus, format!("{set_name} has no elements to range over"));
            }
            ctx.push((var.clone(), set));
            binders.push(Binder {
                var: var.clone(),
                set,
            });
        }
        let body = self.resolve_bool(&f.body, &Ctx::Binders(ctx), locus)?;
        Ok(Formula { binders, body })
    }

    // ---- terms -----------------------------------------------------------

    fn resolve_bool(&self, b: &RawBool, ctx: &Ctx, locus: &str) -> Result<BoolExpr, ModelError> {
        // Nested conjunctions and disjunctions are spliced into their
        // parent, so `(a and b) and c` and `a and b and c` resolve alike.
        Ok(match b {
            RawBool::And(xs) => BoolExpr::And(xs.iter().try_fold(
                Vec::new(),
                |mut acc, x| -> Result<_, ModelError> {
                    match self.resolve_bool(x, ctx, locus)? {
                        BoolExpr::And(inner) => acc.extend(inner),
                        other => acc.push(other),
                    }
                    Ok(acc)
                },
            )?),
            RawBool::Or(xs) => BoolExpr::Or(xs.iter().try_fold(
                Vec::new(),
                |mut acc, x| -> Result<_, ModelError> {
                    match self.resolve_bool(x, ctx, locus)? {
                        BoolExpr::Or(inner) => acc.extend(inner),
                        other => acc.push(other),
                    }
                    Ok(acc)
                },
            )?),
            RawBool::Not(x) => BoolExpr::Not(Box::new(self.resolve_bool(x, ctx, locus)?)),
            RawBool::Implies(p, q) => BoolExpr::Implies(
                Box::new(self.resolve_bool(p, ctx, locus)?),
                Box::new(self.resolve_bool(q, ctx, locus)?),
            ),
            RawBool::Cmp(op, l, r) => {
                let (lt, lty) = self.resolve_term(l, ctx, locus)?;
                let (rt, rty) = self.resolve_term(r, ctx, locus)?;
                let ok = match (lty, rty) {
                    (Ty::Elem(a), Ty::Elem(b)) => {
                        self.assignable(a, b) && matches!(op, CmpOp::Eq | CmpOp::Ne)
                    }
                    (a, b) => a == b,
                };
                if !ok {
                    return fail(
                        locus,
                        format!(
                            "cannot compare a {} with a {}",
                            lty.describe(self),
                            rty.describe(self)
                        ),
                    );
                }
                BoolExpr::Cmp(*op, lt, rt)
            }
            RawBool::Null(t, want_null) => {
                let (t, _) = self.resolve_term(t, ctx, locus)?;
                BoolExpr::NullCheck(t, *want_null)
            }
        })
    }

    fn resolve_term(
        &self,
        t: &RawTerm,
        ctx: &Ctx,
        locus: &str,
    ) -> Result<(Term, Ty), ModelError> {
        let text_arg = |name: &str, t: &RawTerm, ty: Ty| -> Result<(), ModelError> {
            if ty != Ty::Text {
                return fail(locus, format!("{name} wants text, got {:?}", t));
            }
            Ok(())
        };
        Ok(match t {
            RawTerm::Lit(v) => {
                let ty = match v {
                    Value::Int(_) | Value::Dec(_) => Ty::Num,
                    Value::Text(_) => Ty::Text,
                    Value::Date(_) => Ty::Date,
                    Value::Bool(_) => Ty::Bool,
                    Value::Null | Value::Elem(..) => {
                        return fail(locus, "only plain literals may appear in formulas")
                    }
                };
                (Term::Lit(v.clone()), ty)
            }
            RawTerm::Today => (Term::Today, Ty::Date),
            RawTerm::Name(n) => match ctx {
                Ctx::Binders(vars) => match vars.iter().position(|(v, _)| v == n) {
                    Some(i) => (Term::Var(i as u32), Ty::Elem(vars[i].1)),
                    None => return fail(locus, format!("unknown variable {n}")),
                },
                Ctx::PointFree(row) => {
                    let m = self.map_named(n, locus)?;
                    let md = self.map_ref(m);
                    if !self.assignable(*row, md.domain) {
                        return fail(
                            locus,
                            format!("{n} is not defined on the elements at hand"),
                        );
                    }
                    (
                        Term::Apply(m, Box::new(Term::Var(0))),
                        self.codomain_ty(&md.codomain),
                    )
                }
            },
            RawTerm::Apply(f, arg) => {
                let m = self.map_named(f, locus)?;
                let (at, aty) = self.resolve_term(arg, ctx, locus)?;
                let md = self.map_ref(m);
                match aty {
                    Ty::Elem(s) if self.assignable(s, md.domain) => {}
                    other => {
                        return fail(
                            locus,
                            format!(
                                "{f} applies to elements of {}, got a {}",
                                self.sets[md.domain.0 as usize].name,
                                other.describe(self)
                            ),
                        )
                    }
                }
                (
                    Term::Apply(m, Box::new(at)),
                    self.codomain_ty(&md.codomain),
                )
            }
            RawTerm::Arith(op, l, r) => {
                let (lt, lty) = self.resolve_term(l, ctx, locus)?;
                let (rt, rty) = self.resolve_term(r, ctx, locus)?;
                let ty = match (op, lty, rty) {
                    (_, Ty::Num, Ty::Num) => Ty::Num,
                    (ArithOp::Add, Ty::Date, Ty::Num) | (ArithOp::Add, Ty::Num, Ty::Date) => {
                        Ty::Date
                    }
                    (ArithOp::Sub, Ty::Date, Ty::Num) => Ty::Date,
                    (ArithOp::Sub, Ty::Date, Ty::Date) => Ty::Num,
                    _ => {
                        return fail(
                            locus,
                            format!(
                                "cannot {} a {} and a {}",
                                match op {
                                    ArithOp::Add => "add",
                                    ArithOp::Sub => "subtract",
                                    ArithOp::Mul => "multiply",
                                },
                                lty.describe(self),
                                rty.describe(self)
                            ),
                        )
                    }
                };
                (Term::Arith(*op, Box::new(lt), Box::new(rt)), ty)
            }
            RawTerm::Len(s) => {
                let (st, sty) = self.resolve_term(s, ctx, locus)?;
                text_arg("len", s, sty)?;
                (Term::Len(Box::new(st)), Ty::Num)
            }
            RawTerm::Left(s, n) | RawTerm::Right(s, n) => {
                let (st, sty) = self.resolve_term(s, ctx, locus)?;
                let (nt, nty) = self.resolve_term(n, ctx, locus)?;
                text_arg("left/right", s, sty)?;
                if nty != Ty::Num {
                    return fail(locus, "the length argument must be a number");
                }
                let term = match t {
                    RawTerm::Left(..) => Term::Left(Box::new(st), Box::new(nt)),
                    _ => Term::Right(Box::new(st), Box::new(nt)),
                };
                (term, Ty::Text)
            }
            RawTerm::Mid(s, i, n) => {
                let (st, sty) = self.resolve_term(s, ctx, locus)?;
                let (it, ity) = self.resolve_term(i, ctx, locus)?;
                let (nt, nty) = self.resolve_term(n, ctx, locus)?;
                text_arg("mid", s, sty)?;
                if ity != Ty::Num || nty != Ty::Num {
                    return fail(locus, "position and length must be numbers");
                }
                (
                    Term::Mid(Box::new(st), Box::new(it), Box::new(nt)),
                    Ty::Text,
                )
            }
        })
    }

    // ---- system constraints ---------------------------------------------

    fn attach_system_constraints(&mut self) {
        for i in 0..self.mappings.len() {
            let id = MapId(i as u32);
            let m = self.map_ref(id);
            let name = m.name.clone();
            if self.object_codomain(&m.codomain).is_some() {
                self.push_constraint(
                    format!("{name}.ref"),
                    ConstraintOrigin::System,
                    ConstraintBody::RefIntegrity { mapping: id },
                );
            } else {
                self.push_constraint(
                    format!("{name}.range"),
                    ConstraintOrigin::System,
                    ConstraintBody::Range { mapping: id },
                );
            }
        }
        // Every relationship set is identified by its components: the
        // projections are jointly a key and each is total.
        for i in 0..self.sets.len() {
            let SetKind::Relationship { components } = &self.sets[i].kind else {
                continue;
            };
            let set = SetId(i as u32);
            let set_name = self.sets[i].name.clone();
            let (roles, projections): (Vec<_>, Vec<_>) = components
                .iter()
                .map(|c| (c.role.clone(), c.mapping))
                .unzip();
            for (role, mapping) in roles.iter().zip(&projections) {
                self.push_constraint(
                    format!("{role}.total"),
                    ConstraintOrigin::System,
                    ConstraintBody::MapGeneral {
                        op: MapGeneralOp::Totality,
                        mapping: *mapping,
                    },
                );
            }
            self.push_constraint(
                format!("{set_name}.syskey"),
                ConstraintOrigin::System,
                ConstraintBody::Key {
                    set,
                    components: projections,
                },
            );
        }
    }

    fn push_constraint(&mut self, id: String, origin: ConstraintOrigin, body: ConstraintBody) {
        let kind = kind_of(&body);
        self.constraints.push(ConstraintDecl {
            id,
            kind,
            origin,
            body,
        });
    }

    // ---- finish -----------------------------------------------------------

    fn finish(self) -> Result<Scheme, ModelError> {
        let mut ids = HashSet::new();
        for c in &self.constraints {
            if !ids.insert(c.id.as_str()) {
                return fail(
                    format!("constraint {}", c.id),
                    "this identifier is already used by another constraint",
                );
            }
        }
        for a in &self.advisories {
            for c in &a.constraints {
                if !ids.contains(c.as_str()) {
                    return fail("advisory", format!("unknown constraint {c}"));
                }
            }
        }
        let scopes = (0..self.uf.len() as u32)
            .map(|i| find(&self.uf, i))
            .collect();
        Ok(Scheme::from_parts(SchemeParts {
            name: self.raw.name.clone(),
            sets: self.sets,
            mappings: self
                .mappings
                .into_iter()
                .map(|m| m.expect("every mapping id is filled"))
                .collect(),
            constraints: self.constraints,
            advisories: self.advisories,
            scopes,
        }))
    }

    // ---- lookups ----------------------------------------------------------

    fn set_named(&self, name: &str, locus: &str) -> Result<SetId, ModelError> {
        match self.set_ids.get(name) {
            Some(&id) => Ok(id),
            None => fail(locus, format!("unknown set {name}")),
        }
    }

    fn object_set_named(&self, name: &str, locus: &str) -> Result<SetId, ModelError> {
        let id = self.set_named(name, locus)?;
        match self.sets[id.0 as usize].kind {
            SetKind::Entity | SetKind::Relationship { .. } | SetKind::Computed { .. } => Ok(id),
            _ => fail(locus, format!("{name} does not hold elements")),
        }
    }

    fn map_named(&self, name: &str, locus: &str) -> Result<MapId, ModelError> {
        match self.map_ids.get(name) {
            Some(&id) => Ok(id),
            None => fail(locus, format!("unknown mapping {name}")),
        }
    }

    fn map_ref(&self, id: MapId) -> &MappingDecl {
        self.mappings[id.0 as usize]
            .as_ref()
            .expect("mapping shells are built before use")
    }

    fn object_codomain(&self, c: &Codomain) -> Option<SetId> {
        match c {
            Codomain::Set(id) if self.sets[id.0 as usize].is_object() => Some(*id),
            _ => None,
        }
    }

    fn value_domain_of(&self, c: &Codomain) -> Option<ValueDomain> {
        match c {
            Codomain::Inline(d) => Some(d.clone()),
            Codomain::Set(id) => match &self.sets[id.0 as usize].kind {
                SetKind::Value { domain } => Some(domain.clone()),
                SetKind::System(SystemSet::Boole) => Some(ValueDomain::full(BaseType::Boole)),
                _ => None,
            },
        }
    }

    fn enumerable_codomain(&self, c: &Codomain) -> bool {
        if self.object_codomain(c).is_some() {
            return true;
        }
        match self.value_domain_of(c) {
            Some(d) => d.base == BaseType::Boole || d.enumeration().is_some(),
            None => false,
        }
    }

    fn codomain_ty(&self, c: &Codomain) -> Ty {
        if let Some(s) = self.object_codomain(c) {
            return Ty::Elem(s);
        }
        match self.value_domain_of(c).map(|d| d.base) {
            Some(BaseType::Ascii(_)) => Ty::Text,
            Some(BaseType::Datetime) => Ty::Date,
            Some(BaseType::Boole) => Ty::Bool,
            Some(_) => Ty::Num,
            None => unreachable!("codomains are object sets or value domains"),
        }
    }

    fn check_codomain_fit(
        &self,
        declared: &Codomain,
        produced: &Codomain,
        locus: &str,
    ) -> Result<(), ModelError> {
        let ok = match (self.object_codomain(declared), self.object_codomain(produced)) {
            (Some(d), Some(p)) => self.assignable(p, d),
            (None, None) => self.codomain_ty(declared) == self.codomain_ty(produced),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            fail(locus, "the definition does not produce codomain values")
        }
    }
}

fn find(uf: &[u32], mut i: u32) -> u32 {
    while uf[i as usize] != i {
        i = uf[i as usize];
    }
    i
}

fn union(uf: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(uf, a), find(uf, b));
    if ra != rb {
        uf[rb as usize] = ra;
    }
}
