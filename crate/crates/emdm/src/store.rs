//! In-memory element store for a resolved scheme.
//!
//! The store keeps the populations of entity and relationship sets and the
//! stored values of attribute and structural mappings. It eagerly enforces
//! only what must hold for the data to be representable at all — attribute
//! values lie in their declared domains, references point at elements that
//! exist — while constraint validation proper is layered on top of it.
//!
//! Element identity is scoped: object sets related by set constraints or
//! computed-set bases share one id space, so the same element can be a
//! member of several sets of a scope (that is how set inclusion is
//! populated). Ids are allocated per scope and never reused within a
//! session.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::ids::{ElemId, MapId, SetId};
use crate::model::{MapKind, Scheme, SetKind};
use crate::value::{Date, Value};

/// A store operation that could not be applied. The instance is unchanged.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("{locus}: {message}")]
pub struct StoreError {
    pub locus: String,
    pub message: String,
}

fn fail<T>(locus: impl Into<String>, message: impl Into<String>) -> Result<T, StoreError> {
    Err(StoreError {
        locus: locus.into(),
        message: message.into(),
    })
}

/// How [`Instance::delete`] treats stored references to the element.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DeleteMode {
    /// Refuse to delete while references to the element exist.
    Restrict,
    /// Null out plain references; delete relationship elements that have
    /// the element as a component.
    Cascade,
}

/// Element populations and stored mapping values for one scheme.
#[derive(Clone, Debug)]
pub struct Instance<'s> {
    scheme: &'s Scheme,
    today: Date,
    /// Per set: members in insertion order. Empty for non-object sets.
    members: Vec<Vec<ElemId>>,
    /// Per set: membership index.
    present: Vec<HashSet<ElemId>>,
    /// Per mapping: stored values. Empty for computed mappings.
    columns: Vec<HashMap<ElemId, Value>>,
    /// Next fresh id per scope representative.
    next_id: HashMap<u32, u64>,
}

/// Observable equality: populations and stored values. Id-allocation
/// counters are bookkeeping and do not participate.
impl PartialEq for Instance<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.scheme == other.scheme
            && self.today == other.today
            && self.members == other.members
            && self.columns == other.columns
    }
}

impl<'s> Instance<'s> {
    /// An empty instance. `today` anchors current-date interval bounds for
    /// the eager domain checks.
    pub fn new(scheme: &'s Scheme, today: Date) -> Instance<'s> {
        Instance {
            scheme,
            today,
            members: vec![Vec::new(); scheme.set_count()],
            present: vec![HashSet::new(); scheme.set_count()],
            columns: vec![HashMap::new(); scheme.map_count()],
            next_id: HashMap::new(),
        }
    }

    pub fn scheme(&self) -> &'s Scheme {
        self.scheme
    }

    pub fn today(&self) -> Date {
        self.today
    }

    /// Members of an object set in insertion order. Non-object sets have no
    /// stored members and yield an empty slice.
    pub fn members(&self, set: SetId) -> &[ElemId] {
        &self.members[set.0 as usize]
    }

    pub fn len(&self, set: SetId) -> usize {
        self.members[set.0 as usize].len()
    }

    pub fn contains(&self, set: SetId, elem: ElemId) -> bool {
        self.present[set.0 as usize].contains(&elem)
    }

    /// The stored value of a mapping at an element, if any. Absence means
    /// null; computed mappings are never stored.
    pub fn get(&self, map: MapId, elem: ElemId) -> Option<&Value> {
        self.columns[map.0 as usize].get(&elem)
    }

    /// Like [`Instance::get`], but owned and with nulls made explicit.
    pub fn value(&self, map: MapId, elem: ElemId) -> Value {
        self.get(map, elem).cloned().unwrap_or(Value::Null)
    }

    /// All stored entries of a mapping, ordered by element id.
    pub fn column(&self, map: MapId) -> &HashMap<ElemId, Value> {
        &self.columns[map.0 as usize]
    }

    fn require_object(&self, set: SetId) -> Result<(), StoreError> {
        if self.scheme.set(set).is_object() {
            Ok(())
        } else {
            fail(
                self.scheme.set(set).name.clone(),
                "only entity and relationship sets hold stored elements",
            )
        }
    }

    /// Create a fresh element with the given mapping values. Stored
    /// mappings that are not listed take their declared default, or stay
    /// null. Relationship elements must receive every component. On error
    /// the instance is unchanged.
    pub fn insert(
        &mut self,
        set: SetId,
        assignments: &[(MapId, Value)],
    ) -> Result<ElemId, StoreError> {
        self.require_object(set)?;
        let n = self.next_id.entry(self.scheme.scope_of(set)).or_insert(1);
        let id = ElemId(*n);
        *n += 1;
        self.members[set.0 as usize].push(id);
        self.present[set.0 as usize].insert(id);
        if let Err(e) = self.fill_new(set, id, assignments) {
            self.discard_new(set, id);
            return Err(e);
        }
        Ok(id)
    }

    fn fill_new(
        &mut self,
        set: SetId,
        id: ElemId,
        assignments: &[(MapId, Value)],
    ) -> Result<(), StoreError> {
        self.check_assignments(set, assignments)?;
        for (m, v) in assignments {
            self.set_value(id, *m, v.clone())?;
        }
        // An unlisted mapping takes its default; a listed null is an
        // explicit opt-out.
        let defaults: Vec<(MapId, Value)> = self
            .scheme
            .stored_mappings_on(set)
            .filter(|(m, md)| md.default.is_some() && !assignments.iter().any(|(a, _)| a == m))
            .map(|(m, md)| (m, md.default.clone().unwrap()))
            .collect();
        for (m, v) in defaults {
            self.set_value(id, m, v)?;
        }
        if let Some(&(_, _, m)) = self
            .missing_component_values()
            .iter()
            .find(|&&(s, e, _)| s == set && e == id)
        {
            return fail(
                format!("{}[{id}]", self.scheme.set(set).name),
                format!("component {} must be supplied", self.scheme.mapping(m).name),
            );
        }
        Ok(())
    }

    /// Remove a half-created element without reference bookkeeping: it is
    /// brand new, so nothing can point at it yet.
    fn discard_new(&mut self, set: SetId, id: ElemId) {
        for (m, _) in self.scheme.stored_mappings_on(set) {
            self.columns[m.0 as usize].remove(&id);
        }
        self.present[set.0 as usize].remove(&id);
        self.members[set.0 as usize].retain(|&x| x != id);
    }

    fn check_assignments(
        &self,
        set: SetId,
        assignments: &[(MapId, Value)],
    ) -> Result<(), StoreError> {
        for (i, (m, _)) in assignments.iter().enumerate() {
            let md = self.scheme.mapping(*m);
            if md.domain != set || md.kind == MapKind::Computed {
                return fail(
                    format!("{}.{}", self.scheme.set(set).name, md.name),
                    format!("not a stored mapping of {}", self.scheme.set(set).name),
                );
            }
            if assignments[..i].iter().any(|(a, _)| a == m) {
                return fail(
                    format!("{}.{}", self.scheme.set(set).name, md.name),
                    "assigned twice",
                );
            }
        }
        Ok(())
    }

    /// Replace the listed values of an existing element. Applied
    /// atomically: on error the instance is unchanged.
    pub fn update(
        &mut self,
        set: SetId,
        elem: ElemId,
        assignments: &[(MapId, Value)],
    ) -> Result<(), StoreError> {
        self.require_object(set)?;
        if !self.present[set.0 as usize].contains(&elem) {
            return fail(
                format!("{}[{elem}]", self.scheme.set(set).name),
                "no such element",
            );
        }
        self.check_assignments(set, assignments)?;
        let saved: Vec<(MapId, Option<Value>)> = assignments
            .iter()
            .map(|&(m, _)| (m, self.columns[m.0 as usize].get(&elem).cloned()))
            .collect();
        for (m, v) in assignments {
            if let Err(e) = self.set_value(elem, *m, v.clone()) {
                for (m, old) in saved {
                    match old {
                        Some(v) => self.columns[m.0 as usize].insert(elem, v),
                        None => self.columns[m.0 as usize].remove(&elem),
                    };
                }
                return Err(e);
            }
        }
        Ok(())
    }

    /// Make a caller-chosen id a member of an object set. The id may
    /// already exist in other sets of the same scope — that is how one
    /// element becomes a member of several related sets — but not in this
    /// one. Fresh allocations skip past it afterwards.
    pub fn insert_with_id(&mut self, set: SetId, id: ElemId) -> Result<(), StoreError> {
        self.require_object(set)?;
        if !self.present[set.0 as usize].insert(id) {
            return fail(
                format!("{}[{id}]", self.scheme.set(set).name),
                "duplicate element id",
            );
        }
        let n = self.next_id.entry(self.scheme.scope_of(set)).or_insert(1);
        *n = (*n).max(id.0.saturating_add(1));
        self.members[set.0 as usize].push(id);
        Ok(())
    }

    /// Store (or, with a null, clear) a mapping value at an element.
    ///
    /// Attribute values must lie in the mapping's declared domain and are
    /// stored in canonical form; references must name an existing member of
    /// the codomain set and are stored with the scope-canonical tag.
    pub fn set_value(&mut self, elem: ElemId, map: MapId, value: Value) -> Result<(), StoreError> {
        let md = self.scheme.mapping(map);
        let locus = format!(
            "{}[{elem}].{}",
            self.scheme.set(md.domain).name,
            md.name
        );
        if md.kind == MapKind::Computed {
            return fail(locus, "computed mappings have no stored values");
        }
        if !self.present[md.domain.0 as usize].contains(&elem) {
            return fail(locus, "no such element");
        }
        if value.is_null() {
            if md.is_projection && self.columns[map.0 as usize].contains_key(&elem) {
                return fail(
                    locus,
                    "relationship components cannot be nulled; delete the element instead",
                );
            }
            self.columns[map.0 as usize].remove(&elem);
            return Ok(());
        }
        let stored = if let Some(c) = self.scheme.object_codomain(&md.codomain) {
            let Value::Elem(s, id) = value else {
                return fail(
                    locus,
                    format!("expected an element reference, got {}", value.kind_name()),
                );
            };
            if !self.scheme.assignable(s, c) {
                return fail(
                    locus,
                    format!(
                        "{} elements cannot stand in for {}",
                        self.scheme.set(s).name,
                        self.scheme.set(c).name
                    ),
                );
            }
            if !self.present[c.0 as usize].contains(&id) {
                return fail(
                    locus,
                    format!(
                        "referenced element {}[{id}] does not exist",
                        self.scheme.set(c).name
                    ),
                );
            }
            self.scheme.elem_value(c, id)
        } else {
            let vd = self
                .scheme
                .value_domain(&md.codomain)
                .expect("non-structural stored mappings have value domains");
            vd.admit(&value, self.today).map_err(|e| StoreError {
                locus: locus.clone(),
                message: e.reason,
            })?
        };
        self.columns[map.0 as usize].insert(elem, stored);
        Ok(())
    }

    /// Remove an element from one set. Its stored values on that set's
    /// mappings go with it; membership in other sets of the scope is
    /// untouched. References whose codomain is this set are handled per
    /// `mode`.
    pub fn delete(&mut self, set: SetId, elem: ElemId, mode: DeleteMode) -> Result<(), StoreError> {
        self.require_object(set)?;
        let locus = format!("{}[{elem}]", self.scheme.set(set).name);
        if !self.present[set.0 as usize].contains(&elem) {
            return fail(locus, "no such element");
        }
        // Stored references become dangling exactly when their codomain is
        // the set losing the member.
        let mut refs = Vec::new();
        for (m, md) in self.scheme.mappings() {
            if md.kind == MapKind::Computed
                || self.scheme.object_codomain(&md.codomain) != Some(set)
            {
                continue;
            }
            for (&e, v) in &self.columns[m.0 as usize] {
                if matches!(v, Value::Elem(_, id) if *id == elem) {
                    refs.push((m, e));
                }
            }
        }
        if mode == DeleteMode::Restrict {
            if let Some(&(m, e)) = refs.first() {
                let md = self.scheme.mapping(m);
                return fail(
                    locus,
                    format!(
                        "referenced by {}[{e}].{}",
                        self.scheme.set(md.domain).name,
                        md.name
                    ),
                );
            }
        }
        // Drop membership first so reference cycles cannot re-enter the
        // element while cascading.
        self.present[set.0 as usize].remove(&elem);
        self.members[set.0 as usize].retain(|&x| x != elem);
        for (m, e) in refs {
            let md = self.scheme.mapping(m);
            if md.is_projection {
                if self.present[md.domain.0 as usize].contains(&e) {
                    self.delete(md.domain, e, DeleteMode::Cascade)?;
                }
            } else {
                self.columns[m.0 as usize].remove(&e);
            }
        }
        for (m, _) in self.scheme.stored_mappings_on(set) {
            self.columns[m.0 as usize].remove(&elem);
        }
        Ok(())
    }

    /// Relationship elements that lack a stored value for one of their
    /// component projections, in declaration order. A complete load must
    /// leave this empty; validation reports the same gaps as totality
    /// violations.
    pub fn missing_component_values(&self) -> Vec<(SetId, ElemId, MapId)> {
        let mut out = Vec::new();
        for (sid, sd) in self.scheme.sets() {
            let SetKind::Relationship { components } = &sd.kind else {
                continue;
            };
            for &e in &self.members[sid.0 as usize] {
                for c in components {
                    if !self.columns[c.mapping.0 as usize].contains_key(&e) {
                        out.push((sid, e, c.mapping));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_scheme;

    const SRC: &str = "\
scheme SHOP;
set CUSTOMERS : entity;
set PRODUCTS : entity;
set SPECIALS : entity;
map CName : CUSTOMERS -> ASCII(20), total, key;
map Rating : CUSTOMERS -> NAT(2) [0 .. 10];
map Price : PRODUCTS -> CURRENCY(6), default = 0.99;
map Launched : PRODUCTS -> DATETIME [1970-01-01 .. Today()];
map Sponsor : CUSTOMERS -> CUSTOMERS, acyclic;
set ORDERS : relationship(Buyer: CUSTOMERS, Item: PRODUCTS);
map Qty : ORDERS -> NAT(3), total;
constraint CDisj : CUSTOMERS disjoint PRODUCTS;
constraint CSub : SPECIALS subset CUSTOMERS;
";

    fn scheme() -> Scheme {
        parse_scheme(SRC).unwrap()
    }

    fn today() -> Date {
        Date::parse("2026-08-14").unwrap()
    }

    #[test]
    fn ids_are_fresh_per_scope() {
        let s = scheme();
        let mut inst = Instance::new(&s, today());
        let customers = s.set_id("CUSTOMERS").unwrap();
        let products = s.set_id("PRODUCTS").unwrap();
        let orders = s.set_id("ORDERS").unwrap();
        let buyer = s.map_id("Buyer").unwrap();
        let item = s.map_id("Item").unwrap();
        let c = inst.insert(customers, &[]).unwrap();
        let p = inst.insert(products, &[]).unwrap();
        let o = inst
            .insert(
                orders,
                &[
                    (buyer, Value::Elem(customers, c)),
                    (item, Value::Elem(products, p)),
                ],
            )
            .unwrap();
        // The disjointness constraint puts CUSTOMERS and PRODUCTS in one
        // scope, so their ids never collide; ORDERS allocates on its own.
        assert_eq!((c, p, o), (ElemId(1), ElemId(2), ElemId(1)));
        assert!(inst.contains(customers, c));
        assert!(!inst.contains(customers, p));
    }

    #[test]
    fn attribute_values_are_checked_and_canonicalized() {
        let s = scheme();
        let mut inst = Instance::new(&s, today());
        let products = s.set_id("PRODUCTS").unwrap();
        let price = s.map_id("Price").unwrap();
        let launched = s.map_id("Launched").unwrap();
        let p = inst.insert(products, &[]).unwrap();

        // Integers coerce to exact decimals under decimal bases.
        inst.set_value(p, price, Value::Int(5)).unwrap();
        assert_eq!(inst.value(price, p), Value::Dec("5".parse().unwrap()));
        inst.set_value(p, price, Value::Dec("5.50".parse().unwrap()))
            .unwrap();
        assert_eq!(inst.value(price, p).to_string(), "5.5");

        let rating = s.map_id("Rating").unwrap();
        let customers = s.set_id("CUSTOMERS").unwrap();
        let c = inst.insert(customers, &[]).unwrap();
        let err = inst.set_value(c, rating, Value::Int(11)).unwrap_err();
        assert!(err.message.contains("outside"), "{err}");

        let future = Value::Date(Date::parse("2030-01-01").unwrap());
        let err = inst.set_value(p, launched, future).unwrap_err();
        assert!(err.message.contains("outside"), "{err}");
        inst.set_value(p, launched, Value::Date(today())).unwrap();
    }

    #[test]
    fn references_must_exist_in_the_codomain_set() {
        let s = scheme();
        let mut inst = Instance::new(&s, today());
        let customers = s.set_id("CUSTOMERS").unwrap();
        let products = s.set_id("PRODUCTS").unwrap();
        let sponsor = s.map_id("Sponsor").unwrap();
        let c1 = inst.insert(customers, &[]).unwrap();
        let c2 = inst.insert(customers, &[]).unwrap();
        let p = inst.insert(products, &[]).unwrap();

        inst.set_value(c1, sponsor, Value::Elem(customers, c2))
            .unwrap();
        assert_eq!(inst.value(sponsor, c1), s.elem_value(customers, c2));

        let err = inst
            .set_value(c2, sponsor, Value::Elem(customers, ElemId(99)))
            .unwrap_err();
        assert!(err.message.contains("does not exist"), "{err}");

        // PRODUCTS shares the scope, so the reference type-checks, but the
        // element is not a CUSTOMERS member.
        let err = inst
            .set_value(c2, sponsor, Value::Elem(products, p))
            .unwrap_err();
        assert!(err.message.contains("does not exist"), "{err}");

        // ORDERS lives in another scope entirely.
        let orders = s.set_id("ORDERS").unwrap();
        let o = inst
            .insert(
                orders,
                &[
                    (s.map_id("Buyer").unwrap(), Value::Elem(customers, c1)),
                    (s.map_id("Item").unwrap(), Value::Elem(products, p)),
                ],
            )
            .unwrap();
        let err = inst
            .set_value(c2, sponsor, Value::Elem(orders, o))
            .unwrap_err();
        assert!(err.message.contains("cannot stand in"), "{err}");
    }

    #[test]
    fn null_clears_a_stored_value() {
        let s = scheme();
        let mut inst = Instance::new(&s, today());
        let customers = s.set_id("CUSTOMERS").unwrap();
        let rating = s.map_id("Rating").unwrap();
        let c = inst.insert(customers, &[]).unwrap();
        inst.set_value(c, rating, Value::Int(7)).unwrap();
        assert_eq!(inst.value(rating, c), Value::Int(7));
        inst.set_value(c, rating, Value::Null).unwrap();
        assert_eq!(inst.get(rating, c), None);
        assert_eq!(inst.value(rating, c), Value::Null);
    }

    #[test]
    fn restrict_blocks_while_referenced() {
        let s = scheme();
        let mut inst = Instance::new(&s, today());
        let customers = s.set_id("CUSTOMERS").unwrap();
        let products = s.set_id("PRODUCTS").unwrap();
        let orders = s.set_id("ORDERS").unwrap();
        let sponsor = s.map_id("Sponsor").unwrap();
        let buyer = s.map_id("Buyer").unwrap();
        let item = s.map_id("Item").unwrap();

        let c1 = inst.insert(customers, &[]).unwrap();
        let c2 = inst.insert(customers, &[]).unwrap();
        let p = inst.insert(products, &[]).unwrap();
        let _o = inst
            .insert(
                orders,
                &[
                    (buyer, Value::Elem(customers, c1)),
                    (item, Value::Elem(products, p)),
                ],
            )
            .unwrap();
        inst.set_value(c2, sponsor, Value::Elem(customers, c1))
            .unwrap();

        let err = inst.delete(customers, c1, DeleteMode::Restrict).unwrap_err();
        assert!(err.message.contains("referenced by"), "{err}");
        assert!(inst.contains(customers, c1));

        // c2 holds a reference but is not the target of one.
        inst.delete(customers, c2, DeleteMode::Restrict).unwrap();
        assert!(!inst.contains(customers, c2));
        assert_eq!(inst.get(sponsor, c2), None);

        // Still blocked: the order's Buyer component points at c1.
        let err = inst.delete(customers, c1, DeleteMode::Restrict).unwrap_err();
        assert!(err.message.contains("Buyer"), "{err}");
    }

    #[test]
    fn cascade_deletes_dependents_and_clears_references() {
        let s = scheme();
        let mut inst = Instance::new(&s, today());
        let customers = s.set_id("CUSTOMERS").unwrap();
        let products = s.set_id("PRODUCTS").unwrap();
        let orders = s.set_id("ORDERS").unwrap();
        let sponsor = s.map_id("Sponsor").unwrap();
        let buyer = s.map_id("Buyer").unwrap();
        let item = s.map_id("Item").unwrap();
        let qty = s.map_id("Qty").unwrap();

        let c1 = inst.insert(customers, &[]).unwrap();
        let c2 = inst.insert(customers, &[]).unwrap();
        let p = inst.insert(products, &[]).unwrap();
        let o = inst
            .insert(
                orders,
                &[
                    (buyer, Value::Elem(customers, c1)),
                    (item, Value::Elem(products, p)),
                    (qty, Value::Int(3)),
                ],
            )
            .unwrap();
        inst.set_value(c2, sponsor, Value::Elem(customers, c1))
            .unwrap();

        inst.delete(customers, c1, DeleteMode::Cascade).unwrap();
        assert!(!inst.contains(customers, c1));
        assert!(!inst.contains(orders, o), "component owner must go too");
        assert_eq!(inst.get(qty, o), None, "the owner's values go with it");
        assert_eq!(inst.value(sponsor, c2), Value::Null);
        assert!(inst.contains(products, p));
    }

    #[test]
    fn cyclic_references_cascade_without_recursing_forever() {
        let s = scheme();
        let mut inst = Instance::new(&s, today());
        let customers = s.set_id("CUSTOMERS").unwrap();
        let sponsor = s.map_id("Sponsor").unwrap();
        let c1 = inst.insert(customers, &[]).unwrap();
        let c2 = inst.insert(customers, &[]).unwrap();
        // A sponsor cycle is invalid data (the mapping is acyclic), but the
        // store must still take it and clean it up without looping.
        inst.set_value(c1, sponsor, Value::Elem(customers, c2))
            .unwrap();
        inst.set_value(c2, sponsor, Value::Elem(customers, c1))
            .unwrap();
        inst.delete(customers, c1, DeleteMode::Cascade).unwrap();
        assert!(!inst.contains(customers, c1));
        assert!(inst.contains(customers, c2));
        assert_eq!(inst.value(sponsor, c2), Value::Null);
    }

    #[test]
    fn explicit_ids_share_the_scope_and_advance_allocation() {
        let s = scheme();
        let mut inst = Instance::new(&s, today());
        let customers = s.set_id("CUSTOMERS").unwrap();
        let specials = s.set_id("SPECIALS").unwrap();

        inst.insert_with_id(customers, ElemId(50)).unwrap();
        // The same element joins the subset, not a new one.
        inst.insert_with_id(specials, ElemId(50)).unwrap();
        let err = inst.insert_with_id(specials, ElemId(50)).unwrap_err();
        assert!(err.message.contains("duplicate"), "{err}");

        assert_eq!(inst.insert(customers, &[]).unwrap(), ElemId(51));
        assert_eq!(inst.members(specials), &[ElemId(50)]);
    }

    #[test]
    fn unlisted_mappings_take_their_default() {
        let s = scheme();
        let mut inst = Instance::new(&s, today());
        let products = s.set_id("PRODUCTS").unwrap();
        let price = s.map_id("Price").unwrap();

        let p = inst.insert(products, &[]).unwrap();
        assert_eq!(inst.value(price, p), Value::Dec("0.99".parse().unwrap()));

        // An explicit value wins; an explicit null opts out.
        let p2 = inst.insert(products, &[(price, Value::Int(3))]).unwrap();
        assert_eq!(inst.value(price, p2), Value::Dec("3".parse().unwrap()));
        let p3 = inst.insert(products, &[(price, Value::Null)]).unwrap();
        assert_eq!(inst.get(price, p3), None);
    }

    #[test]
    fn failed_inserts_leave_no_trace() {
        let s = scheme();
        let mut inst = Instance::new(&s, today());
        let customers = s.set_id("CUSTOMERS").unwrap();
        let cname = s.map_id("CName").unwrap();
        let rating = s.map_id("Rating").unwrap();

        let err = inst
            .insert(
                customers,
                &[
                    (cname, Value::Text("Ann".into())),
                    (rating, Value::Int(99)),
                ],
            )
            .unwrap_err();
        assert!(err.message.contains("outside"), "{err}");
        assert_eq!(inst.len(customers), 0);
        assert!(inst.column(cname).is_empty());

        // Relationship elements must come with all their components.
        let orders = s.set_id("ORDERS").unwrap();
        let err = inst.insert(orders, &[]).unwrap_err();
        assert!(err.message.contains("component"), "{err}");
        assert_eq!(inst.len(orders), 0);
    }

    #[test]
    fn updates_are_atomic() {
        let s = scheme();
        let mut inst = Instance::new(&s, today());
        let customers = s.set_id("CUSTOMERS").unwrap();
        let cname = s.map_id("CName").unwrap();
        let rating = s.map_id("Rating").unwrap();
        let c = inst
            .insert(
                customers,
                &[(cname, Value::Text("Ann".into())), (rating, Value::Int(4))],
            )
            .unwrap();

        let err = inst
            .update(
                customers,
                c,
                &[(cname, Value::Text("Bea".into())), (rating, Value::Int(42))],
            )
            .unwrap_err();
        assert!(err.message.contains("outside"), "{err}");
        assert_eq!(inst.value(cname, c), Value::Text("Ann".into()));
        assert_eq!(inst.value(rating, c), Value::Int(4));

        inst.update(customers, c, &[(rating, Value::Null)]).unwrap();
        assert_eq!(inst.get(rating, c), None);
    }

    #[test]
    fn components_cannot_be_nulled() {
        let s = scheme();
        let mut inst = Instance::new(&s, today());
        let customers = s.set_id("CUSTOMERS").unwrap();
        let products = s.set_id("PRODUCTS").unwrap();
        let orders = s.set_id("ORDERS").unwrap();
        let buyer = s.map_id("Buyer").unwrap();
        let item = s.map_id("Item").unwrap();
        let c = inst.insert(customers, &[]).unwrap();
        let c2 = inst.insert(customers, &[]).unwrap();
        let p = inst.insert(products, &[]).unwrap();
        let o = inst
            .insert(
                orders,
                &[
                    (buyer, Value::Elem(customers, c)),
                    (item, Value::Elem(products, p)),
                ],
            )
            .unwrap();

        let err = inst.set_value(o, buyer, Value::Null).unwrap_err();
        assert!(err.message.contains("cannot be nulled"), "{err}");
        // Re-aiming a component is fine.
        inst.set_value(o, buyer, Value::Elem(customers, c2)).unwrap();
    }

    #[test]
    fn only_object_sets_hold_elements() {
        let s = scheme();
        let mut inst = Instance::new(&s, today());
        let boole = s.set_id("BOOLE").unwrap();
        let err = inst.insert(boole, &[]).unwrap_err();
        assert!(err.message.contains("entity and relationship"), "{err}");
    }

    #[test]
    fn values_require_membership_in_the_domain_set() {
        let s = scheme();
        let mut inst = Instance::new(&s, today());
        let customers = s.set_id("CUSTOMERS").unwrap();
        let products = s.set_id("PRODUCTS").unwrap();
        let rating = s.map_id("Rating").unwrap();
        let _c = inst.insert(customers, &[]).unwrap();
        let p = inst.insert(products, &[]).unwrap();
        // p is a valid id in the scope but not a CUSTOMERS member.
        let err = inst.set_value(p, rating, Value::Int(5)).unwrap_err();
        assert!(err.message.contains("no such element"), "{err}");
    }
}
