//! Static dependency analysis: which sets and mappings a constraint can
//! observe, and which a mutation can disturb. Incremental validation re-runs
//! a constraint exactly when the two overlap, so footprints err on the wide
//! side — a too-wide footprint costs a redundant re-check, a too-narrow one
//! would lose violations.

use std::collections::BTreeSet;

use crate::ids::{MapId, SetId};
use crate::model::{ConstraintBody, ConstraintDecl, MapExpr, PairTarget, Scheme, SetKind, Term};

/// The sets and mappings a constraint reads, or a mutation writes.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct Footprint {
    pub sets: BTreeSet<SetId>,
    pub maps: BTreeSet<MapId>,
}

impl Footprint {
    pub fn intersects(&self, other: &Footprint) -> bool {
        self.sets.intersection(&other.sets).next().is_some()
            || self.maps.intersection(&other.maps).next().is_some()
    }

    /// Add a set and everything observing it observes: the base and
    /// predicate of a computed set, the components of a relationship set.
    fn add_set(&mut self, scheme: &Scheme, set: SetId) {
        if !self.sets.insert(set) {
            return;
        }
        match &scheme.set(set).kind {
            SetKind::Computed { base, predicate } => {
                self.add_set(scheme, *base);
                self.add_bool(scheme, predicate);
            }
            SetKind::Relationship { components } => {
                for c in components {
                    self.add_map(scheme, c.mapping);
                    self.add_set(scheme, c.target);
                }
            }
            SetKind::Entity | SetKind::Value { .. } | SetKind::System(_) => {}
        }
    }

    /// Add a mapping and everything reading it reads: its domain and object
    /// codomain populations and, for computed mappings, their definition.
    fn add_map(&mut self, scheme: &Scheme, map: MapId) {
        if !self.maps.insert(map) {
            return;
        }
        let md = scheme.mapping(map);
        self.add_set(scheme, md.domain);
        if let Some(c) = scheme.object_codomain(&md.codomain) {
            self.add_set(scheme, c);
        }
        match &md.definition {
            Some(MapExpr::Chain(path)) => {
                for &m in path {
                    self.add_map(scheme, m);
                }
            }
            Some(MapExpr::Expr(term)) => self.add_term(scheme, term),
            None => {}
        }
    }

    fn add_term(&mut self, scheme: &Scheme, term: &Term) {
        let mut maps = Vec::new();
        term.walk(&mut |t| {
            if let Term::Apply(m, _) = t {
                maps.push(*m);
            }
        });
        for m in maps {
            self.add_map(scheme, m);
        }
    }

    fn add_bool(&mut self, scheme: &Scheme, body: &crate::model::BoolExpr) {
        let mut maps = Vec::new();
        body.walk_terms(&mut |t| {
            if let Term::Apply(m, _) = t {
                maps.push(*m);
            }
        });
        for m in maps {
            self.add_map(scheme, m);
        }
    }
}

/// What one constraint observes.
pub fn constraint_footprint(scheme: &Scheme, c: &ConstraintDecl) -> Footprint {
    let mut fp = Footprint::default();
    match &c.body {
        ConstraintBody::SetRelation { left, right, .. } => {
            fp.add_set(scheme, *left);
            for &r in right {
                fp.add_set(scheme, r);
            }
        }
        ConstraintBody::PairProperty { target, .. } => match target {
            PairTarget::DyadicSet(s) => fp.add_set(scheme, *s),
            PairTarget::Product { set, left, right } => {
                fp.add_set(scheme, *set);
                fp.add_map(scheme, *left);
                fp.add_map(scheme, *right);
            }
        },
        ConstraintBody::SelfMapProperty { path, .. } => {
            fp.add_set(scheme, scheme.chain_source(path));
            for &m in path {
                fp.add_map(scheme, m);
            }
        }
        ConstraintBody::MapGeneral { mapping, .. }
        | ConstraintBody::Default { mapping }
        | ConstraintBody::Range { mapping }
        | ConstraintBody::RefIntegrity { mapping } => fp.add_map(scheme, *mapping),
        ConstraintBody::Key { set, components } => {
            fp.add_set(scheme, *set);
            for &m in components {
                fp.add_map(scheme, m);
            }
        }
        ConstraintBody::Subkey { set, sub, full } => {
            fp.add_set(scheme, *set);
            for &m in sub.iter().chain(full) {
                fp.add_map(scheme, m);
            }
        }
        ConstraintBody::ExistencePattern {
            set,
            antecedent,
            consequent,
        } => {
            fp.add_set(scheme, *set);
            for &(m, _) in antecedent.iter().chain(consequent) {
                fp.add_map(scheme, m);
            }
        }
        ConstraintBody::PathPair { left, right, .. } => {
            fp.add_set(scheme, scheme.chain_source(left));
            for &m in left.iter().chain(right) {
                fp.add_map(scheme, m);
            }
        }
        ConstraintBody::GeneralDiagram { formula } | ConstraintBody::Object { formula } => {
            for b in &formula.binders {
                fp.add_set(scheme, b.set);
            }
            fp.add_bool(scheme, &formula.body);
        }
    }
    fp
}

/// One footprint per constraint, index-aligned with the scheme's
/// constraint list.
pub fn dependency_map(scheme: &Scheme) -> Vec<Footprint> {
    scheme
        .constraints()
        .iter()
        .map(|c| constraint_footprint(scheme, c))
        .collect()
}

/// What an insert into `set` disturbs: the population and every stored
/// mapping on the set (components, assigned values, and filled defaults).
pub fn insert_touch(scheme: &Scheme, set: SetId) -> Footprint {
    let mut t = Footprint::default();
    t.sets.insert(set);
    for (m, _) in scheme.stored_mappings_on(set) {
        t.maps.insert(m);
    }
    t
}

/// What an update disturbs: exactly the assigned mappings. Populations of
/// stored sets never change under update; computed populations can, but any
/// constraint observing a computed set also observes the mappings its
/// predicate reads, so the overlap is caught through those.
pub fn update_touch(assigned: &[MapId]) -> Footprint {
    let mut t = Footprint::default();
    t.maps.extend(assigned.iter().copied());
    t
}

/// What deleting from `set` can disturb, under either delete mode: the
/// population and stored mappings of the set, every mapping that references
/// the set (cascade nulls plain references), and transitively every
/// relationship set owning a component into a disturbed set (cascade deletes
/// those rows).
pub fn delete_touch(scheme: &Scheme, set: SetId) -> Footprint {
    let mut t = Footprint::default();
    let mut queue = vec![set];
    while let Some(s) = queue.pop() {
        if !t.sets.insert(s) {
            continue;
        }
        for (m, _) in scheme.stored_mappings_on(s) {
            t.maps.insert(m);
        }
        for (m, md) in scheme.mappings() {
            if md.definition.is_none() && scheme.object_codomain(&md.codomain) == Some(s) {
                t.maps.insert(m);
                if md.is_projection {
                    queue.push(md.domain);
                }
            }
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_scheme;

    fn scheme() -> Scheme {
        parse_scheme(
            r#"
            scheme DEPS;

            set REGIONS : entity;
            set CUSTOMERS : entity;
            set PRODUCTS : entity;
            set BIG : computed = CUSTOMERS where (Score > 10);
            set ORDERS : relationship(Buyer: CUSTOMERS, Item: PRODUCTS);

            map CName : CUSTOMERS -> ASCII(20), total, key;
            map Score : CUSTOMERS -> NAT(4);
            map Zone : CUSTOMERS -> REGIONS;
            map ZoneOf : ORDERS -> REGIONS, = Zone o Buyer;
            map Qty : ORDERS -> NAT(4);

            constraint BigZoned : formula forall b in BIG (Zone(b) is not null);
            constraint QtyCap : formula forall o in ORDERS (Qty(o) < 100);
            "#,
        )
        .unwrap()
    }

    fn fp_of(scheme: &Scheme, id: &str) -> Footprint {
        let c = scheme
            .constraints()
            .iter()
            .find(|c| c.id == id)
            .unwrap_or_else(|| panic!("no constraint {id}"));
        constraint_footprint(scheme, c)
    }

    #[test]
    fn computed_set_constraints_see_the_predicate_mappings() {
        let s = scheme();
        let fp = fp_of(&s, "BigZoned");
        let customers = s.set_id("CUSTOMERS").unwrap();
        let big = s.set_id("BIG").unwrap();
        assert!(fp.sets.contains(&big));
        assert!(fp.sets.contains(&customers));
        assert!(fp.maps.contains(&s.map_id("Score").unwrap()));
        assert!(fp.maps.contains(&s.map_id("Zone").unwrap()));
        // Updating Score moves elements in and out of BIG, so the update
        // touch must overlap this footprint.
        assert!(fp.intersects(&update_touch(&[s.map_id("Score").unwrap()])));
        assert!(!fp.intersects(&update_touch(&[s.map_id("Qty").unwrap()])));
    }

    #[test]
    fn computed_mappings_expand_to_what_they_read() {
        let s = scheme();
        let mut fp = Footprint::default();
        fp.add_map(&s, s.map_id("ZoneOf").unwrap());
        assert!(fp.maps.contains(&s.map_id("Buyer").unwrap()));
        assert!(fp.maps.contains(&s.map_id("Zone").unwrap()));
        assert!(fp.sets.contains(&s.set_id("ORDERS").unwrap()));
        assert!(fp.sets.contains(&s.set_id("REGIONS").unwrap()));
    }

    #[test]
    fn deleting_a_referenced_set_touches_referencing_relationships() {
        let s = scheme();
        let t = delete_touch(&s, s.set_id("CUSTOMERS").unwrap());
        assert!(t.sets.contains(&s.set_id("ORDERS").unwrap()));
        assert!(t.maps.contains(&s.map_id("Zone").unwrap()));
        assert!(t.maps.contains(&s.map_id("Qty").unwrap()));
        // PRODUCTS only shares a relationship with CUSTOMERS; its own
        // population is untouched.
        assert!(!t.sets.contains(&s.set_id("PRODUCTS").unwrap()));

        let t = delete_touch(&s, s.set_id("REGIONS").unwrap());
        assert!(t.maps.contains(&s.map_id("Zone").unwrap()));
        assert!(!t.sets.contains(&s.set_id("CUSTOMERS").unwrap()));
    }

    #[test]
    fn every_constraint_gets_a_footprint() {
        let s = scheme();
        let deps = dependency_map(&s);
        assert_eq!(deps.len(), s.constraints().len());
        for fp in &deps {
            assert!(!fp.sets.is_empty() || !fp.maps.is_empty());
        }
    }
}
