//! A mutation session with a chosen revalidation policy.
//!
//! Eager sessions keep a per-constraint violation cache and refresh exactly
//! the constraints whose footprint overlaps each mutation, so a report is
//! free. Deferred sessions validate from scratch when the report is asked
//! for. Both policies report the same violations for the same final state;
//! the difference is purely when the checking work happens.

use crate::ids::{ElemId, MapId, SetId};
use crate::store::{DeleteMode, Instance, StoreError};
use crate::value::Value;

use super::checks;
use super::deps::{self, Footprint};
use super::Violation;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ValidationMode {
    /// Revalidate affected constraints after every mutation.
    Eager,
    /// Revalidate everything when a report is requested.
    Deferred,
}

pub struct Session<'s> {
    inst: Instance<'s>,
    mode: ValidationMode,
    /// Per-constraint observation footprints, index-aligned with the
    /// scheme's constraint list.
    footprints: Vec<Footprint>,
    /// Per-constraint violation cache; maintained only in eager mode.
    cache: Vec<Vec<Violation>>,
}

impl<'s> Session<'s> {
    pub fn new(inst: Instance<'s>, mode: ValidationMode) -> Session<'s> {
        let scheme = inst.scheme();
        let footprints = deps::dependency_map(scheme);
        let cache = match mode {
            ValidationMode::Eager => scheme
                .constraints()
                .iter()
                .map(|c| checks::check(&inst, c))
                .collect(),
            ValidationMode::Deferred => Vec::new(),
        };
        Session {
            inst,
            mode,
            footprints,
            cache,
        }
    }

    pub fn mode(&self) -> ValidationMode {
        self.mode
    }

    pub fn instance(&self) -> &Instance<'s> {
        &self.inst
    }

    pub fn into_instance(self) -> Instance<'s> {
        self.inst
    }

    /// Insert a fresh element; in eager mode, revalidate what the insert
    /// can have disturbed.
    pub fn insert(
        &mut self,
        set: SetId,
        assignments: &[(MapId, Value)],
    ) -> Result<ElemId, StoreError> {
        let id = self.inst.insert(set, assignments)?;
        self.refresh(deps::insert_touch(self.inst.scheme(), set));
        Ok(id)
    }

    /// Reassign stored mappings of an existing element.
    pub fn update(
        &mut self,
        set: SetId,
        elem: ElemId,
        assignments: &[(MapId, Value)],
    ) -> Result<(), StoreError> {
        self.inst.update(set, elem, assignments)?;
        let maps: Vec<MapId> = assignments.iter().map(|&(m, _)| m).collect();
        self.refresh(deps::update_touch(&maps));
        Ok(())
    }

    /// Delete an element under the given mode.
    pub fn delete(&mut self, set: SetId, elem: ElemId, mode: DeleteMode) -> Result<(), StoreError> {
        self.inst.delete(set, elem, mode)?;
        self.refresh(deps::delete_touch(self.inst.scheme(), set));
        Ok(())
    }

    fn refresh(&mut self, touch: Footprint) {
        if self.mode != ValidationMode::Eager {
            return;
        }
        for (i, c) in self.inst.scheme().constraints().iter().enumerate() {
            if self.footprints[i].intersects(&touch) {
                self.cache[i] = checks::check(&self.inst, c);
            }
        }
    }

    /// Current violations, grouped by constraint in scheme declaration
    /// order. In eager mode this reads the cache; in deferred mode it runs
    /// a full validation.
    pub fn report(&self) -> Vec<Violation> {
        match self.mode {
            ValidationMode::Eager => self.cache.iter().flatten().cloned().collect(),
            ValidationMode::Deferred => super::validate_all(&self.inst),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_scheme;
    use crate::value::Date;

    const SRC: &str = r#"
scheme FLOW;

set BINS : entity;
set ITEMS : entity;
set HEAVY : computed = ITEMS where (Qty >= 10);

map Label : ITEMS -> ASCII(8), total, key;
map Qty : ITEMS -> NAT(4);
map Home : ITEMS -> BINS;
map Cap : BINS -> NAT(4), total;

constraint HeavyHomed : formula forall h in HEAVY (Home(h) is not null);
"#;

    fn today() -> Date {
        Date::parse("2026-08-14").unwrap()
    }

    /// Eager and deferred must agree with each other and with a from-scratch
    /// validation of the same state.
    fn agree(e: &Session, l: &Session) -> Vec<String> {
        let ve = e.report();
        assert_eq!(ve, l.report());
        assert_eq!(ve, super::super::validate_all(e.instance()));
        ve.into_iter().map(|v| v.message).collect()
    }

    fn both<'s>(
        e: &mut Session<'s>,
        l: &mut Session<'s>,
        f: impl Fn(&mut Session<'s>),
    ) -> Vec<String> {
        f(e);
        f(l);
        agree(e, l)
    }

    #[test]
    fn eager_and_deferred_agree_after_every_mutation() {
        let s = parse_scheme(SRC).unwrap();
        let mut eager = Session::new(Instance::new(&s, today()), ValidationMode::Eager);
        let mut lazy = Session::new(Instance::new(&s, today()), ValidationMode::Deferred);
        assert_eq!(eager.mode(), ValidationMode::Eager);
        assert!(agree(&eager, &lazy).is_empty());

        let bins = s.set_id("BINS").unwrap();
        let items = s.set_id("ITEMS").unwrap();
        let label = s.map_id("Label").unwrap();
        let qty = s.map_id("Qty").unwrap();
        let home = s.map_id("Home").unwrap();
        let cap = s.map_id("Cap").unwrap();
        let t = |x: &str| Value::Text(x.into());

        let msgs = both(&mut eager, &mut lazy, |se| {
            se.insert(bins, &[]).unwrap();
        });
        assert_eq!(msgs, ["Cap(BINS[1]) is null"]);

        let msgs = both(&mut eager, &mut lazy, |se| {
            se.update(bins, ElemId(1), &[(cap, Value::Int(5))]).unwrap();
        });
        assert!(msgs.is_empty());

        let msgs = both(&mut eager, &mut lazy, |se| {
            se.insert(items, &[(label, t("a"))]).unwrap();
            se.insert(items, &[]).unwrap();
        });
        assert_eq!(msgs, ["Label(ITEMS[2]) is null"]);

        let msgs = both(&mut eager, &mut lazy, |se| {
            se.update(items, ElemId(2), &[(label, t("a"))]).unwrap();
        });
        assert_eq!(msgs, ["ITEMS[1] and ITEMS[2] agree on Label"]);

        // A Qty update has no set in its touch, yet it moves ITEMS[2] into
        // the computed HEAVY population; the formula watching HEAVY observes
        // the predicate mapping and must be refreshed.
        let msgs = both(&mut eager, &mut lazy, |se| {
            se.update(items, ElemId(2), &[(label, t("b")), (qty, Value::Int(12))])
                .unwrap();
        });
        assert_eq!(msgs, ["does not hold at h = HEAVY[2]"]);

        let msgs = both(&mut eager, &mut lazy, |se| {
            se.update(items, ElemId(2), &[(home, Value::Elem(bins, ElemId(1)))])
                .unwrap();
        });
        assert!(msgs.is_empty());

        // A refused mutation leaves both sessions unchanged and in step.
        assert!(eager.delete(bins, ElemId(1), DeleteMode::Restrict).is_err());
        assert!(lazy.delete(bins, ElemId(1), DeleteMode::Restrict).is_err());
        assert!(agree(&eager, &lazy).is_empty());

        // Cascading the delete nulls Home(ITEMS[2]) and revives the HEAVY
        // complaint through the delete touch.
        let msgs = both(&mut eager, &mut lazy, |se| {
            se.delete(bins, ElemId(1), DeleteMode::Cascade).unwrap();
        });
        assert_eq!(msgs, ["does not hold at h = HEAVY[2]"]);

        let inst = eager.into_instance();
        assert_eq!(inst.members(items).len(), 2);
        assert!(inst.members(bins).is_empty());
    }
}
