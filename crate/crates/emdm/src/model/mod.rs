//! The resolved scheme: sets, mappings, and constraints with every name
//! reference replaced by a dense id.
//!
//! A scheme is built from a [`raw::RawScheme`] by [`build::build_scheme`],
//! which resolves names, type-checks formulas and definitions, attaches the
//! implicit system constraints, and computes the id scopes that make element
//! identity meaningful across related sets. Built schemes are immutable.

mod build;
mod domain;
mod formula;
mod raw;

pub use build::{build_scheme, ModelError};
pub use domain::{BaseType, Bound, DomainShape, DomainViolation, ValueDomain, MAX_DIGITS};
pub use formula::{Binder, BoolExpr, CmpOp, Formula, Term};
pub use raw::{
    PropertyName, RawAnnot, RawBool, RawCodomain, RawComponent, RawConstraint, RawConstraintBody,
    RawDecl, RawDomain, RawFormula, RawMap, RawMapExpr, RawPropTarget, RawScheme, RawSet,
    RawSetKind, RawTerm,
};

use crate::ids::{ElemId, MapId, SetId};
use crate::registry::ConstraintKind;
use crate::value::Value;
use std::collections::HashMap;

/// One component of a relationship set, with its canonical projection.
#[derive(Clone, PartialEq, Debug)]
pub struct Component {
    /// Projection mapping name; defaults to the target set's name.
    pub role: String,
    pub target: SetId,
    /// The canonical projection mapping created for this component.
    pub mapping: MapId,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SystemSet {
    Boole,
    Empty,
}

impl SystemSet {
    pub fn name(self) -> &'static str {
        match self {
            SystemSet::Boole => "BOOLE",
            SystemSet::Empty => "EMPTY",
        }
    }

    /// The fixed value population of the system set.
    pub fn population(self) -> Vec<Value> {
        match self {
            SystemSet::Boole => vec![Value::Bool(false), Value::Bool(true)],
            SystemSet::Empty => vec![],
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum SetKind {
    Entity,
    Relationship { components: Vec<Component> },
    /// A named value domain.
    Value { domain: ValueDomain },
    /// Members of `base` satisfying `predicate` (over the implicit row).
    Computed { base: SetId, predicate: BoolExpr },
    System(SystemSet),
}

#[derive(Clone, PartialEq, Debug)]
pub struct SetDecl {
    pub name: String,
    pub kind: SetKind,
}

impl SetDecl {
    /// Object sets have stored element populations.
    pub fn is_object(&self) -> bool {
        matches!(self.kind, SetKind::Entity | SetKind::Relationship { .. })
    }
}

/// What a mapping maps into.
#[derive(Clone, PartialEq, Debug)]
pub enum Codomain {
    /// An object set, value set, or system set.
    Set(SetId),
    /// An anonymous value domain.
    Inline(ValueDomain),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MapKind {
    /// Maps into a value domain.
    Attribute,
    /// Maps into an object set.
    Structural,
    /// Defined by an expression over other mappings.
    Computed,
}

/// A computed mapping's definition.
#[derive(Clone, PartialEq, Debug)]
pub enum MapExpr {
    /// Composition chain, outermost first: `Chain([f, g])` is `f ∘ g`.
    Chain(Vec<MapId>),
    /// Point-free arithmetic over the domain row (`Var(0)`).
    Expr(Term),
}

#[derive(Clone, PartialEq, Debug)]
pub struct MappingDecl {
    pub name: String,
    pub domain: SetId,
    pub codomain: Codomain,
    pub kind: MapKind,
    /// False exactly when a totality constraint is declared on the mapping.
    pub nullable: bool,
    /// Canonical projections of relationship sets are implicitly total.
    pub is_projection: bool,
    pub default: Option<Value>,
    pub definition: Option<MapExpr>,
}

/// Relational properties a pair population can be constrained by.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PairProperty {
    Connectivity,
    Reflexivity,
    Irreflexivity,
    Symmetry,
    Asymmetry,
    Transitivity,
    Intransitivity,
    Euclidean,
    InEuclidean,
    Equivalence,
    Acyclicity,
    NullIdentity,
    NullReflexivity,
    NullSymmetry,
    NullTransitivity,
    NullEuclidean,
    NullEquivalence,
}

impl PairProperty {
    pub const ALL: [PairProperty; 17] = [
        PairProperty::Connectivity,
        PairProperty::Reflexivity,
        PairProperty::Irreflexivity,
        PairProperty::Symmetry,
        PairProperty::Asymmetry,
        PairProperty::Transitivity,
        PairProperty::Intransitivity,
        PairProperty::Euclidean,
        PairProperty::InEuclidean,
        PairProperty::Equivalence,
        PairProperty::Acyclicity,
        PairProperty::NullIdentity,
        PairProperty::NullReflexivity,
        PairProperty::NullSymmetry,
        PairProperty::NullTransitivity,
        PairProperty::NullEuclidean,
        PairProperty::NullEquivalence,
    ];

    /// The eleven properties that ignore null-bearing pairs.
    pub const NON_NULL: [PairProperty; 11] = [
        PairProperty::Connectivity,
        PairProperty::Reflexivity,
        PairProperty::Irreflexivity,
        PairProperty::Symmetry,
        PairProperty::Asymmetry,
        PairProperty::Transitivity,
        PairProperty::Intransitivity,
        PairProperty::Euclidean,
        PairProperty::InEuclidean,
        PairProperty::Equivalence,
        PairProperty::Acyclicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PairProperty::Connectivity => "connected",
            PairProperty::Reflexivity => "reflexive",
            PairProperty::Irreflexivity => "irreflexive",
            PairProperty::Symmetry => "symmetric",
            PairProperty::Asymmetry => "asymmetric",
            PairProperty::Transitivity => "transitive",
            PairProperty::Intransitivity => "intransitive",
            PairProperty::Euclidean => "euclidean",
            PairProperty::InEuclidean => "ineuclidean",
            PairProperty::Equivalence => "equivalence",
            PairProperty::Acyclicity => "acyclic",
            PairProperty::NullIdentity => "nullidentity",
            PairProperty::NullReflexivity => "nullreflexive",
            PairProperty::NullSymmetry => "nullsymmetric",
            PairProperty::NullTransitivity => "nulltransitive",
            PairProperty::NullEuclidean => "nulleuclidean",
            PairProperty::NullEquivalence => "nullequivalence",
        }
    }
}

/// Properties of a mapping (or composed path) from a set to itself.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SelfMapProperty {
    Reflexivity,
    NullReflexivity,
    Irreflexivity,
    Symmetry,
    NullSymmetry,
    Asymmetry,
    Idempotency,
    NullIdempotency,
    AntiIdempotency,
    RepSystem,
    NullRepSystem,
    Equivalence,
    NullEquivalence,
    Acyclicity,
}

impl SelfMapProperty {
    pub const ALL: [SelfMapProperty; 14] = [
        SelfMapProperty::Reflexivity,
        SelfMapProperty::NullReflexivity,
        SelfMapProperty::Irreflexivity,
        SelfMapProperty::Symmetry,
        SelfMapProperty::NullSymmetry,
        SelfMapProperty::Asymmetry,
        SelfMapProperty::Idempotency,
        SelfMapProperty::NullIdempotency,
        SelfMapProperty::AntiIdempotency,
        SelfMapProperty::RepSystem,
        SelfMapProperty::NullRepSystem,
        SelfMapProperty::Equivalence,
        SelfMapProperty::NullEquivalence,
        SelfMapProperty::Acyclicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SelfMapProperty::Reflexivity => "reflexive",
            SelfMapProperty::NullReflexivity => "nullreflexive",
            SelfMapProperty::Irreflexivity => "irreflexive",
            SelfMapProperty::Symmetry => "symmetric",
            SelfMapProperty::NullSymmetry => "nullsymmetric",
            SelfMapProperty::Asymmetry => "asymmetric",
            SelfMapProperty::Idempotency => "idempotent",
            SelfMapProperty::NullIdempotency => "nullidempotent",
            SelfMapProperty::AntiIdempotency => "antiidempotent",
            SelfMapProperty::RepSystem => "repsystem",
            SelfMapProperty::NullRepSystem => "nullrepsystem",
            SelfMapProperty::Equivalence => "equivalence",
            SelfMapProperty::NullEquivalence => "nullequivalence",
            SelfMapProperty::Acyclicity => "acyclic",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SetRelOp {
    /// `left ⊆ right[0]`
    Inclusion,
    /// `left = right[0]`
    Equality,
    /// `left ∩ right[0] = ∅`
    Disjointness,
    /// `left = right[0] ∪ … ∪ right[k]`
    Union,
    /// Union with pairwise disjoint parts.
    DirectSum,
}

/// What a pair-property constraint is attached to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PairTarget {
    /// A binary relationship set whose two components share a target.
    DyadicSet(SetId),
    /// A homogeneous product `left . right` of mappings on `set`.
    Product { set: SetId, left: MapId, right: MapId },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MapGeneralOp {
    Totality,
    SingleKey,
    NonPrimeness,
    Surjectivity,
    Bijectivity,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PathPairMode {
    /// Both paths defined and equal everywhere.
    Equal,
    /// Equal wherever both are defined.
    NullEqual,
    /// Different wherever both are defined.
    Anti,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ConstraintOrigin {
    /// Written as a constraint declaration.
    Explicit,
    /// Generated from a mapping annotation.
    Annotation,
    /// Attached by the builder: ranges, referential integrity, canonical
    /// relationship keys.
    System,
}

#[derive(Clone, PartialEq, Debug)]
pub enum ConstraintBody {
    SetRelation {
        op: SetRelOp,
        left: SetId,
        right: Vec<SetId>,
    },
    PairProperty {
        target: PairTarget,
        property: PairProperty,
    },
    /// Self-map property of a composition path (single mapping when the
    /// path has length one).
    SelfMapProperty {
        path: Vec<MapId>,
        property: SelfMapProperty,
    },
    MapGeneral {
        op: MapGeneralOp,
        mapping: MapId,
    },
    /// The default literal lives on the mapping declaration.
    Default {
        mapping: MapId,
    },
    /// Concatenated key over two or more components.
    Key {
        set: SetId,
        components: Vec<MapId>,
    },
    /// `sub` behaves as a key on rows where every mapping in
    /// `full ∖ sub` is null.
    Subkey {
        set: SetId,
        sub: Vec<MapId>,
        full: Vec<MapId>,
    },
    /// Null-status implication between products over a common domain. The
    /// flag is `true` for literals that must be non-null.
    ExistencePattern {
        set: SetId,
        antecedent: Vec<(MapId, bool)>,
        consequent: Vec<(MapId, bool)>,
    },
    /// Two composition paths with a common source compared pointwise.
    PathPair {
        mode: PathPairMode,
        left: Vec<MapId>,
        right: Vec<MapId>,
    },
    /// Commutativity condition expressed as a formula over a diagram.
    GeneralDiagram {
        formula: Formula,
    },
    Object {
        formula: Formula,
    },
    /// System: attribute values lie in the declared domain.
    Range {
        mapping: MapId,
    },
    /// System: structural values reference existing elements.
    RefIntegrity {
        mapping: MapId,
    },
}

#[derive(Clone, PartialEq, Debug)]
pub struct ConstraintDecl {
    pub id: String,
    pub kind: ConstraintKind,
    pub origin: ConstraintOrigin,
    pub body: ConstraintBody,
}

/// A hand-curated note attaching an advisory to named constraints, carried
/// in the scheme text and surfaced by the analysis operations.
#[derive(Clone, PartialEq, Debug)]
pub struct CuratedAdvisory {
    pub constraints: Vec<String>,
    pub note: String,
}

/// A resolved, immutable scheme.
#[derive(Clone, PartialEq, Debug)]
pub struct Scheme {
    pub name: String,
    sets: Vec<SetDecl>,
    mappings: Vec<MappingDecl>,
    constraints: Vec<ConstraintDecl>,
    advisories: Vec<CuratedAdvisory>,
    set_index: HashMap<String, SetId>,
    map_index: HashMap<String, MapId>,
    /// Id-scope representative per set: object sets related by set
    /// constraints or computed-set bases share a scope and hence an id
    /// space.
    scopes: Vec<u32>,
}

impl Scheme {
    pub fn sets(&self) -> impl Iterator<Item = (SetId, &SetDecl)> {
        self.sets
            .iter()
            .enumerate()
            .map(|(i, s)| (SetId(i as u32), s))
    }

    pub fn mappings(&self) -> impl Iterator<Item = (MapId, &MappingDecl)> {
        self.mappings
            .iter()
            .enumerate()
            .map(|(i, m)| (MapId(i as u32), m))
    }

    pub fn constraints(&self) -> &[ConstraintDecl] {
        &self.constraints
    }

    pub fn advisories(&self) -> &[CuratedAdvisory] {
        &self.advisories
    }

    pub fn set(&self, id: SetId) -> &SetDecl {
        &self.sets[id.0 as usize]
    }

    pub fn mapping(&self, id: MapId) -> &MappingDecl {
        &self.mappings[id.0 as usize]
    }

    pub fn set_id(&self, name: &str) -> Option<SetId> {
        self.set_index.get(name).copied()
    }

    pub fn map_id(&self, name: &str) -> Option<MapId> {
        self.map_index.get(name).copied()
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    pub fn map_count(&self) -> usize {
        self.mappings.len()
    }

    /// Mappings stored on `set` (not computed), in declaration order.
    pub fn stored_mappings_on(&self, set: SetId) -> impl Iterator<Item = (MapId, &MappingDecl)> {
        self.mappings()
            .filter(move |(_, m)| m.domain == set && m.kind != MapKind::Computed)
    }

    /// The id scope a set's elements draw their identifiers from.
    pub fn scope_of(&self, set: SetId) -> u32 {
        self.scopes[set.0 as usize]
    }

    /// Whether a value of set `sub` can be used where `sup` is expected:
    /// the sets are identical or share an id scope.
    pub fn assignable(&self, sub: SetId, sup: SetId) -> bool {
        sub == sup || self.scope_of(sub) == self.scope_of(sup)
    }

    /// Source set of a non-empty composition path (outermost first).
    pub fn chain_source(&self, chain: &[MapId]) -> SetId {
        self.mapping(*chain.last().expect("chain must be non-empty")).domain
    }

    /// Codomain of a non-empty composition path (outermost first).
    pub fn chain_target(&self, chain: &[MapId]) -> &Codomain {
        &self.mapping(chain[0]).codomain
    }

    /// The resolved value domain of an attribute codomain, if any.
    pub fn value_domain(&self, codomain: &Codomain) -> Option<ValueDomain> {
        match codomain {
            Codomain::Inline(d) => Some(d.clone()),
            Codomain::Set(id) => match &self.set(*id).kind {
                SetKind::Value { domain } => Some(domain.clone()),
                SetKind::System(SystemSet::Boole) => Some(ValueDomain {
                    base: BaseType::Boole,
                    shape: DomainShape::Full,
                }),
                _ => None,
            },
        }
    }

    /// The canonical runtime value for a stored element. The set tag is the
    /// id-scope representative, so references reached through different
    /// sets of one scope compare equal.
    pub fn elem_value(&self, set: SetId, id: ElemId) -> Value {
        Value::Elem(SetId(self.scope_of(set)), id)
    }

    /// The object set a structural codomain refers to, if any.
    pub fn object_codomain(&self, codomain: &Codomain) -> Option<SetId> {
        match codomain {
            Codomain::Set(id) if self.set(*id).is_object() => Some(*id),
            _ => None,
        }
    }
}

/// The registry kind a constraint body falls under.
pub fn kind_of(body: &ConstraintBody) -> ConstraintKind {
    use ConstraintKind as K;
    match body {
        ConstraintBody::SetRelation { op, .. } => match op {
            SetRelOp::Inclusion => K::SetInclusion,
            SetRelOp::Equality => K::SetEquality,
            SetRelOp::Disjointness => K::SetDisjointness,
            SetRelOp::Union => K::SetUnion,
            SetRelOp::DirectSum => K::SetDirectSum,
        },
        ConstraintBody::PairProperty { target, property } => {
            let dyadic = matches!(target, PairTarget::DyadicSet(_));
            pair_property_kind(*property, dyadic)
        }
        ConstraintBody::SelfMapProperty { path, property } => {
            self_map_kind(*property, path.len() > 1)
        }
        ConstraintBody::MapGeneral { op, .. } => match op {
            MapGeneralOp::Totality => K::Totality,
            MapGeneralOp::SingleKey => K::SingleKey,
            MapGeneralOp::NonPrimeness => K::NonPrimeness,
            MapGeneralOp::Surjectivity => K::Surjectivity,
            MapGeneralOp::Bijectivity => K::Bijectivity,
        },
        ConstraintBody::Default { .. } => K::DefaultValue,
        ConstraintBody::Key { .. } => K::ConcatenatedKey,
        ConstraintBody::Subkey { .. } => K::Subkey,
        ConstraintBody::ExistencePattern { consequent, .. } => {
            if consequent.iter().all(|(_, nn)| *nn) {
                K::Existence
            } else {
                K::NonExistence
            }
        }
        ConstraintBody::PathPair { mode, .. } => match mode {
            PathPairMode::Equal => K::DiagramCommutativity,
            PathPairMode::NullEqual => K::DiagramNullCommutativity,
            PathPairMode::Anti => K::DiagramAntiCommutativity,
        },
        ConstraintBody::GeneralDiagram { .. } => K::DiagramGeneralCommutativity,
        // Domain membership and referential integrity are closed Horn
        // conditions; they report under the object kind.
        ConstraintBody::Object { .. }
        | ConstraintBody::Range { .. }
        | ConstraintBody::RefIntegrity { .. } => K::ObjectFormula,
    }
}

fn pair_property_kind(property: PairProperty, dyadic: bool) -> ConstraintKind {
    use ConstraintKind as K;
    use PairProperty as P;
    if dyadic {
        match property {
            P::Connectivity => K::DyadicConnectivity,
            P::Reflexivity => K::DyadicReflexivity,
            P::Irreflexivity => K::DyadicIrreflexivity,
            P::Symmetry => K::DyadicSymmetry,
            P::Asymmetry => K::DyadicAsymmetry,
            P::Transitivity => K::DyadicTransitivity,
            P::Intransitivity => K::DyadicIntransitivity,
            P::Euclidean => K::DyadicEuclidean,
            P::InEuclidean => K::DyadicInEuclidean,
            P::Equivalence => K::DyadicEquivalence,
            P::Acyclicity => K::DyadicAcyclicity,
            _ => unreachable!("null properties are rejected on dyadic targets"),
        }
    } else {
        match property {
            P::Connectivity => K::HbfpConnectivity,
            P::Reflexivity => K::HbfpReflexivity,
            P::Irreflexivity => K::HbfpIrreflexivity,
            P::Symmetry => K::HbfpSymmetry,
            P::Asymmetry => K::HbfpAsymmetry,
            P::Transitivity => K::HbfpTransitivity,
            P::Intransitivity => K::HbfpIntransitivity,
            P::Euclidean => K::HbfpEuclidean,
            P::InEuclidean => K::HbfpInEuclidean,
            P::Equivalence => K::HbfpEquivalence,
            P::Acyclicity => K::HbfpAcyclicity,
            P::NullIdentity => K::HbfpNullIdentity,
            P::NullReflexivity => K::HbfpNullReflexivity,
            P::NullSymmetry => K::HbfpNullSymmetry,
            P::NullTransitivity => K::HbfpNullTransitivity,
            P::NullEuclidean => K::HbfpNullEuclidean,
            P::NullEquivalence => K::HbfpNullEquivalence,
        }
    }
}

fn self_map_kind(property: SelfMapProperty, composed: bool) -> ConstraintKind {
    use ConstraintKind as K;
    use SelfMapProperty as P;
    if composed {
        match property {
            P::Reflexivity => K::DiagramLocalCommutativity,
            P::NullReflexivity => K::DiagramLocalNullCommutativity,
            P::Irreflexivity => K::DiagramLocalAntiCommutativity,
            P::Symmetry => K::DiagramLocalSymmetry,
            P::NullSymmetry => K::DiagramLocalNullSymmetry,
            P::Asymmetry => K::DiagramLocalAsymmetry,
            P::Idempotency => K::DiagramLocalIdempotency,
            P::NullIdempotency => K::DiagramLocalNullIdempotency,
            P::AntiIdempotency => K::DiagramLocalAntiIdempotency,
            P::RepSystem => K::DiagramLocalRepSystem,
            P::NullRepSystem => K::DiagramLocalNullRepSystem,
            P::Equivalence => K::DiagramLocalEquivalence,
            P::NullEquivalence => K::DiagramLocalNullEquivalence,
            P::Acyclicity => K::DiagramLocalAcyclicity,
        }
    } else {
        match property {
            P::Reflexivity => K::SelfMapReflexivity,
            P::NullReflexivity => K::SelfMapNullReflexivity,
            P::Irreflexivity => K::SelfMapIrreflexivity,
            P::Symmetry => K::SelfMapSymmetry,
            P::NullSymmetry => K::SelfMapNullSymmetry,
            P::Asymmetry => K::SelfMapAsymmetry,
            P::Idempotency => K::SelfMapIdempotency,
            P::NullIdempotency => K::SelfMapNullIdempotency,
            P::AntiIdempotency => K::SelfMapAntiIdempotency,
            P::RepSystem => K::SelfMapRepSystem,
            P::NullRepSystem => K::SelfMapNullRepSystem,
            P::Equivalence => K::SelfMapEquivalence,
            P::NullEquivalence => K::SelfMapNullEquivalence,
            P::Acyclicity => K::SelfMapAcyclicity,
        }
    }
}

pub(crate) struct SchemeParts {
    pub name: String,
    pub sets: Vec<SetDecl>,
    pub mappings: Vec<MappingDecl>,
    pub constraints: Vec<ConstraintDecl>,
    pub advisories: Vec<CuratedAdvisory>,
    pub scopes: Vec<u32>,
}

impl Scheme {
    pub(crate) fn from_parts(parts: SchemeParts) -> Scheme {
        let set_index = parts
            .sets
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name.clone(), SetId(i as u32)))
            .collect();
        let map_index = parts
            .mappings
            .iter()
            .enumerate()
            .map(|(i, m)| (m.name.clone(), MapId(i as u32)))
            .collect();
        Scheme {
            name: parts.name,
            sets: parts.sets,
            mappings: parts.mappings,
            constraints: parts.constraints,
            advisories: parts.advisories,
            set_index,
            map_index,
            scopes: parts.scopes,
        }
    }
}
