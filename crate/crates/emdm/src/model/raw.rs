//! The name-based scheme AST, as produced by the text parser (or built
//! programmatically). All references are by name; [`super::build_scheme`]
//! resolves them into a [`super::Scheme`].

use super::domain::{BaseType, Bound};
use super::{PairProperty, PathPairMode, SelfMapProperty, SetRelOp};
use crate::value::{ArithOp, Value};
use crate::model::formula::CmpOp;

#[derive(Clone, PartialEq, Debug)]
pub struct RawScheme {
    pub name: String,
    pub decls: Vec<RawDecl>,
}

#[derive(Clone, PartialEq, Debug)]
pub enum RawDecl {
    Set(RawSet),
    Map(RawMap),
    Constraint(RawConstraint),
    Advisory { constraints: Vec<String>, note: String },
}

#[derive(Clone, PartialEq, Debug)]
pub struct RawSet {
    pub name: String,
    pub kind: RawSetKind,
}

#[derive(Clone, PartialEq, Debug)]
pub enum RawSetKind {
    Entity,
    Relationship(Vec<RawComponent>),
    /// A named value domain (`valueset` declaration).
    Value(RawDomain),
    Computed { base: String, predicate: RawBool },
}

#[derive(Clone, PartialEq, Debug)]
pub struct RawComponent {
    /// Defaults to the target set's name when omitted.
    pub role: Option<String>,
    pub target: String,
}

/// A domain expression: a base type, a restriction of one, or a bare
/// restriction whose base type is inferred from its literals.
#[derive(Clone, PartialEq, Debug)]
pub enum RawDomain {
    Base(BaseType),
    Interval {
        base: Option<BaseType>,
        lo: Bound,
        hi: Bound,
        lo_open: bool,
        hi_open: bool,
    },
    Enum {
        base: Option<BaseType>,
        values: Vec<Value>,
    },
}

#[derive(Clone, PartialEq, Debug)]
pub struct RawMap {
    pub name: String,
    pub domain: String,
    pub codomain: RawCodomain,
    pub annots: Vec<RawAnnot>,
}

#[derive(Clone, PartialEq, Debug)]
pub enum RawCodomain {
    /// An object set, named value set, or BOOLE.
    Named(String),
    /// An anonymous value domain.
    Inline(RawDomain),
}

#[derive(Clone, PartialEq, Debug)]
pub enum RawAnnot {
    Total,
    Key,
    NonPrime,
    Surjective,
    Bijective,
    Default(Value),
    /// A self-map property keyword on the mapping itself.
    Property(PropertyName),
    /// `= expr`: the mapping is computed.
    Definition(RawMapExpr),
}

#[derive(Clone, PartialEq, Debug)]
pub enum RawMapExpr {
    /// Composition `f o g o h`, outermost first.
    Chain(Vec<String>),
    /// Arithmetic over the domain row; bare mapping names apply to the row.
    Expr(RawTerm),
}

#[derive(Clone, PartialEq, Debug)]
pub struct RawConstraint {
    pub id: String,
    pub body: RawConstraintBody,
}

#[derive(Clone, PartialEq, Debug)]
pub enum RawConstraintBody {
    /// `target is property`.
    Property {
        target: RawPropTarget,
        property: PropertyName,
    },
    /// `key (A, B) on S`.
    Key { set: String, components: Vec<String> },
    /// `subkey (A) of (A, B) on S`.
    Subkey {
        set: String,
        sub: Vec<String>,
        full: Vec<String>,
    },
    /// `[not] A exists and ... => [not] B exists and ...`; the flag is
    /// `true` for literals that must be non-null.
    Existence {
        antecedent: Vec<(String, bool)>,
        consequent: Vec<(String, bool)>,
    },
    SetRelation {
        op: SetRelOp,
        left: String,
        right: Vec<String>,
    },
    /// `path f o g commutes|nullcommutes|anticommutes with h o k`.
    PathPair {
        mode: PathPairMode,
        left: Vec<String>,
        right: Vec<String>,
    },
    /// `diagram forall ...`: commutativity condition as a formula.
    GeneralDiagram(RawFormula),
    /// `formula forall ...`.
    Object(RawFormula),
}

/// Target of an `is` property clause.
#[derive(Clone, PartialEq, Debug)]
pub enum RawPropTarget {
    /// A set (dyadic relationship) or a mapping; resolved by lookup.
    Name(String),
    /// Mapping product `f . g`.
    Product(String, String),
    /// Composition path `f o g o ...`, outermost first.
    Chain(Vec<String>),
}

#[derive(Clone, PartialEq, Debug)]
pub struct RawFormula {
    /// `(variable, set)` binders in order.
    pub binders: Vec<(String, String)>,
    pub body: RawBool,
}

#[derive(Clone, PartialEq, Debug)]
pub enum RawBool {
    And(Vec<RawBool>),
    Or(Vec<RawBool>),
    Not(Box<RawBool>),
    Implies(Box<RawBool>, Box<RawBool>),
    Cmp(CmpOp, RawTerm, RawTerm),
    /// `true`: the term must be null.
    Null(RawTerm, bool),
}

#[derive(Clone, PartialEq, Debug)]
pub enum RawTerm {
    /// A bound variable, or (in point-free contexts) a mapping applied to
    /// the implicit row.
    Name(String),
    Lit(Value),
    /// `F(t)`.
    Apply(String, Box<RawTerm>),
    Arith(ArithOp, Box<RawTerm>, Box<RawTerm>),
    /// `Today()`.
    Today,
    /// `len(t)`.
    Len(Box<RawTerm>),
    /// `left(t, n)`.
    Left(Box<RawTerm>, Box<RawTerm>),
    /// `right(t, n)`.
    Right(Box<RawTerm>, Box<RawTerm>),
    /// `mid(t, i, n)`.
    Mid(Box<RawTerm>, Box<RawTerm>, Box<RawTerm>),
}

/// The property keywords accepted after `is`. Whether a keyword denotes a
/// pair property or a self-map property depends on the target; the two
/// vocabularies overlap.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum PropertyName {
    Connected,
    Reflexive,
    Irreflexive,
    Symmetric,
    Asymmetric,
    Transitive,
    Intransitive,
    Euclidean,
    InEuclidean,
    Equivalence,
    Acyclic,
    NullIdentity,
    NullReflexive,
    NullSymmetric,
    NullTransitive,
    NullEuclidean,
    NullEquivalence,
    Idempotent,
    NullIdempotent,
    AntiIdempotent,
    RepSystem,
    NullRepSystem,
}

impl PropertyName {
    pub const ALL: [PropertyName; 22] = [
        PropertyName::Connected,
        PropertyName::Reflexive,
        PropertyName::Irreflexive,
        PropertyName::Symmetric,
        PropertyName::Asymmetric,
        PropertyName::Transitive,
        PropertyName::Intransitive,
        PropertyName::Euclidean,
        PropertyName::InEuclidean,
        PropertyName::Equivalence,
        PropertyName::Acyclic,
        PropertyName::NullIdentity,
        PropertyName::NullReflexive,
        PropertyName::NullSymmetric,
        PropertyName::NullTransitive,
        PropertyName::NullEuclidean,
        PropertyName::NullEquivalence,
        PropertyName::Idempotent,
        PropertyName::NullIdempotent,
        PropertyName::AntiIdempotent,
        PropertyName::RepSystem,
        PropertyName::NullRepSystem,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyName::Connected => "connected",
            PropertyName::Reflexive => "reflexive",
            PropertyName::Irreflexive => "irreflexive",
            PropertyName::Symmetric => "symmetric",
            PropertyName::Asymmetric => "asymmetric",
            PropertyName::Transitive => "transitive",
            PropertyName::Intransitive => "intransitive",
            PropertyName::Euclidean => "euclidean",
            PropertyName::InEuclidean => "ineuclidean",
            PropertyName::Equivalence => "equivalence",
            PropertyName::Acyclic => "acyclic",
            PropertyName::NullIdentity => "nullidentity",
            PropertyName::NullReflexive => "nullreflexive",
            PropertyName::NullSymmetric => "nullsymmetric",
            PropertyName::NullTransitive => "nulltransitive",
            PropertyName::NullEuclidean => "nulleuclidean",
            PropertyName::NullEquivalence => "nullequivalence",
            PropertyName::Idempotent => "idempotent",
            PropertyName::NullIdempotent => "nullidempotent",
            PropertyName::AntiIdempotent => "antiidempotent",
            PropertyName::RepSystem => "repsystem",
            PropertyName::NullRepSystem => "nullrepsystem",
        }
    }

    pub fn parse(s: &str) -> Option<PropertyName> {
        PropertyName::ALL.iter().copied().find(|p| p.name() == s)
    }

    /// The pair-relation reading of the keyword, if it has one.
    pub fn as_pair(self) -> Option<PairProperty> {
        Some(match self {
            PropertyName::Connected => PairProperty::Connectivity,
            PropertyName::Reflexive => PairProperty::Reflexivity,
            PropertyName::Irreflexive => PairProperty::Irreflexivity,
            PropertyName::Symmetric => PairProperty::Symmetry,
            PropertyName::Asymmetric => PairProperty::Asymmetry,
            PropertyName::Transitive => PairProperty::Transitivity,
            PropertyName::Intransitive => PairProperty::Intransitivity,
            PropertyName::Euclidean => PairProperty::Euclidean,
            PropertyName::InEuclidean => PairProperty::InEuclidean,
            PropertyName::Equivalence => PairProperty::Equivalence,
            PropertyName::Acyclic => PairProperty::Acyclicity,
            PropertyName::NullIdentity => PairProperty::NullIdentity,
            PropertyName::NullReflexive => PairProperty::NullReflexivity,
            PropertyName::NullSymmetric => PairProperty::NullSymmetry,
            PropertyName::NullTransitive => PairProperty::NullTransitivity,
            PropertyName::NullEuclidean => PairProperty::NullEuclidean,
            PropertyName::NullEquivalence => PairProperty::NullEquivalence,
            _ => return None,
        })
    }

    /// The self-map reading of the keyword, if it has one.
    pub fn as_self_map(self) -> Option<SelfMapProperty> {
        Some(match self {
            PropertyName::Reflexive => SelfMapProperty::Reflexivity,
            PropertyName::NullReflexive => SelfMapProperty::NullReflexivity,
            PropertyName::Irreflexive => SelfMapProperty::Irreflexivity,
            PropertyName::Symmetric => SelfMapProperty::Symmetry,
            PropertyName::NullSymmetric => SelfMapProperty::NullSymmetry,
            PropertyName::Asymmetric => SelfMapProperty::Asymmetry,
            PropertyName::Idempotent => SelfMapProperty::Idempotency,
            PropertyName::NullIdempotent => SelfMapProperty::NullIdempotency,
            PropertyName::AntiIdempotent => SelfMapProperty::AntiIdempotency,
            PropertyName::RepSystem => SelfMapProperty::RepSystem,
            PropertyName::NullRepSystem => SelfMapProperty::NullRepSystem,
            PropertyName::Equivalence => SelfMapProperty::Equivalence,
            PropertyName::NullEquivalence => SelfMapProperty::NullEquivalence,
            PropertyName::Acyclic => SelfMapProperty::Acyclicity,
            _ => return None,
        })
    }

    /// Keywords usable as mapping annotations (self-map properties).
    pub fn annotation_ok(self) -> bool {
        self.as_self_map().is_some()
    }
}
