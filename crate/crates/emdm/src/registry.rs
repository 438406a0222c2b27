//! The closed registry of constraint kinds.
//!
//! Every constraint a scheme can carry is one of the 76 kinds below, grouped
//! into eight families. A kind is *fundamental* when it cannot be derived
//! from other kinds; derived kinds (bijectivity, equivalence, the null
//! variants of set-level properties, every self-map kind, the local diagram
//! kinds) are checked by delegating to the kinds they derive from.
//!
//! | family      | kinds | fundamental |
//! |-------------|------:|------------:|
//! | set-general |     5 |           1 |
//! | set-dyadic  |    11 |           0 |
//! | map-general |     6 |           4 |
//! | map-product |     4 |           4 |
//! | hbfp        |    17 |          11 |
//! | self-map    |    14 |           0 |
//! | diagram     |    18 |           3 |
//! | object      |     1 |           1 |
//!
//! "hbfp" abbreviates *homogeneous binary function product*: a pair of
//! mappings `f, g : D -> C` whose image, read as a set of ordered pairs over
//! `C`, is constrained like a binary relation.

use std::fmt;

/// The eight constraint families.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ConstraintFamily {
    SetGeneral,
    SetDyadic,
    MapGeneral,
    MapProduct,
    Hbfp,
    SelfMap,
    Diagram,
    Object,
}

impl ConstraintFamily {
    pub const ALL: [ConstraintFamily; 8] = [
        ConstraintFamily::SetGeneral,
        ConstraintFamily::SetDyadic,
        ConstraintFamily::MapGeneral,
        ConstraintFamily::MapProduct,
        ConstraintFamily::Hbfp,
        ConstraintFamily::SelfMap,
        ConstraintFamily::Diagram,
        ConstraintFamily::Object,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstraintFamily::SetGeneral => "set-general",
            ConstraintFamily::SetDyadic => "set-dyadic",
            ConstraintFamily::MapGeneral => "map-general",
            ConstraintFamily::MapProduct => "map-product",
            ConstraintFamily::Hbfp => "hbfp",
            ConstraintFamily::SelfMap => "self-map",
            ConstraintFamily::Diagram => "diagram",
            ConstraintFamily::Object => "object",
        }
    }
}

impl fmt::Display for ConstraintFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

macro_rules! constraint_kinds {
    ($( $variant:ident, $name:literal, $family:ident, $fundamental:literal; )+) => {
        /// One of the 76 constraint kinds. No operation in this crate
        /// accepts a kind outside this enumeration.
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
        pub enum ConstraintKind {
            $( $variant, )+
        }

        impl ConstraintKind {
            pub const ALL: [ConstraintKind; 76] = [
                $( ConstraintKind::$variant, )+
            ];

            /// Stable kebab-case name used in reports and plans.
            pub fn name(self) -> &'static str {
                match self {
                    $( ConstraintKind::$variant => $name, )+
                }
            }

            pub fn family(self) -> ConstraintFamily {
                match self {
                    $( ConstraintKind::$variant => ConstraintFamily::$family, )+
                }
            }

            pub fn is_fundamental(self) -> bool {
                match self {
                    $( ConstraintKind::$variant => $fundamental, )+
                }
            }
        }
    };
}

constraint_kinds! {
    // Set constraints relating whole populations.
    SetInclusion,        "inclusion",          SetGeneral, true;
    SetEquality,         "set-equality",       SetGeneral, false;
    SetDisjointness,     "disjointness",       SetGeneral, false;
    SetUnion,            "union",              SetGeneral, false;
    SetDirectSum,        "direct-sum",         SetGeneral, false;

    // Properties of a homogeneous binary relationship set.
    DyadicReflexivity,   "dyadic-reflexivity",   SetDyadic, false;
    DyadicIrreflexivity, "dyadic-irreflexivity", SetDyadic, false;
    DyadicSymmetry,      "dyadic-symmetry",      SetDyadic, false;
    DyadicAsymmetry,     "dyadic-asymmetry",     SetDyadic, false;
    DyadicTransitivity,  "dyadic-transitivity",  SetDyadic, false;
    DyadicIntransitivity,"dyadic-intransitivity",SetDyadic, false;
    DyadicEuclidean,     "dyadic-euclideanity",  SetDyadic, false;
    DyadicInEuclidean,   "dyadic-ineuclideanity",SetDyadic, false;
    DyadicEquivalence,   "dyadic-equivalence",   SetDyadic, false;
    DyadicAcyclicity,    "dyadic-acyclicity",    SetDyadic, false;
    DyadicConnectivity,  "dyadic-connectivity",  SetDyadic, false;

    // Constraints on a single mapping.
    Totality,            "totality",           MapGeneral, false;
    SingleKey,           "single-key",         MapGeneral, true;
    NonPrimeness,        "non-primeness",      MapGeneral, true;
    Surjectivity,        "surjectivity",       MapGeneral, true;
    Bijectivity,         "bijectivity",        MapGeneral, false;
    DefaultValue,        "default-value",      MapGeneral, true;

    // Constraints on a product of mappings over a common domain.
    ConcatenatedKey,     "concatenated-key",   MapProduct, true;
    Subkey,              "subkey",             MapProduct, true;
    Existence,           "existence",          MapProduct, true;
    NonExistence,        "non-existence",      MapProduct, true;

    // Properties of a homogeneous binary function product f . g : D -> C.
    HbfpConnectivity,    "hbfp-connectivity",    Hbfp, true;
    HbfpReflexivity,     "hbfp-reflexivity",     Hbfp, true;
    HbfpIrreflexivity,   "hbfp-irreflexivity",   Hbfp, true;
    HbfpSymmetry,        "hbfp-symmetry",        Hbfp, true;
    HbfpAsymmetry,       "hbfp-asymmetry",       Hbfp, true;
    HbfpTransitivity,    "hbfp-transitivity",    Hbfp, true;
    HbfpIntransitivity,  "hbfp-intransitivity",  Hbfp, true;
    HbfpEuclidean,       "hbfp-euclideanity",    Hbfp, true;
    HbfpInEuclidean,     "hbfp-ineuclideanity",  Hbfp, true;
    HbfpEquivalence,     "hbfp-equivalence",     Hbfp, false;
    HbfpAcyclicity,      "hbfp-acyclicity",      Hbfp, true;
    HbfpNullIdentity,    "hbfp-null-identity",   Hbfp, true;
    HbfpNullReflexivity, "hbfp-null-reflexivity",Hbfp, false;
    HbfpNullSymmetry,    "hbfp-null-symmetry",   Hbfp, false;
    HbfpNullTransitivity,"hbfp-null-transitivity",Hbfp, false;
    HbfpNullEuclidean,   "hbfp-null-euclideanity",Hbfp, false;
    HbfpNullEquivalence, "hbfp-null-equivalence", Hbfp, false;

    // Properties of a mapping f : S -> S (or a composition closing a cycle).
    SelfMapReflexivity,  "self-map-reflexivity",   SelfMap, false;
    SelfMapNullReflexivity, "self-map-null-reflexivity", SelfMap, false;
    SelfMapIrreflexivity,"self-map-irreflexivity", SelfMap, false;
    SelfMapSymmetry,     "self-map-symmetry",      SelfMap, false;
    SelfMapNullSymmetry, "self-map-null-symmetry", SelfMap, false;
    SelfMapAsymmetry,    "self-map-asymmetry",     SelfMap, false;
    SelfMapIdempotency,  "self-map-idempotency",   SelfMap, false;
    SelfMapNullIdempotency, "self-map-null-idempotency", SelfMap, false;
    SelfMapAntiIdempotency, "self-map-anti-idempotency", SelfMap, false;
    SelfMapRepSystem,    "self-map-representative-system", SelfMap, false;
    SelfMapNullRepSystem,"self-map-null-representative-system", SelfMap, false;
    SelfMapEquivalence,  "self-map-equivalence",   SelfMap, false;
    SelfMapNullEquivalence, "self-map-null-equivalence", SelfMap, false;
    SelfMapAcyclicity,   "self-map-acyclicity",    SelfMap, false;

    // Function-diagram constraints over composition paths.
    DiagramCommutativity,     "commutativity",          Diagram, true;
    DiagramNullCommutativity, "null-commutativity",     Diagram, false;
    DiagramAntiCommutativity, "anti-commutativity",     Diagram, true;
    DiagramGeneralCommutativity, "general-commutativity", Diagram, true;
    DiagramLocalCommutativity,   "local-commutativity",   Diagram, false;
    DiagramLocalNullCommutativity, "local-null-commutativity", Diagram, false;
    DiagramLocalAntiCommutativity, "local-anti-commutativity", Diagram, false;
    DiagramLocalSymmetry,     "local-symmetry",         Diagram, false;
    DiagramLocalNullSymmetry, "local-null-symmetry",    Diagram, false;
    DiagramLocalAsymmetry,    "local-asymmetry",        Diagram, false;
    DiagramLocalIdempotency,  "local-idempotency",      Diagram, false;
    DiagramLocalNullIdempotency, "local-null-idempotency", Diagram, false;
    DiagramLocalAntiIdempotency, "local-anti-idempotency", Diagram, false;
    DiagramLocalEquivalence,  "local-equivalence",      Diagram, false;
    DiagramLocalNullEquivalence, "local-null-equivalence", Diagram, false;
    DiagramLocalAcyclicity,   "local-acyclicity",       Diagram, false;
    DiagramLocalRepSystem,    "local-representative-system", Diagram, false;
    DiagramLocalNullRepSystem,"local-null-representative-system", Diagram, false;

    // Everything else: a closed Horn formula over the instance.
    ObjectFormula,       "object-formula",     Object, true;
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The full registry in declaration order.
pub fn kind_registry() -> &'static [ConstraintKind] {
    &ConstraintKind::ALL
}
