//! Closed universally quantified Horn-style formulas over an instance.
//!
//! A formula quantifies variables over set populations and states a boolean
//! combination of comparison and null-status atoms over terms. Evaluation is
//! two-valued with null-aware atoms: a comparison involving a null is never
//! satisfied, and only the null-status atoms observe nulls directly.

use crate::ids::{MapId, SetId};
use crate::value::{ArithOp, Value};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        matches!(
            (self, ord),
            (CmpOp::Eq, Equal)
                | (CmpOp::Ne, Less | Greater)
                | (CmpOp::Lt, Less)
                | (CmpOp::Le, Less | Equal)
                | (CmpOp::Gt, Greater)
                | (CmpOp::Ge, Greater | Equal)
        )
    }
}

/// A value-producing expression.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Term {
    /// A quantified variable, by binder index.
    Var(u32),
    Lit(Value),
    /// Application of a stored or computed mapping.
    Apply(MapId, Box<Term>),
    Arith(ArithOp, Box<Term>, Box<Term>),
    /// The validation run's current day.
    Today,
    /// Text length in characters.
    Len(Box<Term>),
    /// Leftmost `n` characters.
    Left(Box<Term>, Box<Term>),
    /// Rightmost `n` characters.
    Right(Box<Term>, Box<Term>),
    /// `n` characters starting at 1-based position `i`.
    Mid(Box<Term>, Box<Term>, Box<Term>),
}

/// A boolean combination of atoms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BoolExpr {
    /// N-ary conjunction, flattened.
    And(Vec<BoolExpr>),
    /// N-ary disjunction, flattened.
    Or(Vec<BoolExpr>),
    Not(Box<BoolExpr>),
    Implies(Box<BoolExpr>, Box<BoolExpr>),
    Cmp(CmpOp, Term, Term),
    /// `true`: the term must be null; `false`: it must not be.
    NullCheck(Term, bool),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Binder {
    pub var: String,
    pub set: SetId,
}

/// A closed formula: every variable is quantified over a set population.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Formula {
    pub binders: Vec<Binder>,
    pub body: BoolExpr,
}

impl Term {
    /// Visit this term and all subterms.
    pub fn walk(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Var(_) | Term::Lit(_) | Term::Today => {}
            Term::Apply(_, t) | Term::Len(t) => t.walk(f),
            Term::Arith(_, a, b) | Term::Left(a, b) | Term::Right(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Term::Mid(a, b, c) => {
                a.walk(f);
                b.walk(f);
                c.walk(f);
            }
        }
    }
}

impl BoolExpr {
    /// Visit every atom's terms.
    pub fn walk_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            BoolExpr::And(xs) | BoolExpr::Or(xs) => xs.iter().for_each(|x| x.walk_terms(f)),
            BoolExpr::Not(x) => x.walk_terms(f),
            BoolExpr::Implies(a, b) => {
                a.walk_terms(f);
                b.walk_terms(f);
            }
            BoolExpr::Cmp(_, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            BoolExpr::NullCheck(t, _) => t.walk(f),
        }
    }
}
