//! Text form of schemes: tokenizer, parser, and canonical printer.
//!
//! [`parse_scheme`] goes straight from source text to a resolved
//! [`Scheme`]; [`parse`] stops at the name-based AST. [`print`] renders a
//! scheme in the canonical layout (sets, then mappings, then constraints),
//! which parses back to an equal scheme.

mod lex;
mod parse;
mod print;

pub use parse::{parse, ParseError};
pub use print::print;

use crate::model::{build_scheme, ModelError, Scheme};
use std::fmt;

#[derive(Debug)]
pub enum DslError {
    Parse(Vec<ParseError>),
    Model(ModelError),
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DslError::Parse(errs) => {
                for (i, e) in errs.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
            DslError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DslError {}

impl From<ModelError> for DslError {
    fn from(e: ModelError) -> DslError {
        DslError::Model(e)
    }
}

/// Parse and resolve scheme text.
pub fn parse_scheme(src: &str) -> Result<Scheme, DslError> {
    let raw = parse(src).map_err(DslError::Parse)?;
    Ok(build_scheme(&raw)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
scheme SHOP;

set CUSTOMERS : entity;
set PRODUCTS : entity;
set ORDERS : relationship(Buyer: CUSTOMERS, Item: PRODUCTS);

map CName : CUSTOMERS -> ASCII(40), total, key;
map Price : PRODUCTS -> CURRENCY(9), total, default = 0.99;
map Sponsor : CUSTOMERS -> CUSTOMERS, acyclic;

constraint C1 : formula forall o in ORDERS (Price(Item(o)) > 0);
";

    #[test]
    fn parse_scheme_resolves_end_to_end() {
        let s = parse_scheme(SMALL).unwrap();
        assert_eq!(s.name, "SHOP");
        assert!(s.set_id("ORDERS").is_some());
        assert!(s.map_id("Buyer").is_some(), "projection mapping exists");
    }

    #[test]
    fn component_roles_must_not_collide_with_set_names() {
        // A bare component would name its projection after the target set,
        // which the shared set/mapping namespace rejects.
        let err = parse_scheme(
            "scheme X;\nset A : entity;\nset R : relationship(First: A, A);\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("already declared"), "{err}");
    }

    #[test]
    fn print_then_parse_is_identity_on_canonical_sources() {
        let s1 = parse_scheme(SMALL).unwrap();
        let text = print(&s1);
        let s2 = parse_scheme(&text).unwrap();
        assert_eq!(s1, s2, "printed form:\n{text}");
        assert_eq!(text, print(&s2));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_scheme("scheme X;\nset A entity;\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn model_errors_pass_through() {
        let err = parse_scheme("scheme X;\nmap F : A -> NAT(3);\n").unwrap_err();
        assert!(matches!(err, DslError::Model(_)), "{err}");
    }
}
