//! A reference implementation of a mathematical data model: schemes are
//! collections of sets, mappings between them, and constraints; instances
//! are element populations with mapping valuations. The crate provides the
//! scheme language, an in-memory store, a validation engine covering the
//! full constraint-kind registry, a constraint-set analyzer, and a compiler
//! that splits a scheme into relational DDL plus a plan for everything a
//! relational engine cannot enforce.

pub mod data;
pub mod dsl;
pub mod engine;
pub mod ids;
pub mod model;
pub mod pairs;
pub mod registry;
pub mod store;
pub mod value;
