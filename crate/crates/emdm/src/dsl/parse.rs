//! Recursive-descent parser producing a [`RawScheme`].
//!
//! Declarations end in `;`; on an error the parser records it and skips to
//! the next `;`, so one run reports every malformed declaration.

use super::lex::{lex, line_col, Tok, Token};
use crate::model::*;
use crate::value::{ArithOp, Value};
use std::fmt;

#[derive(Clone, PartialEq, Debug)]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

pub fn parse(src: &str) -> Result<RawScheme, Vec<ParseError>> {
    let toks = match lex(src) {
        Ok(t) => t,
        Err(e) => {
            let (line, col) = line_col(src, e.at);
            return Err(vec![ParseError {
                message: e.message,
                line,
                col,
            }]);
        }
    };
    let mut p = Parser {
        src,
        toks,
        pos: 0,
    };
    let mut errors = Vec::new();
    let name = match p.header() {
        Ok(n) => n,
        Err(e) => {
            errors.push(e);
            p.synchronize();
            String::new()
        }
    };
    let mut decls = Vec::new();
    while p.peek().is_some() {
        match p.decl() {
            Ok(d) => decls.push(d),
            Err(e) => {
                errors.push(e);
                p.synchronize();
            }
        }
    }
    if errors.is_empty() {
        Ok(RawScheme { name, decls })
    } else {
        Err(errors)
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

/// An expression that is not yet known to be a term or a condition.
enum PExpr {
    T(RawTerm),
    B(RawBool),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.tok)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        let at = self
            .toks
            .get(self.pos)
            .map(|t| t.start)
            .unwrap_or(self.src.len());
        line_col(self.src, at)
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            message: message.into(),
            line,
            col,
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.err(format!("expected {wanted}, found {}", t.describe())),
            None => self.err(format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> PResult<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn expect_ident(&mut self, wanted: &str) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.bump().unwrap().tok {
                Tok::Ident(s) => Ok(s),
                _ => unreachable!(),
            },
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn at_kw2(&self, kw: &str) -> bool {
        matches!(self.peek2(), Some(Tok::Ident(s)) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    /// Skip past the next `;` (or to end of input) after an error.
    fn synchronize(&mut self) {
        while let Some(t) = self.peek() {
            let done = *t == Tok::Semi;
            self.pos += 1;
            if done {
                break;
            }
        }
    }

    fn header(&mut self) -> PResult<String> {
        self.expect_kw("scheme")?;
        let name = self.expect_ident("scheme name")?;
        self.expect(Tok::Semi, "`;`")?;
        Ok(name)
    }

    fn decl(&mut self) -> PResult<RawDecl> {
        if self.eat_kw("set") {
            self.set_decl()
        } else if self.eat_kw("valueset") {
            let name = self.expect_ident("value set name")?;
            self.expect(Tok::Eq, "`=`")?;
            let domain = self.domain()?;
            self.expect(Tok::Semi, "`;`")?;
            Ok(RawDecl::Set(RawSet {
                name,
                kind: RawSetKind::Value(domain),
            }))
        } else if self.eat_kw("map") {
            self.map_decl()
        } else if self.eat_kw("constraint") {
            let id = self.expect_ident("constraint name")?;
            self.expect(Tok::Colon, "`:`")?;
            let body = self.constraint_body()?;
            self.expect(Tok::Semi, "`;`")?;
            Ok(RawDecl::Constraint(RawConstraint { id, body }))
        } else if self.eat_kw("advisory") {
            let mut constraints = vec![self.dotted_ident("constraint name")?];
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                constraints.push(self.dotted_ident("constraint name")?);
            }
            self.expect(Tok::Colon, "`:`")?;
            let note = match self.bump().map(|t| t.tok) {
                Some(Tok::Str(s)) => s,
                _ => {
                    self.pos = self.pos.saturating_sub(1);
                    return Err(self.unexpected("a quoted note"));
                }
            };
            self.expect(Tok::Semi, "`;`")?;
            Ok(RawDecl::Advisory { constraints, note })
        } else {
            Err(self.unexpected("`set`, `valueset`, `map`, `constraint`, or `advisory`"))
        }
    }

    /// Constraint ids attached by annotation look like `Mother.acyclic`.
    fn dotted_ident(&mut self, wanted: &str) -> PResult<String> {
        let mut s = self.expect_ident(wanted)?;
        while self.peek() == Some(&Tok::Dot) {
            self.pos += 1;
            s.push('.');
            s.push_str(&self.expect_ident("name after `.`")?);
        }
        Ok(s)
    }

    fn set_decl(&mut self) -> PResult<RawDecl> {
        let name = self.expect_ident("set name")?;
        self.expect(Tok::Colon, "`:`")?;
        let kind = if self.eat_kw("entity") {
            RawSetKind::Entity
        } else if self.eat_kw("relationship") {
            self.expect(Tok::LParen, "`(`")?;
            let mut components = vec![self.component()?];
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                components.push(self.component()?);
            }
            self.expect(Tok::RParen, "`)`")?;
            RawSetKind::Relationship(components)
        } else if self.eat_kw("computed") {
            self.expect(Tok::Eq, "`=`")?;
            let base = self.expect_ident("base set name")?;
            self.expect_kw("where")?;
            self.expect(Tok::LParen, "`(`")?;
            let predicate = self.bool_expr()?;
            self.expect(Tok::RParen, "`)`")?;
            RawSetKind::Computed { base, predicate }
        } else {
            return Err(self.unexpected("`entity`, `relationship`, or `computed`"));
        };
        self.expect(Tok::Semi, "`;`")?;
        Ok(RawDecl::Set(RawSet { name, kind }))
    }

    fn component(&mut self) -> PResult<RawComponent> {
        let first = self.expect_ident("component")?;
        if self.peek() == Some(&Tok::Colon) {
            self.pos += 1;
            let target = self.expect_ident("component set")?;
            Ok(RawComponent {
                role: Some(first),
                target,
            })
        } else {
            Ok(RawComponent {
                role: None,
                target: first,
            })
        }
    }

    fn map_decl(&mut self) -> PResult<RawDecl> {
        let name = self.expect_ident("mapping name")?;
        self.expect(Tok::Colon, "`:`")?;
        let domain = self.expect_ident("domain set")?;
        self.expect(Tok::Arrow, "`->`")?;
        let codomain = self.codomain()?;
        let mut annots = Vec::new();
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            annots.push(self.annot()?);
        }
        self.expect(Tok::Semi, "`;`")?;
        Ok(RawDecl::Map(RawMap {
            name,
            domain,
            codomain,
            annots,
        }))
    }

    fn codomain(&mut self) -> PResult<RawCodomain> {
        match self.peek() {
            Some(Tok::LBracket | Tok::LBrace | Tok::LParen) => {
                Ok(RawCodomain::Inline(self.domain()?))
            }
            Some(Tok::Ident(s)) => {
                if base_type_starts(s) {
                    Ok(RawCodomain::Inline(self.domain()?))
                } else {
                    Ok(RawCodomain::Named(self.expect_ident("codomain")?))
                }
            }
            _ => Err(self.unexpected("a codomain")),
        }
    }

    fn annot(&mut self) -> PResult<RawAnnot> {
        if self.eat_kw("total") {
            Ok(RawAnnot::Total)
        } else if self.eat_kw("key") {
            Ok(RawAnnot::Key)
        } else if self.eat_kw("nonprime") {
            Ok(RawAnnot::NonPrime)
        } else if self.eat_kw("surjective") {
            Ok(RawAnnot::Surjective)
        } else if self.eat_kw("bijective") {
            Ok(RawAnnot::Bijective)
        } else if self.eat_kw("default") {
            self.expect(Tok::Eq, "`=`")?;
            Ok(RawAnnot::Default(self.literal()?))
        } else if self.peek() == Some(&Tok::Eq) {
            self.pos += 1;
            Ok(RawAnnot::Definition(self.map_expr()?))
        } else if let Some(Tok::Ident(s)) = self.peek() {
            match PropertyName::parse(s) {
                Some(p) => {
                    self.pos += 1;
                    Ok(RawAnnot::Property(p))
                }
                None => Err(self.unexpected("a mapping annotation")),
            }
        } else {
            Err(self.unexpected("a mapping annotation"))
        }
    }

    fn map_expr(&mut self) -> PResult<RawMapExpr> {
        if matches!(self.peek(), Some(Tok::Ident(_))) && self.at_kw2("o") {
            Ok(RawMapExpr::Chain(self.chain()?))
        } else {
            let at = self.here();
            let e = self.expr(0)?;
            Ok(RawMapExpr::Expr(self.as_term(e, at)?))
        }
    }

    /// `f o g o h`, outermost first, at least one element.
    fn chain(&mut self) -> PResult<Vec<String>> {
        let mut names = vec![self.expect_ident("mapping name")?];
        while self.at_kw("o") {
            self.pos += 1;
            names.push(self.expect_ident("mapping name after `o`")?);
        }
        Ok(names)
    }

    fn constraint_body(&mut self) -> PResult<RawConstraintBody> {
        if self.eat_kw("key") {
            let components = self.name_list()?;
            self.expect_kw("on")?;
            let set = self.expect_ident("set name")?;
            return Ok(RawConstraintBody::Key { set, components });
        }
        if self.eat_kw("subkey") {
            let sub = self.name_list()?;
            self.expect_kw("of")?;
            let full = self.name_list()?;
            self.expect_kw("on")?;
            let set = self.expect_ident("set name")?;
            return Ok(RawConstraintBody::Subkey { set, sub, full });
        }
        if self.eat_kw("formula") {
            return Ok(RawConstraintBody::Object(self.formula()?));
        }
        if self.eat_kw("diagram") {
            return Ok(RawConstraintBody::GeneralDiagram(self.formula()?));
        }
        if self.eat_kw("path") {
            let left = self.chain()?;
            if self.eat_kw("is") {
                let property = self.property_name()?;
                return Ok(RawConstraintBody::Property {
                    target: RawPropTarget::Chain(left),
                    property,
                });
            }
            let mode = if self.eat_kw("commutes") {
                PathPairMode::Equal
            } else if self.eat_kw("nullcommutes") {
                PathPairMode::NullEqual
            } else if self.eat_kw("anticommutes") {
                PathPairMode::Anti
            } else {
                return Err(self.unexpected(
                    "`is`, `commutes`, `nullcommutes`, or `anticommutes`",
                ));
            };
            self.expect_kw("with")?;
            let right = self.chain()?;
            return Ok(RawConstraintBody::PathPair { mode, left, right });
        }
        if self.at_kw("not") {
            return self.existence();
        }
        let name = self.expect_ident("a constraint clause")?;
        if self.peek() == Some(&Tok::Dot) {
            self.pos += 1;
            let right = self.expect_ident("mapping name after `.`")?;
            self.expect_kw("is")?;
            let property = self.property_name()?;
            return Ok(RawConstraintBody::Property {
                target: RawPropTarget::Product(name, right),
                property,
            });
        }
        if self.eat_kw("is") {
            let property = self.property_name()?;
            return Ok(RawConstraintBody::Property {
                target: RawPropTarget::Name(name),
                property,
            });
        }
        if self.at_kw("exists") {
            self.pos -= 1;
            return self.existence();
        }
        if self.eat_kw("subset") {
            let right = self.expect_ident("set name")?;
            return Ok(RawConstraintBody::SetRelation {
                op: SetRelOp::Inclusion,
                left: name,
                right: vec![right],
            });
        }
        if self.eat_kw("disjoint") {
            let right = self.expect_ident("set name")?;
            return Ok(RawConstraintBody::SetRelation {
                op: SetRelOp::Disjointness,
                left: name,
                right: vec![right],
            });
        }
        if self.peek() == Some(&Tok::Eq) {
            self.pos += 1;
            if self.at_kw("union") && self.peek2() == Some(&Tok::LParen) {
                self.pos += 1;
                let right = self.name_list()?;
                return Ok(RawConstraintBody::SetRelation {
                    op: SetRelOp::Union,
                    left: name,
                    right,
                });
            }
            if self.at_kw("dsum") && self.peek2() == Some(&Tok::LParen) {
                self.pos += 1;
                let right = self.name_list()?;
                return Ok(RawConstraintBody::SetRelation {
                    op: SetRelOp::DirectSum,
                    left: name,
                    right,
                });
            }
            let right = self.expect_ident("set name")?;
            return Ok(RawConstraintBody::SetRelation {
                op: SetRelOp::Equality,
                left: name,
                right: vec![right],
            });
        }
        Err(self.unexpected(
            "`is`, `.`, `exists`, `subset`, `disjoint`, or `=` after the name",
        ))
    }

    fn property_name(&mut self) -> PResult<PropertyName> {
        match self.peek() {
            Some(Tok::Ident(s)) => match PropertyName::parse(s) {
                Some(p) => {
                    self.pos += 1;
                    Ok(p)
                }
                None => Err(self.unexpected("a property keyword")),
            },
            _ => Err(self.unexpected("a property keyword")),
        }
    }

    fn existence(&mut self) -> PResult<RawConstraintBody> {
        let antecedent = self.existence_side()?;
        self.expect(Tok::Implies, "`=>`")?;
        let consequent = self.existence_side()?;
        Ok(RawConstraintBody::Existence {
            antecedent,
            consequent,
        })
    }

    fn existence_side(&mut self) -> PResult<Vec<(String, bool)>> {
        let mut side = vec![self.existence_literal()?];
        while self.eat_kw("and") {
            side.push(self.existence_literal()?);
        }
        Ok(side)
    }

    fn existence_literal(&mut self) -> PResult<(String, bool)> {
        let positive = !self.eat_kw("not");
        let name = self.expect_ident("mapping name")?;
        self.expect_kw("exists")?;
        Ok((name, positive))
    }

    fn name_list(&mut self) -> PResult<Vec<String>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut names = vec![self.expect_ident("mapping name")?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            names.push(self.expect_ident("mapping name")?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(names)
    }

    fn formula(&mut self) -> PResult<RawFormula> {
        self.expect_kw("forall")?;
        let mut binders = vec![self.binder()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            binders.push(self.binder()?);
        }
        self.expect(Tok::LParen, "`(`")?;
        let body = self.bool_expr()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(RawFormula { binders, body })
    }

    fn binder(&mut self) -> PResult<(String, String)> {
        let var = self.expect_ident("variable")?;
        self.expect_kw("in")?;
        let set = self.expect_ident("set name")?;
        Ok((var, set))
    }

    fn domain(&mut self) -> PResult<RawDomain> {
        let base = match self.peek() {
            Some(Tok::Ident(s)) if base_type_starts(s) => Some(self.base_type()?),
            _ => None,
        };
        match self.peek() {
            Some(Tok::LBracket | Tok::LParen) => {
                let lo_open = self.peek() == Some(&Tok::LParen);
                self.pos += 1;
                let lo = self.bound()?;
                self.expect(Tok::DotDot, "`..`")?;
                let hi = self.bound()?;
                let hi_open = match self.peek() {
                    Some(Tok::RBracket) => false,
                    Some(Tok::RParen) => true,
                    _ => return Err(self.unexpected("`]` or `)`")),
                };
                self.pos += 1;
                Ok(RawDomain::Interval {
                    base,
                    lo,
                    hi,
                    lo_open,
                    hi_open,
                })
            }
            Some(Tok::LBrace) => {
                self.pos += 1;
                let mut values = vec![self.literal()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    values.push(self.literal()?);
                }
                self.expect(Tok::RBrace, "`}`")?;
                Ok(RawDomain::Enum { base, values })
            }
            _ => match base {
                Some(b) => Ok(RawDomain::Base(b)),
                None => Err(self.unexpected("a domain")),
            },
        }
    }

    fn base_type(&mut self) -> PResult<BaseType> {
        let kw = self.expect_ident("a base type")?;
        let ty = match kw.as_str() {
            "DATETIME" => BaseType::Datetime,
            "BOOLE" => BaseType::Boole,
            "NAT" => BaseType::Nat(self.one_param()?),
            "INT" => BaseType::Int(self.one_param()?),
            "CURRENCY" => BaseType::Currency(self.one_param()?),
            "ASCII" => {
                self.expect(Tok::LParen, "`(`")?;
                let n = self.small_number("a length")?;
                self.expect(Tok::RParen, "`)`")?;
                BaseType::Ascii(n as u16)
            }
            "RAT" => {
                self.expect(Tok::LParen, "`(`")?;
                let n = self.small_number("a digit count")?;
                self.expect(Tok::Comma, "`,`")?;
                let m = self.small_number("a digit count")?;
                self.expect(Tok::RParen, "`)`")?;
                BaseType::Rat(n as u8, m as u8)
            }
            _ => return Err(self.err(format!("unknown base type `{kw}`"))),
        };
        ty.well_formed().map_err(|m| self.err(m))?;
        Ok(ty)
    }

    fn one_param(&mut self) -> PResult<u8> {
        self.expect(Tok::LParen, "`(`")?;
        let n = self.small_number("a digit count")?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(n as u8)
    }

    fn small_number(&mut self, wanted: &str) -> PResult<u32> {
        match self.peek() {
            Some(Tok::Num(Value::Int(n))) if (0..=65535).contains(n) => {
                let n = *n as u32;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn bound(&mut self) -> PResult<Bound> {
        if self.at_kw("Today") {
            self.pos += 1;
            self.expect(Tok::LParen, "`(`")?;
            self.expect(Tok::RParen, "`)`")?;
            Ok(Bound::Today)
        } else {
            Ok(Bound::Lit(self.literal()?))
        }
    }

    fn literal(&mut self) -> PResult<Value> {
        let negate = self.peek() == Some(&Tok::Minus);
        if negate {
            self.pos += 1;
        }
        let v = match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                v
            }
            Some(Tok::Str(s)) if !negate => {
                self.pos += 1;
                Value::Text(s)
            }
            Some(Tok::Date(d)) if !negate => {
                self.pos += 1;
                Value::Date(d)
            }
            _ => return Err(self.unexpected("a literal")),
        };
        if negate {
            match v {
                Value::Int(n) => Ok(Value::Int(-n)),
                Value::Dec(d) => Ok(Value::Dec(
                    format!("-{d}").parse().expect("negating a decimal"),
                )),
                _ => Err(self.err("only numbers can be negated")),
            }
        } else {
            Ok(v)
        }
    }

    fn bool_expr(&mut self) -> PResult<RawBool> {
        let at = self.here();
        let e = self.expr(0)?;
        self.as_bool(e, at)
    }

    fn as_term(&self, e: PExpr, at: (usize, usize)) -> PResult<RawTerm> {
        match e {
            PExpr::T(t) => Ok(t),
            PExpr::B(_) => Err(ParseError {
                message: "expected a value expression, found a condition".into(),
                line: at.0,
                col: at.1,
            }),
        }
    }

    fn as_bool(&self, e: PExpr, at: (usize, usize)) -> PResult<RawBool> {
        match e {
            PExpr::B(b) => Ok(b),
            PExpr::T(_) => Err(ParseError {
                message: "expected a condition, found a value expression".into(),
                line: at.0,
                col: at.1,
            }),
        }
    }

    /// Pratt parser over both conditions and value terms; which one an
    /// operand must be is decided by the operators applied to it.
    fn expr(&mut self, min_bp: u8) -> PResult<PExpr> {
        let at = self.here();
        let mut lhs = match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                PExpr::T(RawTerm::Lit(v))
            }
            Some(Tok::Str(s)) => {
                self.pos += 1;
                PExpr::T(RawTerm::Lit(Value::Text(s)))
            }
            Some(Tok::Date(d)) => {
                self.pos += 1;
                PExpr::T(RawTerm::Lit(Value::Date(d)))
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                let inner_at = self.here();
                let operand = self.expr(15)?;
                match self.as_term(operand, inner_at)? {
                    RawTerm::Lit(Value::Int(n)) => PExpr::T(RawTerm::Lit(Value::Int(-n))),
                    RawTerm::Lit(Value::Dec(d)) => PExpr::T(RawTerm::Lit(Value::Dec(
                        format!("-{d}").parse().expect("negating a decimal"),
                    ))),
                    t => PExpr::T(RawTerm::Arith(
                        ArithOp::Sub,
                        Box::new(RawTerm::Lit(Value::Int(0))),
                        Box::new(t),
                    )),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                inner
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "not" {
                    let inner_at = self.here();
                    let inner = self.expr(7)?;
                    PExpr::B(RawBool::Not(Box::new(self.as_bool(inner, inner_at)?)))
                } else if name == "Today" && self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    self.expect(Tok::RParen, "`)`")?;
                    PExpr::T(RawTerm::Today)
                } else if is_text_builtin(&name) && self.peek() == Some(&Tok::LParen) {
                    let args = self.call_args()?;
                    PExpr::T(self.text_builtin(&name, args, at)?)
                } else if self.peek() == Some(&Tok::LParen) {
                    let mut args = self.call_args()?;
                    if args.len() != 1 {
                        return Err(ParseError {
                            message: format!(
                                "`{name}` takes one argument, found {}",
                                args.len()
                            ),
                            line: at.0,
                            col: at.1,
                        });
                    }
                    PExpr::T(RawTerm::Apply(name, Box::new(args.remove(0))))
                } else {
                    PExpr::T(RawTerm::Name(name))
                }
            }
            _ => return Err(self.unexpected("an expression")),
        };

        loop {
            let (lbp, rbp, op) = match self.peek() {
                Some(Tok::Implies) => (2, 1, Op::Implies),
                Some(Tok::Ident(s)) if s == "or" => (3, 4, Op::Or),
                Some(Tok::Ident(s)) if s == "and" => (5, 6, Op::And),
                Some(Tok::Eq) => (9, 10, Op::Cmp(CmpOp::Eq)),
                Some(Tok::Ne) => (9, 10, Op::Cmp(CmpOp::Ne)),
                Some(Tok::Lt) => (9, 10, Op::Cmp(CmpOp::Lt)),
                Some(Tok::Le) => (9, 10, Op::Cmp(CmpOp::Le)),
                Some(Tok::Gt) => (9, 10, Op::Cmp(CmpOp::Gt)),
                Some(Tok::Ge) => (9, 10, Op::Cmp(CmpOp::Ge)),
                Some(Tok::Plus) => (11, 12, Op::Arith(ArithOp::Add)),
                Some(Tok::Minus) => (11, 12, Op::Arith(ArithOp::Sub)),
                Some(Tok::Star) => (13, 14, Op::Arith(ArithOp::Mul)),
                // Postfix null test binds looser than comparison and
                // arithmetic: `x + y is null` tests the sum.
                Some(Tok::Ident(s)) if s == "is" => (8, 8, Op::NullTest),
                _ => break,
            };
            if lbp < min_bp {
                break;
            }
            self.pos += 1;
            lhs = match op {
                Op::NullTest => {
                    let must_be_null = !self.eat_kw("not");
                    self.expect_kw("null")?;
                    PExpr::B(RawBool::Null(self.as_term(lhs, at)?, must_be_null))
                }
                Op::Implies => {
                    let rhs_at = self.here();
                    let rhs = self.expr(rbp)?;
                    PExpr::B(RawBool::Implies(
                        Box::new(self.as_bool(lhs, at)?),
                        Box::new(self.as_bool(rhs, rhs_at)?),
                    ))
                }
                Op::Or => {
                    let rhs_at = self.here();
                    let rhs = self.expr(rbp)?;
                    let r = self.as_bool(rhs, rhs_at)?;
                    match self.as_bool(lhs, at)? {
                        RawBool::Or(mut v) => {
                            v.push(r);
                            PExpr::B(RawBool::Or(v))
                        }
                        l => PExpr::B(RawBool::Or(vec![l, r])),
                    }
                }
                Op::And => {
                    let rhs_at = self.here();
                    let rhs = self.expr(rbp)?;
                    let r = self.as_bool(rhs, rhs_at)?;
                    match self.as_bool(lhs, at)? {
                        RawBool::And(mut v) => {
                            v.push(r);
                            PExpr::B(RawBool::And(v))
                        }
                        l => PExpr::B(RawBool::And(vec![l, r])),
                    }
                }
                Op::Cmp(c) => {
                    let rhs_at = self.here();
                    let rhs = self.expr(rbp)?;
                    PExpr::B(RawBool::Cmp(
                        c,
                        self.as_term(lhs, at)?,
                        self.as_term(rhs, rhs_at)?,
                    ))
                }
                Op::Arith(a) => {
                    let rhs_at = self.here();
                    let rhs = self.expr(rbp)?;
                    PExpr::T(RawTerm::Arith(
                        a,
                        Box::new(self.as_term(lhs, at)?),
                        Box::new(self.as_term(rhs, rhs_at)?),
                    ))
                }
            };
        }
        Ok(lhs)
    }

    fn call_args(&mut self) -> PResult<Vec<RawTerm>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if self.peek() != Some(&Tok::RParen) {
            loop {
                let at = self.here();
                let e = self.expr(0)?;
                args.push(self.as_term(e, at)?);
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(args)
    }

    fn text_builtin(
        &self,
        name: &str,
        mut args: Vec<RawTerm>,
        at: (usize, usize),
    ) -> PResult<RawTerm> {
        let arity = match name {
            "len" => 1,
            "left" | "right" => 2,
            _ => 3,
        };
        if args.len() != arity {
            return Err(ParseError {
                message: format!("`{name}` takes {arity} argument(s), found {}", args.len()),
                line: at.0,
                col: at.1,
            });
        }
        let mut take = || Box::new(args.remove(0));
        Ok(match name {
            "len" => RawTerm::Len(take()),
            "left" => RawTerm::Left(take(), take()),
            "right" => RawTerm::Right(take(), take()),
            _ => RawTerm::Mid(take(), take(), take()),
        })
    }
}

enum Op {
    Implies,
    Or,
    And,
    Cmp(CmpOp),
    Arith(ArithOp),
    NullTest,
}

fn is_text_builtin(name: &str) -> bool {
    matches!(name, "len" | "left" | "right" | "mid")
}

fn base_type_starts(word: &str) -> bool {
    matches!(
        word,
        "NAT" | "INT" | "RAT" | "CURRENCY" | "ASCII" | "DATETIME" | "BOOLE"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Date;

    fn parse_one(body: &str) -> RawDecl {
        let src = format!("scheme T;\n{body}\n");
        let s = parse(&src).unwrap();
        assert_eq!(s.decls.len(), 1);
        s.decls.into_iter().next().unwrap()
    }

    fn parse_constraint(body: &str) -> RawConstraintBody {
        match parse_one(&format!("constraint C : {body};")) {
            RawDecl::Constraint(c) => c.body,
            d => panic!("expected a constraint, got {d:?}"),
        }
    }

    #[test]
    fn set_forms() {
        assert_eq!(
            parse_one("set PEOPLE : entity;"),
            RawDecl::Set(RawSet {
                name: "PEOPLE".into(),
                kind: RawSetKind::Entity,
            })
        );
        assert_eq!(
            parse_one("set M : relationship(Husband: PEOPLE, COMPANIES);"),
            RawDecl::Set(RawSet {
                name: "M".into(),
                kind: RawSetKind::Relationship(vec![
                    RawComponent {
                        role: Some("Husband".into()),
                        target: "PEOPLE".into(),
                    },
                    RawComponent {
                        role: None,
                        target: "COMPANIES".into(),
                    },
                ]),
            })
        );
        let computed = parse_one("set W : computed = PEOPLE where (Gender = \"F\");");
        match computed {
            RawDecl::Set(RawSet {
                kind: RawSetKind::Computed { base, predicate },
                ..
            }) => {
                assert_eq!(base, "PEOPLE");
                assert_eq!(
                    predicate,
                    RawBool::Cmp(
                        CmpOp::Eq,
                        RawTerm::Name("Gender".into()),
                        RawTerm::Lit(Value::Text("F".into())),
                    )
                );
            }
            d => panic!("unexpected {d:?}"),
        }
    }

    #[test]
    fn domains() {
        assert_eq!(
            parse_one("valueset AGE = NAT(3) [0 .. 160];"),
            RawDecl::Set(RawSet {
                name: "AGE".into(),
                kind: RawSetKind::Value(RawDomain::Interval {
                    base: Some(BaseType::Nat(3)),
                    lo: Bound::Lit(Value::Int(0)),
                    hi: Bound::Lit(Value::Int(160)),
                    lo_open: false,
                    hi_open: false,
                }),
            })
        );
        assert_eq!(
            parse_one("valueset PAST = DATETIME (1800-01-01 .. Today()];"),
            RawDecl::Set(RawSet {
                name: "PAST".into(),
                kind: RawSetKind::Value(RawDomain::Interval {
                    base: Some(BaseType::Datetime),
                    lo: Bound::Lit(Value::Date(Date::parse("1800-01-01").unwrap())),
                    hi: Bound::Today,
                    lo_open: true,
                    hi_open: false,
                }),
            })
        );
        assert_eq!(
            parse_one("valueset GENDERS = {\"M\", \"F\"};"),
            RawDecl::Set(RawSet {
                name: "GENDERS".into(),
                kind: RawSetKind::Value(RawDomain::Enum {
                    base: None,
                    values: vec![Value::Text("M".into()), Value::Text("F".into())],
                }),
            })
        );
    }

    #[test]
    fn map_annotations() {
        let m = parse_one(
            "map Balance : ACCOUNTS -> CURRENCY(9), total, key, default = -1.50;",
        );
        match m {
            RawDecl::Map(m) => {
                assert_eq!(m.codomain, RawCodomain::Inline(RawDomain::Base(BaseType::Currency(9))));
                assert_eq!(
                    m.annots,
                    vec![
                        RawAnnot::Total,
                        RawAnnot::Key,
                        RawAnnot::Default(Value::Dec("-1.50".parse().unwrap())),
                    ]
                );
            }
            d => panic!("unexpected {d:?}"),
        }
        let m = parse_one("map GrannyM : PEOPLE -> PEOPLE, = Mother o Mother;");
        match m {
            RawDecl::Map(m) => assert_eq!(
                m.annots,
                vec![RawAnnot::Definition(RawMapExpr::Chain(vec![
                    "Mother".into(),
                    "Mother".into(),
                ]))]
            ),
            d => panic!("unexpected {d:?}"),
        }
        let m = parse_one("map Span : PEOPLE -> INT(6), = Died - BirthDate;");
        match m {
            RawDecl::Map(m) => assert_eq!(
                m.annots,
                vec![RawAnnot::Definition(RawMapExpr::Expr(RawTerm::Arith(
                    ArithOp::Sub,
                    Box::new(RawTerm::Name("Died".into())),
                    Box::new(RawTerm::Name("BirthDate".into())),
                )))]
            ),
            d => panic!("unexpected {d:?}"),
        }
    }

    #[test]
    fn constraint_forms() {
        assert_eq!(
            parse_constraint("key (FName, LName) on PEOPLE"),
            RawConstraintBody::Key {
                set: "PEOPLE".into(),
                components: vec!["FName".into(), "LName".into()],
            }
        );
        assert_eq!(
            parse_constraint("subkey (SSN) of (SSN, Country) on PEOPLE"),
            RawConstraintBody::Subkey {
                set: "PEOPLE".into(),
                sub: vec!["SSN".into()],
                full: vec!["SSN".into(), "Country".into()],
            }
        );
        assert_eq!(
            parse_constraint("Buried exists and not Died exists => not Born exists"),
            RawConstraintBody::Existence {
                antecedent: vec![("Buried".into(), true), ("Died".into(), false)],
                consequent: vec![("Born".into(), false)],
            }
        );
        assert_eq!(
            parse_constraint("MARRIAGES is irreflexive"),
            RawConstraintBody::Property {
                target: RawPropTarget::Name("MARRIAGES".into()),
                property: PropertyName::Irreflexive,
            }
        );
        assert_eq!(
            parse_constraint("Mother . Father is nulleuclidean"),
            RawConstraintBody::Property {
                target: RawPropTarget::Product("Mother".into(), "Father".into()),
                property: PropertyName::NullEuclidean,
            }
        );
        assert_eq!(
            parse_constraint("path Country o State o Capital is nullreflexive"),
            RawConstraintBody::Property {
                target: RawPropTarget::Chain(vec![
                    "Country".into(),
                    "State".into(),
                    "Capital".into(),
                ]),
                property: PropertyName::NullReflexive,
            }
        );
        assert_eq!(
            parse_constraint("path GrannyM anticommutes with Mother o Mother"),
            RawConstraintBody::PathPair {
                mode: PathPairMode::Anti,
                left: vec!["GrannyM".into()],
                right: vec!["Mother".into(), "Mother".into()],
            }
        );
        assert_eq!(
            parse_constraint("PEOPLE = dsum(MALES, FEMALES)"),
            RawConstraintBody::SetRelation {
                op: SetRelOp::DirectSum,
                left: "PEOPLE".into(),
                right: vec!["MALES".into(), "FEMALES".into()],
            }
        );
        assert_eq!(
            parse_constraint("WIDOWS subset PEOPLE"),
            RawConstraintBody::SetRelation {
                op: SetRelOp::Inclusion,
                left: "WIDOWS".into(),
                right: vec!["PEOPLE".into()],
            }
        );
    }

    #[test]
    fn formula_expression_shapes() {
        let body = parse_constraint(
            "formula forall p in PEOPLE (Died(p) is null or BirthDate(p) <= Died(p))",
        );
        match body {
            RawConstraintBody::Object(f) => {
                assert_eq!(f.binders, vec![("p".into(), "PEOPLE".into())]);
                match f.body {
                    RawBool::Or(v) => {
                        assert_eq!(v.len(), 2);
                        assert_eq!(
                            v[0],
                            RawBool::Null(
                                RawTerm::Apply(
                                    "Died".into(),
                                    Box::new(RawTerm::Name("p".into()))
                                ),
                                true,
                            )
                        );
                    }
                    b => panic!("unexpected {b:?}"),
                }
            }
            d => panic!("unexpected {d:?}"),
        }
    }

    #[test]
    fn precedence_and_flattening() {
        let b = parse_constraint(
            "formula forall p in S (a(p) = 1 and b(p) = 2 and c(p) = 3 or d(p) = 4 => e(p) is not null)",
        );
        match b {
            RawConstraintBody::Object(f) => match f.body {
                RawBool::Implies(l, r) => {
                    match *l {
                        RawBool::Or(v) => {
                            assert_eq!(v.len(), 2);
                            match &v[0] {
                                RawBool::And(c) => assert_eq!(c.len(), 3),
                                b => panic!("unexpected {b:?}"),
                            }
                        }
                        b => panic!("unexpected {b:?}"),
                    }
                    assert_eq!(*r, RawBool::Null(RawTerm::Apply("e".into(), Box::new(RawTerm::Name("p".into()))), false));
                }
                b => panic!("unexpected {b:?}"),
            },
            d => panic!("unexpected {d:?}"),
        }
    }

    #[test]
    fn arithmetic_precedence() {
        let b = parse_constraint("formula forall p in S (x(p) + 2 * 3 = 7)");
        match b {
            RawConstraintBody::Object(f) => match f.body {
                RawBool::Cmp(CmpOp::Eq, l, _) => match l {
                    RawTerm::Arith(ArithOp::Add, _, r) => {
                        assert!(matches!(*r, RawTerm::Arith(ArithOp::Mul, _, _)))
                    }
                    t => panic!("unexpected {t:?}"),
                },
                b => panic!("unexpected {b:?}"),
            },
            d => panic!("unexpected {d:?}"),
        }
    }

    #[test]
    fn error_recovery_reports_each_bad_declaration() {
        let errs = parse("scheme T;\nset A : entity\nset B : entity;\nmap : X -> Y;\n")
            .unwrap_err();
        assert_eq!(errs.len(), 2);
        assert!(errs[0].message.contains("expected `;`"));
        assert_eq!(errs[0].line, 3);
        assert!(errs[1].line >= 4);
    }

    #[test]
    fn advisories_allow_dotted_ids() {
        assert_eq!(
            parse_one("advisory C3, Mother.acyclic : \"second is implied\";"),
            RawDecl::Advisory {
                constraints: vec!["C3".into(), "Mother.acyclic".into()],
                note: "second is implied".into(),
            }
        );
    }
}
