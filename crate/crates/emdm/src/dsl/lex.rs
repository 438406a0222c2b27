//! Tokenizer for the scheme language.
//!
//! `--` starts a line comment. Date literals are recognized by adjacency:
//! a digit run immediately followed by `-dd-dd` lexes as one date token, so
//! subtraction involving numbers wants spaces around the minus sign.

use crate::value::{Date, Value};

#[derive(Clone, PartialEq, Debug)]
pub enum Tok {
    Ident(String),
    Num(Value),
    Str(String),
    Date(Date),
    Semi,
    Colon,
    Comma,
    Dot,
    DotDot,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Arrow,
    Implies,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(v) => format!("number {v}"),
            Tok::Str(_) => "string literal".into(),
            Tok::Date(d) => format!("date {d}"),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::DotDot => "`..`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Implies => "`=>`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Ne => "`!=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, PartialEq, Debug)]
pub struct LexError {
    pub message: String,
    pub at: usize,
}

/// 1-based line and column of a byte offset.
pub fn line_col(src: &str, at: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for (i, c) in src.char_indices() {
        if i >= at {
            break;
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

pub fn lex(src: &str) -> Result<Vec<Token>, LexError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'-' && b.get(i + 1) == Some(&b'-') {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = match c {
            b';' => {
                i += 1;
                Tok::Semi
            }
            b':' => {
                i += 1;
                Tok::Colon
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b'.' => {
                if b.get(i + 1) == Some(&b'.') {
                    i += 2;
                    Tok::DotDot
                } else {
                    i += 1;
                    Tok::Dot
                }
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'{' => {
                i += 1;
                Tok::LBrace
            }
            b'}' => {
                i += 1;
                Tok::RBrace
            }
            b'[' => {
                i += 1;
                Tok::LBracket
            }
            b']' => {
                i += 1;
                Tok::RBracket
            }
            b'+' => {
                i += 1;
                Tok::Plus
            }
            b'*' => {
                i += 1;
                Tok::Star
            }
            b'-' => {
                if b.get(i + 1) == Some(&b'>') {
                    i += 2;
                    Tok::Arrow
                } else {
                    i += 1;
                    Tok::Minus
                }
            }
            b'=' => {
                if b.get(i + 1) == Some(&b'>') {
                    i += 2;
                    Tok::Implies
                } else {
                    i += 1;
                    Tok::Eq
                }
            }
            b'!' => {
                if b.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Tok::Ne
                } else {
                    return Err(LexError {
                        message: "stray `!`; did you mean `!=`?".into(),
                        at: i,
                    });
                }
            }
            b'<' => {
                if b.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Tok::Le
                } else {
                    i += 1;
                    Tok::Lt
                }
            }
            b'>' => {
                if b.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Tok::Ge
                } else {
                    i += 1;
                    Tok::Gt
                }
            }
            b'"' => {
                i += 1;
                let mut s = String::new();
                loop {
                    match b.get(i) {
                        None | Some(b'\n') => {
                            return Err(LexError {
                                message: "unterminated string".into(),
                                at: start,
                            })
                        }
                        Some(b'"') => {
                            i += 1;
                            break;
                        }
                        Some(b'\\') => {
                            let esc = b.get(i + 1).copied();
                            s.push(match esc {
                                Some(b'\\') => '\\',
                                Some(b'"') => '"',
                                Some(b'n') => '\n',
                                Some(b't') => '\t',
                                _ => {
                                    return Err(LexError {
                                        message: "unknown escape".into(),
                                        at: i,
                                    })
                                }
                            });
                            i += 2;
                        }
                        Some(_) => {
                            // Step over one UTF-8 scalar.
                            let rest = &src[i..];
                            let ch = rest.chars().next().unwrap();
                            s.push(ch);
                            i += ch.len_utf8();
                        }
                    }
                }
                Tok::Str(s)
            }
            b'0'..=b'9' => {
                if let Some(end) = try_date(b, i) {
                    let d = Date::parse(&src[i..end]).ok_or_else(|| LexError {
                        message: format!("invalid calendar date `{}`", &src[i..end]),
                        at: i,
                    })?;
                    i = end;
                    Tok::Date(d)
                } else {
                    let mut j = i;
                    while j < b.len() && b[j].is_ascii_digit() {
                        j += 1;
                    }
                    if b.get(j) == Some(&b'.')
                        && b.get(j + 1).is_some_and(|d| d.is_ascii_digit())
                    {
                        j += 1;
                        while j < b.len() && b[j].is_ascii_digit() {
                            j += 1;
                        }
                        let d = src[i..j].parse().map_err(|_| LexError {
                            message: "number has too many digits".into(),
                            at: i,
                        })?;
                        i = j;
                        Tok::Num(Value::Dec(d))
                    } else {
                        let n: i128 = src[i..j].parse().map_err(|_| LexError {
                            message: "number is too large".into(),
                            at: i,
                        })?;
                        i = j;
                        Tok::Num(Value::Int(n))
                    }
                }
            }
            c if c == b'_' || c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < b.len() && (b[j] == b'_' || b[j].is_ascii_alphanumeric()) {
                    j += 1;
                }
                let word = &src[i..j];
                i = j;
                match word {
                    "true" => Tok::Num(Value::Bool(true)),
                    "false" => Tok::Num(Value::Bool(false)),
                    _ => Tok::Ident(word.to_string()),
                }
            }
            _ => {
                return Err(LexError {
                    message: format!("unexpected character {:?}", src[i..].chars().next().unwrap()),
                    at: i,
                })
            }
        };
        out.push(Token {
            tok,
            start,
            end: i,
        });
    }
    Ok(out)
}

/// Recognize `d{1,6}-dd-dd` with no intervening spaces, not followed by
/// another digit; returns the end offset.
fn try_date(b: &[u8], start: usize) -> Option<usize> {
    let mut i = start;
    let mut year_digits = 0;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
        year_digits += 1;
    }
    if year_digits > 6 {
        return None;
    }
    for _ in 0..2 {
        if b.get(i) != Some(&b'-') {
            return None;
        }
        i += 1;
        for _ in 0..2 {
            if !b.get(i).is_some_and(|d| d.is_ascii_digit()) {
                return None;
            }
            i += 1;
        }
    }
    if b.get(i).is_some_and(|d| d.is_ascii_digit()) {
        return None;
    }
    Some(i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        lex(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn dates_fuse_only_when_adjacent() {
        assert_eq!(
            kinds("1900-01-01"),
            vec![Tok::Date(Date::parse("1900-01-01").unwrap())]
        );
        assert_eq!(
            kinds("1900 - 01"),
            vec![
                Tok::Num(Value::Int(1900)),
                Tok::Minus,
                Tok::Num(Value::Int(1)),
            ]
        );
        // Three-digit tail breaks the date shape.
        assert_eq!(kinds("5-30-123").len(), 5);
    }

    #[test]
    fn comments_and_strings() {
        assert_eq!(
            kinds("x -- the rest\n\"a\\\"b\\n\""),
            vec![Tok::Ident("x".into()), Tok::Str("a\"b\n".into())]
        );
    }

    #[test]
    fn compound_punctuation() {
        assert_eq!(
            kinds("-> => != <= >= .. . -"),
            vec![
                Tok::Arrow,
                Tok::Implies,
                Tok::Ne,
                Tok::Le,
                Tok::Ge,
                Tok::DotDot,
                Tok::Dot,
                Tok::Minus,
            ]
        );
    }

    #[test]
    fn decimals_and_booleans() {
        assert_eq!(
            kinds("3.14 true false"),
            vec![
                Tok::Num(Value::Dec("3.14".parse().unwrap())),
                Tok::Num(Value::Bool(true)),
                Tok::Num(Value::Bool(false)),
            ]
        );
    }

    #[test]
    fn spans_locate_lines() {
        let src = "scheme X;\nset";
        let toks = lex(src).unwrap();
        assert_eq!(line_col(src, toks[3].start), (2, 1));
    }
}
