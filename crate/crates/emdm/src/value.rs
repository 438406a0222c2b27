//! Runtime values: the distinguished null marker, bounded integers, exact
//! decimals, day-count dates, text, booleans, and references to stored
//! elements.
//!
//! Dates are plain day counts since 1970-01-01 in the proleptic Gregorian
//! calendar, so date arithmetic is integer arithmetic and year offsets are
//! written as explicit day literals (`16 * 365`). Decimals are exact scaled
//! integers, never floats, so value equality and hashing are well defined.

use crate::ids::{ElemId, SetId};
use chrono::{Datelike, NaiveDate};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Days from 0001-01-01 (`num_days_from_ce` day 1) to 1970-01-01.
const EPOCH_FROM_CE: i64 = 719_163;

/// An exact decimal `units / 10^scale`, kept at minimal scale so that equal
/// numbers have equal representations.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Decimal {
    units: i128,
    scale: u8,
}

impl Decimal {
    pub fn new(units: i128, scale: u8) -> Decimal {
        let mut d = Decimal { units, scale };
        while d.scale > 0 && d.units % 10 == 0 {
            d.units /= 10;
            d.scale -= 1;
        }
        d
    }

    pub fn from_int(units: i128) -> Decimal {
        Decimal { units, scale: 0 }
    }

    pub fn units(&self) -> i128 {
        self.units
    }

    pub fn scale(&self) -> u8 {
        self.scale
    }

    /// Count of significant digits before the decimal point (at least 1).
    pub fn int_digits(&self) -> u32 {
        let mut whole = (self.units / pow10(self.scale as u32)).unsigned_abs();
        let mut digits = 1;
        while whole >= 10 {
            whole /= 10;
            digits += 1;
        }
        digits
    }

    /// Rescale both operands to a common scale, failing on overflow.
    fn align(a: Decimal, b: Decimal) -> Option<(i128, i128, u8)> {
        let scale = a.scale.max(b.scale);
        let au = a.units.checked_mul(pow10((scale - a.scale) as u32))?;
        let bu = b.units.checked_mul(pow10((scale - b.scale) as u32))?;
        Some((au, bu, scale))
    }

    pub fn checked_add(self, other: Decimal) -> Option<Decimal> {
        let (a, b, scale) = Decimal::align(self, other)?;
        Some(Decimal::new(a.checked_add(b)?, scale))
    }

    pub fn checked_sub(self, other: Decimal) -> Option<Decimal> {
        let (a, b, scale) = Decimal::align(self, other)?;
        Some(Decimal::new(a.checked_sub(b)?, scale))
    }

    pub fn checked_mul(self, other: Decimal) -> Option<Decimal> {
        let units = self.units.checked_mul(other.units)?;
        let scale = self.scale.checked_add(other.scale)?;
        Some(Decimal::new(units, scale))
    }

    fn whole_abs(&self) -> u128 {
        (self.units / pow10(self.scale as u32)).unsigned_abs()
    }

    fn frac_digits(&self) -> String {
        if self.scale == 0 {
            return String::new();
        }
        let rem = (self.units % pow10(self.scale as u32)).unsigned_abs();
        format!("{:0>width$}", rem, width = self.scale as usize)
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Decimal) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Decimal) -> Ordering {
        if let Some((a, b, _)) = Decimal::align(*self, *other) {
            return a.cmp(&b);
        }
        // Alignment overflowed i128: compare sign, whole part, then fraction
        // digits. Normalization strips trailing fraction zeros, so the
        // left-aligned digit strings order lexicographically.
        let sign = self.units.signum().cmp(&other.units.signum());
        if sign != Ordering::Equal {
            return sign;
        }
        let negative = self.units < 0;
        let ord = self
            .whole_abs()
            .cmp(&other.whole_abs())
            .then_with(|| self.frac_digits().cmp(&other.frac_digits()));
        if negative {
            ord.reverse()
        } else {
            ord
        }
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            return write!(f, "{}", self.units);
        }
        let sign = if self.units < 0 { "-" } else { "" };
        let abs = self.units.unsigned_abs();
        let div = pow10(self.scale as u32) as u128;
        write!(
            f,
            "{}{}.{:0width$}",
            sign,
            abs / div,
            abs % div,
            width = self.scale as usize
        )
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DecimalParseError;

impl FromStr for Decimal {
    type Err = DecimalParseError;

    fn from_str(s: &str) -> Result<Decimal, DecimalParseError> {
        let (sign, digits) = match s.strip_prefix('-') {
            Some(rest) => (-1i128, rest),
            None => (1i128, s),
        };
        let (whole, frac) = match digits.split_once('.') {
            Some((w, fr)) => (w, fr),
            None => (digits, ""),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(DecimalParseError);
        }
        if !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(DecimalParseError);
        }
        if frac.len() > 36 || whole.len() > 36 {
            return Err(DecimalParseError);
        }
        let mut units: i128 = 0;
        for b in whole.bytes().chain(frac.bytes()) {
            units = units
                .checked_mul(10)
                .and_then(|u| u.checked_add((b - b'0') as i128))
                .ok_or(DecimalParseError)?;
        }
        Ok(Decimal::new(sign * units, frac.len() as u8))
    }
}

fn pow10(exp: u32) -> i128 {
    10i128.pow(exp)
}

/// A calendar day, stored as the signed day count since 1970-01-01
/// (proleptic Gregorian; negative years are representable).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Date(pub i64);

impl Date {
    pub fn from_ymd(year: i32, month: u32, day: u32) -> Option<Date> {
        let d = NaiveDate::from_ymd_opt(year, month, day)?;
        Some(Date(d.num_days_from_ce() as i64 - EPOCH_FROM_CE))
    }

    fn to_naive(self) -> Option<NaiveDate> {
        let ce = self.0.checked_add(EPOCH_FROM_CE)?;
        NaiveDate::from_num_days_from_ce_opt(i32::try_from(ce).ok()?)
    }

    /// Parse `YYYY-MM-DD`, permitting a leading `-` on the year.
    pub fn parse(s: &str) -> Option<Date> {
        let (neg, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s),
        };
        let mut parts = rest.splitn(3, '-');
        let (y, m, d) = (parts.next()?, parts.next()?, parts.next()?);
        if y.is_empty() || y.len() > 6 || m.len() != 2 || d.len() != 2 {
            return None;
        }
        if ![y, m, d]
            .iter()
            .all(|p| p.bytes().all(|b| b.is_ascii_digit()))
        {
            return None;
        }
        let year: i32 = y.parse().ok()?;
        Date::from_ymd(
            if neg { -year } else { year },
            m.parse().ok()?,
            d.parse().ok()?,
        )
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_naive() {
            Some(d) => {
                let y = d.year();
                let sign = if y < 0 { "-" } else { "" };
                write!(
                    f,
                    "{}{:04}-{:02}-{:02}",
                    sign,
                    y.unsigned_abs(),
                    d.month(),
                    d.day()
                )
            }
            None => write!(f, "#day{}", self.0),
        }
    }
}

/// A runtime value. `Null` is the single distinguished null marker; there is
/// no notion of distinguishable nulls.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Value {
    Null,
    Int(i128),
    Dec(Decimal),
    Text(String),
    Date(Date),
    Bool(bool),
    /// Reference to element `ElemId` of the object set `SetId`.
    Elem(SetId, ElemId),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl fmt::Display for ArithOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ArithError {
    Overflow,
    TypeMismatch,
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Null => "null",
            Value::Int(_) => "integer",
            Value::Dec(_) => "decimal",
            Value::Text(_) => "text",
            Value::Date(_) => "date",
            Value::Bool(_) => "boolean",
            Value::Elem(..) => "element",
        }
    }

    /// Order two values if they are comparable. Nulls compare with nothing,
    /// including other nulls; elements and booleans only support equality.
    pub fn compare(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => Some(a.cmp(b)),
            (Value::Dec(a), Value::Dec(b)) => Some(a.cmp(b)),
            (Value::Int(a), Value::Dec(b)) => Some(Decimal::from_int(*a).cmp(b)),
            (Value::Dec(a), Value::Int(b)) => Some(a.cmp(&Decimal::from_int(*b))),
            (Value::Text(a), Value::Text(b)) => Some(a.cmp(b)),
            (Value::Date(a), Value::Date(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }

    /// Equality usable by comparison atoms: `None` when the operands are not
    /// equality-comparable (nulls included).
    pub fn equals(&self, other: &Value) -> Option<bool> {
        match (self, other) {
            (Value::Null, _) | (_, Value::Null) => None,
            (Value::Bool(a), Value::Bool(b)) => Some(a == b),
            (Value::Elem(sa, ia), Value::Elem(sb, ib)) => Some(sa == sb && ia == ib),
            _ => self.compare(other).map(|o| o == Ordering::Equal),
        }
    }

    /// Evaluate `self op other` with strict null propagation.
    pub fn arith(op: ArithOp, a: &Value, b: &Value) -> Result<Value, ArithError> {
        use ArithOp::*;
        use Value::*;
        match (a, b) {
            (Null, _) | (_, Null) => Ok(Null),
            (Int(x), Int(y)) => {
                let r = match op {
                    Add => x.checked_add(*y),
                    Sub => x.checked_sub(*y),
                    Mul => x.checked_mul(*y),
                };
                r.map(Int).ok_or(ArithError::Overflow)
            }
            (Dec(_), Int(_)) | (Int(_), Dec(_)) | (Dec(_), Dec(_)) => {
                let dx = match a {
                    Dec(d) => *d,
                    Int(i) => Decimal::from_int(*i),
                    _ => unreachable!(),
                };
                let dy = match b {
                    Dec(d) => *d,
                    Int(i) => Decimal::from_int(*i),
                    _ => unreachable!(),
                };
                let r = match op {
                    Add => dx.checked_add(dy),
                    Sub => dx.checked_sub(dy),
                    Mul => dx.checked_mul(dy),
                };
                r.map(Dec).ok_or(ArithError::Overflow)
            }
            (Date(d), Int(n)) => {
                let days = i64::try_from(*n).map_err(|_| ArithError::Overflow)?;
                let r = match op {
                    Add => d.0.checked_add(days),
                    Sub => d.0.checked_sub(days),
                    Mul => return Err(ArithError::TypeMismatch),
                };
                r.map(|v| Date(self::Date(v))).ok_or(ArithError::Overflow)
            }
            (Int(n), Date(d)) if op == Add => {
                let days = i64::try_from(*n).map_err(|_| ArithError::Overflow)?;
                d.0.checked_add(days)
                    .map(|v| Date(self::Date(v)))
                    .ok_or(ArithError::Overflow)
            }
            (Date(x), Date(y)) if op == Sub => x
                .0
                .checked_sub(y.0)
                .map(|v| Int(v as i128))
                .ok_or(ArithError::Overflow),
            _ => Err(ArithError::TypeMismatch),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => write!(f, "null"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Dec(d) => write!(f, "{d}"),
            Value::Text(s) => write!(f, "{s:?}"),
            Value::Date(d) => write!(f, "{d}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Elem(_, id) => write!(f, "#{id}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_normalizes_trailing_zeros() {
        assert_eq!(Decimal::new(1500, 3), Decimal::new(15, 1));
        assert_eq!(Decimal::new(1500, 3).to_string(), "1.5");
        assert_eq!(Decimal::new(0, 5), Decimal::from_int(0));
    }

    #[test]
    fn decimal_parse_and_display_round_trip() {
        for s in ["0", "1.5", "-12.34", "100", "-0.001", "99999999.99"] {
            let d: Decimal = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("".parse::<Decimal>().is_err());
        assert!("1.2.3".parse::<Decimal>().is_err());
        assert!("abc".parse::<Decimal>().is_err());
    }

    #[test]
    fn decimal_arithmetic_is_exact() {
        let a: Decimal = "0.1".parse().unwrap();
        let b: Decimal = "0.2".parse().unwrap();
        assert_eq!(a.checked_add(b).unwrap(), "0.3".parse().unwrap());
        let c: Decimal = "1.5".parse().unwrap();
        assert_eq!(c.checked_mul(c).unwrap(), "2.25".parse().unwrap());
        assert_eq!(
            "1.00".parse::<Decimal>().unwrap().checked_sub(a).unwrap(),
            "0.9".parse().unwrap()
        );
    }

    #[test]
    fn decimal_ordering_aligns_scales() {
        let small: Decimal = "1.05".parse().unwrap();
        let large: Decimal = "1.5".parse().unwrap();
        assert!(small < large);
        assert_eq!(
            "2.50".parse::<Decimal>().unwrap(),
            "2.5".parse::<Decimal>().unwrap()
        );
    }

    #[test]
    fn decimal_int_digits() {
        assert_eq!("0.5".parse::<Decimal>().unwrap().int_digits(), 1);
        assert_eq!("9.99".parse::<Decimal>().unwrap().int_digits(), 1);
        assert_eq!("10.0".parse::<Decimal>().unwrap().int_digits(), 2);
        assert_eq!("-1234.5".parse::<Decimal>().unwrap().int_digits(), 4);
    }

    #[test]
    fn date_epoch_is_day_zero() {
        assert_eq!(Date::from_ymd(1970, 1, 1).unwrap(), Date(0));
        assert_eq!(Date::from_ymd(1970, 1, 2).unwrap(), Date(1));
        assert_eq!(Date::from_ymd(1969, 12, 31).unwrap(), Date(-1));
    }

    #[test]
    fn date_parse_and_display_round_trip() {
        for s in ["1900-01-01", "2024-02-29", "0600-07-15", "-6000-01-01"] {
            let d = Date::parse(s).unwrap();
            assert_eq!(d.to_string(), s, "round trip of {s}");
        }
        assert!(Date::parse("2023-02-29").is_none());
        assert!(Date::parse("2023-13-01").is_none());
        assert!(Date::parse("2023-1-01").is_none());
        assert!(Date::parse("not-a-date").is_none());
    }

    #[test]
    fn date_arithmetic_in_days() {
        let d = Value::Date(Date::parse("2000-01-01").unwrap());
        let later = Value::arith(ArithOp::Add, &d, &Value::Int(366)).unwrap();
        assert_eq!(later, Value::Date(Date::parse("2001-01-01").unwrap()));
        let span = Value::arith(ArithOp::Sub, &later, &d).unwrap();
        assert_eq!(span, Value::Int(366));
        assert_eq!(
            Value::arith(ArithOp::Mul, &d, &Value::Int(2)),
            Err(ArithError::TypeMismatch)
        );
    }

    #[test]
    fn null_absorbs_arithmetic_and_defeats_comparison() {
        assert_eq!(
            Value::arith(ArithOp::Add, &Value::Null, &Value::Int(1)).unwrap(),
            Value::Null
        );
        assert_eq!(Value::Null.equals(&Value::Null), None);
        assert_eq!(Value::Null.compare(&Value::Int(0)), None);
    }

    #[test]
    fn mixed_numeric_comparison() {
        let i = Value::Int(3);
        let d = Value::Dec("3.0".parse().unwrap());
        assert_eq!(i.equals(&d), Some(true));
        assert_eq!(
            Value::Int(2).compare(&Value::Dec("2.5".parse().unwrap())),
            Some(Ordering::Less)
        );
    }

    #[test]
    fn overflow_is_reported_not_wrapped() {
        let big = Value::Int(i128::MAX);
        assert_eq!(
            Value::arith(ArithOp::Mul, &big, &big),
            Err(ArithError::Overflow)
        );
    }
}
