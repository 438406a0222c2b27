//! Value domains: base types with digit bounds, interval restrictions, and
//! enumerations.

use crate::value::{Date, Decimal, Value};
use std::fmt;

/// A base value type with its size parameters. Digit parameters are capped
/// at 36 so that every admitted number, and any single product of two of
/// them, fits in an `i128`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum BaseType {
    /// Naturals of at most `n` digits.
    Nat(u8),
    /// Integers of at most `n` digits.
    Int(u8),
    /// Decimals with at most `n` digits before the point and `m` after.
    Rat(u8, u8),
    /// Decimals with at most `n` digits before the point and exactly two
    /// after; `Currency(n)` embeds in `Rat(n + 2, 2)`.
    Currency(u8),
    /// ASCII strings of length at most `n`.
    Ascii(u16),
    /// Calendar days, proleptic Gregorian.
    Datetime,
    /// `{true, false}`.
    Boole,
}

pub const MAX_DIGITS: u8 = 36;

impl BaseType {
    /// Validate the size parameters.
    pub fn well_formed(self) -> Result<(), String> {
        match self {
            BaseType::Nat(n) | BaseType::Int(n) if n == 0 || n > MAX_DIGITS => {
                Err(format!("digit count {n} outside 1..={MAX_DIGITS}"))
            }
            BaseType::Rat(n, m) if n == 0 || n.saturating_add(m) > MAX_DIGITS => Err(format!(
                "digit counts {n},{m} must satisfy n >= 1 and n + m <= {MAX_DIGITS}"
            )),
            BaseType::Currency(n) if n == 0 || n > MAX_DIGITS - 2 => Err(format!(
                "digit count {n} outside 1..={}",
                MAX_DIGITS - 2
            )),
            BaseType::Ascii(0) => Err("ASCII length must be at least 1".into()),
            _ => Ok(()),
        }
    }

    /// Widening order on base types: `self.subsumes(other)` holds when every
    /// value of `other` is a value of `self`. Naturals widen to integers,
    /// integers to currency, currency to decimals with at least two
    /// fraction digits and no loss of whole digits.
    pub fn subsumes(self, other: BaseType) -> bool {
        use BaseType::*;
        match (self, other) {
            (Nat(a), Nat(b)) => a >= b,
            (Int(a), Nat(b) | Int(b)) => a >= b,
            (Currency(a), Nat(b) | Int(b) | Currency(b)) => a >= b,
            (Rat(n, _), Nat(b) | Int(b)) => n >= b,
            (Rat(n, m), Currency(b)) => n >= b && m >= 2,
            (Rat(n, m), Rat(p, q)) => n >= p && m >= q,
            (Ascii(a), Ascii(b)) => a >= b,
            (Datetime, Datetime) | (Boole, Boole) => true,
            _ => false,
        }
    }
}

impl fmt::Display for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseType::Nat(n) => write!(f, "NAT({n})"),
            BaseType::Int(n) => write!(f, "INT({n})"),
            BaseType::Rat(n, m) => write!(f, "RAT({n},{m})"),
            BaseType::Currency(n) => write!(f, "CURRENCY({n})"),
            BaseType::Ascii(n) => write!(f, "ASCII({n})"),
            BaseType::Datetime => write!(f, "DATETIME"),
            BaseType::Boole => write!(f, "BOOLE"),
        }
    }
}

/// An interval bound: a literal, or the validation run's current day.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Bound {
    Lit(Value),
    Today,
}

impl Bound {
    fn resolve(&self, today: Date) -> Value {
        match self {
            Bound::Lit(v) => v.clone(),
            Bound::Today => Value::Date(today),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DomainShape {
    /// Every value of the base type.
    Full,
    /// An interval of the base type; each end may be open.
    Interval {
        lo: Bound,
        hi: Bound,
        lo_open: bool,
        hi_open: bool,
    },
    /// An explicit enumeration of admitted values.
    Enum(Vec<Value>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValueDomain {
    pub base: BaseType,
    pub shape: DomainShape,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DomainViolation {
    pub value: Value,
    pub reason: String,
}

impl ValueDomain {
    pub fn full(base: BaseType) -> ValueDomain {
        ValueDomain {
            base,
            shape: DomainShape::Full,
        }
    }

    /// Check a non-null value against the domain and return its canonical
    /// form (integers coerce to decimals under decimal bases).
    pub fn admit(&self, value: &Value, today: Date) -> Result<Value, DomainViolation> {
        let canon = self.conform_base(value)?;
        match &self.shape {
            DomainShape::Full => {}
            DomainShape::Interval {
                lo,
                hi,
                lo_open,
                hi_open,
            } => {
                let lov = lo.resolve(today);
                let hiv = hi.resolve(today);
                let above = match canon.compare(&lov) {
                    Some(ord) => {
                        ord == std::cmp::Ordering::Greater
                            || (!lo_open && ord == std::cmp::Ordering::Equal)
                    }
                    None => false,
                };
                let below = match canon.compare(&hiv) {
                    Some(ord) => {
                        ord == std::cmp::Ordering::Less
                            || (!hi_open && ord == std::cmp::Ordering::Equal)
                    }
                    None => false,
                };
                if !above || !below {
                    return Err(DomainViolation {
                        value: value.clone(),
                        reason: format!(
                            "{} outside {}{}, {}{}",
                            canon,
                            if *lo_open { "(" } else { "[" },
                            lov,
                            hiv,
                            if *hi_open { ")" } else { "]" },
                        ),
                    });
                }
            }
            DomainShape::Enum(allowed) => {
                if !allowed.iter().any(|a| a == &canon) {
                    return Err(DomainViolation {
                        value: value.clone(),
                        reason: format!("{canon} is not one of the enumerated values"),
                    });
                }
            }
        }
        Ok(canon)
    }

    /// Check a value against the base type alone and return its canonical
    /// form.
    pub(crate) fn conform_base(&self, value: &Value) -> Result<Value, DomainViolation> {
        let fail = |reason: String| DomainViolation {
            value: value.clone(),
            reason,
        };
        let digits_ok = |i: i128, n: u8| i.unsigned_abs() < 10u128.pow(n as u32);
        match (self.base, value) {
            (BaseType::Nat(n), Value::Int(i)) => {
                if *i < 0 {
                    Err(fail(format!("{i} is negative")))
                } else if !digits_ok(*i, n) {
                    Err(fail(format!("{i} exceeds {n} digits")))
                } else {
                    Ok(value.clone())
                }
            }
            (BaseType::Int(n), Value::Int(i)) => {
                if digits_ok(*i, n) {
                    Ok(value.clone())
                } else {
                    Err(fail(format!("{i} exceeds {n} digits")))
                }
            }
            (BaseType::Rat(n, m), Value::Int(i)) => {
                let d = Decimal::from_int(*i);
                if d.int_digits() > n as u32 {
                    Err(fail(format!("{i} exceeds {n} whole digits")))
                } else {
                    let _ = m;
                    Ok(Value::Dec(d))
                }
            }
            (BaseType::Rat(n, m), Value::Dec(d)) => {
                if d.scale() > m {
                    Err(fail(format!("{d} exceeds {m} fraction digits")))
                } else if d.int_digits() > n as u32 {
                    Err(fail(format!("{d} exceeds {n} whole digits")))
                } else {
                    Ok(value.clone())
                }
            }
            (BaseType::Currency(n), Value::Int(i)) => {
                let d = Decimal::from_int(*i);
                if d.int_digits() > n as u32 {
                    Err(fail(format!("{i} exceeds {n} whole digits")))
                } else {
                    Ok(Value::Dec(d))
                }
            }
            (BaseType::Currency(n), Value::Dec(d)) => {
                if d.scale() > 2 {
                    Err(fail(format!("{d} has more than 2 fraction digits")))
                } else if d.int_digits() > n as u32 {
                    Err(fail(format!("{d} exceeds {n} whole digits")))
                } else {
                    Ok(value.clone())
                }
            }
            (BaseType::Ascii(n), Value::Text(s)) => {
                if !s.is_ascii() {
                    Err(fail("text contains non-ASCII characters".into()))
                } else if s.len() > n as usize {
                    Err(fail(format!("text length {} exceeds {n}", s.len())))
                } else {
                    Ok(value.clone())
                }
            }
            (BaseType::Datetime, Value::Date(_)) => Ok(value.clone()),
            (BaseType::Boole, Value::Bool(_)) => Ok(value.clone()),
            (base, v) => Err(fail(format!("{} value does not fit {base}", v.kind_name()))),
        }
    }

    /// The values of an enumerable domain, if it is one.
    pub fn enumeration(&self) -> Option<&[Value]> {
        match &self.shape {
            DomainShape::Enum(vs) => Some(vs),
            _ => None,
        }
    }

    /// Validate that enumeration members and interval bounds conform to the
    /// base type.
    pub fn well_formed(&self) -> Result<(), String> {
        self.base.well_formed()?;
        let check = |v: &Value| -> Result<(), String> {
            ValueDomain::full(self.base)
                .conform_base(v)
                .map(|_| ())
                .map_err(|e| e.reason)
        };
        match &self.shape {
            DomainShape::Full => Ok(()),
            DomainShape::Interval { lo, hi, .. } => {
                for b in [lo, hi] {
                    match b {
                        Bound::Lit(v) => check(v)?,
                        Bound::Today if self.base == BaseType::Datetime => {}
                        Bound::Today => {
                            return Err("Today() bounds require a DATETIME base".into())
                        }
                    }
                }
                Ok(())
            }
            DomainShape::Enum(vs) => {
                if vs.is_empty() {
                    return Err("enumeration must not be empty".into());
                }
                vs.iter().try_for_each(check)
            }
        }
    }

    /// Infer a base type for a bare enumeration from its literals.
    pub fn infer_enum(values: Vec<Value>) -> Result<ValueDomain, String> {
        let base = match values.first() {
            None => return Err("enumeration must not be empty".into()),
            Some(Value::Text(_)) => {
                let max = values
                    .iter()
                    .map(|v| match v {
                        Value::Text(s) => s.len(),
                        _ => 0,
                    })
                    .max()
                    .unwrap_or(1);
                BaseType::Ascii(max.max(1).min(u16::MAX as usize) as u16)
            }
            Some(Value::Int(_)) => {
                let neg = values.iter().any(|v| matches!(v, Value::Int(i) if *i < 0));
                let digits = values
                    .iter()
                    .map(|v| match v {
                        Value::Int(i) => int_digits(*i),
                        _ => 1,
                    })
                    .max()
                    .unwrap_or(1);
                if neg {
                    BaseType::Int(digits)
                } else {
                    BaseType::Nat(digits)
                }
            }
            Some(Value::Dec(_)) => {
                let (mut n, mut m) = (1u8, 0u8);
                for v in &values {
                    if let Value::Dec(d) = v {
                        n = n.max(d.int_digits().min(36) as u8);
                        m = m.max(d.scale());
                    }
                }
                BaseType::Rat(n, m)
            }
            Some(Value::Date(_)) => BaseType::Datetime,
            Some(Value::Bool(_)) => BaseType::Boole,
            Some(other) => return Err(format!("{} literals cannot form a domain", other.kind_name())),
        };
        let domain = ValueDomain {
            base,
            shape: DomainShape::Enum(values),
        };
        domain.well_formed()?;
        Ok(domain)
    }

    /// Infer a base type for a bare interval from its bounds.
    pub fn infer_interval(
        lo: Bound,
        hi: Bound,
        lo_open: bool,
        hi_open: bool,
    ) -> Result<ValueDomain, String> {
        let base = match (&lo, &hi) {
            (Bound::Today, _) | (_, Bound::Today) => BaseType::Datetime,
            (Bound::Lit(Value::Date(_)), _) | (_, Bound::Lit(Value::Date(_))) => BaseType::Datetime,
            (Bound::Lit(Value::Int(a)), Bound::Lit(Value::Int(b))) => {
                let digits = int_digits(*a).max(int_digits(*b));
                if *a < 0 || *b < 0 {
                    BaseType::Int(digits)
                } else {
                    BaseType::Nat(digits)
                }
            }
            (Bound::Lit(a), Bound::Lit(b)) => {
                let dec = |v: &Value| -> Option<Decimal> {
                    match v {
                        Value::Dec(d) => Some(*d),
                        Value::Int(i) => Some(Decimal::from_int(*i)),
                        _ => None,
                    }
                };
                match (dec(a), dec(b)) {
                    (Some(da), Some(db)) => {
                        let n = da.int_digits().max(db.int_digits()).min(36) as u8;
                        let m = da.scale().max(db.scale());
                        BaseType::Rat(n.max(1), m)
                    }
                    _ => return Err("interval bounds must be numeric or dates".into()),
                }
            }
        };
        let domain = ValueDomain {
            base,
            shape: DomainShape::Interval {
                lo,
                hi,
                lo_open,
                hi_open,
            },
        };
        domain.well_formed()?;
        Ok(domain)
    }
}

fn int_digits(mut i: i128) -> u8 {
    i = i.abs().max(1);
    let mut digits = 0u8;
    while i > 0 {
        digits += 1;
        i /= 10;
    }
    digits
}
