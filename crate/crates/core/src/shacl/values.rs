//! Literal value comparison and lexical-form checks.

use std::cmp::Ordering;

use chrono::{DateTime, FixedOffset, NaiveDate, NaiveDateTime};

use crate::model::Literal;
use crate::vocab::xsd;

const INTEGER_TYPES: &[&str] = &[
    "integer",
    "long",
    "int",
    "short",
    "byte",
    "nonNegativeInteger",
    "positiveInteger",
    "nonPositiveInteger",
    "negativeInteger",
    "unsignedLong",
    "unsignedInt",
    "unsignedShort",
    "unsignedByte",
];

fn xsd_local(lit: &Literal) -> Option<&str> {
    lit.datatype().as_str().strip_prefix(xsd::NS)
}

pub(crate) fn is_integer_type(lit: &Literal) -> bool {
    xsd_local(lit).is_some_and(|l| INTEGER_TYPES.contains(&l))
}

pub(crate) fn is_numeric(lit: &Literal) -> bool {
    is_integer_type(lit) || xsd_local(lit).is_some_and(|l| matches!(l, "decimal" | "double" | "float"))
}

enum Value {
    Integer(i128),
    Float(f64),
    DateTime(DateTime<FixedOffset>),
    NaiveDateTime(NaiveDateTime),
    Date(NaiveDate),
    String(String),
}

fn parse_float(lex: &str) -> Option<f64> {
    match lex {
        "INF" | "+INF" => Some(f64::INFINITY),
        "-INF" => Some(f64::NEG_INFINITY),
        "NaN" => Some(f64::NAN),
        _ if lex.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E') => None,
        _ => lex.parse().ok(),
    }
}

fn value_of(lit: &Literal) -> Option<Value> {
    let lex = lit.lexical().trim();
    if is_integer_type(lit) {
        return lex.parse::<i128>().ok().map(Value::Integer);
    }
    match lit.datatype().as_str() {
        xsd::DECIMAL => {
            if lex.contains(['e', 'E']) {
                None
            } else {
                parse_float(lex).map(Value::Float)
            }
        }
        xsd::DOUBLE | xsd::FLOAT => parse_float(lex).map(Value::Float),
        xsd::DATE_TIME => DateTime::parse_from_rfc3339(lex)
            .map(Value::DateTime)
            .ok()
            .or_else(|| NaiveDateTime::parse_from_str(lex, "%Y-%m-%dT%H:%M:%S%.f").ok().map(Value::NaiveDateTime)),
        xsd::DATE => NaiveDate::parse_from_str(lex, "%Y-%m-%d").ok().map(Value::Date),
        xsd::STRING => Some(Value::String(lit.lexical().to_owned())),
        _ => None,
    }
}

/// Orders two literals by value. Numbers compare across numeric types;
/// date-times compare only with date-times of the same timezone kind;
/// strings compare by code point. Anything else is incomparable.
pub fn compare_literals(a: &Literal, b: &Literal) -> Option<Ordering> {
    match (value_of(a)?, value_of(b)?) {
        (Value::Integer(x), Value::Integer(y)) => Some(x.cmp(&y)),
        (Value::Integer(x), Value::Float(y)) => (x as f64).partial_cmp(&y),
        (Value::Float(x), Value::Integer(y)) => x.partial_cmp(&(y as f64)),
        (Value::Float(x), Value::Float(y)) => x.partial_cmp(&y),
        (Value::DateTime(x), Value::DateTime(y)) => Some(x.cmp(&y)),
        (Value::NaiveDateTime(x), Value::NaiveDateTime(y)) => Some(x.cmp(&y)),
        (Value::Date(x), Value::Date(y)) => Some(x.cmp(&y)),
        (Value::String(x), Value::String(y)) => Some(x.cmp(&y)),
        _ => None,
    }
}

/// Whether the lexical form is valid for the literal's datatype. Datatypes
/// without a check are accepted.
pub fn is_well_formed(lit: &Literal) -> bool {
    let lex = lit.lexical();
    if is_integer_type(lit) {
        let Ok(n) = lex.parse::<i128>() else { return false };
        return match xsd_local(lit) {
            Some("nonNegativeInteger") | Some("unsignedLong") => n >= 0,
            Some("positiveInteger") => n > 0,
            Some("nonPositiveInteger") => n <= 0,
            Some("negativeInteger") => n < 0,
            Some("long") => i64::try_from(n).is_ok(),
            Some("int") => i32::try_from(n).is_ok(),
            Some("short") => i16::try_from(n).is_ok(),
            Some("byte") => i8::try_from(n).is_ok(),
            Some("unsignedInt") => u32::try_from(n).is_ok(),
            Some("unsignedShort") => u16::try_from(n).is_ok(),
            Some("unsignedByte") => u8::try_from(n).is_ok(),
            _ => true,
        };
    }
    match lit.datatype().as_str() {
        xsd::BOOLEAN => matches!(lex, "true" | "false" | "1" | "0"),
        xsd::DECIMAL | xsd::DOUBLE | xsd::FLOAT | xsd::DATE_TIME | xsd::DATE => value_of(lit).is_some(),
        _ => true,
    }
}
