//! The attachment exponent, including its two limits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exponent of the preferential-attachment kernel `d^alpha`.
///
/// The limits are first-class model points: `PosInf` always targets a node
/// of maximum degree and `NegInf` a node of minimum degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Finite(f64),
    PosInf,
    NegInf,
}

impl Alpha {
    pub fn finite(value: f64) -> Result<Self> {
        if value.is_nan() {
            return Err(Error::Domain("alpha must not be NaN".into()));
        }
        Ok(Alpha::from(value))
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Alpha::Finite(_))
    }

    /// Value as an `f64`, mapping the limits to `±inf`.
    pub fn as_f64(self) -> f64 {
        match self {
            Alpha::Finite(a) => a,
            Alpha::PosInf => f64::INFINITY,
            Alpha::NegInf => f64::NEG_INFINITY,
        }
    }
}

impl From<f64> for Alpha {
    fn from(value: f64) -> Self {
        if value == f64::INFINITY {
            Alpha::PosInf
        } else if value == f64::NEG_INFINITY {
            Alpha::NegInf
        } else {
            Alpha::Finite(value)
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Finite(a) => write!(f, "{a}"),
            Alpha::PosInf => f.write_str("inf"),
            Alpha::NegInf => f.write_str("-inf"),
        }
    }
}

impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => return Ok(Alpha::PosInf),
            "-inf" | "-infinity" => return Ok(Alpha::NegInf),
            _ => {}
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::Domain(format!("cannot parse alpha from {s:?}")))?;
        Alpha::finite(v)
    }
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Alpha::Finite(a) => serializer.serialize_f64(*a),
            other => serializer.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Alpha::finite(v).map_err(serde::de::Error::custom),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tokens_and_numbers() {
        assert_eq!("inf".parse::<Alpha>().unwrap(), Alpha::PosInf);
        assert_eq!("-inf".parse::<Alpha>().unwrap(), Alpha::NegInf);
        assert_eq!(" 2.5 ".parse::<Alpha>().unwrap(), Alpha::Finite(2.5));
        assert_eq!("-1e1".parse::<Alpha>().unwrap(), Alpha::Finite(-10.0));
        assert!("nan".parse::<Alpha>().is_err());
        assert!("abc".parse::<Alpha>().is_err());
    }

    #[test]
    fn json_accepts_numbers_and_tokens() {
        let a: Vec<Alpha> = serde_json::from_str(r#"[1.5, "inf", "-inf", "0"]"#).unwrap();
        assert_eq!(
            a,
            vec![Alpha::Finite(1.5), Alpha::PosInf, Alpha::NegInf, Alpha::Finite(0.0)]
        );
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"[1.5,"inf","-inf",0.0]"#);
    }
}
