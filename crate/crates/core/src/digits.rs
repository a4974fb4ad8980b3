//! Serde helpers: big integers and big rationals as decimal strings, so JSON
//! output never loses width.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serializer};
use std::str::FromStr;

pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    let raw = String::deserialize(d)?;
    BigInt::from_str(&raw).map_err(serde::de::Error::custom)
}

pub mod ratio {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        if v.denom().is_one() {
            s.serialize_str(&v.numer().to_string())
        } else {
            s.serialize_str(&format!("{}/{}", v.numer(), v.denom()))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let raw = String::deserialize(d)?;
        parse(&raw).map_err(serde::de::Error::custom)
    }

    pub fn parse(raw: &str) -> Result<BigRational, String> {
        let mut parts = raw.splitn(2, '/');
        let numer = BigInt::from_str(parts.next().unwrap_or("").trim())
            .map_err(|e| format!("bad numerator in {raw:?}: {e}"))?;
        let denom = match parts.next() {
            Some(q) => BigInt::from_str(q.trim()).map_err(|e| format!("bad denominator in {raw:?}: {e}"))?,
            None => BigInt::one(),
        };
        if denom == BigInt::from(0) {
            return Err(format!("zero denominator in {raw:?}"));
        }
        Ok(BigRational::new(numer, denom))
    }
}
