//! JSON helpers for arbitrary-precision integers: values that fit in an
//! `i64` are written as JSON numbers, anything larger as a decimal string.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::ser::{SerializeSeq, Serializer};

fn write_int<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match v.to_i64() {
        Some(x) => s.serialize_i64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

pub(crate) fn int<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    write_int(v, s)
}

struct Int<'a>(&'a BigInt);

impl serde::Serialize for Int<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        write_int(self.0, s)
    }
}

struct Nat<'a>(&'a BigUint);

impl serde::Serialize for Nat<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_u64() {
            Some(x) => s.serialize_u64(x),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

pub(crate) fn int_rows<S: Serializer>(rows: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for row in rows {
        let cells: Vec<Int<'_>> = row.iter().map(Int).collect();
        seq.serialize_element(&cells)?;
    }
    seq.end()
}

pub(crate) fn nat_seq<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&Nat(x))?;
    }
    seq.end()
}
