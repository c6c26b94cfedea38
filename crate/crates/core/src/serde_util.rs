//! Serde adapters: complex vectors as arrays of `[re, im]` pairs.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::tensor::{CVec, C64};

fn to_plain(v: &CVec) -> Vec<C64> {
    v.iter().copied().collect()
}

fn from_plain(v: Vec<C64>) -> CVec {
    CVec::from_vec(v)
}

pub mod cvec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &CVec, s: S) -> Result<S::Ok, S::Error> {
        to_plain(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVec, D::Error> {
        Vec::<C64>::deserialize(d).map(from_plain)
    }
}

pub mod cvecs {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[CVec], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(to_plain).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CVec>, D::Error> {
        Ok(Vec::<Vec<C64>>::deserialize(d)?.into_iter().map(from_plain).collect())
    }
}

pub mod cvec_lists {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<CVec>], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|l| l.iter().map(to_plain).collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<CVec>>, D::Error> {
        Ok(Vec::<Vec<Vec<C64>>>::deserialize(d)?
            .into_iter()
            .map(|l| l.into_iter().map(from_plain).collect())
            .collect())
    }
}
