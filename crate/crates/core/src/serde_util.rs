//! Serializers writing rationals as `"a/b"` strings.

use num_rational::BigRational;
use serde::ser::SerializeSeq;
use serde::Serializer;

use crate::places::format_rational;

pub fn rational<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

pub fn rationals<S: Serializer>(qs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(qs.len()))?;
    for q in qs {
        seq.serialize_element(&format_rational(q))?;
    }
    seq.end()
}

pub fn vertices<S: Serializer>(vs: &[(usize, BigRational)], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(vs.len()))?;
    for (i, v) in vs {
        seq.serialize_element(&(i, format_rational(v)))?;
    }
    seq.end()
}
