//! JSON encoding of derivations:
//! `{"ell": l, "name": "...", "coeffs": {"x1": [[[e1, ..., ez], "num", "den"], ...], ..., "z": [...]}}`.

use num_bigint::BigInt;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::exactpoly::{default_names, Monomial, Poly, Rational};
use crate::shi_basis::{check_ell, Derivation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Shape(String),
}

fn shape(msg: impl Into<String>) -> CodecError {
    CodecError::Shape(msg.into())
}

/// Serializes a derivation with the coefficient map in variable order.
pub struct DerivationJson<'a>(pub &'a Derivation);

struct Coeffs<'a>(&'a Derivation);

impl Serialize for Coeffs<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let d = self.0;
        let names = default_names(d.nvars());
        let mut map = s.serialize_map(Some(names.len()))?;
        for (v, name) in names.iter().enumerate() {
            map.serialize_entry(name, d.coeff(v))?;
        }
        map.end()
    }
}

impl Serialize for DerivationJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Derivation", 3)?;
        st.serialize_field("ell", &self.0.ell)?;
        st.serialize_field("name", &self.0.name)?;
        st.serialize_field("coeffs", &Coeffs(self.0))?;
        st.end()
    }
}

pub fn basis_to_json(basis: &[Derivation]) -> Vec<u8> {
    let wrapped: Vec<DerivationJson<'_>> = basis.iter().map(DerivationJson).collect();
    serde_json::to_vec(&wrapped).expect("derivations always serialize")
}

fn parse_bigint(v: &Value) -> Result<BigInt, CodecError> {
    v.as_str()
        .ok_or_else(|| shape("coefficient parts must be decimal strings"))?
        .parse()
        .map_err(|_| shape(format!("not an integer: {v}")))
}

pub fn poly_from_json(v: &Value, nvars: usize) -> Result<Poly, CodecError> {
    let terms = v
        .as_array()
        .ok_or_else(|| shape("a polynomial is a list of terms"))?;
    let mut out = Vec::with_capacity(terms.len());
    for term in terms {
        let [exps, num, den] = term.as_array().map(Vec::as_slice).unwrap_or_default() else {
            return Err(shape("a term is [exponents, numerator, denominator]"));
        };
        let exps: Vec<u32> = exps
            .as_array()
            .ok_or_else(|| shape("exponents must be a list"))?
            .iter()
            .map(|e| {
                e.as_u64()
                    .and_then(|e| u32::try_from(e).ok())
                    .ok_or_else(|| shape("bad exponent"))
            })
            .collect::<Result<_, _>>()?;
        if exps.len() != nvars {
            return Err(shape(format!(
                "expected {nvars} exponents, found {}",
                exps.len()
            )));
        }
        let den = parse_bigint(den)?;
        if den == BigInt::from(0) {
            return Err(shape("zero denominator"));
        }
        let m = Monomial::from_exponents(&exps).map_err(|e| shape(e.to_string()))?;
        out.push((m, Rational::from_bigints(parse_bigint(num)?, den)));
    }
    Ok(Poly::from_terms(nvars, out))
}

pub fn derivation_from_json(v: &Value) -> Result<Derivation, CodecError> {
    let ell = v
        .get("ell")
        .and_then(Value::as_u64)
        .ok_or_else(|| shape("missing integer field \"ell\""))? as usize;
    check_ell(ell).map_err(|e| shape(e.to_string()))?;
    let name = v
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| shape("missing field \"name\""))?;
    let coeffs = v
        .get("coeffs")
        .and_then(Value::as_object)
        .ok_or_else(|| shape("missing object \"coeffs\""))?;
    let nvars = ell + 1;
    let names = default_names(nvars);
    if coeffs.len() != nvars {
        return Err(shape(format!(
            "expected {nvars} coefficients, found {}",
            coeffs.len()
        )));
    }
    let mut polys = names
        .iter()
        .map(|n| {
            poly_from_json(
                coeffs
                    .get(n)
                    .ok_or_else(|| shape(format!("missing coefficient {n}")))?,
                nvars,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let coeff_z = polys.pop().expect("nvars >= 3");
    Ok(Derivation {
        ell,
        name: name.to_string(),
        coeff_x: polys,
        coeff_z,
    })
}

pub fn basis_from_json(bytes: &[u8]) -> Result<Vec<Derivation>, CodecError> {
    let v: Value = serde_json::from_slice(bytes).map_err(|e| CodecError::Json(e.to_string()))?;
    v.as_array()
        .ok_or_else(|| shape("a basis is a list of derivations"))?
        .iter()
        .map(derivation_from_json)
        .collect()
}
