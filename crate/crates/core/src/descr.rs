//! Structured-text map descriptions (JSON): stunted parameter points,
//! explicit polynomials, and named families. Rationals travel as "p/q"
//! strings.

use crate::error::{CoreError, Result};
use crate::maps::{family_member, make_geometry, PolynomialMap, Shape, StuntedParams};
use crate::rat::{fmt_q, parse_q};
use serde_json::Value;
use std::collections::BTreeMap;

/// A parsed map description.
#[derive(Debug, Clone)]
pub enum MapDescription {
    Stunted(StuntedParams),
    Polynomial(PolynomialMap),
}

impl MapDescription {
    pub fn is_stunted(&self) -> bool {
        matches!(self, MapDescription::Stunted(_))
    }
}

/// Parse a JSON map description:
/// `{"kind":"stunted","d":2,"shape":"+","zeta":["1/2","-1/2"]}`,
/// `{"kind":"polynomial","coeffs":[...],"domain":[0,1],"anchored":true}`,
/// `{"kind":"family","name":"cubic-fig4","params":{"b":0.6}}`.
pub fn parse_map_description(text: &str) -> Result<MapDescription> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| CoreError::Parse(format!("bad JSON: {e}")))?;
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| CoreError::Parse("missing \"kind\"".into()))?;
    match kind {
        "stunted" => {
            let d = v
                .get("d")
                .and_then(Value::as_u64)
                .ok_or_else(|| CoreError::Parse("stunted needs integer \"d\"".into()))?
                as usize;
            let shape = Shape::parse(
                v.get("shape")
                    .and_then(Value::as_str)
                    .ok_or_else(|| CoreError::Parse("stunted needs \"shape\"".into()))?,
            )?;
            let zeta_v = v
                .get("zeta")
                .and_then(Value::as_array)
                .ok_or_else(|| CoreError::Parse("stunted needs \"zeta\" array".into()))?;
            let mut zeta = Vec::with_capacity(zeta_v.len());
            for z in zeta_v {
                let q = match z {
                    Value::String(s) => parse_q(s).map_err(CoreError::Parse)?,
                    Value::Number(n) => {
                        let f = n.as_f64().ok_or_else(|| {
                            CoreError::Parse("bad numeric zeta entry".into())
                        })?;
                        crate::rat::q_from_f64(f)
                            .ok_or_else(|| CoreError::Parse("non-finite zeta entry".into()))?
                    }
                    _ => return Err(CoreError::Parse("zeta entries must be \"p/q\"".into())),
                };
                zeta.push(q);
            }
            let g = make_geometry(d, shape)?;
            Ok(MapDescription::Stunted(StuntedParams::new(g, zeta)?))
        }
        "polynomial" => {
            let coeffs: Vec<f64> = v
                .get("coeffs")
                .and_then(Value::as_array)
                .ok_or_else(|| CoreError::Parse("polynomial needs \"coeffs\"".into()))?
                .iter()
                .map(|c| c.as_f64().unwrap_or(f64::NAN))
                .collect();
            let dom = v
                .get("domain")
                .and_then(Value::as_array)
                .ok_or_else(|| CoreError::Parse("polynomial needs \"domain\"".into()))?;
            if dom.len() != 2 {
                return Err(CoreError::Parse("domain must be [lo, hi]".into()));
            }
            let lo = dom[0].as_f64().ok_or_else(|| CoreError::Parse("bad domain".into()))?;
            let hi = dom[1].as_f64().ok_or_else(|| CoreError::Parse("bad domain".into()))?;
            let anchored = v.get("anchored").and_then(Value::as_bool).unwrap_or(false);
            Ok(MapDescription::Polynomial(PolynomialMap::new(
                coeffs,
                (lo, hi),
                anchored,
            )?))
        }
        "family" => {
            let name = v
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| CoreError::Parse("family needs \"name\"".into()))?;
            let mut params = BTreeMap::new();
            if let Some(obj) = v.get("params").and_then(Value::as_object) {
                for (k, val) in obj {
                    let f = val
                        .as_f64()
                        .ok_or_else(|| CoreError::Parse(format!("bad param {k}")))?;
                    params.insert(k.clone(), f);
                }
            }
            Ok(MapDescription::Polynomial(family_member(name, &params)?))
        }
        other => Err(CoreError::Parse(format!("unknown kind {other:?}"))),
    }
}

/// Render stunted parameters as the JSON zeta array of "p/q" strings.
pub fn zeta_json(params: &StuntedParams) -> Value {
    Value::Array(
        params
            .zeta
            .iter()
            .map(|z| Value::String(fmt_q(z)))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qr;

    #[test]
    fn parse_stunted_description() {
        let d = parse_map_description(
            r#"{"kind":"stunted","d":2,"shape":"+","zeta":["1/2","-1/2"]}"#,
        )
        .unwrap();
        match d {
            MapDescription::Stunted(p) => {
                assert_eq!(p.zeta, vec![qr(1, 2), qr(-1, 2)]);
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn parse_polynomial_and_family() {
        let d = parse_map_description(
            r#"{"kind":"polynomial","coeffs":[0.0,4.0,-4.0],"domain":[0,1],"anchored":false}"#,
        )
        .unwrap();
        assert!(matches!(d, MapDescription::Polynomial(_)));
        let d = parse_map_description(
            r#"{"kind":"family","name":"logistic","params":{"lambda":3.5}}"#,
        )
        .unwrap();
        assert!(matches!(d, MapDescription::Polynomial(_)));
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(parse_map_description("{").is_err());
        assert!(parse_map_description(r#"{"kind":"nope"}"#).is_err());
        assert!(parse_map_description(
            r#"{"kind":"stunted","d":2,"shape":"+","zeta":["1/2","-3/4"]}"#
        )
        .is_err()); // oblique constraint violated
    }
}
