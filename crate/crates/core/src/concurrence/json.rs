use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::coeffs::{alpha_from_p, CoefficientsAlpha, CoefficientsP};
use super::ConcurrenceSpec;
use crate::error::{Error, Result};
use crate::qstate::SubsetMask;

/// Wire form of a spec. Either table may be omitted; when both are present
/// they must agree.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SpecJson {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<bool>,
}

/// Which table(s) to emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecForm {
    Alpha,
    P,
    Both,
}

const AGREEMENT_TOL: f64 = 1e-12;

impl SpecJson {
    /// The `α` table, derived from `p` when only `p` is given. Admissibility
    /// is not checked here.
    pub fn to_alpha(&self) -> Result<CoefficientsAlpha> {
        let n = self.n;
        let from_alpha = self
            .alpha
            .as_ref()
            .map(|tbl| {
                let mut values = vec![0.0; 1usize << n.min(crate::qstate::MAX_PARTIES)];
                for (k, &v) in tbl {
                    let mask = SubsetMask::parse_key(k, n)?;
                    values[mask.bits() as usize] = v;
                }
                CoefficientsAlpha::new(n, values)
            })
            .transpose()?;
        let from_p = self
            .p
            .as_ref()
            .map(|tbl| {
                CoefficientsP::from_patterns(n, tbl.iter().map(|(k, &v)| (k.as_str(), v))).map(|p| alpha_from_p(&p))
            })
            .transpose()?;
        match (from_alpha, from_p) {
            (Some(a), Some(b)) => {
                let scale = a.max_abs().max(1.0);
                for (v, x) in a.iter() {
                    let y = b.get(v);
                    if (x - y).abs() > AGREEMENT_TOL * scale {
                        return Err(Error::InvalidSpec(format!("alpha and p disagree at {v}: {x} vs {y}")));
                    }
                }
                Ok(a)
            }
            (Some(a), None) | (None, Some(a)) => Ok(a),
            (None, None) => Err(Error::InvalidSpec("spec has neither alpha nor p".into())),
        }
    }

    pub fn to_spec(&self) -> Result<ConcurrenceSpec> {
        ConcurrenceSpec::from_alpha(self.to_alpha()?)
    }

    pub fn from_spec(spec: &ConcurrenceSpec, form: SpecForm) -> Result<Self> {
        let n = spec.n();
        let alpha = matches!(form, SpecForm::Alpha | SpecForm::Both).then(|| {
            spec.alpha()
                .iter()
                .map(|(v, a)| (v.key(), a))
                .collect::<BTreeMap<_, _>>()
        });
        let p = match form {
            SpecForm::P | SpecForm::Both => Some(
                spec.p()?
                    .iter()
                    .filter(|(s, _)| s.minus_count() % 2 == 0 && s.minus_count() > 0)
                    .map(|(s, v)| (s.to_string(), v))
                    .collect::<BTreeMap<_, _>>(),
            ),
            SpecForm::Alpha => None,
        };
        Ok(SpecJson {
            n,
            alpha,
            p,
            normalized: Some(spec.is_normalized()),
        })
    }
}

pub fn parse_spec(text: &str) -> Result<ConcurrenceSpec> {
    let j: SpecJson = serde_json::from_str(text)?;
    j.to_spec()
}

pub fn spec_to_json(spec: &ConcurrenceSpec, form: SpecForm) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SpecJson::from_spec(spec, form)?)?)
}

impl Serialize for ConcurrenceSpec {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        SpecJson::from_spec(self, SpecForm::Alpha)
            .map_err(serde::ser::Error::custom)?
            .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ConcurrenceSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        SpecJson::deserialize(de)?.to_spec().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_form_loads() {
        let text = r#"{"N":3,"alpha":{"":3,"1":-1,"2":-1,"3":-1,"12":-1,"13":-1,"23":-1,"123":3}}"#;
        let s = parse_spec(text).unwrap();
        assert_eq!(s, ConcurrenceSpec::symmetric(3).unwrap());
    }

    #[test]
    fn p_form_loads() {
        let s = parse_spec(r#"{"N":3,"p":{"+--":1,"-+-":1,"--+":1}}"#).unwrap();
        assert_eq!(s, ConcurrenceSpec::symmetric(3).unwrap());
    }

    #[test]
    fn both_forms_cross_validated() {
        let ok = r#"{"N":2,"alpha":{"":1,"1":-1,"2":-1,"12":1},"p":{"--":1}}"#;
        assert!(parse_spec(ok).is_ok());
        let bad = r#"{"N":2,"alpha":{"":1,"1":-1,"2":-1,"12":1},"p":{"--":2}}"#;
        assert!(matches!(parse_spec(bad), Err(Error::InvalidSpec(_))));
        assert!(parse_spec(r#"{"N":2}"#).is_err());
    }

    #[test]
    fn inadmissible_rejected() {
        let text = r#"{"N":3,"alpha":{"":3,"1":-2,"2":-1,"3":-1,"12":-1,"13":-1,"23":-1,"123":3}}"#;
        assert!(matches!(parse_spec(text), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn emits_requested_form() {
        let s = ConcurrenceSpec::symmetric(3).unwrap();
        let j = SpecJson::from_spec(&s, SpecForm::P).unwrap();
        assert!(j.alpha.is_none());
        assert_eq!(j.p.as_ref().unwrap().get("+--"), Some(&1.0));
        let back = j.to_spec().unwrap();
        assert_eq!(back, s);
        let text = spec_to_json(&s, SpecForm::Both).unwrap();
        assert_eq!(parse_spec(&text).unwrap(), s);
    }
}
