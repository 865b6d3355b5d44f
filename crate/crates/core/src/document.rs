//! JSON exchange format for matrices and parameter sets.
//!
//! ```json
//! {"params":{"k":[[1,0],[0,0],[0,0],[0,0]],"m":[...],"l":[...],"n":[...]},
//!  "matrix":[[[1,0],[0,0],[0,0],[0,0]],...],
//!  "meta":{"tag":"K-2","constants":{},"seed":7}}
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major. At least
//! one of `params` and `matrix` must be present; when both are, they must
//! describe the same matrix. A `meta` block naming a family or variant is
//! checked against the data on load.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{assemble, disassemble, scale_of};
use crate::families::{residual_with, Const, FamilyConstants, FamilyTag};
use crate::rank3::{variant_residual, VariantId};
use crate::types::{CVec4, Complex, Mat4, ParamSet};

/// Tolerance for the consistency checks made on load.
pub const LOAD_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid document: {0}")]
    Invalid(String),
}

/// What a document says about its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Meta {
    /// A family name (`"K-5"`) or a variant name (`"00"`).
    pub tag: String,
    pub constants: FamilyConstants,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatrixDocument {
    pub params: Option<ParamSet>,
    pub matrix: Option<Mat4>,
    pub meta: Option<Meta>,
}

type Pair = [f64; 2];

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    k: [Pair; 4],
    m: [Pair; 4],
    l: [Pair; 4],
    n: [Pair; 4],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeta {
    tag: String,
    #[serde(default)]
    constants: BTreeMap<String, Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<RawParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<[[Pair; 4]; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<RawMeta>,
}

fn pair(z: Complex) -> Pair {
    [z.re, z.im]
}

fn complex(p: Pair) -> Complex {
    Complex::new(p[0], p[1])
}

fn raw_vec(v: &CVec4) -> [Pair; 4] {
    v.to_array().map(pair)
}

fn cvec(raw: [Pair; 4]) -> CVec4 {
    CVec4::from_array(raw.map(complex))
}

/// `{"k": [[re, im] ×4], "m": ..., "l": ..., "n": ...}`.
pub fn params_json(p: &ParamSet) -> serde_json::Value {
    serde_json::to_value(raw_params(p)).expect("plain data serializes")
}

fn raw_params(p: &ParamSet) -> RawParams {
    RawParams {
        k: raw_vec(&p.k),
        m: raw_vec(&p.m),
        l: raw_vec(&p.l),
        n: raw_vec(&p.n),
    }
}

/// Family or variant named by a tag string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subject {
    Family(FamilyTag),
    Variant(VariantId),
}

impl Subject {
    pub fn parse(s: &str) -> Option<Subject> {
        FamilyTag::from_name(s)
            .map(Subject::Family)
            .or_else(|| VariantId::parse(s).map(Subject::Variant))
    }

    pub fn name(&self) -> String {
        match self {
            Subject::Family(t) => t.name().to_string(),
            Subject::Variant(v) => v.to_string(),
        }
    }
}

impl MatrixDocument {
    /// Document carrying both `params` and the assembled `matrix`.
    pub fn from_params(p: ParamSet) -> Self {
        MatrixDocument {
            params: Some(p),
            matrix: Some(assemble(&p)),
            meta: None,
        }
    }

    pub fn with_meta(mut self, meta: Meta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn params(&self) -> ParamSet {
        match (&self.params, &self.matrix) {
            (Some(p), _) => *p,
            (None, Some(g)) => disassemble(g),
            (None, None) => ParamSet::ZERO,
        }
    }

    pub fn matrix(&self) -> Mat4 {
        match (&self.matrix, &self.params) {
            (Some(g), _) => *g,
            (None, Some(p)) => assemble(p),
            (None, None) => Mat4::ZERO,
        }
    }

    /// Parses and validates a document.
    pub fn from_json(s: &str) -> Result<Self, DocumentError> {
        let raw: RawDocument = serde_json::from_str(s)?;
        let params = raw.params.map(|r| ParamSet {
            k: cvec(r.k),
            m: cvec(r.m),
            l: cvec(r.l),
            n: cvec(r.n),
        });
        let matrix = raw.matrix.map(|rows| Mat4(rows.map(|row| row.map(complex))));
        let meta = raw.meta.map(meta_from_raw).transpose()?;
        let doc = MatrixDocument {
            params,
            matrix,
            meta,
        };
        doc.validate()?;
        Ok(doc)
    }

    fn validate(&self) -> Result<(), DocumentError> {
        let invalid = |m: String| Err(DocumentError::Invalid(m));
        if self.params.is_none() && self.matrix.is_none() {
            return invalid("expected a \"params\" or \"matrix\" field".into());
        }
        if self.params.as_ref().is_some_and(|p| !p.is_finite())
            || self.matrix.as_ref().is_some_and(|g| !g.is_finite())
        {
            return invalid("non-finite entry".into());
        }
        if let (Some(p), Some(g)) = (&self.params, &self.matrix) {
            let diff = assemble(p).max_abs_diff(g) / scale_of(g.norm());
            if diff > 1e-12 {
                return invalid(format!(
                    "\"params\" and \"matrix\" disagree (relative difference {diff:.3e})"
                ));
            }
        }
        let Some(meta) = &self.meta else {
            return Ok(());
        };
        let subject = Subject::parse(&meta.tag)
            .ok_or_else(|| DocumentError::Invalid(format!("meta: unknown tag '{}'", meta.tag)))?;
        match subject {
            Subject::Family(tag) => {
                let r = residual_with(tag, &meta.constants, &self.params())
                    .map_err(|e| DocumentError::Invalid(format!("meta: {e}")))?;
                if r > LOAD_TOL {
                    return invalid(format!("meta: data is not a {tag} member (residual {r:.3e})"));
                }
            }
            Subject::Variant(id) => {
                if !meta.constants.is_empty() {
                    return invalid(format!("meta: variant {id} takes no constants"));
                }
                let r = variant_residual(id, &self.matrix());
                if r > LOAD_TOL {
                    return invalid(format!("meta: data is not a ({id}) member (residual {r:.3e})"));
                }
            }
        }
        Ok(())
    }

    /// Compact single-line JSON.
    pub fn to_json(&self) -> String {
        let raw = RawDocument {
            params: self.params.as_ref().map(raw_params),
            matrix: self.matrix.map(|g| g.0.map(|row| row.map(pair))),
            meta: self.meta.as_ref().map(|m| RawMeta {
                tag: m.tag.clone(),
                constants: m
                    .constants
                    .iter()
                    .map(|(c, v)| (c.name().to_string(), pair(v)))
                    .collect(),
                seed: m.seed,
            }),
        };
        serde_json::to_string(&raw).expect("plain data serializes")
    }
}

fn meta_from_raw(raw: RawMeta) -> Result<Meta, DocumentError> {
    let mut constants = FamilyConstants::new();
    for (name, value) in raw.constants {
        let c = Const::parse(&name)
            .ok_or_else(|| DocumentError::Invalid(format!("meta: unknown constant '{name}'")))?;
        constants.set(c, complex(value));
    }
    Ok(Meta {
        tag: raw.tag,
        constants,
        seed: raw.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::construct;
    use crate::sampling::{random_params, rng_from_seed};

    #[test]
    fn round_trip_is_lossless() {
        let mut rng = rng_from_seed(5);
        let p = random_params(&mut rng, false);
        let doc = MatrixDocument::from_params(p);
        let text = doc.to_json();
        let back = MatrixDocument::from_json(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn matrix_only_document() {
        let text = MatrixDocument {
            matrix: Some(Mat4::identity()),
            ..Default::default()
        }
        .to_json();
        let doc = MatrixDocument::from_json(&text).unwrap();
        assert_eq!(doc.params(), ParamSet::IDENTITY);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = MatrixDocument::from_json("{\"matrix\": [1, 2}").unwrap_err();
        assert!(err.to_string().contains("line 1 column"), "{err}");
        let err = MatrixDocument::from_json("{\"bogus\": 1}").unwrap_err();
        assert!(err.to_string().contains("line 1 column"), "{err}");
    }

    #[test]
    fn rejects_empty_and_inconsistent() {
        assert!(matches!(
            MatrixDocument::from_json("{}"),
            Err(DocumentError::Invalid(_))
        ));
        let mut doc = MatrixDocument::from_params(ParamSet::IDENTITY);
        doc.matrix = Some(Mat4::ZERO);
        assert!(MatrixDocument::from_json(&doc.to_json()).is_err());
    }

    #[test]
    fn meta_is_cross_checked() {
        let consts = FamilyConstants::new().with(Const::D, 2.0);
        let p = construct(FamilyTag::K3, &consts, &[CVec4::real(1.0, 0.5, 0.0, 0.0)]).unwrap();
        let meta = Meta {
            tag: "K-3".into(),
            constants: consts,
            seed: Some(1),
        };
        let doc = MatrixDocument::from_params(p).with_meta(meta.clone());
        assert!(MatrixDocument::from_json(&doc.to_json()).is_ok());

        let wrong = Meta {
            constants: FamilyConstants::new().with(Const::D, 3.0),
            ..meta
        };
        let doc = MatrixDocument::from_params(p).with_meta(wrong);
        assert!(MatrixDocument::from_json(&doc.to_json()).is_err());
    }
}
