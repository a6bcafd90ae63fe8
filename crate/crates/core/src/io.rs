//! JSON documents exchanged at the tool boundary.
//!
//! A shape travels as
//!
//! ```json
//! {
//!   "n": 3,
//!   "p": 1,
//!   "ambient": { "kind": "real", "c": 1.0, "ambient_real_dim": 4 },
//!   "h": [ [[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] ]
//! }
//! ```
//!
//! with `h[r][i][j]` the second-fundamental-form coefficient for normal
//! direction `r` (row `i`, column `j` of the `r`-th shape operator).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qp::{QpLabel, QpSolution, SolveMethod, TraceConstrainedQp};
use crate::shape::{AmbientForm, ShapeOperatorSet, SpaceFormKind};

/// Ambient form as serialized.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientDoc {
    pub kind: SpaceFormKind,
    pub c: f64,
    pub ambient_real_dim: usize,
}

/// A shape plus its ambient form, as serialized.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeDocument {
    pub n: usize,
    pub p: usize,
    pub ambient: AmbientDoc,
    pub h: Vec<Vec<Vec<f64>>>,
}

impl ShapeDocument {
    pub fn from_parts(shape: &ShapeOperatorSet, ambient: &AmbientForm) -> Self {
        let n = shape.n();
        let h = shape
            .operators()
            .iter()
            .map(|a| {
                (0..n)
                    .map(|i| (0..n).map(|j| a[(i, j)]).collect())
                    .collect()
            })
            .collect();
        Self {
            n,
            p: shape.p(),
            ambient: AmbientDoc {
                kind: ambient.kind(),
                c: ambient.c(),
                ambient_real_dim: ambient.ambient_real_dim(),
            },
            h,
        }
    }

    /// Validate and convert into working types. Dimension mismatches are
    /// reported with the offending indices.
    pub fn to_parts(&self) -> Result<(ShapeOperatorSet, AmbientForm)> {
        if self.h.len() != self.p {
            return Err(Error::Schema(format!(
                "p = {} but h lists {} operators",
                self.p,
                self.h.len()
            )));
        }
        let mut ops = Vec::with_capacity(self.p);
        for (r, rows) in self.h.iter().enumerate() {
            if rows.len() != self.n {
                return Err(Error::Schema(format!(
                    "operator {r} has {} rows, expected n = {}",
                    rows.len(),
                    self.n
                )));
            }
            for (i, row) in rows.iter().enumerate() {
                if row.len() != self.n {
                    return Err(Error::Schema(format!(
                        "operator {r}, row {i} has {} entries, expected n = {}",
                        row.len(),
                        self.n
                    )));
                }
            }
            ops.push(DMatrix::from_fn(self.n, self.n, |i, j| rows[i][j]));
        }
        let shape = ShapeOperatorSet::new(ops)?;
        let ambient = AmbientForm::new(
            self.ambient.kind,
            self.ambient.c,
            self.ambient.ambient_real_dim,
        )?;
        ambient.check_hosts(&shape)?;
        Ok((shape, ambient))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("shape document serializes")
    }
}

/// A labeled program as serialized: which family, its size, the family
/// parameter if any, and the trace constraint.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QpDocument {
    pub label: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    pub trace: f64,
}

impl QpDocument {
    pub fn from_qp(qp: &TraceConstrainedQp) -> Option<Self> {
        let (label, k_order, r) = match qp.label()? {
            QpLabel::FrReal { k_order } => ("fr_real", Some(k_order), None),
            QpLabel::F1Lagrangian => ("f1_lagrangian", None, None),
            QpLabel::FrLagrangian { r } => ("fr_lagrangian", None, Some(r)),
        };
        Some(Self {
            label: label.into(),
            n: qp.n(),
            k_order,
            r,
            trace: qp.trace_value(),
        })
    }

    /// Build the program, insisting that exactly the fields the family needs
    /// are present.
    pub fn build(&self) -> Result<TraceConstrainedQp> {
        let reject_extra = |field: &str, present: bool| -> Result<()> {
            if present {
                Err(Error::Schema(format!(
                    "label '{}' does not take '{field}'",
                    self.label
                )))
            } else {
                Ok(())
            }
        };
        match self.label.as_str() {
            "fr_real" => {
                reject_extra("r", self.r.is_some())?;
                let k = self
                    .k_order
                    .ok_or_else(|| Error::Schema("label 'fr_real' requires 'k_order'".into()))?;
                TraceConstrainedQp::fr_real(self.n, k, self.trace)
            }
            "f1_lagrangian" => {
                reject_extra("k_order", self.k_order.is_some())?;
                reject_extra("r", self.r.is_some())?;
                TraceConstrainedQp::f1_lagrangian(self.n, self.trace)
            }
            "fr_lagrangian" => {
                reject_extra("k_order", self.k_order.is_some())?;
                let r = self
                    .r
                    .ok_or_else(|| Error::Schema("label 'fr_lagrangian' requires 'r'".into()))?;
                TraceConstrainedQp::fr_lagrangian(self.n, r, self.trace)
            }
            other => Err(Error::Schema(format!(
                "unknown label '{other}' (expected fr_real, f1_lagrangian, or fr_lagrangian)"
            ))),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }
}

/// A [`QpSolution`] as serialized.
#[derive(Clone, Debug, Serialize)]
pub struct QpSolutionDoc {
    pub method: SolveMethod,
    pub point: Vec<f64>,
    pub multiplier: f64,
    pub max_value: f64,
}

impl From<&QpSolution> for QpSolutionDoc {
    fn from(sol: &QpSolution) -> Self {
        Self {
            method: sol.method,
            point: sol.point.iter().copied().collect(),
            multiplier: sol.multiplier,
            max_value: sol.max_value,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{random_shape, sample_rng};

    #[test]
    fn shape_document_round_trip() {
        let mut rng = sample_rng(3, 0);
        let shape = random_shape(3, 2, 1.0, &mut rng).unwrap();
        let ambient = AmbientForm::real(0.5, 6).unwrap();
        let doc = ShapeDocument::from_parts(&shape, &ambient);
        let text = doc.to_json_pretty();
        let parsed = ShapeDocument::from_json(&text).unwrap();
        let (shape2, ambient2) = parsed.to_parts().unwrap();
        assert_eq!(shape, shape2);
        assert_eq!(ambient, ambient2);
    }

    #[test]
    fn shape_document_reports_offending_dimensions() {
        let text = r#"{
            "n": 3, "p": 2,
            "ambient": {"kind": "real", "c": 0.0, "ambient_real_dim": 5},
            "h": [[[0,0,0],[0,0,0],[0,0,0]]]
        }"#;
        let doc = ShapeDocument::from_json(text).unwrap();
        match doc.to_parts() {
            Err(Error::Schema(msg)) => assert!(msg.contains("p = 2"), "message: {msg}"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn shape_document_rejects_asymmetric_h() {
        let text = r#"{
            "n": 3, "p": 1,
            "ambient": {"kind": "real", "c": 0.0, "ambient_real_dim": 4},
            "h": [[[0,1,0],[0,0,0],[0,0,0]]]
        }"#;
        let doc = ShapeDocument::from_json(text).unwrap();
        assert!(matches!(
            doc.to_parts(),
            Err(Error::AsymmetricOperator {
                r: 0,
                i: 0,
                j: 1,
                ..
            })
        ));
    }

    #[test]
    fn shape_document_rejects_undersized_ambient() {
        let text = r#"{
            "n": 3, "p": 1,
            "ambient": {"kind": "real", "c": 0.0, "ambient_real_dim": 3},
            "h": [[[0,0,0],[0,0,0],[0,0,0]]]
        }"#;
        let doc = ShapeDocument::from_json(text).unwrap();
        assert!(matches!(doc.to_parts(), Err(Error::AmbientTooSmall { .. })));
    }

    #[test]
    fn qp_document_field_discipline() {
        let ok = QpDocument {
            label: "fr_real".into(),
            n: 5,
            k_order: Some(3),
            r: None,
            trace: 1.0,
        };
        assert!(ok.build().is_ok());
        let missing = QpDocument {
            label: "fr_real".into(),
            n: 5,
            k_order: None,
            r: None,
            trace: 1.0,
        };
        assert!(matches!(missing.build(), Err(Error::Schema(_))));
        let extra = QpDocument {
            label: "f1_lagrangian".into(),
            n: 5,
            k_order: Some(3),
            r: None,
            trace: 1.0,
        };
        assert!(matches!(extra.build(), Err(Error::Schema(_))));
        let unknown = QpDocument {
            label: "fr_quartic".into(),
            n: 5,
            k_order: None,
            r: None,
            trace: 1.0,
        };
        assert!(matches!(unknown.build(), Err(Error::Schema(_))));
    }

    #[test]
    fn qp_document_round_trip() {
        let qp = TraceConstrainedQp::fr_lagrangian(6, 4, 2.5).unwrap();
        let doc = QpDocument::from_qp(&qp).unwrap();
        assert_eq!(doc.label, "fr_lagrangian");
        assert_eq!(doc.r, Some(4));
        let rebuilt = doc.build().unwrap();
        assert_eq!(rebuilt.label(), qp.label());
        assert_eq!(rebuilt.matrix(), qp.matrix());
    }
}
