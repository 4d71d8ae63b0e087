//! Profile documents: regularity assertions plus queries against them.

use serde::Deserialize;
use serde_json::{json, Value};

use super::svg::{Diagram, Style};
use super::{bound_error, CliError, FiniteRational, InputError};
use crate::bounds::{alpha_upper_bound, s_lower_bound, s_transfer_upper_bound, BoundInput, Outcome};
use crate::envelope::{close, Envelope, RegularityAssertion, RegularityRegion};
use crate::exactnum::{ExtRat, Rational};
use crate::spaces::{adaptivity_point, DomainContext};

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssertionSpec {
    #[serde(rename = "invPz")]
    pub inv_pz: FiniteRational,
    pub z: ExtRat,
}

impl AssertionSpec {
    pub fn to_assertion(&self) -> Result<RegularityAssertion, InputError> {
        RegularityAssertion::new(self.inv_pz.0.clone(), self.z.clone()).map_err(|e| InputError::new(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Query {
    LimitS {
        #[serde(rename = "invP")]
        inv_p: FiniteRational,
    },
    LimitAlpha {
        #[serde(rename = "invP")]
        inv_p: FiniteRational,
    },
    /// `sBar` defaults to the region's limit at `invP`.
    AlphaUpper {
        #[serde(rename = "invP")]
        inv_p: FiniteRational,
        #[serde(rename = "sBar", default)]
        s_bar: Option<ExtRat>,
        #[serde(rename = "invPz")]
        inv_pz: FiniteRational,
        z: ExtRat,
    },
    SLower {
        alpha: FiniteRational,
        #[serde(rename = "invP")]
        inv_p: FiniteRational,
        #[serde(rename = "invPz")]
        inv_pz: FiniteRational,
        z: FiniteRational,
    },
    STransfer {
        #[serde(rename = "sBar")]
        s_bar: FiniteRational,
        #[serde(rename = "invP")]
        inv_p: FiniteRational,
        z: FiniteRational,
        #[serde(rename = "invPz")]
        inv_pz: FiniteRational,
        #[serde(rename = "invPhat")]
        inv_phat: FiniteRational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDocument {
    pub dimension: u32,
    #[serde(default)]
    pub epsilon: Option<FiniteRational>,
    #[serde(default)]
    pub assertions: Vec<AssertionSpec>,
    #[serde(default)]
    pub queries: Vec<Query>,
}

impl ProfileDocument {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        serde_json::from_str(text).map_err(|e| InputError::new(format!("invalid profile: {e}")))
    }

    fn context(&self) -> Result<DomainContext, InputError> {
        let ctx = match &self.epsilon {
            Some(eps) => DomainContext::with_epsilon(self.dimension, eps.0.clone()),
            None => DomainContext::new(self.dimension),
        };
        ctx.map_err(|e| InputError::new(e.to_string()))
    }
}

/// Evaluated profile: the JSON report and a matching diagram.
pub struct ProfileOutput {
    pub report: Value,
    pub diagram: Diagram,
}

fn s(x: &Rational) -> String {
    ExtRat::from(x).to_string()
}

pub fn evaluate(doc: &ProfileDocument) -> Result<ProfileOutput, CliError> {
    let ctx = doc.context()?;
    let d = ctx.d();
    let rays = doc
        .assertions
        .iter()
        .map(AssertionSpec::to_assertion)
        .collect::<Result<Vec<_>, _>>()?;
    let region = close(&RegularityRegion::new(rays.clone()), &ctx);
    let env: &Envelope = region.envelope().expect("closed region");
    let mut diagram = Diagram::new(doc.dimension, "regularity profile").region(&rays);

    let mut results = Vec::new();
    for q in &doc.queries {
        let entry = match q {
            Query::LimitS { inv_p } => {
                let v = env.limit_s(&inv_p.0).map_err(|e| InputError::new(e.to_string()))?;
                if let ExtRat::Finite(y) = &v {
                    diagram = diagram.point(&inv_p.0, y, "s̄_p", true);
                }
                json!({"kind": "limit_s", "params": {"invP": s(&inv_p.0)}, "limit_s": v})
            }
            Query::LimitAlpha { inv_p } => {
                let v = env.limit_alpha(&inv_p.0, &d).map_err(|e| InputError::new(e.to_string()))?;
                diagram = diagram.ray(&inv_p.0, "");
                if let ExtRat::Finite(a) = &v {
                    if let Ok(pt) = adaptivity_point(a, &inv_p.0, doc.dimension) {
                        diagram = diagram.point(&pt.x, &pt.y, "ᾱ_p", true);
                    }
                }
                json!({"kind": "limit_alpha", "params": {"invP": s(&inv_p.0)}, "limit_alpha": v})
            }
            Query::AlphaUpper {
                inv_p,
                s_bar,
                inv_pz,
                z,
            } => {
                let s_bar = match s_bar {
                    Some(v) => v.clone(),
                    None => env.limit_s(&inv_p.0).map_err(|e| InputError::new(e.to_string()))?,
                };
                let input = BoundInput::new(doc.dimension, inv_p.0.clone(), s_bar.clone(), inv_pz.0.clone(), z.clone());
                let res = alpha_upper_bound(&input).map_err(bound_error)?;
                diagram = annotate_bound(diagram, &input, &res.outcome, res.mu.as_ref());
                json!({
                    "kind": "alpha_upper",
                    "params": {"invP": s(&inv_p.0), "sBar": s_bar, "invPz": s(&inv_pz.0), "z": z},
                    "alpha_upper": res,
                })
            }
            Query::SLower {
                alpha,
                inv_p,
                inv_pz,
                z,
            } => {
                let v = s_lower_bound(&alpha.0, &inv_p.0, &inv_pz.0, &z.0, doc.dimension).map_err(bound_error)?;
                json!({
                    "kind": "s_lower",
                    "params": {"alpha": s(&alpha.0), "invP": s(&inv_p.0), "invPz": s(&inv_pz.0), "z": s(&z.0)},
                    "s_lower": s(&v),
                })
            }
            Query::STransfer {
                s_bar,
                inv_p,
                z,
                inv_pz,
                inv_phat,
            } => {
                let v = s_transfer_upper_bound(&s_bar.0, &inv_p.0, &z.0, &inv_pz.0, &inv_phat.0).map_err(bound_error)?;
                json!({
                    "kind": "s_transfer",
                    "params": {
                        "sBar": s(&s_bar.0), "invP": s(&inv_p.0), "z": s(&z.0),
                        "invPz": s(&inv_pz.0), "invPhat": s(&inv_phat.0),
                    },
                    "s_transfer": s(&v),
                })
            }
        };
        results.push(entry);
    }

    let mut report = json!({
        "dimension": doc.dimension,
        "envelope": env,
        "results": results,
    });
    if let Some(eps) = &doc.epsilon {
        report["epsilon"] = json!(s(&eps.0));
    }
    Ok(ProfileOutput { report, diagram })
}

/// Construction of the upper bound: the points `s̄_p`, `z`, `μ` and the
/// adaptivity point reached by the line through `(1/p_z, z)` and `(1/p, s̄_p)`.
fn annotate_bound(mut diagram: Diagram, input: &BoundInput, outcome: &Outcome, mu: Option<&Rational>) -> Diagram {
    let (ExtRat::Finite(s_bar), ExtRat::Finite(z)) = (&input.s_bar, &input.z) else {
        return diagram;
    };
    let (x, xz) = (&input.inv_p, &input.inv_pz);
    diagram = diagram
        .point(x, s_bar, "s̄_p", false)
        .point(xz, z, "z", false)
        .ray(x, "");
    if let Some(mu) = mu {
        diagram = diagram
            .point(xz, mu, "μ", true)
            .line((xz, mu), (x, s_bar), Style::Dotted, "", false);
    }
    if let Outcome::Finite(alpha) = outcome {
        if let Ok(pt) = adaptivity_point(alpha, x, input.d) {
            diagram = diagram
                .line((xz, z), (&pt.x, &pt.y), Style::Dashed, "", false)
                .point(&pt.x, &pt.y, "ᾱ_p", true);
        }
    }
    diagram
}
