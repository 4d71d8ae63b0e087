//! Embedding rules between `A^s_{p,q}` spaces and complex interpolation.
//!
//! All conditions are evaluated on reciprocals, so `1/p >= 1/q` reads
//! `p <= q`. Rules (i) and (v) are characterisations and are the only source
//! of a negative verdict; everything else is one-directional.

use std::collections::VecDeque;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactnum::{DiagramPoint, ExtRat, Rational};
use crate::spaces::{DomainContext, SpaceDescriptor, SpaceKind};

/// Longest justification chain searched by [`embed_check`].
pub const MAX_CHAIN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RuleId {
    /// `B^s_{p,q0} -> F^s_{p,q} -> B^s_{p,q1}` iff `q0 <= min(p,q)`, `max(p,q) <= q1`.
    #[serde(rename = "i")]
    I,
    /// `F^{s0}_{p0,q0} -> F^{s1}_{p1,q1}` on a slope-`d` line, `p0 < p1 < inf`.
    #[serde(rename = "ii")]
    II,
    /// Monotonicity in `q`.
    #[serde(rename = "iii")]
    III,
    /// `s0 - s1 > d max(1/p0 - 1/p1, 0)`.
    #[serde(rename = "iv")]
    IV,
    /// `B^{s0}_{p0,q0} -> F^s_{p,q} -> B^{s1}_{p1,q1}` on a slope-`d` line iff `q0 <= p <= q1`.
    #[serde(rename = "v")]
    V,
    /// `B^s_{p,p} = F^s_{p,p}`.
    #[serde(rename = "identity")]
    Identity,
    /// More than one single-rule step.
    #[serde(rename = "chain")]
    Chain,
}

impl RuleId {
    /// Bare label: `i`, `ii`, ..., `identity`, `chain`.
    pub fn name(self) -> &'static str {
        match self {
            RuleId::I => "i",
            RuleId::II => "ii",
            RuleId::III => "iii",
            RuleId::IV => "iv",
            RuleId::V => "v",
            RuleId::Identity => "identity",
            RuleId::Chain => "chain",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleId::I => "(i)",
            RuleId::II => "(ii)",
            RuleId::III => "(iii)",
            RuleId::IV => "(iv)",
            RuleId::V => "(v)",
            RuleId::Identity => "identity",
            RuleId::Chain => "chain",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub rule: RuleId,
    pub from: SpaceDescriptor,
    pub to: SpaceDescriptor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EmbedVerdict {
    Embeds { rule: RuleId, chain: Vec<Step> },
    NotEmbeds { rule: RuleId },
    Unknown,
}

impl EmbedVerdict {
    pub fn embeds(&self) -> bool {
        matches!(self, EmbedVerdict::Embeds { .. })
    }

    pub fn is_not_embeds(&self) -> bool {
        matches!(self, EmbedVerdict::NotEmbeds { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, EmbedVerdict::Unknown)
    }
}

/// Outcome of a single rule applied to a pair.
enum Direct {
    Holds(RuleId),
    Fails(RuleId),
    NotApplicable,
}

fn on_sharp_line(d: &Rational, s0: &Rational, a0: &Rational, s1: &Rational, a1: &Rational) -> bool {
    s0 - d * a0 == s1 - d * a1
}

fn max_of<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a >= b {
        a
    } else {
        b
    }
}

fn min_of<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a <= b {
        a
    } else {
        b
    }
}

fn is_identity(src: &SpaceDescriptor, dst: &SpaceDescriptor) -> bool {
    src.kind != dst.kind
        && src.s == dst.s
        && src.inv_p == dst.inv_p
        && src.inv_q == src.inv_p
        && dst.inv_q == dst.inv_p
}

/// Characterising rules (i) and (v). Either proves or refutes when their
/// hypotheses on `kind`, `s` and `p` match.
fn iff_rules(src: &SpaceDescriptor, dst: &SpaceDescriptor, d: &Rational) -> Direct {
    use SpaceKind::{B, F};
    match (src.kind, dst.kind) {
        (B, F) if src.s == dst.s && src.inv_p == dst.inv_p => {
            let rule = if is_identity(src, dst) { RuleId::Identity } else { RuleId::I };
            if src.inv_q >= *max_of(&dst.inv_p, &dst.inv_q) {
                Direct::Holds(rule)
            } else {
                Direct::Fails(RuleId::I)
            }
        }
        (F, B) if src.s == dst.s && src.inv_p == dst.inv_p => {
            let rule = if is_identity(src, dst) { RuleId::Identity } else { RuleId::I };
            if dst.inv_q <= *min_of(&src.inv_p, &src.inv_q) {
                Direct::Holds(rule)
            } else {
                Direct::Fails(RuleId::I)
            }
        }
        // B^{s0}_{p0,q0} -> F^s_{p,q} with p0 < p < inf.
        (B, F)
            if src.inv_p > dst.inv_p && on_sharp_line(d, &src.s, &src.inv_p, &dst.s, &dst.inv_p) =>
        {
            if src.inv_q >= dst.inv_p {
                Direct::Holds(RuleId::V)
            } else {
                Direct::Fails(RuleId::V)
            }
        }
        // F^s_{p,q} -> B^{s1}_{p1,q1} with p < p1 <= inf.
        (F, B)
            if src.inv_p > dst.inv_p && on_sharp_line(d, &src.s, &src.inv_p, &dst.s, &dst.inv_p) =>
        {
            if src.inv_p >= dst.inv_q {
                Direct::Holds(RuleId::V)
            } else {
                Direct::Fails(RuleId::V)
            }
        }
        _ => Direct::NotApplicable,
    }
}

/// One-directional rules (ii)-(iv).
fn sufficient_rules(src: &SpaceDescriptor, dst: &SpaceDescriptor, d: &Rational) -> Option<RuleId> {
    if src.kind == dst.kind && src.s == dst.s && src.inv_p == dst.inv_p && src.inv_q >= dst.inv_q {
        return Some(RuleId::III);
    }
    let gap = &src.inv_p - &dst.inv_p;
    let loss = if gap.is_positive() { d * gap } else { Rational::zero() };
    if &src.s - &dst.s > loss {
        return Some(RuleId::IV);
    }
    if src.kind == SpaceKind::F
        && dst.kind == SpaceKind::F
        && src.inv_p > dst.inv_p
        && on_sharp_line(d, &src.s, &src.inv_p, &dst.s, &dst.inv_p)
    {
        return Some(RuleId::II);
    }
    None
}

fn direct(src: &SpaceDescriptor, dst: &SpaceDescriptor, d: &Rational) -> Direct {
    match iff_rules(src, dst, d) {
        Direct::NotApplicable => match sufficient_rules(src, dst, d) {
            Some(rule) => Direct::Holds(rule),
            None => Direct::NotApplicable,
        },
        verdict => verdict,
    }
}

/// Intermediate spaces considered when composing rules: every combination of
/// the endpoints' parameters plus the sharp-line shifts between them.
fn candidates(src: &SpaceDescriptor, dst: &SpaceDescriptor, d: &Rational) -> Vec<SpaceDescriptor> {
    let shift = d * (&src.inv_p - &dst.inv_p);
    let mut smooth = vec![
        src.s.clone(),
        dst.s.clone(),
        &src.s - &shift,
        &dst.s + &shift,
    ];
    let mut inv_ps = vec![src.inv_p.clone(), dst.inv_p.clone()];
    let mut inv_qs = vec![
        src.inv_q.clone(),
        dst.inv_q.clone(),
        src.inv_p.clone(),
        dst.inv_p.clone(),
    ];
    for v in [&mut smooth, &mut inv_ps, &mut inv_qs] {
        v.sort();
        v.dedup();
    }
    let mut out = Vec::new();
    for kind in [SpaceKind::B, SpaceKind::F] {
        for s in &smooth {
            for a in &inv_ps {
                for b in &inv_qs {
                    if let Ok(mut c) = SpaceDescriptor::new(kind, s.clone(), a.clone(), b.clone()) {
                        c.location = src.location;
                        if &c != src && &c != dst {
                            out.push(c);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Shortest chain of at most [`MAX_CHAIN`] single-rule steps from `src` to `dst`.
fn search_chain(src: &SpaceDescriptor, dst: &SpaceDescriptor, d: &Rational) -> Option<Vec<Step>> {
    let mut nodes = vec![src.clone()];
    nodes.extend(candidates(src, dst, d));
    let target = nodes.len();
    nodes.push(dst.clone());

    let mut parent: Vec<Option<(usize, RuleId)>> = vec![None; nodes.len()];
    let mut depth = vec![usize::MAX; nodes.len()];
    depth[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if depth[i] >= MAX_CHAIN {
            continue;
        }
        for j in 1..nodes.len() {
            if depth[j] != usize::MAX {
                continue;
            }
            // Intermediate nodes are only worth visiting if the target can
            // still be reached within the step budget.
            if j != target && depth[i] + 1 >= MAX_CHAIN {
                continue;
            }
            if let Direct::Holds(rule) = direct(&nodes[i], &nodes[j], d) {
                depth[j] = depth[i] + 1;
                parent[j] = Some((i, rule));
                if j == target {
                    let mut chain = Vec::new();
                    let mut k = target;
                    while let Some((p, rule)) = parent[k] {
                        chain.push(Step {
                            rule,
                            from: nodes[p].clone(),
                            to: nodes[k].clone(),
                        });
                        k = p;
                    }
                    chain.reverse();
                    return Some(chain);
                }
                queue.push_back(j);
            }
        }
    }
    None
}

/// Decide `src ↪ dst` on a Lipschitz domain.
///
/// Spaces on the boundary use `d - 1`. Spaces at different locations are not
/// compared and yield `Unknown`.
pub fn embed_check(src: &SpaceDescriptor, dst: &SpaceDescriptor, ctx: &DomainContext) -> EmbedVerdict {
    if src.location != dst.location {
        return EmbedVerdict::Unknown;
    }
    let d = match src.effective_dimension(ctx) {
        Ok(d) => d,
        Err(_) => return EmbedVerdict::Unknown,
    };
    if src == dst {
        let rule = RuleId::III;
        return EmbedVerdict::Embeds {
            rule,
            chain: vec![Step {
                rule,
                from: src.clone(),
                to: dst.clone(),
            }],
        };
    }
    match direct(src, dst, &d) {
        Direct::Holds(rule) => EmbedVerdict::Embeds {
            rule,
            chain: vec![Step {
                rule,
                from: src.clone(),
                to: dst.clone(),
            }],
        },
        Direct::Fails(rule) => EmbedVerdict::NotEmbeds { rule },
        Direct::NotApplicable => match search_chain(src, dst, &d) {
            Some(chain) => EmbedVerdict::Embeds {
                rule: if chain.len() == 1 { chain[0].rule } else { RuleId::Chain },
                chain,
            },
            None => EmbedVerdict::Unknown,
        },
    }
}

/// Re-check every step of a chain; `true` if each is a valid single rule
/// application and consecutive steps connect.
pub fn replay_chain(chain: &[Step], ctx: &DomainContext) -> bool {
    let connected = chain.windows(2).all(|w| w[0].to == w[1].from);
    connected
        && chain.iter().all(|step| {
            let Ok(d) = step.from.effective_dimension(ctx) else {
                return false;
            };
            step.from.location == step.to.location
                && (step.from == step.to
                    || matches!(direct(&step.from, &step.to, &d), Direct::Holds(r) if r == step.rule))
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpolationError {
    #[error("complex interpolation needs endpoints of the same kind")]
    KindMismatch,
    #[error("endpoints must live on the same set (domain or boundary)")]
    LocationMismatch,
    #[error("theta must lie in (0, 1), got {0}")]
    ThetaOutOfRange(String),
    #[error("at least one of q0, q1 must be finite")]
    QBothInfinite,
}

fn check_pair(a0: &SpaceDescriptor, a1: &SpaceDescriptor) -> Result<(), InterpolationError> {
    if a0.kind != a1.kind {
        return Err(InterpolationError::KindMismatch);
    }
    if a0.location != a1.location {
        return Err(InterpolationError::LocationMismatch);
    }
    if a0.inv_q.is_zero() && a1.inv_q.is_zero() {
        return Err(InterpolationError::QBothInfinite);
    }
    Ok(())
}

fn convex(a: &Rational, b: &Rational, theta: &Rational) -> Rational {
    (Rational::one() - theta) * a + theta * b
}

/// `[a0, a1]_theta`: every parameter `s`, `1/p`, `1/q` is the convex
/// combination of the endpoints'.
pub fn interpolate(
    a0: &SpaceDescriptor,
    a1: &SpaceDescriptor,
    theta: &Rational,
) -> Result<SpaceDescriptor, InterpolationError> {
    check_pair(a0, a1)?;
    if !theta.is_positive() || theta >= &Rational::one() {
        return Err(InterpolationError::ThetaOutOfRange(ExtRat::from(theta).to_string()));
    }
    Ok(SpaceDescriptor {
        kind: a0.kind,
        s: convex(&a0.s, &a1.s, theta),
        inv_p: convex(&a0.inv_p, &a1.inv_p, theta),
        inv_q: convex(&a0.inv_q, &a1.inv_q, theta),
        location: a0.location,
    })
}

/// The straight segment traced by `[a0, a1]_theta` in the diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpolationSegment {
    pub start: DiagramPoint,
    pub end: DiagramPoint,
}

impl InterpolationSegment {
    /// Point at parameter `theta`; `theta` outside `[0, 1]` extrapolates.
    pub fn at(&self, theta: &Rational) -> DiagramPoint {
        DiagramPoint {
            x: convex(&self.start.x, &self.end.x, theta),
            y: convex(&self.start.y, &self.end.y, theta),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.start == self.end
    }
}

pub fn interpolation_segment(
    a0: &SpaceDescriptor,
    a1: &SpaceDescriptor,
) -> Result<InterpolationSegment, InterpolationError> {
    check_pair(a0, a1)?;
    Ok(InterpolationSegment {
        start: a0.diagram_point(),
        end: a1.diagram_point(),
    })
}
