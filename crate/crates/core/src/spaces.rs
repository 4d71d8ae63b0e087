//! Space descriptors `A^s_{p,q}`, classical aliases, and the two slope-`d`
//! geometries of the diagram: the adaptivity scale and Sobolev lines.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactnum::{DiagramPoint, ExtRat, Line, ParseRationalError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("dimension must be at least {min}, got {got}")]
    Dimension { min: u32, got: u32 },
    #[error("roughness parameter must lie in (0, 1], got {0}")]
    Epsilon(String),
    #[error("invalid space parameters: {0}")]
    InvalidParameters(String),
    #[error("alias out of range: {0}")]
    AliasOutOfRange(String),
    #[error("cannot parse space {input:?} at position {position}: {message}")]
    Parse {
        input: String,
        position: usize,
        message: String,
    },
    #[error("{0}")]
    Precondition(String),
}

/// Ambient dimension `d` and Lipschitz roughness `epsilon` of the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainContext {
    dimension: u32,
    epsilon: Rational,
}

impl DomainContext {
    /// Context with `epsilon = 1` (e.g. C^1 domains).
    pub fn new(dimension: u32) -> Result<Self, SpaceError> {
        Self::with_epsilon(dimension, Rational::one())
    }

    pub fn with_epsilon(dimension: u32, epsilon: Rational) -> Result<Self, SpaceError> {
        if dimension < 1 {
            return Err(SpaceError::Dimension {
                min: 1,
                got: dimension,
            });
        }
        if !epsilon.is_positive() || epsilon > Rational::one() {
            return Err(SpaceError::Epsilon(ExtRat::from(epsilon).to_string()));
        }
        Ok(DomainContext { dimension, epsilon })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn d(&self) -> Rational {
        Rational::from_integer(self.dimension.into())
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    /// The worked examples need `d >= 2`.
    pub fn require_case_study_dimension(&self) -> Result<(), SpaceError> {
        if self.dimension < 2 {
            return Err(SpaceError::Dimension {
                min: 2,
                got: self.dimension,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SpaceKind {
    B,
    F,
}

/// Spaces on `∂Ω` use the same parameters with effective dimension `d - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Interior,
    Boundary,
}

/// `A^s_{p,q}` stored as `(kind, s, 1/p, 1/q)`. `inv_p = 0` means `p = inf`,
/// likewise for `q`. F-spaces need `p < inf`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpaceDescriptor {
    pub kind: SpaceKind,
    pub s: Rational,
    pub inv_p: Rational,
    pub inv_q: Rational,
    pub location: Location,
}

impl SpaceDescriptor {
    pub fn new(
        kind: SpaceKind,
        s: Rational,
        inv_p: Rational,
        inv_q: Rational,
    ) -> Result<Self, SpaceError> {
        if inv_p.is_negative() || inv_q.is_negative() {
            return Err(SpaceError::InvalidParameters(
                "p and q must lie in (0, inf]".into(),
            ));
        }
        if kind == SpaceKind::F && inv_p.is_zero() {
            return Err(SpaceError::InvalidParameters(
                "Triebel-Lizorkin spaces need p < inf".into(),
            ));
        }
        Ok(SpaceDescriptor {
            kind,
            s,
            inv_p,
            inv_q,
            location: Location::Interior,
        })
    }

    pub fn besov(s: Rational, inv_p: Rational, inv_q: Rational) -> Result<Self, SpaceError> {
        Self::new(SpaceKind::B, s, inv_p, inv_q)
    }

    pub fn triebel(s: Rational, inv_p: Rational, inv_q: Rational) -> Result<Self, SpaceError> {
        Self::new(SpaceKind::F, s, inv_p, inv_q)
    }

    /// `B^s_{p,p}`, the space a diagram point stands for.
    pub fn diagonal_besov(s: Rational, inv_p: Rational) -> Result<Self, SpaceError> {
        Self::new(SpaceKind::B, s, inv_p.clone(), inv_p)
    }

    /// Build from `p` and `q` themselves, using `1/inf = 0`.
    pub fn from_pq(kind: SpaceKind, s: Rational, p: &ExtRat, q: &ExtRat) -> Result<Self, SpaceError> {
        let recip = |v: &ExtRat, name: &str| -> Result<Rational, SpaceError> {
            if v.signum() <= 0 {
                return Err(SpaceError::InvalidParameters(format!(
                    "{name} must lie in (0, inf], got {v}"
                )));
            }
            v.recip()
                .into_finite()
                .map_err(|e| SpaceError::InvalidParameters(e.to_string()))
        };
        Self::new(kind, s, recip(p, "p")?, recip(q, "q")?)
    }

    pub fn on_boundary(mut self) -> Self {
        self.location = Location::Boundary;
        self
    }

    pub fn with_kind(&self, kind: SpaceKind) -> Result<Self, SpaceError> {
        let mut out = Self::new(kind, self.s.clone(), self.inv_p.clone(), self.inv_q.clone())?;
        out.location = self.location;
        Ok(out)
    }

    pub fn p(&self) -> ExtRat {
        ExtRat::from(&self.inv_p).recip()
    }

    pub fn q(&self) -> ExtRat {
        ExtRat::from(&self.inv_q).recip()
    }

    /// Dimension entering the embedding arithmetic for this location.
    pub fn effective_dimension(&self, ctx: &DomainContext) -> Result<Rational, SpaceError> {
        match self.location {
            Location::Interior => Ok(ctx.d()),
            Location::Boundary => {
                ctx.require_case_study_dimension()?;
                Ok(ctx.d() - Rational::one())
            }
        }
    }

    /// The diagram point `(1/p, s)`.
    pub fn diagram_point(&self) -> DiagramPoint {
        DiagramPoint {
            x: self.inv_p.clone(),
            y: self.s.clone(),
        }
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?}^{{{}}}_{{{},{}}}",
            self.kind,
            ExtRat::from(&self.s),
            self.p(),
            self.q()
        )?;
        if self.location == Location::Boundary {
            f.write_str("@boundary")?;
        }
        Ok(())
    }
}

impl Serialize for SpaceDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Classical spaces expressed through `A^s_{p,q}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AliasedSpace {
    /// `W^s_p`: Sobolev for integer `s >= 0`, Sobolev-Slobodeckij otherwise.
    W { s: Rational, inv_p: Rational },
    /// Bessel potential space `H^s_p`, `1 < p < inf`.
    H { s: Rational, inv_p: Rational },
    /// `H^s = H^s_2`.
    Hs { s: Rational },
    /// `L_p = W^0_p`, `1 < p < inf`.
    Lp { inv_p: Rational },
    Canonical(SpaceDescriptor),
}

fn strictly_between_zero_and_one(v: &Rational) -> bool {
    v.is_positive() && v < &Rational::one()
}

/// Resolve an alias to its canonical descriptor.
///
/// - `W^m_p = F^m_{p,2}` for `m` a non-negative integer, `1 < p < inf`
/// - `W^s_p = F^s_{p,p}` for `0 < s` not an integer, `1 <= p < inf`
/// - `H^s_p = F^s_{p,2}`, `H^s = F^s_{2,2}`, `L_p = F^0_{p,2}`
///
/// Negative-order `W` spaces are defined by duality and are not modelled;
/// use the `H` alias for them.
pub fn resolve_alias(alias: &AliasedSpace) -> Result<SpaceDescriptor, SpaceError> {
    let half = Rational::new(1.into(), 2.into());
    match alias {
        AliasedSpace::W { s, inv_p } => {
            if s.is_negative() {
                return Err(SpaceError::AliasOutOfRange(format!(
                    "W^{}_p with negative order is a dual space; use H^s_p",
                    ExtRat::from(s)
                )));
            }
            if s.is_integer() {
                if !strictly_between_zero_and_one(inv_p) {
                    return Err(SpaceError::AliasOutOfRange(
                        "integer-order W^m_p needs 1 < p < inf".into(),
                    ));
                }
                SpaceDescriptor::triebel(s.clone(), inv_p.clone(), half)
            } else {
                if !inv_p.is_positive() || inv_p > &Rational::one() {
                    return Err(SpaceError::AliasOutOfRange(
                        "fractional W^s_p needs 1 <= p < inf".into(),
                    ));
                }
                SpaceDescriptor::triebel(s.clone(), inv_p.clone(), inv_p.clone())
            }
        }
        AliasedSpace::H { s, inv_p } => {
            if !strictly_between_zero_and_one(inv_p) {
                return Err(SpaceError::AliasOutOfRange(
                    "H^s_p needs 1 < p < inf".into(),
                ));
            }
            SpaceDescriptor::triebel(s.clone(), inv_p.clone(), half)
        }
        AliasedSpace::Hs { s } => SpaceDescriptor::triebel(s.clone(), half.clone(), half),
        AliasedSpace::Lp { inv_p } => resolve_alias(&AliasedSpace::W {
            s: Rational::zero(),
            inv_p: inv_p.clone(),
        }),
        AliasedSpace::Canonical(desc) => Ok(desc.clone()),
    }
}

/// `sigma_p = d * max(1/p - 1, 0)`.
pub fn sigma_p(inv_p: &Rational, d: u32) -> Rational {
    let excess = inv_p - Rational::one();
    if excess.is_positive() {
        excess * Rational::from_integer(d.into())
    } else {
        Rational::zero()
    }
}

/// Point `(1/tau, alpha)` of the adaptivity scale `1/tau = alpha/d + 1/p`.
pub fn adaptivity_point(alpha: &Rational, inv_p: &Rational, d: u32) -> Result<DiagramPoint, SpaceError> {
    adaptivity_point_shifted(alpha, inv_p, d, &Rational::zero())
}

/// Adaptivity scale for errors measured in `W^r_p`: `1/tau = (alpha - r)/d + 1/p`.
pub fn adaptivity_point_shifted(
    alpha: &Rational,
    inv_p: &Rational,
    d: u32,
    shift: &Rational,
) -> Result<DiagramPoint, SpaceError> {
    if alpha <= shift {
        return Err(SpaceError::Precondition(format!(
            "alpha must exceed {}, got {}",
            ExtRat::from(shift),
            ExtRat::from(alpha)
        )));
    }
    if inv_p.is_negative() || d == 0 {
        return Err(SpaceError::Precondition("need 1/p >= 0 and d >= 1".into()));
    }
    let x = (alpha - shift) / Rational::from_integer(d.into()) + inv_p;
    Ok(DiagramPoint {
        x,
        y: alpha.clone(),
    })
}

/// Line of slope `d` through a point: the sharp Sobolev embedding line.
pub fn sobolev_line_through(pt: &DiagramPoint, d: u32) -> Line {
    Line::with_slope_through(Rational::from_integer(d.into()), &pt.x, &pt.y)
}

// ---------------------------------------------------------------------------
// Text parsing: B^{s}_{p,q}, F^{s}_{p,q}, W^{s}_{p}, H^{s}_{p}, H^{s}, L_{p},
// with an optional `@boundary` suffix.

struct Cursor<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn error(&self, position: usize, message: impl Into<String>) -> SpaceError {
        SpaceError::Parse {
            input: self.input.to_string(),
            position,
            message: message.into(),
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), SpaceError> {
        if self.input[self.pos..].starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            Err(self.error(self.pos, format!("expected {token:?}")))
        }
    }

    /// Contents of a `{...}` group split on commas.
    fn group(&mut self) -> Result<Vec<(usize, &'a str)>, SpaceError> {
        self.expect("{")?;
        let start = self.pos;
        let close = self.input[start..]
            .find('}')
            .ok_or_else(|| self.error(self.input.len(), "unterminated '{'"))?;
        let body = &self.input[start..start + close];
        self.pos = start + close + 1;
        let mut parts = Vec::new();
        let mut offset = start;
        for piece in body.split(',') {
            parts.push((offset, piece));
            offset += piece.len() + 1;
        }
        Ok(parts)
    }

    fn rational(&self, (offset, text): (usize, &str)) -> Result<ExtRat, SpaceError> {
        text.parse::<ExtRat>()
            .map_err(|e: ParseRationalError| self.error(offset + e.position, e.message))
    }

    fn finite(&self, part: (usize, &str)) -> Result<Rational, SpaceError> {
        self.rational(part)?
            .into_finite()
            .map_err(|_| self.error(part.0, "smoothness must be finite"))
    }

    /// Reciprocal of an integrability parameter in `(0, inf]`.
    fn reciprocal(&self, part: (usize, &str)) -> Result<Rational, SpaceError> {
        let v = self.rational(part)?;
        if v.signum() <= 0 {
            return Err(self.error(part.0, "parameter must be positive"));
        }
        Ok(v.recip().into_finite().expect("reciprocal of a positive value"))
    }
}

fn arity(
    cursor: &Cursor<'_>,
    parts: &[(usize, &str)],
    n: usize,
    at: usize,
) -> Result<(), SpaceError> {
    if parts.len() != n {
        return Err(cursor.error(at, format!("expected {n} comma-separated parameter(s)")));
    }
    Ok(())
}

impl FromStr for AliasedSpace {
    type Err = SpaceError;

    fn from_str(input: &str) -> Result<Self, SpaceError> {
        let mut c = Cursor { input, pos: 0 };
        let head = input
            .chars()
            .next()
            .ok_or_else(|| c.error(0, "empty space description"))?;
        c.pos = head.len_utf8();
        let alias = match head {
            'B' | 'F' => {
                c.expect("^")?;
                let s = c.group()?;
                arity(&c, &s, 1, 1)?;
                let s = c.finite(s[0])?;
                c.expect("_")?;
                let at = c.pos;
                let pq = c.group()?;
                arity(&c, &pq, 2, at)?;
                let kind = if head == 'B' { SpaceKind::B } else { SpaceKind::F };
                let desc = SpaceDescriptor::new(kind, s, c.reciprocal(pq[0])?, c.reciprocal(pq[1])?)
                    .map_err(|e| c.error(0, e.to_string()))?;
                AliasedSpace::Canonical(desc)
            }
            'W' | 'H' => {
                c.expect("^")?;
                let s = c.group()?;
                arity(&c, &s, 1, 1)?;
                let s = c.finite(s[0])?;
                if head == 'H' && !input[c.pos..].starts_with('_') {
                    AliasedSpace::Hs { s }
                } else {
                    c.expect("_")?;
                    let at = c.pos;
                    let p = c.group()?;
                    arity(&c, &p, 1, at)?;
                    let inv_p = c.reciprocal(p[0])?;
                    if head == 'W' {
                        AliasedSpace::W { s, inv_p }
                    } else {
                        AliasedSpace::H { s, inv_p }
                    }
                }
            }
            'L' => {
                c.expect("_")?;
                let at = c.pos;
                let p = c.group()?;
                arity(&c, &p, 1, at)?;
                AliasedSpace::Lp {
                    inv_p: c.reciprocal(p[0])?,
                }
            }
            _ => return Err(c.error(0, "expected one of B, F, W, H, L")),
        };
        if c.pos != input.len() && &input[c.pos..] != "@boundary" {
            return Err(c.error(c.pos, "unexpected trailing input"));
        }
        Ok(alias)
    }
}

impl FromStr for SpaceDescriptor {
    type Err = SpaceError;

    /// Parses canonical or alias notation and resolves aliases.
    fn from_str(input: &str) -> Result<Self, SpaceError> {
        let alias: AliasedSpace = input.parse()?;
        let desc = resolve_alias(&alias)?;
        Ok(if input.ends_with("@boundary") {
            desc.on_boundary()
        } else {
            desc
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn space(s: &str) -> SpaceDescriptor {
        s.parse().unwrap()
    }

    #[test]
    fn alias_examples() {
        let w = resolve_alias(&AliasedSpace::W {
            s: rat(3, 2),
            inv_p: rat(1, 2),
        })
        .unwrap();
        assert_eq!(w, space("F^{3/2}_{2,2}"));
        let sigma = rat(1, 7);
        let h = resolve_alias(&AliasedSpace::H {
            s: rat(-1, 2) + &sigma,
            inv_p: rat(1, 2),
        })
        .unwrap();
        assert_eq!(h.kind, SpaceKind::F);
        assert_eq!(h.s, rat(-5, 14));
        assert_eq!((h.inv_p.clone(), h.inv_q.clone()), (rat(1, 2), rat(1, 2)));
        let w2 = resolve_alias(&AliasedSpace::W {
            s: rat(2, 1),
            inv_p: rat(1, 2),
        })
        .unwrap();
        assert_eq!(w2, space("F^{2}_{2,2}"));
    }

    #[test]
    fn integer_order_sobolev_uses_q_two() {
        let w = space("W^{1}_{4}");
        assert_eq!(w, space("F^{1}_{4,2}"));
        assert_eq!(space("L_{3}"), space("F^{0}_{3,2}"));
        assert_eq!(space("H^{1/2}"), space("F^{1/2}_{2,2}"));
        assert_eq!(space("W^{1/2}_{1}"), space("F^{1/2}_{1,1}"));
    }

    #[test]
    fn alias_out_of_range() {
        for bad in ["W^{-1}_{2}", "W^{1}_{1}", "H^{0}_{1}", "L_{inf}", "W^{1/2}_{1/2}"] {
            let err = bad.parse::<SpaceDescriptor>().unwrap_err();
            assert!(matches!(err, SpaceError::AliasOutOfRange(_)), "{bad}: {err}");
        }
    }

    #[test]
    fn resolve_is_idempotent_on_canonical_input() {
        let d = space("B^{7/4}_{4/3,inf}");
        let again = resolve_alias(&AliasedSpace::Canonical(d.clone())).unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn parse_errors_report_positions() {
        match "B^{2}_{2,x}".parse::<SpaceDescriptor>().unwrap_err() {
            SpaceError::Parse { position, .. } => assert_eq!(position, 9),
            other => panic!("{other}"),
        }
        assert!("F^{1}_{inf,2}".parse::<SpaceDescriptor>().is_err());
        assert!("B^{1}_{2}".parse::<SpaceDescriptor>().is_err());
        assert!("B^{1}_{2,2}x".parse::<SpaceDescriptor>().is_err());
        assert!("Q^{1}_{2,2}".parse::<SpaceDescriptor>().is_err());
        assert!("B^{1}_{0,2}".parse::<SpaceDescriptor>().is_err());
    }

    #[test]
    fn rendering_round_trips() {
        for text in [
            "B^{2}_{2,2}",
            "F^{-5/14}_{4/3,inf}",
            "B^{0}_{inf,1}",
            "F^{1}_{2,3}@boundary",
        ] {
            let d = space(text);
            assert_eq!(d.to_string(), text);
            assert_eq!(space(&d.to_string()), d);
        }
        assert_eq!(space("B^{4/2}_{6/3,2}").to_string(), "B^{2}_{2,2}");
    }

    #[test]
    fn sigma_p_examples() {
        assert_eq!(sigma_p(&rat(1, 2), 3), rat(0, 1));
        assert_eq!(sigma_p(&rat(2, 1), 2), rat(2, 1));
        assert_eq!(sigma_p(&rat(1, 1), 5), rat(0, 1));
    }

    #[test]
    fn adaptivity_point_examples() {
        let p = adaptivity_point(&rat(3, 1), &rat(1, 2), 2).unwrap();
        assert_eq!((p.x, p.y), (rat(2, 1), rat(3, 1)));
        let p = adaptivity_point(&rat(9, 4), &rat(1, 2), 3).unwrap();
        assert_eq!((p.x, p.y), (rat(5, 4), rat(9, 4)));
        for d in 1..6 {
            let p = adaptivity_point(&rat(d, 1), &rat(0, 1), d as u32).unwrap();
            assert_eq!((p.x, p.y), (rat(1, 1), rat(d, 1)));
        }
        assert!(adaptivity_point(&rat(0, 1), &rat(1, 2), 2).is_err());
    }

    #[test]
    fn sobolev_line_examples() {
        let l = sobolev_line_through(&DiagramPoint::new(rat(1, 2), rat(3, 2)).unwrap(), 2);
        assert_eq!(l, Line::from_slope_intercept(rat(2, 1), rat(1, 2)));
        let l = sobolev_line_through(&DiagramPoint::new(rat(0, 1), rat(0, 1)).unwrap(), 3);
        assert_eq!(l, Line::from_slope_intercept(rat(3, 1), rat(0, 1)));
        let l = sobolev_line_through(&DiagramPoint::new(rat(1, 2), rat(3, 2)).unwrap(), 3);
        assert_eq!(l, Line::from_slope_intercept(rat(3, 1), rat(0, 1)));
    }

    #[test]
    fn context_validation() {
        assert!(DomainContext::new(0).is_err());
        assert!(DomainContext::with_epsilon(3, rat(0, 1)).is_err());
        assert!(DomainContext::with_epsilon(3, rat(3, 2)).is_err());
        assert!(DomainContext::new(1).unwrap().require_case_study_dimension().is_err());
    }
}
