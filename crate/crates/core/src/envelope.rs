//! Deductive closure of regularity assertions in the `(1/rho, s)` plane.
//!
//! An assertion "S ⊆ B^s_{p_z,p_z} for all s < z" is an open vertical ray.
//! Embeddings add its shadow (flat to the right, slope `d` to the left) and
//! complex interpolation adds chords, so the closure of finitely many rays is
//! bounded by a concave, non-decreasing, piecewise linear function `U` whose
//! slopes lie in `[0, d]`. Everything strictly below `U` is a member.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactnum::{DiagramPoint, ExtRat, Rational};
use crate::spaces::DomainContext;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    #[error("abscissa must be non-negative, got {0}")]
    NegativeAbscissa(String),
    #[error("region has not been closed")]
    NotClosed,
}

/// "S ⊆ B^s_{p_z,p_z} for all s < z": the open ray at `1/p_z` with top `z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RegularityAssertion {
    #[serde(rename = "inv_pz", serialize_with = "ser_rational")]
    pub inv_pz: Rational,
    pub z: ExtRat,
}

fn ser_rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    ExtRat::from(r).serialize(s)
}

impl RegularityAssertion {
    pub fn new(inv_pz: Rational, z: impl Into<ExtRat>) -> Result<Self, EnvelopeError> {
        if inv_pz.is_negative() {
            return Err(EnvelopeError::NegativeAbscissa(ExtRat::from(inv_pz).to_string()));
        }
        Ok(RegularityAssertion {
            inv_pz,
            z: z.into(),
        })
    }
}

impl fmt::Display for RegularityAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ray at 1/p = {} up to {}", ExtRat::from(&self.inv_pz), self.z)
    }
}

/// Upper boundary `U` of a closed region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Envelope {
    /// No assertions: `U = -inf`.
    Empty,
    /// Some assertion has `z = +inf`: `U = +inf`.
    Infinite,
    /// Breakpoints with strictly increasing abscissae starting at `x = 0`,
    /// no three consecutive ones collinear; constant after the last one.
    Finite(Vec<DiagramPoint>),
}

fn cross(o: &DiagramPoint, a: &DiagramPoint, b: &DiagramPoint) -> Rational {
    (&a.x - &o.x) * (&b.y - &o.y) - (&a.y - &o.y) * (&b.x - &o.x)
}

/// Upper concave hull of `points` truncated to be flat after its maximum.
fn concave_majorant(mut points: Vec<DiagramPoint>) -> Vec<DiagramPoint> {
    points.sort_by(|a, b| a.x.cmp(&b.x).then_with(|| b.y.cmp(&a.y)));
    points.dedup_by(|later, earlier| later.x == earlier.x);
    let mut hull: Vec<DiagramPoint> = Vec::with_capacity(points.len());
    for p in points {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p).is_negative() {
            hull.pop();
        }
        hull.push(p);
    }
    // The hull rises to its maximum and then falls; the flat extension
    // of the maximum dominates the falling part.
    let top = hull
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.y.cmp(&b.y).then_with(|| j.cmp(i)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    hull.truncate(top + 1);
    hull
}

impl Envelope {
    /// Concave closure of the given rays in dimension `d`.
    pub fn from_assertions<'a>(
        assertions: impl IntoIterator<Item = &'a RegularityAssertion>,
        d: &Rational,
    ) -> Envelope {
        let mut points = Vec::new();
        for a in assertions {
            match &a.z {
                ExtRat::NegInf => {}
                ExtRat::PosInf => return Envelope::Infinite,
                ExtRat::Finite(z) => {
                    points.push(DiagramPoint {
                        x: Rational::zero(),
                        y: z - d * &a.inv_pz,
                    });
                    points.push(DiagramPoint {
                        x: a.inv_pz.clone(),
                        y: z.clone(),
                    });
                }
            }
        }
        if points.is_empty() {
            Envelope::Empty
        } else {
            Envelope::Finite(concave_majorant(points))
        }
    }

    pub fn breakpoints(&self) -> &[DiagramPoint] {
        match self {
            Envelope::Finite(b) => b,
            _ => &[],
        }
    }

    /// Value of `U` beyond the last breakpoint.
    pub fn right_value(&self) -> ExtRat {
        match self {
            Envelope::Empty => ExtRat::NegInf,
            Envelope::Infinite => ExtRat::PosInf,
            Envelope::Finite(b) => ExtRat::from(&b[b.len() - 1].y),
        }
    }

    /// Slope of the first piece; `None` unless finite.
    pub fn left_slope(&self) -> Option<Rational> {
        match self {
            Envelope::Finite(b) if b.len() >= 2 => Some(segment_slope(&b[0], &b[1])),
            Envelope::Finite(_) => Some(Rational::zero()),
            _ => None,
        }
    }

    /// Slopes of all pieces, left to right, ending with the flat extension.
    pub fn slopes(&self) -> Vec<Rational> {
        let b = self.breakpoints();
        let mut out: Vec<Rational> = b.windows(2).map(|w| segment_slope(&w[0], &w[1])).collect();
        if !b.is_empty() {
            out.push(Rational::zero());
        }
        out
    }

    /// `U(x)` for `x >= 0`.
    pub fn value_at(&self, x: &Rational) -> Result<ExtRat, EnvelopeError> {
        if x.is_negative() {
            return Err(EnvelopeError::NegativeAbscissa(ExtRat::from(x).to_string()));
        }
        Ok(match self {
            Envelope::Empty => ExtRat::NegInf,
            Envelope::Infinite => ExtRat::PosInf,
            Envelope::Finite(b) => {
                let (value, _) = locate(b, x);
                ExtRat::Finite(value)
            }
        })
    }

    /// Slope of `U` immediately to the left of `x`; at `x = 0` the shadow
    /// slope `d` is returned since nothing lies further left.
    pub fn left_slope_at(&self, x: &Rational, d: &Rational) -> Option<Rational> {
        match self {
            Envelope::Finite(b) if x.is_positive() => Some(locate(b, x).1),
            Envelope::Finite(_) => Some(d.clone()),
            _ => None,
        }
    }

    /// Right end of the region worth drawing: past every breakpoint and far
    /// enough for the adaptivity ray from the origin to cross the top.
    pub fn x_max(&self, d: &Rational) -> Rational {
        match self {
            Envelope::Finite(b) => {
                let last = &b[b.len() - 1];
                let top = if last.y.is_positive() { last.y.clone() } else { Rational::zero() };
                &last.x + top / d + Rational::from_integer(1.into())
            }
            _ => Rational::from_integer(1.into()),
        }
    }

    /// `s̄_p = U(1/p)` if positive, otherwise `-inf` (supremum of an empty set).
    pub fn limit_s(&self, inv_p: &Rational) -> Result<ExtRat, EnvelopeError> {
        let u = self.value_at(inv_p)?;
        Ok(if u.signum() > 0 { u } else { ExtRat::NegInf })
    }

    /// Largest `alpha` such that membership in `B^alpha_{tau,tau}` with
    /// `1/tau = alpha/d + 1/p` is compatible with the region, i.e. adding the
    /// point `(1/tau, alpha)` to the closure does not raise `U(1/p)`.
    ///
    /// With `u = U(1/p)` and `L` the left slope of `U` at `1/p` this is
    /// `d u / (d - L)`, and `+inf` when `L = d`.
    pub fn limit_alpha(&self, inv_p: &Rational, d: &Rational) -> Result<ExtRat, EnvelopeError> {
        self.limit_alpha_shifted(inv_p, d, &Rational::zero())
    }

    /// As [`Envelope::limit_alpha`] for the scale `1/tau = (alpha - r)/d + 1/p`
    /// of approximation in `W^r_p`: `r + d (u - r) / (d - L)`.
    pub fn limit_alpha_shifted(
        &self,
        inv_p: &Rational,
        d: &Rational,
        r: &Rational,
    ) -> Result<ExtRat, EnvelopeError> {
        let u = match self.value_at(inv_p)? {
            ExtRat::Finite(u) => u,
            other => return Ok(other),
        };
        if &u <= r {
            return Ok(ExtRat::NegInf);
        }
        let slope = self.left_slope_at(inv_p, d).expect("finite envelope");
        if &slope >= d {
            return Ok(ExtRat::PosInf);
        }
        Ok(ExtRat::Finite(r + d * (u - r) / (d - slope)))
    }
}

fn segment_slope(a: &DiagramPoint, b: &DiagramPoint) -> Rational {
    (&b.y - &a.y) / (&b.x - &a.x)
}

/// Value at `x` and slope of the piece ending at or containing `x` from the left.
fn locate(b: &[DiagramPoint], x: &Rational) -> (Rational, Rational) {
    let last = &b[b.len() - 1];
    if x > &last.x {
        return (last.y.clone(), Rational::zero());
    }
    // First breakpoint with abscissa >= x; index 0 only when x = 0.
    let k = b.partition_point(|p| &p.x < x);
    if k == 0 {
        let slope = if b.len() >= 2 { segment_slope(&b[0], &b[1]) } else { Rational::zero() };
        return (b[0].y.clone(), slope);
    }
    let slope = segment_slope(&b[k - 1], &b[k]);
    let value = &b[k - 1].y + &slope * (x - &b[k - 1].x);
    (value, slope)
}

impl Serialize for Envelope {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Envelope", 3)?;
        st.serialize_field("breakpoints", self.breakpoints())?;
        st.serialize_field("left_slope", &self.left_slope().map(ExtRat::from))?;
        st.serialize_field("right_value", &self.right_value())?;
        st.end()
    }
}

/// `U` of the single embedding shadow of `pt`.
pub fn shadow(pt: &DiagramPoint, ctx: &DomainContext) -> Envelope {
    let ray = RegularityAssertion {
        inv_pz: pt.x.clone(),
        z: ExtRat::from(&pt.y),
    };
    Envelope::from_assertions([&ray], &ctx.d())
}

/// A set of assertions together with its closure once computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityRegion {
    generators: Vec<RegularityAssertion>,
    closure: Option<(u32, Envelope)>,
}

impl RegularityRegion {
    pub fn new(generators: Vec<RegularityAssertion>) -> Self {
        RegularityRegion {
            generators,
            closure: None,
        }
    }

    pub fn generators(&self) -> &[RegularityAssertion] {
        &self.generators
    }

    pub fn is_closed(&self) -> bool {
        self.closure.is_some()
    }

    /// Dimension the closure was computed for.
    pub fn dimension(&self) -> Option<u32> {
        self.closure.as_ref().map(|(d, _)| *d)
    }

    pub fn envelope(&self) -> Result<&Envelope, EnvelopeError> {
        self.closure.as_ref().map(|(_, e)| e).ok_or(EnvelopeError::NotClosed)
    }

    pub fn with_generator(&self, g: RegularityAssertion) -> Self {
        let mut generators = self.generators.clone();
        generators.push(g);
        RegularityRegion::new(generators)
    }
}

/// Close under embedding shadows and interpolation chords. Breakpoints of an
/// existing closure are fed back in as rays, so closing twice is a no-op.
pub fn close(region: &RegularityRegion, ctx: &DomainContext) -> RegularityRegion {
    let d = ctx.d();
    let carried: Vec<RegularityAssertion> = match &region.closure {
        Some((dim, env)) if *dim == ctx.dimension() => env
            .breakpoints()
            .iter()
            .map(|p| RegularityAssertion {
                inv_pz: p.x.clone(),
                z: ExtRat::from(&p.y),
            })
            .collect(),
        _ => Vec::new(),
    };
    let envelope = Envelope::from_assertions(region.generators.iter().chain(carried.iter()), &d);
    RegularityRegion {
        generators: region.generators.clone(),
        closure: Some((ctx.dimension(), envelope)),
    }
}

pub fn limit_s(region: &RegularityRegion, inv_p: &Rational) -> Result<ExtRat, EnvelopeError> {
    region.envelope()?.limit_s(inv_p)
}

pub fn limit_alpha(
    region: &RegularityRegion,
    inv_p: &Rational,
    ctx: &DomainContext,
) -> Result<ExtRat, EnvelopeError> {
    region.envelope()?.limit_alpha(inv_p, &ctx.d())
}

// ---------------------------------------------------------------------------
// Brute-force floating point oracle.

/// Sampled lower bounds for `U` on a grid of abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleEnvelope {
    pub xs: Vec<f64>,
    pub lower: Vec<f64>,
}

impl OracleEnvelope {
    /// Lower bound at `x`: flat shadow of the nearest sample at or left of `x`.
    pub fn value_at(&self, x: f64) -> f64 {
        let k = self.xs.partition_point(|&g| g <= x + 1e-12);
        if k == 0 {
            f64::NEG_INFINITY
        } else {
            self.lower[k - 1]
        }
    }
}

/// Approximate the closure by sampling shadows on a grid and interpolating
/// every pair of sampled members, until nothing changes. Interpolation uses a
/// uniform `theta` grid of `grid_n` steps together with the `theta` values
/// that land exactly on sample abscissae. `extra` adds sample abscissae.
pub fn oracle_close(
    generators: &[RegularityAssertion],
    d: f64,
    grid_n: usize,
    extra: &[f64],
) -> OracleEnvelope {
    assert!(grid_n >= 2, "grid_n must be at least 2");
    let rays: Vec<(f64, f64)> = generators
        .iter()
        .filter(|g| g.z != ExtRat::NegInf)
        .map(|g| (ExtRat::from(&g.inv_pz).to_f64(), g.z.to_f64()))
        .collect();
    let x_hi = rays.iter().map(|r| r.0).fold(0.0, f64::max);
    let z_hi = rays
        .iter()
        .map(|r| r.1)
        .filter(|z| z.is_finite())
        .fold(0.0, f64::max);
    let x_max = x_hi + z_hi.max(0.0) / d + 1.0;
    let mut xs: Vec<f64> = (0..=grid_n).map(|k| x_max * k as f64 / grid_n as f64).collect();
    xs.extend(rays.iter().map(|r| r.0));
    xs.extend(extra.iter().copied().filter(|x| *x >= 0.0));
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let n = xs.len();
    let mut lower = vec![f64::NEG_INFINITY; n];
    let raise = |lower: &mut [f64], x: f64, y: f64| {
        for (k, g) in xs.iter().enumerate() {
            let v = if *g + 1e-12 >= x { y } else { y - d * (x - g) };
            if v > lower[k] {
                lower[k] = v;
            }
        }
    };
    for &(x, z) in &rays {
        raise(&mut lower, x, z);
    }
    if lower.iter().any(|v| v.is_infinite() && v.is_sign_positive()) {
        return OracleEnvelope {
            xs,
            lower: vec![f64::INFINITY; n],
        };
    }

    let thetas: Vec<f64> = (1..grid_n).map(|k| k as f64 / grid_n as f64).collect();
    loop {
        let before = lower.clone();
        for a in 0..n {
            for b in (a + 1)..n {
                let (xa, ya, xb, yb) = (xs[a], before[a], xs[b], before[b]);
                if !ya.is_finite() || !yb.is_finite() {
                    continue;
                }
                let landing = xs[a + 1..b].iter().map(|g| (g - xa) / (xb - xa));
                for t in thetas.iter().copied().chain(landing) {
                    raise(&mut lower, xa + t * (xb - xa), ya + t * (yb - ya));
                }
            }
        }
        let moved = lower
            .iter()
            .zip(&before)
            .any(|(new, old)| new - old > 1e-12);
        if !moved {
            break;
        }
    }
    OracleEnvelope { xs, lower }
}

/// Brute-force `alpha` bar: scan `alpha` in steps of `step` and keep the
/// largest value whose adaptivity point cannot raise the sampled `U(1/p)`
/// through a chord with any sampled member to its left. Returns `+inf` if
/// nothing up to `cap` raises it and `-inf` if `U(1/p) <= 0`.
pub fn oracle_limit_alpha(oracle: &OracleEnvelope, inv_p: f64, d: f64, step: f64, cap: f64) -> f64 {
    let u = oracle.value_at(inv_p);
    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u == f64::INFINITY {
        return f64::INFINITY;
    }
    let left: Vec<(f64, f64)> = oracle
        .xs
        .iter()
        .zip(&oracle.lower)
        .filter(|(x, y)| **x < inv_p - 1e-12 && y.is_finite())
        .map(|(x, y)| (*x, *y))
        .collect();
    let tol = 1e-9 * (1.0 + u.abs());
    let mut best = 0.0;
    let mut alpha = step;
    while alpha <= cap {
        let qx = alpha / d + inv_p;
        let raises = left.iter().any(|&(x, y)| {
            let t = (inv_p - x) / (qx - x);
            y + t * (alpha - y) > u + tol
        });
        if raises {
            return best;
        }
        best = alpha;
        alpha += step;
    }
    f64::INFINITY
}
