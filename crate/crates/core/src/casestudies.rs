//! Worked examples: the Poisson problem on C^1 domains, the p-Poisson
//! problem, and the stationary Stokes system on Lipschitz domains.
//!
//! Each driver recomputes its closed-form answer through the generic
//! machinery (rules, envelope, bounds) and fails loudly on disagreement.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{
    alpha_upper_bound, best_bound_over_family, Affine, BoundError, BoundFamily, BoundInput, BoundResult, Outcome,
};
use crate::envelope::{close, RegularityAssertion, RegularityRegion};
use crate::exactnum::{ExtRat, Interval, Rational};
use crate::rules::{embed_check, EmbedVerdict};
use crate::spaces::{resolve_alias, AliasedSpace, DomainContext, SpaceDescriptor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaseError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("hypothesis s̄ = {value} is below the floor {floor}")]
    HypothesisBelowFloor { value: String, floor: String },
    #[error("a value for s̄ is required for this report")]
    MissingHypothesis,
    #[error("embedding chain for datum {datum} breaks at link {link}: {from} -> {to}")]
    ChainBroken {
        datum: &'static str,
        link: usize,
        from: String,
        to: String,
    },
    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),
    #[error(transparent)]
    Bound(#[from] BoundError),
}

fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

fn three_halves() -> Rational {
    Rational::new(3.into(), 2.into())
}

fn show(x: &Rational) -> String {
    ExtRat::from(x).to_string()
}

fn ser_rational<S: serde::Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    ExtRat::from(x).serialize(s)
}

fn ser_opt_rational<S: serde::Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    x.as_ref().map(ExtRat::from).serialize(s)
}

fn require_dimension(d: u32) -> Result<(), CaseError> {
    if d < 2 {
        return Err(CaseError::InvalidParameters(format!("need d >= 2, got {d}")));
    }
    Ok(())
}

fn cross_check(what: &str, a: &ExtRat, b: &ExtRat) -> Result<(), CaseError> {
    if a != b {
        return Err(CaseError::CrossCheck(format!("{what}: {a} != {b}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Poisson

/// `-Δu = f` with zero trace on a bounded C^1 domain in the worst case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoissonCase {
    pub d: u32,
    pub inv_p: Rational,
}

impl PoissonCase {
    pub fn new(d: u32, inv_p: Rational) -> Result<Self, CaseError> {
        require_dimension(d)?;
        if !inv_p.is_positive() || inv_p >= Rational::one() {
            return Err(CaseError::InvalidParameters("need 1 < p < inf".into()));
        }
        Ok(PoissonCase { d, inv_p })
    }

    /// Right end `(d+1)/(d-1)` of the strip on which `U(x) = 1 + x`.
    pub fn right_edge(&self) -> Rational {
        r(self.d as i64 + 1) / r(self.d as i64 - 1)
    }
}

/// Closed region of the assertions `S ⊆ B^r_{q,q}` for all `0 < r < 1 + 1/q`
/// and `0 < 1/q < (d+1)/(d-1)`. Its envelope is spanned by the two extreme
/// rays of the family.
pub fn poisson_region(c: &PoissonCase) -> RegularityRegion {
    let edge = c.right_edge();
    let rays = vec![
        RegularityAssertion {
            inv_pz: Rational::zero(),
            z: ExtRat::one(),
        },
        RegularityAssertion {
            inv_pz: edge.clone(),
            z: ExtRat::from(edge + Rational::one()),
        },
    ];
    let ctx = DomainContext::new(c.d).expect("d >= 2");
    close(&RegularityRegion::new(rays), &ctx)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoissonReport {
    pub d: u32,
    #[serde(serialize_with = "ser_rational")]
    pub inv_p: Rational,
    pub s_bar: ExtRat,
    pub alpha_bar: ExtRat,
    pub bound: BoundResult,
    pub formula: &'static str,
}

impl fmt::Display for PoissonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s̄_p = {}, ᾱ_p = {}", self.s_bar, self.alpha_bar)
    }
}

/// `s̄_p = 1 + 1/p` and `ᾱ_p = (1 + 1/p) d/(d-1)`, recomputed from the
/// region and from the upper bound with `1/p_z = 1/(2p)`, `z = 1 + 1/p_z`.
pub fn poisson_indices(c: &PoissonCase) -> Result<PoissonReport, CaseError> {
    let d = r(c.d.into());
    let s_bar = Rational::one() + &c.inv_p;
    let alpha_bar = &s_bar * &d / (&d - Rational::one());

    let region = poisson_region(c);
    let env = region.envelope().expect("closed");
    let env_s = env.limit_s(&c.inv_p).expect("non-negative abscissa");
    let env_alpha = env.limit_alpha(&c.inv_p, &d).expect("non-negative abscissa");
    cross_check("s̄_p from the region", &env_s, &ExtRat::from(&s_bar))?;
    cross_check("ᾱ_p from the region", &env_alpha, &ExtRat::from(&alpha_bar))?;

    let inv_pz = &c.inv_p / r(2);
    let bound = alpha_upper_bound(&BoundInput::new(
        c.d,
        c.inv_p.clone(),
        s_bar.clone(),
        inv_pz.clone(),
        Rational::one() + inv_pz,
    ))?;
    cross_check("ᾱ_p from the upper bound", &bound.as_ext(), &ExtRat::from(&alpha_bar))?;

    Ok(PoissonReport {
        d: c.d,
        inv_p: c.inv_p.clone(),
        s_bar: s_bar.into(),
        alpha_bar: alpha_bar.into(),
        bound,
        formula: "s_bar = 1 + 1/p; alpha_bar = (1 + 1/p) d/(d-1)",
    })
}

// ---------------------------------------------------------------------------
// p-Poisson

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PPoissonCase {
    pub d: u32,
    pub inv_p: Rational,
    pub s_bar: Option<Rational>,
}

impl PPoissonCase {
    pub fn new(d: u32, inv_p: Rational, s_bar: Option<Rational>) -> Result<Self, CaseError> {
        require_dimension(d)?;
        if inv_p <= half() || inv_p >= Rational::one() {
            return Err(CaseError::InvalidParameters("need 1 < p < 2".into()));
        }
        Ok(PPoissonCase { d, inv_p, s_bar })
    }
}

/// `p_z = p / (1 - (2 - p)/(2d))` for `1 < p <= 2`; strictly above `p`
/// unless `p = 2`.
pub fn ppoisson_pz(d: u32, p: &Rational) -> Result<Rational, CaseError> {
    require_dimension(d)?;
    if p <= &Rational::one() || p > &r(2) {
        return Err(CaseError::InvalidParameters("need 1 < p <= 2".into()));
    }
    let pz = p / (Rational::one() - (r(2) - p) / (r(2) * r(d.into())));
    if p < &r(2) && &pz <= p {
        return Err(CaseError::CrossCheck("p_z must exceed p".into()));
    }
    Ok(pz)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum PPoissonOutcome {
    /// `3/2 <= s̄_p < 1 + 1/p`: finite upper bound for `ᾱ_p`.
    Case1 { bound: BoundResult },
    /// `1 + 1/p <= s̄_p <= ᾱ_p`: no finite bound from this argument.
    Case2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PPoissonReport {
    pub d: u32,
    #[serde(serialize_with = "ser_rational")]
    pub inv_p: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub p_z: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub s_bar: Rational,
    pub outcome: PPoissonOutcome,
    pub formula: &'static str,
}

impl fmt::Display for PPoissonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            PPoissonOutcome::Case1 { bound } => write!(f, "case 1: ᾱ_p ≤ {}", bound.as_ext()),
            PPoissonOutcome::Case2 => write!(
                f,
                "case 2: {} ≤ s̄_p ≤ ᾱ_p",
                show(&(Rational::one() + &self.inv_p))
            ),
        }
    }
}

/// Case split for a hypothesised `s̄_p >= 3/2`. The finite bound uses
/// `z = 3/2` at the improved integrability `p_z` and is checked against
/// `s̄ (1 + 1/p - 3/2) / (1 + 1/p - s̄)`.
pub fn ppoisson_case_split(c: &PPoissonCase) -> Result<PPoissonReport, CaseError> {
    let s_bar = c.s_bar.clone().ok_or(CaseError::MissingHypothesis)?;
    if s_bar < three_halves() {
        return Err(CaseError::HypothesisBelowFloor {
            value: show(&s_bar),
            floor: "3/2".into(),
        });
    }
    let p = Rational::one() / &c.inv_p;
    let p_z = ppoisson_pz(c.d, &p)?;
    let top = Rational::one() + &c.inv_p;
    let outcome = if s_bar < top {
        let bound = alpha_upper_bound(&BoundInput::new(
            c.d,
            c.inv_p.clone(),
            s_bar.clone(),
            Rational::one() / &p_z,
            three_halves(),
        ))?;
        let closed = &s_bar * (&top - three_halves()) / (&top - &s_bar);
        cross_check("case 1 bound", &bound.as_ext(), &ExtRat::from(closed))?;
        PPoissonOutcome::Case1 { bound }
    } else {
        PPoissonOutcome::Case2
    };
    Ok(PPoissonReport {
        d: c.d,
        inv_p: c.inv_p.clone(),
        p_z,
        s_bar,
        outcome,
        formula: "alpha_bar <= s_bar (1 + 1/p - 3/2) / (1 + 1/p - s_bar)",
    })
}

/// Smoothness reached by interpolating `B^alpha_{tau,tau}` with the `3/2`
/// regularity at `p_z`: `(1 + 1/p) alpha / (alpha + 1/p - 1/2)`. At
/// `alpha = +inf` the supremum `1 + 1/p` is returned.
pub fn ppoisson_shat(inv_p: &Rational, alpha: &ExtRat) -> Result<ExtRat, CaseError> {
    if inv_p <= &half() || inv_p >= &Rational::one() {
        return Err(CaseError::InvalidParameters("need 1 < p < 2".into()));
    }
    if alpha < &ExtRat::from(three_halves()) {
        return Err(CaseError::InvalidParameters("need alpha >= 3/2".into()));
    }
    let top = Rational::one() + inv_p;
    Ok(match alpha {
        ExtRat::Finite(a) => ExtRat::from(&top * a / (a + inv_p - half())),
        _ => ExtRat::from(top),
    })
}

// ---------------------------------------------------------------------------
// Stokes

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StokesComponent {
    Velocity,
    Pressure,
}

impl StokesComponent {
    /// Guaranteed smoothness at `p = 2`.
    pub fn floor(self) -> Rational {
        match self {
            StokesComponent::Velocity => three_halves(),
            StokesComponent::Pressure => half(),
        }
    }

    /// `z` in terms of `1/p_z`.
    fn z_offset(self) -> Rational {
        match self {
            StokesComponent::Velocity => Rational::one(),
            StokesComponent::Pressure => Rational::zero(),
        }
    }
}

impl std::str::FromStr for StokesComponent {
    type Err = CaseError;

    fn from_str(s: &str) -> Result<Self, CaseError> {
        match s {
            "velocity" | "u" => Ok(StokesComponent::Velocity),
            "pressure" | "pi" => Ok(StokesComponent::Pressure),
            other => Err(CaseError::InvalidParameters(format!(
                "unknown component {other:?}; expected velocity or pressure"
            ))),
        }
    }
}

/// Data `f ∈ H^{s-3/2+σ}`, `g ∈ H^{s-1/2+σ}`, `h ∈ H^{s+σ}(∂Ω)` with
/// `σ = min σ_j`, on a domain with roughness `epsilon`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StokesCase {
    pub ctx: DomainContext,
    pub sigma: Rational,
    pub s_bar2: Option<Rational>,
}

impl StokesCase {
    /// `sigma >= 0` is accepted; the bound itself needs `sigma > 0`.
    pub fn new(d: u32, epsilon: Rational, sigma: Rational, s_bar2: Option<Rational>) -> Result<Self, CaseError> {
        require_dimension(d)?;
        let ctx = DomainContext::with_epsilon(d, epsilon)
            .map_err(|e| CaseError::InvalidParameters(e.to_string()))?;
        if sigma.is_negative() {
            return Err(CaseError::InvalidParameters("need sigma >= 0".into()));
        }
        Ok(StokesCase { ctx, sigma, s_bar2 })
    }

    fn d(&self) -> Rational {
        self.ctx.d()
    }

    /// `m = min((d-1) epsilon/2, sigma)`.
    pub fn m(&self) -> Rational {
        let geometric = (self.d() - Rational::one()) * self.ctx.epsilon() / r(2);
        geometric.min(self.sigma.clone())
    }
}

/// Closed interval `[1/2 - min(epsilon/2, sigma/(d-1)), 1/2]` of `1/p` for
/// which the solutions lie in `H^{s+1/p}_p`.
pub fn stokes_admissible_inv_p(c: &StokesCase) -> Interval {
    let gain = (c.ctx.epsilon() / r(2)).min(&c.sigma / (c.d() - Rational::one()));
    Interval::closed(ExtRat::from(half() - gain), ExtRat::from(half()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub datum: &'static str,
    pub spaces: Vec<SpaceDescriptor>,
    pub verdicts: Vec<EmbedVerdict>,
}

/// Replays the embedding chains moving the data into the spaces required by
/// the solution theory at integrability `p`, for smoothness `0 < s < 1`.
pub fn stokes_data_chain_check(
    c: &StokesCase,
    inv_p: &Rational,
    s: &Rational,
) -> Result<Vec<ChainReport>, CaseError> {
    if !s.is_positive() || s >= &Rational::one() {
        return Err(CaseError::InvalidParameters("need 0 < s < 1".into()));
    }
    if !inv_p.is_positive() || inv_p > &half() {
        return Err(CaseError::InvalidParameters("need 2 <= p < inf".into()));
    }
    let d = c.d();
    let sigma = &c.sigma;
    let to_two = inv_p - half();
    let triebel = |s: Rational, q: Rational| {
        SpaceDescriptor::triebel(s, inv_p.clone(), q).expect("p < inf")
    };
    let hs = |s: Rational| resolve_alias(&AliasedSpace::Hs { s }).expect("H^s is always valid");

    // f: H^{s-3/2+σ} -> F^{s-3/2+σ}_{2,2} -> F^{s1}_{p,2} -> F^{s+1/p-2}_{p,2}
    let f_top = s - three_halves() + sigma;
    let s1 = &f_top + &d * &to_two;
    let f = vec![
        hs(f_top.clone()),
        SpaceDescriptor::triebel(f_top, half(), half()).expect("valid"),
        triebel(s1.clone(), half()),
        triebel(s + inv_p - r(2), half()),
    ];
    // g: the same chain one order higher.
    let g_top = s - half() + sigma;
    let g = vec![
        hs(g_top.clone()),
        SpaceDescriptor::triebel(g_top, half(), half()).expect("valid"),
        triebel(s1 + Rational::one(), half()),
        triebel(s + inv_p - Rational::one(), half()),
    ];
    // h on the boundary, dimension d - 1.
    let h_top = s + sigma;
    let h: Vec<SpaceDescriptor> = vec![
        hs(h_top.clone()),
        SpaceDescriptor::triebel(h_top.clone(), half(), half()).expect("valid"),
        triebel(&h_top + (&d - Rational::one()) * &to_two, half()),
        triebel(s.clone(), inv_p.clone()),
    ]
    .into_iter()
    .map(SpaceDescriptor::on_boundary)
    .collect();

    let mut reports = Vec::new();
    for (datum, spaces) in [("f", f), ("g", g), ("h", h)] {
        let mut verdicts = Vec::new();
        for (k, w) in spaces.windows(2).enumerate() {
            let v = embed_check(&w[0], &w[1], &c.ctx);
            if !v.embeds() {
                return Err(CaseError::ChainBroken {
                    datum,
                    link: k + 1,
                    from: w[0].to_string(),
                    to: w[1].to_string(),
                });
            }
            verdicts.push(v);
        }
        reports.push(ChainReport {
            datum,
            spaces,
            verdicts,
        });
    }
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum StokesOutcome {
    /// `floor <= s̄₂ < floor + m`.
    Case1 {
        #[serde(serialize_with = "ser_rational")]
        bound: Rational,
        /// Infimum over the family of auxiliary assertions, as computed.
        family: BoundResult,
    },
    /// `floor + m <= s̄₂ <= ᾱ₂`.
    Case2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StokesReport {
    pub component: StokesComponent,
    pub d: u32,
    #[serde(serialize_with = "ser_rational")]
    pub m: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub s_bar2: Rational,
    #[serde(serialize_with = "ser_opt_rational")]
    pub delta_bar: Option<Rational>,
    pub outcome: StokesOutcome,
    pub formula: &'static str,
}

impl fmt::Display for StokesReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            StokesOutcome::Case1 { bound, .. } => write!(f, "case 1: ᾱ₂ ≤ {}", show(bound)),
            StokesOutcome::Case2 => write!(
                f,
                "case 2: {} ≤ s̄₂ ≤ ᾱ₂",
                show(&(self.component.floor() + &self.m))
            ),
        }
    }
}

/// Upper bound for `ᾱ₂` given a hypothesised `s̄₂`. The closed form
/// `s̄₂ d/(d-1) m/(floor + m - s̄₂)` is compared with the infimum of the
/// generic bound over the auxiliary assertions at `p_z` with
/// `(d-1)(1/2 - 1/p_z) = m - δ`, `0 < δ < δ̄`.
pub fn stokes_bound(c: &StokesCase, component: StokesComponent) -> Result<StokesReport, CaseError> {
    let s_bar = c.s_bar2.clone().ok_or(CaseError::MissingHypothesis)?;
    let floor = component.floor();
    if s_bar < floor {
        return Err(CaseError::HypothesisBelowFloor {
            value: show(&s_bar),
            floor: show(&floor),
        });
    }
    if !c.sigma.is_positive() {
        return Err(CaseError::InvalidParameters("the bound needs sigma > 0".into()));
    }
    let d = c.d();
    let m = c.m();
    let formula = "alpha_bar_2 <= s_bar_2 d/(d-1) m/(floor + m - s_bar_2), m = min((d-1) eps/2, sigma)";
    if s_bar >= &floor + &m {
        return Ok(StokesReport {
            component,
            d: c.ctx.dimension(),
            m,
            s_bar2: s_bar,
            delta_bar: None,
            outcome: StokesOutcome::Case2,
            formula,
        });
    }
    let d1 = &d - Rational::one();
    let closed = &s_bar * &d / &d1 * &m / (&floor + &m - &s_bar);

    // t = 1/2 - 1/p_z = (m - δ)/(d - 1) for δ in (0, δ̄).
    let delta_bar = Rational::one().min((&floor + &m - &s_bar) / r(2));
    let family = BoundFamily {
        d: c.ctx.dimension(),
        inv_p: half(),
        s_bar: s_bar.clone(),
        inv_pz: Affine::new(half(), -Rational::one()),
        z: Affine::new(half() + component.z_offset(), -Rational::one()),
        interval: Interval::open(
            ExtRat::from((&m - &delta_bar) / &d1),
            ExtRat::from(&m / &d1),
        ),
    };
    let best = best_bound_over_family(&family)?;
    match &best.result.outcome {
        Outcome::Finite(v) if v == &closed => {}
        other => {
            return Err(CaseError::CrossCheck(format!(
                "family infimum {other:?} differs from closed form {}",
                show(&closed)
            )))
        }
    }
    Ok(StokesReport {
        component,
        d: c.ctx.dimension(),
        m,
        s_bar2: s_bar,
        delta_bar: Some(delta_bar),
        outcome: StokesOutcome::Case1 {
            bound: closed,
            family: best.result,
        },
        formula,
    })
}

// ---------------------------------------------------------------------------
// Polygons

/// `s̄_p = 2/p + π/κ₀` for a plane polygon with largest interior angle
/// `κ₀ = λπ`, `1 < λ < 2`.
pub fn polygon_s_bar(inv_p: &Rational, lambda: &Rational) -> Result<Rational, CaseError> {
    if lambda <= &Rational::one() || lambda >= &r(2) {
        return Err(CaseError::InvalidParameters("need pi < kappa_0 < 2 pi".into()));
    }
    if !inv_p.is_positive() || inv_p >= &Rational::one() {
        return Err(CaseError::InvalidParameters("need 1 < p < inf".into()));
    }
    Ok(r(2) * inv_p + Rational::one() / lambda)
}

/// The upper bound fed with polygon data at `p` and `p_z`: `z = s̄_{p_z}`
/// lies exactly on the Sobolev line through `(1/p, s̄_p)`, so no bound
/// results.
pub fn polygon_bound(inv_p: &Rational, inv_pz: &Rational, lambda: &Rational) -> Result<BoundResult, CaseError> {
    let s_bar = polygon_s_bar(inv_p, lambda)?;
    let z = if inv_pz.is_zero() {
        Rational::one() / lambda
    } else {
        polygon_s_bar(inv_pz, lambda)?
    };
    Ok(alpha_upper_bound(&BoundInput::new(2, inv_p.clone(), s_bar, inv_pz.clone(), z))?)
}
