//! Upper bounds for the adaptivity index from an auxiliary regularity
//! assertion, the inverse lower bound, and optimisation over families.
//!
//! Given `s̄_p` at `1/p` and "S ⊆ B^s_{p_z,p_z} for all s < z" with
//! `p < p_z <= inf`, put `mu = s̄_p - d (1/p - 1/p_z)`. If `z > mu` then
//! `ᾱ_p <= s̄_p (s̄_p - mu) / (z - mu)`.

use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactnum::{
    DiagramPoint, ExtRat, Interval, Line, MoebiusError, MoebiusMap, Objective, Rational,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
    #[error("geometry precondition violated: {0}")]
    Geometry(String),
    #[error("invalid family: {0}")]
    Family(String),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
}

/// Hypotheses of the upper bound: `1/p` in `(0, 1)`, `0 <= 1/p_z < 1/p`,
/// `s̄_p > 0` (possibly `+inf`) and the top `z` of the auxiliary ray.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundInput {
    pub d: u32,
    pub inv_p: Rational,
    pub s_bar: ExtRat,
    pub inv_pz: Rational,
    pub z: ExtRat,
}

fn show(r: &Rational) -> String {
    ExtRat::from(r).to_string()
}

fn dim(d: u32) -> Rational {
    Rational::from_integer(d.into())
}

impl BoundInput {
    pub fn new(
        d: u32,
        inv_p: Rational,
        s_bar: impl Into<ExtRat>,
        inv_pz: Rational,
        z: impl Into<ExtRat>,
    ) -> Self {
        BoundInput {
            d,
            inv_p,
            s_bar: s_bar.into(),
            inv_pz,
            z: z.into(),
        }
    }

    /// Range checks; consistency of `z` is checked separately.
    pub fn validate(&self) -> Result<(), BoundError> {
        if self.d == 0 {
            return Err(BoundError::InvalidInput("dimension must be positive".into()));
        }
        if !self.inv_p.is_positive() || self.inv_p >= Rational::one() {
            return Err(BoundError::InvalidInput(format!(
                "need 1 < p < inf, got 1/p = {}",
                show(&self.inv_p)
            )));
        }
        if self.inv_pz.is_negative() || self.inv_pz >= self.inv_p {
            return Err(BoundError::InvalidInput(format!(
                "need p < p_z <= inf, got 1/p_z = {} and 1/p = {}",
                show(&self.inv_pz),
                show(&self.inv_p)
            )));
        }
        if self.s_bar.signum() <= 0 {
            return Err(BoundError::InvalidInput(format!(
                "s̄_p must be positive, got {}",
                self.s_bar
            )));
        }
        Ok(())
    }
}

/// `mu = s̄_p - d (1/p - 1/p_z)`.
pub fn mu(inv_p: &Rational, inv_pz: &Rational, s_bar: &Rational, d: u32) -> Rational {
    s_bar - dim(d) * (inv_p - inv_pz)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Finite(Rational),
    Infinite,
    NoBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Reason {
    #[serde(rename = "zAboveMu")]
    ZAboveMu,
    #[serde(rename = "zBelowOrEqualMu")]
    ZBelowOrEqualMu,
    #[serde(rename = "sBarInfinite")]
    SBarInfinite,
    #[serde(rename = "inputInconsistent")]
    InputInconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundResult {
    pub outcome: Outcome,
    pub mu: Option<Rational>,
    pub reason: Reason,
}

impl BoundResult {
    pub fn value(&self) -> Option<&Rational> {
        match &self.outcome {
            Outcome::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// The bound as an extended number: `+inf` unless finite.
    pub fn as_ext(&self) -> ExtRat {
        match &self.outcome {
            Outcome::Finite(v) => ExtRat::from(v),
            _ => ExtRat::PosInf,
        }
    }
}

impl Serialize for BoundResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("BoundResult", 4)?;
        let outcome = match self.outcome {
            Outcome::Finite(_) => "finite",
            Outcome::Infinite => "infinite",
            Outcome::NoBound => "no_bound",
        };
        st.serialize_field("outcome", outcome)?;
        if let Some(v) = self.value() {
            st.serialize_field("value", &ExtRat::from(v))?;
        }
        if let Some(m) = &self.mu {
            st.serialize_field("mu", &ExtRat::from(m))?;
        }
        st.serialize_field("reason", &self.reason)?;
        st.end()
    }
}

/// Upper bound for `ᾱ_p`.
pub fn alpha_upper_bound(input: &BoundInput) -> Result<BoundResult, BoundError> {
    alpha_upper_bound_shifted(input, &Rational::zero())
}

/// Upper bound on the scale `1/tau = (alpha - r)/d + 1/p` of approximation in
/// `W^r_p`: `r + (s̄_p - r)(s̄_p - mu)/(z - mu)`. Needs `s̄_p > r`.
pub fn alpha_upper_bound_shifted(input: &BoundInput, r: &Rational) -> Result<BoundResult, BoundError> {
    input.validate()?;
    let s_bar = match &input.s_bar {
        ExtRat::Finite(s) => s,
        _ => {
            return Ok(BoundResult {
                outcome: Outcome::Infinite,
                mu: None,
                reason: Reason::SBarInfinite,
            })
        }
    };
    if input.z > input.s_bar {
        return Err(BoundError::InconsistentInput(format!(
            "z = {} exceeds s̄_p = {}, contradicting z ≤ s̄_p ≤ ᾱ_p",
            input.z,
            show(s_bar)
        )));
    }
    if s_bar <= r {
        return Err(BoundError::InvalidInput(format!(
            "s̄_p = {} must exceed the shift r = {}",
            show(s_bar),
            show(r)
        )));
    }
    let m = mu(&input.inv_p, &input.inv_pz, s_bar, input.d);
    let z = match &input.z {
        ExtRat::Finite(z) if z > &m => z,
        _ => {
            return Ok(BoundResult {
                outcome: Outcome::NoBound,
                mu: Some(m),
                reason: Reason::ZBelowOrEqualMu,
            })
        }
    };
    let value = r + (s_bar - r) * (s_bar - &m) / (z - &m);
    Ok(BoundResult {
        outcome: Outcome::Finite(value),
        mu: Some(m),
        reason: Reason::ZAboveMu,
    })
}

/// Lower bound for `s̄_p` from a known `ᾱ_p`:
/// `alpha (z + d Δ) / (alpha + d Δ)` with `Δ = 1/p - 1/p_z`.
pub fn s_lower_bound(
    alpha: &Rational,
    inv_p: &Rational,
    inv_pz: &Rational,
    z: &Rational,
    d: u32,
) -> Result<Rational, BoundError> {
    if !alpha.is_positive() {
        return Err(BoundError::InvalidInput(format!("alpha must be positive, got {}", show(alpha))));
    }
    if inv_pz.is_negative() || inv_pz >= inv_p {
        return Err(BoundError::InvalidInput("need 0 <= 1/p_z < 1/p".into()));
    }
    let shift = dim(d) * (inv_p - inv_pz);
    Ok(alpha * (z + &shift) / (alpha + shift))
}

/// Upper bound for `s̄` at `1/p̂ <= 1/p` from a ray at `1/p_z > 1/p` with
/// `z > s̄_p`: the line through `(1/p_z, z)` and `(1/p, s̄_p)` at `1/p̂`.
pub fn s_transfer_upper_bound(
    s_bar_p: &Rational,
    inv_p: &Rational,
    z: &Rational,
    inv_pz: &Rational,
    inv_phat: &Rational,
) -> Result<Rational, BoundError> {
    if !(inv_pz > inv_p && inv_p >= inv_phat && !inv_phat.is_negative()) {
        return Err(BoundError::Geometry(format!(
            "need 1/p_z > 1/p >= 1/p̂ >= 0, got {}, {}, {}",
            show(inv_pz),
            show(inv_p),
            show(inv_phat)
        )));
    }
    if z <= s_bar_p {
        return Err(BoundError::Geometry(format!(
            "need z > s̄_p, got z = {} and s̄_p = {}",
            show(z),
            show(s_bar_p)
        )));
    }
    let line = Line::through(
        &DiagramPoint {
            x: inv_pz.clone(),
            y: z.clone(),
        },
        &DiagramPoint {
            x: inv_p.clone(),
            y: s_bar_p.clone(),
        },
    )
    .map_err(|e| BoundError::Geometry(e.to_string()))?;
    Ok(line.y_at(inv_phat).expect("line through distinct abscissae"))
}

/// `constant + slope * t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affine {
    pub constant: Rational,
    pub slope: Rational,
}

impl Affine {
    pub fn new(constant: Rational, slope: Rational) -> Self {
        Affine { constant, slope }
    }

    pub fn constant(value: Rational) -> Self {
        Affine::new(value, Rational::zero())
    }

    pub fn at(&self, t: &Rational) -> Rational {
        &self.constant + &self.slope * t
    }
}

/// A one-parameter family of bound inputs with fixed `s̄_p`, where `1/p_z`
/// and `z` depend affinely on `t` in a bounded interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundFamily {
    pub d: u32,
    pub inv_p: Rational,
    pub s_bar: Rational,
    pub inv_pz: Affine,
    pub z: Affine,
    pub interval: Interval,
}

impl BoundFamily {
    pub fn member(&self, t: &Rational) -> BoundInput {
        BoundInput::new(
            self.d,
            self.inv_p.clone(),
            self.s_bar.clone(),
            self.inv_pz.at(t),
            self.z.at(t),
        )
    }

    /// `bound(t)` as `(a t + b) / (c t + e)`; the denominator is `z - mu`.
    fn coefficients(&self) -> [Rational; 4] {
        let d = dim(self.d);
        let s = &self.s_bar;
        let a = -(s * &d * &self.inv_pz.slope);
        let b = s * &d * (&self.inv_p - &self.inv_pz.constant);
        let c = &self.z.slope - &d * &self.inv_pz.slope;
        let e = &self.z.constant - s + &d * (&self.inv_p - &self.inv_pz.constant);
        [a, b, c, e]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyBound {
    pub result: BoundResult,
    pub argument: ExtRat,
    pub attained: bool,
}

/// `g > 0` on the interval given its values at the ends; an open end only
/// needs `g >= 0` there.
fn positive_on(lo: &Rational, hi: &Rational, lo_open: bool, hi_open: bool) -> bool {
    let ok = |v: &Rational, open: bool| v.is_positive() || (open && v.is_zero());
    ok(lo, lo_open) && ok(hi, hi_open) && (lo.is_positive() || hi.is_positive())
}

fn nonnegative_on(lo: &Rational, hi: &Rational) -> bool {
    !lo.is_negative() && !hi.is_negative()
}

/// Infimum of the upper bound over a family, by monotonicity of the Möbius
/// map `t -> bound(t)`. Open ends contribute limit values.
pub fn best_bound_over_family(family: &BoundFamily) -> Result<FamilyBound, BoundError> {
    let iv = &family.interval;
    iv.validate()?;
    let (lo, hi) = match (&iv.lo, &iv.hi) {
        (ExtRat::Finite(lo), ExtRat::Finite(hi)) => (lo, hi),
        _ => return Err(BoundError::Family("the parameter interval must be bounded".into())),
    };
    if family.s_bar <= Rational::zero() {
        return Err(BoundError::Family("s̄_p must be positive".into()));
    }
    if !family.inv_p.is_positive() || family.inv_p >= Rational::one() {
        return Err(BoundError::Family("need 1 < p < inf".into()));
    }
    let inv_pz = (family.inv_pz.at(lo), family.inv_pz.at(hi));
    if !nonnegative_on(&inv_pz.0, &inv_pz.1) {
        return Err(BoundError::Family("1/p_z leaves [0, inf) on the interval".into()));
    }
    let gap = (&family.inv_p - &inv_pz.0, &family.inv_p - &inv_pz.1);
    if !positive_on(&gap.0, &gap.1, iv.lo_open, iv.hi_open) {
        return Err(BoundError::Family("need p < p_z throughout the interval".into()));
    }
    let slack = (&family.s_bar - family.z.at(lo), &family.s_bar - family.z.at(hi));
    if !nonnegative_on(&slack.0, &slack.1) {
        return Err(BoundError::InconsistentInput(
            "z exceeds s̄_p somewhere in the family, contradicting z ≤ s̄_p ≤ ᾱ_p".into(),
        ));
    }
    let [a, b, c, e] = family.coefficients();
    let den = (&c * lo + &e, &c * hi + &e);
    if !positive_on(&den.0, &den.1, iv.lo_open, iv.hi_open) {
        return Err(BoundError::Family(
            "z <= mu for some member; the family must stay above the Sobolev line".into(),
        ));
    }
    let (value, argument, attained) = match MoebiusMap::new(a.clone(), b.clone(), c.clone(), e.clone()) {
        Ok(map) => {
            let ext = map.extremum_on(iv, Objective::Min)?;
            (ext.value, ext.argument, ext.attained)
        }
        Err(MoebiusError::Degenerate) => {
            let mid = (lo + hi) / Rational::from_integer(2.into());
            let v = (&a * &mid + &b) / (&c * &mid + &e);
            (ExtRat::from(v), ExtRat::from(mid), true)
        }
        Err(other) => return Err(other.into()),
    };
    let mu_at = |t: &ExtRat| -> Option<Rational> {
        t.as_finite()
            .map(|t| mu(&family.inv_p, &family.inv_pz.at(t), &family.s_bar, family.d))
    };
    let outcome = match value {
        ExtRat::Finite(v) => Outcome::Finite(v),
        _ => Outcome::Infinite,
    };
    Ok(FamilyBound {
        result: BoundResult {
            outcome,
            mu: mu_at(&argument),
            reason: Reason::ZAboveMu,
        },
        argument,
        attained,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn input(d: u32, inv_p: Rational, s_bar: Rational, inv_pz: Rational, z: Rational) -> BoundInput {
        BoundInput::new(d, inv_p, s_bar, inv_pz, z)
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu(&rat(1, 2), &rat(1, 4), &rat(3, 2), 2), rat(1, 1));
        assert_eq!(mu(&rat(1, 2), &rat(0, 1), &rat(3, 2), 2), rat(1, 2));
        assert_eq!(mu(&rat(2, 3), &rat(11, 18), &rat(3, 2), 3), rat(4, 3));
    }

    #[test]
    fn alpha_bound_examples() {
        let r = alpha_upper_bound(&input(2, rat(1, 2), rat(3, 2), rat(1, 4), rat(5, 4))).unwrap();
        assert_eq!(r.outcome, Outcome::Finite(rat(3, 1)));
        assert_eq!(r.mu, Some(rat(1, 1)));
        assert_eq!(r.reason, Reason::ZAboveMu);

        let r = alpha_upper_bound(&input(2, rat(1, 2), rat(2, 1), rat(1, 4), rat(5, 4))).unwrap();
        assert_eq!(r.outcome, Outcome::NoBound);
        assert_eq!(r.mu, Some(rat(3, 2)));
        assert_eq!(r.reason, Reason::ZBelowOrEqualMu);

        let inf = BoundInput::new(2, rat(1, 2), ExtRat::PosInf, rat(1, 4), ExtRat::int(7));
        let r = alpha_upper_bound(&inf).unwrap();
        assert_eq!((r.outcome, r.reason), (Outcome::Infinite, Reason::SBarInfinite));

        let r = alpha_upper_bound(&input(3, rat(2, 3), rat(3, 2), rat(11, 18), rat(3, 2))).unwrap();
        assert_eq!(r.outcome, Outcome::Finite(rat(3, 2)));
    }

    #[test]
    fn z_equal_mu_has_no_bound() {
        let r = alpha_upper_bound(&input(2, rat(1, 2), rat(3, 2), rat(1, 4), rat(1, 1))).unwrap();
        assert_eq!(r.outcome, Outcome::NoBound);
        let r = alpha_upper_bound(&BoundInput::new(2, rat(1, 2), rat(3, 2), rat(1, 4), ExtRat::NegInf)).unwrap();
        assert_eq!(r.outcome, Outcome::NoBound);
    }

    #[test]
    fn inconsistent_and_invalid_inputs() {
        let err = alpha_upper_bound(&input(2, rat(1, 2), rat(3, 2), rat(1, 4), rat(2, 1))).unwrap_err();
        assert!(matches!(&err, BoundError::InconsistentInput(m) if m.contains("z ≤ s̄_p ≤ ᾱ_p")));
        for bad in [
            input(2, rat(1, 1), rat(3, 2), rat(1, 4), rat(1, 1)),
            input(2, rat(1, 2), rat(3, 2), rat(1, 2), rat(1, 1)),
            input(2, rat(1, 2), rat(3, 2), rat(-1, 4), rat(1, 1)),
            input(2, rat(1, 2), rat(0, 1), rat(1, 4), rat(-1, 1)),
        ] {
            assert!(matches!(alpha_upper_bound(&bad), Err(BoundError::InvalidInput(_))), "{bad:?}");
        }
    }

    #[test]
    fn shifted_bound() {
        let base = input(2, rat(1, 2), rat(3, 2), rat(1, 4), rat(5, 4));
        assert_eq!(
            alpha_upper_bound_shifted(&base, &rat(0, 1)).unwrap(),
            alpha_upper_bound(&base).unwrap()
        );
        // r + (3/2 - r) * 2 with (s̄ - mu)/(z - mu) = 2.
        let r = alpha_upper_bound_shifted(&base, &rat(1, 2)).unwrap();
        assert_eq!(r.value(), Some(&rat(5, 2)));
        assert!(alpha_upper_bound_shifted(&base, &rat(3, 2)).is_err());
    }

    #[test]
    fn s_lower_examples() {
        // d (1/p - 1/p_z) = 1/6 for p = 3/2, d = 2.
        let inv_pz = rat(2, 3) - rat(1, 12);
        assert_eq!(s_lower_bound(&rat(2, 1), &rat(2, 3), &inv_pz, &rat(3, 2), 2).unwrap(), rat(20, 13));
        assert_eq!(s_lower_bound(&rat(7, 5), &rat(1, 2), &rat(1, 5), &rat(7, 5), 4).unwrap(), rat(7, 5));
        assert_eq!(s_lower_bound(&rat(3, 1), &rat(1, 2), &rat(1, 4), &rat(5, 4), 2).unwrap(), rat(3, 2));
        assert!(s_lower_bound(&rat(0, 1), &rat(1, 2), &rat(1, 4), &rat(5, 4), 2).is_err());
    }

    #[test]
    fn s_transfer_examples() {
        let f = |hat: Rational| s_transfer_upper_bound(&rat(3, 2), &rat(1, 2), &rat(2, 1), &rat(1, 1), &hat);
        assert_eq!(f(rat(1, 4)).unwrap(), rat(5, 4));
        assert_eq!(f(rat(1, 2)).unwrap(), rat(3, 2));
        assert_eq!(f(rat(0, 1)).unwrap(), rat(1, 1));
        assert!(matches!(f(rat(3, 4)), Err(BoundError::Geometry(_))));
        assert!(s_transfer_upper_bound(&rat(3, 2), &rat(1, 2), &rat(1, 1), &rat(1, 1), &rat(0, 1)).is_err());
    }

    fn stokes_family(lo: Rational, lo_open: bool) -> BoundFamily {
        // t = 1/2 - 1/p_z, z = 1 + 1/p_z = 3/2 - t.
        BoundFamily {
            d: 3,
            inv_p: rat(1, 2),
            s_bar: rat(8, 5),
            inv_pz: Affine::new(rat(1, 2), rat(-1, 1)),
            z: Affine::new(rat(3, 2), rat(-1, 1)),
            interval: Interval::with_ends(ExtRat::from(lo), lo_open, ExtRat::ratio(1, 4), true),
        }
    }

    #[test]
    fn stokes_family_infimum() {
        let fb = best_bound_over_family(&stokes_family(rat(3, 20), true)).unwrap();
        assert_eq!(fb.result.outcome, Outcome::Finite(rat(3, 1)));
        assert_eq!(fb.argument, ExtRat::ratio(1, 4));
        assert!(!fb.attained);
        // Near t = 0 the members fall below the Sobolev line: no valid family.
        assert!(matches!(
            best_bound_over_family(&stokes_family(rat(0, 1), true)),
            Err(BoundError::Family(_))
        ));
    }

    #[test]
    fn constant_family() {
        let fam = BoundFamily {
            d: 2,
            inv_p: rat(1, 2),
            s_bar: rat(3, 2),
            inv_pz: Affine::constant(rat(1, 4)),
            z: Affine::constant(rat(5, 4)),
            interval: Interval::closed(ExtRat::zero(), ExtRat::one()),
        };
        let fb = best_bound_over_family(&fam).unwrap();
        assert_eq!(fb.result.outcome, Outcome::Finite(rat(3, 1)));
        assert!(fb.attained);
    }

    #[test]
    fn poisson_family_is_constant() {
        for d in 2..7u32 {
            for inv_p in [rat(1, 2), rat(1, 3), rat(2, 3)] {
                let fam = BoundFamily {
                    d,
                    inv_p: inv_p.clone(),
                    s_bar: rat(1, 1) + &inv_p,
                    inv_pz: Affine::new(rat(0, 1), rat(1, 1)),
                    z: Affine::new(rat(1, 1), rat(1, 1)),
                    interval: Interval::open(ExtRat::zero(), ExtRat::from(&inv_p)),
                };
                let expected = (rat(1, 1) + &inv_p) * dim(d) / dim(d - 1);
                let fb = best_bound_over_family(&fam).unwrap();
                assert_eq!(fb.result.outcome, Outcome::Finite(expected.clone()));
                for t in [rat(1, 7), &inv_p / rat(2, 1)] {
                    assert_eq!(alpha_upper_bound(&fam.member(&t)).unwrap().value(), Some(&expected));
                }
            }
        }
    }

    #[test]
    fn json_shape() {
        let r = alpha_upper_bound(&input(2, rat(1, 2), rat(3, 2), rat(1, 4), rat(5, 4))).unwrap();
        assert_eq!(
            serde_json::to_value(&r).unwrap(),
            serde_json::json!({"outcome": "finite", "value": "3", "mu": "1", "reason": "zAboveMu"})
        );
        let r = alpha_upper_bound(&BoundInput::new(2, rat(1, 2), ExtRat::PosInf, rat(1, 4), ExtRat::int(1))).unwrap();
        assert_eq!(
            serde_json::to_value(&r).unwrap(),
            serde_json::json!({"outcome": "infinite", "reason": "sBarInfinite"})
        );
    }
}
