//! Linear-fractional maps `t -> (a t + b) / (c t + d)` and their extrema on
//! intervals.
//!
//! A non-degenerate map is strictly monotone on every interval that avoids its
//! pole, with direction given by the sign of `ad - bc`, so interval extrema
//! sit at the endpoints.

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use super::extrat::{ExtRat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoebiusError {
    #[error("degenerate map: ad - bc = 0")]
    Degenerate,
    #[error("pole at t = {0} inside the interval")]
    PoleInInterval(String),
    #[error("empty interval: need lo < hi")]
    EmptyInterval,
    #[error("infinite interval endpoints must be open")]
    ClosedInfiniteEndpoint,
    #[error("evaluation at the pole t = {0}")]
    Pole(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoebiusMap {
    a: Rational,
    b: Rational,
    c: Rational,
    d: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Min,
    Max,
}

/// Interval with independently open or closed ends. Infinite ends must be
/// open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: ExtRat,
    pub hi: ExtRat,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn open(lo: ExtRat, hi: ExtRat) -> Self {
        Interval {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn closed(lo: ExtRat, hi: ExtRat) -> Self {
        Interval {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn with_ends(lo: ExtRat, lo_open: bool, hi: ExtRat, hi_open: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_open,
            hi_open,
        }
    }

    pub fn contains(&self, t: &ExtRat) -> bool {
        let above = if self.lo_open { t > &self.lo } else { t >= &self.lo };
        let below = if self.hi_open { t < &self.hi } else { t <= &self.hi };
        above && below
    }

    pub fn validate(&self) -> Result<(), MoebiusError> {
        if self.lo >= self.hi {
            return Err(MoebiusError::EmptyInterval);
        }
        if (self.lo.is_infinite() && !self.lo_open) || (self.hi.is_infinite() && !self.hi_open) {
            return Err(MoebiusError::ClosedInfiniteEndpoint);
        }
        Ok(())
    }
}

/// Extremal value of a map on an interval. `value` is the infimum or
/// supremum; `attained` is false when it is only a limit at an open end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extremum {
    pub value: ExtRat,
    pub argument: ExtRat,
    pub attained: bool,
}

impl MoebiusMap {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self, MoebiusError> {
        let m = MoebiusMap { a, b, c, d };
        if m.determinant().is_zero() {
            return Err(MoebiusError::Degenerate);
        }
        Ok(m)
    }

    pub fn determinant(&self) -> Rational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn coefficients(&self) -> [&Rational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// Zero of the denominator, if any.
    pub fn pole(&self) -> Option<Rational> {
        if self.c.is_zero() {
            None
        } else {
            Some(-&self.d / &self.c)
        }
    }

    /// Direction on any pole-free interval.
    pub fn monotonicity(&self) -> Monotonicity {
        if self.determinant().is_positive() {
            Monotonicity::Increasing
        } else {
            Monotonicity::Decreasing
        }
    }

    /// Value at a finite point, or the limit at `+inf` / `-inf`.
    pub fn eval(&self, t: &ExtRat) -> Result<ExtRat, MoebiusError> {
        match t {
            ExtRat::Finite(t) => {
                let den = &self.c * t + &self.d;
                if den.is_zero() {
                    return Err(MoebiusError::Pole(ExtRat::from(t).to_string()));
                }
                Ok(ExtRat::Finite((&self.a * t + &self.b) / den))
            }
            inf => Ok(self.limit_at_infinity(inf.signum())),
        }
    }

    fn limit_at_infinity(&self, direction: i8) -> ExtRat {
        if !self.c.is_zero() {
            return ExtRat::Finite(&self.a / &self.c);
        }
        // c = 0, so a != 0 and d != 0: the map is affine with slope a/d.
        let slope_sign = if (&self.a / &self.d).is_positive() { 1 } else { -1 };
        if slope_sign * direction > 0 {
            ExtRat::PosInf
        } else {
            ExtRat::NegInf
        }
    }

    /// Limit as `t` approaches `end` from inside the interval. `from_above`
    /// is true when approaching the lower end.
    fn limit_at(&self, end: &ExtRat, from_above: bool) -> ExtRat {
        match end {
            ExtRat::Finite(t) => {
                let den = &self.c * t + &self.d;
                if !den.is_zero() {
                    return ExtRat::Finite((&self.a * t + &self.b) / den);
                }
                let num = &self.a * t + &self.b;
                let num_sign = if num.is_positive() { 1 } else { -1 };
                let c_sign = if self.c.is_positive() { 1 } else { -1 };
                let side = if from_above { 1 } else { -1 };
                if num_sign * c_sign * side > 0 {
                    ExtRat::PosInf
                } else {
                    ExtRat::NegInf
                }
            }
            inf => self.limit_at_infinity(inf.signum()),
        }
    }

    /// Infimum (`Min`) or supremum (`Max`) on the interval. Open ends give
    /// limit values with `attained = false`.
    pub fn extremum_on(
        &self,
        interval: &Interval,
        objective: Objective,
    ) -> Result<Extremum, MoebiusError> {
        interval.validate()?;
        if let Some(pole) = self.pole() {
            let p = ExtRat::Finite(pole);
            let inside = p > interval.lo && p < interval.hi;
            let at_closed_end = (p == interval.lo && !interval.lo_open)
                || (p == interval.hi && !interval.hi_open);
            if inside || at_closed_end {
                return Err(MoebiusError::PoleInInterval(p.to_string()));
            }
        }
        let use_lo = matches!(
            (self.monotonicity(), objective),
            (Monotonicity::Increasing, Objective::Min) | (Monotonicity::Decreasing, Objective::Max)
        );
        let (end, open) = if use_lo {
            (&interval.lo, interval.lo_open)
        } else {
            (&interval.hi, interval.hi_open)
        };
        Ok(Extremum {
            value: self.limit_at(end, use_lo),
            argument: end.clone(),
            attained: !open,
        })
    }
}

/// Extremum of `m` on the interval between `lo` and `hi`.
pub fn moebius_extremum_on_interval(
    m: &MoebiusMap,
    lo: ExtRat,
    lo_open: bool,
    hi: ExtRat,
    hi_open: bool,
    objective: Objective,
) -> Result<Extremum, MoebiusError> {
    m.extremum_on(&Interval::with_ends(lo, lo_open, hi, hi_open), objective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn map(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> MoebiusMap {
        MoebiusMap::new(rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1), rat(d.0, d.1)).unwrap()
    }

    #[test]
    fn identity_minimum() {
        let id = map((1, 1), (0, 1), (0, 1), (1, 1));
        let ext = id
            .extremum_on(&Interval::closed(ExtRat::zero(), ExtRat::one()), Objective::Min)
            .unwrap();
        assert_eq!(ext.value, ExtRat::zero());
        assert!(ext.attained);
    }

    #[test]
    fn reciprocal_on_half_open_unit_interval() {
        let inv = map((0, 1), (1, 1), (1, 1), (0, 1));
        let interval = Interval::with_ends(ExtRat::zero(), true, ExtRat::one(), false);
        let min = inv.extremum_on(&interval, Objective::Min).unwrap();
        assert_eq!(min.value, ExtRat::one());
        assert!(min.attained);
        let max = inv.extremum_on(&interval, Objective::Max).unwrap();
        assert_eq!(max.value, ExtRat::PosInf);
        assert!(!max.attained);
    }

    #[test]
    fn stokes_family_infimum_at_open_end() {
        // (24/5 t) / (2t - 1/10) on (3/20, 1/4): decreasing, infimum 3.
        let m = map((24, 5), (0, 1), (2, 1), (-1, 10));
        assert_eq!(m.monotonicity(), Monotonicity::Decreasing);
        let ext = m
            .extremum_on(
                &Interval::open(ExtRat::ratio(3, 20), ExtRat::ratio(1, 4)),
                Objective::Min,
            )
            .unwrap();
        assert_eq!(ext.value, ExtRat::int(3));
        assert!(!ext.attained);
    }

    #[test]
    fn pole_inside_interval_is_an_error() {
        let m = map((24, 5), (0, 1), (2, 1), (-1, 10));
        let err = m
            .extremum_on(
                &Interval::with_ends(ExtRat::zero(), true, ExtRat::ratio(1, 4), false),
                Objective::Min,
            )
            .unwrap_err();
        assert_eq!(err, MoebiusError::PoleInInterval("1/20".into()));
        let closed_at_pole = Interval::closed(ExtRat::ratio(1, 20), ExtRat::one());
        assert!(m.extremum_on(&closed_at_pole, Objective::Min).is_err());
    }

    #[test]
    fn degenerate_maps_rejected() {
        assert_eq!(
            MoebiusMap::new(rat(2, 1), rat(4, 1), rat(1, 1), rat(2, 1)),
            Err(MoebiusError::Degenerate)
        );
    }

    #[test]
    fn unbounded_intervals() {
        let m = map((1, 1), (0, 1), (1, 1), (1, 1)); // t/(t+1)
        let ext = m
            .extremum_on(&Interval::open(ExtRat::zero(), ExtRat::PosInf), Objective::Max)
            .unwrap();
        assert_eq!(ext.value, ExtRat::one());
        let affine = map((-2, 1), (1, 1), (0, 1), (1, 1));
        let ext = affine
            .extremum_on(&Interval::open(ExtRat::zero(), ExtRat::PosInf), Objective::Min)
            .unwrap();
        assert_eq!(ext.value, ExtRat::NegInf);
        assert!(Interval::closed(ExtRat::zero(), ExtRat::PosInf)
            .validate()
            .is_err());
    }

    #[test]
    fn monotonicity_agrees_with_sampling() {
        let cases = [
            map((24, 5), (0, 1), (2, 1), (-1, 10)),
            map((1, 1), (3, 1), (-2, 1), (7, 1)),
            map((-5, 3), (1, 2), (1, 1), (4, 1)),
        ];
        for m in cases {
            let (lo, hi) = match m.pole() {
                Some(p) if p < rat(1, 1) => (p + rat(1, 1000), rat(3, 1)),
                _ => (rat(-1, 1), rat(1, 1)),
            };
            let samples: Vec<Rational> = (0..=1000)
                .map(|k| &lo + (&hi - &lo) * rat(k, 1000))
                .skip(1)
                .collect();
            let values: Vec<ExtRat> = samples
                .iter()
                .map(|t| m.eval(&ExtRat::from(t)).unwrap())
                .collect();
            let increasing = values.windows(2).all(|w| w[0] < w[1]);
            let decreasing = values.windows(2).all(|w| w[0] > w[1]);
            match m.monotonicity() {
                Monotonicity::Increasing => assert!(increasing),
                Monotonicity::Decreasing => assert!(decreasing),
            }
            let interval = Interval::open(ExtRat::from(&lo), ExtRat::from(&hi));
            let min = m.extremum_on(&interval, Objective::Min).unwrap().value;
            let sampled_min = values.iter().min().unwrap();
            assert!(&min <= sampled_min);
        }
    }
}
