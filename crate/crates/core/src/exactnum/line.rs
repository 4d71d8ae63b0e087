//! Points and lines in the (1/p, s) plane.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};
use thiserror::Error;

use super::extrat::{ExtRat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("abscissa must be non-negative, got {0}")]
    NegativeAbscissa(String),
    #[error("a line needs two distinct points")]
    CoincidentPoints,
    #[error("{0}")]
    Precondition(String),
}

/// A point `(1/rho, r)` of a DeVore-Triebel diagram. The abscissa is never
/// negative; both coordinates are finite.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiagramPoint {
    pub x: Rational,
    pub y: Rational,
}

impl DiagramPoint {
    pub fn new(x: Rational, y: Rational) -> Result<Self, GeometryError> {
        if x.is_negative() {
            return Err(GeometryError::NegativeAbscissa(ExtRat::from(x).to_string()));
        }
        Ok(DiagramPoint { x, y })
    }
}

/// Serialises as `["x", "y"]` with exact rational strings.
impl Serialize for DiagramPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&ExtRat::from(&self.x))?;
        t.serialize_element(&ExtRat::from(&self.y))?;
        t.end()
    }
}

impl fmt::Display for DiagramPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", ExtRat::from(&self.x), ExtRat::from(&self.y))
    }
}

/// `a*x + b*y = c`, normalised so that `b = 1` for non-vertical lines and
/// `a = 1, b = 0` for vertical ones. Two lines are equal iff their
/// normalised coefficients are.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Line {
    a: Rational,
    b: Rational,
    c: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Intersection {
    Point { x: Rational, y: Rational },
    Parallel,
    Identical,
}

impl Line {
    /// Panics if `a` and `b` are both zero.
    pub fn from_coefficients(a: Rational, b: Rational, c: Rational) -> Self {
        assert!(!(a.is_zero() && b.is_zero()), "degenerate line equation");
        let scale = if b.is_zero() { a.clone() } else { b.clone() };
        Line {
            a: a / &scale,
            b: b / &scale,
            c: c / &scale,
        }
    }

    /// The line `y = slope * x + intercept`.
    pub fn from_slope_intercept(slope: Rational, intercept: Rational) -> Self {
        Line::from_coefficients(-slope, Rational::one(), intercept)
    }

    /// The line of the given slope through `(x, y)`.
    pub fn with_slope_through(slope: Rational, x: &Rational, y: &Rational) -> Self {
        let intercept = y - &slope * x;
        Line::from_slope_intercept(slope, intercept)
    }

    pub fn vertical(x: Rational) -> Self {
        Line::from_coefficients(Rational::one(), Rational::zero(), x)
    }

    /// The unique line containing both points.
    pub fn through(p1: &DiagramPoint, p2: &DiagramPoint) -> Result<Self, GeometryError> {
        Line::through_coords(&p1.x, &p1.y, &p2.x, &p2.y)
    }

    pub(crate) fn through_coords(
        x1: &Rational,
        y1: &Rational,
        x2: &Rational,
        y2: &Rational,
    ) -> Result<Self, GeometryError> {
        if x1 == x2 && y1 == y2 {
            return Err(GeometryError::CoincidentPoints);
        }
        // (y2 - y1) x - (x2 - x1) y = (y2 - y1) x1 - (x2 - x1) y1
        let a = y2 - y1;
        let b = -(x2 - x1);
        let c = &a * x1 + &b * y1;
        Ok(Line::from_coefficients(a, b, c))
    }

    pub fn coefficients(&self) -> (&Rational, &Rational, &Rational) {
        (&self.a, &self.b, &self.c)
    }

    pub fn is_vertical(&self) -> bool {
        self.b.is_zero()
    }

    /// Slope `dy/dx`; `+inf` for vertical lines.
    pub fn slope(&self) -> ExtRat {
        if self.is_vertical() {
            ExtRat::PosInf
        } else {
            ExtRat::Finite(-&self.a)
        }
    }

    /// Ordinate at `x`, or `None` for vertical lines.
    pub fn y_at(&self, x: &Rational) -> Option<Rational> {
        if self.is_vertical() {
            None
        } else {
            Some(&self.c - &self.a * x)
        }
    }

    pub fn contains(&self, x: &Rational, y: &Rational) -> bool {
        &self.a * x + &self.b * y == self.c
    }

    pub fn contains_point(&self, p: &DiagramPoint) -> bool {
        self.contains(&p.x, &p.y)
    }

    pub fn intersect(&self, other: &Line) -> Intersection {
        let det = &self.a * &other.b - &self.b * &other.a;
        if det.is_zero() {
            return if self == other {
                Intersection::Identical
            } else {
                Intersection::Parallel
            };
        }
        let x = (&self.c * &other.b - &self.b * &other.c) / &det;
        let y = (&self.a * &other.c - &self.c * &other.a) / &det;
        Intersection::Point { x, y }
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_vertical() {
            write!(f, "x = {}", ExtRat::from(&self.c))
        } else {
            write!(
                f,
                "y = {}*x + {}",
                ExtRat::from(-&self.a),
                ExtRat::from(&self.c)
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn pt(x: (i64, i64), y: (i64, i64)) -> DiagramPoint {
        DiagramPoint::new(rat(x.0, x.1), rat(y.0, y.1)).unwrap()
    }

    fn unit_slope() -> Line {
        Line::from_slope_intercept(rat(1, 1), rat(1, 1))
    }

    #[test]
    fn line_through_examples() {
        let l = Line::through(&pt((0, 1), (1, 1)), &pt((1, 1), (2, 1))).unwrap();
        assert_eq!(l, unit_slope());
        let l = Line::through(&pt((1, 2), (3, 2)), &pt((1, 1), (2, 1))).unwrap();
        assert_eq!(l, unit_slope());
        let l = Line::through(&pt((1, 4), (5, 4)), &pt((1, 2), (3, 2))).unwrap();
        assert_eq!(l, unit_slope());
    }

    #[test]
    fn coincident_points_rejected() {
        let p = pt((1, 2), (3, 2));
        assert_eq!(Line::through(&p, &p), Err(GeometryError::CoincidentPoints));
    }

    #[test]
    fn negative_abscissa_rejected() {
        assert!(DiagramPoint::new(rat(-1, 2), rat(0, 1)).is_err());
    }

    #[test]
    fn vertical_lines_are_representable() {
        let l = Line::through(&pt((1, 2), (0, 1)), &pt((1, 2), (5, 1))).unwrap();
        assert!(l.is_vertical());
        assert_eq!(l.slope(), ExtRat::PosInf);
        assert_eq!(l, Line::vertical(rat(1, 2)));
        assert_eq!(l.y_at(&rat(1, 2)), None);
    }

    #[test]
    fn intersect_examples() {
        let slope_two = Line::with_slope_through(rat(2, 1), &rat(1, 2), &rat(0, 1));
        assert_eq!(
            unit_slope().intersect(&slope_two),
            Intersection::Point {
                x: rat(2, 1),
                y: rat(3, 1)
            }
        );
        let diag = Line::from_slope_intercept(rat(1, 1), rat(0, 1));
        assert_eq!(diag.intersect(&unit_slope()), Intersection::Parallel);
        assert_eq!(unit_slope().intersect(&unit_slope()), Intersection::Identical);
        let v = Line::vertical(rat(1, 4));
        assert_eq!(
            v.intersect(&unit_slope()),
            Intersection::Point {
                x: rat(1, 4),
                y: rat(5, 4)
            }
        );
    }

    #[test]
    fn display() {
        assert_eq!(unit_slope().to_string(), "y = 1*x + 1");
        assert_eq!(Line::vertical(rat(3, 2)).to_string(), "x = 3/2");
    }
}
