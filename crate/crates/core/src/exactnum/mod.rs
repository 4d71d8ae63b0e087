//! Exact scalar layer: extended rationals, diagram lines and
//! linear-fractional maps.

mod extrat;
mod line;
mod moebius;

pub use extrat::{rat, ArithError, ExtRat, ParseRationalError, Rational};
pub use line::{DiagramPoint, GeometryError, Intersection, Line};
pub use moebius::{
    moebius_extremum_on_interval, Extremum, Interval, MoebiusError, MoebiusMap, Monotonicity,
    Objective,
};
