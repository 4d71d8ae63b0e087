//! Exact calculus for smoothness parameters of Besov and Triebel-Lizorkin
//! spaces on bounded Lipschitz domains.
//!
//! Spaces are points `(1/p, s)` of a DeVore-Triebel diagram. The crate
//! decides embeddings, interpolates, closes sets of regularity assertions
//! into concave regions, and evaluates upper and lower bounds for the limit
//! regularity indices along the Sobolev scale and the adaptivity scale.

pub mod exactnum;
pub mod spaces;
pub mod rules;
pub mod envelope;
pub mod bounds;
pub mod casestudies;
pub mod cli;
