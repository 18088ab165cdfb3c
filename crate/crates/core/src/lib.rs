//! Exact machinery for large Sidon-type subsets of integer sets.
//!
//! * [`representation`]: ordered representation counts and the energies `E_{s,k}`, `M_{s,k}`.
//! * [`sidon`]: unordered counts, `B_h[g]` certificates, an exact maximum-subset oracle.
//! * [`sigma`]: counts of `(k,l)`-complex solutions and exact linear algebra.
//! * [`extract`]: seeded sampling and deletion producing certified subsets.
//! * [`incidence`]: hyperbolic incidences and weighted Möbius incidences.
//! * [`constructions`]: the explicit extremal set families and the multiplication graph.

pub mod constructions;
pub mod error;
pub mod extract;
pub mod incidence;
pub mod representation;
pub mod rng;
pub mod set;
pub mod sidon;
pub mod sigma;

pub use error::{Error, Result};
pub use set::{
    format_rational, parse_rational, parse_rational_set, parse_set, Element, GroundSet, Mode,
    Parsed, Rational, RationalSet,
};
