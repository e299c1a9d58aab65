//! Computable structure of tent-map inverse limit spaces.
//!
//! The crate models the inverse limit `K_s` of the tent map `T_s` with
//! slope `sqrt2 < s <= 2` at desk scale: exact arithmetic over rationals or
//! real quadratic fields (with an error-tracked float fallback), itineraries
//! and kneading sequences, truncated backward orbits with structured tails,
//! fold enumeration on the arcs of the composant of the endpoint `0bar`,
//! natural chain covers, link-symmetry detection, folding-point tests, and
//! straight-line arc isotopies through an injective projection.

pub mod chains;
pub mod error;
pub mod folding;
pub mod inverse_limit;
pub mod ppoints;
pub mod scalar;
pub mod symbolic;
pub mod tentmap;

pub use error::{Error, Result};
pub use scalar::{Quad, Scalar, TrackedFloat};
pub use tentmap::{critical_orbit, omega_limit_dist, CriticalOrbit, Periodicity, Slope};
