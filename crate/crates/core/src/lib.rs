//! Exact formal group laws and formal rings.
//!
//! Starting from a group logarithm `G` (a tuple of truncated power series),
//! the library builds the addition `Φ(x,y) = G⁻¹(G(x)+G(y))` and the
//! compatible multiplication `Ψ(x,y) = G⁻¹(G(x)·G(y))`, checks the ring
//! identities coefficient by coefficient, and specializes the construction to
//! generalized Witt vectors. All arithmetic is exact over `Q` or over a
//! polynomial ring `Q[params]`.

pub mod catalog;
pub mod curves;
pub mod error;
pub mod fglaw;
pub mod fring;
pub mod json;
pub mod monomial;
pub mod mvps;
pub mod scalars;
pub mod witt;

pub use error::{Error, Result};
pub use fglaw::{FormalGroup, VerificationReport};
pub use fring::{FormalRing, RingHomomorphism};

pub use mvps::{Series, SeriesTuple};
pub use scalars::{Assignment, Coefficient, CoefficientRing, Poly, Rational};
