//! Exact partitioning machinery for semi-algebraic sets in the plane.
//!
//! Everything that decides anything runs on exact rational or real-algebraic
//! arithmetic; floating point only ever appears in SVG output and in two
//! logarithm-based size formulas that are documented as such.
//!
//! Layer map, bottom to top:
//!   num / ipoly / poly   scalar and polynomial arithmetic, resultants
//!   roots / algext       real root isolation, arithmetic at algebraic points
//!   sampler              sign-condition sampling via one-level decomposition
//!   semialg              sets as (polynomials, boolean formula) pairs
//!   partition            partitioning tuples: construction and verification
//!   locate / range / rayshoot  the three query structures
//!   oracle / instance / render / bench   harness support for the CLI

pub mod algext;
pub mod bench;
pub mod error;
pub mod instance;
pub mod ipoly;
pub mod locate;
pub mod num;
pub mod oracle;
pub mod partition;
pub mod point;
pub mod poly;
pub mod range;
pub mod rayshoot;
pub mod render;
pub mod roots;
pub mod sampler;
pub mod semialg;
pub mod semigroup;
pub mod sign;

pub use error::{Error, Result};
pub use num::Rational;
pub use point::{AlgebraicPoint, SamplePoint, YCoord};
pub use poly::MultiPoly;
pub use roots::RootInterval;
pub use sign::SignVector;
