//! Combinatorial and probabilistic machinery for upper-tail large deviations
//! of subcomplex counts in the multi-parameter (Costa–Farber) random
//! simplicial complex.

pub mod complex;
pub mod count;
pub mod embed;
pub mod model;
pub mod mstar;
pub mod error;
pub mod extremal;
pub mod harness;
pub mod homology;
pub mod lp;
pub mod numeric;

pub use complex::{ComplexFile, Simplex, SimplexCounts, SimplicialComplex};
pub use error::{Error, Result};
pub use numeric::{Exponent, LogValue};
