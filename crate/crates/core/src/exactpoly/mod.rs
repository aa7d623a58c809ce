//! Characteristic polynomials, `p`-adic Newton polygons and complex roots.
//!
//! Eigenvalues are never represented as algebraic numbers. Each place only
//! needs one Galois-stable quantity: the multiset of `p`-adic root valuations,
//! which comes from the Newton polygon, or the multiset of complex moduli.

mod charpoly;
mod newton;
mod poly;
mod roots;

use thiserror::Error;

use crate::places::PlacesError;

pub use charpoly::charpoly;
pub use newton::{max_root_log_abs, newton_polygon, NewtonPolygon, Segment};
pub use poly::{Poly, PolyQ};
pub use roots::{aberth, complex_roots, complex_roots_with, ComplexMultiset, ComplexRoot, DEFAULT_MAX_ITER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("matrix is {rows}×{cols}, not square")]
    NonSquare { rows: usize, cols: usize },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("every root is zero")]
    AllRootsZero,
    #[error("root finder did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error(transparent)]
    Places(#[from] PlacesError),
}
