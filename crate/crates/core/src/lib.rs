//! Chow rings of weighted Fulton-MacPherson compactifications `X_A[n]` of
//! `n` points on `X = P^d`.
//!
//! The crate builds finite presentations of these rings, computes their
//! graded ranks by exact linear algebra over `Q`, and checks every
//! presentation against a rank oracle derived from the blow-up formula.

pub mod cli;
pub mod error;
pub mod geomdata;
pub mod linalg;
pub mod poly;
pub mod present;
pub mod ranks;
pub mod setcomb;
pub mod verify;

pub use error::{Error, Result};
pub use geomdata::{BaseGeometry, ChernConvention};
pub use poly::{ChernPoly, Monomial, Poly, Sign, VarTable, Variable};
pub use present::{
    build_reduced, build_weighted, coincidence_data, iterated_presentation, keel_step,
    CoincidenceData, Presentation,
};
pub use ranks::{graded_ranks, kernel_ranks, membership, rank_oracle, RankTable};
pub use setcomb::{
    all_walks, canonical_walk, is_overlap, large_from_weights, merge_family, LargeFamily, Subset,
    Walk, Weights,
};
