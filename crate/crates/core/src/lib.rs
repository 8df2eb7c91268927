//! Linear sketches of sparse vectors and the shallow networks that read them.
//!
//! The crate is organised bottom-up:
//!
//! - [`hash_family`]: seeded pairwise-independent hashes `[d] -> [m]`.
//! - [`sparse`]: sparse vectors, head/tail splits and the text format.
//! - [`sketch`]: count (sum) and boolean (OR) multi-hash sketches.
//! - [`decoders`]: per-coordinate decoding (min / and / median) and linear
//!   functionals evaluated straight from a sketch.
//! - [`det_sketch`]: the deterministic `2k+1` coefficient sketch with exact
//!   monomial decoding.
//! - [`network`] and [`construct`]: one-hidden-layer networks and the explicit
//!   weight constructions that compute sparse polynomials from sketches.
//! - [`gauss_proj`]: Gaussian random projection baseline.
//! - [`montecarlo`]: failure-rate simulations for the decoders.
//! - [`bench`]: synthetic regression data, training and the benchmark grid.

pub mod bench;
pub mod construct;
pub mod decoders;
pub mod det_sketch;
pub mod error;
pub mod gauss_proj;
pub mod hash_family;
pub mod montecarlo;
pub mod network;
pub mod rng;
pub mod sketch;
pub mod sparse;

pub use construct::{SparsePolynomialModel, Term};
pub use decoders::DecodeMode;
pub use det_sketch::DetSketch;
pub use error::{Error, Result};
pub use gauss_proj::GaussianProjector;
pub use hash_family::HashFamily;
pub use network::{HiddenUnit, Network, UnitKind};
pub use sketch::{SketchKind, SketchMatrix};
pub use sparse::{Flavor, SparseVector};
