//! Workbench for lower bounds on block-composed two-party functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`]: sign matrices, exact rank, singular spectra, balance and
//!   pattern containment, search for strongly balanced matrices.
//! * [`boolfn`]: Boolean functions on `{-1,+1}^n` and their Fourier spectra.
//! * [`lp`]: a small dense simplex solver.
//! * [`approx`]: approximate degree and its dual polynomial.
//! * [`composer`]: block compositions `f∘gⁿ`, the rank formula and witness matrices.
//! * [`bounds`]: discrepancy, γ₂* enclosures and the lower-bound evaluators.
//! * [`group`]: functions composed through a finite group.
//! * [`suites`]: seeded property suites used by `commbound verify-suite`.
//!
//! Index conventions shared by every module: in a Boolean truth table, bit `i`
//! of the index is set exactly when coordinate `x_{i+1}` is `-1`; in a block
//! composition the first block is the most significant tensor factor.

pub mod approx;
pub mod boolfn;
pub mod bounds;
pub mod composer;
pub mod error;
pub mod group;
pub mod lp;
pub mod matrix;
pub mod par;
pub mod suites;

pub use error::{Error, Result};
