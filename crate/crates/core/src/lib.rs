//! Finitely repeated games played with limited randomness.
//!
//! Stage games are solved exactly (minmax by simplex, equilibria by support
//! enumeration), repeated-game strategies are evaluated over the full history
//! tree, and the entropy a strategy consumes is measured by the worst-case and
//! on-path recursions. On top of that sit constructors for low-entropy
//! equilibria, a best-response certifier, and learners that exploit opponents
//! whose randomness is short.
//!
//! Everything is generic over [`Scalar`]; use the `Exact*` aliases for rational
//! arithmetic and the `Float*` aliases for `f64`.

pub mod construct;
pub mod engine;
pub mod entropy;
pub mod error;
pub mod exploit;
pub mod formats;
pub mod game;
pub mod lp;
pub mod scalar;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use game::{MixedStrategy, PayoffProfile, Profile, StageGame};
pub use scalar::{Rational, Scalar};

pub type ExactGame = StageGame<Rational>;
pub type FloatGame = StageGame<f64>;
pub type ExactMixed = MixedStrategy<Rational>;
pub type FloatMixed = MixedStrategy<f64>;
pub type ExactStrategy = engine::BehavioralStrategy<Rational>;
pub type FloatStrategy = engine::BehavioralStrategy<f64>;
pub type ExactReport = verify::EquilibriumReport<Rational>;
pub type FloatReport = verify::EquilibriumReport<f64>;
