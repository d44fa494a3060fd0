//! Predictive betting games over finite alphabets.
//!
//! A Forecaster announces a probability for the next symbol, a Skeptic
//! bets fractions of its capital against that forecast, and Reality
//! plays the symbol. Expressing bets through a conditional probability Q
//! turns the capital into the likelihood ratio Q/P, which makes betting,
//! universal coding, and work extraction three views of the same
//! recursion. This crate provides:
//!
//! - incremental (LZ78) parsing and its induced betting strategy,
//! - the add-one type-class strategy and its exact multinomial capital,
//! - Markov kernels, stationary laws, entropy rates, empirical kernels,
//! - game runners with restart wrappers and a work-extraction ledger,
//! - seeded Reality samplers and replay sources,
//! - the diagnostics used to reason about convergence (cyclic
//!   self-likelihood, divergence decompositions, slack bounds,
//!   randomness deficiency).

pub mod analysis;
pub mod count;
pub mod error;
pub mod game;
pub mod lz;
pub mod markov;
pub mod realities;
pub mod strategies;
pub mod sum;
pub mod word;

pub use error::{Error, Result};
pub use word::{Alphabet, Symbol, Word};
