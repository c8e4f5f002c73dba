//! Independent oracles for testing the solver and game engine.
//!
//! Everything here recomputes expected values through a different route
//! than the code under test: direct linear-complementarity solves instead
//! of fixed-point iteration, exhaustive probability-tree expansion
//! instead of sampling, and transition-matrix powers instead of path
//! simulation. Test-only; never part of the shipped library surface.

pub mod banded;
pub mod enumerate;
pub mod lcp;
pub mod markov;
pub mod stats;
