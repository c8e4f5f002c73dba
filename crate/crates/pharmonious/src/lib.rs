//! Lattice dynamic programming for the p-Laplacian obstacle problem.
//!
//! The crate discretizes a bounded domain Ω into a lattice `X = Ω ∪ Γ`
//! (interior nodes plus a fattened boundary strip), solves the obstacle
//! dynamic programming principle
//!
//! ```text
//! u(x) = max{ Ψ(x), (α/2)·sup_{B_ε(x)} u + (α/2)·inf_{B_ε(x)} u + β·avg_{B_ε(x)} u }
//! ```
//!
//! by monotone iteration, and cross-validates the fixed point by Monte
//! Carlo simulation of tug-of-war games with noise: with probability α/2
//! each player moves the token inside the ε-ball, with probability β the
//! move is uniform noise, and the payoff is `F` on Γ and `Ψ` at interior
//! stopping points. The weights are `α = (p−2)/(N+p)`, `β = (2+N)/(N+p)`.
//!
//! Modules follow that pipeline:
//!
//! * [`geometry`]: domains, lattices, ε-ball neighborhoods;
//! * [`field`]: scalar node data;
//! * [`dpp`]: the operator `T`, monotone iteration, solve reports;
//! * [`game`]: strategies, stopping rules, Monte Carlo value estimates;
//! * [`calculus`]: asymptotic mean-value expansion checks against Δ_p;
//! * [`harness`]: reference solutions and ε → 0 convergence experiments.
//!
//! The crate is `no_std`-compatible (`default-features = false`); all
//! computation is deterministic and independent of the host.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod calculus;
pub mod dpp;
pub mod field;
pub mod game;
pub mod geometry;
pub mod harness;
mod math;

pub use dpp::{alpha_beta, InitMode, ProblemInstance, SolveReport};
pub use field::ScalarField;
pub use geometry::{DomainSpec, Grid, Neighborhood, NeighborhoodTable, NodeClass};
