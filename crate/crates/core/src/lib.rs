//! Quasi-potential of the boundary-driven viscous Burgers equation
//! `u_t + f(u)_x = ε u_xx`, `f(u) = u(1-u)`, `u(0) = ρ₀`, `u(1) = ρ₁`.
//!
//! The crate computes the static variational quasi-potential
//! `S_ε(ρ) = inf_φ 𝒢_ε(ρ,φ) - inf_φ 𝒢_ε(ρ̄_ε,φ)`, enumerates critical points of the
//! trial functional, builds the optimal excursion paths and their action, and
//! studies the inviscid limit together with its non-equilibrium phase transition.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod exec;
pub mod functionals;
pub mod grid;
pub mod inviscid;
pub mod linalg;
pub mod minimization;
pub mod pointwise;
pub mod profiles;
pub mod stationary;

pub use error::{Error, Result};
pub use exec::Execution;
pub use grid::{Grid, Params, Profile};
pub use profiles::{DensityProfile, MomentumProfile, PhiProfile};
