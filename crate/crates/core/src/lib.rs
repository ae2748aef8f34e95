//! Symbolic toolkit for the generalized Riccati/Abel chain `(d/dx + F(x,y))^n y = 0`.
//!
//! * [`expr`]: expression kernel (canonical form, jet-space calculus,
//!   substitution, two-tier zero testing, text grammar).
//! * [`chain`]: chain equations, reduction modulo an equation, the
//!   log-derivative reduction of `w^(n+1) = 0`.
//! * [`transform`]: point transformations, the fiber-preserving equivalence
//!   group, canonical forms and the classes of `F = alpha(x) y`.
//! * [`linearize`]: Lie's conditions, chain linearization residuals and the
//!   linearizing family of the second-order member.
//! * [`symmetry`]: prolongation and symmetry checks.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod chain;
pub mod error;
pub mod expr;
pub mod linearize;
pub mod symmetry;
pub mod transform;
mod upoly;

pub use error::{Error, Result};
pub use expr::{Expr, JetSpace, Node, Oracle, Rational, ZeroVerdict};
