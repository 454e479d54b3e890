//! Loop-fusion Čech cohomology on finite combinatorial covers.
//!
//! The crate computes Čech cohomology of base, path and loop covers of a
//! finite simplicial complex over finitely generated abelian coefficient
//! groups, runs the enhanced transgression and regression pipelines with
//! re-verifiable certificates, and checks their compatibility with the
//! cylinder construction of ordinary transgression.
//!
//! # Sign and face conventions
//!
//! All formulas in this crate are written additively and use the table
//! below as the single source of truth.  Tuples are ordered with
//! repetition allowed; `w \ j` denotes `w` with entry `j` removed.
//!
//! | operator | formula | faces indexed |
//! |----------|---------|---------------|
//! | Čech `δ` on degree-k cochains | `(δf)(w) = Σ_{j=0}^{k+1} (−1)^j f(w \ j)` | from 0 |
//! | simplicial `∂` between product powers | `∂f = Σ_{j=1}^{n+1} (−1)^j π_j^* f`, `π_j` omits factor `j` | from 1 |
//! | fusion `d` between fiber powers | `df = Σ_{j=1}^{l+1} (−1)^j ϱ_j^* f`, `ϱ_j` omits slot `j` | from 1 |
//! | figure-of-eight `∂̄` | `(∂̄f)(x) = −(π₃^*f)(x) − (π₁^*f)(x) + (join^*f)(x)` | – |
//! | basepoint contraction | `g = −i_{n−1}^* f`, so that `∂g = f` when `∂f = 0` | – |
//!
//! Derived orientations: the transgression of a cocycle `α` stores
//! `ω = dβ` where `δβ = ε^*∂α`, and the transgression class is `−[ω]`;
//! the regression class is `−[α]`.  The cylinder route uses the modified
//! pullback `α' = −ev₀^*α + ev^*α` and, when built from the parameterized
//! `β̃`, the end-slice difference equals `−ω` exactly.

pub mod base;
pub mod c0;
pub mod cert;
pub mod cli;
pub mod cochain;
pub mod compat;
pub mod complex;
pub mod cover;
pub mod error;
pub mod fiber;
pub mod group;
pub mod homology;
pub mod lf;
pub mod matrix;
pub mod morphism;
pub mod path;
pub mod regression;
pub mod solve;
pub mod transgression;

pub use error::{LofuError, Result};
pub use group::{parse_group_spec, AbelianGroup, GroupElement};
