//! Accelerated preconditioned ADMM for convex quadratic programming.
//!
//! The crate is layered bottom-up:
//!
//! * [`linalg`]: CSC matrices, sparse `LDLᵀ`, box projection.
//! * [`splitting`]: the degenerate proximal point step and its Halpern / fast
//!   Krasnosel'skii–Mann acceleration over an abstract resolvent.
//! * [`padmm`]: two-block preconditioned ADMM on top of the engine.
//! * [`qp`]: the QP dual instance with the symmetric Gauss-Seidel z-update.
//! * [`qps`]: QPS reader/writer and conversion to `Ax = b, l ≤ x ≤ u` form.

pub mod linalg;
pub mod padmm;
pub mod qp;
pub mod qps;
pub mod splitting;
