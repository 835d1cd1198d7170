//! Exact computer-algebra kernel for generalized twisted affine Lie algebras.
//!
//! The layers, bottom up: exact cyclotomic-Laurent scalars, finitely generated
//! abelian groups with unit-valued characters, group-equivariant Lie algebra
//! presentations, the twisted affinization with canonical per-degree
//! representatives, depth-truncated vacuum modules with exact normal ordering,
//! windowed operator-valued field calculus, and conformal (vertex Lie)
//! algebras with their twisted loop algebras. Everything is verified
//! coefficient by coefficient over an integral domain; no floating point.

pub mod affine;
pub mod conformal;
pub mod examples;
pub mod fields;
pub mod group;
pub mod intlin;
pub mod lie;
pub mod linalg;
pub mod report;
pub mod scalars;
pub mod vacuum;
