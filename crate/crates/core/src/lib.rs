//! Exact-arithmetic verification toolkit for total positivity in partial
//! flag varieties of the classical types.
//!
//! The crate computes with matrices over Q(sqrt2) and decides every identity
//! and sign question exactly. It provides:
//!
//! * pinned generator matrices for the symplectic and odd-orthogonal groups
//!   embedded in SL_N, plus a type-D pinning for the Pfaffian demonstration;
//! * signed-permutation combinatorics: lengths, Bruhat order, reduced words,
//!   distinguished subexpressions, and the folding maps into type A;
//! * Pluecker vectors, Pfaffians, isotropy and orthogonal complements;
//! * Lusztig-positive sampling, Marsh-Rietsch cell points, and harnesses
//!   comparing the two positivity notions;
//! * a catalog of flag configurations that are Pluecker-nonnegative yet
//!   provably not extendable, with a sound constraint-propagation certifier.

pub mod counterexamples;
pub mod linalg;
pub mod pinning;
pub mod positivity;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod weyl;
