//! Exact-arithmetic multilinear cross products: construction of every family,
//! axiom verification, admissible bilinear forms, the automorphism-group
//! machinery (unitary, twisted orthogonal, G2, Spin via Clifford matrices and
//! triality), and the classification of abelian-group gradings together with
//! universal grading groups and Weyl groups.

pub mod scalar;
pub mod perm;
pub mod linalg;
pub mod exterior;
pub mod cayley;
pub mod crossprod;
pub mod abgroup;
pub mod autgrp;
pub mod gradings;
pub mod serial;

pub use scalar::{Field, Scalar};
