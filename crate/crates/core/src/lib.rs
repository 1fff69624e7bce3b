//! Exact computations with finitely generated abelian groups and countable
//! towers of them, with calculators for twisted K-theory, twisted K-homology
//! and periodic cyclic homology of `SU(n)`, `SU(∞)` and twisted 3-spheres.

pub mod cyclic;
pub mod fgab;
pub mod intlin;
pub mod json;
pub mod ktwist;
pub mod towers;
