//! Exact algebra for additive (stabilizer) quantum codes.
//!
//! Finite codes are handled as isotropic subspaces of F_p^{2n}; translation
//! invariant codes as submodules of free modules over Laurent polynomial rings.

pub mod gf;
pub mod pauli;
pub mod codeanalysis;
pub mod laurent;
pub mod smith;
pub mod classify1d;
pub mod css2d;
