//! Exact parabolic SU(r) Verlinde numbers.
//!
//! Three independent routes are provided: the finite trigonometric sum
//! ([`verlinde_sum`]), the iterated residue formula over diagonal bases
//! ([`residue_engine`]) and wall-crossing assembly. The remaining modules
//! supply the series algebra, the weight space geometry, the basis
//! combinatorics and the symmetry identities used to cross-check them.

pub mod exact_series;
pub mod weight_space;
pub mod diagonal_bases;
pub mod residue_engine;
pub mod verlinde_sum;
pub mod symmetry_toolkit;
pub mod cli;
