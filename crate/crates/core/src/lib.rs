//! Exact polars, quasi-convex hulls and separating characters.
//!
//! Three settings are covered: finite products of cyclic groups (brute force
//! over the dual), the circle group `T = Q/Z` with the sets
//! `{0} ∪ {±p^{-(a_n+1)}}`, and the p-adic integers with `{0} ∪ {±p^{a_n}}`.
//! Every negative answer comes with a character that can be re-checked from
//! scratch; see [`certificate`].

pub mod arith;
pub mod certificate;
pub mod circle;
pub mod classify;
pub mod cli;
pub mod finite;
pub mod first_digit;
pub mod padic;
pub mod separation;
pub mod sequence;
pub mod torus;

pub use circle::{balanced_expand, tail_bound, BalancedExpansion, CirclePoint, TmLevel};
pub use finite::{CharacterVec, FiniteGroup, GroupElement, Homomorphism, Subgroup};
pub use padic::{PadicTrunc, PruferCharacter};
pub use sequence::{SequenceSpec, TailMode};
pub use torus::IntCharacter;
