//! Permutation arrays under the Chebyshev (ℓ∞) distance.
//!
//! A permutation array (PA) of length `n` and minimum distance `d` is a set of
//! permutations of `1..=n` in which any two distinct words differ by at least
//! `d` in some coordinate. This crate provides:
//!
//! - [`perm`]: the [`Permutation`] type, the Chebyshev metric and PA validation.
//! - [`constructions`]: the residue-class code, the interleaving recursion, the
//!   prefix extension `C[s_1, ..., s_t]` and the binary/q-ary chain codes.
//! - [`codec`]: direct message encoding into chain codes with error-tolerant decoding.
//! - [`bounds`]: exact ball sizes via banded permanents, sphere bounds and a
//!   best-known-bounds table.
//! - [`search`]: lexicographic greedy search and an exact maximum-PA oracle.
//! - [`channel`]: a seeded PAM/AWGN Monte-Carlo simulator.
//! - [`cli`]: the command-line front end.

pub mod bounds;
pub mod channel;
pub mod cli;
pub mod codec;
pub mod constructions;
mod error;
pub mod perm;
pub mod search;

pub use error::{PaError, Result};
pub use perm::{chebyshev_distance, min_distance, validate_pa, Permutation, PermutationArray};

/// Feasibility guards shared by the materializing and exhaustive routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of words any construction may materialize.
    pub max_words: u64,
    /// Largest band half-width accepted by the permanent DP.
    pub max_band: usize,
    /// Largest `n` the greedy lexicographic scan accepts.
    pub greedy_max_n: usize,
    /// Largest `n` the exact clique search accepts.
    pub exact_max_n: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_words: 1_000_000,
            max_band: 14,
            greedy_max_n: 12,
            exact_max_n: 6,
        }
    }
}
