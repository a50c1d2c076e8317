//! Computation with finite polyadic (n-ary) groups.
//!
//! The crate is organized bottom-up:
//!
//! * [`group`]: finite ordinary groups given by full multiplication tables,
//!   automorphisms, twisted groups `G_u`, direct powers and homomorphism search.
//! * [`polyadic`]: n-ary groups, either derived from `(G, θ, b)` or tabulated,
//!   with axiom verification, skew elements, retracts and Hosszú–Gloskin recovery.
//! * [`words`]: free groups, the height-constrained free polyadic group and the
//!   skew-letter cancellation model.
//! * [`terms`]: polyadic terms with coefficients, normal forms in the Post cover
//!   of `G[X]`, and translation between group and polyadic equations.
//! * [`cover`] and [`cosets`]: explicit Post covers, the universal property,
//!   presentation transformation and Todd–Coxeter enumeration.
//! * [`alggeo`]: algebraic sets, radicals, coordinate groups and the Zariski
//!   closure over a finite polyadic group.
//!
//! Elements are dense indices `0..order`; names are carried as metadata only.

pub mod alggeo;
pub mod catalog;
pub mod cosets;
pub mod cover;
pub mod group;
mod lex;
pub mod polyadic;
pub mod terms;
pub mod words;

pub use group::{Automorphism, FiniteGroup, GroupError, Hom};
pub use lex::ParseError;
pub use polyadic::{NaryOperation, NaryTable, PolyadicError, PolyadicGroup};

/// Index of an element inside a finite carrier.
pub type Elem = usize;

/// Size caps applied by every exhaustive operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Largest group order accepted by full-table enumeration (homs, subgroups).
    pub max_group_order: usize,
    /// Largest direct power `|G|^k`, and largest point set `|G|^m` for `solve`.
    pub max_power_order: usize,
    /// Largest arity.
    pub max_arity: usize,
    /// Largest number of cells in a materialized n-ary table (`|G|^n`).
    pub max_table_cells: usize,
    /// Largest number of tuples an exhaustive check may visit (`|G|^(2n-1)`).
    pub max_tuples: usize,
    /// Largest generated subalgebra (coordinate groups, word-function groups).
    pub max_subalgebra: usize,
    /// Largest set whose subsets the irreducibility test enumerates.
    pub max_irreducible_points: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_group_order: 64,
            max_power_order: 1_000_000,
            max_arity: 6,
            max_table_cells: 1_000_000,
            max_tuples: 100_000_000,
            max_subalgebra: 1_000_000,
            max_irreducible_points: 15,
        }
    }
}

/// A size cap was exceeded.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("size cap exceeded: {what} needs {size}, cap is {cap}")]
pub struct CapExceeded {
    pub what: &'static str,
    pub size: u128,
    pub cap: usize,
}

impl CapExceeded {
    pub(crate) fn check(what: &'static str, size: u128, cap: usize) -> Result<(), CapExceeded> {
        if size > cap as u128 {
            Err(CapExceeded { what, size, cap })
        } else {
            Ok(())
        }
    }
}

/// `base^exp` without overflow.
pub(crate) fn checked_pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

/// Decodes `index` into `width` base-`radix` digits, most significant first.
pub(crate) fn decode_tuple(mut index: usize, radix: usize, out: &mut [Elem]) {
    for slot in out.iter_mut().rev() {
        *slot = index % radix;
        index /= radix;
    }
}

/// Inverse of [`decode_tuple`].
pub(crate) fn encode_tuple(digits: &[Elem], radix: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * radix + d)
}
