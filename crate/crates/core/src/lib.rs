//! Largeness certificates for finitely presented groups.
//!
//! A group is *large* when it has a finite index subgroup surjecting onto a
//! non-abelian free group of rank 2. This crate decides, from a finite
//! presentation whose relators are proper powers, whether one of a small
//! family of sufficient conditions for largeness holds, and produces a
//! machine-checkable certificate when it does:
//!
//! * raw deficiency at least two,
//! * infinite abelianisation with enough relator powers sharing a prime
//!   factor ([`certify::check_inf_abel`]),
//! * deficiency minus one with finite non-trivial abelianisation, via either
//!   the deletion-set count or a commutator-image witness
//!   ([`certify::check_fin_abel_part1`], [`certify::check_fin_abel_part2`]).
//!
//! Everything is computed with exact integer and rational arithmetic; no
//! floating point is used anywhere in a decision path. The crate is
//! `no_std` (it allocates, but performs no IO); the companion `largo-cli`
//! crate carries the file format and command line.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod abelian;
pub mod certify;
pub mod matz;
pub mod oracles;
pub mod rewrite;
pub mod words;

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

pub use abelian::{
    abelianisation, nontriviality_evidence, removal_spectrum, surjection_to_z, word_order,
    AbelianStructure, Presentation, ZMap,
};
pub use certify::{certify, Certificate, CertificateReport, Outcome, Rejection, Rule};
pub use matz::{column_hermite, smith_normal_form, IntMatrix, Order, SmithDecomposition};
pub use words::{
    free_reduce, minimal_root, parse_word, Alphabet, GeneratorId, Letter, PowerRelator, Sign, Word,
};
