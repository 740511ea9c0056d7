//! Diversities on finite lattices.
//!
//! A *lattice diversity* is a nonnegative function on a lattice with a
//! least element 0 that vanishes exactly on the atoms and 0, is monotone,
//! and is subadditive on pairs with nonzero meet. The crate provides:
//!
//! - [`lattice`]: finite lattices from Hasse (cover) data, with dense
//!   order/meet/join tables, modularity and distributivity checks, and
//!   down-set lattices of posets;
//! - [`diversity`]: axiom validation, the induced metric on atoms, and
//!   n-way distances;
//! - [`constructions`]: the standard generators (trivial, height,
//!   cardinality, sub-valuation diversities; divisor lattices with the
//!   prime Omega function; capped multiset lattices; restrictions of
//!   classical set diversities);
//! - [`birkhoff`]: the representation of a finite distributive lattice
//!   as the down-sets of its join-irreducibles, and the extension of a
//!   lattice diversity to a classical diversity on those;
//! - [`tightspan`]: the constraint polyhedron `P_L`, membership and
//!   minimality tests, the kappa map, and exact enumeration of the tight
//!   span `T_L` as a union of bounded faces;
//! - [`document`] and [`render`]: the on-disk format and Hasse-diagram
//!   rendering used by the `latdiv` binary.
//!
//! Arithmetic is exact (arbitrary-precision rationals) and every
//! operation is deterministic: equal inputs give byte-equal outputs.

pub mod birkhoff;
mod bits;
pub mod bruteforce;
pub mod constructions;
pub mod diversity;
pub mod document;
pub mod lattice;
mod polyhedron;
pub mod rational;
pub mod render;
pub mod tightspan;
