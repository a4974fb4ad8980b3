//! Exact arithmetic and combinatorial topology over quadratic integer rings.
//!
//! The crate builds finite truncations of the complexes of (augmented)
//! partial frames over the ring of integers of `Q(sqrt(d))`, computes their
//! integer simplicial homology via Smith normal form, and emits
//! self-verifying JSON certificates for detour paths, nontrivial loops, and
//! kernel elements of the Bykovskii symbol map into the rank-2 Steinberg
//! module. All arithmetic is exact: big integers and big rationals, no
//! floating point anywhere.

pub mod certify;
pub mod complexes;
pub mod geometry;
pub mod homology;
pub mod lattice;
pub mod quadring;
pub mod unionfind;

pub(crate) mod digits;
