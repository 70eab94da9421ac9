//! Bounds for symplectic embeddings of ellipsoids and polydiscs into balls
//! and cubes: capacity and volume obstructions from below, folding and
//! Lagrangian constructions from above, and the packing-number diagnostics
//! that compare them.

// domain guards are written !(x > y) so that NaN inputs fail them too
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::manual_is_multiple_of)]

pub mod capacities;
pub mod domain;
pub mod folding;
pub mod lagrangian;
pub mod packing;

pub use domain::{Accuracy, Bound, BoundMethod, Direction, Ellipsoid, Family, Polydisc, Shape, TargetFamily};
pub use packing::ProblemKind;
