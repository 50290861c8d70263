//! Exact Grassmann-algebra computations of invariants of mixed tensor
//! superspaces under GL(m|n) and the queer supergroup Q(n).
//!
//! The crate is layered bottom-up:
//!
//! - [`grassmann`]: the truncated Grassmann algebra Λ(G) over ℚ;
//! - [`supermodule`]: supermatrices, supertrace, queer trace, samplers;
//! - [`tensor`]: signed actions on tensor powers of U and U*;
//! - [`polyring`]: the super polynomial ring S(W*) and evaluation at Λ-points;
//! - [`picture`]: graded picture invariants and trace monomials;
//! - [`queer`]: the Sergeev superalgebra and queer picture invariants;
//! - [`harness`]: randomized verification campaigns and duality checks.

pub mod grassmann;
pub mod harness;
pub mod linalg;
pub mod picture;
pub mod polyring;
pub mod queer;
pub mod supermodule;
pub mod tensor;

pub use grassmann::{Grassmann, GrassmannError, Rational};
pub use supermodule::{SuperDim, SuperMatrix};
pub use tensor::{Permutation, Slot, TensorElement};
pub use polyring::{MixedShape, PointW0, SuperPolynomial};
pub use queer::SergeevElement;
