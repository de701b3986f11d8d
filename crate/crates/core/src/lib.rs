//! Exact computations with quadric fibrations.
//!
//! Families of quadrics over projective bases, their hyperbolic reductions and
//! determinant double covers, checked two ways: as identities in the
//! Grothendieck ring of varieties (the [`grothring`] engine, which never
//! cancels `L`) and as point-count identities over prime fields ([`netfib`]).
//! [`lattice`] holds the discriminant arithmetic deciding when two degree-8 K3
//! surfaces related this way are isomorphic.

pub mod error;
pub mod gfp;
pub mod grothring;
pub mod lattice;
pub mod linalg;
pub mod mpoly;
pub mod netfib;
pub mod quadform;

pub use error::{Error, Result};
pub use gfp::{PrimeField, ProjPoint, ProjectiveSpace};
