//! Arithmetic of quadratic and Hermitian forms over local fields, finite-group
//! non-abelian cohomology with involution, and a decision engine that classifies
//! symmetric pairs of classical groups as stable, s-stable, p-stable and Gelfand.
//!
//! The crate is organised bottom-up:
//!
//! * [`sqclass`]: local fields, square classes and Hilbert symbols.
//! * [`quadform`]: diagonal quadratic forms, their invariants and Witt theory.
//! * [`hermform`]: Hermitian forms for a quadratic extension, stored as invariants.
//! * [`cohom`]: finite groups with an involution and their first cohomology.
//! * [`stability`]: the classification engine for families of symmetric pairs.
//! * [`oracle`]: brute-force ground truth used to validate everything above.

pub mod cohom;
pub mod error;
pub mod hermform;
pub mod oracle;
pub mod quadform;
pub mod sqclass;
pub mod stability;

pub use error::{Error, Result};
pub use hermform::{HermForm, NormClass, QuadExt};
pub use quadform::{QuadForm, QuadInvariants};
pub use sqclass::{LocalField, Sign, SquareClass};
