//! Exact computations of p-power images in the lower triangular group `T(n,q)` and the
//! lower unitriangular group `U(n,q)` over small finite fields.

pub mod error;
pub mod conj;
pub mod gf;
pub mod serde_big;
pub mod trimat;
pub mod tri_image;
pub mod uni_image;

pub use error::{Error, Result};
pub use gf::{FieldElement, FieldTable};
pub use trimat::TriMatrix;
