pub mod adversary;
pub mod bits;
pub mod commitment;
pub mod compiler;
pub mod error;
pub mod exec;
pub mod fhe;
pub mod harness;
pub mod quantum;
pub mod secret_sharing;

pub use bits::{BasisString, BitString};
pub use error::{Error, Result};
pub use exec::Exec;
