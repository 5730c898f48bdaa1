pub mod coinv;
pub mod error;
pub mod freelie;
pub mod lamplighter;
pub mod linalg;
pub mod magnus;
pub mod monomial;
pub mod par;
pub mod ring;
pub mod series;
pub mod witness;

pub use error::{Error, Result};
