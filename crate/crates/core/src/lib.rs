pub mod error;
pub mod finite_field;
pub mod hensel;
pub mod leading_term;
pub mod series;
pub mod term;
pub mod witt;

pub use error::{Error, Result, Val};
