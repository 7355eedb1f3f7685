//! Numerical laboratory for the multifractal analysis of the Thue-Morse
//! g-measure on the binary full shift.

pub mod analyze;
pub mod construct;
pub mod descriptor;
pub mod error;
pub mod measure;
pub mod numeric;
pub mod report;
pub mod seqcore;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
