//! Exact MacMahonesque partition functions, quasimodular q-series, the
//! quasi-shuffle algebra relating them, and prime-detecting partition
//! equations built from both.

pub mod arith;
pub mod cli;
pub mod detector;
pub mod error;
pub mod linalg;
pub mod partition;
pub mod poly;
pub mod quasimodular;
pub mod series;
pub mod shuffle;

pub use error::{Error, Result};
pub use partition::PartVector;
pub use poly::IntPoly;
pub use series::{ExactRational, QSeries};
