pub mod asymptotics;
pub mod curve;
pub mod diophantine;
pub mod error;
pub mod lower;
pub mod numerics;
pub mod poly;
pub mod report;
pub mod selftest;
pub mod upper;

pub use error::{Error, Result};
pub use curve::ExponentVector;
pub use diophantine::{Cone, DiophantineProfile};
pub use lower::OptimizerConfig;
pub use numerics::{BigReal, LogMagnitude, PrecisionContext};
pub use poly::{MultiIndex, Poly};
pub use report::BoundReport;
pub use upper::BetaTable;
