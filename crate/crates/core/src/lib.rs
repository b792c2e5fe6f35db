pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod family;
pub mod oracle;
pub mod report;
pub mod resum;
pub mod scalar;
pub mod series;
pub mod solver;
pub mod stats;

pub use error::{Error, Result};
pub use family::{make_2f1, make_e1, make_pfq, make_zeta, FamilyName, FamilySpec};
pub use scalar::{Kind, Scalar};
pub use series::TruncatedLaurentSeries;
pub use solver::{build_system, residual_defect, solve_gamma, GammaVector, ResidualSystem};
