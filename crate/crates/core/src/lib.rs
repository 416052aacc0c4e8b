pub mod baker;
pub mod census;
pub mod cli;
pub mod ball;
pub mod context;
pub mod embed;
pub mod error;
pub mod field;
pub mod galois;
pub mod io;
pub mod intlin;
pub mod linalg;
pub mod lll;
pub mod modular;
pub mod poly;
pub mod oracle;
pub mod reduce;
pub mod solver;
pub mod units;

pub use error::{Error, Result};
