//! Perfect quantum strategies for magic rectangle games.

pub mod error;
pub mod game;
pub mod inequality;
pub mod integrate;
pub mod io;
pub mod linalg;
pub mod nogo;
pub mod par;
pub mod pqss;
pub mod random;
pub mod setup;

pub use error::{Error, Result};
pub use linalg::Tolerance;
