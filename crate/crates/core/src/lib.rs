pub mod algebroid;
pub mod calculus;
pub mod coeff;
pub mod error;
pub mod lifts;
pub mod geometry;
pub mod random;
pub mod rational;
pub mod verify;

pub use algebroid::{AlgebroidSpec, JacobiAlgebroidSpec, Validation};
pub use coeff::ExpPoly;
pub use error::{Error, Result};
pub use rational::Rational;
