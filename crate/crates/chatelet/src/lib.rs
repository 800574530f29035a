//! Exact arithmetic for Chatelet surfaces `y^2 - a z^2 = P(x)`.

pub mod arith;
pub mod chatelet;
pub mod chooser;
pub mod construct;
pub mod error;
pub mod fibration;
pub mod fpoly;
pub mod hilbert;
pub mod localfield;
pub mod numfield;
pub mod ratpoly;

pub use error::{Error, Result};
pub use ratpoly::{RatPoly, Rational};
