//! Arithmetic of primes viewed as knots: linking numbers, Rédei symbols,
//! Koch presentations, mildness certificates and Iwasawa-module
//! approximations over the cyclotomic Z_p-extension.

pub mod arith;
pub mod error;
pub mod fox;
pub mod iwasawa;
pub mod linking;
mod local2;
pub mod mild;
pub mod padic;
pub mod presentation;
pub mod quadfield;
pub mod redei;

pub use error::{Error, Result};
