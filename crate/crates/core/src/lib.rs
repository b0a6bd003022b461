//! Numerical toolkit for tracts of entire functions: maximum modulus
//! profiles, Wiman-Valiron discs, logarithmic-change inverse branches and
//! the conformal iterated function systems they generate.
//!
//! The numerical core is generic over the scalar type through [`num::Real`];
//! the aliases below fix it to `f64` (and `f32` where that is useful).

pub mod branches;
pub mod error;
pub mod examples;
pub mod function;
pub mod ifs;
pub mod maxmod;
pub mod num;
pub mod tract;
pub mod wv;

pub use error::{Error, Result};

/// `f64` entire function.
pub type Map = function::AnalyticMap<f64>;
/// `f32` entire function.
pub type Map32 = function::AnalyticMap<f32>;
/// `f64` complex number.
pub type Complex = num::C<f64>;
