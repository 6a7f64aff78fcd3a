//! Noncommutative operator algebra.

pub mod bch;
pub mod build;
pub mod expr;
pub mod rules;
pub mod text;
pub mod word;

pub use expr::OpExpr;
pub use word::{Blade, Field, FieldKind, Multi, Word};
