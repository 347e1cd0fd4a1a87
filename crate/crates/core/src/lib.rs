//! Function algebras over the natural numbers.

pub mod algebra;
pub mod cli;
pub mod codec;
pub mod eval;
pub mod clausal;
pub mod compile;
pub mod corpus;
pub mod harness;
pub mod selftest;
