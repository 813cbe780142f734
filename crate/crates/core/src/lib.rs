//! Exact dynamics of the symmetric doubling maps `S_α(x) = 2x − dα` on `[−1, 1]`:
//! matching, primitive blocks, continued-fraction bridges and the invariant
//! measure of the middle branch.

pub mod blocks;
pub mod cf;
pub mod density;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod measure;
pub mod rational;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use exec::Execution;
pub use rational::Rational;
pub use word::Word;
