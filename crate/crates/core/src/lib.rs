#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod cantor;
pub mod definition;
pub mod error;
pub mod expr;
pub mod fde;
pub mod lyapunov;
pub mod models;
pub mod staircase;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/cantor.md")]
    struct Cantor;
    #[doc = include_str!("../../../book/src/staircase.md")]
    struct Staircase;
    #[doc = include_str!("../../../book/src/calculus.md")]
    struct Calculus;
    #[doc = include_str!("../../../book/src/fde.md")]
    struct Fde;
    #[doc = include_str!("../../../book/src/lyapunov.md")]
    struct Lyapunov;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
