#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod characters;
pub mod dedekind;
pub mod erdos;
pub mod error;
pub mod intrel;
pub mod lseries;
pub mod periodic;
pub mod precision;
pub mod relations;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/precision.md")]
    mod precision {}
    #[doc = include_str!("../../../book/src/lseries.md")]
    mod lseries {}
    #[doc = include_str!("../../../book/src/characters.md")]
    mod characters {}
    #[doc = include_str!("../../../book/src/relations.md")]
    mod relations {}
    #[doc = include_str!("../../../book/src/determinant.md")]
    mod determinant {}
    #[doc = include_str!("../../../book/src/scan.md")]
    mod scan {}
    #[doc = include_str!("../../../book/src/intrel.md")]
    mod intrel {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
