//! Exact finite invariants of unramified tori in reductive groups.

pub mod arith;
pub mod character_lab;
pub mod cyclotomic;
pub mod error;
pub mod field;
pub mod finite_torus;
pub mod linalg;
pub mod modp;
pub mod orbit_sums;
pub mod root_datum;
pub mod signs;

pub use error::{Error, Result};

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    pub mod overview {}
    #[doc = include_str!("../../../book/src/tori.md")]
    pub mod tori {}
    #[doc = include_str!("../../../book/src/very-regular.md")]
    pub mod very_regular {}
    #[doc = include_str!("../../../book/src/signs.md")]
    pub mod signs {}
    #[doc = include_str!("../../../book/src/howe.md")]
    pub mod howe {}
    #[doc = include_str!("../../../book/src/orbit-sums.md")]
    pub mod orbit_sums {}
}
