//! The guide under `book/` is plain mdbook, which cannot run snippets that
//! depend on workspace crates. Each chapter is included here as a module so
//! `cargo test --doc` compiles and runs them.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/series.md")]
pub mod series {}
#[doc = include_str!("../../../book/src/moments.md")]
pub mod moments {}
#[doc = include_str!("../../../book/src/eigenvalue.md")]
pub mod eigenvalue {}
#[doc = include_str!("../../../book/src/densities.md")]
pub mod densities {}
#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
