//! The chapters of the guide in `book/`, one module each, so that
//! `cargo test --doc` compiles and runs every code block. mdbook cannot
//! resolve crate dependencies when it tests a book by itself.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/expressions.md")]
pub mod expressions {}
#[doc = include_str!("../../../book/src/realizations.md")]
pub mod realizations {}
#[doc = include_str!("../../../book/src/minimality.md")]
pub mod minimality {}
#[doc = include_str!("../../../book/src/equivalence.md")]
pub mod equivalence {}
#[doc = include_str!("../../../book/src/hermitian.md")]
pub mod hermitian {}
#[doc = include_str!("../../../book/src/algebras.md")]
pub mod algebras {}
#[doc = include_str!("../../../book/src/json-and-cli.md")]
pub mod json_and_cli {}
