//! mdbook cannot run a book's code fences against a crate under test, so
//! each chapter is included here as module documentation: `cargo test --doc`
//! then compiles and executes every snippet. One module per chapter keeps
//! failures attributable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/exponents.md")]
pub mod exponents {}

#[doc = include_str!("../../../book/src/initial-data.md")]
pub mod initial_data {}

#[doc = include_str!("../../../book/src/linear-waves.md")]
pub mod linear_waves {}

#[doc = include_str!("../../../book/src/duhamel.md")]
pub mod duhamel {}

#[doc = include_str!("../../../book/src/solver.md")]
pub mod solver {}

#[doc = include_str!("../../../book/src/functionals.md")]
pub mod functionals {}

#[doc = include_str!("../../../book/src/sweeps.md")]
pub mod sweeps {}
