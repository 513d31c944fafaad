//! The guide under `book/`, compiled so that its snippets run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/splitting.md")]
pub mod splitting {}

#[doc = include_str!("../../../book/src/padmm.md")]
pub mod padmm {}

#[doc = include_str!("../../../book/src/qp.md")]
pub mod qp {}

#[doc = include_str!("../../../book/src/qps.md")]
pub mod qps {}

#[doc = include_str!("../../../book/src/tuning.md")]
pub mod tuning {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
