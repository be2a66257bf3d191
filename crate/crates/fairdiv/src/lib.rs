//! Exact fairness analysis for allocations of indivisible goods.
//!
//! Everything is computed in arbitrary-precision rational arithmetic; no
//! floating point is used anywhere, so every reported ratio is exact.
//!
//! The crate has three layers:
//!
//! - [`measures`]: the four approximation ratios (EF1, EFX, MMS, PMMS) plus
//!   plain envy-freeness, evaluated for an arbitrary allocation, including an
//!   exact maximin-share solver that returns a defining partition.
//! - [`algorithms`]: constructive procedures with known guarantees:
//!   round-robin picking and envy-cycle elimination over a common good order.
//! - [`oracle`] and [`gallery`]: a brute-force allocation enumerator that
//!   audits implication rules between the fairness notions over exhaustive or
//!   seeded-random instance spaces, and a catalog of parameterized instances
//!   that realize each rule's worst case.
//!
//! Start with the runnable examples (`cargo run --example evaluate`), or the
//! `fairdiv` binary for the same operations behind a JSON CLI.

pub mod algorithms;
pub mod cli;
pub mod gallery;
pub mod instance;
pub mod measures;
pub mod oracle;
pub mod value;

pub use instance::{Allocation, Instance};
pub use measures::{FairnessReport, MeasureConfig, Notion};
pub use value::{Ratio, Value};
