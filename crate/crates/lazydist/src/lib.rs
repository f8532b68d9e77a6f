//! A lazy non-deterministic evaluation engine with call-time choice, a
//! probability-distribution layer on top of it, and a strict list baseline
//! to measure it against.
//!
//! The crate is organized bottom-up:
//!
//! * [`engine`] — graph of shared, memoized lazy nodes with first-class
//!   binary choice points, plus a fingerprint-based enumerator that explores
//!   the induced alternatives without ever rewriting the graph.
//! * [`prelude`] — lazy booleans, lists, and the handful of classic
//!   combinators (`l_and`, `l_all`, `l_eq`, `l_reverse`, …) expressed as
//!   demand-driven graph builders.
//! * [`dist`] — probability distributions encoded as non-deterministic
//!   values: `certainly`, `enum_dist`, `uniform`, non-strict and strict
//!   `bind`, `filter_dist`, and `query`.
//! * [`baseline`] — the same distributions as strict pair lists, the honest
//!   point of comparison and the oracle for tests.
//! * [`models`] — example programs (dice, coins, random strings, a small
//!   Bayes net) runnable on the lazy engine, the strict-bind engine, or the
//!   list baseline.

pub mod baseline;
pub mod dist;
pub mod engine;
pub mod models;
pub mod prelude;
