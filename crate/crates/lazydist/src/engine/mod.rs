//! Lazy non-deterministic evaluation: a memoized value graph with
//! first-class choice points ([`graph`]) and a fingerprint-directed
//! enumerator over its alternatives ([`search`]).
//!
//! The division of labor is strict. Everything graph-side is oblivious to
//! enumeration: forcing uncovers choices but never decides them, so every
//! cell memoizes exactly once and is shared by all branches. Everything
//! decision-side lives in the enumerator's fingerprints, which never touch
//! the graph. The bridge is [`case_of`], which lifts a choice met during
//! pattern matching into a choice over continued matches, preserving its id.

mod graph;
mod search;

pub use graph::{
    case_of, chr, ctor, fail, float, force, int, suspend, suspend_cyclic, tag, ChoiceId,
    EvalError, EvalStats, Node, NodeRef, Session, Tag,
};
pub use search::{
    enumerate, fold_values, replay, Demand, Direction, Enumeration, Fingerprint, Ground,
    Replayed, Strategy,
};
