//! Shared machinery for the engine property suites: a little language of
//! graph shapes whose enumeration behavior — the exact depth-first value
//! sequence and the exact final counter values — can be predicted by a
//! compositional oracle, because every choice in a built instance is a
//! fresh choice point.

// Two test targets include this module and each uses its own subset.
#![allow(dead_code)]

use std::cell::Cell;
use std::rc::Rc;

use proptest::prelude::*;

use lazydist::engine::{
    enumerate, fail, force, int, replay, suspend, Demand, Ground, NodeRef, Replayed, Session,
    Strategy as Walk,
};
use lazydist::prelude::{as_bool, bool_val, l_all, l_and, l_or, list_from, pair, PAIR};

#[derive(Clone, Debug)]
pub enum Spec {
    Leaf(i64),
    Fail,
    Choice(Box<Spec>, Box<Spec>),
    Pair(Box<Spec>, Box<Spec>),
    Susp(Box<Spec>),
}

pub fn spec_strategy() -> impl Strategy<Value = Spec> {
    let leaf = prop_oneof![
        3 => (-9i64..=9).prop_map(Spec::Leaf),
        1 => Just(Spec::Fail),
    ];
    leaf.prop_recursive(5, 32, 2, |inner| {
        prop_oneof![
            3 => (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Spec::Choice(Box::new(a), Box::new(b))),
            3 => (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Spec::Pair(Box::new(a), Box::new(b))),
            2 => inner.prop_map(|a| Spec::Susp(Box::new(a))),
        ]
    })
}

/// What a full deep depth-first enumeration of a [`Spec`] graph must
/// produce, computed without ever touching the engine.
pub struct Oracle {
    /// The exact value sequence, in depth-first order.
    pub vals: Vec<Ground>,
    pub expansions: u64,
    pub failures: u64,
    pub suspensions: u64,
}

/// The oracle mirrors how the enumerator distributes work. A choice is
/// expanded once and each side is then explored once. A pair walks its
/// left field first, so the right field is re-explored once per left
/// *value* — its expansions and failures are paid again each time, but
/// its suspensions force only on the first visit (or never, if the left
/// field produces no values at all).
pub fn oracle(spec: &Spec) -> Oracle {
    match spec {
        Spec::Leaf(i) => Oracle {
            vals: vec![Ground::Int(*i)],
            expansions: 0,
            failures: 0,
            suspensions: 0,
        },
        Spec::Fail => Oracle {
            vals: Vec::new(),
            expansions: 0,
            failures: 1,
            suspensions: 0,
        },
        Spec::Choice(a, b) => {
            let (a, b) = (oracle(a), oracle(b));
            Oracle {
                vals: a.vals.into_iter().chain(b.vals).collect(),
                expansions: 1 + a.expansions + b.expansions,
                failures: a.failures + b.failures,
                suspensions: a.suspensions + b.suspensions,
            }
        }
        Spec::Pair(a, b) => {
            let (a, b) = (oracle(a), oracle(b));
            let na = a.vals.len() as u64;
            let mut vals = Vec::with_capacity(a.vals.len() * b.vals.len());
            for x in &a.vals {
                for y in &b.vals {
                    vals.push(Ground::Ctor(PAIR, vec![x.clone(), y.clone()]));
                }
            }
            Oracle {
                vals,
                expansions: a.expansions + na * b.expansions,
                failures: a.failures + na * b.failures,
                suspensions: a.suspensions + if na > 0 { b.suspensions } else { 0 },
            }
        }
        Spec::Susp(a) => {
            let a = oracle(a);
            Oracle {
                suspensions: 1 + a.suspensions,
                ..a
            }
        }
    }
}

/// A suspension around `inner` that counts how often its body runs.
pub fn tripwire(inner: NodeRef) -> (NodeRef, Rc<Cell<u32>>) {
    let cell = Rc::new(Cell::new(0u32));
    let counter = cell.clone();
    let node = suspend(move |_| {
        counter.set(counter.get() + 1);
        Ok(inner)
    });
    (node, cell)
}

/// Build the graph for `spec`, registering one counter per suspension.
pub fn build(sess: &Session, spec: &Spec, forced: &mut Vec<Rc<Cell<u32>>>) -> NodeRef {
    match spec {
        Spec::Leaf(i) => int(*i),
        Spec::Fail => fail(),
        Spec::Choice(a, b) => {
            let left = build(sess, a, forced);
            let right = build(sess, b, forced);
            sess.mk_choice(left, right)
        }
        Spec::Pair(a, b) => pair(build(sess, a, forced), build(sess, b, forced)),
        Spec::Susp(a) => {
            let (node, cell) = tripwire(build(sess, a, forced));
            forced.push(cell);
            node
        }
    }
}

fn deep_values(sess: &Session, root: NodeRef, walk: Walk) -> Vec<Ground> {
    enumerate(sess, root, walk, Demand::Deep)
        .map(|r| r.expect("this spec language cannot raise evaluation errors").0)
        .collect()
}

/// Depth-first enumeration reproduces the oracle exactly: the value
/// sequence, all three counters, and — per suspension — at most one body
/// run, with the per-suspension counters summing to the session total.
pub fn check_dfs_matches_oracle(spec: &Spec) {
    let want = oracle(spec);
    let sess = Session::new();
    let mut forced = Vec::new();
    let root = build(&sess, spec, &mut forced);
    let got = deep_values(&sess, root, Walk::Dfs);
    assert_eq!(got, want.vals, "depth-first value sequence");
    let stats = sess.stats();
    assert_eq!(stats.choice_expansions, want.expansions, "choice expansions");
    assert_eq!(stats.failures, want.failures, "failures");
    assert_eq!(stats.suspensions_forced, want.suspensions, "suspensions forced");
    for cell in &forced {
        assert!(cell.get() <= 1, "a suspension body ran {} times", cell.get());
    }
    let total: u64 = forced.iter().map(|c| u64::from(c.get())).sum();
    assert_eq!(total, want.suspensions, "per-suspension counters");
}

/// Breadth-first search visits alternatives in a different order but
/// explores the same decision tree: same value multiset, same counters.
pub fn check_bfs_agrees(spec: &Spec) {
    let run = |walk: Walk| {
        let sess = Session::new();
        let mut forced = Vec::new();
        let root = build(&sess, spec, &mut forced);
        let mut vals: Vec<String> = deep_values(&sess, root, walk)
            .iter()
            .map(|g| format!("{g:?}"))
            .collect();
        vals.sort();
        (vals, sess.stats())
    };
    let (dfs_vals, dfs_stats) = run(Walk::Dfs);
    let (bfs_vals, bfs_stats) = run(Walk::Bfs);
    assert_eq!(dfs_vals, bfs_vals, "value multiset");
    assert_eq!(dfs_stats, bfs_stats, "counters");
}

/// Every emitted fingerprint deterministically replays to its value.
pub fn check_replay(spec: &Spec) {
    let sess = Session::new();
    let mut forced = Vec::new();
    let root = build(&sess, spec, &mut forced);
    let emitted: Vec<_> = enumerate(&sess, root.clone(), Walk::Dfs, Demand::Deep)
        .map(|r| r.expect("this spec language cannot raise evaluation errors"))
        .collect();
    for (ground, fp) in emitted {
        assert_eq!(
            replay(&sess, root.clone(), &fp, Demand::Deep).expect("replay evaluates"),
            Replayed::Value(ground),
            "a recorded fingerprint must replay to the value it was emitted with"
        );
    }
}

/// Pairing any graph with a failing alternative leaves its values (and
/// their order) untouched; the failure costs exactly one expansion and
/// one counted failure, and forces nothing extra.
pub fn check_failed_alternative_neutral(spec: &Spec, fail_left: bool) {
    let base_sess = Session::new();
    let mut base_forced = Vec::new();
    let base_root = build(&base_sess, spec, &mut base_forced);
    let base_vals = deep_values(&base_sess, base_root, Walk::Dfs);
    let base = base_sess.stats();

    let sess = Session::new();
    let mut forced = Vec::new();
    let inner = build(&sess, spec, &mut forced);
    let root = if fail_left {
        sess.mk_choice(fail(), inner)
    } else {
        sess.mk_choice(inner, fail())
    };
    let vals = deep_values(&sess, root, Walk::Dfs);
    assert_eq!(vals, base_vals, "values unchanged by a failing alternative");
    let stats = sess.stats();
    assert_eq!(stats.choice_expansions, base.choice_expansions + 1);
    assert_eq!(stats.failures, base.failures + 1);
    assert_eq!(stats.suspensions_forced, base.suspensions_forced);
}

fn force_bool(sess: &Session, node: &NodeRef) -> bool {
    let guard = force(sess, node).expect("a deterministic chain evaluates");
    as_bool(&guard).expect("the chain yields a Bool")
}

fn assert_forced_prefix(cells: &[Rc<Cell<u32>>], deciding: usize) {
    for (i, cell) in cells.iter().enumerate() {
        let want = u32::from(i < deciding);
        assert_eq!(cell.get(), want, "element {i} forced {} times", cell.get());
    }
}

/// A right-nested conjunction forces exactly the elements up to and
/// including the first false one.
pub fn check_and_chain_demand(bools: &[bool]) {
    let sess = Session::new();
    let (items, cells): (Vec<_>, Vec<_>) =
        bools.iter().map(|&b| tripwire(bool_val(b))).unzip();
    let mut acc = bool_val(true);
    for item in items.into_iter().rev() {
        acc = l_and(item, acc);
    }
    assert_eq!(force_bool(&sess, &acc), bools.iter().all(|&b| b));
    let deciding = bools.iter().position(|&b| !b).map_or(bools.len(), |i| i + 1);
    assert_forced_prefix(&cells, deciding);
}

/// Dually, a disjunction stops at the first true element.
pub fn check_or_chain_demand(bools: &[bool]) {
    let sess = Session::new();
    let (items, cells): (Vec<_>, Vec<_>) =
        bools.iter().map(|&b| tripwire(bool_val(b))).unzip();
    let mut acc = bool_val(false);
    for item in items.into_iter().rev() {
        acc = l_or(item, acc);
    }
    assert_eq!(force_bool(&sess, &acc), bools.iter().any(|&b| b));
    let deciding = bools.iter().position(|&b| b).map_or(bools.len(), |i| i + 1);
    assert_forced_prefix(&cells, deciding);
}

/// `l_all` over a list shares the conjunction's demand contract.
pub fn check_all_demand(bools: &[bool]) {
    let sess = Session::new();
    let (items, cells): (Vec<_>, Vec<_>) =
        bools.iter().map(|&b| tripwire(bool_val(b))).unzip();
    let result = l_all(|x| x, list_from(items));
    assert_eq!(force_bool(&sess, &result), bools.iter().all(|&b| b));
    let deciding = bools.iter().position(|&b| !b).map_or(bools.len(), |i| i + 1);
    assert_forced_prefix(&cells, deciding);
}
