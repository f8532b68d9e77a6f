//! Enumerating the alternatives of a value graph.
//!
//! The graph itself never decides a choice; deciding is the enumerator's
//! job, and its decisions live entirely outside the graph in a
//! [`Fingerprint`]: a map from [`ChoiceId`] to the direction taken. One
//! consistent fingerprint describes one alternative of the program. The
//! enumerator walks the (memoized) graph from the root; at a choice whose id
//! the fingerprint already decides it follows that direction, and at an
//! undecided choice it forks. Depth-first search keeps walking the left
//! alternative in place and pushes the right extension on a stack;
//! breadth-first search pushes both extensions on a queue and abandons the
//! walk. Every frontier entry restarts from the root, which costs a re-walk
//! of the already-decided prefix — cheap, because all evaluation along it is
//! memoized — so a full enumeration is O(alternatives × depth) walk steps on
//! top of the evaluation work proper, which is shared across alternatives.

use std::collections::{BTreeMap, VecDeque};

use super::graph::{ensure_forced, ChoiceId, EvalError, Node, NodeRef, Session, Tag};

/// Which alternative of a choice an enumeration took.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Left,
    Right,
}

/// The decisions of one enumeration branch: every choice id consulted on the
/// way to a result, mapped to the direction taken.
pub type Fingerprint = BTreeMap<ChoiceId, Direction>;

/// A fully copied-out result value, detached from the graph (and from the
/// session: ground values can be sent across threads freely).
#[derive(Clone, Debug, PartialEq)]
pub enum Ground {
    Ctor(Tag, Vec<Ground>),
    /// Shallow demand stops at the first constructor: its tag and how many
    /// unexplored fields it has.
    Head(Tag, usize),
    Float(f64),
    Int(i64),
    Char(char),
}

/// Exploration order. Both strategies produce the same multiset of results;
/// depth-first order is deterministic left-first and is the order every
/// deterministic consumer in this crate relies on.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strategy {
    Dfs,
    Bfs,
}

/// How much of each result to materialize: just the head constructor, or
/// the whole value. Deep demand is what triggers nested non-determinism;
/// shallow demand deliberately leaves it dormant.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Demand {
    Shallow,
    Deep,
}

enum Work {
    Eval(NodeRef),
    Build { tag: Tag, arity: usize },
}

enum WalkEnd {
    Emitted(Ground),
    Abandoned,
    Undecided(ChoiceId),
}

enum ForkPolicy<'a> {
    Dfs(&'a mut VecDeque<Fingerprint>),
    Bfs(&'a mut VecDeque<Fingerprint>),
    Replay,
}

/// One walk from the root under (and possibly extending) `fp`.
fn walk_one(
    sess: &Session,
    root: &NodeRef,
    fp: &mut Fingerprint,
    demand: Demand,
    mut policy: ForkPolicy<'_>,
) -> Result<WalkEnd, EvalError> {
    let mut work: Vec<Work> = vec![Work::Eval(root.clone())];
    let mut vals: Vec<Ground> = Vec::new();
    while let Some(item) = work.pop() {
        match item {
            Work::Build { tag, arity } => {
                let fields = vals.split_off(vals.len() - arity);
                vals.push(Ground::Ctor(tag, fields));
            }
            Work::Eval(r) => {
                ensure_forced(sess, &r)?;
                let node = r.peek();
                match &*node {
                    Node::Fail => {
                        sess.count_failure();
                        return Ok(WalkEnd::Abandoned);
                    }
                    Node::Choice(id, left, right) => {
                        let id = *id;
                        let (left, right) = (left.clone(), right.clone());
                        drop(node);
                        match fp.get(&id) {
                            Some(Direction::Left) => work.push(Work::Eval(left)),
                            Some(Direction::Right) => work.push(Work::Eval(right)),
                            None => match &mut policy {
                                ForkPolicy::Dfs(frontier) => {
                                    sess.count_expansion();
                                    let mut right_fp = fp.clone();
                                    right_fp.insert(id, Direction::Right);
                                    frontier.push_back(right_fp);
                                    fp.insert(id, Direction::Left);
                                    work.push(Work::Eval(left));
                                }
                                ForkPolicy::Bfs(frontier) => {
                                    sess.count_expansion();
                                    let mut left_fp = fp.clone();
                                    left_fp.insert(id, Direction::Left);
                                    frontier.push_back(left_fp);
                                    let mut right_fp = fp.clone();
                                    right_fp.insert(id, Direction::Right);
                                    frontier.push_back(right_fp);
                                    return Ok(WalkEnd::Abandoned);
                                }
                                ForkPolicy::Replay => return Ok(WalkEnd::Undecided(id)),
                            },
                        }
                    }
                    Node::Ctor(tag, fields) => match demand {
                        Demand::Shallow => vals.push(Ground::Head(*tag, fields.len())),
                        Demand::Deep => {
                            let tag = *tag;
                            let fields: Vec<NodeRef> = fields.clone();
                            drop(node);
                            work.push(Work::Build {
                                tag,
                                arity: fields.len(),
                            });
                            // Reversed so the leftmost field is evaluated
                            // (and forks) first.
                            for field in fields.into_iter().rev() {
                                work.push(Work::Eval(field));
                            }
                        }
                    },
                    Node::Float(x) => vals.push(Ground::Float(*x)),
                    Node::Int(i) => vals.push(Ground::Int(*i)),
                    Node::Char(c) => vals.push(Ground::Char(*c)),
                }
            }
        }
    }
    debug_assert_eq!(vals.len(), 1, "walk must produce exactly one value");
    Ok(WalkEnd::Emitted(vals.pop().expect("walk produced a value")))
}

/// A lazy stream of enumeration results.
///
/// Yields one `(ground value, fingerprint)` entry per consistent fingerprint
/// that induces a non-failing value, in strategy order. Creating the
/// enumeration resets the session's [`super::EvalStats`]; read them back
/// with [`Session::stats`] once (or while) the stream is consumed. An
/// evaluation error ends the stream after being yielded once.
pub struct Enumeration {
    sess: Session,
    root: NodeRef,
    strategy: Strategy,
    demand: Demand,
    frontier: VecDeque<Fingerprint>,
    dead: bool,
}

/// Enumerate the alternatives of `root` under `sess`.
pub fn enumerate(sess: &Session, root: NodeRef, strategy: Strategy, demand: Demand) -> Enumeration {
    sess.reset_stats();
    let mut frontier = VecDeque::new();
    frontier.push_back(Fingerprint::new());
    Enumeration {
        sess: sess.clone(),
        root,
        strategy,
        demand,
        frontier,
        dead: false,
    }
}

impl Iterator for Enumeration {
    type Item = Result<(Ground, Fingerprint), EvalError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.dead {
            return None;
        }
        loop {
            let mut fp = match self.strategy {
                Strategy::Dfs => self.frontier.pop_back()?,
                Strategy::Bfs => self.frontier.pop_front()?,
            };
            let policy = match self.strategy {
                Strategy::Dfs => ForkPolicy::Dfs(&mut self.frontier),
                Strategy::Bfs => ForkPolicy::Bfs(&mut self.frontier),
            };
            match walk_one(&self.sess, &self.root, &mut fp, self.demand, policy) {
                Ok(WalkEnd::Emitted(ground)) => return Some(Ok((ground, fp))),
                Ok(WalkEnd::Abandoned) => continue,
                Ok(WalkEnd::Undecided(_)) => unreachable!("search policies never report undecided"),
                Err(e) => {
                    self.dead = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

/// Fold over all deep values of `root` in depth-first order. The fold is
/// the deterministic aggregation primitive: with an empty enumeration it
/// returns `zero` unchanged.
pub fn fold_values<T>(
    sess: &Session,
    root: NodeRef,
    zero: T,
    mut op: impl FnMut(T, &Ground) -> T,
) -> Result<T, EvalError> {
    let mut acc = zero;
    for item in enumerate(sess, root, Strategy::Dfs, Demand::Deep) {
        let (ground, _) = item?;
        acc = op(acc, &ground);
    }
    Ok(acc)
}

/// Outcome of re-walking a graph under a fixed, complete fingerprint.
#[derive(Clone, Debug, PartialEq)]
pub enum Replayed {
    Value(Ground),
    Failed,
    /// The fingerprint does not decide this choice; it cannot have come from
    /// an enumeration of the same graph under the same demand.
    Undecided(ChoiceId),
}

/// Deterministically re-walk `root` under a previously recorded fingerprint.
/// An enumeration's emitted `(value, fingerprint)` pairs replay to exactly
/// the same value. Counters are not reset; replay walks count like any
/// other walk.
pub fn replay(
    sess: &Session,
    root: NodeRef,
    fp: &Fingerprint,
    demand: Demand,
) -> Result<Replayed, EvalError> {
    let mut fp = fp.clone();
    match walk_one(sess, &root, &mut fp, demand, ForkPolicy::Replay)? {
        WalkEnd::Emitted(ground) => Ok(Replayed::Value(ground)),
        WalkEnd::Abandoned => Ok(Replayed::Failed),
        WalkEnd::Undecided(id) => Ok(Replayed::Undecided(id)),
    }
}
