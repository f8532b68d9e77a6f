//! The value graph: shared, memoized, lazy nodes with first-class choice.
//!
//! Values form a graph of reference-counted cells. Each cell is either an
//! unevaluated suspension or a memoized weak-head-normal-form [`Node`]. A
//! node is at most one constructor (or primitive) deep; its fields are again
//! cells. Non-determinism enters through [`Node::Choice`]: a binary fork
//! carrying a [`ChoiceId`] minted once when the choice is created. The same
//! id decides the same way everywhere — forcing never resolves a choice, it
//! only uncovers it, so a shared choice observed through two paths is still
//! one decision (call-time choice).
//!
//! The crucial consequence for memoization: since forcing never consults the
//! enumerator's branch decisions, the weak-head normal form of a cell is the
//! same no matter which alternative of any choice is ultimately taken. Every
//! cell can therefore be overwritten with its result exactly once and shared
//! freely across enumeration branches. Pattern matching on a value that
//! turns out to be a choice is handled by [`case_of`], which *lifts* the
//! choice instead of deciding it: the match produces a new choice node with
//! the same id whose branches continue the match on each alternative.

use std::cell::{Cell, Ref, RefCell};
use std::fmt;
use std::rc::{Rc, Weak};

/// A constructor tag: the type it belongs to plus the constructor name.
/// Tags with equal `ty` but different `name` are siblings (comparing them is
/// `False`); tags with different `ty` must never meet in a comparison.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Tag {
    pub ty: &'static str,
    pub name: &'static str,
}

/// Shorthand constructor for [`Tag`].
pub const fn tag(ty: &'static str, name: &'static str) -> Tag {
    Tag { ty, name }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.ty, self.name)
    }
}

/// Identity of a choice point. Fresh ids are minted by [`Session::mk_choice`]
/// from a session-local monotone counter; the id is the unit of consistency
/// during enumeration (every occurrence of the id resolves the same way
/// within one enumerated alternative).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ChoiceId(pub(crate) u64);

impl fmt::Display for ChoiceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Evaluation errors. These are defects in the evaluated program, not in the
/// engine; they are memoized like values (re-demanding a broken cell reports
/// the same error again).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EvalError {
    /// A suspension demanded its own value while computing it.
    CyclicDemand,
    /// Values of incompatible types met, e.g. comparing a boolean against a
    /// list or scrutinizing a float where a constructor was expected.
    TypeConfusion {
        expected: &'static str,
        found: String,
    },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::CyclicDemand => write!(f, "cyclic demand: a value depends on itself"),
            EvalError::TypeConfusion { expected, found } => {
                write!(f, "type confusion: expected {expected}, found {found}")
            }
        }
    }
}

impl std::error::Error for EvalError {}

/// A value in weak-head normal form: one constructor, choice, failure, or
/// primitive. Constructor fields and choice alternatives are unevaluated
/// cells.
#[derive(Clone)]
pub enum Node {
    Ctor(Tag, Vec<NodeRef>),
    Choice(ChoiceId, NodeRef, NodeRef),
    /// The failed computation. Encountering it abandons the current
    /// enumeration branch; it is not an error.
    Fail,
    Float(f64),
    Int(i64),
    Char(char),
}

impl Node {
    /// Short description of the node's shape, for error messages.
    pub fn describe(&self) -> String {
        match self {
            Node::Ctor(t, fields) => format!("{t}/{}", fields.len()),
            Node::Choice(id, _, _) => format!("choice {id}"),
            Node::Fail => "failure".to_string(),
            Node::Float(x) => format!("float {x}"),
            Node::Int(i) => format!("int {i}"),
            Node::Char(c) => format!("char {c:?}"),
        }
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

/// Body of a suspension: builds (or uncovers) the suspended value. It runs
/// at most once per cell.
type Body = Box<dyn FnOnce(&Session) -> Result<NodeRef, EvalError>>;

/// The state of a cell.
enum Slot {
    /// Memoized weak-head normal form.
    Value(Node),
    /// Not yet demanded.
    Thunk(Body),
    /// Memoized failure of the body.
    Error(EvalError),
    /// The body is running right now. Observing this state means the value
    /// depends on itself: report [`EvalError::CyclicDemand`] instead of
    /// looping (the black-hole technique).
    Busy,
}

/// A shared handle to a cell in the value graph.
#[derive(Clone)]
pub struct NodeRef(Rc<RefCell<Slot>>);

impl NodeRef {
    fn from_slot(slot: Slot) -> Self {
        NodeRef(Rc::new(RefCell::new(slot)))
    }

    /// Physical identity of the underlying cell.
    pub fn same_cell(&self, other: &NodeRef) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }

    /// Borrow the memoized node. Panics if the cell has not been forced; use
    /// [`force`] to obtain the node safely.
    pub(crate) fn peek(&self) -> Ref<'_, Node> {
        Ref::map(self.0.borrow(), |slot| match slot {
            Slot::Value(node) => node,
            _ => panic!("peek on an unforced cell"),
        })
    }

    fn value_clone(&self) -> Node {
        match &*self.0.borrow() {
            Slot::Value(node) => node.clone(),
            _ => unreachable!("value_clone on an unforced cell"),
        }
    }
}

impl fmt::Debug for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0.borrow() {
            Slot::Value(node) => write!(f, "{node:?}"),
            Slot::Thunk(_) => write!(f, "<suspended>"),
            Slot::Error(e) => write!(f, "<error: {e}>"),
            Slot::Busy => write!(f, "<busy>"),
        }
    }
}

/// Counters accumulated while evaluating and enumerating. Monotone within
/// one enumeration; an [`crate::engine::enumerate`] call resets them.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct EvalStats {
    /// Undecided choice points the enumerator forked on. One fork covers
    /// both alternatives. Re-encountering the same id within a branch that
    /// already decided it does not count; meeting it undecided again in a
    /// different branch does.
    pub choice_expansions: u64,
    /// Suspension bodies actually run. Memoization means a shared cell
    /// contributes at most one, ever, per session.
    pub suspensions_forced: u64,
    /// `Fail` nodes the enumerator ran into (pruned branches).
    pub failures: u64,
}

struct SessionInner {
    next_choice: Cell<u64>,
    choice_expansions: Cell<u64>,
    suspensions_forced: Cell<u64>,
    failures: Cell<u64>,
}

/// An evaluation universe: the source of fresh choice ids and the home of
/// the instrumentation counters. Graphs built under a session must only be
/// evaluated under that session (ids are session-scoped). Cloning a session
/// is cheap and yields a handle to the same universe.
#[derive(Clone)]
pub struct Session {
    inner: Rc<SessionInner>,
}

impl Default for Session {
    fn default() -> Self {
        Session::new()
    }
}

impl Session {
    pub fn new() -> Session {
        Session {
            inner: Rc::new(SessionInner {
                next_choice: Cell::new(0),
                choice_expansions: Cell::new(0),
                suspensions_forced: Cell::new(0),
                failures: Cell::new(0),
            }),
        }
    }

    /// A fresh binary choice between two (unevaluated) alternatives.
    pub fn mk_choice(&self, left: NodeRef, right: NodeRef) -> NodeRef {
        let id = self.fresh_choice_id();
        NodeRef::from_slot(Slot::Value(Node::Choice(id, left, right)))
    }

    pub(crate) fn fresh_choice_id(&self) -> ChoiceId {
        let id = self.inner.next_choice.get();
        self.inner.next_choice.set(id + 1);
        ChoiceId(id)
    }

    /// Snapshot of the counters.
    pub fn stats(&self) -> EvalStats {
        EvalStats {
            choice_expansions: self.inner.choice_expansions.get(),
            suspensions_forced: self.inner.suspensions_forced.get(),
            failures: self.inner.failures.get(),
        }
    }

    pub fn reset_stats(&self) {
        self.inner.choice_expansions.set(0);
        self.inner.suspensions_forced.set(0);
        self.inner.failures.set(0);
    }

    pub(crate) fn count_expansion(&self) {
        let c = &self.inner.choice_expansions;
        c.set(c.get() + 1);
    }

    fn count_suspension(&self) {
        let c = &self.inner.suspensions_forced;
        c.set(c.get() + 1);
    }

    pub(crate) fn count_failure(&self) {
        let c = &self.inner.failures;
        c.set(c.get() + 1);
    }
}

/// Reconstruct a choice node under an existing id. Only the lifting in
/// [`case_of`] may do this: both derived branches continue the *same*
/// decision, so they must share it.
pub(crate) fn choice_with_id(id: ChoiceId, left: NodeRef, right: NodeRef) -> NodeRef {
    NodeRef::from_slot(Slot::Value(Node::Choice(id, left, right)))
}

/// An already-evaluated constructor node.
pub fn ctor(tag: Tag, fields: Vec<NodeRef>) -> NodeRef {
    NodeRef::from_slot(Slot::Value(Node::Ctor(tag, fields)))
}

/// The failed computation.
pub fn fail() -> NodeRef {
    NodeRef::from_slot(Slot::Value(Node::Fail))
}

pub fn float(x: f64) -> NodeRef {
    NodeRef::from_slot(Slot::Value(Node::Float(x)))
}

pub fn int(i: i64) -> NodeRef {
    NodeRef::from_slot(Slot::Value(Node::Int(i)))
}

pub fn chr(c: char) -> NodeRef {
    NodeRef::from_slot(Slot::Value(Node::Char(c)))
}

/// Suspend a computation. The body runs at most once, when the cell is first
/// forced, and its result is memoized into the cell.
pub fn suspend(body: impl FnOnce(&Session) -> Result<NodeRef, EvalError> + 'static) -> NodeRef {
    NodeRef::from_slot(Slot::Thunk(Box::new(body)))
}

/// Suspend a computation that needs a handle to its own cell, for tying
/// knots such as `repeat x = x : repeat x`. The memoized result then points
/// back at the cell, forming a reference-counted cycle; that cycle is never
/// reclaimed, which is accepted here — the graphs in question are a few
/// cells per call site and sessions are short-lived.
pub fn suspend_cyclic(
    body: impl FnOnce(&Session, &NodeRef) -> Result<NodeRef, EvalError> + 'static,
) -> NodeRef {
    let cell = Rc::new_cyclic(|weak: &Weak<RefCell<Slot>>| {
        let weak = weak.clone();
        RefCell::new(Slot::Thunk(Box::new(move |sess: &Session| {
            let this = NodeRef(weak.upgrade().expect("self cell alive while forcing"));
            body(sess, &this)
        })))
    });
    NodeRef(cell)
}

/// Force a cell to weak-head normal form and borrow the resulting node.
///
/// Suspension bodies return further cells; `force` follows such chains
/// iteratively (so recursion written in tail position, like an accumulating
/// list reversal, consumes no Rust stack) and memoizes the final node into
/// every cell of the chain. Choices are *not* resolved — a `Choice` node is
/// itself weak-head normal form. A body that (transitively) demands its own
/// cell fails with [`EvalError::CyclicDemand`], and errors are memoized just
/// like values.
pub fn force<'a>(sess: &Session, start: &'a NodeRef) -> Result<Ref<'a, Node>, EvalError> {
    ensure_forced(sess, start)?;
    Ok(start.peek())
}

pub(crate) fn ensure_forced(sess: &Session, start: &NodeRef) -> Result<(), EvalError> {
    // Fast path: already memoized.
    match &*start.0.borrow() {
        Slot::Value(_) => return Ok(()),
        Slot::Error(e) => return Err(e.clone()),
        _ => {}
    }

    enum Step {
        Done,
        Fault(EvalError),
        Run,
    }

    let mut pending: Vec<NodeRef> = Vec::new();
    let mut cur = start.clone();
    let outcome: Result<NodeRef, EvalError> = loop {
        let step = match &*cur.0.borrow() {
            Slot::Value(_) => Step::Done,
            Slot::Error(e) => Step::Fault(e.clone()),
            Slot::Busy => Step::Fault(EvalError::CyclicDemand),
            Slot::Thunk(_) => Step::Run,
        };
        match step {
            Step::Done => break Ok(cur),
            Step::Fault(e) => break Err(e),
            Step::Run => {
                let taken = std::mem::replace(&mut *cur.0.borrow_mut(), Slot::Busy);
                let Slot::Thunk(body) = taken else {
                    unreachable!("slot changed between inspection and take")
                };
                sess.count_suspension();
                pending.push(cur.clone());
                match body(sess) {
                    Ok(next) => cur = next,
                    Err(e) => break Err(e),
                }
            }
        }
    };

    // Memoize the outcome into the whole chain so every alias of every
    // intermediate cell sees the final node directly from now on.
    match outcome {
        Ok(final_ref) => {
            for cell in pending {
                if !cell.same_cell(&final_ref) {
                    *cell.0.borrow_mut() = Slot::Value(final_ref.value_clone());
                }
            }
            Ok(())
        }
        Err(e) => {
            for cell in pending {
                *cell.0.borrow_mut() = Slot::Error(e.clone());
            }
            Err(e)
        }
    }
}

/// The continuation of a pattern match: receives the scrutinee's weak-head
/// normal form, guaranteed not to be `Fail` or a `Choice`.
type Continuation = Rc<dyn Fn(&Session, &Node) -> Result<NodeRef, EvalError>>;

/// Lazy pattern match with choice lifting.
///
/// `case_of(scrutinee, k)` suspends until demanded, then forces the
/// scrutinee and inspects it:
///
/// * `Fail` propagates — a match on a failed value fails.
/// * `Choice(id, l, r)` is **lifted**: the result is a new choice *with the
///   same id* whose alternatives continue the match on `l` and `r`
///   respectively. Nothing is decided here; the enumerator will decide the
///   id once and the lifted copies follow that single decision. This is what
///   keeps every memoized value independent of enumeration state.
/// * Anything else is handed to the continuation `k`, which builds the
///   result graph. `k` may be called once per lifted alternative, so it must
///   be a pure graph builder; work it wants to share across alternatives
///   belongs in cells it captures.
pub fn case_of(
    scrutinee: NodeRef,
    k: impl Fn(&Session, &Node) -> Result<NodeRef, EvalError> + 'static,
) -> NodeRef {
    case_of_shared(scrutinee, Rc::new(k))
}

fn case_of_shared(scrutinee: NodeRef, k: Continuation) -> NodeRef {
    suspend(move |sess| {
        let node = force(sess, &scrutinee)?;
        match &*node {
            Node::Fail => {
                drop(node);
                Ok(fail())
            }
            Node::Choice(id, l, r) => {
                let (id, l, r) = (*id, l.clone(), r.clone());
                drop(node);
                Ok(choice_with_id(
                    id,
                    case_of_shared(l, Rc::clone(&k)),
                    case_of_shared(r, k),
                ))
            }
            other => k(sess, other),
        }
    })
}
