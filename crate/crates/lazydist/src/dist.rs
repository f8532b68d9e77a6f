//! The probability monad, built directly on the lazy graph.
//!
//! A distribution is an ordinary non-deterministic value: a `Dist`
//! constructor pairing an *event* with its *probability*, where the
//! alternatives of the distribution live in choice nodes, not in a list.
//! Because `Dist` is just a constructor, [`bind`] can produce its result
//! **without deciding anything**: it immediately yields a new `Dist` whose
//! event and probability fields are lazy projections. Whether a choice is
//! ever expanded is then entirely a question of demand — a query that never
//! looks at a sub-event never pays for its alternatives.
//!
//! The two extraction points [`event_of`] and [`prob_of`] are how queries
//! take a distribution apart. They are ordinary lazy projections and are
//! exposed for the query layer and for tests; model code should stay on the
//! combinator vocabulary (`bind`, `join_with`, `filter_dist`, [`query`])
//! which preserves the well-formedness of what it builds.
//!
//! Weighted introduction goes through [`enum_dist`] (checked: every weight
//! in `(0, 1]`, total within `1e-9` of one) or [`uniform`]. [`certainly`]
//! and [`failed`] are the unit and the zero. Sharing one distribution value
//! gives call-time choice — every consumer sees the same decision; a
//! [`RTDist`] is the opposite: a recipe that mints fresh choices each time
//! it is picked, which is what repetition combinators like
//! [`replicate_dist`] want.

use std::fmt;
use std::rc::Rc;

use crate::engine::{
    case_of, ctor, enumerate, fail, float, force, suspend, Demand, EvalError, Ground, Node,
    NodeRef, Session, Strategy, Tag,
};
use crate::prelude::{as_bool, list_from, nil, CONS, NIL};

pub const DIST: Tag = crate::engine::tag("Dist", "Dist");

/// Tolerance for "the weights sum to one" checks.
pub const TOTAL_EPS: f64 = 1e-9;

fn confusion(expected: &'static str, found: &Node) -> EvalError {
    EvalError::TypeConfusion {
        expected,
        found: found.describe(),
    }
}

/// The distribution that is surely `x`.
pub fn certainly(x: NodeRef) -> NodeRef {
    ctor(DIST, vec![x, float(1.0)])
}

/// The empty distribution: no event at all.
pub fn failed() -> NodeRef {
    fail()
}

/// Lazy projection of the event field.
pub fn event_of(d: NodeRef) -> NodeRef {
    case_of(d, |_, node| match node {
        Node::Ctor(t, fields) if *t == DIST => Ok(fields[0].clone()),
        other => Err(confusion("Dist", other)),
    })
}

/// Lazy projection of the probability field.
pub fn prob_of(d: NodeRef) -> NodeRef {
    case_of(d, |_, node| match node {
        Node::Ctor(t, fields) if *t == DIST => Ok(fields[1].clone()),
        other => Err(confusion("Dist", other)),
    })
}

/// Strict multiplication of two probability graphs.
fn mul_prob(p: NodeRef, q: NodeRef) -> NodeRef {
    case_of(p, move |_, np| {
        let x = match np {
            Node::Float(x) => *x,
            other => return Err(confusion("Float", other)),
        };
        let q = q.clone();
        Ok(case_of(q, move |_, nq| match nq {
            Node::Float(y) => Ok(float(x * y)),
            other => Err(confusion("Float", other)),
        }))
    })
}

/// Which sequencing discipline a model is built with. The non-strict bind
/// is the whole point of this crate; the strict one forces every
/// intermediate distribution to head-normal form first, flattening all of
/// its alternatives before the continuation runs — the behavior a
/// conventional (eager) weighted-value representation is stuck with. Both
/// assign the same probabilities; they differ only in how much of the
/// search space a query must visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BindMode {
    NonStrict,
    Strict,
}

/// Monadic sequencing, non-strict in the incoming distribution: the result
/// constructor is available immediately, with the continuation's work
/// hidden behind a shared suspension. `f` receives the *shared* event
/// projection, so every use of the bound variable agrees on one decision
/// (call-time choice), and `f` itself runs at most once.
pub fn bind(d: NodeRef, f: impl Fn(NodeRef) -> NodeRef + 'static) -> NodeRef {
    let x = event_of(d.clone());
    let fx = suspend(move |_| Ok(f(x)));
    ctor(
        DIST,
        vec![
            event_of(fx.clone()),
            mul_prob(prob_of(d), prob_of(fx)),
        ],
    )
}

/// Monadic sequencing that pattern-matches the incoming distribution before
/// producing anything, so all of its alternatives are expanded up front.
pub fn strict_bind(d: NodeRef, f: impl Fn(NodeRef) -> NodeRef + 'static) -> NodeRef {
    case_of(d, move |_, nd| {
        let (x, p) = match nd {
            Node::Ctor(t, fields) if *t == DIST => (fields[0].clone(), fields[1].clone()),
            other => return Err(confusion("Dist", other)),
        };
        let fx = f(x);
        Ok(case_of(fx, move |_, nfx| match nfx {
            Node::Ctor(t, fields) if *t == DIST => Ok(ctor(
                DIST,
                vec![fields[0].clone(), mul_prob(p.clone(), fields[1].clone())],
            )),
            other => Err(confusion("Dist", other)),
        }))
    })
}

pub fn bind_via(mode: BindMode, d: NodeRef, f: impl Fn(NodeRef) -> NodeRef + 'static) -> NodeRef {
    match mode {
        BindMode::NonStrict => bind(d, f),
        BindMode::Strict => strict_bind(d, f),
    }
}

/// Combine two *independent* distributions with `f`.
pub fn join_with(
    f: impl Fn(NodeRef, NodeRef) -> NodeRef + 'static,
    d1: NodeRef,
    d2: NodeRef,
) -> NodeRef {
    join_with_via(BindMode::NonStrict, f, d1, d2)
}

pub fn join_with_via(
    mode: BindMode,
    f: impl Fn(NodeRef, NodeRef) -> NodeRef + 'static,
    d1: NodeRef,
    d2: NodeRef,
) -> NodeRef {
    let f = Rc::new(f);
    bind_via(mode, d1, move |x| {
        let f = Rc::clone(&f);
        bind_via(mode, d2.clone(), move |y| certainly(f(x.clone(), y)))
    })
}

/// Keep only the part of `d` whose event satisfies `pred`; the rest
/// becomes failure. The kept distribution shares its event with the one
/// `pred` examined, so the decisions the predicate forced are exactly the
/// decisions the surviving value carries.
pub fn filter_dist(pred: impl Fn(NodeRef) -> NodeRef + 'static, d: NodeRef) -> NodeRef {
    let x = event_of(d.clone());
    let p = prob_of(d);
    let keep = ctor(DIST, vec![x.clone(), p]);
    let test = suspend(move |_| Ok(pred(x)));
    case_of(test, move |_, node| {
        if as_bool(node)? {
            Ok(keep.clone())
        } else {
            Ok(fail())
        }
    })
}

/// The probability that `pred` holds for `d`: filter, then sum the
/// probabilities of every surviving alternative. This is the operation
/// whose cost the whole design optimizes — only the alternatives demanded
/// by `pred` (and the probability factors of survivors) are ever expanded.
///
/// Enumeration statistics for the walk are left on the session for the
/// caller to read.
pub fn query(
    sess: &Session,
    pred: impl Fn(NodeRef) -> NodeRef + 'static,
    d: NodeRef,
) -> Result<f64, EvalError> {
    let p = prob_of(filter_dist(pred, d));
    let mut total = 0.0;
    for item in enumerate(sess, p, Strategy::Dfs, Demand::Deep) {
        match item?.0 {
            Ground::Float(x) => total += x,
            other => {
                return Err(EvalError::TypeConfusion {
                    expected: "Float",
                    found: format!("{other:?}"),
                })
            }
        }
    }
    Ok(total)
}

/// What [`validate_dist`] found out about a distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistReport {
    /// Sum of the probabilities of all alternatives.
    pub total: f64,
    /// How many alternatives the distribution has.
    pub branches: u64,
    /// Every probability lies in `(0, 1]`.
    pub all_in_range: bool,
    /// Something is off: a probability out of range, or a total that
    /// differs from one by more than [`TOTAL_EPS`]. Distributions built
    /// from partial functions trip this even though every individual
    /// weight is fine.
    pub flagged: bool,
}

/// Exhaustively enumerate the probabilities of `d` and report whether they
/// form a proper distribution.
pub fn validate_dist(sess: &Session, d: NodeRef) -> Result<DistReport, EvalError> {
    let mut total = 0.0;
    let mut branches = 0;
    let mut all_in_range = true;
    for item in enumerate(sess, prob_of(d), Strategy::Dfs, Demand::Deep) {
        match item?.0 {
            Ground::Float(x) => {
                total += x;
                branches += 1;
                all_in_range &= x > 0.0 && x <= 1.0;
            }
            other => {
                return Err(EvalError::TypeConfusion {
                    expected: "Float",
                    found: format!("{other:?}"),
                })
            }
        }
    }
    let flagged = !all_in_range || (total - 1.0).abs() > TOTAL_EPS;
    Ok(DistReport {
        total,
        branches,
        all_in_range,
        flagged,
    })
}

/// Why a distribution could not be introduced.
#[derive(Clone, Debug, PartialEq)]
pub enum DistError {
    Eval(EvalError),
    /// A weight outside `(0, 1]`.
    BadProbability { index: usize, value: f64 },
    /// Weights that do not sum to one.
    BadTotal { total: f64 },
}

impl fmt::Display for DistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistError::Eval(e) => write!(f, "{e}"),
            DistError::BadProbability { index, value } => {
                write!(f, "probability {value} at position {index} is outside (0, 1]")
            }
            DistError::BadTotal { total } => {
                write!(f, "probabilities sum to {total}, expected 1")
            }
        }
    }
}

impl std::error::Error for DistError {}

impl From<EvalError> for DistError {
    fn from(e: EvalError) -> Self {
        DistError::Eval(e)
    }
}

/// An anonymous choice among already-built values, tried left to right.
pub fn member(sess: &Session, items: Vec<NodeRef>) -> NodeRef {
    items
        .into_iter()
        .rev()
        .fold(fail(), |acc, item| sess.mk_choice(item, acc))
}

/// A weighted distribution over the elements of `xs`, zipped against the
/// (possibly infinite) weight list `ps` — pairing stops at the shorter of
/// the two. The paired prefix is checked eagerly: every weight must lie in
/// `(0, 1]` and the weights must sum to one within [`TOTAL_EPS`].
pub fn enum_dist(sess: &Session, xs: NodeRef, ps: NodeRef) -> Result<NodeRef, DistError> {
    let mut items: Vec<(NodeRef, f64)> = Vec::new();
    let mut cur_xs = xs;
    let mut cur_ps = ps;
    loop {
        let (x, tx) = {
            let node = force(sess, &cur_xs)?;
            match &*node {
                Node::Ctor(t, _) if *t == NIL => break,
                Node::Ctor(t, fields) if *t == CONS => (fields[0].clone(), fields[1].clone()),
                other => return Err(confusion("List", other).into()),
            }
        };
        let (p, tp) = {
            let node = force(sess, &cur_ps)?;
            match &*node {
                Node::Ctor(t, _) if *t == NIL => break,
                Node::Ctor(t, fields) if *t == CONS => (fields[0].clone(), fields[1].clone()),
                other => return Err(confusion("List", other).into()),
            }
        };
        let weight = {
            let node = force(sess, &p)?;
            match &*node {
                Node::Float(w) => *w,
                other => return Err(confusion("Float", other).into()),
            }
        };
        items.push((x, weight));
        cur_xs = tx;
        cur_ps = tp;
    }

    for (index, (_, value)) in items.iter().enumerate() {
        if !(*value > 0.0 && *value <= 1.0) {
            return Err(DistError::BadProbability {
                index,
                value: *value,
            });
        }
    }
    let total: f64 = items.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > TOTAL_EPS {
        return Err(DistError::BadTotal { total });
    }

    Ok(member(
        sess,
        items
            .into_iter()
            .map(|(x, p)| ctor(DIST, vec![x, float(p)]))
            .collect(),
    ))
}

/// An equal-weight distribution over the given values.
pub fn uniform(sess: &Session, items: Vec<NodeRef>) -> Result<NodeRef, DistError> {
    let n = items.len();
    let weight = crate::prelude::l_repeat(float(1.0 / n as f64));
    enum_dist(sess, list_from(items), weight)
}

/// A recipe for a distribution: each [`pick`](RTDist::pick) builds the
/// graph afresh, with fresh choices. Sharing the `RTDist` shares the
/// recipe, not any decision — the run-time-choice counterpart to sharing a
/// distribution node.
#[derive(Clone)]
pub struct RTDist {
    make: Rc<dyn Fn(&Session) -> NodeRef>,
}

impl RTDist {
    pub fn new(make: impl Fn(&Session) -> NodeRef + 'static) -> Self {
        RTDist {
            make: Rc::new(make),
        }
    }

    /// Mint one independent sample distribution from the recipe.
    pub fn pick(&self, sess: &Session) -> NodeRef {
        (self.make)(sess)
    }
}

/// A list of `n` independent draws from the recipe. The tail of the result
/// is built level by level, on demand: a query that stops looking after
/// the first few elements never constructs — let alone decides — the rest.
pub fn replicate_dist(sess: &Session, n: u32, rt: &RTDist) -> NodeRef {
    replicate_dist_via(BindMode::NonStrict, sess, n, rt)
}

pub fn replicate_dist_via(mode: BindMode, sess: &Session, n: u32, rt: &RTDist) -> NodeRef {
    if n == 0 {
        return certainly(nil());
    }
    let head = rt.pick(sess);
    let rt = rt.clone();
    let rest = suspend(move |s| Ok(replicate_dist_via(mode, s, n - 1, &rt)));
    join_with_via(mode, crate::prelude::cons, head, rest)
}
