//! Lazy booleans, lists, and the classic combinators over them, expressed as
//! demand-driven graph builders.
//!
//! Every operation here returns immediately with an unevaluated node;
//! evaluation happens when (and only as far as) the result is demanded,
//! with [`case_of`] lifting any choices met along the way. The demand
//! behavior is part of each operation's contract — e.g. `l_and` never
//! touches its second argument when the first is `False`, and `l_reverse`
//! forces the spine of its argument but none of the elements — because the
//! amount of non-determinism spawned during enumeration is exactly the
//! amount of demand.

use std::rc::Rc;

use crate::engine::{
    case_of, chr, ctor, int, suspend_cyclic, EvalError, Node, NodeRef, Tag,
};

pub const TRUE: Tag = crate::engine::tag("Bool", "True");
pub const FALSE: Tag = crate::engine::tag("Bool", "False");
pub const NIL: Tag = crate::engine::tag("List", "Nil");
pub const CONS: Tag = crate::engine::tag("List", "Cons");
pub const PAIR: Tag = crate::engine::tag("Pair", "Pair");

pub fn bool_val(b: bool) -> NodeRef {
    ctor(if b { TRUE } else { FALSE }, Vec::new())
}

pub fn nil() -> NodeRef {
    ctor(NIL, Vec::new())
}

pub fn cons(head: NodeRef, tail: NodeRef) -> NodeRef {
    ctor(CONS, vec![head, tail])
}

pub fn pair(fst: NodeRef, snd: NodeRef) -> NodeRef {
    ctor(PAIR, vec![fst, snd])
}

pub fn pair_fst(p: NodeRef) -> NodeRef {
    case_of(p, |_, node| match node {
        Node::Ctor(t, fields) if *t == PAIR => Ok(fields[0].clone()),
        other => Err(confusion("Pair", other)),
    })
}

pub fn pair_snd(p: NodeRef) -> NodeRef {
    case_of(p, |_, node| match node {
        Node::Ctor(t, fields) if *t == PAIR => Ok(fields[1].clone()),
        other => Err(confusion("Pair", other)),
    })
}

/// A finite list with an already-known spine.
pub fn list_from(items: Vec<NodeRef>) -> NodeRef {
    items
        .into_iter()
        .rev()
        .fold(nil(), |tail, head| cons(head, tail))
}

/// Strings are lazy lists of primitive characters.
pub fn string_val(s: &str) -> NodeRef {
    list_from(s.chars().map(chr).collect())
}

fn confusion(expected: &'static str, found: &Node) -> EvalError {
    EvalError::TypeConfusion {
        expected,
        found: found.describe(),
    }
}

/// Read a boolean constructor, or report what was found instead.
pub fn as_bool(node: &Node) -> Result<bool, EvalError> {
    match node {
        Node::Ctor(t, _) if *t == TRUE => Ok(true),
        Node::Ctor(t, _) if *t == FALSE => Ok(false),
        other => Err(confusion("Bool", other)),
    }
}

/// A list node, taken apart. The constructor's demand has already been
/// paid by whatever `case_of` produced the [`Node`]; the head and tail are
/// still as lazy as they were.
pub enum ListView {
    Nil,
    Cons(NodeRef, NodeRef),
}

pub fn as_list(node: &Node) -> Result<ListView, EvalError> {
    match node {
        Node::Ctor(t, _) if *t == NIL => Ok(ListView::Nil),
        Node::Ctor(t, fields) if *t == CONS => {
            Ok(ListView::Cons(fields[0].clone(), fields[1].clone()))
        }
        other => Err(confusion("List", other)),
    }
}

/// Short-circuit conjunction: `False ∧ x = False`, `True ∧ x = x`. The
/// second argument is untouched when the first is `False`.
pub fn l_and(a: NodeRef, b: NodeRef) -> NodeRef {
    case_of(a, move |_, node| {
        if as_bool(node)? {
            Ok(b.clone())
        } else {
            Ok(bool_val(false))
        }
    })
}

/// Short-circuit disjunction, dual to [`l_and`].
pub fn l_or(a: NodeRef, b: NodeRef) -> NodeRef {
    case_of(a, move |_, node| {
        if as_bool(node)? {
            Ok(bool_val(true))
        } else {
            Ok(b.clone())
        }
    })
}

pub fn l_not(b: NodeRef) -> NodeRef {
    case_of(b, |_, node| Ok(bool_val(!as_bool(node)?)))
}

/// `const x y = x`: the second argument is never demanded.
pub fn l_const(x: NodeRef, _y: NodeRef) -> NodeRef {
    x
}

/// Does `pred` hold for all elements? Equivalent to folding [`l_and`] over
/// the mapped list, so a single `False` element stops demand — elements
/// after it are never evaluated, nor is the rest of the spine.
pub fn l_all(pred: impl Fn(NodeRef) -> NodeRef + 'static, xs: NodeRef) -> NodeRef {
    l_all_shared(Rc::new(pred), xs)
}

fn l_all_shared(pred: Rc<dyn Fn(NodeRef) -> NodeRef>, xs: NodeRef) -> NodeRef {
    case_of(xs, move |_, node| match as_list(node)? {
        ListView::Nil => Ok(bool_val(true)),
        ListView::Cons(head, tail) => Ok(l_and(
            pred(head),
            l_all_shared(Rc::clone(&pred), tail),
        )),
    })
}

/// Right fold. `f` receives the element and the (unevaluated) folded rest.
pub fn l_foldr(
    f: impl Fn(NodeRef, NodeRef) -> NodeRef + 'static,
    z: NodeRef,
    xs: NodeRef,
) -> NodeRef {
    l_foldr_shared(Rc::new(f), z, xs)
}

fn l_foldr_shared(
    f: Rc<dyn Fn(NodeRef, NodeRef) -> NodeRef>,
    z: NodeRef,
    xs: NodeRef,
) -> NodeRef {
    case_of(xs, move |_, node| match as_list(node)? {
        ListView::Nil => Ok(z.clone()),
        ListView::Cons(head, tail) => {
            let rest = l_foldr_shared(Rc::clone(&f), z.clone(), tail);
            Ok(f(head, rest))
        }
    })
}

/// List length as a primitive integer. Forces the whole spine, none of the
/// elements.
pub fn l_length(xs: NodeRef) -> NodeRef {
    fn go(xs: NodeRef, acc: i64) -> NodeRef {
        case_of(xs, move |_, node| match as_list(node)? {
            ListView::Nil => Ok(int(acc)),
            ListView::Cons(_, tail) => Ok(go(tail, acc + 1)),
        })
    }
    go(xs, 0)
}

/// Accumulating reversal. Producing the head of the result forces the whole
/// input spine (there is no lazier way to find the last element), but the
/// elements themselves stay untouched.
pub fn l_reverse(xs: NodeRef) -> NodeRef {
    fn go(xs: NodeRef, acc: NodeRef) -> NodeRef {
        case_of(xs, move |_, node| match as_list(node)? {
            ListView::Nil => Ok(acc.clone()),
            ListView::Cons(head, tail) => Ok(go(tail, cons(head, acc.clone()))),
        })
    }
    go(xs, nil())
}

/// Zip two lists with `f`, stopping at the shorter one.
pub fn l_zip_with(
    f: impl Fn(NodeRef, NodeRef) -> NodeRef + 'static,
    xs: NodeRef,
    ys: NodeRef,
) -> NodeRef {
    l_zip_with_shared(Rc::new(f), xs, ys)
}

fn l_zip_with_shared(
    f: Rc<dyn Fn(NodeRef, NodeRef) -> NodeRef>,
    xs: NodeRef,
    ys: NodeRef,
) -> NodeRef {
    case_of(xs, move |_, node| match as_list(node)? {
        ListView::Nil => Ok(nil()),
        ListView::Cons(hx, tx) => {
            let f = Rc::clone(&f);
            let ys = ys.clone();
            Ok(case_of(ys, move |_, node| match as_list(node)? {
                ListView::Nil => Ok(nil()),
                ListView::Cons(hy, ty) => Ok(cons(
                    f(hx.clone(), hy.clone()),
                    l_zip_with_shared(Rc::clone(&f), tx.clone(), ty),
                )),
            }))
        }
    })
}

/// Keep the elements satisfying `pred`.
pub fn l_filter(pred: impl Fn(NodeRef) -> NodeRef + 'static, xs: NodeRef) -> NodeRef {
    l_filter_shared(Rc::new(pred), xs)
}

fn l_filter_shared(pred: Rc<dyn Fn(NodeRef) -> NodeRef>, xs: NodeRef) -> NodeRef {
    case_of(xs, move |_, node| match as_list(node)? {
        ListView::Nil => Ok(nil()),
        ListView::Cons(head, tail) => {
            let pred = Rc::clone(&pred);
            let keep = pred(head.clone());
            Ok(case_of(keep, move |_, node| {
                let rest = l_filter_shared(Rc::clone(&pred), tail.clone());
                if as_bool(node)? {
                    Ok(cons(head.clone(), rest))
                } else {
                    Ok(rest)
                }
            }))
        }
    })
}

/// The infinite list `x : x : x : …`, tied as a cyclic graph: the memoized
/// cons points back at its own cell, so the whole thing is two cells no
/// matter how far it is unrolled.
pub fn l_repeat(x: NodeRef) -> NodeRef {
    suspend_cyclic(move |_, this| Ok(cons(x, this.clone())))
}

/// Append two lists; lazy in both (the second is untouched until the first
/// runs out).
pub fn l_append(xs: NodeRef, ys: NodeRef) -> NodeRef {
    case_of(xs, move |_, node| match as_list(node)? {
        ListView::Nil => Ok(ys.clone()),
        ListView::Cons(head, tail) => Ok(cons(head, l_append(tail, ys.clone()))),
    })
}

/// Structural equality, scrutinizing left before right and recursing over
/// fields left to right with short-circuit conjunction. Sibling
/// constructors of one type compare `False`; constructors of *different*
/// types are a type-confusion error — such a comparison is a program bug,
/// not a negative answer.
pub fn l_eq(a: NodeRef, b: NodeRef) -> NodeRef {
    case_of(a, move |_, na| {
        let na = na.clone();
        let b = b.clone();
        Ok(case_of(b, move |_, nb| eq_nodes(&na, nb)))
    })
}

fn eq_nodes(na: &Node, nb: &Node) -> Result<NodeRef, EvalError> {
    match (na, nb) {
        (Node::Ctor(ta, fa), Node::Ctor(tb, fb)) => {
            if ta.ty != tb.ty {
                return Err(confusion(ta.ty, nb));
            }
            if ta.name != tb.name || fa.len() != fb.len() {
                return Ok(bool_val(false));
            }
            let mut acc = bool_val(true);
            for (xa, xb) in fa.iter().zip(fb).rev() {
                acc = l_and(l_eq(xa.clone(), xb.clone()), acc);
            }
            Ok(acc)
        }
        (Node::Float(x), Node::Float(y)) => Ok(bool_val(x == y)),
        (Node::Int(x), Node::Int(y)) => Ok(bool_val(x == y)),
        (Node::Char(x), Node::Char(y)) => Ok(bool_val(x == y)),
        (Node::Float(_), _) => Err(confusion("Float", nb)),
        (Node::Int(_), _) => Err(confusion("Int", nb)),
        (Node::Char(_), _) => Err(confusion("Char", nb)),
        // Fail and Choice never reach here: case_of handled them.
        _ => Err(confusion("comparable value", nb)),
    }
}

/// `a >= b` on primitive integers.
pub fn int_ge(a: NodeRef, b: NodeRef) -> NodeRef {
    case_of(a, move |_, na| {
        let x = match na {
            Node::Int(x) => *x,
            other => return Err(confusion("Int", other)),
        };
        let b = b.clone();
        Ok(case_of(b, move |_, nb| match nb {
            Node::Int(y) => Ok(bool_val(x >= *y)),
            other => Err(confusion("Int", other)),
        }))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{
        enumerate, fail, force, suspend, Demand, Ground, Session, Strategy,
    };
    use std::cell::Cell;

    /// Deep-evaluate a deterministic graph to its single ground value.
    fn eval_one(sess: &Session, r: NodeRef) -> Ground {
        let mut stream = enumerate(sess, r, Strategy::Dfs, Demand::Deep);
        let first = stream.next().expect("one value").expect("no error");
        assert!(stream.next().is_none(), "expected a deterministic graph");
        first.0
    }

    fn eval_bool(sess: &Session, r: NodeRef) -> bool {
        match eval_one(sess, r) {
            Ground::Ctor(t, _) if t == TRUE => true,
            Ground::Ctor(t, _) if t == FALSE => false,
            other => panic!("expected a boolean, got {other:?}"),
        }
    }

    /// An instrumented value: evaluating it trips the counter.
    fn tripwire(counter: &Rc<Cell<u32>>, inner: NodeRef) -> NodeRef {
        let counter = Rc::clone(counter);
        suspend(move |_| {
            counter.set(counter.get() + 1);
            Ok(inner)
        })
    }

    #[test]
    fn and_short_circuits_demand() {
        let sess = Session::new();
        let touched = Rc::new(Cell::new(0));
        let b = tripwire(&touched, bool_val(true));
        assert!(!eval_bool(&sess, l_and(bool_val(false), b)));
        assert_eq!(touched.get(), 0);

        let b = tripwire(&touched, bool_val(true));
        assert!(eval_bool(&sess, l_and(bool_val(true), b)));
        assert_eq!(touched.get(), 1);
    }

    #[test]
    fn or_short_circuits_demand() {
        let sess = Session::new();
        let touched = Rc::new(Cell::new(0));
        let b = tripwire(&touched, bool_val(false));
        assert!(eval_bool(&sess, l_or(bool_val(true), b)));
        assert_eq!(touched.get(), 0);
    }

    #[test]
    fn all_stops_at_the_first_false_element() {
        let sess = Session::new();
        let touched = Rc::new(Cell::new(0));
        let items = [tripwire(&touched, bool_val(true)),
            tripwire(&touched, bool_val(false)),
            tripwire(&touched, bool_val(true))];
        let spine_after = Rc::new(Cell::new(0));
        // A list whose third cons cell is instrumented too: l_all must not
        // even reach it.
        let tail = tripwire(&spine_after, cons(items[2].clone(), nil()));
        let xs = cons(items[0].clone(), cons(items[1].clone(), tail));
        assert!(!eval_bool(&sess, l_all(|b| b, xs)));
        assert_eq!(touched.get(), 2, "third element must stay untouched");
        assert_eq!(spine_after.get(), 0, "spine past the False is not demanded");
    }

    #[test]
    fn reverse_forces_spine_but_not_elements() {
        let sess = Session::new();
        let touched = Rc::new(Cell::new(0));
        let xs = list_from(vec![
            tripwire(&touched, int(1)),
            tripwire(&touched, int(2)),
            tripwire(&touched, int(3)),
        ]);
        let rev = l_reverse(xs);
        // Forcing to weak-head normal form walks the whole input spine…
        let node = force(&sess, &rev).unwrap();
        assert!(matches!(&*node, Node::Ctor(t, _) if *t == CONS));
        drop(node);
        // …but no element has been evaluated.
        assert_eq!(touched.get(), 0);
        // Deep evaluation sees the reversed order.
        assert_eq!(
            eval_one(&sess, rev),
            Ground::Ctor(
                CONS,
                vec![
                    Ground::Int(3),
                    Ground::Ctor(
                        CONS,
                        vec![
                            Ground::Int(2),
                            Ground::Ctor(
                                CONS,
                                vec![Ground::Int(1), Ground::Ctor(NIL, vec![])]
                            )
                        ]
                    )
                ]
            )
        );
    }

    #[test]
    fn zip_with_stops_at_the_shorter_list() {
        let sess = Session::new();
        let xs = list_from(vec![int(1), int(2), int(3)]);
        let ys = list_from(vec![int(10), int(20)]);
        let zipped = l_zip_with(pair, xs, ys);
        let g = eval_one(&sess, zipped);
        // Two pairs, then nil.
        let expect = Ground::Ctor(
            CONS,
            vec![
                Ground::Ctor(PAIR, vec![Ground::Int(1), Ground::Int(10)]),
                Ground::Ctor(
                    CONS,
                    vec![
                        Ground::Ctor(PAIR, vec![Ground::Int(2), Ground::Int(20)]),
                        Ground::Ctor(NIL, vec![]),
                    ],
                ),
            ],
        );
        assert_eq!(g, expect);
    }

    #[test]
    fn zip_with_consumes_a_repeat_productively() {
        let sess = Session::new();
        let finite = list_from(vec![int(1), int(2), int(3)]);
        let zipped = l_zip_with(|a, _| a, finite, l_repeat(int(0)));
        let g = eval_one(&sess, zipped);
        let mut lens = 0;
        let mut cur = &g;
        while let Ground::Ctor(t, fields) = cur {
            if *t == NIL {
                break;
            }
            lens += 1;
            cur = &fields[1];
        }
        assert_eq!(lens, 3);
    }

    #[test]
    fn length_and_filter_and_ge() {
        let sess = Session::new();
        let xs = list_from(vec![
            bool_val(true),
            bool_val(false),
            bool_val(true),
            bool_val(true),
        ]);
        let count = l_length(l_filter(|b| b, xs));
        assert_eq!(eval_one(&sess, count.clone()), Ground::Int(3));
        assert!(eval_bool(&sess, int_ge(count.clone(), int(2))));
        assert!(!eval_bool(&sess, int_ge(count, int(4))));
    }

    #[test]
    fn eq_compares_strings_structurally() {
        let sess = Session::new();
        assert!(eval_bool(&sess, l_eq(string_val("ab"), string_val("ab"))));
        assert!(!eval_bool(&sess, l_eq(string_val("ab"), string_val("ba"))));
        assert!(!eval_bool(&sess, l_eq(string_val("ab"), string_val("abc"))));
        assert!(!eval_bool(&sess, l_eq(string_val("ab"), nil())));
    }

    #[test]
    fn eq_demands_left_to_right_and_stops_at_the_first_mismatch() {
        let sess = Session::new();
        let touched = Rc::new(Cell::new(0));
        // Lists differing in the first element: nothing after it may be
        // demanded.
        let xs = cons(chr('a'), tripwire(&touched, nil()));
        let ys = cons(chr('b'), tripwire(&touched, nil()));
        assert!(!eval_bool(&sess, l_eq(xs, ys)));
        assert_eq!(touched.get(), 0);
    }

    #[test]
    fn eq_across_types_is_an_error_not_false() {
        let sess = Session::new();
        let mixed = l_eq(bool_val(true), nil());
        let err = force(&sess, &mixed).unwrap_err();
        assert!(matches!(err, EvalError::TypeConfusion { .. }));
    }

    #[test]
    fn eq_of_reverse_checks_outer_characters_first() {
        // The palindrome trick: s == reverse s compares s[0] against s[n-1]
        // first, so a mismatch there leaves the middle untouched.
        let sess = Session::new();
        let touched = Rc::new(Cell::new(0));
        let middle = tripwire(&touched, chr('x'));
        let s = list_from(vec![chr('a'), middle, chr('b')]);
        assert!(!eval_bool(&sess, l_eq(s.clone(), l_reverse(s))));
        assert_eq!(touched.get(), 0, "middle character must stay untouched");
    }

    #[test]
    fn append_is_lazy_in_its_second_argument() {
        let sess = Session::new();
        let touched = Rc::new(Cell::new(0));
        let ys = tripwire(&touched, nil());
        let appended = l_append(list_from(vec![int(1)]), ys);
        let node = force(&sess, &appended).unwrap();
        assert!(matches!(&*node, Node::Ctor(t, _) if *t == CONS));
        drop(node);
        assert_eq!(touched.get(), 0);
    }

    #[test]
    fn foldr_builds_lazily_from_the_left() {
        let sess = Session::new();
        // foldr cons nil = identity.
        let xs = list_from(vec![int(1), int(2)]);
        let copied = l_foldr(cons, nil(), xs.clone());
        assert_eq!(eval_one(&sess, copied), eval_one(&sess, xs));
    }

    #[test]
    fn failure_inside_an_element_prunes_only_demanding_consumers() {
        let sess = Session::new();
        // Length never looks at elements, so a failing element is harmless…
        let xs = list_from(vec![fail(), int(1)]);
        assert_eq!(eval_one(&sess, l_length(xs.clone())), Ground::Int(2));
        // …but deep evaluation of the same list yields nothing.
        let mut stream = enumerate(&sess, xs, Strategy::Dfs, Demand::Deep);
        assert!(stream.next().is_none());
    }

    #[test]
    fn not_and_const() {
        let sess = Session::new();
        assert!(!eval_bool(&sess, l_not(bool_val(true))));
        assert!(eval_bool(&sess, l_const(bool_val(true), fail())));
    }
}
