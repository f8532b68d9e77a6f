//! The example models on the lazy graph.
//!
//! Everything here is parametric in the [`BindMode`], so the same source
//! text serves as both the demand-driven backend and the strict control:
//! the only difference between `lazy` and `strict` runs is which bind the
//! combinators are threaded through.
//!
//! The building blocks ([`coin`], [`die`], [`pick_char`] and their
//! [`RTDist`] recipes, [`flip_coin`], [`random_string`]) and the
//! predicates are public so that tests can recombine them; the `*_q`
//! functions are the registered query entry points, each leaving its
//! enumeration counters on the session it ran in.

use crate::dist::{
    bind_via, certainly, enum_dist, failed, query, replicate_dist_via, uniform, BindMode, RTDist,
};
use crate::engine::{case_of, chr, float, int, ctor, EvalError, Node, NodeRef, Session, Tag};
use crate::models::{ModelError, ModelId, Side};
use crate::prelude::{
    as_bool, as_list, bool_val, cons, int_ge, l_all, l_and, l_append, l_eq, l_filter, l_length, l_or, l_reverse, list_from, nil, pair, pair_fst, pair_snd, ListView,
};

const SIDE_TAGS: [Tag; 6] = [
    crate::engine::tag("Side", "One"),
    crate::engine::tag("Side", "Two"),
    crate::engine::tag("Side", "Three"),
    crate::engine::tag("Side", "Four"),
    crate::engine::tag("Side", "Five"),
    crate::engine::tag("Side", "Six"),
];

pub const WORLD: Tag = crate::engine::tag("Sprinkler", "World");

pub fn side_val(side: Side) -> NodeRef {
    ctor(SIDE_TAGS[side as usize], Vec::new())
}

pub fn coin(sess: &Session) -> NodeRef {
    uniform(sess, vec![bool_val(true), bool_val(false)])
        .expect("two equal weights form a distribution")
}

pub fn die(sess: &Session) -> NodeRef {
    uniform(sess, Side::ALL.iter().map(|s| side_val(*s)).collect())
        .expect("six equal weights form a distribution")
}

pub fn pick_char(sess: &Session) -> NodeRef {
    uniform(sess, vec![chr('a'), chr('b')]).expect("two equal weights form a distribution")
}

pub fn rt_coin() -> RTDist {
    RTDist::new(coin)
}

pub fn rt_die() -> RTDist {
    RTDist::new(die)
}

pub fn rt_pick_char() -> RTDist {
    RTDist::new(pick_char)
}

/// `n` independent coin flips.
pub fn flip_coin(mode: BindMode, sess: &Session, n: u32) -> NodeRef {
    replicate_dist_via(mode, sess, n, &rt_coin())
}

/// A length-`n` string over the alphabet `{a, b}`.
pub fn random_string(mode: BindMode, sess: &Session, n: u32) -> NodeRef {
    replicate_dist_via(mode, sess, n, &rt_pick_char())
}

pub fn is_six(x: NodeRef) -> NodeRef {
    l_eq(x, side_val(Side::Six))
}

pub fn is_five_or_six(x: NodeRef) -> NodeRef {
    l_or(
        l_eq(x.clone(), side_val(Side::Five)),
        l_eq(x, side_val(Side::Six)),
    )
}

pub fn palindrome(s: NodeRef) -> NodeRef {
    l_eq(s.clone(), l_reverse(s))
}

/// Does the string contain two adjacent `b`s? Matches greedily from the
/// front: the first character decides whether the second is even looked
/// at, and the scan stops at the first hit.
pub fn consecutive_bs(s: NodeRef) -> NodeRef {
    case_of(s, |_, node| match as_list(node)? {
        ListView::Nil => Ok(bool_val(false)),
        ListView::Cons(c1, t) => Ok(case_of(c1, move |_, ch| {
            if char_of(ch)? == 'b' {
                let t = t.clone();
                Ok(case_of(t.clone(), move |_, node| match as_list(node)? {
                    ListView::Nil => Ok(bool_val(false)),
                    ListView::Cons(c2, _) => {
                        let t = t.clone();
                        Ok(case_of(c2, move |_, ch| {
                            if char_of(ch)? == 'b' {
                                Ok(bool_val(true))
                            } else {
                                Ok(consecutive_bs(t.clone()))
                            }
                        }))
                    }
                }))
            } else {
                Ok(consecutive_bs(t.clone()))
            }
        })),
    })
}

pub fn at_least_two_heads(s: NodeRef) -> NodeRef {
    int_ge(l_length(l_filter(|b| b, s)), int(2))
}

fn char_of(node: &Node) -> Result<char, EvalError> {
    match node {
        Node::Char(c) => Ok(*c),
        other => Err(EvalError::TypeConfusion {
            expected: "Char",
            found: other.describe(),
        }),
    }
}

pub fn all_six(mode: BindMode, sess: &Session, n: u32) -> Result<f64, ModelError> {
    if n < 1 {
        return Err(ModelError::InvalidN {
            model: ModelId::AllSix,
            n,
            min: 1,
        });
    }
    let d = replicate_dist_via(mode, sess, n, &rt_die());
    Ok(query(sess, |s| l_all(is_six, s), d)?)
}

pub fn all_five_or_six(mode: BindMode, sess: &Session, n: u32) -> Result<f64, ModelError> {
    if n < 1 {
        return Err(ModelError::InvalidN {
            model: ModelId::AllFiveOrSix,
            n,
            min: 1,
        });
    }
    let d = replicate_dist_via(mode, sess, n, &rt_die());
    Ok(query(sess, |s| l_all(is_five_or_six, s), d)?)
}

pub fn palindrome_q(mode: BindMode, sess: &Session, n: u32) -> Result<f64, ModelError> {
    let d = random_string(mode, sess, n);
    Ok(query(sess, palindrome, d)?)
}

pub fn consecutive_bs_q(mode: BindMode, sess: &Session, n: u32) -> Result<f64, ModelError> {
    let d = random_string(mode, sess, n);
    Ok(query(sess, consecutive_bs, d)?)
}

pub fn at_least_two_heads_q(mode: BindMode, sess: &Session, n: u32) -> Result<f64, ModelError> {
    let d = flip_coin(mode, sess, n);
    Ok(query(sess, at_least_two_heads, d)?)
}

/// A distribution over `(is-palindrome, string)` pairs that constructs
/// the string from both ends at once, so the flag is decided after two
/// characters per layer instead of after the whole string.
pub fn palindrome_efficient(mode: BindMode, sess: &Session, n: u32) -> NodeRef {
    palindrome_span(mode, sess, 1, i64::from(n))
}

fn palindrome_span(mode: BindMode, sess: &Session, lo: i64, hi: i64) -> NodeRef {
    if lo > hi {
        return certainly(pair(bool_val(true), nil()));
    }
    if lo == hi {
        return bind_via(mode, pick_char(sess), |c| {
            certainly(pair(bool_val(true), cons(c, nil())))
        });
    }
    let sess_outer = sess.clone();
    bind_via(mode, pick_char(sess), move |c1| {
        let sess_inner = sess_outer.clone();
        let c1 = c1.clone();
        bind_via(mode, pick_char(&sess_outer), move |c2| {
            let rest = palindrome_span(mode, &sess_inner, lo + 1, hi - 1);
            let c1 = c1.clone();
            let c2 = c2.clone();
            bind_via(mode, rest, move |bcs| {
                let flag = pair_fst(bcs.clone());
                let chars = pair_snd(bcs);
                certainly(pair(
                    l_and(l_eq(c1.clone(), c2.clone()), flag),
                    cons(c1.clone(), l_append(chars, cons(c2.clone(), nil()))),
                ))
            })
        })
    })
}

pub fn first_true(p: NodeRef) -> NodeRef {
    pair_fst(p)
}

pub fn palindrome_efficient_q(mode: BindMode, sess: &Session, n: u32) -> Result<f64, ModelError> {
    let d = palindrome_efficient(mode, sess, n);
    Ok(query(sess, first_true, d)?)
}

fn weighted_bool(sess: &Session, p_true: f64, p_false: f64) -> NodeRef {
    enum_dist(
        sess,
        list_from(vec![bool_val(true), bool_val(false)]),
        list_from(vec![float(p_true), float(p_false)]),
    )
    .expect("conditional-probability rows are proper distributions")
}

/// The rain/sprinkler/wet network as a joint distribution, assembled
/// along the dependency order. Each conditional row is built once; which
/// row feeds a bind is selected lazily from the values already drawn. The
/// dry-and-off row has no mass on wet grass, so it contributes a certain
/// `False` rather than a two-branch distribution.
pub fn sprinkler(mode: BindMode, sess: &Session) -> NodeRef {
    let rain = weighted_bool(sess, 0.2, 0.8);
    let s_when_rain = weighted_bool(sess, 0.01, 0.99);
    let s_when_dry = weighted_bool(sess, 0.4, 0.6);
    let w_on_rain = weighted_bool(sess, 0.99, 0.01);
    let w_on_dry = weighted_bool(sess, 0.9, 0.1);
    let w_off_rain = weighted_bool(sess, 0.8, 0.2);
    let w_off_dry = certainly(bool_val(false));

    bind_via(mode, rain, move |r| {
        let sprinkler_row = {
            let on = s_when_rain.clone();
            let off = s_when_dry.clone();
            case_of(r.clone(), move |_, node| {
                if as_bool(node)? {
                    Ok(on.clone())
                } else {
                    Ok(off.clone())
                }
            })
        };
        let rows = (
            w_on_rain.clone(),
            w_on_dry.clone(),
            w_off_rain.clone(),
            w_off_dry.clone(),
        );
        let r_outer = r.clone();
        bind_via(mode, sprinkler_row, move |s| {
            let wet_row = {
                let r = r_outer.clone();
                let rows = rows.clone();
                case_of(s.clone(), move |_, node| {
                    let (tt, tf, ft, ff) = rows.clone();
                    let r = r.clone();
                    if as_bool(node)? {
                        Ok(case_of(r, move |_, node| {
                            if as_bool(node)? {
                                Ok(tt.clone())
                            } else {
                                Ok(tf.clone())
                            }
                        }))
                    } else {
                        Ok(case_of(r, move |_, node| {
                            if as_bool(node)? {
                                Ok(ft.clone())
                            } else {
                                Ok(ff.clone())
                            }
                        }))
                    }
                })
            };
            let r = r_outer.clone();
            let s = s.clone();
            bind_via(mode, wet_row, move |w| {
                certainly(ctor(WORLD, vec![r.clone(), s.clone(), w]))
            })
        })
    })
}

fn world_field(w: NodeRef, index: usize) -> NodeRef {
    case_of(w, move |_, node| match node {
        Node::Ctor(t, fields) if *t == WORLD => Ok(fields[index].clone()),
        other => Err(EvalError::TypeConfusion {
            expected: "Sprinkler",
            found: other.describe(),
        }),
    })
}

pub fn world_raining(w: NodeRef) -> NodeRef {
    world_field(w, 0)
}

pub fn world_sprinkler_on(w: NodeRef) -> NodeRef {
    world_field(w, 1)
}

pub fn world_grass_wet(w: NodeRef) -> NodeRef {
    world_field(w, 2)
}

pub fn sprinkler_raining_q(mode: BindMode, sess: &Session) -> Result<f64, ModelError> {
    Ok(query(sess, world_raining, sprinkler(mode, sess))?)
}

pub fn sprinkler_grass_wet_q(mode: BindMode, sess: &Session) -> Result<f64, ModelError> {
    Ok(query(sess, world_grass_wet, sprinkler(mode, sess))?)
}

/// `P(target | evidence)` as the quotient of two unconditional queries.
/// Evidence that never happens is not a conditional distribution at all,
/// so a zero denominator is an error rather than a NaN.
pub fn sprinkler_conditional(
    mode: BindMode,
    sess: &Session,
    target: fn(NodeRef) -> NodeRef,
    evidence: fn(NodeRef) -> NodeRef,
) -> Result<f64, ModelError> {
    let margin = query(sess, evidence, sprinkler(mode, sess))?;
    if margin == 0.0 {
        return Err(ModelError::ZeroEvidence);
    }
    let joint = query(
        sess,
        move |w| l_and(target(w.clone()), evidence(w)),
        sprinkler(mode, sess),
    )?;
    Ok(joint / margin)
}

/// A partial continuation: half the coin's mass simply vanishes. Queries
/// over what remains still work; validation reports the missing mass.
pub fn partial_pattern(mode: BindMode, sess: &Session) -> NodeRef {
    bind_via(mode, coin(sess), |b| {
        case_of(b, |_, node| {
            if as_bool(node)? {
                Ok(certainly(bool_val(true)))
            } else {
                Ok(failed())
            }
        })
    })
}

pub fn partial_pattern_q(mode: BindMode, sess: &Session) -> Result<f64, ModelError> {
    Ok(query(sess, |_| bool_val(true), partial_pattern(mode, sess))?)
}
