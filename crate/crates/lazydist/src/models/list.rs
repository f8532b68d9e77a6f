//! The same models on the materializing list baseline.
//!
//! Each runner builds the full event–probability list, runs the query
//! over it, and reports the number of materialized pairs as the run's
//! search-space size (`choice_expansions`). There are no suspensions to
//! count — everything is computed up front, which is precisely what makes
//! this backend an honest worst case.

use crate::baseline::{replicate, LDist};
use crate::engine::EvalStats;
use crate::models::{ModelError, ModelId, RunResult, Side, SprinklerWorld};

fn coin() -> LDist<bool> {
    LDist::uniform(vec![true, false]).expect("two equal weights form a distribution")
}

fn die() -> LDist<Side> {
    LDist::uniform(Side::ALL.to_vec()).expect("six equal weights form a distribution")
}

fn pick_char() -> LDist<char> {
    LDist::uniform(vec!['a', 'b']).expect("two equal weights form a distribution")
}

fn weighted_bool(p_true: f64, p_false: f64) -> LDist<bool> {
    LDist::enum_dist(vec![true, false], &[p_true, p_false])
        .expect("conditional-probability rows are proper distributions")
}

fn record<T>(d: &LDist<T>, probability: f64) -> RunResult {
    RunResult {
        probability,
        stats: EvalStats {
            choice_expansions: d.len() as u64,
            suspensions_forced: 0,
            failures: 0,
        },
    }
}

fn is_palindrome(s: &[char]) -> bool {
    s.iter().eq(s.iter().rev())
}

fn has_consecutive_bs(s: &[char]) -> bool {
    s.windows(2).any(|w| w[0] == 'b' && w[1] == 'b')
}

fn palindrome_efficient(n: u32) -> LDist<(bool, Vec<char>)> {
    fn span(lo: i64, hi: i64) -> LDist<(bool, Vec<char>)> {
        if lo > hi {
            return LDist::certainly((true, Vec::new()));
        }
        if lo == hi {
            return pick_char().bind(|c| LDist::certainly((true, vec![*c])));
        }
        pick_char().bind(move |c1| {
            let c1 = *c1;
            pick_char().bind(move |c2| {
                let c2 = *c2;
                span(lo + 1, hi - 1).bind(move |(flag, middle)| {
                    let mut s = Vec::with_capacity(middle.len() + 2);
                    s.push(c1);
                    s.extend_from_slice(middle);
                    s.push(c2);
                    LDist::certainly((c1 == c2 && *flag, s))
                })
            })
        })
    }
    span(1, i64::from(n))
}

pub(crate) fn sprinkler_joint() -> LDist<SprinklerWorld> {
    weighted_bool(0.2, 0.8).bind(|&raining| {
        let sprinkler = if raining {
            weighted_bool(0.01, 0.99)
        } else {
            weighted_bool(0.4, 0.6)
        };
        sprinkler.bind(move |&sprinkler_on| {
            let wet = match (sprinkler_on, raining) {
                (true, true) => weighted_bool(0.99, 0.01),
                (true, false) => weighted_bool(0.9, 0.1),
                (false, true) => weighted_bool(0.8, 0.2),
                (false, false) => LDist::certainly(false),
            };
            wet.bind(move |&grass_wet| {
                LDist::certainly(SprinklerWorld {
                    raining,
                    sprinkler_on,
                    grass_wet,
                })
            })
        })
    })
}

fn partial_pattern() -> LDist<bool> {
    coin().bind(|&b| {
        if b {
            LDist::certainly(true)
        } else {
            LDist::empty()
        }
    })
}

pub(crate) fn run(model: ModelId, n: u32) -> Result<RunResult, ModelError> {
    Ok(match model {
        ModelId::AllSix => {
            let d = replicate(n, &die());
            let p = d.query(|s| s.iter().all(|x| *x == Side::Six));
            record(&d, p)
        }
        ModelId::AllFiveOrSix => {
            let d = replicate(n, &die());
            let p = d.query(|s| s.iter().all(|x| matches!(x, Side::Five | Side::Six)));
            record(&d, p)
        }
        ModelId::Palindrome => {
            let d = replicate(n, &pick_char());
            let p = d.query(|s| is_palindrome(s));
            record(&d, p)
        }
        ModelId::PalindromeEfficient => {
            let d = palindrome_efficient(n);
            let p = d.query(|(flag, _)| *flag);
            record(&d, p)
        }
        ModelId::ConsecutiveBs => {
            let d = replicate(n, &pick_char());
            let p = d.query(|s| has_consecutive_bs(s));
            record(&d, p)
        }
        ModelId::FlipCoinHeads => {
            let d = replicate(n, &coin());
            let p = d.query(|s| s.iter().filter(|b| **b).count() >= 2);
            record(&d, p)
        }
        ModelId::Sprinkler => {
            let d = sprinkler_joint();
            let p = d.query(|w| w.grass_wet);
            record(&d, p)
        }
        ModelId::PartialPattern => {
            let d = partial_pattern();
            let p = d.query(|_| true);
            record(&d, p)
        }
    })
}
