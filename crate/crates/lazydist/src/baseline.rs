//! Strict list-of-pairs distributions.
//!
//! This is the textbook representation: a distribution is a `Vec` of
//! event/probability pairs, `bind` is a literal concat-map, and a query
//! filters and sums. Every pair is materialized, nothing is coalesced, and
//! nothing is pruned — the module exists to be honest and slow, as the
//! reference point the lazy engine is measured against and as the
//! independent oracle for derived probability values in the test suite.

use std::fmt;

/// A finite distribution as explicit event/probability pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct LDist<T> {
    pairs: Vec<(T, f64)>,
}

/// Validation failure when building a distribution from explicit weights.
#[derive(Clone, Debug, PartialEq)]
pub enum BaselineError {
    /// A listed probability is outside the half-open interval (0, 1].
    BadProbability { index: usize, value: f64 },
    /// The probabilities of the zipped prefix do not sum to 1.0 (±1e-9).
    BadTotal { total: f64 },
}

impl fmt::Display for BaselineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineError::BadProbability { index, value } => {
                write!(f, "probability #{index} is {value}, outside (0, 1]")
            }
            BaselineError::BadTotal { total } => {
                write!(f, "probabilities sum to {total}, expected 1.0 (±1e-9)")
            }
        }
    }
}

impl std::error::Error for BaselineError {}

impl<T> LDist<T> {
    /// The distribution that yields `x` with probability 1.
    pub fn certainly(x: T) -> Self {
        LDist { pairs: vec![(x, 1.0)] }
    }

    /// The empty distribution: no pairs at all. This is what a partial
    /// function returns for an unmatched case; queries over it sum to 0.
    pub fn empty() -> Self {
        LDist { pairs: Vec::new() }
    }

    /// Pair events with explicit probabilities, zipping and stopping at the
    /// shorter side, and validate the result: every probability must lie in
    /// (0, 1] and the total must be 1.0 within 1e-9.
    pub fn enum_dist(xs: Vec<T>, ps: &[f64]) -> Result<Self, BaselineError> {
        let pairs: Vec<(T, f64)> = xs.into_iter().zip(ps.iter().copied()).collect();
        let mut total = 0.0;
        for (index, (_, p)) in pairs.iter().enumerate() {
            if !(*p > 0.0 && *p <= 1.0) {
                return Err(BaselineError::BadProbability { index, value: *p });
            }
            total += *p;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(BaselineError::BadTotal { total });
        }
        Ok(LDist { pairs })
    }

    /// Uniform distribution over the given events.
    pub fn uniform(xs: Vec<T>) -> Result<Self, BaselineError> {
        let n = xs.len();
        if n == 0 {
            return Err(BaselineError::BadTotal { total: 0.0 });
        }
        let ps = vec![1.0 / n as f64; n];
        LDist::enum_dist(xs, &ps)
    }

    /// Monadic bind as a literal concat-map: for every pair, run `f` on the
    /// event and scale the resulting pairs by the incoming probability.
    /// Duplicate events are kept separate.
    pub fn bind<U>(&self, f: impl Fn(&T) -> LDist<U>) -> LDist<U> {
        let mut out = Vec::new();
        for (x, p) in &self.pairs {
            for (y, q) in f(x).pairs {
                out.push((y, p * q));
            }
        }
        LDist { pairs: out }
    }

    /// `join_with f d1 d2` combines two distributions pointwise, exactly as
    /// two nested binds would.
    pub fn join_with<U, V>(f: impl Fn(&T, &U) -> V, d1: &LDist<T>, d2: &LDist<U>) -> LDist<V> {
        d1.bind(|x| d2.bind(|y| LDist::certainly(f(x, y))))
    }

    /// Total probability of the events satisfying `pred`: filter, then sum
    /// left to right.
    pub fn query(&self, pred: impl Fn(&T) -> bool) -> f64 {
        self.pairs
            .iter()
            .filter(|(x, _)| pred(x))
            .map(|(_, p)| *p)
            .sum()
    }

    /// Number of materialized pairs.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.len() == 0
    }

    pub fn pairs(&self) -> &[(T, f64)] {
        &self.pairs
    }
}

/// The n-fold independent product of a distribution, with tuple events.
///
/// Semantically this is `join_with(cons, d, replicate(n-1, d))` unfolded all
/// the way down, and it produces the same pairs in the same lexicographic
/// order (leftmost position outermost). It is written as a direct odometer
/// product instead of n recursive binds so that only the final `|d|^n`-pair
/// vector is ever allocated: events go into exact-sized `Box<[T]>` slices and
/// the vector capacity is reserved up front when it fits. At allsix n=10 that
/// is 60,466,176 pairs, which only fits in memory without intermediate
/// layers. When `|d|^n` overflows usize the vector grows unreserved until
/// the allocator gives out — the run is infeasible and is expected to be
/// killed by a benchmark timeout.
pub fn replicate<T: Clone>(n: u32, d: &LDist<T>) -> LDist<Box<[T]>> {
    let k = d.pairs.len();
    if n == 0 {
        return LDist::certainly(Vec::new().into_boxed_slice());
    }
    if k == 0 {
        return LDist::empty();
    }
    let cap = (k as u128)
        .checked_pow(n)
        .and_then(|c| usize::try_from(c).ok());
    let mut pairs: Vec<(Box<[T]>, f64)> = match cap {
        Some(c) => Vec::with_capacity(c),
        None => Vec::new(),
    };
    let width = n as usize;
    let mut idx = vec![0usize; width];
    loop {
        let mut event = Vec::with_capacity(width);
        let mut p = 1.0;
        for &i in &idx {
            let (x, q) = &d.pairs[i];
            event.push(x.clone());
            p *= *q;
        }
        pairs.push((event.into_boxed_slice(), p));
        // Odometer: rightmost position counts fastest, so the pair order is
        // lexicographic in the leftmost-outermost sense of nested binds.
        let mut pos = width;
        loop {
            if pos == 0 {
                return LDist { pairs };
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < k {
                break;
            }
            idx[pos] = 0;
        }
    }
}
