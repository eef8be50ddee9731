//! Upper and lower bracket estimates against a chain.
//!
//! For a chain at level `p`, every position pair `(i, j)` with `i <= j`
//! carries a dyadic length `c = (j - i) 2^-p` and an unknown true distance.
//! The pairs are comparison-sorted by distance once and grouped into tie
//! classes. For a query pair `(u, v)`:
//!
//! - the upper bracket is the smallest `c` among chain pairs at least as far
//!   apart as `(u, v)`,
//! - the lower bracket is the largest `c` among chain pairs at most as far
//!   apart.
//!
//! Both are prefix/suffix extrema over the tie classes, so one binary search
//! plus a tie check answers a query in `O(log m)` comparisons.

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::oracle::{Oracle, PairRef};

use super::chain::{Chain, Dyadic};
use super::sort::merge_sort_by;

#[derive(Clone, Copy, Debug)]
struct TieClass {
    representative: PairRef,
    /// Largest `c` (numerator) over this class and all closer classes.
    lower: u64,
    /// Smallest `c` (numerator) over this class and all farther classes.
    upper: u64,
}

/// Chain position pairs sorted by distance, ready for bracket queries.
#[derive(Clone, Debug)]
pub struct ChainRuler {
    level: u32,
    classes: Vec<TieClass>,
}

impl ChainRuler {
    /// Sorts all `m (m + 1) / 2` position pairs of `chain` with the oracle.
    pub fn new<O: Oracle + ?Sized>(oracle: &O, chain: &Chain) -> Result<Self> {
        let ids = chain.members();
        let m = ids.len();
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(m * (m + 1) / 2);
        for i in 0..m {
            for j in i..m {
                pairs.push((i as u32, j as u32));
            }
        }
        let as_ids = |&(i, j): &(u32, u32)| PairRef::new(ids[i as usize], ids[j as usize]);
        // d(a) < d(b) iff not d(b) <= d(a).
        merge_sort_by(&mut pairs, |a, b| Ok::<_, Error>(!oracle.compare(as_ids(b), as_ids(a))?))?;

        let mut classes: Vec<TieClass> = Vec::new();
        let mut previous: Option<PairRef> = None;
        for pair in &pairs {
            let id_pair = as_ids(pair);
            let c = u64::from(pair.1 - pair.0);
            // Sorted, so d(prev) <= d(cur); a tie iff d(cur) <= d(prev).
            let tied = match previous {
                Some(prev) => oracle.compare(id_pair, prev)?,
                None => false,
            };
            if tied {
                let last = classes.last_mut().expect("tie implies a class");
                last.lower = last.lower.max(c);
                last.upper = last.upper.min(c);
            } else {
                classes.push(TieClass { representative: id_pair, lower: c, upper: c });
            }
            previous = Some(id_pair);
        }
        for k in 1..classes.len() {
            classes[k].lower = classes[k].lower.max(classes[k - 1].lower);
        }
        for k in (0..classes.len().saturating_sub(1)).rev() {
            classes[k].upper = classes[k].upper.min(classes[k + 1].upper);
        }
        Ok(Self { level: chain.level(), classes })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of distinct distances among chain pairs.
    pub fn tie_classes(&self) -> usize {
        self.classes.len()
    }

    /// Whether `d+ = d-` holds on every pair of chain points.
    pub fn brackets_agree_on_chain(&self) -> bool {
        self.classes.iter().all(|c| c.lower == c.upper)
    }

    /// `(d-(u, v), d+(u, v))` at this chain's level.
    pub fn bracket<O: Oracle + ?Sized>(&self, oracle: &O, u: usize, v: usize) -> Result<(Dyadic, Dyadic)> {
        let uv = PairRef::new(u, v);
        oracle.check(uv)?;
        // First class at least as far as (u, v).
        let (mut lo, mut hi) = (0, self.classes.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if oracle.compare(uv, self.classes[mid].representative)? {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        if lo == self.classes.len() {
            return Err(Error::Argument(format!(
                "pair ({u}, {v}) is farther apart than the chain endpoints"
            )));
        }
        let upper = self.classes[lo].upper;
        // Class 0 holds the zero-length pairs, so it is always a tie there.
        let tied = lo == 0 || oracle.compare(self.classes[lo].representative, uv)?;
        let lower = if tied { self.classes[lo].lower } else { self.classes[lo - 1].lower };
        Ok((Dyadic::new(lower, self.level), Dyadic::new(upper, self.level)))
    }

    /// Brackets for every pair of the `n` oracle points.
    pub fn bracket_matrix<O: Oracle + ?Sized>(&self, oracle: &O) -> Result<BracketMatrix> {
        let n = oracle.len();
        let mut out = BracketMatrix {
            n,
            level: self.level,
            lower: vec![0; n * n],
            upper: vec![0; n * n],
        };
        for u in 0..n {
            // Distance zero falls in the first class.
            out.lower[u * n + u] = self.classes[0].lower;
            for v in (u + 1)..n {
                let (lower, upper) = self.bracket(oracle, u, v)?;
                out.set(u, v, lower.numerator, upper.numerator);
            }
        }
        Ok(out)
    }
}

/// `(d-(u, v), d+(u, v))` for one pair, sorting the chain pairs first.
///
/// Callers answering many queries against the same chain should build a
/// [`ChainRuler`] once instead.
pub fn bracket_estimates<O: Oracle + ?Sized>(
    oracle: &O,
    chain: &Chain,
    u: usize,
    v: usize,
) -> Result<(Dyadic, Dyadic)> {
    ChainRuler::new(oracle, chain)?.bracket(oracle, u, v)
}

/// Reference implementation of the brackets by a full scan over chain pairs.
pub fn bracket_estimates_naive<O: Oracle + ?Sized>(
    oracle: &O,
    chain: &Chain,
    u: usize,
    v: usize,
) -> Result<(Dyadic, Dyadic)> {
    let uv = PairRef::new(u, v);
    let ids = chain.members();
    let mut lower = 0u64;
    let mut upper = u64::MAX;
    for i in 0..ids.len() {
        for j in i..ids.len() {
            let ab = PairRef::new(ids[i], ids[j]);
            let c = (j - i) as u64;
            if oracle.compare(uv, ab)? {
                upper = upper.min(c);
            }
            if oracle.compare(ab, uv)? {
                lower = lower.max(c);
            }
        }
    }
    if upper == u64::MAX {
        return Err(Error::Argument(format!(
            "pair ({u}, {v}) is farther apart than the chain endpoints"
        )));
    }
    Ok((Dyadic::new(lower, chain.level()), Dyadic::new(upper, chain.level())))
}

/// `d-` and `d+` over all sample pairs at one level, as dyadic numerators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketMatrix {
    n: usize,
    level: u32,
    lower: Vec<u64>,
    upper: Vec<u64>,
}

impl BracketMatrix {
    fn set(&mut self, u: usize, v: usize, lower: u64, upper: u64) {
        let n = self.n;
        self.lower[u * n + v] = lower;
        self.lower[v * n + u] = lower;
        self.upper[u * n + v] = upper;
        self.upper[v * n + u] = upper;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn lower(&self, u: usize, v: usize) -> Dyadic {
        Dyadic::new(self.lower[u * self.n + v], self.level)
    }

    pub fn upper(&self, u: usize, v: usize) -> Dyadic {
        Dyadic::new(self.upper[u * self.n + v], self.level)
    }

    pub fn lower_matrix(&self) -> SquareMatrix {
        SquareMatrix::from_fn(self.n, |u, v| self.lower(u, v).value())
    }

    pub fn upper_matrix(&self) -> SquareMatrix {
        SquareMatrix::from_fn(self.n, |u, v| self.upper(u, v).value())
    }

    /// Pairs violating `lower <= upper <= lower + 2^-p`, as `(u, v)` with `u <= v`.
    pub fn sandwich_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u..self.n {
                let (lo, up) = (self.lower[u * self.n + v], self.upper[u * self.n + v]);
                if lo > up || up > lo + 1 {
                    out.push((u, v));
                }
            }
        }
        out
    }
}
