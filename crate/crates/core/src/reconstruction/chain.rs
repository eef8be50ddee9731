//! Diameter pair, approximate midpoints and dyadic midpoint chains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{Oracle, PairRef};

/// A dyadic rational `numerator / 2^level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    pub numerator: u64,
    pub level: u32,
}

impl Dyadic {
    pub fn new(numerator: u64, level: u32) -> Self {
        Self { numerator, level }
    }

    pub fn value(self) -> f64 {
        self.numerator as f64 / (1u64 << self.level) as f64
    }
}

/// The chain `A_p`: `2^p + 1` point ids, anchored at the diameter pair.
///
/// Ids may repeat; the ruler is indexed by position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    level: u32,
    members: Vec<usize>,
}

impl Chain {
    /// The level-0 chain `(a, b)`.
    pub fn initial(pair: PairRef) -> Self {
        Self { level: 0, members: vec![pair.first, pair.second] }
    }

    pub fn new(level: u32, members: Vec<usize>) -> Result<Self> {
        if level >= 63 || members.len() as u64 != (1u64 << level) + 1 {
            return Err(Error::Argument(format!(
                "a level-{level} chain needs 2^{level} + 1 members, got {}",
                members.len()
            )));
        }
        Ok(Self { level, members })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn endpoints(&self) -> PairRef {
        PairRef::new(self.members[0], self.members[self.members.len() - 1])
    }

    /// `c_n` between two chain positions: `|i - j| 2^-p`.
    pub fn pseudo_distance(&self, i: usize, j: usize) -> Result<Dyadic> {
        let m = self.members.len();
        if i >= m || j >= m {
            return Err(Error::Argument(format!(
                "chain position ({i}, {j}) out of range for {m} members"
            )));
        }
        Ok(Dyadic::new(i.abs_diff(j) as u64, self.level))
    }
}

/// `c_n(a_i, a_j)` for positions `i`, `j` of `chain`.
pub fn chain_pseudo_distance(chain: &Chain, i: usize, j: usize) -> Result<Dyadic> {
    chain.pseudo_distance(i, j)
}

/// A pair realizing the largest distance, by a running-maximum scan.
///
/// Among maximal pairs, the lexicographically smallest `(first, second)` is
/// returned.
pub fn diameter_pair<O: Oracle + ?Sized>(oracle: &O) -> Result<PairRef> {
    let n = oracle.len();
    if n < 2 {
        return Err(Error::Argument(format!("need at least 2 points, got {n}")));
    }
    let mut best = PairRef::new(0, 1);
    let mut improved = false;
    for i in 0..n {
        for j in (i + 1)..n {
            let candidate = PairRef::new(i, j);
            if candidate == best {
                continue;
            }
            if !oracle.compare(candidate, best)? {
                best = candidate;
                improved = true;
            }
        }
    }
    // Without a strict improvement the first pair may still be at distance 0.
    if !improved && oracle.compare(best, PairRef::new(0, 0))? {
        return Err(Error::DegenerateSample);
    }
    Ok(best)
}

/// `M^n_ab`: ids `z` other than `a`, `b` with `max(d(a, z), d(b, z)) <= d(a, b)`.
pub fn midpoint_candidates<O: Oracle + ?Sized>(oracle: &O, a: usize, b: usize) -> Result<Vec<usize>> {
    let ab = PairRef::new(a, b);
    oracle.check(ab)?;
    let mut out = Vec::new();
    for z in 0..oracle.len() {
        if z == a || z == b {
            continue;
        }
        if oracle.compare(PairRef::new(a, z), ab)? && oracle.compare(PairRef::new(b, z), ab)? {
            out.push(z);
        }
    }
    Ok(out)
}

/// `m^n_ab`: the candidate minimizing `max(d(a, z), d(b, z))`, smallest id on
/// ties; `None` when there is no candidate.
pub fn approx_midpoint<O: Oracle + ?Sized>(oracle: &O, a: usize, b: usize) -> Result<Option<usize>> {
    let candidates = midpoint_candidates(oracle, a, b)?;
    let Some((&first, rest)) = candidates.split_first() else {
        return Ok(None);
    };
    let mut best = first;
    for &z in rest {
        if !oracle.compare_max(a, b, best, a, b, z)? {
            best = z;
        }
    }
    Ok(Some(best))
}

/// `A_{p+1}` from `A_p`, or `None` if some adjacent pair has no midpoint.
pub fn refine_chain<O: Oracle + ?Sized>(oracle: &O, chain: &Chain) -> Result<Option<Chain>> {
    let mut members = Vec::with_capacity(2 * chain.len() - 1);
    members.push(chain.members[0]);
    for w in chain.members.windows(2) {
        match approx_midpoint(oracle, w[0], w[1])? {
            Some(m) => {
                members.push(m);
                members.push(w[1]);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(Chain { level: chain.level + 1, members }))
}
