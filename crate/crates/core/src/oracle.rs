//! The ordinal channel: the only way reconstruction observes a sample.
//!
//! An oracle answers `d(p, q) <= d(r, s)` for pairs of point ids and counts
//! how many such questions it was asked. The distances themselves stay
//! private to [`OrdinalOracle`]; reconstruction code is written against the
//! [`Oracle`] trait and never receives coordinates or numbers.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::SampleSet;

/// Resolution at which ground-truth distances enter the comparison channel.
///
/// Distances computed along different floating-point paths for the same
/// true value (antipodes on a circle grid, say) can differ in the last few
/// bits. Rounding to this dyadic grid turns those into exact ties, and keeps
/// distinct values at least `2^-44` apart so that every supported distortion
/// is strictly increasing on the stored values.
pub const COMPARISON_QUANTUM: f64 = 1.0 / (1u64 << 44) as f64;

/// An unordered pair of point ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PairRef {
    pub first: usize,
    pub second: usize,
}

impl PairRef {
    pub fn new(first: usize, second: usize) -> Self {
        Self { first, second }
    }

    /// The same pair with `first <= second`.
    pub fn sorted(self) -> Self {
        if self.first <= self.second {
            self
        } else {
            Self { first: self.second, second: self.first }
        }
    }
}

impl From<(usize, usize)> for PairRef {
    fn from((first, second): (usize, usize)) -> Self {
        Self { first, second }
    }
}

/// Access to `D_d(w, x, y, z) = 1{d(w, x) <= d(y, z)}` on `n` points.
pub trait Oracle {
    /// Number of points.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `true` iff `d(pq) <= d(rs)`. Each call is one query.
    fn compare(&self, pq: PairRef, rs: PairRef) -> Result<bool>;

    /// Queries issued so far.
    fn query_count(&self) -> u64;

    /// Decides `max(d(a1, z1), d(b1, z1)) <= max(d(a2, z2), d(b2, z2))`.
    ///
    /// One query picks the larger side of each maximum and a third compares
    /// the winners. A side whose two pairs coincide (`a == b`) needs no query.
    fn compare_max(
        &self,
        a1: usize,
        b1: usize,
        z1: usize,
        a2: usize,
        b2: usize,
        z2: usize,
    ) -> Result<bool> {
        let left = self.larger_arm(a1, b1, z1)?;
        let right = self.larger_arm(a2, b2, z2)?;
        self.compare(left, right)
    }

    #[doc(hidden)]
    fn larger_arm(&self, a: usize, b: usize, z: usize) -> Result<PairRef> {
        let (pa, pb) = (PairRef::new(a, z), PairRef::new(b, z));
        if a == b {
            self.check(pa)?;
            return Ok(pa);
        }
        Ok(if self.compare(pa, pb)? { pb } else { pa })
    }

    #[doc(hidden)]
    fn check(&self, p: PairRef) -> Result<()> {
        let n = self.len();
        if p.first >= n || p.second >= n {
            return Err(Error::Argument(format!(
                "pair ({}, {}) out of range for {n} points",
                p.first, p.second
            )));
        }
        Ok(())
    }
}

/// A strictly increasing map `l` with `l(0) = 0`, applied to distances
/// before comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Distortion {
    Sqrt,
    /// `x / (1 + x)`.
    Saturating,
    Scale(f64),
}

impl Distortion {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Distortion::Sqrt => x.sqrt(),
            Distortion::Saturating => x / (1.0 + x),
            Distortion::Scale(c) => c * x,
        }
    }
}

/// Oracle backed by a private distance table.
#[derive(Debug)]
pub struct OrdinalOracle {
    n: usize,
    distances: Arc<[f64]>,
    distortions: Vec<Distortion>,
    queries: AtomicU64,
}

impl OrdinalOracle {
    /// Oracle over the ground-truth distances of a sample.
    pub fn from_sample(sample: &SampleSet) -> Self {
        let n = sample.len();
        let mut distances = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let q = (sample.distance(i, j) / COMPARISON_QUANTUM).round() * COMPARISON_QUANTUM;
                distances[i * n + j] = q;
                distances[j * n + i] = q;
            }
        }
        Self::from_table(n, distances)
    }

    /// Oracle over an arbitrary symmetric dissimilarity `f(i, j)`, used as is.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut distances = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = f(i, j);
                distances[i * n + j] = d;
                distances[j * n + i] = d;
            }
        }
        Self::from_table(n, distances)
    }

    fn from_table(n: usize, distances: Vec<f64>) -> Self {
        Self { n, distances: distances.into(), distortions: Vec::new(), queries: AtomicU64::new(0) }
    }

    /// A fresh oracle answering through `map ∘ d`.
    pub fn with_distortion(&self, map: Distortion) -> Self {
        let mut distortions = self.distortions.clone();
        distortions.push(map);
        let distances: Vec<f64> = self.distances.iter().map(|&d| map.apply(d)).collect();
        Self { n: self.n, distances: distances.into(), distortions, queries: AtomicU64::new(0) }
    }

    /// Distortions applied so far, innermost first.
    pub fn distortions(&self) -> &[Distortion] {
        &self.distortions
    }

    #[inline]
    fn value(&self, p: PairRef) -> f64 {
        self.distances[p.first * self.n + p.second]
    }
}

impl Oracle for OrdinalOracle {
    fn len(&self) -> usize {
        self.n
    }

    fn compare(&self, pq: PairRef, rs: PairRef) -> Result<bool> {
        self.check(pq)?;
        self.check(rs)?;
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(self.value(pq) <= self.value(rs))
    }

    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

impl<O: Oracle + ?Sized> Oracle for &O {
    fn len(&self) -> usize {
        (**self).len()
    }

    fn compare(&self, pq: PairRef, rs: PairRef) -> Result<bool> {
        (**self).compare(pq, rs)
    }

    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}
