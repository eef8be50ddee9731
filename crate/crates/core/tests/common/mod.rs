#![allow(dead_code)]

use std::sync::atomic::{AtomicU64, Ordering};

use ordmetric::oracle::{Oracle, PairRef, COMPARISON_QUANTUM};
use ordmetric::reconstruction::{Chain, Dyadic};
use ordmetric::space::SampleSet;
use ordmetric::Result;

/// Ground-truth distance as the oracle sees it.
pub fn quantized(sample: &SampleSet, u: usize, v: usize) -> f64 {
    (sample.distance(u, v) / COMPARISON_QUANTUM).round() * COMPARISON_QUANTUM
}

/// Brackets computed straight from coordinates, with no oracle involved.
pub fn brute_force_brackets(sample: &SampleSet, chain: &Chain, u: usize, v: usize) -> Option<(Dyadic, Dyadic)> {
    let ids = chain.members();
    let target = quantized(sample, u, v);
    let mut lower = 0u64;
    let mut upper = None::<u64>;
    for i in 0..ids.len() {
        for j in i..ids.len() {
            let d = quantized(sample, ids[i], ids[j]);
            let c = (j - i) as u64;
            if target <= d {
                upper = Some(upper.map_or(c, |x| x.min(c)));
            }
            if d <= target {
                lower = lower.max(c);
            }
        }
    }
    upper.map(|up| (Dyadic::new(lower, chain.level()), Dyadic::new(up, chain.level())))
}

/// Oracle that sees only a comparison callback and counts its calls.
pub struct CountingOracle<F> {
    pub n: usize,
    pub less_eq: F,
    pub calls: AtomicU64,
}

impl<F: Fn(PairRef, PairRef) -> bool> CountingOracle<F> {
    pub fn new(n: usize, less_eq: F) -> Self {
        Self { n, less_eq, calls: AtomicU64::new(0) }
    }
}

impl<F: Fn(PairRef, PairRef) -> bool> Oracle for CountingOracle<F> {
    fn len(&self) -> usize {
        self.n
    }

    fn compare(&self, pq: PairRef, rs: PairRef) -> Result<bool> {
        self.check(pq)?;
        self.check(rs)?;
        self.calls.fetch_add(1, Ordering::Relaxed);
        Ok((self.less_eq)(pq, rs))
    }

    fn query_count(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}
