//! Metric reconstruction from ordinal comparisons.
//!
//! Starting from a diameter pair, each level inserts an approximate midpoint
//! between every two adjacent chain points, doubling the resolution of a
//! dyadic ruler laid along a near-geodesic. Any sample pair is then measured
//! against that ruler: its upper estimate is the shortest ruler length among
//! chain pairs that are at least as far apart, and the lower estimate the
//! longest among chain pairs at most as far apart. The level used is the
//! deepest one whose ruler is consistent with the oracle on its own points.
//!
//! Everything here is generic over [`Oracle`]; no distances or coordinates
//! are visible.

mod brackets;
mod chain;
mod sort;

use serde::{Deserialize, Serialize};

pub use brackets::{bracket_estimates, bracket_estimates_naive, BracketMatrix, ChainRuler};
pub use chain::{
    approx_midpoint, chain_pseudo_distance, diameter_pair, midpoint_candidates, refine_chain, Chain,
    Dyadic,
};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::oracle::{Oracle, PairRef};

/// Constant of the guaranteed-level formula.
pub fn level_bound_constant() -> f64 {
    12.0 / std::f64::consts::LN_2
}

/// Deepest level that can ever be requested; dyadic numerators are `u64`.
pub const MAX_LEVEL: u32 = 62;

/// Default level cap for `n` points: `ceil(log2 n) + 2`.
pub fn default_level_cap(n: usize) -> u32 {
    let ceil_log2 = usize::BITS - n.saturating_sub(1).leading_zeros();
    (ceil_log2 + 2).min(MAX_LEVEL)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconstructionConfig {
    /// Overrides [`default_level_cap`].
    pub p_cap: Option<u32>,
}

impl ReconstructionConfig {
    pub fn level_cap(&self, n: usize) -> u32 {
        self.p_cap.unwrap_or_else(|| default_level_cap(n))
    }
}

/// What happened at one refinement level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDiagnostic {
    pub p: u32,
    pub exists: bool,
    pub equality_on_chain: bool,
}

/// Chains and level choice, before the all-pairs brackets are computed.
#[derive(Clone, Debug)]
pub struct LevelSelection {
    pub diameter_pair: PairRef,
    pub p_n: u32,
    /// Chains for `p = 0, 1, ...` up to the last level that exists.
    pub chains: Vec<Chain>,
    pub level_diagnostics: Vec<LevelDiagnostic>,
    ruler: ChainRuler,
}

impl LevelSelection {
    /// The sorted ruler at level `p_n`.
    pub fn ruler(&self) -> &ChainRuler {
        &self.ruler
    }
}

/// Builds chains up to the first missing level or `p_cap` and picks `p_n`,
/// the largest level whose brackets agree on all chain pairs.
///
/// All existing levels are checked: agreement need not be monotone in `p`.
pub fn select_level<O: Oracle + ?Sized>(oracle: &O, p_cap: u32) -> Result<LevelSelection> {
    if !(1..=MAX_LEVEL).contains(&p_cap) {
        return Err(Error::Argument(format!("p_cap must be in 1..={MAX_LEVEL}, got {p_cap}")));
    }
    let pair = diameter_pair(oracle)?;
    let mut chains = vec![Chain::initial(pair)];
    let mut diagnostics = Vec::new();
    let mut best: Option<(u32, ChainRuler)> = None;
    for p in 1..=p_cap {
        let Some(next) = refine_chain(oracle, chains.last().expect("level 0"))? else {
            diagnostics.push(LevelDiagnostic { p, exists: false, equality_on_chain: false });
            break;
        };
        let ruler = ChainRuler::new(oracle, &next)?;
        let agree = ruler.brackets_agree_on_chain();
        diagnostics.push(LevelDiagnostic { p, exists: true, equality_on_chain: agree });
        if agree {
            best = Some((p, ruler));
        }
        chains.push(next);
    }
    let Some((p_n, ruler)) = best else {
        return Err(Error::ReconstructionFailed { explored: chains.len() - 1 });
    };
    Ok(LevelSelection { diameter_pair: pair, p_n, chains, level_diagnostics: diagnostics, ruler })
}

/// Output of [`reconstruct`].
#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    pub diameter_pair: PairRef,
    pub p_n: u32,
    pub chains: Vec<Chain>,
    /// `d-` and `d+` at level `p_n` for every sample pair.
    pub brackets: BracketMatrix,
    pub level_diagnostics: Vec<LevelDiagnostic>,
    /// Oracle queries issued by this run.
    pub queries: u64,
}

impl ReconstructionResult {
    /// The estimate `d+` at level `p_n`.
    pub fn estimated_distance(&self) -> SquareMatrix {
        self.brackets.upper_matrix()
    }

    pub fn chain(&self, p: u32) -> Option<&Chain> {
        self.chains.get(p as usize)
    }
}

/// Runs the full pipeline: diameter pair, chains, level choice, and
/// brackets for all `n (n - 1) / 2` pairs.
pub fn reconstruct<O: Oracle + ?Sized>(oracle: &O, config: &ReconstructionConfig) -> Result<ReconstructionResult> {
    let start = oracle.query_count();
    let selection = select_level(oracle, config.level_cap(oracle.len()))?;
    let brackets = selection.ruler.bracket_matrix(oracle)?;
    Ok(ReconstructionResult {
        diameter_pair: selection.diameter_pair,
        p_n: selection.p_n,
        chains: selection.chains,
        brackets,
        level_diagnostics: selection.level_diagnostics,
        queries: oracle.query_count() - start,
    })
}

/// Level guaranteed from the Hausdorff distance of the sample, before
/// clamping at zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelBound {
    pub raw: i64,
    pub level: u32,
    /// `true` when the formula gives nothing (raw value <= 0).
    pub vacuous: bool,
}

/// `floor((-ln(C d_H) - ln(ln(e / d_H))) / ln 2)` with `C = 12 / ln 2`.
pub fn predicted_level_lower_bound(d_h: f64) -> Result<LevelBound> {
    if !(d_h > 0.0 && d_h <= 1.0) {
        return Err(Error::Argument(format!("d_H must be in (0, 1], got {d_h}")));
    }
    let exponent = -(level_bound_constant() * d_h).ln() - (1.0 - d_h.ln()).ln();
    let raw = (exponent / std::f64::consts::LN_2).floor() as i64;
    Ok(LevelBound { raw, level: raw.max(0) as u32, vacuous: raw <= 0 })
}
