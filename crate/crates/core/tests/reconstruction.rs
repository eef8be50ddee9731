mod common;

use common::{brute_force_brackets, quantized, CountingOracle};
use ordmetric::evaluation::{chain_deviation, run_pipeline, RunConfig, RunRecord};
use ordmetric::hausdorff::{hausdorff_to_space, DEFAULT_RESOLUTION};
use ordmetric::oracle::{Distortion, Oracle, OrdinalOracle, PairRef};
use ordmetric::reconstruction::{
    bracket_estimates_naive, reconstruct, ChainRuler, ReconstructionConfig, ReconstructionResult,
};
use ordmetric::repair::{repair_additive, RepairTarget};
use ordmetric::space::{SampleMode, SampleSet, SpaceModel};

fn all_spaces() -> Vec<SpaceModel> {
    vec![
        SpaceModel::segment(),
        SpaceModel::circle(),
        SpaceModel::sphere(),
        SpaceModel::flat_torus(1.0, 1.0).unwrap(),
        SpaceModel::flat_torus(1.0, 2.5).unwrap(),
        SpaceModel::euclidean_box(vec![1.0, 1.0]).unwrap(),
        SpaceModel::euclidean_box(vec![2.0, 1.0, 0.5]).unwrap(),
    ]
}

fn record_without_queries(result: &ReconstructionResult) -> String {
    let repaired = repair_additive(&result.brackets.upper_matrix()).unwrap();
    let mut v = serde_json::to_value(RunRecord::new(result, &repaired, RepairTarget::DPlus)).unwrap();
    v.as_object_mut().unwrap().remove("queries");
    v.to_string()
}

#[test]
fn reconstruction_only_needs_comparisons() {
    let sample = SpaceModel::sphere().sample(70, SampleMode::UniformIid, 5).unwrap();
    let reference = reconstruct(&OrdinalOracle::from_sample(&sample), &ReconstructionConfig::default()).unwrap();
    let blind = CountingOracle::new(sample.len(), |a: PairRef, b: PairRef| {
        quantized(&sample, a.first, a.second) <= quantized(&sample, b.first, b.second)
    });
    let result = reconstruct(&blind, &ReconstructionConfig::default()).unwrap();
    assert_eq!(record_without_queries(&result), record_without_queries(&reference));
    assert_eq!(result.queries, blind.query_count());
    assert_eq!(result.queries, reference.queries);
}

#[test]
fn monotone_distortions_leave_the_result_unchanged() {
    let sample = SpaceModel::flat_torus(1.0, 1.0).unwrap().sample(90, SampleMode::UniformIid, 2).unwrap();
    let base = OrdinalOracle::from_sample(&sample);
    let expected = record_without_queries(&reconstruct(&base, &ReconstructionConfig::default()).unwrap());
    for map in [Distortion::Sqrt, Distortion::Saturating, Distortion::Scale(0.37), Distortion::Scale(12.0)] {
        let distorted = base.with_distortion(map);
        let got = reconstruct(&distorted, &ReconstructionConfig::default()).unwrap();
        assert_eq!(record_without_queries(&got), expected, "{map:?}");
    }
    let composed = base.with_distortion(Distortion::Sqrt).with_distortion(Distortion::Saturating);
    let got = reconstruct(&composed, &ReconstructionConfig::default()).unwrap();
    assert_eq!(record_without_queries(&got), expected);
}

fn check_levels(sample: &SampleSet) {
    let oracle = OrdinalOracle::from_sample(sample);
    let result = reconstruct(&oracle, &ReconstructionConfig::default()).unwrap();
    let d_h = hausdorff_to_space(sample.space(), sample, DEFAULT_RESOLUTION).unwrap();
    for p in 1..=result.p_n {
        let ruler = ChainRuler::new(&oracle, result.chain(p).unwrap()).unwrap();
        let brackets = ruler.bracket_matrix(&oracle).unwrap();
        assert!(brackets.sandwich_violations().is_empty(), "level {p}");
    }
    let chains: Vec<Vec<usize>> = result.chains.iter().map(|c| c.members().to_vec()).collect();
    for (p, dev) in chain_deviation(&chains[..=result.p_n as usize], sample) {
        assert!(dev <= 6.0 * p as f64 * d_h + 1e-12, "level {p}: {dev} vs d_H {d_h}");
    }
}

#[test]
fn sandwich_and_chain_bounds_hold_at_every_level() {
    for seed in 0..4 {
        check_levels(&SpaceModel::circle().sample(150, SampleMode::UniformIid, seed).unwrap());
        check_levels(&SpaceModel::sphere().sample(150, SampleMode::UniformIid, seed).unwrap());
        check_levels(&SpaceModel::flat_torus(1.0, 1.0).unwrap().sample(150, SampleMode::UniformIid, seed).unwrap());
    }
}

#[test]
fn small_samples_match_brute_force() {
    for space in all_spaces() {
        for n in 2..=8 {
            for (mode, seed) in [(SampleMode::Grid, 0), (SampleMode::UniformIid, 1), (SampleMode::UniformIid, 2)] {
                let sample = space.sample(n, mode, seed).unwrap();
                let oracle = OrdinalOracle::from_sample(&sample);
                let Ok(result) = reconstruct(&oracle, &ReconstructionConfig::default()) else {
                    continue;
                };
                for chain in &result.chains[1..] {
                    let ruler = ChainRuler::new(&oracle, chain).unwrap();
                    for u in 0..n {
                        for v in 0..n {
                            let fast = ruler.bracket(&oracle, u, v).ok();
                            let naive = bracket_estimates_naive(&oracle, chain, u, v).ok();
                            let truth = brute_force_brackets(&sample, chain, u, v);
                            assert_eq!(fast, naive, "{} n={n} ({u},{v})", space.name());
                            assert_eq!(fast, truth, "{} n={n} ({u},{v})", space.name());
                        }
                    }
                }
                let b = &result.brackets;
                for u in 0..n {
                    for v in 0..n {
                        let truth = brute_force_brackets(&sample, result.chain(result.p_n).unwrap(), u, v);
                        assert_eq!(Some((b.lower(u, v), b.upper(u, v))), truth);
                    }
                }
            }
        }
    }
}

#[test]
fn pipeline_output_is_deterministic() {
    let sample = SpaceModel::euclidean_box(vec![1.0, 2.0]).unwrap().sample(60, SampleMode::UniformIid, 4).unwrap();
    let (_, a) = run_pipeline(&sample, &RunConfig::default()).unwrap();
    let (_, b) = run_pipeline(&sample, &RunConfig::default()).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn estimates_refine_with_the_level_cap() {
    let sample = SpaceModel::segment().sample(33, SampleMode::Grid, 0).unwrap();
    let oracle = OrdinalOracle::from_sample(&sample);
    let truth = sample.distance_matrix();
    let mut previous = f64::INFINITY;
    for cap in 1..=5 {
        let r = reconstruct(&oracle, &ReconstructionConfig { p_cap: Some(cap) }).unwrap();
        assert_eq!(r.p_n, cap);
        let err = r.estimated_distance().sup_distance(&truth).unwrap();
        assert!(err <= 0.5f64.powi(cap as i32) + 1e-12);
        assert!(err <= previous);
        previous = err;
    }
    assert_eq!(previous, 0.0);
}
