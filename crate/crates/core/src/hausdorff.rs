//! Hausdorff distance from a finite sample to the whole space.
//!
//! Since the sample is a subset of the space, `d_H(E_n, E)` reduces to the
//! covering radius `sup_x min_i d(x, x_i)`. It is exact for segments and
//! circles (half the largest gap). For the other spaces the distance-to-sample
//! function is 1-Lipschitz, so a best-first branch and bound over parameter
//! cells brackets its supremum to the requested resolution.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::space::{SampleSet, SpaceKind, SpaceModel};

/// Default absolute resolution (in units of the diameter) for surfaces.
pub const DEFAULT_RESOLUTION: f64 = 1e-4;

/// Lower and upper bounds on the covering radius of a sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HausdorffBracket {
    pub lower: f64,
    pub upper: f64,
}

impl HausdorffBracket {
    fn exact(value: f64) -> Self {
        Self { lower: value, upper: value }
    }
}

/// Hausdorff distance between `sample` and `space`; the upper bracket when
/// the value is not available in closed form.
pub fn hausdorff_to_space(space: &SpaceModel, sample: &SampleSet, resolution: f64) -> Result<f64> {
    if sample.space() != space {
        return Err(Error::Argument(format!(
            "sample was drawn from {}, not from {}",
            sample.space().name(),
            space.name()
        )));
    }
    Ok(hausdorff_bracket(sample, resolution)?.upper)
}

pub fn hausdorff_bracket(sample: &SampleSet, resolution: f64) -> Result<HausdorffBracket> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::Argument(format!("resolution must be positive, got {resolution}")));
    }
    let space = sample.space();
    Ok(match space.kind() {
        SpaceKind::Segment { length } => {
            let mut xs: Vec<f64> = sample.points().iter().map(|p| p[0]).collect();
            xs.sort_by(f64::total_cmp);
            let mut worst = xs[0].max(length - xs[xs.len() - 1]);
            for w in xs.windows(2) {
                worst = worst.max((w[1] - w[0]) / 2.0);
            }
            HausdorffBracket::exact(worst / length)
        }
        SpaceKind::Circle { .. } => {
            let mut angles: Vec<f64> =
                sample.points().iter().map(|p| p[0].rem_euclid(TAU)).collect();
            angles.sort_by(f64::total_cmp);
            let mut gap = angles[0] + TAU - angles[angles.len() - 1];
            for w in angles.windows(2) {
                gap = gap.max(w[1] - w[0]);
            }
            HausdorffBracket::exact(gap / 2.0 / PI)
        }
        _ => branch_and_bound(sample, resolution),
    })
}

#[derive(Clone, Debug)]
struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
    upper: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.upper.total_cmp(&other.upper) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper.total_cmp(&other.upper)
    }
}

fn center(lo: &[f64], hi: &[f64]) -> Vec<f64> {
    lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect()
}

/// Normalized bound on the distance from a cell's center to any point of it.
fn cell_radius(space: &SpaceModel, lo: &[f64], hi: &[f64]) -> f64 {
    match space.kind() {
        SpaceKind::Sphere { .. } => {
            // Meridian leg, then a parallel leg at the widest latitude.
            let widest = if lo[0] <= 0.0 && hi[0] >= 0.0 {
                1.0
            } else {
                lo[0].abs().min(hi[0].abs()).cos()
            };
            (0.5 * (hi[0] - lo[0]) + widest * 0.5 * (hi[1] - lo[1])) / PI
        }
        _ => {
            let half_diag =
                lo.iter().zip(hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt() / 2.0;
            half_diag / space.normalization()
        }
    }
}

fn initial_domain(space: &SpaceModel) -> (Vec<f64>, Vec<f64>, Vec<usize>) {
    match space.kind() {
        SpaceKind::Sphere { .. } => (vec![-FRAC_PI_2, -PI], vec![FRAC_PI_2, PI], vec![1, 2]),
        SpaceKind::FlatTorus { sides } => (vec![0.0, 0.0], sides.to_vec(), vec![1, 1]),
        SpaceKind::EuclideanBox { sides } => (vec![0.0; sides.len()], sides.clone(), vec![1; sides.len()]),
        SpaceKind::Segment { length } => (vec![0.0], vec![*length], vec![1]),
        SpaceKind::Circle { .. } => (vec![0.0], vec![TAU], vec![1]),
    }
}

fn branch_and_bound(sample: &SampleSet, resolution: f64) -> HausdorffBracket {
    let space = sample.space();
    let points = sample.points();
    let nearest = |x: &[f64]| {
        points.iter().map(|p| space.distance_unchecked(x, p)).fold(f64::INFINITY, f64::min)
    };

    let (lo, hi, weights) = initial_domain(space);
    let dim = lo.len();
    let per_axis = ((4 * points.len()).max(64) as f64).powf(1.0 / dim as f64).ceil() as usize;

    let mut lower = 0.0f64;
    let mut heap = BinaryHeap::new();
    let push = |cell_lo: Vec<f64>, cell_hi: Vec<f64>, lower: &mut f64, heap: &mut BinaryHeap<Cell>| {
        let value = nearest(&center(&cell_lo, &cell_hi));
        *lower = lower.max(value);
        let upper = value + cell_radius(space, &cell_lo, &cell_hi);
        if upper > *lower {
            heap.push(Cell { lo: cell_lo, hi: cell_hi, upper });
        }
    };

    let counts: Vec<usize> = weights.iter().map(|w| w * per_axis).collect();
    let total: usize = counts.iter().product();
    for mut idx in 0..total {
        let mut cell_lo = vec![0.0; dim];
        let mut cell_hi = vec![0.0; dim];
        for axis in 0..dim {
            let k = idx % counts[axis];
            idx /= counts[axis];
            let step = (hi[axis] - lo[axis]) / counts[axis] as f64;
            cell_lo[axis] = lo[axis] + step * k as f64;
            cell_hi[axis] = lo[axis] + step * (k + 1) as f64;
        }
        push(cell_lo, cell_hi, &mut lower, &mut heap);
    }

    while let Some(cell) = heap.pop() {
        if cell.upper <= lower + resolution {
            return HausdorffBracket { lower, upper: cell.upper.max(lower) };
        }
        let mid = center(&cell.lo, &cell.hi);
        for corner in 0..(1usize << dim) {
            let mut child_lo = cell.lo.clone();
            let mut child_hi = cell.hi.clone();
            for axis in 0..dim {
                if corner >> axis & 1 == 0 {
                    child_hi[axis] = mid[axis];
                } else {
                    child_lo[axis] = mid[axis];
                }
            }
            push(child_lo, child_hi, &mut lower, &mut heap);
        }
    }
    HausdorffBracket::exact(lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SampleMode;

    fn dense_grid_sup_min(sample: &SampleSet, grid: usize) -> f64 {
        let space = sample.space();
        let probe = space.sample(grid, SampleMode::Grid, 0).unwrap();
        probe
            .points()
            .iter()
            .map(|x| {
                sample
                    .points()
                    .iter()
                    .map(|p| space.distance_unchecked(x, p))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn circle_of_eight_is_one_eighth() {
        let c = SpaceModel::circle();
        let s = c.sample(8, SampleMode::Grid, 0).unwrap();
        let d = hausdorff_to_space(&c, &s, DEFAULT_RESOLUTION).unwrap();
        assert!((d - 0.125).abs() < 1e-12);
        let dense = dense_grid_sup_min(&s, 80_000);
        assert!((dense - 0.125).abs() < 1e-4);
    }

    #[test]
    fn segment_of_five_is_one_eighth() {
        let seg = SpaceModel::segment();
        let s = seg.sample(5, SampleMode::Grid, 0).unwrap();
        let d = hausdorff_to_space(&seg, &s, DEFAULT_RESOLUTION).unwrap();
        assert!((d - 0.125).abs() < 1e-12);
        let dense = dense_grid_sup_min(&s, 100_001);
        assert!((dense - 0.125).abs() < 1e-5);
    }

    #[test]
    fn segment_boundary_gaps_count_in_full() {
        let seg = SpaceModel::segment();
        let s = SampleSet::new(seg.clone(), SampleMode::Grid, 0, vec![vec![0.4], vec![0.6]]).unwrap();
        assert!((hausdorff_to_space(&seg, &s, 1e-3).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_resolution_is_rejected() {
        let c = SpaceModel::circle();
        let s = c.sample(4, SampleMode::Grid, 0).unwrap();
        assert!(matches!(hausdorff_to_space(&c, &s, 0.0), Err(Error::Argument(_))));
        assert!(hausdorff_to_space(&c, &s, -1.0).is_err());
    }

    #[test]
    fn wrong_space_is_rejected() {
        let s = SpaceModel::circle().sample(4, SampleMode::Grid, 0).unwrap();
        assert!(hausdorff_to_space(&SpaceModel::segment(), &s, 1e-3).is_err());
    }

    #[test]
    fn one_dimensional_grids_are_monotone_in_n() {
        for space in [SpaceModel::segment(), SpaceModel::circle()] {
            let mut previous = f64::INFINITY;
            for n in 2..60 {
                let s = space.sample(n, SampleMode::Grid, 0).unwrap();
                let d = hausdorff_to_space(&space, &s, DEFAULT_RESOLUTION).unwrap();
                assert!(d <= previous, "{} n={n}", space.name());
                previous = d;
            }
        }
    }

    #[test]
    fn square_torus_grid_has_known_covering_radius() {
        // m x m grid on the unit torus: the farthest point is a cell center,
        // at half the cell diagonal, i.e. (sqrt(2) / 2m) / (sqrt(2) / 2) = 1/m.
        let t = SpaceModel::flat_torus(1.0, 1.0).unwrap();
        let s = t.sample(64, SampleMode::Grid, 0).unwrap();
        let b = hausdorff_bracket(&s, 1e-5).unwrap();
        assert!(b.lower <= 0.125 + 1e-12 && b.upper >= 0.125 - 1e-12, "{b:?}");
        assert!(b.upper - b.lower <= 1e-5);
    }

    #[test]
    fn surface_brackets_contain_a_dense_probe() {
        for space in [
            SpaceModel::sphere(),
            SpaceModel::flat_torus(2.0, 1.0).unwrap(),
            SpaceModel::euclidean_box(vec![1.0, 1.0]).unwrap(),
        ] {
            let s = space.sample(40, SampleMode::UniformIid, 3).unwrap();
            let b = hausdorff_bracket(&s, 1e-4).unwrap();
            let probe = dense_grid_sup_min(&s, 40_000);
            assert!(probe <= b.upper + 1e-12, "{}: {probe} > {:?}", space.name(), b);
            assert!(b.upper - b.lower <= 1e-4 + 1e-12);
            // The probe grid is coarser than the bracket resolution.
            assert!(probe >= b.lower - 0.02, "{}: {probe} vs {:?}", space.name(), b);
        }
    }

    #[test]
    fn dense_grid_sample_is_within_its_resolution() {
        // 32 x 32 grid on the unit square box: spacing 1/31, covering radius
        // half a cell diagonal over the box diagonal = 1/62.
        let b = SpaceModel::euclidean_box(vec![1.0, 1.0]).unwrap();
        let s = b.sample(1024, SampleMode::Grid, 0).unwrap();
        let eps = 1.0 / 62.0;
        assert!(hausdorff_to_space(&b, &s, 1e-5).unwrap() <= eps + 1e-5);
    }
}
