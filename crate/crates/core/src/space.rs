//! Analytic compact geodesic spaces used as ground truth.
//!
//! Every model divides its natural geodesic metric by the analytic diameter,
//! so distances always lie in `[0, 1]`. Reconstruction never sees these
//! models directly: it only receives an [`crate::oracle::OrdinalOracle`]
//! built from a [`SampleSet`].
//!
//! Coordinates are intrinsic:
//!
//! | kind            | coordinates                         |
//! |-----------------|-------------------------------------|
//! | `segment`       | `[x]`, `0 <= x <= length`           |
//! | `circle`        | `[angle]`, any finite angle         |
//! | `sphere`        | `[lat, lon]` in radians             |
//! | `flat-torus`    | `[x, y]`, periodic in both sides    |
//! | `euclidean-box` | `[x_1, ..., x_k]`, `0 <= x_i <= s_i` |

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Intrinsic coordinates of a point.
pub type Point = Vec<f64>;

const LATITUDE_SLACK: f64 = 1e-12;

/// The family of a space together with its natural-size parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum SpaceKind {
    Segment {
        length: f64,
    },
    Circle {
        radius: f64,
    },
    Sphere {
        radius: f64,
    },
    #[serde(alias = "torus")]
    FlatTorus {
        sides: [f64; 2],
    },
    #[serde(alias = "box")]
    EuclideanBox {
        sides: Vec<f64>,
    },
}

impl SpaceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceKind::Segment { .. } => "segment",
            SpaceKind::Circle { .. } => "circle",
            SpaceKind::Sphere { .. } => "sphere",
            SpaceKind::FlatTorus { .. } => "flat-torus",
            SpaceKind::EuclideanBox { .. } => "euclidean-box",
        }
    }
}

/// An analytic geodesic space with its metric normalized to diameter 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceKind", into = "SpaceKind")]
pub struct SpaceModel {
    kind: SpaceKind,
    normalization: f64,
}

impl TryFrom<SpaceKind> for SpaceModel {
    type Error = Error;

    fn try_from(kind: SpaceKind) -> Result<Self> {
        SpaceModel::new(kind)
    }
}

impl From<SpaceModel> for SpaceKind {
    fn from(model: SpaceModel) -> Self {
        model.kind
    }
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!("{name} must be positive and finite, got {value}")))
    }
}

impl SpaceModel {
    pub fn new(kind: SpaceKind) -> Result<Self> {
        let normalization = match &kind {
            SpaceKind::Segment { length } => {
                positive("segment length", *length)?;
                *length
            }
            SpaceKind::Circle { radius } => {
                positive("circle radius", *radius)?;
                PI * radius
            }
            SpaceKind::Sphere { radius } => {
                positive("sphere radius", *radius)?;
                PI * radius
            }
            SpaceKind::FlatTorus { sides } => {
                positive("torus side", sides[0])?;
                positive("torus side", sides[1])?;
                // The point farthest from the origin is the half-period corner.
                torus_natural(sides, &[0.0, 0.0], &[sides[0] / 2.0, sides[1] / 2.0])
            }
            SpaceKind::EuclideanBox { sides } => {
                if sides.is_empty() {
                    return Err(Error::Argument("box needs at least one side".into()));
                }
                for s in sides {
                    positive("box side", *s)?;
                }
                sides.iter().map(|s| s * s).sum::<f64>().sqrt()
            }
        };
        Ok(Self { kind, normalization })
    }

    pub fn segment() -> Self {
        Self::new(SpaceKind::Segment { length: 1.0 }).expect("unit segment")
    }

    pub fn circle() -> Self {
        Self::new(SpaceKind::Circle { radius: 1.0 }).expect("unit circle")
    }

    pub fn sphere() -> Self {
        Self::new(SpaceKind::Sphere { radius: 1.0 }).expect("unit sphere")
    }

    pub fn flat_torus(a: f64, b: f64) -> Result<Self> {
        Self::new(SpaceKind::FlatTorus { sides: [a, b] })
    }

    pub fn euclidean_box(sides: Vec<f64>) -> Result<Self> {
        Self::new(SpaceKind::EuclideanBox { sides })
    }

    /// Builds a model with default parameters from a kind name.
    ///
    /// Accepts `segment`, `circle`, `sphere`, `flat-torus` (or `torus`) and
    /// `euclidean-box` (or `box`, the unit square).
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "segment" => Ok(Self::segment()),
            "circle" => Ok(Self::circle()),
            "sphere" => Ok(Self::sphere()),
            "flat-torus" | "torus" => Self::flat_torus(1.0, 1.0),
            "euclidean-box" | "box" => Self::euclidean_box(vec![1.0, 1.0]),
            other => Err(Error::Argument(format!("unknown space kind `{other}`"))),
        }
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Factor dividing the natural geodesic metric.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn intrinsic_dimension(&self) -> usize {
        match &self.kind {
            SpaceKind::Segment { .. } | SpaceKind::Circle { .. } => 1,
            SpaceKind::Sphere { .. } | SpaceKind::FlatTorus { .. } => 2,
            SpaceKind::EuclideanBox { sides } => sides.len(),
        }
    }

    /// Number of stored coordinates per point.
    pub fn coordinate_len(&self) -> usize {
        self.intrinsic_dimension()
    }

    pub fn validate(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.coordinate_len() {
            return Err(Error::Domain(format!(
                "{} expects {} coordinate(s), got {}",
                self.name(),
                self.coordinate_len(),
                x.len()
            )));
        }
        if let Some(bad) = x.iter().find(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite coordinate {bad}")));
        }
        match &self.kind {
            SpaceKind::Segment { length } => {
                if x[0] < 0.0 || x[0] > *length {
                    return Err(Error::Domain(format!(
                        "segment coordinate {} outside [0, {length}]",
                        x[0]
                    )));
                }
            }
            SpaceKind::Sphere { .. } => {
                if x[0].abs() > FRAC_PI_2 + LATITUDE_SLACK {
                    return Err(Error::Domain(format!("latitude {} outside [-pi/2, pi/2]", x[0])));
                }
            }
            SpaceKind::EuclideanBox { sides } => {
                for (i, (c, s)) in x.iter().zip(sides).enumerate() {
                    if *c < 0.0 || c > s {
                        return Err(Error::Domain(format!(
                            "box coordinate {i} = {c} outside [0, {s}]"
                        )));
                    }
                }
            }
            SpaceKind::Circle { .. } | SpaceKind::FlatTorus { .. } => {}
        }
        Ok(())
    }

    /// Normalized geodesic distance, in `[0, 1]`.
    pub fn geodesic_distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(self.distance_unchecked(x, y))
    }

    /// Same as [`geodesic_distance`](Self::geodesic_distance) for coordinates
    /// already known to be valid.
    pub fn distance_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        // Evaluate in a canonical argument order so the result is symmetric bit for bit.
        let (x, y) = if x.iter().map(|v| v.to_bits()).lt(y.iter().map(|v| v.to_bits())) {
            (x, y)
        } else {
            (y, x)
        };
        let natural = match &self.kind {
            SpaceKind::Segment { .. } => (x[0] - y[0]).abs(),
            SpaceKind::Circle { radius } => radius * circle_angle(x[0], y[0]),
            SpaceKind::Sphere { radius } => radius * great_circle_angle(x[0], x[1], y[0], y[1]),
            SpaceKind::FlatTorus { sides } => torus_natural(sides, x, y),
            SpaceKind::EuclideanBox { .. } => {
                x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
            }
        };
        (natural / self.normalization).min(1.0)
    }

    /// Draws a sample of `n` points.
    pub fn sample(&self, n: usize, mode: SampleMode, seed: u64) -> Result<SampleSet> {
        if n < 2 {
            return Err(Error::Argument(format!("sample size must be at least 2, got {n}")));
        }
        let points = match mode {
            SampleMode::Grid => self.grid_points(n),
            SampleMode::UniformIid => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n).map(|_| self.uniform_point(&mut rng)).collect()
            }
        };
        SampleSet::new(self.clone(), mode, seed, points)
    }

    /// One draw from the normalized uniform (volume) measure.
    pub fn uniform_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match &self.kind {
            SpaceKind::Segment { length } => vec![rng.random::<f64>() * length],
            SpaceKind::Circle { .. } => vec![rng.random::<f64>() * TAU],
            SpaceKind::Sphere { .. } => {
                // Area-uniform: z = sin(lat) is uniform on [-1, 1].
                let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
                let lon = TAU * rng.random::<f64>() - PI;
                vec![z.clamp(-1.0, 1.0).asin(), lon]
            }
            SpaceKind::FlatTorus { sides } => {
                vec![rng.random::<f64>() * sides[0], rng.random::<f64>() * sides[1]]
            }
            SpaceKind::EuclideanBox { sides } => {
                sides.iter().map(|s| rng.random::<f64>() * s).collect()
            }
        }
    }

    fn grid_points(&self, n: usize) -> Vec<Point> {
        match &self.kind {
            SpaceKind::Segment { length } => {
                (0..n).map(|i| vec![length * i as f64 / (n - 1) as f64]).collect()
            }
            SpaceKind::Circle { .. } => (0..n).map(|i| vec![TAU * i as f64 / n as f64]).collect(),
            SpaceKind::Sphere { .. } => fibonacci_sphere(n),
            SpaceKind::FlatTorus { sides } => match exact_root(n, 2) {
                Some(m) => (0..n)
                    .map(|i| {
                        vec![
                            sides[0] * (i / m) as f64 / m as f64,
                            sides[1] * (i % m) as f64 / m as f64,
                        ]
                    })
                    .collect(),
                None => {
                    // Fibonacci lattice on the unit square.
                    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
                    (0..n)
                        .map(|i| {
                            vec![
                                sides[0] * i as f64 / n as f64,
                                sides[1] * (i as f64 * inv_phi).fract(),
                            ]
                        })
                        .collect()
                }
            },
            SpaceKind::EuclideanBox { sides } => box_grid(sides, n),
        }
    }
}

fn circle_angle(a: f64, b: f64) -> f64 {
    let delta = (a - b).rem_euclid(TAU);
    delta.min(TAU - delta)
}

fn great_circle_angle(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (s1, c1) = lat1.sin_cos();
    let (s2, c2) = lat2.sin_cos();
    let (sd, cd) = (lon2 - lon1).sin_cos();
    let y = ((c2 * sd).powi(2) + (c1 * s2 - s1 * c2 * cd).powi(2)).sqrt();
    let x = s1 * s2 + c1 * c2 * cd;
    y.atan2(x)
}

/// Flat-torus distance: minimum Euclidean length over the nine nearest
/// lattice translates.
fn torus_natural(sides: &[f64; 2], x: &[f64], y: &[f64]) -> f64 {
    let dx = (x[0] - y[0]).rem_euclid(sides[0]);
    let dy = (x[1] - y[1]).rem_euclid(sides[1]);
    let mut best = f64::INFINITY;
    for i in -1..=1 {
        for j in -1..=1 {
            let ex = dx + i as f64 * sides[0];
            let ey = dy + j as f64 * sides[1];
            best = best.min((ex * ex + ey * ey).sqrt());
        }
    }
    best
}

fn exact_root(n: usize, k: usize) -> Option<usize> {
    let guess = (n as f64).powf(1.0 / k as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&m| m >= 2 && m.checked_pow(k as u32) == Some(n))
}

fn fibonacci_sphere(n: usize) -> Vec<Point> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let lon = (i as f64 * golden_angle).rem_euclid(TAU) - PI;
            vec![z.asin(), lon]
        })
        .collect()
}

fn box_grid(sides: &[f64], n: usize) -> Vec<Point> {
    let k = sides.len();
    if let Some(m) = exact_root(n, k) {
        return (0..n)
            .map(|mut idx| {
                let mut p = vec![0.0; k];
                for axis in (0..k).rev() {
                    p[axis] = sides[axis] * (idx % m) as f64 / (m - 1) as f64;
                    idx /= m;
                }
                p
            })
            .collect();
    }
    // Additive recurrence with the generalized golden ratio of dimension k.
    let mut g = 2.0f64;
    for _ in 0..64 {
        g = (1.0 + g).powf(1.0 / (k as f64 + 1.0));
    }
    let alphas: Vec<f64> = (1..=k).map(|j| (1.0 / g.powi(j as i32)).fract()).collect();
    (0..n)
        .map(|i| {
            alphas
                .iter()
                .zip(sides)
                .map(|(a, s)| s * (0.5 + a * i as f64).fract())
                .collect()
        })
        .collect()
}

/// How a sample was drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    Grid,
    UniformIid,
}

/// A finite sample `x_0, ..., x_{n-1}` of a space, with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampleFile", into = "SampleFile")]
pub struct SampleSet {
    space: SpaceModel,
    mode: SampleMode,
    seed: u64,
    points: Vec<Point>,
}

/// On-disk layout of a sample.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct SampleFile {
    space: SpaceModel,
    mode: SampleMode,
    seed: u64,
    points: Vec<Point>,
}

impl TryFrom<SampleFile> for SampleSet {
    type Error = Error;

    fn try_from(file: SampleFile) -> Result<Self> {
        SampleSet::new(file.space, file.mode, file.seed, file.points)
    }
}

impl From<SampleSet> for SampleFile {
    fn from(s: SampleSet) -> Self {
        SampleFile { space: s.space, mode: s.mode, seed: s.seed, points: s.points }
    }
}

impl SampleSet {
    /// Validates coordinates, `n >= 2`, and that some pair is at positive
    /// distance.
    pub fn new(space: SpaceModel, mode: SampleMode, seed: u64, points: Vec<Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Argument(format!(
                "sample size must be at least 2, got {}",
                points.len()
            )));
        }
        for p in &points {
            space.validate(p)?;
        }
        let first = &points[0];
        if points.iter().all(|p| space.distance_unchecked(first, p) == 0.0) {
            return Err(Error::DegenerateSample);
        }
        Ok(Self { space, mode, seed, points })
    }

    pub fn space(&self) -> &SpaceModel {
        &self.space
    }

    pub fn mode(&self) -> SampleMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ground-truth distance between two point ids.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.space.distance_unchecked(&self.points[i], &self.points[j])
    }

    pub fn distance_matrix(&self) -> SquareMatrix {
        let n = self.len();
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                m.set_symmetric(i, j, self.distance(i, j));
            }
        }
        m
    }
}
